fn main() {
    std::process::exit(scma::cli::run(std::env::args_os()));
}
