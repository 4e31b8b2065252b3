//! Command-line front end. Exit codes: 0 success, 1 validation or runtime
//! failure, 2 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{CommandFactory, Parser, Subcommand};

use crate::codebook::{default_codebook, Codebook};
use crate::complexity::{complexity_order, format_sig3, ComplexityProfile, Receiver};
use crate::sim::{emit_csv, run_sweep, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "scma", version, about = "Uplink SCMA link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a BER/BLER sweep described by a JSON config and write CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dominant-term complexity orders as CSV.
    Complexity {
        #[arg(long, default_value_t = 4)]
        nr: u32,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 12)]
        k: u32,
        #[arg(long, default_value_t = 9)]
        niter: u32,
        /// Iterations for SIC-MPA; defaults to --niter.
        #[arg(long)]
        niter_sic: Option<u32>,
        #[arg(long, default_value_t = 6)]
        df: u32,
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 3)]
        mp: u32,
        #[arg(long, default_value_t = 3)]
        ds: u32,
        /// One of mmse_sic, mpa, sic_mpa, epa. All four when omitted.
        #[arg(long)]
        receiver: Option<Receiver>,
    },
    /// Check a codebook JSON file.
    ValidateCodebook { file: PathBuf },
    /// Write the generated regular codebook as JSON.
    GenCodebook {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    EXIT_USAGE
}

fn invalid(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INVALID
}

pub const COMPLEXITY_HEADER: &str = "receiver,n_r,n,k,n_iter,m,m_p,d_f,d_s,order,pct_of_mmse_sic,pct_of_mpa";

fn complexity_rows(base: ComplexityProfile, niter_sic: u32, receivers: &[Receiver]) -> Result<String, String> {
    let profile_for = |r: Receiver| match r {
        Receiver::SicMpa => ComplexityProfile { n_iter: niter_sic, ..base },
        _ => base,
    };
    let order = |r: Receiver| complexity_order(&profile_for(r), r).map_err(|e| e.to_string());
    let mmse = order(Receiver::MmseSic)?;
    let mpa = order(Receiver::Mpa)?;
    let mut out = String::from(COMPLEXITY_HEADER);
    out.push('\n');
    for &r in receivers {
        let p = profile_for(r);
        let o = order(r)?;
        let pct = |den: u128| format_sig3(o as f64 / den as f64 * 100.0);
        out.push_str(&format!(
            "{r},{},{},{},{},{},{},{},{},{o},{},{}\n",
            p.n_r,
            p.n,
            p.k,
            p.n_iter,
            p.m,
            p.m_p,
            p.d_f,
            p.d_s,
            pct(mmse),
            pct(mpa)
        ));
    }
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Simulate { config, out } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return invalid(format!("cannot read {}: {e}", config.display())),
            };
            let cfg = match SimConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => return usage_error(format!("bad config {}: {e}", config.display())),
            };
            match run_sweep(&cfg).and_then(|r| emit_csv(&r, &out)) {
                Ok(()) => EXIT_OK,
                Err(e) => invalid(e),
            }
        }
        Command::Complexity {
            nr,
            n,
            k,
            niter,
            niter_sic,
            df,
            m,
            mp,
            ds,
            receiver,
        } => {
            let base = ComplexityProfile {
                n_r: nr,
                n,
                k,
                n_iter: niter,
                m,
                m_p: mp,
                d_f: df,
                d_s: ds,
            };
            let receivers = receiver.map_or(Receiver::ALL.to_vec(), |r| vec![r]);
            match complexity_rows(base, niter_sic.unwrap_or(niter), &receivers) {
                Ok(csv) => {
                    print!("{csv}");
                    EXIT_OK
                }
                Err(e) => invalid(e),
            }
        }
        Command::ValidateCodebook { file } => match Codebook::load(&file) {
            Ok(cb) => {
                println!("ok: K={} N={} M={}", cb.users(), cb.resources(), cb.size());
                EXIT_OK
            }
            Err(e) => invalid(e),
        },
        Command::GenCodebook { k, n, m, dv, out } => {
            match default_codebook(k, n, m, dv).and_then(|cb| cb.save(&out)) {
                Ok(()) => EXIT_OK,
                Err(e) => invalid(e),
            }
        }
    }
}
