//! Monte Carlo BER/BLER sweeps.
//!
//! Every frame draws its randomness from its own ChaCha8 stream seeded with
//! `SHA-256(master_seed || snr_index || frame_index)` (each a little-endian
//! `u64`), so results do not depend on thread count or scheduling. Within a
//! frame the draw order is: information bits user by user, then per block
//! the channel gains followed by the noise.
//!
//! A frame is one outer-decoder codeword: a single SCMA block when uncoded,
//! `r` blocks under rate-1/r repetition. BER counts information bits; BLER
//! counts frames.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channel::{sample_channel, transmit, ChannelError, ChannelModel};
use crate::codebook::{default_codebook, Codebook, CodebookError, FactorGraph};
use crate::detector::{Detector, DetectorKind, Epa, Mpa};
use crate::epa::EpaOptions;
use crate::receiver::{run_receiver, Observation, PassthroughSiso, ReceiverError, RepetitionSiso, Siso};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Codebook(#[from] CodebookError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Receiver(#[from] ReceiverError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CodebookSource {
    File(PathBuf),
    Generate { k: usize, n: usize, m: usize, d_v: usize },
}

impl CodebookSource {
    pub fn load(&self) -> Result<Codebook, CodebookError> {
        match self {
            CodebookSource::File(path) => Codebook::load(path),
            CodebookSource::Generate { k, n, m, d_v } => default_codebook(*k, *n, *m, *d_v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SisoKind {
    Passthrough,
    Repetition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverConfig {
    pub detector: DetectorKind,
    /// Inner iterations: EPA rounds, or MPA flooding iterations.
    #[serde(default = "default_n_in")]
    pub n_in: usize,
    #[serde(default = "one")]
    pub n_out: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_siso")]
    pub siso: SisoKind,
    /// Repetition factor, used when `siso` is `repetition`.
    #[serde(default = "default_repetition")]
    pub repetition: usize,
}

fn default_n_in() -> usize {
    crate::epa::DEFAULT_INNER_ITERATIONS
}
fn one() -> usize {
    1
}
fn default_damping() -> f64 {
    1.0
}
fn default_siso() -> SisoKind {
    SisoKind::Passthrough
}
fn default_repetition() -> usize {
    2
}
fn default_max_bit_errors() -> u64 {
    200
}

impl ReceiverConfig {
    pub fn new(detector: DetectorKind) -> Self {
        ReceiverConfig {
            detector,
            n_in: default_n_in(),
            n_out: 1,
            damping: 1.0,
            siso: SisoKind::Passthrough,
            repetition: default_repetition(),
        }
    }

    fn detector(&self) -> Box<dyn Detector + Sync> {
        match self.detector {
            DetectorKind::Mpa => Box::new(Mpa { iterations: self.n_in }),
            DetectorKind::Epa => Box::new(Epa {
                options: EpaOptions {
                    n_in: self.n_in,
                    damping: self.damping,
                    ..EpaOptions::default()
                },
            }),
        }
    }

    fn siso(&self) -> Result<Box<dyn Siso>, ReceiverError> {
        Ok(match self.siso {
            SisoKind::Passthrough => Box::new(PassthroughSiso),
            SisoKind::Repetition => Box::new(RepetitionSiso::new(self.repetition)?),
        })
    }

    /// SCMA blocks per frame.
    pub fn blocks_per_frame(&self) -> usize {
        match self.siso {
            SisoKind::Passthrough => 1,
            SisoKind::Repetition => self.repetition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub codebook: CodebookSource,
    pub channel: ChannelModel,
    pub n_rx: usize,
    pub snr_db: Vec<f64>,
    pub receiver: ReceiverConfig,
    /// Cap on SCMA blocks per SNR point.
    pub max_blocks: u64,
    /// A point stops once this many bit errors have been seen.
    #[serde(default = "default_max_bit_errors")]
    pub max_bit_errors: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.snr_db.is_empty() {
            return fail("SNR grid is empty");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return fail("SNR grid contains a non-finite value");
        }
        if self.max_blocks == 0 {
            return fail("max_blocks must be at least 1");
        }
        if self.max_bit_errors == 0 {
            return fail("max_bit_errors must be at least 1");
        }
        if self.n_rx == 0 {
            return fail("n_rx must be at least 1");
        }
        let r = &self.receiver;
        if r.n_in == 0 || r.n_out == 0 {
            return fail("n_in and n_out must be at least 1");
        }
        if !(r.damping > 0.0 && r.damping <= 1.0) {
            return fail("damping must lie in (0, 1]");
        }
        if r.siso == SisoKind::Repetition && r.repetition == 0 {
            return fail("repetition factor must be at least 1");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Noise variance for a per-user SNR in dB: `sigma^2 = d_v / (N 10^(snr/10))`
/// with `d_v` the mean user degree.
pub fn noise_var_for_snr(snr_db: f64, fg: &FactorGraph) -> f64 {
    fg.mean_user_degree() / (fg.resources() as f64 * 10f64.powf(snr_db / 10.0))
}

/// Seed of frame `frame_index` at SNR point `snr_index`.
pub fn frame_seed(master: u64, snr_index: u64, frame_index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(snr_index.to_le_bytes());
    h.update(frame_index.to_le_bytes());
    h.finalize().into()
}

pub fn frame_rng(master: u64, snr_index: u64, frame_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(frame_seed(master, snr_index, frame_index))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub noise_var: f64,
    pub frames: u64,
    pub blocks: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub block_errors: u64,
    pub ber: f64,
    pub bler: f64,
    /// Detector iterations per SCMA block, summed over outer passes.
    pub mean_iters: f64,
    pub seconds: f64,
}

impl SnrPoint {
    /// Everything except wall-clock time.
    pub fn same_counts(&self, other: &SnrPoint) -> bool {
        SnrPoint {
            seconds: 0.0,
            ..self.clone()
        } == SnrPoint {
            seconds: 0.0,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimResult {
    pub points: Vec<SnrPoint>,
}

#[derive(Debug, Default, Clone, Copy)]
struct FrameStats {
    bits: u64,
    bit_errors: u64,
    iterations: u64,
}

struct Link<'a> {
    cfg: &'a SimConfig,
    cb: &'a Codebook,
    fg: &'a FactorGraph,
    detector: &'a (dyn Detector + Sync),
    siso: &'a dyn Siso,
}

impl Link<'_> {
    fn frame(&self, snr_index: u64, frame_index: u64, noise_var: f64) -> Result<FrameStats, SimError> {
        let (k_users, n, bits) = (self.cb.users(), self.cb.resources(), self.cb.bits_per_codeword());
        let blocks = self.cfg.receiver.blocks_per_frame();
        let mut rng = frame_rng(self.cfg.seed, snr_index, frame_index);
        let info_len = self.siso.info_len(blocks * bits)?;
        let info: Vec<Vec<u8>> = (0..k_users)
            .map(|_| (0..info_len).map(|_| u8::from(rng.random::<bool>())).collect())
            .collect();
        let coded: Vec<Vec<u8>> = info.iter().map(|i| self.siso.encode(i)).collect();

        let mut frame = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let mut stacked = Vec::with_capacity(k_users * n);
            for (k, c) in coded.iter().enumerate() {
                stacked.extend_from_slice(self.cb.encode(&c[b * bits..(b + 1) * bits], k)?);
            }
            let chan = sample_channel(self.cfg.channel, self.cfg.n_rx, k_users, n, noise_var, &mut rng)?;
            let y = transmit(&stacked, &chan, &mut rng)?;
            frame.push(Observation { y, chan });
        }
        let out = run_receiver(&frame, self.cb, self.fg, self.detector, self.siso, self.cfg.receiver.n_out)?;
        let bit_errors = out
            .bits
            .iter()
            .zip(&info)
            .map(|(got, want)| got.iter().zip(want).filter(|(a, b)| a != b).count() as u64)
            .sum();
        Ok(FrameStats {
            bits: (k_users * info_len) as u64,
            bit_errors,
            iterations: out.detector_iterations as u64,
        })
    }
}

/// Frames simulated concurrently between stop-condition checks.
const CHUNK_FRAMES: u64 = 256;

pub fn run_sweep(cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let cb = cfg.codebook.load()?;
    run_sweep_with(cfg, &cb)
}

/// As [`run_sweep`], with the codebook supplied by the caller.
pub fn run_sweep_with(cfg: &SimConfig, cb: &Codebook) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let fg = FactorGraph::new(cb);
    let detector = cfg.receiver.detector();
    let siso = cfg.receiver.siso()?;
    let link = Link {
        cfg,
        cb,
        fg: &fg,
        detector: detector.as_ref(),
        siso: siso.as_ref(),
    };
    let blocks_per_frame = cfg.receiver.blocks_per_frame() as u64;
    let max_frames = cfg.max_blocks.div_ceil(blocks_per_frame);

    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
        let start = Instant::now();
        let noise_var = noise_var_for_snr(snr_db, &fg);
        let (mut frames, mut bits, mut bit_errors, mut block_errors, mut iterations) = (0u64, 0, 0, 0, 0);
        'point: while frames < max_frames {
            let end = (frames + CHUNK_FRAMES).min(max_frames);
            let stats: Vec<FrameStats> = (frames..end)
                .into_par_iter()
                .map(|f| link.frame(si as u64, f, noise_var))
                .collect::<Result<_, _>>()?;
            for s in stats {
                frames += 1;
                bits += s.bits;
                bit_errors += s.bit_errors;
                block_errors += u64::from(s.bit_errors > 0);
                iterations += s.iterations;
                if bit_errors >= cfg.max_bit_errors {
                    break 'point;
                }
            }
        }
        let blocks = frames * blocks_per_frame;
        points.push(SnrPoint {
            snr_db,
            noise_var,
            frames,
            blocks,
            bits,
            bit_errors,
            block_errors,
            ber: bit_errors as f64 / bits as f64,
            bler: block_errors as f64 / frames as f64,
            mean_iters: iterations as f64 / blocks as f64,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(SimResult { points })
}

pub const CSV_HEADER: &str = "snr_db,blocks,bits,bit_errors,block_errors,ber,bler,mean_iters,seconds";

/// CSV text of a sweep. Numbers use Rust's shortest round-trip decimal
/// formatting, so the output is locale independent and never uses exponents.
pub fn to_csv(result: &SimResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.snr_db, p.blocks, p.bits, p.bit_errors, p.block_errors, p.ber, p.bler, p.mean_iters, p.seconds
        ));
    }
    out
}

pub fn emit_csv(result: &SimResult, path: impl AsRef<Path>) -> Result<(), SimError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(to_csv(result).as_bytes())?;
    Ok(())
}
