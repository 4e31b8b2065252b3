//! Outer loop exchanging extrinsic LLRs between a detector and a soft-in
//! soft-out outer decoder.
//!
//! A frame is a run of SCMA blocks. Per user, coded bit `j` of block `b`
//! sits at index `b * J + j` of every LLR vector. Positive LLRs favour bit 1;
//! an LLR of exactly zero decides bit 0.

use thiserror::Error;

use crate::belief::{clip_llr, PriorSet};
use crate::channel::{ChannelRealization, ReceivedBlock};
use crate::codebook::{Codebook, FactorGraph};
use crate::detector::{DetectError, Detector};

#[derive(Debug, Error, PartialEq)]
pub enum ReceiverError {
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error("frame of {len} coded bits is not a multiple of the repetition factor {factor}")]
    FrameLength { len: usize, factor: usize },
    #[error("repetition factor must be at least 1")]
    RepetitionFactor,
    #[error("frame holds no blocks")]
    EmptyFrame,
    #[error("outer iteration count must be at least 1")]
    Iterations,
}

#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr > 0.0)
}

/// Soft-in/soft-out outer decoder.
///
/// `extrinsic` must not feed an input LLR back into its own position.
pub trait Siso: Sync {
    /// Information bits carried by `coded` coded bits.
    fn info_len(&self, coded: usize) -> Result<usize, ReceiverError>;

    /// Maps information bits to coded bits.
    fn encode(&self, info: &[u8]) -> Vec<u8>;

    /// Refreshed priors from the detector's extrinsic LLRs.
    fn extrinsic(&self, detector_extrinsic: &[f64]) -> Result<Vec<f64>, ReceiverError>;

    /// Information-bit decisions at the end of the loop.
    fn decide(&self, posterior: &[f64], detector_extrinsic: &[f64]) -> Result<Vec<u8>, ReceiverError>;
}

/// Uncoded operation: no new prior information, decisions from the
/// detector's posterior.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassthroughSiso;

impl Siso for PassthroughSiso {
    fn info_len(&self, coded: usize) -> Result<usize, ReceiverError> {
        Ok(coded)
    }

    fn encode(&self, info: &[u8]) -> Vec<u8> {
        info.to_vec()
    }

    fn extrinsic(&self, detector_extrinsic: &[f64]) -> Result<Vec<f64>, ReceiverError> {
        Ok(vec![0.0; detector_extrinsic.len()])
    }

    fn decide(&self, posterior: &[f64], _detector_extrinsic: &[f64]) -> Result<Vec<u8>, ReceiverError> {
        Ok(posterior.iter().map(|&l| hard_decision(l)).collect())
    }
}

/// Rate-1/r repetition code. Copy `i` of information bit `b` is coded bit
/// `i * (len / r) + b`, so with `r` blocks per frame each block carries one
/// full copy.
#[derive(Debug, Clone, Copy)]
pub struct RepetitionSiso {
    factor: usize,
}

impl RepetitionSiso {
    pub fn new(factor: usize) -> Result<Self, ReceiverError> {
        if factor == 0 {
            return Err(ReceiverError::RepetitionFactor);
        }
        Ok(RepetitionSiso { factor })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    fn sums(&self, llr: &[f64]) -> Result<Vec<f64>, ReceiverError> {
        let info = self.info_len(llr.len())?;
        Ok((0..info)
            .map(|b| (0..self.factor).map(|i| llr[i * info + b]).sum())
            .collect())
    }
}

impl Siso for RepetitionSiso {
    fn info_len(&self, coded: usize) -> Result<usize, ReceiverError> {
        if coded % self.factor != 0 {
            return Err(ReceiverError::FrameLength {
                len: coded,
                factor: self.factor,
            });
        }
        Ok(coded / self.factor)
    }

    fn encode(&self, info: &[u8]) -> Vec<u8> {
        info.repeat(self.factor)
    }

    /// Copy `i` receives the sum of all other copies.
    fn extrinsic(&self, detector_extrinsic: &[f64]) -> Result<Vec<f64>, ReceiverError> {
        let info = self.info_len(detector_extrinsic.len())?;
        Ok((0..detector_extrinsic.len())
            .map(|c| {
                let (copy, bit) = (c / info, c % info);
                (0..self.factor)
                    .filter(|&i| i != copy)
                    .map(|i| detector_extrinsic[i * info + bit])
                    .sum()
            })
            .collect())
    }

    fn decide(&self, _posterior: &[f64], detector_extrinsic: &[f64]) -> Result<Vec<u8>, ReceiverError> {
        Ok(self.sums(detector_extrinsic)?.into_iter().map(hard_decision).collect())
    }
}

/// One block's observation with the channel that produced it.
#[derive(Debug, Clone)]
pub struct Observation {
    pub y: ReceivedBlock,
    pub chan: ChannelRealization,
}

/// LLRs at one exchange point, `[user][coded bit]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub posterior: Vec<Vec<f64>>,
    /// `clip(posterior - prior)`
    pub extrinsic: Vec<Vec<f64>>,
    /// Priors the detector was given on this pass.
    pub prior: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverOutput {
    /// Information-bit decisions per user.
    pub bits: Vec<Vec<u8>>,
    pub history: Vec<LlrFrame>,
    /// Detector iterations summed over blocks and outer passes.
    pub detector_iterations: usize,
}

pub fn run_receiver(
    frame: &[Observation],
    cb: &Codebook,
    fg: &FactorGraph,
    detector: &dyn Detector,
    siso: &dyn Siso,
    n_out: usize,
) -> Result<ReceiverOutput, ReceiverError> {
    if frame.is_empty() {
        return Err(ReceiverError::EmptyFrame);
    }
    if n_out == 0 {
        return Err(ReceiverError::Iterations);
    }
    let (users, bits) = (cb.users(), cb.bits_per_codeword());
    let coded = frame.len() * bits;
    siso.info_len(coded)?;

    let mut prior = vec![vec![0.0; coded]; users];
    let mut history = Vec::with_capacity(n_out);
    let mut detector_iterations = 0;
    for pass in 0..n_out {
        let mut posterior = vec![vec![0.0; coded]; users];
        for (b, obs) in frame.iter().enumerate() {
            let block_prior: Vec<f64> = prior
                .iter()
                .flat_map(|p| p[b * bits..(b + 1) * bits].iter().copied())
                .collect();
            let priors = PriorSet::from_llrs(users, bits, block_prior);
            let det = detector.detect(&obs.y, &obs.chan, &priors, cb, fg)?;
            detector_iterations += det.iterations;
            for k in 0..users {
                posterior[k][b * bits..(b + 1) * bits].copy_from_slice(&det.llrs[k * bits..(k + 1) * bits]);
            }
        }
        let extrinsic: Vec<Vec<f64>> = posterior
            .iter()
            .zip(&prior)
            .map(|(post, pri)| post.iter().zip(pri).map(|(l, p)| clip_llr(l - p)).collect())
            .collect();
        let next_prior = if pass + 1 < n_out {
            extrinsic
                .iter()
                .map(|e| Ok(siso.extrinsic(e)?.into_iter().map(clip_llr).collect()))
                .collect::<Result<Vec<Vec<f64>>, ReceiverError>>()?
        } else {
            Vec::new()
        };
        history.push(LlrFrame {
            posterior,
            extrinsic,
            prior: std::mem::replace(&mut prior, next_prior),
        });
    }
    let last = history.last().expect("at least one pass");
    let bits = last
        .posterior
        .iter()
        .zip(&last.extrinsic)
        .map(|(post, ext)| siso.decide(post, ext))
        .collect::<Result<_, _>>()?;
    Ok(ReceiverOutput {
        bits,
        history,
        detector_iterations,
    })
}
