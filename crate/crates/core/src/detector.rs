//! Common detector interface used by the iterative receiver.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{posterior_llr, DiscreteBelief, PriorSet};
use crate::channel::{ChannelRealization, ReceivedBlock};
use crate::codebook::{Codebook, FactorGraph};
use crate::epa::{epa_decode, EpaOptions};
use crate::reference::mpa_decode;

#[derive(Debug, Error, PartialEq)]
pub enum DetectError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("joint space of {combinations} codeword combinations exceeds the limit {limit}")]
    EnumerationTooLarge { combinations: u128, limit: u128 },
    #[error("iteration count must be at least 1")]
    Iterations,
    #[error("invalid detector option: {0}")]
    Options(String),
}

pub(crate) fn check_inputs(
    y: &ReceivedBlock,
    chan: &ChannelRealization,
    priors: &PriorSet,
    cb: &Codebook,
) -> Result<(), DetectError> {
    if chan.users() != cb.users() || chan.resources() != cb.resources() {
        return Err(DetectError::Dimension(format!(
            "channel is K={} N={}, codebook is K={} N={}",
            chan.users(),
            chan.resources(),
            cb.users(),
            cb.resources()
        )));
    }
    if y.antennas() != chan.antennas() || y.resources() != chan.resources() {
        return Err(DetectError::Dimension(format!(
            "observation is {}x{}, channel expects {}x{}",
            y.antennas(),
            y.resources(),
            chan.antennas(),
            chan.resources()
        )));
    }
    if priors.users() != cb.users() || priors.bits() != cb.bits_per_codeword() {
        return Err(DetectError::Dimension(format!(
            "priors cover {}x{} bits, codebook needs {}x{}",
            priors.users(),
            priors.bits(),
            cb.users(),
            cb.bits_per_codeword()
        )));
    }
    Ok(())
}

/// Soft output of one detector call.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub beliefs: Vec<DiscreteBelief>,
    /// Posterior LLRs, user-major, `J` per user.
    pub llrs: Vec<f64>,
    pub iterations: usize,
}

/// An SCMA multi-user detector producing posterior LLRs from priors.
pub trait Detector {
    fn detect(
        &self,
        y: &ReceivedBlock,
        chan: &ChannelRealization,
        priors: &PriorSet,
        cb: &Codebook,
        fg: &FactorGraph,
    ) -> Result<Detection, DetectError>;
}

fn llrs_of(beliefs: &[DiscreteBelief], bits: usize) -> Vec<f64> {
    beliefs.iter().flat_map(|b| posterior_llr(b, bits)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct Mpa {
    pub iterations: usize,
}

impl Detector for Mpa {
    fn detect(
        &self,
        y: &ReceivedBlock,
        chan: &ChannelRealization,
        priors: &PriorSet,
        cb: &Codebook,
        fg: &FactorGraph,
    ) -> Result<Detection, DetectError> {
        let out = mpa_decode(y, chan, priors, cb, fg, self.iterations)?;
        Ok(Detection {
            llrs: llrs_of(&out.beliefs, cb.bits_per_codeword()),
            beliefs: out.beliefs,
            iterations: self.iterations,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Epa {
    pub options: EpaOptions,
}

impl Detector for Epa {
    fn detect(
        &self,
        y: &ReceivedBlock,
        chan: &ChannelRealization,
        priors: &PriorSet,
        cb: &Codebook,
        fg: &FactorGraph,
    ) -> Result<Detection, DetectError> {
        let out = epa_decode(y, chan, priors, cb, fg, &self.options)?;
        Ok(Detection {
            beliefs: out.beliefs,
            llrs: out.llrs,
            iterations: self.options.n_in,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Mpa,
    Epa,
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorKind::Mpa => "mpa",
            DetectorKind::Epa => "epa",
        })
    }
}
