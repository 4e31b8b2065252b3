//! Dominant-term complexity orders per receiver type, and an arithmetic
//! counter for instrumented decodes. The two are deliberately unrelated:
//! orders are closed-form, counts are measured.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::probe::{Op, Probe, Stage};

#[derive(Debug, Error, PartialEq)]
pub enum ComplexityError {
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("complexity order overflows 128 bits")]
    Overflow,
    #[error("unknown receiver `{0}` (expected mmse_sic, mpa, sic_mpa or epa)")]
    UnknownReceiver(String),
}

/// Parameters entering the complexity orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub n_r: u32,
    pub n: u32,
    pub k: u32,
    pub n_iter: u32,
    pub m: u32,
    /// Projection points per constellation dimension, `M_p <= M`.
    pub m_p: u32,
    pub d_f: u32,
    /// Collision degree kept by SIC-MPA, `1 <= d_s <= d_f`.
    pub d_s: u32,
}

impl ComplexityProfile {
    pub fn validate(&self) -> Result<(), ComplexityError> {
        let fields = [
            ("N_r", self.n_r),
            ("N", self.n),
            ("K", self.k),
            ("N_iter", self.n_iter),
            ("M", self.m),
            ("M_p", self.m_p),
            ("d_f", self.d_f),
            ("d_s", self.d_s),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| *v == 0) {
            return Err(ComplexityError::Profile(format!("{name} must be positive")));
        }
        if self.m_p > self.m {
            return Err(ComplexityError::Profile(format!("M_p = {} exceeds M = {}", self.m_p, self.m)));
        }
        if self.d_s > self.d_f {
            return Err(ComplexityError::Profile(format!("d_s = {} exceeds d_f = {}", self.d_s, self.d_f)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    MmseSic,
    Mpa,
    SicMpa,
    Epa,
}

impl Receiver {
    pub const ALL: [Receiver; 4] = [Receiver::MmseSic, Receiver::Mpa, Receiver::SicMpa, Receiver::Epa];

    pub fn name(self) -> &'static str {
        match self {
            Receiver::MmseSic => "mmse_sic",
            Receiver::Mpa => "mpa",
            Receiver::SicMpa => "sic_mpa",
            Receiver::Epa => "epa",
        }
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Receiver {
    type Err = ComplexityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Receiver::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| ComplexityError::UnknownReceiver(s.to_string()))
    }
}

fn product(factors: &[u128]) -> Result<u128, ComplexityError> {
    factors
        .iter()
        .try_fold(1u128, |acc, &f| acc.checked_mul(f))
        .ok_or(ComplexityError::Overflow)
}

/// Dominant-term complexity order:
///
/// | receiver | order |
/// |---|---|
/// | MMSE-SIC | `N_r^3 N^3 K` |
/// | MPA | `N_iter N_r N M_p^d_f` |
/// | SIC-MPA | `N_iter N_r N M_p^d_s` |
/// | EPA | `N_iter N_r N M d_f` |
pub fn complexity_order(profile: &ComplexityProfile, receiver: Receiver) -> Result<u128, ComplexityError> {
    profile.validate()?;
    let p = profile;
    let pow = |base: u32, exp: u32| (base as u128).checked_pow(exp).ok_or(ComplexityError::Overflow);
    let base = [p.n_iter as u128, p.n_r as u128, p.n as u128];
    match receiver {
        Receiver::MmseSic => product(&[pow(p.n_r, 3)?, pow(p.n, 3)?, p.k as u128]),
        Receiver::Mpa => product(&[product(&base)?, pow(p.m_p, p.d_f)?]),
        Receiver::SicMpa => product(&[product(&base)?, pow(p.m_p, p.d_s)?]),
        Receiver::Epa => product(&[product(&base)?, p.m as u128, p.d_f as u128]),
    }
}

/// `order(receiver) / order(baseline)` in percent.
pub fn complexity_ratio(
    profile: &ComplexityProfile,
    receiver: Receiver,
    baseline: Receiver,
) -> Result<f64, ComplexityError> {
    let num = complexity_order(profile, receiver)?;
    let den = complexity_order(profile, baseline)?;
    Ok(num as f64 / den as f64 * 100.0)
}

/// Rounds to three significant figures and prints without exponent,
/// e.g. `14.1`, `1.17`, `285`, `0.0181`.
pub fn format_sig3(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let digits = |v: f64| (2 - v.abs().log10().floor() as i32).max(0) as usize;
    let mut decimals = digits(value);
    let rounded: f64 = format!("{value:.decimals$}").parse().unwrap_or(value);
    // rounding can carry into a new leading digit (99.96 -> 100.0)
    if rounded != 0.0 {
        decimals = digits(rounded);
    }
    format!("{value:.decimals$}")
}

/// Arithmetic tallies of an instrumented decode, split by stage.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct OpCounter {
    counts: [[u64; 5]; 6],
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self, op: Op) -> u64 {
        self.counts.iter().map(|row| row[op.index()]).sum()
    }

    pub fn stage(&self, stage: Stage, op: Op) -> u64 {
        self.counts[stage.index()][op.index()]
    }

    /// All operations of one stage.
    pub fn stage_total(&self, stage: Stage) -> u64 {
        self.counts[stage.index()].iter().sum()
    }

    pub fn multiplies(&self) -> u64 {
        self.total(Op::Mul)
    }

    pub fn adds(&self) -> u64 {
        self.total(Op::Add)
    }

    pub fn divisions(&self) -> u64 {
        self.total(Op::Div)
    }

    pub fn exponentials(&self) -> u64 {
        self.total(Op::Exp)
    }
}

impl Probe for OpCounter {
    #[inline]
    fn count(&mut self, stage: Stage, op: Op, n: u64) {
        self.counts[stage.index()][op.index()] += n;
    }
}

/// Runs `decode` with a fresh counter and returns its result with the tally.
///
/// ```
/// use scma::complexity::measure_ops;
/// use scma::prelude::*;
///
/// let cb = default_codebook(6, 4, 4, 2).unwrap();
/// let fg = FactorGraph::new(&cb);
/// let ch = ChannelRealization::unit(1, 6, 4, 0.1).unwrap();
/// let y = ReceivedBlock::new(1, 4, vec![Default::default(); 4]).unwrap();
/// let (out, ops) = measure_ops(|c| {
///     epa_decode_probed(&y, &ch, &PriorSet::zeros(6, 2), &cb, &fg, &EpaOptions::default(), c)
/// });
/// assert!(out.is_ok() && ops.multiplies() > 0);
/// ```
pub fn measure_ops<R>(decode: impl FnOnce(&mut OpCounter) -> R) -> (R, OpCounter) {
    let mut counter = OpCounter::new();
    let out = decode(&mut counter);
    (out, counter)
}
