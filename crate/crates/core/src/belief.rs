//! Discrete beliefs over a user's codebook and the bit-level LLR views of them.

use crate::codebook::bit_of;
use crate::probe::{Op, Probe, Stage};

/// Magnitude bound applied to every LLR crossing a module boundary.
pub const LLR_CLIP: f64 = 30.0;

#[inline]
pub fn clip_llr(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(-LLR_CLIP, LLR_CLIP)
    }
}

/// Streaming `log(sum exp(v_i))` with a running maximum.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }
}

impl LogSumExp {
    #[inline]
    pub fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        } else {
            self.sum += (v - self.max).exp();
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Shifts log weights so they log-sum to zero. All `-inf` input becomes uniform.
pub fn log_normalize(weights: &mut [f64]) {
    let total = log_sum_exp(weights);
    if total.is_finite() {
        weights.iter_mut().for_each(|w| *w -= total);
    } else {
        let uniform = -(weights.len() as f64).ln();
        weights.iter_mut().for_each(|w| *w = uniform);
    }
}

/// Probability mass over the `M` codewords of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBelief(Vec<f64>);

impl DiscreteBelief {
    pub fn uniform(size: usize) -> Self {
        DiscreteBelief(vec![1.0 / size as f64; size])
    }

    /// Normalizes a probability vector. Panics on negative or non-finite mass.
    pub fn from_probs(mut probs: Vec<f64>) -> Self {
        assert!(probs.iter().all(|p| p.is_finite() && *p >= 0.0), "invalid probabilities");
        let total: f64 = probs.iter().sum();
        assert!(total > 0.0, "belief has no mass");
        probs.iter_mut().for_each(|p| *p /= total);
        DiscreteBelief(probs)
    }

    /// Exponentiates and normalizes log weights with max subtraction.
    pub fn from_log_weights(weights: &[f64]) -> Self {
        let mut w = weights.to_vec();
        log_normalize(&mut w);
        let mut probs: Vec<f64> = w.iter().map(|v| v.exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        DiscreteBelief(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Most probable codeword index; ties go to the lower index.
    pub fn map_index(&self) -> usize {
        let mut best = 0;
        for (m, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = m;
            }
        }
        best
    }

    pub fn max_prob(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// `sum_m |p_m - q_m| / 2`
    pub fn total_variation(&self, other: &DiscreteBelief) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &DiscreteBelief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A-priori LLRs `log P(c=1)/P(c=0)` per user and coded bit, clipped.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSet {
    users: usize,
    bits: usize,
    llrs: Vec<f64>,
}

impl PriorSet {
    pub fn zeros(users: usize, bits: usize) -> Self {
        PriorSet {
            users,
            bits,
            llrs: vec![0.0; users * bits],
        }
    }

    /// `llrs` is user-major; entries are clipped to `+-LLR_CLIP`, NaN reads as 0.
    pub fn from_llrs(users: usize, bits: usize, llrs: Vec<f64>) -> Self {
        assert_eq!(llrs.len(), users * bits, "prior length mismatch");
        PriorSet {
            users,
            bits,
            llrs: llrs.into_iter().map(clip_llr).collect(),
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn user(&self, k: usize) -> &[f64] {
        &self.llrs[k * self.bits..(k + 1) * self.bits]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.llrs
    }
}

/// Normalized log prior over codeword indices,
/// `log p[m] = sum_j c_j(m) lambda_j - sum_j log(1 + e^lambda_j)`.
pub(crate) fn prior_log_probs<P: Probe>(llrs: &[f64], size: usize, probe: &mut P) -> Vec<f64> {
    let bits = llrs.len();
    let mut out: Vec<f64> = (0..size)
        .map(|m| {
            (0..bits)
                .filter(|&j| bit_of(m, j, bits) == 1)
                .map(|j| llrs[j])
                .sum()
        })
        .collect();
    probe.count(Stage::Prior, Op::Add, (size * bits) as u64);
    probe.count(Stage::Prior, Op::Exp, size as u64);
    log_normalize(&mut out);
    out
}

/// Prior belief over user `user`'s codewords implied by its fed-back LLRs.
pub fn prior_to_belief(priors: &PriorSet, user: usize, size: usize) -> DiscreteBelief {
    let log_p = prior_log_probs(priors.user(user), size, &mut crate::probe::NoProbe);
    DiscreteBelief::from_log_weights(&log_p)
}

/// Posterior LLR of each coded bit:
/// `log sum_{bit j = 1} p[m] - log sum_{bit j = 0} p[m]`, clipped.
pub fn posterior_llr(belief: &DiscreteBelief, bits: usize) -> Vec<f64> {
    posterior_llr_probed(belief, bits, &mut crate::probe::NoProbe)
}

pub(crate) fn posterior_llr_probed<P: Probe>(
    belief: &DiscreteBelief,
    bits: usize,
    probe: &mut P,
) -> Vec<f64> {
    let p = belief.probs();
    let llrs = (0..bits)
        .map(|j| {
            let (mut one, mut zero) = (0.0, 0.0);
            for (m, &pm) in p.iter().enumerate() {
                if bit_of(m, j, bits) == 1 {
                    one += pm;
                } else {
                    zero += pm;
                }
            }
            clip_llr(one.ln() - zero.ln())
        })
        .collect();
    probe.count(Stage::Llr, Op::Add, (p.len() * bits + bits) as u64);
    probe.count(Stage::Llr, Op::Log, 2 * bits as u64);
    llrs
}
