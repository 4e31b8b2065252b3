//! Expectation-propagation SCMA detection.
//!
//! Messages between a user and a resource element are scalar complex
//! Gaussians on `x_{k,n}`, one per receive antenna. Each inner iteration
//! runs four steps in order:
//!
//! 1. discrete posterior over the user's codebook from the prior and all
//!    incoming resource messages,
//! 2. Gaussian projection (mean and variance) of that posterior on every
//!    active resource,
//! 3. cavity division of the projection by the incoming message, giving the
//!    user-to-resource messages,
//! 4. soft interference cancellation at each resource element, giving the
//!    resource-to-user messages.
//!
//! Resource messages start at `(0, MAX)`. The returned belief is formed
//! from the messages of the last inner iteration.

use num_complex::Complex64;

use crate::belief::{posterior_llr_probed, prior_log_probs, DiscreteBelief, PriorSet};
use crate::channel::{ChannelRealization, ReceivedBlock};
use crate::codebook::{Codebook, FactorGraph};
use crate::detector::{check_inputs, DetectError};
use crate::probe::{Edge, EdgeId, NoProbe, Op, Probe, Stage, FINAL_ITERATION};

pub const DEFAULT_INNER_ITERATIONS: usize = 3;
pub const DEFAULT_MAX_VARIANCE: f64 = 1000.0;
pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-12;
pub const DEFAULT_GAIN_FLOOR: f64 = 1e-8;

/// Scalar complex Gaussian `CN(mean, var)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMessage {
    pub mean: Complex64,
    pub var: f64,
}

impl GaussianMessage {
    pub fn new(mean: Complex64, var: f64) -> Self {
        GaussianMessage { mean, var }
    }

    /// Zero mean at the maximum variance: carries no information.
    pub fn uninformative(max_var: f64) -> Self {
        GaussianMessage {
            mean: Complex64::new(0.0, 0.0),
            var: max_var,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.mean.re.is_finite() && self.mean.im.is_finite() && self.var.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaOptions {
    pub n_in: usize,
    /// Weight of the fresh user-to-resource message when mixing with the
    /// previous one in natural parameters. `1.0` disables damping.
    pub damping: f64,
    pub max_var: f64,
    /// Message variances stay strictly above this value.
    pub eps_var: f64,
    /// Gains with modulus at or below this erase the observation.
    pub eps_gain: f64,
}

impl Default for EpaOptions {
    fn default() -> Self {
        EpaOptions {
            n_in: DEFAULT_INNER_ITERATIONS,
            damping: 1.0,
            max_var: DEFAULT_MAX_VARIANCE,
            eps_var: DEFAULT_VARIANCE_FLOOR,
            eps_gain: DEFAULT_GAIN_FLOOR,
        }
    }
}

impl EpaOptions {
    pub fn validate(&self) -> Result<(), DetectError> {
        if self.n_in == 0 {
            return Err(DetectError::Iterations);
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(DetectError::Options(format!("damping {} outside (0, 1]", self.damping)));
        }
        if !(self.eps_var > 0.0 && self.max_var.is_finite() && self.max_var > self.eps_var) {
            return Err(DetectError::Options(format!(
                "variance bounds ({}, {}] are not a valid interval",
                self.eps_var, self.max_var
            )));
        }
        if !(self.eps_gain >= 0.0 && self.eps_gain.is_finite()) {
            return Err(DetectError::Options(format!("gain floor {} invalid", self.eps_gain)));
        }
        Ok(())
    }

    /// Smallest variance a message may carry, the first double above `eps_var`.
    fn var_floor(&self) -> f64 {
        self.eps_var.next_up()
    }
}

/// Gaussian projection of a user's discrete belief onto resource `resource`:
/// `mu = sum_m p_m a_m`, `xi = sum_m p_m |a_m - mu|^2`. The variance is not
/// floored here.
pub fn moment_match(belief: &DiscreteBelief, cb: &Codebook, user: usize, resource: usize) -> GaussianMessage {
    moment_match_probed(belief.probs(), cb, user, resource, &mut NoProbe)
}

fn moment_match_probed<P: Probe>(
    probs: &[f64],
    cb: &Codebook,
    user: usize,
    resource: usize,
    probe: &mut P,
) -> GaussianMessage {
    let mut mean = Complex64::new(0.0, 0.0);
    for (m, &p) in probs.iter().enumerate() {
        mean += cb.entry(user, m, resource) * p;
    }
    let mut var = 0.0;
    for (m, &p) in probs.iter().enumerate() {
        var += p * (cb.entry(user, m, resource) - mean).norm_sqr();
    }
    let size = probs.len() as u64;
    probe.count(Stage::Moments, Op::Mul, 3 * size);
    probe.count(Stage::Moments, Op::Add, 4 * size);
    GaussianMessage { mean, var }
}

/// Cavity division: divides the projected posterior by the resource message
/// that produced it.
///
/// `posterior.var` is floored at `eps_var` first. A non-positive,
/// non-finite or above-`max_var` cavity variance yields
/// `(posterior.mean, max_var)`. With `previous` set and damping below one,
/// the result is mixed with `previous` in natural parameters.
pub fn vn_to_fn(
    posterior: GaussianMessage,
    incoming: GaussianMessage,
    previous: Option<GaussianMessage>,
    opts: &EpaOptions,
) -> GaussianMessage {
    vn_to_fn_probed(posterior, incoming, previous, opts, &mut NoProbe)
}

fn vn_to_fn_probed<P: Probe>(
    posterior: GaussianMessage,
    incoming: GaussianMessage,
    previous: Option<GaussianMessage>,
    opts: &EpaOptions,
    probe: &mut P,
) -> GaussianMessage {
    let post_var = posterior.var.max(opts.eps_var);
    let precision = 1.0 / post_var - 1.0 / incoming.var;
    let var = 1.0 / precision;
    let mean = (posterior.mean / post_var - incoming.mean / incoming.var) * var;
    probe.count(Stage::VariableUpdate, Op::Div, 5);
    probe.count(Stage::VariableUpdate, Op::Add, 2);
    probe.count(Stage::VariableUpdate, Op::Mul, 1);

    let mut out = GaussianMessage { mean, var };
    if !(var > 0.0 && var <= opts.max_var && out.is_finite()) {
        out = GaussianMessage::new(posterior.mean, opts.max_var);
    }
    match previous {
        Some(prev) if opts.damping < 1.0 => {
            let w = opts.damping;
            let prec = w / out.var + (1.0 - w) / prev.var;
            let shift = out.mean * (w / out.var) + prev.mean * ((1.0 - w) / prev.var);
            probe.count(Stage::VariableUpdate, Op::Div, 5);
            probe.count(Stage::VariableUpdate, Op::Mul, 4);
            probe.count(Stage::VariableUpdate, Op::Add, 2);
            GaussianMessage::new(shift / prec, 1.0 / prec)
        }
        _ => out,
    }
}

/// Soft interference cancellation at one resource element of one antenna,
/// evaluated directly for the user at position `target` of `F(n)`:
///
/// `mu = (y - sum_{l != k} h_l mu_l) / h_k`,
/// `xi = (sigma^2 + sum_{l != k} |h_l|^2 xi_l) / |h_k|^2`.
///
/// A gain at or below `eps_gain` gives `(0, max_var)`, as does a variance
/// above `max_var`; variances below the floor are raised to it.
pub fn fn_to_vn(
    y: Complex64,
    gains: &[Complex64],
    incoming: &[GaussianMessage],
    noise_var: f64,
    target: usize,
    opts: &EpaOptions,
) -> GaussianMessage {
    assert_eq!(gains.len(), incoming.len(), "one gain per incoming message");
    let mut residual = y;
    let mut var = noise_var;
    for (l, (h, msg)) in gains.iter().zip(incoming).enumerate() {
        if l != target {
            residual -= h * msg.mean;
            var += h.norm_sqr() * msg.var;
        }
    }
    finish_factor_message(residual, var, gains[target], opts)
}

#[inline]
fn finish_factor_message(residual: Complex64, var_sum: f64, gain: Complex64, opts: &EpaOptions) -> GaussianMessage {
    let erased = GaussianMessage::uninformative(opts.max_var);
    if gain.norm() <= opts.eps_gain {
        return erased;
    }
    let mean = residual / gain;
    let var = var_sum / gain.norm_sqr();
    if !(var <= opts.max_var) || !mean.re.is_finite() || !mean.im.is_finite() {
        return erased;
    }
    GaussianMessage::new(mean, var.max(opts.var_floor()))
}

/// All resource-to-user messages of one resource element and antenna, from
/// running totals so the cost is linear in `|F(n)|`.
fn factor_messages<P: Probe>(
    y: Complex64,
    gains: &[Complex64],
    incoming: &[GaussianMessage],
    noise_var: f64,
    opts: &EpaOptions,
    out: &mut [GaussianMessage],
    probe: &mut P,
) {
    let d = gains.len();
    let mut interference = Complex64::new(0.0, 0.0);
    let mut spread = noise_var;
    let mut own_mean = Vec::with_capacity(d);
    let mut own_var = Vec::with_capacity(d);
    for (h, msg) in gains.iter().zip(incoming) {
        let hm = h * msg.mean;
        let hv = h.norm_sqr() * msg.var;
        interference += hm;
        spread += hv;
        own_mean.push(hm);
        own_var.push(hv);
    }
    for k in 0..d {
        let residual = y - (interference - own_mean[k]);
        let var = spread - own_var[k];
        out[k] = finish_factor_message(residual, var, gains[k], opts);
    }
    let d = d as u64;
    probe.count(Stage::FactorUpdate, Op::Mul, 3 * d);
    probe.count(Stage::FactorUpdate, Op::Add, 6 * d);
    probe.count(Stage::FactorUpdate, Op::Div, 2 * d);
}

/// Unnormalized log belief of user `user`:
/// `log P(a) - sum_r sum_{n in V(k)} |a_n - mu_{n,r}|^2 / xi_{n,r}`.
/// `incoming` is laid out `[position in V(k)][antenna]`.
fn belief_log_weights<P: Probe>(
    log_prior: &[f64],
    cb: &Codebook,
    user: usize,
    resources: &[usize],
    antennas: usize,
    incoming: &[GaussianMessage],
    probe: &mut P,
) -> Vec<f64> {
    let mut w = log_prior.to_vec();
    for (m, wm) in w.iter_mut().enumerate() {
        for (i, &n) in resources.iter().enumerate() {
            let a = cb.entry(user, m, n);
            for msg in &incoming[i * antennas..(i + 1) * antennas] {
                *wm -= (a - msg.mean).norm_sqr() / msg.var;
            }
        }
    }
    let terms = (w.len() * resources.len() * antennas) as u64;
    probe.count(Stage::Belief, Op::Add, 2 * terms);
    probe.count(Stage::Belief, Op::Mul, terms);
    probe.count(Stage::Belief, Op::Div, terms);
    w
}

fn normalize_probed<P: Probe>(weights: &[f64], probe: &mut P) -> DiscreteBelief {
    let m = weights.len() as u64;
    probe.count(Stage::Belief, Op::Exp, m);
    probe.count(Stage::Belief, Op::Add, 2 * m);
    probe.count(Stage::Belief, Op::Div, m);
    DiscreteBelief::from_log_weights(weights)
}

/// Approximate posterior of one user from its prior and the incoming
/// resource messages (`[position in V(k)][antenna]` order).
pub fn compute_belief(
    priors: &PriorSet,
    user: usize,
    incoming: &[GaussianMessage],
    cb: &Codebook,
    fg: &FactorGraph,
) -> DiscreteBelief {
    let resources = fg.resources_of(user);
    assert!(
        !resources.is_empty() && incoming.len() % resources.len() == 0,
        "incoming messages must cover every active resource and antenna"
    );
    let antennas = incoming.len() / resources.len();
    let log_prior = prior_log_probs(priors.user(user), cb.size(), &mut NoProbe);
    let w = belief_log_weights(&log_prior, cb, user, resources, antennas, incoming, &mut NoProbe);
    DiscreteBelief::from_log_weights(&w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpaOutput {
    pub beliefs: Vec<DiscreteBelief>,
    /// Posterior LLRs, user-major.
    pub llrs: Vec<f64>,
    /// Largest change of any posterior mean `mu_{k,n}` per inner iteration;
    /// the first entry is measured from zero.
    pub trace: Vec<f64>,
}

pub fn epa_decode(
    y: &ReceivedBlock,
    chan: &ChannelRealization,
    priors: &PriorSet,
    cb: &Codebook,
    fg: &FactorGraph,
    opts: &EpaOptions,
) -> Result<EpaOutput, DetectError> {
    epa_decode_probed(y, chan, priors, cb, fg, opts, &mut NoProbe)
}

pub fn epa_decode_probed<P: Probe>(
    y: &ReceivedBlock,
    chan: &ChannelRealization,
    priors: &PriorSet,
    cb: &Codebook,
    fg: &FactorGraph,
    opts: &EpaOptions,
    probe: &mut P,
) -> Result<EpaOutput, DetectError> {
    check_inputs(y, chan, priors, cb)?;
    opts.validate()?;
    let (k_users, m, n_res, nr) = (cb.users(), cb.size(), cb.resources(), chan.antennas());
    let noise_var = chan.noise_var();

    // Edges are user-major along V(k); messages are [edge][antenna].
    let mut first_edge = Vec::with_capacity(k_users + 1);
    let mut edge_resource = Vec::with_capacity(fg.edge_count());
    let mut edge_user = Vec::with_capacity(fg.edge_count());
    for k in 0..k_users {
        first_edge.push(edge_resource.len());
        for &n in fg.resources_of(k) {
            edge_resource.push(n);
            edge_user.push(k);
        }
    }
    first_edge.push(edge_resource.len());
    let n_edges = edge_resource.len();
    let edge_of = |k: usize, n: usize| -> usize {
        let base = first_edge[k];
        base + fg.resources_of(k).iter().position(|&r| r == n).expect("edge exists")
    };
    // Per resource: the edge ids of F(n), in F(n) order.
    let resource_edges: Vec<Vec<usize>> = (0..n_res)
        .map(|n| fg.users_of(n).iter().map(|&k| edge_of(k, n)).collect())
        .collect();

    let log_prior: Vec<Vec<f64>> = (0..k_users)
        .map(|k| prior_log_probs(priors.user(k), m, probe))
        .collect();

    let mut to_user = vec![GaussianMessage::uninformative(opts.max_var); n_edges * nr];
    let mut to_resource = vec![GaussianMessage::uninformative(opts.max_var); n_edges * nr];
    let mut posterior = vec![GaussianMessage::new(Complex64::new(0.0, 0.0), 0.0); n_edges];
    let mut trace = Vec::with_capacity(opts.n_in);

    let report = |probe: &mut P, it: usize, dir: Edge, msgs: &[GaussianMessage]| {
        for (i, msg) in msgs.iter().enumerate() {
            let e = i / nr;
            let id = EdgeId {
                user: edge_user[e],
                resource: edge_resource[e],
                antenna: i % nr,
            };
            probe.gaussian(it, dir, id, msg);
        }
    };
    report(probe, 0, Edge::FactorToVariable, &to_user);

    let mut gains = Vec::new();
    let mut incoming = Vec::new();
    let mut outgoing = Vec::new();
    for it in 1..=opts.n_in {
        let mut change: f64 = 0.0;
        for k in 0..k_users {
            let edges = first_edge[k]..first_edge[k + 1];
            let w = belief_log_weights(
                &log_prior[k],
                cb,
                k,
                fg.resources_of(k),
                nr,
                &to_user[edges.start * nr..edges.end * nr],
                probe,
            );
            let belief = normalize_probed(&w, probe);
            probe.discrete(it, k, belief.probs());

            for e in edges {
                let mut moments = moment_match_probed(belief.probs(), cb, k, edge_resource[e], probe);
                change = change.max((moments.mean - posterior[e].mean).norm());
                moments.var = moments.var.max(opts.eps_var);
                posterior[e] = moments;
                for r in 0..nr {
                    let i = e * nr + r;
                    let previous = (it > 1).then_some(to_resource[i]);
                    to_resource[i] = vn_to_fn_probed(moments, to_user[i], previous, opts, probe);
                }
            }
        }
        report(probe, it, Edge::VariableToFactor, &to_resource);

        for (n, edges) in resource_edges.iter().enumerate() {
            for r in 0..nr {
                gains.clear();
                incoming.clear();
                for (&k, &e) in fg.users_of(n).iter().zip(edges) {
                    gains.push(chan.gain(r, k, n));
                    incoming.push(to_resource[e * nr + r]);
                }
                outgoing.clear();
                outgoing.resize(edges.len(), GaussianMessage::uninformative(opts.max_var));
                factor_messages(y.at(r, n), &gains, &incoming, noise_var, opts, &mut outgoing, probe);
                for (&e, msg) in edges.iter().zip(&outgoing) {
                    to_user[e * nr + r] = *msg;
                }
            }
        }
        report(probe, it, Edge::FactorToVariable, &to_user);
        trace.push(change);
    }

    let mut beliefs = Vec::with_capacity(k_users);
    let mut llrs = Vec::with_capacity(k_users * cb.bits_per_codeword());
    for k in 0..k_users {
        let edges = first_edge[k]..first_edge[k + 1];
        let w = belief_log_weights(
            &log_prior[k],
            cb,
            k,
            fg.resources_of(k),
            nr,
            &to_user[edges.start * nr..edges.end * nr],
            probe,
        );
        let belief = normalize_probed(&w, probe);
        probe.discrete(FINAL_ITERATION, k, belief.probs());
        llrs.extend(posterior_llr_probed(&belief, cb.bits_per_codeword(), probe));
        beliefs.push(belief);
    }
    Ok(EpaOutput { beliefs, llrs, trace })
}
