//! Ground-truth detectors: exhaustive MAP marginals and sum-product MPA.

use num_complex::Complex64;

use crate::belief::{log_normalize, prior_log_probs, DiscreteBelief, LogSumExp, PriorSet};
use crate::channel::{ChannelRealization, ReceivedBlock};
use crate::codebook::{Codebook, FactorGraph};
use crate::detector::{check_inputs, DetectError};
use crate::probe::{NoProbe, Op, Probe, Stage, FINAL_ITERATION};

/// Largest joint codeword space the exhaustive detector will walk.
pub const MAX_ENUMERATION: u128 = 1 << 24;

/// Exact per-user posteriors `P(x_k | y)` by enumerating all `M^K`
/// codeword combinations in the log domain.
pub fn brute_force_posterior(
    y: &ReceivedBlock,
    chan: &ChannelRealization,
    priors: &PriorSet,
    cb: &Codebook,
) -> Result<Vec<DiscreteBelief>, DetectError> {
    check_inputs(y, chan, priors, cb)?;
    let (k_users, m, n, nr) = (cb.users(), cb.size(), cb.resources(), chan.antennas());
    let space = (m as u128).checked_pow(k_users as u32).unwrap_or(u128::MAX);
    if space > MAX_ENUMERATION {
        return Err(DetectError::EnumerationTooLarge {
            combinations: space,
            limit: MAX_ENUMERATION,
        });
    }
    let log_prior: Vec<Vec<f64>> = (0..k_users)
        .map(|k| prior_log_probs(priors.user(k), m, &mut NoProbe))
        .collect();
    let inv_var = 1.0 / chan.noise_var();

    let mut acc = vec![LogSumExp::default(); k_users * m];
    let mut digits = vec![0usize; k_users];
    loop {
        let mut weight: f64 = digits.iter().enumerate().map(|(k, &d)| log_prior[k][d]).sum();
        for r in 0..nr {
            for res in 0..n {
                let mut s = y.at(r, res);
                for (k, &d) in digits.iter().enumerate() {
                    s -= chan.gain(r, k, res) * cb.entry(k, d, res);
                }
                weight -= s.norm_sqr() * inv_var;
            }
        }
        for (k, &d) in digits.iter().enumerate() {
            acc[k * m + d].add(weight);
        }
        // mixed-radix increment, user 0 fastest
        let mut k = 0;
        loop {
            if k == k_users {
                return Ok((0..k_users)
                    .map(|k| {
                        let w: Vec<f64> = acc[k * m..(k + 1) * m].iter().map(LogSumExp::value).collect();
                        DiscreteBelief::from_log_weights(&w)
                    })
                    .collect());
            }
            digits[k] += 1;
            if digits[k] < m {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Beliefs returned by [`mpa_decode`] with the per-iteration largest
/// absolute change of any belief entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MpaOutput {
    pub beliefs: Vec<DiscreteBelief>,
    pub trace: Vec<f64>,
}

/// Sum-product decoding with a flooding schedule: every factor node
/// updates, then every variable node.
///
/// One factor node per resource carries the product of the likelihoods of
/// all receive antennas on that resource; messages live in the log domain,
/// indexed by codeword.
pub fn mpa_decode(
    y: &ReceivedBlock,
    chan: &ChannelRealization,
    priors: &PriorSet,
    cb: &Codebook,
    fg: &FactorGraph,
    n_iter: usize,
) -> Result<MpaOutput, DetectError> {
    mpa_decode_probed(y, chan, priors, cb, fg, n_iter, &mut NoProbe)
}

struct ResourceNode {
    users: Vec<usize>,
    // edge id of (users[p], this resource)
    edges: Vec<usize>,
    // log-likelihood per joint index, users[0] is the fastest digit
    log_lik: Vec<f64>,
}

pub fn mpa_decode_probed<P: Probe>(
    y: &ReceivedBlock,
    chan: &ChannelRealization,
    priors: &PriorSet,
    cb: &Codebook,
    fg: &FactorGraph,
    n_iter: usize,
    probe: &mut P,
) -> Result<MpaOutput, DetectError> {
    check_inputs(y, chan, priors, cb)?;
    if n_iter == 0 {
        return Err(DetectError::Iterations);
    }
    let (k_users, m, n_res, nr) = (cb.users(), cb.size(), cb.resources(), chan.antennas());
    let inv_var = 1.0 / chan.noise_var();

    // edge ids: user-major, following V(k)
    let mut edge_of = vec![usize::MAX; k_users * n_res];
    let mut edge_user = Vec::with_capacity(fg.edge_count());
    for k in 0..k_users {
        for &n in fg.resources_of(k) {
            edge_of[k * n_res + n] = edge_user.len();
            edge_user.push(k);
        }
    }

    let nodes: Vec<ResourceNode> = (0..n_res)
        .map(|n| {
            let users = fg.users_of(n).to_vec();
            let d = users.len();
            let table = m.pow(d as u32);
            // h * a for every antenna, position and candidate
            let mut hx = vec![Complex64::new(0.0, 0.0); nr * d * m];
            for r in 0..nr {
                for (p, &k) in users.iter().enumerate() {
                    let h = chan.gain(r, k, n);
                    for v in 0..m {
                        hx[(r * d + p) * m + v] = h * cb.entry(k, v, n);
                    }
                }
            }
            probe.count(Stage::FactorUpdate, Op::Mul, (nr * d * m) as u64);
            let mut log_lik = vec![0.0; table];
            let mut digits = vec![0usize; d];
            for ll in log_lik.iter_mut() {
                let mut acc = 0.0;
                for r in 0..nr {
                    let mut s = y.at(r, n);
                    for (p, &v) in digits.iter().enumerate() {
                        s -= hx[(r * d + p) * m + v];
                    }
                    acc -= s.norm_sqr() * inv_var;
                }
                *ll = acc;
                increment(&mut digits, m);
            }
            probe.count(Stage::FactorUpdate, Op::Add, (table * nr * (d + 1)) as u64);
            probe.count(Stage::FactorUpdate, Op::Mul, (table * nr * 2) as u64);
            let edges = users.iter().map(|&k| edge_of[k * n_res + n]).collect();
            ResourceNode { users, edges, log_lik }
        })
        .collect();

    let log_prior: Vec<Vec<f64>> = (0..k_users)
        .map(|k| prior_log_probs(priors.user(k), m, probe))
        .collect();

    let n_edges = edge_user.len();
    let mut to_var: Vec<Vec<f64>> = vec![vec![0.0; m]; n_edges];
    let mut to_fac: Vec<Vec<f64>> = edge_user.iter().map(|&k| log_prior[k].clone()).collect();
    let mut beliefs: Vec<DiscreteBelief> = log_prior.iter().map(|w| DiscreteBelief::from_log_weights(w)).collect();
    if probe_wants(probe) {
        for (e, msg) in to_fac.iter().enumerate() {
            probe.discrete(0, edge_user[e], DiscreteBelief::from_log_weights(msg).probs());
        }
    }
    let mut trace = Vec::with_capacity(n_iter);

    for it in 1..=n_iter {
        // factor nodes
        for node in &nodes {
            let d = node.users.len();
            let mut acc = vec![LogSumExp::default(); d * m];
            let mut digits = vec![0usize; d];
            for &ll in &node.log_lik {
                for p in 0..d {
                    let mut s = ll;
                    for q in 0..d {
                        if q != p {
                            s += to_fac[node.edges[q]][digits[q]];
                        }
                    }
                    acc[p * m + digits[p]].add(s);
                }
                increment(&mut digits, m);
            }
            let table = node.log_lik.len() as u64;
            probe.count(Stage::FactorUpdate, Op::Add, table * (d * d) as u64);
            probe.count(Stage::FactorUpdate, Op::Exp, table * d as u64);
            for (p, &e) in node.edges.iter().enumerate() {
                let msg = &mut to_var[e];
                for v in 0..m {
                    msg[v] = acc[p * m + v].value();
                }
                log_normalize(msg);
                probe.count(Stage::FactorUpdate, Op::Log, m as u64);
                if probe_wants(probe) {
                    probe.discrete(it, node.users[p], DiscreteBelief::from_log_weights(msg).probs());
                }
            }
        }

        // beliefs, and variable-to-factor messages unless this was the last pass
        let mut change: f64 = 0.0;
        for k in 0..k_users {
            let res = fg.resources_of(k);
            let mut total = log_prior[k].clone();
            for &n in res {
                let e = edge_of[k * n_res + n];
                total.iter_mut().zip(&to_var[e]).for_each(|(t, v)| *t += v);
            }
            probe.count(Stage::Belief, Op::Add, (res.len() * m) as u64);
            let b = DiscreteBelief::from_log_weights(&total);
            probe.count(Stage::Belief, Op::Exp, m as u64);
            change = change.max(b.max_abs_diff(&beliefs[k]));
            beliefs[k] = b;

            if it < n_iter {
                for &n in res {
                    let e = edge_of[k * n_res + n];
                    let msg = &mut to_fac[e];
                    for v in 0..m {
                        msg[v] = total[v] - to_var[e][v];
                    }
                    // Recompute without subtraction when a term is infinite.
                    if msg.iter().any(|x| !x.is_finite()) {
                        msg.copy_from_slice(&log_prior[k]);
                        for &other in res.iter().filter(|&&o| o != n) {
                            let eo = edge_of[k * n_res + other];
                            msg.iter_mut().zip(&to_var[eo]).for_each(|(t, v)| *t += v);
                        }
                    }
                    log_normalize(msg);
                    probe.count(Stage::VariableUpdate, Op::Add, (2 * m) as u64);
                    probe.count(Stage::VariableUpdate, Op::Exp, m as u64);
                    if probe_wants(probe) {
                        probe.discrete(it, k, DiscreteBelief::from_log_weights(msg).probs());
                    }
                }
            }
        }
        trace.push(change);
    }
    for (k, b) in beliefs.iter().enumerate() {
        probe.discrete(FINAL_ITERATION, k, b.probs());
    }
    Ok(MpaOutput { beliefs, trace })
}

#[inline]
fn probe_wants<P: Probe>(probe: &P) -> bool {
    probe.wants_messages()
}

#[inline]
fn increment(digits: &mut [usize], radix: usize) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return;
        }
        *d = 0;
    }
}
