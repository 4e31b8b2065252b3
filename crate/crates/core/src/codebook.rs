//! SCMA codebooks and the factor graph derived from their sparsity pattern.
//!
//! A codebook assigns every user `M` codewords of length `N`. The resource
//! elements on which a user's codewords are nonzero form its signature; the
//! union of signatures is the bipartite graph every detector walks.
//!
//! Bit labelling is natural binary with bit 0 the most significant: the
//! tuple `(c_0, .., c_{J-1})` selects codeword `sum_j c_j 2^(J-1-j)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance of the unit average energy check applied to codebook files.
pub const ENERGY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CodebookError {
    #[error("cannot read codebook file: {0}")]
    Io(#[from] std::io::Error),
    #[error("codebook JSON does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("codebook size M = {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("non-finite entry in user {user} codeword {codeword}")]
    NonFinite { user: usize, codeword: usize },
    #[error(
        "support pattern of user {user} codeword {codeword} differs from the user's signature"
    )]
    SupportPattern { user: usize, codeword: usize },
    #[error("average codeword energy differs from 1 for users {}", fmt_energies(.0))]
    Energy(Vec<(usize, f64)>),
    #[error("user {user} codewords {first} and {second} are identical")]
    DuplicateCodeword {
        user: usize,
        first: usize,
        second: usize,
    },
    #[error("infeasible codebook parameters: {0}")]
    Infeasible(String),
    #[error("bit tuple has length {got}, expected {expected}")]
    BitLength { got: usize, expected: usize },
    #[error("bit value {0} is not 0 or 1")]
    BitValue(u8),
    #[error("user index {user} out of range for {users} users")]
    UserIndex { user: usize, users: usize },
}

fn fmt_energies(list: &[(usize, f64)]) -> String {
    list.iter()
        .map(|(k, e)| format!("{k} (energy {e:.6})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Per-user sparse multidimensional constellations.
#[derive(Clone, PartialEq)]
pub struct Codebook {
    users: usize,
    resources: usize,
    size: usize,
    bits: usize,
    // indexed [user][codeword][resource]
    codewords: Vec<Complex64>,
}

impl fmt::Debug for Codebook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Codebook")
            .field("K", &self.users)
            .field("N", &self.resources)
            .field("M", &self.size)
            .finish()
    }
}

impl Codebook {
    /// Builds a codebook from a flat `[user][codeword][resource]` array and
    /// checks every invariant against `energy_tol`.
    pub fn new(
        users: usize,
        resources: usize,
        size: usize,
        codewords: Vec<Complex64>,
        energy_tol: f64,
    ) -> Result<Self, CodebookError> {
        if users == 0 || resources == 0 {
            return Err(CodebookError::Dimension(format!(
                "K = {users} and N = {resources} must both be positive"
            )));
        }
        if size < 2 || !size.is_power_of_two() {
            return Err(CodebookError::NotPowerOfTwo(size));
        }
        if codewords.len() != users * size * resources {
            return Err(CodebookError::Dimension(format!(
                "expected {} complex entries for K={users}, M={size}, N={resources}, got {}",
                users * size * resources,
                codewords.len()
            )));
        }
        let cb = Codebook {
            users,
            resources,
            size,
            bits: size.trailing_zeros() as usize,
            codewords,
        };
        cb.validate(energy_tol)?;
        Ok(cb)
    }

    fn validate(&self, energy_tol: f64) -> Result<(), CodebookError> {
        let mut bad_energy = Vec::new();
        for k in 0..self.users {
            for m in 0..self.size {
                if self.codeword(k, m).iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                    return Err(CodebookError::NonFinite { user: k, codeword: m });
                }
            }
            // every codeword must share codeword 0's support
            let signature: Vec<bool> = self
                .codeword(k, 0)
                .iter()
                .map(|x| *x != Complex64::new(0.0, 0.0))
                .collect();
            if !signature.iter().any(|&a| a) {
                return Err(CodebookError::SupportPattern { user: k, codeword: 0 });
            }
            for m in 1..self.size {
                let row = self.codeword(k, m);
                if row
                    .iter()
                    .zip(&signature)
                    .any(|(x, &active)| (*x != Complex64::new(0.0, 0.0)) != active)
                {
                    return Err(CodebookError::SupportPattern { user: k, codeword: m });
                }
            }
            for a in 0..self.size {
                for b in a + 1..self.size {
                    if self.codeword(k, a) == self.codeword(k, b) {
                        return Err(CodebookError::DuplicateCodeword {
                            user: k,
                            first: a,
                            second: b,
                        });
                    }
                }
            }
            let energy = self.average_energy(k);
            if (energy - 1.0).abs() > energy_tol {
                bad_energy.push((k, energy));
            }
        }
        if bad_energy.is_empty() {
            Ok(())
        } else {
            Err(CodebookError::Energy(bad_energy))
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Coded bits per codeword, `log2 M`.
    pub fn bits_per_codeword(&self) -> usize {
        self.bits
    }

    pub fn codeword(&self, user: usize, index: usize) -> &[Complex64] {
        let start = (user * self.size + index) * self.resources;
        &self.codewords[start..start + self.resources]
    }

    #[inline]
    pub fn entry(&self, user: usize, index: usize, resource: usize) -> Complex64 {
        self.codewords[(user * self.size + index) * self.resources + resource]
    }

    /// `(1/M) sum_m ||x_k^(m)||^2`
    pub fn average_energy(&self, user: usize) -> f64 {
        (0..self.size)
            .map(|m| self.codeword(user, m).iter().map(|x| x.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / self.size as f64
    }

    /// Flat `[user][codeword][resource]` view of all entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.codewords
    }

    /// Maps a bit tuple to the user's codeword.
    pub fn encode(&self, bits: &[u8], user: usize) -> Result<&[Complex64], CodebookError> {
        if user >= self.users {
            return Err(CodebookError::UserIndex {
                user,
                users: self.users,
            });
        }
        let index = index_from_bits(bits, self.bits)?;
        Ok(self.codeword(user, index))
    }

    /// Index of the codeword closest in Euclidean distance to `x`.
    pub fn nearest(&self, user: usize, x: &[Complex64]) -> usize {
        (0..self.size)
            .map(|m| {
                let d: f64 = self
                    .codeword(user, m)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                (m, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(m, _)| m)
            .unwrap_or(0)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CodebookError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CodebookError> {
        let file: CodebookFile = serde_json::from_str(text)?;
        file.into_codebook()
    }

    pub fn to_json(&self) -> String {
        let file = CodebookFile::from(self);
        // serialization of plain numbers cannot fail
        serde_json::to_string_pretty(&file).expect("codebook serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CodebookError> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Codeword index of a bit tuple, bit 0 most significant.
pub fn index_from_bits(bits: &[u8], expected_len: usize) -> Result<usize, CodebookError> {
    if bits.len() != expected_len {
        return Err(CodebookError::BitLength {
            got: bits.len(),
            expected: expected_len,
        });
    }
    bits.iter().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as usize),
        other => Err(CodebookError::BitValue(other)),
    })
}

/// Bit `j` of codeword `index` under the natural binary labelling.
#[inline]
pub fn bit_of(index: usize, j: usize, bits: usize) -> u8 {
    ((index >> (bits - 1 - j)) & 1) as u8
}

pub fn bits_of_index(index: usize, bits: usize) -> Vec<u8> {
    (0..bits).map(|j| bit_of(index, j, bits)).collect()
}

/// On-disk JSON layout: `{"K":..,"N":..,"M":..,"users":[{"codewords":[[[re,im],..],..]}]}`.
#[derive(Debug, Serialize, Deserialize)]
struct CodebookFile {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    users: Vec<UserEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct UserEntry {
    codewords: Vec<Vec<[f64; 2]>>,
}

impl CodebookFile {
    fn into_codebook(self) -> Result<Codebook, CodebookError> {
        if self.users.len() != self.k {
            return Err(CodebookError::Dimension(format!(
                "K = {} but {} user entries present",
                self.k,
                self.users.len()
            )));
        }
        let mut flat = Vec::with_capacity(self.k * self.m * self.n);
        for (k, user) in self.users.iter().enumerate() {
            if user.codewords.len() != self.m {
                return Err(CodebookError::Dimension(format!(
                    "user {k} has {} codewords, M = {}",
                    user.codewords.len(),
                    self.m
                )));
            }
            for (m, word) in user.codewords.iter().enumerate() {
                if word.len() != self.n {
                    return Err(CodebookError::Dimension(format!(
                        "user {k} codeword {m} has length {}, N = {}",
                        word.len(),
                        self.n
                    )));
                }
                flat.extend(word.iter().map(|[re, im]| Complex64::new(*re, *im)));
            }
        }
        Codebook::new(self.k, self.n, self.m, flat, ENERGY_TOLERANCE)
    }
}

impl From<&Codebook> for CodebookFile {
    fn from(cb: &Codebook) -> Self {
        CodebookFile {
            k: cb.users,
            n: cb.resources,
            m: cb.size,
            users: (0..cb.users)
                .map(|k| UserEntry {
                    codewords: (0..cb.size)
                        .map(|m| cb.codeword(k, m).iter().map(|x| [x.re, x.im]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// All `d_v`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..d).collect();
    if d == 0 || d > n {
        return out;
    }
    loop {
        out.push(current.clone());
        // advance the rightmost position that still has room
        let Some(i) = (0..d).rev().find(|&i| current[i] < n - d + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..d {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Deterministic regular codebook.
///
/// User `k` takes the `(k mod C(N, d_v))`-th `d_v`-subset of resources in
/// lexicographic order, so `K = 6, N = 4, d_v = 2` yields the classic
/// six-user layout. On each active resource `n` the user places `M`-PSK
/// rotated by `2 pi r / (M d_f)`, `r` being the user's rank within `F(n)`,
/// and the codeword is scaled to unit average energy.
pub fn default_codebook(
    users: usize,
    resources: usize,
    size: usize,
    degree: usize,
) -> Result<Codebook, CodebookError> {
    if users == 0 || resources == 0 {
        return Err(CodebookError::Infeasible("K and N must be positive".into()));
    }
    if size < 2 || !size.is_power_of_two() {
        return Err(CodebookError::NotPowerOfTwo(size));
    }
    if degree == 0 || degree > resources {
        return Err(CodebookError::Infeasible(format!(
            "d_v = {degree} must lie in 1..={resources}"
        )));
    }
    if (users * degree) % resources != 0 {
        return Err(CodebookError::Infeasible(format!(
            "d_f = K d_v / N = {users}*{degree}/{resources} is not an integer"
        )));
    }
    let df = users * degree / resources;
    let patterns = combinations(resources, degree);
    let signature: Vec<&Vec<usize>> = (0..users).map(|k| &patterns[k % patterns.len()]).collect();

    let mut load = vec![0usize; resources];
    for sig in &signature {
        for &n in sig.iter() {
            load[n] += 1;
        }
    }
    if load.iter().any(|&l| l != df) {
        return Err(CodebookError::Infeasible(format!(
            "lexicographic signature for K={users}, N={resources}, d_v={degree} is not regular \
             (resource loads {load:?}, wanted {df})"
        )));
    }

    let scale = 1.0 / (degree as f64).sqrt();
    let mut flat = vec![Complex64::new(0.0, 0.0); users * size * resources];
    let mut rank_counter = vec![0usize; resources];
    for (k, sig) in signature.iter().enumerate() {
        for &n in sig.iter() {
            let rank = rank_counter[n];
            rank_counter[n] += 1;
            let rotation = 2.0 * PI * rank as f64 / (size * df) as f64;
            for m in 0..size {
                let phase = 2.0 * PI * m as f64 / size as f64 + rotation;
                flat[(k * size + m) * resources + n] = Complex64::from_polar(scale, phase);
            }
        }
    }
    Codebook::new(users, resources, size, flat, 1e-12)
}

/// Bipartite user/resource adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    user_resources: Vec<Vec<usize>>,
    resource_users: Vec<Vec<usize>>,
}

impl FactorGraph {
    pub fn new(cb: &Codebook) -> Self {
        let user_resources: Vec<Vec<usize>> = (0..cb.users())
            .map(|k| {
                (0..cb.resources())
                    .filter(|&n| (0..cb.size()).any(|m| cb.entry(k, m, n) != Complex64::new(0.0, 0.0)))
                    .collect()
            })
            .collect();
        let mut resource_users = vec![Vec::new(); cb.resources()];
        for (k, res) in user_resources.iter().enumerate() {
            for &n in res {
                resource_users[n].push(k);
            }
        }
        FactorGraph {
            user_resources,
            resource_users,
        }
    }

    /// `V(k)`: resources user `k` is active on, ascending.
    pub fn resources_of(&self, user: usize) -> &[usize] {
        &self.user_resources[user]
    }

    /// `F(n)`: users active on resource `n`, ascending.
    pub fn users_of(&self, resource: usize) -> &[usize] {
        &self.resource_users[resource]
    }

    pub fn users(&self) -> usize {
        self.user_resources.len()
    }

    pub fn resources(&self) -> usize {
        self.resource_users.len()
    }

    pub fn user_degree(&self, user: usize) -> usize {
        self.user_resources[user].len()
    }

    pub fn resource_degree(&self, resource: usize) -> usize {
        self.resource_users[resource].len()
    }

    pub fn edge_count(&self) -> usize {
        self.user_resources.iter().map(Vec::len).sum()
    }

    /// `(d_v, d_f)` when every user and every resource share one degree.
    pub fn regular_degrees(&self) -> Option<(usize, usize)> {
        let dv = self.user_degree(0);
        let df = self.resource_degree(0);
        let regular = self.user_resources.iter().all(|r| r.len() == dv)
            && self.resource_users.iter().all(|u| u.len() == df);
        regular.then_some((dv, df))
    }

    /// Mean user degree `sum_k |V(k)| / K`.
    pub fn mean_user_degree(&self) -> f64 {
        self.edge_count() as f64 / self.users() as f64
    }

    /// Position of `user` inside `F(resource)`.
    pub fn rank_in_resource(&self, user: usize, resource: usize) -> Option<usize> {
        self.resource_users[resource].iter().position(|&k| k == user)
    }
}
