//! Channel realizations and received-signal synthesis.
//!
//! `y_n^r = sum_k h_{k,n}^r x_{k,n} + w_n^r` with `w ~ CN(0, sigma^2)`:
//! total variance `sigma^2`, half in each real dimension.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("noise variance must be finite and positive, got {0}")]
    NoiseVariance(f64),
    #[error("channel gain at antenna {antenna}, user {user}, resource {resource} is not finite")]
    NonFiniteGain {
        antenna: usize,
        user: usize,
        resource: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// Every gain is `1 + 0i`.
    AwgnUnit,
    /// i.i.d. `CN(0, 1)` gains per antenna, user and resource, one draw per block.
    RayleighIidBlock,
}

/// Gains `h_{k,n}^r` and the noise variance for one SCMA block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    antennas: usize,
    users: usize,
    resources: usize,
    // [antenna][user][resource]
    gains: Vec<Complex64>,
    noise_var: f64,
}

impl ChannelRealization {
    pub fn new(
        antennas: usize,
        users: usize,
        resources: usize,
        gains: Vec<Complex64>,
        noise_var: f64,
    ) -> Result<Self, ChannelError> {
        if antennas == 0 || users == 0 || resources == 0 {
            return Err(ChannelError::Dimension(format!(
                "(N_r, K, N) = ({antennas}, {users}, {resources}) must be positive"
            )));
        }
        if gains.len() != antennas * users * resources {
            return Err(ChannelError::Dimension(format!(
                "expected {} gains, got {}",
                antennas * users * resources,
                gains.len()
            )));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(ChannelError::NoiseVariance(noise_var));
        }
        if let Some(i) = gains.iter().position(|h| !(h.re.is_finite() && h.im.is_finite())) {
            return Err(ChannelError::NonFiniteGain {
                antenna: i / (users * resources),
                user: (i / resources) % users,
                resource: i % resources,
            });
        }
        Ok(ChannelRealization {
            antennas,
            users,
            resources,
            gains,
            noise_var,
        })
    }

    /// All gains `1 + 0i`.
    pub fn unit(antennas: usize, users: usize, resources: usize, noise_var: f64) -> Result<Self, ChannelError> {
        Self::new(
            antennas,
            users,
            resources,
            vec![Complex64::new(1.0, 0.0); antennas * users * resources],
            noise_var,
        )
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    #[inline]
    pub fn gain(&self, antenna: usize, user: usize, resource: usize) -> Complex64 {
        self.gains[(antenna * self.users + user) * self.resources + resource]
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    /// Same gains, different noise variance.
    pub fn with_noise_var(&self, noise_var: f64) -> Result<Self, ChannelError> {
        Self::new(self.antennas, self.users, self.resources, self.gains.clone(), noise_var)
    }
}

/// Observations `y_n^r` for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    antennas: usize,
    resources: usize,
    // [antenna][resource]
    y: Vec<Complex64>,
}

impl ReceivedBlock {
    pub fn new(antennas: usize, resources: usize, y: Vec<Complex64>) -> Result<Self, ChannelError> {
        if y.len() != antennas * resources {
            return Err(ChannelError::Dimension(format!(
                "expected {} observations, got {}",
                antennas * resources,
                y.len()
            )));
        }
        Ok(ReceivedBlock { antennas, resources, y })
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    #[inline]
    pub fn at(&self, antenna: usize, resource: usize) -> Complex64 {
        self.y[antenna * self.resources + resource]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.y
    }

    /// Rows from each antenna placed one after another.
    pub fn antenna(&self, antenna: usize) -> &[Complex64] {
        &self.y[antenna * self.resources..(antenna + 1) * self.resources]
    }
}

/// One draw from `CN(0, var)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draws the gains of one block. Gains are generated antenna-major, then
/// user, then resource.
pub fn sample_channel<R: Rng + ?Sized>(
    model: ChannelModel,
    antennas: usize,
    users: usize,
    resources: usize,
    noise_var: f64,
    rng: &mut R,
) -> Result<ChannelRealization, ChannelError> {
    let count = antennas * users * resources;
    let gains = match model {
        ChannelModel::AwgnUnit => vec![Complex64::new(1.0, 0.0); count],
        ChannelModel::RayleighIidBlock => (0..count).map(|_| complex_gaussian(rng, 1.0)).collect(),
    };
    ChannelRealization::new(antennas, users, resources, gains, noise_var)
}

/// Noiseless superposition `sum_k h_{k,n}^r x_{k,n}`; `codewords` is `K x N` user-major.
pub fn superpose(codewords: &[Complex64], chan: &ChannelRealization) -> Result<Vec<Complex64>, ChannelError> {
    let (nr, k, n) = (chan.antennas, chan.users, chan.resources);
    if codewords.len() != k * n {
        return Err(ChannelError::Dimension(format!(
            "expected {} stacked codeword entries (K={k}, N={n}), got {}",
            k * n,
            codewords.len()
        )));
    }
    let mut y = vec![Complex64::new(0.0, 0.0); nr * n];
    for r in 0..nr {
        for user in 0..k {
            for res in 0..n {
                y[r * n + res] += chan.gain(r, user, res) * codewords[user * n + res];
            }
        }
    }
    Ok(y)
}

/// Passes stacked codewords through the channel and adds noise. Noise is
/// drawn antenna-major, resource-minor, real part first.
pub fn transmit<R: Rng + ?Sized>(
    codewords: &[Complex64],
    chan: &ChannelRealization,
    rng: &mut R,
) -> Result<ReceivedBlock, ChannelError> {
    let mut y = superpose(codewords, chan)?;
    for v in y.iter_mut() {
        *v += complex_gaussian(rng, chan.noise_var);
    }
    ReceivedBlock::new(chan.antennas, chan.resources, y)
}
