//! Uplink SCMA link-level simulation: codebooks, channels, a brute-force MAP
//! oracle, the sum-product MPA detector, the expectation-propagation (EPA)
//! detector, an iterative detection/decoding loop, complexity estimates and
//! a Monte Carlo BER/BLER harness.
//!
//! ```
//! use scma::prelude::*;
//!
//! let cb = default_codebook(6, 4, 4, 2).unwrap();
//! let fg = FactorGraph::new(&cb);
//! let chan = ChannelRealization::unit(1, 6, 4, 1e-3).unwrap();
//! let bits = [[0u8, 1], [1, 1], [0, 0], [1, 0], [0, 1], [1, 1]];
//! let x: Vec<_> = bits
//!     .iter()
//!     .enumerate()
//!     .flat_map(|(k, b)| cb.encode(b, k).unwrap().to_vec())
//!     .collect();
//! let y = ReceivedBlock::new(1, 4, superpose(&x, &chan).unwrap()).unwrap();
//! let out = epa_decode(&y, &chan, &PriorSet::zeros(6, 2), &cb, &fg, &EpaOptions::default()).unwrap();
//! let decided: Vec<u8> = out.llrs.iter().map(|&l| hard_decision(l)).collect();
//! assert_eq!(decided, bits.concat());
//! ```

pub mod belief;
pub mod channel;
pub mod cli;
pub mod codebook;
pub mod complexity;
pub mod detector;
pub mod epa;
pub mod probe;
pub mod receiver;
pub mod reference;
pub mod sim;

pub mod prelude {
    pub use crate::belief::{posterior_llr, prior_to_belief, DiscreteBelief, PriorSet, LLR_CLIP};
    pub use crate::channel::{sample_channel, superpose, transmit, ChannelModel, ChannelRealization, ReceivedBlock};
    pub use crate::codebook::{default_codebook, Codebook, FactorGraph};
    pub use crate::complexity::{complexity_order, complexity_ratio, measure_ops, ComplexityProfile, OpCounter, Receiver};
    pub use crate::detector::{Detection, Detector, DetectorKind, Epa, Mpa};
    pub use crate::epa::{epa_decode, epa_decode_probed, EpaOptions, GaussianMessage};
    pub use crate::probe::{NoProbe, Probe};
    pub use crate::receiver::{hard_decision, run_receiver, Observation, PassthroughSiso, RepetitionSiso, Siso};
    pub use crate::reference::{brute_force_posterior, mpa_decode};
    pub use crate::sim::{run_sweep, SimConfig, SimResult};
}
