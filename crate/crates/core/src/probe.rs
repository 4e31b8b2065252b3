//! Observation hooks threaded through the detectors.
//!
//! Decoders are generic over [`Probe`]; the default [`NoProbe`] compiles to
//! nothing. Tests use probes to watch every message, and
//! [`crate::complexity::OpCounter`] uses the same hook to tally arithmetic.

use crate::epa::GaussianMessage;

/// Arithmetic operation classes tallied by instrumented decodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    /// Any multiplication: complex by complex, `|z|^2`, real scaling.
    Mul,
    /// Additions and subtractions, real or complex.
    Add,
    Div,
    Exp,
    Log,
}

impl Op {
    pub const ALL: [Op; 5] = [Op::Mul, Op::Add, Op::Div, Op::Exp, Op::Log];

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// Decoder phase an operation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Prior belief from fed-back LLRs.
    Prior,
    /// Likelihood evaluation and factor-node updates.
    FactorUpdate,
    /// Variable-node updates (MPA) or cavity division (EPA).
    VariableUpdate,
    /// Posterior belief over the codebook.
    Belief,
    /// Gaussian projection of beliefs.
    Moments,
    /// Posterior LLR extraction.
    Llr,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Prior,
        Stage::FactorUpdate,
        Stage::VariableUpdate,
        Stage::Belief,
        Stage::Moments,
        Stage::Llr,
    ];

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// Direction of a Gaussian EPA message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    VariableToFactor,
    FactorToVariable,
}

/// Identifies one message on the factor graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeId {
    pub user: usize,
    pub resource: usize,
    pub antenna: usize,
}

pub trait Probe {
    /// Whether the decoder should materialize intermediate discrete
    /// messages for [`Probe::discrete`]. Final beliefs are always reported.
    #[inline]
    fn wants_messages(&self) -> bool {
        false
    }

    #[inline]
    fn count(&mut self, _stage: Stage, _op: Op, _n: u64) {}

    /// A discrete message or belief after normalization, in the
    /// probability domain. `iteration` is 1-based; 0 marks initialization
    /// and `usize::MAX` the final belief.
    #[inline]
    fn discrete(&mut self, _iteration: usize, _user: usize, _probs: &[f64]) {}

    #[inline]
    fn gaussian(&mut self, _iteration: usize, _dir: Edge, _edge: EdgeId, _msg: &GaussianMessage) {}
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoProbe;

impl Probe for NoProbe {}

impl<P: Probe + ?Sized> Probe for &mut P {
    #[inline]
    fn wants_messages(&self) -> bool {
        (**self).wants_messages()
    }

    #[inline]
    fn count(&mut self, stage: Stage, op: Op, n: u64) {
        (**self).count(stage, op, n)
    }

    #[inline]
    fn discrete(&mut self, iteration: usize, user: usize, probs: &[f64]) {
        (**self).discrete(iteration, user, probs)
    }

    #[inline]
    fn gaussian(&mut self, iteration: usize, dir: Edge, edge: EdgeId, msg: &GaussianMessage) {
        (**self).gaussian(iteration, dir, edge, msg)
    }
}

/// Marker used by `discrete` for the belief returned to the caller.
pub const FINAL_ITERATION: usize = usize::MAX;
