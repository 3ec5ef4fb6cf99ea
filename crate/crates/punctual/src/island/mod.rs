//! Stage-based mainland-island constructions of punctual copies of `(N, S)`.
//!
//! Both engines keep a settled initial chain (the mainland, whose positions
//! are known) and detached chains whose elements carry a symbolic description
//! of their eventual position: a linear mark `dx + e` in [`linear`], a family
//! term `q(w)` in [`meta`]. When an opponent commits to a value, every
//! detached chain is merged into the mainland at positions chosen so that the
//! opponent's guess is wrong.

mod family;
mod levitz_family;
mod linear;
mod meta;
mod opponent;
mod poly;

pub use family::{LFamily, Listing};
pub use levitz_family::LevitzFamily;
pub use linear::{
    linear_run, ConnectCase, DeclaredImages, ImageReport, LinearEngine, LinearRequirement, Mark,
    PrimeSet, SatisfactionRecord,
};
pub use meta::{
    meta_run, meta_stage_structure, Declaration, MetaEngine, MetaRecord, StageStructure, Symbol,
};
pub use opponent::{Convergence, Opponent, ValueRule};
pub use poly::{poly_normal_form, poly_witness, Poly, PolyFamily};

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::copies::{CopyError, PunctualCopy};
use crate::levitz::LevitzError;
use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IslandError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("requirement coefficient {a} has no prime divisor outside {primes}")]
    InvalidRequirement { a: u64, primes: String },
    #[error("opponent {id}: convergence stage {stage} at x = {x} must exceed {bound}")]
    InvalidOpponent {
        id: u64,
        x: u64,
        stage: u64,
        bound: u64,
    },
    #[error("polynomial `{0}` is constant")]
    ConstantPolynomial(String),
    #[error("`{lower}` is not eventually strictly below `{upper}`")]
    NotDominated { lower: String, upper: String },
    #[error("family contract violated: {0}")]
    FamilyContractViolated(String),
    #[error("construction invariant violated: {0}")]
    ConstructionViolated(String),
    #[error("value beyond the materializable range: {0}")]
    Overflow(String),
    #[error(transparent)]
    Levitz(#[from] LevitzError),
    #[error(transparent)]
    Copy(#[from] CopyError),
}

/// Narrows a value that must be materialized as an element or position.
pub(crate) fn to_u64(v: &Nat, what: &str) -> Result<u64, IslandError> {
    v.to_u64()
        .ok_or_else(|| IslandError::Overflow(format!("{what} = {v}")))
}

/// A finite structure given by a partial successor map on names `0..len`,
/// exposed as a copy whose successor fails outside the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainPrefix {
    origin: u64,
    successor: BTreeMap<u64, u64>,
}

impl ChainPrefix {
    pub fn new(origin: u64, successor: BTreeMap<u64, u64>) -> Self {
        ChainPrefix { origin, successor }
    }

    pub fn successor_map(&self) -> &BTreeMap<u64, u64> {
        &self.successor
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.successor.values().all(|v| seen.insert(*v))
    }

    /// The chain `origin, S(origin), ...` up to its first undefined successor.
    pub fn chain(&self) -> Vec<u64> {
        let mut out = vec![self.origin];
        let mut cur = self.origin;
        while let Some(&next) = self.successor.get(&cur) {
            if out.len() > self.successor.len() {
                break;
            }
            out.push(next);
            cur = next;
        }
        out
    }

    /// Every element with a successor or a predecessor lies on the origin's
    /// chain.
    pub fn is_chain_connected(&self) -> bool {
        let chain: std::collections::BTreeSet<u64> = self.chain().into_iter().collect();
        self.successor
            .iter()
            .all(|(k, v)| chain.contains(k) && chain.contains(v))
    }
}

impl PunctualCopy for ChainPrefix {
    fn name(&self) -> String {
        "chain-prefix".to_string()
    }

    fn origin(&self) -> Nat {
        Nat::from(self.origin)
    }

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        x.to_u64()
            .and_then(|k| self.successor.get(&k))
            .map(|&v| Nat::from(v))
            .ok_or_else(|| CopyError::Undefined(x.clone()))
    }
}
