//! Binary lift of a copy: `c~(2^{i_k} + ... + 2^{i_0}) = 2^{c(i_k)} + ... + 2^{c(i_0)}`.
//!
//! Elements of the lift are plain naturals whose set bits sit at base
//! elements. Adding `2^{c^{-1}(u)}` is a carry chain walked along the base
//! successor, so successor and addition need only `S` of the base; products
//! also need the base's addition image and powers of two its `2^x` image.
//! Inputs outside `ran(c~)` are not rejected; results on them are unspecified.

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::copies::{CopyError, ElementPrefix, PunctualCopy};
use crate::nat::{bit_at, set_bits, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("base copy `{0}` has no addition image")]
    MissingBaseAddition(String),
    #[error("base copy `{0}` has no power-of-two image")]
    MissingBasePow(String),
    #[error(transparent)]
    Base(#[from] CopyError),
}

impl From<LiftError> for CopyError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::MissingBaseAddition(copy) => CopyError::Unsupported {
                copy,
                op: "addition",
            },
            LiftError::MissingBasePow(copy) => CopyError::Unsupported {
                copy,
                op: "power-of-two",
            },
            LiftError::Base(inner) => inner,
        }
    }
}

#[derive(Debug)]
pub struct Lift<B> {
    base: B,
    prefix: ElementPrefix,
}

impl<B: PunctualCopy> Lift<B> {
    /// `budget` caps the base positions `lift_element` may iterate to.
    pub fn new(base: B, budget: u64) -> Self {
        Lift {
            base,
            prefix: ElementPrefix::new(budget),
        }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    /// `c~(n)`.
    pub fn lift_element(&self, n: &Nat) -> Result<Nat, LiftError> {
        let mut out = Nat::zero();
        for i in set_bits(n) {
            let e = self.prefix.get(&self.base, i)?;
            set(&mut out, &e)?;
        }
        Ok(out)
    }

    /// `c~(n + 2^j)` for `x = c~(n)` and `u = c(j)`.
    pub fn lift_add(&self, x: &Nat, u: &Nat) -> Result<Nat, LiftError> {
        let mut out = x.clone();
        let mut probe = u.clone();
        // at most popcount(x) + 1 probes: each hit clears one set bit
        while bit_at(x, &probe) {
            clear(&mut out, &probe);
            probe = self.base.successor(&probe)?;
        }
        set(&mut out, &probe)?;
        Ok(out)
    }

    pub fn lift_succ(&self, x: &Nat) -> Result<Nat, LiftError> {
        self.lift_add(x, &self.base.origin())
    }

    pub fn lift_plus(&self, x: &Nat, y: &Nat) -> Result<Nat, LiftError> {
        let mut acc = x.clone();
        for u in set_bits(y) {
            acc = self.lift_add(&acc, &Nat::from(u))?;
        }
        Ok(acc)
    }

    /// `c~(n * 2^j)` for `x = c~(n)` and `u = c(j)`: each bit `e` moves to `e +base u`.
    pub fn lift_prod(&self, x: &Nat, u: &Nat) -> Result<Nat, LiftError> {
        let mut out = Nat::zero();
        for e in set_bits(x) {
            let shifted = self.base_plus(&Nat::from(e), u)?;
            set(&mut out, &shifted)?;
        }
        Ok(out)
    }

    pub fn lift_times(&self, x: &Nat, y: &Nat) -> Result<Nat, LiftError> {
        let mut acc = Nat::zero();
        for u in set_bits(y) {
            let part = self.lift_prod(x, &Nat::from(u))?;
            acc = self.lift_plus(&acc, &part)?;
        }
        Ok(acc)
    }

    /// `2^{p(e_k) +base ... +base p(e_0)}` over the set bits `e_j` of `x`,
    /// where `p` is the base image of `2^x`; the empty sum is `c(0)`.
    pub fn lift_pow2(&self, x: &Nat) -> Result<Nat, LiftError> {
        let mut exponent = self.base.origin();
        for e in set_bits(x) {
            let p = self.base_pow2(&Nat::from(e))?;
            exponent = self.base_plus(&exponent, &p)?;
        }
        let mut out = Nat::zero();
        set(&mut out, &exponent)?;
        Ok(out)
    }

    fn base_plus(&self, x: &Nat, y: &Nat) -> Result<Nat, LiftError> {
        self.base.plus_image(x, y).map_err(|e| match e {
            CopyError::Unsupported { copy, .. } => LiftError::MissingBaseAddition(copy),
            other => LiftError::Base(other),
        })
    }

    fn base_pow2(&self, x: &Nat) -> Result<Nat, LiftError> {
        self.base.pow2_image(x).map_err(|e| match e {
            CopyError::Unsupported { copy, .. } => LiftError::MissingBasePow(copy),
            other => LiftError::Base(other),
        })
    }
}

fn set(x: &mut Nat, index: &Nat) -> Result<(), LiftError> {
    let i = index
        .to_u64()
        .ok_or_else(|| CopyError::TooLarge(format!("2^{index}")))?;
    x.set_bit(i, true);
    Ok(())
}

fn clear(x: &mut Nat, index: &Nat) {
    if let Some(i) = index.to_u64() {
        x.set_bit(i, false);
    }
}

impl<B: PunctualCopy> PunctualCopy for Lift<B> {
    fn name(&self) -> String {
        format!("binary-lift({})", self.base.name())
    }

    fn origin(&self) -> Nat {
        Nat::zero()
    }

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        Ok(self.lift_succ(x)?)
    }

    fn plus_image(&self, x: &Nat, y: &Nat) -> Result<Nat, CopyError> {
        Ok(self.lift_plus(x, y)?)
    }

    fn pow2_image(&self, x: &Nat) -> Result<Nat, CopyError> {
        Ok(self.lift_pow2(x)?)
    }
}
