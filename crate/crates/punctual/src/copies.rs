//! Copies of `(N, S)` given intensionally by an origin and a successor, and
//! the brute-force oracles that recover the isomorphism `c` from them.
//!
//! `c(p)` is the `p`-fold successor of the origin. Every oracle call carries
//! an explicit budget and fails with an error instead of truncating.

use std::sync::Mutex;

use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::foundations::GapError;
use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CopyError {
    #[error("position {requested} exceeds the iteration budget {budget}")]
    BudgetExceeded { requested: Nat, budget: u64 },
    #[error("element {element} not found within {budget} successor steps")]
    NotFoundWithinBudget { element: Nat, budget: u64 },
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error("copy `{copy}` exposes no {op} image")]
    Unsupported { copy: String, op: &'static str },
    #[error("value too large to materialize: {0}")]
    TooLarge(String),
    #[error("successor of {0} is not defined in this finite structure")]
    Undefined(Nat),
}

pub trait PunctualCopy: Send + Sync {
    fn name(&self) -> String;

    /// The element with number 0.
    fn origin(&self) -> Nat;

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError>;

    /// Image of `+`, when the copy knows one without searching.
    fn plus_image(&self, _x: &Nat, _y: &Nat) -> Result<Nat, CopyError> {
        Err(CopyError::Unsupported {
            copy: self.name(),
            op: "addition",
        })
    }

    /// Image of `x -> 2^x`, when the copy knows one without searching.
    fn pow2_image(&self, _x: &Nat) -> Result<Nat, CopyError> {
        Err(CopyError::Unsupported {
            copy: self.name(),
            op: "power-of-two",
        })
    }
}

impl<T: PunctualCopy + ?Sized> PunctualCopy for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn origin(&self) -> Nat {
        (**self).origin()
    }
    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        (**self).successor(x)
    }
    fn plus_image(&self, x: &Nat, y: &Nat) -> Result<Nat, CopyError> {
        (**self).plus_image(x, y)
    }
    fn pow2_image(&self, x: &Nat) -> Result<Nat, CopyError> {
        (**self).pow2_image(x)
    }
}

impl<T: PunctualCopy + ?Sized> PunctualCopy for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn origin(&self) -> Nat {
        (**self).origin()
    }
    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        (**self).successor(x)
    }
    fn plus_image(&self, x: &Nat, y: &Nat) -> Result<Nat, CopyError> {
        (**self).plus_image(x, y)
    }
    fn pow2_image(&self, x: &Nat) -> Result<Nat, CopyError> {
        (**self).pow2_image(x)
    }
}

/// The standard copy: `c` is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl PunctualCopy for Identity {
    fn name(&self) -> String {
        "identity".to_string()
    }

    fn origin(&self) -> Nat {
        Nat::default()
    }

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        Ok(x + 1u32)
    }

    fn plus_image(&self, x: &Nat, y: &Nat) -> Result<Nat, CopyError> {
        Ok(x + y)
    }

    fn pow2_image(&self, x: &Nat) -> Result<Nat, CopyError> {
        crate::nat::pow2(x).ok_or_else(|| CopyError::TooLarge(format!("2^{x}")))
    }
}

/// `c(p)`, by `p` successor steps from the origin.
pub fn element_at<C: PunctualCopy + ?Sized>(
    copy: &C,
    p: &Nat,
    budget: u64,
) -> Result<Nat, CopyError> {
    let steps = p
        .to_u64()
        .filter(|&s| s <= budget)
        .ok_or_else(|| CopyError::BudgetExceeded {
            requested: p.clone(),
            budget,
        })?;
    let mut x = copy.origin();
    for _ in 0..steps {
        x = copy.successor(&x)?;
    }
    Ok(x)
}

/// `c^{-1}(x)`: the least `p <= budget` with `c(p) = x`.
pub fn number_of<C: PunctualCopy + ?Sized>(
    copy: &C,
    x: &Nat,
    budget: u64,
) -> Result<u64, CopyError> {
    let mut cur = copy.origin();
    for p in 0..=budget {
        if &cur == x {
            return Ok(p);
        }
        if p < budget {
            cur = copy.successor(&cur)?;
        }
    }
    Err(CopyError::NotFoundWithinBudget {
        element: x.clone(),
        budget,
    })
}

/// `c(f(c^{-1}(x)))`; the budget caps both the search and the replay.
pub fn image_oracle<C, F>(copy: &C, f: F, x: &Nat, budget: u64) -> Result<Nat, CopyError>
where
    C: PunctualCopy + ?Sized,
    F: Fn(&Nat) -> Nat,
{
    let p = number_of(copy, x, budget)?;
    element_at(copy, &f(&Nat::from(p)), budget)
}

/// `mu t <= x [c(t) >= x]`.
pub fn inverse_bound<C: PunctualCopy + ?Sized>(copy: &C, x: &Nat) -> Result<Nat, CopyError> {
    let mut cur = copy.origin();
    let mut t = Nat::default();
    // c is injective, so c(0..=x) holds x+1 distinct values and one is >= x
    loop {
        if &cur >= x || &t == x {
            return Ok(t);
        }
        cur = copy.successor(&cur)?;
        t += 1u32;
    }
}

/// Lazily grown table `c(0), c(1), ...` behind a lock.
#[derive(Debug)]
pub struct ElementPrefix {
    cap: u64,
    elements: Mutex<Vec<Nat>>,
}

impl ElementPrefix {
    pub fn new(cap: u64) -> Self {
        ElementPrefix {
            cap,
            elements: Mutex::new(Vec::new()),
        }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// `c(0..=p)`, extending the table as needed.
    pub fn upto<C: PunctualCopy + ?Sized>(&self, copy: &C, p: u64) -> Result<Vec<Nat>, CopyError> {
        self.extend_to(copy, p)?;
        let elements = self.elements.lock().expect("prefix lock poisoned");
        Ok(elements[..=p as usize].to_vec())
    }

    pub fn get<C: PunctualCopy + ?Sized>(&self, copy: &C, p: u64) -> Result<Nat, CopyError> {
        self.extend_to(copy, p)?;
        let elements = self.elements.lock().expect("prefix lock poisoned");
        Ok(elements[p as usize].clone())
    }

    /// The `p <= limit` with `c(p) = x`, if any.
    pub fn position_within<C: PunctualCopy + ?Sized>(
        &self,
        copy: &C,
        x: &Nat,
        limit: u64,
    ) -> Result<Option<u64>, CopyError> {
        self.extend_to(copy, limit)?;
        let elements = self.elements.lock().expect("prefix lock poisoned");
        Ok(elements[..=limit as usize]
            .iter()
            .position(|e| e == x)
            .map(|p| p as u64))
    }

    fn extend_to<C: PunctualCopy + ?Sized>(&self, copy: &C, p: u64) -> Result<(), CopyError> {
        if p > self.cap {
            return Err(CopyError::BudgetExceeded {
                requested: Nat::from(p),
                budget: self.cap,
            });
        }
        let mut elements = self.elements.lock().expect("prefix lock poisoned");
        if elements.is_empty() {
            elements.push(copy.origin());
        }
        while (elements.len() as u64) <= p {
            let next = copy.successor(elements.last().unwrap())?;
            elements.push(next);
        }
        Ok(())
    }
}

/// Wraps a copy and answers `+` and `2^x` images by brute-force search.
/// Used to feed lifts whose base has no fast arithmetic.
#[derive(Debug)]
pub struct OracleArithmetic<C> {
    inner: C,
    budget: u64,
}

impl<C: PunctualCopy> OracleArithmetic<C> {
    pub fn new(inner: C, budget: u64) -> Self {
        OracleArithmetic { inner, budget }
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: PunctualCopy> PunctualCopy for OracleArithmetic<C> {
    fn name(&self) -> String {
        format!("oracle-arithmetic({})", self.inner.name())
    }

    fn origin(&self) -> Nat {
        self.inner.origin()
    }

    fn successor(&self, x: &Nat) -> Result<Nat, CopyError> {
        self.inner.successor(x)
    }

    fn plus_image(&self, x: &Nat, y: &Nat) -> Result<Nat, CopyError> {
        let q = Nat::from(number_of(&self.inner, y, self.budget)?);
        image_oracle(&self.inner, |p| p + &q, x, self.budget)
    }

    fn pow2_image(&self, x: &Nat) -> Result<Nat, CopyError> {
        let p = number_of(&self.inner, x, self.budget)?;
        let exp = u32::try_from(p)
            .ok()
            .filter(|&e| e < 64)
            .ok_or_else(|| CopyError::TooLarge(format!("2^{p}")))?;
        element_at(&self.inner, &(Nat::one() << exp), self.budget)
    }
}
