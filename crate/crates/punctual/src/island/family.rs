//! Families of strictly increasing unary functions, closed under
//! composition and linearly ordered by eventual domination, with normal
//! forms that decide the order and yield strict domination witnesses.

use std::cmp::Ordering;
use std::fmt;

use super::IslandError;

pub trait LFamily {
    type Term: Clone + fmt::Display + fmt::Debug;
    /// Normal forms; `Ord` is the domination order.
    type Normal: Ord + Clone + fmt::Debug;

    fn name(&self) -> String;

    fn identity(&self) -> Self::Term;

    fn successor(&self) -> Self::Term;

    /// The `i`-th term of a computable list of the family, with the number
    /// of steps it takes to produce it.
    fn base_term(&self, i: u64) -> (Self::Term, u64);

    /// `outer(inner(x))`.
    fn compose(&self, outer: &Self::Term, inner: &Self::Term) -> Result<Self::Term, IslandError>;

    fn normal_form(&self, t: &Self::Term) -> Result<Self::Normal, IslandError>;

    fn eval(&self, t: &Self::Term, x: u64) -> Result<u64, IslandError>;

    /// Some `n` with `lower(x) < upper(x)` for all `x >= n`; requires
    /// `lower` strictly dominated by `upper`.
    fn strict_witness(&self, lower: &Self::Term, upper: &Self::Term) -> Result<u64, IslandError>;

    fn compare(&self, a: &Self::Term, b: &Self::Term) -> Result<Ordering, IslandError> {
        Ok(self.normal_form(a)?.cmp(&self.normal_form(b)?))
    }
}

/// The primitive recursive relisting of a family: `t'_0 = t_0`, and `t'_s`
/// is the next pending base term if producing it takes at most `s` steps,
/// else `t_0` again. An optional explicit prefix overrides the first entries.
#[derive(Debug, Clone)]
pub struct Listing<T> {
    prefix: Vec<T>,
    streamed: Vec<T>,
    pending: u64,
}

impl<T: Clone> Listing<T> {
    pub fn new() -> Self {
        Listing::with_prefix(Vec::new())
    }

    pub fn with_prefix(prefix: Vec<T>) -> Self {
        Listing {
            prefix,
            streamed: Vec::new(),
            pending: 1,
        }
    }

    pub fn get<F: LFamily<Term = T>>(&mut self, family: &F, s: u64) -> T {
        if let Some(t) = self.prefix.get(s as usize) {
            return t.clone();
        }
        while self.streamed.len() as u64 <= s {
            let step = self.streamed.len() as u64;
            let next = if step == 0 {
                family.base_term(0).0
            } else {
                let (t, cost) = family.base_term(self.pending);
                if cost <= step {
                    self.pending += 1;
                    t
                } else {
                    self.streamed[0].clone()
                }
            };
            self.streamed.push(next);
        }
        self.streamed[s as usize].clone()
    }
}

impl<T: Clone> Default for Listing<T> {
    fn default() -> Self {
        Listing::new()
    }
}
