//! Non-constant polynomials with natural coefficients as a family plugin.
//!
//! The normal form of `a_k x^k + ... + a_0` is the code
//! `p_0^{a_0} * ... * p_k^{a_k}` over the first primes; listing the family in
//! increasing code order is listing all numbers that are not powers of two.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{to_u64, IslandError, LFamily};
use crate::nat::Nat;

/// Largest normal-form code materialized, in bits.
const CODE_BITS_CAP: u64 = 1 << 24;

/// Coefficients from the constant term up, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Nat>);

impl Poly {
    pub fn new<T: Into<Nat>>(coefficients: Vec<T>) -> Self {
        let mut c: Vec<Nat> = coefficients.into_iter().map(Into::into).collect();
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn x() -> Self {
        Poly::new(vec![0u32, 1])
    }

    pub fn constant(c: u64) -> Self {
        Poly::new(vec![c])
    }

    pub fn coefficients(&self) -> &[Nat] {
        &self.0
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn eval(&self, x: &Nat) -> Nat {
        self.0.iter().rev().fold(Nat::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let c = (0..n)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_default();
                a + other.0.get(i).cloned().unwrap_or_default()
            })
            .collect();
        Poly::new::<Nat>(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::default();
        }
        let mut c = vec![Nat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.0.iter().rev().fold(Poly::default(), |acc, c| {
            acc.mul(inner).add(&Poly::new(vec![c.clone()]))
        })
    }
}

impl Ord for Poly {
    /// Eventual domination: degree first, then coefficients from the top.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coef = if c.is_one() && k > 0 {
                String::new()
            } else {
                c.to_string()
            };
            parts.push(match k {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{k}"),
            });
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for Poly {
    type Err = String;

    /// Sums of monomials `c`, `cx`, `x^k`, `cx^k`, with optional `*` before
    /// `x` and spaces anywhere.
    fn from_str(s: &str) -> Result<Self, String> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |m: &str| format!("cannot read `{m}` as a monomial in `{s}`");
        let mut coeffs: Vec<Nat> = Vec::new();
        for mono in text.split('+') {
            let (coef, power) = match mono.find('x') {
                None => (mono, 0usize),
                Some(i) => {
                    let coef = mono[..i].trim_end_matches('*');
                    let power = match &mono[i + 1..] {
                        "" => 1,
                        rest => rest
                            .strip_prefix('^')
                            .and_then(|k| k.parse().ok())
                            .ok_or_else(|| bad(mono))?,
                    };
                    (coef, power)
                }
            };
            let c: Nat = match coef {
                "" if power > 0 => Nat::one(),
                c => c.parse().map_err(|_| bad(mono))?,
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Nat::zero());
            }
            coeffs[power] += c;
        }
        Ok(Poly::new(coeffs))
    }
}

fn nth_prime(i: usize) -> u64 {
    (2u64..)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .nth(i)
        .expect("primes are infinite")
}

/// `N(t) = p_0^{a_0} * ... * p_k^{a_k}`.
pub fn poly_normal_form(t: &Poly) -> Result<Nat, IslandError> {
    if t.is_constant() {
        return Err(IslandError::ConstantPolynomial(t.to_string()));
    }
    let mut code = Nat::one();
    for (i, a) in t.0.iter().enumerate() {
        let p = nth_prime(i);
        let bits = a
            .to_u64()
            .and_then(|a| a.checked_mul(64 - p.leading_zeros() as u64))
            .filter(|&b| b + code.bits() <= CODE_BITS_CAP)
            .ok_or_else(|| IslandError::Overflow(format!("normal form of {t}")))?;
        debug_assert!(bits <= CODE_BITS_CAP);
        code *= Nat::from(p).pow(a.to_u32().expect("bounded by the bit check"));
    }
    Ok(code)
}

/// Decodes a code of the form `p_0^{a_0} * ... * p_k^{a_k}` into its
/// polynomial.
fn decode(mut code: u64) -> Poly {
    let mut coeffs = Vec::new();
    let mut i = 0;
    while code > 1 {
        let p = nth_prime(i);
        let mut a = 0u64;
        while code.is_multiple_of(p) {
            code /= p;
            a += 1;
        }
        coeffs.push(a);
        i += 1;
    }
    Poly::new(coeffs)
}

/// `k * (1 + max |b_j|)` for `upper - lower = b_k x^k + ... + b_0`, a strict
/// witness whenever `b_k > 0`.
pub fn poly_witness(lower: &Poly, upper: &Poly) -> Result<Nat, IslandError> {
    for t in [lower, upper] {
        if t.is_constant() {
            return Err(IslandError::ConstantPolynomial(t.to_string()));
        }
    }
    let n = lower.0.len().max(upper.0.len());
    let mut diff: Vec<BigInt> = (0..n)
        .map(|i| {
            let hi = BigInt::from(upper.0.get(i).cloned().unwrap_or_default());
            hi - BigInt::from(lower.0.get(i).cloned().unwrap_or_default())
        })
        .collect();
    while diff.last().is_some_and(Zero::is_zero) {
        diff.pop();
    }
    if !diff.last().is_some_and(Signed::is_positive) {
        return Err(IslandError::NotDominated {
            lower: lower.to_string(),
            upper: upper.to_string(),
        });
    }
    let k = diff.len() - 1;
    let max = diff
        .iter()
        .map(|b| b.magnitude().clone())
        .max()
        .unwrap_or_default();
    Ok(Nat::from(k) * (max + 1u32))
}

/// The non-constant polynomials, listed in increasing code order.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyFamily;

impl LFamily for PolyFamily {
    type Term = Poly;
    type Normal = Poly;

    fn name(&self) -> String {
        "poly".to_string()
    }

    fn identity(&self) -> Poly {
        Poly::x()
    }

    fn successor(&self) -> Poly {
        Poly::new(vec![1u32, 1])
    }

    /// Scans `0, 1, 2, ...` for the `i`-th number that is not a power of two;
    /// the cost is the number of candidates scanned.
    fn base_term(&self, i: u64) -> (Poly, u64) {
        let mut seen = 0;
        let mut n = 0u64;
        loop {
            if n >= 3 && !n.is_power_of_two() {
                if seen == i {
                    return (decode(n), n + 1);
                }
                seen += 1;
            }
            n += 1;
        }
    }

    fn compose(&self, outer: &Poly, inner: &Poly) -> Result<Poly, IslandError> {
        Ok(outer.compose(inner))
    }

    fn normal_form(&self, t: &Poly) -> Result<Poly, IslandError> {
        if t.is_constant() {
            return Err(IslandError::ConstantPolynomial(t.to_string()));
        }
        Ok(t.clone())
    }

    fn eval(&self, t: &Poly, x: u64) -> Result<u64, IslandError> {
        to_u64(&t.eval(&Nat::from(x)), &format!("({t})({x})"))
    }

    fn strict_witness(&self, lower: &Poly, upper: &Poly) -> Result<u64, IslandError> {
        to_u64(&poly_witness(lower, upper)?, "witness")
    }
}
