//! Set normal forms and canonical normal forms.
//!
//! Repeated summands and repeated `x`-factors are stored as runs `(item, count)`:
//! a constant like `5^(5^5)` has `5^3125` summands `1`, which only a count can
//! hold. Runs in a canonical form are strictly descending, so lexicographic
//! comparison of the expanded lists is lexicographic comparison of the runs
//! with counts compared after items.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::term::{capped_pow, DigitCap, LevitzTerm};
use super::LevitzError;
use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Base {
    /// A constant base, always `>= 2`.
    Num(Nat),
    Var,
}

/// `base^exp` with `exp` an additive prime in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factor {
    pub base: Base,
    pub exp: Mnf,
}

/// Canonical product form of an additive prime; empty is `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mnf {
    runs: Vec<(Factor, Nat)>,
}

/// Canonical sum form; empty is `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Anf {
    runs: Vec<(Mnf, Nat)>,
}

/// One entry of a set-MNF: `base^exp` repeated `count` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFactor {
    pub base: Base,
    pub exp: LevitzTerm,
    pub count: Nat,
}

fn cap_bits() -> u64 {
    DigitCap::default().bits()
}

fn overflow(t: &LevitzTerm) -> LevitzError {
    LevitzError::NormalFormOverflow(t.to_string())
}

pub fn cmp_base(a: &Base, b: &Base) -> Ordering {
    match (a, b) {
        (Base::Num(m), Base::Num(n)) => m.cmp(n),
        (Base::Num(_), Base::Var) => Ordering::Less,
        (Base::Var, Base::Num(_)) => Ordering::Greater,
        (Base::Var, Base::Var) => Ordering::Equal,
    }
}

pub fn cmp_factor(a: &Factor, b: &Factor) -> Ordering {
    cmp_mnf(&a.exp, &b.exp).then_with(|| cmp_base(&a.base, &b.base))
}

fn cmp_runs<T>(a: &[(T, Nat)], b: &[(T, Nat)], cmp: impl Fn(&T, &T) -> Ordering) -> Ordering {
    for ((x, m), (y, n)) in a.iter().zip(b) {
        match cmp(x, y).then_with(|| m.cmp(n)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn cmp_mnf(a: &Mnf, b: &Mnf) -> Ordering {
    cmp_runs(&a.runs, &b.runs, cmp_factor)
}

pub fn cmp_anf(a: &Anf, b: &Anf) -> Ordering {
    cmp_runs(&a.runs, &b.runs, cmp_mnf)
}

/// Sorts descending and merges equal neighbours.
fn canonical_runs<T: PartialEq>(
    mut runs: Vec<(T, Nat)>,
    cmp: impl Fn(&T, &T) -> Ordering,
) -> Vec<(T, Nat)> {
    runs.sort_by(|a, b| cmp(&b.0, &a.0));
    let mut out: Vec<(T, Nat)> = Vec::with_capacity(runs.len());
    for (item, count) in runs {
        match out.last_mut() {
            Some((last, c)) if *last == item => *c += count,
            _ => out.push((item, count)),
        }
    }
    out
}

impl Factor {
    pub fn var(exp: Mnf) -> Self {
        Factor {
            base: Base::Var,
            exp,
        }
    }

    pub fn to_term(&self) -> LevitzTerm {
        match &self.base {
            Base::Num(n) => LevitzTerm::ConstPow(n.clone(), Box::new(self.exp.to_term())),
            Base::Var if self.exp.is_one() => LevitzTerm::Var,
            Base::Var => LevitzTerm::var_pow(self.exp.to_term()),
        }
    }
}

impl Mnf {
    pub fn one() -> Self {
        Mnf::default()
    }

    pub fn is_one(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn from_factor(f: Factor) -> Self {
        Mnf {
            runs: vec![(f, Nat::one())],
        }
    }

    /// `x^1`.
    pub fn x() -> Self {
        Mnf::from_factor(Factor::var(Mnf::one()))
    }

    pub fn runs(&self) -> &[(Factor, Nat)] {
        &self.runs
    }

    /// Number of factors counted with repetition.
    pub fn factor_count(&self) -> Nat {
        self.runs.iter().map(|(_, c)| c).sum()
    }

    pub fn leading(&self) -> Option<&Factor> {
        self.runs.first().map(|(f, _)| f)
    }

    /// Removes one copy of the leading factor.
    pub fn without_leading(&self) -> Mnf {
        let mut runs = self.runs.clone();
        if let Some((_, c)) = runs.first_mut() {
            *c -= 1u32;
            if c.is_zero() {
                runs.remove(0);
            }
        }
        Mnf { runs }
    }

    /// Multiset intersection and the two remainders.
    pub fn split_common(&self, other: &Mnf) -> (Mnf, Mnf, Mnf) {
        let count_in = |m: &Mnf, f: &Factor| {
            m.runs
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, c)| c.clone())
                .unwrap_or_default()
        };
        let mut common = Vec::new();
        let mut left = Vec::new();
        for (f, c) in &self.runs {
            let shared = c.clone().min(count_in(other, f));
            if !shared.is_zero() {
                common.push((f.clone(), shared.clone()));
            }
            if *c > shared {
                left.push((f.clone(), c - &shared));
            }
        }
        let right = other
            .runs
            .iter()
            .filter_map(|(f, c)| {
                let shared = count_in(self, f).min(c.clone());
                (*c > shared).then(|| (f.clone(), c - shared))
            })
            .collect();
        (
            Mnf { runs: common },
            Mnf { runs: left },
            Mnf { runs: right },
        )
    }

    /// Product of canonical forms.
    pub fn mul(&self, other: &Mnf) -> Result<Mnf, LevitzError> {
        let mut raw: Vec<(Base, Mnf, Nat)> = Vec::new();
        for (f, c) in self.runs.iter().chain(&other.runs) {
            raw.push((f.base.clone(), f.exp.clone(), c.clone()));
        }
        Mnf::assemble(raw)
            .ok_or_else(|| overflow(&LevitzTerm::prod(self.to_term(), other.to_term())))
    }

    /// Merges constant bases sharing an exponent and sorts; `None` when a
    /// merged base exceeds the digit cap.
    fn assemble(raw: Vec<(Base, Mnf, Nat)>) -> Option<Mnf> {
        let mut runs = Vec::new();
        let mut merged: Vec<(Mnf, Nat)> = Vec::new();
        for (base, exp, count) in raw {
            match base {
                Base::Var => runs.push((Factor::var(exp), count)),
                Base::Num(n) => {
                    let power = capped_pow(&n, &count, cap_bits())?;
                    match merged.iter_mut().find(|(e, _)| *e == exp) {
                        Some((_, b)) => {
                            *b *= power;
                            if b.bits() > cap_bits() {
                                return None;
                            }
                        }
                        None => merged.push((exp, power)),
                    }
                }
            }
        }
        for (exp, b) in merged {
            runs.push((
                Factor {
                    base: Base::Num(b),
                    exp,
                },
                Nat::one(),
            ));
        }
        Some(Mnf {
            runs: canonical_runs(runs, cmp_factor),
        })
    }

    pub fn to_term(&self) -> LevitzTerm {
        let mut parts = self.runs.iter().map(|(f, c)| {
            if c.is_one() {
                f.to_term()
            } else {
                // x^e repeated c times is x^(c*e)
                LevitzTerm::var_pow(LevitzTerm::prod(LevitzTerm::numeral(c), f.exp.to_term()))
            }
        });
        match parts.next() {
            None => LevitzTerm::One,
            Some(first) => parts.fold(first, LevitzTerm::prod),
        }
    }
}

impl Anf {
    pub fn zero() -> Self {
        Anf::default()
    }

    pub fn runs(&self) -> &[(Mnf, Nat)] {
        &self.runs
    }

    /// Number of summands counted with repetition.
    pub fn summand_count(&self) -> Nat {
        self.runs.iter().map(|(_, c)| c).sum()
    }

    pub fn to_term(&self) -> LevitzTerm {
        let mut parts = self.runs.iter().map(|(p, c)| {
            if c.is_one() {
                p.to_term()
            } else {
                LevitzTerm::prod(LevitzTerm::numeral(c), p.to_term())
            }
        });
        match parts.next() {
            None => LevitzTerm::Zero,
            Some(first) => parts.fold(first, LevitzTerm::sum),
        }
    }

    /// Drops the summands both sides share, counted with repetition.
    pub fn cancel_common(&self, other: &Anf) -> (Anf, Anf) {
        let count_in = |a: &Anf, p: &Mnf| {
            a.runs
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, c)| c.clone())
                .unwrap_or_default()
        };
        let rest = |a: &Anf, b: &Anf| Anf {
            runs: a
                .runs
                .iter()
                .filter_map(|(p, c)| {
                    let shared = count_in(b, p).min(c.clone());
                    (*c > shared).then(|| (p.clone(), c - shared))
                })
                .collect(),
        };
        (rest(self, other), rest(other, self))
    }
}

impl fmt::Display for Mnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

/// Set-ANF: additive-prime summands with repetition counts, unsorted.
pub fn set_anf(t: &LevitzTerm) -> Result<Vec<(LevitzTerm, Nat)>, LevitzError> {
    Ok(match t {
        LevitzTerm::Zero => Vec::new(),
        LevitzTerm::One | LevitzTerm::Var | LevitzTerm::VarPow(_) => vec![(t.clone(), Nat::one())],
        LevitzTerm::Sum(a, b) => {
            let mut out = set_anf(a)?;
            out.extend(set_anf(b)?);
            out
        }
        LevitzTerm::Prod(a, b) => {
            let (left, right) = (set_anf(a)?, set_anf(b)?);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for (p, m) in &left {
                for (q, n) in &right {
                    out.push((LevitzTerm::prod(p.clone(), q.clone()), m * n));
                }
            }
            out
        }
        LevitzTerm::ConstPow(n, _) if n.is_one() => vec![(LevitzTerm::One, Nat::one())],
        LevitzTerm::ConstPow(n, e) => {
            let (ones, rest) = split_unit_summands(e)?;
            let copies = capped_pow(n, &ones, cap_bits()).ok_or_else(|| overflow(t))?;
            // n^(sum of the non-unit summands), the empty sum giving n^0 = 1
            let prime = match summed(&rest) {
                None => LevitzTerm::One,
                Some(s) => LevitzTerm::ConstPow(n.clone(), Box::new(s)),
            };
            vec![(prime, copies)]
        }
    })
}

/// Splits `set_anf(e)` into the number of summands equal to `1` and the rest.
fn split_unit_summands(e: &LevitzTerm) -> Result<(Nat, Vec<(LevitzTerm, Nat)>), LevitzError> {
    let mut ones = Nat::zero();
    let mut rest = Vec::new();
    for (p, m) in set_anf(e)? {
        if mnf(&p)?.is_one() {
            ones += m;
        } else {
            rest.push((p, m));
        }
    }
    Ok((ones, rest))
}

fn summed(parts: &[(LevitzTerm, Nat)]) -> Option<LevitzTerm> {
    parts
        .iter()
        .map(|(p, m)| {
            if m.is_one() {
                p.clone()
            } else {
                LevitzTerm::prod(LevitzTerm::numeral(m), p.clone())
            }
        })
        .reduce(LevitzTerm::sum)
}

fn is_single(parts: &[(LevitzTerm, Nat)]) -> bool {
    parts.len() == 1 && parts[0].1.is_one()
}

/// Set-MNF of an additive prime; `None` when `t` is not one.
pub fn set_mnf(t: &LevitzTerm) -> Result<Option<Vec<SetFactor>>, LevitzError> {
    if !is_single(&set_anf(t)?) {
        return Ok(None);
    }
    let spread = |base: Base, parts: Vec<(LevitzTerm, Nat)>| {
        parts
            .into_iter()
            .map(|(exp, count)| SetFactor {
                base: base.clone(),
                exp,
                count,
            })
            .collect::<Vec<_>>()
    };
    Ok(Some(match t {
        LevitzTerm::One => Vec::new(),
        LevitzTerm::Var => spread(Base::Var, vec![(LevitzTerm::One, Nat::one())]),
        LevitzTerm::Sum(a, b) => {
            // exactly one side is 0
            let nonzero = if set_anf(a)?.is_empty() { b } else { a };
            set_mnf(nonzero)?.expect("nonzero side of a prime sum is prime")
        }
        LevitzTerm::Prod(a, b) => {
            let mut out = set_mnf(a)?.expect("factor of a prime product is prime");
            out.extend(set_mnf(b)?.expect("factor of a prime product is prime"));
            out
        }
        LevitzTerm::VarPow(e) => spread(Base::Var, set_anf(e)?),
        LevitzTerm::ConstPow(n, _) if n.is_one() => Vec::new(),
        LevitzTerm::ConstPow(n, e) => {
            let (ones, rest) = split_unit_summands(e)?;
            debug_assert!(ones.is_zero());
            spread(Base::Num(n.clone()), rest)
        }
        LevitzTerm::Zero => unreachable!("0 has no summands"),
    }))
}

pub fn mnf(t: &LevitzTerm) -> Result<Mnf, LevitzError> {
    let factors = set_mnf(t)?.ok_or_else(|| LevitzError::NotAdditivePrime(t.to_string()))?;
    let mut raw = Vec::with_capacity(factors.len());
    for SetFactor { base, exp, count } in factors {
        raw.push((base, mnf(&exp)?, count));
    }
    Mnf::assemble(raw).ok_or_else(|| overflow(t))
}

pub fn anf(t: &LevitzTerm) -> Result<Anf, LevitzError> {
    let mut runs = Vec::new();
    for (p, m) in set_anf(t)? {
        runs.push((mnf(&p)?, m));
    }
    Ok(Anf {
        runs: canonical_runs(runs, cmp_mnf),
    })
}

pub fn compare(f: &LevitzTerm, g: &LevitzTerm) -> Result<Ordering, LevitzError> {
    Ok(cmp_anf(&anf(f)?, &anf(g)?))
}

/// Checks the five product-form conditions, recursively through exponents.
pub fn check_mnf_conditions(m: &Mnf) -> Result<(), String> {
    let mut const_exps = BTreeMap::new();
    for (i, (f, count)) in m.runs.iter().enumerate() {
        check_mnf_conditions(&f.exp)?;
        match &f.base {
            Base::Num(n) => {
                if n < &Nat::from(2u32) {
                    return Err(format!("constant base {n} below 2"));
                }
                if f.exp.is_one() {
                    return Err(format!("constant base {n} with exponent 1"));
                }
                if !count.is_one() || const_exps.insert(f.exp.to_string(), ()).is_some() {
                    return Err(format!("constant bases share exponent {}", f.exp));
                }
            }
            Base::Var => {}
        }
        if count.is_zero() {
            return Err("empty run".into());
        }
        if i > 0 && cmp_factor(&m.runs[i - 1].0, f) != Ordering::Greater {
            return Err(format!("factors not strictly descending at {i}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levitz::parse_term;
    use crate::nat::nat;

    fn p(s: &str) -> LevitzTerm {
        parse_term(s).unwrap()
    }

    fn anf_of(s: &str) -> Anf {
        anf(&p(s)).unwrap()
    }

    fn mnf_of(s: &str) -> Mnf {
        mnf(&p(s)).unwrap()
    }

    #[test]
    fn set_anf_examples() {
        assert_eq!(
            set_anf(&p("x + 1")).unwrap(),
            vec![(LevitzTerm::Var, nat(1)), (LevitzTerm::One, nat(1))]
        );
        assert_eq!(set_anf(&p("3")).unwrap(), vec![(LevitzTerm::One, nat(3))]);
        assert_eq!(set_anf(&p("0")).unwrap(), vec![]);
    }

    #[test]
    fn set_mnf_examples() {
        let xx = set_mnf(&p("x * x")).unwrap().unwrap();
        assert_eq!(xx.len(), 2);
        assert!(xx
            .iter()
            .all(|f| f.base == Base::Var && f.exp == LevitzTerm::One && f.count == nat(1)));
        assert_eq!(set_mnf(&p("1 + 1")).unwrap(), None);
        assert_eq!(set_mnf(&p("2")).unwrap(), None);
        assert_eq!(set_mnf(&p("1")).unwrap(), Some(vec![]));
    }

    #[test]
    fn mnf_examples() {
        assert!(mnf_of("1").is_one());
        assert_eq!(mnf_of("2^x * 3^x").to_string(), "6^x");
        let m = mnf_of("x * x * 2^x");
        assert_eq!(m.runs().len(), 2);
        assert_eq!(m.runs()[0].0.base, Base::Num(nat(2)));
        assert_eq!(m.runs()[1], (Factor::var(Mnf::one()), nat(2)));
        assert!(matches!(
            mnf(&p("x + 1")),
            Err(LevitzError::NotAdditivePrime(_))
        ));
    }

    #[test]
    fn constant_exponent_units_become_repetition() {
        // 2^(x + 2) = 2^x + 2^x + 2^x + 2^x
        let a = anf_of("2^(x + 2)");
        assert_eq!(a.runs().len(), 1);
        assert_eq!(a.runs()[0].1, nat(4));
        assert_eq!(a.runs()[0].0, mnf_of("2^x"));
        // 2^(x*x + x) = 2^(x*x) * 2^x
        assert_eq!(anf_of("2^(x*x + x)").runs()[0].0.runs().len(), 2);
        // x^1 in the exponent of a constant: 2^(x^1) is prime, not 2
        assert_eq!(anf_of("2^(x^0)"), anf_of("2"));
        assert_eq!(anf_of("5^5^5").summand_count(), Nat::from(5u32).pow(3125));
    }

    #[test]
    fn anf_examples() {
        assert_eq!(anf_of("0"), Anf::zero());
        assert_eq!(anf_of("1").runs(), &[(Mnf::one(), nat(1))]);
        let a = anf_of("x + x*x + 1");
        let want: Vec<Mnf> = vec![mnf_of("x*x"), mnf_of("x"), mnf_of("1")];
        assert_eq!(
            a.runs().iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
            want
        );
        for s in [
            "x + x*x + 1",
            "2^x * 3^x + x^x",
            "(x+1)*(x+2)",
            "x^(x+2)",
            "3 * 2^(x+1)",
        ] {
            let a = anf_of(s);
            assert_eq!(anf(&a.to_term()).unwrap(), a, "{s}");
        }
    }

    #[test]
    fn compare_examples() {
        let c = |a: &str, b: &str| compare(&p(a), &p(b)).unwrap();
        assert_eq!(c("x", "2^x"), Ordering::Less);
        assert_eq!(c("x*x", "2^x"), Ordering::Less);
        assert_eq!(c("x+1", "x+1"), Ordering::Equal);
        assert_eq!(c("x+1", "1+x"), Ordering::Equal);
        assert_eq!(c("2^x", "3^x"), Ordering::Less);
        assert_eq!(c("3^x", "x^x"), Ordering::Less);
        assert_eq!(c("x^x", "2^(x*x)"), Ordering::Less);
        assert_eq!(c("x + x", "x * x"), Ordering::Less);
        assert_eq!(c("100", "x"), Ordering::Less);
        assert_eq!(c("2^x * x", "2^x + x*x*x"), Ordering::Greater);
        assert_eq!(c("2^x", "2^x + 1"), Ordering::Less);
    }

    #[test]
    fn mnf_conditions_hold_on_examples() {
        for s in [
            "x*x*2^x*3^x*x^x",
            "2^(x+x) * 5^(x+x)",
            "x^(x+1)",
            "4^x * 2^x^x",
        ] {
            let m = mnf_of(s);
            check_mnf_conditions(&m).unwrap_or_else(|e| panic!("{s}: {e}"));
        }
        let bad = Mnf {
            runs: vec![(
                Factor {
                    base: Base::Num(nat(3)),
                    exp: Mnf::one(),
                },
                nat(1),
            )],
        };
        assert!(check_mnf_conditions(&bad).is_err());
    }

    #[test]
    fn split_common_is_multiset_intersection() {
        let (w, a, b) = mnf_of("x*x*2^x").split_common(&mnf_of("x*3^x"));
        assert_eq!(w, mnf_of("x"));
        assert_eq!(a, mnf_of("x*2^x"));
        assert_eq!(b, mnf_of("3^x"));
    }
}
