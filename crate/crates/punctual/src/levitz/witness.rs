//! Explicit domination witnesses.
//!
//! For additive primes `f < g`, `omega(f, g)` bounds where `f(x) < g(x)`
//! starts to hold and `nu(f, g)` where `x * f(x) <= g(x)` starts to hold;
//! `witness_d` combines them into a strict witness for arbitrary terms.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::normal::{anf, cmp_anf, cmp_base, cmp_mnf, mnf, Base, Factor, Mnf};
use super::term::{DigitCap, LevitzTerm};
use super::LevitzError;
use crate::nat::Nat;

fn violated(f: &dyn std::fmt::Display, g: &dyn std::fmt::Display, found: Ordering) -> LevitzError {
    LevitzError::ComparisonContractViolated {
        left: f.to_string(),
        right: g.to_string(),
        expected: Ordering::Less,
        found,
    }
}

fn square(n: Nat) -> Nat {
    &n * &n
}

fn const_base<'a>(f: &'a Factor, whole: &Mnf) -> Result<&'a Nat, LevitzError> {
    match &f.base {
        Base::Num(n) => Ok(n),
        Base::Var => Err(LevitzError::BaseGuard(whole.to_string())),
    }
}

/// Largest constant base among the factors after the leading one; 0 if none.
fn trailing_const_max(m: &Mnf) -> Nat {
    m.runs()[1..]
        .iter()
        .filter_map(|(f, _)| match &f.base {
            Base::Num(n) => Some(n.clone()),
            Base::Var => None,
        })
        .max()
        .unwrap_or_default()
}

/// `(c * u * ((u + 1)^2 - 1) + 5)^2`.
fn base_gap_bound(c: &Nat, u: &Nat) -> Nat {
    let v = u + 1u32;
    square(c * u * (&v * &v - 1u32) + 5u32)
}

/// Strict witness for additive primes in canonical form, `f < g` required.
pub(crate) fn omega_mnf(f: &Mnf, g: &Mnf) -> Result<Nat, LevitzError> {
    let order = cmp_mnf(f, g);
    if order != Ordering::Less {
        return Err(violated(f, g, order));
    }
    // g != 1 is at least x everywhere, so above 1 from x = 2 on
    let (Some(lead_f), Some(lead_g)) = (f.leading(), g.leading()) else {
        return Ok(Nat::from(2u32));
    };
    let k = f.factor_count();
    match cmp_mnf(&lead_f.exp, &lead_g.exp) {
        Ordering::Less => {
            let mut w = square(&k + 5u32).max(nu_mnf(&lead_f.exp, &lead_g.exp)?);
            let top = Mnf::from_factor(lead_f.clone());
            for (fi, _) in &f.runs()[1..] {
                w = w.max(omega_mnf(&Mnf::from_factor(fi.clone()), &top)?);
            }
            Ok(w)
        }
        Ordering::Equal => match cmp_base(&lead_f.base, &lead_g.base) {
            Ordering::Less => {
                let u1 = const_base(lead_f, f)?;
                let mut w = (u1 + 1u32).max(trailing_const_max(f));
                w = w.max(base_gap_bound(&k, u1));
                for (fi, _) in &f.runs()[1..] {
                    w = w.max(nu_mnf(&fi.exp, &lead_f.exp)?);
                }
                Ok(w)
            }
            Ordering::Equal => omega_mnf(&f.without_leading(), &g.without_leading()),
            Ordering::Greater => Err(violated(f, g, Ordering::Greater)),
        },
        Ordering::Greater => Err(violated(f, g, Ordering::Greater)),
    }
}

/// Witness for `x * f(x) <= g(x)`; for `g < f` the pair is swapped.
pub(crate) fn nu_mnf(f: &Mnf, g: &Mnf) -> Result<Nat, LevitzError> {
    match cmp_mnf(f, g) {
        Ordering::Equal => return Ok(Nat::zero()),
        Ordering::Greater => return nu_mnf(g, f),
        Ordering::Less => {}
    }
    if f.is_one() {
        return Ok(Nat::zero());
    }
    let (_, rest_f, rest_g) = f.split_common(g);
    let Some(s1) = rest_f.leading() else {
        return Ok(Nat::zero());
    };
    let r1 = rest_g
        .leading()
        .ok_or_else(|| violated(&rest_f, &rest_g, Ordering::Greater))?;
    let m = rest_f.factor_count();
    match cmp_mnf(&s1.exp, &r1.exp) {
        Ordering::Less => {
            let mut w = square(&m + 6u32).max(nu_mnf(&s1.exp, &r1.exp)?);
            let top = Mnf::from_factor(s1.clone());
            for (si, _) in &rest_f.runs()[1..] {
                w = w.max(omega_mnf(&Mnf::from_factor(si.clone()), &top)?);
            }
            Ok(w)
        }
        Ordering::Equal => {
            let order = cmp_base(&s1.base, &r1.base);
            if order != Ordering::Less {
                return Err(violated(&rest_f, &rest_g, order));
            }
            let u1 = const_base(s1, &rest_f)?;
            let mut w = (u1 + 1u32).max(trailing_const_max(&rest_f));
            w = w.max(base_gap_bound(&(&m + 1u32), u1));
            for (si, _) in &rest_f.runs()[1..] {
                w = w.max(nu_mnf(&si.exp, &s1.exp)?);
            }
            Ok(w)
        }
        Ordering::Greater => Err(violated(&rest_f, &rest_g, Ordering::Greater)),
    }
}

pub fn omega(f: &LevitzTerm, g: &LevitzTerm) -> Result<Nat, LevitzError> {
    omega_mnf(&mnf(f)?, &mnf(g)?)
}

pub fn nu(f: &LevitzTerm, g: &LevitzTerm) -> Result<Nat, LevitzError> {
    nu_mnf(&mnf(f)?, &mnf(g)?)
}

/// Whether an additive prime vanishes at `x = 0`: some `x^e` factor has
/// `e(0) > 0`.
fn vanishes_at_zero(m: &Mnf) -> bool {
    m.runs()
        .iter()
        .any(|(f, _)| f.base == Base::Var && !vanishes_at_zero(&f.exp))
}

/// Strict witness: `f(x) < g(x)` for every `x >= witness_d(f, g)`.
///
/// With `f = p_1 + ... + p_k` and `g = q_1 + ...` in canonical form, the
/// first difference `p_i < q_i` gives `x * p_i <= q_i` from `nu`; the tail
/// `p_i + ... + p_k` stays below `x * p_i` once every `p_j <= p_i` (from
/// `omega`) and `x > k`. When `f` is a proper prefix of `g` the extra
/// summands are positive from `x = 1` on, and at `x = 0` unless all vanish.
pub fn witness_d(f: &LevitzTerm, g: &LevitzTerm) -> Result<Nat, LevitzError> {
    let (af, ag) = (anf(f)?, anf(g)?);
    let order = cmp_anf(&af, &ag);
    if order != Ordering::Less {
        return Err(violated(f, g, order));
    }
    let (rf, rg) = (af.runs(), ag.runs());
    let mut i = 0;
    while i < rf.len() && rf[i] == rg[i] {
        i += 1;
    }
    // rf[i] and rg[i] differ in item or count, or rf is exhausted
    let (first_f, rest_f): (Option<&Mnf>, &[(Mnf, Nat)]) = match rf.get(i) {
        None => (None, &[]),
        Some((p, c)) if *p == rg[i].0 => {
            // fewer copies of p in f: the next summand of f meets p in g
            debug_assert!(*c < rg[i].1);
            match rf.get(i + 1) {
                None => (None, &[]),
                Some((p_next, _)) => (Some(p_next), &rf[i + 2..]),
            }
        }
        Some((p, _)) => (Some(p), &rf[i + 1..]),
    };
    let Some(p) = first_f else {
        let (_, extra) = af.cancel_common(&ag);
        let positive_at_zero = extra.runs().iter().any(|(q, _)| !vanishes_at_zero(q));
        return Ok(if positive_at_zero {
            Nat::zero()
        } else {
            Nat::one()
        });
    };
    let q = &rg[i].0;
    let mut w = nu_mnf(p, q)?.max(af.summand_count() + 1u32);
    for (pj, _) in rest_f {
        w = w.max(omega_mnf(pj, p)?);
    }
    Ok(w)
}

/// A point where `f(x) < g(x)` fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub x: Nat,
    pub left: Nat,
    pub right: Nat,
}

/// `Ok(None)` when `f(x) < g(x)` on all of `[w, w + span]`, by exact evaluation.
pub fn verify_witness(
    f: &LevitzTerm,
    g: &LevitzTerm,
    w: &Nat,
    span: u64,
    cap: DigitCap,
) -> Result<Option<Violation>, LevitzError> {
    for d in 0..=span {
        let x = w + d;
        let (left, right) = (f.eval(&x, cap)?, g.eval(&x, cap)?);
        if left >= right {
            return Ok(Some(Violation { x, left, right }));
        }
    }
    Ok(None)
}

/// `x = k^2` gives `k * log2(x) < x`, i.e. `x^k < 2^x`, checked exactly.
pub fn lemma_prconv_holds(k: u32) -> bool {
    let x = k * k;
    Nat::from(x).pow(k) < Nat::one() << x
}

/// `1 / (u (v^2 - 1)) < (1 - log u / log v) / 2` for `2 <= u < v`, checked
/// exactly as `v^n > v^2 u^n` with `n = u (v^2 - 1)`.
pub fn lemma_eps_bound_holds(u: u32, v: u32) -> bool {
    let n = u * (v * v - 1);
    Nat::from(v).pow(n) > Nat::from(v * v) * Nat::from(u).pow(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levitz::{confirm_domination, parse_term, Magnitude};
    use crate::nat::nat;

    fn p(s: &str) -> LevitzTerm {
        parse_term(s).unwrap()
    }

    fn sweep_ok(f: &str, g: &str, w: &Nat) -> bool {
        verify_witness(&p(f), &p(g), w, 50, DigitCap::default())
            .unwrap()
            .is_none()
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&p("x"), &p("2^x")).unwrap(), nat(36));
        assert!(sweep_ok("x", "2^x", &nat(36)));
        assert_eq!(omega(&p("1"), &p("x")).unwrap(), nat(2));
        // Case 2: 2^x < 3^x, u1 = 2
        assert_eq!(omega(&p("2^x"), &p("3^x")).unwrap(), nat(21 * 21));
        // Case 2 with a trailing factor: k = 2, u1 = 2
        assert_eq!(omega(&p("x * 2^x"), &p("2^x * 2^x")).unwrap(), nat(37 * 37));
        // Case 3 twice, down to 1 < x
        assert_eq!(omega(&p("x * 2^x"), &p("2^x * x * x")).unwrap(), nat(2));
        assert!(matches!(
            omega(&p("2^x"), &p("x")),
            Err(LevitzError::ComparisonContractViolated { .. })
        ));
        assert!(matches!(
            omega(&p("x + 1"), &p("2^x")),
            Err(LevitzError::NotAdditivePrime(_))
        ));
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(&p("1"), &p("2^x")).unwrap(), nat(0));
        assert_eq!(nu(&p("x^x"), &p("x^x")).unwrap(), nat(0));
        assert_eq!(nu(&p("x"), &p("x*x")).unwrap(), nat(0));
        assert_eq!(nu(&p("x"), &p("2^x")).unwrap(), nat(49));
        assert_eq!(nu(&p("2^x"), &p("x")).unwrap(), nat(49));
    }

    #[test]
    fn witness_d_examples() {
        assert_eq!(witness_d(&p("x"), &p("x + 1")).unwrap(), nat(0));
        assert_eq!(witness_d(&p("x"), &p("2^x")).unwrap(), nat(49));
        // prefix whose extra summand vanishes at 0
        assert_eq!(witness_d(&p("x*x"), &p("x*x + x")).unwrap(), nat(1));
        assert_eq!(witness_d(&p("1"), &p("1 + x")).unwrap(), nat(2));
        let w = witness_d(&p("x*x"), &p("2^x")).unwrap();
        assert!(sweep_ok("x*x", "2^x", &w));
        assert!(matches!(
            witness_d(&p("x + 1"), &p("x")),
            Err(LevitzError::ComparisonContractViolated { .. })
        ));
    }

    #[test]
    fn witness_d_covers_boundary_cases() {
        // k alone would give 2, where x + x = x * x
        let w = witness_d(&p("x + x"), &p("x * x")).unwrap();
        assert_eq!(w, nat(3));
        assert!(sweep_ok("x + x", "x * x", &w));
        // the tail x^3 exceeds 2^x below x = 10
        let w = witness_d(&p("2^x + x*x*x"), &p("x * 2^x")).unwrap();
        assert!(sweep_ok("2^x + x*x*x", "x * 2^x", &w));
        assert!(sweep_ok("2^x + x*x*x", "x * 2^x", &nat(10)));
        assert!(!sweep_ok("2^x + x*x*x", "x * 2^x", &nat(2)));
    }

    #[test]
    fn verify_witness_examples() {
        assert!(sweep_ok("x", "x + 1", &nat(0)));
        let v = verify_witness(&p("2^x"), &p("x"), &nat(0), 10, DigitCap::default())
            .unwrap()
            .unwrap();
        assert_eq!(v.x, nat(0));
        assert_eq!((v.left, v.right), (nat(1), nat(0)));
    }

    #[test]
    fn nu_is_a_domination_witness_on_small_pairs() {
        let terms = [
            "1", "x", "x*x", "2^x", "3^x", "x^x", "x*2^x", "2^x*3^x", "x^(x+1)", "2^(x*x)",
        ];
        let cap = DigitCap::default();
        for a in terms {
            for b in terms {
                let (f, g) = (p(a), p(b));
                if compare_terms(&f, &g) != Ordering::Less {
                    continue;
                }
                let w = nu(&f, &g).unwrap();
                let xf = LevitzTerm::prod(LevitzTerm::Var, f.clone());
                for x in 0..40u64 {
                    let x = &w + x;
                    let order = match (xf.eval(&x, cap), g.eval(&x, cap)) {
                        (Ok(l), Ok(r)) => Some(l.cmp(&r)),
                        _ => Magnitude::of_term(&xf, &x, cap)
                            .zip(Magnitude::of_term(&g, &x, cap))
                            .and_then(|(l, r)| l.compare(&r)),
                    };
                    assert!(
                        matches!(order, Some(Ordering::Less | Ordering::Equal)),
                        "{a} {b} at {x}"
                    );
                }
                let w = omega(&f, &g).unwrap();
                assert!(
                    confirm_domination(&f, &g, &w, 40, cap).unwrap().confirmed(),
                    "{a} {b}"
                );
            }
        }
    }

    fn compare_terms(f: &LevitzTerm, g: &LevitzTerm) -> Ordering {
        crate::levitz::compare(f, g).unwrap()
    }

    #[test]
    fn lemma_checks() {
        assert!((5..=50).all(lemma_prconv_holds));
        assert!(!lemma_prconv_holds(3));
        for u in 2..12 {
            for v in u + 1..=12 {
                assert!(lemma_eps_bound_holds(u, v), "{u} {v}");
            }
        }
    }
}
