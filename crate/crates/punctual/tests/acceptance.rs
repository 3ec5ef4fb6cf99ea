//! End-to-end acceptance checks, one line per criterion.

mod common;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use punctual::binary_lift::Lift;
use punctual::copies::{
    element_at, image_oracle, inverse_bound, number_of, Identity, OracleArithmetic, PunctualCopy,
};
use punctual::copy_double::DoubleCopy;
use punctual::copy_gap::{GapCopy, PositionTag};
use punctual::cycles::{
    cyc, f_diag, pat_cyc, pat_cyc_within, verify_cycle_partition, LengthFunction, MeteredStructure,
    StructureEnumeration,
};
use punctual::foundations::{pair, Tower};
use punctual::island::{
    poly_normal_form, poly_witness, LinearEngine, LinearRequirement, Listing, MetaEngine, Opponent,
    Poly, PolyFamily, PrimeSet, Symbol,
};
use punctual::levitz::{anf, compare, confirm_domination, witness_d, DigitCap, LevitzTerm};
use punctual::Nat;
use rand::Rng;

type Outcome = Result<String, String>;

/// Number, name, time limit in seconds, check.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn n(v: u64) -> Nat {
    Nat::from(v)
}

fn tower_copy() -> GapCopy {
    GapCopy::new(Arc::new(Tower::new()))
}

fn copy_gap_positions() -> Outcome {
    let g = tower_copy();
    let a: Vec<u64> = (0..=3)
        .map(|k| g.provider().value(k).unwrap().try_into().unwrap())
        .collect();
    let budget = 200;
    let pos = |x: &Nat| number_of(&g, x, budget).map_err(|e| e.to_string());
    check(pos(&n(a[1]))? == 7, || "a_1 not at position 7".into())?;
    check(pos(&n(a[2]))? == 26, || "a_2 not at position 26".into())?;
    let mut checked = 0;
    for block in 0..=2u64 {
        // block m holds a_m, free(m), h(<m,0>), ..., h(<m,a_{m+1}>)
        let start = 3 * block + a[1..=block as usize].iter().sum::<u64>();
        check(pos(&n(a[block as usize]))? == start, || {
            format!("a_{block} misplaced")
        })?;
        check(pos(&g.free(block))? == start + 1, || {
            format!("free({block}) misplaced")
        })?;
        for i in 0..=a[block as usize + 1].min(50) {
            let h = g.complement().h(&pair(&n(block), &n(i)));
            check(pos(&h)? == start + 2 + i, || {
                format!("h(<{block},{i}>) misplaced")
            })?;
            let want = PositionTag {
                block: n(block),
                offset: n(i + 2),
            };
            check(g.pos_a(&h) == want, || format!("pos_a(h(<{block},{i}>))"))?;
            checked += 1;
        }
    }
    Ok(format!("a_1 at 7, a_2 at 26, {checked} h-positions"))
}

fn ordering_image() -> Outcome {
    let g = tower_copy();
    let elems: Vec<Nat> = (0..200)
        .map(|p| element_at(&g, &n(p), 200).unwrap())
        .collect();
    let positions: Vec<u64> = elems
        .iter()
        .map(|x| number_of(&g, x, 200).unwrap())
        .collect();
    let mut pairs = 0;
    for (i, x) in elems.iter().enumerate() {
        for (j, y) in elems.iter().enumerate() {
            if i == j {
                continue;
            }
            let want = positions[i] < positions[j];
            check(g.less_a(x, y) == want, || format!("less_A({x}, {y})"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} ordered pairs"))
}

fn doubling<B: PunctualCopy>(d: &DoubleCopy<B>, count: u64, budget: u64) -> Result<(), String> {
    let mut x = d.origin();
    for p in 0..count {
        let want = image_oracle(d, |q| q * 2u32, &x, budget).map_err(|e| e.to_string())?;
        let got = d.double_d(&x).map_err(|e| e.to_string())?;
        check(got == want, || {
            format!("{} at position {p}: {got} != {want}", d.name())
        })?;
        x = d.successor_d(&x).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn copy_double() -> Outcome {
    doubling(&DoubleCopy::new(Identity, 1024), 256, 600)?;
    doubling(&DoubleCopy::new(tower_copy(), 64), 32, 100)?;
    Ok("256 identity-base and 32 copy-gap positions".into())
}

fn elements<C: PunctualCopy>(copy: &C, count: u64) -> Vec<Nat> {
    let mut out = vec![copy.origin()];
    while (out.len() as u64) < count {
        let next = copy.successor(out.last().unwrap()).unwrap();
        out.push(next);
    }
    out
}

fn binary_lift() -> Outcome {
    let id = Lift::new(Identity, 64);
    for x in 0..1024u64 {
        for y in 0..1024u64 {
            check(id.lift_plus(&n(x), &n(y)).unwrap() == n(x + y), || {
                format!("{x} + {y}")
            })?;
            check(id.lift_times(&n(x), &n(y)).unwrap() == n(x * y), || {
                format!("{x} * {y}")
            })?;
        }
    }

    let gap = Lift::new(tower_copy(), 1 << 12);
    let table = elements(&gap, 128);
    for p in 0..64usize {
        check(gap.lift_succ(&table[p]).unwrap() == table[p + 1], || {
            format!("succ at {p}")
        })?;
        for q in 0..64 - p {
            check(
                gap.lift_plus(&table[p], &table[q]).unwrap() == table[p + q],
                || format!("plus at ({p}, {q})"),
            )?;
        }
    }

    let double = Lift::new(
        Lift::new(OracleArithmetic::new(tower_copy(), 1 << 12), 1 << 12),
        1 << 12,
    );
    let table = elements(&double, 32 * 32);
    for p in 0..32usize {
        for q in 0..32usize {
            let got = double
                .lift_times(&table[p], &table[q])
                .map_err(|e| e.to_string())?;
            check(got == table[p * q], || {
                format!("double lift times at ({p}, {q})")
            })?;
        }
    }

    let pow = Lift::new(OracleArithmetic::new(tower_copy(), 1 << 16), 1 << 16);
    let table = elements(&pow, (1 << 15) + 1);
    for p in 0..16usize {
        let got = pow.lift_pow2(&table[p]).map_err(|e| e.to_string())?;
        check(got == table[1 << p], || format!("pow2 at position {p}"))?;
    }
    Ok("identity 2^20 pairs, copy-gap succ/plus < 64, double-lift times < 32, pow2 < 16".into())
}

fn levitz_order() -> Outcome {
    let cap = DigitCap(100_000);
    let pairs = common::corpus_pairs(2024, 100);
    let mut strict = 0;
    for (f, g) in &pairs {
        let fg = compare(f, g).map_err(|e| e.to_string())?;
        let gf = compare(g, f).map_err(|e| e.to_string())?;
        check(fg == gf.reverse(), || {
            format!("trichotomy fails for {f}, {g}")
        })?;
        let (lo, hi) = match fg {
            Ordering::Less => (f, g),
            Ordering::Greater => (g, f),
            Ordering::Equal => continue,
        };
        let w = witness_d(lo, hi).map_err(|e| e.to_string())?;
        let report = confirm_domination(lo, hi, &w, 50, cap).map_err(|e| e.to_string())?;
        check(report.confirmed(), || {
            format!("{lo} < {hi} from {w}: {report:?}")
        })?;
        strict += 1;
    }
    let terms: Vec<LevitzTerm> = pairs
        .iter()
        .flat_map(|(f, g)| [f.clone(), g.clone()])
        .collect();
    for t in &terms {
        let a = anf(t).map_err(|e| e.to_string())?;
        check(anf(&a.to_term()).map_err(|e| e.to_string())? == a, || {
            format!("ANF of {t} not idempotent")
        })?;
    }
    let mut rng = common::rng(99);
    for _ in 0..1000 {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| &terms[rng.gen_range(0..terms.len())];
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let (ab, bc, ac) = (
            compare(a, b).unwrap(),
            compare(b, c).unwrap(),
            compare(a, c).unwrap(),
        );
        if ab != Ordering::Greater && bc != Ordering::Greater {
            check(
                ac != Ordering::Greater
                    && (ab == Ordering::Equal && bc == Ordering::Equal) == (ac == Ordering::Equal),
                || format!("transitivity fails on {a}, {b}, {c}"),
            )?;
        }
    }
    Ok(format!(
        "{strict} strict pairs confirmed, 200 ANFs, 1000 triples"
    ))
}

fn random_poly(rng: &mut rand_chacha::ChaCha8Rng) -> Poly {
    let len = rng.gen_range(1..=4);
    let mut coeffs: Vec<u64> = (0..len).map(|_| rng.gen_range(0..6)).collect();
    if coeffs.len() < 2 || coeffs[1..].iter().all(|&c| c == 0) {
        coeffs.resize(2.max(coeffs.len()), 0);
        coeffs[1] = rng.gen_range(1..4);
    }
    Poly::new(coeffs)
}

fn polynomial_witnesses() -> Outcome {
    let mut rng = common::rng(6);
    let mut tested = 0;
    while tested < 100 {
        let (p, q) = (random_poly(&mut rng), random_poly(&mut rng));
        let same = p.coefficients() == q.coefficients();
        let codes_equal = poly_normal_form(&p).unwrap() == poly_normal_form(&q).unwrap();
        check(codes_equal == same, || format!("N({p}) vs N({q})"))?;
        let (lo, hi) = match p.cmp(&q) {
            Ordering::Less => (p, q),
            Ordering::Greater => (q, p),
            Ordering::Equal => continue,
        };
        let w = poly_witness(&lo, &hi).map_err(|e| e.to_string())?;
        for x in 0..50u32 {
            let at = &w + x;
            check(lo.eval(&at) < hi.eval(&at), || {
                format!("{lo} < {hi} fails at {at}")
            })?;
        }
        tested += 1;
    }
    Ok(format!("{tested} pairs"))
}

fn linear_requirements() -> Vec<LinearRequirement> {
    [
        (5, 0, "x-1"),
        (7, 3, "0"),
        (10, 1, "2x"),
        (11, 0, "x+1"),
        (13, 2, "3x-1"),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (a, b, value))| LinearRequirement {
        a,
        b,
        opponent: Opponent::prompt(i as u64, value.parse().unwrap()),
    })
    .collect()
}

fn linear_replay(stages: u64) -> LinearEngine {
    let mut e = LinearEngine::new(PrimeSet::new(&[2, 3]).unwrap(), linear_requirements()).unwrap();
    e.run(stages).unwrap();
    e
}

fn linear_engine() -> Outcome {
    let mut e = LinearEngine::new(PrimeSet::new(&[2, 3]).unwrap(), linear_requirements()).unwrap();
    while e.records().len() < 5 {
        check(e.stage() < 200_000, || {
            format!(
                "only {} requirements after 200000 stages",
                e.records().len()
            )
        })?;
        e.step().map_err(|err| err.to_string())?;
    }
    let satisfied_at = e.stage();
    // images are declared once the engine has expanded the first 200 names
    while e.mainland().len() < 200 || e.mainland()[..200].iter().any(|&m| m >= e.stage()) {
        e.step().map_err(|err| err.to_string())?;
    }
    e.verify_records().map_err(|err| err.to_string())?;
    for r in e.records() {
        check(r.lhs() != r.target_position, || format!("record {r:?}"))?;
    }
    let report = e.check_images(200);
    check(report.passed() && report.checked == 200, || {
        format!("{report:?}")
    })?;
    let stages = e.stage();
    let (first, second) = (linear_replay(stages), linear_replay(stages));
    check(
        first.transcript() == second.transcript() && first.transcript() == e.transcript(),
        || "replays differ".into(),
    )?;
    Ok(format!(
        "5/5 satisfied by stage {satisfied_at}, 200 images x3 checked, {stages} stages replayed"
    ))
}

fn meta_engine() -> Outcome {
    let listing = Listing::with_prefix(
        vec!["x+1", "x+2", "x+3"]
            .into_iter()
            .map(|t| t.parse().unwrap())
            .collect(),
    );
    let opponents = (0..3)
        .map(|i| Opponent::prompt(i, "x-1".parse().unwrap()))
        .collect();
    let mut e = MetaEngine::new(PolyFamily, listing, opponents);
    while e.records().len() < 3 || e.stage() < 8 {
        check(e.stage() < 2000, || {
            "requirements unsatisfied after 2000 stages".into()
        })?;
        e.step().map_err(|err| err.to_string())?;
    }
    let prefix = e.prefix();
    check(prefix.is_injective(), || {
        "successor prefix not injective".into()
    })?;
    check(prefix.is_chain_connected(), || {
        "successor prefix not a single chain".into()
    })?;
    let connects = e
        .transcript()
        .iter()
        .filter(|l| l.contains("event=connect"))
        .count();
    check(connects == 3, || format!("{connects} connect events"))?;
    let symbols = [Symbol::Listed(0), Symbol::Listed(1), Symbol::Listed(2)];
    let report = e
        .check_images(&symbols, 100)
        .map_err(|err| err.to_string())?;
    check(report.passed() && report.checked == 300, || {
        format!("{report:?}")
    })?;
    e.verify_records().map_err(|err| err.to_string())?;
    for r in e.records() {
        check(r.successor_of_guess != r.witness, || {
            format!("record {r:?}")
        })?;
    }
    Ok(format!(
        "3/3 satisfied by stage {}, (†) held at 3 connects, 300 images",
        e.stage()
    ))
}

/// A structure on `0..size` given by tables, with `c` taken from `cycles`.
fn finite_structure(size: u64, cycles: &[&[u64]]) -> (MeteredStructure, Vec<u64>, Vec<u64>) {
    let mut c: Vec<u64> = (0..size).collect();
    for cycle in cycles {
        for (k, &x) in cycle.iter().enumerate() {
            c[x as usize] = cycle[(k + 1) % cycle.len()];
        }
    }
    let s: Vec<u64> = (0..size).map(|x| (x + 1) % size).collect();
    let (sc, cc) = (s.clone(), c.clone());
    let st = MeteredStructure::new(0, move |x| sc[x as usize], move |x| cc[x as usize]);
    (st, s, c)
}

/// Least total invocations of a list `y = L_0, ..., L_l = y` with
/// `c(L_k) = L_{k+1}` and distinct `L_0..L_{l-1}`, found by enumerating all
/// candidate lists over the domain.
fn brute_cycle_cost(c: &[u64], y: u64, l: u64) -> Option<u64> {
    fn extend(c: &[u64], list: &mut Vec<u64>, l: u64, y: u64) -> bool {
        if list.len() as u64 == l + 1 {
            return *list.last().unwrap() == y;
        }
        for cand in 0..c.len() as u64 {
            let last = *list.last().unwrap();
            let interior = (list.len() as u64) < l;
            if c[last as usize] != cand || (interior && list.contains(&cand)) {
                continue;
            }
            list.push(cand);
            if extend(c, list, l, y) {
                return true;
            }
            list.pop();
        }
        false
    }
    (l > 0 && extend(c, &mut vec![y], l, y)).then_some(l)
}

fn brute_pattern_cost(s: &[u64], c: &[u64], n: u64, i: u64, x: u64) -> Option<u64> {
    let block = 1u64 << (n + 1);
    let l = i + (x + 1) * block;
    let mut list = vec![x];
    for _ in 0..l {
        let last = *list.last().unwrap();
        let next = (0..s.len() as u64).find(|&cand| s[last as usize] == cand)?;
        list.push(next);
    }
    let mut cost = l;
    cost += brute_cycle_cost(c, list[i as usize], 2 * n + 1)?;
    for j in 0..x {
        cost += brute_cycle_cost(c, list[(i + (j + 1) * block) as usize], 2 * n + 2)?;
    }
    cost += brute_cycle_cost(c, list[l as usize], 2 * n + 1)?;
    Some(cost)
}

fn cycle_structures() -> Outcome {
    let mut rng = common::rng(9);
    for k in 0..20 {
        let bits = (0..rng.gen_range(0..30))
            .map(|_| rng.gen_bool(0.5))
            .collect();
        let f = LengthFunction::with_prefix(bits, rng.gen_bool(0.5));
        let report = verify_cycle_partition(&f, 200);
        check(report.passed(), || {
            format!("length function {k} ({f}): {:?}", report.failures)
        })?;
    }

    let structures = [
        finite_structure(6, &[&[0, 1, 2]]),
        finite_structure(8, &[&[1, 2], &[3, 4, 5], &[6, 7]]),
        finite_structure(10, &[&[2, 3], &[4, 5], &[7, 8, 9]]),
    ];
    let mut agreements = 0;
    for (st, s, c) in &structures {
        for y in 0..c.len() as u64 {
            for l in 0..=5 {
                let cost = brute_cycle_cost(c, y, l);
                for budget in 0..=6 {
                    st.reset();
                    let got = cyc(st, y, l, budget);
                    check(got == cost.is_some_and(|k| k <= budget), || {
                        format!("Cyc({y}, {l}, {budget})")
                    })?;
                    if got {
                        check(st.steps() == l, || {
                            format!("Cyc({y}, {l}) took {} steps", st.steps())
                        })?;
                    }
                    agreements += 1;
                }
            }
        }
        for n in 0..=1 {
            for i in 0..=3 {
                for x in 0..=2 {
                    let cost = brute_pattern_cost(s, c, n, i, x);
                    let top = cost.unwrap_or(40) + 2;
                    for budget in 0..=top {
                        let exact = pat_cyc(st, n, i, x, budget);
                        check(exact == (cost == Some(budget)), || {
                            format!("PatCyc({n}, {i}, {x}, {budget})")
                        })?;
                        let within = pat_cyc_within(st, n, i, x, budget);
                        check(within == cost.is_some_and(|k| k <= budget), || {
                            format!("PatCyc'({n}, {i}, {x}, {budget})")
                        })?;
                        agreements += 2;
                    }
                }
            }
        }
    }

    let trivial = StructureEnumeration::trivial();
    let mut cache = HashMap::new();
    for n in 0..6u64 {
        for m in 0..40u64 {
            let v = *cache
                .entry((n, m))
                .or_insert_with(|| f_diag(&trivial, n, m));
            check(v == 2 * n + 1, || format!("f_diag(<{n},{m}>) = {v}"))?;
        }
    }
    Ok(format!(
        "20 partitions at 200, {agreements} relation checks, 240 diagonal values"
    ))
}

fn observation_contract() -> Outcome {
    fn contract<C: PunctualCopy>(copy: &C) -> Result<(), String> {
        for x in 0..200u64 {
            let t = inverse_bound(copy, &n(x)).map_err(|e| e.to_string())?;
            check(t <= n(x), || {
                format!("{}: inverse_bound({x}) = {t}", copy.name())
            })?;
            let e = element_at(copy, &t, 1 << 12).map_err(|e| e.to_string())?;
            check(e >= n(x), || {
                format!("{}: c(inverse_bound({x})) = {e}", copy.name())
            })?;
        }
        Ok(())
    }
    contract(&Identity)?;
    contract(&tower_copy())?;
    contract(&DoubleCopy::new(Identity, 1 << 12))?;
    contract(&Lift::new(tower_copy(), 1 << 12))?;
    Ok("identity, copy-gap, copy-double, binary lift".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "copy-gap position formulas", 1, copy_gap_positions),
        (2, "ordering image", 5, ordering_image),
        (3, "copy-double against the oracle", 10, copy_double),
        (4, "binary lift against the oracle", 60, binary_lift),
        (5, "domination order soundness", 30, levitz_order),
        (6, "polynomial witnesses and codes", 5, polynomial_witnesses),
        (7, "linear island engine", 30, linear_engine),
        (8, "family engine", 60, meta_engine),
        (9, "cycle structures", 10, cycle_structures),
        (10, "inverse-bound contract", 5, observation_contract),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("over time limit: {detail}"))
            }
            other => other,
        };
        let (verdict, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!(
            "criterion {id:>2}: {verdict} {name} [{:.2}s / {limit}s] {detail}",
            elapsed.as_secs_f64()
        );
        if outcome.is_err() {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
