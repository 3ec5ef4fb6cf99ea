//! The linear-marks engine: a punctual copy of `(N, S)` on which `x + 1` and
//! `p * x` (`p` in a finite prime set `P`) have primitive recursive images
//! but `a * x + b` does not, for any `a` with a prime divisor outside `P`.
//!
//! Every element carries a mark `dx + e`. Constant marks (`d = 0`) are
//! mainland positions; a mark `dx + e` with `d > 0` will end up at position
//! `dq + e` once the island chains are merged with witness position `q`.
//! Element `n` is expanded at stage `n + 1`: the marks `dx + e + 1` and
//! `p(dx + e)` are created if missing, which fixes its images for good.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use super::{ChainPrefix, IslandError, Opponent};
use crate::copies::{image_oracle, number_of};
use crate::nat::Nat;

/// A finite set of primes, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new(primes: &[u64]) -> Result<Self, IslandError> {
        let mut ps = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if let Some(&bad) = ps.iter().find(|&&p| !is_prime(p)) {
            return Err(IslandError::NotPrime(bad));
        }
        Ok(PrimeSet(ps))
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    /// `n >= 1` and every prime divisor of `n` lies in the set.
    pub fn is_smooth(&self, mut n: u64) -> bool {
        if n == 0 {
            return false;
        }
        for &p in &self.0 {
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        n == 1
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl FromStr for PrimeSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let primes = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        PrimeSet::new(&primes).map_err(|e| e.to_string())
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// `slope * x + offset`; slope 0 marks a mainland position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mark {
    pub slope: u64,
    pub offset: u64,
}

impl Mark {
    pub fn constant(offset: u64) -> Self {
        Mark { slope: 0, offset }
    }

    pub fn is_constant(&self) -> bool {
        self.slope == 0
    }

    /// Position of the marked element when the witness lands at `q`.
    pub fn at(&self, q: u64) -> Option<u64> {
        self.slope.checked_mul(q)?.checked_add(self.offset)
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope, self.offset) {
            (0, e) => write!(f, "{e}"),
            (1, 0) => write!(f, "x"),
            (d, 0) => write!(f, "{d}x"),
            (1, e) => write!(f, "x+{e}"),
            (d, e) => write!(f, "{d}x+{e}"),
        }
    }
}

/// The requirement `(a x + b)^B != psi`, `psi` given by the opponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRequirement {
    pub a: u64,
    pub b: u64,
    pub opponent: Opponent,
}

/// Where the opponent's value sits when the islands are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectCase {
    /// Already on the mainland.
    Mainland,
    /// Not yet an element; it is placed right after the mainland.
    Fresh,
    /// On an island steeper than `a x + b`.
    SteeperIsland,
    /// On an island shallower than `a x + b`.
    ShallowerIsland,
}

impl ConnectCase {
    pub fn number(self) -> u8 {
        match self {
            ConnectCase::Mainland => 1,
            ConnectCase::Fresh => 2,
            ConnectCase::SteeperIsland => 3,
            ConnectCase::ShallowerIsland => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionRecord {
    pub requirement: usize,
    pub a: u64,
    pub b: u64,
    pub witness: u64,
    pub stage: u64,
    pub case: ConnectCase,
    pub q: u64,
    /// The opponent's value `m = psi(w)`.
    pub target: u64,
    pub target_position: u64,
}

impl SatisfactionRecord {
    pub fn lhs(&self) -> u64 {
        self.a * self.q + self.b
    }
}

/// Images fixed when an element is expanded: `x + 1`, then `p x` for each
/// prime in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredImages {
    pub successor: u64,
    pub multiples: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImageReport {
    pub checked: u64,
    pub undeclared: u64,
    pub mismatches: Vec<String>,
}

impl ImageReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Active {
    index: usize,
    witness: u64,
    since: u64,
}

#[derive(Debug, Clone)]
pub struct LinearEngine {
    primes: PrimeSet,
    requirements: Vec<LinearRequirement>,
    stage: u64,
    /// By name; `None` for numbers not yet in the structure.
    marks: Vec<Option<Mark>>,
    successor: Vec<Option<u64>>,
    images: Vec<Option<DeclaredImages>>,
    /// Slope to the chain of names with offsets `0, 1, ...`; slope 0 is the
    /// mainland.
    chains: BTreeMap<u64, Vec<u64>>,
    size: u64,
    least_free: u64,
    expanded: u64,
    next_requirement: usize,
    active: Option<Active>,
    records: Vec<SatisfactionRecord>,
    transcript: Vec<String>,
}

impl LinearEngine {
    pub fn new(
        primes: PrimeSet,
        requirements: Vec<LinearRequirement>,
    ) -> Result<Self, IslandError> {
        for r in &requirements {
            // a = 0 is excluded too: Case 1 needs q < aq + b
            if r.a == 0 || primes.is_smooth(r.a) {
                return Err(IslandError::InvalidRequirement {
                    a: r.a,
                    primes: primes.to_string(),
                });
            }
        }
        let mut engine = LinearEngine {
            primes,
            requirements,
            stage: 0,
            marks: Vec::new(),
            successor: Vec::new(),
            images: Vec::new(),
            chains: BTreeMap::new(),
            size: 0,
            least_free: 0,
            expanded: 0,
            next_requirement: 0,
            active: None,
            records: Vec::new(),
            transcript: Vec::new(),
        };
        let origin = engine.fresh(Mark::constant(0));
        engine.chains.insert(0, vec![origin]);
        Ok(engine)
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn records(&self) -> &[SatisfactionRecord] {
        &self.records
    }

    pub fn mark_of(&self, name: u64) -> Option<Mark> {
        self.marks.get(name as usize).copied().flatten()
    }

    pub fn images_of(&self, name: u64) -> Option<&DeclaredImages> {
        self.images.get(name as usize).and_then(Option::as_ref)
    }

    /// Mainland names by position.
    pub fn mainland(&self) -> &[u64] {
        &self.chains[&0]
    }

    pub fn island_count(&self) -> usize {
        self.chains.len() - 1
    }

    /// `(slope, length)` of every island, by increasing slope.
    pub fn islands(&self) -> Vec<(u64, u64)> {
        self.chains
            .iter()
            .filter(|(d, _)| **d > 0)
            .map(|(d, c)| (*d, c.len() as u64))
            .collect()
    }

    /// Elements not yet on the mainland.
    pub fn pending(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .chains
            .iter()
            .filter(|(d, _)| **d > 0)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// The active requirement's index and witness.
    pub fn active(&self) -> Option<(usize, u64)> {
        self.active.map(|a| (a.index, a.witness))
    }

    pub fn prefix(&self) -> ChainPrefix {
        let map = self
            .successor
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|v| (k as u64, v)))
            .collect();
        ChainPrefix::new(0, map)
    }

    pub fn run(&mut self, stages: u64) -> Result<(), IslandError> {
        for _ in 0..stages {
            self.step()?;
        }
        Ok(())
    }

    /// One stage: Extend, then activate a requirement or merge the islands
    /// if the active requirement's opponent has converged.
    pub fn step(&mut self) -> Result<(), IslandError> {
        self.stage += 1;
        let s = self.stage;
        let expanded_before = self.expanded;
        self.extend()?;
        let mut line = format!(
            "stage={s} event=extend size={} islands={} expanded={}",
            self.size,
            self.island_count(),
            self.expanded - expanded_before
        );
        match self.active {
            None if self.next_requirement < self.requirements.len() => {
                let index = self.next_requirement;
                self.next_requirement += 1;
                let w = self.fresh(Mark {
                    slope: 1,
                    offset: 0,
                });
                self.chains.insert(1, vec![w]);
                self.active = Some(Active {
                    index,
                    witness: w,
                    since: s,
                });
                line.push_str(&format!(" activate={index} witness={w}"));
                self.transcript.push(line);
            }
            None => self.transcript.push(line),
            Some(act) => {
                self.transcript.push(line);
                let opp = &self.requirements[act.index].opponent;
                if let Some(m) = opp.value_by(act.witness, s) {
                    self.connect(m)?;
                }
            }
        }
        Ok(())
    }

    fn fresh(&mut self, mark: Mark) -> u64 {
        while self
            .marks
            .get(self.least_free as usize)
            .is_some_and(Option::is_some)
        {
            self.least_free += 1;
        }
        let name = self.least_free;
        self.place(name, mark);
        name
    }

    fn place(&mut self, name: u64, mark: Mark) {
        let i = name as usize;
        if self.marks.len() <= i {
            self.marks.resize(i + 1, None);
            self.successor.resize(i + 1, None);
            self.images.resize(i + 1, None);
        }
        debug_assert!(self.marks[i].is_none());
        self.marks[i] = Some(mark);
        self.size += 1;
    }

    /// The element marked `slope * x + offset`, creating it and every lower
    /// offset of that slope if missing.
    fn ensure(&mut self, slope: u64, offset: u64) -> u64 {
        let have = self.chains.get(&slope).map_or(0, Vec::len) as u64;
        for k in have..=offset {
            let name = self.fresh(Mark { slope, offset: k });
            let chain = self.chains.entry(slope).or_default();
            if let Some(&prev) = chain.last() {
                self.successor[prev as usize] = Some(name);
            }
            chain.push(name);
        }
        self.chains[&slope][offset as usize]
    }

    fn extend(&mut self) -> Result<(), IslandError> {
        let tops: Vec<(u64, u64)> = self
            .chains
            .iter()
            .map(|(d, c)| (*d, c.len() as u64))
            .collect();
        let upto = self.stage.min(self.marks.len() as u64);
        for name in self.expanded..upto {
            if let Some(mark) = self.mark_of(name) {
                self.expand(name, mark)?;
            }
        }
        self.expanded = self.expanded.max(upto);
        for (slope, next) in tops {
            self.ensure(slope, next);
        }
        Ok(())
    }

    fn expand(&mut self, name: u64, mark: Mark) -> Result<(), IslandError> {
        let successor = self.ensure(mark.slope, mark.offset + 1);
        let mut multiples = Vec::with_capacity(self.primes.0.len());
        for i in 0..self.primes.0.len() {
            let p = self.primes.0[i];
            let (Some(d), Some(e)) = (mark.slope.checked_mul(p), mark.offset.checked_mul(p)) else {
                return Err(IslandError::Overflow(format!("{p}({mark})")));
            };
            multiples.push(self.ensure(d, e));
        }
        self.images[name as usize] = Some(DeclaredImages {
            successor,
            multiples,
        });
        Ok(())
    }

    /// Merges every island into the mainland so that `a q + b` misses the
    /// position of `m`, where `q` becomes the witness's position.
    pub fn connect(&mut self, m: u64) -> Result<(), IslandError> {
        let act = self.active.ok_or_else(|| {
            IslandError::ConstructionViolated("connect without an active requirement".into())
        })?;
        let (a, b) = {
            let r = &self.requirements[act.index];
            (r.a, r.b)
        };
        let mainland_len = self.chains[&0].len() as u64;
        let islands = self.islands();
        let mut q_prime = i128::from(mainland_len);
        for pair in islands.windows(2) {
            let (d_i, len_i) = pair[0];
            let (d_next, _) = pair[1];
            let e_i = i128::from(len_i - 1);
            q_prime = q_prime.max(Integer::div_ceil(&e_i, &i128::from(d_next - d_i)) + 1);
        }
        let (case, q) = match self.mark_of(m) {
            None => (
                ConnectCase::Fresh,
                q_prime.max(i128::from(mainland_len) + 1),
            ),
            Some(mark) if mark.is_constant() => (ConnectCase::Mainland, q_prime),
            Some(mark) => match a.cmp(&mark.slope) {
                std::cmp::Ordering::Less => (
                    ConnectCase::SteeperIsland,
                    q_prime.max(crossing_bound(a, b, mark)),
                ),
                std::cmp::Ordering::Greater => (
                    ConnectCase::ShallowerIsland,
                    q_prime.max(crossing_bound(a, b, mark)),
                ),
                std::cmp::Ordering::Equal => {
                    return Err(IslandError::InvalidRequirement {
                        a,
                        primes: self.primes.to_string(),
                    })
                }
            },
        };
        let q = u64::try_from(q).map_err(|_| IslandError::Overflow(format!("q = {q}")))?;
        self.transcript.push(format!(
            "stage={} event=connect requirement={} case={} islands={} q_prime={q_prime} q={q} target={m}",
            self.stage,
            act.index,
            case.number(),
            islands.len()
        ));
        let fresh_target = (case == ConnectCase::Fresh).then_some(m);
        self.finish(q, fresh_target)?;

        let target_position = self.chains[&0]
            .iter()
            .position(|&n| n == m)
            .ok_or_else(|| IslandError::ConstructionViolated(format!("{m} left off the chain")))?
            as u64;
        let record = SatisfactionRecord {
            requirement: act.index,
            a,
            b,
            witness: act.witness,
            stage: self.stage,
            case,
            q,
            target: m,
            target_position,
        };
        let lhs = a
            .checked_mul(q)
            .and_then(|v| v.checked_add(b))
            .ok_or_else(|| IslandError::Overflow(format!("{a}*{q}+{b}")))?;
        if lhs == target_position {
            return Err(IslandError::ConstructionViolated(format!(
                "requirement {} not met: {a}*{q}+{b} = {target_position}",
                act.index
            )));
        }
        self.transcript.push(format!(
            "stage={} event=satisfy requirement={} a={a} b={b} witness={} q={q} lhs={lhs} target={m} target_position={target_position} since={}",
            self.stage, act.index, act.witness, act.since
        ));
        self.records.push(record);
        self.active = None;
        Ok(())
    }

    /// Lays every mark `dx + e` at position `dq + e`, fills the remaining
    /// positions with fresh numbers and makes the whole structure one chain.
    fn finish(&mut self, q: u64, fresh_target: Option<u64>) -> Result<(), IslandError> {
        let mut placed: BTreeMap<u64, u64> = BTreeMap::new();
        let mainland_len = self.chains[&0].len() as u64;
        if let Some(m) = fresh_target {
            self.place(m, Mark::constant(mainland_len));
            placed.insert(mainland_len, m);
        }
        for (&slope, chain) in &self.chains {
            for (offset, &name) in chain.iter().enumerate() {
                let mark = Mark {
                    slope,
                    offset: offset as u64,
                };
                let pos = mark
                    .at(q)
                    .ok_or_else(|| IslandError::Overflow(format!("{mark} at x = {q}")))?;
                if let Some(other) = placed.insert(pos, name) {
                    return Err(IslandError::ConstructionViolated(format!(
                        "{other} and {name} both land at position {pos}"
                    )));
                }
            }
        }
        let top = *placed.keys().next_back().expect("mainland is never empty");
        let mut line = Vec::with_capacity(top as usize + 1);
        for pos in 0..=top {
            match placed.get(&pos) {
                Some(&name) => line.push(name),
                None => line.push(self.fresh(Mark::constant(pos))),
            }
        }
        // the domain stays an initial segment of N
        let max_name = self.marks.len() as u64 - 1;
        while self.size <= max_name {
            let pos = line.len() as u64;
            line.push(self.fresh(Mark::constant(pos)));
        }
        for (pos, pair) in line.windows(2).enumerate() {
            let (x, y) = (pair[0] as usize, pair[1]);
            if let Some(old) = self.successor[x] {
                if old != y {
                    return Err(IslandError::ConstructionViolated(format!(
                        "successor of {x} moved from {old} to {y}"
                    )));
                }
            }
            self.successor[x] = Some(y);
            self.marks[x] = Some(Mark::constant(pos as u64));
        }
        let last = *line.last().expect("line is non-empty");
        self.marks[last as usize] = Some(Mark::constant(line.len() as u64 - 1));
        self.transcript.push(format!(
            "stage={} event=finish q={q} size={}",
            self.stage,
            line.len()
        ));
        self.chains.clear();
        self.chains.insert(0, line);
        Ok(())
    }

    /// Checks the images fixed at expansion time against the brute-force
    /// oracle on the final chain, for the first `limit` mainland positions.
    pub fn check_images(&self, limit: u64) -> ImageReport {
        let prefix = self.prefix();
        let budget = self.size;
        let mut report = ImageReport::default();
        for (pos, &name) in self.mainland().iter().enumerate().take(limit as usize) {
            let Some(decl) = self.images_of(name) else {
                report.undeclared += 1;
                continue;
            };
            report.checked += 1;
            let x = Nat::from(name);
            let mut expect = vec![("x+1".to_string(), decl.successor, 1u64, 1u64)];
            for (p, &img) in self.primes.0.iter().zip(&decl.multiples) {
                expect.push((format!("{p}x"), img, *p, 0));
            }
            for (label, declared, mul, add) in expect {
                let oracle = image_oracle(&prefix, |v: &Nat| v * mul + add, &x, budget);
                match oracle {
                    Ok(v) if v == Nat::from(declared) => {}
                    Ok(v) => report.mismatches.push(format!(
                        "{label} at position {pos}: declared {declared}, oracle {v}"
                    )),
                    Err(e) => report
                        .mismatches
                        .push(format!("{label} at position {pos}: oracle failed: {e}")),
                }
            }
        }
        report
    }

    /// Recomputes every satisfaction record from the final chain alone.
    pub fn verify_records(&self) -> Result<(), IslandError> {
        let prefix = self.prefix();
        for r in &self.records {
            let q = number_of(&prefix, &Nat::from(r.witness), self.size)?;
            let pos_m = number_of(&prefix, &Nat::from(r.target), self.size)?;
            if q != r.q || pos_m != r.target_position || r.a * q + r.b == pos_m {
                return Err(IslandError::ConstructionViolated(format!(
                    "requirement {}: witness at {q}, target at {pos_m}, record {r:?}",
                    r.requirement
                )));
            }
        }
        Ok(())
    }
}

/// Least `q` past which `a q + b` and the island mark `d q + e` (`d != a`)
/// are strictly ordered the way they are at infinity, plus one.
fn crossing_bound(a: u64, b: u64, mark: Mark) -> i128 {
    let (a, b) = (i128::from(a), i128::from(b));
    let (d, e) = (i128::from(mark.slope), i128::from(mark.offset));
    if a < d {
        Integer::div_ceil(&(b - e), &(d - a)) + 1
    } else {
        Integer::div_ceil(&(e - b), &(a - d)) + 1
    }
}

/// Replays `stages` stages of the construction against the given
/// requirements.
pub fn linear_run(
    primes: PrimeSet,
    requirements: Vec<LinearRequirement>,
    stages: u64,
) -> Result<LinearEngine, IslandError> {
    let mut engine = LinearEngine::new(primes, requirements)?;
    engine.run(stages)?;
    Ok(engine)
}
