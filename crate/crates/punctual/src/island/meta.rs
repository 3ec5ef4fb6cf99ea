//! The family engine: a punctual copy of `(N, S)` on which every function of
//! a family plugin has a primitive recursive image while the predecessor
//! does not.
//!
//! The mainland is always an initial segment `M[e, theta]` of `N` closed
//! under the first symbols of the family; archipelago elements are labelled
//! by family terms `q(w)` in the requirement's witness `w`. On merging, `w`
//! goes right after the mainland at position `D' + 1` and every labelled
//! element at `q(D' + 1)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::{ChainPrefix, ImageReport, IslandError, LFamily, Listing, Opponent};
use crate::copies::{image_oracle, number_of};
use crate::nat::Nat;

/// A function symbol of the signature `{S, t_0, ..., t_e}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Successor,
    Listed(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Successor => write!(f, "S"),
            Symbol::Listed(i) => write!(f, "t{i}"),
        }
    }
}

fn signature(e: usize) -> impl Iterator<Item = Symbol> {
    std::iter::once(Symbol::Successor).chain((0..=e).map(Symbol::Listed))
}

/// `f(argument) = value`, fixed on the archipelago before positions are known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub stage: u64,
    pub symbol: Symbol,
    pub argument: u64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaRecord {
    pub requirement: usize,
    pub witness: u64,
    pub stage: u64,
    /// The opponent's value `psi_e(w)`, its guess at the predecessor of `w`.
    pub guess: u64,
    pub successor_of_guess: u64,
    /// `max(theta, beta)` before merging.
    pub big_theta: u64,
    pub d_prime: u64,
    pub new_theta: u64,
    pub archipelago: usize,
}

/// `M[e, s]`: the initial segment `[0, D_s]` with `D_0 = 0` and
/// `D_{k+1} = max f(D_k)` over the signature; each symbol is defined on
/// `[0, D_{s-1}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageStructure {
    pub e: usize,
    pub s: u64,
    tops: Vec<u64>,
    graphs: BTreeMap<Symbol, Vec<u64>>,
}

impl StageStructure {
    pub fn domain_top(&self) -> u64 {
        self.tops[self.s as usize]
    }

    pub fn apply(&self, symbol: Symbol, x: u64) -> Option<u64> {
        self.graphs.get(&symbol)?.get(x as usize).copied()
    }
}

/// Builds `M[e, s]` with the symbols' graphs on the defined part.
pub fn meta_stage_structure<F: LFamily>(
    family: &F,
    listing: &mut Listing<F::Term>,
    e: usize,
    s: u64,
) -> Result<StageStructure, IslandError> {
    let terms = signature_terms(family, listing, e);
    let tops = stage_tops(family, &terms, s)?;
    let mut graphs = BTreeMap::new();
    if s > 0 {
        let defined = tops[s as usize - 1];
        for (sym, t) in &terms {
            let vals = (0..=defined)
                .map(|x| family.eval(t, x))
                .collect::<Result<Vec<_>, _>>()?;
            graphs.insert(*sym, vals);
        }
    }
    Ok(StageStructure { e, s, tops, graphs })
}

fn signature_terms<F: LFamily>(
    family: &F,
    listing: &mut Listing<F::Term>,
    e: usize,
) -> Vec<(Symbol, F::Term)> {
    signature(e)
        .map(|sym| match sym {
            Symbol::Successor => (sym, family.successor()),
            Symbol::Listed(i) => (sym, listing.get(family, i as u64)),
        })
        .collect()
}

fn stage_tops<F: LFamily>(
    family: &F,
    terms: &[(Symbol, F::Term)],
    s: u64,
) -> Result<Vec<u64>, IslandError> {
    let mut tops = vec![0u64];
    for _ in 0..s {
        let d = *tops.last().expect("non-empty");
        let mut next = d;
        for (_, t) in terms {
            next = next.max(family.eval(t, d)?);
        }
        tops.push(next);
    }
    Ok(tops)
}

#[derive(Debug, Clone)]
struct Labelled<F: LFamily> {
    name: u64,
    term: F::Term,
    normal: F::Normal,
}

pub struct MetaEngine<F: LFamily> {
    family: F,
    listing: Listing<F::Term>,
    opponents: Vec<Opponent>,
    stage: u64,
    theta: u64,
    beta: u64,
    requirement: usize,
    /// By name.
    successor: Vec<Option<u64>>,
    position: Vec<Option<u64>>,
    /// Names by position.
    mainland: Vec<u64>,
    /// Sorted by the domination order of the labels.
    archipelago: BTreeMap<F::Normal, Labelled<F>>,
    witness: Option<(u64, u64)>,
    /// `D(e, theta)` for `theta = 0, 1, ...`, per signature size.
    tops: BTreeMap<usize, Vec<u64>>,
    declared: HashSet<(Symbol, u64)>,
    declarations: Vec<Declaration>,
    records: Vec<MetaRecord>,
    transcript: Vec<String>,
}

impl<F: LFamily> MetaEngine<F> {
    /// Stage 0: the mainland `0, 1` with `S(0) = 1`.
    pub fn new(family: F, listing: Listing<F::Term>, opponents: Vec<Opponent>) -> Self {
        MetaEngine {
            family,
            listing,
            opponents,
            stage: 0,
            theta: 0,
            beta: 0,
            requirement: 0,
            successor: vec![Some(1), None],
            position: vec![Some(0), Some(1)],
            mainland: vec![0, 1],
            archipelago: BTreeMap::new(),
            witness: None,
            tops: BTreeMap::new(),
            declared: HashSet::new(),
            declarations: Vec::new(),
            records: Vec::new(),
            transcript: Vec::new(),
        }
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn theta(&self) -> u64 {
        self.theta
    }

    pub fn size(&self) -> u64 {
        self.successor.len() as u64
    }

    pub fn mainland(&self) -> &[u64] {
        &self.mainland
    }

    pub fn archipelago_size(&self) -> usize {
        self.archipelago.len()
    }

    /// Labels of the archipelago, in the declared order.
    pub fn labels(&self) -> Vec<(u64, String)> {
        self.archipelago
            .values()
            .map(|l| (l.name, l.term.to_string()))
            .collect()
    }

    pub fn records(&self) -> &[MetaRecord] {
        &self.records
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn term(&mut self, symbol: Symbol) -> F::Term {
        match symbol {
            Symbol::Successor => self.family.successor(),
            Symbol::Listed(i) => self.listing.get(&self.family, i as u64),
        }
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

    pub fn step(&mut self) -> Result<(), IslandError> {
        self.stage += 1;
        let s = self.stage;
        let Some(opponent) = self.opponents.get(self.requirement).cloned() else {
            self.extend()?;
            self.log_extend("");
            return Ok(());
        };
        match self.witness {
            None => {
                self.extend()?;
                let w = self.fresh();
                let term = self.family.identity();
                let normal = self.family.normal_form(&term)?;
                self.archipelago.insert(
                    normal.clone(),
                    Labelled {
                        name: w,
                        term,
                        normal,
                    },
                );
                self.beta = s;
                self.witness = Some((w, s));
                self.log_extend(&format!(" activate={} witness={w}", self.requirement));
            }
            Some((w, _)) => match opponent.value_by(w, s) {
                Some(guess) => self.connect(guess)?,
                None => {
                    self.extend()?;
                    self.log_extend("");
                }
            },
        }
        Ok(())
    }

    fn log_extend(&mut self, extra: &str) {
        let line = format!(
            "stage={} event=extend theta={} size={} mainland={} archipelago={} beta={}{extra}",
            self.stage,
            self.theta,
            self.size(),
            self.mainland.len(),
            self.archipelago.len(),
            self.beta
        );
        self.transcript.push(line);
    }

    fn fresh(&mut self) -> u64 {
        self.successor.push(None);
        self.position.push(None);
        self.successor.len() as u64 - 1
    }

    /// `D(e, theta)` for the current requirement's signature.
    fn top(&mut self, e: usize, theta: u64) -> Result<u64, IslandError> {
        let have = self.tops.get(&e).map_or(0, Vec::len) as u64;
        if have <= theta {
            let terms = signature_terms(&self.family, &mut self.listing, e);
            let tops = self.tops.entry(e).or_insert_with(|| vec![0]);
            while tops.len() as u64 <= theta {
                let d = *tops.last().expect("non-empty");
                let mut next = d;
                for (_, t) in &terms {
                    next = next.max(self.family.eval(t, d)?);
                }
                tops.push(next);
            }
        }
        Ok(self.tops[&e][theta as usize])
    }

    /// Appends fresh elements until the mainland reaches position `top`.
    fn grow_mainland(&mut self, top: u64) {
        while (self.mainland.len() as u64) <= top {
            let name = self.fresh();
            self.attach(name);
        }
    }

    fn attach(&mut self, name: u64) {
        let pos = self.mainland.len() as u64;
        if let Some(&prev) = self.mainland.last() {
            self.successor[prev as usize] = Some(name);
        }
        self.position[name as usize] = Some(pos);
        self.mainland.push(name);
    }

    fn declare(&mut self, symbol: Symbol, argument: u64, value: u64) -> Result<(), IslandError> {
        if symbol == Symbol::Successor {
            match self.successor[argument as usize] {
                Some(old) if old != value => {
                    return Err(IslandError::ConstructionViolated(format!(
                        "S({argument}) redeclared from {old} to {value}"
                    )))
                }
                _ => self.successor[argument as usize] = Some(value),
            }
        }
        if self.declared.insert((symbol, argument)) {
            self.declarations.push(Declaration {
                stage: self.stage,
                symbol,
                argument,
                value,
            });
        }
        Ok(())
    }

    /// Grows the mainland to `M[e, theta + 1]` and closes the archipelago
    /// under the signature once, deduplicating labels by normal form.
    fn extend(&mut self) -> Result<(), IslandError> {
        self.theta += 1;
        let e = self.requirement;
        let top = self.top(e, self.theta)?;
        self.grow_mainland(top);
        if self.archipelago.is_empty() {
            return Ok(());
        }
        let snapshot: Vec<(u64, F::Term)> = self
            .archipelago
            .values()
            .map(|l| (l.name, l.term.clone()))
            .collect();
        let mut beta = self.beta;
        for symbol in signature(e) {
            let f = self.term(symbol);
            for (z, q) in &snapshot {
                let u = self.family.compose(&f, q)?;
                let normal = self.family.normal_form(&u)?;
                let value = match self.archipelago.get(&normal) {
                    Some(existing) => {
                        self.check_same_function(&existing.term, &u)?;
                        existing.name
                    }
                    None => {
                        for other in self.archipelago.values() {
                            let (lo, hi) = if other.normal < normal {
                                (&other.term, &u)
                            } else {
                                (&u, &other.term)
                            };
                            let d = self.family.strict_witness(lo, hi)?;
                            self.check_witness(lo, hi, d)?;
                            beta = beta.max(d);
                        }
                        let name = self.fresh();
                        self.archipelago.insert(
                            normal.clone(),
                            Labelled {
                                name,
                                term: u,
                                normal,
                            },
                        );
                        name
                    }
                };
                self.declare(symbol, *z, value)?;
            }
        }
        self.beta = beta + 1;
        Ok(())
    }

    /// Equal normal forms must mean equal functions.
    fn check_same_function(&self, a: &F::Term, b: &F::Term) -> Result<(), IslandError> {
        for x in 0..4 {
            if self.family.eval(a, x)? != self.family.eval(b, x)? {
                return Err(IslandError::FamilyContractViolated(format!(
                    "`{a}` and `{b}` share a normal form but differ at {x}"
                )));
            }
        }
        Ok(())
    }

    fn check_witness(&self, lo: &F::Term, hi: &F::Term, d: u64) -> Result<(), IslandError> {
        if self.family.eval(lo, d)? >= self.family.eval(hi, d)? {
            return Err(IslandError::FamilyContractViolated(format!(
                "witness {d} for `{lo}` below `{hi}` fails at {d}"
            )));
        }
        Ok(())
    }

    /// Labels in increasing order must take strictly increasing values at
    /// `x`.
    fn check_dagger(&self, x: u64) -> Result<usize, IslandError> {
        let mut prev: Option<(u64, &F::Term)> = None;
        let mut pairs = 0;
        for l in self.archipelago.values() {
            let v = self.family.eval(&l.term, x)?;
            if let Some((pv, pt)) = prev {
                if pv >= v {
                    return Err(IslandError::FamilyContractViolated(format!(
                        "order of `{pt}` below `{}` fails at x = {x}",
                        l.term
                    )));
                }
                pairs += 1;
            }
            prev = Some((v, &l.term));
        }
        Ok(pairs)
    }

    /// Satisfies the active requirement against `guess = psi_e(w)`, then
    /// merges the archipelago: `w` at `D' + 1`, each label `q` at
    /// `q(D' + 1)`, fresh numbers everywhere else up to `M[e, Theta']`.
    fn connect(&mut self, guess: u64) -> Result<(), IslandError> {
        let (w, _) = self
            .witness
            .ok_or_else(|| IslandError::ConstructionViolated("connect without a witness".into()))?;
        let e = self.requirement;
        let successor_of_guess = self
            .successor
            .get(guess as usize)
            .copied()
            .flatten()
            .ok_or_else(|| {
                IslandError::ConstructionViolated(format!(
                    "S({guess}) undefined when requirement {e} converged"
                ))
            })?;
        if successor_of_guess == w {
            return Err(IslandError::ConstructionViolated(format!(
                "S({guess}) = {w} before merging"
            )));
        }

        let big_theta = self.theta.max(self.beta);
        let mut d_prime = self.mainland.len() as u64 - 1;
        if d_prime < big_theta {
            let top = self.top(e, big_theta)?;
            self.grow_mainland(top);
            d_prime = self.mainland.len() as u64 - 1;
        }
        let pairs = self.check_dagger(big_theta)?;
        self.check_dagger(d_prime + 1)?;
        self.transcript.push(format!(
            "stage={} event=connect requirement={e} witness={w} big_theta={big_theta} d_prime={d_prime} dagger_pairs={pairs}",
            self.stage
        ));

        let mut placed = BTreeMap::new();
        for l in self.archipelago.values() {
            let pos = self.family.eval(&l.term, d_prime + 1)?;
            if let Some(other) = placed.insert(pos, l.name) {
                return Err(IslandError::ConstructionViolated(format!(
                    "{other} and {} both land at {pos}",
                    l.name
                )));
            }
        }
        debug_assert_eq!(placed.get(&(d_prime + 1)), Some(&w));
        let new_theta = *placed.keys().next_back().expect("w is placed");
        self.theta = new_theta;
        let top = self.top(e, new_theta)?;
        for pos in d_prime + 1..=top {
            let name = match placed.get(&pos) {
                Some(&name) => name,
                None => self.fresh(),
            };
            let prev = *self.mainland.last().expect("non-empty");
            if let Some(old) = self.successor[prev as usize] {
                if old != name {
                    return Err(IslandError::ConstructionViolated(format!(
                        "S({prev}) was {old}, chain needs {name}"
                    )));
                }
            }
            self.attach(name);
        }
        self.transcript.push(format!(
            "stage={} event=finish theta={new_theta} size={} mainland={}",
            self.stage,
            self.size(),
            self.mainland.len()
        ));

        let archipelago = self.archipelago.len();
        self.archipelago.clear();
        self.witness = None;
        self.records.push(MetaRecord {
            requirement: e,
            witness: w,
            stage: self.stage,
            guess,
            successor_of_guess,
            big_theta,
            d_prime,
            new_theta,
            archipelago,
        });
        self.transcript.push(format!(
            "stage={} event=satisfy requirement={e} witness={w} guess={guess} successor_of_guess={successor_of_guess}",
            self.stage
        ));
        self.requirement += 1;
        let top = self.top(self.requirement, self.theta)?;
        self.grow_mainland(top);
        Ok(())
    }

    /// The image of `symbol` at `name` as the construction computes it: the
    /// archipelago declaration if there is one, else through the mainland
    /// positions.
    pub fn fast_image(&mut self, symbol: Symbol, name: u64) -> Result<Option<u64>, IslandError> {
        if self.declared.contains(&(symbol, name)) {
            return Ok(self
                .declarations
                .iter()
                .find(|d| d.symbol == symbol && d.argument == name)
                .map(|d| d.value));
        }
        let Some(x) = self.position.get(name as usize).copied().flatten() else {
            return Ok(None);
        };
        let t = self.term(symbol);
        let v = self.family.eval(&t, x)?;
        Ok(self.mainland.get(v as usize).copied())
    }

    /// Compares [`Self::fast_image`] with the brute-force oracle on the first
    /// `limit` mainland positions.
    pub fn check_images(
        &mut self,
        symbols: &[Symbol],
        limit: u64,
    ) -> Result<ImageReport, IslandError> {
        let prefix = self.prefix();
        let budget = self.size();
        let mut report = ImageReport::default();
        let names: Vec<u64> = self.mainland.iter().take(limit as usize).copied().collect();
        for &symbol in symbols {
            let t = self.term(symbol);
            for (pos, &name) in names.iter().enumerate() {
                let Some(fast) = self.fast_image(symbol, name)? else {
                    report.undeclared += 1;
                    continue;
                };
                report.checked += 1;
                let family = &self.family;
                let oracle = image_oracle(
                    &prefix,
                    |v: &Nat| {
                        let x = u64::try_from(v).expect("positions are small");
                        Nat::from(family.eval(&t, x).unwrap_or(u64::MAX))
                    },
                    &Nat::from(name),
                    budget,
                );
                match oracle {
                    Ok(v) if v == Nat::from(fast) => {}
                    other => report.mismatches.push(format!(
                        "{symbol} at position {pos}: fast {fast}, oracle {other:?}"
                    )),
                }
            }
        }
        Ok(report)
    }

    /// Every archipelago declaration agrees with the final positions.
    pub fn verify_declarations(&mut self) -> Result<usize, IslandError> {
        let mut checked = 0;
        for d in self.declarations.clone() {
            let (Some(x), Some(v)) = (
                self.position[d.argument as usize],
                self.position[d.value as usize],
            ) else {
                continue;
            };
            let t = self.term(d.symbol);
            if self.family.eval(&t, x)? != v {
                return Err(IslandError::ConstructionViolated(format!(
                    "{}({}) = {} declared at stage {}, positions {x} -> {v}",
                    d.symbol, d.argument, d.value, d.stage
                )));
            }
            checked += 1;
        }
        Ok(checked)
    }

    /// Re-derives each requirement's outcome from the final structure:
    /// `S(psi_e(w)) != w`.
    pub fn verify_records(&self) -> Result<(), IslandError> {
        let prefix = self.prefix();
        for r in &self.records {
            let s_guess = self.successor[r.guess as usize];
            let guess_pos = number_of(&prefix, &Nat::from(r.guess), self.size())?;
            let w_pos = number_of(&prefix, &Nat::from(r.witness), self.size())?;
            if s_guess == Some(r.witness) || guess_pos + 1 == w_pos {
                return Err(IslandError::ConstructionViolated(format!(
                    "requirement {}: S({}) = {} in the final structure",
                    r.requirement, r.guess, r.witness
                )));
            }
        }
        Ok(())
    }
}

/// Replays `stages` stages of the family construction.
pub fn meta_run<F: LFamily>(
    family: F,
    listing: Listing<F::Term>,
    opponents: Vec<Opponent>,
    stages: u64,
) -> Result<MetaEngine<F>, IslandError> {
    let mut engine = MetaEngine::new(family, listing, opponents);
    engine.run(stages)?;
    Ok(engine)
}
