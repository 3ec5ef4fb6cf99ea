//! Opponents: the total functions a construction diagonalizes against, each
//! with the stage at which its value on a given argument becomes visible.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::IslandError;

/// `psi(x) = max(0, mul * x + add)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueRule {
    pub mul: u64,
    pub add: i64,
}

impl ValueRule {
    pub fn constant(c: u64) -> Self {
        ValueRule {
            mul: 0,
            add: c as i64,
        }
    }

    pub fn apply(&self, x: u64) -> u64 {
        let v = i128::from(self.mul) * i128::from(x) + i128::from(self.add);
        v.clamp(0, i128::from(u64::MAX)) as u64
    }
}

impl fmt::Display for ValueRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.mul, self.add) {
            (0, a) => write!(f, "{a}"),
            (1, 0) => write!(f, "x"),
            (m, 0) => write!(f, "{m}x"),
            (1, a) if a > 0 => write!(f, "x+{a}"),
            (1, a) => write!(f, "x{a}"),
            (m, a) if a > 0 => write!(f, "{m}x+{a}"),
            (m, a) => write!(f, "{m}x{a}"),
        }
    }
}

impl FromStr for ValueRule {
    type Err = String;

    /// Accepts `c`, `x`, `mx`, `x+c`, `x-c`, `mx+c`, `mx-c`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("cannot read `{s}` as a linear rule");
        let Some(xpos) = s.find('x') else {
            let c: u64 = s.parse().map_err(|_| bad())?;
            return Ok(ValueRule::constant(c));
        };
        let mul = match &s[..xpos] {
            "" => 1,
            m => m.parse().map_err(|_| bad())?,
        };
        let rest = &s[xpos + 1..];
        let add = match rest.chars().next() {
            None => 0,
            Some('+') => rest[1..].parse::<i64>().map_err(|_| bad())?,
            Some('-') => -rest[1..].parse::<i64>().map_err(|_| bad())?,
            Some(_) => return Err(bad()),
        };
        Ok(ValueRule { mul, add })
    }
}

/// When `psi(x)` converges, relative to the least admissible stage
/// `max(id, x, psi(x)) + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convergence {
    /// At the least admissible stage.
    Prompt,
    /// That many stages after the least admissible one.
    Delayed(u64),
    /// Explicit stages; arguments missing from the table never converge.
    Table(BTreeMap<u64, u64>),
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convergence::Prompt => write!(f, "prompt"),
            Convergence::Delayed(k) => write!(f, "delay:{k}"),
            Convergence::Table(t) => {
                let cells: Vec<String> = t.iter().map(|(x, s)| format!("{x}@{s}")).collect();
                write!(f, "table:{}", cells.join(","))
            }
        }
    }
}

impl FromStr for Convergence {
    type Err = String;

    /// Accepts `prompt`, `delay:k`, `table:x@s,x@s,...`.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("cannot read `{s}` as a convergence rule");
        if s == "prompt" {
            return Ok(Convergence::Prompt);
        }
        if let Some(k) = s.strip_prefix("delay:") {
            return k.parse().map(Convergence::Delayed).map_err(|_| bad());
        }
        let cells = s.strip_prefix("table:").ok_or_else(bad)?;
        let mut table = BTreeMap::new();
        for cell in cells.split(',').filter(|c| !c.is_empty()) {
            let (x, st) = cell.split_once('@').ok_or_else(bad)?;
            table.insert(
                x.parse().map_err(|_| bad())?,
                st.parse().map_err(|_| bad())?,
            );
        }
        Ok(Convergence::Table(table))
    }
}

/// The `id`-th opponent: a value rule and its convergence stages, with every
/// convergence stage strictly above `max(id, x, psi(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opponent {
    id: u64,
    value: ValueRule,
    convergence: Convergence,
}

impl Opponent {
    pub fn new(id: u64, value: ValueRule, convergence: Convergence) -> Result<Self, IslandError> {
        let opp = Opponent {
            id,
            value,
            convergence,
        };
        if let Convergence::Table(table) = &opp.convergence {
            for (&x, &stage) in table {
                let bound = opp.least_stage(x) - 1;
                if stage <= bound {
                    return Err(IslandError::InvalidOpponent {
                        id,
                        x,
                        stage,
                        bound,
                    });
                }
            }
        }
        Ok(opp)
    }

    pub fn prompt(id: u64, value: ValueRule) -> Self {
        Opponent {
            id,
            value,
            convergence: Convergence::Prompt,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn value_rule(&self) -> ValueRule {
        self.value
    }

    pub fn convergence(&self) -> &Convergence {
        &self.convergence
    }

    pub fn evaluate(&self, x: u64) -> u64 {
        self.value.apply(x)
    }

    fn least_stage(&self, x: u64) -> u64 {
        self.id.max(x).max(self.evaluate(x)).saturating_add(1)
    }

    pub fn convergence_stage(&self, x: u64) -> Option<u64> {
        match &self.convergence {
            Convergence::Prompt => Some(self.least_stage(x)),
            Convergence::Delayed(k) => Some(self.least_stage(x).saturating_add(*k)),
            Convergence::Table(t) => t.get(&x).copied(),
        }
    }

    /// `psi_{id,s}(x)` converged by stage `s`.
    pub fn value_by(&self, x: u64, s: u64) -> Option<u64> {
        self.convergence_stage(x)
            .filter(|&st| st <= s)
            .map(|_| self.evaluate(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_rules_parse_and_print() {
        for (text, x, v) in [
            ("7", 3, 7),
            ("x", 3, 3),
            ("2x+1", 3, 7),
            ("x-1", 3, 2),
            ("x-5", 3, 0),
            ("3x-1", 2, 5),
        ] {
            let r: ValueRule = text.parse().unwrap();
            assert_eq!(r.apply(x), v, "{text}");
            assert_eq!(r.to_string(), text);
        }
        assert!("2y".parse::<ValueRule>().is_err());
    }

    #[test]
    fn convergence_respects_the_stage_bound() {
        let o = Opponent::prompt(2, "x+1".parse().unwrap());
        assert_eq!(o.convergence_stage(5), Some(7));
        assert_eq!(o.value_by(5, 6), None);
        assert_eq!(o.value_by(5, 7), Some(6));
        let d = Opponent::new(0, ValueRule::constant(9), Convergence::Delayed(3)).unwrap();
        assert_eq!(d.convergence_stage(1), Some(13));
    }

    #[test]
    fn table_entries_are_validated_up_front() {
        let ok = Opponent::new(1, "x".parse().unwrap(), "table:4@5".parse().unwrap());
        assert!(ok.is_ok());
        let err = Opponent::new(1, "x".parse().unwrap(), "table:4@4".parse().unwrap());
        assert_eq!(
            err,
            Err(IslandError::InvalidOpponent {
                id: 1,
                x: 4,
                stage: 4,
                bound: 4
            })
        );
        let missing = ok.unwrap();
        assert_eq!(missing.value_by(3, 1000), None);
    }

    #[test]
    fn convergence_rules_round_trip() {
        for text in ["prompt", "delay:4", "table:3@9,10@20"] {
            let c: Convergence = text.parse().unwrap();
            assert_eq!(c.to_string(), text);
        }
    }
}
