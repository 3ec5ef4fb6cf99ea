//! Opponent files: one opponent per line as `key=value` pairs, `#` comments.
//!
//! ```text
//! # a and b only matter for the linear engine
//! a=5 b=0 value=x-1 converge=prompt
//! id=3 value=7 converge=table:9@12
//! ```
//!
//! `id` defaults to the line's index among opponents, `converge` to `prompt`.

use std::collections::BTreeMap;

use punctual::island::{Convergence, LinearRequirement, Opponent, ValueRule};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct OpponentLine {
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub opponent: Opponent,
}

pub fn parse(text: &str) -> Result<Vec<OpponentLine>, CliError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Usage(format!("opponents line {}: {msg}", lineno + 1));
        let mut fields = BTreeMap::new();
        for token in line.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{token}`")))?;
            if fields.insert(k, v).is_some() {
                return Err(bad(format!("duplicate key `{k}`")));
            }
        }
        let number = |key: &str| -> Result<Option<u64>, CliError> {
            fields
                .get(key)
                .map(|v| {
                    v.parse()
                        .map_err(|_| bad(format!("`{key}` must be a natural number")))
                })
                .transpose()
        };
        let id = number("id")?.unwrap_or(out.len() as u64);
        let (a, b) = (number("a")?, number("b")?);
        let value: ValueRule = fields
            .get("value")
            .ok_or_else(|| bad("missing `value`".into()))?
            .parse()
            .map_err(bad)?;
        let convergence: Convergence = fields
            .get("converge")
            .map_or(Ok(Convergence::Prompt), |v| v.parse())
            .map_err(bad)?;
        if let Some(k) = fields
            .keys()
            .find(|k| !["id", "a", "b", "value", "converge"].contains(k))
        {
            return Err(bad(format!("unknown key `{k}`")));
        }
        out.push(OpponentLine {
            a,
            b,
            opponent: Opponent::new(id, value, convergence)?,
        });
    }
    Ok(out)
}

pub fn linear_requirements(lines: Vec<OpponentLine>) -> Result<Vec<LinearRequirement>, CliError> {
    lines
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let a = l.a.ok_or_else(|| {
                CliError::Usage(format!("opponent {i} needs `a` for the linear engine"))
            })?;
            Ok(LinearRequirement {
                a,
                b: l.b.unwrap_or(0),
                opponent: l.opponent,
            })
        })
        .collect()
}
