//! Input stimulus: exhaustive state lists and complete ordered-transition walks.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::Netlist;
use crate::trit::VoltageLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternKind {
    CompleteTransitions,
    StaticStates,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub signals: Vec<String>,
    pub rows: Vec<Vec<VoltageLevel>>,
    pub kind: PatternKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("pattern has no rows")]
    Empty,
    #[error("pattern signals do not match the netlist inputs: {0}")]
    Signals(String),
    #[error("row {row}: level {level} is outside the domain of {net}")]
    Level { row: usize, net: String, level: VoltageLevel },
}

impl Pattern {
    /// Consecutive row pairs.
    pub fn transitions(&self) -> impl Iterator<Item = (&[VoltageLevel], &[VoltageLevel])> {
        self.rows.windows(2).map(|w| (w[0].as_slice(), w[1].as_slice()))
    }

    pub fn transition_count(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from(".signals");
        for s in &self.signals {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
        for row in &self.rows {
            let digits: Vec<String> = row.iter().map(|l| l.digit().to_string()).collect();
            let _ = writeln!(out, "{}", digits.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        let mut signals: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut tokens = body.split_whitespace();
            let first = tokens.next().unwrap_or_default();
            if first.eq_ignore_ascii_case(".signals") {
                if signals.is_some() {
                    return Err(PatternError::Syntax {
                        line,
                        message: "duplicate .signals header".into(),
                    });
                }
                signals = Some(tokens.map(str::to_string).collect());
                continue;
            }
            let Some(names) = &signals else {
                return Err(PatternError::Syntax {
                    line,
                    message: "row before .signals header".into(),
                });
            };
            let row = body
                .split_whitespace()
                .map(|tok| match tok {
                    "0" => Ok(VoltageLevel::Gnd),
                    "1" => Ok(VoltageLevel::Half),
                    "2" => Ok(VoltageLevel::Vdd),
                    other => Err(PatternError::Syntax {
                        line,
                        message: format!("expected 0, 1 or 2, found `{other}`"),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != names.len() {
                return Err(PatternError::Syntax {
                    line,
                    message: format!("expected {} levels, found {}", names.len(), row.len()),
                });
            }
            rows.push(row);
        }
        let signals = signals.ok_or(PatternError::Syntax {
            line: 1,
            message: "missing .signals header".into(),
        })?;
        Ok(Pattern {
            signals,
            rows,
            kind: PatternKind::Custom,
        })
    }

    /// Reorders the rows into the netlist's input declaration order and checks
    /// every level against the declared domain.
    pub fn bind(&self, n: &Netlist) -> Result<Vec<Vec<VoltageLevel>>, PatternError> {
        if self.rows.is_empty() {
            return Err(PatternError::Empty);
        }
        let mut columns = Vec::with_capacity(n.inputs.len());
        for input in &n.inputs {
            let col = self
                .signals
                .iter()
                .position(|s| *s == input.net)
                .ok_or_else(|| PatternError::Signals(format!("input {} missing", input.net)))?;
            columns.push(col);
        }
        if let Some(extra) = self.signals.iter().find(|s| !n.is_input(s)) {
            return Err(PatternError::Signals(format!("{extra} is not an input")));
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                n.inputs
                    .iter()
                    .zip(&columns)
                    .map(|(input, &col)| {
                        let level = row[col];
                        if input.domain.levels().contains(&level) {
                            Ok(level)
                        } else {
                            Err(PatternError::Level {
                                row: r,
                                net: input.net.clone(),
                                level,
                            })
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Cartesian product in lexicographic order, first signal most significant.
pub fn product(domains: &[Vec<VoltageLevel>]) -> Vec<Vec<VoltageLevel>> {
    let mut states = vec![Vec::new()];
    for levels in domains {
        let mut next = Vec::with_capacity(states.len() * levels.len());
        for prefix in &states {
            for &l in levels {
                let mut s: Vec<VoltageLevel> = prefix.clone();
                s.push(l);
                next.push(s);
            }
        }
        states = next;
    }
    states
}

/// Walk over states that takes every ordered pair `(i, j)`, `i != j`, exactly
/// once as a consecutive transition. The complete digraph is Eulerian, so a
/// single closed walk of `k(k-1)` steps exists; successors are tried in
/// ascending order, which makes the walk deterministic.
fn eulerian_walk(k: usize) -> Vec<usize> {
    if k < 2 {
        return vec![0; k];
    }
    let mut next_succ = vec![0usize; k];
    let succ = |v: usize, i: usize| if i < v { i } else { i + 1 };
    let mut stack = vec![0usize];
    let mut walk = Vec::with_capacity(k * (k - 1) + 1);
    while let Some(&v) = stack.last() {
        if next_succ[v] < k - 1 {
            let w = succ(v, next_succ[v]);
            next_succ[v] += 1;
            stack.push(w);
        } else {
            walk.push(v);
            stack.pop();
        }
    }
    walk.reverse();
    walk
}

pub fn gen_pattern(domains: &[(String, Vec<VoltageLevel>)], kind: PatternKind) -> Pattern {
    let signals = domains.iter().map(|(n, _)| n.clone()).collect();
    let levels: Vec<Vec<VoltageLevel>> = domains.iter().map(|(_, l)| l.clone()).collect();
    let states = product(&levels);
    let rows = match kind {
        PatternKind::StaticStates | PatternKind::Custom => states,
        PatternKind::CompleteTransitions => eulerian_walk(states.len()).into_iter().map(|i| states[i].clone()).collect(),
    };
    Pattern { signals, rows, kind }
}

/// Domains taken from the netlist's declared inputs.
pub fn declared_domains(n: &Netlist) -> Vec<(String, Vec<VoltageLevel>)> {
    n.inputs.iter().map(|i| (i.net.clone(), i.domain.levels().to_vec())).collect()
}
