//! Exhaustive sweeps, truth tables and pattern-driven transition simulation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Circuit, NodeState, SolveError, SwingWarning};
use crate::genlib::{product, Pattern, PatternError};
use crate::metrics::PowerBreakdown;
use crate::netlist::Netlist;
use crate::trit::{decode, DomainError, Trit, VoltageLevel};

/// Per-input level sets in the netlist's declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDomain {
    pub nets: Vec<String>,
    pub levels: Vec<Vec<VoltageLevel>>,
}

impl InputDomain {
    pub fn declared(n: &Netlist) -> InputDomain {
        InputDomain {
            nets: n.inputs.iter().map(|i| i.net.clone()).collect(),
            levels: n.inputs.iter().map(|i| i.domain.levels().to_vec()).collect(),
        }
    }

    /// Replaces the level set of one input; unknown nets are ignored.
    pub fn with(mut self, net: &str, levels: &[VoltageLevel]) -> InputDomain {
        if let Some(i) = self.nets.iter().position(|n| n == net) {
            self.levels[i] = levels.to_vec();
        }
        self
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lexicographic order, first input most significant.
    pub fn points(&self) -> Vec<Vec<VoltageLevel>> {
        product(&self.levels)
    }
}

/// Output levels at one input point, or the reason the point has none.
pub type PointOutcome = Result<Vec<VoltageLevel>, SolveError>;

pub(crate) fn sweep_outcomes(c: &Circuit, points: &[Vec<VoltageLevel>]) -> Vec<PointOutcome> {
    points
        .par_iter()
        .map(|p| {
            let raw = c.solve(p, None)?;
            c.check_outputs(&raw)?;
            Ok(c.outputs.iter().map(|&o| raw.levels[o].level().expect("checked")).collect())
        })
        .collect()
}

/// Output levels for every point of `domain`, in canonical order.
pub fn sweep(n: &Netlist, domain: &InputDomain) -> Vec<(Vec<VoltageLevel>, PointOutcome)> {
    let c = Circuit::compile(n);
    let points = domain.points();
    let outcomes = sweep_outcomes(&c, &points);
    points.into_iter().zip(outcomes).collect()
}

/// Full solve results for every point of `domain`, in canonical order.
pub fn sweep_states(n: &Netlist, domain: &InputDomain) -> Vec<(Vec<VoltageLevel>, Result<super::SolveResult, SolveError>)> {
    let c = Circuit::compile(n);
    let points = domain.points();
    let results: Vec<_> = points
        .par_iter()
        .map(|p| {
            let raw = c.solve(p, None)?;
            c.check_outputs(&raw)?;
            Ok(c.to_result(&raw))
        })
        .collect();
    points.into_iter().zip(results).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub inputs: Vec<VoltageLevel>,
    pub outputs: Vec<VoltageLevel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<TruthRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {}: {source}", format_point(.point))]
pub struct TruthError {
    pub point: Vec<(String, VoltageLevel)>,
    pub source: SolveError,
}

fn format_point(point: &[(String, VoltageLevel)]) -> String {
    let parts: Vec<String> = point.iter().map(|(n, l)| format!("{n}={l}")).collect();
    parts.join(" ")
}

impl TruthTable {
    /// Logical rows under the declared input domains and output encodings.
    pub fn decoded(&self, n: &Netlist) -> Result<Vec<(Vec<Trit>, Vec<Trit>)>, DomainError> {
        self.rows
            .iter()
            .map(|row| {
                let ins = n
                    .inputs
                    .iter()
                    .zip(&row.inputs)
                    .map(|(decl, &l)| decode(l, decl.domain))
                    .collect::<Result<Vec<_>, _>>()?;
                let outs = n
                    .outputs
                    .iter()
                    .zip(&row.outputs)
                    .map(|(decl, &l)| decode(l, decl.encoding))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((ins, outs))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} | {}\n", self.inputs.join(" "), self.outputs.join(" "));
        for row in &self.rows {
            let ins: Vec<String> = row.inputs.iter().map(|l| l.digit().to_string()).collect();
            let outs: Vec<String> = row.outputs.iter().map(|l| l.digit().to_string()).collect();
            let _ = writeln!(out, "{} | {}", ins.join(" "), outs.join(" "));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self.inputs.iter().chain(&self.outputs).map(String::as_str).collect();
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let cells: Vec<String> = row.inputs.iter().chain(&row.outputs).map(|l| l.digit().to_string()).collect();
            w.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

/// Exhaustive solve over `domain`. The first failing point (in canonical
/// order) is reported with its input assignment.
pub fn truth_table(n: &Netlist, domain: &InputDomain) -> Result<TruthTable, TruthError> {
    let mut rows = Vec::with_capacity(domain.len());
    for (point, outcome) in sweep(n, domain) {
        match outcome {
            Ok(outputs) => rows.push(TruthRow { inputs: point, outputs }),
            Err(source) => {
                return Err(TruthError {
                    point: domain.nets.iter().cloned().zip(point).collect(),
                    source,
                })
            }
        }
    }
    Ok(TruthTable {
        inputs: domain.nets.clone(),
        outputs: n.outputs.iter().map(|o| o.net.clone()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOptions {
    /// Clock frequency for the dynamic-power estimate; none skips it.
    pub frequency_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Warning {
    pub kind: String,
    pub net: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub delay_rounds: usize,
    pub static_div_mean: f64,
    pub activity: f64,
    pub device_total: usize,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dynamic_power_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub inputs: Vec<VoltageLevel>,
    pub levels: Vec<NodeState>,
    pub settle_rounds: usize,
    pub division_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Non-rail nets in name order; the columns of every step.
    pub nets: Vec<String>,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["step".to_string()];
        header.extend(self.nets.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (i, step) in self.steps.iter().enumerate() {
            let mut cells = vec![i.to_string()];
            cells.extend(step.levels.iter().map(|s| s.symbol().to_string()));
            w.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulateError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("transition {transition}: {source}")]
    Solve { transition: usize, source: SolveError },
}

/// Applies the pattern rows in order. Row 0 is solved from scratch; every
/// later row starts from the previous steady state, and its settle rounds are
/// that transition's delay. The static proxy averages division events over
/// the distinct input vectors, each solved from scratch.
pub fn simulate_pattern(n: &Netlist, pattern: &Pattern, options: &SimOptions) -> Result<(Trace, MetricsReport), SimulateError> {
    let rows = pattern.bind(n)?;
    let c = Circuit::compile(n);
    let columns: Vec<usize> = (0..c.names.len()).filter(|&i| i != c.gnd && i != c.vdd_net).collect();

    let mut steps: Vec<TraceStep> = Vec::with_capacity(rows.len());
    let mut prev: Option<Vec<NodeState>> = None;
    let mut warnings: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut swing: BTreeMap<(String, crate::netlist::Polarity), f64> = BTreeMap::new();
    let mut delay = 0;
    let mut toggles = 0u64;
    let loaded: std::collections::BTreeSet<&str> = n.loads.iter().map(|l| l.net.as_str()).collect();
    for (t, row) in rows.iter().enumerate() {
        let raw = c
            .solve(row, prev.as_deref())
            .and_then(|raw| {
                if prev.is_none() {
                    c.check_outputs(&raw)?;
                }
                Ok(raw)
            })
            .map_err(|source| SimulateError::Solve { transition: t, source })?;
        if let Some(p) = &prev {
            delay = delay.max(raw.rounds);
            for &i in &columns {
                if let (Some(a), Some(b)) = (p[i].level(), raw.levels[i].level()) {
                    toggles += u64::from(a.steps().abs_diff(b.steps()));
                }
            }
        }
        let result = c.to_result(&raw);
        for net in &result.floating {
            let detail = if loaded.contains(net.as_str()) {
                "holds charge on a loaded net"
            } else {
                "holds charge"
            };
            warnings.insert(("floating".into(), net.clone()), detail.into());
        }
        for w in result.swing_warnings {
            let slot = swing.entry((w.net, w.polarity)).or_insert(f64::INFINITY);
            *slot = slot.min(w.headroom_volts);
        }
        steps.push(TraceStep {
            inputs: row.clone(),
            levels: columns.iter().map(|&i| raw.levels[i]).collect(),
            settle_rounds: if prev.is_some() { raw.rounds } else { 0 },
            division_count: result.division_events.len(),
        });
        prev = Some(raw.levels);
    }

    let mut distinct: Vec<&Vec<VoltageLevel>> = Vec::new();
    let mut seen = HashMap::new();
    for row in &rows {
        if seen.insert(row, ()).is_none() {
            distinct.push(row);
        }
    }
    let divisions: Vec<usize> = distinct
        .par_iter()
        .map(|row| match c.solve(row, None) {
            Ok(raw) => c.division_count(&raw),
            Err(_) => 0,
        })
        .collect();
    let static_div_mean = divisions.iter().sum::<usize>() as f64 / divisions.len() as f64;

    let transitions = rows.len() - 1;
    let activity = if transitions == 0 || columns.is_empty() {
        0.0
    } else {
        toggles as f64 / (transitions * columns.len()) as f64
    };
    let dynamic_power_w = options.frequency_hz.map(|f| {
        PowerBreakdown {
            activity,
            load_farads: n.loads.iter().map(|l| l.farads).sum(),
            frequency_hz: f,
            supply_volts: n.vdd,
            static_amps: 0.0,
        }
        .dynamic_watts()
    });

    let mut warning_list: Vec<Warning> = warnings
        .into_iter()
        .map(|((kind, net), detail)| Warning { kind, net, detail })
        .collect();
    warning_list.extend(swing.into_iter().map(|((net, pol), h)| Warning {
        kind: "swing".into(),
        net,
        detail: format!("only {pol}-type paths, headroom {h:.3} V"),
    }));
    warning_list.sort();

    let report = MetricsReport {
        delay_rounds: delay,
        static_div_mean,
        activity,
        device_total: n.devices.len(),
        warnings: warning_list,
        dynamic_power_w,
    };
    let trace = Trace {
        nets: columns.iter().map(|&i| c.names[i].clone()).collect(),
        steps,
    };
    Ok((trace, report))
}

impl From<SwingWarning> for Warning {
    fn from(w: SwingWarning) -> Self {
        Warning {
            kind: "swing".into(),
            detail: format!("only {}-type paths, headroom {:.3} V", w.polarity, w.headroom_volts),
            net: w.net,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlib::{declared_domains, gen_pattern, PatternKind};
    use crate::netlist::{parse, Load};

    const INVERTER: &str = ".input a binary\n.output y enc=binary\nM M1 p mvt G=a S=VDD D=y\nM M2 n mvt G=a S=y D=GND\n";

    #[test]
    fn inverter_truth() {
        let n = parse(INVERTER).unwrap();
        let t = truth_table(&n, &InputDomain::declared(&n)).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].outputs, vec![VoltageLevel::Vdd]);
        assert_eq!(t.rows[1].outputs, vec![VoltageLevel::Gnd]);
        assert_eq!(t.to_csv(), "a,y\n0,2\n2,0\n");
    }

    #[test]
    fn pass_transistor_off_is_an_error_point() {
        let n = parse(".input a binary\n.output y\nM M1 n lvt G=a S=VDD D=y\n").unwrap();
        let err = truth_table(&n, &InputDomain::declared(&n)).unwrap_err();
        assert_eq!(err.point, vec![("a".to_string(), VoltageLevel::Gnd)]);
        assert!(matches!(err.source, SolveError::Unresolvable { .. }));
    }

    #[test]
    fn constant_pattern_has_zero_delay() {
        let n = parse(INVERTER).unwrap();
        let p = Pattern::parse(".signals a\n2\n2\n").unwrap();
        let (trace, report) = simulate_pattern(&n, &p, &SimOptions::default()).unwrap();
        assert_eq!(report.delay_rounds, 0);
        assert_eq!(trace.steps[1].settle_rounds, 0);
        assert_eq!(trace.to_csv(), "step,a,y\n0,2,0\n1,2,0\n");
    }

    #[test]
    fn toggling_inverter_activity() {
        let n = parse(INVERTER).unwrap();
        let p = gen_pattern(&declared_domains(&n), PatternKind::CompleteTransitions);
        let (_, report) = simulate_pattern(&n, &p, &SimOptions::default()).unwrap();
        // both nets swing two steps on each of the two transitions
        assert_eq!(report.activity, 2.0);
        assert_eq!(report.delay_rounds, 1);
        assert_eq!(report.static_div_mean, 0.0);
    }

    #[test]
    fn static_proxy_ignores_loads_and_frequency() {
        let base = parse(".input a ternary\n.output y\nM M1 n lvt G=VDD S=VDD D=y\nM M2 p lvt G=GND S=y D=GND\nM M3 n hvt G=a S=y D=GND\n").unwrap();
        let p = gen_pattern(&declared_domains(&base), PatternKind::CompleteTransitions);
        let (_, r0) = simulate_pattern(&base, &p, &SimOptions::default()).unwrap();
        let mut loaded = base.clone();
        loaded.loads.push(Load {
            id: "C1".into(),
            net: "y".into(),
            farads: 2e-15,
        });
        let (_, r1) = simulate_pattern(&loaded, &p, &SimOptions { frequency_hz: Some(1e9) }).unwrap();
        assert_eq!(r0.static_div_mean, r1.static_div_mean);
        assert!(r0.static_div_mean > 0.0);
        assert!(r1.dynamic_power_w.unwrap() > 0.0);
    }
}
