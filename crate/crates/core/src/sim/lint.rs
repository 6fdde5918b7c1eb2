//! Full-swing analysis: a net resolved to VDD only through N devices (or to
//! GND only through P devices) sees a threshold drop in a real circuit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Circuit, NodeState, RawSolve};
use crate::netlist::{Netlist, Polarity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwingWarning {
    pub net: String,
    /// Polarity of the devices that degrade the level.
    pub polarity: Polarity,
    pub headroom_volts: f64,
}

/// Widest-path search from the sources at `rail_level`. A device of the
/// degrading polarity limits the path to its overdrive minus threshold; the
/// other polarity passes the level without loss.
fn widest_paths(c: &Circuit, raw: &RawSolve, rail_level: NodeState, lossy: Polarity) -> Vec<f64> {
    let n = c.names.len();
    let mut width = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        if c.is_source[i] && raw.levels[i] == rail_level {
            width[i] = f64::INFINITY;
        }
    }
    let edges: Vec<(usize, usize, f64)> = c
        .devices
        .iter()
        .filter(|d| c.conducts(d, raw.levels[d.gate]))
        .map(|d| {
            let cap = if d.polarity == lossy {
                let g = raw.levels[d.gate].level().map_or(0.0, |l| l.volts(c.vdd));
                let overdrive = match lossy {
                    Polarity::N => g,
                    Polarity::P => c.vdd - g,
                };
                overdrive - d.vt.vt_volts()
            } else {
                f64::INFINITY
            };
            (d.a, d.b, cap)
        })
        .collect();
    let passable = |i: usize| !c.is_source[i] && raw.levels[i] == rail_level;
    loop {
        let mut changed = false;
        for &(a, b, cap) in &edges {
            for (from, to) in [(a, b), (b, a)] {
                if !passable(to) || width[from] == f64::NEG_INFINITY {
                    continue;
                }
                let w = width[from].min(cap);
                if w > width[to] {
                    width[to] = w;
                    changed = true;
                }
            }
        }
        if !changed {
            return width;
        }
    }
}

pub(crate) fn swing_warnings(c: &Circuit, raw: &RawSolve) -> Vec<SwingWarning> {
    let mut out = Vec::new();
    for (level, lossy) in [(NodeState::Vdd, Polarity::N), (NodeState::Gnd, Polarity::P)] {
        let width = widest_paths(c, raw, level, lossy);
        for (i, w) in width.iter().enumerate() {
            if !c.is_source[i] && w.is_finite() {
                out.push(SwingWarning {
                    net: c.names[i].clone(),
                    polarity: lossy,
                    headroom_volts: *w,
                });
            }
        }
    }
    out.sort_by(|a, b| a.net.cmp(&b.net).then(a.polarity.cmp(&b.polarity)));
    out
}

/// Solves every point of the declared input domain and keeps, per net and
/// polarity, the smallest headroom seen. States that fail to solve are skipped.
pub fn full_swing_lint(n: &Netlist) -> Vec<SwingWarning> {
    let c = Circuit::compile(n);
    let domain = super::InputDomain::declared(n);
    let mut worst: BTreeMap<(String, Polarity), f64> = BTreeMap::new();
    for point in domain.points() {
        let Ok(raw) = c.solve(&point, None) else { continue };
        for w in swing_warnings(&c, &raw) {
            let slot = worst.entry((w.net, w.polarity)).or_insert(f64::INFINITY);
            *slot = slot.min(w.headroom_volts);
        }
    }
    worst
        .into_iter()
        .map(|((net, polarity), headroom_volts)| SwingWarning {
            net,
            polarity,
            headroom_volts,
        })
        .collect()
}
