//! Discrete steady-state switch-level solver.
//!
//! Every device is an ideal switch whose state depends only on its gate level
//! and threshold class. Each round the solver recomputes conduction from the
//! current gate estimates, groups nets into conducting components and gives
//! every net the level of the sources its component reaches: a single source
//! level passes through, two distinct source levels (typically both rails)
//! resolve to ½VDD and are reported as a voltage-division event, and no source
//! at all leaves the net floating.

mod lint;
mod sweep;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{is_rail, Netlist, Polarity, ThresholdClass, GND_RAIL, VDD_RAIL};
use crate::trit::{VoltageLevel, DEFAULT_VDD};

pub use lint::{full_swing_lint, SwingWarning};
pub use sweep::{
    simulate_pattern, sweep, sweep_states, truth_table, InputDomain, MetricsReport, PointOutcome, SimOptions,
    SimulateError, Trace, TraceStep, TruthError, TruthRow, TruthTable, Warning,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeState {
    Gnd,
    Half,
    Vdd,
    /// Not yet resolved; only seen mid-iteration.
    X,
    /// Floating with no stored level.
    Z,
}

impl NodeState {
    pub fn level(self) -> Option<VoltageLevel> {
        match self {
            NodeState::Gnd => Some(VoltageLevel::Gnd),
            NodeState::Half => Some(VoltageLevel::Half),
            NodeState::Vdd => Some(VoltageLevel::Vdd),
            NodeState::X | NodeState::Z => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            NodeState::Gnd => '0',
            NodeState::Half => '1',
            NodeState::Vdd => '2',
            NodeState::X => 'X',
            NodeState::Z => 'Z',
        }
    }
}

impl From<VoltageLevel> for NodeState {
    fn from(l: VoltageLevel) -> Self {
        match l {
            VoltageLevel::Gnd => NodeState::Gnd,
            VoltageLevel::Half => NodeState::Half,
            VoltageLevel::Vdd => NodeState::Vdd,
        }
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level() {
            Some(l) => write!(f, "{l}"),
            None => write!(f, "{}", self.symbol()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conduction {
    On,
    Off,
}

/// Conduction at the default 0.9 V supply.
pub fn conduction(polarity: Polarity, vt: ThresholdClass, gate: VoltageLevel) -> Conduction {
    conduction_at(polarity, vt, gate, DEFAULT_VDD)
}

/// N devices conduct when `V_gate ≥ vt`; P devices when `VDD − V_gate ≥ vt`.
/// Both are referenced to the rail the device would pull towards.
pub fn conduction_at(polarity: Polarity, vt: ThresholdClass, gate: VoltageLevel, vdd: f64) -> Conduction {
    let g = gate.volts(vdd);
    let overdrive = match polarity {
        Polarity::N => g,
        Polarity::P => vdd - g,
    };
    if overdrive >= vt.vt_volts() {
        Conduction::On
    } else {
        Conduction::Off
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no fixed point within {rounds} rounds")]
    Oscillation { rounds: usize },
    #[error("output {net} is not driven")]
    Unresolvable { net: String },
    #[error("input {net} has no assigned level")]
    MissingInput { net: String },
    #[error("{net} is not a declared input")]
    UnknownInput { net: String },
    #[error("level {level} is outside the declared domain of input {net}")]
    OutsideDomain { net: String, level: VoltageLevel },
}

/// Steady state of a netlist for one input assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub levels: BTreeMap<String, NodeState>,
    pub division_events: BTreeSet<String>,
    pub floating: BTreeSet<String>,
    pub settle_rounds: usize,
    pub swing_warnings: Vec<SwingWarning>,
}

impl SolveResult {
    pub fn level(&self, net: &str) -> Option<NodeState> {
        self.levels.get(net).copied()
    }
}

const GND_BIT: u8 = 1;
const HALF_BIT: u8 = 2;
const VDD_BIT: u8 = 4;

fn level_bit(level: NodeState) -> u8 {
    match level {
        NodeState::Gnd => GND_BIT,
        NodeState::Half => HALF_BIT,
        NodeState::Vdd => VDD_BIT,
        NodeState::X | NodeState::Z => 0,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CompiledDevice {
    pub gate: usize,
    pub a: usize,
    pub b: usize,
    pub polarity: Polarity,
    pub vt: ThresholdClass,
}

/// Index-based form of a netlist; nets are numbered in name order.
#[derive(Debug, Clone)]
pub(crate) struct Circuit {
    pub names: Vec<String>,
    pub index: HashMap<String, usize>,
    pub vdd: f64,
    pub gnd: usize,
    pub vdd_net: usize,
    /// Per input declaration: net index and allowed levels.
    pub inputs: Vec<(usize, Vec<VoltageLevel>)>,
    pub outputs: Vec<usize>,
    pub is_source: Vec<bool>,
    pub devices: Vec<CompiledDevice>,
    /// `on[polarity][class][level steps]`
    on: [[[bool; 3]; 4]; 2],
}

/// Raw solver output in circuit index space.
#[derive(Debug, Clone)]
pub(crate) struct RawSolve {
    pub levels: Vec<NodeState>,
    /// Source bits reached by each net's component at the fixed point.
    pub masks: Vec<u8>,
    pub rounds: usize,
}

impl RawSolve {
    /// The net's conducting component reaches two distinct source levels.
    pub fn divides(&self, net: usize) -> bool {
        self.masks[net].count_ones() >= 2
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n);
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn polarity_index(p: Polarity) -> usize {
    match p {
        Polarity::N => 0,
        Polarity::P => 1,
    }
}

fn class_index(c: ThresholdClass) -> usize {
    match c {
        ThresholdClass::Hvt => 0,
        ThresholdClass::Mvt => 1,
        ThresholdClass::Lvt => 2,
        ThresholdClass::Ulvt => 3,
    }
}

impl Circuit {
    pub fn compile(n: &Netlist) -> Circuit {
        let mut names: BTreeSet<String> = n.nets.iter().cloned().collect();
        names.insert(VDD_RAIL.to_string());
        names.insert(GND_RAIL.to_string());
        for d in &n.devices {
            names.insert(d.gate.clone());
            names.insert(d.source.clone());
            names.insert(d.drain.clone());
        }
        let names: Vec<String> = names.into_iter().collect();
        let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut is_source = vec![false; names.len()];
        let gnd = index[GND_RAIL];
        let vdd_net = index[VDD_RAIL];
        is_source[gnd] = true;
        is_source[vdd_net] = true;
        let inputs: Vec<(usize, Vec<VoltageLevel>)> = n
            .inputs
            .iter()
            .map(|i| {
                let idx = index[&i.net];
                is_source[idx] = true;
                (idx, i.domain.levels().to_vec())
            })
            .collect();
        let outputs = n.outputs.iter().map(|o| index[&o.net]).collect();
        let devices = n
            .devices
            .iter()
            .map(|d| CompiledDevice {
                gate: index[&d.gate],
                a: index[&d.source],
                b: index[&d.drain],
                polarity: d.polarity,
                vt: d.vt,
            })
            .collect();
        let mut on = [[[false; 3]; 4]; 2];
        for p in [Polarity::N, Polarity::P] {
            for c in ThresholdClass::ALL {
                for l in VoltageLevel::ALL {
                    on[polarity_index(p)][class_index(c)][l.steps() as usize] =
                        conduction_at(p, c, l, n.vdd) == Conduction::On;
                }
            }
        }
        Circuit {
            names,
            index,
            vdd: n.vdd,
            gnd,
            vdd_net,
            inputs,
            outputs,
            is_source,
            devices,
            on,
        }
    }

    pub fn conducts(&self, d: &CompiledDevice, gate: NodeState) -> bool {
        match gate.level() {
            Some(l) => self.on[polarity_index(d.polarity)][class_index(d.vt)][l.steps() as usize],
            None => false,
        }
    }

    pub fn round_limit(&self) -> usize {
        (4 * self.names.len()).max(8)
    }

    /// Assigns input levels (in declaration order) and iterates to a fixed point.
    pub fn solve(&self, input_levels: &[VoltageLevel], prev: Option<&[NodeState]>) -> Result<RawSolve, SolveError> {
        let n = self.names.len();
        let mut levels: Vec<NodeState> = match prev {
            Some(p) => p.to_vec(),
            None => vec![NodeState::X; n],
        };
        levels[self.gnd] = NodeState::Gnd;
        levels[self.vdd_net] = NodeState::Vdd;
        for ((idx, _), level) in self.inputs.iter().zip(input_levels) {
            levels[*idx] = (*level).into();
        }
        let hold = prev.is_some();
        let mut uf = UnionFind { parent: Vec::with_capacity(n) };
        let mut masks = vec![0u8; n];
        let mut next = levels.clone();
        let limit = self.round_limit();
        let mut rounds = 0;
        for _ in 0..limit {
            uf.reset(n);
            for d in &self.devices {
                if !self.is_source[d.a] && !self.is_source[d.b] && self.conducts(d, levels[d.gate]) {
                    uf.union(d.a, d.b);
                }
            }
            masks.iter_mut().for_each(|m| *m = 0);
            for d in &self.devices {
                let (sa, sb) = (self.is_source[d.a], self.is_source[d.b]);
                if sa == sb || !self.conducts(d, levels[d.gate]) {
                    continue;
                }
                let (src, net) = if sa { (d.a, d.b) } else { (d.b, d.a) };
                let root = uf.find(net);
                masks[root] |= level_bit(levels[src]);
            }
            let mut changed = false;
            for i in 0..n {
                if self.is_source[i] {
                    continue;
                }
                let root = uf.find(i);
                let m = masks[root];
                let new = match m {
                    0 => match levels[i] {
                        held @ (NodeState::Gnd | NodeState::Half | NodeState::Vdd) if hold => held,
                        _ => NodeState::Z,
                    },
                    GND_BIT => NodeState::Gnd,
                    HALF_BIT => NodeState::Half,
                    VDD_BIT => NodeState::Vdd,
                    _ => NodeState::Half,
                };
                next[i] = new;
                changed |= new != levels[i];
            }
            if !changed {
                // expand component masks to every member for reporting
                let mut per_net = vec![0u8; n];
                for (i, slot) in per_net.iter_mut().enumerate() {
                    if !self.is_source[i] {
                        *slot = masks[uf.find(i)];
                    }
                }
                return Ok(RawSolve {
                    levels,
                    masks: per_net,
                    rounds,
                });
            }
            std::mem::swap(&mut levels, &mut next);
            rounds += 1;
        }
        Err(SolveError::Oscillation { rounds: limit })
    }

    pub fn division_count(&self, raw: &RawSolve) -> usize {
        (0..self.names.len()).filter(|&i| !self.is_source[i] && raw.divides(i)).count()
    }

    pub fn check_outputs(&self, raw: &RawSolve) -> Result<(), SolveError> {
        for &o in &self.outputs {
            if raw.levels[o].level().is_none() {
                return Err(SolveError::Unresolvable {
                    net: self.names[o].clone(),
                });
            }
        }
        Ok(())
    }

    /// Orders a name-keyed input map into declaration order, checking domains.
    pub fn input_vector(&self, inputs: &BTreeMap<String, VoltageLevel>) -> Result<Vec<VoltageLevel>, SolveError> {
        for net in inputs.keys() {
            let known = self.index.get(net).map(|&i| self.inputs.iter().any(|(j, _)| *j == i));
            if known != Some(true) {
                return Err(SolveError::UnknownInput { net: net.clone() });
            }
        }
        self.inputs
            .iter()
            .map(|(idx, domain)| {
                let net = &self.names[*idx];
                let level = *inputs.get(net).ok_or_else(|| SolveError::MissingInput { net: net.clone() })?;
                if !domain.contains(&level) {
                    return Err(SolveError::OutsideDomain {
                        net: net.clone(),
                        level,
                    });
                }
                Ok(level)
            })
            .collect()
    }

    pub fn prev_vector(&self, prev: &SolveResult) -> Vec<NodeState> {
        self.names
            .iter()
            .map(|name| prev.levels.get(name).copied().unwrap_or(NodeState::X))
            .collect()
    }

    pub fn to_result(&self, raw: &RawSolve) -> SolveResult {
        let mut levels = BTreeMap::new();
        let mut division_events = BTreeSet::new();
        let mut floating = BTreeSet::new();
        for (i, name) in self.names.iter().enumerate() {
            if is_rail(name) {
                continue;
            }
            levels.insert(name.clone(), raw.levels[i]);
            if self.is_source[i] {
                continue;
            }
            if raw.divides(i) {
                division_events.insert(name.clone());
            }
            if raw.masks[i] == 0 {
                floating.insert(name.clone());
            }
        }
        SolveResult {
            levels,
            division_events,
            floating,
            settle_rounds: raw.rounds,
            swing_warnings: lint::swing_warnings(self, raw),
        }
    }
}

/// Solves one input assignment. With `prev`, iteration starts from the previous
/// state and isolated nets keep their stored level; without it they float and
/// a floating output is an error.
pub fn solve_state(
    n: &Netlist,
    inputs: &BTreeMap<String, VoltageLevel>,
    prev: Option<&SolveResult>,
) -> Result<SolveResult, SolveError> {
    let circuit = Circuit::compile(n);
    let vector = circuit.input_vector(inputs)?;
    let prev_vec = prev.map(|p| circuit.prev_vector(p));
    let raw = circuit.solve(&vector, prev_vec.as_deref())?;
    if prev.is_none() {
        circuit.check_outputs(&raw)?;
    }
    Ok(circuit.to_result(&raw))
}
