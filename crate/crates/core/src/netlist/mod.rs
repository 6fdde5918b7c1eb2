//! Flat transistor-level netlist IR shared by the solver, the passes and the
//! generators.

mod parse;
mod serialize;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trit::{SignalEncoding, DEFAULT_VDD};

pub use parse::{parse, parse_with, ParseOptions};
pub use serialize::serialize;

pub const VDD_RAIL: &str = "VDD";
pub const GND_RAIL: &str = "GND";

/// Tag marking the two always-on devices of a voltage divider.
pub const TAG_DIVIDER: &str = "divider";
/// Tag marking devices of a carry generator.
pub const TAG_CARRY_GEN: &str = "carry-gen";

/// Format identifier written at the top of serialized netlists.
pub const FORMAT_VERSION: &str = "tritforge-net v1";

pub fn is_rail(net: &str) -> bool {
    net == VDD_RAIL || net == GND_RAIL
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    N,
    P,
}

impl Polarity {
    pub fn keyword(self) -> &'static str {
        match self {
            Polarity::N => "n",
            Polarity::P => "p",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Threshold class of a CNFET, fixed by the chirality of its zigzag tubes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThresholdClass {
    Hvt,
    Mvt,
    Lvt,
    Ulvt,
}

/// Nanometres of tube diameter per unit of zigzag chirality index.
const DIAMETER_PER_INDEX_NM: f64 = 0.0783;
/// Threshold constant in volt-nanometres: `vt = K / d`.
const VT_DIAMETER_PRODUCT: f64 = 0.43;

impl ThresholdClass {
    pub const ALL: [ThresholdClass; 4] = [
        ThresholdClass::Hvt,
        ThresholdClass::Mvt,
        ThresholdClass::Lvt,
        ThresholdClass::Ulvt,
    ];

    pub fn chirality(self) -> (u32, u32) {
        match self {
            ThresholdClass::Hvt => (10, 0),
            ThresholdClass::Mvt => (14, 0),
            ThresholdClass::Lvt => (19, 0),
            ThresholdClass::Ulvt => (25, 0),
        }
    }

    pub fn diameter_nm(self) -> f64 {
        DIAMETER_PER_INDEX_NM * self.chirality().0 as f64
    }

    pub fn vt_volts(self) -> f64 {
        VT_DIAMETER_PRODUCT / self.diameter_nm()
    }

    pub fn keyword(self) -> &'static str {
        match self {
            ThresholdClass::Hvt => "hvt",
            ThresholdClass::Mvt => "mvt",
            ThresholdClass::Lvt => "lvt",
            ThresholdClass::Ulvt => "ulvt",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        ThresholdClass::ALL
            .into_iter()
            .find(|c| c.keyword().eq_ignore_ascii_case(word))
    }
}

impl fmt::Display for ThresholdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Device {
    pub id: String,
    pub polarity: Polarity,
    pub vt: ThresholdClass,
    pub gate: String,
    pub source: String,
    pub drain: String,
    pub tags: BTreeSet<String>,
}

impl Device {
    pub fn new(
        id: impl Into<String>,
        polarity: Polarity,
        vt: ThresholdClass,
        gate: impl Into<String>,
        source: impl Into<String>,
        drain: impl Into<String>,
    ) -> Self {
        Device {
            id: id.into(),
            polarity,
            vt,
            gate: gate.into(),
            source: source.into(),
            drain: drain.into(),
            tags: BTreeSet::new(),
        }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tags.insert(tag.into());
        self
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    pub fn is_degenerate(&self) -> bool {
        self.source == self.drain
    }

    /// The channel terminal opposite `net`, if `net` is a channel terminal.
    pub fn other_terminal(&self, net: &str) -> Option<&str> {
        if self.source == net {
            Some(&self.drain)
        } else if self.drain == net {
            Some(&self.source)
        } else {
            None
        }
    }

    pub fn touches(&self, net: &str) -> bool {
        self.gate == net || self.source == net || self.drain == net
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDecl {
    pub net: String,
    pub domain: SignalEncoding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDecl {
    pub net: String,
    pub encoding: SignalEncoding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Load {
    pub id: String,
    pub net: String,
    pub farads: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub title: String,
    pub vdd: f64,
    pub inputs: Vec<InputDecl>,
    pub outputs: Vec<OutputDecl>,
    /// Every non-rail net, including inputs and outputs.
    pub nets: BTreeSet<String>,
    pub devices: Vec<Device>,
    pub loads: Vec<Load>,
}

impl Default for Netlist {
    fn default() -> Self {
        Netlist::new("")
    }
}

impl Netlist {
    pub fn new(title: impl Into<String>) -> Self {
        Netlist {
            title: title.into(),
            vdd: DEFAULT_VDD,
            inputs: Vec::new(),
            outputs: Vec::new(),
            nets: BTreeSet::new(),
            devices: Vec::new(),
            loads: Vec::new(),
        }
    }

    pub fn add_net(&mut self, net: &str) {
        if !is_rail(net) {
            self.nets.insert(net.to_string());
        }
    }

    pub fn add_input(&mut self, net: &str, domain: SignalEncoding) {
        self.add_net(net);
        self.inputs.push(InputDecl {
            net: net.to_string(),
            domain,
        });
    }

    pub fn add_output(&mut self, net: &str, encoding: SignalEncoding) {
        self.add_net(net);
        self.outputs.push(OutputDecl {
            net: net.to_string(),
            encoding,
        });
    }

    /// Adds a device and implicitly declares its nets.
    pub fn add_device(&mut self, device: Device) {
        for net in [&device.gate, &device.source, &device.drain] {
            if !is_rail(net) {
                self.nets.insert(net.clone());
            }
        }
        self.devices.push(device);
    }

    pub fn is_input(&self, net: &str) -> bool {
        self.inputs.iter().any(|i| i.net == net)
    }

    pub fn is_output(&self, net: &str) -> bool {
        self.outputs.iter().any(|o| o.net == net)
    }

    /// Rails, inputs and outputs: nets visible at the interface.
    pub fn is_external(&self, net: &str) -> bool {
        is_rail(net) || self.is_input(net) || self.is_output(net)
    }

    pub fn input_domain(&self, net: &str) -> Option<SignalEncoding> {
        self.inputs.iter().find(|i| i.net == net).map(|i| i.domain)
    }

    pub fn output_encoding(&self, net: &str) -> Option<SignalEncoding> {
        self.outputs.iter().find(|o| o.net == net).map(|o| o.encoding)
    }

    pub fn device(&self, id: &str) -> Option<&Device> {
        self.devices.iter().find(|d| d.id == id)
    }

    /// Devices sorted by id and loads sorted by id; nets recomputed from usage
    /// plus interface declarations are left untouched.
    pub fn canonicalize(&mut self) {
        self.devices.sort_by(|a, b| a.id.cmp(&b.id));
        self.loads.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn canonical(&self) -> Netlist {
        let mut n = self.clone();
        n.canonicalize();
        n
    }

    /// Equality up to device and load ordering.
    pub fn structurally_eq(&self, other: &Netlist) -> bool {
        self.canonical() == other.canonical()
    }

    /// Drops internal nets no device, load or declaration refers to.
    /// Returns how many were removed.
    pub fn drop_unused_nets(&mut self) -> usize {
        let mut used: BTreeSet<&str> = BTreeSet::new();
        for d in &self.devices {
            used.extend([d.gate.as_str(), d.source.as_str(), d.drain.as_str()]);
        }
        for l in &self.loads {
            used.insert(&l.net);
        }
        for i in &self.inputs {
            used.insert(&i.net);
        }
        for o in &self.outputs {
            used.insert(&o.net);
        }
        let keep: BTreeSet<String> = self
            .nets
            .iter()
            .filter(|n| used.contains(n.as_str()))
            .cloned()
            .collect();
        let removed = self.nets.len() - keep.len();
        self.nets = keep;
        removed
    }

    /// Returns an id not yet used by any device or load, built from `prefix`.
    pub fn fresh_device_id(&self, prefix: &str) -> String {
        let taken: BTreeSet<&str> = self
            .devices
            .iter()
            .map(|d| d.id.as_str())
            .chain(self.loads.iter().map(|l| l.id.as_str()))
            .collect();
        (0..)
            .map(|i| format!("{prefix}{i}"))
            .find(|id| !taken.contains(id.as_str()))
            .expect("unbounded id space")
    }

    pub fn device_count(&self) -> DeviceCount {
        let mut by_class = BTreeMap::new();
        for d in &self.devices {
            *by_class.entry(format!("{}-{}", d.polarity, d.vt)).or_insert(0) += 1;
        }
        DeviceCount {
            by_class,
            total: self.devices.len(),
        }
    }

    /// Structural checks; an empty list means the netlist is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut refs: HashMap<&str, usize> = HashMap::new();
        let mut channel: HashMap<&str, usize> = HashMap::new();
        for d in &self.devices {
            for net in [&d.gate, &d.source, &d.drain] {
                *refs.entry(net).or_default() += 1;
            }
            *channel.entry(&d.source).or_default() += 1;
            *channel.entry(&d.drain).or_default() += 1;

            if d.is_degenerate() {
                diags.push(Diagnostic::new(
                    DiagnosticKind::DegenerateDevice,
                    &d.id,
                    format!("degenerate device {}: source and drain are both {}", d.id, d.source),
                ));
            }
            if is_rail(&d.gate) && is_rail(&d.source) && is_rail(&d.drain) {
                diags.push(Diagnostic::new(
                    DiagnosticKind::RailOnlyDevice,
                    &d.id,
                    format!("device {} has all three terminals on rails", d.id),
                ));
            }
            for net in [&d.gate, &d.source, &d.drain] {
                if !is_rail(net) && !self.nets.contains(net.as_str()) {
                    diags.push(Diagnostic::new(
                        DiagnosticKind::UndeclaredNet,
                        net,
                        format!("device {} references undeclared net {}", d.id, net),
                    ));
                }
            }
        }
        for l in &self.loads {
            *refs.entry(&l.net).or_default() += 1;
        }
        for i in &self.inputs {
            if is_rail(&i.net) {
                diags.push(Diagnostic::new(
                    DiagnosticKind::RailDeclared,
                    &i.net,
                    format!("rail {} declared as an input", i.net),
                ));
            }
            if i.domain.levels().is_empty() {
                diags.push(Diagnostic::new(
                    DiagnosticKind::EmptyDomain,
                    &i.net,
                    format!("input {} has an empty domain", i.net),
                ));
            }
        }
        for o in &self.outputs {
            if is_rail(&o.net) {
                diags.push(Diagnostic::new(
                    DiagnosticKind::RailDeclared,
                    &o.net,
                    format!("rail {} declared as an output", o.net),
                ));
            }
            if self.is_input(&o.net) {
                diags.push(Diagnostic::new(
                    DiagnosticKind::OutputIsInput,
                    &o.net,
                    format!("output {} is also an input", o.net),
                ));
            } else if channel.get(o.net.as_str()).copied().unwrap_or(0) == 0 {
                diags.push(Diagnostic::new(
                    DiagnosticKind::UndrivenOutput,
                    &o.net,
                    format!("undriven output {}", o.net),
                ));
            }
        }
        for net in &self.nets {
            if self.is_external(net) {
                continue;
            }
            let r = refs.get(net.as_str()).copied().unwrap_or(0);
            if r <= 1 {
                diags.push(Diagnostic::new(
                    DiagnosticKind::DanglingNet,
                    net,
                    format!("dangling net {net}: referenced by {r} terminal(s)"),
                ));
            } else if channel.get(net.as_str()).copied().unwrap_or(0) == 0 {
                diags.push(Diagnostic::new(
                    DiagnosticKind::UndrivenNet,
                    net,
                    format!("undriven net {net}: only used as a gate"),
                ));
            }
        }
        diags
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    DanglingNet,
    UndrivenNet,
    UndrivenOutput,
    OutputIsInput,
    DegenerateDevice,
    RailOnlyDevice,
    RailDeclared,
    UndeclaredNet,
    EmptyDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Net or device the diagnostic is about.
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, subject: &str, message: String) -> Self {
        Diagnostic {
            kind,
            subject: subject.to_string(),
            message,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Device totals, broken down as `"<polarity>-<class>"` (e.g. `"p-lvt"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceCount {
    pub by_class: BTreeMap<String, usize>,
    pub total: usize,
}

impl DeviceCount {
    pub fn of(&self, polarity: Polarity, vt: ThresholdClass) -> usize {
        self.by_class
            .get(&format!("{polarity}-{vt}"))
            .copied()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Tube diameter from the chiral vector `(n, m)` with graphene lattice
    /// constant 0.246 nm.
    fn diameter_oracle(n: u32, m: u32) -> f64 {
        let (n, m) = (n as f64, m as f64);
        0.246 * (n * n + n * m + m * m).sqrt() / PI
    }

    #[test]
    fn threshold_values_follow_chirality() {
        let expected = [0.549, 0.392, 0.289, 0.220];
        for (class, want) in ThresholdClass::ALL.into_iter().zip(expected) {
            let (n, m) = class.chirality();
            let oracle = 0.43 / diameter_oracle(n, m);
            assert!((class.vt_volts() - oracle).abs() < 1e-3, "{class}");
            assert!((class.vt_volts() - want).abs() < 1e-3, "{class}");
        }
        let vts: Vec<f64> = ThresholdClass::ALL.iter().map(|c| c.vt_volts()).collect();
        assert!(vts.windows(2).all(|w| w[0] > w[1]));
    }

    fn inverter() -> Netlist {
        let mut n = Netlist::new("inv");
        n.add_input("a", SignalEncoding::FullVddHigh);
        n.add_output("y", SignalEncoding::FullVddHigh);
        n.add_device(Device::new("M1", Polarity::P, ThresholdClass::Mvt, "a", VDD_RAIL, "y"));
        n.add_device(Device::new("M2", Polarity::N, ThresholdClass::Mvt, "a", "y", GND_RAIL));
        n
    }

    #[test]
    fn counts() {
        let n = inverter();
        let c = n.device_count();
        assert_eq!(c.total, 2);
        assert_eq!(c.of(Polarity::P, ThresholdClass::Mvt), 1);
        assert_eq!(Netlist::new("empty").device_count().total, 0);
    }

    #[test]
    fn valid_inverter_has_no_diagnostics() {
        assert!(inverter().validate().is_empty());
    }

    #[test]
    fn undriven_output_and_degenerate_device() {
        let mut n = inverter();
        n.add_output("z", SignalEncoding::Standard);
        n.add_device(Device::new("M3", Polarity::N, ThresholdClass::Lvt, "a", "y", "y"));
        let msgs: Vec<String> = n.validate().iter().map(|d| d.to_string()).collect();
        assert!(msgs.iter().any(|m| m.contains("undriven output")), "{msgs:?}");
        assert!(msgs.iter().any(|m| m.contains("degenerate device")), "{msgs:?}");
    }

    #[test]
    fn rail_only_and_output_input_conflicts() {
        let mut n = inverter();
        n.add_device(Device::new("M3", Polarity::N, ThresholdClass::Lvt, VDD_RAIL, VDD_RAIL, GND_RAIL));
        n.add_output("a", SignalEncoding::Standard);
        let kinds: Vec<DiagnosticKind> = n.validate().iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::RailOnlyDevice));
        assert!(kinds.contains(&DiagnosticKind::OutputIsInput));
    }

    #[test]
    fn dangling_net_reported() {
        let mut n = inverter();
        n.add_device(Device::new("M3", Polarity::N, ThresholdClass::Lvt, "a", "y", "stub"));
        let diags = n.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::DanglingNet);
        assert_eq!(diags[0].subject, "stub");
    }
}
