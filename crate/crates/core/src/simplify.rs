//! Assumption-driven netlist simplification.
//!
//! Restricting an input to fewer levels fixes the conduction of some of the
//! devices it gates: a device on at every remaining level becomes a wire, one
//! off at every level is removed, and under a binary restriction the rest can
//! take the low threshold class. The same classification applies to devices
//! gated by a complement of the input, when that complement comes from a
//! stage driven only by the input and the rails.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{is_rail, Device, Netlist, Polarity, ThresholdClass, GND_RAIL, TAG_CARRY_GEN, TAG_DIVIDER, VDD_RAIL};
use crate::sim::{conduction_at, sweep, sweep_states, Circuit, Conduction, InputDomain, NodeState};
use crate::trit::{decode, SignalEncoding, Trit, VoltageLevel};

/// Restricts one input to the levels of an encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionDomain {
    pub net: String,
    pub domain: SignalEncoding,
}

impl AssumptionDomain {
    pub fn new(net: &str, domain: SignalEncoding) -> AssumptionDomain {
        AssumptionDomain {
            net: net.to_string(),
            domain,
        }
    }

    pub fn levels(&self) -> &'static [VoltageLevel] {
        self.domain.levels()
    }

    /// Parses `net=ternary|binary|halfpair`.
    pub fn parse(text: &str) -> Option<AssumptionDomain> {
        let (net, enc) = text.split_once('=')?;
        let net = net.trim();
        if net.is_empty() {
            return None;
        }
        Some(AssumptionDomain::new(net, SignalEncoding::from_keyword(enc.trim())?))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassReport {
    pub wired: usize,
    pub opened: usize,
    pub remapped: usize,
    pub pruned: usize,
    pub factored: usize,
}

impl PassReport {
    fn absorb(&mut self, other: PassReport) {
        self.wired += other.wired;
        self.opened += other.opened;
        self.remapped += other.remapped;
        self.pruned += other.pruned;
        self.factored += other.factored;
    }

    pub fn is_empty(&self) -> bool {
        *self == PassReport::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplifyError {
    #[error("unknown net {0}")]
    UnknownNet(String),
    #[error("{0} is not a declared input")]
    NonInputAssumption(String),
    #[error("assumed domain {assumed} of {net} is not contained in its declared domain {declared}")]
    WidensDomain {
        net: String,
        declared: SignalEncoding,
        assumed: SignalEncoding,
    },
    #[error("no divider devices found in the region of {0}")]
    NoDividerFound(String),
    #[error("equivalence check failed: {0}")]
    EquivalenceCheckFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    Wire,
    Open,
    Remap,
    Keep,
}

fn gate_conducts(polarity: Polarity, vt: ThresholdClass, gate: NodeState, vdd: f64) -> bool {
    gate.level()
        .is_some_and(|l| conduction_at(polarity, vt, l, vdd) == Conduction::On)
}

/// Nets connected through device channels, never through rails or inputs.
fn channel_groups(n: &Netlist) -> HashMap<String, usize> {
    let mut group: HashMap<String, usize> = HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let connector = |net: &str| !is_rail(net) && !n.is_input(net);
    for net in &n.nets {
        if connector(net) {
            group.insert(net.clone(), parent.len());
            parent.push(parent.len());
        }
    }
    for d in &n.devices {
        if let (Some(&a), Some(&b)) = (group.get(&d.source), group.get(&d.drain)) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    group.iter().map(|(k, &v)| (k.clone(), find(&mut parent, v))).collect()
}

/// Nets whose level is a function of `input` alone, with their level at
/// each point of `levels`.
fn complements(n: &Netlist, input: &str, levels: &[VoltageLevel]) -> BTreeMap<String, Vec<NodeState>> {
    let groups = channel_groups(n);
    let mut members: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (net, g) in &groups {
        members.entry(*g).or_default().push(net.clone());
    }
    let mut out = BTreeMap::new();
    for nets in members.values() {
        let set: BTreeSet<&str> = nets.iter().map(String::as_str).collect();
        let devices: Vec<&Device> = n
            .devices
            .iter()
            .filter(|d| set.contains(d.source.as_str()) || set.contains(d.drain.as_str()))
            .collect();
        let driven_by_input = devices.iter().any(|d| d.gate == input);
        let closed = devices.iter().all(|d| {
            (d.gate == input || is_rail(&d.gate))
                && [&d.source, &d.drain]
                    .iter()
                    .all(|t| set.contains(t.as_str()) || is_rail(t))
        });
        if !driven_by_input || !closed {
            continue;
        }
        let mut stage = Netlist::new("stage");
        stage.vdd = n.vdd;
        stage.add_input(input, SignalEncoding::Standard);
        for d in &devices {
            stage.add_device((*d).clone());
        }
        let c = Circuit::compile(&stage);
        let mut per_level: BTreeMap<String, Vec<NodeState>> = BTreeMap::new();
        let mut ok = true;
        for &l in levels {
            match c.solve(&[l], None) {
                Ok(raw) => {
                    for net in nets {
                        per_level.entry(net.clone()).or_default().push(raw.levels[c.index[net]]);
                    }
                }
                Err(_) => ok = false,
            }
        }
        if ok {
            out.extend(per_level);
        }
    }
    out
}

fn classify(d: &Device, gate_levels: &[NodeState], binary: bool, vdd: f64) -> Fate {
    let on: Vec<bool> = gate_levels
        .iter()
        .map(|&g| gate_conducts(d.polarity, d.vt, g, vdd))
        .collect();
    if on.iter().all(|&b| b) {
        Fate::Wire
    } else if !on.iter().any(|&b| b) {
        Fate::Open
    } else if binary && d.vt != ThresholdClass::Lvt {
        let same = gate_levels
            .iter()
            .zip(&on)
            .all(|(&g, &b)| gate_conducts(d.polarity, ThresholdClass::Lvt, g, vdd) == b);
        if same {
            Fate::Remap
        } else {
            Fate::Keep
        }
    } else {
        Fate::Keep
    }
}

/// Renames nets in place after a merge of `from` into `into`.
fn rename(n: &mut Netlist, from: &str, into: &str) {
    for d in &mut n.devices {
        for t in [&mut d.gate, &mut d.source, &mut d.drain] {
            if t == from {
                *t = into.to_string();
            }
        }
    }
    for l in &mut n.loads {
        if l.net == from {
            l.net = into.to_string();
        }
    }
    n.nets.remove(from);
}

fn is_source(n: &Netlist, net: &str) -> bool {
    is_rail(net) || n.is_input(net)
}

/// Removes the always-on device `id` by merging its terminals when that is
/// exact; returns whether it was removed.
fn wire(n: &mut Netlist, id: &str, lenient: bool) -> bool {
    let Some(pos) = n.devices.iter().position(|d| d.id == id) else {
        return false;
    };
    let d = n.devices[pos].clone();
    if d.source == d.drain {
        n.devices.remove(pos);
        return true;
    }
    let gates = |n: &Netlist, net: &str| n.devices.iter().any(|x| x.gate == net);
    let channel_users = |n: &Netlist, net: &str| {
        n.devices
            .iter()
            .filter(|x| x.id != id && (x.source == net || x.drain == net))
            .count()
    };
    let (a, b) = (d.source.as_str(), d.drain.as_str());
    let plan = match (is_source(n, a), is_source(n, b)) {
        (true, true) => None,
        (false, false) => match (n.is_output(a), n.is_output(b)) {
            (true, true) => None,
            (true, false) => Some((b, a)),
            (false, true) => Some((a, b)),
            (false, false) => Some((a.max(b), a.min(b))),
        },
        (sa, _) => {
            let (src, other) = if sa { (a, b) } else { (b, a) };
            let absorbable = !n.is_external(other)
                && !gates(n, other)
                && (lenient || channel_users(n, other) == 1);
            absorbable.then_some((other, src))
        }
    };
    let Some((from, into)) = plan else { return false };
    let (from, into) = (from.to_string(), into.to_string());
    n.devices.remove(pos);
    rename(n, &from, &into);
    true
}

/// Applies the restriction of one input and rewrites the devices it fixes.
pub fn apply_assumption(n: &Netlist, a: &AssumptionDomain) -> Result<(Netlist, PassReport), SimplifyError> {
    if !n.nets.contains(&a.net) {
        return Err(SimplifyError::UnknownNet(a.net.clone()));
    }
    let declared = n
        .input_domain(&a.net)
        .ok_or_else(|| SimplifyError::NonInputAssumption(a.net.clone()))?;
    if !a.levels().iter().all(|l| declared.levels().contains(l)) {
        return Err(SimplifyError::WidensDomain {
            net: a.net.clone(),
            declared,
            assumed: a.domain,
        });
    }
    let levels = a.levels();
    let binary = a.domain == SignalEncoding::FullVddHigh;
    let direct: Vec<NodeState> = levels.iter().map(|&l| l.into()).collect();
    let derived = complements(n, &a.net, levels);
    let mut fates: Vec<(String, Fate)> = Vec::new();
    for d in &n.devices {
        let gate_levels = if d.gate == a.net {
            direct.clone()
        } else if let Some(g) = derived.get(&d.gate) {
            g.clone()
        } else {
            continue;
        };
        fates.push((d.id.clone(), classify(d, &gate_levels, binary, n.vdd)));
    }
    let mut out = n.clone();
    let mut report = PassReport::default();
    let opened: BTreeSet<&str> = fates
        .iter()
        .filter(|(_, f)| *f == Fate::Open)
        .map(|(id, _)| id.as_str())
        .collect();
    out.devices.retain(|d| !opened.contains(d.id.as_str()));
    report.opened = opened.len();
    for (id, f) in &fates {
        match f {
            Fate::Remap => {
                if let Some(d) = out.devices.iter_mut().find(|d| &d.id == id) {
                    d.vt = ThresholdClass::Lvt;
                    report.remapped += 1;
                }
            }
            Fate::Wire
                if wire(&mut out, id, false) => {
                    report.wired += 1;
                }
            _ => {}
        }
    }
    if let Some(decl) = out.inputs.iter_mut().find(|i| i.net == a.net) {
        decl.domain = a.domain;
    }
    out.drop_unused_nets();
    Ok((out.canonical(), report))
}

/// Keeps devices whose channel region reaches an output, directly or
/// through the gates of devices already kept.
fn retain_live(n: &mut Netlist) {
    let groups = channel_groups(n);
    let mut live: BTreeSet<usize> = n.outputs.iter().filter_map(|o| groups.get(&o.net).copied()).collect();
    let group_of = |d: &Device| groups.get(&d.source).or_else(|| groups.get(&d.drain)).copied();
    loop {
        let before = live.len();
        for d in &n.devices {
            if group_of(d).is_some_and(|g| live.contains(&g)) {
                if let Some(&g) = groups.get(&d.gate) {
                    live.insert(g);
                }
            }
        }
        if live.len() == before {
            break;
        }
    }
    n.devices.retain(|d| group_of(d).is_some_and(|g| live.contains(&g)));
}

/// Removes devices leading only to an otherwise unused internal net.
fn remove_dead_ends(n: &mut Netlist) {
    loop {
        let mut uses: HashMap<&str, usize> = HashMap::new();
        for d in &n.devices {
            for t in [&d.gate, &d.source, &d.drain] {
                *uses.entry(t.as_str()).or_default() += 1;
            }
        }
        let dead_end = |net: &str| !is_source(n, net) && !n.is_external(net) && uses[net] == 1;
        let dead: BTreeSet<String> = n
            .devices
            .iter()
            .filter(|d| dead_end(&d.source) || dead_end(&d.drain))
            .map(|d| d.id.clone())
            .collect();
        if dead.is_empty() {
            break;
        }
        n.devices.retain(|d| !dead.contains(&d.id));
    }
}

/// Removes every device that cannot influence an output.
pub fn prune_dead(n: &Netlist) -> (Netlist, PassReport) {
    let mut out = n.clone();
    out.devices.retain(|d| d.source != d.drain);
    loop {
        let count = out.devices.len();
        retain_live(&mut out);
        remove_dead_ends(&mut out);
        if out.devices.len() == count {
            break;
        }
    }
    let removed = n.devices.len() - out.devices.len();
    let kept_nets: BTreeSet<String> = out
        .devices
        .iter()
        .flat_map(|d| [d.gate.clone(), d.source.clone(), d.drain.clone()])
        .collect();
    let external: BTreeSet<String> = out.loads.iter().filter(|l| out.is_external(&l.net)).map(|l| l.net.clone()).collect();
    out.loads.retain(|l| kept_nets.contains(&l.net) || external.contains(&l.net));
    let nets = out.drop_unused_nets();
    let report = PassReport {
        pruned: removed + nets,
        ..PassReport::default()
    };
    (out.canonical(), report)
}

/// Collapses devices that duplicate another in parallel.
pub fn factor_parallel(n: &Netlist) -> (Netlist, PassReport) {
    let mut seen = BTreeSet::new();
    let mut out = n.clone();
    out.devices.retain(|d| {
        let (lo, hi) = if d.source <= d.drain {
            (&d.source, &d.drain)
        } else {
            (&d.drain, &d.source)
        };
        seen.insert((d.polarity, d.vt, d.gate.clone(), lo.clone(), hi.clone()))
    });
    let report = PassReport {
        factored: n.devices.len() - out.devices.len(),
        ..PassReport::default()
    };
    (out.canonical(), report)
}

fn always_on(d: &Device) -> bool {
    match d.polarity {
        Polarity::N => d.gate == VDD_RAIL,
        Polarity::P => d.gate == GND_RAIL,
    }
}

/// Output symbols that tolerate different encodings of the same value.
fn symbol(level: VoltageLevel, enc: SignalEncoding) -> Result<Trit, VoltageLevel> {
    decode(level, enc).map_err(|_| level)
}

fn output_symbols(n: &Netlist, levels: Vec<VoltageLevel>) -> Vec<Result<Trit, VoltageLevel>> {
    n.outputs.iter().zip(levels).map(|(o, l)| symbol(l, o.encoding)).collect()
}

/// Checks that `after`, over its declared domain, resolves wherever `before`
/// resolves over `before_domain`, to the same logical output values. Points
/// correspond by position: both domains are enumerated in order and an
/// input's levels keep their logical order when its encoding changes.
pub fn check_equivalent(before: &Netlist, before_domain: &InputDomain, after: &Netlist) -> Result<(), SimplifyError> {
    let names = |n: &Netlist| n.outputs.iter().map(|o| o.net.clone()).collect::<Vec<_>>();
    let after_domain = InputDomain::declared(after);
    if names(before) != names(after) || before_domain.nets != after_domain.nets || before_domain.len() != after_domain.len() {
        return Err(SimplifyError::EquivalenceCheckFailed("interface changed".into()));
    }
    let a = sweep(before, before_domain);
    let b = sweep(after, &after_domain);
    for ((point, x), (_, y)) in a.into_iter().zip(b) {
        let Ok(want) = x else { continue };
        let want = output_symbols(before, want);
        let show: Vec<String> = point.iter().map(|l| l.digit().to_string()).collect();
        match y {
            Ok(got) => {
                let got = output_symbols(after, got);
                if got != want {
                    return Err(SimplifyError::EquivalenceCheckFailed(format!(
                        "outputs differ at {}: {want:?} became {got:?}",
                        show.join("")
                    )));
                }
            }
            Err(e) => {
                return Err(SimplifyError::EquivalenceCheckFailed(format!(
                    "point {} no longer resolves: {e}",
                    show.join("")
                )))
            }
        }
    }
    Ok(())
}

/// Re-encodes a divided carry as a binary signal: the dividers on the carry
/// are replaced so the former middle level becomes VDD, the carry-in domain
/// becomes binary, and stages that complement the carry-in are rebuilt as
/// binary inverters.
pub fn rebind_carry(n: &Netlist, carry_net: &str) -> Result<(Netlist, PassReport), SimplifyError> {
    if !n.nets.contains(carry_net) {
        return Err(SimplifyError::UnknownNet(carry_net.to_string()));
    }
    if !n.is_output(carry_net) {
        return Err(SimplifyError::UnknownNet(format!("{carry_net} (not an output)")));
    }
    let groups = channel_groups(n);
    let region = groups[carry_net];
    let in_region = |d: &Device| {
        d.has_tag(TAG_CARRY_GEN)
            || [&d.source, &d.drain]
                .iter()
                .any(|t| groups.get(t.as_str()) == Some(&region))
    };
    let mut dividers: Vec<&Device> = n
        .devices
        .iter()
        .filter(|d| in_region(d) && d.has_tag(TAG_DIVIDER))
        .collect();
    if dividers.is_empty() {
        let divides = sweep_states(n, &InputDomain::declared(n))
            .iter()
            .any(|(_, r)| r.as_ref().is_ok_and(|s| s.division_events.contains(carry_net)));
        if divides {
            dividers = n.devices.iter().filter(|d| in_region(d) && always_on(d)).collect();
        }
    }
    if dividers.is_empty() {
        return Err(SimplifyError::NoDividerFound(carry_net.to_string()));
    }
    let mut ups = Vec::new();
    let mut downs = Vec::new();
    for d in dividers {
        match d.polarity {
            Polarity::N => ups.push(d.id.clone()),
            Polarity::P => downs.push(d.id.clone()),
        }
    }
    let mut out = n.clone();
    let mut report = PassReport::default();
    out.devices.retain(|d| !downs.contains(&d.id));
    report.opened = downs.len();
    for id in &ups {
        if wire(&mut out, id, true) {
            report.wired += 1;
        }
    }
    // carry-domain inputs become binary; their complement stages follow
    let halfpairs: Vec<String> = out
        .inputs
        .iter()
        .filter(|i| i.domain == SignalEncoding::HalfVddHigh)
        .map(|i| i.net.clone())
        .collect();
    for c in &halfpairs {
        let derived = complements(&out, c, SignalEncoding::HalfVddHigh.levels());
        // switches fixed over the old domain stay fixed once '1' moves to VDD
        let direct = vec![NodeState::Gnd, NodeState::Half];
        let mut removed = BTreeSet::new();
        for d in &mut out.devices {
            let levels = if &d.gate == c { &direct } else if let Some(g) = derived.get(&d.gate) { g } else { continue };
            match classify(d, levels, false, n.vdd) {
                Fate::Wire => {
                    d.gate = match d.polarity {
                        Polarity::N => VDD_RAIL.to_string(),
                        Polarity::P => GND_RAIL.to_string(),
                    };
                }
                Fate::Open => {
                    removed.insert(d.id.clone());
                }
                _ => {}
            }
        }
        report.opened += removed.len();
        out.devices.retain(|d| !removed.contains(&d.id));
        for (g, states) in derived {
            let (low, mid) = (states[0].level(), states[1].level());
            let (Some(low), Some(mid)) = (low, mid) else { continue };
            let groups = channel_groups(&out);
            let Some(&gid) = groups.get(&g) else { continue };
            let single = groups.iter().filter(|(_, &v)| v == gid).count() == 1;
            if !single || out.is_external(&g) || (low == mid && low == VoltageLevel::Half) {
                continue;
            }
            let stage: BTreeSet<String> = {
                out.devices
                    .iter()
                    .filter(|d| [&d.source, &d.drain].iter().any(|t| groups.get(t.as_str()) == Some(&gid)))
                    .map(|d| d.id.clone())
                    .collect()
            };
            out.devices.retain(|d| !stage.contains(&d.id));
            if low == mid {
                // constant over the carry domain; keep it constant
                let rail = if low == VoltageLevel::Vdd { VDD_RAIL } else { GND_RAIL };
                rename(&mut out, &g, rail);
            } else if low > mid {
                let p = out.fresh_device_id("MR");
                out.add_device(Device::new(p, Polarity::P, ThresholdClass::Mvt, c, VDD_RAIL, &g));
                let q = out.fresh_device_id("MR");
                out.add_device(Device::new(q, Polarity::N, ThresholdClass::Mvt, c, &g, GND_RAIL));
            } else {
                rename(&mut out, &g, c);
            }
        }
    }
    for i in &mut out.inputs {
        if i.domain == SignalEncoding::HalfVddHigh {
            i.domain = SignalEncoding::FullVddHigh;
        }
    }
    for o in &mut out.outputs {
        if o.net == carry_net {
            o.encoding = SignalEncoding::FullVddHigh;
        }
    }
    let (out, pruned) = prune_dead(&out);
    report.absorb(pruned);
    check_equivalent(n, &InputDomain::declared(n), &out)?;
    let residual = sweep_states(&out, &InputDomain::declared(&out))
        .iter()
        .filter(|(_, r)| r.as_ref().is_ok_and(|s| s.division_events.contains(carry_net)))
        .count();
    if residual > 0 {
        return Err(SimplifyError::EquivalenceCheckFailed(format!(
            "{carry_net} still divides in {residual} states"
        )));
    }
    Ok((out, report))
}

/// Assumption, pruning, factoring, optional carry re-encoding and a final
/// prune, followed by an exhaustive equivalence check on the assumed domain.
pub fn simplify_pipeline(
    n: &Netlist,
    a: &AssumptionDomain,
    rebind: Option<&str>,
) -> Result<(Netlist, PassReport), SimplifyError> {
    let mut report = PassReport::default();
    let mut step = n.clone();
    // a wire that merges nets can expose further wires; iterate to a fixpoint
    loop {
        let mut round = PassReport::default();
        let (s, r) = apply_assumption(&step, a)?;
        round.absorb(r);
        let (s, r) = prune_dead(&s);
        round.absorb(r);
        let (s, r) = factor_parallel(&s);
        round.absorb(r);
        step = s;
        report.absorb(round);
        if round.is_empty() {
            break;
        }
    }
    if let Some(carry) = rebind {
        let (s, r) = rebind_carry(&step, carry)?;
        report.absorb(r);
        step = s;
    }
    let (step, r) = prune_dead(&step);
    report.absorb(r);
    let domain = InputDomain::declared(n).with(&a.net, a.levels());
    check_equivalent(n, &domain, &step)?;
    if report.is_empty() && n.input_domain(&a.net) == Some(a.domain) {
        return Ok((n.canonical(), report));
    }
    Ok((step, report))
}
