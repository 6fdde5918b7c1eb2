//! Netlist construction primitives shared by every logic style.
//!
//! Functions are given as tables over the level domains of their input
//! signals (lexicographic, first input most significant) with `None` for
//! don't-care points. Switch networks are built from cube covers: every cube
//! becomes a series chain of literal switches, and chains share common
//! prefixes.

use std::collections::{BTreeMap, HashMap};

use super::pattern::product;
use super::Style;
use crate::netlist::{Device, Netlist, Polarity, ThresholdClass, GND_RAIL, TAG_DIVIDER, VDD_RAIL};
use crate::sim::{conduction_at, Conduction};
use crate::trit::{SignalEncoding, VoltageLevel, DEFAULT_VDD};

const VT_ORDER: [ThresholdClass; 4] = [
    ThresholdClass::Lvt,
    ThresholdClass::Hvt,
    ThresholdClass::Mvt,
    ThresholdClass::Ulvt,
];

/// A net together with the levels it can take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Sig {
    pub net: String,
    pub levels: Vec<VoltageLevel>,
}

impl Sig {
    pub fn new(net: &str, levels: &[VoltageLevel]) -> Sig {
        Sig {
            net: net.to_string(),
            levels: levels.to_vec(),
        }
    }

    pub fn of(net: &str, enc: SignalEncoding) -> Sig {
        Sig::new(net, enc.levels())
    }

    fn mask(&self) -> u8 {
        self.levels.iter().fold(0, |m, l| m | bit(*l))
    }
}

fn bit(l: VoltageLevel) -> u8 {
    1 << l.steps()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Complement {
    Sti,
    Nti,
    Pti,
    Inv,
}

impl Complement {
    fn apply(self, l: VoltageLevel) -> VoltageLevel {
        use VoltageLevel::*;
        match self {
            Complement::Sti | Complement::Inv => VoltageLevel::from_steps(2 - l.steps()).expect("in range"),
            Complement::Nti => {
                if l == Gnd {
                    Vdd
                } else {
                    Gnd
                }
            }
            Complement::Pti => {
                if l == Vdd {
                    Gnd
                } else {
                    Vdd
                }
            }
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Complement::Sti => "sti",
            Complement::Nti => "nti",
            Complement::Pti => "pti",
            Complement::Inv => "inv",
        }
    }

    /// Two-device stage: pull-up and pull-down classes.
    fn stage(self) -> (ThresholdClass, ThresholdClass) {
        match self {
            Complement::Sti => (ThresholdClass::Lvt, ThresholdClass::Lvt),
            Complement::Nti => (ThresholdClass::Hvt, ThresholdClass::Lvt),
            Complement::Pti => (ThresholdClass::Lvt, ThresholdClass::Hvt),
            Complement::Inv => (ThresholdClass::Mvt, ThresholdClass::Mvt),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GateRef {
    Direct,
    Comp(Complement),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Switch {
    polarity: Polarity,
    vt: ThresholdClass,
    gate: GateRef,
}

/// A product term: one allowed-level mask per input.
type Cube = Vec<u8>;

enum Cover {
    Empty,
    Always,
    Cubes(Vec<Cube>),
}

fn on_mask(domain: &[VoltageLevel], sw: Switch) -> u8 {
    domain
        .iter()
        .filter(|&&l| {
            let g = match sw.gate {
                GateRef::Direct => l,
                GateRef::Comp(c) => c.apply(l),
            };
            conduction_at(sw.polarity, sw.vt, g, DEFAULT_VDD) == Conduction::On
        })
        .fold(0, |m, l| m | bit(*l))
}

pub(crate) struct Builder {
    pub n: Netlist,
    pub style: Style,
    devices: usize,
    used_names: BTreeMap<String, usize>,
    complements: HashMap<(String, Complement), Sig>,
    decoders: HashMap<String, Vec<(VoltageLevel, String)>>,
    minterms: HashMap<Vec<String>, String>,
    mids: HashMap<String, String>,
}

impl Builder {
    pub fn new(title: &str, style: Style) -> Builder {
        Builder {
            n: Netlist::new(title),
            style,
            devices: 0,
            used_names: BTreeMap::new(),
            complements: HashMap::new(),
            decoders: HashMap::new(),
            minterms: HashMap::new(),
            mids: HashMap::new(),
        }
    }

    pub fn finish(self) -> Netlist {
        self.n.canonical()
    }

    pub fn reserve(&mut self, name: &str) {
        self.used_names.entry(name.to_string()).or_insert(0);
    }

    pub fn fresh(&mut self, hint: &str) -> String {
        match self.used_names.get_mut(hint) {
            None => {
                self.used_names.insert(hint.to_string(), 0);
                hint.to_string()
            }
            Some(k) => loop {
                *k += 1;
                let name = format!("{hint}_{k}");
                if !self.n.nets.contains(&name) {
                    let name_taken = name.clone();
                    self.used_names.insert(name_taken, 0);
                    return name;
                }
            },
        }
    }

    pub fn device(&mut self, polarity: Polarity, vt: ThresholdClass, gate: &str, source: &str, drain: &str) -> String {
        self.devices += 1;
        let id = format!("M{}", self.devices);
        self.n.add_device(Device::new(id.clone(), polarity, vt, gate, source, drain));
        id
    }

    fn divider_pair(&mut self, upper: &str, out: &str, lower: &str) {
        self.devices += 1;
        let id = format!("M{}", self.devices);
        self.n
            .add_device(Device::new(id, Polarity::N, ThresholdClass::Lvt, VDD_RAIL, upper, out).with_tag(TAG_DIVIDER));
        self.devices += 1;
        let id = format!("M{}", self.devices);
        self.n
            .add_device(Device::new(id, Polarity::P, ThresholdClass::Lvt, GND_RAIL, out, lower).with_tag(TAG_DIVIDER));
    }

    /// Two-device complement stage of `sig`, built once per signal.
    pub fn complement(&mut self, sig: &Sig, kind: Complement) -> Sig {
        if let Some(s) = self.complements.get(&(sig.net.clone(), kind)) {
            return s.clone();
        }
        let net = self.fresh(&format!("{}_{}", kind.prefix(), sig.net.replace('.', "_")));
        let (up, down) = kind.stage();
        self.device(Polarity::P, up, &sig.net, VDD_RAIL, &net);
        self.device(Polarity::N, down, &sig.net, &net, GND_RAIL);
        let mut levels: Vec<VoltageLevel> = sig.levels.iter().map(|&l| kind.apply(l)).collect();
        levels.sort();
        levels.dedup();
        let out = Sig { net, levels };
        self.complements.insert((sig.net.clone(), kind), out.clone());
        out
    }

    fn complement_kinds(&self, sig: &Sig) -> Vec<Complement> {
        let binary = sig.levels.iter().all(|&l| l != VoltageLevel::Half);
        let halfpair = !sig.levels.contains(&VoltageLevel::Vdd);
        match self.style {
            _ if binary => vec![Complement::Inv],
            Style::MuxPtTg => Vec::new(),
            _ if halfpair => vec![Complement::Nti],
            Style::TernaryCmos => vec![Complement::Sti],
            Style::NtPt | Style::DecoderEncoder => vec![Complement::Nti, Complement::Pti],
        }
    }

    /// Cheapest switch chain conducting exactly on `mask` of `sig`'s domain.
    fn literal(&self, sig: &Sig, mask: u8, preferred: &[Polarity]) -> Option<Vec<Switch>> {
        let gates: Vec<GateRef> = std::iter::once(GateRef::Direct)
            .chain(self.complement_kinds(sig).into_iter().map(GateRef::Comp))
            .collect();
        let mut pols: Vec<Vec<Polarity>> = vec![preferred.to_vec()];
        pols.push(vec![Polarity::P, Polarity::N]);
        for allowed in pols {
            let mut singles = Vec::new();
            for &polarity in &allowed {
                for &gate in &gates {
                    for vt in VT_ORDER {
                        let sw = Switch { polarity, vt, gate };
                        let m = on_mask(&sig.levels, sw);
                        if m == mask {
                            return Some(vec![sw]);
                        }
                        if m & mask == mask && m != 0 {
                            singles.push((sw, m));
                        }
                    }
                }
            }
            for (i, &(s1, m1)) in singles.iter().enumerate() {
                for &(s2, m2) in &singles[i + 1..] {
                    if m1 & m2 == mask {
                        return Some(vec![s1, s2]);
                    }
                }
            }
        }
        None
    }

    fn realizable(&self, sig: &Sig, mask: u8, preferred: &[Polarity]) -> bool {
        mask == sig.mask() || self.literal(sig, mask, preferred).is_some()
    }

    fn cover(&self, inputs: &[Sig], on: &[bool], off: &[bool], preferred: &[Polarity]) -> Cover {
        if !on.iter().any(|&b| b) {
            return Cover::Empty;
        }
        let radix: Vec<usize> = inputs.iter().map(|s| s.levels.len()).collect();
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut digits = vec![0; radix.len()];
            for k in (0..radix.len()).rev() {
                digits[k] = idx % radix[k];
                idx /= radix[k];
            }
            digits
        };
        let contains = |cube: &Cube, idx: usize| {
            decode(idx)
                .iter()
                .zip(inputs)
                .zip(cube)
                .all(|((&d, s), &m)| m & bit(s.levels[d]) != 0)
        };
        let hits_off = |cube: &Cube| (0..off.len()).any(|i| off[i] && contains(cube, i));
        // candidate masks per input, widest first
        let candidates: Vec<Vec<u8>> = inputs
            .iter()
            .map(|s| {
                let full = s.mask();
                let mut ms: Vec<u8> = (1..=full).filter(|m| m & !full == 0).collect();
                ms.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
                ms.retain(|&m| self.realizable(s, m, preferred));
                ms
            })
            .collect();
        let mut cubes: Vec<Cube> = Vec::new();
        for idx in 0..on.len() {
            if !on[idx] || cubes.iter().any(|c| contains(c, idx)) {
                continue;
            }
            let digits = decode(idx);
            let mut cube: Cube = digits.iter().zip(inputs).map(|(&d, s)| bit(s.levels[d])).collect();
            for k in 0..inputs.len() {
                let point = cube[k];
                for &m in &candidates[k] {
                    if m & point == 0 {
                        continue;
                    }
                    let mut trial = cube.clone();
                    trial[k] = m;
                    if !hits_off(&trial) {
                        cube = trial;
                        break;
                    }
                }
            }
            cubes.push(cube);
        }
        let subsumes = |a: &Cube, b: &Cube| a.iter().zip(b).all(|(x, y)| y & !x == 0);
        let mut kept: Vec<Cube> = Vec::new();
        for (i, c) in cubes.iter().enumerate() {
            let dominated = cubes
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && subsumes(o, c) && (o != c || j < i));
            if !dominated {
                kept.push(c.clone());
            }
        }
        let full: Vec<u8> = inputs.iter().map(Sig::mask).collect();
        if kept.contains(&full) {
            return Cover::Always;
        }
        Cover::Cubes(kept)
    }

    fn switch_chain(&mut self, sig: &Sig, chain: &[Switch], from: &str, to: &str) {
        let mut here = from.to_string();
        for (i, sw) in chain.iter().enumerate() {
            let next = if i + 1 == chain.len() {
                to.to_string()
            } else {
                self.fresh(&format!("s_{}", sig.net.replace('.', "_")))
            };
            let gate = match sw.gate {
                GateRef::Direct => sig.net.clone(),
                GateRef::Comp(c) => self.complement(sig, c).net,
            };
            self.device(sw.polarity, sw.vt, &gate, &here, &next);
            here = next;
        }
    }

    /// Builds the cubes as a prefix-shared tree of series chains from `top`
    /// to `bottom`.
    fn build_cubes(&mut self, inputs: &[Sig], cubes: &[Cube], top: &str, bottom: &str, preferred: &[Polarity]) {
        let full: Vec<u8> = inputs.iter().map(Sig::mask).collect();
        let literals: Vec<Vec<(usize, u8)>> = cubes
            .iter()
            .map(|c| (0..c.len()).filter(|&k| c[k] != full[k]).map(|k| (k, c[k])).collect())
            .collect();
        self.build_trie(inputs, &literals, top, bottom, preferred);
    }

    fn build_trie(&mut self, inputs: &[Sig], lists: &[Vec<(usize, u8)>], node: &str, bottom: &str, preferred: &[Polarity]) {
        let mut groups: Vec<((usize, u8), Vec<Vec<(usize, u8)>>)> = Vec::new();
        for l in lists {
            let Some((&head, rest)) = l.split_first() else { continue };
            match groups.iter_mut().find(|(h, _)| *h == head) {
                Some((_, g)) => g.push(rest.to_vec()),
                None => groups.push((head, vec![rest.to_vec()])),
            }
        }
        for ((k, mask), rest) in groups {
            let chain = self.literal(&inputs[k], mask, preferred).expect("candidate masks are realizable");
            if rest.iter().all(Vec::is_empty) {
                self.switch_chain(&inputs[k], &chain, node, bottom);
            } else {
                let child = self.fresh("x");
                self.switch_chain(&inputs[k], &chain, node, &child);
                self.build_trie(inputs, &rest, &child, bottom, preferred);
            }
        }
    }

    fn points(inputs: &[Sig]) -> usize {
        inputs.iter().map(|s| s.levels.len()).product()
    }

    /// Static complementary gate with a full-swing output.
    pub fn binary_gate(&mut self, inputs: &[Sig], table: &[Option<bool>], out: &str) {
        let high: Vec<bool> = table.iter().map(|t| *t == Some(true)).collect();
        let low: Vec<bool> = table.iter().map(|t| *t == Some(false)).collect();
        match constant(table) {
            Some(true) => {
                self.device(Polarity::P, ThresholdClass::Lvt, GND_RAIL, VDD_RAIL, out);
                return;
            }
            Some(false) => {
                self.device(Polarity::N, ThresholdClass::Lvt, VDD_RAIL, out, GND_RAIL);
                return;
            }
            None => {}
        }
        let pun = self.cover(inputs, &high, &low, &[Polarity::P]);
        let pdn = self.cover(inputs, &low, &high, &[Polarity::N]);
        if let Cover::Cubes(c) = pun {
            self.build_cubes(inputs, &c, VDD_RAIL, out, &[Polarity::P]);
        }
        if let Cover::Cubes(c) = pdn {
            self.build_cubes(inputs, &c, out, GND_RAIL, &[Polarity::N]);
        }
    }

    /// Output stage whose middle level comes from a tagged divider pair.
    fn ternary_cmos(&mut self, inputs: &[Sig], table: &[Option<VoltageLevel>], out: &str) {
        use VoltageLevel::*;
        let is = |l: VoltageLevel| -> Vec<bool> { table.iter().map(|t| *t == Some(l)).collect() };
        let either = |a: VoltageLevel, b: VoltageLevel| -> Vec<bool> {
            table.iter().map(|t| *t == Some(a) || *t == Some(b)).collect()
        };
        if let Cover::Cubes(c) = self.cover(inputs, &is(Vdd), &either(Gnd, Half), &[Polarity::P]) {
            self.build_cubes(inputs, &c, VDD_RAIL, out, &[Polarity::P]);
        }
        if let Cover::Cubes(c) = self.cover(inputs, &is(Gnd), &either(Vdd, Half), &[Polarity::N]) {
            self.build_cubes(inputs, &c, out, GND_RAIL, &[Polarity::N]);
        }
        let upper = match self.cover(inputs, &is(Half), &is(Gnd), &[Polarity::P]) {
            Cover::Always => VDD_RAIL.to_string(),
            Cover::Cubes(c) => {
                let m = self.fresh(&format!("up_{out}"));
                self.build_cubes(inputs, &c, VDD_RAIL, &m, &[Polarity::P]);
                m
            }
            Cover::Empty => unreachable!("middle level present"),
        };
        let lower = match self.cover(inputs, &is(Half), &is(Vdd), &[Polarity::N]) {
            Cover::Always => GND_RAIL.to_string(),
            Cover::Cubes(c) => {
                let m = self.fresh(&format!("dn_{out}"));
                self.build_cubes(inputs, &c, &m, GND_RAIL, &[Polarity::N]);
                m
            }
            Cover::Empty => unreachable!("middle level present"),
        };
        self.divider_pair(&upper, out, &lower);
    }

    /// Two binary gates, "at least middle" and "high", averaged by a divider.
    fn ntpt(&mut self, inputs: &[Sig], table: &[Option<VoltageLevel>], out: &str) {
        let plus: Vec<Option<bool>> = table.iter().map(|t| t.map(|l| l != VoltageLevel::Gnd)).collect();
        let minus: Vec<Option<bool>> = table.iter().map(|t| t.map(|l| l == VoltageLevel::Vdd)).collect();
        let upper = self.gate_or_rail(inputs, &plus, &format!("pos_{out}"));
        let lower = self.gate_or_rail(inputs, &minus, &format!("neg_{out}"));
        self.divider_pair(&upper, out, &lower);
    }

    fn gate_or_rail(&mut self, inputs: &[Sig], table: &[Option<bool>], hint: &str) -> String {
        match constant(table) {
            Some(true) => VDD_RAIL.to_string(),
            Some(false) => GND_RAIL.to_string(),
            None => {
                let net = self.fresh(hint);
                self.binary_gate(inputs, table, &net);
                net
            }
        }
    }

    fn mid(&mut self, out: &str) -> String {
        if let Some(m) = self.mids.get(out) {
            return m.clone();
        }
        let m = self.fresh(&format!("mid_{out}"));
        self.divider_pair(VDD_RAIL, &m, GND_RAIL);
        self.mids.insert(out.to_string(), m.clone());
        m
    }

    /// Ordered selector tree: the first input picks a branch at the output,
    /// later inputs pick further down, and leaves are rails or the divided
    /// middle net. Identical subtrees are shared.
    fn mux(&mut self, inputs: &[Sig], table: &[Option<VoltageLevel>], out: &str) {
        let mut memo: HashMap<(usize, Vec<Option<VoltageLevel>>), Leaf> = HashMap::new();
        match self.mux_node(inputs, 0, table, out, Some(out), &mut memo) {
            Leaf::Net(_) => {}
            Leaf::Const(l) => self.tie(out, l, out),
            Leaf::Dc => self.tie(out, VoltageLevel::Gnd, out),
        }
    }

    fn tie(&mut self, net: &str, level: VoltageLevel, out: &str) {
        match level {
            VoltageLevel::Vdd => {
                self.device(Polarity::P, ThresholdClass::Lvt, GND_RAIL, VDD_RAIL, net);
            }
            VoltageLevel::Gnd => {
                self.device(Polarity::N, ThresholdClass::Lvt, VDD_RAIL, net, GND_RAIL);
            }
            VoltageLevel::Half => {
                let m = self.mid(out);
                self.device(Polarity::N, ThresholdClass::Lvt, VDD_RAIL, &m, net);
            }
        }
    }

    fn mux_node(
        &mut self,
        inputs: &[Sig],
        k: usize,
        table: &[Option<VoltageLevel>],
        out: &str,
        name: Option<&str>,
        memo: &mut HashMap<(usize, Vec<Option<VoltageLevel>>), Leaf>,
    ) -> Leaf {
        let care: Vec<VoltageLevel> = table.iter().flatten().copied().collect();
        if care.is_empty() {
            return Leaf::Dc;
        }
        if care.iter().all(|&l| l == care[0]) {
            return Leaf::Const(care[0]);
        }
        if name.is_none() {
            if let Some(l) = memo.get(&(k, table.to_vec())) {
                return l.clone();
            }
        }
        let sig = &inputs[k];
        let width = table.len() / sig.levels.len();
        let children: Vec<Leaf> = (0..sig.levels.len())
            .map(|j| self.mux_node(inputs, k + 1, &table[j * width..(j + 1) * width], out, None, memo))
            .collect();
        let node = match name {
            Some(n) => n.to_string(),
            None => self.fresh(&format!("sel_{out}")),
        };
        // group levels by target, then let don't-care branches widen a group
        let mut groups: Vec<(Leaf, u8)> = Vec::new();
        for (j, child) in children.iter().enumerate() {
            if matches!(child, Leaf::Dc) {
                continue;
            }
            let b = bit(sig.levels[j]);
            match groups.iter_mut().find(|(t, _)| t == child) {
                Some((_, m)) => *m |= b,
                None => groups.push((child.clone(), b)),
            }
        }
        for (j, child) in children.iter().enumerate() {
            if !matches!(child, Leaf::Dc) {
                continue;
            }
            let b = bit(sig.levels[j]);
            for (target, m) in groups.iter_mut() {
                let prefs = mux_preference(target);
                if self.literal(sig, *m | b, &prefs).is_some() {
                    *m |= b;
                    break;
                }
            }
        }
        for (target, mask) in groups {
            let to = match &target {
                Leaf::Net(n) => n.clone(),
                Leaf::Const(VoltageLevel::Vdd) => VDD_RAIL.to_string(),
                Leaf::Const(VoltageLevel::Gnd) => GND_RAIL.to_string(),
                Leaf::Const(VoltageLevel::Half) => self.mid(out),
                Leaf::Dc => unreachable!(),
            };
            let prefs = mux_preference(&target);
            let masks: Vec<u8> = if self.literal(sig, mask, &prefs).is_some() {
                vec![mask]
            } else {
                (0..3).map(|s| 1u8 << s).filter(|b| mask & b != 0).collect()
            };
            for m in masks {
                let mut chains: Vec<Vec<Switch>> = Vec::new();
                for p in &prefs {
                    let c = self.literal(sig, m, &[*p]).expect("single levels are realizable");
                    if !chains.contains(&c) {
                        chains.push(c);
                    }
                }
                for c in chains {
                    self.switch_chain(sig, &c, &node, &to);
                }
            }
        }
        let leaf = Leaf::Net(node);
        if name.is_none() {
            memo.insert((k, table.to_vec()), leaf.clone());
        }
        leaf
    }

    /// Indicator nets (high when the signal equals a level) for every level.
    fn decoder(&mut self, sig: &Sig) -> Vec<(VoltageLevel, String)> {
        use VoltageLevel::*;
        if let Some(d) = self.decoders.get(&sig.net) {
            return d.clone();
        }
        let has = |l| sig.levels.contains(&l);
        let ind = if !has(Half) {
            let low = self.complement(sig, Complement::Inv);
            vec![(Gnd, low.net), (Vdd, sig.net.clone())]
        } else if !has(Vdd) {
            let low = self.complement(sig, Complement::Nti);
            let mid = self.complement(&low, Complement::Inv);
            vec![(Gnd, low.net), (Half, mid.net)]
        } else {
            let low = self.complement(sig, Complement::Nti);
            let pti = self.complement(sig, Complement::Pti);
            let high = self.complement(&pti, Complement::Inv);
            let mid = self.fresh(&format!("is1_{}", sig.net.replace('.', "_")));
            self.nor(&[low.net.clone(), high.net.clone()], &mid);
            vec![(Gnd, low.net), (Half, mid), (Vdd, high.net)]
        };
        self.decoders.insert(sig.net.clone(), ind.clone());
        ind
    }

    pub fn nor(&mut self, ins: &[String], out: &str) {
        let mut here = VDD_RAIL.to_string();
        for (i, g) in ins.iter().enumerate() {
            let next = if i + 1 == ins.len() { out.to_string() } else { self.fresh("nor") };
            self.device(Polarity::P, ThresholdClass::Mvt, g, &here, &next);
            here = next;
        }
        for g in ins {
            self.device(Polarity::N, ThresholdClass::Mvt, g, out, GND_RAIL);
        }
    }

    pub fn nand(&mut self, ins: &[String], out: &str) {
        for g in ins {
            self.device(Polarity::P, ThresholdClass::Mvt, g, VDD_RAIL, out);
        }
        let mut here = out.to_string();
        for (i, g) in ins.iter().enumerate() {
            let next = if i + 1 == ins.len() { GND_RAIL.to_string() } else { self.fresh("nand") };
            self.device(Polarity::N, ThresholdClass::Mvt, g, &here, &next);
            here = next;
        }
    }

    pub fn inverter(&mut self, input: &str, out: &str) {
        self.device(Polarity::P, ThresholdClass::Mvt, input, VDD_RAIL, out);
        self.device(Polarity::N, ThresholdClass::Mvt, input, out, GND_RAIL);
    }

    /// Decoded minterms, OR planes per output level, and an encoder.
    fn decenc(&mut self, inputs: &[Sig], table: &[Option<VoltageLevel>], out: &str) {
        let decoded: Vec<Vec<(VoltageLevel, String)>> = inputs.iter().map(|s| self.decoder(s)).collect();
        let levels: Vec<Vec<VoltageLevel>> = inputs.iter().map(|s| s.levels.clone()).collect();
        let mut planes: BTreeMap<VoltageLevel, Vec<String>> = BTreeMap::new();
        for (point, t) in product(&levels).into_iter().zip(table) {
            let Some(level) = t else { continue };
            let key: Vec<String> = point
                .iter()
                .zip(&decoded)
                .map(|(l, d)| d.iter().find(|(v, _)| v == l).expect("decoded").1.clone())
                .collect();
            let term = self.minterm(&key);
            planes.entry(*level).or_default().push(term);
        }
        let tag = out.replace('.', "_");
        // active-low OR plane outputs
        let mut nor_of: BTreeMap<VoltageLevel, String> = BTreeMap::new();
        for (level, terms) in &planes {
            let net = self.fresh(&format!("nor{}_{tag}", level.digit()));
            self.nor(terms, &net);
            nor_of.insert(*level, net);
        }
        use VoltageLevel::*;
        if !planes.contains_key(&Half) {
            match nor_of.get(&Vdd) {
                Some(n) => self.inverter(&n.clone(), out),
                None => self.tie(out, Gnd, out),
            }
            return;
        }
        if let Some(n) = nor_of.get(&Vdd).cloned() {
            self.device(Polarity::P, ThresholdClass::Mvt, &n, VDD_RAIL, out);
        }
        if let Some(n) = nor_of.get(&Gnd).cloned() {
            let high = self.fresh(&format!("or0_{tag}"));
            self.inverter(&n, &high);
            self.device(Polarity::N, ThresholdClass::Mvt, &high, out, GND_RAIL);
        }
        let n1 = nor_of[&Half].clone();
        let o1 = self.fresh(&format!("or1_{tag}"));
        self.inverter(&n1, &o1);
        let upper = self.fresh(&format!("up_{tag}"));
        let lower = self.fresh(&format!("dn_{tag}"));
        self.device(Polarity::P, ThresholdClass::Mvt, &n1, VDD_RAIL, &upper);
        self.device(Polarity::N, ThresholdClass::Mvt, &o1, &lower, GND_RAIL);
        self.divider_pair(&upper, out, &lower);
    }

    fn minterm(&mut self, key: &[String]) -> String {
        if let Some(t) = self.minterms.get(key) {
            return t.clone();
        }
        let net = if key.len() == 1 {
            key[0].clone()
        } else {
            let nand = self.fresh("nand_t");
            self.nand(key, &nand);
            let t = self.fresh("t");
            self.inverter(&nand, &t);
            t
        };
        self.minterms.insert(key.to_vec(), net.clone());
        net
    }

    /// Implements `table` over `inputs` onto the existing net `out`.
    pub fn synthesize(&mut self, inputs: &[Sig], table: &[Option<VoltageLevel>], out: &str) {
        assert_eq!(table.len(), Self::points(inputs));
        let binary = table.iter().flatten().all(|&l| l != VoltageLevel::Half);
        match self.style {
            Style::MuxPtTg => self.mux(inputs, table, out),
            Style::DecoderEncoder => self.decenc(inputs, table, out),
            _ if binary => {
                let t: Vec<Option<bool>> = table.iter().map(|t| t.map(|l| l == VoltageLevel::Vdd)).collect();
                self.binary_gate(inputs, &t, out);
            }
            Style::TernaryCmos => self.ternary_cmos(inputs, table, out),
            Style::NtPt => self.ntpt(inputs, table, out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Leaf {
    Const(VoltageLevel),
    Net(String),
    Dc,
}

fn mux_preference(target: &Leaf) -> Vec<Polarity> {
    match target {
        Leaf::Const(VoltageLevel::Vdd) => vec![Polarity::P],
        Leaf::Const(VoltageLevel::Gnd) => vec![Polarity::N],
        _ => vec![Polarity::P, Polarity::N],
    }
}

fn constant(table: &[Option<bool>]) -> Option<bool> {
    let mut care = table.iter().flatten();
    match care.next() {
        None => Some(false),
        Some(&first) => care.all(|&v| v == first).then_some(first),
    }
}
