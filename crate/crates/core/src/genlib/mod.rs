//! Reference circuit generators.
//!
//! Every generator returns a canonical netlist that validates cleanly. Logic
//! functions are synthesized from their truth tables with the switch
//! vocabulary of the chosen style, so the topologies follow each style's
//! structure rather than any particular published layout.

mod builder;
mod pattern;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{is_rail, Device, Netlist};
use crate::trit::{decode, encode, full_add_complete, CarryEncoding, SignalEncoding, Trit, VoltageLevel};
use builder::{Builder, Complement, Sig};

pub use pattern::{declared_domains, gen_pattern, product, Pattern, PatternError, PatternKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Style {
    TernaryCmos,
    NtPt,
    MuxPtTg,
    DecoderEncoder,
}

impl Style {
    pub const ALL: [Style; 4] = [Style::TernaryCmos, Style::NtPt, Style::MuxPtTg, Style::DecoderEncoder];

    pub fn keyword(self) -> &'static str {
        match self {
            Style::TernaryCmos => "ternary-cmos",
            Style::NtPt => "ntpt",
            Style::MuxPtTg => "mux",
            Style::DecoderEncoder => "decenc",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Style> {
        Style::ALL.into_iter().find(|s| s.keyword().eq_ignore_ascii_case(word))
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Completeness {
    Complete,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cascade {
    Direct,
    TwoTha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StyleSpec {
    pub style: Style,
    pub completeness: Completeness,
    pub carry_encoding: CarryEncoding,
    pub cascade: Cascade,
}

impl StyleSpec {
    pub fn new(style: Style, completeness: Completeness, carry_encoding: CarryEncoding, cascade: Cascade) -> StyleSpec {
        StyleSpec {
            style,
            completeness,
            carry_encoding,
            cascade,
        }
    }

    pub fn check(&self) -> Result<(), GenError> {
        match (self.completeness, self.carry_encoding) {
            (Completeness::Complete, CarryEncoding::FullVddHigh) => Err(GenError::UnsupportedCombination(
                "a complete adder carries 2 and cannot use a binary carry".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Encoding of the carry output (and of the carry-in for partial cells).
    pub fn carry_signal(&self) -> SignalEncoding {
        match self.completeness {
            Completeness::Complete => SignalEncoding::Standard,
            Completeness::Partial => self.carry_encoding.into(),
        }
    }

    fn title(&self) -> String {
        let completeness = match self.completeness {
            Completeness::Complete => "complete",
            Completeness::Partial => "partial",
        };
        let carry = match self.carry_encoding {
            CarryEncoding::HalfVddHigh => "half",
            CarryEncoding::FullVddHigh => "vdd",
        };
        let cascade = match self.cascade {
            Cascade::Direct => "direct",
            Cascade::TwoTha => "two-tha",
        };
        format!("tfa {} {completeness} carry={carry} {cascade}", self.style)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Nti,
    Pti,
    Sti,
    BinaryInverter,
    TernaryDecoder,
    TernaryBuffer,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Nti,
        GateKind::Pti,
        GateKind::Sti,
        GateKind::BinaryInverter,
        GateKind::TernaryDecoder,
        GateKind::TernaryBuffer,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Nti => "nti",
            GateKind::Pti => "pti",
            GateKind::Sti => "sti",
            GateKind::BinaryInverter => "inv",
            GateKind::TernaryDecoder => "decoder",
            GateKind::TernaryBuffer => "buffer",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.keyword().eq_ignore_ascii_case(word))
    }
}

fn stage(b: &mut Builder, kind: Complement, input: &str, out: &str) {
    let (p, n) = match kind {
        Complement::Sti => (crate::netlist::ThresholdClass::Lvt, crate::netlist::ThresholdClass::Lvt),
        Complement::Nti => (crate::netlist::ThresholdClass::Hvt, crate::netlist::ThresholdClass::Lvt),
        Complement::Pti => (crate::netlist::ThresholdClass::Lvt, crate::netlist::ThresholdClass::Hvt),
        Complement::Inv => (crate::netlist::ThresholdClass::Mvt, crate::netlist::ThresholdClass::Mvt),
    };
    b.device(crate::netlist::Polarity::P, p, input, crate::netlist::VDD_RAIL, out);
    b.device(crate::netlist::Polarity::N, n, input, out, crate::netlist::GND_RAIL);
}

/// Single gates: ternary inverters, a binary inverter, a one-hot decoder and
/// a two-stage buffer.
pub fn gen_gate(kind: GateKind) -> Netlist {
    use SignalEncoding::*;
    let mut b = Builder::new(kind.keyword(), Style::TernaryCmos);
    let x = if kind == GateKind::BinaryInverter { FullVddHigh } else { Standard };
    b.n.add_input("a", x);
    b.reserve("a");
    match kind {
        GateKind::Nti | GateKind::Pti | GateKind::Sti | GateKind::BinaryInverter => {
            let (c, enc) = match kind {
                GateKind::Nti => (Complement::Nti, FullVddHigh),
                GateKind::Pti => (Complement::Pti, FullVddHigh),
                GateKind::Sti => (Complement::Sti, Standard),
                _ => (Complement::Inv, FullVddHigh),
            };
            b.n.add_output("y", enc);
            stage(&mut b, c, "a", "y");
        }
        GateKind::TernaryBuffer => {
            b.n.add_output("y", Standard);
            stage(&mut b, Complement::Sti, "a", "m");
            stage(&mut b, Complement::Sti, "m", "y");
        }
        GateKind::TernaryDecoder => {
            for o in ["d0", "d1", "d2"] {
                b.n.add_output(o, FullVddHigh);
            }
            stage(&mut b, Complement::Nti, "a", "d0");
            stage(&mut b, Complement::Pti, "a", "pti_a");
            stage(&mut b, Complement::Inv, "pti_a", "d2");
            b.nor(&["d0".to_string(), "d2".to_string()], "d1");
        }
    }
    b.finish()
}

fn trits(levels: &[VoltageLevel], encs: &[SignalEncoding]) -> Vec<Trit> {
    levels
        .iter()
        .zip(encs)
        .map(|(&l, &e)| decode(l, e).expect("level in domain"))
        .collect()
}

/// Physical table of a logical function; points where `f` returns `None`
/// or a value the encoding cannot carry are don't-cares.
fn table(
    inputs: &[SignalEncoding],
    out: SignalEncoding,
    f: impl Fn(&[Trit]) -> Option<Trit>,
) -> Vec<Option<VoltageLevel>> {
    let domains: Vec<Vec<VoltageLevel>> = inputs.iter().map(|e| e.levels().to_vec()).collect();
    product(&domains)
        .iter()
        .map(|p| f(&trits(p, inputs)).and_then(|t| encode(t, out).ok()))
        .collect()
}

/// Ternary full adder with inputs `a`, `b`, `cin` and outputs `sum`, `carry`.
pub fn gen_tfa(spec: &StyleSpec) -> Result<Netlist, GenError> {
    spec.check()?;
    use SignalEncoding::*;
    let carry_enc = spec.carry_signal();
    let mut b = Builder::new(&spec.title(), spec.style);
    for net in ["a", "b", "cin", "sum", "carry"] {
        b.reserve(net);
    }
    b.n.add_input("a", Standard);
    b.n.add_input("b", Standard);
    b.n.add_input("cin", carry_enc);
    b.n.add_output("sum", Standard);
    b.n.add_output("carry", carry_enc);
    let a = Sig::of("a", Standard);
    let bb = Sig::of("b", Standard);
    let cin = Sig::of("cin", carry_enc);
    match spec.cascade {
        Cascade::Direct => {
            let encs = [Standard, Standard, carry_enc];
            let sum = table(&encs, Standard, |t| Some(full_add_complete(t[0], t[1], t[2]).1));
            let carry = table(&encs, carry_enc, |t| Some(full_add_complete(t[0], t[1], t[2]).0));
            let ins = [a, bb, cin];
            b.synthesize(&ins, &sum, "sum");
            b.synthesize(&ins, &carry, "carry");
        }
        Cascade::TwoTha => {
            let s1 = b.fresh("s1");
            let c1 = b.fresh("c1");
            let c2 = b.fresh("c2");
            let half_sum = |x: &[Trit]| Some(Trit::new((x[0].value() + x[1].value()) % 3).expect("mod 3"));
            let half_carry = |x: &[Trit]| Some(Trit::new((x[0].value() + x[1].value()) / 3).expect("at most 1"));
            let first = [a, bb];
            b.synthesize(&first, &table(&[Standard, Standard], Standard, half_sum), &s1);
            b.synthesize(&first, &table(&[Standard, Standard], FullVddHigh, half_carry), &c1);
            let second = [Sig::of(&s1, Standard), cin];
            let encs = [Standard, carry_enc];
            b.synthesize(&second, &table(&encs, Standard, half_sum), "sum");
            b.synthesize(&second, &table(&encs, FullVddHigh, half_carry), &c2);
            // a partial cell never raises both half carries
            let merge = |x: &[Trit]| Trit::new(x[0].value() + x[1].value()).ok();
            let carries = [Sig::of(&c1, FullVddHigh), Sig::of(&c2, FullVddHigh)];
            let t = table(&[FullVddHigh, FullVddHigh], carry_enc, merge);
            b.synthesize(&carries, &t, "carry");
        }
    }
    Ok(b.finish())
}

/// Ternary half adder with inputs `a`, `b` and outputs `sum`, `carry`.
pub fn gen_tha(style: Style, carry_encoding: CarryEncoding) -> Netlist {
    use SignalEncoding::*;
    let carry_enc = SignalEncoding::from(carry_encoding);
    let carry = match carry_encoding {
        CarryEncoding::HalfVddHigh => "half",
        CarryEncoding::FullVddHigh => "vdd",
    };
    let mut b = Builder::new(&format!("tha {style} carry={carry}"), style);
    for net in ["a", "b", "sum", "carry"] {
        b.reserve(net);
    }
    b.n.add_input("a", Standard);
    b.n.add_input("b", Standard);
    b.n.add_output("sum", Standard);
    b.n.add_output("carry", carry_enc);
    let ins = [Sig::of("a", Standard), Sig::of("b", Standard)];
    let encs = [Standard, Standard];
    let sum = table(&encs, Standard, |x| Trit::new((x[0].value() + x[1].value()) % 3).ok());
    let carry = table(&encs, carry_enc, |x| Trit::new((x[0].value() + x[1].value()) / 3).ok());
    b.synthesize(&ins, &sum, "sum");
    b.synthesize(&ins, &carry, "carry");
    b.finish()
}

/// Copies `sub` into `host`, renaming internal nets and devices with
/// `prefix` and binding its ports through `ports`.
pub fn instantiate(host: &mut Netlist, sub: &Netlist, prefix: &str, ports: &BTreeMap<String, String>) {
    let map = |net: &str| -> String {
        if let Some(p) = ports.get(net) {
            p.clone()
        } else if is_rail(net) {
            net.to_string()
        } else {
            format!("{prefix}{net}")
        }
    };
    for net in &sub.nets {
        host.add_net(&map(net));
    }
    for d in &sub.devices {
        let mut copy = Device::new(
            format!("{prefix}{}", d.id),
            d.polarity,
            d.vt,
            map(&d.gate),
            map(&d.source),
            map(&d.drain),
        );
        copy.tags = d.tags.clone();
        host.add_device(copy);
    }
    for l in &sub.loads {
        let mut load = l.clone();
        load.id = format!("{prefix}{}", l.id);
        load.net = map(&l.net);
        host.loads.push(load);
    }
}

/// Drives every input of `dut` through a two-stage buffer and loads every
/// output with four buffer first stages. Port names are unchanged.
pub fn gen_testbench(dut: &Netlist) -> Netlist {
    let mut tb = Netlist::new(format!("testbench {}", dut.title));
    tb.vdd = dut.vdd;
    let mut ports = BTreeMap::new();
    for i in &dut.inputs {
        tb.add_input(&i.net, i.domain);
        ports.insert(i.net.clone(), format!("dut_{}", i.net));
    }
    for o in &dut.outputs {
        tb.add_output(&o.net, o.encoding);
        ports.insert(o.net.clone(), o.net.clone());
    }
    instantiate(&mut tb, dut, "dut.", &ports);
    let mut k = 0;
    let mut next = || {
        k += 1;
        format!("B{k}")
    };
    let inverter = |tb: &mut Netlist, id: String, input: &str, out: &str| {
        use crate::netlist::{Polarity, ThresholdClass, GND_RAIL, VDD_RAIL};
        tb.add_device(Device::new(format!("{id}p"), Polarity::P, ThresholdClass::Lvt, input, VDD_RAIL, out));
        tb.add_device(Device::new(format!("{id}n"), Polarity::N, ThresholdClass::Lvt, input, out, GND_RAIL));
    };
    for i in &dut.inputs {
        let mid = format!("buf_{}", i.net);
        inverter(&mut tb, next(), &i.net, &mid);
        inverter(&mut tb, next(), &mid, &format!("dut_{}", i.net));
    }
    for o in &dut.outputs {
        for j in 0..4 {
            inverter(&mut tb, next(), &o.net, &format!("fo4_{}_{j}", o.net));
        }
    }
    tb.canonical()
}

/// Ripple-carry adder of partial cells: inputs `a0..`, `b0..`, `cin`
/// (least significant digit first), outputs `s0..` and `cout`.
pub fn gen_rca(digits: usize, spec: &StyleSpec) -> Result<Netlist, GenError> {
    if spec.completeness != Completeness::Partial || spec.carry_encoding != CarryEncoding::FullVddHigh {
        return Err(GenError::UnsupportedCombination(
            "ripple-carry chains need partial cells with a binary carry".into(),
        ));
    }
    if digits == 0 {
        return Err(GenError::UnsupportedCombination("at least one digit is required".into()));
    }
    let cell = gen_tfa(spec)?;
    let mut n = Netlist::new(format!("rca{digits} {}", spec.style));
    for p in ["a", "b"] {
        for i in 0..digits {
            n.add_input(&format!("{p}{i}"), SignalEncoding::Standard);
        }
    }
    n.add_input("cin", SignalEncoding::FullVddHigh);
    for i in 0..digits {
        n.add_output(&format!("s{i}"), SignalEncoding::Standard);
    }
    n.add_output("cout", SignalEncoding::FullVddHigh);
    for i in 0..digits {
        let carry_in = if i == 0 { "cin".to_string() } else { format!("c{i}") };
        let carry_out = if i + 1 == digits {
            "cout".to_string()
        } else {
            format!("c{}", i + 1)
        };
        let ports: BTreeMap<String, String> = [
            ("a", format!("a{i}")),
            ("b", format!("b{i}")),
            ("cin", carry_in),
            ("sum", format!("s{i}")),
            ("carry", carry_out),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        instantiate(&mut n, &cell, &format!("d{i}."), &ports);
    }
    Ok(n.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{truth_table, InputDomain};
    use crate::trit::full_add_partial;

    fn specs() -> Vec<StyleSpec> {
        let mut v = Vec::new();
        for style in Style::ALL {
            for cascade in [Cascade::Direct, Cascade::TwoTha] {
                v.push(StyleSpec::new(style, Completeness::Complete, CarryEncoding::HalfVddHigh, cascade));
                v.push(StyleSpec::new(style, Completeness::Partial, CarryEncoding::HalfVddHigh, cascade));
                v.push(StyleSpec::new(style, Completeness::Partial, CarryEncoding::FullVddHigh, cascade));
            }
        }
        v
    }

    #[test]
    fn every_variant_adds() {
        for spec in specs() {
            let n = gen_tfa(&spec).unwrap();
            assert!(n.validate().is_empty(), "{spec:?}: {:?}", n.validate());
            let t = truth_table(&n, &InputDomain::declared(&n)).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
            let rows = t.decoded(&n).unwrap();
            let expected = if spec.completeness == Completeness::Complete { 27 } else { 18 };
            assert_eq!(rows.len(), expected);
            for (ins, outs) in rows {
                let (carry, sum) = full_add_partial(ins[0], ins[1], ins[2])
                    .or_else(|_| Ok::<_, ()>(full_add_complete(ins[0], ins[1], ins[2])))
                    .unwrap();
                assert_eq!(outs, vec![sum, carry], "{spec:?} at {ins:?}");
            }
        }
    }

    #[test]
    fn half_adders() {
        for style in Style::ALL {
            for enc in [CarryEncoding::HalfVddHigh, CarryEncoding::FullVddHigh] {
                let n = gen_tha(style, enc);
                assert!(n.validate().is_empty(), "{style}: {:?}", n.validate());
                let rows = truth_table(&n, &InputDomain::declared(&n)).unwrap().decoded(&n).unwrap();
                assert_eq!(rows.len(), 9);
                for (ins, outs) in rows {
                    let s = ins[0].value() + ins[1].value();
                    assert_eq!((outs[0].value(), outs[1].value()), (s % 3, s / 3), "{style} {enc:?}");
                }
            }
        }
    }

    #[test]
    fn partial_cells_are_smaller() {
        for style in Style::ALL {
            for cascade in [Cascade::Direct, Cascade::TwoTha] {
                let full = gen_tfa(&StyleSpec::new(style, Completeness::Complete, CarryEncoding::HalfVddHigh, cascade)).unwrap();
                for enc in [CarryEncoding::HalfVddHigh, CarryEncoding::FullVddHigh] {
                    let part = gen_tfa(&StyleSpec::new(style, Completeness::Partial, enc, cascade)).unwrap();
                    assert!(
                        part.device_count().total < full.device_count().total,
                        "{style} {cascade:?} {enc:?}: {} vs {}",
                        part.device_count().total,
                        full.device_count().total
                    );
                }
            }
        }
    }

    #[test]
    fn gates() {
        for kind in GateKind::ALL {
            let n = gen_gate(kind);
            assert!(n.validate().is_empty(), "{kind:?}: {:?}", n.validate());
        }
        let sti = gen_gate(GateKind::Sti);
        let t = truth_table(&sti, &InputDomain::declared(&sti)).unwrap();
        assert_eq!(t.to_csv(), "a,y\n0,2\n1,1\n2,0\n");
        let inv = gen_gate(GateKind::BinaryInverter);
        assert_eq!(inv.device_count().total, 2);
        let dec = gen_gate(GateKind::TernaryDecoder);
        let t = truth_table(&dec, &InputDomain::declared(&dec)).unwrap();
        assert_eq!(t.to_csv(), "a,d0,d1,d2\n0,2,0,0\n1,0,2,0\n2,0,0,2\n");
        let buf = gen_gate(GateKind::TernaryBuffer);
        let t = truth_table(&buf, &InputDomain::declared(&buf)).unwrap();
        assert_eq!(t.to_csv(), "a,y\n0,0\n1,1\n2,2\n");
    }

    #[test]
    fn complete_cannot_use_binary_carry() {
        let spec = StyleSpec::new(Style::NtPt, Completeness::Complete, CarryEncoding::FullVddHigh, Cascade::Direct);
        assert!(matches!(gen_tfa(&spec), Err(GenError::UnsupportedCombination(_))));
    }
}
