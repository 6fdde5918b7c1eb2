#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tritforge::netlist::{Device, Netlist, Polarity, ThresholdClass, GND_RAIL, VDD_RAIL};
use tritforge::sim::{sweep, InputDomain};
use tritforge::simplify::AssumptionDomain;
use tritforge::trit::{SignalEncoding, VoltageLevel};

/// Small random netlist: up to 3 ternary inputs, up to 20 devices, one or two
/// outputs, a handful of internal nets.
pub fn random_netlist<R: Rng>(rng: &mut R) -> Netlist {
    let mut n = Netlist::new("random");
    let inputs: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("i{i}")).collect();
    for i in &inputs {
        n.add_input(i, SignalEncoding::Standard);
    }
    let outputs: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("o{i}")).collect();
    let internal: Vec<String> = (0..rng.gen_range(0..=5)).map(|i| format!("n{i}")).collect();
    let mut gates: Vec<String> = inputs.clone();
    gates.extend(internal.iter().cloned());
    gates.extend(outputs.iter().cloned());
    gates.push(VDD_RAIL.into());
    gates.push(GND_RAIL.into());
    let mut channel: Vec<String> = internal.clone();
    channel.extend(outputs.iter().cloned());
    let mut ends = channel.clone();
    ends.extend(inputs.iter().cloned());
    ends.extend([VDD_RAIL.to_string(), GND_RAIL.to_string()]);
    let count = rng.gen_range(1..=20);
    for k in 0..count {
        let polarity = if rng.gen_bool(0.5) { Polarity::N } else { Polarity::P };
        let vt = *ThresholdClass::ALL.choose(rng).unwrap();
        // gates lean towards inputs so assumptions have something to act on
        let gate = if rng.gen_bool(0.5) {
            inputs.choose(rng).unwrap().clone()
        } else {
            gates.choose(rng).unwrap().clone()
        };
        let source = channel.choose(rng).unwrap().clone();
        let drain = ends.choose(rng).unwrap().clone();
        n.add_device(Device::new(format!("M{k}"), polarity, vt, gate, source, drain));
    }
    for o in &outputs {
        n.add_output(o, SignalEncoding::Standard);
        n.add_net(o);
    }
    n
}

pub fn random_assumption<R: Rng>(rng: &mut R, n: &Netlist) -> AssumptionDomain {
    let net = &n.inputs.choose(rng).unwrap().net;
    let domain = *[SignalEncoding::FullVddHigh, SignalEncoding::HalfVddHigh, SignalEncoding::Standard]
        .choose(rng)
        .unwrap();
    AssumptionDomain::new(net, domain)
}

/// Exhaustive refinement oracle: wherever `before` resolves on `domain`,
/// `after` resolves to the same output levels. Returns the first mismatch.
pub fn refines(before: &Netlist, after: &Netlist, domain: &InputDomain) -> Result<(), String> {
    let a = sweep(before, domain);
    let b = sweep(after, domain);
    for ((point, x), (_, y)) in a.iter().zip(&b) {
        if let Ok(levels) = x {
            match y {
                Ok(l) if l == levels => {}
                other => return Err(format!("at {point:?}: {levels:?} became {other:?}")),
            }
        }
    }
    Ok(())
}

pub fn assumed_domain(n: &Netlist, a: &AssumptionDomain) -> InputDomain {
    InputDomain::declared(n).with(&a.net, a.levels())
}

pub fn levels_of(enc: SignalEncoding) -> Vec<VoltageLevel> {
    enc.levels().to_vec()
}
