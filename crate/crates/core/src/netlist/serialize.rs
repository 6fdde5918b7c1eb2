use std::fmt::Write;

use super::{Netlist, FORMAT_VERSION};
use crate::trit::SignalEncoding;

/// Canonical text: declarations first, then devices and loads sorted by id.
pub fn serialize(n: &Netlist) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {FORMAT_VERSION}");
    if !n.title.is_empty() {
        let _ = writeln!(out, ".title {}", n.title);
    }
    let _ = writeln!(out, ".vdd {}", n.vdd);
    for i in &n.inputs {
        let _ = writeln!(out, ".input {} {}", i.net, i.domain);
    }
    for o in &n.outputs {
        if o.encoding == SignalEncoding::Standard {
            let _ = writeln!(out, ".output {}", o.net);
        } else {
            let _ = writeln!(out, ".output {} enc={}", o.net, o.encoding);
        }
    }
    for net in &n.nets {
        // an output no device touches needs its own declaration to reparse
        let bare_output = n.is_output(net) && !n.devices.iter().any(|d| d.touches(net));
        if !n.is_input(net) && (!n.is_output(net) || bare_output) {
            let _ = writeln!(out, ".net {net}");
        }
    }
    let mut devices: Vec<_> = n.devices.iter().collect();
    devices.sort_by(|a, b| a.id.cmp(&b.id));
    for d in devices {
        let _ = write!(
            out,
            "M {} {} {} G={} S={} D={}",
            d.id, d.polarity, d.vt, d.gate, d.source, d.drain
        );
        for tag in &d.tags {
            let _ = write!(out, " tag={tag}");
        }
        out.push('\n');
    }
    let mut loads: Vec<_> = n.loads.iter().collect();
    loads.sort_by(|a, b| a.id.cmp(&b.id));
    for l in loads {
        let _ = writeln!(out, "C {} {} {:e}", l.id, l.net, l.farads);
    }
    out.push_str(".end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse, parse_with, Device, ParseOptions, Polarity, ThresholdClass};
    use super::*;
    use proptest::prelude::*;

    fn arb_netlist() -> impl Strategy<Value = Netlist> {
        let nets = ["a", "b", "c", "x", "y", "n1", "n2", "VDD", "GND"];
        let device = (
            prop::bool::ANY,
            0usize..4,
            0usize..9,
            0usize..9,
            0usize..9,
            prop::option::of(prop::sample::select(vec!["divider", "carry-gen", "k"])),
        );
        (prop::collection::vec(device, 0..12), 0usize..3, prop::collection::vec(0u32..5, 0..3)).prop_map(
            move |(devs, n_inputs, caps)| {
                let mut n = Netlist::new("random");
                for (i, name) in ["a", "b", "c"].iter().take(n_inputs).enumerate() {
                    let dom = [SignalEncoding::Standard, SignalEncoding::FullVddHigh, SignalEncoding::HalfVddHigh][i];
                    n.add_input(name, dom);
                }
                n.add_output("y", SignalEncoding::Standard);
                for (i, (p, vt, g, s, d, tag)) in devs.into_iter().enumerate() {
                    let mut dev = Device::new(
                        format!("M{i}"),
                        if p { Polarity::P } else { Polarity::N },
                        ThresholdClass::ALL[vt],
                        nets[g],
                        nets[s],
                        nets[d],
                    );
                    if let Some(t) = tag {
                        dev = dev.with_tag(t);
                    }
                    n.add_device(dev);
                }
                for (i, c) in caps.into_iter().enumerate() {
                    n.add_net("y");
                    n.loads.push(super::super::Load {
                        id: format!("C{i}"),
                        net: "y".into(),
                        farads: c as f64 * 1e-15,
                    });
                }
                n
            },
        )
    }

    proptest! {
        #[test]
        fn round_trip_is_structural_identity(n in arb_netlist()) {
            let text = serialize(&n);
            let back = parse(&text).unwrap();
            prop_assert!(back.structurally_eq(&n), "{text}");
            prop_assert_eq!(serialize(&back), text.clone());
            // canonical text also satisfies strict mode
            let strict = ParseOptions { strict: true };
            prop_assert!(parse_with(&text, strict).is_ok());
        }

        #[test]
        fn device_order_does_not_change_bytes(n in arb_netlist(), seed in any::<u64>()) {
            let mut shuffled = n.clone();
            let len = shuffled.devices.len();
            if len > 1 {
                let mut s = seed;
                for i in (1..len).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    shuffled.devices.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            prop_assert_eq!(serialize(&n), serialize(&shuffled));
        }
    }

    #[test]
    fn deterministic_and_lowercase() {
        let n = parse(".title t\n.input a ternary\n.output y\nM Z1 P LVT G=a S=VDD D=y\nM A1 N HVT G=a S=y D=GND\n").unwrap();
        let first = serialize(&n);
        assert_eq!(first, serialize(&n));
        let device_lines: Vec<&str> = first.lines().filter(|l| l.starts_with("M ")).collect();
        assert_eq!(device_lines, ["M A1 n hvt G=a S=y D=GND", "M Z1 p lvt G=a S=VDD D=y"]);
    }
}
