use std::collections::BTreeMap;

use proptest::prelude::*;
use tritforge::genlib::{
    gen_gate, gen_pattern, gen_rca, gen_testbench, gen_tfa, gen_tha, Cascade, Completeness, GateKind, PatternKind,
    Style, StyleSpec,
};
use tritforge::netlist::serialize;
use tritforge::sim::{truth_table, InputDomain};
use tritforge::trit::{CarryEncoding, VoltageLevel};

fn families() -> Vec<(Completeness, CarryEncoding)> {
    vec![
        (Completeness::Complete, CarryEncoding::HalfVddHigh),
        (Completeness::Partial, CarryEncoding::HalfVddHigh),
        (Completeness::Partial, CarryEncoding::FullVddHigh),
    ]
}

#[test]
fn generators_pass_validation() {
    for kind in GateKind::ALL {
        assert!(gen_gate(kind).validate().is_empty(), "{kind:?}");
    }
    for style in Style::ALL {
        for cascade in [Cascade::Direct, Cascade::TwoTha] {
            for (c, e) in families() {
                let n = gen_tfa(&StyleSpec::new(style, c, e, cascade)).unwrap();
                assert!(n.validate().is_empty(), "{style} {cascade:?} {c:?} {e:?}");
                assert!(gen_testbench(&n).validate().is_empty());
            }
        }
        for e in [CarryEncoding::HalfVddHigh, CarryEncoding::FullVddHigh] {
            assert!(gen_tha(style, e).validate().is_empty());
        }
        let spec = StyleSpec::new(style, Completeness::Partial, CarryEncoding::FullVddHigh, Cascade::TwoTha);
        assert!(gen_rca(2, &spec).unwrap().validate().is_empty());
    }
}

#[test]
fn styles_agree_on_truth() {
    for cascade in [Cascade::Direct, Cascade::TwoTha] {
        for (c, e) in families() {
            let tables: Vec<_> = Style::ALL
                .iter()
                .map(|&s| {
                    let n = gen_tfa(&StyleSpec::new(s, c, e, cascade)).unwrap();
                    truth_table(&n, &InputDomain::declared(&n)).unwrap().decoded(&n).unwrap()
                })
                .collect();
            assert!(tables.windows(2).all(|w| w[0] == w[1]), "{cascade:?} {c:?} {e:?}");
        }
    }
}

#[test]
fn generation_is_deterministic() {
    for style in Style::ALL {
        let spec = StyleSpec::new(style, Completeness::Complete, CarryEncoding::HalfVddHigh, Cascade::TwoTha);
        assert_eq!(serialize(&gen_tfa(&spec).unwrap()), serialize(&gen_tfa(&spec).unwrap()));
    }
}

#[test]
fn testbench_preserves_function() {
    let spec = StyleSpec::new(Style::NtPt, Completeness::Partial, CarryEncoding::FullVddHigh, Cascade::Direct);
    let dut = gen_tfa(&spec).unwrap();
    let tb = gen_testbench(&dut);
    let a = truth_table(&dut, &InputDomain::declared(&dut)).unwrap();
    let b = truth_table(&tb, &InputDomain::declared(&tb)).unwrap();
    assert_eq!(a.rows, b.rows);
    // four first stages per output
    let fo4 = tb.devices.iter().filter(|d| d.gate == "sum").count();
    assert_eq!(fo4, 8);
}

proptest! {
    #[test]
    fn complete_walk_covers_every_ordered_pair(sizes in prop::collection::vec(1usize..=3, 1..=3)) {
        let domains: Vec<(String, Vec<VoltageLevel>)> = sizes
            .iter()
            .enumerate()
            .map(|(i, &k)| (format!("x{i}"), VoltageLevel::ALL[..k].to_vec()))
            .collect();
        let p = gen_pattern(&domains, PatternKind::CompleteTransitions);
        let states: usize = sizes.iter().product();
        let mut seen: BTreeMap<(Vec<VoltageLevel>, Vec<VoltageLevel>), usize> = BTreeMap::new();
        for (a, b) in p.transitions() {
            prop_assert_ne!(a, b);
            *seen.entry((a.to_vec(), b.to_vec())).or_default() += 1;
        }
        prop_assert_eq!(p.transition_count(), states * (states - 1));
        prop_assert_eq!(seen.len(), states * (states - 1));
        prop_assert!(seen.values().all(|&k| k == 1));
    }
}
