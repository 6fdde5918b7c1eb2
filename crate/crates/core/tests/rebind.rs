use tritforge::genlib::{gen_tfa, Cascade, Completeness, Style, StyleSpec};
use tritforge::sim::{sweep_states, truth_table, InputDomain};
use tritforge::simplify::{simplify_pipeline, AssumptionDomain};
use tritforge::trit::{full_add_complete, CarryEncoding, SignalEncoding};

#[test]
fn complete_cells_become_binary_carry_partials() {
    for style in Style::ALL {
        for cascade in [Cascade::Direct, Cascade::TwoTha] {
            let full = gen_tfa(&StyleSpec::new(style, Completeness::Complete, CarryEncoding::HalfVddHigh, cascade)).unwrap();
            let a = AssumptionDomain::new("cin", SignalEncoding::HalfVddHigh);
            let (part, report) = simplify_pipeline(&full, &a, Some("carry")).unwrap();
            let tag = format!("{style} {cascade:?}");
            assert!(part.devices.len() < full.devices.len(), "{tag}");
            assert!(report.wired + report.opened > 0, "{tag}");
            assert_eq!(part.input_domain("cin"), Some(SignalEncoding::FullVddHigh), "{tag}");
            assert_eq!(part.output_encoding("carry"), Some(SignalEncoding::FullVddHigh), "{tag}");
            assert!(part.validate().is_empty(), "{tag}: {:?}", part.validate());

            let states = sweep_states(&part, &InputDomain::declared(&part));
            assert_eq!(states.len(), 18);
            for (p, r) in states {
                assert!(!r.unwrap().division_events.contains("carry"), "{tag} at {p:?}");
            }
            let rows = truth_table(&part, &InputDomain::declared(&part)).unwrap().decoded(&part).unwrap();
            for (ins, outs) in rows {
                let (c, s) = full_add_complete(ins[0], ins[1], ins[2]);
                assert_eq!(outs, [s, c], "{tag}");
            }
        }
    }
}

#[test]
fn rebinding_a_half_carry_partial() {
    for style in Style::ALL {
        let spec = StyleSpec::new(style, Completeness::Partial, CarryEncoding::HalfVddHigh, Cascade::Direct);
        let n = gen_tfa(&spec).unwrap();
        let a = AssumptionDomain::new("cin", SignalEncoding::HalfVddHigh);
        let (out, _) = simplify_pipeline(&n, &a, Some("carry")).unwrap();
        assert!(out.devices.len() <= n.devices.len(), "{style}");
        for (_, r) in sweep_states(&out, &InputDomain::declared(&out)) {
            assert!(!r.unwrap().division_events.contains("carry"), "{style}");
        }
    }
}
