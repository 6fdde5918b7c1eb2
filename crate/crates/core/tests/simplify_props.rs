mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tritforge::sim::InputDomain;
use tritforge::simplify::{apply_assumption, factor_parallel, prune_dead, simplify_pipeline};

use common::{assumed_domain, random_assumption, random_netlist, refines};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn assumption_is_exact_on_the_assumed_domain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_netlist(&mut rng);
        let a = random_assumption(&mut rng, &n);
        let (out, report) = apply_assumption(&n, &a).unwrap();
        prop_assert!(out.devices.len() <= n.devices.len());
        prop_assert!(report.wired + report.opened + report.remapped <= n.devices.len());
        let r = refines(&n, &out, &assumed_domain(&n, &a));
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn prune_and_factor_are_exact_everywhere(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_netlist(&mut rng);
        let full = InputDomain::declared(&n);
        let (pruned, _) = prune_dead(&n);
        let r = refines(&n, &pruned, &full);
        prop_assert!(r.is_ok(), "prune: {}", r.unwrap_err());
        let (again, report) = prune_dead(&pruned);
        prop_assert!(report.is_empty());
        prop_assert_eq!(again, pruned);
        let (factored, _) = factor_parallel(&n);
        let r = refines(&n, &factored, &full);
        prop_assert!(r.is_ok(), "factor: {}", r.unwrap_err());
    }

    #[test]
    fn pipeline_is_sound_and_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_netlist(&mut rng);
        let a = random_assumption(&mut rng, &n);
        let (once, _) = simplify_pipeline(&n, &a, None).unwrap();
        prop_assert!(once.devices.len() <= n.devices.len());
        let r = refines(&n, &once, &assumed_domain(&n, &a));
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
        let (twice, _) = simplify_pipeline(&once, &a, None).unwrap();
        prop_assert_eq!(twice, once);
    }
}
