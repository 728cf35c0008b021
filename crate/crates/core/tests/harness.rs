use cutcover::harness::{evaluate, harness_cases, property_harness, shrink, shrink_candidates, Fault, HarnessConfig, Outcome};

fn fails(outcomes: &[(String, Outcome)], property: &str) -> bool {
    outcomes.iter().any(|(n, o)| n == property && matches!(o, Outcome::Fail(_)))
}

#[test]
fn seed_one_hundred_instances_pass() {
    let report = property_harness(HarnessConfig::new(1, 100));
    assert!(report.passed(), "{:?}", report.failing());
    assert_eq!(report.config.seed, 1);
    for p in &report.properties {
        assert!(p.instances_run > 0, "{} never ran", p.name);
    }
}

#[test]
fn skipping_reverse_delete_breaks_minimality() {
    let mut config = HarnessConfig::new(1, 100);
    config.fault = Fault::SkipReverseDelete;
    let report = property_harness(config);
    assert!(report.property("wgmv.minimal").unwrap().failures > 0);
    assert!(report.property("wgmv-half.minimal").unwrap().failures > 0);
    assert_eq!(report.property("gw.approximation").unwrap().failures, 0);
}

#[test]
fn skipping_reductions_breaks_half_integrality() {
    let mut config = HarnessConfig::new(1, 100);
    config.fault = Fault::SkipReductions;
    config.shrink = false;
    let report = property_harness(config);
    assert_eq!(report.failing(), vec!["wgmv-half.half-integral"]);
}

#[test]
fn shrunk_witnesses_are_locally_minimal() {
    let config = HarnessConfig::new(2, 40);
    let mut checked = 0;
    for (fault, property) in [(Fault::SkipReductions, "wgmv-half.half-integral"), (Fault::SkipReverseDelete, "wgmv.minimal")] {
        for case in harness_cases(&config) {
            if !fails(&evaluate(&case, fault), property) {
                continue;
            }
            let (small, _) = shrink(&case, fault, property);
            assert!(fails(&evaluate(&small, fault), property));
            for smaller in shrink_candidates(&small) {
                assert!(!fails(&evaluate(&smaller, fault), property));
            }
            checked += 1;
            break;
        }
    }
    assert_eq!(checked, 2);
}

#[test]
fn reports_are_deterministic() {
    let a = property_harness(HarnessConfig::new(9, 20));
    let b = property_harness(HarnessConfig::new(9, 20));
    assert_eq!(a, b);
}
