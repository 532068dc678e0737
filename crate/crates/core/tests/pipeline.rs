use ismquant::antichain::{build_lambda, DEFAULT_WORD_BUDGET};
use ismquant::dimension::{classify_regime, Regime};
use ismquant::ifs::{CondensationSystem, OscStatus};
use ismquant::measure::{discretize_mu, DEFAULT_ATOM_BUDGET};
use ismquant::quantizer::{check_error_sandwich, eval_error, optimal_1d};
use ismquant::reference;
use ismquant::weights::decompose;
use ismquant::Error;
use proptest::prelude::*;

const C13_JSON: &str = include_str!("../../../configs/c13.json");

#[test]
fn shipped_config_is_c13() {
    let sys = CondensationSystem::from_json(C13_JSON).unwrap();
    assert_eq!(sys.osc(), OscStatus::VerifiedInterval);
    let rep = classify_regime(&sys, 2.0).unwrap();
    assert!((rep.xi1 - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
    assert!((rep.xi2 - 2.0 * 2f64.ln() / 11.25f64.ln()).abs() < 1e-10);
    assert_eq!(rep.regime, Regime::Xi1GtXi2);
}

#[test]
fn overlapping_maps_need_an_osc_assertion() {
    let json = |asserted: bool| {
        format!(
            r#"{{"dim":1,"maps":[{{"scale":0.6,"translation":[0]}},{{"scale":0.6,"translation":[0.4]}}],
               "t":[0.5,0.5],"p0":0.2,"p":[0.4,0.4],"osc_asserted":{asserted}}}"#
        )
    };
    let unknown = CondensationSystem::from_json(&json(false)).unwrap();
    assert_eq!(unknown.osc(), OscStatus::Unknown);
    assert!(matches!(discretize_mu(&unknown, 3, 100), Err(Error::OscUnknown)));
    let asserted = CondensationSystem::from_json(&json(true)).unwrap();
    assert_eq!(asserted.osc(), OscStatus::Asserted);
    assert_eq!(discretize_mu(&asserted, 3, 100).unwrap().len(), 8);
}

#[test]
fn antichain_masses_split_into_both_parts() {
    let sys = reference::c13();
    for k in [1, 18, 400] {
        let lam = build_lambda(&sys, 2.0, k, DEFAULT_WORD_BUDGET).unwrap();
        let splits = decompose(&sys, &lam.word_list()).unwrap();
        let total: f64 = splits.iter().map(|m| m.mu1 + m.mu2).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn optimizer_error_is_reproduced_by_evaluation() {
    let atoms = discretize_mu(&reference::c13(), 9, DEFAULT_ATOM_BUDGET).unwrap();
    for (n, r) in [(3, 2.0), (5, 1.0), (7, 3.0)] {
        let q = optimal_1d(&atoms, n, r).unwrap();
        assert_eq!(eval_error(&atoms, &q.codebook, r).unwrap(), q.error);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // one codebook point per cylinder of Λ costs at most Σ μ(E_σ) s_σ^r
    #[test]
    fn sandwich_upper_bound_on_random_systems(
        s1 in 0.15f64..0.45,
        s2 in 0.15f64..0.45,
        t1 in 0.1f64..0.9,
        p0 in 0.05f64..0.8,
        w1 in 0.1f64..0.9,
        r in prop::sample::select(vec![1.0, 2.0]),
    ) {
        let sys = reference::packed_line(
            &[s1, s2],
            vec![t1, 1.0 - t1],
            p0,
            vec![(1.0 - p0) * w1, (1.0 - p0) * (1.0 - w1)],
        ).unwrap();
        let report = check_error_sandwich(&sys, r, &[1, 5, 25], 10).unwrap();
        for row in &report.rows {
            prop_assert!(row.upper_ok, "{row:?}");
            prop_assert!(row.log_ratio.is_finite());
        }
    }
}
