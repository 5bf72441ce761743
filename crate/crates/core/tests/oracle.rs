use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use coopeq::coopeq::{v_npd, v_pgg};
use coopeq::oracle::{best_response, generic_forecast, verify_equilibrium, GridSearchConfig};
use coopeq::{forecast, solve, CoalitionStructure, Error, GameSpec, SymmetricAction};

fn cfg() -> GridSearchConfig {
    GridSearchConfig::default()
}

#[test]
fn small_pgg_enumeration() {
    let spec = GameSpec::pgg(4, 0.5);
    let g = generic_forecast(&spec, CoalitionStructure::FullyCooperative, &cfg()).unwrap();
    assert_abs_diff_eq!(g.forecast, v_pgg(0.5, 4).unwrap(), epsilon = 1e-9);
    assert_abs_diff_eq!(g.forecast, 0.9444, epsilon = 1e-4);
}

#[test]
fn npd_enumeration() {
    let selfish = generic_forecast(&GameSpec::npd(2, 0.3, 0.1), CoalitionStructure::Selfish, &cfg()).unwrap();
    assert_eq!(selfish.forecast, 0.0);
    let five = GameSpec::npd(5, 0.3, 0.1);
    let g = generic_forecast(&five, CoalitionStructure::FullyCooperative, &cfg()).unwrap();
    assert_abs_diff_eq!(g.forecast, v_npd(0.3, 0.1, 5).unwrap(), epsilon = 1e-6);
}

#[test]
fn enumeration_cap() {
    let spec = GameSpec::pgg(13, 0.5);
    assert!(matches!(
        generic_forecast(&spec, CoalitionStructure::FullyCooperative, &cfg()),
        Err(Error::TooManyPlayers { n: 13, cap: 12 })
    ));
}

#[test]
fn verify_table_predictions() {
    for spec in [GameSpec::pgg(40, 0.5), GameSpec::npd(2, 0.3, 0.1), GameSpec::npd(11, 0.3, 0.1)] {
        let p = solve(&spec).unwrap();
        let check = verify_equilibrium(&spec, &p, &cfg()).unwrap();
        assert!(check.passed, "{spec:?}: {check:?}");
        assert!(check.payoff_shortfall < 1e-6);
    }
}

#[test]
fn dominance() {
    for spec in [GameSpec::pgg(5, 0.5), GameSpec::npd(5, 0.3, 0.1)] {
        for k in 0..=10 {
            let others = SymmetricAction::new(&spec, k as f64 / 10.0).unwrap();
            assert_eq!(best_response(&spec, others, &cfg()).unwrap(), 0.0);
        }
    }
}

fn small_game() -> impl Strategy<Value = GameSpec> {
    prop_oneof![
        (3usize..=8, 0.0f64..1.0).prop_map(|(n, t)| {
            let lo = 1.0 / n as f64;
            GameSpec::pgg(n, lo + (1.0 - lo) * (0.02 + 0.96 * t))
        }),
        (2usize..=8, 0.05f64..1.0, 1.05f64..5.0).prop_map(|(n, c, ratio)| GameSpec::npd(n, c * ratio, c)),
        (3usize..=8, 0.0f64..1.0).prop_map(|(n, t)| GameSpec::general_pgg(n, 1.0 + (n as f64 - 1.0) * (0.02 + 0.96 * t))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_closed_form(spec in small_game()) {
        for structure in CoalitionStructure::ALL {
            let closed = forecast(&spec, structure).unwrap();
            let generic = generic_forecast(&spec, structure, &cfg()).unwrap();
            prop_assert!((closed.forecast - generic.forecast).abs() < 1e-6,
                "{:?} {:?}: {} vs {}", spec, structure, closed.forecast, generic.forecast);
        }
        let p = solve(&spec).unwrap();
        prop_assert!(verify_equilibrium(&spec, &p, &cfg()).unwrap().passed);
    }
}
