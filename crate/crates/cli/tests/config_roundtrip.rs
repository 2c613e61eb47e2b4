use proptest::prelude::*;
use stqm::config::{GridSpec, Scenario, ScenarioConfig};
use stqm_core::Branch;

fn grid() -> impl Strategy<Value = GridSpec> {
    (-1e3f64..1e3, 1e-6f64..1e3, 2usize..100_000).prop_map(|(a, w, n)| GridSpec::new(a, a + w, n))
}

fn config() -> impl Strategy<Value = ScenarioConfig> {
    let scenario = prop_oneof![Just(Scenario::Arrival), Just(Scenario::Stationary), Just(Scenario::BayesDemo)];
    let branch = prop_oneof![Just(Branch::Plus), Just(Branch::Minus), Just(Branch::Both)];
    let physics = (1e-3f64..1e3, 1e-3f64..1e3, 1e-3f64..1e2, 1e-4f64..10.0, -1e3f64..1e3);
    let rates = (1e-3f64..1e3, 0.0f64..1e3, 1e-3f64..1e3);
    let grids = (grid(), grid(), grid(), grid());
    let run = (prop::collection::vec(-1e3f64..1e3, 1..6), any::<u64>(), 1usize..1_000_000, "[a-z][a-z0-9_]{0,12}\\.csv");
    (scenario, branch, physics, rates, grids, run).prop_map(
        |(scenario, branch, (hbar, mass, p0, sigma, e_n), (lambda, gamma, omega), (p, t, x, eps), (x_list, seed, n_events, output))| {
            ScenarioConfig {
                scenario, hbar, mass, p0, sigma, branch, p, t, x, eps, e_n, lambda, gamma, omega, x_list, seed,
                n_events, output,
            }
        },
    )
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(cfg in config()) {
        let text = cfg.to_string();
        let back = ScenarioConfig::parse(&text, Scenario::Arrival).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_string(), text);
    }
}

#[test]
fn empty_file_gives_fallback_defaults() {
    let cfg = ScenarioConfig::parse("# nothing here\n\n", Scenario::Stationary).unwrap();
    assert_eq!(cfg, ScenarioConfig::defaults(Scenario::Stationary));
}
