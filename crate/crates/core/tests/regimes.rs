// SPDX-License-Identifier: Apache-2.0

use cascade_core::chain::{diagnose_regime, CavityParams, ChainConfig, MechanicalSignal, Regime};
use cascade_core::fields::{gaussian_pulse, GridRule, PulseParams, TimeGrid};
use cascade_core::solver::{
    relative_energy_change, solve_direct, solve_on_grid, Method, SolverOptions,
};
use proptest::prelude::*;

fn strob_discrepancy(omega_tau: f64) -> f64 {
    let p = PulseParams::new(1.0, 1.0).unwrap();
    let cfg = ChainConfig::uniform(
        CavityParams::new(100.0, 20.0, 1.0).unwrap(),
        MechanicalSignal::continuous(1.0, omega_tau, 0.0, 1.0),
        2,
    )
    .unwrap();
    let grid = cfg.time_grid(&p, &GridRule::default()).unwrap();
    let opts = SolverOptions::default();
    let direct = solve_direct(&cfg, &p, &grid, &opts)
        .unwrap()
        .output_spectrum()
        .unwrap();
    solve_on_grid(&cfg, &p, Method::StrobWeak, &opts, &grid)
        .unwrap()
        .output_spectrum()
        .unwrap()
        .relative_l2(&direct)
        .unwrap()
}

#[test]
fn stroboscopic_error_grows_as_the_signal_speeds_up() {
    let d: Vec<f64> = [0.05, 0.2, 0.5, 2.0].into_iter().map(strob_discrepancy).collect();
    assert!(d.windows(2).all(|w| w[1] > w[0]), "{d:?}");
    assert!(d[0] < 1e-2, "{d:?}");
}

#[test]
fn diagnostics_follow_the_ratios() {
    let p = PulseParams::new(1.0, 1.0).unwrap();
    let cav = CavityParams::new(1e3, 0.0, 1.0).unwrap();
    let regime = |s: MechanicalSignal| {
        diagnose_regime(&ChainConfig::uniform(cav, s, 2).unwrap(), &p).regime
    };
    assert_eq!(regime(MechanicalSignal::constant(1.0, 1.0)), Regime::Stroboscopic);
    assert_eq!(
        regime(MechanicalSignal::burst(1.0, 50.0, 0.01, 0.0, 1.0)),
        Regime::CwFiniteSignal
    );
    assert_eq!(
        regime(MechanicalSignal::continuous(1.0, 50.0, 0.0, 1.0)),
        Regime::CwContinuousSignal
    );
    assert_eq!(
        regime(MechanicalSignal::continuous(1.0, 1.0, 0.0, 1.0)),
        Regime::NumericOnly
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // The memory kernel freezes Q over the window, so the lossless chain is
    // exactly energy preserving only for a static signal.
    #[test]
    fn direct_recursion_conserves_energy(
        delta in -20.0f64..20.0, g in 0.0f64..4.0, q in -1.0f64..1.0
    ) {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let cfg = ChainConfig::uniform(
            CavityParams::new(20.0, delta, g).unwrap(),
            MechanicalSignal::constant(q, 1.0),
            2,
        )
        .unwrap();
        let grid = TimeGrid::centered(5e-4, 1 << 15).unwrap();
        let sol = solve_direct(&cfg, &p, &grid, &SolverOptions::default()).unwrap();
        let input = gaussian_pulse(&p, &grid).unwrap();
        let dev = relative_energy_change(&sol.final_output_amplitude, &input).unwrap();
        prop_assert!(dev.abs() < 1e-3, "{dev}");
    }
}
