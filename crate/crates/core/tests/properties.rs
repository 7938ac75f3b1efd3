use std::f64::consts::PI;

use proptest::prelude::*;

use microrev::channel::{
    backward_prob_closed, backward_prob_numeric, deviation_factor, evolve_system, forward_prob_closed,
    forward_prob_numeric,
};
use microrev::photonics::{self, simulate_shots};
use microrev::states::{bloch_ket, time_reverse};
use microrev::sweeps::{diagonal_cut, gamma_curve, SweepPoint};
use microrev::{
    BlochState, ChannelParams, EnergySpec, Evaluation, Regime, ShotConfig, ThermalReservoir, TransitionCase,
};

fn state() -> impl Strategy<Value = BlochState> {
    (0.0..=PI, -PI..PI).prop_map(|(t, p)| BlochState::new(t, p).unwrap())
}

fn real_state() -> impl Strategy<Value = BlochState> {
    (0.0..=PI).prop_map(|t| BlochState::new(t, 0.0).unwrap())
}

fn reservoir() -> impl Strategy<Value = ThermalReservoir> {
    (0.0..20.0f64).prop_map(|x| ThermalReservoir::new(x).unwrap())
}

fn channel() -> impl Strategy<Value = ChannelParams> {
    (0.0..=1.0f64).prop_map(|p| ChannelParams::new(p).unwrap())
}

proptest! {
    #[test]
    fn probabilities_are_bounded(i in state(), f in state(), r in reservoir(), c in channel()) {
        for v in [
            forward_prob_closed(&i, &f, c, &r).unwrap(),
            backward_prob_closed(&i, &f, c, &r).unwrap(),
        ] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn closed_forms_match_trace(i in state(), f in state(), r in reservoir(), c in channel()) {
        let df = forward_prob_closed(&i, &f, c, &r).unwrap() - forward_prob_numeric(&i, &f, c, &r).unwrap();
        let db = backward_prob_closed(&i, &f, c, &r).unwrap() - backward_prob_numeric(&i, &f, c, &r).unwrap();
        prop_assert!(df.abs() < 1e-9 && db.abs() < 1e-9);
    }

    #[test]
    fn orthogonal_outcomes_sum_to_one(i in state(), f in state(), r in reservoir(), c in channel()) {
        let a = forward_prob_closed(&i, &f, c, &r).unwrap();
        let b = forward_prob_closed(&i, &f.orthogonal(), c, &r).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn backward_is_reversed_forward(i in state(), f in state(), r in reservoir(), c in channel()) {
        let pb = backward_prob_closed(&i, &f, c, &r).unwrap();
        let pf = forward_prob_closed(&time_reverse(&f), &time_reverse(&i), c, &r).unwrap();
        prop_assert!((pb - pf).abs() < 1e-12);
    }

    #[test]
    fn evolved_state_is_physical(i in state(), r in reservoir(), c in channel()) {
        let rho = evolve_system(&i, c, &r);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.eigenvalues().iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn report_has_no_nan(i in state(), f in state(), r in reservoir(), c in channel()) {
        let rep = deviation_factor(&i, &f, c, &r, &EnergySpec::default()).unwrap();
        prop_assert!(!rep.deviation.is_nan() && !rep.ratio.is_nan());
        prop_assert_eq!(rep.deviation.is_infinite(), rep.diverged);
    }

    #[test]
    fn regime_swap_inverts_gamma(ci in 0.0..=1.0f64, cf in 0.0..=1.0f64, x in 0.0..6.0f64, p in 0.05..=0.95f64) {
        let point = SweepPoint::new(x, p).unwrap();
        let release = point.gamma(Regime::HeatRelease, ci, cf).unwrap();
        let absorb = point.gamma(Regime::HeatAbsorb, cf, ci).unwrap();
        prop_assert!((release * absorb - 1.0).abs() < 1e-10);
    }

    #[test]
    fn numeric_and_closed_sweeps_agree(ci in 0.0..=1.0f64, cf in 0.0..=1.0f64, x in 0.0..6.0f64) {
        let closed = SweepPoint::new(x, 0.5).unwrap();
        let numeric = SweepPoint { evaluation: Evaluation::Numeric, ..closed };
        for regime in [Regime::HeatRelease, Regime::HeatAbsorb] {
            let a = closed.row(regime, ci, cf).unwrap();
            let b = numeric.row(regime, ci, cf).unwrap();
            prop_assert!((a.gamma - b.gamma).abs() < 1e-8 * a.gamma.max(1.0));
        }
    }

    #[test]
    fn twin_matches_channel(i in real_state(), f in real_state(), r in reservoir(), c in channel()) {
        let (tf, tb) = photonics::transition_probabilities(&i, &f, &r, c).unwrap();
        prop_assert!((tf - forward_prob_closed(&i, &f, c, &r).unwrap()).abs() < 1e-10);
        prop_assert!((tb - backward_prob_closed(&i, &f, c, &r).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn pipeline_preserves_norm(i in real_state(), r in reservoir(), c in channel()) {
        let x = photonics::param_map(&i, &r, c).unwrap();
        for s in photonics::element_pipeline(&x).unwrap() {
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shot_counts_conserve_total(p in 0.0..=1.0f64, n in 1u64..100_000, seed in any::<u64>()) {
        let out = simulate_shots(&[p, 1.0 - p], &ShotConfig::new(n, seed).unwrap()).unwrap();
        prop_assert_eq!(out.counts.iter().sum::<u64>() + out.discarded, n);
    }

    #[test]
    fn kets_are_normalized(s in state()) {
        let norm: f64 = bloch_ket(&s).amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-14);
    }
}

#[test]
fn coherent_curves_approach_one_when_hot() {
    let betas: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
    for case in [TransitionCase::CoherentToExcited, TransitionCase::CoherentToCoherent] {
        let rows = gamma_curve(&case, &betas, 0.5).unwrap();
        assert!((rows[0].gamma - 1.0).abs() < 1e-12);
        // over the lowest decade the deviation from 1 shrinks monotonically toward zero
        let low: Vec<f64> = rows.iter().take(11).map(|r| (r.gamma - 1.0).abs()).collect();
        assert!(low.windows(2).all(|w| w[0] <= w[1]), "{case:?}: {low:?}");
    }
}

#[test]
fn diagonal_cuts_are_reciprocal() {
    let release = diagonal_cut(2.0, 0.5, Regime::HeatRelease, 101).unwrap();
    let absorb = diagonal_cut(2.0, 0.5, Regime::HeatAbsorb, 101).unwrap();
    for (a, b) in release.iter().zip(&absorb) {
        assert!((a.gamma * b.gamma - 1.0).abs() < 1e-10);
    }
}
