//! Generalized amplitude damping: the joint system-reservoir unitary,
//! forward and backward transition probabilities, the microreversibility
//! ratio and the deviation factor Γ.
//!
//! Every probability has two routes. The `*_numeric` functions compose the
//! 4×4 operators explicitly and take the trace; the `*_closed` functions
//! evaluate the analytic expressions. The two are kept independent so each
//! one checks the other.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    expectation, partial_trace, tensor, ComplexMatrix, DensityMatrix, ALGEBRAIC_TOL,
};
use crate::states::{bloch_ket, heat, thermal_state, time_reverse, BlochState, EnergySpec, ThermalReservoir};

/// Backward probabilities at or below this are treated as zero and the
/// ratio is reported as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-300;

/// Damping strength `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    p: f64,
}

impl ChannelParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                range: "[0, 1]",
            });
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Time constant of the damping schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMap {
    tau: f64,
}

impl TimeMap {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::OutOfRange {
                name: "tau",
                value: tau,
                range: "(0, inf)",
            });
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// `p = exp(-t/τ)`.
///
/// Implemented exactly in this form: `t = 0` yields `p = 1` and long times
/// approach the identity channel.
pub fn p_from_time(t: f64, m: &TimeMap) -> Result<ChannelParams> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    ChannelParams::new((-t / m.tau).exp())
}

/// Joint unitary in the basis `|g,E_g>, |g,E_e>, |e,E_g>, |e,E_e>`: a real
/// rotation mixing `|g,E_e>` and `|e,E_g>`.
pub fn gadc_unitary(c: ChannelParams) -> ComplexMatrix {
    let s = c.p.sqrt();
    let k = (1.0 - c.p).sqrt();
    #[rustfmt::skip]
    let entries = [
        1.0, 0.0, 0.0, 0.0,
        0.0,   k,   s, 0.0,
        0.0,  -s,   k, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ];
    ComplexMatrix::from_real(4, &entries).expect("16 entries")
}

/// Accepts float dust just outside `[0, 1]`, clamping it; anything larger
/// is a formula bug.
pub(crate) fn checked_probability(v: f64, context: &'static str) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if (-ALGEBRAIC_TOL..=1.0 + ALGEBRAIC_TOL).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::ProbabilityOutOfRange { value: v, context })
    }
}

/// `U (ρ_start ⊗ ρ_th) U†` for a pure system start state.
fn evolve_joint_with(u: &ComplexMatrix, start: &BlochState, r: &ThermalReservoir) -> DensityMatrix {
    bloch_ket(start)
        .density()
        .tensor(&thermal_state(r))
        .conjugate_by(u)
        .expect("4x4 operands")
}

/// Joint state after the forward evolution.
pub fn evolve_joint(initial: &BlochState, c: ChannelParams, r: &ThermalReservoir) -> DensityMatrix {
    evolve_joint_with(&gadc_unitary(c), initial, r)
}

/// Reduced system state after the forward evolution.
pub fn evolve_system(initial: &BlochState, c: ChannelParams, r: &ThermalReservoir) -> DensityMatrix {
    partial_trace(&evolve_joint(initial, c, r), 0, &[2, 2]).expect("2x2 factors")
}

/// `Tr[ρ_SE (|ψ><ψ| ⊗ I_R)]`.
fn project_system(rho_se: &DensityMatrix, target: &BlochState, context: &'static str) -> Result<f64> {
    let observable = tensor(&bloch_ket(target).projector(), &ComplexMatrix::identity(2));
    let tr: Complex64 = expectation(rho_se, &observable)?;
    if tr.im.abs() > ALGEBRAIC_TOL {
        return Err(Error::ComplexTrace { imag: tr.im, context });
    }
    checked_probability(tr.re, context)
}

/// Forward transition probability by explicit operator composition.
pub fn forward_prob_numeric(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
) -> Result<f64> {
    let rho = evolve_joint_with(&gadc_unitary(c), initial, r);
    project_system(&rho, final_, "forward trace")
}

/// Backward transition probability by explicit operator composition: start
/// from the time-reversed final state, evolve with `U†`, and project on the
/// time-reversed initial state.
pub fn backward_prob_numeric(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
) -> Result<f64> {
    let reverse = gadc_unitary(c).dagger();
    let rho = evolve_joint_with(&reverse, &time_reverse(final_), r);
    project_system(&rho, &time_reverse(initial), "backward trace")
}

/// `1 + √(1-p) sin θ_i sin θ_f cos(φ_i - φ_f)`, shared by both probabilities.
pub fn gamma_small(initial: &BlochState, final_: &BlochState, c: ChannelParams) -> f64 {
    1.0 + (1.0 - c.p).sqrt()
        * initial.theta().sin()
        * final_.theta().sin()
        * (initial.phi() - final_.phi()).cos()
}

/// `cos θ_b [(1-p) cos θ_a + (1-2w_e) p]`: the population part of the
/// transition from a state at polar angle `a` to one at `b`.
fn population_term(theta_a: f64, theta_b: f64, p: f64, w_e: f64) -> f64 {
    theta_b.cos() * ((1.0 - p) * theta_a.cos() + (1.0 - 2.0 * w_e) * p)
}

/// Forward transition probability in closed form.
pub fn forward_prob_closed(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
) -> Result<f64> {
    let v = 0.5 * (population_term(initial.theta(), final_.theta(), c.p, r.w_e()) + gamma_small(initial, final_, c));
    checked_probability(v, "forward closed form")
}

/// Backward transition probability in closed form; the forward expression
/// with the roles of `θ_i` and `θ_f` exchanged in the population term.
pub fn backward_prob_closed(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
) -> Result<f64> {
    let v = 0.5 * (population_term(final_.theta(), initial.theta(), c.p, r.w_e()) + gamma_small(initial, final_, c));
    checked_probability(v, "backward closed form")
}

/// Which route evaluates the transition probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Evaluation {
    #[default]
    Closed,
    Numeric,
}

impl Evaluation {
    pub fn probabilities(
        self,
        initial: &BlochState,
        final_: &BlochState,
        c: ChannelParams,
        r: &ThermalReservoir,
    ) -> Result<(f64, f64)> {
        match self {
            Evaluation::Closed => Ok((
                forward_prob_closed(initial, final_, c, r)?,
                backward_prob_closed(initial, final_, c, r)?,
            )),
            Evaluation::Numeric => Ok((
                forward_prob_numeric(initial, final_, c, r)?,
                backward_prob_numeric(initial, final_, c, r)?,
            )),
        }
    }
}

/// Forward/backward quotient together with the shared γ term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrorevRatio {
    pub p_forward: f64,
    pub p_backward: f64,
    /// `P_F / P_B`, or `+inf` when diverged.
    pub ratio: f64,
    pub gamma_small: f64,
    pub diverged: bool,
}

fn ratio_from(p_forward: f64, p_backward: f64, gamma_small: f64) -> MicrorevRatio {
    let diverged = p_backward <= DIVERGENCE_THRESHOLD;
    MicrorevRatio {
        p_forward,
        p_backward,
        ratio: if diverged { f64::INFINITY } else { p_forward / p_backward },
        gamma_small,
        diverged,
    }
}

pub fn microrev_ratio(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
) -> Result<MicrorevRatio> {
    microrev_ratio_with(initial, final_, c, r, Evaluation::Closed)
}

pub fn microrev_ratio_with(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
    eval: Evaluation,
) -> Result<MicrorevRatio> {
    let (pf, pb) = eval.probabilities(initial, final_, c, r)?;
    Ok(ratio_from(pf, pb, gamma_small(initial, final_, c)))
}

/// Classical microreversibility ratio `exp(-βQ)`.
pub fn classical_ratio(beta_q: f64) -> f64 {
    (-beta_q).exp()
}

/// Every scalar of one forward/backward pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub p_forward: f64,
    pub p_backward: f64,
    pub ratio: f64,
    pub gamma_small: f64,
    /// Heat absorbed by the system in energy units.
    pub q_heat: f64,
    /// Deviation factor Γ = ratio · exp(βQ).
    pub deviation: f64,
    pub classical_ratio: f64,
    pub diverged: bool,
}

pub fn deviation_factor(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
    e: &EnergySpec,
) -> Result<TransitionReport> {
    deviation_factor_with(initial, final_, c, r, e, Evaluation::Closed)
}

pub fn deviation_factor_with(
    initial: &BlochState,
    final_: &BlochState,
    c: ChannelParams,
    r: &ThermalReservoir,
    e: &EnergySpec,
    eval: Evaluation,
) -> Result<TransitionReport> {
    let m = microrev_ratio_with(initial, final_, c, r, eval)?;
    let q_heat = heat(initial, final_, e);
    let beta_q = r.beta_delta_e() * (q_heat / e.delta_e());
    let deviation = if m.diverged {
        f64::INFINITY
    } else {
        m.ratio * beta_q.exp()
    };
    Ok(TransitionReport {
        p_forward: m.p_forward,
        p_backward: m.p_backward,
        ratio: m.ratio,
        gamma_small: m.gamma_small,
        q_heat,
        deviation,
        classical_ratio: classical_ratio(beta_q),
        diverged: m.diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn st(theta: f64, phi: f64) -> BlochState {
        BlochState::new(theta, phi).unwrap()
    }

    fn cp(p: f64) -> ChannelParams {
        ChannelParams::new(p).unwrap()
    }

    fn res(b: f64) -> ThermalReservoir {
        ThermalReservoir::new(b).unwrap()
    }

    #[test]
    fn unitary_limits() {
        assert_eq!(gadc_unitary(cp(0.0)), ComplexMatrix::identity(4));
        let u = gadc_unitary(cp(1.0));
        assert_eq!(u.get(1, 1).re, 0.0);
        assert_eq!(u.get(1, 2).re, 1.0);
        assert_eq!(u.get(2, 1).re, -1.0);
        assert_eq!(u.get(2, 2).re, 0.0);
        for p in [0.0, 0.37, 0.5, 1.0] {
            assert!(gadc_unitary(cp(p)).is_unitary(1e-14));
        }
    }

    #[test]
    fn channel_params_validated() {
        assert!(ChannelParams::new(-0.01).is_err());
        assert!(ChannelParams::new(1.01).is_err());
        assert!(ChannelParams::new(f64::NAN).is_err());
    }

    #[test]
    fn time_schedule() {
        let m = TimeMap::new(2.0).unwrap();
        assert_eq!(p_from_time(0.0, &m).unwrap().p(), 1.0);
        assert_abs_diff_eq!(p_from_time(2.0, &m).unwrap().p(), (-1f64).exp(), epsilon = 1e-15);
        assert!(p_from_time(1e6, &m).unwrap().p() < 1e-100);
        assert!(p_from_time(-1.0, &m).is_err());
        assert!(TimeMap::new(0.0).is_err());
    }

    #[test]
    fn ground_to_excited() {
        let (g, e) = (BlochState::ground(), BlochState::excited());
        for p in [0.1, 0.5, 0.9] {
            let r = res(1.3);
            let pf_n = forward_prob_numeric(&g, &e, cp(p), &r).unwrap();
            let pf_c = forward_prob_closed(&g, &e, cp(p), &r).unwrap();
            assert_abs_diff_eq!(pf_n, r.w_e() * p, epsilon = 1e-14);
            assert_abs_diff_eq!(pf_c, r.w_e() * p, epsilon = 1e-14);
            let pb_n = backward_prob_numeric(&g, &e, cp(p), &r).unwrap();
            assert_abs_diff_eq!(pb_n, r.w_g() * p, epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_channel() {
        let r = res(0.8);
        let s = st(1.2, 0.4);
        assert_abs_diff_eq!(forward_prob_numeric(&s, &s, cp(0.0), &r).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(forward_prob_numeric(&s, &s.orthogonal(), cp(0.0), &r).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(backward_prob_numeric(&s, &s, cp(0.0), &r).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_to_excited_specialization() {
        let r = res(2.0);
        let d = BlochState::equator(0.0);
        let e = BlochState::excited();
        for p in [0.2, 0.5, 0.8] {
            let expected = (1.0 - (1.0 - 2.0 * r.w_e()) * p) / 2.0;
            assert_abs_diff_eq!(forward_prob_closed(&d, &e, cp(p), &r).unwrap(), expected, epsilon = 1e-15);
            assert_abs_diff_eq!(forward_prob_numeric(&d, &e, cp(p), &r).unwrap(), expected, epsilon = 1e-14);
            assert_abs_diff_eq!(backward_prob_closed(&d, &e, cp(p), &r).unwrap(), 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn backward_from_equator() {
        let r = res(1.0);
        let d = BlochState::equator(0.0);
        for theta_f in [0.3, 1.0, 2.0, PI] {
            let f = st(theta_f, 0.0);
            for p in [0.1f64, 0.6] {
                let expected = (1.0 + (1.0 - p).sqrt() * theta_f.sin()) / 2.0;
                assert_abs_diff_eq!(backward_prob_closed(&d, &f, cp(p), &r).unwrap(), expected, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(backward_prob_closed(&d, &d, cp(1.0), &r).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let (g, e) = (BlochState::ground(), BlochState::excited());
        for b in [0.5, 1.0, 2.0] {
            for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let m = microrev_ratio(&g, &e, cp(p), &res(b)).unwrap();
                assert_abs_diff_eq!(m.ratio, (-b).exp(), epsilon = 1e-12);
            }
        }
        let d = BlochState::equator(0.0);
        assert_abs_diff_eq!(microrev_ratio(&d, &d, cp(0.4), &res(3.0)).unwrap().ratio, 1.0, epsilon = 1e-15);
        let m = microrev_ratio(&st(0.4, 1.0), &st(2.9, -0.3), cp(0.6), &res(0.0)).unwrap();
        assert_abs_diff_eq!(m.ratio, 1.0, epsilon = 1e-14);
        let expected_gamma = 1.0 + 0.4f64.sqrt() * 0.4f64.sin() * 2.9f64.sin() * 1.3f64.cos();
        assert_abs_diff_eq!(m.gamma_small, expected_gamma, epsilon = 1e-15);
    }

    #[test]
    fn deviation_examples() {
        let e = EnergySpec::default();
        let (g, x) = (BlochState::ground(), BlochState::excited());
        for b in [0.3, 2.0, 7.0] {
            for p in [0.2, 0.9] {
                let rep = deviation_factor(&g, &x, cp(p), &res(b), &e).unwrap();
                assert_abs_diff_eq!(rep.deviation, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(rep.classical_ratio, (-b).exp(), epsilon = 1e-15);
            }
        }
        let rep = deviation_factor(&st(0.9, 0.2), &st(2.1, -0.7), cp(0.5), &res(0.0), &e).unwrap();
        assert_abs_diff_eq!(rep.deviation, 1.0, epsilon = 1e-12);

        // D -> e at βΔE = 2, p = 1/2: Γ = (1 + 2 w_e)/2 · e
        let r = res(2.0);
        let rep = deviation_factor(&BlochState::equator(0.0), &x, cp(0.5), &r, &e).unwrap();
        let expected = (1.0 + 2.0 * r.w_e()) / 2.0 * 1f64.exp();
        assert_abs_diff_eq!(rep.deviation, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.deviation, 1.683_168_051_061_465, epsilon = 1e-9);
        let num = deviation_factor_with(&BlochState::equator(0.0), &x, cp(0.5), &r, &e, Evaluation::Numeric).unwrap();
        assert_abs_diff_eq!(num.deviation, rep.deviation, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.q_heat, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn divergence_is_reported_not_raised() {
        // full damping at zero temperature never returns the system to |e>
        let r = ThermalReservoir::new(f64::INFINITY).unwrap();
        let rep = deviation_factor(&BlochState::excited(), &BlochState::ground(), cp(1.0), &r, &EnergySpec::default()).unwrap();
        assert!(rep.diverged);
        assert!(rep.deviation.is_infinite() && rep.ratio.is_infinite());
        assert!(!rep.deviation.is_nan());
    }

    #[test]
    fn clamping_rule() {
        assert_eq!(checked_probability(-1e-13, "t").unwrap(), 0.0);
        assert_eq!(checked_probability(1.0 + 1e-13, "t").unwrap(), 1.0);
        assert!(checked_probability(-1e-9, "t").is_err());
        assert!(checked_probability(1.0 + 1e-9, "t").is_err());
    }

    #[test]
    fn evolved_system_matches_gadc_action() {
        let r = res(1.5);
        let s = st(FRAC_PI_2, 0.3);
        let p = 0.35;
        let rho = evolve_system(&s, cp(p), &r);
        let pe = (1.0 - p) * 0.5 + p * r.w_e();
        assert_abs_diff_eq!(rho.get(1, 1).re, pe, epsilon = 1e-14);
        let coh = rho.get(0, 1).norm();
        assert_abs_diff_eq!(coh, 0.5 * (1.0 - p).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn zero_temperature_trend() {
        let e = EnergySpec::default();
        let (down, up) = (st(2.2, 0.0), st(0.7, 0.0));
        let release: Vec<f64> = [10.0, 20.0, 50.0]
            .iter()
            .map(|&b| deviation_factor(&down, &up, cp(0.5), &res(b), &e).unwrap().deviation)
            .collect();
        let absorb: Vec<f64> = [10.0, 20.0, 50.0]
            .iter()
            .map(|&b| deviation_factor(&up, &down, cp(0.5), &res(b), &e).unwrap().deviation)
            .collect();
        assert!(release.windows(2).all(|w| w[1] < w[0]) && release[2] < 1e-3);
        assert!(absorb.windows(2).all(|w| w[1] > w[0]) && absorb[2] > 1e3);
    }

    #[test]
    fn backward_completeness() {
        let r = res(0.8);
        for (ti, tf) in [(0.3, 2.0), (1.2, 0.4), (2.9, 2.9)] {
            let (i, f) = (st(ti, 0.5), st(tf, -1.0));
            let a = backward_prob_closed(&i, &f, cp(0.3), &r).unwrap();
            let b = backward_prob_closed(&i.orthogonal(), &f, cp(0.3), &r).unwrap();
            assert_abs_diff_eq!(a + b, 1.0, epsilon = 1e-12);
        }
    }
}
