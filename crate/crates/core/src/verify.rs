//! Self-check suites run by `microrev verify`.
//!
//! Each suite compares two independent routes to the same quantity, or
//! checks an identity that must hold exactly. A [`Fault`] can be injected
//! into the closed-form forward probability to confirm that the suites
//! actually notice a wrong formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{
    backward_prob_closed, forward_prob_closed, forward_prob_numeric, backward_prob_numeric, evolve_system,
    gadc_unitary, ChannelParams,
};
use crate::error::Result;
use crate::linalg::{partial_trace, ComplexMatrix, DensityMatrix, Ket};
use crate::photonics::{self, closed_form};
use crate::states::{
    bloch_ket, coherence_l1, heat, theta_from_coherence, thermal_state, time_reverse, BlochState, CoherenceBranch,
    EnergySpec, ThermalReservoir,
};
use crate::sweeps::Regime;

pub const SUITE_NAMES: [&str; 6] = ["linalg", "states", "channel-oracle", "symmetry", "photonic-equivalence", "limits"];

/// Additive error injected into every closed-form forward probability.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Fault {
    pub forward_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest observed deviation from the reference.
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Ctx {
    fault: Fault,
    rng: ChaCha8Rng,
}

impl Ctx {
    fn forward_closed(&self, i: &BlochState, f: &BlochState, c: ChannelParams, r: &ThermalReservoir) -> Result<f64> {
        Ok(forward_prob_closed(i, f, c, r)? + self.fault.forward_offset)
    }

    fn gamma_closed(&self, i: &BlochState, f: &BlochState, c: ChannelParams, r: &ThermalReservoir) -> Result<f64> {
        let pf = self.forward_closed(i, f, c, r)?;
        let pb = backward_prob_closed(i, f, c, r)?;
        let q = heat(i, f, &EnergySpec::default());
        Ok(pf / pb * (r.beta_delta_e() * q).exp())
    }

    fn state(&mut self) -> BlochState {
        BlochState::new(self.rng.random_range(0.0..=PI), self.rng.random_range(-PI..PI)).expect("in range")
    }

    fn real_state(&mut self) -> BlochState {
        BlochState::new(self.rng.random_range(0.0..=PI), 0.0).expect("in range")
    }

    fn reservoir(&mut self) -> ThermalReservoir {
        ThermalReservoir::new(self.rng.random_range(0.0..5.0)).expect("in range")
    }

    fn channel(&mut self) -> ChannelParams {
        ChannelParams::new(self.rng.random_range(0.0..=1.0)).expect("in range")
    }
}

/// Collects the maximum error of one check; evaluation errors count as
/// failures.
struct Check {
    name: &'static str,
    tol: f64,
    max: f64,
    broken: bool,
}

impl Check {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            max: 0.0,
            broken: false,
        }
    }

    fn observe(&mut self, err: Result<f64>) {
        match err {
            Ok(e) if e.is_finite() => self.max = self.max.max(e.abs()),
            _ => self.broken = true,
        }
    }

    fn flag(&mut self, ok: bool) {
        if !ok {
            self.broken = true;
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: !self.broken && self.max <= self.tol,
            max_error: if self.broken { f64::INFINITY } else { self.max },
            tolerance: self.tol,
        }
    }
}

fn linalg_suite(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut unitary = Check::new("damping unitary is unitary", 1e-12);
    let mut ptrace = Check::new("partial trace inverts tensor product", 1e-12);
    let mut reject = Check::new("non-positive matrix rejected", 0.0);
    for _ in 0..200 {
        let c = ctx.channel();
        let u = gadc_unitary(c);
        unitary.observe(u.try_mul(&u.dagger()).map(|m| m.max_abs_diff(&ComplexMatrix::identity(4))));

        let a = bloch_ket(&ctx.state()).density();
        let b = thermal_state(&ctx.reservoir());
        let ab = a.tensor(&b);
        ptrace.observe(partial_trace(&ab, 0, &[2, 2]).map(|x| x.matrix().max_abs_diff(a.matrix())));
        ptrace.observe(partial_trace(&ab, 1, &[2, 2]).map(|x| x.matrix().max_abs_diff(b.matrix())));
    }
    let bad = ComplexMatrix::diagonal(&[1.5, -0.5]);
    reject.flag(DensityMatrix::new(bad).is_err());
    let not_unit = Ket::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    reject.flag(not_unit.is_err());
    vec![unitary.finish(), ptrace.finish(), reject.finish()]
}

fn states_suite(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut thermal = Check::new("thermal populations follow Gibbs weights", 1e-14);
    let mut coherence = Check::new("l1-coherence equals sin(theta)", 1e-12);
    let mut inverse = Check::new("coherence inverse recovers theta", 1e-9);
    let mut reverse = Check::new("time reversal is an involution", 1e-15);
    for _ in 0..500 {
        let r = ctx.reservoir();
        let x = r.beta_delta_e();
        thermal.observe(Ok(r.w_e() / r.w_g() - (-x).exp()));
        thermal.observe(Ok(r.w_e() + r.w_g() - 1.0));

        let s = ctx.state();
        coherence.observe(Ok(coherence_l1(&bloch_ket(&s).density()) - s.theta().sin()));
        let branch = if s.theta() <= PI / 2.0 {
            CoherenceBranch::Lower
        } else {
            CoherenceBranch::Upper
        };
        // ill-conditioned at the equator; 1 - cos(dθ) stays small even there
        inverse.observe(theta_from_coherence(s.theta().sin(), branch).map(|t| (t - s.theta()).cos().mul_add(-1.0, 1.0)));

        let back = time_reverse(&time_reverse(&s));
        reverse.observe(Ok((back.theta() - s.theta()).abs() + (back.phi() - s.phi()).sin().abs()));
    }
    vec![thermal.finish(), coherence.finish(), inverse.finish(), reverse.finish()]
}

fn channel_oracle_suite(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut forward = Check::new("closed forward equals trace evaluation", 1e-9);
    let mut backward = Check::new("closed backward equals trace evaluation", 1e-9);
    let mut trace = Check::new("evolved system state has unit trace", 1e-12);
    for _ in 0..2000 {
        let (i, f, r, c) = (ctx.state(), ctx.state(), ctx.reservoir(), ctx.channel());
        let num = forward_prob_numeric(&i, &f, c, &r);
        forward.observe(ctx.forward_closed(&i, &f, c, &r).and_then(|x| Ok(x - num?)));
        let num = backward_prob_numeric(&i, &f, c, &r);
        backward.observe(backward_prob_closed(&i, &f, c, &r).and_then(|x| Ok(x - num?)));
        trace.observe(Ok(evolve_system(&i, c, &r).matrix().trace().re - 1.0));
    }
    vec![forward.finish(), backward.finish(), trace.finish()]
}

fn symmetry_suite(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut inversion = Check::new("absorb map is reciprocal of transposed release map", 1e-10);
    let mut swap = Check::new("P_B(i, f) equals P_F of reversed pair", 1e-12);
    let c = ChannelParams::new(0.5).expect("valid");
    let r = ThermalReservoir::new(2.0).expect("valid");
    let n = 21;
    for a in 0..n {
        for b in 0..n {
            let (ci, cf) = (a as f64 / (n - 1) as f64, b as f64 / (n - 1) as f64);
            let value = || -> Result<f64> {
                let (ri, rf) = Regime::HeatRelease.states(ci, cf, 0.0, 0.0)?;
                let (ai, af) = Regime::HeatAbsorb.states(cf, ci, 0.0, 0.0)?;
                Ok(ctx.gamma_closed(&ri, &rf, c, &r)? * ctx.gamma_closed(&ai, &af, c, &r)? - 1.0)
            };
            inversion.observe(value());
        }
    }
    for _ in 0..500 {
        let (i, f, r, c) = (ctx.state(), ctx.state(), ctx.reservoir(), ctx.channel());
        let value = || -> Result<f64> {
            let pb = backward_prob_closed(&i, &f, c, &r)?;
            let pf = ctx.forward_closed(&time_reverse(&f), &time_reverse(&i), c, &r)?;
            Ok(pb - pf)
        };
        swap.observe(value());
    }
    vec![inversion.finish(), swap.finish()]
}

fn photonic_suite(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut reference = Check::new("pipeline reproduces reference probabilities", 1e-10);
    let mut state = Check::new("twin system state equals channel output", 1e-10);
    let mut probs = Check::new("twin probabilities equal closed forms", 1e-10);
    let (g, e, d) = (BlochState::ground(), BlochState::excited(), BlochState::equator(0.0));
    let psi3 = BlochState::new(2.0 * PI / 3.0, 0.0).expect("valid");
    type Reference = fn(f64, f64) -> f64;
    let cases: [(&BlochState, &BlochState, Reference, Reference); 3] = [
        (&g, &e, closed_form::forward_v_given_h, closed_form::backward_h_given_v),
        (&d, &e, closed_form::forward_v_given_d, closed_form::backward_d_given_v),
        (&d, &psi3, closed_form::case3_forward, closed_form::case3_backward),
    ];
    for a in 0..10 {
        for b in 0..10 {
            let (phi, theta) = (a as f64 * PI / 9.0, b as f64 * PI / 9.0);
            for (i, f, pf, pb) in cases {
                match photonics::transition_probabilities_at(i, f, phi, theta) {
                    Ok((tf, tb)) => {
                        reference.observe(Ok(tf - pf(phi, theta)));
                        reference.observe(Ok(tb - pb(phi, theta)));
                    }
                    Err(e) => reference.observe(Err(e)),
                }
            }
        }
    }
    for _ in 0..200 {
        let (i, f, r, c) = (ctx.real_state(), ctx.real_state(), ctx.reservoir(), ctx.channel());
        let twin = photonics::param_map(&i, &r, c)
            .and_then(|x| photonics::pipeline_joint_state(&x))
            .and_then(|rho| photonics::reduced_system(&rho));
        state.observe(twin.map(|t| t.matrix().max_abs_diff(evolve_system(&i, c, &r).matrix())));
        match photonics::transition_probabilities(&i, &f, &r, c) {
            Ok((tf, tb)) => {
                probs.observe(ctx.forward_closed(&i, &f, c, &r).map(|x| x - tf));
                probs.observe(backward_prob_closed(&i, &f, c, &r).map(|x| x - tb));
            }
            Err(e) => probs.observe(Err(e)),
        }
    }
    vec![reference.finish(), state.finish(), probs.finish()]
}

fn limits_suite(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut classical = Check::new("pole-to-pole ratio is exp(-beta dE)", 1e-10);
    let mut corners = Check::new("incoherent and maximally coherent corners give 1", 1e-10);
    let mut infinite_t = Check::new("infinite temperature gives 1", 1e-12);
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for x in [0.5, 1.0, 2.0, 5.0] {
            let c = ChannelParams::new(p).expect("valid");
            let r = ThermalReservoir::new(x).expect("valid");
            let (g, e) = (BlochState::ground(), BlochState::excited());
            let value = || -> Result<f64> {
                let ratio = ctx.forward_closed(&g, &e, c, &r)? / backward_prob_closed(&g, &e, c, &r)?;
                Ok(ratio / (-x).exp() - 1.0)
            };
            classical.observe(value());
        }
    }
    let c = ChannelParams::new(0.5).expect("valid");
    for x in [0.1, 1.0, 2.0, 4.0] {
        let r = ThermalReservoir::new(x).expect("valid");
        for regime in [Regime::HeatRelease, Regime::HeatAbsorb] {
            for corner in [0.0, 1.0] {
                let value = || -> Result<f64> {
                    let (i, f) = regime.states(corner, corner, 0.0, 0.0)?;
                    Ok(ctx.gamma_closed(&i, &f, c, &r)? - 1.0)
                };
                corners.observe(value());
            }
        }
    }
    let hot = ThermalReservoir::new(0.0).expect("valid");
    for _ in 0..100 {
        let (i, f, c) = (ctx.state(), ctx.state(), ctx.channel());
        if backward_prob_closed(&i, &f, c, &hot).is_ok_and(|pb| pb < 1e-9) {
            continue;
        }
        infinite_t.observe(ctx.gamma_closed(&i, &f, c, &hot).map(|g| g - 1.0));
    }
    vec![classical.finish(), corners.finish(), infinite_t.finish()]
}

/// Runs every suite with a fixed seed.
pub fn run_all(fault: Fault) -> VerifyReport {
    let mut ctx = Ctx {
        fault,
        rng: ChaCha8Rng::seed_from_u64(0x5eed),
    };
    type Suite = fn(&mut Ctx) -> Vec<CheckResult>;
    let suites: [Suite; 6] = [
        linalg_suite,
        states_suite,
        channel_oracle_suite,
        symmetry_suite,
        photonic_suite,
        limits_suite,
    ];
    let suites: Vec<SuiteReport> = SUITE_NAMES
        .iter()
        .zip(suites)
        .map(|(&suite, run)| {
            let checks = run(&mut ctx);
            let passed = checks.iter().filter(|c| c.passed).count();
            SuiteReport {
                suite,
                passed,
                failed: checks.len() - passed,
                checks,
            }
        })
        .collect();
    VerifyReport {
        passed: suites.iter().map(|s| s.passed).sum(),
        failed: suites.iter().map(|s| s.failed).sum(),
        suites,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let report = run_all(Fault::default());
        for s in &report.suites {
            for c in &s.checks {
                assert!(c.passed, "{}: {} ({:e})", s.suite, c.name, c.max_error);
            }
        }
        assert!(report.suites.len() >= 6);
    }

    #[test]
    fn perturbed_formula_is_caught() {
        let report = run_all(Fault { forward_offset: 1e-6 });
        assert!(!report.all_passed());
        let oracle = report.suites.iter().find(|s| s.suite == "channel-oracle").unwrap();
        assert!(oracle.failed > 0);
    }
}
