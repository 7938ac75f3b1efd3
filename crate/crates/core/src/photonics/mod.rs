//! Digital twin of the two-layer optical interferometer that simulates the
//! qubit-reservoir dynamics.
//!
//! Photon paths encode the qubits: the column (`l`/`r`) is the system
//! (`g`/`e`) and the layer (`d`/`u`) is the reservoir (`E_g`/`E_e`).
//! Polarization is an ancilla. Two-path operators use the index order
//! `ld, lu, rd, ru`, i.e. system first, reservoir second, matching
//! [`crate::channel`].
//!
//! [`prepare_joint_state`] and [`evolve_interferometer`] evaluate the
//! reference closed forms of the setup; [`optics`] realizes the same states
//! element by element.

pub mod closed_form;
pub mod optics;
pub mod shots;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{checked_probability, ChannelParams};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, DensityMatrix, ALGEBRAIC_TOL};
use crate::states::{bloch_ket, time_reverse, BlochState, ThermalReservoir};

pub use optics::{element_pipeline, interferometer, pipeline_joint_state, OpticalElement, Pipeline, PhotonicState};
pub use shots::{estimate_gamma, simulate_shots, GammaEstimate, ShotConfig, ShotOutcome};

/// Path index of the two-path basis `ld, lu, rd, ru`.
pub const LD: usize = 0;
pub const LU: usize = 1;
pub const RD: usize = 2;
pub const RU: usize = 3;

/// Wave-plate settings of one run.
///
/// `a`, `b` are the real amplitudes of the prepared system state,
/// `phi_res` sets the reservoir populations (`w_g = sin²`, `w_e = cos²`)
/// and `theta_ch` sets the damping (`√p = cos`, `√(1-p) = sin`). Both angles
/// are the rotation angles appearing in the state amplitudes; the physical
/// plate is mounted at half of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub a: f64,
    pub b: f64,
    pub phi_res: f64,
    pub theta_ch: f64,
}

impl ExperimentParams {
    pub fn new(a: f64, b: f64, phi_res: f64, theta_ch: f64) -> Result<Self> {
        let norm = a * a + b * b;
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized { norm_sqr: norm });
        }
        for (name, v) in [("phi_res", phi_res), ("theta_ch", theta_ch)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "finite",
                });
            }
        }
        Ok(Self { a, b, phi_res, theta_ch })
    }

    /// Excited-state population of the simulated reservoir.
    pub fn w_e(&self) -> f64 {
        self.phi_res.cos().powi(2)
    }

    /// Damping parameter realized by `theta_ch`.
    pub fn p(&self) -> f64 {
        self.theta_ch.cos().powi(2)
    }
}

/// Maps a system state, reservoir and damping onto wave-plate settings.
///
/// The amplitudes are real, so only states with zero azimuth are
/// representable.
pub fn param_map(initial: &BlochState, r: &ThermalReservoir, c: ChannelParams) -> Result<ExperimentParams> {
    if initial.phi().abs() > ALGEBRAIC_TOL {
        return Err(Error::UnsupportedPhase { phi: initial.phi() });
    }
    let (b, a) = (initial.theta() / 2.0).sin_cos();
    Ok(ExperimentParams {
        a,
        b,
        phi_res: r.w_e().sqrt().acos(),
        theta_ch: c.p().sqrt().acos(),
    })
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// System-reservoir product state after the preparation stage.
pub fn prepare_joint_state(x: &ExperimentParams) -> DensityMatrix {
    let (a, b) = (x.a, x.b);
    let (s2, c2) = (x.phi_res.sin().powi(2), x.phi_res.cos().powi(2));
    let mut m = [[0.0; 4]; 4];
    m[LD][LD] = a * a * s2;
    m[LD][RD] = a * b * s2;
    m[RD][LD] = a * b * s2;
    m[RD][RD] = b * b * s2;
    m[LU][LU] = a * a * c2;
    m[LU][RU] = a * b * c2;
    m[RU][LU] = a * b * c2;
    m[RU][RU] = b * b * c2;
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(4, |r, c| real(m[r][c])))
}

/// The two branch kets of the evolved state, reservoir initially in `d`
/// (weight `sin φ`) and in `u` (weight `cos φ`).
pub fn evolved_branches(x: &ExperimentParams) -> [[f64; 4]; 2] {
    let (a, b) = (x.a, x.b);
    let (sp, cp) = x.phi_res.sin_cos();
    let (st, ct) = x.theta_ch.sin_cos();
    let mut lower = [0.0; 4];
    lower[LD] = a * sp;
    lower[LU] = b * sp * ct;
    lower[RD] = b * sp * st;
    let mut upper = [0.0; 4];
    upper[LU] = a * cp * st;
    upper[RD] = a * cp * ct;
    upper[RU] = b * cp;
    [lower, upper]
}

/// System-reservoir state at the output of the evolution stage: the
/// incoherent sum of the two branches.
pub fn evolve_interferometer(x: &ExperimentParams) -> DensityMatrix {
    let [lower, upper] = evolved_branches(x);
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(4, |r, c| {
        real(lower[r] * lower[c] + upper[r] * upper[c])
    }))
}

fn check_two_path(rho_se: &DensityMatrix) -> Result<()> {
    if rho_se.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho_se.dim(),
        });
    }
    Ok(())
}

/// Column (system) marginal of a two-path state.
pub fn reduced_system(rho_se: &DensityMatrix) -> Result<DensityMatrix> {
    check_two_path(rho_se)?;
    partial_trace(rho_se, 0, &[2, 2])
}

/// Layer (reservoir) marginal of a two-path state.
pub fn reduced_env(rho_se: &DensityMatrix) -> Result<DensityMatrix> {
    check_two_path(rho_se)?;
    partial_trace(rho_se, 1, &[2, 2])
}

/// Born-rule probability of finding `rho_s` in `final_`.
pub fn projection_probability(rho_s: &DensityMatrix, final_: &BlochState) -> Result<f64> {
    if rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho_s.dim(),
        });
    }
    let ket = bloch_ket(final_);
    let amps = ket.amplitudes();
    let mut v = Complex64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            v += amps[r].conj() * rho_s.get(r, c) * amps[c];
        }
    }
    checked_probability(v.re, "projection")
}

/// Forward and backward transition probabilities measured on the twin.
///
/// The forward run prepares `initial` and projects on `final_`; the
/// backward run prepares the time-reversed `final_` and projects on the
/// time-reversed `initial`. Both runs pass through the element pipeline.
pub fn transition_probabilities(
    initial: &BlochState,
    final_: &BlochState,
    r: &ThermalReservoir,
    c: ChannelParams,
) -> Result<(f64, f64)> {
    let x = param_map(initial, r, c)?;
    transition_probabilities_at(initial, final_, x.phi_res, x.theta_ch)
}

/// As [`transition_probabilities`], with the reservoir and damping given
/// directly as wave-plate angles.
pub fn transition_probabilities_at(
    initial: &BlochState,
    final_: &BlochState,
    phi_res: f64,
    theta_ch: f64,
) -> Result<(f64, f64)> {
    let run = |start: &BlochState, target: &BlochState| -> Result<f64> {
        if start.phi().abs() > ALGEBRAIC_TOL {
            return Err(Error::UnsupportedPhase { phi: start.phi() });
        }
        let (b, a) = (start.theta() / 2.0).sin_cos();
        let x = ExperimentParams::new(a, b, phi_res, theta_ch)?;
        let rho_se = optics::pipeline_joint_state(&x)?;
        projection_probability(&reduced_system(&rho_se)?, target)
    };
    let forward = run(initial, final_)?;
    let backward = run(&time_reverse(final_), &time_reverse(initial))?;
    Ok((forward, backward))
}
