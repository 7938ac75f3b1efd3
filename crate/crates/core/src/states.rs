//! Qubit endpoint states, the thermal reservoir, coherence and heat.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, Ket};

/// Largest βΔE fed to an exponential. Larger inputs are treated as the
/// zero-temperature limit.
pub const BETA_DELTA_E_CAP: f64 = 700.0;

/// Pure qubit state on the Bloch sphere, `cos(θ/2)|g> + e^{iφ} sin(θ/2)|e>`.
///
/// `theta` lies in `[0, π]`, `phi` in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    theta: f64,
    phi: f64,
}

fn wrap_phase(phi: f64) -> f64 {
    if (-PI..PI).contains(&phi) {
        phi
    } else {
        (phi + PI).rem_euclid(TAU) - PI
    }
}

impl BlochState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if !phi.is_finite() {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "finite",
            });
        }
        Ok(Self {
            theta,
            phi: wrap_phase(phi),
        })
    }

    pub fn ground() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn excited() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// `(|g> + e^{iφ}|e>)/√2`.
    pub fn equator(phi: f64) -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: wrap_phase(phi),
        }
    }

    /// State on the given branch whose l1-coherence is `c`.
    pub fn from_coherence(c: f64, branch: CoherenceBranch, phi: f64) -> Result<Self> {
        Self::new(theta_from_coherence(c, branch)?, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The antipodal (orthogonal) state.
    pub fn orthogonal(&self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: wrap_phase(self.phi + PI),
        }
    }
}

pub fn bloch_ket(s: &BlochState) -> Ket {
    let (half_sin, half_cos) = (s.theta / 2.0).sin_cos();
    Ket::new(vec![
        Complex64::new(half_cos, 0.0),
        Complex64::from_polar(half_sin, s.phi),
    ])
    .expect("cos² + sin² = 1")
}

/// Time reversal of a qubit state: conjugates the relative phase and leaves
/// energy eigenstates invariant.
pub fn time_reverse(s: &BlochState) -> BlochState {
    BlochState {
        theta: s.theta,
        phi: wrap_phase(-s.phi),
    }
}

/// Gibbs state of a reservoir qubit at inverse temperature βΔE
/// (Boltzmann constant folded into β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalReservoir {
    beta_delta_e: f64,
    w_g: f64,
    w_e: f64,
    capped: bool,
}

impl ThermalReservoir {
    /// Accepts any βΔE >= 0, including `+inf`; values above
    /// [`BETA_DELTA_E_CAP`] are capped and flagged.
    pub fn new(beta_delta_e: f64) -> Result<Self> {
        if beta_delta_e.is_nan() || beta_delta_e < 0.0 {
            return Err(Error::OutOfRange {
                name: "beta_delta_e",
                value: beta_delta_e,
                range: "[0, inf)",
            });
        }
        let capped = beta_delta_e > BETA_DELTA_E_CAP;
        let x = beta_delta_e.min(BETA_DELTA_E_CAP);
        let boltzmann = (-x).exp();
        let w_e = boltzmann / (1.0 + boltzmann);
        Ok(Self {
            beta_delta_e: x,
            w_g: 1.0 - w_e,
            w_e,
            capped,
        })
    }

    /// Reservoir with a given excited-state population `w_e ∈ [0, 1/2]`.
    pub fn from_excited_population(w_e: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&w_e) {
            return Err(Error::OutOfRange {
                name: "w_e",
                value: w_e,
                range: "[0, 0.5]",
            });
        }
        if w_e == 0.0 {
            return Self::new(f64::INFINITY);
        }
        Self::new(((1.0 - w_e) / w_e).ln())
    }

    /// Effective (possibly capped) βΔE.
    pub fn beta_delta_e(&self) -> f64 {
        self.beta_delta_e
    }

    pub fn w_g(&self) -> f64 {
        self.w_g
    }

    pub fn w_e(&self) -> f64 {
        self.w_e
    }

    /// Whether the input exceeded [`BETA_DELTA_E_CAP`].
    pub fn capped(&self) -> bool {
        self.capped
    }
}

pub fn thermal_state(r: &ThermalReservoir) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::diagonal(&[r.w_g, r.w_e]))
}

/// Level energies of the qubit. Heat only depends on the gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    delta_e: f64,
    e_ground: f64,
}

impl Default for EnergySpec {
    fn default() -> Self {
        Self {
            delta_e: 1.0,
            e_ground: 0.0,
        }
    }
}

impl EnergySpec {
    pub fn new(delta_e: f64, e_ground: f64) -> Result<Self> {
        if !(delta_e > 0.0 && delta_e.is_finite()) {
            return Err(Error::OutOfRange {
                name: "delta_e",
                value: delta_e,
                range: "(0, inf)",
            });
        }
        if !e_ground.is_finite() {
            return Err(Error::OutOfRange {
                name: "e_ground",
                value: e_ground,
                range: "finite",
            });
        }
        Ok(Self { delta_e, e_ground })
    }

    pub fn delta_e(&self) -> f64 {
        self.delta_e
    }

    pub fn e_ground(&self) -> f64 {
        self.e_ground
    }

    /// `diag(E_g, E_g + ΔE)`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::diagonal(&[self.e_ground, self.e_ground + self.delta_e])
    }
}

/// Which half of the Bloch sphere a coherence value is mapped onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoherenceBranch {
    /// θ ∈ [0, π/2], cos θ = +√(1 - C²).
    Lower,
    /// θ ∈ (π/2, π], cos θ = -√(1 - C²).
    Upper,
}

/// l1-norm of coherence: sum of moduli of the off-diagonal entries.
pub fn coherence_l1(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let mut total = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                total += rho.get(r, c).norm();
            }
        }
    }
    total
}

pub fn theta_from_coherence(c: f64, branch: CoherenceBranch) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange {
            name: "coherence",
            value: c,
            range: "[0, 1]",
        });
    }
    let lower = c.asin();
    Ok(match branch {
        CoherenceBranch::Lower => lower,
        CoherenceBranch::Upper => PI - lower,
    })
}

/// Heat absorbed by the system, `ΔE (cos θ_i - cos θ_f) / 2`.
pub fn heat(initial: &BlochState, final_: &BlochState, e: &EnergySpec) -> f64 {
    e.delta_e * ((initial.theta.cos() - final_.theta.cos()) / 2.0)
}
