//! Reference closed forms of the interferometer, written directly in the
//! wave-plate angles. `phi` is the reservoir angle and `theta` the damping
//! angle of [`ExperimentParams`](super::ExperimentParams).
//!
//! These are kept separate from the operator route so that one can check
//! the other.

use num_complex::Complex64;

use super::ExperimentParams;
use crate::linalg::{ComplexMatrix, DensityMatrix};

/// `P_F(V|H)`: prepare `|g>`, detect `|e>`.
pub fn forward_v_given_h(phi: f64, theta: f64) -> f64 {
    phi.cos().powi(2) * theta.cos().powi(2)
}

/// `P_B(H|V)`: prepare `|e>`, detect `|g>`.
pub fn backward_h_given_v(phi: f64, theta: f64) -> f64 {
    theta.cos().powi(2) * phi.sin().powi(2)
}

/// `P_F(V|D)`: prepare the diagonal state, detect `|e>`.
pub fn forward_v_given_d(phi: f64, theta: f64) -> f64 {
    let (c2p, s2p) = (phi.cos().powi(2), phi.sin().powi(2));
    let (c2t, s2t) = (theta.cos().powi(2), theta.sin().powi(2));
    0.5 * ((1.0 + c2t) * c2p + s2t * s2p)
}

/// `P_B(D|V)`: prepare `|e>`, detect the diagonal state.
pub fn backward_d_given_v(_phi: f64, _theta: f64) -> f64 {
    0.5
}

/// Diagonal state to `(|g> + √3|e>)/2`.
pub fn case3_forward(phi: f64, theta: f64) -> f64 {
    (8.0 + (2.0 * (theta - phi)).cos() + 2.0 * (2.0 * phi).cos() + (2.0 * (theta + phi)).cos()
        + 4.0 * 3f64.sqrt() * theta.sin())
        / 16.0
}

/// `(|g> + √3|e>)/2` back to the diagonal state.
pub fn case3_backward(_phi: f64, theta: f64) -> f64 {
    (2.0 + 3f64.sqrt() * theta.sin()) / 4.0
}

fn two_by_two(d0: f64, d1: f64, off: f64) -> DensityMatrix {
    let c = |x: f64| Complex64::new(x, 0.0);
    DensityMatrix::from_matrix_unchecked(
        ComplexMatrix::from_entries(2, vec![c(d0), c(off), c(off), c(d1)]).expect("4 entries"),
    )
}

/// Evolved system state `ρ'_S` in the `l, r` basis.
pub fn reduced_system(x: &ExperimentParams) -> DensityMatrix {
    let (a2, b2, ab) = (x.a * x.a, x.b * x.b, x.a * x.b);
    let (s2p, c2p) = (x.phi_res.sin().powi(2), x.phi_res.cos().powi(2));
    let (s2t, c2t) = (x.theta_ch.sin().powi(2), x.theta_ch.cos().powi(2));
    two_by_two(
        a2 * s2p + b2 * s2p * c2t + a2 * c2p * s2t,
        b2 * s2p * s2t + a2 * c2p * c2t + b2 * c2p,
        ab * x.theta_ch.sin(),
    )
}

/// Evolved reservoir state `ρ'_E` in the `d, u` basis.
pub fn reduced_env(x: &ExperimentParams) -> DensityMatrix {
    let (a2, b2, ab) = (x.a * x.a, x.b * x.b, x.a * x.b);
    let (s2p, c2p) = (x.phi_res.sin().powi(2), x.phi_res.cos().powi(2));
    let (s2t, c2t) = (x.theta_ch.sin().powi(2), x.theta_ch.cos().powi(2));
    two_by_two(
        a2 * s2p + b2 * s2p * s2t + a2 * c2p * c2t,
        b2 * s2p * c2t + a2 * c2p * s2t + b2 * c2p,
        ab * x.theta_ch.cos(),
    )
}
