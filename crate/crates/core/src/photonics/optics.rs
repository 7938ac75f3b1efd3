//! Element-level optics on the 8-dimensional path ⊗ polarization space.
//!
//! Mode index is `2 * path + pol`, where `path` follows the `ld, lu, rd, ru`
//! order of the parent module and `pol` is 0 for H, 1 for V.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ExperimentParams, LD, LU, RD, RU};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_matrix, ComplexMatrix, DensityMatrix, ALGEBRAIC_TOL};

pub const N_PATHS: usize = 4;
pub const N_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// Displacement direction of a beam displacer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BdOrientation {
    /// Shifts between columns `l` and `r` within a layer.
    Horizontal,
    /// Shifts between layers `d` and `u` within a column.
    Vertical,
}

impl BdOrientation {
    fn partner(self, path: usize) -> usize {
        match self {
            BdOrientation::Horizontal => path ^ 2,
            BdOrientation::Vertical => path ^ 1,
        }
    }
}

/// Single-photon state over the 8 path-polarization modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicState {
    amplitudes: [Complex64; N_MODES],
}

impl PhotonicState {
    pub fn new(amplitudes: [Complex64; N_MODES]) -> Result<Self> {
        let s = Self { amplitudes };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(s)
    }

    pub fn basis(path: usize, pol: Polarization) -> Result<Self> {
        check_path(path)?;
        let mut amplitudes = [Complex64::new(0.0, 0.0); N_MODES];
        amplitudes[2 * path + pol.index()] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitude(&self, path: usize, pol: Polarization) -> Complex64 {
        self.amplitudes[2 * path + pol.index()]
    }

    pub fn amplitudes(&self) -> &[Complex64; N_MODES] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Path state with polarization traced out.
    pub fn trace_polarization(&self) -> DensityMatrix {
        let pure = ComplexMatrix::outer(&self.amplitudes, &self.amplitudes).expect("same vector");
        let paths = partial_trace_matrix(&pure, 0, &[N_PATHS, 2]).expect("8 = 4 x 2");
        DensityMatrix::from_matrix_unchecked(paths)
    }
}

fn check_path(path: usize) -> Result<()> {
    if path >= N_PATHS {
        return Err(Error::InvalidPath { path });
    }
    Ok(())
}

fn checked_paths(paths: &[usize]) -> Result<BTreeSet<usize>> {
    paths.iter().map(|&p| check_path(p).map(|_| p)).collect()
}

/// Ideal, lossless optical element acting on a set of paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OpticalElement {
    /// Half-wave plate at `angle`; acts on the addressed paths as the
    /// reflection `[[cos 2α, sin 2α], [sin 2α, -cos 2α]]`.
    Hwp { angle: f64, paths: Vec<usize> },
    /// Quarter-wave plate. The ideal setup accumulates no stray phases, so
    /// it acts as the identity.
    Qwp { angle: f64, paths: Vec<usize> },
    /// Beam displacer moving the `deviated` polarization of each addressed
    /// path to its neighbour along `orientation`, and back.
    Bd {
        orientation: BdOrientation,
        deviated: Polarization,
        paths: Vec<usize>,
    },
}

impl OpticalElement {
    /// 8×8 unitary of the element.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let zero = Complex64::new(0.0, 0.0);
        let mut m = vec![zero; N_MODES * N_MODES];
        let mut set = |r: usize, c: usize, v: f64| m[r * N_MODES + c] = Complex64::new(v, 0.0);
        match self {
            OpticalElement::Hwp { angle, paths } => {
                let addressed = checked_paths(paths)?;
                let (s, c) = (2.0 * angle).sin_cos();
                for path in 0..N_PATHS {
                    let (h, v) = (2 * path, 2 * path + 1);
                    if addressed.contains(&path) {
                        set(h, h, c);
                        set(h, v, s);
                        set(v, h, s);
                        set(v, v, -c);
                    } else {
                        set(h, h, 1.0);
                        set(v, v, 1.0);
                    }
                }
            }
            OpticalElement::Qwp { paths, .. } => {
                checked_paths(paths)?;
                for k in 0..N_MODES {
                    set(k, k, 1.0);
                }
            }
            OpticalElement::Bd {
                orientation,
                deviated,
                paths,
            } => {
                let addressed = checked_paths(paths)?;
                let pairs: BTreeSet<(usize, usize)> = addressed
                    .iter()
                    .map(|&p| {
                        let q = orientation.partner(p);
                        (p.min(q), p.max(q))
                    })
                    .collect();
                let mut target: Vec<usize> = (0..N_MODES).collect();
                for (p, q) in pairs {
                    let (mp, mq) = (2 * p + deviated.index(), 2 * q + deviated.index());
                    target[mp] = mq;
                    target[mq] = mp;
                }
                for (from, &to) in target.iter().enumerate() {
                    set(to, from, 1.0);
                }
            }
        }
        ComplexMatrix::from_entries(N_MODES, m)
    }

    pub fn apply(&self, state: &PhotonicState) -> Result<PhotonicState> {
        let out = self.unitary()?.apply(&state.amplitudes)?;
        let mut amplitudes = [Complex64::new(0.0, 0.0); N_MODES];
        amplitudes.copy_from_slice(&out);
        Ok(PhotonicState { amplitudes })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub element: OpticalElement,
}

/// Ordered list of optical elements.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub stages: Vec<Stage>,
}

impl Pipeline {
    pub fn push(&mut self, label: &str, element: OpticalElement) -> &mut Self {
        self.stages.push(Stage {
            label: label.to_owned(),
            element,
        });
        self
    }

    /// Returns the input followed by the state after every stage.
    pub fn run(&self, input: &PhotonicState) -> Result<Vec<PhotonicState>> {
        let mut states = Vec::with_capacity(self.stages.len() + 1);
        states.push(input.clone());
        for stage in &self.stages {
            let next = stage.element.apply(states.last().expect("non-empty"))?;
            states.push(next);
        }
        Ok(states)
    }
}

/// Photon entering the setup: horizontally polarized in path `rd`.
pub fn input_state() -> PhotonicState {
    PhotonicState::basis(RD, Polarization::H).expect("valid path")
}

fn hwp(angle: f64, paths: &[usize]) -> OpticalElement {
    OpticalElement::Hwp {
        angle,
        paths: paths.to_vec(),
    }
}

fn bd(orientation: BdOrientation, deviated: Polarization, paths: &[usize]) -> OpticalElement {
    OpticalElement::Bd {
        orientation,
        deviated,
        paths: paths.to_vec(),
    }
}

/// Element sequence that prepares the product state and applies the joint
/// damping unitary.
///
/// After BD2 the reservoir branch is tagged by polarization (H for `d`, V
/// for `u`), which is what makes the path state mixed once polarization is
/// traced out. The evolution stage rotates the moving amplitude onto the
/// free polarization, walks it to the target path with two displacers per
/// branch, and restores the branch tags at the end.
pub fn interferometer(x: &ExperimentParams) -> Pipeline {
    use BdOrientation::{Horizontal, Vertical};
    use Polarization::{H, V};

    let mut p = Pipeline::default();
    p.push("HWP_alpha", hwp(x.b.atan2(x.a) / 2.0, &[RD]))
        .push("BD1", bd(Horizontal, H, &[RD]))
        .push("HWP_45 (l)", hwp(FRAC_PI_4, &[LD]))
        .push("HWP_phi", hwp(x.phi_res / 2.0, &[LD, RD]))
        .push("BD2", bd(Vertical, V, &[LD, RD]))
        .push("HWP_theta (rd)", hwp((FRAC_PI_2 - x.theta_ch) / 2.0, &[RD]))
        .push("HWP_theta (lu)", hwp((FRAC_PI_2 + x.theta_ch) / 2.0, &[LU]))
        .push("BD3 (d)", bd(Horizontal, V, &[RD]))
        .push("BD3 (u)", bd(Horizontal, H, &[LU]))
        .push("HWP_0 compensators", hwp(FRAC_PI_4, &[LD, RU]))
        .push("BD4 (l)", bd(Vertical, H, &[LD]))
        .push("BD4 (r)", bd(Vertical, V, &[RU]))
        .push("HWP_out", hwp(FRAC_PI_4, &[LD, RU]))
        .push("QWP", OpticalElement::Qwp { angle: 0.0, paths: vec![LD, LU, RD, RU] });
    p
}

/// Index of the last preparation stage (BD2) in [`interferometer`].
pub const PREPARATION_STAGES: usize = 5;

/// Runs [`interferometer`] on [`input_state`].
pub fn element_pipeline(x: &ExperimentParams) -> Result<Vec<PhotonicState>> {
    interferometer(x).run(&input_state())
}

/// Two-path state at the output of the pipeline.
pub fn pipeline_joint_state(x: &ExperimentParams) -> Result<DensityMatrix> {
    let states = element_pipeline(x)?;
    Ok(states.last().expect("non-empty").trace_polarization())
}
