//! Microscopic reversibility of a qubit coupled to a thermal qubit
//! reservoir through a generalized amplitude damping channel.
//!
//! The crate evaluates forward and backward transition probabilities in
//! closed form and by explicit unitary evolution, forms the deviation
//! factor Γ = (P_F / P_B) e^{βQ}, sweeps it over coherence grids, and
//! reproduces the same numbers with a simulated photonic interferometer.
//!
//! ```
//! use microrev::{deviation_factor, BlochState, ChannelParams, EnergySpec, ThermalReservoir};
//!
//! // (|g> + |e>)/√2 -> |e> with p = 1/2 and βΔE = 2
//! let r = ThermalReservoir::new(2.0)?;
//! let c = ChannelParams::new(0.5)?;
//! let rep = deviation_factor(&BlochState::equator(0.0), &BlochState::excited(), c, &r, &EnergySpec::default())?;
//! assert!((rep.deviation - 1.683168).abs() < 1e-6);
//! assert_eq!(rep.p_backward, 0.5);
//! # Ok::<(), microrev::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod linalg;
pub mod photonics;
pub mod states;
pub mod sweeps;
pub mod verify;

pub use channel::{
    deviation_factor, deviation_factor_with, microrev_ratio, ChannelParams, Evaluation, MicrorevRatio,
    TimeMap, TransitionReport,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Ket};
pub use photonics::{ExperimentParams, GammaEstimate, ShotConfig};
pub use states::{BlochState, CoherenceBranch, EnergySpec, ThermalReservoir};
pub use sweeps::{ExtremumKind, ExtremumResult, MapRow, Regime, SweepGrid, TransitionCase};
