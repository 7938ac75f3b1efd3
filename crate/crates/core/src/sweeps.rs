//! Γ over coherence grids, temperature curves, diagonal cuts and extremum
//! search.
//!
//! Grids are parametrized by the l1-coherences `(C_i, C_f)`; the regime
//! decides which hemisphere each coherence is mapped onto, and therefore
//! the sign of the heat.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{deviation_factor_with, ChannelParams, Evaluation, TransitionReport};
use crate::error::{Error, Result};
use crate::states::{BlochState, CoherenceBranch, EnergySpec, ThermalReservoir};

pub const DEFAULT_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// θ_i ∈ [π/2, π], θ_f ∈ [0, π/2]: Q <= 0.
    HeatRelease,
    /// θ_i ∈ [0, π/2], θ_f ∈ [π/2, π]: Q >= 0.
    HeatAbsorb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    Min,
    Max,
}

impl ExtremumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremumKind::Min => "min",
            ExtremumKind::Max => "max",
        }
    }
}

impl Regime {
    /// Branches of (initial, final).
    pub fn branches(self) -> (CoherenceBranch, CoherenceBranch) {
        match self {
            Regime::HeatRelease => (CoherenceBranch::Upper, CoherenceBranch::Lower),
            Regime::HeatAbsorb => (CoherenceBranch::Lower, CoherenceBranch::Upper),
        }
    }

    pub fn states(self, c_i: f64, c_f: f64, phi_i: f64, phi_f: f64) -> Result<(BlochState, BlochState)> {
        let (bi, bf) = self.branches();
        Ok((
            BlochState::from_coherence(c_i, bi, phi_i)?,
            BlochState::from_coherence(c_f, bf, phi_f)?,
        ))
    }

    /// Release maps have a minimum below one, absorb maps a maximum above.
    pub fn extremum_kind(self) -> ExtremumKind {
        match self {
            Regime::HeatRelease => ExtremumKind::Min,
            Regime::HeatAbsorb => ExtremumKind::Max,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Regime::HeatRelease => Regime::HeatAbsorb,
            Regime::HeatAbsorb => Regime::HeatRelease,
        }
    }
}

/// One evaluated `(C_i, C_f)` point. `q_over_de` is the heat in units of ΔE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub c_i: f64,
    pub c_f: f64,
    pub theta_i: f64,
    pub theta_f: f64,
    pub p_forward: f64,
    pub p_backward: f64,
    pub ratio: f64,
    pub q_over_de: f64,
    pub gamma: f64,
    pub diverged: bool,
}

/// Fixed physical parameters shared by every point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub reservoir: ThermalReservoir,
    pub channel: ChannelParams,
    pub phi_i: f64,
    pub phi_f: f64,
    pub evaluation: Evaluation,
}

impl SweepPoint {
    pub fn new(beta_delta_e: f64, p: f64) -> Result<Self> {
        Ok(Self {
            reservoir: ThermalReservoir::new(beta_delta_e)?,
            channel: ChannelParams::new(p)?,
            phi_i: 0.0,
            phi_f: 0.0,
            evaluation: Evaluation::Closed,
        })
    }

    pub fn report(&self, initial: &BlochState, final_: &BlochState) -> Result<TransitionReport> {
        deviation_factor_with(
            initial,
            final_,
            self.channel,
            &self.reservoir,
            &EnergySpec::default(),
            self.evaluation,
        )
    }

    pub fn row(&self, regime: Regime, c_i: f64, c_f: f64) -> Result<MapRow> {
        let (i, f) = regime.states(c_i, c_f, self.phi_i, self.phi_f)?;
        let rep = self.report(&i, &f)?;
        Ok(MapRow {
            c_i,
            c_f,
            theta_i: i.theta(),
            theta_f: f.theta(),
            p_forward: rep.p_forward,
            p_backward: rep.p_backward,
            ratio: rep.ratio,
            q_over_de: rep.q_heat,
            gamma: rep.deviation,
            diverged: rep.diverged,
        })
    }

    pub fn gamma(&self, regime: Regime, c_i: f64, c_f: f64) -> Result<f64> {
        Ok(self.row(regime, c_i, c_f)?.gamma)
    }
}

/// Uniform coherence grid over `[0, 1]²` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub n_i: usize,
    pub n_f: usize,
    pub point: SweepPoint,
}

impl SweepGrid {
    pub fn new(beta_delta_e: f64, p: f64) -> Result<Self> {
        Ok(Self {
            n_i: DEFAULT_GRID_POINTS,
            n_f: DEFAULT_GRID_POINTS,
            point: SweepPoint::new(beta_delta_e, p)?,
        })
    }

    pub fn with_size(mut self, n_i: usize, n_f: usize) -> Result<Self> {
        for n in [n_i, n_f] {
            if n < 2 {
                return Err(Error::GridTooSmall(n));
            }
        }
        self.n_i = n_i;
        self.n_f = n_f;
        Ok(self)
    }

    pub fn with_phases(mut self, phi_i: f64, phi_f: f64) -> Self {
        self.point.phi_i = phi_i;
        self.point.phi_f = phi_f;
        self
    }

    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.point.evaluation = evaluation;
        self
    }
}

/// `n` equally spaced values on `[0, 1]`, hitting both ends exactly.
pub fn unit_axis(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { 1.0 } else { k as f64 / last }).collect()
}

/// Γ over the grid, row-major with `C_i` as the slow index.
pub fn gamma_map(g: &SweepGrid, regime: Regime) -> Result<Vec<MapRow>> {
    if g.n_i < 2 || g.n_f < 2 {
        return Err(Error::GridTooSmall(g.n_i.min(g.n_f)));
    }
    let ci_axis = unit_axis(g.n_i);
    let cf_axis = unit_axis(g.n_f);
    let rows: Vec<Vec<MapRow>> = ci_axis
        .par_iter()
        .map(|&ci| cf_axis.iter().map(|&cf| g.point.row(regime, ci, cf)).collect())
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Located extremum of Γ over the coherence square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumResult {
    pub c_i_star: f64,
    pub c_f_star: f64,
    pub theta_i_star: f64,
    pub theta_f_star: f64,
    pub gamma_star: f64,
    pub kind: ExtremumKind,
    /// Central-difference gradient norm at the reported point, over the
    /// coordinates that are interior to `(0, 1)`.
    pub refinement_residual: f64,
    /// Incumbent Γ after the coarse scan and after every refinement round.
    pub round_values: Vec<f64>,
}

/// Coarse grid scan followed by repeated local grids, each `shrink` times
/// finer and spanning one previous step on either side of the incumbent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumSearch {
    pub coarse_points: usize,
    pub local_points: usize,
    pub shrink: f64,
    pub rounds: usize,
    pub gradient_step: f64,
}

impl Default for ExtremumSearch {
    fn default() -> Self {
        Self {
            coarse_points: DEFAULT_GRID_POINTS,
            local_points: 21,
            shrink: 10.0,
            rounds: 6,
            gradient_step: 1e-5,
        }
    }
}

struct Candidate {
    c_i: f64,
    c_f: f64,
    gamma: f64,
}

impl ExtremumSearch {
    pub fn run(&self, point: &SweepPoint, regime: Regime) -> Result<ExtremumResult> {
        if self.coarse_points < 2 {
            return Err(Error::GridTooSmall(self.coarse_points));
        }
        let kind = regime.extremum_kind();
        let better = |a: f64, b: f64| match kind {
            ExtremumKind::Min => a < b,
            ExtremumKind::Max => a > b,
        };
        let best_of = |cands: Vec<Candidate>| -> Candidate {
            cands
                .into_iter()
                .reduce(|acc, c| if better(c.gamma, acc.gamma) { c } else { acc })
                .expect("non-empty candidate set")
        };
        let eval = |ci: f64, cf: f64| -> Result<Candidate> {
            Ok(Candidate {
                c_i: ci,
                c_f: cf,
                gamma: point.gamma(regime, ci, cf)?,
            })
        };

        let axis = unit_axis(self.coarse_points);
        let coarse: Vec<Candidate> = axis
            .par_iter()
            .map(|&ci| axis.iter().map(|&cf| eval(ci, cf)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut best = best_of(coarse);
        let mut round_values = vec![best.gamma];

        let half = (self.local_points.max(3) / 2) as i64;
        let mut step = 1.0 / (self.coarse_points - 1) as f64;
        for _ in 0..self.rounds {
            step /= self.shrink;
            let offsets = |center: f64| -> Vec<f64> {
                (-half..=half)
                    .map(|k| if k == 0 { center } else { center + k as f64 * step })
                    .filter(|c| (0.0..=1.0).contains(c))
                    .collect()
            };
            let (ci_axis, cf_axis) = (offsets(best.c_i), offsets(best.c_f));
            let mut local = vec![];
            for &ci in &ci_axis {
                for &cf in &cf_axis {
                    local.push(eval(ci, cf)?);
                }
            }
            let cand = best_of(local);
            if better(cand.gamma, best.gamma) {
                best = cand;
            }
            round_values.push(best.gamma);
        }

        let refinement_residual = self.gradient_norm(point, regime, best.c_i, best.c_f)?;
        let (i, f) = regime.states(best.c_i, best.c_f, point.phi_i, point.phi_f)?;
        Ok(ExtremumResult {
            c_i_star: best.c_i,
            c_f_star: best.c_f,
            theta_i_star: i.theta(),
            theta_f_star: f.theta(),
            gamma_star: best.gamma,
            kind,
            refinement_residual,
            round_values,
        })
    }

    fn gradient_norm(&self, point: &SweepPoint, regime: Regime, ci: f64, cf: f64) -> Result<f64> {
        let h = self.gradient_step;
        let interior = |c: f64| c - h >= 0.0 && c + h <= 1.0;
        let mut sq = 0.0;
        if interior(ci) {
            let d = (point.gamma(regime, ci + h, cf)? - point.gamma(regime, ci - h, cf)?) / (2.0 * h);
            sq += d * d;
        }
        if interior(cf) {
            let d = (point.gamma(regime, ci, cf + h)? - point.gamma(regime, ci, cf - h)?) / (2.0 * h);
            sq += d * d;
        }
        Ok(sq.sqrt())
    }
}

/// Minimum of Γ for heat release, maximum for absorption, at zero phases.
pub fn find_extremum(beta_delta_e: f64, p: f64, regime: Regime) -> Result<ExtremumResult> {
    ExtremumSearch::default().run(&SweepPoint::new(beta_delta_e, p)?, regime)
}

/// Endpoint pairs followed along a temperature curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TransitionCase {
    /// `|g> -> |e>`, coherences (0, 0).
    Classical,
    /// `(|g> + |e>)/√2 -> |e>`, coherences (1, 0).
    CoherentToExcited,
    /// `(|g> + |e>)/√2 -> (|g> + √3|e>)/2`, coherences (1, √3/2).
    CoherentToCoherent,
    Custom { initial: BlochState, final_: BlochState },
}

impl TransitionCase {
    pub fn states(&self) -> (BlochState, BlochState) {
        match *self {
            TransitionCase::Classical => (BlochState::ground(), BlochState::excited()),
            TransitionCase::CoherentToExcited => (BlochState::equator(0.0), BlochState::excited()),
            TransitionCase::CoherentToCoherent => (
                BlochState::equator(0.0),
                BlochState::new(2.0 * PI / 3.0, 0.0).expect("valid angle"),
            ),
            TransitionCase::Custom { initial, final_ } => (initial, final_),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub beta_delta_e: f64,
    pub p_forward: f64,
    pub p_backward: f64,
    pub ratio: f64,
    pub q_over_de: f64,
    pub gamma: f64,
    pub diverged: bool,
}

/// `n` equally spaced βΔE values on `[start, end]`.
pub fn beta_range(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::GridTooSmall(n));
    }
    if !(start >= 0.0 && end >= start && end.is_finite()) {
        return Err(Error::OutOfRange {
            name: "beta range",
            value: start,
            range: "0 <= start <= end < inf",
        });
    }
    Ok(unit_axis(n).into_iter().map(|t| start + t * (end - start)).collect())
}

/// Γ of a fixed endpoint pair as a function of βΔE.
pub fn gamma_curve(case: &TransitionCase, betas: &[f64], p: f64) -> Result<Vec<CurveRow>> {
    let (initial, final_) = case.states();
    betas
        .iter()
        .map(|&beta| {
            let rep = SweepPoint::new(beta, p)?.report(&initial, &final_)?;
            Ok(CurveRow {
                beta_delta_e: beta,
                p_forward: rep.p_forward,
                p_backward: rep.p_backward,
                ratio: rep.ratio,
                q_over_de: rep.q_heat,
                gamma: rep.deviation,
                diverged: rep.diverged,
            })
        })
        .collect()
}

/// Γ along `C_i = C_f = C`.
pub fn diagonal_cut(beta_delta_e: f64, p: f64, regime: Regime, n_points: usize) -> Result<Vec<MapRow>> {
    if n_points < 2 {
        return Err(Error::GridTooSmall(n_points));
    }
    let point = SweepPoint::new(beta_delta_e, p)?;
    unit_axis(n_points)
        .into_iter()
        .map(|c| point.row(regime, c, c))
        .collect()
}

/// Extremum of Γ along the diagonal, located on an `n_points` cut and
/// then polished by golden-section search between the neighbouring nodes.
pub fn diagonal_extremum(beta_delta_e: f64, p: f64, regime: Regime, n_points: usize) -> Result<(f64, f64)> {
    let cut = diagonal_cut(beta_delta_e, p, regime, n_points)?;
    let kind = regime.extremum_kind();
    let score = |g: f64| match kind {
        ExtremumKind::Min => g,
        ExtremumKind::Max => -g,
    };
    let k = (0..cut.len())
        .min_by(|&a, &b| score(cut[a].gamma).total_cmp(&score(cut[b].gamma)))
        .expect("at least two points");
    let point = SweepPoint::new(beta_delta_e, p)?;
    let f = |c: f64| point.gamma(regime, c, c).map(score);
    let (mut lo, mut hi) = (cut[k.saturating_sub(1)].c_i, cut[(k + 1).min(cut.len() - 1)].c_i);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let c = 0.5 * (lo + hi);
    let best = [(c, f(c)?), (cut[k].c_i, score(cut[k].gamma))]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("two candidates");
    Ok((best.0, score(best.1)))
}
