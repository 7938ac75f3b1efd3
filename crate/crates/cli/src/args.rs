//! Flag definitions. Every numeric flag is checked by its value parser, so a
//! bad value is rejected by clap (exit code 2, flag named in the message)
//! before any computation starts.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use microrev::channel::{p_from_time, TimeMap};
use microrev::{ChannelParams, Evaluation, Regime, TransitionCase};

#[derive(Debug, Parser)]
#[command(name = "microrev", version, about = "Deviation from classical microreversibility for a damped qubit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Γ over the (C_i, C_f) coherence square.
    Map(MapArgs),
    /// Γ against βΔE for a fixed transition.
    Curve(CurveArgs),
    /// Γ along the diagonal C_i = C_f.
    Cut(CutArgs),
    /// Locate the minimum (release) or maximum (absorb) of Γ.
    Extremum(ExtremumArgs),
    /// Run a transition through the simulated interferometer, optionally
    /// with shot noise.
    PhotonicSim(PhotonicArgs),
    /// Run the built-in consistency suites.
    Verify(VerifyArgs),
}

fn parse_nonneg(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("must be finite and >= 0, got {v}"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("must be finite and > 0, got {v}"));
    }
    Ok(v)
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !v.is_finite() {
        return Err(format!("must be finite, got {v}"));
    }
    Ok(v)
}

fn parse_points(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < 2 {
        return Err(format!("needs at least 2 points, got {v}"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    /// Initial state in the upper hemisphere, final in the lower (Q <= 0).
    Release,
    /// Initial state in the lower hemisphere, final in the upper (Q >= 0).
    Absorb,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Release => Regime::HeatRelease,
            RegimeArg::Absorb => Regime::HeatAbsorb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    /// |g> to |e>.
    #[value(alias = "1")]
    Classical,
    /// (|g>+|e>)/√2 to |e>.
    #[value(name = "d-to-e", alias = "2")]
    DToE,
    /// (|g>+|e>)/√2 to (|g>+√3|e>)/2.
    #[value(name = "d-to-psi", alias = "3")]
    DToPsi,
}

impl CaseArg {
    pub fn number(self) -> u8 {
        match self {
            CaseArg::Classical => 1,
            CaseArg::DToE => 2,
            CaseArg::DToPsi => 3,
        }
    }
}

impl From<CaseArg> for TransitionCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Classical => TransitionCase::Classical,
            CaseArg::DToE => TransitionCase::CoherentToExcited,
            CaseArg::DToPsi => TransitionCase::CoherentToCoherent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvaluationArg {
    /// Closed-form probabilities.
    Closed,
    /// Explicit unitary evolution and partial trace.
    Numeric,
}

impl From<EvaluationArg> for Evaluation {
    fn from(e: EvaluationArg) -> Self {
        match e {
            EvaluationArg::Closed => Evaluation::Closed,
            EvaluationArg::Numeric => Evaluation::Numeric,
        }
    }
}

/// Damping strength, either directly or from an interaction time.
#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    /// Damping probability p.
    #[arg(long, default_value_t = 0.5, value_parser = parse_probability, allow_negative_numbers = true, conflicts_with = "time")]
    pub p: f64,
    /// Interaction time t; sets p = exp(-t / tau). Requires --tau.
    #[arg(long, value_parser = parse_nonneg, allow_negative_numbers = true, requires = "tau")]
    pub time: Option<f64>,
    /// Relaxation time used with --time.
    #[arg(long, value_parser = parse_positive, allow_negative_numbers = true, requires = "time")]
    pub tau: Option<f64>,
}

impl ChannelArgs {
    pub fn params(&self) -> microrev::Result<ChannelParams> {
        match (self.time, self.tau) {
            (Some(t), Some(tau)) => p_from_time(t, &TimeMap::new(tau)?),
            _ => ChannelParams::new(self.p),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write a standalone SVG rendering to this path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Inverse temperature times level splitting.
    #[arg(long, default_value_t = 2.0, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub beta_delta_e: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value_t = RegimeArg::Release)]
    pub regime: RegimeArg,
    /// Points per coherence axis, endpoints included.
    #[arg(long, default_value_t = 201, value_parser = parse_points)]
    pub grid: usize,
    /// Azimuth of the initial state.
    #[arg(long, default_value_t = 0.0, value_parser = parse_finite, allow_negative_numbers = true)]
    pub phi_i: f64,
    /// Azimuth of the final state.
    #[arg(long, default_value_t = 0.0, value_parser = parse_finite, allow_negative_numbers = true)]
    pub phi_f: f64,
    #[arg(long, value_enum, default_value_t = EvaluationArg::Closed)]
    pub evaluation: EvaluationArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value_t = CaseArg::DToE)]
    pub case: CaseArg,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Lowest βΔE.
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub beta_min: f64,
    /// Highest βΔE.
    #[arg(long, default_value_t = 4.0, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub beta_max: f64,
    /// Number of βΔE samples, endpoints included.
    #[arg(long, default_value_t = 81, value_parser = parse_points)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CutArgs {
    #[arg(long, default_value_t = 2.0, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub beta_delta_e: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value_t = RegimeArg::Release)]
    pub regime: RegimeArg,
    /// Samples along the diagonal, endpoints included.
    #[arg(long, default_value_t = 101, value_parser = parse_points)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExtremumArgs {
    #[arg(long, default_value_t = 1.0, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub beta_delta_e: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value_t = RegimeArg::Release)]
    pub regime: RegimeArg,
    /// Write the located point (and refinement history) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PhotonicArgs {
    #[arg(long, value_enum, default_value_t = CaseArg::DToE)]
    pub case: CaseArg,
    #[arg(long, default_value_t = 2.0, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub beta_delta_e: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Photons per run (forward and backward each); 0 skips sampling.
    #[arg(long, default_value_t = 100_000)]
    pub n_shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Offset added to the closed-form forward probability, to check that
    /// the suites catch a wrong formula.
    #[arg(long, hide = true, default_value_t = 0.0, value_parser = parse_finite, allow_negative_numbers = true)]
    pub perturb_forward: f64,
}
