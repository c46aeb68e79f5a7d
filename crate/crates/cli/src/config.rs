//! Experiment configuration: one JSON document per run.
//!
//! The document carries the experiment tag, a process payload, and
//! experiment-specific fields. Everything is validated before any sampling
//! starts; validation errors name the offending field.

use crate::error::CliError;
use rmtwalks::specfn::AlphaParam;
use rmtwalks::{Clock, LinkKind, ProcessConfig, Scaling, StepLaw, TimeGrid};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Wigner,
    SymToeplitz,
    SymHankel,
    ReverseCirculant,
    SymmetricCirculant,
    Circulant,
    EllipticIid,
}

impl From<KindName> for LinkKind {
    fn from(k: KindName) -> LinkKind {
        match k {
            KindName::Wigner => LinkKind::Wigner,
            KindName::SymToeplitz => LinkKind::SymToeplitz,
            KindName::SymHankel => LinkKind::SymHankel,
            KindName::ReverseCirculant => LinkKind::ReverseCirculant,
            KindName::SymmetricCirculant => LinkKind::SymmetricCirculant,
            KindName::Circulant => LinkKind::Circulant,
            KindName::EllipticIid => LinkKind::EllipticIID,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepLawName {
    StandardGaussian,
    Rademacher,
    UniformScaled,
}

impl From<StepLawName> for StepLaw {
    fn from(s: StepLawName) -> StepLaw {
        match s {
            StepLawName::StandardGaussian => StepLaw::StandardGaussian,
            StepLawName::Rademacher => StepLaw::Rademacher,
            StepLawName::UniformScaled => StepLaw::UniformScaled,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockName {
    Deterministic,
    FppShared,
    FppPerClass,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingName {
    Ctrw,
    Stopped,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceName {
    Semicircle,
    Gaussian,
    SymmetrizedRayleigh,
}

impl From<ReferenceName> for rmtwalks::specfn::ReferenceLaw {
    fn from(r: ReferenceName) -> rmtwalks::specfn::ReferenceLaw {
        match r {
            ReferenceName::Semicircle => rmtwalks::specfn::ReferenceLaw::Semicircle,
            ReferenceName::Gaussian => rmtwalks::specfn::ReferenceLaw::Gaussian,
            ReferenceName::SymmetrizedRayleigh => {
                rmtwalks::specfn::ReferenceLaw::SymmetrizedRayleigh
            }
        }
    }
}

/// The process payload shared by the matrix experiments.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessPayload {
    pub kind: KindName,
    pub n: usize,
    pub grid: Vec<f64>,
    #[serde(default = "default_step_law")]
    pub step_law: StepLawName,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "default_clock")]
    pub clock: ClockName,
    #[serde(default = "default_scaling")]
    pub scaling: ScalingName,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_step_law() -> StepLawName {
    StepLawName::StandardGaussian
}
fn default_alpha() -> f64 {
    1.0
}
fn default_clock() -> ClockName {
    ClockName::Deterministic
}
fn default_scaling() -> ScalingName {
    ScalingName::Ctrw
}
fn default_trials() -> usize {
    1
}

impl ProcessPayload {
    pub fn to_process_config(&self, seed: u64) -> Result<ProcessConfig, CliError> {
        let grid = TimeGrid::new(self.grid.clone())
            .map_err(|e| CliError::validation(format!("process.grid: {e}")))?;
        let alpha = AlphaParam::new(self.alpha)
            .map_err(|e| CliError::validation(format!("process.alpha: {e}")))?;
        let config = ProcessConfig {
            kind: self.kind.into(),
            n: self.n,
            grid,
            step_law: self.step_law.into(),
            alpha,
            rho: self.rho,
            clock: match self.clock {
                ClockName::Deterministic => Clock::Deterministic,
                ClockName::FppShared => Clock::FppShared,
                ClockName::FppPerClass => Clock::FppPerClass,
            },
            scaling: match self.scaling {
                ScalingName::Ctrw => Scaling::Ctrw,
                ScalingName::Stopped => Scaling::Stopped,
            },
            trials: self.trials,
            seed,
        };
        config.validate().map_err(CliError::from)?;
        Ok(config)
    }
}

/// The whole experiment document, tagged by `experiment`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    /// Pooled eigenvalue samples, optionally across an alpha series, with an
    /// SVG histogram figure.
    Esd {
        seed: u64,
        process: ProcessPayload,
        /// When present, the process runs once per alpha (stopped clock).
        #[serde(default)]
        alphas: Vec<f64>,
        #[serde(default)]
        reference: Option<ReferenceName>,
    },
    /// Trace-moment table against the closed-form theory column.
    Moments {
        seed: u64,
        process: ProcessPayload,
        orders: Vec<u32>,
    },
    /// Brute-force word-limit table.
    #[serde(rename = "word-limits")]
    WordLimits {
        seed: u64,
        kind: KindName,
        m: usize,
        orders_n: Vec<usize>,
        #[serde(default = "default_time")]
        time: f64,
    },
    /// Empirical eigenvalue-process paths and finite-dimensional statistics.
    Process {
        seed: u64,
        process: ProcessPayload,
        paths: usize,
        #[serde(default)]
        pairs: Vec<(f64, f64)>,
        /// How many raw paths to export to CSV.
        #[serde(default = "default_emit_paths")]
        emit_paths: usize,
    },
    /// Subordinator and fractional-Poisson diagnostics.
    Clocks {
        seed: u64,
        alphas: Vec<f64>,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default = "default_time")]
        time: f64,
        #[serde(default = "default_clock_paths")]
        paths: usize,
    },
    /// Mixed *-moments of the circulant and elliptic ensembles.
    #[serde(rename = "star-moments")]
    StarMoments {
        seed: u64,
        process: ProcessPayload,
        /// Elliptic correlation series; ignored for the circulant kind.
        #[serde(default)]
        rhos: Vec<f64>,
    },
}

fn default_time() -> f64 {
    1.0
}
fn default_lambda() -> f64 {
    1.0
}
fn default_emit_paths() -> usize {
    100
}
fn default_clock_paths() -> usize {
    100_000
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Esd { seed, .. }
            | ExperimentConfig::Moments { seed, .. }
            | ExperimentConfig::WordLimits { seed, .. }
            | ExperimentConfig::Process { seed, .. }
            | ExperimentConfig::Clocks { seed, .. }
            | ExperimentConfig::StarMoments { seed, .. } => *seed,
        }
    }

    pub fn override_seed(&mut self, new_seed: u64) {
        match self {
            ExperimentConfig::Esd { seed, .. }
            | ExperimentConfig::Moments { seed, .. }
            | ExperimentConfig::WordLimits { seed, .. }
            | ExperimentConfig::Process { seed, .. }
            | ExperimentConfig::Clocks { seed, .. }
            | ExperimentConfig::StarMoments { seed, .. } => *seed = new_seed,
        }
    }

    /// Full validation before any sampling.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            ExperimentConfig::Esd {
                seed,
                process,
                alphas,
                ..
            } => {
                let config = process.to_process_config(*seed)?;
                if config.kind == LinkKind::EllipticIID || config.kind == LinkKind::Circulant {
                    return Err(CliError::validation(
                        "process.kind: the esd experiment needs a real spectrum".into(),
                    ));
                }
                for &a in alphas {
                    AlphaParam::new(a)
                        .map_err(|e| CliError::validation(format!("alphas: {e}")))?;
                }
                if !alphas.is_empty()
                    && !(config.clock == Clock::FppShared && config.scaling == Scaling::Stopped)
                {
                    return Err(CliError::validation(
                        "alphas: an alpha series runs stopped processes; set process.clock \
                         to fpp_shared and process.scaling to stopped"
                            .into(),
                    ));
                }
                Ok(())
            }
            ExperimentConfig::Moments {
                seed,
                process,
                orders,
            } => {
                process.to_process_config(*seed)?;
                if orders.is_empty() {
                    return Err(CliError::validation("orders: must be nonempty".into()));
                }
                if orders.iter().any(|&l| l == 0) {
                    return Err(CliError::validation("orders: orders start at 1".into()));
                }
                Ok(())
            }
            ExperimentConfig::WordLimits {
                kind, m, orders_n, ..
            } => {
                if *m == 0 || *m > 3 {
                    return Err(CliError::validation(
                        "m: brute-force word limits support 1 <= m <= 3".into(),
                    ));
                }
                if orders_n.is_empty() {
                    return Err(CliError::validation("orders_n: must be nonempty".into()));
                }
                if orders_n.iter().any(|&n| n < 2 || n > 32) {
                    return Err(CliError::validation(
                        "orders_n: brute force supports 2 <= n <= 32".into(),
                    ));
                }
                if matches!(kind, KindName::EllipticIid) {
                    return Err(CliError::validation(
                        "kind: word limits are defined for the patterned kinds".into(),
                    ));
                }
                Ok(())
            }
            ExperimentConfig::Process {
                seed,
                process,
                paths,
                pairs,
                ..
            } => {
                let config = process.to_process_config(*seed)?;
                if !matches!(
                    config.kind,
                    LinkKind::SymmetricCirculant | LinkKind::Circulant
                ) {
                    return Err(CliError::validation(
                        "process.kind: eigenvalue paths exist for symmetric_circulant \
                         (real) and circulant (complex)"
                            .into(),
                    ));
                }
                if *paths < 2 {
                    return Err(CliError::validation("paths: need at least 2".into()));
                }
                for &(s, t) in pairs {
                    for v in [s, t] {
                        if !config.grid.points().contains(&v) {
                            return Err(CliError::validation(format!(
                                "pairs: time {v} is not a grid point"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ExperimentConfig::Clocks {
                alphas,
                lambda,
                time,
                paths,
                ..
            } => {
                if alphas.is_empty() {
                    return Err(CliError::validation("alphas: must be nonempty".into()));
                }
                for &a in alphas {
                    AlphaParam::new(a)
                        .map_err(|e| CliError::validation(format!("alphas: {e}")))?;
                }
                if !(*lambda > 0.0) {
                    return Err(CliError::validation("lambda: must be positive".into()));
                }
                if !(*time > 0.0) {
                    return Err(CliError::validation("time: must be positive".into()));
                }
                if *paths < 100 {
                    return Err(CliError::validation("paths: need at least 100".into()));
                }
                Ok(())
            }
            ExperimentConfig::StarMoments {
                seed,
                process,
                rhos,
            } => {
                let config = process.to_process_config(*seed)?;
                match config.kind {
                    LinkKind::Circulant => Ok(()),
                    LinkKind::EllipticIID => {
                        if rhos.is_empty() {
                            return Err(CliError::validation(
                                "rhos: the elliptic star-moment experiment needs a rho series"
                                    .into(),
                            ));
                        }
                        if rhos.iter().any(|r| !(-1.0..=1.0).contains(r)) {
                            return Err(CliError::validation(
                                "rhos: correlations lie in [-1, 1]".into(),
                            ));
                        }
                        Ok(())
                    }
                    _ => Err(CliError::validation(
                        "process.kind: star moments run on circulant or elliptic_iid".into(),
                    )),
                }
            }
        }
    }
}
