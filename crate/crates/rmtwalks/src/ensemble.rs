//! Matrix-valued process samples.
//!
//! One walk is kept per link class, never per position: entries with equal
//! link value are the same random variable by construction, and the walk
//! vector is unfolded into a dense snapshot at every grid time. Stopped
//! walks advance by the increments of a single fractional Poisson clock
//! shared across all entries.

use crate::clocks::{self, FppMethod, FppPath};
use crate::patterns::{LinkKind, LinkTable};
use crate::specfn::AlphaParam;
use crate::stream::RandomStream;
use crate::walks::{self, StepLaw, TimeGrid};
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

/// Largest order for which dense snapshots are materialized.
pub const MAX_DENSE_ORDER: usize = 4096;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("capacity exceeded: order {n} is beyond the dense snapshot budget {max}")]
    Capacity { n: usize, max: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Clock(#[from] clocks::ClockError),
}

/// Which clock advances the entry walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    /// Deterministic step counts `[n t_k] - [n t_{k-1}]`.
    Deterministic,
    /// One fractional Poisson path shared by every entry.
    FppShared,
    /// Exploratory: an independent fractional Poisson clock per link class.
    /// Excluded from the acceptance experiments.
    FppPerClass,
}

/// Overall scaling applied to the raw-sum matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `n^{-1}`, the scaling of the walk-entry process.
    Ctrw,
    /// `n^{-(1+alpha)/2}`, the scaling of the stopped-walk process.
    Stopped,
}

/// Full recipe for one matrix-process sample.
#[derive(Debug, Clone)]
pub struct ProcessConfig {
    pub kind: LinkKind,
    pub n: usize,
    pub grid: TimeGrid,
    pub step_law: StepLaw,
    pub alpha: AlphaParam,
    /// Correlation of the `(i,j)`/`(j,i)` step pairs; elliptic kind only.
    pub rho: f64,
    pub clock: Clock,
    pub scaling: Scaling,
    pub trials: usize,
    pub seed: u64,
}

impl ProcessConfig {
    /// A deterministic-clock walk process at `n^{-1}` scaling.
    pub fn ctrw(kind: LinkKind, n: usize, grid: TimeGrid, law: StepLaw, seed: u64) -> Self {
        ProcessConfig {
            kind,
            n,
            grid,
            step_law: law,
            alpha: AlphaParam::new(1.0).unwrap(),
            rho: 0.0,
            clock: Clock::Deterministic,
            scaling: Scaling::Ctrw,
            trials: 1,
            seed,
        }
    }

    /// A shared-fPP stopped-walk process at `n^{-(1+alpha)/2}` scaling.
    pub fn stopped(
        kind: LinkKind,
        n: usize,
        grid: TimeGrid,
        law: StepLaw,
        alpha: AlphaParam,
        seed: u64,
    ) -> Self {
        ProcessConfig {
            kind,
            n,
            grid,
            step_law: law,
            alpha,
            rho: 0.0,
            clock: Clock::FppShared,
            scaling: Scaling::Stopped,
            trials: 1,
            seed,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    /// Checks every declared invariant; errors name the offending field.
    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.n == 0 {
            return Err(EnsembleError::InvalidConfig("n: must be >= 1".into()));
        }
        if self.n > MAX_DENSE_ORDER {
            return Err(EnsembleError::Capacity {
                n: self.n,
                max: MAX_DENSE_ORDER,
            });
        }
        if self.trials == 0 {
            return Err(EnsembleError::InvalidConfig("trials: must be >= 1".into()));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(EnsembleError::InvalidConfig(format!(
                "rho: must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if self.rho != 0.0 && self.kind != LinkKind::EllipticIID {
            return Err(EnsembleError::InvalidConfig(
                "rho: only meaningful for the elliptic kind".into(),
            ));
        }
        if self.kind == LinkKind::EllipticIID && self.step_law != StepLaw::StandardGaussian {
            return Err(EnsembleError::InvalidConfig(
                "step_law: elliptic correlated pairs use Gaussian steps".into(),
            ));
        }
        match (self.clock, self.scaling) {
            (Clock::Deterministic, Scaling::Ctrw) => {}
            (Clock::FppShared | Clock::FppPerClass, Scaling::Stopped) => {}
            (Clock::Deterministic, Scaling::Stopped) => {
                return Err(EnsembleError::InvalidConfig(
                    "scaling: stopped scaling requires an fPP clock".into(),
                ))
            }
            (_, Scaling::Ctrw) => {
                return Err(EnsembleError::InvalidConfig(
                    "clock: fPP clocks require stopped scaling".into(),
                ))
            }
        }
        Ok(())
    }

    /// The scale factor applied to raw entry sums.
    pub fn scale_factor(&self) -> f64 {
        match self.scaling {
            Scaling::Ctrw => 1.0 / self.n as f64,
            Scaling::Stopped => (self.n as f64).powf(-(1.0 + self.alpha.value()) / 2.0),
        }
    }
}

/// One dense observation of the matrix process.
#[derive(Debug, Clone)]
pub struct MatrixSnapshot {
    pub time: f64,
    pub n: usize,
    pub kind: LinkKind,
    /// Row-major scaled entries.
    entries: Vec<f64>,
    pub symmetric: bool,
}

impl MatrixSnapshot {
    /// Wraps explicit row-major entries as a snapshot.
    ///
    /// Panics if the entry count does not match the order or the symmetric
    /// flag disagrees with the data.
    pub fn from_entries(
        time: f64,
        kind: LinkKind,
        n: usize,
        entries: Vec<f64>,
        symmetric: bool,
    ) -> MatrixSnapshot {
        assert_eq!(entries.len(), n * n, "need n^2 entries");
        if symmetric {
            for i in 0..n {
                for j in (i + 1)..n {
                    assert_eq!(
                        entries[i * n + j].to_bits(),
                        entries[j * n + i].to_bits(),
                        "symmetric flag requires bitwise-symmetric entries"
                    );
                }
            }
        }
        MatrixSnapshot {
            time,
            n,
            kind,
            entries,
            symmetric,
        }
    }

    fn from_walks(
        time: f64,
        table: &LinkTable,
        walks: &[f64],
        scale: f64,
    ) -> MatrixSnapshot {
        let n = table.order();
        let mut entries = vec![0.0; n * n];
        for i in 1..=n {
            for j in 1..=n {
                entries[(i - 1) * n + (j - 1)] = scale * walks[table.index_unchecked(i, j)];
            }
        }
        MatrixSnapshot {
            time,
            n,
            kind: table.kind(),
            entries,
            symmetric: table.kind().is_symmetric(),
        }
    }

    /// Entry at 1-based position `(i, j)`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    #[inline]
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// First row, the generator of the circulant-family kinds.
    pub fn first_row(&self) -> &[f64] {
        &self.entries[..self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }
}

/// The clock realization a stopped sample was driven by.
#[derive(Debug, Clone)]
pub enum ClockTrace {
    Fpp(FppPath),
}

/// A full realization of the process: one snapshot per grid time.
#[derive(Debug, Clone)]
pub struct ProcessSample {
    pub snapshots: Vec<MatrixSnapshot>,
    pub clock_trace: Option<ClockTrace>,
}

impl ProcessSample {
    pub fn at(&self, k: usize) -> &MatrixSnapshot {
        &self.snapshots[k]
    }

    /// Snapshot at grid time `t` (exact match).
    pub fn at_time(&self, t: f64) -> Option<&MatrixSnapshot> {
        self.snapshots.iter().find(|s| s.time == t)
    }
}

/// Builds a process sample, dispatching on kind and clock.
pub fn build_process(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<ProcessSample, EnsembleError> {
    config.validate()?;
    if config.kind == LinkKind::EllipticIID {
        build_elliptic(config, rng)
    } else {
        match config.clock {
            Clock::Deterministic => build_ctrw_process(config, rng),
            Clock::FppShared | Clock::FppPerClass => build_stopped_process(config, rng),
        }
    }
}

/// Walk-entry process `A_n(t) = ((S_{L(i,j)}(t)))` under the deterministic
/// clock, entries scaled by `n^{-1}`.
pub fn build_ctrw_process(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<ProcessSample, EnsembleError> {
    config.validate()?;
    if config.clock != Clock::Deterministic {
        return Err(EnsembleError::InvalidConfig(
            "clock: build_ctrw_process requires the deterministic clock".into(),
        ));
    }
    let table = LinkTable::new(config.kind, config.n).expect("validated order");
    let counts = walks::step_counts_from_zero(config.n as u64, &config.grid);
    let sample = advance_class_walks(config, &table, &counts.counts, rng);
    Ok(sample)
}

/// Stopped-walk process `A_n^alpha(t)`: one fractional Poisson path at times
/// `n * t_k` drives every entry; overall scaling `n^{-(1+alpha)/2}`.
pub fn build_stopped_process(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<ProcessSample, EnsembleError> {
    config.validate()?;
    let table = LinkTable::new(config.kind, config.n).expect("validated order");
    match config.clock {
        Clock::FppShared => {
            let clock_path = sample_clock(config, rng)?;
            let increments = clock_path.increments();
            let mut sample = advance_class_walks(config, &table, &increments, rng);
            sample.clock_trace = Some(ClockTrace::Fpp(clock_path));
            Ok(sample)
        }
        Clock::FppPerClass => {
            // Exploratory mode: every class runs its own clock, which breaks
            // the single-subordinator limit and is excluded from acceptance.
            let classes = table.num_classes();
            let mut walks_now = vec![0.0f64; classes];
            let mut per_class_counts: Vec<Vec<u64>> = Vec::with_capacity(classes);
            for _ in 0..classes {
                per_class_counts.push(sample_clock(config, rng)?.increments());
            }
            let mut snapshots = Vec::with_capacity(config.grid.len());
            let scale = config.scale_factor();
            for (k, &t) in config.grid.points().iter().enumerate() {
                for (c, walk) in walks_now.iter_mut().enumerate() {
                    *walk += draw_increment(config.step_law, per_class_counts[c][k], rng);
                }
                snapshots.push(MatrixSnapshot::from_walks(t, &table, &walks_now, scale));
            }
            Ok(ProcessSample {
                snapshots,
                clock_trace: None,
            })
        }
        Clock::Deterministic => Err(EnsembleError::InvalidConfig(
            "clock: build_stopped_process requires an fPP clock".into(),
        )),
    }
}

fn sample_clock(config: &ProcessConfig, rng: &mut RandomStream) -> Result<FppPath, EnsembleError> {
    let clock_times = TimeGrid::new(
        config
            .grid
            .points()
            .iter()
            .map(|&t| t * config.n as f64)
            .collect(),
    )
    .expect("scaled grid stays valid");
    // Rate-one clock; Eq-level experiments never vary the rate.
    Ok(clocks::sample_fpp(
        config.alpha,
        1.0,
        &clock_times,
        FppMethod::TimeChange,
        rng,
    )?)
}

/// Advances one walk per class by the given per-interval counts and takes a
/// snapshot at every grid time.
fn advance_class_walks(
    config: &ProcessConfig,
    table: &LinkTable,
    interval_counts: &[u64],
    rng: &mut RandomStream,
) -> ProcessSample {
    let classes = table.num_classes();
    let mut class_walks = vec![0.0f64; classes];
    let scale = config.scale_factor();
    let mut snapshots = Vec::with_capacity(config.grid.len());
    for (k, &t) in config.grid.points().iter().enumerate() {
        let c = interval_counts[k];
        for walk in class_walks.iter_mut() {
            *walk += draw_increment(config.step_law, c, rng);
        }
        snapshots.push(MatrixSnapshot::from_walks(t, table, &class_walks, scale));
    }
    ProcessSample {
        snapshots,
        clock_trace: None,
    }
}

/// Sum of `count` fresh iid steps; Gaussian steps use the exact
/// distributional shortcut.
#[inline]
fn draw_increment(law: StepLaw, count: u64, rng: &mut RandomStream) -> f64 {
    match law {
        StepLaw::StandardGaussian => walks::gaussian_block(count, rng),
        _ => {
            let mut acc = 0.0;
            for _ in 0..count {
                acc += law.sample(rng);
            }
            acc
        }
    }
}

/// Elliptic process: ordered-pair entries with correlated `(i,j)`/`(j,i)`
/// steps, `corr = rho`, Gaussian coupling. Supports both clocks.
pub fn build_elliptic(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<ProcessSample, EnsembleError> {
    config.validate()?;
    if config.kind != LinkKind::EllipticIID {
        return Err(EnsembleError::InvalidConfig(
            "kind: build_elliptic requires the elliptic kind".into(),
        ));
    }
    let n = config.n;
    let table = LinkTable::new(config.kind, n).expect("validated order");
    let rho = config.rho;
    let cross = (1.0 - rho * rho).sqrt();

    let (interval_counts, clock_trace) = match config.clock {
        Clock::Deterministic => (
            walks::step_counts_from_zero(n as u64, &config.grid).counts,
            None,
        ),
        Clock::FppShared => {
            let path = sample_clock(config, rng)?;
            (path.increments(), Some(ClockTrace::Fpp(path)))
        }
        Clock::FppPerClass => {
            return Err(EnsembleError::InvalidConfig(
                "clock: per-class clocks are not defined for correlated pairs".into(),
            ))
        }
    };

    let mut class_walks = vec![0.0f64; table.num_classes()];
    let scale = config.scale_factor();
    let mut snapshots = Vec::with_capacity(config.grid.len());
    for (k, &t) in config.grid.points().iter().enumerate() {
        let c = interval_counts[k];
        for i in 1..=n {
            // Diagonal steps are independent.
            let d = table.index_unchecked(i, i);
            class_walks[d] += walks::gaussian_block(c, rng);
            for j in (i + 1)..=n {
                // Summed coupled pairs: (G1, rho G1 + sqrt(1-rho^2) G2) with
                // G1, G2 centered Gaussians of variance c.
                let g1 = walks::gaussian_block(c, rng);
                let g2 = walks::gaussian_block(c, rng);
                class_walks[table.index_unchecked(i, j)] += g1;
                class_walks[table.index_unchecked(j, i)] += rho * g1 + cross * g2;
            }
        }
        snapshots.push(MatrixSnapshot::from_walks(t, &table, &class_walks, scale));
    }
    Ok(ProcessSample {
        snapshots,
        clock_trace,
    })
}

/// Number of single-step matrices summed by [`build_iid_copies_sum`].
#[derive(Debug, Clone, Copy)]
pub enum CopyCount {
    /// Exactly `n` copies.
    Deterministic,
    /// A Poisson(`n`) number of copies.
    Poisson,
    /// A fractional Poisson `N^alpha(n)` number of copies.
    Fpp(AlphaParam),
}

/// Sum of independently drawn single-step-per-entry matrices at `t = 1`
/// semantics: `count` copies, scaled `n^{-1}` for the deterministic and
/// Poisson counts and `n^{-(1+alpha)/2}` for the fractional count, matching
/// the walk and stopped-walk scalings.
pub fn build_iid_copies_sum(
    kind: LinkKind,
    n: usize,
    count: CopyCount,
    law: StepLaw,
    rng: &mut RandomStream,
) -> Result<MatrixSnapshot, EnsembleError> {
    if n == 0 {
        return Err(EnsembleError::InvalidConfig("n: must be >= 1".into()));
    }
    if n > MAX_DENSE_ORDER {
        return Err(EnsembleError::Capacity {
            n,
            max: MAX_DENSE_ORDER,
        });
    }
    let table = LinkTable::new(kind, n).expect("validated order");
    let (copies, scale) = match count {
        CopyCount::Deterministic => (n as u64, 1.0 / n as f64),
        CopyCount::Poisson => (
            Poisson::new(n as f64).expect("positive mean").sample(rng) as u64,
            1.0 / n as f64,
        ),
        CopyCount::Fpp(alpha) => {
            let grid = TimeGrid::new(vec![n as f64]).expect("valid");
            let path = clocks::sample_fpp(alpha, 1.0, &grid, FppMethod::TimeChange, rng)?;
            (
                path.counts[0],
                (n as f64).powf(-(1.0 + alpha.value()) / 2.0),
            )
        }
    };
    let mut class_walks = vec![0.0f64; table.num_classes()];
    for walk in class_walks.iter_mut() {
        *walk = draw_increment(law, copies, rng);
    }
    let mut snapshot = MatrixSnapshot::from_walks(1.0, &table, &class_walks, scale);
    snapshot.time = 1.0;
    Ok(snapshot)
}
