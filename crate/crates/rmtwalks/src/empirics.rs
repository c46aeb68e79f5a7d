//! Empirical eigenvalue processes and their finite-dimensional statistics.
//!
//! One uniform index is drawn per path, before time evolution, and the same
//! eigenvalue is then followed across the whole grid. For the symmetric
//! circulant the eigenvalue is a cosine-weighted combination of the first-row
//! walks, so a path costs `O(classes)` per grid point; the circulant analogue
//! uses the complex Fourier weights.

use crate::clocks::{self, FppMethod};
use crate::ensemble::{self, Clock, ProcessConfig};
use crate::patterns::LinkKind;
use crate::spectra::{self, MomentEstimate};
use crate::stream::{self, RandomStream};
use crate::walks::{self, StepLaw, TimeGrid};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmpiricsError {
    #[error("kind mismatch: expected {expected:?}, got {got:?}")]
    KindMismatch { expected: LinkKind, got: LinkKind },
    #[error("time {0} is not a grid point")]
    GridMismatch(f64),
    #[error("paths must share one grid")]
    MixedGrids,
    #[error(transparent)]
    Ensemble(#[from] ensemble::EnsembleError),
    #[error(transparent)]
    Spectra(#[from] spectra::SpectraError),
}

/// One real eigenvalue path: the same uniformly drawn index at every time.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub times: TimeGrid,
    /// The drawn eigenvalue index (`1..=n` in the symmetric-circulant
    /// indexing).
    pub index: usize,
    pub values: Vec<f64>,
}

/// One complex circulant eigenvalue path.
#[derive(Debug, Clone)]
pub struct ComplexPathSample {
    pub times: TimeGrid,
    /// DFT index in `0..n`.
    pub index: usize,
    pub values: Vec<Complex64>,
}

/// Symmetric-circulant eigenvalue of the (unscaled) first-row class values:
/// `S_0 + 2 sum_c S_c cos(2 pi r c / n)`, with the middle class entering
/// once for even `n`.
pub fn sym_circulant_eigenvalue(class_values: &[f64], n: usize, r: usize) -> f64 {
    let half = n / 2;
    debug_assert_eq!(class_values.len(), half + 1);
    let mut acc = class_values[0];
    let upper = if n % 2 == 0 { half - 1 } else { half };
    for (c, &s) in class_values.iter().enumerate().take(upper + 1).skip(1) {
        acc += 2.0 * (2.0 * std::f64::consts::PI * (r as f64) * (c as f64) / n as f64).cos() * s;
    }
    if n % 2 == 0 {
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * class_values[half];
    }
    acc
}

fn interval_counts(config: &ProcessConfig, rng: &mut RandomStream) -> Result<Vec<u64>, EmpiricsError> {
    match config.clock {
        Clock::Deterministic => {
            Ok(walks::step_counts_from_zero(config.n as u64, &config.grid).counts)
        }
        Clock::FppShared => {
            let clock_times = TimeGrid::new(
                config
                    .grid
                    .points()
                    .iter()
                    .map(|&t| t * config.n as f64)
                    .collect(),
            )
            .expect("scaled grid stays valid");
            let path = clocks::sample_fpp(
                config.alpha,
                1.0,
                &clock_times,
                FppMethod::TimeChange,
                rng,
            )
            .map_err(ensemble::EnsembleError::from)?;
            Ok(path.increments())
        }
        Clock::FppPerClass => Err(EmpiricsError::Ensemble(
            ensemble::EnsembleError::InvalidConfig(
                "clock: eigenvalue paths need one clock for the whole matrix".into(),
            ),
        )),
    }
}

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

fn sample_sym_circulant_path(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<PathSample, EmpiricsError> {
    config.validate()?;
    if config.kind != LinkKind::SymmetricCirculant {
        return Err(EmpiricsError::KindMismatch {
            expected: LinkKind::SymmetricCirculant,
            got: config.kind,
        });
    }
    let n = config.n;
    let index = rng.random_range(1..=n);
    let counts = interval_counts(config, rng)?;
    let scale = config.scale_factor();

    let half = n / 2;
    let upper = if n % 2 == 0 { half - 1 } else { half };
    // Per-class eigenvector weights for the drawn index.
    let mut weights = Vec::with_capacity(half + 1);
    weights.push(1.0);
    for c in 1..=upper {
        weights
            .push(2.0 * (2.0 * std::f64::consts::PI * (index as f64) * (c as f64) / n as f64).cos());
    }
    if n % 2 == 0 {
        weights.push(if index % 2 == 0 { 1.0 } else { -1.0 });
    }

    let mut acc = 0.0f64;
    let mut values = Vec::with_capacity(config.grid.len());
    for &c in &counts {
        for &w in &weights {
            acc += w * draw_increment(config.step_law, c, rng);
        }
        values.push(scale * acc);
    }
    Ok(PathSample {
        times: config.grid.clone(),
        index,
        values,
    })
}

/// Path of one uniformly chosen eigenvalue of the walk-entry symmetric
/// circulant process (deterministic clock, `n^{-1}` scaling).
pub fn sample_y(config: &ProcessConfig, rng: &mut RandomStream) -> Result<PathSample, EmpiricsError> {
    if config.clock != Clock::Deterministic {
        return Err(EmpiricsError::Ensemble(
            ensemble::EnsembleError::InvalidConfig(
                "clock: sample_y runs on the deterministic clock".into(),
            ),
        ));
    }
    sample_sym_circulant_path(config, rng)
}

/// Stopped-walk analogue under the shared fractional Poisson clock, scaled
/// `n^{-(1+alpha)/2}`; its weak limit is a Brownian motion time-changed by
/// the inverse subordinator.
pub fn sample_y_alpha(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<PathSample, EmpiricsError> {
    if config.clock != Clock::FppShared {
        return Err(EmpiricsError::Ensemble(
            ensemble::EnsembleError::InvalidConfig(
                "clock: sample_y_alpha needs the shared fPP clock".into(),
            ),
        ));
    }
    sample_sym_circulant_path(config, rng)
}

/// Path of one uniformly chosen complex circulant eigenvalue; walk entries
/// under the deterministic clock or stopped entries under the shared clock,
/// per the configuration.
pub fn sample_z(
    config: &ProcessConfig,
    rng: &mut RandomStream,
) -> Result<ComplexPathSample, EmpiricsError> {
    config.validate()?;
    if config.kind != LinkKind::Circulant {
        return Err(EmpiricsError::KindMismatch {
            expected: LinkKind::Circulant,
            got: config.kind,
        });
    }
    let n = config.n;
    let index = rng.random_range(0..n);
    let counts = interval_counts(config, rng)?;
    let scale = config.scale_factor();

    let weights: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (index as f64) * (j as f64) / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let mut acc = Complex64::new(0.0, 0.0);
    let mut values = Vec::with_capacity(config.grid.len());
    for &c in &counts {
        for &w in &weights {
            acc += w * draw_increment(config.step_law, c, rng);
        }
        values.push(scale * acc);
    }
    Ok(ComplexPathSample {
        times: config.grid.clone(),
        index,
        values,
    })
}

/// Samples `paths` independent eigenvalue paths in parallel trials.
pub fn sample_y_paths(
    config: &ProcessConfig,
    paths: usize,
) -> Result<Vec<PathSample>, EmpiricsError> {
    config.validate()?;
    let use_alpha_clock = config.clock == Clock::FppShared;
    stream::run_trials(config.seed, paths, |_, rng| {
        if use_alpha_clock {
            sample_y_alpha(config, rng)
        } else {
            sample_y(config, rng)
        }
    })
    .into_iter()
    .collect()
}

pub fn sample_z_paths(
    config: &ProcessConfig,
    paths: usize,
) -> Result<Vec<ComplexPathSample>, EmpiricsError> {
    config.validate()?;
    stream::run_trials(config.seed, paths, |_, rng| sample_z(config, rng))
        .into_iter()
        .collect()
}

/// Which functional of the path collection a statistics row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FddStatistic {
    /// `Cov(Y(s), Y(t))`
    Covariance,
    /// `E[Y(s)^2 Y(t)^2]`
    MixedSquare,
    /// Real part of `E[Z(s) conj(Z(t))]`
    ComplexCovRe,
    /// Imaginary part of `E[Z(s) conj(Z(t))]`
    ComplexCovIm,
    /// Real part of the pseudo-covariance `E[Z(s) Z(t)]`
    PseudoCovRe,
    /// Imaginary part of `E[Z(s) Z(t)]`
    PseudoCovIm,
}

impl FddStatistic {
    pub fn name(self) -> &'static str {
        match self {
            FddStatistic::Covariance => "cov",
            FddStatistic::MixedSquare => "mixed_square",
            FddStatistic::ComplexCovRe => "z_cov_re",
            FddStatistic::ComplexCovIm => "z_cov_im",
            FddStatistic::PseudoCovRe => "z_pseudo_re",
            FddStatistic::PseudoCovIm => "z_pseudo_im",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FddRow {
    pub statistic: FddStatistic,
    pub s: f64,
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Finite-dimensional statistics of a path collection over `(s, t)` pairs.
#[derive(Debug, Clone)]
pub struct FddStats {
    pub rows: Vec<FddRow>,
}

impl FddStats {
    pub fn get(&self, statistic: FddStatistic, s: f64, t: f64) -> Option<&FddRow> {
        self.rows
            .iter()
            .find(|r| r.statistic == statistic && r.s == s && r.t == t)
    }
}

fn grid_index(grid: &TimeGrid, t: f64) -> Result<usize, EmpiricsError> {
    grid.points()
        .iter()
        .position(|&p| p == t)
        .ok_or(EmpiricsError::GridMismatch(t))
}

fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample covariances and quartic mixed moments of real paths over the
/// requested `(s, t)` pairs.
pub fn fdd_stats(paths: &[PathSample], pairs: &[(f64, f64)]) -> Result<FddStats, EmpiricsError> {
    let first = paths.first().ok_or(EmpiricsError::MixedGrids)?;
    if paths.iter().any(|p| p.times != first.times) {
        return Err(EmpiricsError::MixedGrids);
    }
    let mut rows = Vec::new();
    for &(s, t) in pairs {
        let si = grid_index(&first.times, s)?;
        let ti = grid_index(&first.times, t)?;
        let xs: Vec<f64> = paths.iter().map(|p| p.values[si]).collect();
        let ys: Vec<f64> = paths.iter().map(|p| p.values[ti]).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let cov_samples: Vec<f64> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| (x - mx) * (y - my))
            .collect();
        let (cov, cov_se) = mean_and_stderr(&cov_samples);
        rows.push(FddRow {
            statistic: FddStatistic::Covariance,
            s,
            t,
            estimate: cov,
            stderr: cov_se,
            trials: paths.len(),
        });
        let quartic: Vec<f64> = xs.iter().zip(&ys).map(|(&x, &y)| x * x * y * y).collect();
        let (q, q_se) = mean_and_stderr(&quartic);
        rows.push(FddRow {
            statistic: FddStatistic::MixedSquare,
            s,
            t,
            estimate: q,
            stderr: q_se,
            trials: paths.len(),
        });
    }
    Ok(FddStats { rows })
}

/// Covariance and pseudo-covariance of complex paths over `(s, t)` pairs.
pub fn complex_fdd_stats(
    paths: &[ComplexPathSample],
    pairs: &[(f64, f64)],
) -> Result<FddStats, EmpiricsError> {
    let first = paths.first().ok_or(EmpiricsError::MixedGrids)?;
    if paths.iter().any(|p| p.times != first.times) {
        return Err(EmpiricsError::MixedGrids);
    }
    let mut rows = Vec::new();
    for &(s, t) in pairs {
        let si = grid_index(&first.times, s)?;
        let ti = grid_index(&first.times, t)?;
        let cov: Vec<Complex64> = paths
            .iter()
            .map(|p| p.values[si] * p.values[ti].conj())
            .collect();
        let pseudo: Vec<Complex64> = paths
            .iter()
            .map(|p| p.values[si] * p.values[ti])
            .collect();
        for (stat_re, stat_im, samples) in [
            (
                FddStatistic::ComplexCovRe,
                FddStatistic::ComplexCovIm,
                &cov,
            ),
            (
                FddStatistic::PseudoCovRe,
                FddStatistic::PseudoCovIm,
                &pseudo,
            ),
        ] {
            let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
            let im: Vec<f64> = samples.iter().map(|z| z.im).collect();
            let (er, ser) = mean_and_stderr(&re);
            let (ei, sei) = mean_and_stderr(&im);
            rows.push(FddRow {
                statistic: stat_re,
                s,
                t,
                estimate: er,
                stderr: ser,
                trials: paths.len(),
            });
            rows.push(FddRow {
                statistic: stat_im,
                s,
                t,
                estimate: ei,
                stderr: sei,
                trials: paths.len(),
            });
        }
    }
    Ok(FddStats { rows })
}

/// Trial-averaged scaled mixed trace `n^{-1} E Trace(A(s) A(t) A(s) A(t))`,
/// the observable separating free from classical independence of the
/// increments.
pub fn mixed_trace_estimate(
    config: &ProcessConfig,
    s: f64,
    t: f64,
) -> Result<MomentEstimate, EmpiricsError> {
    config.validate()?;
    let si = grid_index(&config.grid, s)?;
    let ti = grid_index(&config.grid, t)?;
    let samples: Vec<f64> = stream::run_trials(config.seed, config.trials, |_, rng| {
        let sample = ensemble::build_process(config, rng)?;
        let a_s = sample.at(si);
        let a_t = sample.at(ti);
        spectra::trace_of_monomial(&[a_s, a_t, a_s, a_t], &[false; 4])
            .map_err(EmpiricsError::from)
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    Ok(MomentEstimate::from_samples(4, &samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfn::{self, AlphaParam};
    use crate::spectra::CirculantSpectrum;
    use crate::stream;
    use rand_distr::{Distribution, StandardNormal};

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn grid(points: &[f64]) -> TimeGrid {
        TimeGrid::new(points.to_vec()).unwrap()
    }

    fn y_config(n: usize, pts: &[f64], seed: u64) -> ProcessConfig {
        let mut c = ProcessConfig::ctrw(
            LinkKind::SymmetricCirculant,
            n,
            grid(pts),
            StepLaw::StandardGaussian,
            seed,
        );
        c.seed = seed;
        c
    }

    fn y_alpha_config(n: usize, pts: &[f64], a: f64, seed: u64) -> ProcessConfig {
        let mut c = ProcessConfig::stopped(
            LinkKind::SymmetricCirculant,
            n,
            grid(pts),
            StepLaw::StandardGaussian,
            alpha(a),
            seed,
        );
        c.seed = seed;
        c
    }

    #[test]
    fn eigenvalue_formula_matches_dft_route() {
        // Dual-route check of the cosine form, odd and even order.
        for (seed, n) in [(70u64, 11usize), (71, 12)] {
            let mut rng = stream::derive(seed, &[0]);
            let half = n / 2;
            let class_values: Vec<f64> =
                (0..=half).map(|_| StandardNormal.sample(&mut rng)).collect();
            // Dense circulant snapshot from the class values.
            let mut entries = vec![0.0; n * n];
            for i in 1..=n {
                for j in 1..=n {
                    let d = i.abs_diff(j);
                    entries[(i - 1) * n + (j - 1)] = class_values[d.min(n - d)];
                }
            }
            let snap = ensemble::MatrixSnapshot::from_entries(
                1.0,
                LinkKind::SymmetricCirculant,
                n,
                entries,
                true,
            );
            let mut dft = match spectra::eig_circulant_family(&snap).unwrap() {
                CirculantSpectrum::Real(esd) => esd.eigenvalues().to_vec(),
                _ => panic!(),
            };
            let mut direct: Vec<f64> = (1..=n)
                .map(|r| sym_circulant_eigenvalue(&class_values, n, r))
                .collect();
            dft.sort_by(|a, b| a.total_cmp(b));
            direct.sort_by(|a, b| a.total_cmp(b));
            for (a, b) in dft.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn paths_start_at_zero() {
        let mut rng = stream::derive(72, &[0]);
        let y = sample_y(&y_config(21, &[0.0, 1.0], 72), &mut rng).unwrap();
        assert_eq!(y.values[0], 0.0);
        let ya = sample_y_alpha(&y_alpha_config(21, &[0.0, 1.0], 0.7, 72), &mut rng).unwrap();
        assert_eq!(ya.values[0], 0.0);
        let mut zc = ProcessConfig::ctrw(
            LinkKind::Circulant,
            16,
            grid(&[0.0, 1.0]),
            StepLaw::StandardGaussian,
            72,
        );
        zc.seed = 72;
        let z = sample_z(&zc, &mut rng).unwrap();
        assert_eq!(z.values[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn y_variance_approaches_time() {
        let paths = sample_y_paths(&y_config(501, &[1.0], 73), 20_000).unwrap();
        let stats = fdd_stats(&paths, &[(1.0, 1.0)]).unwrap();
        let var = stats.get(FddStatistic::Covariance, 1.0, 1.0).unwrap();
        assert!(
            (var.estimate - 1.0).abs() < 0.03,
            "Var(Y(1)) = {}",
            var.estimate
        );
    }

    #[test]
    fn y_covariance_is_brownian() {
        let paths = sample_y_paths(&y_config(501, &[0.5, 1.0], 74), 20_000).unwrap();
        let stats = fdd_stats(&paths, &[(0.5, 1.0)]).unwrap();
        let cov = stats.get(FddStatistic::Covariance, 0.5, 1.0).unwrap();
        assert!(
            (cov.estimate - 0.5).abs() < 0.03 * 0.5 + 3.0 * cov.stderr,
            "Cov = {}",
            cov.estimate
        );
    }

    #[test]
    fn y_increments_are_uncorrelated() {
        let paths = sample_y_paths(&y_config(301, &[0.5, 1.0], 75), 20_000).unwrap();
        let (mut s1, mut s2, mut s12, mut q1, mut q2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for p in &paths {
            let a = p.values[0];
            let b = p.values[1] - p.values[0];
            s1 += a;
            s2 += b;
            s12 += a * b;
            q1 += a * a;
            q2 += b * b;
        }
        let n = paths.len() as f64;
        let corr = (s12 / n - s1 / n * (s2 / n))
            / ((q1 / n - (s1 / n).powi(2)) * (q2 / n - (s2 / n).powi(2))).sqrt();
        assert!(corr.abs() < 0.02, "corr {corr}");
    }

    #[test]
    fn y_alpha_second_moment_is_inverse_subordinator_mean() {
        // E[(Y^alpha(1))^2] = E L^alpha(1) = 1 / Gamma(1.5) at alpha = 0.5.
        let paths = sample_y_paths(&y_alpha_config(501, &[1.0], 0.5, 76), 20_000).unwrap();
        let m2: f64 =
            paths.iter().map(|p| p.values[0] * p.values[0]).sum::<f64>() / paths.len() as f64;
        let expect = specfn::inverse_subordinator_moment(1, 1.0, alpha(0.5));
        assert!(
            (m2 - expect).abs() < 0.05 * expect,
            "E Y^2 = {m2}, want {expect}"
        );
    }

    #[test]
    fn y_alpha_reduces_to_poisson_clock_at_alpha_one() {
        let paths = sample_y_paths(&y_alpha_config(501, &[1.0], 1.0, 77), 20_000).unwrap();
        let m2: f64 =
            paths.iter().map(|p| p.values[0] * p.values[0]).sum::<f64>() / paths.len() as f64;
        assert!((m2 - 1.0).abs() < 0.03, "Var = {m2}");
    }

    #[test]
    fn y_alpha_odd_moments_vanish() {
        let paths = sample_y_paths(&y_alpha_config(301, &[1.0], 0.6, 78), 20_000).unwrap();
        let vals: Vec<f64> = paths.iter().map(|p| p.values[0]).collect();
        let (mean, se) = super::mean_and_stderr(&vals);
        assert!(mean.abs() < 3.0 * se, "mean {mean} vs stderr {se}");
        let cubes: Vec<f64> = vals.iter().map(|v| v * v * v).collect();
        let (m3, se3) = super::mean_and_stderr(&cubes);
        assert!(m3.abs() < 3.0 * se3, "third moment {m3} vs stderr {se3}");
    }

    #[test]
    fn z_matches_standard_complex_gaussian() {
        let mut zc = ProcessConfig::ctrw(
            LinkKind::Circulant,
            512,
            grid(&[1.0]),
            StepLaw::StandardGaussian,
            79,
        );
        zc.seed = 79;
        let paths = sample_z_paths(&zc, 20_000).unwrap();
        // E |Z(1)|^2 -> 1.
        let m2: f64 =
            paths.iter().map(|p| p.values[0].norm_sqr()).sum::<f64>() / paths.len() as f64;
        assert!((m2 - 1.0).abs() < 0.05, "E|Z|^2 = {m2}");
        // E Z(1)^2 -> 0, Var(Re) = Var(Im) = 1/2, Cov(Re, Im) -> 0.
        let stats = complex_fdd_stats(&paths, &[(1.0, 1.0)]).unwrap();
        let pr = stats.get(FddStatistic::PseudoCovRe, 1.0, 1.0).unwrap();
        let pi = stats.get(FddStatistic::PseudoCovIm, 1.0, 1.0).unwrap();
        assert!(pr.estimate.abs() < 3.0 * pr.stderr, "pseudo re {}", pr.estimate);
        assert!(pi.estimate.abs() < 3.0 * pi.stderr, "pseudo im {}", pi.estimate);
        let re: Vec<f64> = paths.iter().map(|p| p.values[0].re).collect();
        let im: Vec<f64> = paths.iter().map(|p| p.values[0].im).collect();
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
        };
        assert!((var(&re) - 0.5).abs() < 0.025, "Var(Re) {}", var(&re));
        assert!((var(&im) - 0.5).abs() < 0.025, "Var(Im) {}", var(&im));
        let cross: f64 = re
            .iter()
            .zip(&im)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / re.len() as f64;
        assert!(cross.abs() < 0.02, "Cov(Re, Im) {cross}");
    }

    #[test]
    fn z_covariance_tracks_minimum_time() {
        let mut zc = ProcessConfig::ctrw(
            LinkKind::Circulant,
            256,
            grid(&[0.5, 1.0]),
            StepLaw::StandardGaussian,
            80,
        );
        zc.seed = 80;
        let paths = sample_z_paths(&zc, 20_000).unwrap();
        let stats = complex_fdd_stats(&paths, &[(0.5, 1.0)]).unwrap();
        let re = stats.get(FddStatistic::ComplexCovRe, 0.5, 1.0).unwrap();
        let im = stats.get(FddStatistic::ComplexCovIm, 0.5, 1.0).unwrap();
        let modulus = (re.estimate * re.estimate + im.estimate * im.estimate).sqrt();
        assert!((modulus - 0.5).abs() < 0.05 * 0.5 + 3.0 * re.stderr, "mod {modulus}");
        let ps = stats.get(FddStatistic::PseudoCovRe, 0.5, 1.0).unwrap();
        assert!(ps.estimate.abs() < 3.0 * ps.stderr);
    }

    #[test]
    fn fdd_estimator_matches_brownian_oracle() {
        // Synthetic BM paths: validates the estimator independently of any
        // matrix machinery. E[W(s)^2 W(t)^2] = st + 2s^2 (Isserlis).
        let n_paths = 100_000;
        let g = grid(&[0.5, 1.0]);
        let paths: Vec<PathSample> = (0..n_paths)
            .map(|k| {
                let mut rng = stream::derive(81, &[k as u64]);
                let w_half: f64 = {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    0.5f64.sqrt() * z
                };
                let w_one = w_half + {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    0.5f64.sqrt() * z
                };
                PathSample {
                    times: g.clone(),
                    index: 1,
                    values: vec![w_half, w_one],
                }
            })
            .collect();
        let stats = fdd_stats(&paths, &[(0.5, 1.0)]).unwrap();
        let cov = stats.get(FddStatistic::Covariance, 0.5, 1.0).unwrap();
        assert!((cov.estimate - 0.5).abs() < 0.01, "cov {}", cov.estimate);
        let q = stats.get(FddStatistic::MixedSquare, 0.5, 1.0).unwrap();
        assert!((q.estimate - 1.0).abs() < 0.05, "quartic {}", q.estimate);
    }

    #[test]
    fn free_classical_discriminator_gap() {
        // Wigner mixed trace -> 2 s^2 = 0.5 (free increments); symmetric
        // circulant counterpart -> s t + 2 s^2 = 1.0 (classical).
        let mut wig = ProcessConfig::ctrw(
            LinkKind::Wigner,
            300,
            grid(&[0.5, 1.0]),
            StepLaw::StandardGaussian,
            82,
        )
        .with_trials(40);
        wig.seed = 82;
        let west = mixed_trace_estimate(&wig, 0.5, 1.0).unwrap();
        assert!(west.estimate < 0.75, "wigner mixed trace {}", west.estimate);
        assert!((west.estimate - 0.5).abs() < 0.15, "{}", west.estimate);

        let mut sc = ProcessConfig::ctrw(
            LinkKind::SymmetricCirculant,
            300,
            grid(&[0.5, 1.0]),
            StepLaw::StandardGaussian,
            83,
        )
        .with_trials(40);
        sc.seed = 83;
        let sest = mixed_trace_estimate(&sc, 0.5, 1.0).unwrap();
        assert!(sest.estimate > 0.85, "circulant mixed trace {}", sest.estimate);
        assert!((sest.estimate - 1.0).abs() < 0.2, "{}", sest.estimate);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let paths = sample_y_paths(&y_config(21, &[0.5, 1.0], 84), 8).unwrap();
        assert!(matches!(
            fdd_stats(&paths, &[(0.25, 1.0)]),
            Err(EmpiricsError::GridMismatch(_))
        ));
    }
}
