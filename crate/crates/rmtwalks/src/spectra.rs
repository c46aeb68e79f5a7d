//! Eigenvalues, empirical spectral distributions, trace moments, and
//! goodness-of-fit statistics.
//!
//! Dense symmetric snapshots go through a Householder tridiagonalization +
//! implicit QL solver (nalgebra); the circulant family is diagonalized
//! exactly by a discrete Fourier transform of the first row, which also
//! serves as the second, independent route in the dual-eigensolver checks.

use crate::ensemble::{self, MatrixSnapshot, ProcessConfig};
use crate::patterns::LinkKind;
use crate::stream;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("snapshot is not symmetric; the dense eigensolver requires a symmetric kind")]
    NotSymmetric,
    #[error("snapshot kind {0:?} is not in the circulant family")]
    KindMismatch(LinkKind),
    #[error("no real spectrum for kind {0:?}")]
    NoRealSpectrum(LinkKind),
    #[error("monomial factors must share one order, got {0} and {1}")]
    NotConformable(usize, usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(transparent)]
    Ensemble(#[from] ensemble::EnsembleError),
}

/// Sorted real spectrum of one snapshot.
#[derive(Debug, Clone)]
pub struct Esd {
    eigenvalues: Vec<f64>,
    pub time: f64,
}

impl Esd {
    pub fn new(mut eigenvalues: Vec<f64>, time: f64) -> Esd {
        eigenvalues.sort_by(|a, b| a.total_cmp(b));
        Esd { eigenvalues, time }
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Empirical CDF at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.eigenvalues.partition_point(|&v| v <= x);
        k as f64 / self.eigenvalues.len() as f64
    }

    /// `l`-th empirical moment `n^{-1} sum lambda_k^l`.
    pub fn moment(&self, l: u32) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&v| v.powi(l as i32))
            .sum::<f64>()
            / self.eigenvalues.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }
}

/// Complex circulant spectrum in the paper's indexing: entry `r` is
/// `sum_j a_j exp(+2 pi i r j / n)`, so `r = 0` is the (real) row sum.
#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl ComplexSpectrum {
    pub fn order(&self) -> usize {
        self.values.len()
    }
}

/// Real or complex spectrum from the circulant-family fast path.
#[derive(Debug, Clone)]
pub enum CirculantSpectrum {
    Real(Esd),
    Complex(ComplexSpectrum),
}

/// A Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub order: u32,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl MomentEstimate {
    /// Mean and standard error of a sample of per-trial statistics.
    pub fn from_samples(order: u32, samples: &[f64]) -> MomentEstimate {
        assert!(samples.len() >= 2, "need at least two trials");
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        MomentEstimate {
            order,
            estimate: mean,
            stderr: (var / n).sqrt(),
            trials: samples.len(),
        }
    }
}

/// All eigenvalues of a dense symmetric snapshot.
pub fn eig_symmetric(snapshot: &MatrixSnapshot) -> Result<Esd, SpectraError> {
    if !snapshot.symmetric {
        return Err(SpectraError::NotSymmetric);
    }
    let n = snapshot.n;
    let m = DMatrix::from_row_slice(n, n, snapshot.entries());
    let vals = m.symmetric_eigenvalues();
    Ok(Esd::new(vals.iter().copied().collect(), snapshot.time))
}

/// DFT of the first row with the positive-exponent convention (unnormalized
/// inverse transform), which matches the circulant eigenvalue indexing.
fn first_row_dft(snapshot: &MatrixSnapshot) -> Vec<Complex64> {
    let n = snapshot.n;
    let mut buf: Vec<Complex64> = snapshot
        .first_row()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    FftPlanner::new()
        .plan_fft(n, FftDirection::Inverse)
        .process(&mut buf);
    buf
}

/// Exact spectra for the circulant family, from the first row in
/// `O(n log n)`.
///
/// * symmetric circulant: real eigenvalues, the DFT itself;
/// * circulant: the complex DFT values;
/// * reverse circulant: `lambda_0 = sum a_j`, `lambda_{n/2} = sum (-1)^j a_j`
///   for even `n`, and `+-|d_r|` pairs otherwise.
pub fn eig_circulant_family(snapshot: &MatrixSnapshot) -> Result<CirculantSpectrum, SpectraError> {
    let n = snapshot.n;
    let d = match snapshot.kind {
        LinkKind::SymmetricCirculant | LinkKind::Circulant | LinkKind::ReverseCirculant => {
            first_row_dft(snapshot)
        }
        other => return Err(SpectraError::KindMismatch(other)),
    };
    match snapshot.kind {
        LinkKind::SymmetricCirculant => {
            // The first row is even, so the transform is real.
            Ok(CirculantSpectrum::Real(Esd::new(
                d.iter().map(|c| c.re).collect(),
                snapshot.time,
            )))
        }
        LinkKind::Circulant => Ok(CirculantSpectrum::Complex(ComplexSpectrum {
            values: d,
            time: snapshot.time,
        })),
        LinkKind::ReverseCirculant => {
            let mut vals = Vec::with_capacity(n);
            vals.push(d[0].re);
            if n % 2 == 0 {
                vals.push(d[n / 2].re);
            }
            for r in 1..n.div_ceil(2) {
                let m = d[r].norm();
                vals.push(m);
                vals.push(-m);
            }
            Ok(CirculantSpectrum::Real(Esd::new(vals, snapshot.time)))
        }
        _ => unreachable!(),
    }
}

/// Real spectrum of a snapshot by the cheapest exact route: DFT for the
/// symmetric members of the circulant family, dense solver otherwise.
pub fn esd(snapshot: &MatrixSnapshot) -> Result<Esd, SpectraError> {
    match snapshot.kind {
        LinkKind::SymmetricCirculant | LinkKind::ReverseCirculant => {
            match eig_circulant_family(snapshot)? {
                CirculantSpectrum::Real(esd) => Ok(esd),
                CirculantSpectrum::Complex(_) => unreachable!(),
            }
        }
        LinkKind::Circulant | LinkKind::EllipticIID => {
            Err(SpectraError::NoRealSpectrum(snapshot.kind))
        }
        _ => eig_symmetric(snapshot),
    }
}

/// `l`-th moment of a snapshot through traces of matrix powers, without an
/// eigendecomposition. Valid for non-normal snapshots as well.
pub fn snapshot_trace_moment(snapshot: &MatrixSnapshot, l: u32) -> f64 {
    let n = snapshot.n;
    let a = snapshot.entries();
    match l {
        0 => 1.0,
        1 => (0..n).map(|i| a[i * n + i]).sum::<f64>() / n as f64,
        2 => {
            // Trace(A^2) = sum_ij a_ij a_ji.
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += a[i * n + j] * a[j * n + i];
                }
            }
            acc / n as f64
        }
        _ => {
            let factors: Vec<&MatrixSnapshot> = std::iter::repeat(snapshot)
                .take(l as usize)
                .collect();
            let transposes = vec![false; l as usize];
            trace_of_monomial(&factors, &transposes).expect("conformable by construction")
        }
    }
}

fn dense_matrix(snapshot: &MatrixSnapshot, transpose: bool) -> Vec<f64> {
    let n = snapshot.n;
    let a = snapshot.entries();
    if !transpose {
        a.to_vec()
    } else {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = a[i * n + j];
            }
        }
        out
    }
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; n * n];
    for i in 0..n {
        let crow = &mut c[i * n..(i + 1) * n];
        for j in 0..n {
            let aij = a[i * n + j];
            if aij == 0.0 {
                continue;
            }
            let brow = &b[j * n..(j + 1) * n];
            for (ck, &bk) in crow.iter_mut().zip(brow) {
                *ck += aij * bk;
            }
        }
    }
    c
}

/// Normalized trace of an ordered product of snapshots,
/// `n^{-1} Trace(M_1^(T?) ... M_l^(T?))`.
///
/// Snapshots of the commuting circulant kinds (symmetric circulant and plain
/// circulant) multiply through their shared Fourier basis instead of dense
/// products; transposition conjugates the eigenvalues.
pub fn trace_of_monomial(
    snapshots: &[&MatrixSnapshot],
    transposes: &[bool],
) -> Result<f64, SpectraError> {
    if snapshots.is_empty() {
        return Err(SpectraError::Empty("monomial"));
    }
    assert_eq!(
        snapshots.len(),
        transposes.len(),
        "one transpose flag per factor"
    );
    let n = snapshots[0].n;
    for s in snapshots {
        if s.n != n {
            return Err(SpectraError::NotConformable(n, s.n));
        }
    }

    let fourier_basis = snapshots
        .iter()
        .all(|s| matches!(s.kind, LinkKind::SymmetricCirculant | LinkKind::Circulant));
    if fourier_basis {
        let spectra: Vec<Vec<Complex64>> =
            snapshots.iter().map(|s| first_row_dft(s)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..n {
            let mut prod = Complex64::new(1.0, 0.0);
            for (spec, &tr) in spectra.iter().zip(transposes) {
                let lam = spec[r];
                prod *= if tr { lam.conj() } else { lam };
            }
            acc += prod;
        }
        return Ok(acc.re / n as f64);
    }

    if snapshots.len() == 1 {
        let s = snapshots[0];
        return Ok((0..n).map(|i| s.entries()[i * n + i]).sum::<f64>() / n as f64);
    }

    // Dense route: accumulate the product of all but the last factor, then
    // close with a trace pairing.
    let mut acc = dense_matrix(snapshots[0], transposes[0]);
    for k in 1..snapshots.len() - 1 {
        let b = dense_matrix(snapshots[k], transposes[k]);
        acc = matmul(&acc, &b, n);
    }
    let last = snapshots[snapshots.len() - 1];
    let last_t = transposes[transposes.len() - 1];
    let le = last.entries();
    let mut trace = 0.0;
    for i in 0..n {
        for j in 0..n {
            let m = if last_t { le[i * n + j] } else { le[j * n + i] };
            trace += acc[i * n + j] * m;
        }
    }
    Ok(trace / n as f64)
}

/// One-sample Kolmogorov-Smirnov distance between an ESD and a reference
/// CDF evaluator.
pub fn ks_distance<F: Fn(f64) -> f64>(esd: &Esd, cdf: F) -> f64 {
    let xs = esd.eigenvalues();
    assert!(!xs.is_empty(), "esd must be nonempty");
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Histogram with explicit bin edges, for figure export.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    /// Freedman-Diaconis binning over pooled values. Degenerate samples
    /// (zero IQR) fall back to a single unit-width bin.
    pub fn freedman_diaconis(values: &[f64]) -> Histogram {
        assert!(!values.is_empty(), "histogram needs data");
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let n = sorted.len();
        let q = |p: f64| sorted[(((n - 1) as f64) * p).round() as usize];
        let iqr = q(0.75) - q(0.25);
        let lo = sorted[0];
        let hi = sorted[n - 1];
        if iqr <= 0.0 || hi <= lo {
            let c = sorted[n / 2];
            return Histogram {
                edges: vec![c - 0.5, c + 0.5],
                counts: vec![n as u64],
                total: n as u64,
            };
        }
        let width = 2.0 * iqr / (n as f64).cbrt();
        let bins = (((hi - lo) / width).ceil() as usize).clamp(1, 512);
        let step = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * step).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let mut b = ((v - lo) / step) as usize;
            if b >= bins {
                b = bins - 1;
            }
            counts[b] += 1;
        }
        Histogram {
            edges,
            counts,
            total: n as u64,
        }
    }

    /// Normalized bar heights (probability density).
    pub fn densities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let w = self.edges[k + 1] - self.edges[k];
                c as f64 / (self.total as f64 * w)
            })
            .collect()
    }
}

/// One ESD per trial for a symmetric-spectrum configuration.
pub fn sample_esds(config: &ProcessConfig, grid_index: usize) -> Result<Vec<Esd>, SpectraError> {
    config.validate()?;
    let results = stream::run_trials(config.seed, config.trials, |_, rng| {
        let sample = ensemble::build_process(config, rng)?;
        esd(sample.at(grid_index))
    });
    results.into_iter().collect()
}

/// Monte Carlo trace-moment estimates at one grid time, averaged over
/// `config.trials` independent process samples.
pub fn moment_estimates(
    config: &ProcessConfig,
    orders: &[u32],
    grid_index: usize,
) -> Result<Vec<MomentEstimate>, SpectraError> {
    config.validate()?;
    let per_trial = stream::run_trials(config.seed, config.trials, |_, rng| {
        let sample = ensemble::build_process(config, rng)?;
        let snapshot = sample.at(grid_index);
        match esd(snapshot) {
            Ok(esd) => Ok(orders.iter().map(|&l| esd.moment(l)).collect::<Vec<f64>>()),
            // No real spectrum: fall back to trace powers.
            Err(SpectraError::NoRealSpectrum(_)) => Ok(orders
                .iter()
                .map(|&l| snapshot_trace_moment(snapshot, l))
                .collect()),
            Err(e) => Err(e),
        }
    });
    let rows: Vec<Vec<f64>> = per_trial.into_iter().collect::<Result<_, _>>()?;
    Ok(orders
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let samples: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            MomentEstimate::from_samples(l, &samples)
        })
        .collect())
}
