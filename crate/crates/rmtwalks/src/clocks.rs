//! Random clocks: stable subordinator draws, inverse stable subordinator
//! paths, and fractional Poisson process sampling.
//!
//! The inverse subordinator is sampled jointly at all grid times by first
//! passage over one simulated stable path, because the process-level results
//! need joint values. The single-time identity `L(t) =d (t / H(1))^alpha`
//! is kept as a marginal cross-check in the tests.

use crate::specfn::{self, AlphaParam};
use crate::stream::RandomStream;
use crate::walks::TimeGrid;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClockError {
    #[error("stable path did not reach level {level} within the step budget (depth {depth})")]
    ResolutionExceeded { level: f64, depth: u32 },
    #[error(transparent)]
    SpecFn(#[from] specfn::SpecFnError),
}

/// Relative first-passage resolution of the simulated stable path.
const INVERSE_RESOLUTION: f64 = 1e-3;
/// Budget doublings allowed before giving up on a pathological path.
const MAX_REFINEMENT_DEPTH: u32 = 20;

/// One draw of the alpha-stable subordinator at time `t`, i.e. a positive
/// stable variable scaled by `t^{1/alpha}` (Laplace transform
/// `exp(-t u^alpha)`). Kanter's representation.
pub fn sample_stable(alpha: AlphaParam, t: f64, rng: &mut RandomStream) -> f64 {
    assert!(!alpha.is_one(), "stable sampling requires alpha < 1");
    assert!(t > 0.0, "time must be positive");
    t.powf(1.0 / alpha.value()) * positive_stable(alpha.value(), rng)
}

/// Standard positive alpha-stable draw (the `t = 1` marginal).
#[inline]
fn positive_stable(alpha: f64, rng: &mut RandomStream) -> f64 {
    let u = clamp_open01(rng.random::<f64>()) * PI;
    let w = -clamp_open01(rng.random::<f64>()).ln();
    let s1 = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let s2 = (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha);
    s1 * s2
}

#[inline]
fn clamp_open01(u: f64) -> f64 {
    u.clamp(1e-12, 1.0 - 1e-12)
}

/// Inverse stable subordinator sampled at the grid times; values are
/// nondecreasing with `L(0) = 0`.
#[derive(Debug, Clone)]
pub struct InversePath {
    pub times: TimeGrid,
    pub values: Vec<f64>,
}

/// Jointly samples `L^alpha` at all grid times by first passage of one
/// simulated stable path.
///
/// The stable path advances in s-steps of size `delta` chosen so that the
/// first-passage values resolve the smallest positive grid time to about
/// `1e-3` of its own scale. If the path has not crossed the top level within
/// the step budget, the budget is doubled (same path, so no bias) up to
/// [`MAX_REFINEMENT_DEPTH`] times.
pub fn inverse_values(
    alpha: AlphaParam,
    times: &TimeGrid,
    rng: &mut RandomStream,
) -> Result<InversePath, ClockError> {
    if alpha.is_one() {
        return Ok(InversePath {
            times: times.clone(),
            values: times.points().to_vec(),
        });
    }
    let a = alpha.value();
    let levels = times.points();
    let top = times.max_time();
    let mut values = vec![0.0; levels.len()];
    let first_positive = match levels.iter().copied().find(|&t| t > 0.0) {
        Some(t) => t,
        // All grid times are zero; L(0) = 0.
        None => {
            return Ok(InversePath {
                times: times.clone(),
                values,
            })
        }
    };

    // E L(t) = t^alpha / Gamma(alpha + 1); resolve the smallest level.
    let scale = first_positive.powf(a) * specfn::recip_gamma(a + 1.0);
    let delta = INVERSE_RESOLUTION * scale;
    let increment_scale = delta.powf(1.0 / a);

    let expected_steps = (top.powf(a) * specfn::recip_gamma(a + 1.0) / delta).ceil() as u64;
    let mut budget = (expected_steps * 64).max(1024);

    let mut height = 0.0f64; // H at the current s
    let mut s = 0.0f64;
    let mut steps = 0u64;
    let mut depth = 0u32;
    let mut next = levels.iter().position(|&t| t > 0.0).unwrap();
    loop {
        let prev_s = s;
        height += increment_scale * positive_stable(a, rng);
        s += delta;
        steps += 1;
        while next < levels.len() && height >= levels[next] {
            // True passage lies in (prev_s, s]; take the midpoint.
            values[next] = 0.5 * (prev_s + s);
            next += 1;
        }
        if next >= levels.len() {
            return Ok(InversePath {
                times: times.clone(),
                values,
            });
        }
        if steps >= budget {
            depth += 1;
            if depth > MAX_REFINEMENT_DEPTH {
                return Err(ClockError::ResolutionExceeded { level: top, depth });
            }
            budget *= 2;
        }
    }
}

/// Fractional Poisson path: nondecreasing integer counts at the grid times.
#[derive(Debug, Clone)]
pub struct FppPath {
    pub times: TimeGrid,
    pub counts: Vec<u64>,
}

impl FppPath {
    /// Count increments between consecutive grid points (first entry counts
    /// from time zero, which contributes nothing when the grid starts at 0).
    pub fn increments(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.counts.len());
        let mut prev = 0;
        for &c in &self.counts {
            out.push(c - prev);
            prev = c;
        }
        out
    }
}

/// The two fractional Poisson samplers; they agree in distribution and
/// cross-validate each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FppMethod {
    /// Compose a homogeneous Poisson count with the inverse subordinator.
    TimeChange,
    /// Renewal process with iid Mittag-Leffler inter-arrival times.
    MittagLefflerWaits,
}

/// Samples a fractional Poisson path with rate `lambda` at the grid times.
pub fn sample_fpp(
    alpha: AlphaParam,
    lambda: f64,
    times: &TimeGrid,
    method: FppMethod,
    rng: &mut RandomStream,
) -> Result<FppPath, ClockError> {
    assert!(lambda > 0.0, "rate must be positive");
    match method {
        FppMethod::TimeChange => {
            let inverse = inverse_values(alpha, times, rng)?;
            let mut counts = Vec::with_capacity(times.len());
            let mut total = 0u64;
            let mut prev = 0.0f64;
            for &l in &inverse.values {
                total += poisson_count(lambda * (l - prev), rng);
                counts.push(total);
                prev = l;
            }
            Ok(FppPath {
                times: times.clone(),
                counts,
            })
        }
        FppMethod::MittagLefflerWaits => {
            let mut arrivals: u64 = 0;
            let mut clock = 0.0f64;
            let mut counts = vec![0u64; times.len()];
            let mut k = 0usize;
            loop {
                clock += mittag_leffler_wait(alpha, lambda, rng);
                while k < times.len() && times.points()[k] < clock {
                    counts[k] = arrivals;
                    k += 1;
                }
                if k >= times.len() {
                    break;
                }
                arrivals += 1;
            }
            Ok(FppPath {
                times: times.clone(),
                counts,
            })
        }
    }
}

/// One Mittag-Leffler waiting time: `lambda^{-1/alpha} E^{1/alpha} S` with
/// `E` unit exponential and `S` positive alpha-stable; exponential at
/// `alpha = 1`.
fn mittag_leffler_wait(alpha: AlphaParam, lambda: f64, rng: &mut RandomStream) -> f64 {
    let e = -clamp_open01(rng.random::<f64>()).ln();
    if alpha.is_one() {
        e / lambda
    } else {
        let a = alpha.value();
        lambda.powf(-1.0 / a) * e.powf(1.0 / a) * positive_stable(a, rng)
    }
}

#[inline]
fn poisson_count(mean: f64, rng: &mut RandomStream) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    }
}

/// State probability of the fractional Poisson process:
/// `P{N^alpha(t) = k} = (lambda t^alpha)^k E^{k+1}_{alpha, k alpha + 1}
/// (-lambda t^alpha)`.
pub fn fpp_pmf(alpha: AlphaParam, lambda: f64, t: f64, k: u64) -> Result<f64, ClockError> {
    assert!(lambda > 0.0, "rate must be positive");
    assert!(t >= 0.0, "time must be nonnegative");
    if t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let a = alpha.value();
    let z = lambda * t.powf(a);
    let kf = k as f64;
    let ml = specfn::mittag_leffler_3p(a, kf * a + 1.0, kf + 1.0, -z)?;
    // z^k can overflow for large k; work in logs.
    let value = (kf * z.ln()).exp() * ml;
    Ok(value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn grid(points: &[f64]) -> TimeGrid {
        TimeGrid::new(points.to_vec()).unwrap()
    }

    fn ks_two_sample(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
        xs.sort_by(|a, b| a.total_cmp(b));
        ys.sort_by(|a, b| a.total_cmp(b));
        let (mut i, mut j) = (0usize, 0usize);
        let mut d = 0.0f64;
        while i < xs.len() && j < ys.len() {
            if xs[i] <= ys[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs());
        }
        d
    }

    /// Critical value of the two-sample KS statistic at level 0.01 for equal
    /// sample sizes n: c(0.01) sqrt(2/n).
    fn ks_crit_001(n: usize) -> f64 {
        1.628 * (2.0 / n as f64).sqrt()
    }

    #[test]
    fn stable_laplace_transform() {
        let paths = 100_000;
        let mut rng = stream::derive(11, &[0]);
        let mut acc = 0.0;
        for _ in 0..paths {
            acc += (-sample_stable(alpha(0.5), 1.0, &mut rng)).exp();
        }
        let est = acc / paths as f64;
        assert!((est - (-1.0f64).exp()).abs() < 0.01, "E e^-H = {est}");

        let mut acc = 0.0;
        for _ in 0..paths {
            acc += (-2.0 * sample_stable(alpha(0.7), 1.0, &mut rng)).exp();
        }
        let est = acc / paths as f64;
        // e^{-2^0.7} = 0.19700921...
        assert!((est - 0.197_009_211_449_091_1).abs() < 0.01, "got {est}");
    }

    #[test]
    fn stable_time_scaling_is_self_similar() {
        let n = 100_000;
        let mut rng = stream::derive(12, &[0]);
        let a = alpha(0.6);
        let xs: Vec<f64> = (0..n).map(|_| sample_stable(a, 4.0, &mut rng)).collect();
        let ys: Vec<f64> = (0..n)
            .map(|_| 4.0f64.powf(1.0 / 0.6) * sample_stable(a, 1.0, &mut rng))
            .collect();
        let d = ks_two_sample(xs, ys);
        assert!(d < ks_crit_001(n), "KS {d}");
    }

    #[test]
    fn inverse_is_identity_for_alpha_one() {
        let mut rng = stream::derive(13, &[0]);
        let g = grid(&[0.0, 0.3, 1.7, 2.0]);
        let path = inverse_values(alpha(1.0), &g, &mut rng).unwrap();
        assert_eq!(path.values, g.points());
    }

    #[test]
    fn inverse_moments_match_closed_form() {
        // E (L^alpha(1))^l = Gamma(l+1)/Gamma(l alpha + 1), l = 1, 2, 3.
        let paths = 100_000;
        for (s, &a) in [0.5f64, 0.8].iter().enumerate() {
            let mut rng = stream::derive(14, &[s as u64]);
            let g = grid(&[1.0]);
            let mut mom = [0.0f64; 3];
            for _ in 0..paths {
                let v = inverse_values(alpha(a), &g, &mut rng).unwrap().values[0];
                mom[0] += v;
                mom[1] += v * v;
                mom[2] += v * v * v;
            }
            for l in 1..=3usize {
                let est = mom[l - 1] / paths as f64;
                let exact = specfn::inverse_subordinator_moment(l as u32, 1.0, alpha(a));
                let rel = (est - exact).abs() / exact;
                assert!(rel < 0.03, "alpha={a} l={l}: est {est}, exact {exact}");
            }
        }
    }

    #[test]
    fn inverse_marginal_matches_single_time_identity() {
        // L(t) =d (t / H(1))^alpha: cross-check of the first-passage route.
        let n = 50_000;
        let a = alpha(0.7);
        let g = grid(&[1.5]);
        let mut rng = stream::derive(15, &[0]);
        let xs: Vec<f64> = (0..n)
            .map(|_| inverse_values(a, &g, &mut rng).unwrap().values[0])
            .collect();
        let ys: Vec<f64> = (0..n)
            .map(|_| (1.5 / sample_stable(a, 1.0, &mut rng)).powf(0.7))
            .collect();
        let d = ks_two_sample(xs, ys);
        assert!(d < ks_crit_001(n), "KS {d}");
    }

    #[test]
    fn inverse_self_similarity() {
        // L(ct) =d c^alpha L(t), the scaling step used by the time-change
        // arguments.
        let n = 100_000;
        let a = alpha(0.5);
        let mut rng = stream::derive(16, &[0]);
        let g2 = grid(&[2.0]);
        let g1 = grid(&[1.0]);
        let xs: Vec<f64> = (0..n)
            .map(|_| inverse_values(a, &g2, &mut rng).unwrap().values[0])
            .collect();
        let c = 2.0f64.powf(0.5);
        let ys: Vec<f64> = (0..n)
            .map(|_| c * inverse_values(a, &g1, &mut rng).unwrap().values[0])
            .collect();
        let d = ks_two_sample(xs, ys);
        assert!(d < ks_crit_001(n), "KS {d}");
    }

    #[test]
    fn inverse_paths_are_nondecreasing() {
        let g = grid(&[0.0, 0.2, 0.5, 1.0, 1.1, 3.0]);
        for trial in 0..200u64 {
            let mut rng = stream::derive(17, &[trial]);
            let path = inverse_values(alpha(0.4), &g, &mut rng).unwrap();
            assert_eq!(path.values[0], 0.0);
            assert!(path.values.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn fpp_paths_are_nondecreasing_counts() {
        let g = grid(&[0.0, 0.5, 1.0, 2.0]);
        for (m, method) in [FppMethod::TimeChange, FppMethod::MittagLefflerWaits]
            .into_iter()
            .enumerate()
        {
            for trial in 0..200u64 {
                let mut rng = stream::derive(18, &[m as u64, trial]);
                let p = sample_fpp(alpha(0.8), 1.0, &g, method, &mut rng).unwrap();
                assert_eq!(p.counts[0], 0);
                assert!(p.counts.windows(2).all(|w| w[1] >= w[0]));
            }
        }
    }

    #[test]
    fn poisson_zero_probability_at_alpha_one() {
        let paths = 100_000;
        let g = grid(&[1.0]);
        for (m, method) in [FppMethod::TimeChange, FppMethod::MittagLefflerWaits]
            .into_iter()
            .enumerate()
        {
            let mut rng = stream::derive(19, &[m as u64]);
            let mut zeros = 0usize;
            for _ in 0..paths {
                if sample_fpp(alpha(1.0), 1.0, &g, method, &mut rng).unwrap().counts[0] == 0 {
                    zeros += 1;
                }
            }
            let est = zeros as f64 / paths as f64;
            assert!(
                (est - (-1.0f64).exp()).abs() < 0.01,
                "{method:?}: P(N(1)=0) = {est}"
            );
        }
    }

    #[test]
    fn fpp_zero_probability_matches_series() {
        let paths = 100_000;
        let g = grid(&[1.0]);
        let expected = specfn::mittag_leffler_3p(0.8, 1.0, 1.0, -1.0).unwrap();
        let mut rng = stream::derive(20, &[0]);
        let mut zeros = 0usize;
        for _ in 0..paths {
            if sample_fpp(alpha(0.8), 1.0, &g, FppMethod::MittagLefflerWaits, &mut rng)
                .unwrap()
                .counts[0]
                == 0
            {
                zeros += 1;
            }
        }
        let est = zeros as f64 / paths as f64;
        assert!((est - expected).abs() < 0.01, "got {est}, series {expected}");
        // And the series value is the k = 0 pmf.
        let pmf0 = fpp_pmf(alpha(0.8), 1.0, 1.0, 0).unwrap();
        assert!((pmf0 - expected).abs() < 1e-12);
    }

    #[test]
    fn fpp_pmf_poisson_specialization() {
        let p = fpp_pmf(alpha(1.0), 1.0, 1.0, 0).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-10);
        let p = fpp_pmf(alpha(1.0), 2.0, 1.0, 1).unwrap();
        assert!((p - 2.0 * (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn fpp_pmf_normalizes() {
        let total: f64 = (0..=200)
            .map(|k| fpp_pmf(alpha(0.7), 1.0, 1.0, k).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-6, "sum {total}");
        // Degenerate time.
        assert_eq!(fpp_pmf(alpha(0.7), 1.0, 0.0, 0).unwrap(), 1.0);
        assert_eq!(fpp_pmf(alpha(0.7), 1.0, 0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn fpp_methods_agree_chi_square() {
        // Marginal counts at t = 1 from both samplers, chi-square two-sample
        // homogeneity test at level 0.01.
        let paths = 100_000usize;
        let g = grid(&[1.0]);
        let a = alpha(0.8);
        let mut counts_a = vec![0u64; 64];
        let mut counts_b = vec![0u64; 64];
        let mut rng_a = stream::derive(21, &[0]);
        let mut rng_b = stream::derive(21, &[1]);
        for _ in 0..paths {
            let ka = sample_fpp(a, 1.0, &g, FppMethod::TimeChange, &mut rng_a).unwrap().counts[0];
            let kb = sample_fpp(a, 1.0, &g, FppMethod::MittagLefflerWaits, &mut rng_b)
                .unwrap()
                .counts[0];
            counts_a[(ka as usize).min(63)] += 1;
            counts_b[(kb as usize).min(63)] += 1;
        }
        // Merge sparse tail cells so every pooled expectation is >= 10.
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let (mut acc_a, mut acc_b) = (0.0f64, 0.0f64);
        for k in 0..64 {
            acc_a += counts_a[k] as f64;
            acc_b += counts_b[k] as f64;
            if acc_a + acc_b >= 20.0 {
                cells.push((acc_a, acc_b));
                acc_a = 0.0;
                acc_b = 0.0;
            }
        }
        if acc_a + acc_b > 0.0 {
            cells.push((acc_a, acc_b));
        }
        let stat: f64 = cells
            .iter()
            .map(|&(oa, ob)| {
                let d = oa - ob;
                d * d / (oa + ob)
            })
            .sum();
        let dof = (cells.len() - 1) as f64;
        let crit = specfn::chi_square_quantile(0.99, dof);
        assert!(stat < crit, "chi-square {stat} vs critical {crit} (dof {dof})");
    }

    #[test]
    fn fpp_marginal_total_variation_against_pmf() {
        let paths = 100_000usize;
        let g = grid(&[1.0]);
        let a = alpha(0.7);
        let mut hist = vec![0u64; 128];
        let mut rng = stream::derive(22, &[0]);
        for _ in 0..paths {
            let k = sample_fpp(a, 1.0, &g, FppMethod::TimeChange, &mut rng).unwrap().counts[0];
            hist[(k as usize).min(127)] += 1;
        }
        let mut tv = 0.0;
        for k in 0..128u64 {
            let emp = hist[k as usize] as f64 / paths as f64;
            let theo = fpp_pmf(a, 1.0, 1.0, k).unwrap();
            tv += (emp - theo).abs();
        }
        tv *= 0.5;
        assert!(tv < 0.02, "TV distance {tv}");
    }
}
