//! Special functions and closed-form limit theory.
//!
//! Everything here is deterministic: Catalan numbers, log-gamma, the three
//! parameter Mittag-Leffler and Wright functions, moment generating functions
//! of (time-changed) semicircle variables, moments of the inverse stable
//! subordinator, and the reference CDFs the spectral experiments are tested
//! against (semicircle, Gaussian, symmetrized Rayleigh).
//!
//! Series are summed until the absolute term drops below `SERIES_TOL` and the
//! terms are confirmed decreasing, with a hard cap of `SERIES_MAX_TERMS`.
//! Gamma values only ever enter through ratios, so they are evaluated in log
//! space (Lanczos) to avoid overflow.

use crate::patterns::LinkKind;
use thiserror::Error;

/// Absolute tail threshold for series truncation.
const SERIES_TOL: f64 = 1e-15;
/// Hard cap on summed terms before reporting non-convergence.
const SERIES_MAX_TERMS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SpecFnError {
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error(
        "series did not converge after {terms} terms \
         (partial sum {partial:.6e}, last term {last_term:.6e})"
    )]
    NonConvergent {
        partial: f64,
        last_term: f64,
        terms: usize,
    },
    #[error("no closed-form limit law for {0:?}")]
    NoClosedForm(LinkKind),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, SpecFnError>;

/// Stability index of the random clock. `alpha = 1` denotes the
/// un-time-changed case, where the inverse subordinator is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(AlphaParam(alpha))
        } else {
            Err(SpecFnError::OutOfRange(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

/// Order, time and stability index of one closed-form moment query.
#[derive(Debug, Clone, Copy)]
pub struct MomentSpec {
    pub order: u32,
    pub time: f64,
    pub alpha: AlphaParam,
}

impl MomentSpec {
    pub fn new(order: u32, time: f64, alpha: AlphaParam) -> Result<Self> {
        if order == 0 {
            return Err(SpecFnError::OutOfRange("moment order must be >= 1".into()));
        }
        if !(time >= 0.0) {
            return Err(SpecFnError::OutOfRange(format!(
                "time must be nonnegative, got {time}"
            )));
        }
        Ok(MomentSpec { order, time, alpha })
    }
}

/// Largest `m` for which the Catalan number is served.
pub const CATALAN_MAX: u32 = 30;

/// `m`th Catalan number `(2m)! / ((m+1)! m!)`, exact.
pub fn catalan(m: u32) -> Result<u64> {
    if m == 0 || m > CATALAN_MAX {
        return Err(SpecFnError::OutOfRange(format!(
            "catalan supports 1 <= m <= {CATALAN_MAX}, got {m}"
        )));
    }
    // C_1 = 1, C_{k+1} = C_k * 2(2k+1) / (k+2); the division is exact.
    let mut c: u128 = 1;
    for k in 1..m as u128 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    Ok(c as u64)
}

/// Natural log of the gamma function, Lanczos approximation (g = 7, n = 9).
/// For `x < 0.5` the reflection formula is applied; poles return +inf.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x)
        let s = (std::f64::consts::PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return (std::f64::consts::PI / s.abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `1 / Γ(x)`, entire: evaluates to 0 at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.5 {
        (-ln_gamma(x)).exp()
    } else {
        // 1/Γ(x) = sin(πx) Γ(1−x) / π
        (std::f64::consts::PI * x).sin() * ln_gamma(1.0 - x).exp() / std::f64::consts::PI
    }
}

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> f64 {
    if x > 0.0 {
        ln_gamma(x).exp()
    } else {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * ln_gamma(1.0 - x).exp())
    }
}

fn sum_series<F: FnMut(usize) -> f64>(mut term: F) -> Result<f64> {
    let mut sum = 0.0;
    let mut max_abs = 0.0f64;
    let mut prev = f64::INFINITY;
    for r in 0..SERIES_MAX_TERMS {
        let t = term(r);
        if !t.is_finite() {
            return Err(SpecFnError::NonConvergent {
                partial: sum,
                last_term: t,
                terms: r,
            });
        }
        sum += t;
        max_abs = max_abs.max(t.abs());
        // Converged once below the absolute tolerance while already decaying.
        if t.abs() < SERIES_TOL && t.abs() <= prev && r > 1 {
            // Terms much larger than the result have destroyed the mantissa.
            if max_abs > 1e14 * sum.abs().max(1e-300) {
                return Err(SpecFnError::NonConvergent {
                    partial: sum,
                    last_term: max_abs,
                    terms: r,
                });
            }
            return Ok(sum);
        }
        prev = t.abs();
    }
    Err(SpecFnError::NonConvergent {
        partial: sum,
        last_term: prev,
        terms: SERIES_MAX_TERMS,
    })
}

/// Three-parameter Mittag-Leffler function
/// `E^g_{a,b}(z) = Σ_{r>=0} Γ(g+r) z^r / (r! Γ(g) Γ(a r + b))`.
pub fn mittag_leffler_3p(a: f64, b: f64, g: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(SpecFnError::OutOfRange(format!("a must be > 0, got {a}")));
    }
    // Pochhammer (g)_r * z^r / r!, updated multiplicatively.
    let mut factor = 1.0f64;
    sum_series(|r| {
        if r > 0 {
            factor *= (g + (r - 1) as f64) * z / r as f64;
        }
        factor * recip_gamma(a * r as f64 + b)
    })
}

/// Wright function `W_{nu,mu}(z) = Σ_{r>=0} z^r / (r! Γ(nu r + mu))`.
pub fn wright(nu: f64, mu: f64, z: f64) -> Result<f64> {
    if !(nu > 0.0) || !(mu > 0.0) {
        return Err(SpecFnError::OutOfRange(format!(
            "wright requires nu, mu > 0, got nu={nu}, mu={mu}"
        )));
    }
    let mut pow = 1.0f64;
    sum_series(|r| {
        if r > 0 {
            pow *= z / r as f64;
        }
        pow * recip_gamma(nu * r as f64 + mu)
    })
}

/// Modified Bessel function of the first kind `I_0`.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for r in 1..200 {
        term *= q / ((r * r) as f64);
        sum += term;
        if term < SERIES_TOL * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function of the first kind `I_1`.
pub fn bessel_i1(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = x / 2.0;
    let mut sum = term;
    for r in 1..200 {
        term *= q / ((r * (r + 1)) as f64);
        sum += term;
        if term.abs() < SERIES_TOL * sum.abs() {
            break;
        }
    }
    sum
}

/// Moment generating function of a semicircle variable evaluated at an
/// independent inverse-stable time: `E exp(u Z(L^alpha(t)))`.
///
/// For `alpha < 1` this is `(u^2 t^alpha)^{-1} (W_{alpha,1-alpha}(u^2 t^alpha)
/// - 1/Γ(1-alpha))`; for `alpha = 1` it reduces to the plain semicircle mgf
/// `I_1(2 sqrt(t) u) / (sqrt(t) u)`. The removable singularity at `u = 0`
/// evaluates to 1.
pub fn tc_semicircle_mgf(u: f64, t: f64, alpha: AlphaParam) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SpecFnError::OutOfRange(format!("t must be > 0, got {t}")));
    }
    if u.abs() < 1e-12 {
        return Ok(1.0);
    }
    let a = alpha.value();
    if alpha.is_one() {
        let s = t.sqrt() * u;
        return Ok(bessel_i1(2.0 * s) / s);
    }
    let z = u * u * t.powf(a);
    // (W_{a,1-a}(z) - 1/Gamma(1-a)) / z summed directly from the r = 1 term
    // of the Wright series; forming the difference explicitly cancels
    // catastrophically for small u.
    let mut pow = 1.0f64;
    sum_series(|r| {
        if r > 0 {
            pow *= z / (r + 1) as f64;
        }
        pow * recip_gamma(a * (r + 1) as f64 + 1.0 - a)
    })
}

/// `l`th moment of the inverse alpha-stable subordinator at time `t`:
/// `t^{l alpha} Γ(l+1) / Γ(l alpha + 1)`. For `alpha = 1` this is exactly
/// `t^l`.
pub fn inverse_subordinator_moment(l: u32, t: f64, alpha: AlphaParam) -> f64 {
    assert!(l >= 1, "moment order must be >= 1");
    if alpha.is_one() {
        return t.powi(l as i32);
    }
    let a = alpha.value();
    let lf = l as f64;
    t.powf(lf * a) * (ln_gamma(lf + 1.0) - ln_gamma(lf * a + 1.0)).exp()
}

/// Double factorial `(2m-1)!! = (2m)! / (2^m m!)`, the 2m-th standard
/// Gaussian moment.
fn odd_double_factorial(m: u32) -> f64 {
    (1..=m).map(|k| (2 * k - 1) as f64).product()
}

/// Closed-form limit moment of the scaled ensembles that admit one.
///
/// Odd orders vanish for every kind. For even order `2m`:
/// * Wigner: `C_m t^{m alpha} Γ(m+1)/Γ(m alpha + 1)`,
/// * symmetric circulant: `(2m-1)!! t^{m alpha} Γ(m+1)/Γ(m alpha + 1)`,
/// * reverse circulant (`alpha = 1` only): `m! t^m`.
pub fn limit_moment_closed(kind: LinkKind, spec: MomentSpec) -> Result<f64> {
    match kind {
        LinkKind::Wigner | LinkKind::SymmetricCirculant | LinkKind::ReverseCirculant => {}
        other => return Err(SpecFnError::NoClosedForm(other)),
    }
    if kind == LinkKind::ReverseCirculant && !spec.alpha.is_one() {
        return Err(SpecFnError::Unsupported(
            "no limit law is available for the stopped reverse circulant with alpha < 1".into(),
        ));
    }
    if spec.order % 2 == 1 {
        return Ok(0.0);
    }
    let m = spec.order / 2;
    let t = spec.time;
    let time_factor = if spec.alpha.is_one() {
        t.powi(m as i32)
    } else {
        let a = spec.alpha.value();
        let mf = m as f64;
        t.powf(mf * a) * (ln_gamma(mf + 1.0) - ln_gamma(mf * a + 1.0)).exp()
    };
    let class_factor = match kind {
        LinkKind::Wigner => catalan(m)? as f64,
        LinkKind::SymmetricCirculant => odd_double_factorial(m),
        LinkKind::ReverseCirculant => (1..=m).map(|k| k as f64).product(),
        _ => unreachable!(),
    };
    Ok(class_factor * time_factor)
}

/// Reference laws for goodness-of-fit comparisons. The parameter `t` is the
/// variance of the law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceLaw {
    Semicircle,
    Gaussian,
    SymmetrizedRayleigh,
}

/// CDF of the named reference law with variance parameter `t > 0`.
pub fn reference_cdf(law: ReferenceLaw, t: f64, x: f64) -> f64 {
    assert!(t > 0.0, "variance parameter must be positive");
    match law {
        ReferenceLaw::Semicircle => {
            let edge = 2.0 * t.sqrt();
            if x <= -edge {
                0.0
            } else if x >= edge {
                1.0
            } else {
                0.5 + x * (4.0 * t - x * x).sqrt() / (4.0 * std::f64::consts::PI * t)
                    + (x / edge).asin() / std::f64::consts::PI
            }
        }
        ReferenceLaw::Gaussian => 0.5 * (1.0 + erf(x / (2.0 * t).sqrt())),
        // Law of eps * R with eps a uniform sign and R Rayleigh matched so
        // that the 2m-th moment is t^m m!; the positive half has CDF
        // 1 - exp(-x^2 / t).
        ReferenceLaw::SymmetrizedRayleigh => {
            let h = 0.5 * (-x * x / t).exp();
            if x >= 0.0 {
                1.0 - h
            } else {
                h
            }
        }
    }
}

/// Density of the named reference law with variance parameter `t > 0`.
pub fn reference_density(law: ReferenceLaw, t: f64, x: f64) -> f64 {
    assert!(t > 0.0, "variance parameter must be positive");
    match law {
        ReferenceLaw::Semicircle => {
            let disc = 4.0 * t - x * x;
            if disc <= 0.0 {
                0.0
            } else {
                disc.sqrt() / (2.0 * std::f64::consts::PI * t)
            }
        }
        ReferenceLaw::Gaussian => {
            (-x * x / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt()
        }
        ReferenceLaw::SymmetrizedRayleigh => x.abs() / t * (-x * x / t).exp(),
    }
}

/// Error function, via the regularized lower incomplete gamma at `s = 1/2`.
pub fn erf(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * regularized_gamma_p(0.5, x * x)
    }
}

/// Regularized lower incomplete gamma `P(s, x)`.
pub fn regularized_gamma_p(s: f64, x: f64) -> f64 {
    assert!(s > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < s + 1.0 {
        // Series: P = x^s e^{-x} / Γ(s) Σ_{n>=0} x^n / (s (s+1) ... (s+n))
        let mut term = 1.0 / s;
        let mut sum = term;
        for n in 1..500 {
            term *= x / (s + n as f64);
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (s * x.ln() - x - ln_gamma(s)).exp()
    } else {
        1.0 - regularized_gamma_q_cf(s, x)
    }
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`.
pub fn regularized_gamma_q(s: f64, x: f64) -> f64 {
    assert!(s > 0.0 && x >= 0.0);
    if x == 0.0 {
        1.0
    } else if x < s + 1.0 {
        1.0 - regularized_gamma_p(s, x)
    } else {
        regularized_gamma_q_cf(s, x)
    }
}

/// Continued fraction for `Q(s, x)`, valid for `x > s + 1` (Lentz).
fn regularized_gamma_q_cf(s: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (s * x.ln() - x - ln_gamma(s)).exp() * h
}

/// Survival function of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_sf(x: f64, dof: f64) -> f64 {
    assert!(dof > 0.0);
    if x <= 0.0 {
        1.0
    } else {
        regularized_gamma_q(dof / 2.0, x / 2.0)
    }
}

/// Quantile of the chi-square law, by bisection on the CDF.
pub fn chi_square_quantile(p: f64, dof: f64) -> f64 {
    assert!((0.0..1.0).contains(&p) && dof > 0.0);
    let mut hi = dof.max(1.0);
    while 1.0 - chi_square_sf(hi, dof) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - chi_square_sf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
