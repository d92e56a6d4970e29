//! Closed-form results: long-time moment and variance formulas, the
//! variance-coefficient analysis with its extremal initial states, and the
//! exact decoherent-probability convolution.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};
use crate::observables::{distribution_pure, Distribution};
use crate::walker::{BlochVector, PositionWindow, PureCoinState, PureWalkerState};

/// `alpha = 1 - 1/sqrt(2)`, the maximal quadratic variance coefficient.
pub const ALPHA: f64 = 1.0 - FRAC_1_SQRT_2;

/// Constant offset of the long-time second moment, `3 sqrt(2) / 8`.
pub const SECOND_MOMENT_OFFSET: f64 = 3.0 * SQRT_2 / 8.0;

/// Coefficients of the long-time variance `V(t) = A t^2 + B t + C`.
///
/// For every valid Bloch vector, `alpha - 3 alpha^2 <= A <= alpha` and
/// `A > 0`: positivity forces `(r1 + r3)^2 <= 3/4 < 1/(4 alpha)`, so the
/// quadratic spreading never vanishes, whatever the noise strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceCoefficients {
    /// Quadratic term (site^2 / step^2); independent of the noise.
    pub a: f64,
    /// Linear term (site^2 / step); carries the noise strength `p`.
    pub b: f64,
    /// Constant term (site^2).
    pub c: f64,
}

impl VarianceCoefficients {
    pub fn evaluate(&self, t: usize) -> f64 {
        let t = t as f64;
        self.a * t * t + self.b * t + self.c
    }
}

/// Variance coefficients for initial coin state `r` under tunneling
/// strength `p`.
pub fn variance_coefficients(r: &BlochVector, p: f64) -> Result<VarianceCoefficients> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let sum = r.r1 + r.r3;
    let a = ALPHA - 4.0 * ALPHA * ALPHA * sum * sum;
    let b = 2.0 * SQRT_2 * ALPHA * (r.r3 * r.r3 - r.r1 * r.r1) + p;
    let c = -(r.r3 - r.r1) * (r.r3 - r.r1) / 2.0 + SECOND_MOMENT_OFFSET;
    Ok(VarianceCoefficients { a, b, c })
}

/// Long-time first moment
/// `<x>_t = [(2 - sqrt(2)) t + 1/sqrt(2)] r1 + [(2 - sqrt(2)) t - 1/sqrt(2)] r3`.
///
/// Independent of the tunneling strength. The dropped oscillatory term is
/// O(1), so this is only accurate for large `t` (within 1% of simulation
/// from t ~ 50 on, but visibly off at t = 1).
pub fn analytic_first_moment(r: &BlochVector, t: usize) -> f64 {
    let t = t as f64;
    let slope = (2.0 - SQRT_2) * t;
    (slope + FRAC_1_SQRT_2) * r.r1 + (slope - FRAC_1_SQRT_2) * r.r3
}

/// Long-time second moment `(1 - 1/sqrt(2)) t^2 + t p + 3 sqrt(2)/8`.
///
/// Independent of the initial coin state. The constant is a long-time
/// offset with no finite-t meaning (it does not vanish at t = 0).
pub fn analytic_second_moment(p: f64, t: usize) -> f64 {
    let t = t as f64;
    ALPHA * t * t + t * p + SECOND_MOMENT_OFFSET
}

/// Long-time variance `A t^2 + B t + C` from [`variance_coefficients`].
pub fn analytic_variance(r: &BlochVector, p: f64, t: usize) -> Result<f64> {
    Ok(variance_coefficients(r, p)?.evaluate(t))
}

/// Phase that maximizes the quadratic variance coefficient at a given
/// `theta`: the solution of `cos(phi) = -cot(2 theta)`, which puts the
/// initial state on the `r1 + r3 = 0` manifold where `A = alpha`.
///
/// Fails when `|cot(2 theta)| > 1` (no such phase exists).
pub fn max_variance_phase(theta: f64) -> Result<f64> {
    let cot = (2.0 * theta).cos() / (2.0 * theta).sin();
    if !cot.is_finite() || cot.abs() > 1.0 + 1e-12 {
        return Err(Error::PhaseOutOfDomain(theta));
    }
    Ok((-cot).clamp(-1.0, 1.0).acos())
}

/// Coherent reference distribution `P0(., t)`: runs the pure-state walk for
/// `t` steps on a window sized to also hold its decoherent counterpart.
pub fn coherent_reference(coin: &PureCoinState, t: usize) -> Result<Distribution> {
    let state = PureWalkerState::localized(PositionWindow::new(t), coin).evolve(t)?;
    Ok(distribution_pure(&state))
}

/// Exact distribution of the tunneling-decoherent walk as a convolution of
/// the coherent distribution:
///
/// `P(x,t) = sum_{n=0}^{t} sum_{m=0}^{n} C(t,n) C(n,m) (1-p)^{t-n} (p/2)^n P0(x+2m-n, t)`.
///
/// Binomial weights are evaluated in log space, so the sum stays stable far
/// past the point where `C(t, t/2)` overflows 64-bit integers (t ~ 62).
pub fn decoherent_distribution(p0: &Distribution, p: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p == 0.0 {
        // Only the n = 0 term survives; return the input bit-for-bit.
        return Ok(p0.clone());
    }
    if p == 1.0 {
        return Ok(full_noise_distribution(p0));
    }
    let t = p0.time();
    let window = *p0.window();
    let mut probs = vec![0.0f64; window.num_sites()];
    let ln_1mp = (1.0 - p).ln();
    let ln_p2 = (p / 2.0).ln();
    let mut ln_c_t_n = 0.0; // ln C(t, n), updated incrementally over n
    for n in 0..=t {
        if n > 0 {
            ln_c_t_n += ((t - n + 1) as f64).ln() - (n as f64).ln();
        }
        let mut ln_base = ln_c_t_n + n as f64 * ln_p2;
        if t > n {
            ln_base += (t - n) as f64 * ln_1mp;
        }
        let mut ln_c_n_m = 0.0; // ln C(n, m)
        for m in 0..=n {
            if m > 0 {
                ln_c_n_m += ((n - m + 1) as f64).ln() - (m as f64).ln();
            }
            let w = (ln_base + ln_c_n_m).exp();
            let shift = 2 * m as i64 - n as i64;
            for (s, x) in window.positions().enumerate() {
                probs[s] += w * p0.prob(x + shift);
            }
        }
    }
    Ok(Distribution::new(window, t, probs))
}

/// The `p = 1` specialization
/// `P(x,t) = 2^{-t} sum_{m=0}^{t} C(t,m) P0(x+2m-t, t)`.
///
/// Odd sites come out exactly zero at every `t`: the coherent reference
/// vanishes there site-by-site, so no rounding is involved.
pub fn full_noise_distribution(p0: &Distribution) -> Distribution {
    let t = p0.time();
    let window = *p0.window();
    let mut probs = vec![0.0f64; window.num_sites()];
    let ln_half_t = t as f64 * 2.0f64.ln();
    let mut ln_c_t_m = 0.0;
    for m in 0..=t {
        if m > 0 {
            ln_c_t_m += ((t - m + 1) as f64).ln() - (m as f64).ln();
        }
        let w = (ln_c_t_m - ln_half_t).exp();
        let shift = 2 * m as i64 - t as i64;
        for (s, x) in window.positions().enumerate() {
            probs[s] += w * p0.prob(x + shift);
        }
    }
    Distribution::new(window, t, probs)
}
