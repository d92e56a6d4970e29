//! Measured quantities: position distribution, moments, purity, partial
//! transpose, negativity, and total variation, plus the Hermitian
//! eigenvalue contract they rely on.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::walker::{PositionWindow, PureWalkerState, WalkerDensityMatrix};

/// Position probability distribution over a window, stamped with the step
/// count it was measured at.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    window: PositionWindow,
    t: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(window: PositionWindow, t: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), window.num_sites());
        Self { window, t, probs }
    }

    pub fn window(&self) -> &PositionWindow {
        &self.window
    }

    pub fn time(&self) -> usize {
        self.t
    }

    /// Probability at `x`; zero outside the window.
    pub fn prob(&self, x: i64) -> f64 {
        self.window.site_index(x).map_or(0.0, |s| self.probs[s])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `(x, P(x))` pairs, left to right.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.window.positions().zip(self.probs.iter().copied())
    }

    /// The mirror image `P(-x)`.
    pub fn reflected(&self) -> Self {
        let mut probs = self.probs.clone();
        probs.reverse();
        Self {
            window: self.window,
            t: self.t,
            probs,
        }
    }
}

/// Mean, second moment, and variance of a distribution at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord {
    pub t: usize,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// `P(x) = sum_c <x,c|rho|x,c>`.
///
/// Fails if any diagonal element has imaginary part above 1e-12, which
/// signals a corrupted state.
pub fn distribution(rho: &WalkerDensityMatrix) -> Result<Distribution> {
    let window = *rho.window();
    let m = rho.matrix();
    let mut probs = Vec::with_capacity(window.num_sites());
    for s in 0..window.num_sites() {
        let d = m[(2 * s, 2 * s)] + m[(2 * s + 1, 2 * s + 1)];
        if d.im.abs() > 1e-12 {
            return Err(Error::ImaginaryDiagonal(d.im));
        }
        probs.push(d.re);
    }
    Ok(Distribution::new(window, rho.time(), probs))
}

/// `P0(x) = sum_c |amplitude(x, c)|^2` for a pure state.
pub fn distribution_pure(state: &PureWalkerState) -> Distribution {
    let window = *state.window();
    let amps = state.amplitudes();
    let probs = (0..window.num_sites())
        .map(|s| amps[2 * s].norm_sqr() + amps[2 * s + 1].norm_sqr())
        .collect();
    Distribution::new(window, state.time(), probs)
}

/// Exact weighted sums `<x>`, `<x^2>`, and `V = <x^2> - <x>^2`.
pub fn moments(d: &Distribution) -> MomentRecord {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (x, p) in d.iter() {
        let xf = x as f64;
        mean += xf * p;
        second += xf * xf * p;
    }
    MomentRecord {
        t: d.time(),
        mean,
        second_moment: second,
        variance: second - mean * mean,
    }
}

/// Purity `Tr rho^2`; equals `sum_ij |rho_ij|^2` for Hermitian input.
pub fn purity(rho: &WalkerDensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Partial transpose over the coin: `out[(x,c),(y,b)] = rho[(x,b),(y,c)]`.
pub fn partial_transpose_coin(rho: &WalkerDensityMatrix) -> DMatrix<Complex64> {
    let m = rho.matrix();
    let sites = rho.window().num_sites();
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for sy in 0..sites {
        for sx in 0..sites {
            for c in 0..2 {
                for b in 0..2 {
                    out[(2 * sx + c, 2 * sy + b)] = m[(2 * sx + b, 2 * sy + c)];
                }
            }
        }
    }
    out
}

/// Partial transpose over the position: `out[(x,c),(y,b)] = rho[(y,c),(x,b)]`.
pub fn partial_transpose_position(rho: &WalkerDensityMatrix) -> DMatrix<Complex64> {
    let m = rho.matrix();
    let sites = rho.window().num_sites();
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for sy in 0..sites {
        for sx in 0..sites {
            for c in 0..2 {
                for b in 0..2 {
                    out[(2 * sx + c, 2 * sy + b)] = m[(2 * sy + c, 2 * sx + b)];
                }
            }
        }
    }
    out
}

/// Eigenvalues in (-1e-10, 0) are numerical PSD noise, not entanglement.
const NEGATIVITY_EIG_FLOOR: f64 = -1e-10;

/// Negativity of the coin-position split: the absolute sum of negative
/// eigenvalues of the partial transpose.
///
/// Both the sum-of-negatives form and the trace-norm form
/// `(sum_i |l_i| - 1)/2` are computed and cross-checked to 1e-9.
pub fn negativity(rho: &WalkerDensityMatrix) -> Result<f64> {
    let pt = partial_transpose_coin(rho);
    let eigs = hermitian_eigenvalues(&pt)?;
    let neg_sum: f64 = eigs
        .iter()
        .filter(|&&l| l <= NEGATIVITY_EIG_FLOOR)
        .map(|l| -l)
        .sum();
    let abs_sum: f64 = eigs.iter().map(|l| l.abs()).sum();
    let trace_norm_form = 0.5 * (abs_sum - 1.0);
    if (neg_sum - trace_norm_form).abs() > 1e-9 {
        return Err(Error::NegativityMismatch(
            (neg_sum - trace_norm_form).abs(),
        ));
    }
    Ok(neg_sum)
}

/// Negativity computed from the partial transpose over the position; the
/// spectra of the two partial transposes coincide for bipartite states.
pub fn negativity_via_position(rho: &WalkerDensityMatrix) -> Result<f64> {
    let pt = partial_transpose_position(rho);
    let eigs = hermitian_eigenvalues(&pt)?;
    Ok(eigs
        .iter()
        .filter(|&&l| l <= NEGATIVITY_EIG_FLOOR)
        .map(|l| -l)
        .sum())
}

/// Total variation over the unit-spaced partition of the full window, with
/// both edges included (the sequence is zero-padded on each side).
///
/// Low values mean a smooth distribution.
pub fn total_variation(d: &Distribution) -> f64 {
    let mut tv = 0.0;
    let mut prev = 0.0;
    for &p in d.probs() {
        tv += (p - prev).abs();
        prev = p;
    }
    tv + prev.abs()
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Rejects input whose Hermiticity deviation exceeds 1e-10. The returned
/// values satisfy `sum l_i = Tr M` to within `1e-8 * dim`.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut eigs: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(eigs)
}

/// Full Hermitian eigendecomposition `(eigenvalues, eigenvectors)`, with
/// eigenvector `i` in column `i`. Used by reconstruction-style checks.
pub fn hermitian_eigenpairs(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_hermitian(m)?;
    let decomp = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or(Error::EigensolveFailed)?;
    let eigs: Vec<f64> = decomp.eigenvalues.iter().copied().collect();
    Ok((eigs, decomp.eigenvectors))
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    let n = m.nrows();
    let mut max = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            max = max.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if max > 1e-10 {
        return Err(Error::NotHermitian(max));
    }
    Ok(())
}
