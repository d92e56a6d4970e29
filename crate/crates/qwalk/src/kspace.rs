//! Momentum-space verification layer.
//!
//! At fixed momentum `k` the channel acts entirely on the 2x2 coin sector,
//! so one walk step becomes a 4x4 matrix on the Pauli-basis (affine)
//! coordinates of the coin operator. This module builds those matrices
//! three independent ways — closed form, Kraus sums, and finite
//! differences — and provides the spectral data, partial sums, and moment
//! quadrature used to cross-check the position-space simulator and the
//! closed-form moments.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::walker::BlochVector;

type M2 = Matrix2<Complex64>;
type M4 = Matrix4<Complex64>;
type V4 = Vector4<Complex64>;

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pauli matrices `sigma_0 .. sigma_3` in the `(R, L)` basis.
pub fn pauli(i: usize) -> M2 {
    match i {
        0 => M2::new(cr(1.0), ZERO, ZERO, cr(1.0)),
        1 => M2::new(ZERO, cr(1.0), cr(1.0), ZERO),
        2 => M2::new(ZERO, -I, I, ZERO),
        3 => M2::new(cr(1.0), ZERO, ZERO, cr(-1.0)),
        _ => panic!("Pauli index must be 0..4, got {i}"),
    }
}

/// Fourier form of the Hadamard walk unitary,
/// `U(k) = (1/sqrt(2)) [[e^{-ik}, e^{-ik}], [e^{ik}, -e^{ik}]]`.
pub fn walk_unitary_k(k: f64) -> M2 {
    let em = Complex64::from_polar(FRAC_1_SQRT_2, -k);
    let ep = Complex64::from_polar(FRAC_1_SQRT_2, k);
    M2::new(em, em, ep, -ep)
}

/// Momentum-space coin Kraus matrices of the tunneling channel, in the
/// explicit entrywise form.
pub fn coin_kraus_explicit(p: f64, k: f64) -> Result<[M2; 3]> {
    check_probability(p)?;
    let w1 = ((1.0 - p) / 2.0).sqrt();
    let c1 = M2::new(
        Complex64::from_polar(w1, -k),
        Complex64::from_polar(w1, -k),
        Complex64::from_polar(w1, k),
        -Complex64::from_polar(w1, k),
    );
    let w2 = p.sqrt() / 2.0;
    let c2 = M2::new(
        Complex64::from_polar(w2, -2.0 * k),
        Complex64::from_polar(w2, -2.0 * k),
        cr(w2),
        cr(-w2),
    );
    let c3 = M2::new(
        cr(w2),
        cr(w2),
        Complex64::from_polar(w2, 2.0 * k),
        -Complex64::from_polar(w2, 2.0 * k),
    );
    Ok([c1, c2, c3])
}

/// The same Kraus set factored through `U(k)`:
/// `{sqrt(1-p) U, sqrt(p/2) e^{-ik} U, sqrt(p/2) e^{ik} U}`.
pub fn coin_kraus_factored(p: f64, k: f64) -> Result<[M2; 3]> {
    check_probability(p)?;
    let u = walk_unitary_k(k);
    let hop = (p / 2.0).sqrt();
    Ok([
        u * cr((1.0 - p).sqrt()),
        u * Complex64::from_polar(hop, -k),
        u * Complex64::from_polar(hop, k),
    ])
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(())
}

/// Affine coordinates `r_i = Tr(sigma_i O)/2` of a 2x2 matrix.
pub fn matrix_to_affine(m: &M2) -> V4 {
    let half = cr(0.5);
    V4::new(
        (m[(0, 0)] + m[(1, 1)]) * half,
        (m[(0, 1)] + m[(1, 0)]) * half,
        (m[(0, 1)] - m[(1, 0)]) * half * I,
        (m[(0, 0)] - m[(1, 1)]) * half,
    )
}

/// Inverse of [`matrix_to_affine`]: `O = sum_i r_i sigma_i`.
pub fn affine_to_matrix(v: &V4) -> M2 {
    M2::new(
        v[0] + v[3],
        v[1] - I * v[2],
        v[1] + I * v[2],
        v[0] - v[3],
    )
}

/// Affine vector of a Bloch coin state.
pub fn bloch_to_affine(r: &BlochVector) -> V4 {
    V4::new(cr(r.r0), cr(r.r1), cr(r.r2), cr(r.r3))
}

/// One-step superoperator `L_k` in affine coordinates (closed form).
///
/// Independent of the tunneling strength: the hop phases cancel at
/// `k' = k`.
pub fn build_l(k: f64) -> M4 {
    let s = cr((2.0 * k).sin());
    let c = cr((2.0 * k).cos());
    let one = cr(1.0);
    M4::new(
        one, ZERO, ZERO, ZERO, //
        ZERO, ZERO, s, c, //
        ZERO, ZERO, -c, s, //
        ZERO, one, ZERO, ZERO,
    )
}

/// `L_k` applied through the Kraus sum `sum_n C_n O C_n^H` at tunneling
/// strength `p`; agrees with [`build_l`] for every `p`.
pub fn apply_l_direct(k: f64, p: f64, v: &V4) -> Result<V4> {
    let kraus = coin_kraus_explicit(p, k)?;
    let o = affine_to_matrix(v);
    let mut acc = M2::zeros();
    for c in &kraus {
        acc += c * o * c.adjoint();
    }
    Ok(matrix_to_affine(&acc))
}

/// Derivative superoperator `G_k` in affine coordinates (closed form).
pub fn build_g(k: f64) -> M4 {
    let s = cr((2.0 * k).sin());
    let c = cr((2.0 * k).cos());
    M4::new(
        ZERO, -I, ZERO, ZERO, //
        ZERO, ZERO, c, -s, //
        ZERO, ZERO, s, c, //
        -I, ZERO, ZERO, ZERO,
    )
}

/// `G_k^H` acts as the elementwise conjugate of `G_k` in affine
/// coordinates (Hermiticity of the Pauli basis).
pub fn build_g_dagger(k: f64) -> M4 {
    build_g(k).map(|z| z.conj())
}

/// Second-derivative superoperator `J_k` (closed form), with the
/// off-diagonal factor `q = p - 1`.
pub fn build_j(k: f64, p: f64) -> Result<M4> {
    check_probability(p)?;
    let q = cr(p - 1.0);
    let s = cr((2.0 * k).sin());
    let c = cr((2.0 * k).cos());
    let d = cr(1.0 + p);
    Ok(M4::new(
        d, ZERO, ZERO, ZERO, //
        ZERO, ZERO, q * s, q * c, //
        ZERO, ZERO, -q * c, q * s, //
        ZERO, d, ZERO, ZERO,
    ))
}

/// Builds the affine matrix of a superoperator from its action on the
/// Pauli basis.
pub fn superop_from_map<F>(mut f: F) -> M4
where
    F: FnMut(&M2) -> M2,
{
    let mut out = M4::zeros();
    for basis in 0..4 {
        let col = matrix_to_affine(&f(&pauli(basis)));
        for row in 0..4 {
            out[(row, basis)] = col[row];
        }
    }
    out
}

/// Central-difference step for the `d/dk` constructions below.
pub const FD_STEP: f64 = 1e-6;

fn kraus_derivatives(p: f64, k: f64) -> Result<[M2; 3]> {
    let plus = coin_kraus_explicit(p, k + FD_STEP)?;
    let minus = coin_kraus_explicit(p, k - FD_STEP)?;
    let scale = cr(1.0 / (2.0 * FD_STEP));
    Ok([
        (plus[0] - minus[0]) * scale,
        (plus[1] - minus[1]) * scale,
        (plus[2] - minus[2]) * scale,
    ])
}

/// `G_k` from `sum_n (dC_n/dk) O C_n^H` with finite-difference derivatives;
/// the result is independent of `p` and matches [`build_g`] to ~1e-8.
pub fn build_g_fd(p: f64, k: f64) -> Result<M4> {
    let kraus = coin_kraus_explicit(p, k)?;
    let deriv = kraus_derivatives(p, k)?;
    Ok(superop_from_map(|o| {
        let mut acc = M2::zeros();
        for n in 0..3 {
            acc += deriv[n] * o * kraus[n].adjoint();
        }
        acc
    }))
}

/// `G_k^H` from `sum_n C_n O (dC_n/dk)^H` with finite differences.
pub fn build_g_dagger_fd(p: f64, k: f64) -> Result<M4> {
    let kraus = coin_kraus_explicit(p, k)?;
    let deriv = kraus_derivatives(p, k)?;
    Ok(superop_from_map(|o| {
        let mut acc = M2::zeros();
        for n in 0..3 {
            acc += kraus[n] * o * deriv[n].adjoint();
        }
        acc
    }))
}

/// `J_k` from `sum_n (dC_n/dk) O (dC_n/dk')^H |_{k'=k}` with finite
/// differences; matches [`build_j`] to ~1e-8 and pins `q = p - 1`.
pub fn build_j_fd(p: f64, k: f64) -> Result<M4> {
    let deriv = kraus_derivatives(p, k)?;
    Ok(superop_from_map(|o| {
        let mut acc = M2::zeros();
        for n in 0..3 {
            acc += deriv[n] * o * deriv[n].adjoint();
        }
        acc
    }))
}

/// Numeric and closed-form eigenvalue data of `L_k`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Numeric eigenvalues of the 4x4 matrix, in no particular order.
    pub eigenvalues: [Complex64; 4],
    /// Angle with `cos(theta) = cos^2(k)`, `theta in [0, pi/2]`.
    pub theta: f64,
}

impl SpectralData {
    /// Closed-form multiset `{1, 1, e^{i(theta+pi)}, e^{-i(theta+pi)}}`.
    pub fn closed_form(&self) -> [Complex64; 4] {
        let rot = Complex64::from_polar(1.0, self.theta + PI);
        [cr(1.0), cr(1.0), rot, rot.conj()]
    }

    /// Distance between the numeric and closed-form spectra as unordered
    /// multisets (best matching over permutations).
    pub fn multiset_deviation(&self) -> f64 {
        multiset_distance(&self.eigenvalues, &self.closed_form())
    }
}

/// Eigenvalues of `L_k` by direct numeric eigensolve plus the closed-form
/// angle. Valid at every `k`, including the degenerate multiples of pi
/// where `theta = 0` and the spectrum collapses to `{1, 1, -1, -1}`.
pub fn l_spectrum(k: f64) -> SpectralData {
    let s = (2.0 * k).sin();
    let c = (2.0 * k).cos();
    let real = nalgebra::Matrix4::<f64>::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, s, c, //
        0.0, 0.0, -c, s, //
        0.0, 1.0, 0.0, 0.0,
    );
    let eigs = real.complex_eigenvalues();
    let cos_theta = k.cos() * k.cos();
    SpectralData {
        eigenvalues: [eigs[0], eigs[1], eigs[2], eigs[3]],
        theta: cos_theta.clamp(-1.0, 1.0).acos(),
    }
}

/// Best-matching max distance between two 4-element multisets.
fn multiset_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    fn go(a: &[Complex64; 4], b: &[Complex64; 4], used: &mut [bool; 4], i: usize) -> f64 {
        if i == 4 {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..4 {
            if used[j] {
                continue;
            }
            used[j] = true;
            let d = (a[i] - b[j]).norm().max(go(a, b, used, i + 1));
            used[j] = false;
            best = best.min(d);
        }
        best
    }
    go(a, b, &mut [false; 4], 0)
}

/// `Gamma = sum_{m=1}^{t} L_k^{m-1}` by iterated multiplication.
pub fn gamma_partial_sum(k: f64, t: usize) -> M4 {
    let l = build_l(k);
    let mut acc = M4::zeros();
    let mut power = M4::identity();
    for _ in 1..=t {
        acc += power;
        power *= l;
    }
    acc
}

/// The closed-form `Gamma` with the oscillatory projector term dropped;
/// differs from [`gamma_partial_sum`] by a bounded, t-independent amount.
///
/// The `(3,3)` entry is `(2 cos^2 k + 2 t sin^2 k)/Delta`: expanding
/// `t P_1 + 2 Re{(1 + e^{i theta})^{-1} e_3 e_3^H}` over the eigenvectors
/// forces the factor 2 (the halved variant grows linearly away from the
/// partial sum, which the tests below would catch).
pub fn gamma_closed_form(k: f64, t: usize) -> M4 {
    let t = t as f64;
    let c2 = k.cos() * k.cos();
    let s2 = k.sin() * k.sin();
    let s2k = (2.0 * k).sin();
    let delta = 2.0 * (c2 + 1.0);
    let m = nalgebra::Matrix4::<f64>::new(
        2.0 * t * (c2 + 1.0),
        0.0,
        0.0,
        0.0,
        //
        0.0,
        2.0 * t * c2 + 1.0,
        t * s2k,
        2.0 * t * c2 - 1.0,
        //
        0.0,
        (t - 1.0) * s2k,
        2.0 * c2 + 2.0 * t * s2,
        t * s2k,
        //
        0.0,
        2.0 * (t - 1.0) * c2 + 1.0,
        (t - 1.0) * s2k,
        2.0 * t * c2 + 1.0,
    ) / delta;
    m.map(cr)
}

/// Number of momentum points used by [`moment_crosscheck`]; the integrands
/// are trigonometric polynomials of degree well below this, so the
/// periodic trapezoid rule is exact to rounding.
pub const QUADRATURE_POINTS: usize = 4096;

/// First and second moments at time `t` evaluated from the k-space
/// machinery by quadrature: an independent route to the position moments.
///
/// Exact at finite `t` (no long-time approximation), so it cross-checks
/// both the simulator and — within the dropped-oscillatory-term tolerance —
/// the closed-form moment expressions.
pub fn moment_crosscheck(r: &BlochVector, p: f64, t: usize) -> Result<(f64, f64)> {
    check_probability(p)?;
    let v0 = bloch_to_affine(r);
    let n_k = QUADRATURE_POINTS;
    let mut mean_acc = ZERO;
    let mut second_acc = ZERO;
    let mut gammas: Vec<M4> = Vec::with_capacity(t + 1);
    for i in 0..n_k {
        let k = -PI + (i as f64 + 0.5) * (2.0 * PI / n_k as f64);
        let l = build_l(k);
        let g = build_g(k);
        let gd = build_g_dagger(k);
        let j = build_j(k, p)?;
        // gammas[n] = sum_{d=0}^{n-1} L^d.
        gammas.clear();
        gammas.push(M4::zeros());
        let mut power = M4::identity();
        for n in 1..=t {
            let next = gammas[n - 1] + power;
            gammas.push(next);
            power *= l;
        }
        let trace2 = |w: V4| w[0] * cr(2.0);
        mean_acc += I * trace2(g * (gammas[t] * v0));
        let mut s_acc = trace2(j * (gammas[t] * v0));
        let mut u = v0;
        for m_prime in 1..t {
            let tail = &gammas[t - m_prime];
            s_acc += trace2(gd * (tail * (g * u)));
            s_acc += trace2(g * (tail * (gd * u)));
            u = l * u;
        }
        second_acc += s_acc;
    }
    let mean = mean_acc / cr(n_k as f64);
    let second = second_acc / cr(n_k as f64);
    debug_assert!(mean.im.abs() < 1e-9, "mean picked up imaginary part");
    debug_assert!(second.im.abs() < 1e-9);
    Ok((mean.re, second.re))
}
