//! State representations, the Hadamard walk step, and the two decoherence
//! channels applied as exact Kraus maps on the density matrix.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * the coin basis is ordered `(|R>, |L>)`, with `|R>` the +1 eigenvector
//!   of the third Pauli matrix;
//! * `|R>` shifts the position by +1, `|L>` by -1;
//! * positions live on the window `[-2T, 2T]` for a walk prepared for `T`
//!   steps, so every channel (coin shift of 1 plus tunnel shift of 1 per
//!   step) stays inside the window for `t <= T`.
//!
//! All evolution here is deterministic: channels are applied as exact
//! density-matrix maps, never sampled.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Coin degree of freedom. `Right` shifts the walker by +1, `Left` by -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coin {
    Right = 0,
    Left = 1,
}

/// Absolute tolerance for algebraic identities (single arithmetic step).
pub const TOL_ALGEBRAIC: f64 = 1e-12;
/// Absolute tolerance for quantities accumulated over up to ~200 steps.
pub const TOL_ACCUMULATED: f64 = 1e-10;

/// Finite position lattice `[-2T, 2T]` sized for `T` steps of a noisy walk.
///
/// The index map is a bijection from positions onto `0..4T+1`; joint
/// (position, coin) states are interleaved as `2*site + coin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PositionWindow {
    total_steps: usize,
}

impl PositionWindow {
    pub fn new(total_steps: usize) -> Self {
        Self { total_steps }
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn x_min(&self) -> i64 {
        -2 * self.total_steps as i64
    }

    pub fn x_max(&self) -> i64 {
        2 * self.total_steps as i64
    }

    /// Number of lattice sites, `4T + 1`.
    pub fn num_sites(&self) -> usize {
        4 * self.total_steps + 1
    }

    /// Dimension of the joint position (x) coin space, `2(4T + 1)`.
    pub fn dim(&self) -> usize {
        2 * self.num_sites()
    }

    /// Site index of position `x`, if `x` lies in the window.
    pub fn site_index(&self, x: i64) -> Option<usize> {
        if x < self.x_min() || x > self.x_max() {
            None
        } else {
            Some((x - self.x_min()) as usize)
        }
    }

    /// Position of site index `s`.
    pub fn position(&self, s: usize) -> i64 {
        self.x_min() + s as i64
    }

    /// Joint index of `(x, coin)`.
    pub fn state_index(&self, x: i64, coin: Coin) -> Option<usize> {
        self.site_index(x).map(|s| 2 * s + coin as usize)
    }

    /// Iterator over all positions in the window, left to right.
    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.num_sites()).map(|s| self.position(s))
    }
}

/// Affine-map coefficients `(r0, r1, r2, r3)` of a coin density matrix,
/// `rho = sum_i r_i sigma_i`.
///
/// Normalization pins `r0 = 1/2`; positivity requires
/// `r1^2 + r2^2 + r3^2 <= 1/4`, with equality exactly for pure states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    /// Bloch tolerance: `r0` must equal 1/2 and the vector part must fit in
    /// the ball of radius 1/2, both up to 1e-12.
    pub fn new(r0: f64, r1: f64, r2: f64, r3: f64) -> Result<Self> {
        if (r0 - 0.5).abs() > 1e-12 {
            return Err(Error::BlochNormalization(r0));
        }
        let norm_sq = r1 * r1 + r2 * r2 + r3 * r3;
        if norm_sq > 0.25 + 1e-12 {
            return Err(Error::BlochOutsideBall(norm_sq));
        }
        Ok(Self { r0: 0.5, r1, r2, r3 })
    }

    /// Build from the vector part alone, with `r0 = 1/2` implied.
    pub fn from_components(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        Self::new(0.5, r1, r2, r3)
    }

    /// The coin density matrix `sum_i r_i sigma_i` in the `(R, L)` basis.
    pub fn coin_matrix(&self) -> nalgebra::Matrix2<Complex64> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        nalgebra::Matrix2::new(
            c(self.r0 + self.r3, 0.0),
            c(self.r1, -self.r2),
            c(self.r1, self.r2),
            c(self.r0 - self.r3, 0.0),
        )
    }
}

/// Pure coin state `cos(theta)|R> + e^{i phi} sin(theta)|L>`.
///
/// The canonical parameter domain is `theta in [0, pi]`, `phi in [0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureCoinState {
    pub theta: f64,
    pub phi: f64,
}

impl PureCoinState {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Amplitudes `(a_R, a_L)`.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.theta.cos(), 0.0),
            Complex64::from_polar(self.theta.sin(), self.phi),
        )
    }

    /// The induced Bloch vector; lands exactly on the sphere
    /// `r1^2 + r2^2 + r3^2 = 1/4`.
    pub fn bloch(&self) -> BlochVector {
        let s2t = (2.0 * self.theta).sin();
        BlochVector {
            r0: 0.5,
            r1: 0.5 * self.phi.cos() * s2t,
            r2: 0.5 * self.phi.sin() * s2t,
            r3: 0.5 * (2.0 * self.theta).cos(),
        }
    }
}

impl From<PureCoinState> for BlochVector {
    fn from(c: PureCoinState) -> Self {
        c.bloch()
    }
}

/// Which noise channel drives the walk.
///
/// `Coherent` is operationally identical to `Tunneling(0)` and
/// `CoinMeasurement(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Coherent,
    /// After each step the walker hops +-1 with probability p/2 each.
    Tunneling(f64),
    /// After each step the coin is projectively measured with probability p.
    CoinMeasurement(f64),
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Coherent => Ok(()),
            NoiseModel::Tunneling(p) | NoiseModel::CoinMeasurement(p) => check_probability(p),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(())
}

const INV_SQRT2: Complex64 = Complex64::new(FRAC_1_SQRT_2, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitude vector on the joint position (x) coin space; the fast path for
/// the coherent walk.
#[derive(Debug, Clone, PartialEq)]
pub struct PureWalkerState {
    window: PositionWindow,
    t: usize,
    amps: Vec<Complex64>,
}

impl PureWalkerState {
    /// Walker localized at the origin with the given coin state.
    pub fn localized(window: PositionWindow, coin: &PureCoinState) -> Self {
        let mut amps = vec![ZERO; window.dim()];
        let (a_r, a_l) = coin.amplitudes();
        let s = window.site_index(0).expect("origin is always in the window");
        amps[2 * s] = a_r;
        amps[2 * s + 1] = a_l;
        Self { window, t: 0, amps }
    }

    pub fn window(&self) -> &PositionWindow {
        &self.window
    }

    /// Number of steps taken since preparation.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: i64, coin: Coin) -> Complex64 {
        self.window
            .state_index(x, coin)
            .map_or(ZERO, |i| self.amps[i])
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// One coherent step: Hadamard coin, then the coin-conditioned shift.
    ///
    /// Fails with [`Error::WindowOverflow`] if nonzero amplitude would leave
    /// the window.
    pub fn coherent_step(&self) -> Result<Self> {
        let mut out = vec![ZERO; self.window.dim()];
        apply_walk_unitary(&self.window, &self.amps, &mut out)?;
        Ok(Self {
            window: self.window,
            t: self.t + 1,
            amps: out,
        })
    }

    /// `t` coherent steps.
    pub fn evolve(&self, steps: usize) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..steps {
            s = s.coherent_step()?;
        }
        Ok(s)
    }
}

/// Applies `U_w = S (I (x) H)` to a joint-space vector.
///
/// Writes into `out` (assumed zeroed). The overflow check is on the actual
/// value: a zero amplitude sitting on the edge does not trip it.
fn apply_walk_unitary(
    window: &PositionWindow,
    src: &[Complex64],
    out: &mut [Complex64],
) -> Result<()> {
    let sites = window.num_sites();
    let overflow = Error::WindowOverflow {
        half_width: window.x_max(),
    };
    for s in 0..sites {
        let a_r = src[2 * s];
        let a_l = src[2 * s + 1];
        if a_r == ZERO && a_l == ZERO {
            continue;
        }
        let up = (a_r + a_l) * INV_SQRT2;
        let down = (a_r - a_l) * INV_SQRT2;
        if up != ZERO {
            if s + 1 >= sites {
                return Err(overflow);
            }
            out[2 * (s + 1)] += up;
        }
        if down != ZERO {
            if s == 0 {
                return Err(overflow);
            }
            out[2 * (s - 1) + 1] += down;
        }
    }
    Ok(())
}

/// Hermitian, unit-trace matrix on the joint position (x) coin space.
///
/// Maintained invariants (drift-checked in tests rather than enforced per
/// step): Hermitian to 1e-12 elementwise, trace 1 to 1e-12, eigenvalues
/// above -1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerDensityMatrix {
    window: PositionWindow,
    t: usize,
    data: DMatrix<Complex64>,
}

impl WalkerDensityMatrix {
    /// Walker at the origin with coin state given by a Bloch vector.
    ///
    /// Rejects vectors with `r0 != 1/2` or a vector part outside the ball;
    /// see [`BlochVector::new`].
    pub fn new(coin: impl Into<BlochVector>, total_steps: usize) -> Result<Self> {
        let bloch: BlochVector = coin.into();
        // Re-validate: the caller may have built the struct literally.
        let bloch = BlochVector::new(bloch.r0, bloch.r1, bloch.r2, bloch.r3)?;
        let window = PositionWindow::new(total_steps);
        let mut data = DMatrix::zeros(window.dim(), window.dim());
        let s = window.site_index(0).expect("origin is always in the window");
        let block = bloch.coin_matrix();
        for c in 0..2 {
            for b in 0..2 {
                data[(2 * s + c, 2 * s + b)] = block[(c, b)];
            }
        }
        Ok(Self { window, t: 0, data })
    }

    /// Wraps an explicit matrix after checking Hermiticity and unit trace.
    ///
    /// `t` stamps the state with the step count it is supposed to be at;
    /// it feeds the time stamp of derived distributions.
    pub fn from_matrix(
        window: PositionWindow,
        t: usize,
        data: DMatrix<Complex64>,
    ) -> Result<Self> {
        assert_eq!(data.nrows(), window.dim());
        assert_eq!(data.ncols(), window.dim());
        let state = Self { window, t, data };
        state.validate()?;
        Ok(state)
    }

    /// Projector onto a pure walker state.
    pub fn from_pure(state: &PureWalkerState) -> Self {
        let dim = state.window.dim();
        let mut data = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let cj = state.amps[j].conj();
            if cj == ZERO {
                continue;
            }
            for i in 0..dim {
                data[(i, j)] = state.amps[i] * cj;
            }
        }
        Self {
            window: state.window,
            t: state.t,
            data,
        }
    }

    pub fn window(&self) -> &PositionWindow {
        &self.window
    }

    /// Number of steps taken since preparation.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn element(&self, x: i64, c: Coin, y: i64, b: Coin) -> Complex64 {
        match (self.window.state_index(x, c), self.window.state_index(y, b)) {
            (Some(i), Some(j)) => self.data[(i, j)],
            _ => ZERO,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diagonal().sum()
    }

    /// Max elementwise deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.data.nrows();
        let mut max = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                let d = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                max = max.max(d);
            }
        }
        max
    }

    /// Cheap structural validation: Hermiticity and unit trace.
    /// Positive semidefiniteness needs an eigensolve; see
    /// `observables::hermitian_eigenvalues`.
    pub fn validate(&self) -> Result<()> {
        let h = self.hermiticity_deviation();
        if h > TOL_ALGEBRAIC {
            return Err(Error::NotHermitian(h));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOL_ACCUMULATED || tr.im.abs() > TOL_ACCUMULATED {
            return Err(Error::ImaginaryDiagonal(tr.im));
        }
        Ok(())
    }

    /// One coherent step, `rho -> U_w rho U_w^H`.
    pub fn coherent_step(&self) -> Result<Self> {
        let sigma = self.conjugate_by_walk()?;
        Ok(Self {
            window: self.window,
            t: self.t + 1,
            data: sigma,
        })
    }

    /// One tunneling step,
    /// `rho -> (1-p) U rho U^H + (p/2)(S+ U rho U^H S+^H + S- U rho U^H S-^H)`.
    pub fn tunneling_step(&self, p: f64) -> Result<Self> {
        check_probability(p)?;
        let sigma = self.conjugate_by_walk()?;
        if p == 0.0 {
            return Ok(Self {
                window: self.window,
                t: self.t + 1,
                data: sigma,
            });
        }
        let dim = self.window.dim();
        let stay = Complex64::new(1.0 - p, 0.0);
        let hop = Complex64::new(p / 2.0, 0.0);
        let mut out = &sigma * stay;
        // Both site shifts move the joint index by 2; the outermost site
        // rows/columns must carry no weight or probability would leave.
        let edge_empty = |idx: usize| -> bool {
            (0..dim).all(|j| sigma[(idx, j)] == ZERO && sigma[(j, idx)] == ZERO)
        };
        for idx in [0, 1, dim - 2, dim - 1] {
            if !edge_empty(idx) {
                return Err(Error::WindowOverflow {
                    half_width: self.window.x_max(),
                });
            }
        }
        for j in 0..dim - 2 {
            for i in 0..dim - 2 {
                out[(i + 2, j + 2)] += hop * sigma[(i, j)];
            }
        }
        for j in 2..dim {
            for i in 2..dim {
                out[(i - 2, j - 2)] += hop * sigma[(i, j)];
            }
        }
        Ok(Self {
            window: self.window,
            t: self.t + 1,
            data: out,
        })
    }

    /// One coin-measurement step,
    /// `rho -> (1-p) U rho U^H + p (P_R U rho U^H P_R + P_L U rho U^H P_L)`.
    ///
    /// Same-coin blocks survive untouched; cross-coin blocks are damped by
    /// `1-p`.
    pub fn coin_measure_step(&self, p: f64) -> Result<Self> {
        check_probability(p)?;
        let mut sigma = self.conjugate_by_walk()?;
        if p > 0.0 {
            let keep = Complex64::new(1.0 - p, 0.0);
            let dim = self.window.dim();
            for j in 0..dim {
                for i in 0..dim {
                    if (i ^ j) & 1 == 1 {
                        sigma[(i, j)] *= keep;
                    }
                }
            }
        }
        Ok(Self {
            window: self.window,
            t: self.t + 1,
            data: sigma,
        })
    }

    /// One step of the selected channel.
    pub fn step(&self, noise: &NoiseModel) -> Result<Self> {
        match *noise {
            NoiseModel::Coherent => self.coherent_step(),
            NoiseModel::Tunneling(p) => self.tunneling_step(p),
            NoiseModel::CoinMeasurement(p) => self.coin_measure_step(p),
        }
    }

    /// Applies the selected channel `steps` times, invoking `observer` with
    /// `(t, state)` after every step. Deterministic throughout.
    pub fn evolve<F>(&self, noise: &NoiseModel, steps: usize, mut observer: F) -> Result<Self>
    where
        F: FnMut(usize, &WalkerDensityMatrix),
    {
        noise.validate()?;
        let capacity = self.window.total_steps();
        if self.t + steps > capacity {
            return Err(Error::StepsExceedWindow {
                requested: self.t + steps,
                capacity,
            });
        }
        let mut state = self.clone();
        for _ in 0..steps {
            state = state.step(noise)?;
            observer(state.t, &state);
        }
        Ok(state)
    }

    /// `U_w rho U_w^H` via the structural action of the walk unitary on
    /// columns and then rows; O(N^2) instead of dense triple products.
    fn conjugate_by_walk(&self) -> Result<DMatrix<Complex64>> {
        let dim = self.window.dim();
        let sites = self.window.num_sites();
        let overflow = Error::WindowOverflow {
            half_width: self.window.x_max(),
        };
        // Left factor: transform every column by U_w.
        let mut left: DMatrix<Complex64> = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let src = self.data.column(j);
            for s in 0..sites {
                let a_r = src[2 * s];
                let a_l = src[2 * s + 1];
                if a_r == ZERO && a_l == ZERO {
                    continue;
                }
                let up = (a_r + a_l) * INV_SQRT2;
                let down = (a_r - a_l) * INV_SQRT2;
                if up != ZERO {
                    if s + 1 >= sites {
                        return Err(overflow);
                    }
                    left[(2 * (s + 1), j)] += up;
                }
                if down != ZERO {
                    if s == 0 {
                        return Err(overflow);
                    }
                    left[(2 * (s - 1) + 1, j)] += down;
                }
            }
        }
        // Right factor: (A U^H)[i, 2(s+1)] and [i, 2(s-1)+1] mix columns
        // (2s, 2s+1) of A exactly like the left action mixed rows.
        let mut out: DMatrix<Complex64> = DMatrix::zeros(dim, dim);
        for s in 0..sites {
            let (col_r, col_l) = (2 * s, 2 * s + 1);
            for i in 0..dim {
                let a_r = left[(i, col_r)];
                let a_l = left[(i, col_l)];
                if a_r == ZERO && a_l == ZERO {
                    continue;
                }
                let up = (a_r + a_l) * INV_SQRT2;
                let down = (a_r - a_l) * INV_SQRT2;
                if up != ZERO {
                    if s + 1 >= sites {
                        return Err(overflow);
                    }
                    out[(i, 2 * (s + 1))] += up;
                }
                if down != ZERO {
                    if s == 0 {
                        return Err(overflow);
                    }
                    out[(i, 2 * (s - 1) + 1)] += down;
                }
            }
        }
        Ok(out)
    }

    /// Largest |x| carrying any diagonal weight; `None` for an all-zero
    /// diagonal.
    pub fn support_radius(&self) -> Option<i64> {
        let mut radius = None;
        for s in 0..self.window.num_sites() {
            let d = self.data[(2 * s, 2 * s)] + self.data[(2 * s + 1, 2 * s + 1)];
            if d != ZERO {
                let x = self.window.position(s).abs();
                radius = Some(radius.map_or(x, |r: i64| r.max(x)));
            }
        }
        radius
    }
}

/// Completeness-check outcome for a position-space Kraus set.
#[derive(Debug, Clone, Copy)]
pub struct CompletenessReport {
    /// Max elementwise deviation of `sum E_n^H E_n` from the identity on
    /// interior sites.
    pub max_deviation: f64,
    pub passes: bool,
}

/// Dense position-space Kraus operators of the channel, truncated to the
/// window.
///
/// Zero-weight members are dropped, so `Tunneling(0)` reduces to `{U_w}`.
/// Dense construction is intended for verification at modest window sizes.
pub fn position_kraus_operators(
    noise: &NoiseModel,
    window: &PositionWindow,
) -> Result<Vec<DMatrix<Complex64>>> {
    noise.validate()?;
    let u = dense_walk_unitary(window);
    let ops = match *noise {
        NoiseModel::Coherent => vec![u],
        NoiseModel::Tunneling(p) => {
            if p == 0.0 {
                vec![u]
            } else {
                let hop = (p / 2.0).sqrt();
                let up = dense_site_shift(window, 1) * &u * Complex64::new(hop, 0.0);
                let down = dense_site_shift(window, -1) * &u * Complex64::new(hop, 0.0);
                if p == 1.0 {
                    vec![up, down]
                } else {
                    vec![u * Complex64::new((1.0 - p).sqrt(), 0.0), up, down]
                }
            }
        }
        NoiseModel::CoinMeasurement(p) => {
            if p == 0.0 {
                vec![u]
            } else {
                let sq = Complex64::new(p.sqrt(), 0.0);
                let pr = dense_coin_projector(window, Coin::Right) * &u * sq;
                let pl = dense_coin_projector(window, Coin::Left) * &u * sq;
                if p == 1.0 {
                    vec![pr, pl]
                } else {
                    vec![u * Complex64::new((1.0 - p).sqrt(), 0.0), pr, pl]
                }
            }
        }
    };
    Ok(ops)
}

/// Verifies `sum E_n^H E_n = I` on the window interior (two sites in from
/// each edge, where truncation cannot bite).
pub fn kraus_completeness_check(
    noise: &NoiseModel,
    window: &PositionWindow,
) -> Result<CompletenessReport> {
    let ops = position_kraus_operators(noise, window)?;
    let dim = window.dim();
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for e in &ops {
        acc += e.adjoint() * e;
    }
    let sites = window.num_sites();
    let interior: Vec<usize> = (2..sites.saturating_sub(2))
        .flat_map(|s| [2 * s, 2 * s + 1])
        .collect();
    let mut max_dev = 0.0f64;
    for &a in &interior {
        for &b in &interior {
            let expect = if a == b { 1.0 } else { 0.0 };
            let dev = (acc[(a, b)] - Complex64::new(expect, 0.0)).norm();
            max_dev = max_dev.max(dev);
        }
    }
    Ok(CompletenessReport {
        max_deviation: max_dev,
        passes: max_dev < TOL_ALGEBRAIC,
    })
}

/// Dense `U_w` on the window, columns truncated at the edges.
pub fn dense_walk_unitary(window: &PositionWindow) -> DMatrix<Complex64> {
    let dim = window.dim();
    let sites = window.num_sites();
    let mut u = DMatrix::zeros(dim, dim);
    for s in 0..sites {
        // Images of |s, R> and |s, L> under S (I (x) H).
        if s + 1 < sites {
            u[(2 * (s + 1), 2 * s)] = INV_SQRT2;
            u[(2 * (s + 1), 2 * s + 1)] = INV_SQRT2;
        }
        if s > 0 {
            u[(2 * (s - 1) + 1, 2 * s)] = INV_SQRT2;
            u[(2 * (s - 1) + 1, 2 * s + 1)] = -INV_SQRT2;
        }
    }
    u
}

/// Dense coin-independent site shift by `delta` (+1 or -1), truncated.
pub fn dense_site_shift(window: &PositionWindow, delta: i64) -> DMatrix<Complex64> {
    let dim = window.dim();
    let sites = window.num_sites() as i64;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..sites {
        let target = s + delta;
        if (0..sites).contains(&target) {
            for c in 0..2usize {
                m[(2 * target as usize + c, 2 * s as usize + c)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    m
}

/// Dense projector onto one coin direction.
pub fn dense_coin_projector(window: &PositionWindow, coin: Coin) -> DMatrix<Complex64> {
    let dim = window.dim();
    let mut m = DMatrix::zeros(dim, dim);
    let offset = coin as usize;
    let mut i = offset;
    while i < dim {
        m[(i, i)] = Complex64::new(1.0, 0.0);
        i += 2;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coin_r() -> PureCoinState {
        PureCoinState::new(0.0, 0.0)
    }

    #[test]
    fn window_index_is_a_bijection() {
        let w = PositionWindow::new(3);
        assert_eq!(w.x_min(), -6);
        assert_eq!(w.x_max(), 6);
        assert_eq!(w.num_sites(), 13);
        for (s, x) in w.positions().enumerate() {
            assert_eq!(w.site_index(x), Some(s));
            assert_eq!(w.position(s), x);
        }
        assert_eq!(w.site_index(7), None);
        assert_eq!(w.site_index(-7), None);
    }

    #[test]
    fn init_state_pure_r_is_a_point_mass() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 1).unwrap();
        assert_eq!(rho.element(0, Coin::Right, 0, Coin::Right), c(1.0, 0.0));
        let tr = rho.trace();
        assert!((tr.re - 1.0).abs() < 1e-15 && tr.im.abs() < 1e-15);
        // Everything else zero.
        let dim = rho.window().dim();
        let idx = rho.window().state_index(0, Coin::Right).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                if (i, j) != (idx, idx) {
                    assert_eq!(rho.matrix()[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn init_state_symmetric_coin_block() {
        // theta = pi/4, phi = pi/2 has r = (1/2, 0, 1/2, 0).
        let rho =
            WalkerDensityMatrix::new(PureCoinState::new(PI / 4.0, PI / 2.0).bloch(), 2).unwrap();
        let b = rho.window().state_index(0, Coin::Right).unwrap();
        let m = rho.matrix();
        assert!((m[(b, b)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m[(b, b + 1)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((m[(b + 1, b)] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((m[(b + 1, b + 1)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn init_state_maximally_mixed_coin() {
        let rho =
            WalkerDensityMatrix::new(BlochVector::from_components(0.0, 0.0, 0.0).unwrap(), 1)
                .unwrap();
        let b = rho.window().state_index(0, Coin::Right).unwrap();
        assert_eq!(rho.matrix()[(b, b)], c(0.5, 0.0));
        assert_eq!(rho.matrix()[(b + 1, b + 1)], c(0.5, 0.0));
        assert_eq!(rho.matrix()[(b, b + 1)], ZERO);
    }

    #[test]
    fn init_state_rejects_bad_bloch() {
        assert!(matches!(
            BlochVector::new(0.4, 0.0, 0.0, 0.0),
            Err(Error::BlochNormalization(_))
        ));
        assert!(matches!(
            BlochVector::from_components(0.5, 0.3, 0.0),
            Err(Error::BlochOutsideBall(_))
        ));
    }

    #[test]
    fn single_coherent_step_from_origin() {
        let s = PureWalkerState::localized(PositionWindow::new(1), &coin_r());
        let s1 = s.coherent_step().unwrap();
        let a = FRAC_1_SQRT_2;
        assert!((s1.amplitude(1, Coin::Right) - c(a, 0.0)).norm() < 1e-15);
        assert!((s1.amplitude(-1, Coin::Left) - c(a, 0.0)).norm() < 1e-15);
        assert!((s1.norm_squared() - 1.0).abs() < 1e-12);
        assert_eq!(s1.time(), 1);
    }

    #[test]
    fn two_coherent_steps_distribution() {
        let s = PureWalkerState::localized(PositionWindow::new(2), &coin_r())
            .evolve(2)
            .unwrap();
        let p =
            |x: i64| s.amplitude(x, Coin::Right).norm_sqr() + s.amplitude(x, Coin::Left).norm_sqr();
        assert!((p(2) - 0.25).abs() < 1e-14);
        assert!((p(0) - 0.5).abs() < 1e-14);
        assert!((p(-2) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn coherent_step_preserves_norm_of_arbitrary_state() {
        let w = PositionWindow::new(4);
        let mut s = PureWalkerState::localized(w, &PureCoinState::new(1.1, 2.3));
        // Smear the state out deterministically.
        for _ in 0..3 {
            s = s.coherent_step().unwrap();
        }
        let before = s.norm_squared();
        let after = s.coherent_step().unwrap().norm_squared();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn pure_step_overflows_loudly() {
        let s = PureWalkerState::localized(PositionWindow::new(0), &coin_r());
        assert!(matches!(
            s.coherent_step(),
            Err(Error::WindowOverflow { .. })
        ));
    }

    #[test]
    fn density_step_matches_lifted_pure_step() {
        let w = PositionWindow::new(3);
        let coin = PureCoinState::new(0.7, 1.9);
        let mut pure = PureWalkerState::localized(w, &coin);
        let mut rho = WalkerDensityMatrix::new(coin.bloch(), 3).unwrap();
        for _ in 0..3 {
            pure = pure.coherent_step().unwrap();
            rho = rho.coherent_step().unwrap();
        }
        let lifted = WalkerDensityMatrix::from_pure(&pure);
        let diff = (lifted.matrix() - rho.matrix()).map(|z| z.norm()).max();
        assert!(diff < 1e-12, "max elementwise diff {diff}");
    }

    #[test]
    fn tunneling_step_with_p_zero_equals_coherent() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 3).unwrap();
        let a = rho.coherent_step().unwrap();
        let b = rho.tunneling_step(0.0).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = rho.coin_measure_step(0.0).unwrap();
        assert_eq!(a.matrix(), c.matrix());
    }

    #[test]
    fn full_tunneling_single_step_distribution() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 1)
            .unwrap()
            .tunneling_step(1.0)
            .unwrap();
        let p = |x: i64| {
            (rho.element(x, Coin::Right, x, Coin::Right)
                + rho.element(x, Coin::Left, x, Coin::Left))
            .re
        };
        assert!((p(2) - 0.25).abs() < 1e-14);
        assert!((p(0) - 0.5).abs() < 1e-14);
        assert!((p(-2) - 0.25).abs() < 1e-14);
        assert!(p(1).abs() < 1e-15 && p(-1).abs() < 1e-15);
    }

    #[test]
    fn half_tunneling_single_step_distribution() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 1)
            .unwrap()
            .tunneling_step(0.5)
            .unwrap();
        let p = |x: i64| {
            (rho.element(x, Coin::Right, x, Coin::Right)
                + rho.element(x, Coin::Left, x, Coin::Left))
            .re
        };
        for (x, want) in [(1, 0.25), (-1, 0.25), (0, 0.25), (2, 0.125), (-2, 0.125)] {
            assert!((p(x) - want).abs() < 1e-14, "P({x}) = {} != {want}", p(x));
        }
    }

    #[test]
    fn full_coin_measurement_kills_coin_coherences() {
        let rho = WalkerDensityMatrix::new(PureCoinState::new(1.0, 0.4).bloch(), 2)
            .unwrap()
            .coin_measure_step(1.0)
            .unwrap();
        let m = rho.matrix();
        let dim = rho.window().dim();
        for i in 0..dim {
            for j in 0..dim {
                if (i ^ j) & 1 == 1 {
                    assert_eq!(m[(i, j)], ZERO, "cross-coin block survived at ({i},{j})");
                }
            }
        }
        rho.validate().unwrap();
    }

    #[test]
    fn channels_match_dense_kraus_definition_on_small_window() {
        // The structural O(N^2) application must agree with the dense
        // triple-product definition.
        let t_steps = 3;
        let coin = PureCoinState::new(0.9, 0.3);
        for noise in [
            NoiseModel::Coherent,
            NoiseModel::Tunneling(0.37),
            NoiseModel::Tunneling(1.0),
            NoiseModel::CoinMeasurement(0.61),
        ] {
            let mut rho = WalkerDensityMatrix::new(coin.bloch(), t_steps).unwrap();
            for _ in 0..t_steps {
                let structural = rho.step(&noise).unwrap();
                let ops = position_kraus_operators(&noise, rho.window()).unwrap();
                let mut dense = DMatrix::<Complex64>::zeros(rho.window().dim(), rho.window().dim());
                for e in &ops {
                    dense += e * rho.matrix() * e.adjoint();
                }
                let diff = (structural.matrix() - &dense).map(|z| z.norm()).max();
                assert!(diff < 1e-12, "noise {noise:?}: diff {diff}");
                rho = structural;
            }
        }
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 2).unwrap();
        let out = rho.evolve(&NoiseModel::Coherent, 0, |_, _| {}).unwrap();
        assert_eq!(rho.matrix(), out.matrix());
    }

    #[test]
    fn evolve_preserves_trace_and_hermiticity_under_noise() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 50).unwrap();
        let mut worst_trace = 0.0f64;
        let out = rho
            .evolve(&NoiseModel::Tunneling(0.1), 50, |_, state| {
                worst_trace = worst_trace.max((state.trace().re - 1.0).abs());
            })
            .unwrap();
        assert!(worst_trace < 1e-10);
        assert!(out.hermiticity_deviation() < 1e-12);
        assert_eq!(out.time(), 50);
    }

    #[test]
    fn evolve_rejects_more_steps_than_window() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 5).unwrap();
        assert!(matches!(
            rho.evolve(&NoiseModel::Tunneling(0.5), 6, |_, _| {}),
            Err(Error::StepsExceedWindow { .. })
        ));
    }

    #[test]
    fn step_rejects_invalid_probability() {
        let rho = WalkerDensityMatrix::new(coin_r().bloch(), 1).unwrap();
        assert!(matches!(
            rho.tunneling_step(1.2),
            Err(Error::ProbabilityOutOfRange(_))
        ));
        assert!(matches!(
            rho.coin_measure_step(-0.1),
            Err(Error::ProbabilityOutOfRange(_))
        ));
    }

    #[test]
    fn kraus_completeness_tunneling_and_coin() {
        let w = PositionWindow::new(4);
        for noise in [
            NoiseModel::Tunneling(0.3),
            NoiseModel::CoinMeasurement(0.7),
            NoiseModel::Tunneling(1.0),
            NoiseModel::Coherent,
        ] {
            let report = kraus_completeness_check(&noise, &w).unwrap();
            assert!(
                report.passes,
                "{noise:?} deviation {}",
                report.max_deviation
            );
        }
    }

    #[test]
    fn kraus_set_reduces_to_walk_unitary_without_noise() {
        let w = PositionWindow::new(2);
        let ops = position_kraus_operators(&NoiseModel::Tunneling(0.0), &w).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0], dense_walk_unitary(&w));
    }

    #[test]
    fn support_radius_tracks_spread() {
        let mut rho = WalkerDensityMatrix::new(coin_r().bloch(), 3).unwrap();
        assert_eq!(rho.support_radius(), Some(0));
        rho = rho.tunneling_step(0.8).unwrap();
        assert_eq!(rho.support_radius(), Some(2));
    }
}
