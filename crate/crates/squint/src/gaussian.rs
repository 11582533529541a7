//! Gaussian states and symplectic optics on a small number of bosonic modes.
//!
//! A state is stored as the mean vector and covariance matrix of the
//! quadratures, ordered `(x1, p1, x2, p2, ...)`. Conventions used throughout:
//!
//! * `[x, p] = i`, so the vacuum has `Var(x) = Var(p) = 1/2` and a coherent
//!   state of amplitude `a` has mean `(√2 Re a, √2 Im a)`.
//! * [`GaussianState::squeeze`] with factor `g > 0` and angle `0` amplifies
//!   the x quadrature, `x → e^g x`, `p → e^-g p`; the angle rotates the
//!   amplified axis within the mode's phase plane.
//! * [`GaussianState::phase_shift`] by `f` maps `x → x cos f + p sin f` and
//!   `p → -x sin f + p cos f` (the annihilation operator picks up `e^{-if}`).
//! * [`GaussianState::beamsplitter`] with mixing angle `t` has transmissivity
//!   `cos²t`.
//!
//! States are immutable; every operation returns a new state. Matrices are
//! dense (`nalgebra`), which is the right trade for the ≤ 4 modes that ever
//! occur here.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Quadrature variance of the vacuum in the convention used by this crate.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Tolerance for covariance-matrix symmetry checks.
const SYMMETRY_TOL: f64 = 1e-12;
/// Slack allowed below 1/2 for symplectic eigenvalues of physical states.
const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("a Gaussian state needs at least one mode")]
    ZeroModes,
    #[error("mode index {mode} out of range for {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("beamsplitter needs two distinct modes, got {0} twice")]
    DuplicateMode(usize),
    #[error("mean vector has length {mean_len} but covariance is {cov_rows}x{cov_cols}; expected matching even dimensions")]
    ShapeMismatch {
        mean_len: usize,
        cov_rows: usize,
        cov_cols: usize,
    },
    #[error("covariance matrix is not symmetric (max |S - S^T| = {defect:.3e})")]
    NotSymmetric { defect: f64 },
    #[error("covariance matrix violates the uncertainty bound (min symplectic eigenvalue {min_nu:.6} < 1/2)")]
    Unphysical { min_nu: f64 },
    #[error("transmissivity must lie in [0, 1], got {0}")]
    BadTransmission(f64),
    #[error("state contains non-finite entries")]
    NonFinite,
}

/// A Gaussian state of `n` modes: quadrature means and covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// An affine symplectic transform: `r → M r + d` on the quadrature vector.
///
/// `M` must satisfy `M Ω M^T = Ω` for the interleaved symplectic form; use
/// [`SymplecticOp::symplectic_defect`] to measure how well a candidate does.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    pub matrix: DMatrix<f64>,
    pub displacement: DVector<f64>,
}

impl SymplecticOp {
    /// Identity transform on `n_modes` modes.
    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            displacement: DVector::zeros(2 * n_modes),
        }
    }

    /// Pure displacement by `d`.
    pub fn displacement(d: DVector<f64>) -> Self {
        let dim = d.len();
        Self {
            matrix: DMatrix::identity(dim, dim),
            displacement: d,
        }
    }

    /// Single-mode squeezer embedded in an `n_modes` register.
    ///
    /// For `theta = 0` the matrix is `diag(e^g, e^-g)` on the target mode;
    /// a nonzero angle conjugates that by a phase rotation so the amplified
    /// quadrature lies along `x cos θ + p sin θ`.
    pub fn squeezer(n_modes: usize, mode: usize, g: f64, theta: f64) -> Result<Self, GaussianError> {
        check_mode(mode, n_modes)?;
        let (eg, emg) = (g.exp(), (-g).exp());
        let (c, s) = (theta.cos(), theta.sin());
        let mut op = Self::identity(n_modes);
        let i = 2 * mode;
        op.matrix[(i, i)] = c * c * eg + s * s * emg;
        op.matrix[(i, i + 1)] = c * s * (eg - emg);
        op.matrix[(i + 1, i)] = c * s * (eg - emg);
        op.matrix[(i + 1, i + 1)] = s * s * eg + c * c * emg;
        Ok(op)
    }

    /// Single-mode phase rotation embedded in an `n_modes` register.
    pub fn rotation(n_modes: usize, mode: usize, phi: f64) -> Result<Self, GaussianError> {
        check_mode(mode, n_modes)?;
        let (c, s) = (phi.cos(), phi.sin());
        let mut op = Self::identity(n_modes);
        let i = 2 * mode;
        op.matrix[(i, i)] = c;
        op.matrix[(i, i + 1)] = s;
        op.matrix[(i + 1, i)] = -s;
        op.matrix[(i + 1, i + 1)] = c;
        Ok(op)
    }

    /// Two-mode beamsplitter with transmissivity `cos²(mixing_angle)`.
    pub fn beamsplitter(
        n_modes: usize,
        mode_a: usize,
        mode_b: usize,
        mixing_angle: f64,
    ) -> Result<Self, GaussianError> {
        check_mode(mode_a, n_modes)?;
        check_mode(mode_b, n_modes)?;
        if mode_a == mode_b {
            return Err(GaussianError::DuplicateMode(mode_a));
        }
        let (c, s) = (mixing_angle.cos(), mixing_angle.sin());
        let mut op = Self::identity(n_modes);
        for q in 0..2 {
            let (ia, ib) = (2 * mode_a + q, 2 * mode_b + q);
            op.matrix[(ia, ia)] = c;
            op.matrix[(ia, ib)] = s;
            op.matrix[(ib, ia)] = -s;
            op.matrix[(ib, ib)] = c;
        }
        Ok(op)
    }

    /// Apply to a state: `mean → M mean + d`, `cov → M cov M^T`.
    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        let mean = &self.matrix * &state.mean + &self.displacement;
        let cov = symmetrize(&self.matrix * &state.cov * self.matrix.transpose());
        GaussianState { mean, cov }
    }

    /// Max-abs deviation of `M Ω M^T` from `Ω`; zero for exact symplectic maps.
    pub fn symplectic_defect(&self) -> f64 {
        let n = self.matrix.nrows() / 2;
        let om = symplectic_form(n);
        let res = &self.matrix * &om * self.matrix.transpose() - om;
        res.amax()
    }
}

/// The symplectic form `Ω = ⊕ [[0, 1], [-1, 0]]` in interleaved ordering.
fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        om[(2 * m, 2 * m + 1)] = 1.0;
        om[(2 * m + 1, 2 * m)] = -1.0;
    }
    om
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

fn check_mode(mode: usize, n_modes: usize) -> Result<(), GaussianError> {
    if mode >= n_modes {
        Err(GaussianError::ModeOutOfRange { mode, n_modes })
    } else {
        Ok(())
    }
}

impl GaussianState {
    /// Build a state from explicit moments, validating shape, symmetry and
    /// the uncertainty bound (all symplectic eigenvalues ≥ 1/2).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, GaussianError> {
        let dim = mean.len();
        if dim == 0 {
            return Err(GaussianError::ZeroModes);
        }
        if dim % 2 != 0 || cov.nrows() != dim || cov.ncols() != dim {
            return Err(GaussianError::ShapeMismatch {
                mean_len: dim,
                cov_rows: cov.nrows(),
                cov_cols: cov.ncols(),
            });
        }
        if !mean.iter().all(|v| v.is_finite()) || !cov.iter().all(|v| v.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        let defect = (&cov - cov.transpose()).amax();
        if defect > SYMMETRY_TOL {
            return Err(GaussianError::NotSymmetric { defect });
        }
        let state = Self { mean, cov };
        let nus = state.symplectic_eigenvalues()?;
        let min_nu = nus.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_nu < VACUUM_VARIANCE - PHYSICALITY_TOL {
            return Err(GaussianError::Unphysical { min_nu });
        }
        Ok(state)
    }

    /// Vacuum of `n_modes` modes: zero mean, covariance `I/2`.
    pub fn vacuum(n_modes: usize) -> Result<Self, GaussianError> {
        if n_modes == 0 {
            return Err(GaussianError::ZeroModes);
        }
        Ok(Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE,
        })
    }

    /// Single-mode coherent state of amplitude `alpha_re + i alpha_im`:
    /// displaced vacuum with mean `(√2 Re α, √2 Im α)`.
    pub fn coherent(alpha_re: f64, alpha_im: f64) -> Self {
        let mut state = Self::vacuum(1).expect("one mode is valid");
        state.mean[0] = std::f64::consts::SQRT_2 * alpha_re;
        state.mean[1] = std::f64::consts::SQRT_2 * alpha_im;
        state
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Squeeze `mode` by factor `g` with the amplified axis at angle `theta`.
    pub fn squeeze(&self, mode: usize, g: f64, theta: f64) -> Result<Self, GaussianError> {
        Ok(SymplecticOp::squeezer(self.n_modes(), mode, g, theta)?.apply(self))
    }

    /// Rotate `mode` in its phase plane by `phi`.
    pub fn phase_shift(&self, mode: usize, phi: f64) -> Result<Self, GaussianError> {
        Ok(SymplecticOp::rotation(self.n_modes(), mode, phi)?.apply(self))
    }

    /// Mix two modes on a beamsplitter with transmissivity `cos²(mixing_angle)`.
    pub fn beamsplitter(
        &self,
        mode_a: usize,
        mode_b: usize,
        mixing_angle: f64,
    ) -> Result<Self, GaussianError> {
        Ok(SymplecticOp::beamsplitter(self.n_modes(), mode_a, mode_b, mixing_angle)?.apply(self))
    }

    /// Displace `mode` by the complex amplitude `alpha_re + i alpha_im`.
    pub fn displace(&self, mode: usize, alpha_re: f64, alpha_im: f64) -> Result<Self, GaussianError> {
        check_mode(mode, self.n_modes())?;
        let mut out = self.clone();
        out.mean[2 * mode] += std::f64::consts::SQRT_2 * alpha_re;
        out.mean[2 * mode + 1] += std::f64::consts::SQRT_2 * alpha_im;
        Ok(out)
    }

    /// Pure-loss channel on `mode` with transmissivity `eta`: means scale by
    /// `√eta`, the mode's covariance block relaxes toward the vacuum as
    /// `η σ + (1-η) I/2`, and cross-covariances scale by `√eta`.
    pub fn loss(&self, mode: usize, eta: f64) -> Result<Self, GaussianError> {
        check_mode(mode, self.n_modes())?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(GaussianError::BadTransmission(eta));
        }
        let dim = 2 * self.n_modes();
        let root = eta.sqrt();
        let mut x = DMatrix::identity(dim, dim);
        x[(2 * mode, 2 * mode)] = root;
        x[(2 * mode + 1, 2 * mode + 1)] = root;
        let mut cov = symmetrize(&x * &self.cov * x.transpose());
        cov[(2 * mode, 2 * mode)] += (1.0 - eta) * VACUUM_VARIANCE;
        cov[(2 * mode + 1, 2 * mode + 1)] += (1.0 - eta) * VACUUM_VARIANCE;
        let mut mean = self.mean.clone();
        mean[2 * mode] *= root;
        mean[2 * mode + 1] *= root;
        Ok(Self { mean, cov })
    }

    /// Marginal state of one mode (2x2 covariance block plus its mean).
    pub fn reduced(&self, mode: usize) -> Result<Self, GaussianError> {
        check_mode(mode, self.n_modes())?;
        let i = 2 * mode;
        let mean = DVector::from_column_slice(&[self.mean[i], self.mean[i + 1]]);
        let cov = self.cov.view((i, i), (2, 2)).into_owned();
        Ok(Self { mean, cov })
    }

    /// Mean photon number of `mode`:
    /// `(σ_xx + σ_pp + d_x² + d_p²)/2 − 1/2`.
    pub fn mean_photon(&self, mode: usize) -> Result<f64, GaussianError> {
        check_mode(mode, self.n_modes())?;
        let i = 2 * mode;
        let (dx, dp) = (self.mean[i], self.mean[i + 1]);
        Ok((self.cov[(i, i)] + self.cov[(i + 1, i + 1)] + dx * dx + dp * dp) / 2.0 - 0.5)
    }

    /// Photon-number variance of `mode`, computed from the mode's marginal:
    /// `tr(σ²)/2 + d^T σ d − 1/4`.
    ///
    /// For a single-mode observable this marginal rule is exact even when the
    /// mode is correlated with the rest of the register.
    pub fn photon_variance(&self, mode: usize) -> Result<f64, GaussianError> {
        check_mode(mode, self.n_modes())?;
        let i = 2 * mode;
        let (sxx, spp, sxp) = (
            self.cov[(i, i)],
            self.cov[(i + 1, i + 1)],
            self.cov[(i, i + 1)],
        );
        let (dx, dp) = (self.mean[i], self.mean[i + 1]);
        let tr_sq = sxx * sxx + spp * spp + 2.0 * sxp * sxp;
        let quad = dx * dx * sxx + 2.0 * dx * dp * sxp + dp * dp * spp;
        Ok(0.5 * tr_sq + quad - 0.25)
    }

    /// Symplectic eigenvalues of the covariance matrix, ascending. Physical
    /// states have all values ≥ 1/2; pure states sit exactly at 1/2.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>, GaussianError> {
        let defect = (&self.cov - self.cov.transpose()).amax();
        if defect > SYMMETRY_TOL {
            return Err(GaussianError::NotSymmetric { defect });
        }
        let n = self.n_modes();
        let m = symplectic_form(n) * &self.cov;
        let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        // Eigenvalues of Ωσ come in ±iν pairs; average each pair.
        Ok((0..n).map(|k| 0.5 * (moduli[2 * k] + moduli[2 * k + 1])).collect())
    }

    /// Purity `1/√det(2σ)`; 1 for pure states, < 1 for mixed ones.
    pub fn purity(&self) -> f64 {
        (self.cov.clone() * 2.0).determinant().sqrt().recip()
    }
}
