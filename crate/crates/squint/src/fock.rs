//! Truncated Fock-space oracle.
//!
//! Everything in here recomputes states the slow, explicit way — dense
//! density matrices on a hard photon-number cutoff — so the moment formulas
//! in [`crate::gaussian`] can be checked against an implementation that
//! shares no code and no representation with them. Unitaries are built by
//! exponentiating truncated generators; because a truncated anti-Hermitian
//! generator still exponentiates to an exact unitary, the trace is preserved
//! to rounding even when the cutoff bites. What the cutoff does cost is
//! fidelity to the untruncated state, which is why [`oracle_squeezed_vacuum`]
//! refuses cutoffs whose out-of-range population is non-negligible rather
//! than silently renormalizing.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

/// Population above the cutoff beyond which squeezed-vacuum construction refuses.
pub const TAIL_LIMIT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("cutoff must be at least 1")]
    ZeroCutoff,
    #[error("cutoff {cutoff} leaves {tail:.3e} of the squeezed-vacuum population out of range (limit {limit:.0e}); raise the cutoff")]
    TailTooLarge { cutoff: usize, tail: f64, limit: f64 },
    #[error("transmissivity must lie in [0, 1], got {0}")]
    BadTransmission(f64),
    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    TraceDrift(f64),
    #[error("density matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix has eigenvalue {0:.3e} below zero")]
    NegativeEigenvalue(f64),
}

/// A single-mode density matrix on the Fock basis `|0⟩ … |cutoff⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    matrix: DMatrix<Complex<f64>>,
}

impl FockDensity {
    /// Vacuum projector on a space with the given cutoff.
    pub fn vacuum(cutoff: usize) -> Result<Self, FockError> {
        if cutoff == 0 {
            return Err(FockError::ZeroCutoff);
        }
        let dim = cutoff + 1;
        let mut matrix = DMatrix::zeros(dim, dim);
        matrix[(0, 0)] = Complex::new(1.0, 0.0);
        Ok(Self { matrix })
    }

    /// Highest Fock index kept (dimension is `cutoff + 1`).
    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex<f64>> {
        &self.matrix
    }

    /// Photon-number distribution (the diagonal, real parts).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|n| self.matrix[(n, n)].re).collect()
    }

    /// How far the trace has drifted from 1.
    pub fn trace_defect(&self) -> f64 {
        let tr: Complex<f64> = self.matrix.diagonal().sum();
        (tr.re - 1.0).abs() + tr.im.abs()
    }

    /// Check trace, Hermiticity and positivity; no repair is attempted.
    pub fn validate(&self) -> Result<(), FockError> {
        let drift = self.trace_defect();
        if drift > 1e-8 {
            return Err(FockError::TraceDrift(drift));
        }
        let herm = (&self.matrix - self.matrix.adjoint()).camax();
        if herm > 1e-10 {
            return Err(FockError::NotHermitian(herm));
        }
        let eigs = self.matrix.clone().symmetric_eigen().eigenvalues;
        if let Some(min) = eigs.iter().cloned().reduce(f64::min) {
            if min < -1e-8 {
                return Err(FockError::NegativeEigenvalue(min));
            }
        }
        Ok(())
    }

    fn conjugate_by(&self, u: &DMatrix<Complex<f64>>) -> Self {
        Self {
            matrix: u * &self.matrix * u.adjoint(),
        }
    }
}

/// Matrix of the annihilation operator `a` on a `(cutoff+1)`-dimensional space.
fn annihilation(cutoff: usize) -> DMatrix<f64> {
    let dim = cutoff + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|v| Complex::new(v, 0.0))
}

/// Population of a squeezed vacuum with factor `g` above `cutoff`.
///
/// Squeezed vacuum occupies even Fock levels with
/// `P(2m) = C(2m, m) (tanh g)^{2m} / (4^m cosh g)`; accumulating the kept
/// terms and subtracting from 1 gives the tail without building any state.
pub fn squeezed_vacuum_tail(g: f64, cutoff: usize) -> f64 {
    let t2 = g.abs().tanh().powi(2);
    let mut term = 1.0 / g.abs().cosh();
    let mut kept = term;
    let mut m = 0usize;
    while 2 * (m + 1) <= cutoff {
        // P(2m+2)/P(2m) = tanh²g · (2m+1)/(2m+2)
        term *= t2 * (2 * m + 1) as f64 / (2 * m + 2) as f64;
        kept += term;
        m += 1;
    }
    (1.0 - kept).max(0.0)
}

/// Squeezed vacuum built by exponentiating the truncated squeeze generator
/// `(g/2)(a†² − a²)` and applying it to `|0⟩`. With `g > 0` the amplified
/// quadrature is x, matching the Gaussian-layer convention. Refuses if the
/// exact state keeps more than [`TAIL_LIMIT`] of its population above the
/// cutoff.
pub fn oracle_squeezed_vacuum(g: f64, cutoff: usize) -> Result<FockDensity, FockError> {
    if cutoff == 0 {
        return Err(FockError::ZeroCutoff);
    }
    let tail = squeezed_vacuum_tail(g, cutoff);
    if tail > TAIL_LIMIT {
        return Err(FockError::TailTooLarge {
            cutoff,
            tail,
            limit: TAIL_LIMIT,
        });
    }
    oracle_squeeze(&FockDensity::vacuum(cutoff)?, g)
}

/// Apply the squeeze unitary `exp[(g/2)(a†² − a²)]` to an existing state.
pub fn oracle_squeeze(state: &FockDensity, g: f64) -> Result<FockDensity, FockError> {
    let a = annihilation(state.cutoff());
    let a2 = &a * &a;
    let gen = (a2.transpose() - a2) * (g / 2.0);
    let u = to_complex(&gen.exp());
    Ok(state.conjugate_by(&u))
}

/// Apply the displacement unitary `exp(α a† − α* a)` to an existing state.
pub fn oracle_displace(
    state: &FockDensity,
    alpha_re: f64,
    alpha_im: f64,
) -> Result<FockDensity, FockError> {
    let a = to_complex(&annihilation(state.cutoff()));
    let alpha = Complex::new(alpha_re, alpha_im);
    let gen = a.adjoint() * alpha - a * alpha.conj();
    let u = gen.exp();
    Ok(state.conjugate_by(&u))
}

/// Pure-loss channel of transmissivity `eta` as an explicit Kraus sum,
/// `ρ → Σ_k K_k ρ K_k†` with
/// `⟨n−k|K_k|n⟩ = √[C(n,k) η^{n−k} (1−η)^k]`.
pub fn oracle_apply_loss(state: &FockDensity, eta: f64) -> Result<FockDensity, FockError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(FockError::BadTransmission(eta));
    }
    let dim = state.cutoff() + 1;
    let mut out = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut kraus = DMatrix::zeros(dim, dim);
        for n in k..dim {
            let mut w = pow_or_one(eta, n - k) * pow_or_one(1.0 - eta, k);
            // C(n, k) as a running product keeps everything in range.
            for j in 1..=k {
                w *= (n - k + j) as f64 / j as f64;
            }
            kraus[(n - k, n)] = Complex::new(w.sqrt(), 0.0);
        }
        out += &kraus * state.matrix() * kraus.adjoint();
    }
    Ok(FockDensity { matrix: out })
}

/// `base^exp` with the channel convention `0^0 = 1`.
fn pow_or_one(base: f64, exp: usize) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

/// Mean and variance of the photon number, straight off the diagonal.
pub fn oracle_moments(state: &FockDensity) -> (f64, f64) {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (n, p) in state.populations().into_iter().enumerate() {
        mean += n as f64 * p;
        second += (n * n) as f64 * p;
    }
    (mean, second - mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn vacuum_is_the_ground_projector() {
        let v = FockDensity::vacuum(10).unwrap();
        v.validate().unwrap();
        let (n, var) = oracle_moments(&v);
        assert_eq!(n, 0.0);
        assert_eq!(var, 0.0);
        assert!(FockDensity::vacuum(0).is_err());
    }

    #[test]
    fn displaced_vacuum_is_poissonian() {
        let d = oracle_displace(&FockDensity::vacuum(60).unwrap(), 2.0, 0.0).unwrap();
        d.validate().unwrap();
        let (n, var) = oracle_moments(&d);
        assert_relative_eq!(n, 4.0, max_relative = 1e-9);
        assert_relative_eq!(var, 4.0, max_relative = 1e-8);
        // P(n) = e^{-|α|²} |α|^{2n} / n!
        let p1 = (-4.0f64).exp() * 4.0;
        assert_relative_eq!(d.populations()[1], p1, max_relative = 1e-9);
    }

    #[test]
    fn squeezed_vacuum_matches_closed_form_moments() {
        // Var(N) feels the truncation tail amplified by n² at the boundary,
        // so this check runs at a generous cutoff.
        let s = oracle_squeezed_vacuum(1.0, 80).unwrap();
        s.validate().unwrap();
        let (n, var) = oracle_moments(&s);
        let sinh2 = 1.0f64.sinh().powi(2);
        assert_relative_eq!(n, sinh2, max_relative = 1e-7);
        assert_relative_eq!(var, 0.5 * 2.0f64.sinh().powi(2), max_relative = 1e-7);
        // Odd levels stay empty.
        assert!(s.populations()[1].abs() < 1e-12);
        assert!(s.populations()[3].abs() < 1e-12);
    }

    #[test]
    fn squeeze_generator_amplifies_x_not_p() {
        // ⟨x²⟩ = tr(ρ x²) with x = (a + a†)/√2 should grow as e^{2g}/2.
        let cutoff = 60;
        let s = oracle_squeezed_vacuum(1.0, cutoff).unwrap();
        let a = to_complex(&annihilation(cutoff));
        let x = (&a + a.adjoint()) / Complex::new(std::f64::consts::SQRT_2, 0.0);
        let x2 = (&x * &x * s.matrix()).diagonal().sum().re;
        assert_relative_eq!(x2, 0.5 * 2.0f64.exp(), max_relative = 1e-6);
    }

    #[test]
    fn tail_refusal_triggers_on_undersized_cutoffs() {
        // Strong squeezing spreads far: at this cutoff ~2e-4 of the
        // population lies out of range, and construction must refuse.
        let err = oracle_squeezed_vacuum(1.7, 100).unwrap_err();
        assert!(matches!(err, FockError::TailTooLarge { .. }));
        // Doubling the cutoff brings the tail under the limit.
        assert!(squeezed_vacuum_tail(1.7, 200) < TAIL_LIMIT);
        oracle_squeezed_vacuum(1.7, 200).unwrap().validate().unwrap();
    }

    #[test]
    fn tail_matches_the_exponentiated_construction() {
        // The truncated generator exponentiates to an exact unitary, so the
        // kept population is always 1; the tail instead predicts how much
        // weight the *untruncated* state carries above a given level. Check
        // it against populations from the matrix-exponential path, built at
        // a cutoff high enough to be exact.
        let g = 0.8;
        let s = oracle_squeezed_vacuum(g, 60).unwrap();
        let pops = s.populations();
        let kept: f64 = pops.iter().sum();
        assert_abs_diff_eq!(kept, 1.0, epsilon = 1e-12);
        let above_30: f64 = pops.iter().skip(31).sum();
        assert_relative_eq!(above_30, squeezed_vacuum_tail(g, 30), max_relative = 1e-6);
        // Spot-check one closed-form level: P(2) = tanh²g / (2 cosh g).
        let p2 = g.tanh().powi(2) / (2.0 * g.cosh());
        assert_relative_eq!(pops[2], p2, max_relative = 1e-9);
    }

    #[test]
    fn loss_thins_a_poisson_distribution() {
        let d = oracle_displace(&FockDensity::vacuum(50).unwrap(), 1.5, 0.5).unwrap();
        let lossy = oracle_apply_loss(&d, 0.4).unwrap();
        lossy.validate().unwrap();
        let (n, var) = oracle_moments(&lossy);
        let expect = 0.4 * (1.5f64 * 1.5 + 0.5 * 0.5);
        assert_relative_eq!(n, expect, max_relative = 1e-8);
        assert_relative_eq!(var, expect, max_relative = 1e-7);
    }

    #[test]
    fn loss_edge_cases_are_exact() {
        let s = oracle_squeezed_vacuum(0.9, 40).unwrap();
        let same = oracle_apply_loss(&s, 1.0).unwrap();
        assert!((same.matrix() - s.matrix()).camax() < 1e-12);
        let dark = oracle_apply_loss(&s, 0.0).unwrap();
        let (n, _) = oracle_moments(&dark);
        assert_abs_diff_eq!(n, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dark.populations()[0], 1.0, epsilon = 1e-12);
        assert!(oracle_apply_loss(&s, -0.2).is_err());
        assert!(oracle_apply_loss(&s, 1.01).is_err());
    }

    #[test]
    fn loss_interpolates_mean_linearly_in_eta() {
        let s = oracle_squeezed_vacuum(0.7, 40).unwrap();
        let (n0, _) = oracle_moments(&s);
        for eta in [0.2, 0.55, 0.85] {
            let (n, _) = oracle_moments(&oracle_apply_loss(&s, eta).unwrap());
            assert_relative_eq!(n, eta * n0, max_relative = 1e-9);
        }
    }

    #[test]
    fn truncated_unitaries_preserve_trace_exactly() {
        let s = oracle_squeezed_vacuum(1.0, 60).unwrap();
        assert!(s.trace_defect() < 1e-12);
        let d = oracle_displace(&s, 1.0, -2.0).unwrap();
        assert!(d.trace_defect() < 1e-12);
    }

    #[test]
    fn displaced_squeezed_state_variance_depends_on_direction() {
        // Displacing along the amplified axis of a squeezed vacuum gives
        // Var(N) ≈ α² e^{2g} + sinh²(2g)/2 for real α and g > 0.
        let (g, alpha) = (0.6, 1.2);
        let s = oracle_squeezed_vacuum(g, 50).unwrap();
        let ds = oracle_displace(&s, alpha, 0.0).unwrap();
        let (_, var) = oracle_moments(&ds);
        let expect = alpha * alpha * (2.0 * g).exp() + 0.5 * (2.0 * g).sinh().powi(2);
        assert_relative_eq!(var, expect, max_relative = 1e-6);
    }
}
