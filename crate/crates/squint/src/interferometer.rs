//! The full instrument: squeezed-vacuum + coherent light through a
//! polarization interferometer, phase-sensitive pre-amplification of the dark
//! port, and lossy direct detection with dark and pump-intensity noise.
//!
//! Mode 0 is the detected (initially squeezed) port, mode 1 carries the
//! bright coherent beam. The phase stage models a rotated half-wave plate:
//! between the two polarization beamsplitters the circular components pick up
//! opposite phases ±φ/2, so the detected-port operator becomes
//! `a_out = cos(φ/2)·a + i·sin(φ/2)·b` — a dark fringe at φ = 0 that passes
//! the squeezed vacuum untouched and leaks coherent light along the
//! amplified x axis as φ opens. A wave-plate rotation δ drives the phase as
//! φ = 4δ ([`hwp_phase`]).
//!
//! Conventions: the input squeezed vacuum is squeezed along x, the
//! pre-amplifier amplifies x, and the coherent beam enters along −p so its
//! dark-port leakage lies along +x. Internal transmission `mu` hits the
//! squeezed mode between the squeezer and the amplifier; detection
//! transmission `eta` hits the detected port after amplification.

use crate::gaussian::{GaussianError, GaussianState};
use std::f64::consts::{FRAC_PI_4, PI};
use thiserror::Error;

/// Default step (radians) for the central-difference fringe slope.
pub const DEFAULT_PHASE_STEP: f64 = 1e-4;

/// Slope magnitudes below this (photons/radian) count as a fringe extremum,
/// where the phase estimate diverges.
pub const SLOPE_FLOOR: f64 = 1e-12;

/// Variance floor (photons²) applied inside the sensitivity ratio.
///
/// The covariance pipeline carries ~1e-16 of absolute rounding noise, so a
/// truly dark port with no detector noise can report a variance at that
/// scale — or slightly negative — and the ratio √Var/|slope| would inherit
/// the noise where both numerator and slope vanish together (φ → 0 in the
/// noiseless classical baseline). Flooring at 1e-11 photons² keeps the ratio
/// monotone there while sitting many orders below any resolvable signal.
pub const VARIANCE_FLOOR: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error("config field {name} = {value} must satisfy: {rule}")]
    Config {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("total input photon number is zero; the shot-noise reference is undefined")]
    NoPhotons,
    #[error("sensitivity never drops below the shot-noise limit at any transmission up to 1")]
    NeverCrosses,
    #[error("sweep needs at least 2 points and an increasing phase range")]
    DegenerateRange,
    #[error("grid values out of range: {0}")]
    BadGrid(&'static str),
    #[error("gain calibration needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("gain calibration rejects the data: {0}")]
    BadSamples(&'static str),
}

/// Physical parameters of one experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerConfig {
    /// Mean photon number of the coherent input (photons per pulse).
    pub n_alpha: f64,
    /// Squeeze factor of the input squeezer.
    pub g1: f64,
    /// Squeeze factor of the output pre-amplifier.
    pub g2: f64,
    /// Detection transmission (post-amplifier losses and detector efficiency).
    pub eta: f64,
    /// Internal transmission between the squeezer and the amplifier.
    pub mu: f64,
    /// Normalized second-order correlation of the coherent beam; values
    /// above 1 add classical intensity noise.
    pub g2_corr: f64,
    /// Detector dark noise, RMS photons per pulse.
    pub dark_rms: f64,
    /// Turn the squeezed-vacuum input off for the classical baseline.
    pub sv_enabled: bool,
}

impl Default for InterferometerConfig {
    /// The headline operating point of the modeled experiment.
    fn default() -> Self {
        Self {
            n_alpha: 1500.0,
            g1: 1.7,
            g2: 3.2,
            eta: 0.5,
            mu: 0.97,
            g2_corr: 1.004,
            dark_rms: 500.0,
            sv_enabled: true,
        }
    }
}

impl InterferometerConfig {
    /// Ideal classical Mach-Zehnder baseline: coherent light only, no
    /// amplifier, no loss, no technical noise.
    pub fn classical_ideal(n_alpha: f64) -> Self {
        Self {
            n_alpha,
            g1: 0.0,
            g2: 0.0,
            eta: 1.0,
            mu: 1.0,
            g2_corr: 1.0,
            dark_rms: 0.0,
            sv_enabled: false,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let checks: [(&'static str, f64, bool, &'static str); 7] = [
            (
                "n_alpha",
                self.n_alpha,
                self.n_alpha.is_finite() && self.n_alpha >= 0.0,
                "finite and >= 0",
            ),
            ("g1", self.g1, self.g1.is_finite() && self.g1 >= 0.0, "finite and >= 0"),
            ("g2", self.g2, self.g2.is_finite() && self.g2 >= 0.0, "finite and >= 0"),
            ("eta", self.eta, self.eta > 0.0 && self.eta <= 1.0, "0 < eta <= 1"),
            ("mu", self.mu, self.mu > 0.0 && self.mu <= 1.0, "0 < mu <= 1"),
            (
                "g2_corr",
                self.g2_corr,
                self.g2_corr.is_finite() && self.g2_corr >= 1.0,
                "finite and >= 1",
            ),
            (
                "dark_rms",
                self.dark_rms,
                self.dark_rms.is_finite() && self.dark_rms >= 0.0,
                "finite and >= 0",
            ),
        ];
        for (name, value, ok, rule) in checks {
            if !ok {
                return Err(ModelError::Config { name, value, rule });
            }
        }
        Ok(())
    }

    fn with_n_alpha(&self, n_alpha: f64) -> Self {
        Self { n_alpha, ..self.clone() }
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }
}

/// Detected photon statistics at one phase, with the variance itemized into
/// its quantum, pump-intensity and dark contributions (their sum is `var_n`
/// by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionStats {
    pub phi: f64,
    pub mean_n: f64,
    pub var_n: f64,
    pub var_quantum: f64,
    pub var_excess: f64,
    pub var_dark: f64,
}

/// One row of a phase sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub stats: DetectionStats,
    pub delta_phi: f64,
}

/// A uniformly sampled sensitivity curve plus its shot-noise reference.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub points: Vec<SweepPoint>,
    pub snl: f64,
    pub config: InterferometerConfig,
}

impl SensitivityCurve {
    /// Total phase measure (radians) over which the curve beats the
    /// shot-noise reference, counted as grid cells below it.
    pub fn sub_snl_width(&self) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        let step = self.points[1].stats.phi - self.points[0].stats.phi;
        let below = self
            .points
            .iter()
            .filter(|p| p.delta_phi.is_finite() && p.delta_phi < self.snl)
            .count();
        below as f64 * step
    }
}

/// Result of the best-phase search.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSensitivity {
    pub phi: f64,
    pub delta_phi: f64,
}

/// Gain-calibration fit `N = c · sinh²(B √P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainFit {
    pub b: f64,
    pub c: f64,
    pub rms_residual: f64,
}

/// Phase shift driven by a half-wave-plate rotation δ: φ = 4δ, wrapped
/// to (−π, π].
pub fn hwp_phase(delta: f64) -> f64 {
    let wrapped = (4.0 * delta).rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Two-mode state at the detector for phase `phi`.
///
/// Pipeline: squeezed vacuum into mode 0 (variance e^{−2g1}/2 along x) and a
/// coherent beam of `n_alpha` photons along −p into mode 1; internal
/// transmission `mu` on the squeezed mode; the half-wave-plate phase stage
/// (beamsplitter, ±φ/2 circular phases, inverse beamsplitter); the
/// x-amplifying pre-amplifier on mode 0; detection transmission `eta` on
/// mode 0. Mode 1 is left undetected.
///
/// `mu` attenuates only the squeezed path: the coherent beam's photon number
/// is specified as measured inside the interferometer, so attenuating it
/// again would double-count that loss. This is also the reading under which
/// the small-phase noise of the pipeline reproduces
/// [`q0_from_squeezing`]'s `1/(mu·V_sq + 1 − mu)` exactly.
pub fn output_state(config: &InterferometerConfig, phi: f64) -> Result<GaussianState, ModelError> {
    config.validate()?;
    let mut st = GaussianState::vacuum(2)?;
    if config.sv_enabled {
        st = st.squeeze(0, -config.g1, 0.0)?;
    }
    st = st.displace(1, 0.0, -config.n_alpha.sqrt())?;
    st = st.loss(0, config.mu)?;
    st = st.beamsplitter(0, 1, -FRAC_PI_4)?;
    st = st.phase_shift(0, 0.5 * phi)?;
    st = st.phase_shift(1, -0.5 * phi)?;
    st = st.beamsplitter(0, 1, FRAC_PI_4)?;
    st = st.squeeze(0, config.g2, 0.0)?;
    st = st.loss(0, config.eta)?;
    Ok(st)
}

fn mean_at(config: &InterferometerConfig, phi: f64) -> Result<f64, ModelError> {
    Ok(output_state(config, phi)?.mean_photon(0)?)
}

/// Detected photon statistics at `phi`.
///
/// The quantum part is the photon-number variance of the detected mode. The
/// pump-intensity part propagates classical fluctuations of the coherent
/// input linearly: `(g2_corr − 1) · n_alpha² · (∂⟨N⟩/∂n_alpha)²`, with the
/// derivative taken by central difference (the mean is affine in `n_alpha`,
/// so the difference quotient is exact up to rounding). Dark noise adds
/// `dark_rms²`.
pub fn detect(config: &InterferometerConfig, phi: f64) -> Result<DetectionStats, ModelError> {
    let state = output_state(config, phi)?;
    let mean_n = state.mean_photon(0)?;
    // Clamp away the negative rounding dust a dark port can produce.
    let var_quantum = state.photon_variance(0)?.max(0.0);
    let var_excess = if config.g2_corr > 1.0 && config.n_alpha > 0.0 {
        let h = 1e-3 * config.n_alpha;
        let hi = mean_at(&config.with_n_alpha(config.n_alpha + h), phi)?;
        let lo = mean_at(&config.with_n_alpha(config.n_alpha - h), phi)?;
        let slope = (hi - lo) / (2.0 * h);
        (config.g2_corr - 1.0) * (config.n_alpha * slope).powi(2)
    } else {
        0.0
    };
    let var_dark = config.dark_rms * config.dark_rms;
    Ok(DetectionStats {
        phi,
        mean_n,
        var_n: var_quantum + var_excess + var_dark,
        var_quantum,
        var_excess,
        var_dark,
    })
}

fn fringe_slope(config: &InterferometerConfig, phi: f64, step: f64) -> Result<f64, ModelError> {
    Ok((mean_at(config, phi + step)? - mean_at(config, phi - step)?) / (2.0 * step))
}

/// Phase uncertainty at `phi`: `√Var(N) / |d⟨N⟩/dφ|`, the slope estimated by
/// a central difference of half-width `step`. Returns `f64::INFINITY` at
/// fringe extrema (slope magnitude below [`SLOPE_FLOOR`]).
pub fn sensitivity(config: &InterferometerConfig, phi: f64, step: f64) -> Result<f64, ModelError> {
    if !(step > 0.0) {
        return Err(ModelError::Config {
            name: "step",
            value: step,
            rule: "> 0",
        });
    }
    let slope = fringe_slope(config, phi, step)?;
    finish_sensitivity(config, phi, slope)
}

/// Like [`sensitivity`] but with one Richardson-extrapolation round on the
/// slope, `(4·D(step/2) − D(step))/3`, for a fourth-order phase derivative.
/// The fringes here are smooth enough that the plain estimate already
/// saturates double precision; this variant exists for verification.
pub fn sensitivity_richardson(
    config: &InterferometerConfig,
    phi: f64,
    step: f64,
) -> Result<f64, ModelError> {
    if !(step > 0.0) {
        return Err(ModelError::Config {
            name: "step",
            value: step,
            rule: "> 0",
        });
    }
    let coarse = fringe_slope(config, phi, step)?;
    let fine = fringe_slope(config, phi, step / 2.0)?;
    finish_sensitivity(config, phi, (4.0 * fine - coarse) / 3.0)
}

fn finish_sensitivity(
    config: &InterferometerConfig,
    phi: f64,
    slope: f64,
) -> Result<f64, ModelError> {
    if slope.abs() < SLOPE_FLOOR {
        return Ok(f64::INFINITY);
    }
    Ok(detect(config, phi)?.var_n.max(VARIANCE_FLOOR).sqrt() / slope.abs())
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

/// Uniform sweep of [`detect`] and [`sensitivity`] over a phase range.
pub fn phase_sweep(
    config: &InterferometerConfig,
    phi_min: f64,
    phi_max: f64,
    n_points: usize,
) -> Result<SensitivityCurve, ModelError> {
    if n_points < 2 || !(phi_min < phi_max) {
        return Err(ModelError::DegenerateRange);
    }
    let snl = snl(config)?;
    let points = linspace(phi_min, phi_max, n_points)
        .into_iter()
        .map(|phi| {
            Ok(SweepPoint {
                stats: detect(config, phi)?,
                delta_phi: sensitivity(config, phi, DEFAULT_PHASE_STEP)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(SensitivityCurve {
        points,
        snl,
        config: config.clone(),
    })
}

/// Shot-noise reference: `1/√(n_alpha + sinh²g1)`, counting every photon
/// sent into the interferometer. The classical baseline sets `g1 = 0`.
pub fn snl(config: &InterferometerConfig) -> Result<f64, ModelError> {
    config.validate()?;
    let total = config.n_alpha + config.g1.sinh().powi(2);
    if total <= 0.0 {
        return Err(ModelError::NoPhotons);
    }
    Ok(1.0 / total.sqrt())
}

/// Variance-ratio advantage of the squeezed input over shot noise for ideal
/// detection: `1 / (mu·10^{−squeezing_db/10} + 1 − mu)`. Internal loss `mu`
/// mixes vacuum back in and caps the attainable advantage.
pub fn q0_from_squeezing(squeezing_db: f64, mu: f64) -> Result<f64, ModelError> {
    if !(squeezing_db >= 0.0) || !squeezing_db.is_finite() {
        return Err(ModelError::Config {
            name: "squeezing_db",
            value: squeezing_db,
            rule: "finite and >= 0",
        });
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(ModelError::Config {
            name: "mu",
            value: mu,
            rule: "0 < mu <= 1",
        });
    }
    Ok(1.0 / (mu * 10f64.powf(-squeezing_db / 10.0) + 1.0 - mu))
}

/// Advantage left after imperfect detection:
/// `Q = (Q₀⁻¹ + (1−η)/(η·mu) · e^{−2·g2})⁻¹`. Pre-amplifier gain `g2`
/// suppresses the loss penalty exponentially; at η = 1 (or g2 → ∞) the full
/// `q0` survives.
pub fn quantum_advantage(q0: f64, eta: f64, mu: f64, g2: f64) -> Result<f64, ModelError> {
    if !(q0 > 0.0) || !q0.is_finite() {
        return Err(ModelError::Config {
            name: "q0",
            value: q0,
            rule: "finite and > 0",
        });
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(ModelError::Config {
            name: "eta",
            value: eta,
            rule: "0 < eta <= 1",
        });
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(ModelError::Config {
            name: "mu",
            value: mu,
            rule: "0 < mu <= 1",
        });
    }
    if !(g2 >= 0.0) || !g2.is_finite() {
        return Err(ModelError::Config {
            name: "g2",
            value: g2,
            rule: "finite and >= 0",
        });
    }
    Ok(1.0 / (1.0 / q0 + (1.0 - eta) / (eta * mu) * (-2.0 * g2).exp()))
}

/// Map of [`quantum_advantage`] normalized to `q0`, rows indexed by `eta`,
/// columns by `g2`; every entry lies in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageMap {
    pub eta: Vec<f64>,
    pub g2: Vec<f64>,
    pub normalized: Vec<Vec<f64>>,
}

pub fn advantage_map(
    q0: f64,
    mu: f64,
    eta_grid: &[f64],
    g2_grid: &[f64],
) -> Result<AdvantageMap, ModelError> {
    if eta_grid.is_empty() || g2_grid.is_empty() {
        return Err(ModelError::BadGrid("empty axis"));
    }
    let normalized = eta_grid
        .iter()
        .map(|&eta| {
            g2_grid
                .iter()
                .map(|&g2| Ok(quantum_advantage(q0, eta, mu, g2)? / q0))
                .collect::<Result<Vec<_>, ModelError>>()
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(AdvantageMap {
        eta: eta_grid.to_vec(),
        g2: g2_grid.to_vec(),
        normalized,
    })
}

/// Points in the coarse phase scan of the best-sensitivity search.
const SCAN_POINTS: usize = 721;

/// Golden-section minimization over a bracket; deterministic iteration count
/// chosen so the bracket shrinks below 1e-12 radians.
fn golden_min<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<(f64, f64), ModelError>
where
    F: FnMut(f64) -> Result<f64, ModelError>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - (hi - lo) * INV_PHI;
    let mut b = lo + (hi - lo) * INV_PHI;
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..90 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - (hi - lo) * INV_PHI;
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + (hi - lo) * INV_PHI;
            fb = f(b)?;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, f(mid)?))
}

/// Best phase uncertainty over the full fringe: a coarse scan of
/// [`SCAN_POINTS`] phases over (−π, π] (ties broken toward the smallest
/// |φ|), then golden-section refinement within one grid cell on each side.
pub fn best_sensitivity(config: &InterferometerConfig) -> Result<BestSensitivity, ModelError> {
    config.validate()?;
    let step = 2.0 * PI / SCAN_POINTS as f64;
    let mut best_phi = f64::NAN;
    let mut best = f64::INFINITY;
    for k in 1..=SCAN_POINTS {
        let phi = -PI + step * k as f64;
        let dphi = sensitivity(config, phi, DEFAULT_PHASE_STEP)?;
        if dphi < best || (dphi == best && phi.abs() < best_phi.abs()) {
            best = dphi;
            best_phi = phi;
        }
    }
    if !best.is_finite() {
        // Flat fringe everywhere: no usable operating point.
        return Ok(BestSensitivity {
            phi: 0.0,
            delta_phi: f64::INFINITY,
        });
    }
    let (phi, delta_phi) = golden_min(
        |phi| sensitivity(config, phi, DEFAULT_PHASE_STEP),
        best_phi - step,
        best_phi + step,
    )?;
    // The refined value can only improve on the scan; keep the better one.
    if delta_phi <= best {
        Ok(BestSensitivity { phi, delta_phi })
    } else {
        Ok(BestSensitivity {
            phi: best_phi,
            delta_phi: best,
        })
    }
}

/// Bisection bounds and tolerance of the detection-transmission threshold.
const ETA_MIN: f64 = 0.01;
const ETA_TOL: f64 = 1e-3;
/// Relative margin a sensitivity must clear below the reference to count as
/// beating it; absorbs finite-difference and rounding bias, and shifts the
/// located threshold by far less than [`ETA_TOL`].
const SUB_SNL_MARGIN: f64 = 1e-4;

/// Smallest detection transmission at which the instrument still beats its
/// shot-noise reference, found by bisection over eta ∈ [0.01, 1] to 1e-3.
/// Errors with [`ModelError::NeverCrosses`] if even perfect detection stays
/// at or above the reference.
pub fn loss_threshold(config: &InterferometerConfig) -> Result<f64, ModelError> {
    config.validate()?;
    let reference = snl(config)?;
    let beats = |eta: f64| -> Result<bool, ModelError> {
        let best = best_sensitivity(&config.with_eta(eta))?.delta_phi;
        Ok(best < reference * (1.0 - SUB_SNL_MARGIN))
    };
    if !beats(1.0)? {
        return Err(ModelError::NeverCrosses);
    }
    if beats(ETA_MIN)? {
        return Ok(ETA_MIN);
    }
    let (mut lo, mut hi) = (ETA_MIN, 1.0);
    while hi - lo > ETA_TOL {
        let mid = 0.5 * (lo + hi);
        if beats(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least-squares fit of pump-power calibration data to `N = c·sinh²(B√P)`.
///
/// For fixed `B` the optimal `c` is a linear regression through the origin,
/// so the search is one-dimensional: a coarse scan of B over [0.001, 20]
/// followed by golden-section refinement of the squared residual.
pub fn calibrate_gain(samples: &[(f64, f64)]) -> Result<GainFit, ModelError> {
    if samples.len() < 3 {
        return Err(ModelError::TooFewSamples(samples.len()));
    }
    if samples.iter().any(|&(p, n)| !(p > 0.0) || !(n > 0.0)) {
        return Err(ModelError::BadSamples(
            "pump powers and photon counts must be positive",
        ));
    }
    let p0 = samples[0].0;
    if samples.iter().all(|&(p, _)| p == p0) {
        return Err(ModelError::BadSamples("all pump powers are equal"));
    }

    // Squared residual at B, with c eliminated analytically.
    let sse = |b: f64| -> (f64, f64) {
        let (mut sn, mut ss) = (0.0, 0.0);
        for &(p, n) in samples {
            let s = (b * p.sqrt()).sinh().powi(2);
            sn += n * s;
            ss += s * s;
        }
        let c = if ss > 0.0 { sn / ss } else { 0.0 };
        let err: f64 = samples
            .iter()
            .map(|&(p, n)| {
                let model = c * (b * p.sqrt()).sinh().powi(2);
                (n - model).powi(2)
            })
            .sum();
        (err, c)
    };

    const B_LO: f64 = 1e-3;
    const B_HI: f64 = 20.0;
    const B_GRID: usize = 2000;
    let grid_step = (B_HI - B_LO) / (B_GRID - 1) as f64;
    let mut best_b = B_LO;
    let mut best_err = f64::INFINITY;
    for k in 0..B_GRID {
        let b = B_LO + grid_step * k as f64;
        let (err, _) = sse(b);
        if err < best_err {
            best_err = err;
            best_b = b;
        }
    }
    let (b, _) = golden_min(
        |b| Ok(sse(b).0),
        (best_b - grid_step).max(B_LO),
        best_b + grid_step,
    )?;
    let (err, c) = sse(b);
    Ok(GainFit {
        b,
        c,
        rms_residual: (err / samples.len() as f64).sqrt(),
    })
}
