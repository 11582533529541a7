//! Single-mode Wigner functions and the three illustration scenarios
//! (classical, squeezed, squeezed + pre-amplified) whose phase-space
//! portraits narrate why amplifying before a lossy detector preserves the
//! squeezing advantage.

use crate::gaussian::GaussianState;
use crate::interferometer::{output_state, InterferometerConfig, ModelError};
use nalgebra::DMatrix;
use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WignerError {
    #[error("Wigner evaluation needs a single-mode state, got {0} modes")]
    NotSingleMode(usize),
    #[error("covariance matrix is numerically singular")]
    SingularCovariance,
    #[error("scenario needs at least one phase")]
    NoPhases,
    #[error("separation metric needs at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("unknown scenario '{0}'; expected classical, squeezed or squeezed+amplified")]
    UnknownScenario(String),
    #[error("grid axes need at least 2 points each")]
    DegenerateAxes,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Quadrature squeeze factor equivalent to a variance change in decibels:
/// `g = db·ln(10)/20`, so `e^{2g} = 10^{db/10}`.
pub fn db_to_squeeze(db: f64) -> f64 {
    db * LN_10 / 20.0
}

/// Wigner density of a single-mode Gaussian state at phase-space point
/// `(x, p)`: `exp(−(r−d)ᵀ σ⁻¹ (r−d)/2) / (2π √det σ)`.
pub fn wigner_at(state: &GaussianState, x: f64, p: f64) -> Result<f64, WignerError> {
    if state.n_modes() != 1 {
        return Err(WignerError::NotSingleMode(state.n_modes()));
    }
    let (sxx, spp, sxp) = (
        state.cov()[(0, 0)],
        state.cov()[(1, 1)],
        state.cov()[(0, 1)],
    );
    let det = sxx * spp - sxp * sxp;
    if det < 1e-300 {
        return Err(WignerError::SingularCovariance);
    }
    let (dx, dp) = (x - state.mean()[0], p - state.mean()[1]);
    let quad = (spp * dx * dx - 2.0 * sxp * dx * dp + sxx * dp * dp) / det;
    Ok((-0.5 * quad).exp() / (2.0 * PI * det.sqrt()))
}

/// A Wigner function sampled on a rectangular grid. `values[(i, j)]` is the
/// density at `(x_axis[i], p_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: DMatrix<f64>,
    pub state_label: String,
}

impl WignerGrid {
    /// Sample a state on the given axes (assumed uniform).
    pub fn sample(
        state: &GaussianState,
        x_axis: &[f64],
        p_axis: &[f64],
        state_label: impl Into<String>,
    ) -> Result<Self, WignerError> {
        if x_axis.len() < 2 || p_axis.len() < 2 {
            return Err(WignerError::DegenerateAxes);
        }
        let mut values = DMatrix::zeros(x_axis.len(), p_axis.len());
        for (i, &x) in x_axis.iter().enumerate() {
            for (j, &p) in p_axis.iter().enumerate() {
                values[(i, j)] = wigner_at(state, x, p)?;
            }
        }
        Ok(Self {
            x_axis: x_axis.to_vec(),
            p_axis: p_axis.to_vec(),
            values,
            state_label: state_label.into(),
        })
    }

    /// Riemann-sum normalization check: ≈1 when the grid covers the state.
    pub fn integral(&self) -> f64 {
        let dx = self.x_axis[1] - self.x_axis[0];
        let dp = self.p_axis[1] - self.p_axis[0];
        self.values.sum() * dx * dp
    }
}

/// The three Wigner-illustration pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Ideal Mach-Zehnder with coherent light only and perfect detection.
    Classical,
    /// Squeezed vacuum added at the dark port; lossy detection.
    Squeezed,
    /// Squeezed vacuum plus phase-sensitive pre-amplification before the
    /// same lossy detection.
    SqueezedAmplified,
}

impl FromStr for Scenario {
    type Err = WignerError;

    fn from_str(s: &str) -> Result<Self, WignerError> {
        match s {
            "classical" => Ok(Self::Classical),
            "squeezed" => Ok(Self::Squeezed),
            "squeezed+amplified" => Ok(Self::SqueezedAmplified),
            other => Err(WignerError::UnknownScenario(other.to_string())),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Classical => "classical",
            Self::Squeezed => "squeezed",
            Self::SqueezedAmplified => "squeezed+amplified",
        })
    }
}

fn scenario_config(scenario: Scenario, alpha: f64, sv_db: f64, eta: f64, dopa_db: f64) -> InterferometerConfig {
    let base = InterferometerConfig {
        n_alpha: alpha * alpha,
        g1: db_to_squeeze(sv_db),
        g2: db_to_squeeze(dopa_db),
        eta,
        mu: 1.0,
        g2_corr: 1.0,
        dark_rms: 0.0,
        sv_enabled: true,
    };
    match scenario {
        Scenario::Classical => InterferometerConfig {
            g1: 0.0,
            g2: 0.0,
            eta: 1.0,
            sv_enabled: false,
            ..base
        },
        Scenario::Squeezed => InterferometerConfig { g2: 0.0, ..base },
        Scenario::SqueezedAmplified => base,
    }
}

/// Reduced detected-port state at each phase for one scenario.
///
/// All scenarios share the interferometer pipeline; they differ in which
/// elements are active. `sv_db` and `dopa_db` are quadrature-variance
/// decibels (see [`db_to_squeeze`]).
pub fn scenario_states(
    scenario: Scenario,
    phis: &[f64],
    alpha: f64,
    sv_db: f64,
    eta: f64,
    dopa_db: f64,
) -> Result<Vec<GaussianState>, WignerError> {
    if phis.is_empty() {
        return Err(WignerError::NoPhases);
    }
    let config = scenario_config(scenario, alpha, sv_db, eta, dopa_db);
    phis.iter()
        .map(|&phi| {
            let state = output_state(&config, phi)?;
            Ok(state.reduced(0).map_err(ModelError::from)?)
        })
        .collect()
}

/// x-quadrature distinguishability of each adjacent pair of states:
/// `|Δ mean_x| / √(average Var_x)`. High values mean the phases are easy to
/// tell apart by direct detection.
pub fn separation_metric(states: &[GaussianState]) -> Result<Vec<f64>, WignerError> {
    if states.len() < 2 {
        return Err(WignerError::TooFewStates(states.len()));
    }
    for s in states {
        if s.n_modes() != 1 {
            return Err(WignerError::NotSingleMode(s.n_modes()));
        }
    }
    Ok(states
        .windows(2)
        .map(|pair| {
            let dx = (pair[0].mean()[0] - pair[1].mean()[0]).abs();
            let var = 0.5 * (pair[0].cov()[(0, 0)] + pair[1].cov()[(0, 0)]);
            dx / var.sqrt()
        })
        .collect())
}
