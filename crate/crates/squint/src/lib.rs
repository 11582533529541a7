//! Simulation of a polarization Mach-Zehnder interferometer that squeezes the
//! detected mode before readout: a squeezed-vacuum input, a half-wave-plate
//! phase stage, a phase-sensitive parametric amplifier, and a lossy, noisy
//! photodetector.
//!
//! The physics lives in three layers:
//!
//! * [`gaussian`] — Gaussian states (mean vector + covariance matrix) and the
//!   symplectic transforms and loss channels that move them around.
//! * [`interferometer`] — the full detection pipeline, phase sensitivity,
//!   shot-noise comparisons, quantum-advantage maps, and gain calibration.
//! * [`wigner`] — phase-space pictures and a state-separation metric.
//!
//! [`fock`] holds a truncated number-basis reference implementation used to
//! validate the Gaussian layer through an independent code path, and [`cli`]
//! wires everything to a small deterministic command-line tool.

pub mod cli;
pub mod fock;
pub mod gaussian;
pub mod interferometer;
pub mod wigner;
