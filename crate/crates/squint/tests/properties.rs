//! Randomized invariant checks over the state representation, the
//! interferometer model and the Wigner sampler.

use proptest::prelude::*;
use squint::gaussian::{GaussianState, SymplecticOp};
use squint::interferometer::{detect, quantum_advantage, InterferometerConfig};
use squint::wigner::WignerGrid;
use std::f64::consts::PI;

const MIN_SYMPLECTIC: f64 = 0.5 - 1e-9;

/// One random element of a two-mode circuit.
#[derive(Debug, Clone)]
enum Op {
    Squeeze { mode: usize, g: f64, theta: f64 },
    Phase { mode: usize, phi: f64 },
    Beamsplit { angle: f64 },
    Displace { mode: usize, re: f64, im: f64 },
    Loss { mode: usize, eta: f64 },
}

impl Op {
    fn apply(&self, state: &GaussianState) -> GaussianState {
        match *self {
            Op::Squeeze { mode, g, theta } => state.squeeze(mode, g, theta),
            Op::Phase { mode, phi } => state.phase_shift(mode, phi),
            Op::Beamsplit { angle } => state.beamsplitter(0, 1, angle),
            Op::Displace { mode, re, im } => state.displace(mode, re, im),
            Op::Loss { mode, eta } => state.loss(mode, eta),
        }
        .expect("in-range parameters")
    }

    /// The symplectic part, for composition checks (loss is not symplectic).
    fn symplectic(&self) -> Option<SymplecticOp> {
        match *self {
            Op::Squeeze { mode, g, theta } => SymplecticOp::squeezer(2, mode, g, theta).ok(),
            Op::Phase { mode, phi } => SymplecticOp::rotation(2, mode, phi).ok(),
            Op::Beamsplit { angle } => SymplecticOp::beamsplitter(2, 0, 1, angle).ok(),
            Op::Displace { .. } | Op::Loss { .. } => None,
        }
    }
}

fn unitary_op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0usize..2, -1.0..1.0f64, 0.0..PI).prop_map(|(mode, g, theta)| Op::Squeeze {
            mode,
            g,
            theta
        }),
        (0usize..2, -PI..PI).prop_map(|(mode, phi)| Op::Phase { mode, phi }),
        (-PI..PI).prop_map(|angle| Op::Beamsplit { angle }),
        (0usize..2, -3.0..3.0, -3.0..3.0).prop_map(|(mode, re, im)| Op::Displace {
            mode,
            re,
            im
        }),
    ]
}

fn any_op() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => unitary_op(),
        1 => (0usize..2, 0.05..1.0f64).prop_map(|(mode, eta)| Op::Loss { mode, eta }),
    ]
}

fn run_circuit(ops: &[Op]) -> GaussianState {
    let mut state = GaussianState::vacuum(2).unwrap();
    for op in ops {
        state = op.apply(&state);
    }
    state
}

proptest! {
    /// No circuit of squeezers, rotations, beam splitters, displacements and
    /// pure-loss channels can produce a covariance below the vacuum floor.
    #[test]
    fn random_circuits_keep_states_physical(ops in prop::collection::vec(any_op(), 1..7)) {
        let state = run_circuit(&ops);
        let eigenvalues = state.symplectic_eigenvalues().unwrap();
        for nu in eigenvalues {
            prop_assert!(nu >= MIN_SYMPLECTIC, "symplectic eigenvalue {nu} below 1/2");
        }
    }

    /// Circuits without loss map pure states to pure states: det(2σ) stays 1.
    #[test]
    fn unitary_circuits_preserve_purity(ops in prop::collection::vec(unitary_op(), 1..7)) {
        let state = run_circuit(&ops);
        let det = (state.cov() * 2.0).determinant();
        prop_assert!((det - 1.0).abs() < 1e-9, "det(2σ) = {det}");
        prop_assert!((state.purity() - 1.0).abs() < 1e-9);
    }

    /// Composing the symplectic matrices of a unitary circuit keeps
    /// S Ω Sᵀ = Ω to near machine precision.
    #[test]
    fn composed_unitaries_stay_symplectic(ops in prop::collection::vec(unitary_op(), 1..7)) {
        let mut total = SymplecticOp::identity(2);
        for op in &ops {
            if let Some(s) = op.symplectic() {
                total = SymplecticOp {
                    matrix: &s.matrix * &total.matrix,
                    displacement: &s.matrix * &total.displacement + &s.displacement,
                };
            }
        }
        prop_assert!(total.symplectic_defect() < 1e-10);
    }

    /// Beam splitters and phase shifts only redistribute photons; loss on one
    /// mode scales that mode's mean occupation by η and leaves the other
    /// mode's marginal untouched.
    #[test]
    fn energy_bookkeeping_under_passive_elements(
        prep in prop::collection::vec(unitary_op(), 1..5),
        angle in -PI..PI,
        phi in -PI..PI,
        eta in 0.05..1.0f64,
    ) {
        let state = run_circuit(&prep);
        let total = |s: &GaussianState| s.mean_photon(0).unwrap() + s.mean_photon(1).unwrap();
        let before = total(&state);
        let tol = 1e-9 * (1.0 + before);

        let mixed = state.beamsplitter(0, 1, angle).unwrap();
        prop_assert!((total(&mixed) - before).abs() < tol);
        let rotated = state.phase_shift(0, phi).unwrap();
        prop_assert!((total(&rotated) - before).abs() < tol);

        let lossy = state.loss(0, eta).unwrap();
        let n0 = state.mean_photon(0).unwrap();
        prop_assert!((lossy.mean_photon(0).unwrap() - eta * n0).abs() < tol);
        prop_assert!((lossy.mean_photon(1).unwrap() - state.mean_photon(1).unwrap()).abs() < tol);
    }

    /// The bare Mach-Zehnder transfers n·sin²(φ/2) photons to the readout
    /// port for a coherent input of n photons.
    #[test]
    fn classical_fringe_follows_the_half_angle_law(
        n in 1.0..5000.0f64,
        phi in -PI..PI,
    ) {
        let stats = detect(&InterferometerConfig::classical_ideal(n), phi).unwrap();
        let expected = n * (phi / 2.0).sin().powi(2);
        prop_assert!(
            (stats.mean_n - expected).abs() < 1e-9 * (1.0 + expected),
            "mean {} vs {expected}", stats.mean_n
        );
    }

    /// Phase-sensitive amplification along the signal quadrature multiplies
    /// signal and noise alike: the quadrature signal-to-noise ratio
    /// mean_x²/Var(x) is untouched by squeeze(G, 0) for any input with its
    /// signal along x.
    #[test]
    fn quadrature_snr_is_invariant_under_aligned_gain(
        amplitude in 0.3..4.0f64,
        eta in 0.2..1.0f64,
        gain in 0.0..2.0f64,
    ) {
        let input = GaussianState::coherent(amplitude, 0.0).loss(0, eta).unwrap();
        let snr = |s: &GaussianState| s.mean()[0].powi(2) / s.cov()[(0, 0)];
        let amplified = input.squeeze(0, gain, 0.0).unwrap();
        let (a, b) = (snr(&input), snr(&amplified));
        prop_assert!((a - b).abs() < 1e-9 * a, "snr {a} became {b}");
    }

    /// Richer single-mode states still normalize: ∫∫ W dx dp = 1 within 1%
    /// on a window that covers the state.
    #[test]
    fn wigner_integral_is_one_on_covering_windows(
        re in -2.0..2.0f64,
        im in -2.0..2.0f64,
        g in -1.0..1.0f64,
        theta in 0.0..PI,
        eta in 0.2..1.0f64,
    ) {
        let state = GaussianState::coherent(re, im)
            .squeeze(0, g, theta)
            .unwrap()
            .loss(0, eta)
            .unwrap();
        let window = |axis: usize| {
            let center = state.mean()[axis];
            let half = 6.5 * state.cov()[(axis, axis)].sqrt();
            let n = 121;
            (0..n)
                .map(|i| center - half + 2.0 * half * i as f64 / (n - 1) as f64)
                .collect::<Vec<_>>()
        };
        let grid = WignerGrid::sample(&state, &window(0), &window(1), "probe").unwrap();
        prop_assert!((grid.integral() - 1.0).abs() < 1e-2);
    }

    /// The detectable advantage grows with detection efficiency and with
    /// amplifier gain, and hits the lossless ceiling q0 as the gain diverges.
    #[test]
    fn advantage_is_monotonic_and_saturates_at_high_gain(
        q0 in 1.05..30.0f64,
        mu in 0.5..1.0f64,
        eta_pair in (0.01..1.0f64, 0.01..1.0f64),
        g2_pair in (0.0..5.0f64, 0.0..5.0f64),
        eta in 0.01..1.0f64,
    ) {
        let (a, b) = eta_pair;
        let (lo, hi) = (a.min(b), a.max(b));
        let g2 = g2_pair.0;
        prop_assert!(
            quantum_advantage(q0, lo, mu, g2).unwrap()
                <= quantum_advantage(q0, hi, mu, g2).unwrap() + 1e-12
        );

        let (a, b) = g2_pair;
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(
            quantum_advantage(q0, eta, mu, lo).unwrap()
                <= quantum_advantage(q0, eta, mu, hi).unwrap() + 1e-12
        );

        let ceiling = quantum_advantage(q0, eta, mu, 20.0).unwrap();
        prop_assert!((ceiling - q0).abs() <= 1e-6 * q0, "ceiling {ceiling} vs q0 {q0}");
    }
}
