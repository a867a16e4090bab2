use num_complex::Complex64;
use proptest::prelude::*;

use qridge_core::alpha::AlphaGrid;
use qridge_core::linalg::{argmin_prefer_larger, filter_factor, svd, RealMatrix};
use qridge_core::qprimitives::{
    apply_qft, density_exponential, encode_clock, inverse_phase_estimation, phase_estimation, qft,
    PhaseEstimationConfig,
};
use qridge_core::qstate::{hadamard, ry_amplitude, CMatrix, DensityMatrix, QubitRegisterLayout, StateVector};

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

fn state(layout: QubitRegisterLayout, raw: &[(f64, f64)]) -> Option<StateVector> {
    let amps: Vec<Complex64> = raw.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    StateVector::new(layout, amps).ok()
}

fn layout() -> QubitRegisterLayout {
    QubitRegisterLayout::new(&[("a", 2), ("b", 1), ("c", 2)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(raw in amplitudes(32), f in 0.0f64..1.0) {
        let Some(s) = state(layout(), &raw) else { return Ok(()) };
        let out = s
            .apply_unitary(&hadamard(), &["b"]).unwrap()
            .apply_unitary(&qft(2).unwrap(), &["c"]).unwrap()
            .apply_controlled(&ry_amplitude(f), ("a", 1), &["b"]).unwrap()
            .apply_controlled_swap(("b", 0), "a", "c").unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
        let back = apply_qft(&apply_qft(&out, "a", false).unwrap(), "a", true).unwrap();
        for (x, y) in back.amplitudes().iter().zip(out.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn reduced_states_are_valid(raw in amplitudes(32)) {
        let Some(s) = state(layout(), &raw) else { return Ok(()) };
        for keep in ["a", "b", "c"] {
            let rho = s.partial_trace(keep).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
            prop_assert!(rho.min_eigenvalue().unwrap() >= -1e-10);
            prop_assert!(rho.purity() <= 1.0 + 1e-12);
        }
        let total: f64 = s.marginal("c").unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_estimation_round_trip(raw in amplitudes(2), w in 0.05f64..0.95, bits in 2usize..6) {
        let Some(target) = state(QubitRegisterLayout::new(&[("t", 1)]).unwrap(), &raw) else { return Ok(()) };
        let rho = RealMatrix::diag(&[w.sqrt(), (1.0 - w).sqrt()]);
        let dm = DensityMatrix::new(CMatrix::from_real(&rho.matmul(&rho).unwrap())).unwrap();
        let pe = PhaseEstimationConfig::with_bits(bits);
        let u = density_exponential(&dm, pe.evolution_time, &pe).unwrap().unitary;
        let clocked = target.with_register("clock", bits).unwrap();
        let estimated = phase_estimation(&clocked, &u, "t", "clock").unwrap();
        prop_assert!((estimated.norm_sqr() - 1.0).abs() <= 1e-10);
        let released = inverse_phase_estimation(&estimated, &u, "t", "clock", None).unwrap();
        prop_assert!(released.residual() <= 1e-10);
        let overlap = released.state.inner_product(&target).unwrap();
        prop_assert!((overlap.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn clock_binning_is_nearest(l in 0.0f64..1.0, bits in 1usize..10) {
        let j = encode_clock(l, bits, std::f64::consts::PI);
        let exact = l * (1usize << (bits - 1)) as f64;
        prop_assert!((j as f64 - exact).abs() <= 0.5 + 1e-12 || j == 0);
    }

    #[test]
    fn filter_decreases_in_alpha(l in 1e-3f64..1.0, a in 0.0f64..10.0, d in 1e-3f64..1.0) {
        prop_assert!(filter_factor(l, a + d) < filter_factor(l, a));
    }

    #[test]
    fn grids_increase(lo in 0.0f64..1.0, span in 1e-3f64..5.0, n in 1usize..20) {
        let g = AlphaGrid::linear(lo, lo + span, n).unwrap();
        prop_assert_eq!(g.values.len(), n);
        prop_assert!(g.values.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(g.values.iter().all(|&a| a >= 0.0));
        prop_assert_eq!(g.values[0], lo);
    }

    #[test]
    fn argmin_ties_go_to_larger_alpha(levels in prop::collection::vec(0u8..4, 1..12)) {
        let losses: Vec<f64> = levels.iter().map(|&l| l as f64 * 0.1).collect();
        let alphas: Vec<f64> = (0..losses.len()).map(|i| i as f64).collect();
        let best = argmin_prefer_larger(&alphas, &losses).unwrap();
        let min = losses.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(losses[best], min);
        prop_assert!(losses[best + 1..].iter().all(|&l| l > min));
        let mut tied = losses.clone();
        tied.push(min);
        let mut wide = alphas.clone();
        wide.push(alphas.len() as f64);
        prop_assert_eq!(argmin_prefer_larger(&wide, &tied), Some(losses.len()));
    }

    #[test]
    fn svd_reconstructs(data in prop::collection::vec(-2.0f64..2.0, 12)) {
        let x = RealMatrix::new(4, 3, data).unwrap();
        prop_assume!(!x.is_zero());
        let s = svd(&x, 1e-12).unwrap();
        let r = s.reconstruct();
        for (a, b) in r.as_slice().iter().zip(x.as_slice()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let total: f64 = s.normalized_spectrum().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
