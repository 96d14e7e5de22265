use num_complex::Complex64;
use proptest::prelude::*;

use geomeas::ghz::{
    build_state, deltoid_margin, extract_fidelities, ghz_coefficients, product_coefficient_bounds,
    twirl,
};
use geomeas::measure::{measure_via_fidelity_obs4, measure_via_legendre_2d, objective_obs1};
use geomeas::quantum::{
    density_from_mixture, ghz_basis, hermitian_deviation, matrix_sqrt_psd, tensor_product,
    uhlmann_fidelity, CMatrix,
};
use geomeas::sampling::{haar_qubit, haar_state, random_density_matrix, seeded_rng};
use geomeas::{eval_measure, Decomposition, GhzParams, SeparabilityClass};

fn triangle() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(u, v)| if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) })
}

fn measure(n: usize, k: usize, (a, b): (f64, f64)) -> f64 {
    let params = GhzParams::new(n, a, b).unwrap();
    eval_measure(params, SeparabilityClass::new(k, n).unwrap()).unwrap().value
}

fn classes() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((3, 2)), Just((3, 3)), Just((4, 2)), Just((4, 3)), Just((4, 4)), Just((5, 5))]
}

fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convexity((n, k) in classes(), p in triangle(), q in triangle(), l in prop::sample::select(vec![0.25, 0.5, 0.75])) {
        let mid = (l * p.0 + (1.0 - l) * q.0, l * p.1 + (1.0 - l) * q.1);
        let lhs = measure(n, k, mid);
        let rhs = l * measure(n, k, p) + (1.0 - l) * measure(n, k, q);
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn swap_symmetry((n, k) in classes(), p in triangle()) {
        prop_assert!((measure(n, k, p) - measure(n, k, (p.1, p.0))).abs() < 1e-12);
    }

    #[test]
    fn class_monotonicity(p in triangle()) {
        let e: Vec<f64> = (2..=5).map(|k| measure(5, k, p)).collect();
        for w in e.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-9, "{e:?}");
        }
    }

    #[test]
    fn zero_set((n, k) in classes(), p in triangle()) {
        let (a, b) = if p.0 >= p.1 { p } else { (p.1, p.0) };
        let margin = deltoid_margin(a, b, k);
        let e = measure(n, k, p);
        if margin >= 0.0 {
            prop_assert!(e < 1e-9, "inside but E = {e}");
        } else if margin < -0.02 {
            prop_assert!(e > 1e-6, "outside but E = {e}");
        }
    }

    #[test]
    fn general_objective_reduces_at_k3(mu in 0.0..0.999f64, p in triangle()) {
        let (a, b) = if p.0 >= p.1 { p } else { (p.1, p.0) };
        let root = (mu * mu - mu + 1.0).sqrt();
        let reference = 0.5 * (1.0 + mu * (2.0 * a - 1.0) - root + b * mu * (mu + root) / (mu - 1.0));
        let obj = objective_obs1(mu, a, b, 3).unwrap();
        prop_assert!((obj - reference).abs() < 1e-12 * (1.0 + reference.abs()));
    }

    #[test]
    fn round_trip_fidelities(n in 2usize..=6, p in triangle()) {
        let rho = build_state(GhzParams::new(n, p.0, p.1).unwrap()).unwrap();
        let (a, b) = extract_fidelities(&rho).unwrap();
        prop_assert!((a - p.0).abs() < 1e-12 && (b - p.1).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn twirl_is_idempotent_and_trace_preserving(seed in any::<u64>(), rank in 1usize..=8) {
        let rho = random_density_matrix(8, rank, &mut seeded_rng(seed)).unwrap();
        let t = twirl(&rho).unwrap();
        let tt = twirl(&t).unwrap();
        prop_assert!((t.matrix() - tt.matrix()).norm() < 1e-12);
        prop_assert!((t.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(t.eigenvalues().iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn fidelity_monotone_under_twirl(seed in any::<u64>(), r1 in 1usize..=8, r2 in 1usize..=8) {
        let mut rng = seeded_rng(seed);
        let rho = random_density_matrix(8, r1, &mut rng).unwrap();
        let sigma = random_density_matrix(8, r2, &mut rng).unwrap();
        let before = uhlmann_fidelity(&rho, &sigma).unwrap();
        let after = uhlmann_fidelity(&twirl(&rho).unwrap(), &twirl(&sigma).unwrap()).unwrap();
        prop_assert!(after >= before - 1e-9, "{after} < {before}");
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), dim in 1usize..=16, rank in 1usize..=16) {
        let rho = random_density_matrix(dim, rank.min(dim), &mut seeded_rng(seed)).unwrap();
        let m = rho.matrix() * Complex64::from(dim as f64);
        let s = matrix_sqrt_psd(&m).unwrap();
        prop_assert!((&s * &s - &m).norm() < 1e-9);
    }

    #[test]
    fn mixtures_are_density_matrices(seed in any::<u64>(), count in 1usize..=12) {
        let mut rng = seeded_rng(seed);
        let raw: Vec<f64> = (0..count).map(|i| 1.0 + i as f64).collect();
        let total: f64 = raw.iter().sum();
        let elements = raw.iter().map(|w| (w / total, haar_state(8, &mut rng))).collect();
        let dec = Decomposition::new(elements).unwrap();
        let rho = density_from_mixture(&dec).unwrap();
        prop_assert!(hermitian_deviation(rho.matrix()) < 1e-12);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_states_inside_deltoid(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let phi = tensor_product(&[haar_qubit(&mut rng), haar_qubit(&mut rng), haar_qubit(&mut rng)]).unwrap();
        let (a, b) = ghz_coefficients(&phi).unwrap();
        prop_assert!(product_coefficient_bounds(a, b, 3));
    }

    #[test]
    fn cross_method_three_qubits(p in triangle()) {
        let params = GhzParams::new(3, p.0, p.1).unwrap();
        let cls = SeparabilityClass::full(3).unwrap();
        let e = eval_measure(params, cls).unwrap().value;
        let l = measure_via_legendre_2d(params, cls, 100).unwrap().value;
        prop_assert!((e - l).abs() < 1e-6, "{e} vs {l}");
        let (a, b) = if p.0 >= p.1 { p } else { (p.1, p.0) };
        if deltoid_margin(a, b, 3) < -1e-9 {
            let f = measure_via_fidelity_obs4(params).unwrap().value;
            prop_assert!((e - f).abs() < 1e-8, "{e} vs {f}");
        }
    }
}

#[test]
fn ghz_basis_is_complete() {
    for n in 2..=5 {
        let basis = ghz_basis(n).unwrap();
        let dim = 1 << n;
        let sum = basis.iter().fold(CMatrix::zeros(dim, dim), |acc, s| acc + s.projector());
        assert!((sum - identity(dim)).norm() < 1e-12, "n={n}");
    }
}
