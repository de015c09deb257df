mod common;

use common::*;
use entwit::detection::WiringSpec;
use entwit::linalg::{c, ComplexMatrix};
use entwit::ppt::min_partial_transpose_eigenvalue;
use entwit::states::StateFamily;
use entwit::witnesses::{random_product_state, WitnessName};
use entwit::{MultipartiteOperator, SubsystemShape};
use proptest::prelude::*;
use rand::Rng;

fn op(m: ComplexMatrix, dims: &[usize]) -> MultipartiteOperator {
    MultipartiteOperator::new(m, SubsystemShape::new(dims.to_vec()).unwrap()).unwrap()
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes: Vec<usize> = (0..3).map(|_| r.random_range(2..=3)).collect();
        let a = random_matrix(&mut r, sizes[0]);
        let b = random_matrix(&mut r, sizes[1]);
        let d = random_matrix(&mut r, sizes[2]);
        prop_assert!(close(&a.kron(&b).kron(&d), &a.kron(&b.kron(&d)), 1e-12));
    }

    #[test]
    fn trace_is_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, 3);
        let b = random_matrix(&mut r, 4);
        prop_assert!((a.kron(&b).trace() - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, 16);
        let (vals, vecs) = a.hermitian_eig().unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let diag = ComplexMatrix::from_diagonal(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        let back = vecs.matmul(&diag).unwrap().matmul(&vecs.adjoint()).unwrap();
        prop_assert!(close(&back, &a, 1e-10));
        let gram = vecs.adjoint().matmul(&vecs).unwrap();
        prop_assert!(close(&gram, &ComplexMatrix::identity(16), 1e-10));
    }

    #[test]
    fn inverse_is_an_involution(seed in any::<u64>(), n in 2usize..8) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n).add(&ComplexMatrix::identity(n).scale_real(3.0)).unwrap();
        let inv = a.inverse().unwrap();
        prop_assert!(close(&inv.inverse().unwrap(), &a, 1e-10));
        prop_assert!(close(&a.matmul(&inv).unwrap(), &ComplexMatrix::identity(n), 1e-10));
    }

    #[test]
    fn permutations_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let n = dims.len();
        let m = op(random_matrix(&mut r, dims.iter().product()), &dims);
        let p = random_permutation(&mut r, n);
        let q = random_permutation(&mut r, n);
        let qp: Vec<usize> = (0..n).map(|k| q[p[k]]).collect();
        let two_steps = m.permute_subsystems(&p).unwrap().permute_subsystems(&q).unwrap();
        let one_step = m.permute_subsystems(&qp).unwrap();
        prop_assert_eq!(two_steps.shape(), one_step.shape());
        prop_assert!(close(two_steps.matrix(), one_step.matrix(), 0.0));
        let inv: Vec<usize> = (0..n).map(|k| p.iter().position(|&x| x == k).unwrap()).collect();
        let back = m.permute_subsystems(&p).unwrap().permute_subsystems(&inv).unwrap();
        prop_assert!(close(back.matrix(), m.matrix(), 0.0));
    }

    #[test]
    fn embed_then_trace_recovers_local(seed in any::<u64>()) {
        let mut r = rng(seed);
        let full = random_dims(&mut r, 4);
        let mut slots = random_subset(&mut r, full.len());
        if slots.is_empty() {
            slots.push(0);
        }
        let local_dims: Vec<usize> = slots.iter().map(|&s| full[s]).collect();
        let x = op(random_matrix(&mut r, local_dims.iter().product()), &local_dims);
        let full_shape = SubsystemShape::new(full.clone()).unwrap();
        let embedded = x.embed(&slots, &full_shape).unwrap();
        let rest: Vec<usize> = (0..full.len()).filter(|s| !slots.contains(s)).collect();
        if rest.is_empty() {
            prop_assert!(close(embedded.matrix(), x.matrix(), 0.0));
        } else {
            let weight: usize = rest.iter().map(|&s| full[s]).product();
            let reduced = embedded.partial_trace(&rest).unwrap();
            prop_assert!(close(reduced.matrix(), &x.matrix().scale_real(weight as f64), 1e-12));
        }
    }

    #[test]
    fn partial_transposes_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let m = op(random_matrix(&mut r, dims.iter().product()), &dims);
        let s1 = random_subset(&mut r, dims.len());
        let s2 = random_subset(&mut r, dims.len());
        let a = m.partial_transpose(&s1).unwrap().partial_transpose(&s2).unwrap();
        let b = m.partial_transpose(&s2).unwrap().partial_transpose(&s1).unwrap();
        let sym: Vec<usize> = (0..dims.len()).filter(|k| s1.contains(k) != s2.contains(k)).collect();
        let d = m.partial_transpose(&sym).unwrap();
        prop_assert!(close(a.matrix(), b.matrix(), 0.0));
        prop_assert!(close(a.matrix(), d.matrix(), 0.0));
    }

    #[test]
    fn tensor_power_trace(seed in any::<u64>(), k in 1usize..4) {
        let mut r = rng(seed);
        let m = op(random_matrix(&mut r, 4), &[2, 2]);
        let t = m.matrix().trace();
        let p = m.tensor_power(k).unwrap();
        prop_assert_eq!(p.num_slots(), 2 * k);
        prop_assert!((p.matrix().trace() - t.powu(k as u32)).norm() < 1e-12);
    }

    #[test]
    fn matches_index_loop_oracles(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let n = dims.len();
        let raw = random_matrix(&mut r, dims.iter().product());
        let m = op(raw.clone(), &dims);

        let perm = random_permutation(&mut r, n);
        prop_assert!(close(m.permute_subsystems(&perm).unwrap().matrix(), &permute_oracle(&raw, &dims, &perm), 1e-10));

        let pt = random_subset(&mut r, n);
        prop_assert!(close(m.partial_transpose(&pt).unwrap().matrix(), &partial_transpose_oracle(&raw, &dims, &pt), 1e-10));

        let mut traced = random_subset(&mut r, n);
        if traced.len() == n {
            traced.pop();
        }
        prop_assert!(close(m.partial_trace(&traced).unwrap().matrix(), &partial_trace_oracle(&raw, &dims, &traced), 1e-10));

        let order = random_permutation(&mut r, n);
        let k = r.random_range(1..=n);
        let slots = &order[..k];
        let local_dims: Vec<usize> = slots.iter().map(|&s| dims[s]).collect();
        let local = random_matrix(&mut r, local_dims.iter().product());
        let e = op(local.clone(), &local_dims).embed(slots, m.shape()).unwrap();
        prop_assert!(close(e.matrix(), &embed_oracle(&local, &local_dims, slots, &dims), 1e-10));
    }

    #[test]
    fn complementary_transposes_share_spectrum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 3);
        let rho = op(random_density(&mut r, dims.iter().product()), &dims);
        let s = random_subset(&mut r, dims.len());
        let comp: Vec<usize> = (0..dims.len()).filter(|k| !s.contains(k)).collect();
        let a = rho.partial_transpose(&s).unwrap().matrix().eigenvalues().unwrap();
        let b = rho.partial_transpose(&comp).unwrap().matrix().eigenvalues().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn copy_relabeling_is_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = op(random_density(&mut r, 4), &[2, 2]);
        let w = cyclic();
        let perm = random_permutation(&mut r, 3);
        let relabeled = w.relabel_copies(&perm).unwrap();
        prop_assert!((w.expectation(&rho).unwrap() - relabeled.expectation(&rho).unwrap()).abs() < 1e-12);
    }
}

fn cyclic() -> WiringSpec {
    WiringSpec::from_catalog(
        3,
        SubsystemShape::qubits(2),
        &[
            (WitnessName::W1, None, &["A1", "B2"]),
            (WitnessName::W2, None, &["A2", "B3"]),
            (WitnessName::W3, None, &["B1", "A3"]),
        ],
    )
    .unwrap()
}

fn witness_wirings() -> Vec<WiringSpec> {
    let two = SubsystemShape::qubits(2);
    let three = SubsystemShape::qubits(3);
    vec![
        WiringSpec::from_catalog(
            2,
            two.clone(),
            &[
                (WitnessName::W, None, &["A1", "B2"]),
                (WitnessName::V, None, &["B1", "A2"]),
            ],
        )
        .unwrap(),
        WiringSpec::from_catalog(
            2,
            two,
            &[
                (WitnessName::W1, None, &["A1", "B2"]),
                (WitnessName::W3, None, &["B1", "A2"]),
            ],
        )
        .unwrap(),
        cyclic(),
        WiringSpec::from_catalog(
            2,
            three.clone(),
            &[
                (WitnessName::W4, None, &["A1", "B2"]),
                (WitnessName::W3, None, &["B1", "C2"]),
                (WitnessName::W3, None, &["C1", "A2"]),
            ],
        )
        .unwrap(),
        WiringSpec::from_catalog(1, three, &[(WitnessName::WW1, None, &["A1", "B1", "C1"])]).unwrap(),
    ]
}

#[test]
fn wirings_are_nonnegative_on_product_states() {
    for (i, w) in witness_wirings().iter().enumerate() {
        let op = w.assemble().unwrap();
        let mut r = rng(1000 + i as u64);
        let mut min = f64::INFINITY;
        let full = w.full_shape();
        for _ in 0..10_000 {
            let psi = random_product_state(&mut r, w.base_shape());
            min = min.min(w.expectation_pure_with(&op, &psi).unwrap());
            // copies need not be identical for the bound to hold
            let across = random_product_state(&mut r, &full);
            min = min.min(op.matrix().quadratic_form(&across).unwrap().re);
        }
        assert!(min >= -1e-9, "{}: {min}", w.label());
    }
}

#[test]
fn assemble_multiplies_traces() {
    for w in witness_wirings() {
        let total = w.assemble().unwrap().matrix().trace();
        let mut expected = c(1.0, 0.0);
        let mut covered = 0;
        for a in w.assignments() {
            expected *= a.operator.matrix().trace();
            covered += a.slots.len();
        }
        let idle = w.full_shape().len() - covered;
        expected *= 2f64.powi(idle as i32);
        assert!((total - expected).norm() < 1e-9, "{}", w.label());
    }
}

#[test]
fn separable_states_pass_ppt() {
    let mut r = rng(77);
    for _ in 0..1000 {
        let terms = r.random_range(1..=4);
        let mut rho = ComplexMatrix::zeros(4);
        let mut weight = 0.0;
        for _ in 0..terms {
            let p: f64 = r.random_range(0.05..1.0);
            let a = random_density(&mut r, 2);
            let b = random_density(&mut r, 2);
            rho = rho.add(&a.kron(&b).scale_real(p)).unwrap();
            weight += p;
        }
        let rho = op(rho.scale_real(1.0 / weight), &[2, 2]);
        assert!(min_partial_transpose_eigenvalue(&rho, &[1]).unwrap() >= -1e-9);
        assert!(min_partial_transpose_eigenvalue(&rho, &[0]).unwrap() >= -1e-9);
    }
}

#[test]
fn families_are_states_on_the_grid() {
    for family in StateFamily::ALL {
        for x in entwit::detection::uniform_grid(0.0, 1.0, 101) {
            family.state(x).unwrap().validate_density(1e-10).unwrap();
        }
        assert!(family.state(-0.01).is_err());
        assert!(family.state(1.01).is_err());
    }
}
