use modular_entropy::fock::vacuum_expectation;
use modular_entropy::linalg::C64;
use modular_entropy::one_particle::*;
use modular_entropy::standard_subspace::{modular_data, RealSubspace};
use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gram(s: &OneParticleStructure) -> DMatrix<C64> {
    s.kappa.transpose() * s.kappa.map(|z| z.conj())
}

#[test]
fn axioms_on_random_dominated_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = rng.random_range(1..=10);
        let d = random_dominated(&mut rng, m);
        let s = build_one_particle(&d).unwrap();
        let (re, im) = s.gram_residuals(&d);
        let scale = d.mu.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        assert!(re <= 1e-10 * scale && im <= 1e-10 * scale, "m = {m}: {re:e} {im:e}");
        assert_eq!(s.cyclic_dim(), 2 * s.rank());
    }
}

#[test]
fn eigensolver_orderings_give_equal_gram_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let m = rng.random_range(1..=10);
        let d = random_dominated(&mut rng, m);
        let a = build_one_particle_with(&d, EigenOrder::Ascending).unwrap();
        let b = build_one_particle_with(&d, EigenOrder::Descending).unwrap();
        let diff = (gram(&a) - gram(&b)).iter().fold(0.0_f64, |x, z| x.max(z.norm()));
        assert!(diff < 1e-10);
        if a.rank() > 1 {
            assert!((&a.kappa - &b.kappa).iter().any(|z| z.norm() > 1e-6));
        }
    }
}

#[test]
fn thermal_spectrum_for_three_temperatures() {
    for theta in [0.5, 1.0, 2.0] {
        let t = thermal_mode(1.7, theta / 1.7).unwrap();
        let s = build_one_particle(&t.data).unwrap();
        let md = modular_data(&local_subspace(&s, &[0, 1])).unwrap();
        assert!((md.delta_eigenvalues[0] - (-theta).exp()).abs() < 1e-8);
        assert!((md.delta_eigenvalues[1] - theta.exp()).abs() < 1e-8);
    }
}

#[test]
fn modular_flow_is_rescaled_dynamics() {
    let t = thermal_mode(1.3, 0.9).unwrap();
    let s = build_one_particle(&t.data).unwrap();
    let md = modular_data(&local_subspace(&s, &[0, 1])).unwrap();
    for sv in [0.1, 0.5] {
        let flow = md.delta_it(-sv);
        for j in 0..2 {
            let f = DVector::from_fn(2, |i, _| if i == j { 1.0 } else { 0.0 });
            let lhs = &flow * s.apply(&f);
            let rhs = s.apply(&(t.dynamics(t.beta * sv) * &f));
            assert!((lhs - rhs).norm() < 1e-8, "s = {sv}");
        }
    }
}

#[test]
fn low_temperature_approaches_vacuum_rank() {
    let cold = build_one_particle(&thermal_mode(1.0, 40.0).unwrap().data).unwrap();
    assert_eq!(cold.rank(), 1);
    let warm = build_one_particle(&thermal_mode(1.0, 2.0).unwrap().data).unwrap();
    assert_eq!(warm.rank(), 2);
    assert!(warm.kernel_eigenvalues[0] > 1e-2);
}

#[test]
fn quasifree_matches_fock_vacuum() {
    let t = thermal_mode(1.0, 1.0).unwrap();
    let s = build_one_particle(&t.data).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let f = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
        let q = quasifree_expectation(&t.data, &f);
        let w = vacuum_expectation(&s.apply(&f), 60).unwrap();
        assert!((w - Complex::new(q, 0.0)).norm() < 1e-8, "{w} vs {q}");
    }
}

#[test]
fn local_subspaces_isotony_and_commutation() {
    let sigma = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.5, 0.0, 0.0, //
            -0.5, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.3, //
            0.0, 0.0, -0.3, 0.0,
        ],
    );
    let mut mu = DMatrix::identity(4, 4);
    mu[(0, 2)] = 0.2;
    mu[(2, 0)] = 0.2;
    let d = SymplecticData::new(sigma, mu).unwrap();
    let s = build_one_particle(&d).unwrap();
    let full = local_subspace(&s, &[0, 1, 2, 3]);
    assert_eq!(full.real_dim(), 4);
    assert_eq!(local_subspace(&s, &[]).real_dim(), 0);
    let small = local_subspace(&s, &[0]);
    let big = local_subspace(&s, &[0, 1]);
    for v in small.complex_basis() {
        assert!(big.contains(&v, 1e-10));
    }
    let other = local_subspace(&s, &[2, 3]);
    assert!(cross_symplectic_defect(&big, &other) <= 1e-12);
    assert!(cross_symplectic_defect(&big, &big) > 0.1);
}

#[test]
fn vacuum_structure_has_one_complex_dimension() {
    let s = build_one_particle(&vacuum_mode()).unwrap();
    let h: RealSubspace = local_subspace(&s, &[0, 1]);
    assert_eq!(h.real_dim(), 2);
    assert_eq!(h.complex_span().real_dim(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn isotony_for_random_masks(seed in any::<u64>(), bits in 0u16..1024, extra in 0u16..1024) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_dominated(&mut rng, 10);
        let s = build_one_particle(&d).unwrap();
        let small: Vec<usize> = (0..10).filter(|j| bits >> j & 1 == 1).collect();
        let big: Vec<usize> = (0..10).filter(|j| (bits | extra) >> j & 1 == 1).collect();
        let (hs, hb) = (local_subspace(&s, &small), local_subspace(&s, &big));
        for v in hs.complex_basis() {
            prop_assert!(hb.residual(&v) < 1e-9);
        }
    }
}
