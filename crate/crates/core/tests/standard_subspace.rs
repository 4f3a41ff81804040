use modular_entropy::linalg::{realify_matrix, C64};
use modular_entropy::standard_subspace::*;
use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| {
        Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

fn subspaces(seed: u64, count: usize) -> Vec<RealSubspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=8);
            random_standard(&mut rng, n, RandomStandardOptions::default())
        })
        .collect()
}

#[test]
fn modular_identities_on_random_subspaces() {
    for h in subspaces(101, 100) {
        let md = modular_data(&h).unwrap();
        assert!(md.involution_residual() <= 1e-10);
        assert!(md.inversion_residual() <= 1e-10);
        assert!(md.polar_residual() <= 1e-10);
        for v in h.complex_basis() {
            assert!((md.s.apply(&v) - &v).norm() <= 1e-10);
        }
        for t in [0.1, 1.0, 10.0] {
            let moved = unitary_transport(&md.delta_it(t), &h).unwrap();
            assert!(moved.distance(&h) <= 1e-8, "t = {t}");
        }
    }
}

#[test]
fn delta_is_tomita_adjoint_times_tomita() {
    // Δ = S*S with S* the Re⟨·,·⟩-transpose of the realified map
    for h in subspaces(102, 30) {
        let md = modular_data(&h).unwrap();
        let s = &md.s.matrix;
        let ss = s.transpose() * s;
        assert!(max_abs(&(ss - realify_matrix(&md.delta()))) <= 1e-9 * md.condition_number());
    }
}

#[test]
fn thermal_pair_from_its_tomita_operator() {
    let lambda = 2f64.exp();
    let smat = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new(0.0, 0.0),
            Complex::new(lambda.powf(-0.5), 0.0),
            Complex::new(lambda.sqrt(), 0.0),
            Complex::new(0.0, 0.0),
        ],
    );
    let s = RealLinearMap::anti_linear(&smat);
    let h = RealSubspace::fixed_points(&s);
    assert_eq!(h.real_dim(), 2);
    let md = modular_data(&h).unwrap();
    assert!(max_abs(&(&md.s.matrix - &s.matrix)) < 1e-12);
    // Δ = S*S for the 4×4 realification, from an eigensolver that never sees H
    let dm = s.matrix.transpose() * &s.matrix;
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] - (-2f64).exp()).abs() < 1e-12 && (ev[1] - (-2f64).exp()).abs() < 1e-12);
    assert!((ev[2] - 2f64.exp()).abs() < 1e-11 && (ev[3] - 2f64.exp()).abs() < 1e-11);
    assert!((md.delta_eigenvalues[0] - (-2f64).exp()).abs() < 1e-12);
    assert!((md.delta_eigenvalues[1] - 2f64.exp()).abs() < 1e-11);
}

#[test]
fn symplectic_complement_is_j_of_h() {
    let h = RealSubspace::thermal(1.0);
    let md = modular_data(&h).unwrap();
    let jh = unitary_transport(&DMatrix::identity(2, 2), &h).unwrap();
    let jh_span: Vec<DVector<C64>> = jh.complex_basis().iter().map(|v| md.j.apply(v)).collect();
    let jh = RealSubspace::from_span(h.ambient(), jh_span).unwrap();
    assert!(jh.distance(&symplectic_complement(&h)) < 1e-10);
}

#[test]
fn abelian_part_is_fixed_space_of_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..40 {
        let n = rng.random_range(1..=7);
        let h = random_standard(&mut rng, n, RandomStandardOptions::default());
        let dec = factorial_decomposition(&h).unwrap();
        let commutant = intersection(&h, &symplectic_complement(&h));
        assert!(dec.abelian.distance(&commutant) <= 1e-8);
        if let Some(d) = dec.kernel_distance {
            assert!(d <= 1e-8);
        }
        assert_eq!(dec.abelian.real_dim() + dec.factorial.real_dim(), h.real_dim());
        if n % 2 == 1 {
            assert!(dec.abelian.real_dim() >= 1);
        }
    }
}

#[test]
fn abelian_entropy_examples() {
    let r = RealSubspace::real_points(1);
    let i = DVector::from_element(1, Complex::new(0.0, 1.0));
    assert!((abelian_entropy(&r, &i).unwrap() - 2.0).abs() < 1e-14);
    let d = DVector::from_element(1, Complex::new(1.0, 1.0) / 2f64.sqrt());
    assert!((abelian_entropy(&r, &d).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn thermal_entropy_by_hand() {
    // In the eigenbasis of Δ = diag(e^θ, e^{-θ}), H is spanned by u = (a, b̄)-type vectors;
    // the factorial entropy then reduces to θ(|c₋|² - |c₊|²)-weighted terms computed below.
    let theta = 1.3;
    let h = RealSubspace::thermal(theta);
    let md = modular_data(&h).unwrap();
    let p = cutting_projection(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..10 {
        let phi = random_vector(&mut rng, 2);
        let ild = md.log_delta().map(|z| z * Complex::new(0.0, 1.0)) * &phi;
        let hand = h.ambient().im_inner(&phi, &p.apply(&ild));
        assert!((entropy(&h, &phi).unwrap() - hand).abs() < 1e-10);
        assert!(hand >= -1e-10);
    }
}

#[test]
fn entropy_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let h = random_standard(&mut rng, n, RandomStandardOptions::default());
        let phi = random_vector(&mut rng, n);
        let s_h = entropy(&h, &phi).unwrap();
        assert!(s_h >= -1e-10);
        let basis = h.complex_basis();
        let k = rng.random_range(0..basis.len());
        let sub = RealSubspace::from_span(h.ambient(), basis[..k].to_vec()).unwrap();
        let s_k = entropy(&sub, &phi).unwrap();
        assert!(s_k >= -1e-10 && s_k <= s_h + 1e-9, "{s_k} vs {s_h}");
        let u = random_unitary(&mut rng, n);
        let uh = unitary_transport(&u, &h).unwrap();
        assert!((entropy(&uh, &(&u * &phi)).unwrap() - s_h).abs() <= 1e-9 * (1.0 + s_h));
        let m = rng.random_range(1..=4);
        let h2 = random_standard(&mut rng, m, RandomStandardOptions::default());
        let phi2 = random_vector(&mut rng, m);
        let sum = entropy(&direct_sum(&h, &h2), &direct_sum_vector(&phi, &phi2)).unwrap();
        let parts = s_h + entropy(&h2, &phi2).unwrap();
        assert!((sum - parts).abs() <= 1e-9 * (1.0 + parts));
    }
}

#[test]
fn entropy_on_h_and_commutant() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..20 {
        let n = 2 * rng.random_range(1..=3);
        let h = random_standard(&mut rng, n, RandomStandardOptions::default());
        for v in symplectic_complement(&h).complex_basis() {
            assert!(entropy(&h, &v).unwrap().abs() <= 1e-9);
        }
        let md = modular_data(&h).unwrap();
        for v in h.complex_basis() {
            // P fixes i logΔ h, leaving -<h, logΔ h>
            let direct = -h.ambient().inner(&v, &(md.log_delta() * &v)).re;
            assert!(direct >= -1e-12);
            assert!((entropy(&h, &v).unwrap() - direct).abs() <= 1e-9 * (1.0 + direct));
        }
    }
}

#[test]
fn finiteness_functional_single_term() {
    let h = RealSubspace::thermal(2.0);
    let md = modular_data(&h).unwrap();
    let v = md.delta_eigenvectors.column(0).into_owned();
    assert!((md.delta_eigenvalues[0] - (-2f64).exp()).abs() < 1e-12);
    assert!((finiteness_functional(&h, &v).unwrap() - 2.0 * v.norm_squared()).abs() < 1e-12);
    let w = md.delta_eigenvectors.column(1).into_owned();
    assert!(finiteness_functional(&h, &w).unwrap().abs() < 1e-12);
}

#[test]
fn direct_sum_spectrum_is_union() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let a = random_standard(&mut rng, 3, RandomStandardOptions::default());
    let b = random_standard(&mut rng, 2, RandomStandardOptions::default());
    let mut union: Vec<f64> = modular_data(&a).unwrap().delta_eigenvalues.iter().copied().collect();
    union.extend(modular_data(&b).unwrap().delta_eigenvalues.iter());
    union.sort_by(f64::total_cmp);
    let got = modular_data(&direct_sum(&a, &b)).unwrap().delta_eigenvalues;
    for (x, y) in got.iter().zip(&union) {
        assert!((x - y).abs() <= 1e-10 * (1.0 + y));
    }
}

#[test]
fn unitary_transport_keeps_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let h = RealSubspace::thermal(0.7);
    let u = random_unitary(&mut rng, 2);
    let a = modular_data(&h).unwrap().delta_eigenvalues;
    let b = modular_data(&unitary_transport(&u, &h).unwrap()).unwrap().delta_eigenvalues;
    assert!((a - b).amax() < 1e-12);
}

#[test]
fn cutting_projection_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut tested = 0;
    while tested < 30 {
        let n = 2 * rng.random_range(1..=4);
        let h = random_standard(&mut rng, n, RandomStandardOptions::default());
        let Ok(p) = cutting_projection(&h) else {
            continue;
        };
        tested += 1;
        assert!(max_abs(&(&p.matrix * &p.matrix - &p.matrix)) <= 1e-9);
        let md = modular_data(&h).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let u = realify_matrix(&md.delta_it(t));
            assert!(max_abs(&(&p.matrix * &u - &u * &p.matrix)) <= 1e-9);
        }
        let phi = random_vector(&mut rng, n);
        let rest = &phi - p.apply(&phi);
        assert!(symplectic_complement(&h).residual(&rest) <= 1e-9 * (1.0 + phi.norm()));
        assert!(h.residual(&p.apply(&phi)) <= 1e-9 * (1.0 + phi.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tomita_fixes_h_and_negates_ih(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_standard(&mut rng, n, RandomStandardOptions::default());
        let s = tomita(&h).unwrap();
        for v in h.complex_basis() {
            prop_assert!((s.apply(&v) - &v).norm() <= 1e-10 * (1.0 + v.norm()));
            let iv = v.map(|z| z * Complex::new(0.0, 1.0));
            prop_assert!((s.apply(&iv) + &iv).norm() <= 1e-10 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn entropy_is_nonnegative(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_standard(&mut rng, n, RandomStandardOptions::default());
        let phi = random_vector(&mut rng, n);
        prop_assert!(entropy(&h, &phi).unwrap() >= -1e-10);
    }
}
