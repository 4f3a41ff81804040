use modular_entropy::fock::*;
use modular_entropy::linalg::C64;
use modular_entropy::standard_subspace::{entropy, modular_data, RealSubspace};
use nalgebra::{Complex, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn random_vector(rng: &mut ChaCha8Rng, m: usize, max_norm: f64) -> DVector<C64> {
    let v = DVector::from_fn(m, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let r = rng.random_range(0.0..max_norm);
    v.scale(r / v.norm())
}

fn inner(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

#[test]
fn coherent_inner_product_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let basis = Arc::new(FockBasis::new(2, 40).unwrap());
    for _ in 0..20 {
        let (phi, psi) = (random_vector(&mut rng, 2, 1.5), random_vector(&mut rng, 2, 1.5));
        let a = coherent_vector_in(basis.clone(), &phi).unwrap();
        let b = coherent_vector_in(basis.clone(), &psi).unwrap();
        let want = inner(&phi, &psi).exp();
        let bound = (a.tail * b.tail).sqrt() + 1e-13 * want.norm().max(1.0);
        assert!((a.inner(&b) - want).norm() <= bound);
        assert!((a.norm_sq() + a.tail - phi.norm_squared().exp()).abs() < 1e-12);
    }
}

#[test]
fn weyl_on_vacuum_is_normalized_coherent_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let basis = Arc::new(FockBasis::new(2, 40).unwrap());
    for _ in 0..10 {
        let psi = random_vector(&mut rng, 2, 1.5);
        let w = weyl_apply(&psi, &TruncatedFockVector::vacuum(basis.clone())).unwrap();
        let c = coherent_vector_in(basis.clone(), &psi).unwrap();
        let want = c.scale(Complex::new((-0.5 * psi.norm_squared()).exp(), 0.0));
        let worst = (0..basis.len()).fold(0.0_f64, |m, i| m.max((w.coeffs[i] - want.coeffs[i]).norm()));
        assert!(worst < 1e-12, "{worst:e}");
    }
}

#[test]
fn weyl_action_on_coherent_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let basis = Arc::new(FockBasis::new(2, 40).unwrap());
    for _ in 0..10 {
        let (psi, phi) = (random_vector(&mut rng, 2, 1.0), random_vector(&mut rng, 2, 1.0));
        let w = weyl_apply(&psi, &coherent_vector_in(basis.clone(), &phi).unwrap()).unwrap();
        let factor = (-0.5 * psi.norm_squared() - inner(&phi, &psi)).exp();
        let want = coherent_vector_in(basis.clone(), &(&psi + &phi)).unwrap().scale(factor);
        assert!(w.distance(&want) < 1e-10, "{:e}", w.distance(&want));
    }
}

#[test]
fn weyl_relations_at_cutoff_sixty() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let basis = Arc::new(FockBasis::new(2, 60).unwrap());
    let mut probes = vec![TruncatedFockVector::vacuum(basis.clone())];
    probes.push(TruncatedFockVector::basis_state(basis.clone(), &[1, 2]).unwrap());
    probes.push(coherent_vector_in(basis.clone(), &random_vector(&mut rng, 2, 1.0)).unwrap());
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let (psi, phi) = (random_vector(&mut rng, 2, 1.0), random_vector(&mut rng, 2, 1.0));
        let phase = Complex::from_polar(1.0, inner(&psi, &phi).im);
        for v in &probes {
            let lhs = weyl_apply(&psi, &weyl_apply(&phi, v).unwrap()).unwrap();
            let rhs = weyl_apply(&(&psi + &phi), v).unwrap().scale(phase);
            worst = worst.max(lhs.distance(&rhs) / v.norm_sq().sqrt());
        }
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn weyl_is_unitary_up_to_tail() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let basis = Arc::new(FockBasis::new(3, 20).unwrap());
    for _ in 0..5 {
        let v = coherent_vector_in(basis.clone(), &random_vector(&mut rng, 3, 0.8)).unwrap();
        let w = weyl_apply(&random_vector(&mut rng, 3, 0.8), &v).unwrap();
        assert!((w.norm_sq() - v.norm_sq()).abs() <= w.tail + 1e-12 * v.norm_sq());
    }
}

#[test]
fn vacuum_expectation_values() {
    assert_eq!(vacuum_expectation(&DVector::zeros(2), 40).unwrap(), Complex::new(1.0, 0.0));
    let kf = DVector::from_vec(vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)]);
    let got = vacuum_expectation(&kf, 40).unwrap();
    assert!((got - Complex::new((-0.5f64).exp(), 0.0)).norm() < 1e-12);
}

#[test]
fn second_quantization_is_multiplicative() {
    let h = RealSubspace::thermal(0.7);
    let spec = second_quantized_modular(&h, 6).unwrap();
    let (lo, hi) = (spec.one_particle[0], spec.one_particle[1]);
    for (i, s) in spec.basis.states().iter().enumerate() {
        let want = lo.powi(s[0] as i32) * hi.powi(s[1] as i32);
        assert!((spec.eigenvalues[i] - want).abs() <= 1e-12 * want.max(1.0));
        // products of e^{±θ} are e^{θ(n₂ - n₁)}
        let k = s[1] as i32 - s[0] as i32;
        assert!((spec.eigenvalues[i].ln() - 0.7 * k as f64).abs() < 1e-9);
    }
}

#[test]
fn thermal_weights_agree_with_geometric_partition() {
    for theta in [0.5, 1.0, 2.0] {
        let spec = second_quantized_modular(&RealSubspace::thermal(theta), 60).unwrap();
        let w = thermal_weights(&spec).unwrap();
        assert!((w.partition * (1.0 - (-theta).exp()) - 1.0).abs() < 1e-10);
        assert!((w.n_bar - 1.0 / theta.exp_m1()).abs() < 1e-10);
        let h = RealSubspace::thermal(theta);
        assert!(mode_map(&h, w.n_bar).unwrap().consistency < 1e-10);
    }
}

#[test]
fn oracle_agrees_with_first_quantized_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for theta in [0.5, 1.0, 2.0] {
        let h = RealSubspace::thermal(theta);
        for _ in 0..20 {
            let phi = random_vector(&mut rng, 2, 1.0);
            let r = araki_relative_entropy_oracle(&h, &phi, 60).unwrap();
            let s = entropy(&h, &phi).unwrap();
            let dev = (r.entropy - s).abs() / s.max(1e-6);
            assert!(dev <= 1e-3, "θ = {theta}: {} vs {s}", r.entropy);
            assert!(r.entropy >= -1e-12);
        }
    }
}

#[test]
fn oracle_on_eigenvector_and_scaling() {
    let h = RealSubspace::thermal(2.0);
    let md = modular_data(&h).unwrap();
    for k in 0..2 {
        let phi = md.delta_eigenvectors.column(k).into_owned();
        let one = araki_relative_entropy_oracle(&h, &phi, 60).unwrap().entropy;
        let s1 = entropy(&h, &phi).unwrap();
        assert!((one - s1).abs() <= 1e-3 * s1);
        let two = araki_relative_entropy_oracle(&h, &phi.scale(2.0), 60).unwrap().entropy;
        let s2 = entropy(&h, &phi.scale(2.0)).unwrap();
        assert!((two / one - 4.0).abs() < 4e-3);
        assert!((s2 / s1 - 4.0).abs() < 4e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn coherent_norm_law(re0 in -1.2f64..1.2, im0 in -1.2f64..1.2, re1 in -1.2f64..1.2) {
        let phi = DVector::from_vec(vec![Complex::new(re0, im0), Complex::new(re1, 0.0)]);
        let c = coherent_vector(&phi, 40).unwrap();
        let want = phi.norm_squared().exp();
        prop_assert!((c.norm_sq() - want).abs() <= c.tail + 1e-12 * want);
    }
}
