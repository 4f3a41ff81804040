use super::{
    intersection, require_standard, symplectic_complement, RealLinearMap, RealSubspace,
    CONDITION_CAP, EIGENVALUE_ONE_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{
    complexify_matrix, mul_i, conjugation, max_abs, null_space, orthogonal_complement,
    realify_columns, realify_matrix, HermitianEigen, C64,
};
use nalgebra::{Complex, DMatrix};

/// Singular values of the symplectic Gram matrix below this count as zero.
/// A factorial block with `Δ`-eigenvalue `e^θ` contributes `tanh(θ/2)`.
pub(crate) const ABELIAN_TOL: f64 = 0.5 * EIGENVALUE_ONE_TOL;

/// The Tomita operator `S(h + ik) = h - ik`, realified.
pub fn tomita(h: &RealSubspace) -> Result<RealLinearMap> {
    require_standard(h)?;
    let n = h.ambient().n;
    let b = h.basis();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (2 * n, n)).copy_from(b);
    m.view_mut((0, n), (2 * n, n)).copy_from(&mul_i(b));
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericallySingular("basis of H + iH is not invertible".into()))?;
    let s = m * conjugation(n) * inv;
    Ok(RealLinearMap {
        matrix: s,
        linearity: super::Linearity::AntiLinear,
    })
}

/// Spectral data of `Δ = S*S` together with `J = SΔ^{-1/2}`.
#[derive(Debug, Clone)]
pub struct ModularData {
    pub n: usize,
    pub delta_eigenvalues: nalgebra::DVector<f64>,
    pub delta_eigenvectors: DMatrix<C64>,
    /// `J z = U z̄`.
    pub j_unitary: DMatrix<C64>,
    pub j: RealLinearMap,
    pub s: RealLinearMap,
    eig: HermitianEigen,
}

impl ModularData {
    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn condition_number(&self) -> f64 {
        let v = &self.delta_eigenvalues;
        v[v.len() - 1] / v[0]
    }

    pub fn delta(&self) -> DMatrix<C64> {
        self.eig.real_function(|x| x)
    }

    pub fn delta_power(&self, p: f64) -> DMatrix<C64> {
        self.eig.real_function(|x| x.powf(p))
    }

    pub fn log_delta(&self) -> DMatrix<C64> {
        self.eig.real_function(f64::ln)
    }

    /// The modular unitary `Δ^{it}`.
    pub fn delta_it(&self, t: f64) -> DMatrix<C64> {
        self.eig.function(|x| Complex::from_polar(1.0, t * x.ln()))
    }

    /// Spectral projection onto eigenvalues within `tol` of `lambda`.
    pub fn spectral_projection(&self, lambda: f64, tol: f64) -> DMatrix<C64> {
        self.eig
            .real_function(|x| if (x - lambda).abs() < tol { 1.0 } else { 0.0 })
    }

    /// Projection onto the spectral subspace where `log Δ < 0`.
    pub fn negative_projection(&self) -> DMatrix<C64> {
        self.eig
            .real_function(|x| if x < 1.0 - EIGENVALUE_ONE_TOL { 1.0 } else { 0.0 })
    }

    /// `‖J² - 1‖`, entrywise maximum.
    pub fn involution_residual(&self) -> f64 {
        let d = 2 * self.n;
        max_abs(&(&self.j.matrix * &self.j.matrix - DMatrix::identity(d, d)))
    }

    /// `‖JΔJ - Δ⁻¹‖`.
    pub fn inversion_residual(&self) -> f64 {
        let jdj = &self.j.matrix * realify_matrix(&self.delta()) * &self.j.matrix;
        max_abs(&(jdj - realify_matrix(&self.delta_power(-1.0))))
    }

    /// `‖S - JΔ^{1/2}‖`.
    pub fn polar_residual(&self) -> f64 {
        let polar = &self.j.matrix * realify_matrix(&self.delta_power(0.5));
        max_abs(&(&self.s.matrix - polar))
    }
}

pub fn modular_data(h: &RealSubspace) -> Result<ModularData> {
    modular_data_with(h, CONDITION_CAP)
}

/// As [`modular_data`] with an explicit cap on the condition number of `Δ`.
pub fn modular_data_with(h: &RealSubspace, cond_cap: f64) -> Result<ModularData> {
    let s = tomita(h)?;
    let n = h.ambient().n;
    let delta_real = s.matrix.transpose() * &s.matrix;
    let eig = HermitianEigen::new(&complexify_matrix(&delta_real));
    let lo = eig.values[0];
    let hi = eig.values[n - 1];
    if lo <= 0.0 || hi / lo > cond_cap {
        return Err(Error::NumericallySingular(format!(
            "Δ spectrum [{lo:e}, {hi:e}] exceeds condition cap {cond_cap:e}"
        )));
    }
    let inv_sqrt = eig.real_function(|x| x.powf(-0.5));
    let j = &s.matrix * realify_matrix(&inv_sqrt);
    let j_unitary = complexify_matrix(&(&j * conjugation(n)));
    Ok(ModularData {
        n,
        delta_eigenvalues: eig.values.clone(),
        delta_eigenvectors: eig.vectors.clone(),
        j_unitary,
        j: RealLinearMap {
            matrix: j,
            linearity: super::Linearity::AntiLinear,
        },
        s,
        eig,
    })
}

/// Coordinates (inside `H`'s basis) of `H ∩ H'`.
fn abelian_coordinates(h: &RealSubspace) -> DMatrix<f64> {
    let b = h.basis();
    let gram = b.transpose() * mul_i(b);
    null_space(&gram, ABELIAN_TOL)
}

/// The idempotent with range `H` and kernel `H'`.
pub fn cutting_projection(h: &RealSubspace) -> Result<RealLinearMap> {
    require_standard(h)?;
    let abelian = abelian_coordinates(h);
    if abelian.ncols() > 0 {
        return Err(Error::NotFactorial(abelian.ncols()));
    }
    let n = h.ambient().n;
    let hp = symplectic_complement(h);
    let k = h.real_dim();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (2 * n, k)).copy_from(h.basis());
    m.view_mut((0, k), (2 * n, 2 * n - k)).copy_from(hp.basis());
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericallySingular("H + H' is degenerate".into()))?;
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..k {
        d[(i, i)] = 1.0;
    }
    Ok(RealLinearMap::new(m * d * inv))
}

/// `H = H_a ⊕ H_f` with `H_a = H ∩ H'`.
#[derive(Debug, Clone)]
pub struct FactorialDecomposition {
    pub abelian: RealSubspace,
    pub factorial: RealSubspace,
    /// Principal-angle distance between `H ∩ H'` and `H ∩ ker(1 - Δ)`,
    /// when the modular data could be computed.
    pub kernel_distance: Option<f64>,
}

pub fn factorial_decomposition(h: &RealSubspace) -> Result<FactorialDecomposition> {
    require_standard(h)?;
    let ambient = h.ambient();
    let b = h.basis();
    let coords = abelian_coordinates(h);
    let abelian = RealSubspace::from_orthonormal(ambient, b * &coords);
    let factorial = RealSubspace::from_orthonormal(ambient, b * orthogonal_complement(&coords));
    let kernel_distance = modular_data(h).ok().map(|md| {
        let fixed: Vec<usize> = (0..md.n)
            .filter(|&j| (md.delta_eigenvalues[j] - 1.0).abs() < EIGENVALUE_ONE_TOL)
            .collect();
        let vecs = DMatrix::from_fn(md.n, fixed.len(), |i, j| md.delta_eigenvectors[(i, fixed[j])]);
        let ivecs = vecs.map(|z| z * crate::linalg::I);
        let mut cols = DMatrix::zeros(2 * md.n, 2 * fixed.len());
        cols.view_mut((0, 0), (2 * md.n, fixed.len()))
            .copy_from(&realify_columns(&vecs));
        cols.view_mut((0, fixed.len()), (2 * md.n, fixed.len()))
            .copy_from(&realify_columns(&ivecs));
        let kernel = RealSubspace::from_real_columns(ambient, &cols);
        intersection(h, &kernel).distance(&abelian)
    });
    Ok(FactorialDecomposition {
        abelian,
        factorial,
        kernel_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{direct_sum, ComplexSpace};
    use super::*;
    use crate::linalg::{complexify_vector, symmetric_eigen_sorted};
    use nalgebra::DVector;

    /// `S(a, b) = (λ^{-1/2} b̄, λ^{1/2} ā)` realified by hand.
    fn thermal_s(lambda: f64) -> DMatrix<f64> {
        let (a, c) = (lambda.powf(-0.5), lambda.sqrt());
        // coordinates (Re a, Re b, Im a, Im b)
        DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, a, 0.0, 0.0, //
                c, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -a, //
                0.0, 0.0, -c, 0.0,
            ],
        )
    }

    #[test]
    fn real_points_give_conjugation_and_trivial_delta() {
        let h = RealSubspace::real_points(3);
        let s = tomita(&h).unwrap();
        assert!(max_abs(&(s.matrix - conjugation(3))) < 1e-14);
        let md = modular_data(&h).unwrap();
        assert!(md.delta_eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!(max_abs(&(&md.j.matrix - conjugation(3))) < 1e-14);
    }

    #[test]
    fn tomita_reproduced_from_fixed_points() {
        let lambda = 2f64.exp();
        let s = thermal_s(lambda);
        let h = RealSubspace::fixed_points(&RealLinearMap::new(s.clone()));
        assert_eq!(h.real_dim(), 2);
        let again = tomita(&h).unwrap();
        assert!(max_abs(&(again.matrix - s)) < 1e-12);
    }

    #[test]
    fn thermal_spectrum_matches_independent_eigensolve() {
        let lambda = 2f64.exp();
        let s = thermal_s(lambda);
        let (vals, _) = symmetric_eigen_sorted(&(s.transpose() * &s));
        // each complex eigenvalue appears twice in the realification
        let md = modular_data(&RealSubspace::thermal(2.0)).unwrap();
        assert!((md.delta_eigenvalues[0] - vals[0]).abs() < 1e-12);
        assert!((md.delta_eigenvalues[1] - vals[3]).abs() < 1e-10);
        assert!((md.delta_eigenvalues[0] - (-2f64).exp()).abs() < 1e-12);
        assert!((md.delta_eigenvalues[1] - 2f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn graph_of_conjugation_is_abelian() {
        // H = {(z, z̄)}
        let ambient = ComplexSpace::new(2);
        let h = RealSubspace::from_span(
            ambient,
            vec![
                DVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]),
                DVector::from_vec(vec![Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)]),
            ],
        )
        .unwrap();
        assert!(h.symplectic_defect() < 1e-14);
        let md = modular_data(&h).unwrap();
        assert!(md.delta_eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn modular_identities_on_thermal() {
        let md = modular_data(&RealSubspace::thermal(1.0)).unwrap();
        assert!(md.involution_residual() < 1e-12);
        assert!(md.inversion_residual() < 1e-12);
        assert!(md.polar_residual() < 1e-12);
    }

    #[test]
    fn j_maps_h_onto_its_complement() {
        let h = RealSubspace::thermal(1.0);
        let md = modular_data(&h).unwrap();
        let jh = RealSubspace::from_real_columns(h.ambient(), &(&md.j.matrix * h.basis()));
        assert!(jh.distance(&symplectic_complement(&h)) < 1e-10);
    }

    #[test]
    fn condition_cap_is_enforced() {
        let h = RealSubspace::thermal(15.0);
        assert!(matches!(modular_data(&h), Err(Error::NumericallySingular(_))));
        assert!(modular_data_with(&h, 1e14).is_ok());
    }

    #[test]
    fn cutting_projection_on_thermal() {
        let h = RealSubspace::thermal(2.0);
        let p = cutting_projection(&h).unwrap();
        assert!(max_abs(&(&p.matrix * &p.matrix - &p.matrix)) < 1e-12);
        for j in 0..2 {
            let b = h.basis().column(j).into_owned();
            assert!((&p.matrix * &b - &b).norm() < 1e-12);
        }
        let hp = symplectic_complement(&h);
        for j in 0..2 {
            assert!((&p.matrix * hp.basis().column(j)).norm() < 1e-12);
        }
        let phi = DVector::from_vec(vec![0.3, -1.1, 0.7, 0.25]);
        let rest = &phi - &p.matrix * &phi;
        assert!(hp.residual(&complexify_vector(&rest)) < 1e-12);
        assert!(h.residual(&complexify_vector(&(&p.matrix * &phi))) < 1e-12);
    }

    #[test]
    fn cutting_projection_commutes_with_modular_group() {
        let h = RealSubspace::thermal(1.5);
        let p = cutting_projection(&h).unwrap().matrix;
        let md = modular_data(&h).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let u = realify_matrix(&md.delta_it(t));
            assert!(max_abs(&(&p * &u - &u * &p)) < 1e-10);
        }
    }

    #[test]
    fn cutting_projection_matches_resolvent_formula() {
        let h = RealSubspace::thermal(0.8);
        let md = modular_data(&h).unwrap();
        let p = cutting_projection(&h).unwrap().matrix;
        let one_minus = realify_matrix(&md.eig.real_function(|x| 1.0 / (1.0 - x)));
        let alt = (DMatrix::identity(4, 4) + &md.s.matrix) * one_minus;
        assert!(max_abs(&(p - alt)) < 1e-10);
    }

    #[test]
    fn cutting_projection_refuses_abelian_part() {
        let h = RealSubspace::real_points(2);
        assert!(matches!(cutting_projection(&h), Err(Error::NotFactorial(2))));
    }

    #[test]
    fn factorial_split_of_direct_sum() {
        let h = direct_sum(&RealSubspace::real_points(2), &RealSubspace::thermal(1.0));
        let dec = factorial_decomposition(&h).unwrap();
        assert_eq!(dec.abelian.real_dim(), 2);
        assert_eq!(dec.factorial.real_dim(), 2);
        assert!(dec.kernel_distance.unwrap() < 1e-8);
        let ra = factorial_decomposition(&RealSubspace::real_points(3)).unwrap();
        assert_eq!((ra.abelian.real_dim(), ra.factorial.real_dim()), (3, 0));
        let th = factorial_decomposition(&RealSubspace::thermal(1.0)).unwrap();
        assert_eq!((th.abelian.real_dim(), th.factorial.real_dim()), (0, 2));
    }
}
