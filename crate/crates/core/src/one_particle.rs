//! One-particle structures `(ℋ, κ)` for finite-dimensional symplectic data.
//!
//! Real coordinates `f ∈ ℝᵐ` are mapped to `κf ∈ ℂʳ` so that
//! `Re<κf, κg> = μ(f, g)` and `Im<κf, κg> = σ(f, g)`.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, HermitianEigen, C64};
use crate::standard_subspace::{ComplexSpace, RealSubspace};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Relative size below which a kernel eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// A symplectic form `σ` and a covariance `μ` on `ℝᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticData {
    pub sigma: DMatrix<f64>,
    pub mu: DMatrix<f64>,
}

/// JSON form: `{ "sigma": [[...]], "mu": [[...]] }`, rows first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticDataSpec {
    pub sigma: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let m = rows.len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidSymplecticData(format!("{what} is not square")));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
}

impl SymplecticDataSpec {
    pub fn to_data(&self) -> Result<SymplecticData> {
        SymplecticData::new(from_rows(&self.sigma, "sigma")?, from_rows(&self.mu, "mu")?)
    }
}

impl SymplecticData {
    /// Checks shapes and (anti)symmetry; domination is checked by [`build_one_particle`].
    pub fn new(sigma: DMatrix<f64>, mu: DMatrix<f64>) -> Result<Self> {
        if !sigma.is_square() || sigma.shape() != mu.shape() {
            return Err(Error::InvalidSymplecticData(format!(
                "σ is {:?}, μ is {:?}",
                sigma.shape(),
                mu.shape()
            )));
        }
        let scale = max_abs(&sigma).max(max_abs(&mu)).max(1.0);
        if max_abs(&(&sigma + sigma.transpose())) > 1e-12 * scale {
            return Err(Error::InvalidSymplecticData("σ is not antisymmetric".into()));
        }
        if max_abs(&(&mu - mu.transpose())) > 1e-12 * scale {
            return Err(Error::InvalidSymplecticData("μ is not symmetric".into()));
        }
        Ok(SymplecticData { sigma, mu })
    }

    pub fn dim(&self) -> usize {
        self.mu.nrows()
    }

    /// `K = μ - iσ`, the Hermitian matrix with `κ*κ = K` in real coordinates.
    pub fn kernel(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            Complex::new(self.mu[(i, j)], -self.sigma[(i, j)])
        })
    }

    /// Smallest eigenvalue of the kernel; negative when `σ` is not dominated by `μ`.
    pub fn domination_margin(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        HermitianEigen::new(&self.kernel()).values[0]
    }

    pub fn to_spec(&self) -> SymplecticDataSpec {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect()
        };
        SymplecticDataSpec {
            sigma: rows(&self.sigma),
            mu: rows(&self.mu),
        }
    }
}

/// Order in which kernel eigenvectors become coordinates of the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone)]
pub struct OneParticleStructure {
    pub target: ComplexSpace,
    /// `r × m`; column `j` is `κ(e_j)`.
    pub kappa: DMatrix<C64>,
    pub kernel_eigenvalues: DVector<f64>,
    /// `m - r`: generators lost to the kernel quotient.
    pub dropped: usize,
    pub warnings: Vec<String>,
}

impl OneParticleStructure {
    pub fn rank(&self) -> usize {
        self.target.n
    }

    pub fn apply(&self, f: &DVector<f64>) -> DVector<C64> {
        &self.kappa * f.map(|x| Complex::new(x, 0.0))
    }

    pub fn image(&self, j: usize) -> DVector<C64> {
        self.kappa.column(j).into_owned()
    }

    /// `(max |Re Gram - μ|, max |Im Gram - σ|)` over the generators.
    pub fn gram_residuals(&self, data: &SymplecticData) -> (f64, f64) {
        let gram = self.kappa.transpose() * self.kappa.map(|z| z.conj());
        let re = max_abs(&(gram.map(|z| z.re) - &data.mu));
        let im = max_abs(&(gram.map(|z| z.im) - &data.sigma));
        (re, im)
    }

    /// Real dimension of `κ(ℝᵐ) + iκ(ℝᵐ)` inside the target.
    pub fn cyclic_dim(&self) -> usize {
        let h = local_subspace(self, &(0..self.kappa.ncols()).collect::<Vec<_>>());
        h.complex_span().real_dim()
    }
}

pub fn build_one_particle(data: &SymplecticData) -> Result<OneParticleStructure> {
    build_one_particle_with(data, EigenOrder::Ascending)
}

/// `κ = diag(√k) V*` over the positive eigenpairs `(k, V)` of `K`.
pub fn build_one_particle_with(
    data: &SymplecticData,
    order: EigenOrder,
) -> Result<OneParticleStructure> {
    let m = data.dim();
    let eig = HermitianEigen::new(&data.kernel());
    let top = eig.values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let tol = RANK_TOL * top.max(1.0);
    if m > 0 && eig.values[0] < -tol {
        return Err(Error::DominationViolated(eig.values[0]));
    }
    let mut keep: Vec<usize> = (0..m).filter(|&j| eig.values[j] > tol).collect();
    if order == EigenOrder::Descending {
        keep.reverse();
    }
    let r = keep.len();
    let kappa = DMatrix::from_fn(r, m, |i, j| {
        let k = keep[i];
        eig.vectors[(j, k)].conj() * eig.values[k].sqrt()
    });
    let mut warnings = Vec::new();
    if r < m {
        warnings.push(format!("degenerate kernel: rank {r} < {m}, {} generators quotiented", m - r));
    }
    Ok(OneParticleStructure {
        target: ComplexSpace::new(r),
        kappa,
        kernel_eigenvalues: eig.values,
        dropped: m - r,
        warnings,
    })
}

/// `exp(-½ μ(f, f))`.
pub fn quasifree_expectation(data: &SymplecticData, f: &DVector<f64>) -> f64 {
    (-0.5 * f.dot(&(&data.mu * f))).exp()
}

/// Real span of `κ(e_j)` for `j` in `mask`.
pub fn local_subspace(structure: &OneParticleStructure, mask: &[usize]) -> RealSubspace {
    let span = mask.iter().map(|&j| structure.image(j)).collect();
    RealSubspace::from_span(structure.target, span).expect("images live in the target")
}

/// Largest `|Im<h, k>|` between two subspaces.
pub fn cross_symplectic_defect(a: &RealSubspace, b: &RealSubspace) -> f64 {
    let space = a.ambient();
    let (ha, hb) = (a.complex_basis(), b.complex_basis());
    let mut worst = 0.0_f64;
    for x in &ha {
        for y in &hb {
            worst = worst.max(space.im_inner(x, y).abs());
        }
    }
    worst
}

/// A harmonic mode of frequency `ω` in the `β`-KMS quasi-free state.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalMode {
    pub omega: f64,
    pub beta: f64,
    pub data: SymplecticData,
}

impl ThermalMode {
    /// `T_t(q, p) = (q cos ωt + p sin ωt / ω, -qω sin ωt + p cos ωt)`.
    pub fn dynamics(&self, t: f64) -> DMatrix<f64> {
        let (s, c) = (self.omega * t).sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, s / self.omega, -self.omega * s, c])
    }

    /// `βω`, the expected `log` of the top modular eigenvalue.
    pub fn theta(&self) -> f64 {
        self.beta * self.omega
    }
}

/// `σ = ½[[0, 1], [-1, 0]]` and `μ = ½ coth(βω/2) diag(ω, 1/ω)`.
pub fn thermal_mode(omega: f64, beta: f64) -> Result<ThermalMode> {
    if !(omega > 0.0 && beta > 0.0 && omega.is_finite() && beta.is_finite()) {
        return Err(Error::NonPositiveParameters(format!("ω = {omega}, β = {beta}")));
    }
    let coth = 1.0 / (0.5 * beta * omega).tanh();
    let sigma = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.0]);
    let mu = DMatrix::from_row_slice(2, 2, &[0.5 * coth * omega, 0.0, 0.0, 0.5 * coth / omega]);
    Ok(ThermalMode {
        omega,
        beta,
        data: SymplecticData::new(sigma, mu)?,
    })
}

/// The vacuum of one mode: `σ = ½[[0, 1], [-1, 0]]`, `μ = ½ I`.
pub fn vacuum_mode() -> SymplecticData {
    SymplecticData::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.0]),
        DMatrix::identity(2, 2).scale(0.5),
    )
    .expect("valid by construction")
}

/// Dominated data `μ = Re C*C`, `σ = -Im C*C` from a complex Gaussian `r × m` matrix `C`, `1 ≤ r ≤ m`.
pub fn random_dominated<R: Rng + ?Sized>(rng: &mut R, m: usize) -> SymplecticData {
    let r = rng.random_range(1..=m.max(1));
    let c = DMatrix::from_fn(r, m, |_, _| {
        Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let k = c.adjoint() * c;
    let mu = k.map(|z| z.re);
    let sigma = k.map(|z| -z.im);
    let mu = (&mu + mu.transpose()).scale(0.5);
    let sigma = (&sigma - sigma.transpose()).scale(0.5);
    SymplecticData { sigma, mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard_subspace::modular_data;

    #[test]
    fn abelian_identity_data() {
        let d = SymplecticData::new(DMatrix::zeros(3, 3), DMatrix::identity(3, 3)).unwrap();
        let s = build_one_particle(&d).unwrap();
        assert_eq!(s.rank(), 3);
        let (re, im) = s.gram_residuals(&d);
        assert!(re < 1e-14 && im < 1e-14);
        let h = local_subspace(&s, &[0, 1, 2]);
        assert!(h.symplectic_defect() < 1e-14);
    }

    #[test]
    fn vacuum_saturation_has_rank_one() {
        let d = vacuum_mode();
        let s = build_one_particle(&d).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.dropped, 1);
        assert_eq!(s.warnings.len(), 1);
        let (re, im) = s.gram_residuals(&d);
        assert!(re < 1e-14 && im < 1e-14);
    }

    #[test]
    fn unit_form_against_half_covariance_is_not_dominated() {
        let d = SymplecticData::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            DMatrix::identity(2, 2).scale(0.5),
        )
        .unwrap();
        match build_one_particle(&d) {
            Err(Error::DominationViolated(k)) => assert!((k + 0.5).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn thermal_mode_has_rank_two() {
        let t = thermal_mode(1.3, 0.7).unwrap();
        let s = build_one_particle(&t.data).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.cyclic_dim(), 4);
    }

    #[test]
    fn thermal_mode_dynamics_preserve_data() {
        let t = thermal_mode(2.0, 1.0).unwrap();
        let tt = t.dynamics(0.37);
        assert!(max_abs(&(tt.transpose() * &t.data.sigma * &tt - &t.data.sigma)) < 1e-15);
        assert!(max_abs(&(tt.transpose() * &t.data.mu * &tt - &t.data.mu)) < 1e-14);
        assert!(max_abs(&(t.dynamics(0.2) * t.dynamics(0.3) - t.dynamics(0.5))) < 1e-15);
    }

    #[test]
    fn thermal_modular_spectrum() {
        let t = thermal_mode(1.0, 1.0).unwrap();
        let s = build_one_particle(&t.data).unwrap();
        let md = modular_data(&local_subspace(&s, &[0, 1])).unwrap();
        let e = 1f64.exp();
        assert!((md.delta_eigenvalues[0] - 1.0 / e).abs() < 1e-10);
        assert!((md.delta_eigenvalues[1] - e).abs() < 1e-10);
    }

    #[test]
    fn non_positive_parameters_are_refused() {
        assert!(matches!(thermal_mode(0.0, 1.0), Err(Error::NonPositiveParameters(_))));
        assert!(matches!(thermal_mode(1.0, -2.0), Err(Error::NonPositiveParameters(_))));
    }

    #[test]
    fn quasifree_values() {
        let d = SymplecticData::new(DMatrix::zeros(2, 2), DMatrix::identity(2, 2)).unwrap();
        assert_eq!(quasifree_expectation(&d, &DVector::zeros(2)), 1.0);
        let f = DVector::from_vec(vec![1.0, 1.0]);
        assert!((quasifree_expectation(&d, &f) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn malformed_data_is_refused() {
        let bad = SymplecticDataSpec {
            sigma: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            mu: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert!(bad.to_data().is_err());
        let ragged = SymplecticDataSpec {
            sigma: vec![vec![0.0], vec![1.0, 0.0]],
            mu: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert!(ragged.to_data().is_err());
    }
}
