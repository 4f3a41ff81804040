//! Finite-dimensional modular calculus on real subspaces of `ℂⁿ`.
//!
//! Every operator is carried in realified form (`2n × 2n` real matrices), which
//! keeps anti-linear maps such as the Tomita operator ordinary matrices.

mod entropy;
mod modular;
mod random;

pub use entropy::{
    abelian_entropy, entropy, entropy_parts, finiteness_functional, reduce_to_standard,
    EntropyParts, Reduction,
};
pub use modular::{
    cutting_projection, factorial_decomposition, modular_data, modular_data_with, tomita,
    FactorialDecomposition, ModularData,
};
pub use random::{random_standard, random_unitary, RandomStandardOptions};

use crate::error::{Error, NonStandardReason, Result};
use crate::linalg::{
    complex_structure, complexify_vector, max_abs, mul_i, null_space, orthogonal_complement,
    orthonormal_basis, realify_matrix, realify_vector, subspace_distance, C64,
};
use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Tolerance for subspace comparisons by principal angles.
pub const SUBSPACE_TOL: f64 = 1e-8;
/// Largest accepted condition number of `Δ`.
pub const CONDITION_CAP: f64 = 1e12;
/// `|λ - 1|` below which an eigenvalue of `Δ` counts as 1.
pub const EIGENVALUE_ONE_TOL: f64 = 1e-9;

/// Relative singular-value cutoff used when orthonormalizing spans.
const RANK_TOL: f64 = 1e-10;

/// `ℂⁿ` with the inner product linear in the first slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpace {
    pub n: usize,
}

impl ComplexSpace {
    pub fn new(n: usize) -> Self {
        ComplexSpace { n }
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn inner(&self, x: &DVector<C64>, y: &DVector<C64>) -> C64 {
        x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn re_inner(&self, x: &DVector<C64>, y: &DVector<C64>) -> f64 {
        self.inner(x, y).re
    }

    /// The symplectic part `Im<x, y>`.
    pub fn im_inner(&self, x: &DVector<C64>, y: &DVector<C64>) -> f64 {
        self.inner(x, y).im
    }
}

/// Whether a [`RealLinearMap`] commutes or anticommutes with multiplication by `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linearity {
    ComplexLinear,
    AntiLinear,
    Neither,
}

/// A real-linear map on the realification of `ℂⁿ`.
#[derive(Debug, Clone)]
pub struct RealLinearMap {
    pub matrix: DMatrix<f64>,
    pub linearity: Linearity,
}

impl RealLinearMap {
    /// Wraps a realified matrix, classifying it against the complex structure.
    pub fn new(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows() / 2;
        let jc = complex_structure(n);
        let scale = max_abs(&matrix).max(1.0);
        let comm = max_abs(&(&matrix * &jc - &jc * &matrix)) / scale;
        let anti = max_abs(&(&matrix * &jc + &jc * &matrix)) / scale;
        let tol = 1e-9;
        let linearity = if comm <= tol {
            Linearity::ComplexLinear
        } else if anti <= tol {
            Linearity::AntiLinear
        } else {
            Linearity::Neither
        };
        RealLinearMap { matrix, linearity }
    }

    pub fn complex_linear(a: &DMatrix<C64>) -> Self {
        RealLinearMap {
            matrix: realify_matrix(a),
            linearity: Linearity::ComplexLinear,
        }
    }

    /// The anti-linear map `z ↦ A z̄`.
    pub fn anti_linear(a: &DMatrix<C64>) -> Self {
        let n = a.ncols();
        let conj = crate::linalg::conjugation(n);
        RealLinearMap {
            matrix: realify_matrix(a) * conj,
            linearity: Linearity::AntiLinear,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn apply(&self, z: &DVector<C64>) -> DVector<C64> {
        complexify_vector(&(&self.matrix * realify_vector(z)))
    }

    pub fn apply_real(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.matrix * u
    }

    pub fn compose(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap::new(&self.matrix * &other.matrix)
    }
}

/// Outcome of [`is_standard`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Standardness {
    Standard,
    NotStandard { reason: NonStandardReason },
}

impl Standardness {
    pub fn is_standard(&self) -> bool {
        matches!(self, Standardness::Standard)
    }
}

/// A real-linear subspace of `ℂⁿ`, stored by a realified orthonormal basis.
#[derive(Debug, Clone)]
pub struct RealSubspace {
    ambient: ComplexSpace,
    span: Vec<DVector<C64>>,
    basis: DMatrix<f64>,
}

impl RealSubspace {
    /// Real span of complex vectors.
    pub fn from_span(ambient: ComplexSpace, span: Vec<DVector<C64>>) -> Result<Self> {
        let n = ambient.n;
        for v in &span {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let mut m = DMatrix::zeros(2 * n, span.len());
        for (j, v) in span.iter().enumerate() {
            m.set_column(j, &realify_vector(v));
        }
        let basis = orthonormal_basis(&m, RANK_TOL);
        Ok(RealSubspace {
            ambient,
            span,
            basis,
        })
    }

    /// Column span of a realified `2n × k` matrix.
    pub fn from_real_columns(ambient: ComplexSpace, m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), ambient.real_dim(), "realified columns must have 2n rows");
        let basis = orthonormal_basis(m, RANK_TOL);
        Self::from_orthonormal(ambient, basis)
    }

    /// Trusts that the columns are already Re-orthonormal.
    pub(crate) fn from_orthonormal(ambient: ComplexSpace, basis: DMatrix<f64>) -> Self {
        let span = (0..basis.ncols())
            .map(|j| complexify_vector(&basis.column(j).into_owned()))
            .collect();
        RealSubspace {
            ambient,
            span,
            basis,
        }
    }

    pub fn zero(ambient: ComplexSpace) -> Self {
        Self::from_orthonormal(ambient, DMatrix::zeros(ambient.real_dim(), 0))
    }

    /// `ℂⁿ` viewed as a real subspace of itself.
    pub fn full(ambient: ComplexSpace) -> Self {
        let d = ambient.real_dim();
        Self::from_orthonormal(ambient, DMatrix::identity(d, d))
    }

    /// The real points `ℝⁿ ⊂ ℂⁿ`.
    pub fn real_points(n: usize) -> Self {
        let mut b = DMatrix::zeros(2 * n, n);
        for k in 0..n {
            b[(k, k)] = 1.0;
        }
        Self::from_orthonormal(ComplexSpace::new(n), b)
    }

    /// The standard subspace of `ℂ²` whose modular operator has spectrum `{e^θ, e^{-θ}}`:
    /// fixed points of `S(a, b) = (e^{-θ/2} b̄, e^{θ/2} ā)`.
    pub fn thermal(theta: f64) -> Self {
        let c = (-0.5 * theta).exp();
        let h1 = DVector::from_vec(vec![Complex::new(c, 0.0), Complex::new(1.0, 0.0)]);
        let h2 = DVector::from_vec(vec![Complex::new(0.0, -c), Complex::new(0.0, 1.0)]);
        Self::from_span(ComplexSpace::new(2), vec![h1, h2]).expect("dimensions agree")
    }

    /// Fixed points of a real-linear map.
    pub fn fixed_points(map: &RealLinearMap) -> Self {
        let d = map.matrix.nrows();
        let m = &map.matrix - DMatrix::identity(d, d);
        let scale = max_abs(&map.matrix).max(1.0);
        let ns = null_space(&m, 1e-10 * scale);
        Self::from_orthonormal(ComplexSpace::new(d / 2), ns)
    }

    pub fn ambient(&self) -> ComplexSpace {
        self.ambient
    }

    pub fn real_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The vectors the subspace was built from.
    pub fn span(&self) -> &[DVector<C64>] {
        &self.span
    }

    /// Realified orthonormal basis, `2n × real_dim`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthonormal basis vectors as complex vectors.
    pub fn complex_basis(&self) -> Vec<DVector<C64>> {
        (0..self.real_dim())
            .map(|j| complexify_vector(&self.basis.column(j).into_owned()))
            .collect()
    }

    /// Real orthogonal projection of a realified vector.
    pub fn project_real(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * u)
    }

    pub fn project(&self, v: &DVector<C64>) -> DVector<C64> {
        complexify_vector(&self.project_real(&realify_vector(v)))
    }

    /// Distance of `v` from the subspace.
    pub fn residual(&self, v: &DVector<C64>) -> f64 {
        let u = realify_vector(v);
        (&u - self.project_real(&u)).norm()
    }

    pub fn contains(&self, v: &DVector<C64>, tol: f64) -> bool {
        self.residual(v) <= tol * v.norm().max(1.0)
    }

    /// Principal-angle distance; `1.0` if the dimensions differ.
    pub fn distance(&self, other: &RealSubspace) -> f64 {
        subspace_distance(&self.basis, &other.basis)
    }

    /// `sup |Im<h, k>|` over unit `h, k ∈ H`; zero exactly when `H ⊆ H'`.
    pub fn symplectic_defect(&self) -> f64 {
        let gram = self.basis.transpose() * mul_i(&self.basis);
        crate::linalg::spectral_norm(&gram)
    }

    /// `H + iH` as a real subspace.
    pub fn complex_span(&self) -> RealSubspace {
        let both = concat_columns(&self.basis, &mul_i(&self.basis));
        RealSubspace::from_real_columns(self.ambient, &both)
    }

    /// `H ∩ iH`, the largest complex subspace inside `H`.
    pub fn complex_part(&self) -> RealSubspace {
        let ih = Self::from_orthonormal(self.ambient, mul_i(&self.basis));
        intersection(self, &ih)
    }

    /// Real-orthogonal complement of `sub` inside `self`; `sub` must lie in `self`.
    pub fn complement_within(&self, sub: &RealSubspace) -> RealSubspace {
        if sub.real_dim() == 0 {
            return self.clone();
        }
        let coords = self.basis.transpose() * &sub.basis;
        let q = orthonormal_basis(&coords, RANK_TOL);
        let perp = orthogonal_complement(&q);
        Self::from_orthonormal(self.ambient, &self.basis * perp)
    }
}

/// Real-orthogonal evaluation of `H ∩ K`.
pub fn intersection(h: &RealSubspace, k: &RealSubspace) -> RealSubspace {
    let ambient = h.ambient;
    if h.real_dim() == 0 || k.real_dim() == 0 {
        return RealSubspace::zero(ambient);
    }
    let b = h.basis();
    let residual = b - k.basis() * (k.basis().transpose() * b);
    let ns = null_space(&residual, SUBSPACE_TOL);
    RealSubspace::from_real_columns(ambient, &(b * ns))
}

pub fn is_standard(h: &RealSubspace) -> Standardness {
    let k = h.real_dim();
    let span_dim = h.complex_span().real_dim();
    let two_n = h.ambient.real_dim();
    let overlap = 2 * k - span_dim.min(2 * k);
    if overlap > 0 {
        Standardness::NotStandard {
            reason: NonStandardReason::IntersectsIH { dim: overlap },
        }
    } else if span_dim < two_n {
        Standardness::NotStandard {
            reason: NonStandardReason::NotCyclic {
                span_dim,
                ambient_real_dim: two_n,
            },
        }
    } else {
        Standardness::Standard
    }
}

pub(crate) fn require_standard(h: &RealSubspace) -> Result<()> {
    match is_standard(h) {
        Standardness::Standard => Ok(()),
        Standardness::NotStandard { reason } => Err(Error::NotStandard(reason)),
    }
}

/// `H' = {ψ : Im<ψ, h> = 0 ∀ h ∈ H}`, computed as `i·H^⊥`.
pub fn symplectic_complement(h: &RealSubspace) -> RealSubspace {
    let perp = orthogonal_complement(h.basis());
    RealSubspace::from_orthonormal(h.ambient, mul_i(&perp))
}

/// `UH` for a unitary `U` on the ambient space.
pub fn unitary_transport(u: &DMatrix<C64>, h: &RealSubspace) -> Result<RealSubspace> {
    let n = h.ambient.n;
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.nrows().max(u.ncols()),
        });
    }
    let moved = realify_matrix(u) * h.basis();
    Ok(RealSubspace::from_real_columns(h.ambient, &moved))
}

/// `H₁ ⊕ H₂ ⊂ ℂ^{n₁} ⊕ ℂ^{n₂}`.
pub fn direct_sum(h1: &RealSubspace, h2: &RealSubspace) -> RealSubspace {
    let (n1, n2) = (h1.ambient.n, h2.ambient.n);
    let n = n1 + n2;
    let (k1, k2) = (h1.real_dim(), h2.real_dim());
    let mut b = DMatrix::zeros(2 * n, k1 + k2);
    for j in 0..k1 {
        for i in 0..n1 {
            b[(i, j)] = h1.basis[(i, j)];
            b[(n + i, j)] = h1.basis[(n1 + i, j)];
        }
    }
    for j in 0..k2 {
        for i in 0..n2 {
            b[(n1 + i, k1 + j)] = h2.basis[(i, j)];
            b[(n + n1 + i, k1 + j)] = h2.basis[(n2 + i, j)];
        }
    }
    RealSubspace::from_orthonormal(ComplexSpace::new(n), b)
}

/// `φ₁ ⊕ φ₂`.
pub fn direct_sum_vector(v1: &DVector<C64>, v2: &DVector<C64>) -> DVector<C64> {
    DVector::from_iterator(v1.len() + v2.len(), v1.iter().chain(v2.iter()).copied())
}

fn concat_columns(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

/// JSON descriptor `{ "ambient_dim": n, "span": [[[re, im], ...], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDescriptor {
    pub ambient_dim: usize,
    pub span: Vec<Vec<[f64; 2]>>,
}

impl SubspaceDescriptor {
    pub fn to_subspace(&self) -> Result<RealSubspace> {
        let span = self
            .span
            .iter()
            .map(|v| DVector::from_iterator(v.len(), v.iter().map(|p| Complex::new(p[0], p[1]))))
            .collect();
        RealSubspace::from_span(ComplexSpace::new(self.ambient_dim), span)
    }

    pub fn from_subspace(h: &RealSubspace) -> Self {
        SubspaceDescriptor {
            ambient_dim: h.ambient.n,
            span: h
                .span
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// Parses `[[re, im], ...]` into a complex vector.
pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(pairs.len(), pairs.iter().map(|p| Complex::new(p[0], p[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cvec(v: &[(f64, f64)]) -> DVector<C64> {
        DVector::from_iterator(v.len(), v.iter().map(|&(a, b)| Complex::new(a, b)))
    }

    #[test]
    fn real_points_are_standard() {
        assert!(is_standard(&RealSubspace::real_points(3)).is_standard());
    }

    #[test]
    fn complex_line_intersects_ih() {
        let h = RealSubspace::from_span(
            ComplexSpace::new(1),
            vec![cvec(&[(1.0, 0.0)]), cvec(&[(0.0, 1.0)])],
        )
        .unwrap();
        assert_eq!(
            is_standard(&h),
            Standardness::NotStandard {
                reason: NonStandardReason::IntersectsIH { dim: 2 }
            }
        );
    }

    #[test]
    fn single_real_line_in_c2_is_not_cyclic() {
        let h = RealSubspace::from_span(ComplexSpace::new(2), vec![cvec(&[(1.0, 0.0), (0.0, 0.0)])])
            .unwrap();
        assert_eq!(
            is_standard(&h),
            Standardness::NotStandard {
                reason: NonStandardReason::NotCyclic {
                    span_dim: 2,
                    ambient_real_dim: 4
                }
            }
        );
    }

    #[test]
    fn complement_of_real_points_and_full_space() {
        let r = RealSubspace::real_points(3);
        assert!(symplectic_complement(&r).distance(&r) < 1e-14);
        let full = RealSubspace::full(ComplexSpace::new(2));
        assert_eq!(symplectic_complement(&full).real_dim(), 0);
    }

    #[test]
    fn double_complement_is_identity() {
        let h = RealSubspace::thermal(1.0);
        let hpp = symplectic_complement(&symplectic_complement(&h));
        assert!(hpp.distance(&h) < 1e-12);
    }

    #[test]
    fn span_dimension_mismatch_is_reported() {
        let err = RealSubspace::from_span(ComplexSpace::new(2), vec![cvec(&[(1.0, 0.0)])]);
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn linearity_classification() {
        let a = DMatrix::from_fn(2, 2, |i, j| Complex::new(i as f64 + 1.0, j as f64));
        assert_eq!(RealLinearMap::complex_linear(&a).linearity, Linearity::ComplexLinear);
        let anti = RealLinearMap::anti_linear(&a);
        assert_eq!(RealLinearMap::new(anti.matrix.clone()).linearity, Linearity::AntiLinear);
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = 1.0;
        assert_eq!(RealLinearMap::new(m).linearity, Linearity::Neither);
        let z = cvec(&[(0.5, -1.0), (2.0, 0.25)]);
        let expect = &a * z.map(|c| c.conj());
        assert!((anti.apply(&z) - expect).norm() < 1e-14);
    }

    #[test]
    fn direct_sum_dimensions_add() {
        let s = direct_sum(&RealSubspace::real_points(2), &RealSubspace::thermal(0.7));
        assert_eq!(s.ambient().n, 4);
        assert_eq!(s.real_dim(), 4);
        assert!(is_standard(&s).is_standard());
    }

    #[test]
    fn identity_transport_keeps_subspace() {
        let h = RealSubspace::thermal(1.3);
        let id = DMatrix::<C64>::identity(2, 2);
        assert!(unitary_transport(&id, &h).unwrap().distance(&h) < 1e-14);
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"ambient_dim":2,"span":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        let d: SubspaceDescriptor = serde_json::from_str(json).unwrap();
        let h = d.to_subspace().unwrap();
        assert!(h.distance(&RealSubspace::real_points(2)) < 1e-14);
        let again: SubspaceDescriptor =
            serde_json::from_str(&serde_json::to_string(&SubspaceDescriptor::from_subspace(&h)).unwrap())
                .unwrap();
        assert_eq!(again.ambient_dim, 2);
    }

    #[test]
    fn complex_part_and_standard_component() {
        // H = ℂe₁ ⊕ ℝe₂ inside ℂ²
        let h = RealSubspace::from_span(
            ComplexSpace::new(2),
            vec![
                cvec(&[(1.0, 0.0), (0.0, 0.0)]),
                cvec(&[(0.0, 1.0), (0.0, 0.0)]),
                cvec(&[(0.0, 0.0), (1.0, 0.0)]),
            ],
        )
        .unwrap();
        let c = h.complex_part();
        assert_eq!(c.real_dim(), 2);
        let rest = h.complement_within(&c);
        assert_eq!(rest.real_dim(), 1);
        assert!(rest.contains(&cvec(&[(0.0, 0.0), (1.0, 0.0)]), 1e-12));
    }
}
