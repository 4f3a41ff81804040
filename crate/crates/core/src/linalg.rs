//! Dense helpers shared by the modular calculus.
//!
//! Complex vectors of `ℂⁿ` are realified as `(Re z, Im z) ∈ ℝ²ⁿ`. Under this
//! identification `Re<z, w>` is the Euclidean product and `Im<z, w> = uᵀ I v`,
//! where `I` is the realified multiplication by `i`.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// Realified multiplication by `i` on `ℝ²ⁿ`.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, n + k)] = -1.0;
        m[(n + k, k)] = 1.0;
    }
    m
}

/// `I·m` for realified columns, without forming the `2n × 2n` matrix.
pub fn mul_i(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i < n {
            -m[(n + i, j)]
        } else {
            m[(i - n, j)]
        }
    })
}

pub fn mul_i_vec(u: &DVector<f64>) -> DVector<f64> {
    let n = u.len() / 2;
    DVector::from_fn(u.len(), |i, _| if i < n { -u[n + i] } else { u[i - n] })
}

/// Realified complex conjugation `diag(1, -1)`.
pub fn conjugation(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, k)] = 1.0;
        m[(n + k, n + k)] = -1.0;
    }
    m
}

pub fn realify_vector(z: &DVector<C64>) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
}

pub fn complexify_vector(u: &DVector<f64>) -> DVector<C64> {
    let n = u.len() / 2;
    DVector::from_fn(n, |i, _| Complex::new(u[i], u[n + i]))
}

/// Realification of a complex-linear map `A + iB`: `[[A, -B], [B, A]]`.
pub fn realify_matrix(a: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = a.shape();
    let mut m = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = a[(i, j)];
            m[(i, j)] = z.re;
            m[(i, c + j)] = -z.im;
            m[(r + i, j)] = z.im;
            m[(r + i, c + j)] = z.re;
        }
    }
    m
}

/// Inverse of [`realify_matrix`]; only meaningful for maps commuting with `i`.
pub fn complexify_matrix(m: &DMatrix<f64>) -> DMatrix<C64> {
    let r = m.nrows() / 2;
    let c = m.ncols() / 2;
    DMatrix::from_fn(r, c, |i, j| {
        // average the two copies to symmetrize rounding
        let re = 0.5 * (m[(i, j)] + m[(r + i, c + j)]);
        let im = 0.5 * (m[(r + i, j)] - m[(i, c + j)]);
        Complex::new(re, im)
    })
}

/// Realified columns of a complex matrix, as real column vectors.
pub fn realify_columns(a: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = a.shape();
    DMatrix::from_fn(2 * r, c, |i, j| {
        if i < r {
            a[(i, j)].re
        } else {
            a[(i - r, j)].im
        }
    })
}

pub fn complexify_columns(m: &DMatrix<f64>) -> DMatrix<C64> {
    let r = m.nrows() / 2;
    DMatrix::from_fn(r, m.ncols(), |i, j| Complex::new(m[(i, j)], m[(r + i, j)]))
}

/// Singular values in descending order with matching left and right vectors.
/// Falls back to the eigenproblem of `[[0, m], [mᵀ, 0]]` when nalgebra's SVD fails
/// its reconstruction check; vectors for vanishing singular values are then arbitrary.
pub fn singular_triplets(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return (Vec::new(), DMatrix::zeros(r, 0), DMatrix::zeros(c, 0));
    }
    let scale = m.norm();
    let svd = m.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let rebuilt = &u * DMatrix::from_diagonal(&svd.singular_values) * &vt;
    let tol = 64.0 * f64::EPSILON * (r + c) as f64 * scale.max(f64::MIN_POSITIVE);
    let ortho = (u.transpose() * &u - DMatrix::identity(k, k)).norm()
        + (&vt * vt.transpose() - DMatrix::identity(k, k)).norm();
    if (rebuilt - m).norm() <= tol && ortho <= 1e-12 * k as f64 {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let sv = order.iter().map(|&j| svd.singular_values[j]).collect();
        let uu = DMatrix::from_fn(r, k, |i, j| u[(i, order[j])]);
        let vv = DMatrix::from_fn(c, k, |i, j| vt[(order[j], i)]);
        return (sv, uu, vv);
    }
    let mut aug = DMatrix::zeros(r + c, r + c);
    aug.view_mut((0, r), (r, c)).copy_from(m);
    aug.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let eig = aug.symmetric_eigen();
    let mut order: Vec<usize> = (0..r + c).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(k);
    let root2 = std::f64::consts::SQRT_2;
    let sv = order.iter().map(|&j| eig.eigenvalues[j].max(0.0)).collect();
    let uu = DMatrix::from_fn(r, k, |i, j| root2 * eig.eigenvectors[(i, order[j])]);
    let vv = DMatrix::from_fn(c, k, |i, j| root2 * eig.eigenvectors[(r + i, order[j])]);
    (sv, uu, vv)
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    let k = m.ncols();
    if k == 0 {
        return m;
    }
    m.qr().q().columns(0, k).into_owned()
}

/// Orthonormal basis of the column span, dropping directions whose singular
/// value is below `rel_tol · σ_max`.
pub fn orthonormal_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let (sv, u, _) = singular_triplets(m);
    let smax = sv[0];
    if smax <= f64::MIN_POSITIVE {
        return DMatrix::zeros(rows, 0);
    }
    let keep = sv.iter().take_while(|&&x| x > rel_tol * smax).count();
    orthonormalize(u.columns(0, keep).into_owned())
}

/// Orthonormal basis of `{x : m x = 0}`; singular values below `abs_tol` count as zero.
pub fn null_space(m: &DMatrix<f64>, abs_tol: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    let (sv, _, v) = singular_triplets(m);
    let rank = sv.iter().take_while(|&&x| x > abs_tol).count();
    orthogonal_complement(&orthonormalize(v.columns(0, rank).into_owned()))
}

/// Orthonormal basis of the Euclidean complement of an orthonormal column set.
pub fn orthogonal_complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    if q.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    let proj = DMatrix::identity(n, n) - q * q.transpose();
    let eig = proj.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let want = n - q.ncols();
    let keep: Vec<usize> = order.into_iter().take(want).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    let basis = DMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
    // a second pass against q removes the eigensolver's rounding
    let cleaned = &basis - q * (q.transpose() * &basis);
    cleaned.qr().q().columns(0, keep.len()).into_owned()
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_triplets(m).0[0]
}

pub fn spectral_norm_c(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    spectral_norm(&realify_matrix(m))
}

/// Sine of the largest principal angle between two orthonormal column sets,
/// or `1.0` when the dimensions differ.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * (a.transpose() * b);
    spectral_norm(&residual)
}

/// Orthonormalize complex columns (modified Gram–Schmidt, two passes).
/// Columns whose residual norm falls below `rel_tol` times their original norm are dropped.
pub fn complex_gram_schmidt(vectors: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    let rows = vectors.nrows();
    let mut kept: Vec<DVector<C64>> = Vec::new();
    for j in 0..vectors.ncols() {
        let original = vectors.column(j).into_owned();
        let norm0 = original.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = original;
        for _ in 0..2 {
            for q in &kept {
                let c = q.dotc(&v);
                v.axpy(-c, q, ONE);
            }
        }
        let norm = v.norm();
        if norm > rel_tol * norm0 {
            kept.push(v.unscale(norm));
        }
    }
    let mut out = DMatrix::zeros(rows, kept.len());
    for (j, q) in kept.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues ascending
/// and each eigenvector's first non-negligible component made real positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(m: &DMatrix<C64>) -> Self {
        let n = m.nrows();
        // symmetrize before handing to the solver
        let herm = (m + m.adjoint()).scale(0.5);
        let eig = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
        let mut vectors = DMatrix::zeros(n, n);
        for (j, &k) in order.iter().enumerate() {
            let mut v = eig.eigenvectors.column(k).into_owned();
            if let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-10) {
                let phase = lead.conj() / lead.norm();
                v *= phase;
            }
            vectors.set_column(j, &v);
        }
        HermitianEigen { values, vectors }
    }

    /// `V f(Λ) V*`.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn real_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        self.function(|x| Complex::new(f(x), 0.0))
    }
}

/// Symmetric real eigendecomposition, eigenvalues ascending.
pub fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Maximum absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}
