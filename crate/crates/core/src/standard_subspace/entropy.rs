use super::modular::{cutting_projection, factorial_decomposition, modular_data};
use super::{require_standard, ComplexSpace, RealSubspace};
use crate::error::{Error, Result};
use crate::linalg::{
    complex_gram_schmidt, complexify_columns, mul_i_vec, realify_columns, realify_matrix,
    realify_vector, C64,
};
use nalgebra::{DMatrix, DVector};

/// Largest `|Im<h, k>|` tolerated for a subspace declared abelian.
const ABELIAN_DEFECT_TOL: f64 = 1e-9;

/// The standard component of `H` in reduced coordinates.
///
/// `H_s = H ∩ (H ∩ iH)^⊥` is standard inside `H_s + iH_s`; `q` holds an
/// orthonormal basis of that complex span, and `reduced` is `q* H_s ⊂ ℂ^d`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub q: DMatrix<C64>,
    pub reduced: RealSubspace,
}

impl Reduction {
    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    /// Coordinates of the projection of `φ` onto `H_s + iH_s`.
    pub fn coordinates(&self, phi: &DVector<C64>) -> DVector<C64> {
        self.q.adjoint() * phi
    }
}

pub fn reduce_to_standard(h: &RealSubspace) -> Reduction {
    let hs = h.complement_within(&h.complex_part());
    let cols = complexify_columns(hs.basis());
    let q = complex_gram_schmidt(&cols, 1e-8);
    let coords = realify_columns(&(q.adjoint() * &cols));
    let reduced = RealSubspace::from_real_columns(ComplexSpace::new(q.ncols()), &coords);
    Reduction { q, reduced }
}

fn check_len(h: &RealSubspace, phi: &DVector<C64>) -> Result<()> {
    let n = h.ambient().n;
    if phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phi.len(),
        });
    }
    Ok(())
}

/// `2‖(1 - E)φ‖²` with `E` the real orthogonal projection onto `H` inside `H + iH`.
pub fn abelian_entropy(h: &RealSubspace, phi: &DVector<C64>) -> Result<f64> {
    check_len(h, phi)?;
    let defect = h.symplectic_defect();
    if defect > ABELIAN_DEFECT_TOL {
        return Err(Error::NotAbelian(defect));
    }
    let u = realify_vector(phi);
    let in_span = h.complex_span().project_real(&u).norm_squared();
    let in_h = h.project_real(&u).norm_squared();
    Ok(2.0 * (in_span - in_h))
}

/// `Im<φ, P i log Δ φ>` for a standard factorial `H`.
fn factorial_entropy(h: &RealSubspace, phi: &DVector<C64>) -> Result<f64> {
    let md = modular_data(h)?;
    let p = cutting_projection(h)?.matrix;
    let log = realify_matrix(&md.log_delta());
    let u = realify_vector(phi);
    let generator = mul_i_vec(&(log * &u));
    Ok(u.dot(&mul_i_vec(&(p * generator))))
}

/// Entropy split into the abelian and factorial contributions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EntropyParts {
    pub abelian: f64,
    pub factorial: f64,
}

impl EntropyParts {
    pub fn total(&self) -> f64 {
        self.abelian + self.factorial
    }
}

pub fn entropy_parts(h: &RealSubspace, phi: &DVector<C64>) -> Result<EntropyParts> {
    check_len(h, phi)?;
    let red = reduce_to_standard(h);
    if red.dim() == 0 {
        return Ok(EntropyParts {
            abelian: 0.0,
            factorial: 0.0,
        });
    }
    let c = red.coordinates(phi);
    let dec = factorial_decomposition(&red.reduced)?;
    let abelian = if dec.abelian.real_dim() > 0 {
        abelian_entropy(&dec.abelian, &c)?
    } else {
        0.0
    };
    let factorial = if dec.factorial.real_dim() > 0 {
        let rf = reduce_to_standard(&dec.factorial);
        factorial_entropy(&rf.reduced, &rf.coordinates(&c))?
    } else {
        0.0
    };
    Ok(EntropyParts { abelian, factorial })
}

/// Entropy of `φ` relative to `H`; non-standard `H` is first reduced to its standard component.
pub fn entropy(h: &RealSubspace, phi: &DVector<C64>) -> Result<f64> {
    entropy_parts(h, phi).map(|p| p.total())
}

/// `-Σ_{λ<1} log λ ‖E(λ)φ‖²`.
pub fn finiteness_functional(h: &RealSubspace, phi: &DVector<C64>) -> Result<f64> {
    check_len(h, phi)?;
    require_standard(h)?;
    let md = modular_data(h)?;
    let mut total = 0.0;
    for j in 0..md.n {
        let lambda = md.delta_eigenvalues[j];
        if lambda < 1.0 - super::EIGENVALUE_ONE_TOL {
            let c = md.delta_eigenvectors.column(j).dotc(phi);
            total -= lambda.ln() * c.norm_sqr();
        }
    }
    Ok(total)
}
