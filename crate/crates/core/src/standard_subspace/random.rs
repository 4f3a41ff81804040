use super::{ComplexSpace, RealLinearMap, RealSubspace};
use crate::linalg::{realify_matrix, HermitianEigen, C64};
use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

/// Controls the spread of `log Δ` for [`random_standard`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomStandardOptions {
    /// The spectral radius of `log Δ` is drawn uniformly from `[min_log, max_log]`.
    pub min_log: f64,
    pub max_log: f64,
}

impl Default for RandomStandardOptions {
    fn default() -> Self {
        RandomStandardOptions {
            min_log: 0.1,
            max_log: 3.0,
        }
    }
}

/// Haar-like unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A random standard subspace of `ℂⁿ`, built as the fixed points of
/// `S = U C Δ₀^{1/2} U*` with `log Δ₀ = iA` for a real antisymmetric `A`.
///
/// For odd `n`, `A` has a zero eigenvalue, so the result always has an abelian part.
pub fn random_standard<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    opts: RandomStandardOptions,
) -> RealSubspace {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let a = (&g - g.transpose()).scale(0.5);
    let log = a.map(|x| Complex::new(0.0, x));
    let eig = HermitianEigen::new(&log);
    let radius = eig.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let target = rng.random_range(opts.min_log..=opts.max_log);
    let scale = if radius > 1e-12 { target / radius } else { 0.0 };
    // C Δ₀^{1/2} z = conj(Δ₀^{1/2}) z̄ = Δ₀^{-1/2} z̄
    let half = eig.function(|x| Complex::new((-0.5 * scale * x).exp(), 0.0));
    let s0 = RealLinearMap::anti_linear(&half).matrix;
    let u = realify_matrix(&random_unitary(rng, n));
    let s = &u * s0 * u.transpose();
    let fixed = DMatrix::identity(2 * n, 2 * n) + s;
    RealSubspace::from_real_columns(ComplexSpace::new(n), &fixed)
}
