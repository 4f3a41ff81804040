//! Second quantization of modular data and a relative-entropy oracle for coherent states.

use super::{FockBasis, Occupation};
use crate::error::{Error, Result};
use crate::linalg::{HermitianEigen, C64};
use crate::standard_subspace::{factorial_decomposition, modular_data, RealSubspace};
use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;
use std::sync::{Arc, OnceLock};

/// Largest accepted thermal mass above the cutoff.
pub const THERMAL_TAIL_LIMIT: f64 = 1e-10;
/// Largest accepted mass of the displaced state above the cutoff.
const DISPLACED_TAIL_LIMIT: f64 = 1e-8;

/// `Γ(Δ)` on the truncated Fock space over the eigenbasis of `Δ`.
#[derive(Debug, Clone)]
pub struct SecondQuantizedSpectrum {
    /// One-particle eigenvalues, ascending; mode `k` is the `k`-th eigenvector.
    pub one_particle: Vec<f64>,
    pub basis: Arc<FockBasis>,
    /// `Πₖ λₖ^{nₖ}` for each basis state.
    pub eigenvalues: Vec<f64>,
}

impl SecondQuantizedSpectrum {
    pub fn eigenvalue(&self, occ: &Occupation) -> f64 {
        occ.iter()
            .zip(&self.one_particle)
            .map(|(&n, &l)| l.powi(n as i32))
            .product()
    }

    /// Eigenvalues on the `n`-particle level, ascending.
    pub fn level(&self, n: usize) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.basis.len())
            .filter(|&i| self.basis.level(i) == n)
            .map(|i| self.eigenvalues[i])
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

pub fn second_quantized_modular(h: &RealSubspace, cutoff: usize) -> Result<SecondQuantizedSpectrum> {
    let fd = factorial_decomposition(h)?;
    if fd.abelian.real_dim() > 0 {
        return Err(Error::NotFactorial(fd.abelian.real_dim()));
    }
    let md = modular_data(h)?;
    let one_particle: Vec<f64> = md.delta_eigenvalues.iter().copied().collect();
    let basis = Arc::new(FockBasis::new(one_particle.len(), cutoff)?);
    let mut out = SecondQuantizedSpectrum {
        one_particle,
        basis,
        eigenvalues: Vec::new(),
    };
    out.eigenvalues = out.basis.states().iter().map(|s| out.eigenvalue(s)).collect();
    Ok(out)
}

/// Geometric occupation weights read off `Γ(Δ)` along the mode with eigenvalue `e^{-θ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalWeights {
    pub theta: f64,
    /// Normalized `p_n ∝ e^{-θn}`, `n ≤ N`.
    pub weights: Vec<f64>,
    pub partition: f64,
    pub n_bar: f64,
    /// `(n̄ / (n̄ + 1))^{N+1}`, the thermal mass above the cutoff.
    pub tail: f64,
}

pub fn thermal_weights(spec: &SecondQuantizedSpectrum) -> Result<ThermalWeights> {
    if spec.one_particle.len() != 2 {
        return Err(Error::NotThermalForm(format!(
            "{} one-particle eigenvalues, expected 2",
            spec.one_particle.len()
        )));
    }
    let (lo, hi) = (spec.one_particle[0], spec.one_particle[1]);
    if hi <= 1.0 || (lo * hi - 1.0).abs() > 1e-8 {
        return Err(Error::NotThermalForm(format!("Δ spectrum {{{lo}, {hi}}}")));
    }
    let b = &spec.basis;
    let raw: Vec<f64> = (0..=b.cutoff())
        .map(|n| {
            let i = b.index(&[n as u16, 0]).expect("level within cutoff");
            spec.eigenvalues[i]
        })
        .collect();
    let partition: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / partition).collect();
    let n_bar = weights.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    Ok(ThermalWeights {
        theta: hi.ln(),
        weights,
        partition,
        n_bar,
        tail: lo.powi(b.cutoff() as i32 + 1),
    })
}

/// A real-linear map `β: H → ℂ` sending `W(h)` to the one-mode displacement `D(β(h))`.
#[derive(Debug, Clone)]
pub struct ModeMap {
    /// Re-orthonormal basis of `H`.
    pub h_basis: [DVector<C64>; 2],
    /// `Im<h₁, h₂>`.
    pub symplectic: f64,
    /// `|β(h)|² = c²‖h‖²` with `c² = 1 / (2n̄ + 1)`.
    pub c: f64,
    /// `|c² - |Im<h₁, h₂>||`; zero when the weights and the Weyl relations agree.
    pub consistency: f64,
}

impl ModeMap {
    fn sign(&self) -> f64 {
        self.symplectic.signum()
    }

    /// `β(x h₁ + y h₂) = c (x - i sgn(s) y)`.
    pub fn beta(&self, x: f64, y: f64) -> C64 {
        Complex::new(self.c * x, -self.sign() * self.c * y)
    }

    /// The `α` with `Im(β(h) ᾱ) = Im<h, φ>` on `H`, so that the coherent state restricts to `D(α) ρ D(α)*`.
    pub fn displacement(&self, phi: &DVector<C64>) -> C64 {
        let inner = |h: &DVector<C64>| -> f64 {
            h.iter().zip(phi.iter()).map(|(a, b)| a * b.conj()).sum::<C64>().im
        };
        let (s1, s2) = (inner(&self.h_basis[0]), inner(&self.h_basis[1]));
        Complex::new(-self.sign() * s2 / self.c, -s1 / self.c)
    }
}

pub fn mode_map(h: &RealSubspace, n_bar: f64) -> Result<ModeMap> {
    if h.ambient().n != 2 || h.real_dim() != 2 {
        return Err(Error::NotThermalForm(format!(
            "real dimension {} in ℂ^{}",
            h.real_dim(),
            h.ambient().n
        )));
    }
    let b = h.complex_basis();
    let s = h.ambient().im_inner(&b[0], &b[1]);
    let c = (1.0 / (2.0 * n_bar + 1.0)).sqrt();
    Ok(ModeMap {
        h_basis: [b[0].clone(), b[1].clone()],
        symplectic: s,
        c,
        consistency: (c * c - s.abs()).abs(),
    })
}

/// A Hermitian matrix on a truncated one-mode Fock space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: DMatrix<C64>,
    eig: OnceLock<HermitianEigen>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        DensityMatrix {
            matrix,
            eig: OnceLock::new(),
        }
    }

    pub fn diagonal(p: &[f64]) -> Self {
        Self::new(DMatrix::from_fn(p.len(), p.len(), |i, j| {
            Complex::new(if i == j { p[i] } else { 0.0 }, 0.0)
        }))
    }

    /// `D(α) diag(p) D(α)*`, restricted to levels `≤ N` where `N + 1 = p.len()`.
    pub fn displaced(p: &[f64], alpha: C64) -> Self {
        let n = p.len();
        let pad = n + 60 + (4.0 * alpha.norm_sqr()).ceil() as usize;
        let gen = DMatrix::from_fn(pad, pad, |i, j| {
            if i == j + 1 {
                alpha * (i as f64).sqrt()
            } else if j == i + 1 {
                -alpha.conj() * (j as f64).sqrt()
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let d = gen.exp();
        let m = DMatrix::from_fn(n, n, |a, b| {
            (0..n).map(|k| d[(a, k)] * p[k] * d[(b, k)].conj()).sum()
        });
        Self::new(m)
    }

    pub fn eigen(&self) -> &HermitianEigen {
        self.eig.get_or_init(|| HermitianEigen::new(&self.matrix))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().values[0]
    }

    /// `Tr ρ log ρ`, with non-positive eigenvalues contributing nothing.
    pub fn trace_log_self(&self) -> f64 {
        self.eigen()
            .values
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.ln())
            .sum()
    }

    /// `Tr ρ (log ρ - log σ)` for diagonal `σ = diag(q)`.
    pub fn relative_entropy_to_diagonal(&self, q: &[f64]) -> f64 {
        let cross: f64 = q
            .iter()
            .enumerate()
            .map(|(n, &qn)| self.matrix[(n, n)].re * qn.ln())
            .sum();
        self.trace_log_self() - cross
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub theta: f64,
    pub cutoff: usize,
    pub n_bar: f64,
    /// `1 / (e^θ - 1)`, for comparison with `n_bar`.
    pub n_bar_closed_form: f64,
    pub mode_consistency: f64,
    pub displacement: [f64; 2],
    pub entropy: f64,
    pub thermal_tail: f64,
    /// `1 - Tr ρ_φ`.
    pub displaced_tail: f64,
    pub min_eigenvalue: f64,
}

/// Relative entropy of the restricted coherent state `W(φ)ξ` against the vacuum
/// on the algebra generated by `W(h)`, `h ∈ H`, for a thermal `H ⊂ ℂ²`.
pub fn araki_relative_entropy_oracle(
    h: &RealSubspace,
    phi: &DVector<C64>,
    cutoff: usize,
) -> Result<OracleReport> {
    if phi.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: phi.len(),
        });
    }
    let spec = second_quantized_modular(h, cutoff).map_err(|e| match e {
        Error::NotFactorial(_) | Error::NotStandard(_) => Error::NotThermalForm(e.to_string()),
        other => other,
    })?;
    let weights = thermal_weights(&spec)?;
    if weights.tail > THERMAL_TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            tail: weights.tail,
            limit: THERMAL_TAIL_LIMIT,
        });
    }
    let map = mode_map(h, weights.n_bar)?;
    let alpha = map.displacement(phi);
    let rho_vac = &weights.weights;
    let rho_phi = DensityMatrix::displaced(rho_vac, alpha);
    let displaced_tail = 1.0 - rho_phi.trace();
    if displaced_tail > DISPLACED_TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            tail: displaced_tail,
            limit: DISPLACED_TAIL_LIMIT,
        });
    }
    let entropy = rho_phi.relative_entropy_to_diagonal(rho_vac);
    Ok(OracleReport {
        theta: weights.theta,
        cutoff,
        n_bar: weights.n_bar,
        n_bar_closed_form: 1.0 / weights.theta.exp_m1(),
        mode_consistency: map.consistency,
        displacement: [alpha.re, alpha.im],
        entropy,
        thermal_tail: weights.tail,
        displaced_tail,
        min_eigenvalue: rho_phi.min_eigenvalue(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard_subspace::{entropy, symplectic_complement, ComplexSpace};

    #[test]
    fn level_two_eigenvalues() {
        let spec = second_quantized_modular(&RealSubspace::thermal(1.0), 2).unwrap();
        let e = 1f64.exp();
        let l2 = spec.level(2);
        let want = [1.0 / (e * e), 1.0, e * e];
        for (a, b) in l2.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "{l2:?}");
        }
    }

    #[test]
    fn identity_delta_quantizes_to_identity() {
        // ℝ ⊂ ℂ is standard with Δ = 1 but abelian
        assert!(matches!(
            second_quantized_modular(&RealSubspace::real_points(1), 3),
            Err(Error::NotFactorial(1))
        ));
        let spec = second_quantized_modular(&RealSubspace::thermal(1e-6), 4).unwrap();
        assert!(spec.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-5));
    }

    #[test]
    fn weights_match_geometric_series() {
        let theta: f64 = 0.5;
        let spec = second_quantized_modular(&RealSubspace::thermal(theta), 60).unwrap();
        let w = thermal_weights(&spec).unwrap();
        let q = (-theta).exp();
        assert!((w.partition - (1.0 - q.powi(61)) / (1.0 - q)).abs() < 1e-9);
        assert!((w.n_bar - 1.0 / theta.exp_m1()).abs() < 1e-9);
        assert!(w.tail < THERMAL_TAIL_LIMIT);
    }

    #[test]
    fn displaced_state_keeps_trace() {
        let p: Vec<f64> = (0..40).map(|n| 0.5f64.powi(n + 1)).collect();
        let rho = DensityMatrix::displaced(&p, Complex::new(0.3, -0.4));
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        assert!(rho.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn complement_vector_gives_zero() {
        let h = RealSubspace::thermal(1.0);
        let hp = symplectic_complement(&h);
        let phi = hp.complex_basis()[0].scale(0.7);
        let r = araki_relative_entropy_oracle(&h, &phi, 40).unwrap();
        assert!(r.entropy.abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn oracle_matches_first_quantized_entropy() {
        let h = RealSubspace::thermal(2.0);
        let md = modular_data(&h).unwrap();
        let phi = md.delta_eigenvectors.column(1).into_owned();
        let r = araki_relative_entropy_oracle(&h, &phi, 60).unwrap();
        let s = entropy(&h, &phi).unwrap();
        assert!(r.mode_consistency < 1e-10);
        assert!((r.entropy - s).abs() <= 1e-3 * s, "{} vs {s}", r.entropy);
    }

    #[test]
    fn non_thermal_subspaces_are_refused() {
        let h = RealSubspace::real_points(2);
        let phi = DVector::from_element(2, Complex::new(0.1, 0.0));
        assert!(matches!(
            araki_relative_entropy_oracle(&h, &phi, 10),
            Err(Error::NotThermalForm(_))
        ));
        let full = RealSubspace::full(ComplexSpace::new(2));
        assert!(araki_relative_entropy_oracle(&full, &phi, 10).is_err());
    }
}
