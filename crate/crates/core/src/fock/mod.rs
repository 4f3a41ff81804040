//! Truncated Bose-Fock space over `ℂᵐ`, `m ≤ 3`.
//!
//! Basis vectors are occupation-number states `|n₁, …, n_m⟩` with `Σ nₖ ≤ N`,
//! ordered by total number and then lexicographically.

mod oracle;

pub use oracle::{
    araki_relative_entropy_oracle, mode_map, second_quantized_modular, thermal_weights,
    DensityMatrix, ModeMap, OracleReport, SecondQuantizedSpectrum, ThermalWeights,
    THERMAL_TAIL_LIMIT,
};

use crate::error::{Error, Result};
use crate::linalg::C64;
use nalgebra::{Complex, DVector};
use std::collections::HashMap;
use std::sync::Arc;

pub const MAX_MODES: usize = 3;
/// Default limit on the discarded mass, relative to the squared norm.
pub const TAIL_LIMIT: f64 = 1e-8;

pub type Occupation = [u16; MAX_MODES];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
    states: Vec<Occupation>,
    /// `raise[k][i]`: index of `a_k† |states[i]⟩`, `usize::MAX` above the cutoff.
    raise: Vec<Vec<usize>>,
    /// `lower[k][i]`: index of `a_k |states[i]⟩`, `usize::MAX` when `n_k = 0`.
    lower: Vec<Vec<usize>>,
}

const NONE: usize = usize::MAX;

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        if modes > MAX_MODES {
            return Err(Error::TooManyModes(modes));
        }
        let mut states = Vec::new();
        for level in 0..=cutoff {
            push_level(modes, level, &mut states);
        }
        let lookup: HashMap<Occupation, usize> =
            states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut raise = vec![vec![NONE; states.len()]; modes];
        let mut lower = vec![vec![NONE; states.len()]; modes];
        for (i, s) in states.iter().enumerate() {
            let level: usize = s.iter().map(|&x| x as usize).sum();
            for k in 0..modes {
                if level < cutoff {
                    let mut up = *s;
                    up[k] += 1;
                    raise[k][i] = lookup[&up];
                }
                if s[k] > 0 {
                    let mut down = *s;
                    down[k] -= 1;
                    lower[k][i] = lookup[&down];
                }
            }
        }
        Ok(FockBasis {
            modes,
            cutoff,
            states,
            raise,
            lower,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn level(&self, i: usize) -> usize {
        self.states[i].iter().map(|&x| x as usize).sum()
    }

    pub fn index(&self, occ: &[u16]) -> Option<usize> {
        let mut key = [0u16; MAX_MODES];
        if occ.len() > self.modes {
            return None;
        }
        key[..occ.len()].copy_from_slice(occ);
        self.states.iter().position(|s| *s == key)
    }

    /// `(Σₖ ψₖ a_k† - ψ̄ₖ a_k) v` with the creation part cut at level `N`.
    fn displacement_generator(&self, psi: &DVector<C64>, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        for k in 0..self.modes {
            let (p, pc) = (psi[k], psi[k].conj());
            for (i, s) in self.states.iter().enumerate() {
                let c = v[i];
                if c == Complex::new(0.0, 0.0) {
                    continue;
                }
                let up = self.raise[k][i];
                if up != NONE {
                    out[up] += p * c * ((s[k] as f64) + 1.0).sqrt();
                }
                let down = self.lower[k][i];
                if down != NONE {
                    out[down] -= pc * c * (s[k] as f64).sqrt();
                }
            }
        }
        out
    }
}

fn push_level(modes: usize, level: usize, out: &mut Vec<Occupation>) {
    fn rec(k: usize, modes: usize, left: usize, cur: &mut Occupation, out: &mut Vec<Occupation>) {
        if k + 1 == modes {
            cur[k] = left as u16;
            out.push(*cur);
            cur[k] = 0;
            return;
        }
        for n in (0..=left).rev() {
            cur[k] = n as u16;
            rec(k + 1, modes, left - n, cur, out);
        }
        cur[k] = 0;
    }
    if modes == 0 {
        if level == 0 {
            out.push([0; MAX_MODES]);
        }
        return;
    }
    rec(0, modes, level, &mut [0; MAX_MODES], out);
}

/// A vector of the truncated Fock space with an estimate of the mass lost to the cutoff.
#[derive(Debug, Clone)]
pub struct TruncatedFockVector {
    pub basis: Arc<FockBasis>,
    pub coeffs: DVector<C64>,
    pub tail: f64,
}

impl TruncatedFockVector {
    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut coeffs = DVector::zeros(basis.len());
        coeffs[0] = Complex::new(1.0, 0.0);
        TruncatedFockVector {
            basis,
            coeffs,
            tail: 0.0,
        }
    }

    pub fn basis_state(basis: Arc<FockBasis>, occ: &[u16]) -> Option<Self> {
        let i = basis.index(occ)?;
        let mut coeffs = DVector::zeros(basis.len());
        coeffs[i] = Complex::new(1.0, 0.0);
        Some(TruncatedFockVector {
            basis,
            coeffs,
            tail: 0.0,
        })
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    /// Linear in the first slot.
    pub fn inner(&self, other: &TruncatedFockVector) -> C64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        TruncatedFockVector {
            basis: self.basis.clone(),
            coeffs: self.coeffs.map(|z| z * c),
            tail: self.tail * c.norm_sqr(),
        }
    }

    pub fn distance(&self, other: &TruncatedFockVector) -> f64 {
        (&self.coeffs - &other.coeffs).norm()
    }

    /// Squared norm carried by states at the cutoff level.
    pub fn top_level_mass(&self) -> f64 {
        let n = self.basis.cutoff();
        (0..self.basis.len())
            .filter(|&i| self.basis.level(i) == n)
            .map(|i| self.coeffs[i].norm_sqr())
            .sum()
    }
}

/// `Σ_{k > N} x^k / k!`, summed directly.
pub fn exponential_tail(x: f64, cutoff: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for k in 1..=cutoff + 1 {
        term *= x / k as f64;
    }
    let mut total = 0.0;
    let mut k = cutoff + 1;
    while term > 1e-300 && (total == 0.0 || term > 1e-18 * total) {
        total += term;
        k += 1;
        term *= x / k as f64;
    }
    total
}

/// `e^φ = ⊕ φ^{⊗n} / √n!`, i.e. coefficients `Πₖ φₖ^{nₖ} / √(nₖ!)`.
pub fn coherent_vector(phi: &DVector<C64>, cutoff: usize) -> Result<TruncatedFockVector> {
    coherent_vector_in(Arc::new(FockBasis::new(phi.len(), cutoff)?), phi)
}

pub fn coherent_vector_in(basis: Arc<FockBasis>, phi: &DVector<C64>) -> Result<TruncatedFockVector> {
    coherent_vector_with(basis, phi, TAIL_LIMIT)
}

pub fn coherent_vector_with(
    basis: Arc<FockBasis>,
    phi: &DVector<C64>,
    tail_limit: f64,
) -> Result<TruncatedFockVector> {
    if phi.len() != basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            got: phi.len(),
        });
    }
    let x = phi.norm_squared();
    let tail = exponential_tail(x, basis.cutoff());
    if tail > tail_limit * x.exp() {
        return Err(Error::CutoffTooSmall {
            tail,
            limit: tail_limit * x.exp(),
        });
    }
    let coeffs = DVector::from_iterator(
        basis.len(),
        basis.states().iter().map(|s| {
            let mut c = Complex::new(1.0, 0.0);
            for k in 0..basis.modes() {
                let mut fact = 1.0;
                for j in 1..=s[k] {
                    fact *= j as f64;
                }
                c *= phi[k].powu(s[k] as u32) / fact.sqrt();
            }
            c
        }),
    );
    Ok(TruncatedFockVector { basis, coeffs, tail })
}

/// `W(ψ) v = exp(ψ·a† - ψ̄·a) v` by scaling and squaring of a Taylor series.
///
/// In this convention `W(ψ) e^φ = e^{-½‖ψ‖² - <φ, ψ>} e^{ψ+φ}` and
/// `W(ψ) W(φ) = e^{i Im<ψ, φ>} W(ψ + φ)`.
pub fn weyl_apply(psi: &DVector<C64>, v: &TruncatedFockVector) -> Result<TruncatedFockVector> {
    weyl_apply_with(psi, v, TAIL_LIMIT)
}

pub fn weyl_apply_with(
    psi: &DVector<C64>,
    v: &TruncatedFockVector,
    tail_limit: f64,
) -> Result<TruncatedFockVector> {
    let basis = &v.basis;
    if psi.len() != basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            got: psi.len(),
        });
    }
    let bound = 2.0 * psi.iter().map(|z| z.norm()).sum::<f64>() * ((basis.cutoff() + 1) as f64).sqrt();
    let mut steps = 0u32;
    while bound / 2f64.powi(steps as i32) > 0.5 {
        steps += 1;
    }
    let h = psi.map(|z| z / 2f64.powi(steps as i32));
    let mut cur = v.coeffs.clone();
    for _ in 0..(1u64 << steps) {
        let mut term = cur.clone();
        let mut acc = cur.clone();
        for k in 1..40 {
            term = basis.displacement_generator(&h, &term).unscale(k as f64);
            acc += &term;
            if term.norm() <= 1e-17 * acc.norm() {
                break;
            }
        }
        cur = acc;
    }
    let out = TruncatedFockVector {
        basis: basis.clone(),
        coeffs: cur,
        tail: 0.0,
    };
    let leak = out.top_level_mass();
    let norm = v.norm_sq().max(f64::MIN_POSITIVE);
    if leak > tail_limit * norm {
        return Err(Error::CutoffTooSmall {
            tail: leak,
            limit: tail_limit * norm,
        });
    }
    Ok(TruncatedFockVector {
        tail: v.tail + leak,
        ..out
    })
}

/// `<ξ, W(κf) ξ>` on the truncated space.
pub fn vacuum_expectation(kf: &DVector<C64>, cutoff: usize) -> Result<C64> {
    let basis = Arc::new(FockBasis::new(kf.len(), cutoff)?);
    let w = weyl_apply(kf, &TruncatedFockVector::vacuum(basis))?;
    Ok(w.coeffs[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(z: &[(f64, f64)]) -> DVector<C64> {
        DVector::from_iterator(z.len(), z.iter().map(|&(a, b)| Complex::new(a, b)))
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(FockBasis::new(1, 5).unwrap().len(), 6);
        assert_eq!(FockBasis::new(2, 3).unwrap().len(), 10);
        assert_eq!(FockBasis::new(3, 2).unwrap().len(), 10);
        assert!(matches!(FockBasis::new(4, 2), Err(Error::TooManyModes(4))));
        let b = FockBasis::new(2, 2).unwrap();
        assert_eq!(b.states()[0], [0, 0, 0]);
        assert_eq!(b.states()[1], [1, 0, 0]);
        assert_eq!(b.index(&[0, 2]), Some(5));
    }

    #[test]
    fn zero_coherent_vector_is_vacuum() {
        let c = coherent_vector(&DVector::zeros(2), 10).unwrap();
        assert_eq!(c.norm_sq(), 1.0);
        assert_eq!(c.coeffs[0], Complex::new(1.0, 0.0));
        assert_eq!(c.tail, 0.0);
    }

    #[test]
    fn exponential_tail_matches_complement() {
        let x: f64 = 2.0;
        let head: f64 = (0..=5).map(|k| x.powi(k) / (1..=k).map(|j| j as f64).product::<f64>()).sum();
        assert!((exponential_tail(x, 5) - (x.exp() - head)).abs() < 1e-13);
    }

    #[test]
    fn small_cutoff_is_refused() {
        let phi = v(&[(1.5, 0.0)]);
        assert!(matches!(coherent_vector(&phi, 4), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn weyl_of_zero_is_identity() {
        let c = coherent_vector(&v(&[(0.3, -0.2), (0.1, 0.4)]), 20).unwrap();
        let w = weyl_apply(&DVector::zeros(2), &c).unwrap();
        assert!(w.distance(&c) < 1e-15);
    }

    #[test]
    fn number_state_displacement() {
        // <1|W(z)|0> = z e^{-|z|²/2}
        let z = Complex::new(0.4, 0.3);
        let basis = Arc::new(FockBasis::new(1, 30).unwrap());
        let w = weyl_apply(&DVector::from_element(1, z), &TruncatedFockVector::vacuum(basis)).unwrap();
        assert!((w.coeffs[1] - z * (-0.5 * z.norm_sqr()).exp()).norm() < 1e-14);
    }
}
