use super::entropy::entropy_at;
use super::packet::WavePacket;
use super::spectral::{spectral_embed, SpectralGrid};
use crate::error::{Error, Result};
use crate::standard_subspace::{entropy, ComplexSpace, RealSubspace};
use serde::Serialize;

/// The first `count` members of the dyadic sequence of `C¹` bumps on `[λ, λ + 4]`:
/// one bump on the whole interval, then two on the halves, four on the quarters, and so on.
pub fn default_family(lambda: f64, count: usize) -> Vec<WavePacket> {
    let mut out = Vec::with_capacity(count);
    let mut level = 0;
    while out.len() < count {
        let pieces = 1usize << level;
        let half = 2.0 / pieces as f64;
        for j in 0..pieces {
            if out.len() == count {
                break;
            }
            let center = lambda + half * (2 * j + 1) as f64;
            out.push(WavePacket::bump(center, half, 1.0).expect("positive halfwidth"));
        }
        level += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub lambda: f64,
    /// `entropy_at(φ, λ)`.
    pub target: f64,
    pub sizes: Vec<usize>,
    /// Entropy of `φ` relative to the real span of the first `size` family members.
    pub bounds: Vec<f64>,
    /// Largest drop between consecutive bounds (zero when monotone).
    pub max_decrease: f64,
    /// Largest excess of a bound over the target (zero when all bounds are below it).
    pub max_excess: f64,
    /// `bounds.last() / target`.
    pub ratio: f64,
}

impl CrossCheckReport {
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.max_decrease <= tol
    }

    pub fn is_bounded(&self, tol: f64) -> bool {
        self.max_excess <= tol
    }
}

/// Lower bounds on `S(λ)` from finite-dimensional subspaces spanned by a packet family.
///
/// Prefixes of `family` of the given sizes are embedded in momentum space and
/// their real span is handed to the finite-dimensional entropy.
pub fn discretized_cross_check(
    phi: &WavePacket,
    lambda: f64,
    family: &[WavePacket],
    sizes: &[usize],
) -> Result<CrossCheckReport> {
    for (i, f) in family.iter().enumerate() {
        if let Some((a, _)) = f.support() {
            if a < lambda {
                return Err(Error::InvalidPacket(format!(
                    "family member {i} starts at {a} < λ = {lambda}"
                )));
            }
        }
    }
    let mut all: Vec<&WavePacket> = family.iter().collect();
    all.push(phi);
    let grid = SpectralGrid::for_packets(&all);
    let target_vec = spectral_embed(phi, &grid)?.as_vector();
    let embedded = family
        .iter()
        .map(|f| spectral_embed(f, &grid).map(|s| s.as_vector()))
        .collect::<Result<Vec<_>>>()?;
    let ambient = ComplexSpace::new(target_vec.len());
    let mut bounds = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let m = m.min(embedded.len());
        let k = RealSubspace::from_span(ambient, embedded[..m].to_vec())?;
        bounds.push(if m == 0 { 0.0 } else { entropy(&k, &target_vec)? });
    }
    let target = entropy_at(phi, lambda);
    let max_decrease = bounds
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0_f64, f64::max);
    let max_excess = bounds.iter().map(|b| b - target).fold(0.0_f64, f64::max);
    let ratio = match bounds.last() {
        Some(&b) if target > 0.0 => b / target,
        _ => 0.0,
    };
    Ok(CrossCheckReport {
        lambda,
        target,
        sizes: sizes.to_vec(),
        bounds,
        max_decrease,
        max_excess,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_nested_dyadic() {
        let f = default_family(1.0, 4);
        assert_eq!(f[0].support(), Some((1.0, 5.0)));
        assert_eq!(f[1].support(), Some((1.0, 3.0)));
        assert_eq!(f[2].support(), Some((3.0, 5.0)));
        assert_eq!(f[3].support(), Some((1.0, 2.0)));
    }

    #[test]
    fn empty_family_and_single_vector() {
        let t = WavePacket::tent();
        let r = discretized_cross_check(&t, 0.0, std::slice::from_ref(&t), &[0, 1]).unwrap();
        assert_eq!(r.bounds[0], 0.0);
        // ℝφ is abelian and contains φ
        assert!(r.bounds[1].abs() < 1e-10);
    }

    #[test]
    fn family_left_of_lambda_is_refused() {
        let t = WavePacket::tent();
        assert!(discretized_cross_check(&t, 0.5, std::slice::from_ref(&t), &[1]).is_err());
    }
}
