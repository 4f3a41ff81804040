use super::packet::{merged_knots, poly, WavePacket};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// `π ∫_λ^∞ (x - λ) φ'(x)² dx`, exact per piece.
pub fn entropy_at(phi: &WavePacket, lambda: f64) -> f64 {
    let mut total = 0.0;
    for (c, w) in phi.coeffs().iter().zip(phi.knots().windows(2)) {
        let (a, b) = (w[0], w[1]);
        if b <= lambda {
            continue;
        }
        let d = poly::derivative(c);
        let integrand = poly::mul(&[a - lambda, 1.0], &poly::mul(&d, &d));
        total += poly::integral(&integrand, (lambda - a).max(0.0), b - a);
    }
    PI * total
}

/// `-π ∫_λ^∞ φ'(x)² dx`.
pub fn entropy_derivative_at(phi: &WavePacket, lambda: f64) -> f64 {
    let mut total = 0.0;
    for (c, w) in phi.coeffs().iter().zip(phi.knots().windows(2)) {
        let (a, b) = (w[0], w[1]);
        if b <= lambda {
            continue;
        }
        let d = poly::derivative(c);
        total += poly::integral(&poly::mul(&d, &d), (lambda - a).max(0.0), b - a);
    }
    -PI * total
}

/// `π φ'(λ)²`; refuses kink knots, reporting both one-sided values.
pub fn entropy_second_derivative_at(phi: &WavePacket, lambda: f64) -> Result<f64> {
    let right = PI * phi.derivative_right(lambda).powi(2);
    if phi.is_kink(lambda) {
        let left = PI * phi.derivative_left(lambda).powi(2);
        return Err(Error::KinkPoint {
            at: lambda,
            left,
            right,
        });
    }
    Ok(right)
}

/// `π ∫_λ^∞ ψ'(x)(x - λ)φ'(x) dx`, the polarized entropy form.
pub fn modular_generator_form(phi: &WavePacket, psi: &WavePacket, lambda: f64) -> f64 {
    let knots = merged_knots(phi, psi);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= lambda {
            continue;
        }
        let mid = 0.5 * (a + b);
        let dp = poly::derivative(&phi.local_on(a, mid));
        let dq = poly::derivative(&psi.local_on(a, mid));
        let integrand = poly::mul(&[a - lambda, 1.0], &poly::mul(&dp, &dq));
        total += poly::integral(&integrand, (lambda - a).max(0.0), b - a);
    }
    PI * total
}

/// `S`, `S'` and `S''` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub lambda: Vec<f64>,
    pub s: Vec<f64>,
    pub ds: Vec<f64>,
    /// Right-sided at kinks, see `kink`.
    pub d2s: Vec<f64>,
    pub kink: Vec<bool>,
    /// Divided second difference at interior grid points.
    pub convexity_margin: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityViolation {
    pub lambda: f64,
    pub second_difference: f64,
}

pub fn entropy_profile(phi: &WavePacket, grid: &[f64]) -> Result<EntropyProfile> {
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("λ grid must be finite and strictly increasing".into()));
    }
    let rows: Vec<(f64, f64, f64, bool)> = grid
        .par_iter()
        .map(|&l| {
            let kink = phi.is_kink(l);
            let d2 = PI * phi.derivative_right(l).powi(2);
            (entropy_at(phi, l), entropy_derivative_at(phi, l), d2, kink)
        })
        .collect();
    let s: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let n = grid.len();
    let convexity_margin = (0..n)
        .map(|i| {
            (i > 0 && i + 1 < n).then(|| {
                let (h1, h2) = (grid[i] - grid[i - 1], grid[i + 1] - grid[i]);
                2.0 * ((s[i + 1] - s[i]) / h2 - (s[i] - s[i - 1]) / h1) / (h1 + h2)
            })
        })
        .collect();
    Ok(EntropyProfile {
        lambda: grid.to_vec(),
        ds: rows.iter().map(|r| r.1).collect(),
        d2s: rows.iter().map(|r| r.2).collect(),
        kink: rows.iter().map(|r| r.3).collect(),
        s,
        convexity_margin,
    })
}

/// Grid points whose divided second difference falls below `-tol`.
pub fn convexity_check(profile: &EntropyProfile, tol: f64) -> Vec<ConvexityViolation> {
    profile
        .lambda
        .iter()
        .zip(&profile.convexity_margin)
        .filter_map(|(&lambda, m)| match m {
            Some(v) if *v < -tol => Some(ConvexityViolation {
                lambda,
                second_difference: *v,
            }),
            _ => None,
        })
        .collect()
}

impl EntropyProfile {
    /// CSV with columns `lambda,S,dS,d2S,convexity_margin`; endpoint margins are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,S,dS,d2S,convexity_margin\n");
        for i in 0..self.lambda.len() {
            let margin = self.convexity_margin[i].map_or(String::new(), |m| format!("{m:e}"));
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{}",
                self.lambda[i], self.s[i], self.ds[i], self.d2s[i], margin
            );
        }
        out
    }
}
