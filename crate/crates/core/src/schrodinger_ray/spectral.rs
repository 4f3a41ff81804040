//! The momentum picture `L²(ℝ₊, p dp)` with `φ̂(p) = (2π)^{-1/2} ∫ φ(x) e^{ipx} dx`.
//!
//! In this convention `U(s)` multiplies `φ̂` by `e^{ips}` and
//! `Im<φ, ψ> = ½ ∫ φ'ψ dx`.

use super::packet::{merged_knots, poly, WavePacket};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::composite;
use nalgebra::{Complex, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Composite Gauss–Legendre grid: one panel on `[0, p_min]`, geometric panels up to
/// `knee`, then equal panels up to `p_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub p_min: f64,
    pub knee: f64,
    pub p_max: f64,
    pub panels: usize,
    pub linear_panels: usize,
    pub order: usize,
    /// Largest accepted tail bound relative to `‖φ‖²`.
    pub tail_limit: f64,
}

impl SpectralGrid {
    pub const P_MIN: f64 = 1e-4;
    /// `knee · support width`.
    pub const KNEE: f64 = 64.0;
    /// `p_max · support width`.
    pub const BANDWIDTH: f64 = 32768.0;
    pub const PANELS: usize = 256;
    /// One oscillation of `e^{ipx}` across the support per panel.
    pub const LINEAR_PANELS: usize = 5205;
    pub const ORDER: usize = 16;
    pub const TAIL_LIMIT: f64 = 1e-5;

    pub fn for_width(width: f64) -> Self {
        let width = width.max(1e-12);
        SpectralGrid {
            p_min: Self::P_MIN,
            knee: Self::KNEE / width,
            p_max: Self::BANDWIDTH / width,
            panels: Self::PANELS,
            linear_panels: Self::LINEAR_PANELS,
            order: Self::ORDER,
            tail_limit: Self::TAIL_LIMIT,
        }
    }

    /// Grid sized for the union of the packets' supports.
    pub fn for_packets(packets: &[&WavePacket]) -> Self {
        let (lo, hi) = packets
            .iter()
            .filter_map(|p| p.support())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| (l.min(a), h.max(b)));
        let width = if hi > lo { hi - lo } else { 1.0 };
        Self::for_width(width)
    }

    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let knee = self.knee.clamp(self.p_min, self.p_max);
        let (l0, l1) = (self.p_min.ln(), knee.ln());
        let mut edges = vec![0.0];
        edges.extend((0..=self.panels).map(|j| (l0 + (l1 - l0) * j as f64 / self.panels as f64).exp()));
        if self.p_max > knee && self.linear_panels > 0 {
            let h = (self.p_max - knee) / self.linear_panels as f64;
            edges.extend((1..=self.linear_panels).map(|j| knee + h * j as f64));
        }
        composite(&edges, self.order)
    }
}

/// Samples of `φ̂` on a grid with plain `dp` weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSamples {
    pub p: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
    /// Upper bound on `∫_{p_max}^∞ p |φ̂|² dp`.
    pub tail_bound: f64,
}

impl SpectralSamples {
    /// `Σ w p |φ̂|²`.
    pub fn norm_sq(&self) -> f64 {
        self.p
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((p, w), v)| w * p * v.norm_sqr())
            .sum()
    }

    /// `Σ w p φ̂ conj(ψ̂)`; both sample sets must share the grid.
    pub fn inner(&self, other: &SpectralSamples) -> C64 {
        self.p
            .iter()
            .zip(&self.weights)
            .zip(self.values.iter().zip(&other.values))
            .map(|((p, w), (a, b))| a * b.conj() * (w * p))
            .sum()
    }

    /// `<φ, Xφ> = Σ w p² |φ̂|²`.
    pub fn generator_expectation(&self) -> f64 {
        self.p
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((p, w), v)| w * p * p * v.norm_sqr())
            .sum()
    }

    /// The isometric image `√(w p) φ̂` in `ℂ^M`.
    pub fn as_vector(&self) -> DVector<C64> {
        DVector::from_iterator(
            self.p.len(),
            self.p
                .iter()
                .zip(&self.weights)
                .zip(&self.values)
                .map(|((p, w), v)| v * (w * p).sqrt()),
        )
    }
}

/// `∫_0^h t^k e^{ipt} dt` for `k = 0..=3`.
fn monomial_transforms(p: f64, h: f64) -> [C64; 4] {
    let mut out = [Complex::new(0.0, 0.0); 4];
    let ph = p * h;
    if ph.abs() < 1.0 {
        // power series in iph
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = Complex::new(1.0, 0.0);
            let mut sum = Complex::new(0.0, 0.0);
            for m in 0..40 {
                if m > 0 {
                    term *= Complex::new(0.0, ph) / m as f64;
                }
                let add = term / (k + m + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 {
                    break;
                }
            }
            *slot = sum * h.powi(k as i32 + 1);
        }
    } else {
        let e = Complex::from_polar(1.0, ph);
        let ip = Complex::new(0.0, p);
        out[0] = (e - 1.0) / ip;
        for k in 1..4 {
            out[k] = (e * h.powi(k as i32) - out[k - 1] * k as f64) / ip;
        }
    }
    out
}

/// `φ̂(p)` by exact per-piece integration.
pub fn fourier_transform(phi: &WavePacket, p: f64) -> C64 {
    let mut total = Complex::new(0.0, 0.0);
    for (c, w) in phi.coeffs().iter().zip(phi.knots().windows(2)) {
        let m = monomial_transforms(p, w[1] - w[0]);
        let local: C64 = (0..4).map(|k| m[k] * c[k]).sum();
        total += Complex::from_polar(1.0, p * w[0]) * local;
    }
    total / (2.0 * PI).sqrt()
}

/// `Σ_{n,m≥1} a_n a_m P^{-(n+m)} / (n+m) / 2π`, with `a_n` the total jump of `φ^{(n)}`.
pub fn high_momentum_tail(phi: &WavePacket, p_max: f64) -> f64 {
    let mut a = [0.0; 4];
    for (_, j) in phi.jumps() {
        for n in 0..4 {
            a[n] += j[n].abs();
        }
    }
    let mut total = 0.0;
    for n in 1..4 {
        for m in 1..4 {
            total += a[n] * a[m] * p_max.powi(-((n + m) as i32)) / (n + m) as f64;
        }
    }
    total / (2.0 * PI)
}

pub fn spectral_embed(phi: &WavePacket, grid: &SpectralGrid) -> Result<SpectralSamples> {
    let (p, weights) = grid.nodes();
    let values: Vec<C64> = p.par_iter().map(|&pi| fourier_transform(phi, pi)).collect();
    let samples = SpectralSamples {
        p,
        weights,
        values,
        tail_bound: high_momentum_tail(phi, grid.p_max),
    };
    let limit = grid.tail_limit * samples.norm_sq();
    if samples.tail_bound > limit {
        return Err(Error::GridTooCoarse {
            tail: samples.tail_bound,
            limit,
        });
    }
    Ok(samples)
}

/// `½ ∫ φ'(x) ψ(x) dx`, exact.
pub fn position_symplectic_form(phi: &WavePacket, psi: &WavePacket) -> f64 {
    let knots = merged_knots(phi, psi);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let dp = poly::derivative(&phi.local_on(w[0], mid));
        let q = psi.local_on(w[0], mid);
        total += poly::integral(&poly::mul(&dp, &q), 0.0, w[1] - w[0]);
    }
    0.5 * total
}

/// `Im<φ, ψ>` evaluated in the momentum picture.
pub fn symplectic_form(phi: &WavePacket, psi: &WavePacket, grid: &SpectralGrid) -> Result<f64> {
    let a = spectral_embed(phi, grid)?;
    let b = spectral_embed(psi, grid)?;
    Ok(a.inner(&b).im)
}

/// One instance of `Δ^{-is} U(t) Δ^{is} φ = U(e^{2πs} t) φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationCheck {
    pub s: f64,
    pub t: f64,
    pub sup_difference: f64,
    pub knot_difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorReport {
    /// `Σ w p² |φ̂|²`.
    pub momentum_expectation: f64,
    /// `½ ∫ φ'²`.
    pub position_expectation: f64,
    /// `max |(U(s)φ)^ - e^{ips} φ̂|` over the grid, at the probe shift.
    pub translation_residual: f64,
    pub probe_shift: f64,
    pub relations: Vec<RelationCheck>,
}

/// `Δ^{is}` acts on the half line as the dilation `V(2πs)`.
pub fn modular_flow(phi: &WavePacket, s: f64) -> WavePacket {
    phi.dilate(2.0 * PI * s)
}

pub fn translation_generator_check(
    phi: &WavePacket,
    grid: &SpectralGrid,
    relations: &[(f64, f64)],
) -> Result<GeneratorReport> {
    let probe_shift = 0.5;
    let base = spectral_embed(phi, grid)?;
    let shifted = spectral_embed(&phi.translate(probe_shift), grid)?;
    let translation_residual = base
        .p
        .iter()
        .zip(base.values.iter().zip(&shifted.values))
        .map(|(&p, (a, b))| (b - a * Complex::from_polar(1.0, p * probe_shift)).norm())
        .fold(0.0_f64, f64::max);
    let relations = relations
        .iter()
        .map(|&(s, t)| {
            let lhs = modular_flow(&modular_flow(phi, s).translate(t), -s);
            let rhs = phi.translate((2.0 * PI * s).exp() * t);
            RelationCheck {
                s,
                t,
                sup_difference: lhs.sup_distance(&rhs),
                knot_difference: lhs.knot_distance(&rhs),
            }
        })
        .collect();
    Ok(GeneratorReport {
        momentum_expectation: base.generator_expectation(),
        position_expectation: 0.5 * phi.dirichlet_energy(),
        translation_residual,
        probe_shift,
        relations,
    })
}
