use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Dense polynomial helpers; coefficients are in increasing degree.
pub(crate) mod poly {
    pub fn eval(c: &[f64], t: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
    }

    pub fn derivative(c: &[f64]) -> Vec<f64> {
        c.iter()
            .enumerate()
            .skip(1)
            .map(|(k, &ck)| k as f64 * ck)
            .collect()
    }

    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    /// `∫_{t0}^{t1} p(t) dt`.
    pub fn integral(c: &[f64], t0: f64, t1: f64) -> f64 {
        let prim = |t: f64| {
            c.iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * t + ck / (k as f64 + 1.0))
                * t
        };
        prim(t1) - prim(t0)
    }

    /// Coefficients of `t ↦ p(α + βt)`.
    pub fn affine(c: &[f64; 4], alpha: f64, beta: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        // Taylor coefficients at α
        const BINOM: [[f64; 4]; 4] = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0],
            [1.0, 3.0, 3.0, 1.0],
        ];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in k..4 {
                s += BINOM[j][k] * c[j] * alpha.powi((j - k) as i32);
            }
            *slot = s * beta.powi(k as i32);
        }
        out
    }
}

const CONTINUITY_TOL: f64 = 1e-10;

/// A compactly supported real `C⁰` piecewise cubic.
///
/// Piece `i` lives on `[knots[i], knots[i+1]]` and is stored in the local
/// variable `t = x - knots[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    knots: Vec<f64>,
    coeffs: Vec<[f64; 4]>,
}

impl WavePacket {
    pub fn zero() -> Self {
        WavePacket {
            knots: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    /// Validates knots, continuity and vanishing at the ends.
    pub fn from_pieces(knots: Vec<f64>, coeffs: Vec<[f64; 4]>) -> Result<Self> {
        if knots.is_empty() && coeffs.is_empty() {
            return Ok(Self::zero());
        }
        if knots.len() < 2 || coeffs.len() + 1 != knots.len() {
            return Err(Error::InvalidPacket(format!(
                "{} knots for {} pieces",
                knots.len(),
                coeffs.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) || coeffs.iter().flatten().any(|c| !c.is_finite())
        {
            return Err(Error::InvalidPacket("non-finite data".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPacket("knots must be strictly increasing".into()));
        }
        let packet = WavePacket { knots, coeffs };
        let scale = packet
            .knots
            .iter()
            .map(|&k| packet.value(k).abs())
            .fold(1.0_f64, f64::max);
        for (i, jump) in packet.jumps().iter().enumerate() {
            if jump.1[0].abs() > CONTINUITY_TOL * scale {
                return Err(Error::InvalidPacket(format!(
                    "discontinuous at knot {i} (x = {}): jump {:e}",
                    jump.0, jump.1[0]
                )));
            }
        }
        Ok(packet)
    }

    /// Cubic Hermite interpolant of values and derivatives at the knots.
    pub fn hermite(knots: &[f64], values: &[f64], derivs: &[f64]) -> Result<Self> {
        if knots.len() != values.len() || knots.len() != derivs.len() {
            return Err(Error::InvalidPacket(
                "knots, values and derivs must have equal length".into(),
            ));
        }
        if knots.len() < 2 {
            return Err(Error::InvalidPacket("need at least two knots".into()));
        }
        let coeffs = (0..knots.len() - 1)
            .map(|i| {
                let h = knots[i + 1] - knots[i];
                let (y0, y1, d0, d1) = (values[i], values[i + 1], derivs[i], derivs[i + 1]);
                let slope = (y1 - y0) / h;
                [
                    y0,
                    d0,
                    (3.0 * slope - 2.0 * d0 - d1) / h,
                    (d0 + d1 - 2.0 * slope) / (h * h),
                ]
            })
            .collect();
        Self::from_pieces(knots.to_vec(), coeffs)
    }

    pub fn piecewise_linear(knots: &[f64], values: &[f64]) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::InvalidPacket(
                "need matching knots and values, at least two".into(),
            ));
        }
        let coeffs = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| [v[0], (v[1] - v[0]) / (k[1] - k[0]), 0.0, 0.0])
            .collect();
        Self::from_pieces(knots.to_vec(), coeffs)
    }

    /// `0 → 1` on `[0, 1]`, `1 → 0` on `[1, 2]`.
    pub fn tent() -> Self {
        Self::piecewise_linear(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).expect("valid tent")
    }

    /// `C¹` smoothstep bump of the given height on `[center - halfwidth, center + halfwidth]`.
    pub fn bump(center: f64, halfwidth: f64, height: f64) -> Result<Self> {
        if halfwidth <= 0.0 {
            return Err(Error::InvalidPacket("halfwidth must be positive".into()));
        }
        Self::hermite(
            &[center - halfwidth, center, center + halfwidth],
            &[0.0, height, 0.0],
            &[0.0, 0.0, 0.0],
        )
    }

    /// Hermite interpolant of `height · exp(1 - 1/(1 - u²))`, `u = (x - center)/halfwidth`.
    pub fn exp_bump(center: f64, halfwidth: f64, height: f64, pieces: usize) -> Result<Self> {
        if halfwidth <= 0.0 || pieces < 2 {
            return Err(Error::InvalidPacket(
                "need positive halfwidth and at least two pieces".into(),
            ));
        }
        let knots: Vec<f64> = (0..=pieces)
            .map(|i| center - halfwidth + 2.0 * halfwidth * i as f64 / pieces as f64)
            .collect();
        let mut values = Vec::with_capacity(knots.len());
        let mut derivs = Vec::with_capacity(knots.len());
        for (i, &x) in knots.iter().enumerate() {
            let u = (x - center) / halfwidth;
            if i == 0 || i == pieces || u.abs() >= 1.0 {
                values.push(0.0);
                derivs.push(0.0);
            } else {
                let q = 1.0 - u * u;
                let f = height * (1.0 - 1.0 / q).exp();
                values.push(f);
                derivs.push(f * (-2.0 * u / (q * q)) / halfwidth);
            }
        }
        Self::hermite(&knots, &values, &derivs)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn coeffs(&self) -> &[[f64; 4]] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0.0)
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match (self.knots.first(), self.knots.last()) {
            (Some(&a), Some(&b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn width(&self) -> f64 {
        self.support().map_or(0.0, |(a, b)| b - a)
    }

    /// Piece `i` with `knots[i] <= x < knots[i+1]`.
    fn piece_right(&self, x: f64) -> Option<usize> {
        let (a, b) = self.support()?;
        if x < a || x >= b {
            return None;
        }
        Some(self.knots.partition_point(|&k| k <= x) - 1)
    }

    /// Piece `i` with `knots[i] < x <= knots[i+1]`.
    fn piece_left(&self, x: f64) -> Option<usize> {
        let (a, b) = self.support()?;
        if x <= a || x > b {
            return None;
        }
        Some(self.knots.partition_point(|&k| k < x) - 1)
    }

    /// Taylor coefficients of the piece to the right of `x`, centred at `x`.
    pub(crate) fn local_right(&self, x: f64) -> [f64; 4] {
        match self.piece_right(x) {
            Some(i) => poly::affine(&self.coeffs[i], x - self.knots[i], 1.0),
            None => [0.0; 4],
        }
    }

    fn local_left(&self, x: f64) -> [f64; 4] {
        match self.piece_left(x) {
            Some(i) => poly::affine(&self.coeffs[i], x - self.knots[i], 1.0),
            None => [0.0; 4],
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.piece_right(x).or_else(|| self.piece_left(x)) {
            Some(i) => poly::eval(&self.coeffs[i], x - self.knots[i]),
            None => 0.0,
        }
    }

    pub fn derivative_right(&self, x: f64) -> f64 {
        self.local_right(x)[1]
    }

    pub fn derivative_left(&self, x: f64) -> f64 {
        self.local_left(x)[1]
    }

    /// Right derivative; equals the derivative away from kinks.
    pub fn derivative(&self, x: f64) -> f64 {
        self.derivative_right(x)
    }

    /// Jumps `φ^{(n)}(x+) - φ^{(n)}(x-)`, `n = 0..=3`, at every knot.
    pub fn jumps(&self) -> Vec<(f64, [f64; 4])> {
        const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];
        self.knots
            .iter()
            .map(|&k| {
                let (l, r) = (self.local_left(k), self.local_right(k));
                let mut j = [0.0; 4];
                for n in 0..4 {
                    j[n] = (r[n] - l[n]) * FACT[n];
                }
                (k, j)
            })
            .collect()
    }

    /// Knots where the first derivative jumps.
    pub fn kinks(&self) -> Vec<f64> {
        let scale = self
            .knots
            .iter()
            .flat_map(|&k| [self.derivative_left(k).abs(), self.derivative_right(k).abs()])
            .fold(1.0_f64, f64::max);
        self.jumps()
            .into_iter()
            .filter(|(_, j)| j[1].abs() > 1e-12 * scale)
            .map(|(x, _)| x)
            .collect()
    }

    pub fn is_kink(&self, x: f64) -> bool {
        self.kinks().contains(&x)
    }

    /// `U(s)`: `x ↦ φ(x - s)`.
    pub fn translate(&self, s: f64) -> Self {
        WavePacket {
            knots: self.knots.iter().map(|k| k + s).collect(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// The unitary dilation `x ↦ φ(e^t x)`.
    pub fn dilate(&self, t: f64) -> Self {
        let (shrink, grow) = ((-t).exp(), t.exp());
        WavePacket {
            knots: self.knots.iter().map(|k| k * shrink).collect(),
            coeffs: self.coeffs.iter().map(|c| poly::affine(c, 0.0, grow)).collect(),
        }
    }

    /// `x ↦ e^{-t} φ(e^t x)`, the action with the extra prefactor.
    pub fn dilate_literal(&self, t: f64) -> Self {
        self.dilate(t).scale((-t).exp())
    }

    /// `x ↦ φ(-x)`.
    pub fn reflect(&self) -> Self {
        let n = self.coeffs.len();
        let knots = self.knots.iter().rev().map(|k| -k).collect();
        let coeffs = (0..n)
            .rev()
            .map(|i| {
                let h = self.knots[i + 1] - self.knots[i];
                poly::affine(&self.coeffs[i], h, -1.0)
            })
            .collect();
        WavePacket { knots, coeffs }
    }

    pub fn scale(&self, c: f64) -> Self {
        WavePacket {
            knots: self.knots.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|p| [c * p[0], c * p[1], c * p[2], c * p[3]])
                .collect(),
        }
    }

    /// `aφ + bψ` on the merged knot set.
    pub fn linear_combination(&self, a: f64, other: &WavePacket, b: f64) -> Self {
        let knots = merged_knots(self, other);
        if knots.len() < 2 {
            return Self::zero();
        }
        let mut coeffs: Vec<[f64; 4]> = knots
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let p = self.local_on(w[0], mid);
                let q = other.local_on(w[0], mid);
                [
                    a * p[0] + b * q[0],
                    a * p[1] + b * q[1],
                    a * p[2] + b * q[2],
                    a * p[3] + b * q[3],
                ]
            })
            .collect();
        let mut knots = knots;
        while coeffs.last().is_some_and(|c| c.iter().all(|&x| x == 0.0)) {
            coeffs.pop();
            knots.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.iter().all(|&x| x == 0.0)).count();
        coeffs.drain(..lead);
        knots.drain(..lead);
        if coeffs.is_empty() {
            return Self::zero();
        }
        WavePacket { knots, coeffs }
    }

    pub fn add(&self, other: &WavePacket) -> Self {
        self.linear_combination(1.0, other, 1.0)
    }

    /// Taylor coefficients at `x0` of the piece containing `probe`.
    pub(crate) fn local_on(&self, x0: f64, probe: f64) -> [f64; 4] {
        match self.piece_right(probe) {
            Some(i) => poly::affine(&self.coeffs[i], x0 - self.knots[i], 1.0),
            None => [0.0; 4],
        }
    }

    /// Sup-norm distance, sampled at knots and interior points of the merged pieces.
    pub fn sup_distance(&self, other: &WavePacket) -> f64 {
        let knots = merged_knots(self, other);
        let mut worst = 0.0_f64;
        for w in knots.windows(2) {
            for j in 0..=16 {
                let x = w[0] + (w[1] - w[0]) * j as f64 / 16.0;
                worst = worst.max((self.value(x) - other.value(x)).abs());
            }
        }
        worst
    }

    /// Largest difference in knots and coefficients, if the knot counts agree.
    pub fn knot_distance(&self, other: &WavePacket) -> Option<f64> {
        if self.knots.len() != other.knots.len() {
            return None;
        }
        let dk = self
            .knots
            .iter()
            .zip(&other.knots)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let dc = self
            .coeffs
            .iter()
            .flatten()
            .zip(other.coeffs.iter().flatten())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        Some(dk.max(dc))
    }

    /// `∫ φ'(x)² dx`.
    pub fn dirichlet_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.knots.windows(2))
            .map(|(c, w)| {
                let d = poly::derivative(c);
                poly::integral(&poly::mul(&d, &d), 0.0, w[1] - w[0])
            })
            .sum()
    }
}

/// Sorted union of knots, merging coincident values.
pub(crate) fn merged_knots(a: &WavePacket, b: &WavePacket) -> Vec<f64> {
    let mut all: Vec<f64> = a.knots.iter().chain(&b.knots).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * x.abs().max(y.abs()).max(1.0));
    all
}

/// JSON form of a packet: Hermite data or a named shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PacketSpec {
    Named(NamedPacket),
    Hermite {
        knots: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NamedPacket {
    Tent,
    Bump {
        center: f64,
        halfwidth: f64,
        height: f64,
    },
    ExpBump {
        center: f64,
        halfwidth: f64,
        height: f64,
        #[serde(default = "default_pieces")]
        pieces: usize,
    },
    PiecewiseLinear {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

fn default_pieces() -> usize {
    32
}

impl PacketSpec {
    pub fn build(&self) -> Result<WavePacket> {
        match self {
            PacketSpec::Hermite {
                knots,
                values,
                derivs,
            } => WavePacket::hermite(knots, values, derivs),
            PacketSpec::Named(NamedPacket::Tent) => Ok(WavePacket::tent()),
            PacketSpec::Named(NamedPacket::Bump {
                center,
                halfwidth,
                height,
            }) => WavePacket::bump(*center, *halfwidth, *height),
            PacketSpec::Named(NamedPacket::ExpBump {
                center,
                halfwidth,
                height,
                pieces,
            }) => WavePacket::exp_bump(*center, *halfwidth, *height, *pieces),
            PacketSpec::Named(NamedPacket::PiecewiseLinear { knots, values }) => {
                WavePacket::piecewise_linear(knots, values)
            }
        }
    }
}
