use super::{boost_flow, kruskal_flow, KruskalPoint, MinkowskiPoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Width of the equality band for points on a null surface.
pub const SURFACE_BAND: f64 = 1e-10;

/// A non-negative smooth profile on the transverse plane or the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Constant { value: f64 },
    /// `coef · ‖y‖²`.
    Quadratic { coef: f64 },
    /// `height · exp(1 - 1 / (1 - |y - center|² / radius²))` inside the ball, zero outside.
    /// On the sphere `center` is a unit vector and `|y - center|` the chordal distance.
    Bump {
        center: [f64; 3],
        radius: f64,
        height: f64,
    },
}

impl Profile {
    pub fn eval(&self, y: &[f64]) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value,
            Profile::Quadratic { coef } => coef * y.iter().map(|v| v * v).sum::<f64>(),
            Profile::Bump {
                center,
                radius,
                height,
            } => {
                let d2: f64 = y.iter().zip(center.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                let u = d2 / (radius * radius);
                if u >= 1.0 {
                    0.0
                } else {
                    height * (1.0 - 1.0 / (1.0 - u)).exp()
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Profile::Zero | Profile::Constant { .. })
    }

    /// Upper bound of the profile over `|y_i| ≤ half_width`.
    pub fn max_on(&self, half_width: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value,
            Profile::Quadratic { coef } => coef * 2.0 * half_width * half_width,
            Profile::Bump { height, .. } => height,
        }
    }
}

/// Open regions of Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    /// `x1 > |x0|`.
    Wedge,
    /// `W₀ + (a, a, 0, 0)`.
    LightlikeTranslatedWedge { shift: f64 },
    /// `|x0 - f(y)| < x1 - f(y)`.
    DeformedWedge { f: Profile },
    /// `(λ, λ, 0, 0) + W_f`.
    TranslatedDeformedWedge { f: Profile, lambda: f64 },
    /// The positive boost orbit of the null surface `x0 + x1 = 2(f(y) + λ)`, `x1 > f(y) + λ`.
    Strip { f: Profile, lambda: f64 },
}

impl Region {
    pub fn contains(&self, p: &MinkowskiPoint) -> bool {
        match *self {
            Region::Wedge => p.x1() > p.x0().abs(),
            Region::LightlikeTranslatedWedge { shift } => p.x1() - shift > (p.x0() - shift).abs(),
            Region::DeformedWedge { f } => {
                let fy = f.eval(&p.y());
                (p.x0() - fy).abs() < p.x1() - fy
            }
            Region::TranslatedDeformedWedge { f, lambda } => {
                let c = f.eval(&p.y()) + lambda;
                (p.x0() - c).abs() < p.x1() - c
            }
            Region::Strip { f, lambda } => strip_membership(f, lambda, p),
        }
    }

    /// Lower bounds on `x1` and `x0 + x1` for points of the region inside the transverse box.
    pub(crate) fn x1_floor(&self) -> f64 {
        match *self {
            Region::Wedge | Region::DeformedWedge { .. } => 0.0,
            Region::LightlikeTranslatedWedge { shift } => shift,
            Region::TranslatedDeformedWedge { lambda, .. } | Region::Strip { lambda, .. } => lambda,
        }
    }
}

/// `x0 = -x1 + 2(f(y) + λ)` within the band, with `x1 > f(y) + λ`.
pub fn strip_surface_membership(f: Profile, lambda: f64, p: &MinkowskiPoint) -> bool {
    let c = f.eval(&p.y()) + lambda;
    (p.plus() - 2.0 * c).abs() <= SURFACE_BAND * (1.0 + c.abs()) && p.x1() > c
}

/// The `s` with `Λ_{-s}(p)` on the null surface of the strip, by bisection of
/// `g(s) = (Λ_{-s} p)⁺ - 2(f(y) + λ)`.
pub fn strip_orbit_root(f: Profile, lambda: f64, p: &MinkowskiPoint) -> Result<f64> {
    let c = f.eval(&p.y()) + lambda;
    let g = |s: f64| boost_flow(-s, p).plus() - 2.0 * c;
    let g0 = g(0.0);
    let s_max = if p.plus() > 0.0 && c > 0.0 {
        (p.plus() / (2.0 * c)).ln().max(0.0) + 1.0
    } else {
        1.0
    };
    let gm = g(s_max);
    if g0.abs() <= SURFACE_BAND * (1.0 + c.abs()) {
        return Ok(0.0);
    }
    if !(g0 > 0.0 && gm < 0.0) {
        return Err(Error::RootNotBracketed {
            at_zero: g0,
            at_max: gm,
        });
    }
    let probes = 16;
    let mut prev = g0;
    for k in 1..=probes {
        let cur = g(s_max * k as f64 / probes as f64);
        if cur > prev {
            return Err(Error::AmbiguousRoot);
        }
        prev = cur;
    }
    let (mut lo, mut hi) = (0.0, s_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * s_max {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `p = Λ_s(q)` for some `s > 0` and `q` on the strip surface.
pub fn strip_membership(f: Profile, lambda: f64, p: &MinkowskiPoint) -> bool {
    match strip_orbit_root(f, lambda, p) {
        Ok(s) if s > 0.0 => {
            let q = boost_flow(-s, p);
            q.x1() > f.eval(&q.y()) + lambda
        }
        _ => false,
    }
}

/// Open regions of the Kruskal chart, at each sphere point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KruskalRegion {
    /// `x > |t|`.
    RightWedge,
    /// `W₊ + (λ, λ)`.
    TranslatedWedge { lambda: f64 },
    /// `|t - f(Ω) - λ| < x - f(Ω) - λ`: the positive orbit of the translated deformed horizon.
    DeformedStrip { f: Profile, lambda: f64 },
}

impl KruskalRegion {
    pub fn contains(&self, p: &KruskalPoint) -> bool {
        let c = match *self {
            KruskalRegion::RightWedge => 0.0,
            KruskalRegion::TranslatedWedge { lambda } => lambda,
            KruskalRegion::DeformedStrip { f, lambda } => f.eval(&p.omega) + lambda,
        };
        (p.t - c).abs() < p.x - c
    }

    /// Membership decided through the orbit: `Λ_{-s} p` lies on `t + x = 2c`, `x > c` for some `s > 0`.
    pub fn contains_by_orbit(&self, mass: f64, p: &KruskalPoint) -> bool {
        let c = match *self {
            KruskalRegion::RightWedge => 0.0,
            KruskalRegion::TranslatedWedge { lambda } => lambda,
            KruskalRegion::DeformedStrip { f, lambda } => f.eval(&p.omega) + lambda,
        };
        let plus = p.t + p.x;
        if !(plus > 2.0 * c) || c <= 0.0 {
            return false;
        }
        let s = 4.0 * mass * (plus / (2.0 * c)).ln();
        match kruskal_flow(-s, mass, p) {
            Ok(q) => q.x > c,
            Err(_) => false,
        }
    }
}
