//! Wedges, deformed wedges and strips under Killing flows on Minkowski space
//! and on the Kruskal extension of Schwarzschild.

mod regions;
mod rng;
mod sweep;

pub use regions::{
    strip_membership, strip_orbit_root, strip_surface_membership, KruskalRegion, Profile, Region,
    SURFACE_BAND,
};
pub use rng::sample_rng;
pub use sweep::{
    achronality_check, causal_convexity_check, half_invariance_check, kruskal_half_invariance_check,
    strip_equivalence_check, wedge_hull_check, CheckReport, SamplingBox, Violation,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of Minkowski space, signature `(-, +, +, +)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiPoint(pub [f64; 4]);

impl MinkowskiPoint {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        MinkowskiPoint([x0, x1, x2, x3])
    }

    pub fn x0(&self) -> f64 {
        self.0[0]
    }

    pub fn x1(&self) -> f64 {
        self.0[1]
    }

    pub fn y(&self) -> [f64; 2] {
        [self.0[2], self.0[3]]
    }

    pub fn add(&self, v: [f64; 4]) -> Self {
        MinkowskiPoint(std::array::from_fn(|i| self.0[i] + v[i]))
    }

    pub fn sub(&self, other: &MinkowskiPoint) -> [f64; 4] {
        std::array::from_fn(|i| self.0[i] - other.0[i])
    }

    /// `x0 + x1`.
    pub fn plus(&self) -> f64 {
        self.0[0] + self.0[1]
    }

    /// `x0 - x1`.
    pub fn minus(&self) -> f64 {
        self.0[0] - self.0[1]
    }
}

/// `-v0² + v1² + v2² + v3²`.
pub fn minkowski_square(v: &[f64; 4]) -> f64 {
    -v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]
}

/// Kruskal–Szekeres coordinates `(t, x)` with `x² - t² > -1` and a point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalPoint {
    pub t: f64,
    pub x: f64,
    pub omega: [f64; 3],
}

impl KruskalPoint {
    pub fn new(t: f64, x: f64, omega: [f64; 3]) -> Result<Self> {
        let q = x * x - t * t;
        if !(q > -1.0) {
            return Err(Error::OutsideChart(q));
        }
        let n = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidGrid("sphere point must be nonzero".into()));
        }
        Ok(KruskalPoint {
            t,
            x,
            omega: omega.map(|w| w / n),
        })
    }

    /// `x² - t²`.
    pub fn quadratic(&self) -> f64 {
        self.x * self.x - self.t * self.t
    }

    pub fn radius(&self, mass: f64) -> Result<f64> {
        schwarzschild_radius(self.t, self.x, mass)
    }
}

/// The boost `x0 ↦ x0 cosh s + x1 sinh s`, `x1 ↦ x0 sinh s + x1 cosh s`.
pub fn boost_flow(s: f64, p: &MinkowskiPoint) -> MinkowskiPoint {
    let (c, sh) = (s.cosh(), s.sinh());
    let [x0, x1, x2, x3] = p.0;
    MinkowskiPoint([c * x0 + sh * x1, sh * x0 + c * x1, x2, x3])
}

/// Translation by `s·v`.
pub fn translation_flow(s: f64, v: [f64; 4], p: &MinkowskiPoint) -> MinkowskiPoint {
    p.add(v.map(|x| s * x))
}

/// Schwarzschild time translation: a boost of `(t, x)` with rapidity `s / 4M`.
pub fn kruskal_flow(s: f64, mass: f64, p: &KruskalPoint) -> Result<KruskalPoint> {
    let a = s / (4.0 * mass);
    let (c, sh) = (a.cosh(), a.sinh());
    let out = KruskalPoint {
        t: c * p.t + sh * p.x,
        x: sh * p.t + c * p.x,
        omega: p.omega,
    };
    let q = out.quadratic();
    if !(q > -1.0) {
        return Err(Error::LeavesChart(q));
    }
    Ok(out)
}

/// The chart and its one-parameter isometry group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum KillingFlowChart {
    MinkowskiBoost,
    MinkowskiTranslation { direction: [f64; 4] },
    KruskalTime { mass: f64 },
}

impl KillingFlowChart {
    pub fn flow_minkowski(&self, s: f64, p: &MinkowskiPoint) -> Option<MinkowskiPoint> {
        match *self {
            KillingFlowChart::MinkowskiBoost => Some(boost_flow(s, p)),
            KillingFlowChart::MinkowskiTranslation { direction } => {
                Some(translation_flow(s, direction, p))
            }
            KillingFlowChart::KruskalTime { .. } => None,
        }
    }

    pub fn flow_kruskal(&self, s: f64, p: &KruskalPoint) -> Option<Result<KruskalPoint>> {
        match *self {
            KillingFlowChart::KruskalTime { mass } => Some(kruskal_flow(s, mass, p)),
            _ => None,
        }
    }
}

/// `r > 0` with `x² - t² = e^{r/2M} (r/2M - 1)`.
pub fn schwarzschild_radius(t: f64, x: f64, mass: f64) -> Result<f64> {
    let q = x * x - t * t;
    if !(q > -1.0) {
        return Err(Error::OutsideChart(q));
    }
    if !(mass > 0.0) {
        return Err(Error::NonPositiveParameters(format!("M = {mass}")));
    }
    // F(ρ) = e^ρ (ρ - 1) is increasing on ρ > 0 from -1
    let f = |rho: f64| rho.exp() * (rho - 1.0);
    let mut hi = 1.0;
    while f(hi) < q {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mut rho = 0.5 * (lo + hi);
    // one Newton polish; F'(ρ) = ρ e^ρ
    if rho > 0.0 {
        let step = (f(rho) - q) / (rho * rho.exp());
        if (rho - step) > 0.0 && (f(rho - step) - q).abs() < (f(rho) - q).abs() {
            rho -= step;
        }
    }
    Ok(2.0 * mass * rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalRelation {
    TimelikeFuture,
    TimelikePast,
    NullFuture,
    NullPast,
    Spacelike,
    Coincident,
}

impl CausalRelation {
    pub fn reversed(self) -> Self {
        use CausalRelation::*;
        match self {
            TimelikeFuture => TimelikePast,
            TimelikePast => TimelikeFuture,
            NullFuture => NullPast,
            NullPast => NullFuture,
            other => other,
        }
    }

    pub fn is_timelike(self) -> bool {
        matches!(self, CausalRelation::TimelikeFuture | CausalRelation::TimelikePast)
    }

    /// In `J⁺` of the reference point, the point itself included.
    pub fn is_causal_future(self) -> bool {
        matches!(
            self,
            CausalRelation::TimelikeFuture | CausalRelation::NullFuture | CausalRelation::Coincident
        )
    }
}

/// Relative null threshold on the interval.
const NULL_TOL: f64 = 1e-12;

fn classify(dt: f64, interval: f64, scale: f64) -> CausalRelation {
    if scale == 0.0 {
        return CausalRelation::Coincident;
    }
    if interval.abs() <= NULL_TOL * scale {
        if dt > 0.0 {
            CausalRelation::NullFuture
        } else {
            CausalRelation::NullPast
        }
    } else if interval < 0.0 {
        if dt > 0.0 {
            CausalRelation::TimelikeFuture
        } else {
            CausalRelation::TimelikePast
        }
    } else {
        CausalRelation::Spacelike
    }
}

/// Position of `q` relative to `p`.
pub fn causal_relation(p: &MinkowskiPoint, q: &MinkowskiPoint) -> CausalRelation {
    let d = q.sub(p);
    let scale = d.iter().map(|x| x * x).sum::<f64>();
    classify(d[0], minkowski_square(&d), scale)
}

/// Radial causal relation at a common sphere point; the `(t, x)` part of the metric is conformally flat.
pub fn kruskal_causal_relation(p: &KruskalPoint, q: &KruskalPoint) -> Result<CausalRelation> {
    if p.omega.iter().zip(&q.omega).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::DifferentSpheres);
    }
    let (dt, dx) = (q.t - p.t, q.x - p.x);
    Ok(classify(dt, -dt * dt + dx * dx, dt * dt + dx * dx))
}
