//! Monte-Carlo checks over sampled points; sample `i` always draws from stream `i`.

use super::regions::{strip_membership, KruskalRegion, Profile, Region};
use super::rng::sample_rng;
use super::{
    boost_flow, causal_relation, kruskal_flow, CausalRelation, KillingFlowChart, KruskalPoint,
    MinkowskiPoint,
};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Rejection attempts per sample before giving up.
const MAX_ATTEMPTS: usize = 100_000;
/// Violations kept verbatim in a report.
const KEPT: usize = 10;

/// Axis-aligned box for rejection sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingBox {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl SamplingBox {
    pub fn cube(center: [f64; 4], half_width: f64) -> Self {
        SamplingBox {
            lo: center.map(|c| c - half_width),
            hi: center.map(|c| c + half_width),
        }
    }

    /// A box covering the part of `region` with `|y_i| ≤ half_width` and `x1` within `2·half_width` of its floor.
    pub fn for_region(region: &Region, half_width: f64) -> Self {
        let floor = region.x1_floor();
        let top = match region {
            Region::DeformedWedge { f }
            | Region::TranslatedDeformedWedge { f, .. }
            | Region::Strip { f, .. } => f.max_on(half_width),
            _ => 0.0,
        };
        SamplingBox {
            lo: [floor - 2.0 * half_width, floor, -half_width, -half_width],
            hi: [
                floor + top + 2.0 * half_width,
                floor + top + 2.0 * half_width,
                half_width,
                half_width,
            ],
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> MinkowskiPoint {
        MinkowskiPoint(std::array::from_fn(|i| rng.random_range(self.lo[i]..self.hi[i])))
    }
}

fn sample_in(region: &Region, bx: &SamplingBox, rng: &mut ChaCha8Rng) -> Result<MinkowskiPoint> {
    for _ in 0..MAX_ATTEMPTS {
        let p = bx.sample(rng);
        if region.contains(&p) {
            return Ok(p);
        }
    }
    Err(Error::EmptySample(MAX_ATTEMPTS))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub sample: u64,
    pub point: Vec<f64>,
    pub partner: Option<Vec<f64>>,
    pub s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: usize,
    pub violations: usize,
    pub examples: Vec<Violation>,
}

impl CheckReport {
    fn collect(name: &str, seed: u64, samples: usize, per: Vec<(usize, Vec<Violation>)>) -> Self {
        let checks = per.iter().map(|(c, _)| c).sum();
        let all: Vec<Violation> = per.into_iter().flat_map(|(_, v)| v).collect();
        CheckReport {
            name: name.to_string(),
            seed,
            samples,
            checks,
            violations: all.len(),
            examples: all.into_iter().take(KEPT).collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn run<F>(n: usize, f: F) -> Result<Vec<(usize, Vec<Violation>)>>
where
    F: Fn(u64) -> Result<(usize, Vec<Violation>)> + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Samples `p ∈ region` and checks `Λ_s(p) ∈ region` for every `s` in `s_grid`.
pub fn half_invariance_check(
    region: &Region,
    chart: &KillingFlowChart,
    n_samples: usize,
    s_grid: &[f64],
    seed: u64,
    bx: &SamplingBox,
) -> Result<CheckReport> {
    if matches!(chart, KillingFlowChart::KruskalTime { .. }) {
        return Err(Error::InvalidGrid("Kruskal flow on a Minkowski region".into()));
    }
    let per = run(n_samples, |i| {
        let mut rng = sample_rng(seed, i);
        let p = sample_in(region, bx, &mut rng)?;
        let mut out = Vec::new();
        for &s in s_grid {
            let q = chart.flow_minkowski(s, &p).expect("Minkowski chart");
            if !region.contains(&q) {
                out.push(Violation {
                    sample: i,
                    point: p.0.to_vec(),
                    partner: Some(q.0.to_vec()),
                    s: Some(s),
                });
            }
        }
        Ok((s_grid.len(), out))
    })?;
    Ok(CheckReport::collect("half_invariance", seed, n_samples, per))
}

fn random_sphere(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

fn kruskal_offset(region: &KruskalRegion, omega: &[f64; 3]) -> f64 {
    match *region {
        KruskalRegion::RightWedge => 0.0,
        KruskalRegion::TranslatedWedge { lambda } => lambda,
        KruskalRegion::DeformedStrip { f, lambda } => f.eval(omega) + lambda,
    }
}

fn sample_kruskal(region: &KruskalRegion, half_width: f64, rng: &mut ChaCha8Rng) -> Result<KruskalPoint> {
    for _ in 0..MAX_ATTEMPTS {
        let omega = random_sphere(rng);
        let c = kruskal_offset(region, &omega);
        let x = rng.random_range(c..c + 2.0 * half_width);
        let t = rng.random_range(c - 2.0 * half_width..c + 2.0 * half_width);
        if let Ok(p) = KruskalPoint::new(t, x, omega) {
            if region.contains(&p) {
                return Ok(p);
            }
        }
    }
    Err(Error::EmptySample(MAX_ATTEMPTS))
}

/// Half-invariance under the Schwarzschild time flow, together with agreement of the
/// inequality and orbit descriptions of the region at each sampled point.
pub fn kruskal_half_invariance_check(
    region: &KruskalRegion,
    mass: f64,
    n_samples: usize,
    s_grid: &[f64],
    seed: u64,
    half_width: f64,
) -> Result<CheckReport> {
    let per = run(n_samples, |i| {
        let mut rng = sample_rng(seed, i);
        let p = sample_kruskal(region, half_width, &mut rng)?;
        let mut out = Vec::new();
        let as_vec = |k: &KruskalPoint| vec![k.t, k.x, k.omega[0], k.omega[1], k.omega[2]];
        if !matches!(region, KruskalRegion::RightWedge) && !region.contains_by_orbit(mass, &p) {
            out.push(Violation {
                sample: i,
                point: as_vec(&p),
                partner: None,
                s: None,
            });
        }
        for &s in s_grid {
            let ok = match kruskal_flow(s, mass, &p) {
                Ok(q) => region.contains(&q),
                Err(_) => false,
            };
            if !ok {
                out.push(Violation {
                    sample: i,
                    point: as_vec(&p),
                    partner: None,
                    s: Some(s),
                });
            }
        }
        Ok((s_grid.len() + 1, out))
    })?;
    Ok(CheckReport::collect("kruskal_half_invariance", seed, n_samples, per))
}

/// Uniform samples in `bx`, comparing strip membership by orbit root-finding
/// with the inequality for `(λ, λ, 0, 0) + W_f`.
pub fn strip_equivalence_check(
    f: Profile,
    lambda: f64,
    n_samples: usize,
    seed: u64,
    bx: &SamplingBox,
) -> Result<CheckReport> {
    let wedge = Region::TranslatedDeformedWedge { f, lambda };
    let per = run(n_samples, |i| {
        let mut rng = sample_rng(seed, i);
        let p = bx.sample(&mut rng);
        let v = if strip_membership(f, lambda, &p) != wedge.contains(&p) {
            vec![Violation {
                sample: i,
                point: p.0.to_vec(),
                partner: None,
                s: None,
            }]
        } else {
            Vec::new()
        };
        Ok((1, v))
    })?;
    Ok(CheckReport::collect("strip_equivalence", seed, n_samples, per))
}

/// A uniform point of `J⁺(a) ∩ J⁻(b)` by rejection in the box spanned by `b - a`.
fn sample_diamond(a: &MinkowskiPoint, b: &MinkowskiPoint, rng: &mut ChaCha8Rng) -> Option<MinkowskiPoint> {
    let v = b.sub(a);
    let r = v[0];
    for _ in 0..1000 {
        let w: [f64; 4] = std::array::from_fn(|i| {
            if i == 0 {
                rng.random_range(0.0..=r)
            } else {
                rng.random_range(-r..=r)
            }
        });
        let q = a.add(w);
        if causal_relation(a, &q).is_causal_future() && causal_relation(&q, b).is_causal_future() {
            return Some(q);
        }
    }
    None
}

/// Triples `a, b ∈ region`, `b ∈ J⁺(a)`, `q ∈ J⁺(a) ∩ J⁻(b)`; a violation is `q ∉ region`.
pub fn causal_convexity_check(
    region: &Region,
    n_samples: usize,
    seed: u64,
    bx: &SamplingBox,
) -> Result<CheckReport> {
    let scale = (0..4).map(|i| bx.hi[i] - bx.lo[i]).fold(0.0_f64, f64::max);
    let per = run(n_samples, |i| {
        let mut rng = sample_rng(seed, i);
        for _ in 0..MAX_ATTEMPTS {
            let a = sample_in(region, bx, &mut rng)?;
            let t = rng.random_range(0.0..scale);
            let dir: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
            let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let len = t * rng.random_range(0.0..1.0f64);
            let b = a.add([t, len * dir[0] / n, len * dir[1] / n, len * dir[2] / n]);
            if !region.contains(&b) {
                continue;
            }
            let Some(q) = sample_diamond(&a, &b, &mut rng) else {
                continue;
            };
            let v = if region.contains(&q) {
                Vec::new()
            } else {
                vec![Violation {
                    sample: i,
                    point: q.0.to_vec(),
                    partner: Some([a.0, b.0].concat()),
                    s: None,
                }]
            };
            return Ok((1, v));
        }
        Err(Error::EmptySample(MAX_ATTEMPTS))
    })?;
    Ok(CheckReport::collect("causal_convexity", seed, n_samples, per))
}

/// Step of the `s`-grid used to search for hull witnesses.
const HULL_STEP: f64 = 0.05;

fn hull_witness(p: &MinkowskiPoint, x: &MinkowskiPoint, s_lo: f64, s_hi: f64) -> Option<(f64, f64)> {
    let mut s1 = None;
    let mut s = 0.0;
    while s >= s_lo {
        if causal_relation(&boost_flow(s, p), x) == CausalRelation::TimelikeFuture {
            s1 = Some(s);
            break;
        }
        s -= HULL_STEP;
    }
    let s1 = s1?;
    let mut s = s1 + HULL_STEP;
    while s <= s_hi {
        if causal_relation(x, &boost_flow(s, p)) == CausalRelation::TimelikeFuture {
            return Some((s1, s));
        }
        s += HULL_STEP;
    }
    None
}

/// Interior points of `W₀` must lie in `I⁺(Λ_{s₁}p) ∩ I⁻(Λ_{s₂}p)` for some `s₁ < s₂`;
/// points outside `W₀` must not.
pub fn wedge_hull_check(
    p: &MinkowskiPoint,
    n_samples: usize,
    seed: u64,
    bx: &SamplingBox,
) -> Result<CheckReport> {
    if !Region::Wedge.contains(p) {
        return Err(Error::InvalidGrid("orbit point must lie in the wedge".into()));
    }
    let per = run(n_samples, |i| {
        let mut rng = sample_rng(seed, i);
        let x = sample_in(&Region::Wedge, bx, &mut rng)?;
        // τ²(s) = Q - |p|² + |p|((x1 - x0)e^s + (x1 + x0)e^{-s}) for p = (0, |p|, 0, 0)
        let pn = (p.x1() * p.x1() - p.x0() * p.x0()).sqrt();
        let q = -minkowski_norm(x);
        let need = (pn * pn - q).max(1.0) + 1.0;
        let s1 = ((need / (x.plus() * pn)).max(1.0)).ln() + (x.x0().abs() / pn).asinh() + 1.0;
        let s2 = ((need / (-x.minus() * pn)).max(1.0)).ln() + (x.x0().abs() / pn).asinh() + 1.0;
        let span = s1.max(s2) + 4.0 + (p.x0() / p.x1()).atanh().abs();
        let mut out = Vec::new();
        if hull_witness(p, &x, -span, span).is_none() {
            out.push(Violation {
                sample: i,
                point: x.0.to_vec(),
                partner: None,
                s: None,
            });
        }
        let mut y = bx.sample(&mut rng);
        while Region::Wedge.contains(&y) {
            y = bx.sample(&mut rng);
        }
        if let Some((a, _)) = hull_witness(p, &y, -20.0, 20.0) {
            out.push(Violation {
                sample: i,
                point: y.0.to_vec(),
                partner: None,
                s: Some(a),
            });
        }
        Ok((2, out))
    })?;
    Ok(CheckReport::collect("wedge_hull", seed, n_samples, per))
}

fn minkowski_norm(x: MinkowskiPoint) -> f64 {
    super::minkowski_square(&x.0)
}

/// Pairs on `A_{f+λ}` (same `y` when `same_y`); a violation is a timelike-separated pair.
pub fn achronality_check(
    f: Profile,
    lambda: f64,
    n_samples: usize,
    seed: u64,
    half_width: f64,
    same_y: bool,
) -> Result<CheckReport> {
    let point = |rng: &mut ChaCha8Rng, y: [f64; 2]| {
        let c = f.eval(&y) + lambda;
        let x1 = rng.random_range(c..c + 2.0 * half_width);
        MinkowskiPoint::new(2.0 * c - x1, x1, y[0], y[1])
    };
    let per = run(n_samples, |i| {
        let mut rng = sample_rng(seed, i);
        let ya = [rng.random_range(-half_width..half_width), rng.random_range(-half_width..half_width)];
        let yb = if same_y {
            ya
        } else {
            [rng.random_range(-half_width..half_width), rng.random_range(-half_width..half_width)]
        };
        let a = point(&mut rng, ya);
        let b = point(&mut rng, yb);
        let v = if causal_relation(&a, &b).is_timelike() {
            vec![Violation {
                sample: i,
                point: a.0.to_vec(),
                partner: Some(b.0.to_vec()),
                s: None,
            }]
        } else {
            Vec::new()
        };
        Ok((1, v))
    })?;
    Ok(CheckReport::collect("achronality", seed, n_samples, per))
}
