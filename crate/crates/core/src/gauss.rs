//! Gaussian volume, Gaussian and L_p-Gaussian surface area measures, and
//! the reference constants that bound admissible measure sizes.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SupportField;
use crate::geometry::{ContainsPoint, RadialBody, SupportPolygon};
use crate::quadrature::GaussLegendre;
use crate::special::{gauss_ball_volume, normal_interval, std_normal_quantile};
use crate::vec2::Vec2;

/// Default angular resolution for polar quadrature.
pub const DEFAULT_RESOLUTION: usize = 4096;

/// Smallest resolution accepted by [`gauss_volume`]; smaller values are raised.
pub const MIN_VOLUME_RESOLUTION: usize = 256;

/// Ball's bound on the Gaussian surface area of a planar convex set, `4·2^{1/4}`.
pub fn ball_bound(n: usize) -> f64 {
    4.0 * (n as f64).powf(0.25)
}

const GL_POINTS: usize = 16;

/// Gaussian volume `γ_2(K) = (1/2π) ∫ (1 - e^{-ρ(θ)²/2}) dθ` in polar
/// coordinates.
///
/// The circle is cut into `resolution / 16` equal panels, further split at
/// every kink of the radial function, and each piece gets a 16-point
/// Gauss-Legendre rule. For polygons the pieces are the facet sectors, where
/// `ρ(θ) = h_i / cos(θ - α_i)` is analytic, so the result is accurate to
/// rounding.
pub fn gauss_volume<B: RadialBody + ?Sized>(body: &B, resolution: usize) -> f64 {
    let panels = resolution.max(MIN_VOLUME_RESOLUTION) / GL_POINTS;
    body.polar_gauss_integral(panels) / TAU
}

/// `∫_0^{2π} (1 - e^{-ρ²/2}) dθ` for generic radial bodies.
pub(crate) fn polar_integral_generic<B: RadialBody + ?Sized>(body: &B, panels: usize) -> f64 {
    let gl = GaussLegendre::new(GL_POINTS);
    let mut cuts: Vec<f64> = (0..panels).map(|k| TAU * k as f64 / panels as f64).collect();
    cuts.extend(body.kink_angles().into_iter().filter(|a| (0.0..TAU).contains(a)));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    cuts.push(TAU);
    cuts.windows(2)
        .map(|w| {
            gl.integrate(w[0], w[1], |t| {
                let r = body.radial_at(t);
                -(-0.5 * r * r).exp_m1()
            })
        })
        .sum()
}

/// Same integral over the facet sectors of a polygon.
pub(crate) fn polar_integral_polygon(k: &SupportPolygon, panels: usize) -> f64 {
    let gl = GaussLegendre::new(GL_POINTS);
    let width = TAU / panels.max(1) as f64;
    let mut total = 0.0;
    for i in 0..k.num_facets() {
        let (a, b) = k.facet_endpoints(i);
        let nu = k.normals()[i];
        let h = k.support()[i];
        // sector angles measured from the normal, in (-π/2, π/2)
        let lo = nu.cross(a).atan2(nu.dot(a));
        let hi = nu.cross(b).atan2(nu.dot(b));
        if hi <= lo {
            continue;
        }
        let pieces = ((hi - lo) / width).ceil().max(1.0) as usize;
        let step = (hi - lo) / pieces as f64;
        for j in 0..pieces {
            let s0 = lo + j as f64 * step;
            total += gl.integrate(s0, s0 + step, |s| {
                let r = h / s.cos();
                -(-0.5 * r * r).exp_m1()
            });
        }
    }
    total
}

/// Monte-Carlo estimate of the Gaussian volume with its binomial standard
/// error, sharded over 8 workers.
pub fn gauss_volume_mc<B: ContainsPoint + Sync + ?Sized>(
    body: &B,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    gauss_volume_mc_sharded(body, samples, seed, 8)
}

/// Monte-Carlo Gaussian volume with an explicit shard count.
///
/// Shard `s` draws from ChaCha8 seeded with `seed` on stream `s`; counts are
/// summed as integers, so the result is bit-identical for a fixed
/// `(seed, samples, shards)`.
pub fn gauss_volume_mc_sharded<B: ContainsPoint + Sync + ?Sized>(
    body: &B,
    samples: usize,
    seed: u64,
    shards: usize,
) -> (f64, f64) {
    let shards = shards.max(1);
    let n = body.dimension();
    let base = samples / shards;
    let extra = samples % shards;
    let inside: usize = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let count = base + usize::from(s < extra);
            let mut x = vec![0.0; n];
            let mut hits = 0usize;
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = StandardNormal.sample(&mut rng);
                }
                if body.contains(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let total = samples.max(1) as f64;
    let est = inside as f64 / total;
    (est, (est * (1.0 - est) / total).sqrt())
}

/// Gaussian volume of a smooth field via the boundary parametrization
/// `x(θ) = h u + h' u⊥`: in polar form the angular element is
/// `h (h'' + h) / |x|² dθ`.
pub fn field_gauss_volume(field: &SupportField) -> f64 {
    let h = field.values();
    let dh = field.first_difference();
    let c = field.convexity();
    let d = field.step();
    let sum: f64 = (0..h.len())
        .map(|k| {
            let r2 = h[k] * h[k] + dh[k] * dh[k];
            -(-0.5 * r2).exp_m1() * h[k] * c[k] / r2
        })
        .sum();
    sum * d / TAU
}

/// Mass carried by one facet normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMass {
    pub normal: Vec2,
    pub mass: f64,
}

/// Per-facet L_p-Gaussian surface area of a polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMeasure {
    pub p: f64,
    pub edges: Vec<EdgeMass>,
}

impl EdgeMeasure {
    pub fn total(&self) -> f64 {
        self.edges.iter().map(|e| e.mass).sum()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.mass).collect()
    }
}

/// Gaussian mass of facet `i`: `e^{-h²/2} (Φ(t_1) - Φ(t_0)) / √(2π)` with
/// `t_0, t_1` the signed arclength positions of the facet endpoints about the
/// foot of the perpendicular from the origin.
pub fn facet_gauss_mass(k: &SupportPolygon, i: usize) -> f64 {
    let (a, b) = k.facet_endpoints(i);
    let nu = k.normals()[i];
    let h = k.support()[i];
    let tangent = nu.perp();
    let t0 = a.dot(tangent);
    let t1 = b.dot(tangent);
    if t1 <= t0 {
        return 0.0;
    }
    (-0.5 * h * h).exp() * normal_interval(t0, t1) / (TAU).sqrt()
}

/// Gaussian surface area measure `S_{γ_2,K}` of a polygon (`p = 1`).
pub fn gauss_surface_polygon(k: &SupportPolygon) -> EdgeMeasure {
    EdgeMeasure {
        p: 1.0,
        edges: (0..k.num_facets())
            .map(|i| EdgeMass {
                normal: k.normals()[i],
                mass: facet_gauss_mass(k, i),
            })
            .collect(),
    }
}

/// L_p-Gaussian surface area measure of a polygon. `x·ν = h_i` on facet `i`,
/// so each facet mass is `h_i^{1-p}` times its `p = 1` mass.
pub fn lp_gauss_surface_polygon(k: &SupportPolygon, p: f64) -> Result<EdgeMeasure> {
    if !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent {p}")));
    }
    if let Some((i, &h)) = k.support().iter().enumerate().find(|(_, h)| !(**h > 0.0)) {
        return Err(Error::NonPositiveSupport { index: i, value: h });
    }
    let base = gauss_surface_polygon(k);
    Ok(EdgeMeasure {
        p,
        edges: base
            .edges
            .iter()
            .zip(k.support())
            .map(|(e, &h)| EdgeMass {
                normal: e.normal,
                mass: h.powf(1.0 - p) * e.mass,
            })
            .collect(),
    })
}

/// Density of `S_{p,γ_2,K}` with respect to arc length on `S^1` for a
/// sampled smooth support function:
/// `g_k = (1/2π) h^{1-p} e^{-((Dh)² + h²)/2} (D²h + h)`.
pub fn smooth_lp_density(field: &SupportField, p: f64) -> Result<Vec<f64>> {
    field.check_convex()?;
    Ok(smooth_lp_density_unchecked(field, p))
}

pub(crate) fn smooth_lp_density_unchecked(field: &SupportField, p: f64) -> Vec<f64> {
    let h = field.values();
    let dh = field.first_difference();
    let c = field.convexity();
    (0..h.len())
        .map(|k| {
            h[k].powf(1.0 - p) * (-0.5 * (dh[k] * dh[k] + h[k] * h[k])).exp() * c[k] / TAU
        })
        .collect()
}

/// Reference radii and the admissible mass bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussConstants {
    pub n: usize,
    pub p: f64,
    /// `γ_n(r B) = 1/2`.
    pub r_half: f64,
    /// Half-width of the symmetric strip with `γ_n = 1/2`, i.e. `Ψ(3/4)`.
    pub a_half: f64,
    /// `√(2/π) r^{-p} a e^{-a²/2}`.
    pub mass_bound: f64,
}

impl GaussConstants {
    /// `key=value` lines for scripting.
    pub fn report(&self) -> String {
        format!(
            "n={}\np={}\nr_half={}\na_half={}\nmass_bound={}\n",
            self.n,
            crate::fmt::sig9(self.p),
            crate::fmt::sig9(self.r_half),
            crate::fmt::sig9(self.a_half),
            crate::fmt::sig9(self.mass_bound)
        )
    }
}

/// Mass bound `√(2/π) r^{-p} a e^{-a²/2}` assembled from its parts.
pub fn mass_bound_from(r_half: f64, a_half: f64, p: f64) -> f64 {
    (2.0 / PI).sqrt() * r_half.powf(-p) * a_half * (-0.5 * a_half * a_half).exp()
}

/// Radius of the centered ball with Gaussian volume 1/2 in `R^n`.
pub fn half_volume_radius(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while gauss_ball_volume(hi, n) < 0.5 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::RootFinding("half-volume radius not bracketed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gauss_ball_volume(mid, n) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Reference constants for dimension `n` and exponent `p`.
pub fn gauss_constants(n: usize, p: f64) -> Result<GaussConstants> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension {n} < 2")));
    }
    if !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent {p}")));
    }
    let r_half = half_volume_radius(n)?;
    let a_half = std_normal_quantile(0.75)?;
    Ok(GaussConstants {
        n,
        p,
        r_half,
        a_half,
        mass_bound: mass_bound_from(r_half, a_half, p),
    })
}

/// Scale factor `s` with `γ_2(sK) = target`, by bisection on the
/// (strictly increasing) map `s ↦ γ_2(sK)`.
pub fn rescale_to_volume(k: &SupportPolygon, target: f64, resolution: usize) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidInput(format!("target volume {target}")));
    }
    let vol = |s: f64| -> Result<f64> { Ok(gauss_volume(&k.scaled(s)?, resolution)) };
    let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
    let mut guard = 0;
    while vol(lo)? > target {
        lo *= 0.5;
        guard += 1;
        if guard > 200 {
            return Err(Error::RootFinding("cannot shrink below target volume".into()));
        }
    }
    while vol(hi)? < target {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::RootFinding("cannot grow to target volume".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if vol(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
