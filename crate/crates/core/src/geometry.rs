//! Planar convex bodies in support-function form and the basic operations on
//! them: Wulff shapes, support and radial evaluation, polarity, L_p
//! combinations and the hemisphere test for discrete measures.
//!
//! Exact polygon geometry is only provided in the plane. In higher dimension a
//! body is a list of support samples on a [`DirectionGrid`] ([`GridBody`]) and
//! only supports membership queries.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Tolerance on the norm of vectors that must be unit length.
pub const UNIT_TOL: f64 = 1e-9;

/// Collinearity tolerance used when discarding redundant halfplanes.
pub const REDUNDANCY_TOL: f64 = 1e-10;

/// Directions closer than this (in angle) are treated as the same normal.
const SAME_ANGLE_TOL: f64 = 1e-12;

const GRID_SEED: u64 = 0x5eed_9a55;

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => TAU,
        3 => 2.0 * TAU,
        _ => TAU * sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

/// Quadrature nodes and equal weights on `S^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    dimension: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DirectionGrid {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Planar nodes as [`Vec2`]; `None` unless the grid lives on the circle.
    pub fn planar_nodes(&self) -> Option<Vec<Vec2>> {
        (self.dimension == 2).then(|| self.nodes.iter().map(|v| Vec2::new(v[0], v[1])).collect())
    }
}

/// Smallest resolution accepted by [`make_direction_grid`].
pub const MIN_GRID_RESOLUTION: usize = 4;

/// Builds a direction grid on `S^{n-1}`.
///
/// For `n = 2` the nodes are the angles `2πk/N` and every weight is `2π/N`.
/// For `n = 3` a Fibonacci spiral is used; above that, normalized Gaussian
/// samples from a fixed seed. Weights are equal and sum to `|S^{n-1}|`.
pub fn make_direction_grid(n: usize, resolution: usize) -> Result<DirectionGrid> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension {n} < 2")));
    }
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::ResolutionTooSmall {
            got: resolution,
            min: MIN_GRID_RESOLUTION,
        });
    }
    let nodes: Vec<Vec<f64>> = match n {
        2 => (0..resolution)
            .map(|k| {
                let v = Vec2::from_angle(TAU * k as f64 / resolution as f64);
                vec![v.x, v.y]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..resolution)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / resolution as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED ^ n as u64);
            (0..resolution)
                .map(|_| loop {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 1e-8 {
                        break v.into_iter().map(|x| x / norm).collect();
                    }
                })
                .collect()
        }
    };
    let w = sphere_area(n) / resolution as f64;
    Ok(DirectionGrid {
        dimension: n,
        weights: vec![w; resolution],
        nodes,
    })
}

/// Anything with a radial function about the origin.
///
/// `kink_angles` lists angles where the radial function is not smooth, so
/// quadrature can place panel boundaries there.
pub trait RadialBody {
    fn radial_at(&self, theta: f64) -> f64;

    fn kink_angles(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `∫_0^{2π} (1 - e^{-ρ(θ)²/2}) dθ` using about `panels` quadrature panels.
    fn polar_gauss_integral(&self, panels: usize) -> f64 {
        crate::gauss::polar_integral_generic(self, panels)
    }
}

/// Membership test used by Monte-Carlo volume estimates.
pub trait ContainsPoint {
    fn dimension(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
}

/// Centered disc of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub radius: f64,
}

impl Disc {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("disc radius {radius}")));
        }
        Ok(Self { radius })
    }
}

impl RadialBody for Disc {
    fn radial_at(&self, _theta: f64) -> f64 {
        self.radius
    }
}

impl ContainsPoint for Disc {
    fn dimension(&self) -> usize {
        2
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[0] * x[0] + x[1] * x[1] <= self.radius * self.radius
    }
}

/// A convex polygon containing the origin in its interior, stored as facet
/// normals sorted by angle, the matching support numbers and the vertices.
///
/// Vertex `i` is the intersection of facets `i` and `i + 1` (cyclically), so
/// facet `i` runs from vertex `i - 1` to vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPolygon {
    normals: Vec<Vec2>,
    support: Vec<f64>,
    vertices: Vec<Vec2>,
}

impl SupportPolygon {
    /// Wulff shape of `(normals, support)`; see [`wulff_shape`].
    pub fn new(normals: &[Vec2], support: &[f64]) -> Result<Self> {
        wulff_shape(normals, support)
    }

    /// Regular `m`-gon with the given apothem, first normal at angle `phase`.
    pub fn regular(m: usize, apothem: f64, phase: f64) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidInput(format!("regular polygon needs m >= 3, got {m}")));
        }
        let normals: Vec<Vec2> = (0..m)
            .map(|k| Vec2::from_angle(phase + TAU * k as f64 / m as f64))
            .collect();
        wulff_shape(&normals, &vec![apothem; m])
    }

    /// Axis-aligned rectangle `[-a, a] x [-b, b]`.
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        let normals = [
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ];
        wulff_shape(&normals, &[a, b, a, b])
    }

    /// Convex hull of a point set; the origin must lie in the interior.
    pub fn from_vertices(points: &[Vec2]) -> Result<Self> {
        if points.len() < 3 || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("need at least 3 finite points".into()));
        }
        let hull = convex_hull(points);
        if hull.len() < 3 {
            return Err(Error::EmptyInterior("points are collinear".into()));
        }
        let n = hull.len();
        let mut normals = Vec::with_capacity(n);
        let mut support = Vec::with_capacity(n);
        for i in 0..n {
            let a = hull[i];
            let e = hull[(i + 1) % n] - a;
            let nu = Vec2::new(e.y, -e.x).normalized();
            let h = nu.dot(a);
            if !(h > 0.0) {
                return Err(Error::EmptyInterior("origin is not interior to the hull".into()));
            }
            normals.push(nu);
            support.push(h);
        }
        wulff_shape(&normals, &support)
    }

    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn num_facets(&self) -> usize {
        self.normals.len()
    }

    /// Endpoints `(start, end)` of facet `i`, counter-clockwise.
    pub fn facet_endpoints(&self, i: usize) -> (Vec2, Vec2) {
        let m = self.vertices.len();
        (self.vertices[(i + m - 1) % m], self.vertices[i])
    }

    pub fn facet_length(&self, i: usize) -> f64 {
        let (a, b) = self.facet_endpoints(i);
        a.dist(b)
    }

    /// Support function at a unit vector.
    pub fn support_at(&self, v: Vec2) -> Result<f64> {
        check_unit(v)?;
        Ok(self.support_unchecked(v))
    }

    pub(crate) fn support_unchecked(&self, v: Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|x| v.dot(*x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Radial function at `u` together with the index of the facet hit.
    pub fn radial_hit(&self, u: Vec2) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut idx = 0;
        for (i, (nu, h)) in self.normals.iter().zip(&self.support).enumerate() {
            let c = u.dot(*nu);
            if c > 0.0 {
                let r = h / c;
                if r < best {
                    best = r;
                    idx = i;
                }
            }
        }
        (best, idx)
    }

    /// True if `-K = K` up to `tol` on the support numbers.
    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        self.normals.iter().all(|nu| {
            let h_pos = self.support_unchecked(*nu);
            let h_neg = self.support_unchecked(-*nu);
            let opposite_is_facet = self
                .normals
                .iter()
                .any(|w| (w.dot(-*nu) - 1.0).abs() < 1e-12);
            opposite_is_facet && (h_pos - h_neg).abs() <= tol * (1.0 + h_pos)
        })
    }

    /// The polygon scaled by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let h: Vec<f64> = self.support.iter().map(|h| h * s).collect();
        wulff_shape(&self.normals, &h)
    }

    /// Angles of the vertices, in `[0, 2π)`.
    pub fn vertex_angles(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.angle()).collect()
    }

    /// Euclidean area (shoelace).
    pub fn area(&self) -> f64 {
        let m = self.vertices.len();
        0.5 * (0..m)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % m]))
            .sum::<f64>()
    }
}

impl RadialBody for SupportPolygon {
    fn radial_at(&self, theta: f64) -> f64 {
        self.radial_hit(Vec2::from_angle(theta)).0
    }

    fn kink_angles(&self) -> Vec<f64> {
        self.vertex_angles()
    }

    fn polar_gauss_integral(&self, panels: usize) -> f64 {
        crate::gauss::polar_integral_polygon(self, panels)
    }
}

impl ContainsPoint for SupportPolygon {
    fn dimension(&self) -> usize {
        2
    }

    fn contains(&self, x: &[f64]) -> bool {
        let p = Vec2::new(x[0], x[1]);
        self.normals
            .iter()
            .zip(&self.support)
            .all(|(nu, h)| nu.dot(p) <= *h)
    }
}

fn check_unit(v: Vec2) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

/// Wulff shape `[h] = ∩ {x : x·v_i <= h_i}` of a finite list of halfplanes.
///
/// Redundant halfplanes (those touching the polygon in at most a vertex) are
/// dropped, so the support of the result on every retained normal equals the
/// input value and never exceeds it elsewhere.
pub fn wulff_shape(normals: &[Vec2], h: &[f64]) -> Result<SupportPolygon> {
    wulff_shape_indexed(normals, h).map(|(k, _)| k)
}

/// Like [`wulff_shape`], also returning for each input halfplane the facet it
/// became, or `None` if it was redundant.
pub fn wulff_shape_indexed(
    normals: &[Vec2],
    h: &[f64],
) -> Result<(SupportPolygon, Vec<Option<usize>>)> {
    if normals.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: normals.len(),
            actual: h.len(),
        });
    }
    if normals.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "at least 3 normals required, got {}",
            normals.len()
        )));
    }
    for (i, (&v, &hi)) in normals.iter().zip(h).enumerate() {
        check_unit(v)?;
        if !(hi > 0.0) || !hi.is_finite() {
            return Err(Error::NonPositiveSupport { index: i, value: hi });
        }
    }

    // sort by angle; among (near) equal angles keep the tightest constraint,
    // earliest input index on ties
    let mut order: Vec<(f64, usize)> = normals.iter().map(|v| v.angle()).zip(0..).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(order.len());
    for (ang, idx) in order {
        if let Some(last) = cand.last_mut() {
            if ang - last.0 <= SAME_ANGLE_TOL {
                if h[idx] < h[last.1] {
                    *last = (ang, idx);
                }
                continue;
            }
        }
        cand.push((ang, idx));
    }
    if cand.len() > 1 {
        let (first, last) = (cand[0], cand[cand.len() - 1]);
        if first.0 + TAU - last.0 <= SAME_ANGLE_TOL {
            if h[first.1] <= h[last.1] {
                cand.pop();
            } else {
                cand.remove(0);
            }
        }
    }
    if cand.len() < 3 {
        return Err(Error::Unbounded { gap: PI });
    }

    let gap = (0..cand.len())
        .map(|i| {
            let a = cand[i].0;
            let b = if i + 1 == cand.len() {
                cand[0].0 + TAU
            } else {
                cand[i + 1].0
            };
            b - a
        })
        .fold(0.0, f64::max);
    if gap >= PI - 1e-12 {
        return Err(Error::Unbounded { gap });
    }

    // the tightest constraint is always a facet; start the scan there
    let start = (0..cand.len())
        .min_by(|&a, &b| h[cand[a].1].total_cmp(&h[cand[b].1]).then(a.cmp(&b)))
        .expect("non-empty");
    let m = cand.len();
    let seq: Vec<(f64, usize)> = (0..=m).map(|k| cand[(start + k) % m]).collect();

    let redundant = |a: (f64, usize), b: (f64, usize), c: (f64, usize)| -> bool {
        let mut span = c.0 - a.0;
        if span <= 0.0 {
            span += TAU;
        }
        if span >= PI - 1e-12 {
            return false;
        }
        let x = intersect(normals[a.1], h[a.1], normals[c.1], h[c.1]);
        normals[b.1].dot(x) <= h[b.1] + REDUNDANCY_TOL * (1.0 + h[b.1])
    };

    let mut stack: Vec<(f64, usize)> = Vec::with_capacity(m + 1);
    for &c in &seq {
        while stack.len() >= 2 && redundant(stack[stack.len() - 2], stack[stack.len() - 1], c) {
            stack.pop();
        }
        stack.push(c);
    }
    stack.pop(); // closing copy of the start facet
    if stack.len() < 3 {
        return Err(Error::EmptyInterior("fewer than 3 facets survive reduction".into()));
    }

    // restore angular order starting from the smallest angle
    let rot = (0..stack.len())
        .min_by(|&a, &b| stack[a].0.total_cmp(&stack[b].0))
        .expect("non-empty");
    stack.rotate_left(rot);

    let kept_normals: Vec<Vec2> = stack.iter().map(|&(_, i)| normals[i]).collect();
    let kept_h: Vec<f64> = stack.iter().map(|&(_, i)| h[i]).collect();
    let k = kept_normals.len();
    let vertices: Vec<Vec2> = (0..k)
        .map(|i| {
            let j = (i + 1) % k;
            intersect(kept_normals[i], kept_h[i], kept_normals[j], kept_h[j])
        })
        .collect();
    if vertices.iter().any(|v| !v.is_finite()) {
        return Err(Error::EmptyInterior("degenerate facet intersection".into()));
    }

    let mut map = vec![None; normals.len()];
    for (facet, &(_, idx)) in stack.iter().enumerate() {
        map[idx] = Some(facet);
    }

    Ok((
        SupportPolygon {
            normals: kept_normals,
            support: kept_h,
            vertices,
        },
        map,
    ))
}

/// Counter-clockwise convex hull (Andrew's monotone chain), collinear points dropped.
fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    // near-collinear and near-duplicate points count as collinear so that
    // no edge of the hull is shorter than rounding noise
    let turn = |o: Vec2, a: Vec2, b: Vec2| {
        let (u, v) = (a - o, b - o);
        u.cross(v) - 1e-12 * u.norm() * v.norm()
    };
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Intersection of the lines `a·x = ha` and `c·x = hc`.
fn intersect(a: Vec2, ha: f64, c: Vec2, hc: f64) -> Vec2 {
    let det = a.cross(c);
    Vec2::new((ha * c.y - hc * a.y) / det, (a.x * hc - c.x * ha) / det)
}

/// Support function `max_{x∈K} v·x` at a unit vector.
pub fn support_eval(body: &SupportPolygon, v: Vec2) -> Result<f64> {
    body.support_at(v)
}

/// Radial function: the distance from the origin to the boundary along `u`.
pub fn radial_eval(body: &SupportPolygon, u: Vec2) -> Result<f64> {
    check_unit(u)?;
    Ok(body.radial_hit(u).0)
}

/// Polar body `K* = {y : x·y <= 1 for all x in K}`.
///
/// Each vertex `x` of `K` becomes the facet with normal `x/|x|` and support
/// `1/|x|`.
pub fn polar_body(body: &SupportPolygon) -> Result<SupportPolygon> {
    if let Some((i, &h)) = body.support.iter().enumerate().find(|(_, &h)| !(h > 0.0)) {
        return Err(Error::NonPositiveSupport { index: i, value: h });
    }
    let normals: Vec<Vec2> = body.vertices.iter().map(|x| x.normalized()).collect();
    let h: Vec<f64> = body.vertices.iter().map(|x| 1.0 / x.norm()).collect();
    wulff_shape(&normals, &h)
}

/// Pointwise L_p combination of two sampled support functions.
///
/// Returns `(a hK^p + b hL^p)^{1/p}` for `p != 0` and `hK^a hL^b` for `p = 0`.
/// For `0 < p < 1` the result need not be a support function; pass it through
/// [`wulff_shape`] before using it as a body.
pub fn lp_combination(h_k: &[f64], h_l: &[f64], a: f64, b: f64, p: f64) -> Result<Vec<f64>> {
    if h_k.len() != h_l.len() {
        return Err(Error::LengthMismatch {
            expected: h_k.len(),
            actual: h_l.len(),
        });
    }
    if !(a >= 0.0 && b >= 0.0) || a + b <= 0.0 || !p.is_finite() {
        return Err(Error::InvalidInput(format!("weights a={a}, b={b}, p={p}")));
    }
    for (i, &v) in h_k.iter().chain(h_l).enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveSupport {
                index: i % h_k.len().max(1),
                value: v,
            });
        }
    }
    Ok(h_k
        .iter()
        .zip(h_l)
        .map(|(&x, &y)| {
            if p == 0.0 {
                x.powf(a) * y.powf(b)
            } else {
                (a * x.powf(p) + b * y.powf(p)).powf(1.0 / p)
            }
        })
        .collect())
}

/// Sup-norm distance between two support functions sampled on the same grid.
pub fn hausdorff_distance(h_k: &[f64], h_l: &[f64]) -> Result<f64> {
    if h_k.len() != h_l.len() {
        return Err(Error::LengthMismatch {
            expected: h_k.len(),
            actual: h_l.len(),
        });
    }
    Ok(h_k
        .iter()
        .zip(h_l)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Hausdorff distance between two polygons, evaluated on the union of their
/// facet normals and vertex directions plus a uniform grid of `resolution`
/// directions.
pub fn polygon_hausdorff(k: &SupportPolygon, l: &SupportPolygon, resolution: usize) -> f64 {
    let mut dirs: Vec<Vec2> = (0..resolution)
        .map(|i| Vec2::from_angle(TAU * i as f64 / resolution as f64))
        .collect();
    dirs.extend_from_slice(k.normals());
    dirs.extend_from_slice(l.normals());
    // the support difference is a max of sinusoids; its extrema over a
    // polygon pair sit at normals, so this is exact up to the grid term
    dirs.iter()
        .map(|&v| (k.support_unchecked(v) - l.support_unchecked(v)).abs())
        .fold(0.0, f64::max)
}

/// One atom of a discrete measure on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub direction: Vec2,
    pub mass: f64,
}

/// A finite measure on `S^1` given by atoms at distinct unit directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Validates and stores the atoms sorted by angle.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("measure has no atoms".into()));
        }
        for a in &atoms {
            check_unit(a.direction)?;
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::InvalidInput(format!("atom mass {} is not positive", a.mass)));
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.direction.angle().total_cmp(&b.direction.angle()));
        for w in atoms.windows(2) {
            if (w[1].direction.angle() - w[0].direction.angle()).abs() <= SAME_ANGLE_TOL {
                return Err(Error::InvalidInput("duplicate atom directions".into()));
            }
        }
        if atoms.len() > 1 {
            let first = atoms[0].direction.angle();
            let last = atoms[atoms.len() - 1].direction.angle();
            if first + TAU - last <= SAME_ANGLE_TOL {
                return Err(Error::InvalidInput("duplicate atom directions".into()));
            }
        }
        Ok(Self { atoms })
    }

    pub fn dimension(&self) -> usize {
        2
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn directions(&self) -> Vec<Vec2> {
        self.atoms.iter().map(|a| a.direction).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Every atom `(v, m)` has a partner `(-v, m)` within `tol`.
    pub fn is_even(&self, tol: f64) -> bool {
        self.atoms.iter().all(|a| {
            self.atoms.iter().any(|b| {
                (b.direction + a.direction).norm() <= tol && (b.mass - a.mass).abs() <= tol * (1.0 + a.mass)
            })
        })
    }

    /// Same directions, masses multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    direction: a.direction,
                    mass: a.mass * c,
                })
                .collect(),
        )
    }
}

/// `min_e Σ m_i (e·v_i)_+` over unit `e`, with a minimizing direction.
///
/// On each arc between breakpoints `φ_i ± π/2` the sum is a single sinusoid
/// that stays non-negative, so it has no interior minimum and the minimum
/// over the circle is attained at a breakpoint.
pub fn hemisphere_minimum(mu: &DiscreteMeasure) -> (f64, Vec2) {
    let eval = |e: Vec2| -> f64 {
        mu.atoms
            .iter()
            .map(|a| a.mass * e.dot(a.direction).max(0.0))
            .sum()
    };
    let mut best = (f64::INFINITY, Vec2::new(1.0, 0.0));
    for a in &mu.atoms {
        for e in [a.direction.perp(), -a.direction.perp()] {
            let val = eval(e);
            if val < best.0 {
                best = (val, e);
            }
        }
    }
    best
}

/// True iff `min_e Σ m_i (e·v_i)_+ > epsilon`, i.e. the measure is not
/// concentrated on a closed hemisphere with margin `epsilon`.
pub fn check_hemisphere_condition(mu: &DiscreteMeasure, epsilon: f64) -> bool {
    hemisphere_minimum(mu).0 > epsilon
}

/// A body in `R^n` known only through support samples on a direction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBody {
    grid: DirectionGrid,
    support: Vec<f64>,
}

impl GridBody {
    pub fn new(grid: DirectionGrid, support: Vec<f64>) -> Result<Self> {
        if support.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: support.len(),
            });
        }
        if let Some((i, &v)) = support.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::NonPositiveSupport { index: i, value: v });
        }
        Ok(Self { grid, support })
    }

    /// The ball of radius `r` sampled on `grid`.
    pub fn ball(grid: DirectionGrid, r: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![r; n])
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }
}

impl ContainsPoint for GridBody {
    fn dimension(&self) -> usize {
        self.grid.dimension
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.grid
            .nodes
            .iter()
            .zip(&self.support)
            .all(|(v, h)| v.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= *h)
    }
}
