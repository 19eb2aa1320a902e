//! Executable checks: the variational formula for the Gaussian volume, the
//! Ehrhard and log-concavity inequalities, the mixed-measure inequality,
//! the isoperimetric lower bound, Ball's upper bound and uniqueness.
//!
//! Each check returns a [`CheckResult`] whose witness holds the exact inputs
//! of its worst case; [`rerun_witness`] recomputes it.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::SupportField;
use crate::fmt::sig9;
use crate::gauss::{
    ball_bound, facet_gauss_mass, gauss_constants, gauss_surface_polygon, gauss_volume,
    lp_gauss_surface_polygon, rescale_to_volume, smooth_lp_density,
};
use crate::geometry::{hausdorff_distance, polygon_hausdorff, wulff_shape, wulff_shape_indexed, SupportPolygon};
use crate::io::{body_to_value, BodyFile};
use crate::smooth::{default_c0, min_start_radius, solve_homotopy, HomotopyOptions, START_RADIUS_MAX};
use crate::special::std_normal_quantile;
use crate::vec2::Vec2;
use crate::SolvedBody;

/// Uniform slack for inequality checks.
pub const SLACK: f64 = 1e-6;
/// Relative tolerance of the extrapolated variational derivative.
pub const VARIATIONAL_TOL: f64 = 1e-4;
/// Angular resolution of the polygon bracketing a curved L_p combination.
pub const COMBINATION_RESOLUTION: usize = 2048;
const VOLUME_RESOLUTION: usize = crate::gauss::DEFAULT_RESOLUTION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest defect found; non-positive values are margins.
    pub worst_violation: f64,
    pub witness: Value,
    pub tolerance_used: f64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CheckResult {
    fn new(name: &str, violation: f64, tolerance: f64, witness: Value, notes: Vec<String>) -> Self {
        // NaN counts as an unbounded violation
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        Self {
            name: name.to_string(),
            passed: v <= tolerance,
            worst_violation: v,
            witness,
            tolerance_used: tolerance,
            notes,
        }
    }

    /// Same outcome re-judged against another tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        Self {
            passed: self.worst_violation <= tolerance,
            tolerance_used: tolerance,
            ..self.clone()
        }
    }

    /// One table row: name, pass, worst violation, tolerance.
    pub fn row(&self) -> String {
        format!(
            "{:<24} {:<4} {:>16} {:>16}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            sig9(self.worst_violation),
            sig9(self.tolerance_used)
        )
    }
}

/// Worst of several instance results of the same check.
pub fn aggregate(name: &str, results: Vec<CheckResult>) -> Result<CheckResult> {
    let mut notes: Vec<String> = Vec::new();
    for r in &results {
        for n in &r.notes {
            if !notes.contains(n) {
                notes.push(n.clone());
            }
        }
    }
    let worst = results
        .into_iter()
        .max_by(|a, b| {
            (a.worst_violation - a.tolerance_used).total_cmp(&(b.worst_violation - b.tolerance_used))
        })
        .ok_or_else(|| Error::InvalidInput(format!("no instances for {name}")))?;
    Ok(CheckResult {
        name: name.to_string(),
        notes,
        ..worst
    })
}

fn union_normals(k: &SupportPolygon, l: &SupportPolygon) -> Vec<Vec2> {
    let mut v: Vec<Vec2> = k.normals().iter().chain(l.normals()).copied().collect();
    v.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    v.dedup_by(|a, b| (a.angle() - b.angle()).abs() <= 1e-12);
    v
}

/// `a K + b L`, exact: the sum is the Wulff shape of `a h_K + b h_L` on the
/// union of the facet normals.
pub fn minkowski_combination(k: &SupportPolygon, l: &SupportPolygon, a: f64, b: f64) -> Result<SupportPolygon> {
    let normals = union_normals(k, l);
    let h: Vec<f64> = normals
        .iter()
        .map(|&v| a * k.support_unchecked(v) + b * l.support_unchecked(v))
        .collect();
    wulff_shape(&normals, &h)
}

/// Lower and upper bounds on `γ_2(λL +_p (1-λ)·K)`.
///
/// The outer polygon is the Wulff shape of the exact support function on a
/// dense grid plus the facet normals of both bodies; the inner polygon is the
/// hull of exact boundary points `h u + h' u⊥` on the same directions.
pub fn lp_combination_volume(
    k: &SupportPolygon,
    l: &SupportPolygon,
    lambda: f64,
    p: f64,
    resolution: usize,
) -> Result<(f64, f64)> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("L_p combination needs p >= 1, got {p}")));
    }
    let mut normals: Vec<Vec2> = (0..resolution)
        .map(|j| Vec2::from_angle(TAU * j as f64 / resolution as f64))
        .collect();
    normals.extend(union_normals(k, l));
    let support = |body: &SupportPolygon, u: Vec2| -> (f64, Vec<Vec2>) {
        let h = body.support_unchecked(u);
        let tol = 1e-12 * (1.0 + h.abs());
        let argmax = body
            .vertices()
            .iter()
            .filter(|x| u.dot(**x) >= h - tol)
            .copied()
            .collect();
        (h, argmax)
    };
    let mut h_out = Vec::with_capacity(normals.len());
    let mut points = Vec::new();
    for &u in &normals {
        let (hk, xk) = support(k, u);
        let (hl, xl) = support(l, u);
        let hp = lambda * hl.powf(p) + (1.0 - lambda) * hk.powf(p);
        let h = hp.powf(1.0 / p);
        h_out.push(h);
        // one-sided derivatives come from the extreme maximizing vertices
        let t = u.perp();
        for &a in &xk {
            for &b in &xl {
                let dk = a.dot(t);
                let dl = b.dot(t);
                let dh = (lambda * hl.powf(p - 1.0) * dl + (1.0 - lambda) * hk.powf(p - 1.0) * dk) / h.powf(p - 1.0);
                points.push(u * h + t * dh);
            }
        }
    }
    let outer = wulff_shape(&normals, &h_out)?;
    let inner = SupportPolygon::from_vertices(&points)?;
    Ok((
        gauss_volume(&inner, VOLUME_RESOLUTION),
        gauss_volume(&outer, VOLUME_RESOLUTION),
    ))
}

/// Polynomial extrapolation to `t = 0` through `(t_i, d_i)` (Neville).
fn extrapolate_to_zero(ts: &[f64], ds: &[f64]) -> f64 {
    let n = ts.len();
    let mut p = ds.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            let (ti, tj) = (ts[i], ts[i + level]);
            p[i] = (tj * p[i] - ti * p[i + 1]) / (tj - ti);
        }
    }
    p[0]
}

/// Finite-difference check of `d/dt γ([h_t])|_{t=0} = (1/p) ∫ f^p dS_{p,γ,K}`
/// with `h_t = (h^p + t f^p)^{1/p}` on the facet normals of `body`; `f` is
/// given per facet.
pub fn check_variational_formula(body: &SupportPolygon, f: &[f64], p: f64, t_values: &[f64]) -> Result<CheckResult> {
    let m = body.num_facets();
    if f.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: f.len(),
        });
    }
    if p == 0.0 || !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent {p}")));
    }
    if let Some(v) = f.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidInput(format!("direction function value {v} is not positive")));
    }
    let h = body.support();
    let g0 = gauss_volume(body, VOLUME_RESOLUTION);
    let limit: f64 = (0..m)
        .map(|i| f[i].powf(p) * h[i].powf(1.0 - p) * facet_gauss_mass(body, i))
        .sum::<f64>()
        / p;
    let mut notes = Vec::new();
    let (mut ts, mut ds) = (Vec::new(), Vec::new());
    for &t in t_values {
        let ht: Vec<f64> = (0..m).map(|i| (h[i].powf(p) + t * f[i].powf(p)).powf(1.0 / p)).collect();
        let ok = ht.iter().all(|v| *v > 0.0 && v.is_finite());
        let wulff = if ok { wulff_shape_indexed(body.normals(), &ht).ok() } else { None };
        match wulff {
            Some((kt, map)) if map.iter().all(Option::is_some) => {
                ts.push(t);
                ds.push((gauss_volume(&kt, VOLUME_RESOLUTION) - g0) / t);
            }
            _ => notes.push(format!("skipped t = {t}: facets lost after the Wulff shape")),
        }
    }
    if ts.is_empty() {
        return Err(Error::InvalidInput("no usable t values".into()));
    }
    let fitted_c = ts
        .iter()
        .zip(&ds)
        .map(|(t, d)| (d - limit).abs() / t)
        .fold(0.0, f64::max);
    notes.push(format!("fitted first-order constant {}", sig9(fitted_c)));
    let extrapolated = extrapolate_to_zero(&ts, &ds);
    let violation = (extrapolated - limit).abs() / limit.abs();
    let witness = json!({
        "check": "variational_formula",
        "body": body_to_value(body),
        "f": f,
        "p": p,
        "t_values": t_values,
        "limit": limit,
        "extrapolated": extrapolated,
    });
    Ok(CheckResult::new("variational_formula", violation, VARIATIONAL_TOL, witness, notes))
}

/// `Ψ(γ(λL + (1-λ)K)) >= λ Ψ(γ(L)) + (1-λ) Ψ(γ(K))` at each `λ`.
pub fn check_ehrhard(k: &SupportPolygon, l: &SupportPolygon, lambdas: &[f64]) -> Result<CheckResult> {
    let gk = gauss_volume(k, VOLUME_RESOLUTION);
    let gl = gauss_volume(l, VOLUME_RESOLUTION);
    let (qk, ql) = (std_normal_quantile(gk)?, std_normal_quantile(gl)?);
    let mut worst = f64::NEG_INFINITY;
    for &lam in lambdas {
        check_lambda(lam)?;
        let m = minkowski_combination(k, l, 1.0 - lam, lam)?;
        let lhs = std_normal_quantile(gauss_volume(&m, VOLUME_RESOLUTION))?;
        worst = worst.max(lam * ql + (1.0 - lam) * qk - lhs);
    }
    let mut notes = Vec::new();
    if polygon_hausdorff(k, l, 1024) < 1e-12 {
        notes.push("equality case K = L".to_string());
    }
    let witness = json!({"check": "ehrhard", "K": body_to_value(k), "L": body_to_value(l), "lambdas": lambdas});
    Ok(CheckResult::new("ehrhard", worst, SLACK, witness, notes))
}

fn check_lambda(lam: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lam) {
        return Err(Error::InvalidInput(format!("lambda {lam} outside [0, 1]")));
    }
    Ok(())
}

/// `γ(λL + (1-λ)K) >= γ(L)^λ γ(K)^{1-λ}` for the Minkowski combination and
/// for the L_p combination.
///
/// The L_p body is curved, so its volume is bracketed; the reported
/// violation uses the outer bound, i.e. the bracket width is the
/// discretization allowance.
pub fn check_log_concavity(k: &SupportPolygon, l: &SupportPolygon, lambdas: &[f64], p: f64) -> Result<CheckResult> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("log-concavity check needs p >= 1, got {p}")));
    }
    let gk = gauss_volume(k, VOLUME_RESOLUTION);
    let gl = gauss_volume(l, VOLUME_RESOLUTION);
    let mut worst = f64::NEG_INFINITY;
    let mut allowance: f64 = 0.0;
    for &lam in lambdas {
        check_lambda(lam)?;
        let rhs = gl.powf(lam) * gk.powf(1.0 - lam);
        let m = minkowski_combination(k, l, 1.0 - lam, lam)?;
        worst = worst.max(rhs - gauss_volume(&m, VOLUME_RESOLUTION));
        let (inner, outer) = lp_combination_volume(k, l, lam, p, COMBINATION_RESOLUTION)?;
        allowance = allowance.max(outer - inner);
        worst = worst.max(rhs - outer);
    }
    let name = "log_concavity";
    let notes = vec![format!("discretization allowance {}", sig9(allowance))];
    let witness = json!({
        "check": name, "K": body_to_value(k), "L": body_to_value(l), "lambdas": lambdas, "p": p,
    });
    Ok(CheckResult::new(name, worst, SLACK, witness, notes))
}

/// `λL +_p (1-λ)·K ⊇ λL + (1-λ)K` for `p >= 1`, compared through support
/// functions on a dense grid plus the facet normals of both bodies; the
/// violation is the largest excess of the Minkowski support value.
pub fn check_lp_inclusion(k: &SupportPolygon, l: &SupportPolygon, lambdas: &[f64], p: f64) -> Result<CheckResult> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("inclusion check needs p >= 1, got {p}")));
    }
    let mut dirs: Vec<Vec2> = (0..1024).map(|j| Vec2::from_angle(TAU * j as f64 / 1024.0)).collect();
    dirs.extend(union_normals(k, l));
    let mut worst = f64::NEG_INFINITY;
    for &lam in lambdas {
        check_lambda(lam)?;
        for &u in &dirs {
            let (hk, hl) = (k.support_unchecked(u), l.support_unchecked(u));
            let minkowski = lam * hl + (1.0 - lam) * hk;
            let lp = (lam * hl.powf(p) + (1.0 - lam) * hk.powf(p)).powf(1.0 / p);
            worst = worst.max(minkowski - lp);
        }
    }
    let witness = json!({
        "check": "lp_inclusion", "K": body_to_value(k), "L": body_to_value(l), "lambdas": lambdas, "p": p,
    });
    Ok(CheckResult::new("lp_inclusion", worst, SLACK, witness, Vec::new()))
}

/// `∫ h_L^p dS_{p,γ,K} >= ∫ h_K^p dS_{p,γ,K}` after rescaling both bodies to
/// `γ_2 = 1/2`, in both orientations.
pub fn check_mixed_measure_inequality(k: &SupportPolygon, l: &SupportPolygon, p: f64) -> Result<CheckResult> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("mixed-measure check needs p >= 1, got {p}")));
    }
    let kk = k.scaled(rescale_to_volume(k, 0.5, VOLUME_RESOLUTION)?)?;
    let ll = l.scaled(rescale_to_volume(l, 0.5, VOLUME_RESOLUTION)?)?;
    let mixed = |a: &SupportPolygon, b: &SupportPolygon| -> Result<f64> {
        let em = lp_gauss_surface_polygon(a, p)?;
        Ok(em
            .edges
            .iter()
            .map(|e| b.support_unchecked(e.normal).powf(p) * e.mass)
            .sum())
    };
    let v1 = mixed(&kk, &kk)? - mixed(&kk, &ll)?;
    let v2 = mixed(&ll, &ll)? - mixed(&ll, &kk)?;
    let mut notes = Vec::new();
    if polygon_hausdorff(&kk, &ll, 1024) < 1e-9 {
        notes.push("equality case K = L".to_string());
    }
    let witness = json!({"check": "mixed_measure", "K": body_to_value(k), "L": body_to_value(l), "p": p});
    Ok(CheckResult::new("mixed_measure", v1.max(v2), SLACK, witness, notes))
}

/// Total `S_{p,γ,K}` of an origin-symmetric body rescaled to `γ_2 = 1/2`.
pub fn half_volume_lp_total(k: &SupportPolygon, p: f64) -> Result<f64> {
    let kk = k.scaled(rescale_to_volume(k, 0.5, VOLUME_RESOLUTION)?)?;
    Ok(lp_gauss_surface_polygon(&kk, p)?.total())
}

/// `|S_{p,γ,K}| >= mass_bound(2, p)` for origin-symmetric `K` with
/// `γ_2(K) = 1/2`; the violation is `1 - total / bound`.
pub fn check_isoperimetric(k: &SupportPolygon, p: f64) -> Result<CheckResult> {
    if !k.is_origin_symmetric(1e-9) {
        return Err(Error::InvalidInput(
            "isoperimetric check needs an origin-symmetric body".into(),
        ));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("isoperimetric check needs p >= 1, got {p}")));
    }
    let bound = gauss_constants(2, p)?.mass_bound;
    let total = half_volume_lp_total(k, p)?;
    let witness = json!({"check": "isoperimetric", "K": body_to_value(k), "p": p, "total": total, "bound": bound});
    Ok(CheckResult::new("isoperimetric", 1.0 - total / bound, SLACK, witness, Vec::new()))
}

/// Gaussian surface area `<= 4·2^{1/4}`.
pub fn check_ball_bound(k: &SupportPolygon) -> CheckResult {
    let total = gauss_surface_polygon(k).total();
    let witness = json!({"check": "ball_bound", "K": body_to_value(k), "total": total});
    CheckResult::new("ball_bound", total - ball_bound(2), SLACK, witness, Vec::new())
}

fn uniqueness_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("uniqueness check needs p >= 1, got {p}")));
    }
    Ok(())
}

const NOTE_SKIPPED: &str = "skipped: a body has gaussian volume below 1/2";
const NOTE_MEASURES_DIFFER: &str = "measures differ; nothing to certify";

/// If `S_{p,γ,K}` and `S_{p,γ,L}` agree within `tol_measure` on the union of
/// facet normals, the bodies must agree within `tol_body` (Hausdorff).
/// Skipped when either volume is below `1/2 - 1e-9`.
pub fn check_uniqueness(
    k: &SupportPolygon,
    l: &SupportPolygon,
    p: f64,
    tol_measure: f64,
    tol_body: f64,
) -> Result<CheckResult> {
    uniqueness_exponent(p)?;
    let witness = json!({
        "check": "uniqueness", "K": body_to_value(k), "L": body_to_value(l), "p": p,
        "tol_measure": tol_measure, "tol_body": tol_body,
    });
    let gk = gauss_volume(k, VOLUME_RESOLUTION);
    let gl = gauss_volume(l, VOLUME_RESOLUTION);
    if gk < 0.5 - 1e-9 || gl < 0.5 - 1e-9 {
        return Ok(CheckResult::new("uniqueness", 0.0, tol_body, witness, vec![NOTE_SKIPPED.into()]));
    }
    let mk = lp_gauss_surface_polygon(k, p)?;
    let ml = lp_gauss_surface_polygon(l, p)?;
    let mass_at = |em: &crate::gauss::EdgeMeasure, v: Vec2| -> f64 {
        em.edges
            .iter()
            .find(|e| e.normal.dot(v) >= 1.0 - 1e-12)
            .map_or(0.0, |e| e.mass)
    };
    let diff = union_normals(k, l)
        .into_iter()
        .map(|v| (mass_at(&mk, v) - mass_at(&ml, v)).abs())
        .fold(0.0, f64::max);
    if diff > tol_measure {
        return Ok(CheckResult::new("uniqueness", 0.0, tol_body, witness, vec![NOTE_MEASURES_DIFFER.into()]));
    }
    let normals = union_normals(k, l);
    let hk: Vec<f64> = normals.iter().map(|&v| k.support_unchecked(v)).collect();
    let hl: Vec<f64> = normals.iter().map(|&v| l.support_unchecked(v)).collect();
    let d = hausdorff_distance(&hk, &hl)?.max(polygon_hausdorff(k, l, 4096));
    Ok(CheckResult::new("uniqueness", d, tol_body, witness, Vec::new()))
}

/// Uniqueness on sampled fields of equal resolution: equal densities within
/// `tol_measure` force `max |h_a - h_b| <= tol_body`.
pub fn check_uniqueness_fields(
    a: &SupportField,
    b: &SupportField,
    p: f64,
    tol_measure: f64,
    tol_body: f64,
) -> Result<CheckResult> {
    uniqueness_exponent(p)?;
    if a.resolution() != b.resolution() {
        return Err(Error::LengthMismatch {
            expected: a.resolution(),
            actual: b.resolution(),
        });
    }
    let witness = json!({
        "check": "uniqueness_fields", "a": a.values(), "b": b.values(), "p": p,
        "tol_measure": tol_measure, "tol_body": tol_body,
    });
    let va = crate::gauss::field_gauss_volume(a);
    let vb = crate::gauss::field_gauss_volume(b);
    if va < 0.5 - 1e-9 || vb < 0.5 - 1e-9 {
        return Ok(CheckResult::new("uniqueness", 0.0, tol_body, witness, vec![NOTE_SKIPPED.into()]));
    }
    let da = smooth_lp_density(a, p)?;
    let db = smooth_lp_density(b, p)?;
    let diff = da.iter().zip(&db).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if diff > tol_measure {
        return Ok(CheckResult::new("uniqueness", 0.0, tol_body, witness, vec![NOTE_MEASURES_DIFFER.into()]));
    }
    let d = hausdorff_distance(a.values(), b.values())?;
    Ok(CheckResult::new("uniqueness", d, tol_body, witness, Vec::new()))
}

fn body_from(v: &Value) -> Result<SupportPolygon> {
    let file: BodyFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let normals: Vec<Vec2> = file.normals.iter().map(|&n| n.into()).collect();
    wulff_shape(&normals, &file.support)
}

fn field_from(v: &Value, p: f64) -> Result<SupportField> {
    let values: Vec<f64> = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    SupportField::new(values, p)
}

fn get<T: serde::de::DeserializeOwned>(w: &Value, key: &str) -> Result<T> {
    serde_json::from_value(w.get(key).cloned().unwrap_or(Value::Null))
        .map_err(|e| Error::Parse(format!("witness field {key}: {e}")))
}

/// Recomputes a single-instance check from its witness.
pub fn rerun_witness(witness: &Value) -> Result<CheckResult> {
    let name: String = get(witness, "check")?;
    let k = || body_from(witness.get("K").unwrap_or(&Value::Null));
    let l = || body_from(witness.get("L").unwrap_or(&Value::Null));
    match name.as_str() {
        "variational_formula" => {
            let body = body_from(witness.get("body").unwrap_or(&Value::Null))?;
            let f: Vec<f64> = get(witness, "f")?;
            let t: Vec<f64> = get(witness, "t_values")?;
            check_variational_formula(&body, &f, get(witness, "p")?, &t)
        }
        "ehrhard" => check_ehrhard(&k()?, &l()?, &get::<Vec<f64>>(witness, "lambdas")?),
        "log_concavity" => check_log_concavity(&k()?, &l()?, &get::<Vec<f64>>(witness, "lambdas")?, get(witness, "p")?),
        "lp_inclusion" => check_lp_inclusion(&k()?, &l()?, &get::<Vec<f64>>(witness, "lambdas")?, get(witness, "p")?),
        "mixed_measure" => check_mixed_measure_inequality(&k()?, &l()?, get(witness, "p")?),
        "isoperimetric" => check_isoperimetric(&k()?, get(witness, "p")?),
        "ball_bound" => Ok(check_ball_bound(&k()?)),
        "uniqueness" => check_uniqueness(
            &k()?,
            &l()?,
            get(witness, "p")?,
            get(witness, "tol_measure")?,
            get(witness, "tol_body")?,
        ),
        "uniqueness_fields" => {
            let p: f64 = get(witness, "p")?;
            check_uniqueness_fields(
                &field_from(witness.get("a").unwrap_or(&Value::Null), p)?,
                &field_from(witness.get("b").unwrap_or(&Value::Null), p)?,
                p,
                get(witness, "tol_measure")?,
                get(witness, "tol_body")?,
            )
        }
        other => Err(Error::InvalidInput(format!("unknown check {other}"))),
    }
}

/// Random convex polygon with the origin well inside: hull of 3 to 10
/// points at random angles and radii in `[0.3, 2.5]`, every support value
/// above 0.05.
pub fn random_polygon(rng: &mut impl Rng) -> SupportPolygon {
    random_polygon_with_margin(rng, 0.05)
}

/// Lowest support value drawn for variational instances. The expansion of
/// `(h^p + t f^p)^{1/p}` in `t` converges only for `t < (h/f)^p`, so a
/// facet hugging the origin pushes the fixed t-ladder out of the
/// asymptotic regime.
pub const VARIATIONAL_MARGIN: f64 = 0.3;

/// As [`random_polygon`], with every support value above `margin`.
pub fn random_polygon_with_margin(rng: &mut impl Rng, margin: f64) -> SupportPolygon {
    loop {
        let m = rng.random_range(3..=10);
        let pts: Vec<Vec2> = (0..m)
            .map(|_| Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(0.3..2.5))
            .collect();
        if let Ok(k) = SupportPolygon::from_vertices(&pts) {
            if k.support().iter().all(|h| *h > margin) {
                return k;
            }
        }
    }
}

/// Random origin-symmetric polygon: hull of 2 to 6 points and their
/// negatives.
pub fn random_symmetric_polygon(rng: &mut impl Rng) -> SupportPolygon {
    loop {
        let m = rng.random_range(2..=6);
        let mut pts: Vec<Vec2> = (0..m)
            .map(|_| Vec2::from_angle(rng.random_range(0.0..PI)) * rng.random_range(0.3..2.5))
            .collect();
        let neg: Vec<Vec2> = pts.iter().map(|v| -*v).collect();
        pts.extend(neg);
        if let Ok(k) = SupportPolygon::from_vertices(&pts) {
            if k.support().iter().all(|h| *h > 0.05) && k.is_origin_symmetric(1e-9) {
                return k;
            }
        }
    }
}

/// Symmetric hexagon `[-a, a] x [-len, len]` with caps at `(0, ±(len + a))`.
pub fn elongated_hexagon(a: f64, len: f64) -> Result<SupportPolygon> {
    SupportPolygon::from_vertices(&[
        Vec2::new(a, len),
        Vec2::new(0.0, len + a),
        Vec2::new(-a, len),
        Vec2::new(-a, -len),
        Vec2::new(0.0, -len - a),
        Vec2::new(a, -len),
    ])
}

/// Half-volume L_p totals along the hexagon family for growing lengths.
pub fn isoperimetric_sweep(p: f64, lengths: &[f64]) -> Result<Vec<f64>> {
    lengths
        .iter()
        .map(|&len| half_volume_lp_total(&elongated_hexagon(1.0, len)?, p))
        .collect()
}

/// Names of the checks run by [`run_suite`].
pub const SUITE_CHECKS: [&str; 9] = [
    "variational_formula",
    "ehrhard",
    "log_concavity_p1",
    "log_concavity_p2",
    "lp_inclusion",
    "mixed_measure",
    "isoperimetric",
    "ball_bound",
    "uniqueness",
];

fn instance_rng(seed: u64, check: usize, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((check as u64 + 1) << 48));
    rng.set_stream(instance as u64);
    rng
}

fn random_lambdas(rng: &mut impl Rng) -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0, rng.random_range(0.0..1.0)]
}

/// One instance of check `idx` in [`SUITE_CHECKS`].
fn suite_instance(idx: usize, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    match SUITE_CHECKS[idx] {
        "variational_formula" => {
            let k = random_polygon_with_margin(rng, VARIATIONAL_MARGIN);
            let f: Vec<f64> = (0..k.num_facets()).map(|_| rng.random_range(0.5..1.5)).collect();
            let p = [1.0, 1.5, 2.0][rng.random_range(0..3)];
            check_variational_formula(&k, &f, p, &[1e-3, 5e-4, 2.5e-4])
        }
        "ehrhard" => {
            let (k, l) = (random_polygon(rng), random_polygon(rng));
            check_ehrhard(&k, &l, &random_lambdas(rng))
        }
        "log_concavity_p1" | "log_concavity_p2" => {
            let p = if SUITE_CHECKS[idx] == "log_concavity_p1" { 1.0 } else { 2.0 };
            let (k, l) = (random_polygon(rng), random_polygon(rng));
            let mut r = check_log_concavity(&k, &l, &random_lambdas(rng), p)?;
            r.name = SUITE_CHECKS[idx].to_string();
            Ok(r)
        }
        "lp_inclusion" => {
            let (k, l) = (random_polygon(rng), random_polygon(rng));
            check_lp_inclusion(&k, &l, &random_lambdas(rng), rng.random_range(1.0..3.0))
        }
        "mixed_measure" => {
            let (k, l) = (random_polygon(rng), random_polygon(rng));
            check_mixed_measure_inequality(&k, &l, rng.random_range(1.0..3.0))
        }
        "isoperimetric" => check_isoperimetric(&random_symmetric_polygon(rng), rng.random_range(1.0..3.0)),
        "ball_bound" => {
            let k = random_polygon(rng);
            let s = 10f64.powf(rng.random_range(-1.0..2.0));
            Ok(check_ball_bound(&k.scaled(s)?))
        }
        "uniqueness" => {
            let n = 128;
            let p = rng.random_range(1.0..2.5);
            let c = default_c0(p)?;
            let (a2, a4) = (rng.random_range(-0.2..0.2), rng.random_range(-0.1..0.1));
            let f: Vec<f64> = (0..n)
                .map(|j| {
                    let t = TAU * j as f64 / n as f64;
                    c * (1.0 + a2 * (2.0 * t).cos() + a4 * (4.0 * t).sin())
                })
                .collect();
            let lo = min_start_radius(p)?;
            let solve = |r: f64| -> Result<SupportField> {
                let opts = HomotopyOptions {
                    start_radius: Some(r),
                    ..HomotopyOptions::with_resolution(n)
                };
                match solve_homotopy(&f, p, &opts)?.body {
                    SolvedBody::Field(field) => Ok(field),
                    SolvedBody::Polygon(_) => Err(Error::InvalidInput("expected a field".into())),
                }
            };
            let a = solve(lo + 0.05)?;
            let b = solve(START_RADIUS_MAX - 0.05)?;
            let mut r = check_uniqueness_fields(&a, &b, p, 1e-9, 1e-6)?;
            r.name = "uniqueness".into();
            Ok(r)
        }
        _ => unreachable!("suite check index in range"),
    }
}

/// Runs every suite check on `instances` seeded random instances (the
/// solver-backed uniqueness check on at most 10) and returns one aggregated
/// result per check.
pub fn run_suite(seed: u64, instances: usize) -> Result<Vec<CheckResult>> {
    (0..SUITE_CHECKS.len())
        .map(|idx| run_check(seed, idx, instances))
        .collect()
}

/// Aggregated result of one suite check.
pub fn run_check(seed: u64, idx: usize, instances: usize) -> Result<CheckResult> {
    let count = if SUITE_CHECKS[idx] == "uniqueness" {
        instances.clamp(1, 10)
    } else {
        instances.max(1)
    };
    let results: Vec<CheckResult> = (0..count)
        .into_par_iter()
        .map(|i| suite_instance(idx, &mut instance_rng(seed, idx, i)))
        .collect::<Result<_>>()?;
    aggregate(SUITE_CHECKS[idx], results)
}

/// Plain-text table of suite results.
pub fn format_table(results: &[CheckResult]) -> String {
    let mut s = format!("{:<24} {:<4} {:>16} {:>16}\n", "check", "pass", "worst_violation", "tolerance");
    for r in results {
        s.push_str(&r.row());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disc;
    use crate::special::std_normal_quantile;

    fn unit_disc_like() -> SupportPolygon {
        SupportPolygon::regular(512, 1.0, 0.0).unwrap()
    }

    #[test]
    fn variational_examples() {
        let k = unit_disc_like();
        let r = check_variational_formula(&k, &vec![1.0; 512], 1.0, &[1e-3, 5e-4, 2.5e-4]).unwrap();
        assert!(r.passed, "{r:?}");
        let limit = r.witness["limit"].as_f64().unwrap();
        assert!((limit - (-0.5f64).exp()).abs() < 1e-4);
        // forward difference at t = 1e-4
        let kt = wulff_shape(k.normals(), &vec![1.0 + 1e-4; 512]).unwrap();
        let fd = (gauss_volume(&kt, VOLUME_RESOLUTION) - gauss_volume(&k, VOLUME_RESOLUTION)) / 1e-4;
        assert!((fd - limit).abs() < 1e-4);

        let sq = SupportPolygon::rectangle(1.0, 1.0).unwrap();
        let r = check_variational_formula(&sq, &[1.0; 4], 1.0, &[1e-3, 5e-4, 2.5e-4]).unwrap();
        assert!(r.passed);
        assert!((r.witness["limit"].as_f64().unwrap() - 0.6607634841360668).abs() < 1e-12);

        // f = h_K: (1/p) ∫ h^p dS_p = (1/p) ∫ h dS
        let k = SupportPolygon::from_vertices(&[
            Vec2::new(1.5, -0.3),
            Vec2::new(0.2, 1.1),
            Vec2::new(-0.9, 0.4),
            Vec2::new(-0.4, -1.0),
        ])
        .unwrap();
        for p in [1.0, 1.5, 2.0] {
            let r = check_variational_formula(&k, k.support(), p, &[1e-3, 5e-4, 2.5e-4]).unwrap();
            let expect: f64 = (0..k.num_facets())
                .map(|i| k.support()[i] * facet_gauss_mass(&k, i))
                .sum::<f64>()
                / p;
            assert!((r.witness["limit"].as_f64().unwrap() - expect).abs() < 1e-14);
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn extrapolation_is_exact_on_quadratics() {
        let ts = [1e-3, 5e-4, 2.5e-4];
        let ds: Vec<f64> = ts.iter().map(|t| 0.7 + 3.0 * t - 40.0 * t * t).collect();
        assert!((extrapolate_to_zero(&ts, &ds) - 0.7).abs() < 1e-13);
    }

    #[test]
    fn ehrhard_examples() {
        let sq = SupportPolygon::rectangle(1.0, 1.0).unwrap();
        let r = check_ehrhard(&sq, &sq, &[0.0, 0.3, 1.0]).unwrap();
        assert!(r.passed && r.worst_violation.abs() < 1e-12);
        assert!(r.notes.iter().any(|n| n.contains("equality")));

        let ball = unit_disc_like();
        let r = check_ehrhard(&ball, &sq, &[0.0, 1.0]).unwrap();
        assert!(r.worst_violation.abs() < 1e-12);
        let r = check_ehrhard(&ball, &sq, &[0.5]).unwrap();
        assert!(r.passed && r.worst_violation < -1e-6, "{}", r.worst_violation);
    }

    #[test]
    fn minkowski_sum_of_squares() {
        let a = SupportPolygon::rectangle(1.0, 2.0).unwrap();
        let b = SupportPolygon::rectangle(3.0, 1.0).unwrap();
        let m = minkowski_combination(&a, &b, 0.5, 0.5).unwrap();
        assert_eq!(m.support(), &[2.0, 1.5, 2.0, 1.5]);
    }

    #[test]
    fn log_concavity_examples() {
        let sq = SupportPolygon::rectangle(0.8, 1.1).unwrap();
        let r = check_log_concavity(&sq, &sq, &[0.3, 0.7], 2.0).unwrap();
        assert!(r.passed);
        assert!(r.worst_violation.abs() < 1e-6);

        // balls: closed-form volumes, B_{0.8} and B_{1.5}, λ = 0.3, p = 2
        let (r0, r1, lam): (f64, f64, f64) = (0.8, 1.5, 0.3);
        let rp = (lam * r1 * r1 + (1.0 - lam) * r0 * r0).sqrt();
        let vol = |r: f64| 1.0 - (-0.5 * r * r).exp();
        let margin = vol(rp) - vol(r1).powf(lam) * vol(r0).powf(1.0 - lam);
        assert!(margin > 0.01);
        let k = SupportPolygon::regular(256, 0.8, 0.0).unwrap();
        let l = SupportPolygon::regular(256, 1.5, 0.0).unwrap();
        let (inner, outer) = lp_combination_volume(&k, &l, lam, 2.0, COMBINATION_RESOLUTION).unwrap();
        assert!(inner <= outer, "{inner} {outer}");
        assert!((outer - vol(rp)).abs() < 1e-4);
        let r = check_log_concavity(&k, &l, &[lam], 2.0).unwrap();
        assert!(r.passed && r.worst_violation < -0.01);
        assert!(Disc::new(rp).is_ok());
    }

    #[test]
    fn lp_inclusion_examples() {
        let sq = SupportPolygon::rectangle(1.0, 1.0).unwrap();
        let r = check_lp_inclusion(&sq, &sq, &[0.0, 0.4, 1.0], 2.0).unwrap();
        assert!(r.passed && r.worst_violation.abs() < 1e-15);
        let thin = SupportPolygon::rectangle(2.0, 0.3).unwrap();
        let r = check_lp_inclusion(&sq, &thin, &[0.5], 2.0).unwrap();
        assert!(r.passed);
        // p = 1 is the Minkowski combination itself
        assert!(check_lp_inclusion(&sq, &thin, &[0.5], 1.0).unwrap().worst_violation.abs() < 1e-15);
        assert!(r.worst_violation <= 1e-15);
        // along (1, 0) the L_p value (0.5·4 + 0.5)^{1/2} exceeds 1.5
        let u = Vec2::new(1.0, 0.0);
        let lp = (0.5 * thin.support_at(u).unwrap().powi(2) + 0.5 * sq.support_at(u).unwrap().powi(2)).sqrt();
        assert!((lp - 2.5f64.sqrt()).abs() < 1e-15 && lp > 1.5);
        assert!(check_lp_inclusion(&sq, &thin, &[0.5], 0.5).is_err());
        assert!(check_uniqueness(&sq, &sq, 0.5, 1e-9, 1e-9).is_err());
    }

    #[test]
    fn mixed_measure_examples() {
        let sq = SupportPolygon::rectangle(1.0, 1.0).unwrap();
        let r = check_mixed_measure_inequality(&sq, &sq, 1.0).unwrap();
        assert!(r.passed && r.worst_violation.abs() < 1e-9);
        let disc = unit_disc_like();
        let r = check_mixed_measure_inequality(&disc, &sq, 1.0).unwrap();
        assert!(r.passed && r.worst_violation < -1e-3, "{}", r.worst_violation);

        // small perturbation: second-order margin
        let margins: Vec<f64> = [1e-2, 2e-2]
            .iter()
            .map(|&eps| {
                let h: Vec<f64> = (0..512).map(|j| 1.0 + eps * (2.0 * TAU * j as f64 / 512.0).cos()).collect();
                let l = wulff_shape(disc.normals(), &h).unwrap();
                -check_mixed_measure_inequality(&disc, &l, 1.0).unwrap().worst_violation
            })
            .collect();
        assert!(margins[0] > 0.0);
        let ratio = margins[1] / margins[0];
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn isoperimetric_examples() {
        let r2 = (2.0 * 2f64.ln()).sqrt();
        let k = SupportPolygon::regular(2048, r2, 0.0).unwrap();
        let t1 = half_volume_lp_total(&k, 1.0).unwrap();
        assert!((t1 - r2 / 2.0).abs() < 1e-5);
        let t2 = half_volume_lp_total(&k, 2.0).unwrap();
        assert!((t2 - 0.5).abs() < 1e-5);
        assert!(check_isoperimetric(&k, 1.0).unwrap().passed);
        assert!(check_isoperimetric(&k, 2.0).unwrap().passed);
        let tri = SupportPolygon::regular(3, 1.0, 0.0).unwrap();
        assert!(check_isoperimetric(&tri, 1.0).is_err());
    }

    #[test]
    fn elongated_hexagons_trend() {
        let lengths = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        for p in [1.0, 2.0] {
            let totals = isoperimetric_sweep(p, &lengths).unwrap();
            let bound = gauss_constants(2, p).unwrap().mass_bound;
            assert!(totals.iter().all(|t| *t >= bound));
            // the strip {|x_1| <= a} with γ = 1/2 carries √(2/π) a^{1-p} e^{-a²/2}
            let a = std_normal_quantile(0.75).unwrap();
            let strip = (2.0 / PI).sqrt() * a.powf(1.0 - p) * (-0.5 * a * a).exp();
            let gaps: Vec<f64> = totals.iter().map(|t| (t - strip).abs()).collect();
            assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{totals:?} vs {strip}");
            assert!(gaps.last().unwrap() < &1e-2);
        }
    }

    #[test]
    fn ball_bound_examples() {
        let r = check_ball_bound(&unit_disc_like());
        assert!(r.passed);
        assert!((r.witness["total"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-4);
        let big = SupportPolygon::rectangle(50.0, 50.0).unwrap();
        let r = check_ball_bound(&big);
        assert!(r.passed && r.witness["total"].as_f64().unwrap() < 1e-300);
    }

    #[test]
    fn uniqueness_examples() {
        let sq = SupportPolygon::rectangle(1.5, 1.5).unwrap();
        let r = check_uniqueness(&sq, &sq, 1.0, 1e-12, 1e-12).unwrap();
        assert!(r.passed && r.worst_violation == 0.0 && r.notes.is_empty());

        // p = 1: r e^{-r²/2} takes equal values at r = 0.6 and a larger root
        let p = 1.0;
        let target = 0.6 * (-0.18f64).exp();
        let (mut lo, mut hi): (f64, f64) = (1.0, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * (-0.5 * mid * mid).exp() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let small = SupportPolygon::regular(256, 0.6, 0.0).unwrap();
        let large = SupportPolygon::regular(256, lo, 0.0).unwrap();
        let r = check_uniqueness(&small, &large, p, 1e-6, 1e-6).unwrap();
        assert!(r.passed);
        assert!(r.notes.iter().any(|n| n.starts_with("skipped")));
    }

    #[test]
    fn suite_smoke_and_witness_reruns() {
        let results = run_suite(7, 4).unwrap();
        assert_eq!(results.len(), SUITE_CHECKS.len());
        for r in &results {
            assert!(r.passed, "{}", r.row());
            let again = rerun_witness(&r.witness).unwrap();
            assert_eq!(again.worst_violation.to_bits(), r.worst_violation.to_bits(), "{}", r.name);
            // loosening never flips a pass
            assert!(r.with_tolerance(r.tolerance_used * 10.0).passed);
        }
        let table = format_table(&results);
        assert_eq!(table.lines().count(), SUITE_CHECKS.len() + 1);
    }

    #[test]
    fn ehrhard_implies_log_concavity() {
        for i in 0..10 {
            let mut rng = instance_rng(3, 99, i);
            let (k, l) = (random_polygon(&mut rng), random_polygon(&mut rng));
            let lambdas = random_lambdas(&mut rng);
            let e = check_ehrhard(&k, &l, &lambdas).unwrap();
            let c = check_log_concavity(&k, &l, &lambdas, 1.0).unwrap();
            assert!(!(e.passed && !c.passed));
        }
    }
}
