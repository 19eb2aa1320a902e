//! Newton/homotopy solver for the planar equation
//! `(1/2π) h^{1-p} e^{-(h'² + h²)/2} (h'' + h) = f` on a uniform periodic
//! grid, continued from a constant solution along `f_t = (1-t) c0 + t f`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SupportField;
use crate::gauss::{field_gauss_volume, gauss_constants, smooth_lp_density, smooth_lp_density_unchecked};
use crate::geometry::{wulff_shape, SupportPolygon};
use crate::linalg::CyclicTridiagonal;
use crate::report::{HomotopyStep, HomotopyTrace, SolveReport, SolvedBody};
use crate::special::gauss_ball_volume;
use crate::vec2::Vec2;

pub const MIN_RESOLUTION: usize = 64;
/// Upper end of the radius interval searched for a starting constant.
pub const START_RADIUS_MAX: f64 = 3.0;
const GUARD_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 20;

pub const FLAG_C0_RECHOSEN: &str = "c0-rechosen";
pub const FLAG_NO_MASS_BOUND: &str = "no-mass-bound-certificate";
pub const FLAG_NO_UNIQUENESS: &str = crate::discrete::FLAG_NO_UNIQUENESS;
pub const FLAG_UNCERTIFIED_P: &str = crate::discrete::FLAG_UNCERTIFIED_P;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Constant solutions with `γ_2 > 1/2`.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyOptions {
    pub resolution: usize,
    pub t_step_initial: f64,
    pub t_step_min: f64,
    /// Target for the residual ∞-norm.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub branch: Branch,
    /// Radius of the starting constant solution; chosen automatically when
    /// `None`.
    pub start_radius: Option<f64>,
    /// Refuse densities whose total mass reaches the admissible bound.
    pub enforce_mass_bound: bool,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        Self {
            resolution: 512,
            t_step_initial: 1.0,
            t_step_min: 1.0 / 1024.0,
            newton_tol: 1e-12,
            newton_max_iters: 30,
            branch: Branch::Upper,
            start_radius: None,
            enforce_mass_bound: true,
        }
    }
}

impl HomotopyOptions {
    pub fn with_resolution(resolution: usize) -> Self {
        Self {
            resolution,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < MIN_RESOLUTION || !self.resolution.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "resolution {} must be even and at least {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        if !(self.t_step_min > 0.0 && self.t_step_min <= self.t_step_initial && self.t_step_initial <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "need 0 < t_step_min ({}) <= t_step_initial ({}) <= 1",
                self.t_step_min, self.t_step_initial
            )));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iters == 0 {
            return Err(Error::InvalidInput("newton tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Total `S_{p,γ_2}` mass of the ball of radius `r`: `r^{2-p} e^{-r²/2}`.
pub fn ball_lp_mass(r: f64, p: f64) -> f64 {
    r.powf(2.0 - p) * (-0.5 * r * r).exp()
}

/// Radius where `r ↦ r^{2-p} e^{-r²/2}` peaks (zero when it is decreasing).
fn peak_radius(p: f64) -> f64 {
    (2.0 - p).max(0.0).sqrt()
}

/// Largest root `r0` of `(1/2π) r^{2-p} e^{-r²/2} = c0`, required to lie on
/// the `γ_2 > 1/2` branch.
pub fn constant_branch_start(c0: f64, p: f64) -> Result<f64> {
    if !(c0 > 0.0) || !c0.is_finite() || !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("need c0 > 0 and p > 0, got c0 = {c0}, p = {p}")));
    }
    let g = |r: f64| ball_lp_mass(r, p) / TAU;
    let r_peak = peak_radius(p);
    let max = if p < 2.0 {
        g(r_peak)
    } else if p == 2.0 {
        1.0 / TAU
    } else {
        f64::INFINITY
    };
    if c0 >= max * (1.0 - 1e-12) {
        return Err(Error::NoConstantSolution { c0, max });
    }
    // g decreases on (r_peak, ∞)
    let mut lo = r_peak;
    let mut hi = r_peak.max(1.0);
    while g(hi) > c0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > c0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r0 = 0.5 * (lo + hi);
    let volume = gauss_ball_volume(r0, 2);
    if !(volume > 0.5) {
        return Err(Error::WrongBranch { r0, volume });
    }
    Ok(r0)
}

/// False iff `(2-p) - r0² = -k²` within `1e-8` for some `0 <= k <= N/2`,
/// i.e. the linearization `L φ = φ'' + ((2-p) - r0²) φ` at the constant
/// solution has a kernel.
pub fn linearized_guard(r0: f64, p: f64, n: usize) -> bool {
    let a = (2.0 - p) - r0 * r0;
    (0..=n / 2).all(|k| (a + (k * k) as f64).abs() > GUARD_TOL)
}

/// Smallest admissible starting radius: `γ_2(B_r) > 1/2`, `r` on the
/// decreasing branch, and ball mass below the bound.
pub fn min_start_radius(p: f64) -> Result<f64> {
    let c = gauss_constants(2, p)?;
    let lo = c.r_half.max(peak_radius(p));
    if ball_lp_mass(lo, p) < c.mass_bound {
        return Ok(lo);
    }
    if ball_lp_mass(START_RADIUS_MAX, p) >= c.mass_bound {
        return Err(Error::RootFinding(format!("no admissible starting radius below {START_RADIUS_MAX}")));
    }
    let (mut a, mut b) = (lo, START_RADIUS_MAX);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if ball_lp_mass(mid, p) >= c.mass_bound {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b)
}

/// Default starting radius: midpoint of `[min_start_radius, 3]`.
pub fn default_start_radius(p: f64) -> Result<f64> {
    Ok(0.5 * (min_start_radius(p)? + START_RADIUS_MAX))
}

/// `c0 = (1/2π) r^{2-p} e^{-r²/2}` for the default starting radius.
pub fn default_c0(p: f64) -> Result<f64> {
    Ok(ball_lp_mass(default_start_radius(p)?, p) / TAU)
}

/// `f(θ) = c0 (1 + amplitude cos(frequency θ))` on `n` nodes.
pub fn cos_density(n: usize, c0: f64, amplitude: f64, frequency: u32) -> Vec<f64> {
    (0..n)
        .map(|k| c0 * (1.0 + amplitude * (frequency as f64 * TAU * k as f64 / n as f64).cos()))
        .collect()
}

/// Starting radius and whether the guard forced a re-choice.
///
/// A rejected radius is replaced by `r_lo + frac(j/φ) (3 - r_lo)`,
/// `j = 1, 2, …`, with `φ` the golden ratio.
pub fn choose_start_radius(p: f64, n: usize, requested: Option<f64>) -> Result<(f64, bool)> {
    let r_lo = min_start_radius(p)?;
    let mut r = match requested {
        Some(r) => r,
        None => 0.5 * (r_lo + START_RADIUS_MAX),
    };
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("start radius {r}")));
    }
    let inv_golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut rechosen = false;
    let mut j = 0;
    while !linearized_guard(r, p, n) {
        j += 1;
        let next = r_lo + (j as f64 * inv_golden).fract() * (START_RADIUS_MAX - r_lo);
        log::warn!(
            "linearized operator at r0 = {r} (p = {p}) has a kernel; re-choosing c0 with r0 = {next}"
        );
        r = next;
        rechosen = true;
        if j > 1000 {
            return Err(Error::RootFinding("no starting radius passes the guard".into()));
        }
    }
    Ok((r, rechosen))
}

/// `G = density(h) - f`.
pub fn residual(field: &SupportField, f: &[f64], p: f64) -> Result<Vec<f64>> {
    if f.len() != field.resolution() {
        return Err(Error::LengthMismatch {
            expected: field.resolution(),
            actual: f.len(),
        });
    }
    Ok(smooth_lp_density(field, p)?
        .into_iter()
        .zip(f)
        .map(|(g, fk)| g - fk)
        .collect())
}

/// Analytic Jacobian `∂G_k/∂h_j`; nonzero only for `j = k, k ± 1`.
pub fn jacobian(field: &SupportField, p: f64) -> CyclicTridiagonal {
    let h = field.values();
    let n = h.len();
    let d = field.step();
    let dh = field.first_difference();
    let c = field.convexity();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for k in 0..n {
        let (a, b) = (h[k], dh[k]);
        let base = a.powf(1.0 - p) * (-0.5 * (a * a + b * b)).exp() / TAU;
        let g = base * c[k];
        diag[k] = g * ((1.0 - p) / a - a) + base * (1.0 - 2.0 / (d * d));
        lower[k] = g * b / (2.0 * d) + base / (d * d);
        upper[k] = -g * b / (2.0 * d) + base / (d * d);
    }
    CyclicTridiagonal { lower, diag, upper }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// One damped Newton step `h ← h - s J⁻¹G`, halving `s` until the residual
/// norm decreases (at most 20 halvings). Trial fields must stay positive and
/// convex.
pub fn newton_step(field: &SupportField, f: &[f64], p: f64) -> Result<SupportField> {
    let g = residual(field, f, p)?;
    let r0 = sup_norm(&g);
    if r0 == 0.0 {
        return Ok(field.clone());
    }
    let delta = jacobian(field, p).solve(&g)?;
    let mut s = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let h: Vec<f64> = field.values().iter().zip(&delta).map(|(h, d)| h - s * d).collect();
        if let Ok(trial) = SupportField::new(h, field.p_exponent()) {
            let r = sup_norm(&residual(&trial, f, p)?);
            if r < r0 {
                return Ok(trial);
            }
        }
        s *= 0.5;
    }
    Err(Error::LineSearchStalled(format!(
        "no residual decrease from {r0:e} after {MAX_HALVINGS} halvings"
    )))
}

/// Newton iteration to `‖G‖∞ <= tol`; returns the field and the residual
/// history (starting residual first).
pub fn newton_solve(
    field: SupportField,
    f: &[f64],
    p: f64,
    tol: f64,
    max_iters: usize,
) -> Result<(SupportField, Vec<f64>)> {
    let mut field = field;
    let mut history = vec![sup_norm(&residual(&field, f, p)?)];
    while *history.last().expect("non-empty") > tol {
        if history.len() > max_iters {
            return Err(Error::NoConvergence(format!(
                "residual {:e} after {max_iters} Newton iterations",
                history.last().expect("non-empty")
            )));
        }
        field = newton_step(&field, f, p)?;
        history.push(sup_norm(&residual(&field, f, p)?));
    }
    Ok((field, history))
}

/// Follows `f_t = (1-t) c0 + t f` from the constant solution to `t = 1`.
pub fn solve_homotopy(f: &[f64], p: f64, opts: &HomotopyOptions) -> Result<SolveReport> {
    opts.validate()?;
    let n = opts.resolution;
    if f.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: f.len(),
        });
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent p = {p} must be positive")));
    }
    if let Some((i, &v)) = f.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!("density value {v} at node {i} is not positive")));
    }
    let mut flags = Vec::new();
    let mass: f64 = f.iter().sum::<f64>() * TAU / n as f64;
    let bound = gauss_constants(2, p)?.mass_bound;
    if mass >= bound {
        if opts.enforce_mass_bound {
            return Err(Error::MassBoundViolated { mass, bound });
        }
        flags.push(FLAG_NO_MASS_BOUND.to_string());
    }
    if p < 1.0 {
        flags.push(FLAG_UNCERTIFIED_P.to_string());
    }
    let even = (0..n / 2).all(|k| (f[k] - f[k + n / 2]).abs() <= 1e-14 * f[k].abs().max(1e-300));
    if !even || p < 1.0 || mass >= bound {
        flags.push(FLAG_NO_UNIQUENESS.to_string());
    }

    let (r_start, rechosen) = choose_start_radius(p, n, opts.start_radius)?;
    if rechosen {
        flags.push(FLAG_C0_RECHOSEN.to_string());
    }
    let c0 = ball_lp_mass(r_start, p) / TAU;
    let r0 = constant_branch_start(c0, p)?;
    let mut field = SupportField::constant(n, r0, p)?;
    let mut trace = HomotopyTrace {
        c0,
        r0,
        steps: vec![HomotopyStep {
            t: 0.0,
            newton_iters: 0,
            residual: 0.0,
            min_convexity: field.min_convexity(),
            gauss_volume: field_gauss_volume(&field),
        }],
    };

    let mut t = 0.0_f64;
    let mut dt = opts.t_step_initial;
    let mut total_iters = 0;
    while t < 1.0 {
        let t_next = if t + dt >= 1.0 - 1e-15 { 1.0 } else { t + dt };
        let ft: Vec<f64> = f.iter().map(|fk| (1.0 - t_next) * c0 + t_next * fk).collect();
        match newton_solve(field.clone(), &ft, p, opts.newton_tol, opts.newton_max_iters) {
            Ok((next, history)) => {
                let volume = field_gauss_volume(&next);
                let min_convexity = next.min_convexity();
                if !(volume > 0.5) || !(min_convexity > 0.0) {
                    return Err(Error::CertificateLost(format!(
                        "at t = {t_next}: gaussian volume {volume}, min h''+h {min_convexity}; trace {:?}",
                        trace.steps
                    )));
                }
                let iters = history.len() - 1;
                total_iters += iters;
                trace.steps.push(HomotopyStep {
                    t: t_next,
                    newton_iters: iters,
                    residual: *history.last().expect("non-empty"),
                    min_convexity,
                    gauss_volume: volume,
                });
                field = next;
                t = t_next;
                dt = (2.0 * dt).min(1.0);
            }
            Err(e) => {
                dt *= 0.5;
                log::debug!("newton failed at t = {t_next} ({e}); halving the t-step to {dt}");
                if dt < opts.t_step_min {
                    return Err(Error::NoConvergence(format!(
                        "t-step fell below {} at t = {t}: {e}; trace {:?}",
                        opts.t_step_min, trace.steps
                    )));
                }
            }
        }
    }

    let density = smooth_lp_density(&field, p)?;
    let stationarity = density
        .iter()
        .zip(f)
        .map(|(g, fk)| (g - fk).abs() / fk)
        .fold(0.0, f64::max);
    let volume = field_gauss_volume(&field);
    Ok(SolveReport {
        body: SolvedBody::Field(field),
        p,
        // S_{p,γ,K} = f itself, i.e. μ = (λ/p) S with λ = p
        lambda: p,
        volume,
        volume_residual: volume - 0.5,
        stationarity_residual: stationarity,
        iterations: total_iters,
        homotopy_trace: trace,
        outer_trace: Vec::new(),
        flags,
    })
}

/// Final residual ∞-norm of a smooth solve against `f`.
pub fn residual_norm(field: &SupportField, f: &[f64]) -> Result<f64> {
    Ok(sup_norm(&residual(field, f, field.p_exponent())?))
}

/// Wulff shape of the sampled support values on the grid normals.
pub fn field_to_polygon(field: &SupportField) -> Result<SupportPolygon> {
    let n = field.resolution();
    let normals: Vec<Vec2> = (0..n).map(|k| Vec2::from_angle(field.theta(k))).collect();
    wulff_shape(&normals, field.values())
}

/// Density without the convexity check; used by the verifier on fields that
/// are convex by construction.
pub fn density_unchecked(field: &SupportField, p: f64) -> Vec<f64> {
    smooth_lp_density_unchecked(field, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{gauss_volume, lp_gauss_surface_polygon, DEFAULT_RESOLUTION};
    use crate::geometry::hausdorff_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field_of(r: &SolveReport) -> &SupportField {
        match &r.body {
            SolvedBody::Field(f) => f,
            SolvedBody::Polygon(_) => panic!("expected a field"),
        }
    }

    #[test]
    fn constant_start_examples() {
        let c0 = 1.5 * (-1.125f64).exp() / TAU;
        assert!((constant_branch_start(c0, 1.0).unwrap() - 1.5).abs() < 1e-12);
        let peak = (-0.5f64).exp() / TAU;
        assert!(matches!(
            constant_branch_start(peak, 1.0),
            Err(Error::NoConstantSolution { .. })
        ));
        let r0 = constant_branch_start(1.0 / (8.0 * std::f64::consts::PI), 2.0).unwrap();
        assert!((r0 - 2.0 * 2f64.ln().sqrt()).abs() < 1e-12);
        assert!((gauss_ball_volume(r0, 2) - 0.75).abs() < 1e-12);
        // p=1, c0 just below the peak: the root sits near r=1, γ < 1/2
        assert!(matches!(
            constant_branch_start(peak * 0.999, 1.0),
            Err(Error::WrongBranch { .. })
        ));
    }

    #[test]
    fn guard_examples() {
        assert!(!linearized_guard(1.0, 1.0, 512));
        assert!(linearized_guard(1.5, 1.0, 512));
        assert!(linearized_guard(1.7, 2.0, 512));
        assert!(!linearized_guard(2.0, 2.0, 512));
        assert!(!linearized_guard(3.0, 2.0, 512));
        // k = 3 lies above N/2 for N = 4
        assert!(linearized_guard(3.0, 2.0, 4));
    }

    #[test]
    fn constant_residuals() {
        let c0 = 0.0775;
        let r0 = constant_branch_start(c0, 1.0).unwrap();
        let field = SupportField::constant(256, r0, 1.0).unwrap();
        let g = residual(&field, &vec![c0; 256], 1.0).unwrap();
        assert!(sup_norm(&g) < 1e-14);
        let f = cos_density(256, c0, 0.2, 2);
        let g = residual(&field, &f, 1.0).unwrap();
        for k in 0..256 {
            let expect = -0.2 * c0 * (2.0 * field.theta(k)).cos();
            assert!((g[k] - expect).abs() < 1e-15);
        }
        let field = SupportField::from_fn(128, 1.5, |t| 2.0 + 0.3 * t.cos() + 0.1 * (3.0 * t).sin()).unwrap();
        let own = smooth_lp_density(&field, 1.5).unwrap();
        assert_eq!(sup_norm(&residual(&field, &own, 1.5).unwrap()), 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let n = 64;
            let p = rng.random_range(0.5..2.5);
            let a1: f64 = rng.random_range(-0.2..0.2);
            let b3: f64 = rng.random_range(-0.05..0.05);
            let field = SupportField::from_fn(n, p, |t| 1.8 + a1 * t.cos() + b3 * (3.0 * t).sin()).unwrap();
            let jac = jacobian(&field, p).to_dense();
            let f = vec![0.0; n];
            let d = 1e-6;
            for j in 0..n {
                let mut hp = field.values().to_vec();
                hp[j] += d;
                let mut hm = field.values().to_vec();
                hm[j] -= d;
                let gp = residual(&SupportField::new(hp, p).unwrap(), &f, p).unwrap();
                let gm = residual(&SupportField::new(hm, p).unwrap(), &f, p).unwrap();
                for i in 0..n {
                    let fd = (gp[i] - gm[i]) / (2.0 * d);
                    assert!((fd - jac[i][j]).abs() <= 1e-6, "{i},{j}: {fd} vs {}", jac[i][j]);
                }
            }
        }
    }

    #[test]
    fn constant_jacobian_spectrum() {
        let (n, p, r0) = (128, 1.0, 1.5);
        let field = SupportField::constant(n, r0, p).unwrap();
        let jac = jacobian(&field, p);
        let d = field.step();
        let pref = r0.powf(1.0 - p) * (-0.5 * r0 * r0).exp() / TAU;
        let mut smallest = f64::INFINITY;
        for k in 0..=n / 2 {
            let v: Vec<f64> = (0..n).map(|j| (k as f64 * field.theta(j)).cos()).collect();
            let jv = jac.mul_vec(&v);
            let sym = -4.0 * (0.5 * k as f64 * d).sin().powi(2) / (d * d);
            let eig = pref * ((2.0 - p) - r0 * r0 + sym);
            for j in 0..n {
                assert!((jv[j] - eig * v[j]).abs() < 1e-12 * pref / (d * d));
            }
            smallest = smallest.min(eig.abs());
        }
        // closed-form scan with the continuous symbol -k²
        let scan = (0..=n / 2)
            .map(|k| ((2.0 - p) - r0 * r0 - (k * k) as f64).abs())
            .fold(f64::INFINITY, f64::min);
        assert!((smallest / pref - scan).abs() < 1e-3);
    }

    #[test]
    fn constant_density_is_solved_without_newton_iterations() {
        let p = 2.0;
        let c0 = 1.0 / (8.0 * std::f64::consts::PI);
        let opts = HomotopyOptions {
            start_radius: Some(2.0 * 2f64.ln().sqrt()),
            ..HomotopyOptions::default()
        };
        let rep = solve_homotopy(&vec![c0; 512], p, &opts).unwrap();
        assert_eq!(rep.homotopy_trace.steps.len(), 2);
        assert_eq!(rep.homotopy_trace.steps[1].newton_iters, 0);
        let exact = 2.0 * 2f64.ln().sqrt();
        assert!(field_of(&rep).values().iter().all(|h| (h - exact).abs() < 1e-12));
    }

    #[test]
    fn cos_family_converges_quadratically_and_evenly() {
        for p in [1.0, 2.0] {
            let n = 512;
            let c0 = default_c0(p).unwrap();
            let f = cos_density(n, c0, 0.2, 2);
            let rep = solve_homotopy(&f, p, &HomotopyOptions::default()).unwrap();
            let field = field_of(&rep);
            assert!(residual_norm(field, &f).unwrap() <= 1e-9);
            assert!(field.asymmetry() <= 1e-10);
            assert!(rep.volume > 0.5);
            assert!(rep.flags.is_empty(), "{:?}", rep.flags);
            let steps = &rep.homotopy_trace.steps;
            assert!(steps.windows(2).all(|w| w[1].t > w[0].t));
            assert_eq!(steps.last().unwrap().t, 1.0);
            assert!(steps.iter().all(|s| s.min_convexity > 0.0 && s.gauss_volume > 0.5));

            // Newton from a perturbed start
            let start = SupportField::from_fn(n, p, |t| {
                field.values()[0] + 0.02 * (2.0 * t).cos() - 0.01
            })
            .unwrap();
            let (_, hist) = newton_solve(start, &f, p, 1e-13, 30).unwrap();
            // residuals relative to the density scale
            let scale = sup_norm(&f);
            let rel: Vec<f64> = hist.iter().map(|r| r / scale).collect();
            for w in rel.windows(2) {
                if w[0] < 1e-3 && w[1] > 1e-12 {
                    assert!(w[1] <= w[0].powf(1.5), "{rel:?}");
                }
            }
        }
    }

    #[test]
    fn grid_refinement_and_density_round_trip() {
        let p = 1.0;
        let c0 = default_c0(p).unwrap();
        let n = 256;
        let coarse = solve_homotopy(&cos_density(n, c0, 0.2, 2), p, &HomotopyOptions::with_resolution(n)).unwrap();
        let fine = solve_homotopy(
            &cos_density(2 * n, c0, 0.2, 2),
            p,
            &HomotopyOptions::with_resolution(2 * n),
        )
        .unwrap();
        let hc = field_of(&coarse).values();
        let hf = field_of(&fine).values();
        let diff = (0..n).map(|k| (hc[k] - hf[2 * k]).abs()).fold(0.0, f64::max);
        assert!(diff <= 8.0 / (n * n) as f64, "{diff}");

        // second route: facet masses of the Wulff polygon per unit angle
        let field = field_of(&fine);
        let poly = field_to_polygon(field).unwrap();
        assert_eq!(poly.num_facets(), 2 * n);
        let em = lp_gauss_surface_polygon(&poly, p).unwrap();
        let f = cos_density(2 * n, c0, 0.2, 2);
        let d = field.step();
        let worst = em
            .edges
            .iter()
            .map(|e| {
                let k = (e.normal.angle() / d).round() as usize % (2 * n);
                (e.mass / d - f[k]).abs()
            })
            .fold(0.0, f64::max);
        let n2 = (2 * n) as f64;
        assert!(worst <= 4.0 / (n2 * n2), "{worst}");
    }

    #[test]
    fn uniqueness_across_starts() {
        let p = 1.0;
        let n = 256;
        let f = cos_density(n, default_c0(p).unwrap(), 0.15, 2);
        let lo = min_start_radius(p).unwrap();
        let a = HomotopyOptions {
            start_radius: Some(lo + 0.1),
            ..HomotopyOptions::with_resolution(n)
        };
        let b = HomotopyOptions {
            start_radius: Some(2.9),
            ..HomotopyOptions::with_resolution(n)
        };
        let ra = solve_homotopy(&f, p, &a).unwrap();
        let rb = solve_homotopy(&f, p, &b).unwrap();
        assert!((ra.homotopy_trace.c0 - rb.homotopy_trace.c0).abs() > 1e-3);
        let d = hausdorff_distance(field_of(&ra).values(), field_of(&rb).values()).unwrap();
        assert!(d <= 1e-6);
    }

    #[test]
    fn mass_bound_rejected_before_stepping() {
        let f = cos_density(512, 1.5 * (-1.125f64).exp() / TAU, 0.2, 2);
        let err = solve_homotopy(&f, 1.0, &HomotopyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MassBoundViolated { .. }));
        let relaxed = HomotopyOptions {
            enforce_mass_bound: false,
            ..HomotopyOptions::default()
        };
        let rep = solve_homotopy(&f, 1.0, &relaxed).unwrap();
        assert!(rep.has_flag(FLAG_NO_MASS_BOUND));
        assert!(residual_norm(field_of(&rep), &f).unwrap() <= 1e-9);
    }

    #[test]
    fn collision_forces_rechoice() {
        let (r, rechosen) = choose_start_radius(1.0, 512, Some(1.0)).unwrap();
        assert!(rechosen);
        assert!(linearized_guard(r, 1.0, 512));
        assert!(r >= min_start_radius(1.0).unwrap() && r <= START_RADIUS_MAX);
    }

    #[test]
    fn field_to_polygon_examples() {
        let k = field_to_polygon(&SupportField::constant(64, 1.3, 1.0).unwrap()).unwrap();
        assert_eq!(k.num_facets(), 64);
        assert!(k.support().iter().all(|h| (h - 1.3).abs() < 1e-15));

        let field = SupportField::from_fn(256, 1.0, |t| (t.cos().powi(2) + 4.0 * t.sin().powi(2)).sqrt()).unwrap();
        let poly = field_to_polygon(&field).unwrap();
        for k in 0..256 {
            let v = poly.support_at(Vec2::from_angle(field.theta(k))).unwrap();
            assert!((v - field.values()[k]).abs() < 1e-12);
        }
        // two volume routes
        let n = 256.0;
        let diff = (gauss_volume(&poly, DEFAULT_RESOLUTION) - field_gauss_volume(&field)).abs();
        assert!(diff < 10.0 / (n * n), "{diff}");
    }
}
