//! The constrained problem for an atomic measure `μ = Σ m_i δ_{v_i}` on
//! `S^1`: minimize `φ(Q) = Σ m_i h_Q(v_i)^p` subject to `γ_2(Q) = target`.
//!
//! The unknowns are the support numbers `h_i` on the atom directions. The
//! constraint is handled by an augmented Lagrangian with a projected-gradient
//! inner loop; the result is then polished by Newton's method on the KKT
//! system `p m_i h_i^{p-1} = λ ∂γ/∂h_i`, `γ = target`.

use crate::error::{Error, Result};
use crate::gauss::{facet_gauss_mass, gauss_constants, gauss_volume, DEFAULT_RESOLUTION};
use crate::geometry::{hemisphere_minimum, wulff_shape_indexed, DiscreteMeasure, SupportPolygon};
use crate::linalg::solve_dense;
use crate::report::{HomotopyTrace, OuterStep, SolveReport, SolvedBody};
use crate::vec2::Vec2;

/// Componentwise lower bound on support numbers.
pub const H_MIN: f64 = 1e-6;
pub const MAX_OUTER_ROUNDS: usize = 12;
const MAX_INNER_ITERS: usize = 400;
const MAX_POLISH_ITERS: usize = 60;
/// Hemisphere margin, relative to the total mass.
pub const HEMISPHERE_REL_EPS: f64 = 1e-12;

pub const FLAG_NO_UNIQUENESS: &str = "no-uniqueness-certificate";
pub const FLAG_UNCERTIFIED_P: &str = "uncertified-p";
pub const FLAG_FACET_COLLAPSE: &str = "facet-collapse";

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalProblem {
    pub mu: DiscreteMeasure,
    pub p: f64,
    pub target_volume: f64,
    pub volume_tol: f64,
    pub stationarity_tol: f64,
    /// Angular resolution handed to [`gauss_volume`].
    pub resolution: usize,
}

impl VariationalProblem {
    pub fn new(mu: DiscreteMeasure, p: f64) -> Result<Self> {
        let prob = Self {
            mu,
            p,
            target_volume: 0.5,
            volume_tol: 1e-10,
            stationarity_tol: 1e-6,
            resolution: DEFAULT_RESOLUTION,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::InvalidInput(format!("exponent p = {} must be positive", self.p)));
        }
        if !(self.target_volume > 0.0 && self.target_volume < 1.0) {
            return Err(Error::InvalidInput(format!(
                "target volume {} is outside (0, 1)",
                self.target_volume
            )));
        }
        if !(self.volume_tol > 0.0) || !(self.stationarity_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        let (min_value, dir) = hemisphere_minimum(&self.mu);
        let epsilon = HEMISPHERE_REL_EPS * self.mu.total_mass();
        if !(min_value > epsilon) {
            return Err(Error::HemisphereViolated {
                min_value,
                epsilon,
                dir_x: dir.x,
                dir_y: dir.y,
            });
        }
        Ok(())
    }
}

/// `Σ m_i h_i^p`.
pub fn phi_objective(h: &[f64], mu: &DiscreteMeasure, p: f64) -> Result<f64> {
    if h.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            actual: h.len(),
        });
    }
    Ok(mu.atoms().iter().zip(h).map(|(a, &hi)| a.mass * hi.powf(p)).sum())
}

/// `∂γ_2([h]) / ∂h_i` for the Wulff shape of `(normals, h)`: the Gaussian
/// mass of facet `i`, zero when halfplane `i` is redundant.
pub fn volume_gradient(normals: &[Vec2], h: &[f64]) -> Result<Vec<f64>> {
    let (k, map) = wulff_shape_indexed(normals, h)?;
    Ok(aligned_masses(&k, &map))
}

fn aligned_masses(k: &SupportPolygon, map: &[Option<usize>]) -> Vec<f64> {
    map.iter()
        .map(|f| f.map_or(0.0, |j| facet_gauss_mass(k, j)))
        .collect()
}

/// Least-squares multiplier for `p m_i = λ S_{p,i}` and the max relative
/// defect `|p m_i - λ S_{p,i}| / (p m_i)`.
///
/// Each atom is matched with the facet of `body` sharing its direction; an
/// atom without a facet contributes `S_{p,i} = 0`.
pub fn recover_multiplier(body: &SupportPolygon, mu: &DiscreteMeasure, p: f64) -> Result<(f64, f64)> {
    let sp: Vec<f64> = mu
        .atoms()
        .iter()
        .map(|a| {
            body.normals()
                .iter()
                .position(|nu| nu.dot(a.direction) >= 1.0 - 1e-12)
                .map_or(0.0, |j| body.support()[j].powf(1.0 - p) * facet_gauss_mass(body, j))
        })
        .collect();
    let active = vec![true; sp.len()];
    multiplier_from(&mu.masses(), &sp, &active, p)
}

fn multiplier_from(masses: &[f64], sp: &[f64], active: &[bool], p: f64) -> Result<(f64, f64)> {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..masses.len() {
        if active[i] {
            num += p * masses[i] * sp[i];
            den += sp[i] * sp[i];
        }
    }
    if !(den > 0.0) {
        return Err(Error::InvalidInput("all facet masses vanish".into()));
    }
    let lambda = num / den;
    let residual = (0..masses.len())
        .filter(|&i| active[i])
        .map(|i| (p * masses[i] - lambda * sp[i]).abs() / (p * masses[i]))
        .fold(0.0, f64::max);
    Ok((lambda, residual))
}

struct Objective {
    dirs: Vec<Vec2>,
    masses: Vec<f64>,
    p: f64,
    target: f64,
    resolution: usize,
}

struct Eval {
    volume: f64,
    grad: Vec<f64>,
}

impl Objective {
    fn phi(&self, h: &[f64]) -> f64 {
        self.masses.iter().zip(h).map(|(m, hi)| m * hi.powf(self.p)).sum()
    }

    fn phi_grad(&self, h: &[f64]) -> Vec<f64> {
        self.masses
            .iter()
            .zip(h)
            .map(|(m, hi)| self.p * m * hi.powf(self.p - 1.0))
            .collect()
    }

    fn gradient(&self, h: &[f64]) -> Result<Vec<f64>> {
        volume_gradient(&self.dirs, h)
    }

    fn eval(&self, h: &[f64]) -> Result<Eval> {
        let (k, map) = wulff_shape_indexed(&self.dirs, h)?;
        Ok(Eval {
            volume: gauss_volume(&k, self.resolution),
            grad: aligned_masses(&k, &map),
        })
    }

    /// Scale `s` with `γ([s h]) = target`; Newton with a bisection guard,
    /// using `d/ds γ([s h]) = Σ_i ∂_i γ h_i`.
    fn feasible_scale(&self, h: &[f64]) -> Result<f64> {
        let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
        let mut s = 1.0_f64;
        for _ in 0..300 {
            let hs: Vec<f64> = h.iter().map(|v| v * s).collect();
            let e = self.eval(&hs)?;
            let f = e.volume - self.target;
            if f.abs() <= 1e-15 {
                return Ok(s);
            }
            if f < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let d: f64 = e.grad.iter().zip(h).map(|(g, hi)| g * hi).sum();
            let mut next = s - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * s };
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON * s {
                return Ok(next);
            }
            s = next;
        }
        Err(Error::RootFinding("radial rescale onto the volume constraint".into()))
    }

    /// `(L, ∇L, γ - target)` for the augmented Lagrangian
    /// `L = φ - λ c + (ρ/2) c²`.
    fn augmented(&self, h: &[f64], lambda: f64, rho: f64) -> Result<(f64, Vec<f64>, f64)> {
        let e = self.eval(h)?;
        let c = e.volume - self.target;
        let l = self.phi(h) - lambda * c + 0.5 * rho * c * c;
        let w = lambda - rho * c;
        let grad = self
            .phi_grad(h)
            .into_iter()
            .zip(&e.grad)
            .map(|(a, g)| a - w * g)
            .collect();
        Ok((l, grad, c))
    }

    /// KKT residual `(p m_i h_i^{p-1} - λ g_i, γ - target)` and the merit
    /// `max(max_i |F_i| / (p m_i h_i^{p-1}), |γ - target|)`.
    fn kkt(&self, h: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
        let e = self.eval(h)?;
        let a = self.phi_grad(h);
        let mut f: Vec<f64> = a.iter().zip(&e.grad).map(|(ai, g)| ai - lambda * g).collect();
        let c = e.volume - self.target;
        let merit = f
            .iter()
            .zip(&a)
            .map(|(fi, ai)| fi.abs() / ai)
            .fold(c.abs(), f64::max);
        f.push(c);
        Ok((f, merit))
    }
}

/// Least-squares `λ` for `∇φ = λ g` at `h`.
fn lambda_estimate(obj: &Objective, h: &[f64], g: &[f64]) -> f64 {
    let a = obj.phi_grad(h);
    let num: f64 = a.iter().zip(g).map(|(x, y)| x * y).sum();
    let den: f64 = g.iter().map(|y| y * y).sum();
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

/// Solves the constrained problem.
pub fn solve_constrained(prob: &VariationalProblem) -> Result<SolveReport> {
    prob.validate()?;
    let p = prob.p;
    let obj = Objective {
        dirs: prob.mu.directions(),
        masses: prob.mu.masses(),
        p,
        target: prob.target_volume,
        resolution: prob.resolution,
    };
    let m = obj.dirs.len();

    let mut flags = Vec::new();
    if p < 1.0 {
        flags.push(FLAG_UNCERTIFIED_P.to_string());
    }
    let bound = gauss_constants(2, p)?.mass_bound;
    if !(prob.mu.is_even(1e-12) && prob.mu.total_mass() < bound) {
        flags.push(FLAG_NO_UNIQUENESS.to_string());
    }

    // the centered disc of the target volume; equals r_half for target 1/2
    let r_start = (-2.0 * (-prob.target_volume).ln_1p()).sqrt();
    let mut h = vec![r_start; m];

    let s0 = obj.feasible_scale(&h)?;
    let mut best_h: Vec<f64> = h.iter().map(|v| v * s0).collect();
    let mut best_phi = obj.phi(&best_h);

    let g0 = obj.gradient(&h)?;
    let mut lambda = lambda_estimate(&obj, &h, &g0);
    let mut rho = 10.0 * lambda.abs().max(1.0);
    let mut alpha = 1.0_f64;
    let mut outer_trace = Vec::new();
    let mut iterations = 0usize;

    for round in 1..=MAX_OUTER_ROUNDS {
        let (mut l, mut grad, mut c) = obj.augmented(&h, lambda, rho)?;
        let scale = grad.iter().fold(0.0_f64, |s, g| s.max(g.abs())).max(1e-300);
        let mut inner = 0usize;
        let mut inner_converged = false;
        while inner < MAX_INNER_ITERS {
            let hmax = h.iter().fold(0.0_f64, |s, v| s.max(*v));
            let pg = h
                .iter()
                .zip(&grad)
                .map(|(hi, gi)| (hi - (hi - gi).max(H_MIN)).abs())
                .fold(0.0, f64::max);
            if pg <= 1e-11 * (1.0 + hmax) {
                inner_converged = true;
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = h
                    .iter()
                    .zip(&grad)
                    .map(|(hi, gi)| (hi - alpha * gi).max(H_MIN))
                    .collect();
                let dec: f64 = grad.iter().zip(h.iter().zip(&trial)).map(|(g, (a, b))| g * (a - b)).sum();
                if let Ok((lt, gt, ct)) = obj.augmented(&trial, lambda, rho) {
                    if lt <= l - 1e-4 * dec {
                        h = trial;
                        l = lt;
                        grad = gt;
                        c = ct;
                        accepted = true;
                        alpha *= 2.0;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            inner += 1;
            if !accepted {
                if pg > 1e-4 * scale {
                    return Err(Error::LineSearchStalled(format!(
                        "outer round {round}, inner iteration {inner}: projected gradient {pg:e}, \
                         constraint {c:e}, lambda {lambda:e}, penalty {rho:e}; trace {outer_trace:?}"
                    )));
                }
                // noise floor of the merit function
                inner_converged = true;
                break;
            }
        }
        iterations += inner;
        lambda -= rho * c;
        rho *= 2.0;

        let s = obj.feasible_scale(&h)?;
        let cand: Vec<f64> = h.iter().map(|v| v * s).collect();
        let cand_phi = obj.phi(&cand);
        let accepted = cand_phi <= best_phi;
        if accepted {
            best_h = cand;
            best_phi = cand_phi;
        }
        outer_trace.push(OuterStep {
            round,
            penalty: rho * 0.5,
            lambda,
            inner_iterations: inner,
            constraint: c,
            feasible_objective: cand_phi,
            accepted,
        });
        log::debug!("outer round {round}: constraint {c:e}, rescaled objective {cand_phi}");
        if inner_converged && c.abs() <= 1e-9 {
            break;
        }
    }

    // every positive-mass atom carries a facet at the optimum
    let g = obj.gradient(&best_h)?;
    if g.iter().any(|v| *v == 0.0) {
        let (k, _) = wulff_shape_indexed(&obj.dirs, &best_h)?;
        for i in 0..m {
            if g[i] == 0.0 {
                best_h[i] = (k.support_at(obj.dirs[i])? * (1.0 - 1e-4)).max(H_MIN);
            }
        }
        let s = obj.feasible_scale(&best_h)?;
        best_h.iter_mut().for_each(|v| *v *= s);
    }
    let g = obj.gradient(&best_h)?;
    let lambda0 = lambda_estimate(&obj, &best_h, &g);
    let (h, _, polish_iters) = polish(&obj, best_h, lambda0)?;
    iterations += polish_iters;

    let (k, map) = wulff_shape_indexed(&obj.dirs, &h)?;
    let volume = gauss_volume(&k, prob.resolution);
    let g = aligned_masses(&k, &map);
    let active: Vec<bool> = g.iter().map(|v| *v > 0.0).collect();
    if active.iter().any(|a| !a) {
        flags.push(FLAG_FACET_COLLAPSE.to_string());
    }
    let sp: Vec<f64> = g.iter().zip(&h).map(|(gi, hi)| hi.powf(1.0 - p) * gi).collect();
    let (lambda, stationarity) = multiplier_from(&obj.masses, &sp, &active, p)?;
    let volume_residual = volume - prob.target_volume;

    if !(volume_residual.abs() <= prob.volume_tol) || !(stationarity <= prob.stationarity_tol) || !(lambda > 0.0)
    {
        return Err(Error::NoConvergence(format!(
            "volume residual {volume_residual:e} (tol {:e}), stationarity {stationarity:e} (tol {:e}), \
             lambda {lambda:e} after {iterations} iterations",
            prob.volume_tol, prob.stationarity_tol
        )));
    }
    Ok(SolveReport {
        body: SolvedBody::Polygon(k),
        p,
        lambda,
        volume,
        volume_residual,
        stationarity_residual: stationarity,
        iterations,
        homotopy_trace: HomotopyTrace::default(),
        outer_trace,
        flags,
    })
}

/// Damped Newton on the KKT system with a central-difference Hessian of `γ`.
fn polish(obj: &Objective, mut h: Vec<f64>, mut lambda: f64) -> Result<(Vec<f64>, f64, usize)> {
    let m = h.len();
    let (mut f, mut merit) = obj.kkt(&h, lambda)?;
    let mut iters = 0;
    while iters < MAX_POLISH_ITERS && merit > 1e-14 {
        let mut jac = vec![vec![0.0; m + 1]; m + 1];
        let g = obj.gradient(&h)?;
        for j in 0..m {
            let d = 1e-6 * h[j];
            let mut hp = h.clone();
            hp[j] += d;
            let mut hm = h.clone();
            hm[j] -= d;
            let gp = obj.gradient(&hp)?;
            let gm = obj.gradient(&hm)?;
            for i in 0..m {
                jac[i][j] = -lambda * (gp[i] - gm[i]) / (2.0 * d);
            }
            jac[m][j] = g[j];
        }
        for i in 0..m {
            let p = obj.p;
            jac[i][i] += p * (p - 1.0) * obj.masses[i] * h[i].powf(p - 2.0);
            jac[i][m] = -g[i];
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve_dense(jac, rhs)?;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = h
                .iter()
                .zip(&step)
                .map(|(hi, di)| (hi + t * di).max(H_MIN))
                .collect();
            let lt = lambda + t * step[m];
            if let Ok((ft, mt)) = obj.kkt(&trial, lt) {
                if mt < merit {
                    h = trial;
                    lambda = lt;
                    f = ft;
                    merit = mt;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        iters += 1;
        if !improved {
            break;
        }
    }
    log::debug!("kkt polish: merit {merit:e} after {iters} iterations");
    Ok((h, lambda, iters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{gauss_surface_polygon, lp_gauss_surface_polygon, rescale_to_volume};
    use crate::geometry::{polygon_hausdorff, wulff_shape, Atom};
    use crate::special::std_normal_quantile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    fn axis_measure(masses: [f64; 4]) -> DiscreteMeasure {
        let dirs = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        DiscreteMeasure::new(
            dirs.iter()
                .zip(masses)
                .map(|(&(x, y), mass)| Atom {
                    direction: Vec2::new(x, y),
                    mass,
                })
                .collect(),
        )
        .unwrap()
    }

    fn measure_of(k: &SupportPolygon, p: f64) -> DiscreteMeasure {
        let em = lp_gauss_surface_polygon(k, p).unwrap();
        DiscreteMeasure::new(
            em.edges
                .iter()
                .map(|e| Atom {
                    direction: e.normal,
                    mass: e.mass,
                })
                .collect(),
        )
        .unwrap()
    }

    fn polygon(r: &SolveReport) -> &SupportPolygon {
        match &r.body {
            SolvedBody::Polygon(k) => k,
            SolvedBody::Field(_) => panic!("expected a polygon"),
        }
    }

    #[test]
    fn objective_examples() {
        let mu = axis_measure([1.0; 4]);
        assert_eq!(phi_objective(&[1.0; 4], &mu, 1.7).unwrap(), 4.0);
        let h = [0.3, 0.9, 1.1, 2.0];
        let a = phi_objective(&h, &mu, 1.0).unwrap();
        let b = phi_objective(&h.map(|v| 2.0 * v), &mu, 1.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
        assert_eq!(phi_objective(&[1.0, 2.0, 1.0, 2.0], &mu, 2.0).unwrap(), 10.0);
        assert!(matches!(
            phi_objective(&[1.0; 3], &mu, 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn gradient_of_square_and_fine_polygon() {
        let sq = SupportPolygon::rectangle(1.0, 1.0).unwrap();
        let g = volume_gradient(sq.normals(), sq.support()).unwrap();
        for v in &g {
            assert!((v - 0.1651908710340167).abs() < 1e-12, "{v}");
        }
        let k = SupportPolygon::regular(512, 1.0, 0.0).unwrap();
        let g = volume_gradient(k.normals(), k.support()).unwrap();
        // facet spans tangent coordinates ±tan(π/512)
        let t = (PI / 512.0).tan();
        let each = (-0.5f64).exp() * (crate::special::normal_interval(-t, t)) / TAU.sqrt();
        for v in &g {
            assert!((v / each - 1.0).abs() < 1e-10);
            assert!((v / ((-0.5f64).exp() / 512.0) - 1.0).abs() < 1e-4);
        }
        let total: f64 = g.iter().sum();
        assert!((total - (-0.5f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = rng.random_range(5..12);
            let phase: f64 = rng.random_range(0.0..TAU);
            let dirs: Vec<Vec2> = (0..m)
                .map(|i| Vec2::from_angle(phase + TAU * (i as f64 + rng.random_range(-0.2..0.2)) / m as f64))
                .collect();
            let h: Vec<f64> = (0..m).map(|_| 1.0 + rng.random_range(-0.1..0.1)).collect();
            let g = volume_gradient(&dirs, &h).unwrap();
            let d = 1e-5;
            for i in 0..m {
                let mut hp = h.clone();
                hp[i] += d;
                let mut hm = h.clone();
                hm[i] -= d;
                let vp = gauss_volume(&wulff_shape(&dirs, &hp).unwrap(), DEFAULT_RESOLUTION);
                let vm = gauss_volume(&wulff_shape(&dirs, &hm).unwrap(), DEFAULT_RESOLUTION);
                let fd = (vp - vm) / (2.0 * d);
                assert!((fd - g[i]).abs() <= 1e-6, "{fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn uniform_octagon() {
        let m = 8;
        let atoms = (0..m)
            .map(|k| Atom {
                direction: Vec2::from_angle(TAU * k as f64 / m as f64),
                mass: 0.3 / m as f64,
            })
            .collect();
        let prob = VariationalProblem::new(DiscreteMeasure::new(atoms).unwrap(), 1.0).unwrap();
        let rep = solve_constrained(&prob).unwrap();
        let k = polygon(&rep);
        // oracle: 1-D root find in the apothem
        let base = SupportPolygon::regular(m, 1.0, 0.0).unwrap();
        let a = rescale_to_volume(&base, 0.5, DEFAULT_RESOLUTION).unwrap();
        assert_eq!(k.num_facets(), m);
        for h in k.support() {
            assert!((h - a).abs() < 1e-8, "{h} vs {a}");
        }
        assert!(rep.volume_residual.abs() <= 1e-8);
        assert!(rep.stationarity_residual <= 1e-8);
        assert!(rep.lambda > 0.0);
    }

    #[test]
    fn square_round_trip() {
        // γ([-a,a]²) = (2Φ(a) - 1)² = 1/2
        let a = std_normal_quantile(0.5 * (1.0 + FRAC_1_SQRT_2)).unwrap();
        let sq = SupportPolygon::rectangle(a, a).unwrap();
        assert!((gauss_volume(&sq, DEFAULT_RESOLUTION) - 0.5).abs() < 1e-14);
        let mu = measure_of(&sq, 1.0);
        let rep = solve_constrained(&VariationalProblem::new(mu, 1.0).unwrap()).unwrap();
        assert!(polygon_hausdorff(polygon(&rep), &sq, 4096) < 1e-4);
        assert!((rep.lambda - 1.0).abs() < 1e-3);
        assert!(rep.stationarity_residual <= 1e-4);
        // a γ = 1/2 body always carries at least the mass bound
        assert!(rep.has_flag(FLAG_NO_UNIQUENESS));
    }

    #[test]
    fn hemisphere_violation_is_an_error() {
        let atoms = [-1.2, -0.4, 0.3, 1.1]
            .iter()
            .map(|&t| Atom {
                direction: Vec2::from_angle(t),
                mass: 0.1,
            })
            .collect();
        let mu = DiscreteMeasure::new(atoms).unwrap();
        assert!(matches!(
            VariationalProblem::new(mu, 1.0),
            Err(Error::HemisphereViolated { .. })
        ));
    }

    #[test]
    fn scaling_and_descent() {
        let mu = DiscreteMeasure::new(
            [(0.2, 0.05), (1.4, 0.09), (2.5, 0.04), (3.3, 0.07), (4.6, 0.06), (5.5, 0.05)]
                .iter()
                .map(|&(t, m)| Atom {
                    direction: Vec2::from_angle(t),
                    mass: m,
                })
                .collect(),
        )
        .unwrap();
        let r1 = solve_constrained(&VariationalProblem::new(mu.clone(), 1.5).unwrap()).unwrap();
        let r2 = solve_constrained(&VariationalProblem::new(mu.scaled(3.0).unwrap(), 1.5).unwrap()).unwrap();
        assert!(polygon_hausdorff(polygon(&r1), polygon(&r2), 2048) < 1e-7);
        assert!((r2.lambda / r1.lambda - 3.0).abs() < 1e-6);
        assert!(r1.has_flag(FLAG_NO_UNIQUENESS));

        let accepted: Vec<f64> = r1
            .outer_trace
            .iter()
            .filter(|s| s.accepted)
            .map(|s| s.feasible_objective)
            .collect();
        assert!(!accepted.is_empty());
        assert!(accepted.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn even_measure_gives_symmetric_body() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut atoms = Vec::new();
        for k in 0..5 {
            let t = PI * (k as f64 + rng.random_range(0.1..0.9)) / 5.0;
            let mass = rng.random_range(0.01..0.06);
            atoms.push(Atom {
                direction: Vec2::from_angle(t),
                mass,
            });
            atoms.push(Atom {
                direction: Vec2::from_angle(t + PI),
                mass,
            });
        }
        let mu = DiscreteMeasure::new(atoms).unwrap();
        assert!(mu.is_even(1e-12));
        let rep = solve_constrained(&VariationalProblem::new(mu, 1.0).unwrap()).unwrap();
        let k = polygon(&rep);
        for nu in k.normals() {
            let a = k.support_at(*nu).unwrap();
            let b = k.support_at(-*nu).unwrap();
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn three_atoms_beat_random_triangles() {
        let mu = DiscreteMeasure::new(
            [(0.3, 0.2), (2.2, 0.1), (4.0, 0.15)]
                .iter()
                .map(|&(t, m)| Atom {
                    direction: Vec2::from_angle(t),
                    mass: m,
                })
                .collect(),
        )
        .unwrap();
        let rep = solve_constrained(&VariationalProblem::new(mu.clone(), 1.0).unwrap()).unwrap();
        let k = polygon(&rep);
        let best_solver: f64 = mu
            .atoms()
            .iter()
            .map(|a| a.mass * k.support_at(a.direction).unwrap())
            .sum();

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut best_random = f64::INFINITY;
        let mut tried = 0;
        while tried < 10_000 {
            let pts: Vec<Vec2> = (0..3)
                .map(|_| Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(0.3..3.0))
                .collect();
            let Ok(t) = SupportPolygon::from_vertices(&pts) else {
                continue;
            };
            tried += 1;
            let s = rescale_to_volume(&t, 0.5, 256).unwrap();
            let phi: f64 = mu
                .atoms()
                .iter()
                .map(|a| a.mass * s * t.support_at(a.direction).unwrap())
                .sum();
            best_random = best_random.min(phi);
        }
        assert!(best_solver <= best_random * (1.0 + 1e-9), "{best_solver} vs {best_random}");
    }

    #[test]
    fn multiplier_recovery() {
        let m = 6;
        let k = SupportPolygon::regular(m, 1.2, 0.1).unwrap();
        let em = gauss_surface_polygon(&k);
        let mu = DiscreteMeasure::new(
            em.edges
                .iter()
                .map(|e| Atom {
                    direction: e.normal,
                    mass: 0.05,
                })
                .collect(),
        )
        .unwrap();
        let (lambda, res) = recover_multiplier(&k, &mu, 2.0).unwrap();
        let sp = 1.2f64.powf(-1.0) * em.edges[0].mass;
        assert!((lambda - 2.0 * 0.05 / sp).abs() < 1e-12);
        assert!(res < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut last = res;
        for amp in [1e-3, 1e-2, 5e-2] {
            let h: Vec<f64> = k.support().iter().zip(&noise).map(|(h, n)| h + amp * n).collect();
            let kp = wulff_shape(k.normals(), &h).unwrap();
            let (_, r) = recover_multiplier(&kp, &mu, 2.0).unwrap();
            assert!(r > last);
            last = r;
        }
    }
}
