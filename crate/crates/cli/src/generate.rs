//! Built-in test measures and densities.

use std::f64::consts::{PI, TAU};

use clap::ValueEnum;
use lpgauss_core::gauss::lp_gauss_surface_polygon;
use lpgauss_core::io::{density_to_json, measure_from_edges, measure_to_json};
use lpgauss_core::smooth::{cos_density, default_c0};
use lpgauss_core::special::std_normal_quantile;
use lpgauss_core::{Atom, DiscreteMeasure, Result, SupportPolygon, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Case {
    /// `m` equal atoms at the vertices of a regular m-gon of directions.
    UniformMgon,
    /// The L_p-Gaussian measure of the square with Gaussian volume 1/2.
    SquareMeasure,
    /// `c0 (1 + amplitude cos(frequency θ))` on a grid.
    CosDensity,
    /// `m` antipodal pairs at random directions, equal masses within a pair.
    RandomEven,
    /// Atoms confined to a closed half-plane.
    HemisphereBad,
}

pub struct Params {
    pub seed: u64,
    pub m: usize,
    pub mass: f64,
    pub p: f64,
    pub resolution: usize,
    pub amplitude: f64,
    pub frequency: u32,
}

fn atom(theta: f64, mass: f64) -> Atom {
    Atom {
        direction: Vec2::from_angle(theta),
        mass,
    }
}

pub fn generate(case: Case, prm: &Params) -> Result<String> {
    let p = Some(prm.p);
    match case {
        Case::UniformMgon => {
            let atoms = (0..prm.m).map(|k| atom(TAU * k as f64 / prm.m as f64, prm.mass)).collect();
            Ok(measure_to_json(&DiscreteMeasure::new(atoms)?, p))
        }
        Case::SquareMeasure => {
            // side half-width a with (2Φ(a) - 1)² = 1/2
            let a = std_normal_quantile(0.5 * (1.0 + 0.5f64.sqrt()))?;
            let em = lp_gauss_surface_polygon(&SupportPolygon::rectangle(a, a)?, prm.p)?;
            Ok(measure_to_json(&measure_from_edges(&em)?, p))
        }
        Case::CosDensity => {
            let f = cos_density(prm.resolution, default_c0(prm.p)?, prm.amplitude, prm.frequency);
            Ok(density_to_json(&f, p))
        }
        Case::RandomEven => {
            let mut rng = ChaCha8Rng::seed_from_u64(prm.seed);
            let mut atoms = Vec::with_capacity(2 * prm.m);
            for _ in 0..prm.m {
                let theta = rng.random_range(0.0..PI);
                let mass = rng.random_range(0.05..0.3);
                atoms.push(atom(theta, mass));
                atoms.push(atom(theta + PI, mass));
            }
            Ok(measure_to_json(&DiscreteMeasure::new(atoms)?, p))
        }
        Case::HemisphereBad => {
            let atoms = vec![atom(0.0, prm.mass), atom(0.5 * PI, prm.mass), atom(PI, prm.mass)];
            Ok(measure_to_json(&DiscreteMeasure::new(atoms)?, p))
        }
    }
}
