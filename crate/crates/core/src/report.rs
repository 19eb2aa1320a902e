//! Solver output shared by the discrete and smooth paths.

use serde::{Deserialize, Serialize};

use crate::field::SupportField;
use crate::geometry::SupportPolygon;

/// The solution body.
#[derive(Debug, Clone, PartialEq)]
pub enum SolvedBody {
    Polygon(SupportPolygon),
    Field(SupportField),
}

/// One outer round of the augmented Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterStep {
    pub round: usize,
    pub penalty: f64,
    pub lambda: f64,
    pub inner_iterations: usize,
    /// Raw constraint value `γ(Q) - target` before the radial rescale.
    pub constraint: f64,
    /// Objective after radially rescaling the iterate onto the constraint.
    pub feasible_objective: f64,
    /// Whether the rescaled iterate replaced the incumbent.
    pub accepted: bool,
}

/// One accepted continuation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomotopyStep {
    pub t: f64,
    pub newton_iters: usize,
    pub residual: f64,
    pub min_convexity: f64,
    pub gauss_volume: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HomotopyTrace {
    /// Constant density the path starts from.
    pub c0: f64,
    /// Radius of the constant solution for `c0`.
    pub r0: f64,
    pub steps: Vec<HomotopyStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub body: SolvedBody,
    pub p: f64,
    pub lambda: f64,
    pub volume: f64,
    pub volume_residual: f64,
    /// Max relative per-atom (or per-node) stationarity defect.
    pub stationarity_residual: f64,
    pub iterations: usize,
    pub homotopy_trace: HomotopyTrace,
    pub outer_trace: Vec<OuterStep>,
    pub flags: Vec<String>,
}

impl SolveReport {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}
