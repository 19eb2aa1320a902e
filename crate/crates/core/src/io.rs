//! JSON file formats.
//!
//! * body: `{"dimension":2,"normals":[[x,y],...],"support":[...]}`
//! * measure: `{"dimension":2,"p":1.0,"atoms":[{"direction":[x,y],"mass":m},...]}`
//! * edge measure: `{"p":1.0,"edges":[{"normal":[x,y],"mass":m},...]}`
//! * density or field: `{"resolution":N,"values":[...]}` with an optional
//!   `"p"`; node `k` sits at `θ = 2πk/N`.
//!
//! Every parser returns an error on malformed input and never panics.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::SupportField;
use crate::fmt::sig9;
use crate::gauss::EdgeMeasure;
use crate::geometry::{wulff_shape, Atom, DiscreteMeasure, SupportPolygon};
use crate::report::{SolveReport, SolvedBody};
use crate::vec2::Vec2;

/// Largest grid accepted from a file.
pub const MAX_RESOLUTION: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyFile {
    pub dimension: usize,
    pub normals: Vec<[f64; 2]>,
    pub support: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub resolution: usize,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

fn from_str<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

fn check_dimension(d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::InvalidInput(format!("only dimension 2 is supported, got {d}")));
    }
    Ok(())
}

fn check_finite(what: &str, values: impl IntoIterator<Item = f64>) -> Result<()> {
    match values.into_iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::InvalidInput(format!("non-finite {what} {v}"))),
        None => Ok(()),
    }
}

fn check_p(p: Option<f64>) -> Result<()> {
    match p {
        Some(p) if !p.is_finite() => Err(Error::InvalidInput(format!("exponent {p}"))),
        _ => Ok(()),
    }
}

pub fn parse_body(s: &str) -> Result<SupportPolygon> {
    let file: BodyFile = from_str(s)?;
    check_dimension(file.dimension)?;
    check_finite("normal component", file.normals.iter().flatten().copied())?;
    check_finite("support value", file.support.iter().copied())?;
    let normals: Vec<Vec2> = file.normals.iter().map(|&n| n.into()).collect();
    wulff_shape(&normals, &file.support)
}

pub fn body_file(k: &SupportPolygon) -> BodyFile {
    BodyFile {
        dimension: 2,
        normals: k.normals().iter().map(|&v| v.into()).collect(),
        support: k.support().to_vec(),
    }
}

pub fn body_to_value(k: &SupportPolygon) -> Value {
    serde_json::to_value(body_file(k)).expect("plain data serializes")
}

pub fn body_to_json(k: &SupportPolygon) -> String {
    to_pretty(&body_file(k))
}

/// Measure and the optional exponent stored with it.
pub fn parse_measure(s: &str) -> Result<(DiscreteMeasure, Option<f64>)> {
    let file: MeasureFile = from_str(s)?;
    check_dimension(file.dimension)?;
    check_p(file.p)?;
    check_finite(
        "atom entry",
        file.atoms
            .iter()
            .flat_map(|a| [a.direction.x, a.direction.y, a.mass]),
    )?;
    Ok((DiscreteMeasure::new(file.atoms)?, file.p))
}

pub fn measure_to_json(mu: &DiscreteMeasure, p: Option<f64>) -> String {
    to_pretty(&MeasureFile {
        dimension: 2,
        p,
        atoms: mu.atoms().to_vec(),
    })
}

pub fn measure_from_edges(em: &EdgeMeasure) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new(
        em.edges
            .iter()
            .filter(|e| e.mass > 0.0)
            .map(|e| Atom {
                direction: e.normal,
                mass: e.mass,
            })
            .collect(),
    )
}

pub fn parse_edge_measure(s: &str) -> Result<EdgeMeasure> {
    let em: EdgeMeasure = from_str(s)?;
    check_p(Some(em.p))?;
    check_finite(
        "edge entry",
        em.edges.iter().flat_map(|e| [e.normal.x, e.normal.y, e.mass]),
    )?;
    if let Some(e) = em.edges.iter().find(|e| e.mass < 0.0) {
        return Err(Error::InvalidInput(format!("negative edge mass {}", e.mass)));
    }
    Ok(em)
}

pub fn edge_measure_to_json(em: &EdgeMeasure) -> String {
    to_pretty(em)
}

/// A sampled density: positive finite values on a uniform grid.
pub fn parse_density(s: &str) -> Result<GridFile> {
    let file: GridFile = from_str(s)?;
    check_grid(&file)?;
    if let Some((i, v)) = file.values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::InvalidInput(format!("density value {v} at node {i} is not positive")));
    }
    Ok(file)
}

/// A sampled support function; `p` defaults to 1.
pub fn parse_field(s: &str) -> Result<SupportField> {
    let file: GridFile = from_str(s)?;
    check_grid(&file)?;
    SupportField::new(file.values, file.p.unwrap_or(1.0))
}

fn check_grid(file: &GridFile) -> Result<()> {
    if file.values.len() != file.resolution {
        return Err(Error::LengthMismatch {
            expected: file.resolution,
            actual: file.values.len(),
        });
    }
    if file.resolution > MAX_RESOLUTION {
        return Err(Error::InvalidInput(format!(
            "resolution {} exceeds {MAX_RESOLUTION}",
            file.resolution
        )));
    }
    check_p(file.p)?;
    check_finite("grid value", file.values.iter().copied())
}

pub fn density_to_json(values: &[f64], p: Option<f64>) -> String {
    to_pretty(&GridFile {
        resolution: values.len(),
        values: values.to_vec(),
        p,
    })
}

pub fn field_to_json(field: &SupportField) -> String {
    to_pretty(&GridFile {
        resolution: field.resolution(),
        values: field.values().to_vec(),
        p: Some(field.p_exponent()),
    })
}

/// `x` rounded to 9 significant digits, as a JSON number.
pub fn num9(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    json!(rounded)
}

fn nums9(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num9).collect())
}

/// Solve report with every number rounded to 9 significant digits.
pub fn report_to_value(rep: &SolveReport) -> Value {
    let body = match &rep.body {
        SolvedBody::Polygon(k) => json!({
            "kind": "polygon",
            "dimension": 2,
            "normals": k.normals().iter().map(|v| nums9([v.x, v.y])).collect::<Vec<_>>(),
            "support": nums9(k.support().iter().copied()),
        }),
        SolvedBody::Field(f) => json!({
            "kind": "field",
            "resolution": f.resolution(),
            "p": num9(f.p_exponent()),
            "values": nums9(f.values().iter().copied()),
        }),
    };
    let outer: Vec<Value> = rep
        .outer_trace
        .iter()
        .map(|s| {
            json!({
                "round": s.round,
                "penalty": num9(s.penalty),
                "lambda": num9(s.lambda),
                "inner_iterations": s.inner_iterations,
                "constraint": num9(s.constraint),
                "feasible_objective": num9(s.feasible_objective),
                "accepted": s.accepted,
            })
        })
        .collect();
    let steps: Vec<Value> = rep
        .homotopy_trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "t": num9(s.t),
                "newton_iters": s.newton_iters,
                "residual": num9(s.residual),
                "min_convexity": num9(s.min_convexity),
                "gauss_volume": num9(s.gauss_volume),
            })
        })
        .collect();
    let mut v = json!({
        "body": body,
        "p": num9(rep.p),
        "lambda": num9(rep.lambda),
        "volume": num9(rep.volume),
        "volume_residual": num9(rep.volume_residual),
        "stationarity_residual": num9(rep.stationarity_residual),
        "iterations": rep.iterations,
        "flags": rep.flags,
        "trace": outer,
        "homotopy_trace": steps,
    });
    if !rep.homotopy_trace.steps.is_empty() {
        v["c0"] = num9(rep.homotopy_trace.c0);
        v["r0"] = num9(rep.homotopy_trace.r0);
    }
    v
}

pub fn report_to_json(rep: &SolveReport) -> String {
    to_pretty(&report_to_value(rep))
}

/// `key=value` line with the value at 9 significant digits.
pub fn kv(key: &str, x: f64) -> String {
    format!("{key}={}", sig9(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::lp_gauss_surface_polygon;
    use proptest::prelude::*;

    const SQUARE: &str =
        r#"{"dimension":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"support":[1,1,1,1]}"#;

    #[test]
    fn body_round_trip() {
        let k = parse_body(SQUARE).unwrap();
        assert_eq!(k.num_facets(), 4);
        assert!((k.area() - 4.0).abs() < 1e-15);
        let again = parse_body(&body_to_json(&k)).unwrap();
        assert_eq!(again, k);
    }

    #[test]
    fn body_errors() {
        assert!(matches!(parse_body("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_body(r#"{"dimension":3,"normals":[],"support":[]}"#),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            parse_body(r#"{"dimension":2,"normals":[[1,0],[0,1],[-1,0]],"support":[1,1,1]}"#),
            Err(Error::Unbounded { .. })
        ));
        assert!(parse_body(r#"{"dimension":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"support":[1,1,-1,1]}"#).is_err());
        assert!(matches!(
            parse_body(r#"{"dimension":2,"normals":[[2,0],[0,1],[-1,0],[0,-1]],"support":[1,1,1,1]}"#),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn measure_and_edges_round_trip() {
        let s = r#"{"dimension":2,"p":1.0,"atoms":[{"direction":[1,0],"mass":0.5},{"direction":[0,1],"mass":0.5},{"direction":[-1,0],"mass":0.5},{"direction":[0,-1],"mass":0.5}]}"#;
        let (mu, p) = parse_measure(s).unwrap();
        assert_eq!(p, Some(1.0));
        assert_eq!(mu.len(), 4);
        let (again, _) = parse_measure(&measure_to_json(&mu, p)).unwrap();
        assert_eq!(again, mu);

        let em = lp_gauss_surface_polygon(&parse_body(SQUARE).unwrap(), 2.0).unwrap();
        let back = parse_edge_measure(&edge_measure_to_json(&em)).unwrap();
        assert_eq!(back, em);
        assert_eq!(measure_from_edges(&em).unwrap().len(), 4);
        assert!(parse_measure(r#"{"dimension":2,"atoms":[{"direction":[1,0],"mass":-1}]}"#).is_err());
    }

    #[test]
    fn grid_files() {
        let f = parse_density(r#"{"resolution":4,"values":[1,2,3,4]}"#).unwrap();
        assert_eq!(f.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            parse_density(r#"{"resolution":5,"values":[1,2,3,4]}"#),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(parse_density(r#"{"resolution":4,"values":[1,2,0,4]}"#).is_err());
        let field = SupportField::constant(64, 1.5, 2.0).unwrap();
        assert_eq!(parse_field(&field_to_json(&field)).unwrap(), field);
    }

    #[test]
    fn nine_digits() {
        assert_eq!(num9(0.1651908710340167), json!(0.165190871));
        assert_eq!(kv("mass_bound", 0.36408224327826), "mass_bound=0.364082243");
        assert_eq!(num9(f64::NAN), Value::Null);
    }

    proptest! {
        #[test]
        fn parsers_never_panic(s in "\\PC{0,200}") {
            let _ = parse_body(&s);
            let _ = parse_measure(&s);
            let _ = parse_edge_measure(&s);
            let _ = parse_density(&s);
            let _ = parse_field(&s);
        }

        #[test]
        fn structured_garbage_never_panics(
            normals in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..8),
            support in proptest::collection::vec(-1.0f64..3.0, 0..8),
        ) {
            let s = serde_json::to_string(&json!({
                "dimension": 2,
                "normals": normals.iter().map(|(x, y)| [*x, *y]).collect::<Vec<_>>(),
                "support": support,
            })).unwrap();
            let _ = parse_body(&s);
            let unit: Vec<[f64; 2]> = normals
                .iter()
                .map(|(x, y)| {
                    let v = Vec2::new(*x, *y);
                    if v.norm() > 1e-3 { v.normalized().into() } else { [1.0, 0.0] }
                })
                .collect();
            let s = serde_json::to_string(&json!({
                "dimension": 2, "normals": unit, "support": support,
            })).unwrap();
            let _ = parse_body(&s);
        }
    }
}
