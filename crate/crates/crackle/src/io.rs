//! File formats: clouds as bare CSV (one point per row, '.'-decimal) or as
//! a JSON envelope carrying the generation metadata, and complexes as JSON
//! with per-dimension index tuples. Floats are written with 17 significant
//! digits so round-trips reproduce the exact bit patterns.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cech::SimplicialComplex;
use crate::error::{CrackleError, Result};
use crate::experiment::fmt_float;
use crate::sampler::{CloudMeta, PointCloud};

/// JSON envelope for a cloud.
#[derive(Debug, Serialize, Deserialize)]
pub struct CloudFile {
    pub meta: CloudMeta,
    pub points: Vec<Vec<f64>>,
}

pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.iter_points() {
        let row: Vec<String> = p.iter().map(|v| fmt_float(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn cloud_from_csv(text: &str) -> Result<PointCloud> {
    let mut coords = Vec::new();
    let mut d = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|e| {
                    CrackleError::Parse(format!("line {}: {e}", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        if d == 0 {
            d = row.len();
        } else if row.len() != d {
            return Err(CrackleError::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        coords.extend(row);
    }
    if d == 0 {
        return Err(CrackleError::Parse("empty cloud file".into()));
    }
    let n = coords.len() / d;
    PointCloud::from_coords(d, coords, PointCloud::external_meta(d, n))
}

pub fn cloud_to_json(cloud: &PointCloud) -> Result<String> {
    let file = CloudFile {
        meta: cloud.meta,
        points: cloud.iter_points().map(|p| p.to_vec()).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn cloud_from_json(text: &str) -> Result<PointCloud> {
    let file: CloudFile = serde_json::from_str(text)?;
    let d = file.meta.params.d;
    let mut coords = Vec::with_capacity(file.points.len() * d);
    for p in &file.points {
        if p.len() != d {
            return Err(CrackleError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        coords.extend_from_slice(p);
    }
    PointCloud::from_coords(d, coords, file.meta)
}

/// Load a cloud from a path, dispatching on the `.json` extension.
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        cloud_from_json(&text)
    } else {
        cloud_from_csv(&text)
    }
}

/// JSON export of a complex: epsilon, per-dimension counts, and the
/// per-dimension arrays of index tuples.
#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub epsilon: f64,
    pub n_vertices: usize,
    pub counts: Vec<usize>,
    pub simplices: Vec<Vec<Vec<u32>>>,
}

pub fn complex_to_json(complex: &SimplicialComplex) -> Result<String> {
    let simplices = (0..=complex.dim_cap())
        .map(|k| complex.simplices(k).map(|s| s.to_vec()).collect())
        .collect();
    let file = ComplexFile {
        epsilon: complex.epsilon(),
        n_vertices: complex.n_vertices(),
        counts: complex.simplex_counts(),
        simplices,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn complex_from_json(text: &str) -> Result<SimplicialComplex> {
    let file: ComplexFile = serde_json::from_str(text)?;
    Ok(SimplicialComplex::from_layers(
        file.epsilon,
        file.n_vertices,
        file.simplices,
    ))
}
