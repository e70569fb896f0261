use grhilbert::domains::{DomainDescriptor, Rows};
use grhilbert::lingeom::linalg::{numerical_rank, vec_rows};
use grhilbert::lingeom::serial::{format_sig17, matrix_from_rows, point_from_rows};
use grhilbert::metric::{hilbert_lower_bound, k_estimate, MetricBudget};
use grhilbert::{ChartPoint, ConvexBody};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::config::SliceSpec;
use crate::failure::{config_err, Failure};

/// Result of a command: the report body, an optional CSV rendering and the
/// first failed invariant, if any.
pub struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
    pub failed: Option<String>,
}

pub fn build_body(domain: Option<&DomainDescriptor>) -> Result<ConvexBody, Failure> {
    let d = domain.ok_or_else(|| config_err("no domain given"))?;
    Ok(d.build::<f64>()?)
}

pub fn parse_point(rows: Option<&Rows>, name: &str, body: &ConvexBody) -> Result<ChartPoint, Failure> {
    let rows = rows.ok_or_else(|| config_err(format!("missing point {name}")))?;
    let x = point_from_rows::<f64>(rows)?;
    if x.shape() != body.shape() {
        return Err(config_err(format!("point {name} has shape {}, domain has {}", x.shape(), body.shape())));
    }
    if !body.contains(&x) {
        return Err(Failure::Domain(format!("point {name} is outside {}", body.label())));
    }
    Ok(x)
}

pub fn cmd_metric(body: &ConvexBody, x: &ChartPoint, y: &ChartPoint, budget: &MetricBudget, seed: u64) -> Result<Outcome, Failure> {
    let est = k_estimate(body, x, y, budget, seed)?;
    let lower = hilbert_lower_bound(body, x, y)?;
    let mut result = est.to_json();
    result["hilbert_lower_bound"] = json!(lower);
    let csv = format!("value,hilbert_lower_bound,segments,seed\n{},{},{},{}\n", format_sig17(est.value), format_sig17(lower), est.chain.len(), seed);
    Ok(Outcome { result, csv: Some(csv), failed: None })
}

fn grid_coord(k: usize, n: usize, extent: f64) -> f64 {
    if n <= 1 {
        0.0
    } else {
        -extent + 2.0 * extent * k as f64 / (n - 1) as f64
    }
}

pub fn cmd_plot_slice(body: &ConvexBody, spec: &SliceSpec, budget: &MetricBudget, seed: u64) -> Result<Outcome, Failure> {
    let center = parse_point(Some(&spec.center), "center", body)?;
    let u = matrix_from_rows::<f64>(&spec.u)?;
    let v = spec.v.as_ref().map(|v| matrix_from_rows::<f64>(v)).transpose()?;
    let want = center.matrix().shape();
    if u.shape() != want || v.as_ref().is_some_and(|v| v.shape() != want) {
        return Err(config_err("slice directions must match the chart shape"));
    }
    if spec.n_u == 0 || spec.n_v == 0 || !(spec.extent.is_finite() && spec.extent > 0.0) {
        return Err(config_err("slice grid needs n_u, n_v >= 1 and a positive extent"));
    }
    if spec.levels.iter().any(|l| l.is_nan() || *l < 0.0) {
        return Err(config_err("levels must be nonnegative"));
    }
    let v = match v {
        Some(v) => {
            if numerical_rank(&DMatrix::from_columns(&[vec_rows(&u), vec_rows(&v)]), 1e-9) < 2 {
                return Err(config_err("slice directions are linearly dependent"));
            }
            v
        }
        None if spec.n_v == 1 => DMatrix::zeros(want.0, want.1),
        None => return Err(config_err("n_v > 1 needs a second direction v")),
    };
    if u.norm() == 0.0 {
        return Err(config_err("slice direction u is zero"));
    }
    let mut csv = String::from("i,j,u,v,inside,k_hat,h_lower\n");
    let mut cells = Vec::new();
    for i in 0..spec.n_u {
        for j in 0..spec.n_v {
            let (a, b) = (grid_coord(i, spec.n_u, spec.extent), grid_coord(j, spec.n_v, spec.extent));
            let x = ChartPoint::new(center.shape(), center.matrix() + &u * a + &v * b)?;
            let (inside, k, h) = if body.contains(&x) {
                let k = k_estimate(body, &center, &x, budget, seed)?.value;
                (true, Some(k), Some(hilbert_lower_bound(body, &center, &x)?))
            } else {
                (false, None, None)
            };
            let cell = |z: Option<f64>| z.map(format_sig17).unwrap_or_default();
            csv.push_str(&format!("{i},{j},{},{},{},{},{}\n", format_sig17(a), format_sig17(b), inside as u8, cell(k), cell(h)));
            cells.push(json!({ "i": i, "j": j, "u": a, "v": b, "inside": inside, "k_hat": k, "h_lower": h }));
        }
    }
    let result = json!({ "levels": spec.levels, "n_u": spec.n_u, "n_v": spec.n_v, "extent": spec.extent, "cells": cells });
    Ok(Outcome { result, csv: Some(csv), failed: None })
}
