use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::sample::random_unit_matrix;
use crate::domains::{hausdorff_distance_clipped_from, line_hits, tangent_cone, ConvexBody};
use crate::error::{Error, Result};
use crate::lingeom::serial::format_sig17;
use crate::lingeom::ChartPoint;
use crate::metric::{k_estimate, MetricBudget};
use crate::symmetry::rescaling_group;

pub type ProbePair = (ChartPoint<f64>, ChartPoint<f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    ConvergentTrend,
    NoTrend,
}

/// `ConvergentTrend` iff the last value is at most a quarter of the first
/// and the values never increase after the position of the maximum.
pub fn trend_verdict(values: &[f64]) -> TrendVerdict {
    let (Some(&first), Some(&last)) = (values.first(), values.last()) else {
        return TrendVerdict::NoTrend;
    };
    let argmax = values.iter().enumerate().fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    let settles = values[argmax..].windows(2).all(|w| w[1] <= w[0]);
    if last <= 0.25 * first && settles {
        TrendVerdict::ConvergentTrend
    } else {
        TrendVerdict::NoTrend
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceBudget {
    /// Random directions (each used with its negative) for the Hausdorff proxy.
    pub directions: usize,
    pub metric: MetricBudget,
}

impl Default for ConvergenceBudget {
    fn default() -> Self {
        Self { directions: 200, metric: MetricBudget::quick() }
    }
}

impl ConvergenceBudget {
    pub fn scaled(self, factor: f64) -> Self {
        Self { directions: ((self.directions as f64 * factor).round() as usize).max(1), metric: self.metric.scaled(factor) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub check: String,
    pub parameter_values: Vec<f64>,
    pub hausdorff_values: Vec<f64>,
    /// Max over the probe pairs of `|K(limit) - K(member)|`.
    pub metric_disagreements: Vec<f64>,
    /// Trend of `hausdorff_values`.
    pub verdict: TrendVerdict,
    pub metric_verdict: TrendVerdict,
    pub radius: f64,
    pub probes: usize,
    pub seed: u64,
    pub budget: ConvergenceBudget,
}

impl ConvergenceReport {
    /// One row per parameter value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,hausdorff,metric_disagreement\n");
        for i in 0..self.parameter_values.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                format_sig17(self.parameter_values[i]),
                format_sig17(self.hausdorff_values[i]),
                format_sig17(self.metric_disagreements[i])
            ));
        }
        out
    }
}

/// `count` pairs of points within estimated metric distance `radius` of `center`.
///
/// Each point is `center + s u` for a seeded unit direction `u`, starting
/// at a random fraction of the chord and halving `s` until the estimate
/// from `center` is at most `radius`.
pub fn default_probe_pairs(body: &ConvexBody<f64>, center: &ChartPoint<f64>, count: usize, radius: f64, seed: u64) -> Result<Vec<ProbePair>> {
    if !body.contains(center) {
        return Err(Error::ProbeOutside("probe centre".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = MetricBudget::quick();
    let mut points = Vec::with_capacity(2 * count);
    while points.len() < 2 * count {
        let u = random_unit_matrix::<f64, _>(body.shape(), &mut rng);
        let hit = line_hits(body, center, &u)?;
        let mut s = hit.t_plus.min(1.0) * rng.random_range(0.2..0.9);
        let mut accepted = None;
        for _ in 0..30 {
            let x = center.offset(&u, s);
            if body.contains(&x) && k_estimate(body, center, &x, &budget, seed)?.value <= radius {
                accepted = Some(x);
                break;
            }
            s *= 0.5;
        }
        if let Some(x) = accepted {
            points.push(x);
        }
    }
    Ok(points.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect())
}

fn max_disagreement(a: &ConvexBody<f64>, limit_values: &[f64], probes: &[ProbePair], budget: &MetricBudget, seed: u64) -> Result<f64> {
    let mut worst = 0f64;
    for ((x, y), k_lim) in probes.iter().zip(limit_values) {
        let k = k_estimate(a, x, y, budget, seed)?.value;
        worst = worst.max((k - k_lim).abs());
    }
    Ok(worst)
}

fn check_probes(bodies: &[&ConvexBody<f64>], probes: &[ProbePair]) -> Result<()> {
    for body in bodies {
        for (x, y) in probes {
            if !body.contains(x) || !body.contains(y) {
                return Err(Error::ProbeOutside(body.label().to_string()));
            }
        }
    }
    Ok(())
}

/// Rescales `body` about the boundary point `e` by `X -> e^t (X - e) + e`
/// for each `t` and compares with the tangent cone at `e`: clipped Hausdorff
/// distance at radius `radius` and metric estimates on the probe pairs.
pub fn tangent_cone_convergence(
    body: &ConvexBody<f64>,
    e: &ChartPoint<f64>,
    t_grid: &[f64],
    radius: f64,
    probes: &[ProbePair],
    budget: &ConvergenceBudget,
    seed: u64,
) -> Result<ConvergenceReport> {
    let cone = tangent_cone(body, e)?;
    let group = rescaling_group(e)?;
    let bodies = t_grid
        .iter()
        .map(|&t| ConvexBody::projective_image(body.clone(), &group.evaluate(t)?).map(|b| b.with_label(format!("rescaled({t})"))))
        .collect::<Result<Vec<_>>>()?;
    check_probes(&bodies.iter().chain([&cone]).collect::<Vec<_>>(), probes)?;
    let center = body.interior().clone();
    let limit: Vec<f64> = probes.iter().map(|(x, y)| k_estimate(&cone, x, y, &budget.metric, seed).map(|m| m.value)).collect::<Result<_>>()?;
    let mut hausdorff_values = Vec::new();
    let mut metric_disagreements = Vec::new();
    for b in &bodies {
        hausdorff_values.push(hausdorff_distance_clipped_from(b, &cone, radius, budget.directions, seed, &center)?);
        metric_disagreements.push(max_disagreement(b, &limit, probes, &budget.metric, seed)?);
    }
    Ok(ConvergenceReport {
        check: "tangent_cone_convergence".into(),
        parameter_values: t_grid.to_vec(),
        verdict: trend_verdict(&hausdorff_values),
        metric_verdict: trend_verdict(&metric_disagreements),
        hausdorff_values,
        metric_disagreements,
        radius,
        probes: probes.len(),
        seed,
        budget: *budget,
    })
}

/// Dilates `body` about its interior reference point by each `lambda >= 1`
/// and compares with `body` itself.
pub fn nested_body_metric_convergence(
    body: &ConvexBody<f64>,
    lambdas: &[f64],
    radius: f64,
    probes: &[ProbePair],
    budget: &ConvergenceBudget,
    seed: u64,
) -> Result<ConvergenceReport> {
    if lambdas.iter().any(|l| l.is_nan() || *l < 1.0) {
        return Err(Error::InvalidInput("dilation factors must be at least 1".into()));
    }
    check_probes(&[body], probes)?;
    let center = body.interior().clone();
    let base: Vec<f64> = probes.iter().map(|(x, y)| k_estimate(body, x, y, &budget.metric, seed).map(|m| m.value)).collect::<Result<_>>()?;
    let mut hausdorff_values = Vec::new();
    let mut metric_disagreements = Vec::new();
    for &l in lambdas {
        let b = ConvexBody::dilate(body.clone(), &center, l)?;
        hausdorff_values.push(hausdorff_distance_clipped_from(&b, body, radius, budget.directions, seed, &center)?);
        metric_disagreements.push(max_disagreement(&b, &base, probes, &budget.metric, seed)?);
    }
    Ok(ConvergenceReport {
        check: "nested_body_metric_convergence".into(),
        parameter_values: lambdas.to_vec(),
        verdict: trend_verdict(&hausdorff_values),
        metric_verdict: trend_verdict(&metric_disagreements),
        hausdorff_values,
        metric_disagreements,
        radius,
        probes: probes.len(),
        seed,
        budget: *budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        assert_eq!(trend_verdict(&[1.0, 0.5, 0.2]), TrendVerdict::ConvergentTrend);
        assert_eq!(trend_verdict(&[0.5, 1.0, 0.1]), TrendVerdict::ConvergentTrend);
        assert_eq!(trend_verdict(&[1.0, 0.1, 0.2]), TrendVerdict::NoTrend);
        assert_eq!(trend_verdict(&[1.0, 0.9, 0.8]), TrendVerdict::NoTrend);
        assert_eq!(trend_verdict(&[]), TrendVerdict::NoTrend);
    }

    #[test]
    fn interval_nested_bodies() {
        let b = ConvexBody::operator_ball(1, 1).unwrap();
        let pt = |v| ChartPoint::from_rows(1, 1, &[v]).unwrap();
        let probes = vec![(pt(-0.3), pt(0.6)), (pt(0.1), pt(0.8))];
        let ls = [1.0, 1.5, 1.1];
        let r = nested_body_metric_convergence(&b, &ls, 3.0, &probes, &ConvergenceBudget::default(), 3).unwrap();
        assert!(r.metric_disagreements[0] < 1e-12);
        let d = |l: f64, x: f64, y: f64| (((l + y) * (l - x)) / ((l - y) * (l + x))).ln().abs();
        for (i, &l) in ls.iter().enumerate() {
            let expect = probes.iter().map(|(x, y)| {
                let (x, y) = (x.matrix()[(0, 0)], y.matrix()[(0, 0)]);
                (d(l, x, y) - d(1.0, x, y)).abs()
            });
            let expect = expect.fold(0.0, f64::max);
            assert!((r.metric_disagreements[i] - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn probes_within_radius() {
        let b = ConvexBody::operator_ball(2, 2).unwrap();
        let c = ChartPoint::zeros(b.shape());
        let probes = default_probe_pairs(&b, &c, 3, 2.0, 1).unwrap();
        assert_eq!(probes.len(), 3);
        for (x, y) in &probes {
            assert!(b.contains(x) && b.contains(y));
        }
    }
}
