use grhilbert::domains::sample::{hit_and_run, random_rank_one};
use grhilbert::domains::{boundary_hits, certify_boundary, is_r_proper, RProperStatus, RProperVerdict};
use grhilbert::lingeom::serial::{matrix_to_rows, point_from_rows};
use grhilbert::metric::rho;
use grhilbert::rescaling::{
    default_probe_pairs, extreme_equivalence_suite, nested_body_metric_convergence, pnotq_failure_demo, tangent_cone_convergence, ExtremeSuiteRow, TrendVerdict,
};
use grhilbert::symmetry::{random_so_pp, verify_ball_preserved};
use grhilbert::{ChartPoint, ConvexBody, Error, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::{build_body, Outcome};
use crate::config::{BudgetConfig, RunConfig};
use crate::failure::{config_err, Failure};

/// Shared inputs for the suites.
pub struct SuiteContext<'a> {
    pub config: &'a RunConfig,
    pub budget: &'a BudgetConfig,
    pub tolerances: Tolerances,
    pub tol_scale: f64,
    pub seed: u64,
}

fn verdict_json(v: &RProperVerdict<f64>) -> Value {
    json!({
        "status": v.status,
        "witness_point": v.witness.as_ref().map(|(x, _)| matrix_to_rows(x.matrix())),
        "witness_direction": v.witness.as_ref().map(|(_, d)| matrix_to_rows(&d.matrix())),
        "budget": v.budget,
        "stats": v.stats,
    })
}

fn status_str(s: RProperStatus) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn key_value_csv(pairs: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in pairs {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

pub fn run(name: &str, ctx: &SuiteContext) -> Result<Outcome, Failure> {
    match name {
        "rproper" => suite_rproper(ctx),
        "extreme" => suite_extreme(ctx),
        "converge" => suite_converge(ctx),
        "pnotq" => suite_pnotq(ctx),
        "isometry" => suite_isometry(ctx),
        other => Err(config_err(format!("unknown suite {other}"))),
    }
}

fn suite_rproper(ctx: &SuiteContext) -> Result<Outcome, Failure> {
    let body = build_body(ctx.config.domain.as_ref())?;
    let v = is_r_proper(&body, &ctx.budget.search, ctx.seed);
    let expected = ctx.config.suite.expect.or(body.is_bounded().then_some(RProperStatus::NoViolationFound));
    let failed = expected.filter(|e| *e != v.status).map(|e| format!("expected {e:?}, found {:?}", v.status));
    let csv = key_value_csv(&[("status", status_str(v.status)), ("directions_tested", v.stats.directions_tested.to_string())]);
    Ok(Outcome { result: json!({ "check": "r_proper", "domain": body.label(), "verdict": verdict_json(&v) }), csv: Some(csv), failed })
}

fn suite_extreme(ctx: &SuiteContext) -> Result<Outcome, Failure> {
    let body = build_body(ctx.config.domain.as_ref())?;
    let shape = body.shape();
    if !shape.is_square() {
        return Err(config_err("extreme suite needs p = q"));
    }
    let points: Vec<ChartPoint> = match &ctx.config.suite.points {
        Some(rows) => rows.iter().map(|r| point_from_rows::<f64>(r)).collect::<Result<_, Error>>()?,
        None => {
            let mut flat = ChartPoint::identity(shape.p)?.into_matrix();
            flat[(shape.p - 1, shape.p - 1)] = 0.0;
            vec![ChartPoint::identity(shape.p)?, ChartPoint::new(shape, flat)?]
        }
    };
    let points = points.iter().map(|e| certify_boundary(&body, e, ctx.tolerances.boundary)).collect::<Result<Vec<_>, Error>>()?;
    let rows = extreme_equivalence_suite(&body, &points, &ctx.budget.extreme, ctx.seed)?;
    let failed = rows.iter().position(|r| !r.consistent).map(|i| format!("row {i}: characterizations disagree"));
    let mut csv = String::from(ExtremeSuiteRow::csv_header());
    rows.iter().for_each(|r| csv.push_str(&r.to_csv_row()));
    Ok(Outcome { result: json!({ "check": "extreme_equivalence", "domain": body.label(), "rows": rows }), csv: Some(csv), failed })
}

fn suite_converge(ctx: &SuiteContext) -> Result<Outcome, Failure> {
    let body = build_body(ctx.config.domain.as_ref())?;
    let s = &ctx.config.suite;
    let radius = s.radius.unwrap_or(2.0);
    let center = body.interior().clone();
    let probes = default_probe_pairs(&body, &center, s.probes.unwrap_or(8), 2.0, ctx.seed)?;
    let budget = &ctx.budget.convergence;
    let limit = 5e-2 * ctx.tol_scale;
    let (report, failed) = if let Some(lambdas) = &s.lambdas {
        let r = nested_body_metric_convergence(&body, lambdas, radius, &probes, budget, ctx.seed)?;
        let failed = (r.metric_verdict != TrendVerdict::ConvergentTrend).then(|| "metric disagreements show no convergent trend".to_string());
        (r, failed)
    } else {
        let e = match &s.point {
            Some(rows) => point_from_rows::<f64>(rows)?,
            None => ChartPoint::identity(body.shape().p).map_err(|_| config_err("converge suite needs a boundary point"))?,
        };
        let e = certify_boundary(&body, &e, ctx.tolerances.boundary)?;
        let grid = s.t_grid.clone().unwrap_or_else(|| (0..=8).map(f64::from).collect());
        let r = tangent_cone_convergence(&body, &e, &grid, radius, &probes, budget, ctx.seed)?;
        let tail: Vec<f64> = r.parameter_values.iter().zip(&r.hausdorff_values).filter(|(t, _)| **t >= 1.0).map(|(_, h)| *h).collect();
        let failed = if !tail.windows(2).all(|w| w[1] <= w[0]) {
            Some("Hausdorff values increase for t >= 1".to_string())
        } else if r.hausdorff_values.last().is_some_and(|h| *h > limit) {
            Some(format!("final Hausdorff value exceeds {limit}"))
        } else if r.metric_disagreements.last().is_some_and(|m| *m > limit) {
            Some(format!("final metric disagreement exceeds {limit}"))
        } else {
            None
        };
        (r, failed)
    };
    Ok(Outcome { csv: Some(report.to_csv()), result: serde_json::to_value(&report).expect("serializable"), failed })
}

fn suite_pnotq(ctx: &SuiteContext) -> Result<Outcome, Failure> {
    let p = ctx.config.suite.p.unwrap_or(2);
    let q = ctx.config.suite.q.unwrap_or(3);
    if p == 0 || q == 0 {
        return Err(config_err("p and q must be positive"));
    }
    let control = p == q;
    let budget = if control { ctx.budget.search.scaled(10.0) } else { ctx.budget.search };
    let (verdict, failed) = match pnotq_failure_demo(p, q, &budget, ctx.seed) {
        Ok(v) => {
            let failed = (control && v.is_violation()).then(|| "control found a rank-one line in the tangent cone".to_string());
            (verdict_json(&v), failed)
        }
        Err(Error::WitnessNotFound) => (json!({ "status": RProperStatus::NoViolationFound, "budget": budget }), Some("no witness found".to_string())),
        Err(e) => return Err(e.into()),
    };
    let csv = key_value_csv(&[
        ("p", p.to_string()),
        ("q", q.to_string()),
        ("control", control.to_string()),
        ("status", verdict["status"].as_str().unwrap_or_default().to_string()),
    ]);
    Ok(Outcome { result: json!({ "check": "pnotq_failure", "p": p, "q": q, "control": control, "verdict": verdict }), csv: Some(csv), failed })
}

fn suite_isometry(ctx: &SuiteContext) -> Result<Outcome, Failure> {
    let s = &ctx.config.suite;
    let p = s.p.unwrap_or(2);
    let elements = s.elements.unwrap_or(20);
    let samples = s.samples.unwrap_or(1000);
    let pairs = s.pairs.unwrap_or(50);
    let ball = ConvexBody::operator_ball(p, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let starts = hit_and_run(&ball, ball.interior(), pairs, 2.0, &mut rng);
    let mut segs = Vec::with_capacity(pairs);
    for x in starts {
        let d = random_rank_one(ball.shape(), &mut rng);
        let hit = boundary_hits(&ball, &x, &d)?;
        let t = hit.t_minus + (hit.t_plus - hit.t_minus) * rng.random_range(0.05..0.95);
        let y = x.offset(&d.matrix(), t);
        segs.push((x, y));
    }
    let limit = 1e-8 * ctx.tol_scale;
    let mut reports = Vec::new();
    let mut max_rho_defect = 0f64;
    for k in 0..elements as u64 {
        let g = random_so_pp::<f64>(p, ctx.seed.wrapping_add(k)).exp(1.0)?;
        reports.push(verify_ball_preserved(&g, samples, ctx.seed.wrapping_add(k)));
        for (x, y) in &segs {
            let before = rho(&ball, x, y)?.value;
            let after = rho(&ball, &g.apply(x)?, &g.apply(y)?)?.value;
            max_rho_defect = max_rho_defect.max((after - before).abs());
        }
    }
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let failed = if violations > 0 {
        Some(format!("{violations} sampled images left the ball"))
    } else if max_rho_defect > limit {
        Some(format!("rank-one distance changed by {max_rho_defect}"))
    } else {
        None
    };
    let csv = key_value_csv(&[
        ("p", p.to_string()),
        ("elements", elements.to_string()),
        ("violations", violations.to_string()),
        ("max_rho_defect", grhilbert::lingeom::serial::format_sig17(max_rho_defect)),
    ]);
    let result = json!({ "check": "isometry", "p": p, "elements": elements, "pairs": pairs, "violations": violations, "max_rho_defect": max_rho_defect, "reports": reports });
    Ok(Outcome { result, csv: Some(csv), failed })
}
