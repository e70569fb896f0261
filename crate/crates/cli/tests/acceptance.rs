//! Acceptance checks. Each check prints one `PASS`/`FAIL` line; the process
//! exits non-zero if any check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use grhilbert::domains::sample::{hit_and_run, random_rank_one};
use grhilbert::domains::{boundary_hits, is_r_proper, RProperStatus, SearchBudget};
use grhilbert::lingeom::ChartShape;
use grhilbert::metric::{hilbert_classical, hilbert_lower_bound, k_estimate, rho, MetricBudget};
use grhilbert::rescaling::{
    default_probe_pairs, extreme_equivalence_suite, nested_body_metric_convergence, pnotq_failure_demo, tangent_cone_convergence, ConvergenceBudget,
    ExtremeSuiteBudget, ProbePair,
};
use grhilbert::symmetry::{boost_degenerate_limit, random_so_pp};
use grhilbert::{ChartPoint, ConvexBody};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = (bool, String);
type CheckFn = fn() -> Check;

fn pt(q: usize, p: usize, v: &[f64]) -> ChartPoint {
    ChartPoint::from_rows(q, p, v).unwrap()
}

fn sym_power(m: &DMatrix<f64>, e: f64) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(e)));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Metric of the operator-norm ball: move `x` to the origin with the ball
/// automorphism `Y -> (I - XX^T)^-1/2 (Y - X)(I - X^T Y)^-1 (I - X^T X)^1/2`
/// and sum `log((1 + s)/(1 - s))` over the singular values of the image.
fn ball_metric(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let (q, p) = x.shape();
    let left = sym_power(&(DMatrix::identity(q, q) - x * x.transpose()), -0.5);
    let right = sym_power(&(DMatrix::identity(p, p) - x.transpose() * x), 0.5);
    let mid = (DMatrix::identity(p, p) - x.transpose() * y).try_inverse().unwrap();
    let z = left * (y - x) * mid * right;
    z.singular_values().iter().map(|s| ((1.0 + s) / (1.0 - s)).ln()).sum()
}

/// Points `x` and `x + t S` with `S` rank one and `t` inside the chord
/// (chords clipped to `[-2, 2]`).
fn rank_one_pairs(body: &ConvexBody, n: usize, seed: u64) -> Vec<ProbePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = hit_and_run(body, body.interior(), n, 2.0, &mut rng);
    starts
        .into_iter()
        .map(|x| {
            let d = random_rank_one::<f64, _>(body.shape(), &mut rng);
            let hit = boundary_hits(body, &x, &d).unwrap();
            let (lo, hi) = (hit.t_minus.max(-2.0), hit.t_plus.min(2.0));
            let t = lo + (hi - lo) * rng.random_range(0.05..0.95);
            let y = x.offset(&d.matrix(), t);
            (x, y)
        })
        .collect()
}

/// Independent pairs from a thinned hit-and-run walk.
fn walk_pairs(body: &ConvexBody, n: usize, seed: u64) -> Vec<ProbePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = hit_and_run(body, body.interior(), 10 * n, 2.0, &mut rng);
    pts.chunks(10).map(|c| (c[4].clone(), c[9].clone())).collect()
}

fn rotation(theta: f64) -> ChartPoint {
    pt(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
}

fn p1_equivalence() -> Check {
    let disk = ConvexBody::operator_ball(2, 1).unwrap();
    let n = [pt(2, 1, &[-1.0, 0.0]), pt(2, 1, &[0.0, -1.0]), pt(2, 1, &[1.0, 1.0])];
    let simplex = ConvexBody::polytope(
        ChartShape::new(1, 2).unwrap(),
        n.iter().map(|m| m.matrix().clone()).collect(),
        vec![0.0, 0.0, 1.0],
        Some(pt(2, 1, &[0.25, 0.25])),
        Some(1.5),
    )
    .unwrap();
    let klein = |x: &DMatrix<f64>, y: &DMatrix<f64>| {
        let c = (1.0 - x.dot(y)) / ((1.0 - x.norm_squared()) * (1.0 - y.norm_squared())).sqrt();
        2.0 * c.max(1.0).acosh()
    };
    // Exit parameters of x + t d from the simplex x > 0, y > 0, x + y < 1.
    let simplex_metric = |x: &DMatrix<f64>, y: &DMatrix<f64>| {
        let d = y - x;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (a, b) in [(-d[0], x[0]), (-d[1], x[1]), (d[0] + d[1], 1.0 - x[0] - x[1])] {
            // a t < b
            if a > 0.0 {
                hi = hi.min(b / a);
            } else if a < 0.0 {
                lo = lo.max(b / a);
            }
        }
        ((hi * (1.0 - lo)) / ((hi - 1.0) * (-lo))).ln()
    };
    let mut worst_est = 0f64;
    let mut worst_oracle = 0f64;
    for (body, oracle, seed) in [(&disk, &klein as &dyn Fn(&DMatrix<f64>, &DMatrix<f64>) -> f64, 11), (&simplex, &simplex_metric, 12)] {
        for (x, y) in walk_pairs(body, 100, seed) {
            let h = hilbert_classical(body, &x, &y).unwrap();
            let k = k_estimate(body, &x, &y, &MetricBudget::default(), seed).unwrap().value;
            worst_est = worst_est.max((k - h).abs());
            worst_oracle = worst_oracle.max((h - oracle(x.matrix(), y.matrix())).abs() / (1.0 + h));
        }
    }
    (worst_est <= 1e-9 && worst_oracle <= 1e-9, format!("max |K - H| = {worst_est:.3e}, max rel |H - closed form| = {worst_oracle:.3e} (200 pairs)"))
}

fn interval_ground_truth() -> Check {
    let b = ConvexBody::operator_ball(1, 1).unwrap();
    let o = pt(1, 1, &[0.0]);
    let k = |r: f64| k_estimate(&b, &o, &pt(1, 1, &[r]), &MetricBudget::default(), 0).unwrap().value;
    let half = (k(0.5) - 3f64.ln()).abs();
    let sweep = (1..=9).map(|i| f64::from(i) / 10.0).map(|r| (k(r) - ((1.0 + r) / (1.0 - r)).ln()).abs()).fold(0.0, f64::max);
    (half <= 1e-12 && sweep <= 1e-10, format!("|K(0, 0.5) - log 3| = {half:.3e}, sweep max error = {sweep:.3e}"))
}

fn segment_invariance() -> Check {
    let ball = ConvexBody::operator_ball(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let well_conditioned = |rng: &mut ChaCha8Rng| loop {
        let m = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        let s = m.singular_values();
        if s.min() > 0.0 && s.max() / s.min() < 20.0 {
            return m;
        }
    };
    let mut worst = 0f64;
    for k in 0..50 {
        let a = well_conditioned(&mut rng);
        let bm = well_conditioned(&mut rng);
        let c = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-3.0..3.0));
        let image = ConvexBody::chart_affine_image(ball.clone(), &a, &bm, &c).unwrap();
        let g = |x: &ChartPoint| ChartPoint::from_matrix(&a * x.matrix() * &bm + &c).unwrap();
        for (x, y) in rank_one_pairs(&ball, 50, 100 + k) {
            let r0 = rho(&ball, &x, &y).unwrap().value;
            let r1 = rho(&image, &g(&x), &g(&y)).unwrap().value;
            worst = worst.max((r1 - r0).abs());
        }
    }
    (worst <= 1e-9, format!("max |delta rho| = {worst:.3e} over 2500 segments"))
}

fn isometry_action() -> Check {
    let ball = ConvexBody::operator_ball(2, 2).unwrap();
    let pairs = rank_one_pairs(&ball, 50, 4);
    let general = walk_pairs(&ball, 50, 5);
    let budget = MetricBudget::default();
    let mut rho_defect = 0f64;
    let mut k_defect = 0f64;
    let mut oracle_gap = 0f64;
    for e in 0..20u64 {
        let g = random_so_pp::<f64>(2, 40 + e).exp(1.0).unwrap();
        for (x, y) in &pairs {
            let r0 = rho(&ball, x, y).unwrap().value;
            let r1 = rho(&ball, &g.apply(x).unwrap(), &g.apply(y).unwrap()).unwrap().value;
            rho_defect = rho_defect.max((r1 - r0).abs());
        }
        for (x, y) in general.iter().skip(e as usize).step_by(20) {
            let (gx, gy) = (g.apply(x).unwrap(), g.apply(y).unwrap());
            let k0 = k_estimate(&ball, x, y, &budget, 9).unwrap().value;
            let k1 = k_estimate(&ball, &gx, &gy, &budget, 9).unwrap().value;
            k_defect = k_defect.max((k1 - k0).abs() / k0.max(1e-12));
            oracle_gap = oracle_gap.max((k0 - ball_metric(x.matrix(), y.matrix())).abs() / k0.max(1e-12));
        }
    }
    (
        rho_defect <= 1e-8 && k_defect <= 1e-3,
        format!("rank-one rho defect {rho_defect:.3e}; K-hat relative defect {k_defect:.3e} on 50 pairs (K-hat vs ball closed form {oracle_gap:.3e})"),
    )
}

fn random_polytope(seed: u64, half_width: f64, cuts: usize) -> ConvexBody {
    let shape = ChartShape::square(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normals = Vec::new();
    let mut bounds = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for s in [1.0, -1.0] {
                let mut n = DMatrix::zeros(2, 2);
                n[(i, j)] = s;
                normals.push(n);
                bounds.push(half_width);
            }
        }
    }
    for _ in 0..cuts {
        let n = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        bounds.push(n.norm() * rng.random_range(0.2..0.4));
        normals.push(n);
    }
    ConvexBody::polytope(shape, normals, bounds, None, Some(2.0 * half_width)).unwrap()
}

fn sandwich() -> Check {
    let cone = ConvexBody::half_cone(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cone_pts = Vec::new();
    while cone_pts.len() < 2000 {
        let u = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        let x = pt(2, 2, &[1.0, 0.0, 0.0, 1.0]).offset(&u, 1.2);
        if cone.contains(&x) {
            cone_pts.push(x);
        }
    }
    let cone_pairs: Vec<ProbePair> = cone_pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let bodies: Vec<(&str, ConvexBody, Vec<ProbePair>)> = vec![
        ("ball 2x2", ConvexBody::operator_ball(2, 2).unwrap(), vec![]),
        ("ball 3x3", ConvexBody::operator_ball(3, 3).unwrap(), vec![]),
        ("random polytope", random_polytope(7, 0.6, 8), vec![]),
        ("half cone", cone, cone_pairs),
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut counts = Vec::new();
    for (k, (name, body, pairs)) in bodies.into_iter().enumerate() {
        let pairs = if pairs.is_empty() { walk_pairs(&body, 1000, 60 + k as u64) } else { pairs };
        for (x, y) in &pairs {
            let h = hilbert_lower_bound(&body, x, y).unwrap();
            let kh = k_estimate(&body, x, y, &MetricBudget::quick(), 1).unwrap().value;
            worst = worst.max(h - kh);
        }
        counts.push(format!("{name}: {}", pairs.len()));
    }
    (worst <= 1e-9, format!("max (H - K-hat) = {worst:.3e}; pairs {}", counts.join(", ")))
}

fn inclusion_monotonicity() -> Check {
    let ball = ConvexBody::operator_ball(2, 2).unwrap();
    let poly = random_polytope(8, 0.45, 6);
    let inside = walk_pairs(&poly, 200, 9).into_iter().flat_map(|(a, b)| [a, b]).all(|x| ball.contains(&x));
    let mut worst = f64::NEG_INFINITY;
    for (x, y) in rank_one_pairs(&poly, 1000, 10) {
        let rb = rho(&ball, &x, &y).unwrap().value;
        let rp = rho(&poly, &x, &y).unwrap().value;
        worst = worst.max(rb - rp);
    }
    (inside && worst <= 1e-10, format!("max (rho_ball - rho_polytope) = {worst:.3e} on 1000 segments"))
}

fn extreme_suite() -> Check {
    let ball = ConvexBody::operator_ball(2, 2).unwrap();
    let mut extreme: Vec<ChartPoint> = vec![ChartPoint::identity(2).unwrap()];
    extreme.extend((0..8).map(|k| rotation(0.3 + f64::from(k) * 0.75)));
    let flat: Vec<ChartPoint> = [0.0, 0.3, 0.7].iter().map(|s| pt(2, 2, &[1.0, 0.0, 0.0, *s])).collect();
    let points: Vec<ChartPoint> = extreme.iter().chain(&flat).cloned().collect();
    let rows = extreme_equivalence_suite(&ball, &points, &ExtremeSuiteBudget::default(), 21).unwrap();
    let inconsistent = rows.iter().filter(|r| !r.consistent).count();
    let extremes_ok = rows[..9].iter().all(|r| r.test1_adjacency.extreme && r.test2_ze.extreme && r.test3_tc_proper.extreme);
    let opnorm = |m: &DMatrix<f64>| m.singular_values().max();
    // Witnesses for diag(1, s): the partner is a boundary point differing by
    // rank one, the Z point is inside with det(X - e) = 0, and the tangent
    // cone `{X_11 < 1}` contains the line, i.e. S_11 = 0.
    let mut witnesses_ok = true;
    for (r, e) in rows[9..].iter().zip(&flat) {
        let partner = r.test1_adjacency.partner.as_ref().map(|p| pt(2, 2, &p.concat()));
        let partner_ok = partner.is_some_and(|p| {
            let d = p.matrix() - e.matrix();
            (opnorm(p.matrix()) - 1.0).abs() < 1e-8 && d.norm() > 1e-6 && d.singular_values().min() < 1e-9
        });
        let z_ok = r.test2_ze.witness.as_ref().is_some_and(|w| {
            let w = pt(2, 2, &w.concat());
            opnorm(w.matrix()) < 1.0 && (w.matrix() - e.matrix()).determinant().abs() < 1e-8
        });
        let tc_ok = match (&r.test3_tc_proper.witness_point, &r.test3_tc_proper.witness_direction) {
            (Some(x), Some(s)) => {
                let s = pt(2, 2, &s.concat());
                x[0][0] < 1.0 && s.matrix()[(0, 0)].abs() <= 1e-9 * s.matrix().norm()
            }
            _ => false,
        };
        witnesses_ok &= partner_ok && z_ok && tc_ok && r.consistent;
    }
    (
        inconsistent == 0 && extremes_ok && witnesses_ok,
        format!("{} rows, {inconsistent} inconsistent; orthogonal points extreme: {extremes_ok}; flat points witnessed: {witnesses_ok}", rows.len()),
    )
}

fn degenerate_limit() -> Check {
    let ts: Vec<f64> = (1..=12).map(f64::from).collect();
    match boost_degenerate_limit(2, &ts) {
        Ok(lim) => {
            let angle = lim.image_angle.unwrap_or(f64::INFINITY);
            (lim.rank == 1 && angle <= 1e-6, format!("rank {}, singular gap {:.3e}, image angle {angle:.3e}", lim.rank, lim.gap))
        }
        Err(e) => (false, format!("{e}")),
    }
}

fn pnotq_failure() -> Check {
    let budget = SearchBudget::default();
    let mut details = Vec::new();
    let mut ok = true;
    for (p, q) in [(1, 2), (2, 3)] {
        let verified = match pnotq_failure_demo(p, q, &budget, 13) {
            Ok(v) => {
                let (x, s) = v.witness.unwrap();
                // Tangent cone of the ball at E = [I; 0]: E + s' (Z - E) is in
                // the ball for small s' when E^T (Z - E) has negative definite
                // symmetric part, which the rank-one direction does not change.
                let e = DMatrix::from_fn(q, p, |i, j| if i == j { 1.0 } else { 0.0 });
                let first = e.transpose() * (x.matrix() - &e);
                let margin = -(&first + first.transpose()).symmetric_eigenvalues().max();
                let sm = s.matrix();
                margin > 0.0
                    && (e.transpose() * &sm).norm() <= 1e-9 * sm.norm()
                    && [-1e3, -1.0, 0.0, 1.0, 1e3].iter().all(|t| {
                        let d = x.matrix() + &sm * *t - &e;
                        let sc = 0.5 * margin / d.norm_squared().max(1e-300);
                        (&e + d * sc).singular_values().max() < 1.0
                    })
            }
            Err(_) => false,
        };
        ok &= verified;
        details.push(format!("({p},{q}) witness verified: {verified}"));
    }
    let control = pnotq_failure_demo(2, 2, &budget.scaled(10.0), 13).unwrap();
    ok &= control.status == RProperStatus::NoViolationFound;
    details.push(format!("(2,2) control at 10x budget: {:?}", control.status));
    (ok, details.join("; "))
}

fn convergence() -> Check {
    let ball = ConvexBody::operator_ball(2, 2).unwrap();
    let probes = default_probe_pairs(&ball, &ChartPoint::zeros(ball.shape()), 8, 2.0, 14).unwrap();
    let ts: Vec<f64> = (0..=8).map(f64::from).collect();
    let r = tangent_cone_convergence(&ball, &ChartPoint::identity(2).unwrap(), &ts, 2.0, &probes, &ConvergenceBudget::default(), 14).unwrap();
    let h = &r.hausdorff_values;
    let monotone = h[1..].windows(2).all(|w| w[1] <= w[0]);
    let h_final = *h.last().unwrap();
    let m_final = *r.metric_disagreements.last().unwrap();
    // Interval: with endpoints +-l the distance is log((l+y)(l-x)/((l-y)(l+x))).
    let interval = ConvexBody::operator_ball(1, 1).unwrap();
    let q = |v: f64| pt(1, 1, &[v]);
    let iprobes = vec![(q(-0.5), q(0.5)), (q(0.0), q(0.9)), (q(-0.8), q(0.2)), (q(0.3), q(0.6))];
    let ns: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0].to_vec();
    let lambdas: Vec<f64> = ns.iter().map(|n| 1.0 + 1.0 / n).collect();
    let nr = nested_body_metric_convergence(&interval, &lambdas, 3.0, &iprobes, &ConvergenceBudget::default(), 15).unwrap();
    let d = |l: f64, x: f64, y: f64| (((l + y) * (l - x)) / ((l - y) * (l + x))).ln().abs();
    let mut worst_rel = 0f64;
    for (i, &l) in lambdas.iter().enumerate() {
        let closed = iprobes
            .iter()
            .map(|(x, y)| {
                let (x, y) = (x.matrix()[(0, 0)], y.matrix()[(0, 0)]);
                (d(l, x, y) - d(1.0, x, y)).abs()
            })
            .fold(0.0, f64::max);
        worst_rel = worst_rel.max((nr.metric_disagreements[i] - closed).abs() / closed);
    }
    // The O(1/n) rate: n times the disagreement settles.
    let scaled: Vec<f64> = ns.iter().zip(&nr.metric_disagreements).map(|(n, m)| n * m).collect();
    let rate_ok = (scaled[scaled.len() - 1] / scaled[scaled.len() - 2] - 1.0).abs() < 0.2;
    (
        monotone && h_final <= 0.05 && m_final <= 5e-2 && worst_rel <= 0.2 && rate_ok,
        format!(
            "Hausdorff nonincreasing for t >= 1: {monotone}, final {h_final:.3e}; probe disagreement final {m_final:.3e}; nested interval max rel error {worst_rel:.3e}, n*d(n) = {:.4} -> {:.4}",
            scaled[scaled.len() - 2],
            scaled[scaled.len() - 1]
        ),
    )
}

fn degeneracy_control() -> Check {
    let full = ConvexBody::full_chart(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut max_rho = 0f64;
    for _ in 0..200 {
        let x = ChartPoint::from_matrix(DMatrix::from_fn(2, 2, |_, _| rng.random_range(-5.0..5.0))).unwrap();
        let d = random_rank_one::<f64, _>(full.shape(), &mut rng);
        let y = x.offset(&d.matrix(), rng.random_range(-10.0..10.0));
        max_rho = max_rho.max(rho(&full, &x, &y).unwrap().value);
    }
    let budget = SearchBudget::default();
    let full_violation = is_r_proper(&full, &budget, 17).is_violation();
    let proper: Vec<(String, bool)> = [
        ConvexBody::half_cone(2).unwrap(),
        ConvexBody::operator_ball(1, 1).unwrap(),
        ConvexBody::operator_ball(2, 2).unwrap(),
        ConvexBody::operator_ball(3, 2).unwrap(),
        ConvexBody::operator_ball(3, 3).unwrap(),
    ]
    .iter()
    .map(|b| (b.label().to_string(), !is_r_proper(b, &budget, 17).is_violation()))
    .collect();
    let ok = max_rho == 0.0 && full_violation && proper.iter().all(|(_, p)| *p);
    (ok, format!("full chart: max rho {max_rho:e}, violation {full_violation}; proper: {proper:?}"))
}

fn boundary_divergence() -> Check {
    let ball = ConvexBody::operator_ball(2, 2).unwrap();
    let o = ChartPoint::zeros(ball.shape());
    let rs = [0.5, 0.8, 0.9, 0.95, 0.99];
    let hs: Vec<f64> = rs.iter().map(|r| hilbert_lower_bound(&ball, &o, &pt(2, 2, &[*r, 0.0, 0.0, *r])).unwrap()).collect();
    let increasing = hs.windows(2).all(|w| w[1] > w[0]);
    let oracle = rs.iter().zip(&hs).map(|(r, h)| (h - ((1.0 + r) / (1.0 - r)).ln()).abs()).fold(0.0, f64::max);
    (increasing && hs[3] > 3.0 && oracle <= 1e-9, format!("H = {hs:.4?}; max |H - log((1+r)/(1-r))| = {oracle:.3e}"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_grhilbert")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let metric_cfg = write("metric.json", r#"{"domain":{"kind":"operator_ball","p":2,"q":2},"x":[[0.1,0.2],[0.0,-0.3]],"y":[[-0.4,0.1],[0.2,0.5]]}"#);
    let suite_cfg = write("suite.json", r#"{"domain":{"kind":"operator_ball","p":2,"q":2},"suite":{"points":[[[1,0],[0,1]],[[1,0],[0,0.5]]]}}"#);
    let mut same = true;
    for (args, name) in [(vec!["metric", "--config", &metric_cfg], "metric"), (vec!["suite", "extreme", "--config", &suite_cfg], "suite")] {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|k| {
                let path = dir.path().join(format!("{name}{k}.json"));
                let mut a = args.clone();
                let p = path.to_str().unwrap().to_string();
                a.extend(["--seed", "42", "--out", &p]);
                let (code, _) = run_cli(&a);
                assert_eq!(code, 0, "{name} run failed");
                std::fs::read(Path::new(&p)).unwrap()
            })
            .collect();
        same &= !outs[0].is_empty() && outs[0] == outs[1];
    }
    let outside = write("outside.json", r#"{"domain":{"kind":"operator_ball","p":1,"q":1},"x":[[0.0]],"y":[[1.5]]}"#);
    let malformed = write("malformed.json", r#"{"domain":{"kind":"operator_ball","p":1,"q":1},"x":[[0.0]],"#);
    let failing = write("failing.json", r#"{"domain":{"kind":"full_chart","p":2,"q":2},"suite":{"expect":"no_violation_found"}}"#);
    let codes =
        [run_cli(&["metric", "--config", &outside]).0, run_cli(&["metric", "--config", &malformed]).0, run_cli(&["suite", "rproper", "--config", &failing]).0];
    (same && codes == [2, 3, 4], format!("byte-identical reruns: {same}; exit codes for outside/malformed/failing suite: {codes:?}"))
}

fn main() {
    let checks: [(&str, CheckFn); 13] = [
        ("p1_equivalence", p1_equivalence),
        ("interval_ground_truth", interval_ground_truth),
        ("segment_projective_invariance", segment_invariance),
        ("isometry_of_symmetric_action", isometry_action),
        ("sandwich_lower_bound", sandwich),
        ("monotonicity_under_inclusion", inclusion_monotonicity),
        ("extreme_point_suite", extreme_suite),
        ("degenerate_limit", degenerate_limit),
        ("pnotq_failure", pnotq_failure),
        ("convergence_experiments", convergence),
        ("degeneracy_control", degeneracy_control),
        ("boundary_divergence", boundary_divergence),
        ("cli_determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        failed += usize::from(!ok);
        println!("{} {:02} {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
