use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::chain::{feasible_svd_chain, ordered_chain, svd_terms, Chain};
use super::rho::rho_segment;
use crate::domains::{exit_parameter, ConvexBody};
use crate::error::{Error, Result};
use crate::lingeom::linalg::singular_values;
use crate::lingeom::serial::matrix_to_rows;
use crate::lingeom::ChartPoint;
use crate::scalar::Real;
use crate::tolerances::TAU_RANK;

/// Relative level below which a trailing singular value is treated as exact zero.
const EXACT_RANK: f64 = 1e-13;
/// Segments shorter than this (relative to the waypoint scale) are not created.
const MIN_STEP: f64 = 1e-9;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricBudget {
    /// Grid resolution per angle for two-segment re-decomposition.
    pub grid: usize,
    /// Golden-section sweeps over the two angles.
    pub sweeps: usize,
    pub golden_iters: usize,
    /// Nelder-Mead iterations polishing the best splitting after the sweeps.
    pub polish_iters: usize,
    /// Full refinement passes over the chain.
    pub passes: usize,
    /// Extra starts from random orders of the SVD terms.
    pub restarts: usize,
    /// Cap on generated chain length; `None` means `2 min(p, q)`. Feasibility
    /// staircases and seeded routes may be longer.
    pub max_segments: Option<usize>,
}

impl Default for MetricBudget {
    fn default() -> Self {
        Self { grid: 12, sweeps: 3, golden_iters: 40, polish_iters: 300, passes: 4, restarts: 2, max_segments: None }
    }
}

impl MetricBudget {
    /// A cheap budget: one pass, coarse grid, no polish, no restarts.
    pub fn quick() -> Self {
        Self { grid: 6, sweeps: 2, golden_iters: 24, polish_iters: 0, passes: 1, restarts: 0, max_segments: None }
    }

    pub fn scaled(self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Self {
            grid: ((self.grid as f64 * factor.sqrt()).round() as usize).max(2),
            sweeps: self.sweeps,
            golden_iters: self.golden_iters,
            polish_iters: self.polish_iters,
            passes: s(self.passes),
            restarts: (self.restarts as f64 * factor).round() as usize,
            max_segments: self.max_segments,
        }
    }
}

/// Upper bound for `K_Omega(X, Y)` with the chain that realizes it.
#[derive(Debug, Clone)]
pub struct MetricEstimate<T: Real> {
    pub value: T,
    pub chain: Chain<T>,
    pub segment_rhos: Vec<T>,
    /// Best value after initialization and after each accepted improvement.
    pub trace: Vec<T>,
    pub seed: u64,
    pub budget: MetricBudget,
}

impl<T: Real> MetricEstimate<T> {
    pub fn to_json(&self) -> Value {
        let f = |x: &T| Value::from(x.to_f64_lossy());
        json!({
            "value": f(&self.value),
            "chain": self.chain.waypoints().iter().map(|w| matrix_to_rows(w.matrix())).collect::<Vec<_>>(),
            "segment_rhos": self.segment_rhos.iter().map(f).collect::<Vec<_>>(),
            "trace": self.trace.iter().map(f).collect::<Vec<_>>(),
            "seed": self.seed,
            "budget": self.budget,
        })
    }
}

/// Upper bound for `K_Omega(X, Y)`, refined from the SVD chain.
pub fn k_estimate<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, y: &ChartPoint<T>, budget: &MetricBudget, seed: u64) -> Result<MetricEstimate<T>> {
    estimate(body, x, y, budget, seed, None)
}

/// As [`k_estimate`], additionally starting from the route through
/// `waypoints` (each leg estimated on its own, then concatenated).
pub fn k_estimate_seeded<T: Real>(
    body: &ConvexBody<T>,
    x: &ChartPoint<T>,
    y: &ChartPoint<T>,
    budget: &MetricBudget,
    seed: u64,
    waypoints: &[ChartPoint<T>],
) -> Result<MetricEstimate<T>> {
    estimate(body, x, y, budget, seed, Some(waypoints))
}

fn estimate<T: Real>(
    body: &ConvexBody<T>,
    x: &ChartPoint<T>,
    y: &ChartPoint<T>,
    budget: &MetricBudget,
    seed: u64,
    route: Option<&[ChartPoint<T>]>,
) -> Result<MetricEstimate<T>> {
    for pt in [x, y].into_iter().chain(route.unwrap_or(&[])) {
        pt.shape().check(&body.shape())?;
        if !body.contains(pt) {
            return Err(Error::PointOutside(body.label().to_string()));
        }
    }
    let done = |chain: Chain<T>, trace: Vec<T>| {
        let segment_rhos = chain.segment_rhos(body);
        let value = segment_rhos.iter().fold(T::zero(), |a, b| a + *b);
        MetricEstimate { value, chain, segment_rhos, trace, seed, budget: *budget }
    };
    if x.matrix() == y.matrix() {
        return Ok(done(Chain::from_waypoints(vec![x.clone()])?, vec![T::zero()]));
    }
    let shape = body.shape();
    let max_segments = budget.max_segments.unwrap_or(2 * shape.p.min(shape.q));
    let refiner = Refiner { body, budget };

    let initial = feasible_svd_chain(body, x, y)?;
    let mut best_w: Vec<DMatrix<T>> = initial.waypoints().iter().map(|w| w.matrix().clone()).collect();
    let mut best = refiner.value(&best_w);
    let mut trace = vec![best];
    let valid = |w: &[DMatrix<T>]| {
        let mut pts: Vec<ChartPoint<T>> = w.iter().map(|m| ChartPoint::from_parts(shape, m.clone())).collect();
        *pts.last_mut().unwrap() = y.clone();
        Chain::from_waypoints(pts).is_ok()
    };
    let offer = |w: Vec<DMatrix<T>>, v: T, best: &mut T, best_w: &mut Vec<DMatrix<T>>, trace: &mut Vec<T>| {
        if v < *best && valid(&w) {
            *best = v;
            *best_w = w;
            trace.push(v);
        }
    };

    let mut w = best_w.clone();
    let v = refiner.refine(&mut w);
    offer(w, v, &mut best, &mut best_w, &mut trace);

    if let Some(route) = route {
        let mut stops = vec![x.clone()];
        stops.extend(route.iter().cloned());
        stops.push(y.clone());
        let mut w: Vec<DMatrix<T>> = vec![x.matrix().clone()];
        for leg in stops.windows(2) {
            let e = estimate(body, &leg[0], &leg[1], budget, seed, None)?;
            w.extend(e.chain.waypoints()[1..].iter().map(|p| p.matrix().clone()));
        }
        w.dedup();
        let v = refiner.value(&w);
        offer(w.clone(), v, &mut best, &mut best_w, &mut trace);
        let v = refiner.refine(&mut w);
        offer(w, v, &mut best, &mut best_w, &mut trace);
    }

    let terms = svd_terms(&(y.matrix() - x.matrix()));
    if terms.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget.restarts {
            let mut order = terms.clone();
            order.shuffle(&mut rng);
            let c = ordered_chain(x, y, &order)?;
            if c.len() > max_segments || !c.is_feasible(body) {
                continue;
            }
            let mut w: Vec<DMatrix<T>> = c.waypoints().iter().map(|p| p.matrix().clone()).collect();
            let v = refiner.refine(&mut w);
            offer(w, v, &mut best, &mut best_w, &mut trace);
        }
    }

    let mut pts: Vec<ChartPoint<T>> = best_w.into_iter().map(|m| ChartPoint::from_parts(shape, m)).collect();
    *pts.last_mut().unwrap() = y.clone();
    Ok(done(Chain::from_waypoints(pts)?, trace))
}

struct Refiner<'a, T: Real> {
    body: &'a ConvexBody<T>,
    budget: &'a MetricBudget,
}

impl<T: Real> Refiner<'_, T> {
    fn seg(&self, a: &DMatrix<T>, b: &DMatrix<T>) -> T {
        rho_segment(self.body, a, &(b - a))
    }

    fn value(&self, w: &[DMatrix<T>]) -> T {
        w.windows(2).fold(T::zero(), |acc, p| acc + self.seg(&p[0], &p[1]))
    }

    /// Local improvement passes; returns the final chain value.
    fn refine(&self, w: &mut Vec<DMatrix<T>>) -> T {
        for _ in 0..self.budget.passes {
            let mut improved = self.shortcut(w);
            let mut i = 0;
            while i + 2 < w.len() {
                let cur = self.seg(&w[i], &w[i + 1]) + self.seg(&w[i + 1], &w[i + 2]);
                let slack = T::lit(1e-14) * cur.max(T::one());
                let d = &w[i + 2] - &w[i];
                if d.norm() == T::zero() {
                    w.drain(i + 1..=i + 2);
                    improved = true;
                    continue;
                }
                let sv = singular_values(&d);
                let rank = exact_rank(&sv);
                if rank <= 1 {
                    if self.seg(&w[i], &w[i + 2]) <= cur - slack {
                        w.remove(i + 1);
                        improved = true;
                        continue;
                    }
                } else if rank == 2 {
                    if let Some((v, mid)) = self.best_split(&w[i], &d) {
                        if v < cur - slack {
                            w[i + 1] = mid;
                            improved = true;
                        }
                    }
                }
                i += 1;
            }
            for k in 1..w.len().saturating_sub(1) {
                improved |= self.slide(w, k);
            }
            if !improved {
                break;
            }
        }
        self.value(w)
    }

    /// Replaces a run of three or more steps by one or two steps between its
    /// ends when the end difference has rank at most two and that is cheaper.
    /// From each start, runs to the end are tried first, then runs of half
    /// that length and so on. Returns whether the chain changed.
    fn shortcut(&self, w: &mut Vec<DMatrix<T>>) -> bool {
        let mut changed = false;
        let mut i = 0;
        while i + 3 < w.len() {
            let mut span = w.len() - 1 - i;
            while span >= 3 {
                let j = i + span;
                let cur = self.value(&w[i..=j]);
                let slack = T::lit(1e-14) * cur.max(T::one());
                let d = &w[j] - &w[i];
                if d.norm() == T::zero() {
                    w.drain(i + 1..=j);
                    changed = true;
                    break;
                }
                let replaced = match exact_rank(&singular_values(&d)) {
                    1 => (self.seg(&w[i], &w[j]) <= cur - slack).then(Vec::new),
                    2 => self.best_split(&w[i], &d).filter(|(v, _)| *v < cur - slack).map(|(_, m)| vec![m]),
                    _ => None,
                };
                if let Some(mid) = replaced {
                    let end = w[j].clone();
                    w.splice(i + 1..=j, mid.into_iter().chain(std::iter::once(end)));
                    changed = true;
                    break;
                }
                span = if span > 3 { (span / 2).max(3) } else { 0 };
            }
            i += 1;
        }
        changed
    }

    /// Minimizes `rho(a, a + S1) + rho(a + S1, a + D)` over the rank-one
    /// splittings `D = S1 + S2` of a rank-two `D`.
    ///
    /// With `D = U diag(s1, s2) V^T` (reduced), `S1 = lambda (U a)(V b)^T` for
    /// unit `a = (cos alpha, sin alpha)`, `b = (cos beta, sin beta)` and
    /// `lambda = 1 / (b^T diag(1/s1, 1/s2) a)` covers every splitting.
    fn best_split(&self, a: &DMatrix<T>, d: &DMatrix<T>) -> Option<(T, DMatrix<T>)> {
        let svd = crate::lingeom::linalg::svd(d);
        let (u, vt) = (svd.u?, svd.v_t?);
        let sv = &svd.singular_values;
        let mut idx: Vec<usize> = (0..sv.len()).collect();
        idx.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
        let (k1, k2) = (idx[0], idx[1]);
        let (s1, s2) = (sv[k1], sv[k2]);
        let (u1, u2): (DVector<T>, DVector<T>) = (u.column(k1).into_owned(), u.column(k2).into_owned());
        let (v1, v2): (DVector<T>, DVector<T>) = (vt.row(k1).transpose(), vt.row(k2).transpose());
        let c = a + d;
        let scale = a.norm().max(c.norm()).max(d.norm());
        // The part of D outside the two leading singular directions stays in
        // the second step; keep both steps large enough for it to be negligible.
        let residual = (0..sv.len()).filter(|&k| k != k1 && k != k2).map(|k| sv[k]).fold(T::zero(), |a, b| a.max(b));
        let noise = residual + T::lit(16.0) * T::default_epsilon() * scale;
        let min_step = (scale * T::lit(MIN_STEP)).max(noise * T::lit(1e-2 / TAU_RANK));

        let point = |alpha: T, beta: T| -> Option<DMatrix<T>> {
            let (ca, sa, cb, sb) = (alpha.cos(), alpha.sin(), beta.cos(), beta.sin());
            let denom = cb * ca / s1 + sb * sa / s2;
            if denom.abs() < T::lit(1e-12) / s2 {
                return None;
            }
            let s = (&u1 * ca + &u2 * sa) * (&v1 * cb + &v2 * sb).transpose() * (T::one() / denom);
            if s.norm() < min_step || (d - &s).norm() < min_step {
                return None;
            }
            Some(a + s)
        };
        let f = |alpha: T, beta: T| -> T {
            match point(alpha, beta) {
                Some(m) if self.body.contains_matrix(&m) => self.seg(a, &m) + self.seg(&m, &c),
                _ => T::infinity(),
            }
        };

        let pi = T::pi();
        let g = self.budget.grid.max(2);
        let step = pi / T::usize(g);
        let mut best = (T::infinity(), T::zero(), T::zero());
        for i in 0..g {
            for j in 0..g {
                let (al, be) = ((T::usize(i) + T::lit(0.5)) * step, (T::usize(j) + T::lit(0.5)) * step);
                let v = f(al, be);
                if v < best.0 {
                    best = (v, al, be);
                }
            }
        }
        if !best.0.is_finite() {
            return None;
        }
        let (mut fv, mut al, mut be) = best;
        let mut half = step;
        for _ in 0..self.budget.sweeps {
            let (v, t) = golden(|t| f(t, be), al - half, al + half, self.budget.golden_iters);
            if v < fv {
                fv = v;
                al = t;
            }
            let (v, t) = golden(|t| f(al, t), be - half, be + half, self.budget.golden_iters);
            if v < fv {
                fv = v;
                be = t;
            }
            half *= T::lit(0.5);
        }
        if self.budget.polish_iters > 0 {
            let h = half.max(T::lit(1e-6));
            let (v, a2, b2) = nelder_mead(f, [(al, be), (al + h, be), (al, be + h)], self.budget.polish_iters);
            if v < fv {
                (fv, al, be) = (v, a2, b2);
            }
        }
        point(al, be).map(|m| (fv, m))
    }

    /// Moves waypoint `k` along its incoming or outgoing direction when both
    /// neighbouring differences stay rank one. Returns whether it improved.
    fn slide(&self, w: &mut [DMatrix<T>], k: usize) -> bool {
        let (prev, cur, next) = (w[k - 1].clone(), w[k].clone(), w[k + 1].clone());
        let base = self.seg(&prev, &cur) + self.seg(&cur, &next);
        let mut improved = false;
        for dir in [&cur - &prev, &next - &cur] {
            let n = dir.norm();
            if n == T::zero() {
                continue;
            }
            let s = dir / n;
            let probe = &w[k] + &s * (n * T::lit(0.37));
            if exact_rank(&singular_values(&(&next - &probe))) > 1 || exact_rank(&singular_values(&(&probe - &prev))) > 1 {
                continue;
            }
            let cap = T::lit(1e3) * (T::one() + n);
            let hi = exit_parameter(self.body, &w[k], &s, T::one()).min(cap);
            let lo = (-exit_parameter(self.body, &w[k], &(-&s), T::one())).max(-cap);
            let shrink = T::lit(0.999);
            let cur_w = w[k].clone();
            let f = |t: T| {
                let m = &cur_w + &s * t;
                if !self.body.contains_matrix(&m) {
                    return T::infinity();
                }
                self.seg(&prev, &m) + self.seg(&m, &next)
            };
            let (v, t) = golden(f, lo * shrink, hi * shrink, self.budget.golden_iters);
            let now = f(T::zero());
            if v < now.min(base) - T::lit(1e-14) * now.max(T::one()) {
                w[k] = &cur_w + &s * t;
                improved = true;
            }
        }
        improved
    }
}

/// Rank at the relative cutoff `EXACT_RANK`. Merges and splits only act on
/// differences that are rank one or two to this level, so the residual left
/// in a rank-one step stays far below the chain's rank tolerance.
fn exact_rank<T: Real>(sv: &[T]) -> usize {
    let top = sv.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if top == T::zero() {
        return 0;
    }
    sv.iter().filter(|s| **s > top * T::lit(EXACT_RANK)).count()
}

/// Nelder-Mead on two variables from the simplex `start`; stops after
/// `iters` iterations or when the simplex collapses. Returns the best vertex.
fn nelder_mead<T: Real>(f: impl Fn(T, T) -> T, start: [(T, T); 3], iters: usize) -> (T, T, T) {
    let mut s: Vec<(T, T, T)> = start.iter().map(|&(a, b)| (f(a, b), a, b)).collect();
    let half = T::lit(0.5);
    for _ in 0..iters {
        s.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
        let (best, worst) = (s[0], s[2]);
        let size = (s[1].1 - best.1).abs().max((s[1].2 - best.2).abs()).max((worst.1 - best.1).abs()).max((worst.2 - best.2).abs());
        if size < T::lit(1e-13) {
            break;
        }
        let (ca, cb) = ((s[0].1 + s[1].1) * half, (s[0].2 + s[1].2) * half);
        let at = |k: T| (ca + (worst.1 - ca) * k, cb + (worst.2 - cb) * k);
        let (ra, rb) = at(-T::one());
        let fr = f(ra, rb);
        if fr < best.0 {
            let (ea, eb) = at(T::lit(-2.0));
            let fe = f(ea, eb);
            s[2] = if fe < fr { (fe, ea, eb) } else { (fr, ra, rb) };
        } else if fr < s[1].0 {
            s[2] = (fr, ra, rb);
        } else {
            let (ka, kb) = if fr < worst.0 { at(-half) } else { at(half) };
            let fk = f(ka, kb);
            if fk < worst.0.min(fr) {
                s[2] = (fk, ka, kb);
            } else {
                for v in s.iter_mut().skip(1) {
                    let (a, b) = (best.1 + (v.1 - best.1) * half, best.2 + (v.2 - best.2) * half);
                    *v = (f(a, b), a, b);
                }
            }
        }
    }
    s.into_iter().fold((T::infinity(), T::zero(), T::zero()), |acc, v| if v.0 < acc.0 { v } else { acc })
}

/// Golden-section search for a minimum on `[lo, hi]`; returns `(value, argument)`.
fn golden<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, iters: usize) -> (T, T) {
    let r = T::lit(INV_PHI);
    let mut x1 = hi - (hi - lo) * r;
    let mut x2 = lo + (hi - lo) * r;
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * r;
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * r;
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (f1, x1)
    } else {
        (f2, x2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> ChartPoint<f64> {
        ChartPoint::from_rows(2, 2, v).unwrap()
    }

    fn ball_k_from_origin(y: &[f64]) -> f64 {
        singular_values(&DMatrix::from_row_slice(2, 2, y)).iter().map(|s| ((1.0 + s) / (1.0 - s)).ln()).sum()
    }

    #[test]
    fn coincident_points() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let x = pt(&[0.1, 0.2, 0.3, 0.1]);
        let e = k_estimate(&b, &x, &x, &MetricBudget::default(), 0).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.chain.is_empty());
    }

    #[test]
    fn ball_from_origin_matches_singular_values() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let y = [0.3, -0.5, 0.2, 0.4];
        let e = k_estimate(&b, &pt(&[0.0; 4]), &pt(&y), &MetricBudget::default(), 1).unwrap();
        assert!((e.value - ball_k_from_origin(&y)).abs() < 1e-9, "{} vs {}", e.value, ball_k_from_origin(&y));
        assert!(e.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (v, t) = golden(|t: f64| (t - 0.3) * (t - 0.3) + 1.0, -1.0, 2.0, 80);
        assert!((t - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_rank_levels() {
        assert_eq!(exact_rank(&[1.0, 0.5, 1e-15]), 2);
        assert_eq!(exact_rank(&[1.0, 1e-14]), 1);
        assert_eq!(exact_rank(&[1.0, 0.5, 1e-11]), 3);
        assert_eq!(exact_rank(&[1.0, 0.5, 0.2]), 3);
    }
}
