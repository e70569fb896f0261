//! Search for full rank-one lines inside a body.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::hits::exit_parameter;
use super::sample::{gaussian_vector, hit_and_run, random_rank_one};
use crate::lingeom::linalg::{column_basis, null_space, unvec_rows, vec_rows};
use crate::lingeom::{ChartPoint, RankOneDirection};
use crate::scalar::Real;
use crate::tolerances::T_BIG;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchBudget {
    /// Base points: the interior reference point plus hit-and-run samples.
    pub base_points: usize,
    pub random_directions: usize,
    /// Boundary points at which an outward normal is estimated.
    pub normals: usize,
    pub projection_starts: usize,
    pub projection_iters: usize,
    /// A line counts as inside when sampled points with `|t| <= t_big` are.
    pub t_big: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { base_points: 6, random_directions: 200, normals: 24, projection_starts: 12, projection_iters: 200, t_big: T_BIG }
    }
}

impl SearchBudget {
    /// Multiply every count by `factor` (at least one of each).
    pub fn scaled(self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Self {
            base_points: s(self.base_points),
            random_directions: s(self.random_directions),
            normals: s(self.normals),
            projection_starts: s(self.projection_starts),
            projection_iters: self.projection_iters,
            t_big: self.t_big,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RProperStatus {
    NoViolationFound,
    ViolationWitness,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub directions_tested: usize,
    pub base_points: usize,
    pub normals: usize,
    /// Dimension of the estimated lineality space.
    pub lineality_dim: usize,
}

#[derive(Debug, Clone)]
pub struct RProperVerdict<T: Real> {
    pub status: RProperStatus,
    pub witness: Option<(ChartPoint<T>, RankOneDirection<T>)>,
    pub budget: SearchBudget,
    pub stats: SearchStats,
}

impl<T: Real> RProperVerdict<T> {
    pub fn is_violation(&self) -> bool {
        self.status == RProperStatus::ViolationWitness
    }
}

/// Whether `x + t s` is in the body for `t = 0` and for a geometric grid of
/// `|t|` from `1e-3` up to `t_big`, both signs.
pub fn line_inside<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, s: &RankOneDirection<T>, t_big: f64) -> bool {
    if !body.contains(x) {
        return false;
    }
    let d = s.matrix();
    let steps = 24;
    let ratio = (t_big / 1e-3).powf(1.0 / steps as f64);
    let mut t = t_big;
    for _ in 0..=steps {
        for sign in [1.0, -1.0] {
            if !body.contains_matrix(&(x.matrix() + &d * T::lit(sign * t))) {
                return false;
            }
        }
        t /= ratio;
    }
    true
}

/// Randomized and structured search for a full rank-one line in the body.
///
/// Candidates are elementary directions, singular-vector products of the
/// reference geometry, random rank-one directions, and rank-one matrices in
/// the estimated lineality space (the common null space of outward normals,
/// located by alternating projections). Every candidate is checked with
/// [`line_inside`]; `NoViolationFound` is a sampling certificate only.
pub fn is_r_proper<T: Real>(body: &ConvexBody<T>, budget: &SearchBudget, seed: u64) -> RProperVerdict<T> {
    let shape = body.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SearchStats::default();
    let c = body.interior().clone();
    let cap = T::lit(2.0) * (T::one() + c.norm());

    let mut bases = vec![c.clone()];
    if budget.base_points > 1 {
        bases.extend(hit_and_run(body, &c, budget.base_points - 1, cap, &mut rng));
    }
    stats.base_points = bases.len();

    let mut candidates: Vec<RankOneDirection<T>> = Vec::new();
    for i in 0..shape.q {
        for j in 0..shape.p {
            candidates.push(RankOneDirection::elementary(shape, i, j).expect("index in range"));
        }
    }
    if let Some(apex) = body.apex() {
        candidates.extend(singular_products(&(c.matrix() - apex.matrix())));
    }
    candidates.extend(singular_products(c.matrix()));
    for _ in 0..budget.random_directions {
        candidates.push(random_rank_one(shape, &mut rng));
    }

    let found = |cands: &[RankOneDirection<T>], stats: &mut SearchStats| {
        for s in cands {
            stats.directions_tested += 1;
            for x in &bases {
                if line_inside(body, x, s, budget.t_big) {
                    return Some((x.clone(), s.clone()));
                }
            }
        }
        None
    };

    let mut witness = found(&candidates, &mut stats);
    if witness.is_none() {
        let normals = boundary_normals(body, &bases, budget.normals, cap, &mut rng);
        stats.normals = normals.len();
        let lineality = lineality_basis(&normals, shape.dim());
        stats.lineality_dim = lineality.ncols();
        let mut structured = Vec::new();
        for n in &normals {
            structured.extend(singular_products(n).into_iter().filter(|s| s.matrix().dot(n).abs() < T::lit(1e-9)));
        }
        if lineality.ncols() > 0 {
            for _ in 0..budget.projection_starts {
                if let Some(s) = rank_one_in_subspace(&lineality, shape.q, shape.p, budget.projection_iters, &mut rng) {
                    structured.push(s);
                }
            }
        }
        witness = found(&structured, &mut stats);
    }

    RProperVerdict {
        status: if witness.is_some() { RProperStatus::ViolationWitness } else { RProperStatus::NoViolationFound },
        witness,
        budget: *budget,
        stats,
    }
}

/// All products `u_i v_j^T` of left and right singular vectors.
pub(crate) fn singular_products<T: Real>(m: &DMatrix<T>) -> Vec<RankOneDirection<T>> {
    if m.norm() == T::zero() {
        return Vec::new();
    }
    let (q, p) = m.shape();
    let svd = crate::lingeom::linalg::svd(m);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    // Complete the bases so that every coordinate direction appears.
    let full_u = complete_basis(&u, q);
    let full_v = complete_basis(&vt.transpose(), p);
    let mut out = Vec::new();
    for i in 0..full_u.ncols() {
        for j in 0..full_v.ncols() {
            if let Ok(d) = RankOneDirection::new(full_u.column(i).into_owned(), full_v.column(j).into_owned()) {
                out.push(d);
            }
        }
    }
    out
}

fn complete_basis<T: Real>(b: &DMatrix<T>, n: usize) -> DMatrix<T> {
    let basis = column_basis(b, 1e-12);
    if basis.ncols() == n {
        return basis;
    }
    let comp = null_space(&basis.transpose(), 1e-12);
    let mut out = DMatrix::zeros(n, basis.ncols() + comp.ncols());
    out.view_mut((0, 0), (n, basis.ncols())).copy_from(&basis);
    out.view_mut((0, basis.ncols()), (n, comp.ncols())).copy_from(&comp);
    out
}

/// Outward unit normals at boundary points reached along random chords from
/// the base points, by central differences of the gauge about the interior
/// reference point.
pub(crate) fn boundary_normals<T: Real, R: rand::Rng + ?Sized>(
    body: &ConvexBody<T>,
    bases: &[ChartPoint<T>],
    count: usize,
    cap: T,
    rng: &mut R,
) -> Vec<DMatrix<T>> {
    let shape = body.shape();
    let c = body.interior().matrix();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 4 * count {
        attempts += 1;
        let x = bases[attempts % bases.len()].matrix();
        let d = super::sample::random_unit_matrix::<T, _>(shape, rng);
        let t = exit_parameter(body, x, &d, T::one());
        if !t.is_finite() || t > T::lit(100.0) * cap {
            continue;
        }
        let b = x + &d * t;
        if let Some(n) = gauge_normal(body, c, &b) {
            out.push(n);
        }
    }
    out
}

/// Normalized gradient of the gauge of `body` about `c`, evaluated at `b`.
pub(crate) fn gauge_normal<T: Real>(body: &ConvexBody<T>, c: &DMatrix<T>, b: &DMatrix<T>) -> Option<DMatrix<T>> {
    let (q, p) = b.shape();
    let gauge = |y: &DMatrix<T>| -> Option<T> {
        let d = y - c;
        let dn = d.norm();
        if dn == T::zero() {
            return None;
        }
        let t = exit_parameter(body, c, &d, dn);
        Some(if t.is_finite() { T::one() / t } else { T::zero() })
    };
    let h = T::lit(1e-4) * (T::one() + (b - c).norm());
    let mut g = DMatrix::zeros(q, p);
    for i in 0..q {
        for j in 0..p {
            let mut e = DMatrix::zeros(q, p);
            e[(i, j)] = h;
            let up = gauge(&(b + &e))?;
            let down = gauge(&(b - &e))?;
            g[(i, j)] = (up - down) / (h + h);
        }
    }
    let n = g.norm();
    (n > T::zero() && n.is_finite()).then(|| g / n)
}

/// Orthonormal basis (columns, row-major vectorized) of the approximate
/// common null space of the normals.
pub(crate) fn lineality_basis<T: Real>(normals: &[DMatrix<T>], dim: usize) -> DMatrix<T> {
    if normals.is_empty() {
        return DMatrix::identity(dim, dim);
    }
    let mut stacked = DMatrix::zeros(normals.len(), dim);
    for (k, n) in normals.iter().enumerate() {
        stacked.row_mut(k).copy_from(&vec_rows(n).transpose());
    }
    null_space(&stacked, 1e-2)
}

/// Alternating projections between the subspace and the rank-one matrices.
pub(crate) fn rank_one_in_subspace<T: Real, R: rand::Rng + ?Sized>(
    basis: &DMatrix<T>,
    q: usize,
    p: usize,
    iters: usize,
    rng: &mut R,
) -> Option<RankOneDirection<T>> {
    let coeffs = gaussian_vector::<T, _>(basis.ncols(), rng);
    let mut v = basis * coeffs;
    let mut best: Option<(T, DMatrix<T>)> = None;
    for _ in 0..iters {
        let m = unvec_rows(&v, q, p);
        let svd = crate::lingeom::linalg::svd(&m);
        let (u, vt) = (svd.u?, svd.v_t?);
        let k = svd.singular_values.imax();
        let r1 = u.column(k) * vt.row(k);
        let rv = vec_rows(&r1);
        let proj = basis * (basis.transpose() * &rv);
        let resid = (&rv - &proj).norm();
        if best.as_ref().is_none_or(|(b, _)| resid < *b) {
            best = Some((resid, r1.clone()));
        }
        let n = proj.norm();
        if n == T::zero() {
            return None;
        }
        v = proj / n;
    }
    let (resid, r1) = best?;
    (resid < T::lit(1e-6)).then(|| RankOneDirection::from_matrix(&r1).ok()).flatten()
}
