use serde::{Deserialize, Serialize};

use crate::domains::{
    adjacent_partner, certify_boundary, extreme_point_test, is_r_proper, tangent_cone, BodyKind, ConvexBody, ExtremeBudget, ExtremeVerdict, RProperStatus,
    SearchBudget, SearchStats,
};
use crate::error::Result;
use crate::lingeom::serial::matrix_to_rows;
use crate::lingeom::ChartPoint;
use crate::symmetry::boost_degenerate_limit_at;
use crate::tolerances::{EPS_BOUNDARY, EPS_MEMBER};

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtremeSuiteBudget {
    pub extreme: ExtremeBudget,
    pub search: SearchBudget,
    /// Boost parameters for the degenerate-limit check on the ball.
    pub boost_parameters: Vec<f64>,
}

impl Default for ExtremeSuiteBudget {
    fn default() -> Self {
        Self { extreme: ExtremeBudget::default(), search: SearchBudget::default(), boost_parameters: (1..=12).map(f64::from).collect() }
    }
}

impl ExtremeSuiteBudget {
    pub fn scaled(self, factor: f64) -> Self {
        Self { extreme: self.extreme.scaled(factor), search: self.search.scaled(factor), ..self }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdjacencyResult {
    /// No distinct adjacent boundary point was found.
    pub extreme: bool,
    pub partner: Option<Rows>,
    pub budget: ExtremeBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZResult {
    /// No point of the body on `det(X - e) = 0` was found.
    pub extreme: bool,
    pub witness: Option<Rows>,
    pub witness_det: Option<f64>,
    pub min_abs_det: Option<f64>,
    pub budget: ExtremeBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentConeResult {
    /// No rank-one line was found in the tangent cone.
    pub extreme: bool,
    pub status: RProperStatus,
    pub witness_point: Option<Rows>,
    pub witness_direction: Option<Rows>,
    pub stats: SearchStats,
    pub budget: SearchBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitResult {
    pub rank: usize,
    pub gap: f64,
    /// Angle between the image of the limit and the Plücker point of `e`.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremeSuiteRow {
    pub point: Rows,
    pub test1_adjacency: AdjacencyResult,
    pub test2_ze: ZResult,
    pub test3_tc_proper: TangentConeResult,
    pub test4_degenerate_limit: Option<LimitResult>,
    /// Tests 1 to 3 agree.
    pub consistent: bool,
    pub seed: u64,
}

impl ExtremeSuiteRow {
    pub fn csv_header() -> &'static str {
        "point,adjacency_extreme,ze_extreme,tc_proper,limit_rank,limit_residual,consistent\n"
    }

    pub fn to_csv_row(&self) -> String {
        let point =
            self.point.iter().map(|r| r.iter().map(|x| crate::lingeom::serial::format_sig17(*x)).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(";");
        let lim = self.test4_degenerate_limit.as_ref();
        format!(
            "{},{},{},{},{},{},{}\n",
            point,
            self.test1_adjacency.extreme as u8,
            self.test2_ze.extreme as u8,
            self.test3_tc_proper.extreme as u8,
            lim.map(|l| l.rank.to_string()).unwrap_or_default(),
            lim.and_then(|l| l.residual).map(crate::lingeom::serial::format_sig17).unwrap_or_default(),
            self.consistent as u8
        )
    }
}

fn is_orthogonal_ball_point(body: &ConvexBody<f64>, e: &ChartPoint<f64>) -> bool {
    let shape = body.shape();
    if !shape.is_square() || !matches!(body.kind(), BodyKind::OperatorBall) {
        return false;
    }
    let m = e.matrix();
    (m.transpose() * m - nalgebra::DMatrix::identity(shape.p, shape.p)).norm() <= EPS_MEMBER
}

/// Runs the three extreme-point characterizations (adjacency, the `Z_e`
/// test, properness of the tangent cone) at each boundary point, plus the
/// boost limit at orthogonal points of the operator-norm ball.
pub fn extreme_equivalence_suite(body: &ConvexBody<f64>, points: &[ChartPoint<f64>], budget: &ExtremeSuiteBudget, seed: u64) -> Result<Vec<ExtremeSuiteRow>> {
    let mut rows = Vec::with_capacity(points.len());
    for (k, raw) in points.iter().enumerate() {
        let s = seed.wrapping_add(k as u64);
        let e = certify_boundary(body, raw, EPS_BOUNDARY)?;
        let partner = adjacent_partner(body, &e, &budget.extreme, s)?;
        let test1 = AdjacencyResult { extreme: partner.is_none(), partner: partner.map(|x| matrix_to_rows(x.matrix())), budget: budget.extreme };
        let test2 = match extreme_point_test(body, &e, &budget.extreme, s)? {
            ExtremeVerdict::ExtremeEvidence { min_abs_det, .. } => {
                ZResult { extreme: true, witness: None, witness_det: None, min_abs_det: Some(min_abs_det), budget: budget.extreme }
            }
            ExtremeVerdict::NonExtremeWitness { point, det } => {
                ZResult { extreme: false, witness: Some(matrix_to_rows(point.matrix())), witness_det: Some(det), min_abs_det: None, budget: budget.extreme }
            }
        };
        let cone = tangent_cone(body, &e)?;
        let v = is_r_proper(&cone, &budget.search, s);
        let test3 = TangentConeResult {
            extreme: !v.is_violation(),
            status: v.status,
            witness_point: v.witness.as_ref().map(|(x, _)| matrix_to_rows(x.matrix())),
            witness_direction: v.witness.as_ref().map(|(_, d)| matrix_to_rows(&d.matrix())),
            stats: v.stats,
            budget: v.budget,
        };
        let test4 = if is_orthogonal_ball_point(body, &e) {
            let lim = boost_degenerate_limit_at(&e, &budget.boost_parameters)?;
            Some(LimitResult { rank: lim.rank, gap: lim.gap, residual: lim.image_angle })
        } else {
            None
        };
        let consistent = test1.extreme == test2.extreme && test2.extreme == test3.extreme;
        rows.push(ExtremeSuiteRow {
            point: matrix_to_rows(e.matrix()),
            test1_adjacency: test1,
            test2_ze: test2,
            test3_tc_proper: test3,
            test4_degenerate_limit: test4,
            consistent,
            seed: s,
        });
    }
    Ok(rows)
}
