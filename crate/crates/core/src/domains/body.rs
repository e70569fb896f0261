use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lingeom::linalg::{singular_values, unvec_rows, vec_rows};
use crate::lingeom::{ChartPoint, ChartShape, ProjectiveTransform};
use crate::scalar::Real;
use crate::tolerances::{EPS_SINGULAR, TANGENT_SCALE_FLOOR};

/// Number of halvings in the tangent-cone scan, `2^-SCAN_STEPS = TANGENT_SCALE_FLOOR`.
pub(crate) const SCAN_STEPS: i32 = 40;

/// How membership is decided.
#[derive(Debug, Clone)]
pub enum BodyKind<T: Real> {
    /// `I_p - X^T X` positive definite.
    OperatorBall,
    /// `X + X^T` positive definite (square charts only).
    HalfCone,
    /// `<N_i, X> < b_i` for every functional, with the Frobenius pairing.
    Polytope { normals: Vec<DMatrix<T>>, bounds: Vec<T> },
    /// `{ L x + c : x in inner }` where `L` acts on row-major vectorizations.
    AffineImage { inner: Box<ConvexBody<T>>, linear: DMatrix<T>, inverse: DMatrix<T>, offset: DMatrix<T> },
    /// The whole chart.
    FullChart,
    /// `base + union_{s > 0} (inner - base) / s`, decided by a geometric scan over `s`.
    TangentCone { inner: Box<ConvexBody<T>>, base: ChartPoint<T> },
}

/// An open convex subset of an affine chart, given by a membership oracle.
#[derive(Debug, Clone)]
pub struct ConvexBody<T: Real> {
    shape: ChartShape,
    kind: BodyKind<T>,
    label: String,
    interior: ChartPoint<T>,
    radius: Option<T>,
    apex: Option<ChartPoint<T>>,
}

impl<T: Real> ConvexBody<T> {
    /// Operator-norm unit ball of `q x p` matrices.
    pub fn operator_ball(q: usize, p: usize) -> Result<Self> {
        let shape = ChartShape::new(p, q)?;
        Ok(Self {
            shape,
            kind: BodyKind::OperatorBall,
            label: format!("operator_ball({q}x{p})"),
            interior: ChartPoint::zeros(shape),
            radius: Some(T::usize(p.min(q)).sqrt()),
            apex: None,
        })
    }

    /// `{ X : X + X^T > 0 }` in the `p x p` chart.
    pub fn half_cone(p: usize) -> Result<Self> {
        let shape = ChartShape::square(p)?;
        Ok(Self {
            shape,
            kind: BodyKind::HalfCone,
            label: format!("half_cone({p})"),
            interior: ChartPoint::identity(p)?,
            radius: None,
            apex: Some(ChartPoint::zeros(shape)),
        })
    }

    pub fn full_chart(q: usize, p: usize) -> Result<Self> {
        let shape = ChartShape::new(p, q)?;
        Ok(Self { shape, kind: BodyKind::FullChart, label: format!("full_chart({q}x{p})"), interior: ChartPoint::zeros(shape), radius: None, apex: None })
    }

    /// Intersection of open half-spaces `<N_i, X> < b_i`.
    ///
    /// `interior` defaults to the origin and must satisfy every inequality.
    /// `radius`, when known, is a Frobenius bound used to bracket line searches.
    pub fn polytope(shape: ChartShape, normals: Vec<DMatrix<T>>, bounds: Vec<T>, interior: Option<ChartPoint<T>>, radius: Option<T>) -> Result<Self> {
        if normals.is_empty() || normals.len() != bounds.len() {
            return Err(Error::InvalidInput("polytope needs one bound per normal".into()));
        }
        for n in &normals {
            if n.shape() != (shape.q, shape.p) {
                return Err(Error::ShapeMismatch { expected: shape.to_string(), found: format!("{}x{}", n.nrows(), n.ncols()) });
            }
        }
        let interior = interior.unwrap_or_else(|| ChartPoint::zeros(shape));
        interior.shape().check(&shape)?;
        let body = Self { shape, kind: BodyKind::Polytope { normals, bounds }, label: "polytope".into(), interior, radius, apex: None };
        if !body.contains(&body.interior) {
            return Err(Error::PointOutside("polytope interior point".into()));
        }
        Ok(body)
    }

    /// Image of `inner` under `x -> L x + c`, `L` acting on row-major vectorizations.
    pub fn affine_image(inner: ConvexBody<T>, linear: DMatrix<T>, offset: DMatrix<T>) -> Result<Self> {
        let shape = inner.shape;
        let n = shape.dim();
        if linear.shape() != (n, n) || offset.shape() != (shape.q, shape.p) {
            return Err(Error::ShapeMismatch { expected: format!("{n}x{n} map with {shape} offset"), found: format!("{}x{}", linear.nrows(), linear.ncols()) });
        }
        let inverse = linear.clone().try_inverse().ok_or(Error::Singular)?;
        let map =
            |x: &ChartPoint<T>| -> ChartPoint<T> { ChartPoint::from_parts(shape, unvec_rows(&(&linear * vec_rows(x.matrix())), shape.q, shape.p) + &offset) };
        let interior = map(&inner.interior);
        let apex = inner.apex.as_ref().map(map);
        let radius = inner.radius.map(|r| singular_values(&linear)[0] * r + offset.norm());
        let label = format!("affine({})", inner.label);
        Ok(Self { shape, kind: BodyKind::AffineImage { inner: Box::new(inner), linear, inverse, offset }, label, interior, radius, apex })
    }

    /// Image under the chart map `X -> A X B + C` (`A` is `q x q`, `B` is `p x p`).
    pub fn chart_affine_image(inner: ConvexBody<T>, a: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>) -> Result<Self> {
        let shape = inner.shape;
        if a.shape() != (shape.q, shape.q) || b.shape() != (shape.p, shape.p) {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0} and {1}x{1}", shape.q, shape.p),
                found: format!("{}x{} and {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
            });
        }
        Self::affine_image(inner, a.kronecker(&b.transpose()), c.clone())
    }

    /// Image under a chart-preserving projective map (`b` block zero):
    /// `X -> (c + d X) a^-1`.
    pub fn projective_image(inner: ConvexBody<T>, g: &ProjectiveTransform<T>) -> Result<Self> {
        if g.b().norm() > T::lit(EPS_SINGULAR) * g.matrix().norm() {
            return Err(Error::InvalidInput("only chart-preserving (b = 0) maps give affine images".into()));
        }
        let a_inv = g.a().try_inverse().ok_or(Error::Singular)?;
        let c = g.c() * &a_inv;
        Self::chart_affine_image(inner, &g.d(), &a_inv, &c)
    }

    /// `center + factor * (inner - center)`.
    pub fn dilate(inner: ConvexBody<T>, center: &ChartPoint<T>, factor: T) -> Result<Self> {
        let n = inner.shape.dim();
        let offset = center.matrix() * (T::one() - factor);
        Self::affine_image(inner, DMatrix::identity(n, n) * factor, offset)
    }

    /// Tangent cone at `base`, which is assumed to be a certified boundary point.
    pub(crate) fn tangent_cone_unchecked(inner: ConvexBody<T>, base: ChartPoint<T>) -> Self {
        let label = format!("tangent_cone({})", inner.label);
        Self {
            shape: inner.shape,
            interior: inner.interior.clone(),
            radius: None,
            apex: Some(base.clone()),
            label,
            kind: BodyKind::TangentCone { inner: Box::new(inner), base },
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Replace the stored interior reference point.
    pub fn with_interior(mut self, x: ChartPoint<T>) -> Result<Self> {
        if !self.contains(&x) {
            return Err(Error::PointOutside("interior reference point".into()));
        }
        self.interior = x;
        Ok(self)
    }

    pub fn shape(&self) -> ChartShape {
        self.shape
    }

    pub fn kind(&self) -> &BodyKind<T> {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interior(&self) -> &ChartPoint<T> {
        &self.interior
    }

    /// Frobenius radius of an origin-centred ball containing the body, if bounded.
    pub fn radius(&self) -> Option<T> {
        self.radius
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_some()
    }

    pub fn is_cone(&self) -> bool {
        self.apex.is_some()
    }

    pub fn apex(&self) -> Option<&ChartPoint<T>> {
        self.apex.as_ref()
    }

    pub fn contains(&self, x: &ChartPoint<T>) -> bool {
        x.shape() == self.shape && self.contains_matrix(x.matrix())
    }

    /// Membership for a raw `q x p` matrix.
    pub fn contains_matrix(&self, x: &DMatrix<T>) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            BodyKind::OperatorBall => {
                let m = DMatrix::identity(self.shape.p, self.shape.p) - x.transpose() * x;
                m.cholesky().is_some()
            }
            BodyKind::HalfCone => (x + x.transpose()).cholesky().is_some(),
            BodyKind::Polytope { normals, bounds } => normals.iter().zip(bounds).all(|(n, b)| n.dot(x) < *b),
            BodyKind::AffineImage { inner, inverse, offset, .. } => {
                let y = unvec_rows(&(inverse * vec_rows(&(x - offset))), self.shape.q, self.shape.p);
                inner.contains_matrix(&y)
            }
            BodyKind::FullChart => true,
            BodyKind::TangentCone { .. } => self.tangent_scan(x).is_some(),
        }
    }

    /// For tangent cones: the first `k` with `base + 2^-k (x - base)` in the
    /// inner body, scanning `k = 0, 1, ..., 40`. `None` for other kinds or
    /// when no scale works.
    pub fn tangent_scan(&self, x: &DMatrix<T>) -> Option<i32> {
        let BodyKind::TangentCone { inner, base } = &self.kind else {
            return None;
        };
        let v = x - base.matrix();
        let half = T::lit(0.5);
        let mut s = T::one();
        for k in 0..=SCAN_STEPS {
            if inner.contains_matrix(&(base.matrix() + &v * s)) {
                return Some(k);
            }
            s *= half;
        }
        debug_assert!(s * T::lit(2.0) == T::lit(TANGENT_SCALE_FLOOR));
        None
    }
}
