//! JSON descriptors for domains.

use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::tangent::tangent_cone;
use crate::error::{Error, Result};
use crate::lingeom::serial::{matrix_from_rows, point_from_rows};
use crate::lingeom::ChartShape;
use crate::scalar::Real;

/// Matrix in row-major array-of-arrays form.
pub type Rows = Vec<Vec<f64>>;

/// `<normal, X> < bound` with the Frobenius pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Functional {
    pub normal: Rows,
    pub bound: f64,
}

/// Serialized domain; `p` and `q` give the chart shape (`q x p` matrices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainDescriptor {
    OperatorBall {
        p: usize,
        q: usize,
    },
    HalfCone {
        p: usize,
        q: usize,
    },
    Polytope {
        p: usize,
        q: usize,
        functionals: Vec<Functional>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interior: Option<Rows>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    /// `x -> matrix * vec(x) + offset`, `vec` row-major.
    AffineImage {
        p: usize,
        q: usize,
        inner: Box<DomainDescriptor>,
        matrix: Rows,
        offset: Rows,
    },
    FullChart {
        p: usize,
        q: usize,
    },
    TangentCone {
        p: usize,
        q: usize,
        inner: Box<DomainDescriptor>,
        point: Rows,
    },
}

impl DomainDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn shape(&self) -> Result<ChartShape> {
        let (p, q) = match self {
            Self::OperatorBall { p, q }
            | Self::HalfCone { p, q }
            | Self::Polytope { p, q, .. }
            | Self::AffineImage { p, q, .. }
            | Self::FullChart { p, q }
            | Self::TangentCone { p, q, .. } => (*p, *q),
        };
        ChartShape::new(p, q).map_err(|e| Error::Descriptor(e.to_string()))
    }

    /// Builds the body. Structural problems are reported as `Descriptor`
    /// errors; a tangent-cone point off the boundary keeps its `NotBoundary`.
    pub fn build<T: Real>(&self) -> Result<ConvexBody<T>> {
        let shape = self.shape()?;
        let descr = |e: Error| match e {
            Error::NotBoundary { .. } => e,
            other => Error::Descriptor(other.to_string()),
        };
        let check_shape = |rows: &Rows, what: &str| -> Result<()> {
            if rows.len() != shape.q || rows.iter().any(|r| r.len() != shape.p) {
                return Err(Error::Descriptor(format!("{what} must be {}x{}", shape.q, shape.p)));
            }
            Ok(())
        };
        let inner_shape = |inner: &DomainDescriptor| -> Result<()> {
            if inner.shape()? != shape {
                return Err(Error::Descriptor("inner descriptor has a different shape".into()));
            }
            Ok(())
        };
        match self {
            Self::OperatorBall { .. } => ConvexBody::operator_ball(shape.q, shape.p).map_err(descr),
            Self::HalfCone { .. } => {
                if !shape.is_square() {
                    return Err(Error::Descriptor("half_cone needs p = q".into()));
                }
                ConvexBody::half_cone(shape.p).map_err(descr)
            }
            Self::FullChart { .. } => ConvexBody::full_chart(shape.q, shape.p).map_err(descr),
            Self::Polytope { functionals, interior, radius, .. } => {
                let mut normals = Vec::new();
                let mut bounds = Vec::new();
                for f in functionals {
                    check_shape(&f.normal, "functional normal")?;
                    normals.push(matrix_from_rows(&f.normal)?);
                    if !f.bound.is_finite() {
                        return Err(Error::Descriptor("functional bound must be finite".into()));
                    }
                    bounds.push(T::lit(f.bound));
                }
                let interior = match interior {
                    Some(rows) => {
                        check_shape(rows, "polytope interior")?;
                        Some(point_from_rows(rows)?)
                    }
                    None => None,
                };
                if radius.is_some_and(|r| !(r > 0.0 && r.is_finite())) {
                    return Err(Error::Descriptor("polytope radius must be positive".into()));
                }
                ConvexBody::polytope(shape, normals, bounds, interior, radius.map(T::lit)).map_err(descr)
            }
            Self::AffineImage { inner, matrix, offset, .. } => {
                inner_shape(inner)?;
                check_shape(offset, "affine offset")?;
                let n = shape.dim();
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(Error::Descriptor(format!("affine matrix must be {n}x{n}")));
                }
                ConvexBody::affine_image(inner.build()?, matrix_from_rows(matrix)?, matrix_from_rows(offset)?).map_err(descr)
            }
            Self::TangentCone { inner, point, .. } => {
                inner_shape(inner)?;
                check_shape(point, "tangent-cone point")?;
                tangent_cone(&inner.build::<T>()?, &point_from_rows(point)?).map_err(descr)
            }
        }
    }
}
