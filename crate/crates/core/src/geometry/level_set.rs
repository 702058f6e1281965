use crate::error::{invalid, Result};
use crate::scalar::{Real, Vec2};

/// Implicit description of a domain: negative inside, positive outside.
pub trait LevelSet<T: Real> {
    fn eval(&self, x: Vec2<T>) -> T;
}

impl<T: Real, F: Fn(Vec2<T>) -> T> LevelSet<T> for F {
    fn eval(&self, x: Vec2<T>) -> T {
        self(x)
    }
}

/// Supported physical domains.
///
/// `Circle` and `AxisBox` evaluate to the signed Euclidean distance to the
/// boundary. `Affine` describes the image `{A x + b : x in inner}`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSetDomain<T> {
    Circle {
        center: Vec2<T>,
        radius: T,
    },
    AxisBox {
        min: Vec2<T>,
        max: Vec2<T>,
    },
    Affine {
        inner: Box<LevelSetDomain<T>>,
        matrix: [[T; 2]; 2],
        offset: Vec2<T>,
        inverse: [[T; 2]; 2],
    },
}

impl<T: Real> LevelSetDomain<T> {
    pub fn circle(center: Vec2<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return invalid(format!("circle radius must be positive, got {radius}"));
        }
        Ok(Self::Circle { center, radius })
    }

    pub fn axis_box(min: Vec2<T>, max: Vec2<T>) -> Result<Self> {
        if !(max[0] > min[0] && max[1] > min[1]) {
            return invalid(format!(
                "box corners {min:?} / {max:?} do not span a rectangle"
            ));
        }
        Ok(Self::AxisBox { min, max })
    }

    pub fn affine(inner: Self, matrix: [[T; 2]; 2], offset: Vec2<T>) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det == T::zero() || !det.is_finite() {
            return invalid("affine map is singular");
        }
        let inverse = [
            [matrix[1][1] / det, -matrix[0][1] / det],
            [-matrix[1][0] / det, matrix[0][0] / det],
        ];
        Ok(Self::Affine {
            inner: Box::new(inner),
            matrix,
            offset,
            inverse,
        })
    }

    /// Exact area of the domain.
    pub fn area(&self) -> T {
        match self {
            Self::Circle { radius, .. } => T::PI() * *radius * *radius,
            Self::AxisBox { min, max } => (max[0] - min[0]) * (max[1] - min[1]),
            Self::Affine { inner, matrix, .. } => {
                inner.area() * (matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]).abs()
            }
        }
    }

    /// Exact boundary length, where it has a closed form.
    pub fn perimeter(&self) -> Option<T> {
        match self {
            Self::Circle { radius, .. } => Some(T::lit(2.0) * T::PI() * *radius),
            Self::AxisBox { min, max } => {
                Some(T::lit(2.0) * ((max[0] - min[0]) + (max[1] - min[1])))
            }
            Self::Affine { .. } => None,
        }
    }
}

impl<T: Real> LevelSet<T> for LevelSetDomain<T> {
    fn eval(&self, x: Vec2<T>) -> T {
        match self {
            Self::Circle { center, radius } => (x[0] - center[0]).hypot(x[1] - center[1]) - *radius,
            Self::AxisBox { min, max } => {
                let half = T::lit(0.5);
                let qx = (x[0] - (min[0] + max[0]) * half).abs() - (max[0] - min[0]) * half;
                let qy = (x[1] - (min[1] + max[1]) * half).abs() - (max[1] - min[1]) * half;
                let outside = qx.max(T::zero()).hypot(qy.max(T::zero()));
                outside + qx.max(qy).min(T::zero())
            }
            Self::Affine {
                inner,
                offset,
                inverse,
                ..
            } => {
                let y = [x[0] - offset[0], x[1] - offset[1]];
                inner.eval([
                    inverse[0][0] * y[0] + inverse[0][1] * y[1],
                    inverse[1][0] * y[0] + inverse[1][1] * y[1],
                ])
            }
        }
    }
}
