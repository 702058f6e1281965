//! Per-element classification and clipping against the linear interpolant of
//! the level set.

use crate::error::{invalid, Result};
use crate::scalar::{lerp, norm, signed_area2, sub, Real, Vec2};

use super::level_set::LevelSet;

/// Relative distance below which a vertex counts as lying on the boundary.
pub const SNAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Inside,
    Outside,
    Cut,
}

/// Sign of the level set at a vertex after snapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexSign {
    Negative,
    OnBoundary,
    Positive,
}

impl VertexSign {
    pub fn of<T: Real>(value: T, tol: T) -> Self {
        if value.abs() <= tol {
            Self::OnBoundary
        } else if value < T::zero() {
            Self::Negative
        } else {
            Self::Positive
        }
    }
}

/// A piece of the linearized boundary inside one element.
///
/// The physical domain lies to the left of `a -> b`; `normal` is the unit
/// outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment<T> {
    pub a: Vec2<T>,
    pub b: Vec2<T>,
    pub normal: Vec2<T>,
}

impl<T: Real> BoundarySegment<T> {
    pub fn length(&self) -> T {
        norm(sub(self.b, self.a))
    }

    pub fn midpoint(&self) -> Vec2<T> {
        lerp(self.a, self.b, T::lit(0.5))
    }

    /// Segment along a mesh edge traversed with the element interior on the left.
    pub(crate) fn along_edge(a: Vec2<T>, b: Vec2<T>) -> Self {
        let d = sub(b, a);
        let len = norm(d);
        Self {
            a,
            b,
            normal: [d[1] / len, -d[0] / len],
        }
    }
}

/// The part of one element inside the domain, as sub-triangles, together with
/// the boundary pieces crossing it.
#[derive(Debug, Clone, PartialEq)]
pub struct CutDecomposition<T> {
    pub classification: Classification,
    pub inside_subtriangles: Vec<[Vec2<T>; 3]>,
    pub boundary_segments: Vec<BoundarySegment<T>>,
}

impl<T: Real> CutDecomposition<T> {
    pub fn outside() -> Self {
        Self {
            classification: Classification::Outside,
            inside_subtriangles: Vec::new(),
            boundary_segments: Vec::new(),
        }
    }

    pub fn inside(triangle: [Vec2<T>; 3]) -> Self {
        Self {
            classification: Classification::Inside,
            inside_subtriangles: vec![triangle],
            boundary_segments: Vec::new(),
        }
    }

    pub fn inside_area(&self) -> T {
        self.inside_subtriangles
            .iter()
            .map(|t| signed_area2(t[0], t[1], t[2]) * T::lit(0.5))
            .sum()
    }

    pub fn boundary_length(&self) -> T {
        self.boundary_segments.iter().map(|s| s.length()).sum()
    }
}

pub(crate) fn diameter<T: Real>(tri: &[Vec2<T>; 3]) -> T {
    norm(sub(tri[1], tri[0]))
        .max(norm(sub(tri[2], tri[1])))
        .max(norm(sub(tri[0], tri[2])))
}

pub(crate) fn classify_signs(signs: [VertexSign; 3]) -> Classification {
    let neg = signs.contains(&VertexSign::Negative);
    let pos = signs.contains(&VertexSign::Positive);
    match (neg, pos) {
        (true, true) => Classification::Cut,
        (true, false) => Classification::Inside,
        (false, _) => Classification::Outside,
    }
}

/// Element with every vertex on the boundary: decided by the sign at its
/// centroid.
pub(crate) fn refine_flat<T: Real>(
    class: Classification,
    signs: [VertexSign; 3],
    triangle: &[Vec2<T>; 3],
    phi: &impl LevelSet<T>,
) -> Classification {
    if signs.iter().any(|&s| s != VertexSign::OnBoundary) {
        return class;
    }
    let third = T::one() / T::lit(3.0);
    let c = [
        (triangle[0][0] + triangle[1][0] + triangle[2][0]) * third,
        (triangle[0][1] + triangle[1][1] + triangle[2][1]) * third,
    ];
    if phi.eval(c) < T::zero() {
        Classification::Inside
    } else {
        Classification::Outside
    }
}

fn vertex_values<T: Real>(triangle: &[Vec2<T>; 3], phi: &impl LevelSet<T>) -> [T; 3] {
    [
        phi.eval(triangle[0]),
        phi.eval(triangle[1]),
        phi.eval(triangle[2]),
    ]
}

/// Classifies an element against the domain.
///
/// Vertices within `1e-12 * diam(T)` of the boundary count as on the boundary:
/// an element whose remaining vertices are inside is `Inside` (its edge lies
/// on the boundary), an element without any strictly interior vertex is
/// `Outside`, and mixed signs give `Cut`. An element with all vertices on the
/// boundary is `Inside` when `phi` is negative at its centroid.
pub fn classify_element<T: Real>(triangle: [Vec2<T>; 3], phi: &impl LevelSet<T>) -> Classification {
    let tol = T::lit(SNAP_TOLERANCE) * diameter(&triangle);
    let values = vertex_values(&triangle, phi);
    let signs = values.map(|v| VertexSign::of(v, tol));
    refine_flat(classify_signs(signs), signs, &triangle, phi)
}

/// Clips a cut element against the zero set of the linear interpolant of `phi`.
pub fn cut_element<T: Real>(
    triangle: [Vec2<T>; 3],
    phi: &impl LevelSet<T>,
) -> Result<CutDecomposition<T>> {
    let tol = T::lit(SNAP_TOLERANCE) * diameter(&triangle);
    let values = vertex_values(&triangle, phi);
    let signs = values.map(|v| VertexSign::of(v, tol));
    if classify_signs(signs) != Classification::Cut {
        return invalid("cut_element called on an element the boundary does not cross");
    }
    Ok(cut_with_values(triangle, snap(values, tol)))
}

/// Moves on-boundary vertex values to `+tol` so every vertex has a strict sign.
pub(crate) fn snap<T: Real>(values: [T; 3], tol: T) -> [T; 3] {
    values.map(|v| if v.abs() <= tol { tol } else { v })
}

/// Clipping for strictly signed vertex values with at least one sign change.
pub(crate) fn cut_with_values<T: Real>(tri: [Vec2<T>; 3], values: [T; 3]) -> CutDecomposition<T> {
    let mut polygon: Vec<Vec2<T>> = Vec::with_capacity(4);
    let mut crossings: Vec<Vec2<T>> = Vec::with_capacity(2);
    for i in 0..3 {
        let j = (i + 1) % 3;
        if values[i] < T::zero() {
            polygon.push(tri[i]);
        }
        if (values[i] < T::zero()) != (values[j] < T::zero()) {
            let t = values[i] / (values[i] - values[j]);
            let x = lerp(tri[i], tri[j], t);
            polygon.push(x);
            crossings.push(x);
        }
    }
    debug_assert_eq!(crossings.len(), 2);

    let inside_subtriangles = (1..polygon.len() - 1)
        .map(|k| [polygon[0], polygon[k], polygon[k + 1]])
        .collect();

    // gradient of the linear interpolant points out of the domain
    let two_area = signed_area2(tri[0], tri[1], tri[2]);
    let mut grad = [T::zero(), T::zero()];
    for i in 0..3 {
        let (p, q) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
        grad[0] += values[i] * (p[1] - q[1]) / two_area;
        grad[1] += values[i] * (q[0] - p[0]) / two_area;
    }
    let g = norm(grad);
    let normal = [grad[0] / g, grad[1] / g];
    let (mut a, mut b) = (crossings[0], crossings[1]);
    let d = sub(b, a);
    if d[1] * normal[0] - d[0] * normal[1] < T::zero() {
        std::mem::swap(&mut a, &mut b);
    }

    CutDecomposition {
        classification: Classification::Cut,
        inside_subtriangles,
        boundary_segments: vec![BoundarySegment { a, b, normal }],
    }
}
