//! Structured triangular background meshes and their face connectivity.

use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::scalar::{norm, signed_area2, sub, Real, Vec2};

/// Axis-aligned rectangle `[min.x, max.x] x [min.y, max.y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub min: Vec2<T>,
    pub max: Vec2<T>,
}

impl<T: Real> Rect<T> {
    pub fn new(min: Vec2<T>, max: Vec2<T>) -> Self {
        Self { min, max }
    }

    /// The square `[-half, half]^2`.
    pub fn centered_square(half: T) -> Self {
        Self::new([-half, -half], [half, half])
    }

    pub fn width(&self) -> T {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> T {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > T::zero() && self.height() > T::zero())
            || !self.width().is_finite()
            || !self.height().is_finite()
    }
}

/// A mesh edge. Interior faces have two adjacent elements, exterior faces one.
///
/// Vertices are stored smallest index first. For interior faces the face
/// normal points from `elements[0]` into `elements[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub elements: Vec<usize>,
}

impl Face {
    pub fn is_interior(&self) -> bool {
        self.elements.len() == 2
    }
}

#[derive(Debug, Clone)]
pub struct BackgroundMesh<T> {
    pub vertices: Vec<Vec2<T>>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub faces: Vec<Face>,
    /// Face index of local edge `i`, which joins local vertices `i` and `i + 1 (mod 3)`.
    pub element_faces: Vec<[usize; 3]>,
    /// Largest element diameter.
    pub h_global: T,
    /// Structured cell edge lengths in x and y.
    pub dx: T,
    pub dy: T,
    pub nx: usize,
    pub ny: usize,
    pub bbox: Rect<T>,
}

impl<T: Real> BackgroundMesh<T> {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn element_points(&self, e: usize) -> [Vec2<T>; 3] {
        let t = self.triangles[e];
        [
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
        ]
    }

    pub fn element_area(&self, e: usize) -> T {
        let [a, b, c] = self.element_points(e);
        signed_area2(a, b, c) * T::lit(0.5)
    }

    pub fn element_diameter(&self, e: usize) -> T {
        let [a, b, c] = self.element_points(e);
        norm(sub(b, a)).max(norm(sub(c, b))).max(norm(sub(a, c)))
    }

    pub fn face_length(&self, f: usize) -> T {
        let [a, b] = self.faces[f].vertices;
        norm(sub(self.vertices[b], self.vertices[a]))
    }

    /// Unit normal of an interior face pointing from its first to its second
    /// element. For exterior faces the normal points out of the single element.
    pub fn face_normal(&self, f: usize) -> Vec2<T> {
        let face = &self.faces[f];
        let [a, b] = face.vertices;
        let pa = self.vertices[a];
        let d = sub(self.vertices[b], pa);
        let len = norm(d);
        let mut n = [d[1] / len, -d[0] / len];
        let first = face.elements[0];
        let opposite = self.triangles[first]
            .iter()
            .copied()
            .find(|&v| v != a && v != b)
            .expect("triangle has a vertex off the face");
        let to_opp = sub(self.vertices[opposite], pa);
        if n[0] * to_opp[0] + n[1] * to_opp[1] > T::zero() {
            n = [-n[0], -n[1]];
        }
        n
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.faces[f].is_interior())
    }
}

/// Builds an `nx` by `ny` grid of rectangular cells over `bbox`, each split
/// into two counter-clockwise triangles along the lower-left to upper-right
/// diagonal.
pub fn build_structured_mesh<T: Real>(
    nx: usize,
    ny: usize,
    bbox: Rect<T>,
) -> Result<BackgroundMesh<T>> {
    if nx == 0 || ny == 0 {
        return invalid(format!("cell counts must be positive, got {nx} x {ny}"));
    }
    if bbox.is_degenerate() {
        return invalid(format!("degenerate bounding box {:?}", bbox));
    }
    let (w, hgt) = (bbox.width(), bbox.height());
    let coord = |lo: T, len: T, i: usize, n: usize| {
        if i == n {
            lo + len
        } else {
            lo + len * T::from_count(i) / T::from_count(n)
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = coord(bbox.min[1], hgt, j, ny);
        for i in 0..=nx {
            vertices.push([coord(bbox.min[0], w, i, nx), y]);
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let (faces, element_faces) = build_faces(&triangles);
    let mut mesh = BackgroundMesh {
        vertices,
        triangles,
        faces,
        element_faces,
        h_global: T::zero(),
        dx: w / T::from_count(nx),
        dy: hgt / T::from_count(ny),
        nx,
        ny,
        bbox,
    };
    mesh.h_global = (0..mesh.num_elements())
        .map(|e| mesh.element_diameter(e))
        .fold(T::zero(), T::max);
    Ok(mesh)
}

fn build_faces(triangles: &[[usize; 3]]) -> (Vec<Face>, Vec<[usize; 3]>) {
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
    let mut faces: Vec<Face> = Vec::new();
    let mut element_faces = Vec::with_capacity(triangles.len());
    for (e, tri) in triangles.iter().enumerate() {
        let mut local = [0usize; 3];
        for (i, slot) in local.iter_mut().enumerate() {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let f = *lookup.entry(key).or_insert_with(|| {
                faces.push(Face {
                    vertices: [key.0, key.1],
                    elements: Vec::with_capacity(2),
                });
                faces.len() - 1
            });
            faces[f].elements.push(e);
            *slot = f;
        }
        element_faces.push(local);
    }
    (faces, element_faces)
}

/// Background box for the sliver study: `base` dilated by
/// `l = 2 (1 - eps) / (n - 2 (1 - eps))` on every side, so that with `n`
/// cells per direction the boundary of `base` cuts the outermost cells at
/// relative height `eps`.
pub fn dilated_bbox<T: Real>(epsilon: T, n: usize, base: Rect<T>) -> Result<Rect<T>> {
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return invalid(format!(
            "sliver parameter must lie in (0, 1], got {epsilon}"
        ));
    }
    let two = T::lit(2.0);
    let shrink = two * (T::one() - epsilon);
    let denom = T::from_count(n) - shrink;
    if denom <= T::zero() {
        return invalid(format!("need N > 2(1 - eps); got N = {n}, eps = {epsilon}"));
    }
    let l = shrink / denom;
    Ok(Rect::new(
        [base.min[0] - l, base.min[1] - l],
        [base.max[0] + l, base.max[1] + l],
    ))
}
