//! Continuous P1 spaces on the active submesh and the mixed stress-velocity-
//! pressure layout.

use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::geometry::{CutMesh, CutSets, LevelSet};
use crate::mesh::BackgroundMesh;
use crate::scalar::{signed_area2, Real, Vec2};

/// Number of scalar P1 components per vertex: four stress, two velocity, one pressure.
pub const COMPONENTS: usize = 7;

/// One scalar component of the mixed field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    /// Stress entry `(row, col)`, both in `0..2`.
    Stress(usize, usize),
    Velocity(usize),
    Pressure,
}

impl Component {
    pub const ALL: [Component; COMPONENTS] = [
        Component::Stress(0, 0),
        Component::Stress(0, 1),
        Component::Stress(1, 0),
        Component::Stress(1, 1),
        Component::Velocity(0),
        Component::Velocity(1),
        Component::Pressure,
    ];

    pub const STRESS: [Component; 4] = [
        Component::Stress(0, 0),
        Component::Stress(0, 1),
        Component::Stress(1, 0),
        Component::Stress(1, 1),
    ];

    pub const VELOCITY: [Component; 2] = [Component::Velocity(0), Component::Velocity(1)];

    /// Position of the component's block in the global vector.
    pub fn block(self) -> usize {
        match self {
            Component::Stress(r, s) => 2 * r + s,
            Component::Velocity(a) => 4 + a,
            Component::Pressure => 6,
        }
    }
}

/// Linear element with precomputed barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct P1Element<T> {
    pub points: [Vec2<T>; 3],
    pub grads: [Vec2<T>; 3],
    pub area: T,
}

impl<T: Real> P1Element<T> {
    pub fn new(points: [Vec2<T>; 3]) -> Self {
        let two_area = signed_area2(points[0], points[1], points[2]);
        let grads = std::array::from_fn(|i| {
            let (p, q) = (points[(i + 1) % 3], points[(i + 2) % 3]);
            [(p[1] - q[1]) / two_area, (q[0] - p[0]) / two_area]
        });
        Self {
            points,
            grads,
            area: two_area * T::lit(0.5),
        }
    }

    /// Barycentric coordinates of `x`, i.e. the three basis function values.
    pub fn barycentric(&self, x: Vec2<T>) -> [T; 3] {
        let d = [x[0] - self.points[0][0], x[1] - self.points[0][1]];
        let l1 = self.grads[1][0] * d[0] + self.grads[1][1] * d[1];
        let l2 = self.grads[2][0] * d[0] + self.grads[2][1] * d[1];
        [T::one() - l1 - l2, l1, l2]
    }

    pub fn contains(&self, x: Vec2<T>, tol: T) -> bool {
        self.barycentric(x)
            .iter()
            .all(|&l| l >= -tol && l <= T::one() + tol)
    }
}

/// Dense numbering of the mixed unknowns in block order
/// `[s00, s01, s10, s11 | u0, u1 | p | mean multiplier]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedDofLayout {
    /// Active background vertices, ascending.
    pub vertices: Vec<usize>,
    local: Vec<Option<usize>>,
}

impl MixedDofLayout {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_dofs(&self) -> usize {
        COMPONENTS * self.vertices.len() + 1
    }

    /// Dense index of a background vertex, if it carries unknowns.
    pub fn local_index(&self, vertex: usize) -> Option<usize> {
        self.local.get(vertex).copied().flatten()
    }

    /// Global index of `component` at background `vertex`.
    ///
    /// Panics if the vertex is inactive.
    pub fn dof(&self, component: Component, vertex: usize) -> usize {
        let local = self.local[vertex].expect("vertex carries no unknowns");
        component.block() * self.vertices.len() + local
    }

    pub fn multiplier(&self) -> usize {
        COMPONENTS * self.vertices.len()
    }

    pub fn block_range(&self, component: Component) -> Range<usize> {
        let nv = self.vertices.len();
        component.block() * nv..(component.block() + 1) * nv
    }
}

/// Builds the mixed layout over the active vertices of a cut.
pub fn build_layout(sets: &CutSets, num_background_vertices: usize) -> Result<MixedDofLayout> {
    if sets.active_vertices.is_empty() {
        return invalid("no active elements: the domain misses the mesh");
    }
    let mut local = vec![None; num_background_vertices];
    for (i, &v) in sets.active_vertices.iter().enumerate() {
        if v >= num_background_vertices {
            return invalid(format!("active vertex {v} outside the mesh"));
        }
        local[v] = Some(i);
    }
    Ok(MixedDofLayout {
        vertices: sets.active_vertices.clone(),
        local,
    })
}

/// Mesh, cut and unknown numbering of one configuration.
#[derive(Debug, Clone)]
pub struct Discretization<T> {
    pub mesh: BackgroundMesh<T>,
    pub cut: CutMesh<T>,
    pub layout: MixedDofLayout,
}

impl<T: Real> Discretization<T> {
    pub fn new(mesh: BackgroundMesh<T>, phi: &impl LevelSet<T>) -> Result<Self> {
        let cut = CutMesh::build(&mesh, phi)?;
        Self::from_cut(mesh, cut)
    }

    /// Domain identical to the background mesh, boundary on its exterior faces.
    pub fn fitted(mesh: BackgroundMesh<T>) -> Result<Self> {
        let cut = CutMesh::fitted(&mesh);
        Self::from_cut(mesh, cut)
    }

    pub fn from_cut(mesh: BackgroundMesh<T>, cut: CutMesh<T>) -> Result<Self> {
        let layout = build_layout(&cut.sets, mesh.num_vertices())?;
        Ok(Self { mesh, cut, layout })
    }

    /// Global mesh size used in all penalty weights.
    pub fn h(&self) -> T {
        self.mesh.h_global
    }

    pub fn element(&self, e: usize) -> P1Element<T> {
        P1Element::new(self.mesh.element_points(e))
    }

    pub fn num_dofs(&self) -> usize {
        self.layout.num_dofs()
    }

    /// Global indices of `component` at the vertices of element `e`.
    pub fn element_dofs(&self, component: Component, e: usize) -> [usize; 3] {
        self.mesh.triangles[e].map(|v| self.layout.dof(component, v))
    }

    /// Nodal interpolant of the given fields.
    pub fn interpolate(
        &self,
        stress: impl Fn(Vec2<T>) -> [[T; 2]; 2],
        velocity: impl Fn(Vec2<T>) -> Vec2<T>,
        pressure: impl Fn(Vec2<T>) -> T,
    ) -> FieldCoefficients<T> {
        let mut values = vec![T::zero(); self.num_dofs()];
        for &v in &self.layout.vertices {
            let x = self.mesh.vertices[v];
            let s = stress(x);
            let u = velocity(x);
            for c in Component::ALL {
                values[self.layout.dof(c, v)] = match c {
                    Component::Stress(r, q) => s[r][q],
                    Component::Velocity(a) => u[a],
                    Component::Pressure => pressure(x),
                };
            }
        }
        FieldCoefficients { values }
    }
}

/// Which field to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Stress,
    Velocity,
    Pressure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue<T> {
    Scalar(T),
    Vector(Vec2<T>),
    Tensor([[T; 2]; 2]),
}

/// Coefficient vector of the mixed field (including the multiplier).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoefficients<T> {
    pub values: Vec<T>,
}

impl<T: Real> FieldCoefficients<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![T::zero(); n],
        }
    }

    pub fn check_layout(&self, layout: &MixedDofLayout) -> Result<()> {
        if self.values.len() != layout.num_dofs() {
            return invalid(format!(
                "coefficient vector has length {}, layout expects {}",
                self.values.len(),
                layout.num_dofs()
            ));
        }
        Ok(())
    }

    /// Coefficients of one component at the vertices of element `e`.
    pub fn nodal(&self, disc: &Discretization<T>, component: Component, e: usize) -> [T; 3] {
        disc.element_dofs(component, e).map(|i| self.values[i])
    }

    /// Value of one component at barycentric coordinates `lambda` of element `e`.
    pub fn component_at(
        &self,
        disc: &Discretization<T>,
        component: Component,
        e: usize,
        lambda: &[T; 3],
    ) -> T {
        let c = self.nodal(disc, component, e);
        c[0] * lambda[0] + c[1] * lambda[1] + c[2] * lambda[2]
    }

    /// Element-wise constant gradient of one component.
    pub fn component_gradient(
        &self,
        disc: &Discretization<T>,
        component: Component,
        e: usize,
        element: &P1Element<T>,
    ) -> Vec2<T> {
        let c = self.nodal(disc, component, e);
        let g = &element.grads;
        [
            c[0] * g[0][0] + c[1] * g[1][0] + c[2] * g[2][0],
            c[0] * g[0][1] + c[1] * g[1][1] + c[2] * g[2][1],
        ]
    }

    /// Velocity gradient `[i][j] = d u_i / d x_j` on element `e`.
    pub fn velocity_gradient(&self, disc: &Discretization<T>, e: usize) -> [[T; 2]; 2] {
        let el = disc.element(e);
        [
            self.component_gradient(disc, Component::Velocity(0), e, &el),
            self.component_gradient(disc, Component::Velocity(1), e, &el),
        ]
    }

    /// Symmetric part of the velocity gradient on element `e`.
    pub fn strain_rate(&self, disc: &Discretization<T>, e: usize) -> [[T; 2]; 2] {
        let g = self.velocity_gradient(disc, e);
        let half = T::lit(0.5);
        let off = half * (g[0][1] + g[1][0]);
        [[g[0][0], off], [off, g[1][1]]]
    }

    /// Evaluates a field at a point of element `e`.
    pub fn evaluate(
        &self,
        disc: &Discretization<T>,
        field: FieldKind,
        x: Vec2<T>,
        e: usize,
    ) -> Result<FieldValue<T>> {
        self.check_layout(&disc.layout)?;
        if e >= disc.mesh.num_elements() || !disc.cut.is_active(e) {
            return invalid(format!("element {e} is not active"));
        }
        let el = disc.element(e);
        if !el.contains(x, T::lit(1e-12)) {
            return Err(Error::InvalidInput(format!(
                "point {x:?} lies outside element {e}"
            )));
        }
        let l = el.barycentric(x);
        let at = |c| self.component_at(disc, c, e, &l);
        Ok(match field {
            FieldKind::Stress => FieldValue::Tensor([
                [at(Component::Stress(0, 0)), at(Component::Stress(0, 1))],
                [at(Component::Stress(1, 0)), at(Component::Stress(1, 1))],
            ]),
            FieldKind::Velocity => {
                FieldValue::Vector([at(Component::Velocity(0)), at(Component::Velocity(1))])
            }
            FieldKind::Pressure => FieldValue::Scalar(at(Component::Pressure)),
        })
    }

    /// Gradient of a scalar field, or of each component for vector and
    /// tensor fields, at element `e` (constant on the element).
    pub fn evaluate_gradient(
        &self,
        disc: &Discretization<T>,
        component: Component,
        e: usize,
    ) -> Result<Vec2<T>> {
        self.check_layout(&disc.layout)?;
        if e >= disc.mesh.num_elements() || !disc.cut.is_active(e) {
            return invalid(format!("element {e} is not active"));
        }
        Ok(self.component_gradient(disc, component, e, &disc.element(e)))
    }
}
