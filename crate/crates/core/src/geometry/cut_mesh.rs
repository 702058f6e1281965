//! Whole-mesh cut information: per-element decompositions and the element and
//! face sets the stabilized scheme is built on.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::mesh::BackgroundMesh;
use crate::scalar::Real;

use super::cut::{
    classify_signs, cut_with_values, refine_flat, snap, BoundarySegment, Classification,
    CutDecomposition, VertexSign, SNAP_TOLERANCE,
};
use super::level_set::LevelSet;

/// Element and face sets derived from the cut.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CutSets {
    /// Elements crossed by the boundary.
    pub cut_elements: Vec<usize>,
    /// Interior faces of the active mesh with at least one cut neighbour.
    pub cut_faces: Vec<usize>,
    /// Elements intersecting the domain; their union is the fictitious domain.
    pub active_elements: Vec<usize>,
    /// Vertices of active elements, ascending.
    pub active_vertices: Vec<usize>,
    /// Faces shared by two active elements, ascending.
    pub interior_faces: Vec<usize>,
}

/// Cut decompositions for every background element (empty for inactive ones)
/// together with the derived sets.
#[derive(Debug, Clone)]
pub struct CutMesh<T> {
    pub classes: Vec<Classification>,
    pub decomps: Vec<CutDecomposition<T>>,
    pub sets: CutSets,
}

impl<T: Real> CutMesh<T> {
    /// Classifies and clips every element of `mesh` against `phi`.
    pub fn build(mesh: &BackgroundMesh<T>, phi: &impl LevelSet<T>) -> Result<Self> {
        let tol = T::lit(SNAP_TOLERANCE) * mesh.h_global;
        let values: Vec<T> = mesh.vertices.iter().map(|&x| phi.eval(x)).collect();
        let signs: Vec<VertexSign> = values.iter().map(|&v| VertexSign::of(v, tol)).collect();

        for (f, face) in mesh.faces.iter().enumerate() {
            let crosses = face
                .vertices
                .iter()
                .any(|&v| signs[v] == VertexSign::Negative)
                && face
                    .vertices
                    .iter()
                    .any(|&v| signs[v] == VertexSign::Positive);
            if !face.is_interior() && crosses {
                let [a, b] = face.vertices;
                return Err(Error::Coverage {
                    face: f,
                    a: mesh.vertices[a].map(Real::to_f64_lossy),
                    b: mesh.vertices[b].map(Real::to_f64_lossy),
                });
            }
        }

        let classes: Vec<Classification> = mesh
            .triangles
            .iter()
            .enumerate()
            .map(|(e, t)| {
                let s = t.map(|v| signs[v]);
                refine_flat(classify_signs(s), s, &mesh.element_points(e), phi)
            })
            .collect();

        let decomps = (0..mesh.num_elements())
            .map(|e| {
                let tri = mesh.triangles[e];
                let pts = mesh.element_points(e);
                match classes[e] {
                    Classification::Outside => CutDecomposition::outside(),
                    Classification::Cut => cut_with_values(pts, snap(tri.map(|v| values[v]), tol)),
                    Classification::Inside => {
                        let mut d = CutDecomposition::inside(pts);
                        for i in 0..3 {
                            let j = (i + 1) % 3;
                            if signs[tri[i]] != VertexSign::OnBoundary
                                || signs[tri[j]] != VertexSign::OnBoundary
                            {
                                continue;
                            }
                            // an on-boundary edge between two inside elements is not boundary
                            let face = &mesh.faces[mesh.element_faces[e][i]];
                            let shared_with_inside = face.elements.iter().any(|&other| {
                                other != e && classes[other] == Classification::Inside
                            });
                            if !shared_with_inside {
                                d.boundary_segments
                                    .push(BoundarySegment::along_edge(pts[i], pts[j]));
                            }
                        }
                        d
                    }
                }
            })
            .collect();

        let sets = derive_sets(mesh, &classes);
        Ok(Self {
            classes,
            decomps,
            sets,
        })
    }

    /// Reference configuration for a domain that coincides with the mesh: all
    /// elements inside and the boundary made of the exterior mesh faces.
    pub fn fitted(mesh: &BackgroundMesh<T>) -> Self {
        let classes = vec![Classification::Inside; mesh.num_elements()];
        let decomps = (0..mesh.num_elements())
            .map(|e| {
                let pts = mesh.element_points(e);
                let mut d = CutDecomposition::inside(pts);
                for i in 0..3 {
                    if !mesh.faces[mesh.element_faces[e][i]].is_interior() {
                        d.boundary_segments
                            .push(BoundarySegment::along_edge(pts[i], pts[(i + 1) % 3]));
                    }
                }
                d
            })
            .collect();
        let sets = derive_sets(mesh, &classes);
        Self {
            classes,
            decomps,
            sets,
        }
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.classes[e] != Classification::Outside
    }

    /// Area of the linearized domain.
    pub fn domain_area(&self) -> T {
        self.decomps.iter().map(|d| d.inside_area()).sum()
    }

    /// Length of the linearized boundary.
    pub fn boundary_length(&self) -> T {
        self.decomps.iter().map(|d| d.boundary_length()).sum()
    }
}

fn derive_sets<T: Real>(mesh: &BackgroundMesh<T>, classes: &[Classification]) -> CutSets {
    let active = |e: usize| classes[e] != Classification::Outside;
    let active_elements: Vec<usize> = (0..mesh.num_elements()).filter(|&e| active(e)).collect();
    let cut_elements: Vec<usize> = (0..mesh.num_elements())
        .filter(|&e| classes[e] == Classification::Cut)
        .collect();
    let mut vertex_used = vec![false; mesh.num_vertices()];
    for &e in &active_elements {
        for v in mesh.triangles[e] {
            vertex_used[v] = true;
        }
    }
    let active_vertices = (0..mesh.num_vertices())
        .filter(|&v| vertex_used[v])
        .collect();
    let interior_faces: Vec<usize> = mesh
        .interior_faces()
        .filter(|&f| mesh.faces[f].elements.iter().all(|&e| active(e)))
        .collect();
    let cut_faces = interior_faces
        .iter()
        .copied()
        .filter(|&f| {
            mesh.faces[f]
                .elements
                .iter()
                .any(|&e| classes[e] == Classification::Cut)
        })
        .collect();
    CutSets {
        cut_elements,
        cut_faces,
        active_elements,
        active_vertices,
        interior_faces,
    }
}

/// Builds the cut and returns only the element and face sets.
pub fn collect_cut_sets<T: Real>(
    mesh: &BackgroundMesh<T>,
    phi: &impl LevelSet<T>,
) -> Result<CutSets> {
    CutMesh::build(mesh, phi).map(|c| c.sets)
}

/// Outcome of checking how well the mesh resolves the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionReport {
    /// Largest number of interior faces crossed on a shortest walk from a cut
    /// element to an uncut inside element.
    pub max_walk: usize,
    /// Largest number of boundary crossings on any interior face (1 for
    /// linearized cuts).
    pub max_face_crossings: usize,
    pub cut_elements: usize,
}

/// Checks the boundary-resolution assumptions on a built cut.
pub fn validate_assumptions<T: Real>(
    mesh: &BackgroundMesh<T>,
    cut: &CutMesh<T>,
) -> Result<AssumptionReport> {
    let sets = &cut.sets;
    if sets.cut_elements.is_empty() {
        return Ok(AssumptionReport {
            max_walk: 0,
            max_face_crossings: 0,
            cut_elements: 0,
        });
    }

    // each linearized segment meets a face at most once; count per face
    let mut crossings = vec![0usize; mesh.faces.len()];
    for &e in &sets.cut_elements {
        for seg in &cut.decomps[e].boundary_segments {
            for &f in &mesh.element_faces[e] {
                let [va, vb] = mesh.faces[f].vertices;
                if on_segment(mesh.vertices[va], mesh.vertices[vb], seg.a)
                    || on_segment(mesh.vertices[va], mesh.vertices[vb], seg.b)
                {
                    crossings[f] += 1;
                }
            }
        }
    }
    // the same crossing is seen from both neighbours
    let max_face_crossings = mesh
        .faces
        .iter()
        .enumerate()
        .map(|(f, face)| crossings[f].div_ceil(face.elements.len()))
        .max()
        .unwrap_or(0);

    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_elements()];
    for &f in &sets.interior_faces {
        let els = &mesh.faces[f].elements;
        neighbours[els[0]].push(els[1]);
        neighbours[els[1]].push(els[0]);
    }

    let mut max_walk = 0;
    let mut dist = vec![usize::MAX; mesh.num_elements()];
    for &start in &sets.cut_elements {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        let mut found = None;
        while let Some(e) = queue.pop_front() {
            if cut.classes[e] == Classification::Inside {
                found = Some(dist[e]);
                break;
            }
            for &n in &neighbours[e] {
                if dist[n] == usize::MAX {
                    dist[n] = dist[e] + 1;
                    queue.push_back(n);
                }
            }
        }
        match found {
            Some(d) => max_walk = max_walk.max(d),
            None => {
                return Err(Error::AssumptionViolation(format!(
                    "no uncut interior element reachable from cut element {start}; the mesh is too coarse"
                )))
            }
        }
    }
    Ok(AssumptionReport {
        max_walk,
        max_face_crossings,
        cut_elements: sets.cut_elements.len(),
    })
}

fn on_segment<T: Real>(a: [T; 2], b: [T; 2], p: [T; 2]) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let w = [p[0] - a[0], p[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let tol = T::lit(1e-10) * len2;
    let cross = d[0] * w[1] - d[1] * w[0];
    let t = d[0] * w[0] + d[1] * w[1];
    cross.abs() <= tol && t >= -tol && t <= len2 + tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LevelSetDomain;
    use crate::mesh::{build_structured_mesh, dilated_bbox, Rect};

    fn circle_mesh(n: usize, half: f64) -> (BackgroundMesh<f64>, CutMesh<f64>) {
        let mesh = build_structured_mesh(n, n, Rect::centered_square(half)).unwrap();
        let phi = LevelSetDomain::circle([0.0, 0.0], 1.0).unwrap();
        let cut = CutMesh::build(&mesh, &phi).unwrap();
        (mesh, cut)
    }

    #[test]
    fn circle_sets_are_consistent() {
        let (mesh, cut) = circle_mesh(4, 2.0);
        let s = &cut.sets;
        assert!(!s.cut_elements.is_empty());
        assert!(!s.cut_faces.is_empty());
        for &e in &s.cut_elements {
            assert!(s.active_elements.contains(&e));
        }
        for &f in &s.cut_faces {
            assert!(mesh.faces[f].is_interior());
            assert!(mesh.faces[f]
                .elements
                .iter()
                .any(|e| s.cut_elements.contains(e)));
        }
        let phi = LevelSetDomain::circle([0.0, 0.0], 1.0).unwrap();
        for e in 0..mesh.num_elements() {
            if !s.active_elements.contains(&e) {
                assert!(mesh.triangles[e]
                    .iter()
                    .all(|&v| phi.eval(mesh.vertices[v]) > -1e-12));
            }
        }
    }

    #[test]
    fn domain_containing_mesh_has_no_cut() {
        let mesh = build_structured_mesh(3, 3, Rect::centered_square(1.0)).unwrap();
        let sets = collect_cut_sets(&mesh, &|_: [f64; 2]| -1.0).unwrap();
        assert!(sets.cut_elements.is_empty() && sets.cut_faces.is_empty());
        assert_eq!(sets.active_elements.len(), mesh.num_elements());
    }

    #[test]
    fn boundary_leaving_the_mesh_is_a_coverage_error() {
        let mesh = build_structured_mesh(6, 6, Rect::centered_square(0.9)).unwrap();
        let phi = LevelSetDomain::circle([0.0, 0.0], 1.0).unwrap();
        let err = CutMesh::build(&mesh, &phi).unwrap_err();
        assert!(matches!(err, Error::Coverage { .. }), "{err}");
    }

    #[test]
    fn negative_inside_closed_mesh_region() {
        // domain strictly inside the mesh but covering every element
        let mesh = build_structured_mesh(2, 2, Rect::centered_square(1.0)).unwrap();
        let phi = LevelSetDomain::axis_box([-1.0, -1.0], [1.0, 1.0]).unwrap();
        let sets = collect_cut_sets(&mesh, &phi).unwrap();
        assert!(sets.cut_elements.is_empty());
        assert!(sets.cut_faces.is_empty());
        assert_eq!(sets.active_elements.len(), mesh.num_elements());
    }

    #[test]
    fn fitted_sliver_equals_fitted_reference() {
        let base = Rect::centered_square(1.0f64);
        let bbox = dilated_bbox(1.0, 6, base).unwrap();
        let mesh = build_structured_mesh(6, 6, bbox).unwrap();
        let phi = LevelSetDomain::axis_box(base.min, base.max).unwrap();
        let cut = CutMesh::build(&mesh, &phi).unwrap();
        let reference = CutMesh::fitted(&mesh);
        assert!(cut.sets.cut_elements.is_empty());
        assert_eq!(cut.sets, reference.sets);
        assert_eq!(cut.decomps, reference.decomps);
        assert!((cut.boundary_length() - 8.0).abs() < 1e-13);
    }

    #[test]
    fn partition_has_positive_pieces_and_exact_cell_areas() {
        let (mesh, cut) = circle_mesh(9, 1.5);
        for e in 0..mesh.num_elements() {
            let d = &cut.decomps[e];
            for t in &d.inside_subtriangles {
                assert!(crate::scalar::signed_area2(t[0], t[1], t[2]) > 0.0);
            }
            assert!(d.inside_area() <= mesh.element_area(e) * (1.0 + 1e-13));
        }
    }

    #[test]
    fn area_and_perimeter_converge_quadratically() {
        let mut errs = Vec::new();
        for n in [8usize, 16, 32, 64] {
            let (mesh, cut) = circle_mesh(n, 1.5);
            errs.push((
                mesh.h_global,
                (cut.domain_area() - std::f64::consts::PI).abs(),
                (cut.boundary_length() - 2.0 * std::f64::consts::PI).abs(),
            ));
        }
        for w in errs.windows(2) {
            let rate_a = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
            let rate_p = (w[0].2 / w[1].2).ln() / (w[0].0 / w[1].0).ln();
            assert!(rate_a > 1.5 && rate_p > 1.5, "{rate_a} {rate_p}");
        }
    }

    #[test]
    fn normals_approach_radial_direction() {
        let mut worst = Vec::new();
        for n in [8usize, 32] {
            let (mesh, cut) = circle_mesh(n, 1.5);
            let mut w: f64 = 0.0;
            for d in &cut.decomps {
                for s in &d.boundary_segments {
                    let m = s.midpoint();
                    let r = m[0].hypot(m[1]);
                    let dev = (s.normal[0] - m[0] / r).hypot(s.normal[1] - m[1] / r);
                    w = w.max(dev);
                }
            }
            worst.push((mesh.h_global, w));
        }
        assert!(worst[1].1 < worst[0].1 / 2.0, "{worst:?}");
        assert!(worst.iter().all(|&(h, w)| w < 0.5 * h), "{worst:?}");
    }

    #[test]
    fn assumptions_on_resolved_circle() {
        let mesh = build_structured_mesh(16, 16, Rect::centered_square(2.0)).unwrap();
        let phi = LevelSetDomain::circle([0.0, 0.0], 1.0).unwrap();
        let cut = CutMesh::build(&mesh, &phi).unwrap();
        let report = validate_assumptions(&mesh, &cut).unwrap();
        assert!(report.max_walk >= 1 && report.max_walk <= 3, "{report:?}");
        assert_eq!(report.max_face_crossings, 1);
    }

    #[test]
    fn assumptions_fail_on_coarse_mesh() {
        let mesh = build_structured_mesh(2, 2, Rect::centered_square(1.2)).unwrap();
        let phi = LevelSetDomain::circle([0.0, 0.0], 1.0).unwrap();
        let cut = CutMesh::build(&mesh, &phi).unwrap();
        assert_eq!(cut.sets.cut_elements.len(), 6);
        assert!(matches!(
            validate_assumptions(&mesh, &cut),
            Err(Error::AssumptionViolation(_))
        ));
    }

    #[test]
    fn assumptions_trivial_when_fitted() {
        let mesh = build_structured_mesh(4, 4, Rect::centered_square(1.0)).unwrap();
        let cut = CutMesh::fitted(&mesh);
        assert_eq!(validate_assumptions(&mesh, &cut).unwrap().max_walk, 0);
    }
}
