use crate::error::{Error, Result};
use crate::quadrature::{map_segment, map_triangle, segment_rule, triangle_rule};
use crate::scalar::{dot, Real, Vec2};
use crate::spaces::{Component, Discretization};

use super::{LinearSystem, Params};

/// Boundary data diagnostics gathered while assembling the load vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsReport<T> {
    /// `∫_Γ n·g ds`.
    pub flux: T,
    pub boundary_length: T,
    /// Whether the flux is below `1e-8 |Γ|` (or `100 eps |Γ|` if that is larger).
    pub compatible: bool,
}

/// Load vector: body force, the two boundary data terms of the stress and
/// pressure test functions, and the Nitsche data term.
pub fn assemble_rhs<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    body_force: impl Fn(Vec2<T>) -> Vec2<T>,
    boundary_data: impl Fn(Vec2<T>) -> Vec2<T>,
    sys: &mut LinearSystem<T>,
) -> Result<RhsReport<T>> {
    if sys.rhs.len() != sys.n || sys.n < disc.num_dofs() - 1 {
        return Err(Error::Internal(
            "load vector does not match the layout".into(),
        ));
    }
    let vrule = triangle_rule::<T>(params.volume_degree)?;
    let brule = segment_rule::<T>(params.boundary_degree)?;
    let nitsche = params.gamma_b * params.eta / disc.h();
    let mut flux = T::zero();
    let mut length = T::zero();
    let b = &mut sys.rhs;
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let decomp = &disc.cut.decomps[e];
        let vel = [
            disc.element_dofs(Component::Velocity(0), e),
            disc.element_dofs(Component::Velocity(1), e),
        ];
        for tri in &decomp.inside_subtriangles {
            for (x, w) in map_triangle(tri, &vrule) {
                let f = body_force(x);
                let l = el.barycentric(x);
                for a in 0..2 {
                    for i in 0..3 {
                        b[vel[a][i]] += w * f[a] * l[i];
                    }
                }
            }
        }
        let p = disc.element_dofs(Component::Pressure, e);
        for seg in &decomp.boundary_segments {
            let n = seg.normal;
            length += seg.length();
            for (x, w) in map_segment(seg, &brule) {
                let g = boundary_data(x);
                let gn = dot(g, n);
                flux += w * gn;
                let l = el.barycentric(x);
                for i in 0..3 {
                    for r in 0..2 {
                        for s in 0..2 {
                            let d = disc
                                .layout
                                .dof(Component::Stress(r, s), disc.mesh.triangles[e][i]);
                            b[d] += w * l[i] * n[s] * g[r];
                        }
                    }
                    b[p[i]] -= w * l[i] * gn;
                    for a in 0..2 {
                        b[vel[a][i]] += nitsche * w * g[a] * l[i];
                    }
                }
            }
        }
    }
    let compatible = flux.abs() <= T::lit(1e-8).max(T::lit(100.0) * T::epsilon()) * length;
    if !compatible {
        log::warn!(
            "boundary data violates compatibility: flux {flux:e} over boundary length {length:e}"
        );
    }
    Ok(RhsReport {
        flux,
        boundary_length: length,
        compatible,
    })
}
