use crate::error::{Error, Result};
use crate::quadrature::{map_segment, map_triangle, segment_rule, triangle_rule, TriangleRule};
use crate::scalar::{norm, Real};
use crate::spaces::{Component, Discretization, P1Element};

use super::{LinearSystem, Params, Term};

/// Mass matrix and basis integrals of one element restricted to the domain.
pub(crate) fn local_moments<T: Real>(
    disc: &Discretization<T>,
    e: usize,
    el: &P1Element<T>,
    rule: &TriangleRule<T>,
) -> ([[T; 3]; 3], [T; 3]) {
    let mut mass = [[T::zero(); 3]; 3];
    let mut first = [T::zero(); 3];
    for tri in &disc.cut.decomps[e].inside_subtriangles {
        for (x, w) in map_triangle(tri, rule) {
            let l = el.barycentric(x);
            for i in 0..3 {
                first[i] += w * l[i];
                for j in 0..3 {
                    mass[i][j] += w * l[i] * l[j];
                }
            }
        }
    }
    (mass, first)
}

fn check_decomposition<T: Real>(disc: &Discretization<T>, e: usize) -> Result<()> {
    if disc.cut.decomps.len() != disc.mesh.num_elements() {
        return Err(Error::Internal(
            "cut decompositions do not match the mesh".into(),
        ));
    }
    if disc.cut.decomps[e].inside_subtriangles.is_empty() {
        return Err(Error::Internal(format!(
            "active element {e} has no inside part"
        )));
    }
    Ok(())
}

/// Domain integrals: stress mass and the skew stress-velocity and
/// pressure-velocity couplings.
pub fn assemble_volume<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    sys: &mut LinearSystem<T>,
) -> Result<()> {
    let rule = triangle_rule::<T>(params.volume_degree)?;
    let mass_scale = T::one() / (T::lit(2.0) * params.eta);
    let half = T::lit(0.5);
    for &e in &disc.cut.sets.active_elements {
        check_decomposition(disc, e)?;
        let el = disc.element(e);
        let (mass, first) = local_moments(disc, e, &el, &rule);
        let g = el.grads;

        for c in Component::STRESS {
            let d = disc.element_dofs(c, e);
            for i in 0..3 {
                for j in 0..3 {
                    sys.push(Term::StressMass, d[i], d[j], mass_scale * mass[i][j]);
                }
            }
        }

        // (sigma, eps(v)) with v = phi_i e_a, sigma = phi_j e_r (x) e_s
        for a in 0..2 {
            let v = disc.element_dofs(Component::Velocity(a), e);
            for (r, s) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if r != a && s != a {
                    continue;
                }
                let sig = disc.element_dofs(Component::Stress(r, s), e);
                for i in 0..3 {
                    let mut eps = T::zero();
                    if r == a {
                        eps += g[i][s];
                    }
                    if s == a {
                        eps += g[i][r];
                    }
                    let eps = half * eps;
                    for j in 0..3 {
                        let val = eps * first[j];
                        sys.push(Term::StressVelocity, v[i], sig[j], val);
                        sys.push(Term::StressVelocity, sig[j], v[i], -val);
                    }
                }
            }
        }

        let p = disc.element_dofs(Component::Pressure, e);
        for a in 0..2 {
            let v = disc.element_dofs(Component::Velocity(a), e);
            for i in 0..3 {
                for j in 0..3 {
                    let val = g[i][a] * first[j];
                    sys.push(Term::PressureVelocity, v[i], p[j], -val);
                    sys.push(Term::PressureVelocity, p[j], v[i], val);
                }
            }
        }
    }
    Ok(())
}

/// Boundary integrals over the linearized boundary: stress and pressure
/// fluxes with their skew counterparts, and the Nitsche penalty.
pub fn assemble_boundary<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    sys: &mut LinearSystem<T>,
) -> Result<()> {
    let rule = segment_rule::<T>(params.boundary_degree)?;
    let nitsche = params.gamma_b * params.eta / disc.h();
    for &e in &disc.cut.sets.active_elements {
        let segments = &disc.cut.decomps[e].boundary_segments;
        if segments.is_empty() {
            continue;
        }
        let el = disc.element(e);
        for seg in segments {
            let n = seg.normal;
            if (norm(n) - T::one()).abs() > T::lit(64.0) * T::epsilon() {
                return Err(Error::Internal(format!(
                    "boundary normal {n:?} in element {e} is not a unit vector"
                )));
            }
            let mut bm = [[T::zero(); 3]; 3];
            for (x, w) in map_segment(seg, &rule) {
                let l = el.barycentric(x);
                for i in 0..3 {
                    for j in 0..3 {
                        bm[i][j] += w * l[i] * l[j];
                    }
                }
            }
            let p = disc.element_dofs(Component::Pressure, e);
            for a in 0..2 {
                let v = disc.element_dofs(Component::Velocity(a), e);
                for s in 0..2 {
                    let sig = disc.element_dofs(Component::Stress(a, s), e);
                    for i in 0..3 {
                        for j in 0..3 {
                            let val = n[s] * bm[i][j];
                            sys.push(Term::BoundaryStress, v[i], sig[j], -val);
                            sys.push(Term::BoundaryStress, sig[j], v[i], val);
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        let val = n[a] * bm[i][j];
                        sys.push(Term::BoundaryPressure, v[i], p[j], val);
                        sys.push(Term::BoundaryPressure, p[j], v[i], -val);
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        sys.push(Term::Nitsche, v[i], v[j], nitsche * bm[i][j]);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Appends the multiplier enforcing zero pressure mean on the domain.
pub fn assemble_mean_constraint<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    sys: &mut LinearSystem<T>,
) -> Result<()> {
    let mu = disc.layout.multiplier();
    if sys.n != mu || sys.has_mean_constraint() {
        return Err(Error::Internal(
            "mean constraint already present or system size mismatch".into(),
        ));
    }
    sys.n += 1;
    sys.rhs.push(T::zero());
    let rule = triangle_rule::<T>(params.volume_degree)?;
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let (_, first) = local_moments(disc, e, &el, &rule);
        let p = disc.element_dofs(Component::Pressure, e);
        for i in 0..3 {
            sys.push(Term::MeanConstraint, mu, p[i], first[i]);
            sys.push(Term::MeanConstraint, p[i], mu, first[i]);
        }
    }
    Ok(())
}
