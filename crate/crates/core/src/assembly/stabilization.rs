use crate::mesh::BackgroundMesh;
use crate::scalar::{dot, Real};
use crate::spaces::{Component, Discretization, P1Element};

use super::{LinearSystem, Params, PenaltyVariant, Term};

/// Vertices of the two elements sharing interior face `f` and the jump of the
/// normal derivative of each hat function across it.
///
/// The jump is taken as the value on the first element minus the value on the
/// second, with the face normal pointing from the first into the second.
/// Entries past the returned count are unused.
pub fn face_jump_coefficients<T: Real>(
    mesh: &BackgroundMesh<T>,
    f: usize,
) -> ([usize; 4], [T; 4], usize) {
    let face = &mesh.faces[f];
    assert!(face.is_interior(), "face {f} is not interior");
    let n = mesh.face_normal(f);
    let mut verts = [usize::MAX; 4];
    let mut coef = [T::zero(); 4];
    let mut count = 0;
    for (side, &e) in face.elements.iter().enumerate() {
        let el = P1Element::new(mesh.element_points(e));
        let sign = if side == 0 { T::one() } else { -T::one() };
        for (k, &v) in mesh.triangles[e].iter().enumerate() {
            let dn = sign * dot(el.grads[k], n);
            let slot = match verts[..count].iter().position(|&w| w == v) {
                Some(s) => s,
                None => {
                    verts[count] = v;
                    count += 1;
                    count - 1
                }
            };
            coef[slot] += dn;
        }
    }
    (verts, coef, count)
}

fn push_face_block<T: Real>(
    sys: &mut LinearSystem<T>,
    disc: &Discretization<T>,
    term: Term,
    components: &[Component],
    verts: &[usize],
    coef: &[T],
    weight: T,
) {
    for &c in components {
        for (i, &vi) in verts.iter().enumerate() {
            let row = disc.layout.dof(c, vi);
            for (j, &vj) in verts.iter().enumerate() {
                sys.push(
                    term,
                    row,
                    disc.layout.dof(c, vj),
                    weight * coef[i] * coef[j],
                );
            }
        }
    }
}

/// Ghost penalties on faces: velocity on all interior faces of the active
/// mesh; with the face variant also pressure on all interior faces and stress
/// on faces next to cut elements.
pub fn assemble_ghost_penalties<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    sys: &mut LinearSystem<T>,
) {
    let h = disc.h();
    let two_eta = T::lit(2.0) * params.eta;
    let h3 = h * h * h;
    let face_variant = params.penalty == PenaltyVariant::Face;
    let wu = two_eta * params.gamma_u * h;
    let wp = if face_variant {
        params.gamma_p / two_eta * h3
    } else {
        T::zero()
    };
    let ws = if face_variant {
        params.gamma_sigma / two_eta * h3
    } else {
        T::zero()
    };

    let sets = &disc.cut.sets;
    let mut cut_face = vec![false; disc.mesh.faces.len()];
    for &f in &sets.cut_faces {
        cut_face[f] = true;
    }
    for &f in &sets.interior_faces {
        let (verts, coef, count) = face_jump_coefficients(&disc.mesh, f);
        let (verts, coef) = (&verts[..count], &coef[..count]);
        let len = disc.mesh.face_length(f);
        if wu != T::zero() {
            push_face_block(
                sys,
                disc,
                Term::VelocityPenalty,
                &Component::VELOCITY,
                verts,
                coef,
                wu * len,
            );
        }
        if wp != T::zero() {
            push_face_block(
                sys,
                disc,
                Term::PressurePenalty,
                &[Component::Pressure],
                verts,
                coef,
                wp * len,
            );
        }
        if ws != T::zero() && cut_face[f] {
            push_face_block(
                sys,
                disc,
                Term::StressPenalty,
                &Component::STRESS,
                verts,
                coef,
                ws * len,
            );
        }
    }
}

/// Element-wise gradient penalties on pressure and stress over all active
/// elements.
pub fn assemble_element_penalties<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    sys: &mut LinearSystem<T>,
) {
    let h = disc.h();
    let two_eta = T::lit(2.0) * params.eta;
    let wp = params.gamma_p / two_eta * h * h;
    let ws = params.gamma_sigma / two_eta * h * h;
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let mut local = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                local[i][j] = el.area * dot(el.grads[i], el.grads[j]);
            }
        }
        for (term, weight, comps) in [
            (Term::PressurePenalty, wp, &[Component::Pressure][..]),
            (Term::StressPenalty, ws, &Component::STRESS[..]),
        ] {
            if weight == T::zero() {
                continue;
            }
            for &c in comps {
                let d = disc.element_dofs(c, e);
                for i in 0..3 {
                    for j in 0..3 {
                        sys.push(term, d[i], d[j], weight * local[i][j]);
                    }
                }
            }
        }
    }
}
