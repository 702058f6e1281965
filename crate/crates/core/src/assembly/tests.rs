use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::LevelSetDomain;
use crate::manufactured::ManufacturedSolution;
use crate::mesh::{build_structured_mesh, Rect};
use crate::spaces::Component;

fn unit_square(n: usize) -> Discretization<f64> {
    let mesh = build_structured_mesh(n, n, Rect::new([0.0, 0.0], [1.0, 1.0])).unwrap();
    Discretization::fitted(mesh).unwrap()
}

fn cut_circle(n: usize) -> Discretization<f64> {
    let mesh = build_structured_mesh(n, n, Rect::centered_square(1.5)).unwrap();
    let phi = LevelSetDomain::circle([0.0, 0.0], 1.0).unwrap();
    Discretization::new(mesh, &phi).unwrap()
}

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn stress_mass_of_a_full_triangle() {
    let disc = unit_square(1);
    let params = Params::<f64>::default();
    let sys = assemble_operator(&disc, &params).unwrap();
    let m = sys.matrix_of(&[Term::StressMass]);
    let scale = 0.5 / (2.0 * params.eta);
    // vertex 1 belongs to element 0 only; edge 0-1 as well
    for c in Component::STRESS {
        let d = |v| disc.layout.dof(c, v);
        assert!((m.get(d(1), d(1)) - scale / 6.0).abs() < 1e-15);
        assert!((m.get(d(0), d(1)) - scale / 12.0).abs() < 1e-15);
        assert!((m.get(d(1), d(0)) - scale / 12.0).abs() < 1e-15);
    }
}

#[test]
fn couplings_are_skew() {
    let disc = cut_circle(8);
    let sys = assemble_operator(&disc, &Params::default()).unwrap();
    for term in [
        Term::StressVelocity,
        Term::PressureVelocity,
        Term::BoundaryStress,
        Term::BoundaryPressure,
    ] {
        let m = sys.matrix_of(&[term]);
        let t = m.transpose();
        assert!(m.nnz() > 0);
        for i in 0..m.n {
            for (j, v) in m.row(i) {
                assert_eq!(v, -t.get(i, j), "{term:?} at ({i}, {j})");
            }
        }
    }
}

#[test]
fn constant_pressure_reproduces_divergence_integral() {
    let disc = cut_circle(6);
    let sys = assemble_operator(&disc, &Params::default()).unwrap();
    let m = sys.matrix_of(&[Term::PressureVelocity]);
    let mut ones = vec![0.0; sys.n];
    for i in disc.layout.block_range(Component::Pressure) {
        ones[i] = 1.0;
    }
    let r = m.mul_vec(&ones);
    let mut expected = vec![0.0; sys.n];
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let area = disc.cut.decomps[e].inside_area();
        for a in 0..2 {
            let d = disc.element_dofs(Component::Velocity(a), e);
            for i in 0..3 {
                expected[d[i]] -= area * el.grads[i][a];
            }
        }
    }
    for (x, y) in r.iter().zip(&expected) {
        assert!((x - y).abs() < 1e-13);
    }
}

#[test]
fn nitsche_block_is_positive_semidefinite() {
    let disc = cut_circle(8);
    let sys = assemble_operator(&disc, &Params::default()).unwrap();
    let m = sys.matrix_of(&[Term::Nitsche]);
    for seed in 0..100 {
        let x = random_vector(sys.n, seed);
        assert!(m.quadratic_form(&x) >= -1e-12);
    }
}

#[test]
fn zero_stress_penalty_equals_removal() {
    let disc = cut_circle(8);
    let with = assemble_operator(&disc, &Params::default()).unwrap();
    let zero = assemble_operator(
        &disc,
        &Params {
            gamma_sigma: 0.0,
            ..Params::default()
        },
    )
    .unwrap();
    assert!(!with.term_entries(Term::StressPenalty).is_empty());
    assert_eq!(zero.matrix(), with.without(Term::StressPenalty).matrix());
}

#[test]
fn affine_fields_have_no_jumps() {
    let disc = cut_circle(7);
    for &f in &disc.cut.sets.interior_faces {
        let (verts, coef, count) = face_jump_coefficients(&disc.mesh, f);
        let jump: f64 = (0..count)
            .map(|k| {
                let x = disc.mesh.vertices[verts[k]];
                coef[k] * (0.3 - 1.7 * x[0] + 2.2 * x[1])
            })
            .sum();
        assert!(jump.abs() < 1e-12);
    }
}

#[test]
fn hat_function_face_penalty_by_hand() {
    // unit square split along (0,0)-(1,1): the hat at (1,0) is x - y below the
    // diagonal and zero above, so its normal derivative jumps by sqrt(2)
    let disc = unit_square(1);
    let params = Params {
        gamma_p: 1.0,
        eta: 0.5,
        ..Params::default()
    };
    let sys = assemble_operator(&disc, &params).unwrap();
    let m = sys.matrix_of(&[Term::PressurePenalty]);
    let d = disc.layout.dof(Component::Pressure, 1);
    assert!((m.get(d, d) - 8.0).abs() < 1e-13);
}

#[test]
fn element_penalty_of_a_linear_field() {
    let disc = unit_square(1);
    let params = Params {
        gamma_p: 0.3,
        penalty: PenaltyVariant::Element,
        ..Params::default()
    };
    let sys = assemble_operator(&disc, &params).unwrap();
    let m = sys.matrix_of(&[Term::PressurePenalty]);
    let mut x = vec![0.0; sys.n];
    for &v in &disc.layout.vertices {
        x[disc.layout.dof(Component::Pressure, v)] = disc.mesh.vertices[v][0];
    }
    let h = disc.h();
    let expected = params.gamma_p / (2.0 * params.eta) * h * h * 1.0;
    assert!((m.quadratic_form(&x) - expected).abs() < 1e-13);

    let mut c = vec![0.0; sys.n];
    for i in disc.layout.block_range(Component::Stress(1, 0)) {
        c[i] = 2.5;
    }
    assert!(
        sys.matrix_of(&[Term::StressPenalty])
            .quadratic_form(&c)
            .abs()
            < 1e-13
    );
}

#[test]
fn variant_changes_only_pressure_and_stress_penalties() {
    let disc = cut_circle(8);
    let face = assemble_operator(&disc, &Params::default()).unwrap();
    let element = assemble_operator(
        &disc,
        &Params {
            penalty: PenaltyVariant::Element,
            ..Params::default()
        },
    )
    .unwrap();
    let others = [
        Term::StressMass,
        Term::StressVelocity,
        Term::PressureVelocity,
        Term::BoundaryStress,
        Term::BoundaryPressure,
        Term::Nitsche,
        Term::VelocityPenalty,
    ];
    for t in others {
        assert_eq!(face.term_entries(t), element.term_entries(t));
    }
    assert_ne!(
        face.matrix_of(&[Term::PressurePenalty]),
        element.matrix_of(&[Term::PressurePenalty])
    );
}

#[test]
fn constraint_row_integrates_constants() {
    let disc = cut_circle(10);
    let params = Params::default();
    let mut sys = assemble_operator(&disc, &params).unwrap();
    assemble_mean_constraint(&disc, &params, &mut sys).unwrap();
    assert_eq!(sys.n, disc.num_dofs());
    let m = sys.matrix();
    let mu = disc.layout.multiplier();
    let row: f64 = m.row(mu).map(|(_, v)| v).sum();
    assert!((row - disc.cut.domain_area()).abs() < 1e-13);
    assert_eq!(
        m.transpose().get(
            mu,
            disc.layout
                .dof(Component::Pressure, disc.layout.vertices[0])
        ),
        m.get(
            disc.layout
                .dof(Component::Pressure, disc.layout.vertices[0]),
            mu
        )
    );
    assert!(assemble_mean_constraint(&disc, &params, &mut sys).is_err());
    assert_eq!(sys.without_mean_constraint().n, disc.num_dofs() - 1);
}

#[test]
fn zero_data_gives_zero_load() {
    let disc = cut_circle(6);
    let (sys, report) =
        assemble_system(&disc, &Params::default(), |_| [0.0, 0.0], |_| [0.0, 0.0]).unwrap();
    assert!(sys.rhs.iter().all(|&v| v == 0.0));
    assert!(report.compatible);
}

#[test]
fn exact_velocity_is_compatible() {
    let disc = cut_circle(32);
    let ms = ManufacturedSolution::new(0.5);
    let (_, report) = assemble_system(
        &disc,
        &Params::default(),
        |x| ms.body_force(x),
        |x| ms.boundary_data(x),
    )
    .unwrap();
    assert!(report.flux.abs() < 1e-10, "flux {}", report.flux);
    assert!(report.compatible);
}

#[test]
fn pressure_load_of_constant_data() {
    // with g = (1, 0) and q = x the pressure rows give -∮ n_x x ds, which is
    // minus the area enclosed by the linearized boundary
    let disc = cut_circle(12);
    let (sys, _) =
        assemble_system(&disc, &Params::default(), |_| [0.0, 0.0], |_| [1.0, 0.0]).unwrap();
    let s: f64 = disc
        .layout
        .vertices
        .iter()
        .map(|&v| sys.rhs[disc.layout.dof(Component::Pressure, v)] * disc.mesh.vertices[v][0])
        .sum();
    assert!((s + disc.cut.domain_area()).abs() < 1e-12);
}

#[test]
fn incompatible_data_is_reported() {
    let disc = cut_circle(8);
    let (_, report) = assemble_system(&disc, &Params::default(), |_| [0.0, 0.0], |x| x).unwrap();
    assert!(!report.compatible);
    assert!((report.flux - 2.0 * disc.cut.domain_area()).abs() < 1e-10);
}

#[test]
fn assembly_is_deterministic() {
    let a = assemble_operator(&cut_circle(9), &Params::default()).unwrap();
    let b = assemble_operator(&cut_circle(9), &Params::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn stencil_stays_within_face_patches() {
    let disc = cut_circle(10);
    let m = assemble_operator(&disc, &Params::default())
        .unwrap()
        .matrix();
    let nv = disc.layout.num_vertices();
    let h = disc.h();
    for i in 0..m.n {
        let vi = disc.layout.vertices[i % nv];
        for (j, _) in m.row(i) {
            let vj = disc.layout.vertices[j % nv];
            let d = crate::scalar::norm(crate::scalar::sub(
                disc.mesh.vertices[vi],
                disc.mesh.vertices[vj],
            ));
            assert!(d <= 2.0 * h + 1e-12);
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let disc = unit_square(2);
    for p in [
        Params {
            eta: 0.0,
            ..Params::default()
        },
        Params {
            gamma_b: -1.0,
            ..Params::default()
        },
        Params {
            gamma_sigma: -0.1,
            ..Params::default()
        },
        Params {
            volume_degree: 9,
            ..Params::default()
        },
    ] {
        assert!(assemble_operator(&disc, &p).is_err());
    }
}

#[test]
fn coordinate_export() {
    let m = crate::sparse::CsrMatrix::from_triplets(2, [(0, 0, 1.0), (1, 0, -0.25)]);
    let mut out = Vec::new();
    write_coordinate_to(&mut out, &m).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(
        text,
        "0 0 1.0000000000000000e0\n1 0 -2.5000000000000000e-1\n"
    );
}
