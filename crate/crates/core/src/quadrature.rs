//! Symmetric quadrature on triangles, Gauss-Legendre on segments, and their
//! mapping onto cut pieces.

use crate::error::{invalid, Result};
use crate::geometry::{BoundarySegment, CutDecomposition};
use crate::scalar::{norm, signed_area2, sub, Real, Vec2};

/// Rule on the reference triangle `(0,0), (1,0), (0,1)`; weights sum to 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule<T> {
    pub barycentric: Vec<[T; 3]>,
    pub weights: Vec<T>,
    pub degree: usize,
}

/// Gauss-Legendre rule on `[0, 1]`; weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRule<T> {
    pub points: Vec<T>,
    pub weights: Vec<T>,
    pub degree: usize,
}

// (weight on the unit-area triangle, barycentric a, b, c); orbits are expanded below
const DUNAVANT_4: &[(f64, [f64; 3])] = &[
    (
        0.223_381_589_678_011,
        [
            0.108_103_018_168_070,
            0.445_948_490_915_965,
            0.445_948_490_915_965,
        ],
    ),
    (
        0.109_951_743_655_322,
        [
            0.816_847_572_980_459,
            0.091_576_213_509_771,
            0.091_576_213_509_771,
        ],
    ),
];

const DUNAVANT_6: &[(f64, [f64; 3])] = &[
    (
        0.116_786_275_726_379,
        [
            0.501_426_509_658_179,
            0.249_286_745_170_910,
            0.249_286_745_170_910,
        ],
    ),
    (
        0.050_844_906_370_207,
        [
            0.873_821_971_016_996,
            0.063_089_014_491_502,
            0.063_089_014_491_502,
        ],
    ),
    (
        0.082_851_075_618_374,
        [
            0.053_145_049_844_817,
            0.310_352_451_033_784,
            0.636_502_499_121_399,
        ],
    ),
];

/// All distinct permutations of a barycentric triple.
fn orbit(p: [f64; 3]) -> Vec<[f64; 3]> {
    let perms = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 2, 1],
        [2, 1, 0],
        [1, 0, 2],
    ];
    let mut out: Vec<[f64; 3]> = Vec::new();
    for perm in perms {
        let q = [p[perm[0]], p[perm[1]], p[perm[2]]];
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

fn from_orbits<T: Real>(table: &[(f64, [f64; 3])], degree: usize) -> TriangleRule<T> {
    let mut barycentric = Vec::new();
    let mut weights = Vec::new();
    for &(w, p) in table {
        for q in orbit(p) {
            barycentric.push(q.map(T::lit));
            weights.push(T::lit(0.5 * w));
        }
    }
    TriangleRule {
        barycentric,
        weights,
        degree,
    }
}

/// Symmetric rule with all weights positive and exactness at least `degree`.
pub fn triangle_rule<T: Real>(degree: usize) -> Result<TriangleRule<T>> {
    match degree {
        1 => Ok(TriangleRule {
            barycentric: vec![[T::one() / T::lit(3.0); 3]],
            weights: vec![T::lit(0.5)],
            degree: 1,
        }),
        2 => {
            let (a, b) = (T::lit(2.0) / T::lit(3.0), T::one() / T::lit(6.0));
            Ok(TriangleRule {
                barycentric: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![T::one() / T::lit(6.0); 3],
                degree: 2,
            })
        }
        3 | 4 => Ok(from_orbits(DUNAVANT_4, 4)),
        5 => {
            let s = 15f64.sqrt();
            let (a1, a2) = ((6.0 - s) / 21.0, (6.0 + s) / 21.0);
            let table = [
                (9.0 / 40.0, [1.0 / 3.0; 3]),
                ((155.0 - s) / 1200.0, [1.0 - 2.0 * a1, a1, a1]),
                ((155.0 + s) / 1200.0, [1.0 - 2.0 * a2, a2, a2]),
            ];
            Ok(from_orbits(&table, 5))
        }
        6 => Ok(from_orbits(DUNAVANT_6, 6)),
        _ => invalid(format!(
            "triangle quadrature degree must be in 1..=6, got {degree}"
        )),
    }
}

/// Gauss-Legendre rule with `ceil((degree + 1) / 2)` points.
pub fn segment_rule<T: Real>(degree: usize) -> Result<SegmentRule<T>> {
    if degree == 0 || degree > 63 {
        return invalid(format!(
            "segment quadrature degree must be in 1..=63, got {degree}"
        ));
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(SegmentRule {
        points: x.iter().map(|&t| T::lit(0.5 * (t + 1.0))).collect(),
        weights: w.iter().map(|&v| T::lit(0.5 * v)).collect(),
        degree: 2 * n - 1,
    })
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on the Legendre polynomial.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature points `(x, weight)` of a rule mapped onto a physical triangle.
pub fn map_triangle<'a, T: Real>(
    tri: &[Vec2<T>; 3],
    rule: &'a TriangleRule<T>,
) -> impl Iterator<Item = (Vec2<T>, T)> + 'a {
    let jac = signed_area2(tri[0], tri[1], tri[2]);
    let tri = *tri;
    rule.barycentric
        .iter()
        .zip(&rule.weights)
        .map(move |(l, &w)| {
            let x = [
                l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
                l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
            ];
            (x, w * jac)
        })
}

/// Quadrature points `(x, weight)` of a rule mapped onto a segment.
pub fn map_segment<'a, T: Real>(
    seg: &BoundarySegment<T>,
    rule: &'a SegmentRule<T>,
) -> impl Iterator<Item = (Vec2<T>, T)> + 'a {
    let len = norm(sub(seg.b, seg.a));
    let (a, b) = (seg.a, seg.b);
    rule.points.iter().zip(&rule.weights).map(move |(&t, &w)| {
        let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        (x, w * len)
    })
}

/// Integral of `f` over the inside part of an element.
pub fn integrate_cut_volume<T: Real>(
    decomp: &CutDecomposition<T>,
    f: impl Fn(Vec2<T>) -> T,
    rule: &TriangleRule<T>,
) -> T {
    let mut sum = T::zero();
    for tri in &decomp.inside_subtriangles {
        for (x, w) in map_triangle(tri, rule) {
            sum += w * f(x);
        }
    }
    sum
}

/// Integral of `f` over the boundary pieces inside an element.
pub fn integrate_boundary<T: Real>(
    decomp: &CutDecomposition<T>,
    f: impl Fn(Vec2<T>) -> T,
    rule: &SegmentRule<T>,
) -> T {
    let mut sum = T::zero();
    for seg in &decomp.boundary_segments {
        for (x, w) in map_segment(seg, rule) {
            sum += w * f(x);
        }
    }
    sum
}
