//! Error norms on the physical domain and estimated orders of convergence.

use crate::assembly::Params;
use crate::error::{invalid, Error, Result};
use crate::manufactured::ManufacturedSolution;
use crate::quadrature::{map_segment, map_triangle, segment_rule, triangle_rule};
use crate::scalar::{Real, Vec2};
use crate::spaces::{Component, Discretization, FieldCoefficients};
use crate::sparse::CsrMatrix;

/// Errors of one run. Vector and tensor errors are sums of the component
/// norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport<T> {
    pub h: T,
    pub ndof: usize,
    pub l2_u: T,
    /// Seminorm `‖∇(u_h - u)‖`.
    pub h1_u: T,
    /// Pressure error after removing its mean over the domain.
    pub l2_p: T,
    pub l2_sigma: T,
    pub triple: T,
}

impl<T: Real> ErrorReport<T> {
    pub fn is_valid(&self) -> bool {
        [self.l2_u, self.h1_u, self.l2_p, self.l2_sigma, self.triple]
            .iter()
            .all(|v| v.is_finite() && *v >= T::zero())
    }
}

/// Values of a discrete field at a point of an element.
struct Sample<T> {
    sigma: [[T; 2]; 2],
    u: Vec2<T>,
    p: T,
}

fn sample<T: Real>(
    disc: &Discretization<T>,
    coeffs: &FieldCoefficients<T>,
    e: usize,
    lambda: &[T; 3],
) -> Sample<T> {
    let at = |c| coeffs.component_at(disc, c, e, lambda);
    Sample {
        sigma: [
            [at(Component::Stress(0, 0)), at(Component::Stress(0, 1))],
            [at(Component::Stress(1, 0)), at(Component::Stress(1, 1))],
        ],
        u: [at(Component::Velocity(0)), at(Component::Velocity(1))],
        p: at(Component::Pressure),
    }
}

/// Error norms of a discrete solution against the manufactured solution,
/// integrated over the domain only.
pub fn compute_errors<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    coeffs: &FieldCoefficients<T>,
    exact: &ManufacturedSolution<T>,
) -> Result<ErrorReport<T>> {
    coeffs.check_layout(&disc.layout)?;
    let vrule = triangle_rule::<T>(params.error_degree)?;
    let brule = segment_rule::<T>(params.error_degree)?;
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    // first pass: mean of the pressure error
    let mut area = T::zero();
    let mut p_int = T::zero();
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        for tri in &disc.cut.decomps[e].inside_subtriangles {
            for (x, w) in map_triangle(tri, &vrule) {
                let l = el.barycentric(x);
                let ph = coeffs.component_at(disc, Component::Pressure, e, &l);
                area += w;
                p_int += w * (ph - exact.pressure(x));
            }
        }
    }
    if !(area > T::zero()) {
        return invalid("domain has no area");
    }
    let p_mean = p_int / area;

    let mut u2 = [T::zero(); 2];
    let mut grad2 = [T::zero(); 2];
    let mut s2 = [T::zero(); 4];
    let mut p2 = T::zero();
    let mut eps2 = T::zero();
    let mut gamma2 = T::zero();
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let gu = coeffs.velocity_gradient(disc, e);
        let decomp = &disc.cut.decomps[e];
        for tri in &decomp.inside_subtriangles {
            for (x, w) in map_triangle(tri, &vrule) {
                let l = el.barycentric(x);
                let s = sample(disc, coeffs, e, &l);
                let ue = exact.velocity(x);
                let se = exact.stress(x);
                let ge = exact.velocity_gradient(x);
                for a in 0..2 {
                    u2[a] += w * (s.u[a] - ue[a]).powi(2);
                    grad2[a] += w * ((gu[a][0] - ge[a][0]).powi(2) + (gu[a][1] - ge[a][1]).powi(2));
                }
                for r in 0..2 {
                    for c in 0..2 {
                        s2[2 * r + c] += w * (s.sigma[r][c] - se[r][c]).powi(2);
                        let de = half * ((gu[r][c] - ge[r][c]) + (gu[c][r] - ge[c][r]));
                        eps2 += w * de * de;
                    }
                }
                p2 += w * (s.p - exact.pressure(x) - p_mean).powi(2);
            }
        }
        for seg in &decomp.boundary_segments {
            for (x, w) in map_segment(seg, &brule) {
                let l = el.barycentric(x);
                let s = sample(disc, coeffs, e, &l);
                let ue = exact.velocity(x);
                gamma2 += w * ((s.u[0] - ue[0]).powi(2) + (s.u[1] - ue[1]).powi(2));
            }
        }
    }
    let eta = params.eta;
    let sigma_total: T = s2.iter().copied().sum();
    let triple2 = sigma_total / (two * eta)
        + two * eta * eps2
        + p2 / (two * eta)
        + two * eta * params.gamma_b / disc.h() * gamma2;
    let report = ErrorReport {
        h: disc.h(),
        ndof: disc.num_dofs(),
        l2_u: u2[0].sqrt() + u2[1].sqrt(),
        h1_u: grad2[0].sqrt() + grad2[1].sqrt(),
        l2_p: p2.sqrt(),
        l2_sigma: s2.iter().map(|v| v.sqrt()).sum(),
        triple: triple2.sqrt(),
    };
    if !report.is_valid() {
        return Err(Error::Undefined(format!(
            "non-finite error norm: {report:?}"
        )));
    }
    Ok(report)
}

/// Triple norm of a discrete field by direct quadrature. The pressure enters
/// as given, without removing its mean.
pub fn triple_norm<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    coeffs: &FieldCoefficients<T>,
) -> Result<T> {
    coeffs.check_layout(&disc.layout)?;
    let vrule = triangle_rule::<T>(params.error_degree)?;
    let brule = segment_rule::<T>(params.error_degree)?;
    let two = T::lit(2.0);
    let eta = params.eta;
    let mut total = T::zero();
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let eps = coeffs.strain_rate(disc, e);
        let eps2 = eps.iter().flatten().map(|v| *v * *v).sum::<T>();
        let decomp = &disc.cut.decomps[e];
        for tri in &decomp.inside_subtriangles {
            for (x, w) in map_triangle(tri, &vrule) {
                let s = sample(disc, coeffs, e, &el.barycentric(x));
                let sig2 = s.sigma.iter().flatten().map(|v| *v * *v).sum::<T>();
                total += w * (sig2 / (two * eta) + two * eta * eps2 + s.p * s.p / (two * eta));
            }
        }
        for seg in &decomp.boundary_segments {
            for (x, w) in map_segment(seg, &brule) {
                let s = sample(disc, coeffs, e, &el.barycentric(x));
                total +=
                    w * two * eta * params.gamma_b / disc.h() * (s.u[0] * s.u[0] + s.u[1] * s.u[1]);
            }
        }
    }
    Ok(total.sqrt())
}

/// Matrix `M` of the triple norm, `|||x|||² = xᵀ M x`, assembled from element
/// mass and stiffness matrices.
pub fn triple_norm_matrix<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
) -> Result<CsrMatrix<T>> {
    let vrule = triangle_rule::<T>(params.volume_degree)?;
    let brule = segment_rule::<T>(params.boundary_degree)?;
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let eta = params.eta;
    let mut t = Vec::new();
    for &e in &disc.cut.sets.active_elements {
        let el = disc.element(e);
        let decomp = &disc.cut.decomps[e];
        let mut mass = [[T::zero(); 3]; 3];
        let mut area = T::zero();
        for tri in &decomp.inside_subtriangles {
            for (x, w) in map_triangle(tri, &vrule) {
                let l = el.barycentric(x);
                area += w;
                for i in 0..3 {
                    for j in 0..3 {
                        mass[i][j] += w * l[i] * l[j];
                    }
                }
            }
        }
        let mut bmass = [[T::zero(); 3]; 3];
        for seg in &decomp.boundary_segments {
            for (x, w) in map_segment(seg, &brule) {
                let l = el.barycentric(x);
                for i in 0..3 {
                    for j in 0..3 {
                        bmass[i][j] += w * l[i] * l[j];
                    }
                }
            }
        }
        for c in Component::STRESS.into_iter().chain([Component::Pressure]) {
            let d = disc.element_dofs(c, e);
            for i in 0..3 {
                for j in 0..3 {
                    t.push((d[i], d[j], mass[i][j] / (two * eta)));
                }
            }
        }
        // ‖ε(u)‖² = Σ_ab ε_ab², with ε_ab of u = φ_j e_c equal to
        // (δ_ac ∂_b φ_j + δ_bc ∂_a φ_j) / 2
        let g = el.grads;
        let strain = |c: usize, j: usize| -> [[T; 2]; 2] {
            let mut m = [[T::zero(); 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = T::zero();
                    if a == c {
                        v += g[j][b];
                    }
                    if b == c {
                        v += g[j][a];
                    }
                    m[a][b] = half * v;
                }
            }
            m
        };
        let w_nitsche = two * eta * params.gamma_b / disc.h();
        for c in 0..2 {
            let dc = disc.element_dofs(Component::Velocity(c), e);
            for k in 0..2 {
                let dk = disc.element_dofs(Component::Velocity(k), e);
                for i in 0..3 {
                    let ei = strain(c, i);
                    for j in 0..3 {
                        let ej = strain(k, j);
                        let mut s = T::zero();
                        for a in 0..2 {
                            for b in 0..2 {
                                s += ei[a][b] * ej[a][b];
                            }
                        }
                        let mut v = two * eta * area * s;
                        if c == k {
                            v += w_nitsche * bmass[i][j];
                        }
                        t.push((dc[i], dk[j], v));
                    }
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(disc.num_dofs(), t))
}

/// Observed orders of convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct Eoc {
    /// Slope between each pair of consecutive levels.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of `log e` against `log h` over all levels.
    pub fit: f64,
}

impl Eoc {
    pub fn last(&self) -> f64 {
        *self.pairwise.last().expect("at least one pairwise slope")
    }
}

/// Orders of convergence from `(h, error)` pairs with strictly decreasing `h`.
pub fn eoc(samples: &[(f64, f64)]) -> Result<Eoc> {
    if samples.len() < 2 {
        return invalid(format!("need at least two levels, got {}", samples.len()));
    }
    for w in samples.windows(2) {
        if !(w[1].0 < w[0].0) || !(w[1].0 > 0.0) {
            return invalid(format!(
                "mesh sizes must decrease strictly, got {} then {}",
                w[0].0, w[1].0
            ));
        }
    }
    if let Some(&(h, e)) = samples.iter().find(|&&(_, e)| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::Undefined(format!(
            "slope undefined for error {e} at h = {h}"
        )));
    }
    let pairwise = samples
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(Eoc {
        pairwise,
        fit: sxy / sxx,
    })
}
