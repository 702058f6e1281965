//! Direct sparse solution and 2-norm condition numbers of assembled systems.

mod lu;
mod ordering;

use faer::Mat;

use crate::assembly::LinearSystem;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

pub use lu::{PivotStats, SparseLu, DIAGONAL_PREFERENCE, PIVOT_TOLERANCE};
pub use ordering::{amd_order, is_permutation};

/// Relative residual a direct solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Largest dimension accepted by the dense condition number.
pub const DENSE_LIMIT: usize = 20_000;

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solution: Vec<T>,
    /// `‖K x - b‖ / ‖b‖`, or `‖K x‖` when `b = 0`.
    pub relative_residual: f64,
    pub pivots: PivotStats,
}

/// Relative residual `‖K x - b‖ / ‖b‖` in double precision.
pub fn relative_residual<T: Real>(k: &CsrMatrix<T>, x: &[T], b: &[T]) -> f64 {
    let mut r2 = 0.0;
    for i in 0..k.n {
        let mut s = -b[i].to_f64_lossy();
        for (j, v) in k.row(i) {
            s += v.to_f64_lossy() * x[j].to_f64_lossy();
        }
        r2 += s * s;
    }
    let b2: f64 = b.iter().map(|v| v.to_f64_lossy().powi(2)).sum();
    if b2 > 0.0 {
        (r2 / b2).sqrt()
    } else {
        r2.sqrt()
    }
}

/// Fill-reducing column order for `k`.
pub fn fill_reducing_order<T: Real>(k: &CsrMatrix<T>) -> Result<Vec<usize>> {
    amd_order(k.n, &k.row_ptr, &k.col_idx)
}

/// Row and column scalings `r`, `c` such that `diag(r) K diag(c)` has all
/// rows and columns of unit max norm, up to a few sweeps of alternating
/// equilibration. Scalings are powers of two so they are exact.
pub fn equilibrate<T: Real>(k: &CsrMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = k.n;
    let mut r = vec![T::one(); n];
    let mut c = vec![T::one(); n];
    let pow2 = |v: T| -> T {
        if v > T::zero() && v.is_finite() {
            T::lit(2.0).powi(-(v.log2().round().to_i32().unwrap_or(0)))
        } else {
            T::one()
        }
    };
    for _ in 0..EQUILIBRATION_SWEEPS {
        let mut rmax = vec![T::zero(); n];
        let mut cmax = vec![T::zero(); n];
        for i in 0..n {
            for (j, v) in k.row(i) {
                let a = (r[i] * v * c[j]).abs();
                rmax[i] = rmax[i].max(a);
                cmax[j] = cmax[j].max(a);
            }
        }
        for i in 0..n {
            r[i] *= pow2(rmax[i].sqrt());
            c[i] *= pow2(cmax[i].sqrt());
        }
    }
    (r, c)
}

const EQUILIBRATION_SWEEPS: usize = 4;

/// Solves `K x = b` with a sparse LU factorization of the equilibrated
/// matrix.
pub fn solve_matrix<T: Real>(k: &CsrMatrix<T>, b: &[T]) -> Result<SolveReport<T>> {
    if b.len() != k.n {
        return invalid(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            k.n
        ));
    }
    let (r, c) = equilibrate(k);
    let mut scaled = k.clone();
    for i in 0..k.n {
        for p in scaled.row_ptr[i]..scaled.row_ptr[i + 1] {
            scaled.values[p] = r[i] * scaled.values[p] * c[scaled.col_idx[p]];
        }
    }
    let q = fill_reducing_order(&scaled)?;
    let lu = SparseLu::factor(&scaled, q)?;
    let rb: Vec<T> = b.iter().zip(&r).map(|(&b, &r)| b * r).collect();
    let solution: Vec<T> = lu.solve(&rb).iter().zip(&c).map(|(&y, &c)| y * c).collect();
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem {
            pivot: k.n,
            magnitude: lu.stats.min_pivot,
        });
    }
    let relative_residual = relative_residual(k, &solution, b);
    let tolerance = RESIDUAL_TOLERANCE.max(T::epsilon().to_f64_lossy() * 1e3);
    if !(relative_residual <= tolerance) {
        return Err(Error::Residual {
            residual: relative_residual,
            tolerance,
        });
    }
    log::debug!(
        "solved n = {}: residual {relative_residual:e}, nnz(L) = {}, nnz(U) = {}, off-diagonal pivots {}",
        k.n,
        lu.stats.nnz_l,
        lu.stats.nnz_u,
        lu.stats.off_diagonal_pivots
    );
    Ok(SolveReport {
        solution,
        relative_residual,
        pivots: lu.stats,
    })
}

/// Solves an assembled system; it should carry the pressure mean constraint.
pub fn solve_direct<T: Real>(system: &LinearSystem<T>) -> Result<SolveReport<T>> {
    if !system.has_mean_constraint() {
        log::warn!("solving a system without the pressure mean constraint");
    }
    solve_matrix(&system.matrix(), &system.rhs)
}

/// `σ_max / σ_min` of a sparse matrix via a dense singular value decomposition.
pub fn condition_number_matrix<T: Real>(k: &CsrMatrix<T>) -> Result<f64> {
    let n = k.n;
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: DENSE_LIMIT,
        });
    }
    if n == 0 {
        return invalid("condition number of an empty matrix");
    }
    let mut dense = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for (j, v) in k.row(i) {
            dense[(i, j)] = v.to_f64_lossy();
        }
    }
    let sv = dense
        .singular_values()
        .map_err(|e| Error::Internal(format!("singular value decomposition failed: {e:?}")))?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// Condition number of the full constrained matrix of `system`.
pub fn condition_number<T: Real>(system: &LinearSystem<T>) -> Result<f64> {
    condition_number_matrix(&system.matrix())
}
