use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

const UNSET: usize = usize::MAX;

/// Pivots below this many machine epsilons times the largest matrix entry
/// are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e4;

/// Fraction of the largest candidate the diagonal entry must reach to be
/// taken as pivot.
pub const DIAGONAL_PREFERENCE: f64 = 0.1;

/// Counters collected during factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotStats {
    pub min_pivot: f64,
    pub max_pivot: f64,
    /// Steps where the diagonal was rejected in favour of another row.
    pub off_diagonal_pivots: usize,
    pub nnz_l: usize,
    pub nnz_u: usize,
}

/// Left-looking sparse LU with threshold partial pivoting, `P A Q = L U`.
///
/// `L` is unit lower triangular with the unit diagonal stored first in each
/// column, `U` is upper triangular with its diagonal stored last.
#[derive(Debug, Clone)]
pub struct SparseLu<T> {
    n: usize,
    /// Column order: step `k` eliminates column `q[k]`.
    q: Vec<usize>,
    /// Row `i` of `A` is row `pinv[i]` of `P A`.
    pinv: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<T>,
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<T>,
    pub stats: PivotStats,
}

struct Workspace {
    mark: Vec<usize>,
    stamp: usize,
    order: Vec<usize>,
    stack: Vec<(usize, usize)>,
}

impl<T: Real> SparseLu<T> {
    /// Factorizes the matrix whose compressed columns are given; `q` is the
    /// column elimination order.
    pub fn factor_csc(
        n: usize,
        col_ptr: &[usize],
        row_idx: &[usize],
        values: &[T],
        q: Vec<usize>,
    ) -> Result<Self> {
        let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !scale.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let tiny = scale * T::epsilon() * T::lit(PIVOT_TOLERANCE);
        let prefer = T::lit(DIAGONAL_PREFERENCE);

        let mut lu = SparseLu {
            n,
            q,
            pinv: vec![UNSET; n],
            lp: vec![0; n + 1],
            li: Vec::new(),
            lx: Vec::new(),
            up: vec![0; n + 1],
            ui: Vec::new(),
            ux: Vec::new(),
            stats: PivotStats {
                min_pivot: f64::INFINITY,
                max_pivot: 0.0,
                off_diagonal_pivots: 0,
                nnz_l: 0,
                nnz_u: 0,
            },
        };
        let mut x = vec![T::zero(); n];
        let mut ws = Workspace {
            mark: vec![0; n],
            stamp: 0,
            order: Vec::with_capacity(n),
            stack: Vec::new(),
        };

        for k in 0..n {
            lu.lp[k] = lu.li.len();
            lu.up[k] = lu.ui.len();
            let col = lu.q[k];
            let rows = &row_idx[col_ptr[col]..col_ptr[col + 1]];
            let vals = &values[col_ptr[col]..col_ptr[col + 1]];

            lu.reach(rows, &mut ws);
            for &i in &ws.order {
                x[i] = T::zero();
            }
            for (&i, &v) in rows.iter().zip(vals) {
                x[i] += v;
            }
            // ws.order is topological: every row is final before it is used
            for &j in &ws.order {
                let jj = lu.pinv[j];
                if jj == UNSET {
                    continue;
                }
                let xj = x[j];
                if xj == T::zero() {
                    continue;
                }
                let range = lu.lp[jj] + 1..lu.lp[jj + 1];
                for (&i, &l) in lu.li[range.clone()].iter().zip(&lu.lx[range]) {
                    x[i] -= l * xj;
                }
            }

            let mut ipiv = UNSET;
            let mut best = -T::one();
            for &i in &ws.order {
                if lu.pinv[i] == UNSET {
                    let t = x[i].abs();
                    if t > best {
                        best = t;
                        ipiv = i;
                    }
                } else {
                    lu.ui.push(lu.pinv[i]);
                    lu.ux.push(x[i]);
                }
            }
            if ipiv == UNSET || !(best > tiny) {
                return Err(Error::SingularSystem {
                    pivot: k,
                    magnitude: best.max(T::zero()).to_f64_lossy(),
                });
            }
            if lu.pinv[col] == UNSET && x[col].abs() >= prefer * best {
                ipiv = col;
            } else if ipiv != col {
                lu.stats.off_diagonal_pivots += 1;
            }
            let pivot = x[ipiv];
            let mag = pivot.abs().to_f64_lossy();
            lu.stats.min_pivot = lu.stats.min_pivot.min(mag);
            lu.stats.max_pivot = lu.stats.max_pivot.max(mag);
            lu.ui.push(k);
            lu.ux.push(pivot);
            lu.pinv[ipiv] = k;
            lu.li.push(ipiv);
            lu.lx.push(T::one());
            for &i in &ws.order {
                if lu.pinv[i] == UNSET {
                    lu.li.push(i);
                    lu.lx.push(x[i] / pivot);
                }
                x[i] = T::zero();
            }
        }
        lu.lp[n] = lu.li.len();
        lu.up[n] = lu.ui.len();
        for i in lu.li.iter_mut() {
            *i = lu.pinv[*i];
        }
        lu.stats.nnz_l = lu.li.len();
        lu.stats.nnz_u = lu.ui.len();
        Ok(lu)
    }

    /// Factorizes a row-compressed matrix with column order `q`.
    pub fn factor(a: &CsrMatrix<T>, q: Vec<usize>) -> Result<Self> {
        let t = a.transpose();
        Self::factor_csc(a.n, &t.row_ptr, &t.col_idx, &t.values, q)
    }

    /// Rows reachable from the pattern of the right-hand side through the
    /// columns of `L` eliminated so far, in topological order.
    fn reach(&self, rows: &[usize], ws: &mut Workspace) {
        ws.stamp += 1;
        let stamp = ws.stamp;
        ws.order.clear();
        for &start in rows {
            if ws.mark[start] == stamp {
                continue;
            }
            ws.mark[start] = stamp;
            ws.stack.push((start, self.child_begin(start)));
            while let Some(&(j, mut next)) = ws.stack.last() {
                let end = self.child_end(j);
                let mut child = None;
                while next < end {
                    let i = self.li[next];
                    next += 1;
                    if ws.mark[i] != stamp {
                        child = Some(i);
                        break;
                    }
                }
                let top = ws.stack.len() - 1;
                ws.stack[top].1 = next;
                match child {
                    Some(i) => {
                        ws.mark[i] = stamp;
                        ws.stack.push((i, self.child_begin(i)));
                    }
                    None => {
                        ws.stack.pop();
                        ws.order.push(j);
                    }
                }
            }
        }
        ws.order.reverse();
    }

    fn child_begin(&self, j: usize) -> usize {
        match self.pinv[j] {
            UNSET => 0,
            jj => self.lp[jj] + 1,
        }
    }

    fn child_end(&self, j: usize) -> usize {
        match self.pinv[j] {
            UNSET => 0,
            jj => self.lp[jj + 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length");
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            y[self.pinv[i]] = b[i];
        }
        for j in 0..n {
            let yj = y[j];
            if yj == T::zero() {
                continue;
            }
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p]] -= self.lx[p] * yj;
            }
        }
        for k in (0..n).rev() {
            let last = self.up[k + 1] - 1;
            y[k] /= self.ux[last];
            let yk = y[k];
            if yk == T::zero() {
                continue;
            }
            for p in self.up[k]..last {
                y[self.ui[p]] -= self.ux[p] * yk;
            }
        }
        let mut x = vec![T::zero(); n];
        for k in 0..n {
            x[self.q[k]] = y[k];
        }
        x
    }
}
