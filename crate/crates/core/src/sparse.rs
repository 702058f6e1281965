//! Compressed sparse row storage and deterministic triplet compression.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Sums duplicate `(row, col)` entries in their input order, so equal
    /// input sequences give bitwise equal matrices.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut items: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        // stable: equal keys keep insertion order
        items.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(items.len());
        let mut values: Vec<T> = Vec::with_capacity(items.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in items {
            assert!(
                r < n && c < n,
                "entry ({r}, {c}) outside a {n} x {n} matrix"
            );
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, T::one())))
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn quadratic_form(&self, x: &[T]) -> T {
        self.mul_vec(x).iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.n,
            (0..self.n).flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v))),
        )
    }

    /// `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0usize; self.n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        Self::from_triplets(
            self.n,
            (0..self.n).flat_map(|i| {
                let inv = &inv;
                self.row(i).map(move |(j, v)| (inv[i], inv[j], v))
            }),
        )
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n * self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[i * self.n + j] = v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}
