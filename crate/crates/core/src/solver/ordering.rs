use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::amd;
use faer::sparse::SymbolicSparseColMatRef;

use crate::error::{Error, Result};

/// Indices with more than this multiple of the median degree count as dense.
const DENSE_FACTOR: usize = 10;

/// Approximate minimum degree ordering of the pattern of `A + Aᵀ`, given the
/// compressed columns (or rows) of `A`. Returns `perm` with `perm[k]` the
/// original index eliminated at step `k`.
///
/// Indices coupled to far more unknowns than a typical one (such as a
/// mean-value multiplier) are left out of the ordering and eliminated last.
pub fn amd_order(n: usize, col_ptr: &[usize], row_idx: &[usize]) -> Result<Vec<usize>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut degree = vec![0usize; n];
    for j in 0..n {
        for &i in &row_idx[col_ptr[j]..col_ptr[j + 1]] {
            if i != j {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }
    let mut sorted = degree.clone();
    sorted.sort_unstable();
    let median = sorted[n / 2];
    let threshold = (DENSE_FACTOR * median).max(16);
    let dense: Vec<bool> = degree.iter().map(|&d| d > threshold).collect();

    let mut local = vec![usize::MAX; n];
    let mut kept = Vec::with_capacity(n);
    for j in 0..n {
        if !dense[j] {
            local[j] = kept.len();
            kept.push(j);
        }
    }
    let m = kept.len();
    let mut sub_ptr = Vec::with_capacity(m + 1);
    let mut sub_idx = Vec::with_capacity(row_idx.len());
    sub_ptr.push(0);
    for &j in &kept {
        sub_idx.extend(
            row_idx[col_ptr[j]..col_ptr[j + 1]]
                .iter()
                .filter(|&&i| !dense[i])
                .map(|&i| local[i]),
        );
        sub_ptr.push(sub_idx.len());
    }

    let mut perm = Vec::with_capacity(n);
    if m > 0 {
        let pattern = SymbolicSparseColMatRef::new_unsorted_checked(m, m, &sub_ptr, None, &sub_idx);
        let mut sub_perm = vec![0usize; m];
        let mut sub_inv = vec![0usize; m];
        let mut mem = MemBuffer::new(amd::order_maybe_unsorted_scratch::<usize>(m, sub_idx.len()));
        amd::order_maybe_unsorted(
            &mut sub_perm,
            &mut sub_inv,
            pattern,
            amd::Control::default(),
            MemStack::new(&mut mem),
        )
        .map_err(|e| Error::Internal(format!("minimum degree ordering failed: {e:?}")))?;
        perm.extend(sub_perm.iter().map(|&k| kept[k]));
    }
    perm.extend((0..n).filter(|&j| dense[j]));
    Ok(perm)
}

/// Checks that `perm` is a permutation of `0..n`.
pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}
