//! Multi-subsystem index arithmetic.
//!
//! Subsystem ordering follows the declared `dims` order with big-endian
//! tensor indexing: for dims (d_0, ..., d_{n-1}) the flat index of the
//! multi-index (i_0, ..., i_{n-1}) is `i_0*s_0 + ... + i_{n-1}` with
//! `s_k = d_{k+1} * ... * d_{n-1}`. This matches the Kronecker-product
//! convention of [`QMatrix::kron`](super::matrix::QMatrix::kron).

use super::matrix::{C64, QMatrix};

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn flat(multi: &[usize], strides: &[usize]) -> usize {
    multi.iter().zip(strides).map(|(i, s)| i * s).sum()
}

fn unflat(mut idx: usize, strides: &[usize], dims: &[usize], out: &mut [usize]) {
    for k in 0..dims.len() {
        out[k] = idx / strides[k];
        idx %= strides[k];
    }
}

/// Enumerate all multi-indices over `dims` (big-endian counting order).
fn multi_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total = total_dim(dims);
    let s = strides(dims);
    (0..total).map(move |i| {
        let mut m = vec![0usize; dims.len()];
        unflat(i, &s, dims, &mut m);
        m
    })
}

/// Partial trace over all subsystems NOT listed in `keep`.
/// `keep` must be strictly ascending; the kept subsystems retain their
/// relative order. Returns the reduced matrix and the kept dims.
pub fn partial_trace_raw(m: &QMatrix, dims: &[usize], keep: &[usize]) -> (QMatrix, Vec<usize>) {
    debug_assert_eq!(m.rows(), total_dim(dims));
    debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let full_strides = strides(dims);
    let out_dim = total_dim(&keep_dims);
    let mut out = QMatrix::zeros(out_dim, out_dim);

    let keep_strides = strides(&keep_dims);
    for rk in multi_indices(&keep_dims) {
        for ck in multi_indices(&keep_dims) {
            let mut acc = C64::new(0.0, 0.0);
            for t in multi_indices(&traced_dims) {
                let mut row = 0usize;
                let mut col = 0usize;
                for (slot, &sys) in keep.iter().enumerate() {
                    row += rk[slot] * full_strides[sys];
                    col += ck[slot] * full_strides[sys];
                }
                for (slot, &sys) in traced.iter().enumerate() {
                    row += t[slot] * full_strides[sys];
                    col += t[slot] * full_strides[sys];
                }
                acc += m[(row, col)];
            }
            out[(flat(&rk, &keep_strides), flat(&ck, &keep_strides))] = acc;
        }
    }
    (out, keep_dims)
}

/// Reorder subsystems of a square operator. `perm[new_slot] = old_slot`;
/// the output dims are `perm.map(|old| dims[old])`.
pub fn permute_raw(m: &QMatrix, dims: &[usize], perm: &[usize]) -> (QMatrix, Vec<usize>) {
    debug_assert_eq!(m.rows(), total_dim(dims));
    let new_dims: Vec<usize> = perm.iter().map(|&o| dims[o]).collect();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let map = |new_flat: usize| -> usize {
        let mut multi = vec![0usize; new_dims.len()];
        unflat(new_flat, &new_strides, &new_dims, &mut multi);
        let mut old = 0usize;
        for (slot, &o) in perm.iter().enumerate() {
            old += multi[slot] * old_strides[o];
        }
        old
    };
    let n = m.rows();
    let out = QMatrix::from_fn(n, n, |r, c| m[(map(r), map(c))]);
    (out, new_dims)
}

/// Reorder subsystems of a rectangular operator whose row (output) and
/// column (input) spaces factor over the same subsystem slots with
/// possibly different dimensions. `perm[new_slot] = old_slot` is applied
/// to both sides.
pub fn permute_op(
    m: &QMatrix,
    row_dims: &[usize],
    col_dims: &[usize],
    perm: &[usize],
) -> (QMatrix, Vec<usize>, Vec<usize>) {
    debug_assert_eq!(m.rows(), total_dim(row_dims));
    debug_assert_eq!(m.cols(), total_dim(col_dims));
    let new_rows: Vec<usize> = perm.iter().map(|&o| row_dims[o]).collect();
    let new_cols: Vec<usize> = perm.iter().map(|&o| col_dims[o]).collect();
    let map = |new_flat: usize, new_dims: &[usize], old_strides: &[usize]| -> usize {
        let new_strides = strides(new_dims);
        let mut multi = vec![0usize; new_dims.len()];
        unflat(new_flat, &new_strides, new_dims, &mut multi);
        perm.iter()
            .enumerate()
            .map(|(slot, &o)| multi[slot] * old_strides[o])
            .sum()
    };
    let row_strides = strides(row_dims);
    let col_strides = strides(col_dims);
    let out = QMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        m[(map(r, &new_rows, &row_strides), map(c, &new_cols, &col_strides))]
    });
    (out, new_rows, new_cols)
}

/// Reorder subsystems of a state vector; same convention as [`permute_raw`].
pub fn permute_vec(v: &[C64], dims: &[usize], perm: &[usize]) -> (Vec<C64>, Vec<usize>) {
    let new_dims: Vec<usize> = perm.iter().map(|&o| dims[o]).collect();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    let mut multi = vec![0usize; new_dims.len()];
    for (new_flat, slot) in out.iter_mut().enumerate() {
        unflat(new_flat, &new_strides, &new_dims, &mut multi);
        let mut old = 0usize;
        for (s, &o) in perm.iter().enumerate() {
            old += multi[s] * old_strides[o];
        }
        *slot = v[old];
    }
    (out, new_dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_big_endian() {
        assert_eq!(strides(&[2, 3, 4]), vec![12, 4, 1]);
    }

    #[test]
    fn trace_out_product() {
        // rho (x) tau, keep first -> rho
        let rho = QMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]);
        let tau = QMatrix::from_real(2, 2, &[0.6, 0.0, 0.0, 0.4]);
        let full = rho.kron(&tau);
        let (red, dims) = partial_trace_raw(&full, &[2, 2], &[0]);
        assert_eq!(dims, vec![2]);
        assert!(red.max_diff(&rho) < 1e-14);
        let (red, _) = partial_trace_raw(&full, &[2, 2], &[1]);
        assert!(red.max_diff(&tau) < 1e-14);
    }

    #[test]
    fn permute_roundtrip_and_swap() {
        let a = QMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = QMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 1.0, 5.0, 0.0, 0.0, 0.0, 2.0]);
        let ab = a.kron(&b);
        let (ba, dims) = permute_raw(&ab, &[2, 3], &[1, 0]);
        assert_eq!(dims, vec![3, 2]);
        assert!(ba.max_diff(&b.kron(&a)) < 1e-14);
        let (back, _) = permute_raw(&ba, &[3, 2], &[1, 0]);
        assert!(back.max_diff(&ab) < 1e-14);
    }

    #[test]
    fn trace_composes() {
        // tracing out one system then another equals tracing both at once
        let m = QMatrix::from_fn(8, 8, |r, c| C64::new((r + 2 * c) as f64, (r as f64) - (c as f64)));
        let (two_step, _) = partial_trace_raw(&m, &[2, 2, 2], &[0, 2]);
        let (one_more, _) = partial_trace_raw(&two_step, &[2, 2], &[1]);
        let (direct, _) = partial_trace_raw(&m, &[2, 2, 2], &[2]);
        assert!(one_more.max_diff(&direct) < 1e-12);
    }
}
