//! Compressed sparse rows, used only for the hot matrix-vector products of
//! time propagation.

use super::linalg::{CMatrix, C64};

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn from_dense(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            for c in 0..m.ncols() {
                let v = m[[r, c]];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    /// out += scale * A x
    #[inline]
    pub fn mul_add(&self, scale: C64, x: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate().take(self.dim) {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o += scale * acc;
        }
    }

    pub fn to_dense_into(&self, scale: C64, out: &mut CMatrix) {
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[[r, self.cols[k]]] += scale * self.vals[k];
            }
        }
    }
}
