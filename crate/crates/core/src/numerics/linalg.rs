//! Small dense complex linear-algebra helpers on top of `ndarray`.

use ndarray::{Array1, Array2, Axis};
pub use num_complex::Complex64 as C64;

pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    ndarray::linalg::kron(a, b)
}

/// Entrywise max |a - b|.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &dagger(m))
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_abs_diff(&dagger(u).dot(u), &identity(u.nrows()))
}

/// Induced 1-norm (max column sum).
pub fn one_norm(m: &CMatrix) -> f64 {
    m.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().sum()
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// LU factorisation with partial pivoting, stored compactly.
struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

fn lu(a: &CMatrix) -> Lu {
    let n = a.nrows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[[i, k]].norm().total_cmp(&lu[[j, k]].norm()))
            .unwrap_or(k);
        if pivot != k {
            for c in 0..n {
                lu.swap([k, c], [pivot, c]);
            }
            perm.swap(k, pivot);
            swaps += 1;
        }
        let d = lu[[k, k]];
        if d.norm() == 0.0 {
            continue;
        }
        for r in k + 1..n {
            let f = lu[[r, k]] / d;
            lu[[r, k]] = f;
            if f.norm() == 0.0 {
                continue;
            }
            for c in k + 1..n {
                let v = lu[[k, c]];
                lu[[r, c]] -= f * v;
            }
        }
    }
    Lu { lu, perm, swaps }
}

pub fn determinant(a: &CMatrix) -> C64 {
    let f = lu(a);
    let det = f.lu.diag().iter().product::<C64>();
    if f.swaps % 2 == 1 {
        -det
    } else {
        det
    }
}

/// Solves `a x = b` for a square, non-singular `a`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let f = lu(a);
    let mut x = Array2::zeros(b.raw_dim());
    for (r, &p) in f.perm.iter().enumerate() {
        x.row_mut(r).assign(&b.row(p));
    }
    for col in 0..b.ncols() {
        for r in 0..n {
            let mut s = x[[r, col]];
            for c in 0..r {
                s -= f.lu[[r, c]] * x[[c, col]];
            }
            x[[r, col]] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[[r, col]];
            for c in r + 1..n {
                s -= f.lu[[r, c]] * x[[c, col]];
            }
            x[[r, col]] = s / f.lu[[r, r]];
        }
    }
    x
}
