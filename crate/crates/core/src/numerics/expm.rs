use super::linalg::{all_finite, hermiticity_defect, identity, one_norm, solve, CMatrix, C64};
use crate::error::{Error, Result};

/// Admitted max |H - H^dag| for inputs of [`expm_skew_hermitian`].
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Pade kernel.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / C64::from(2f64.powi(squarings));
    let b = |k: usize| C64::from(PADE13[k]);
    let eye = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a.dot(&(a6.dot(&inner_u) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1)));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&inner_v) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let mut r = solve(&(&v - &u), &(&v + &u));
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    r
}

/// exp(-i H tau) for a Hermitian `h`.
pub fn expm_skew_hermitian(h: &CMatrix, tau: f64) -> Result<CMatrix> {
    if !all_finite(h) {
        return Err(Error::NonFinite { value: f64::NAN });
    }
    if !tau.is_finite() {
        return Err(Error::NonFinite { value: tau });
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITICITY_TOLERANCE {
        return Err(Error::NonHermitian { defect });
    }
    Ok(expm(&(h * C64::new(0.0, -tau))))
}
