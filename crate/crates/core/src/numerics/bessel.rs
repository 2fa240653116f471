use crate::error::{Error, Result};

/// Largest |l| accepted by [`bessel_j`].
pub const MAX_BESSEL_ORDER: i32 = 64;

/// Integer order of a Bessel function of the first kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder(i32);

impl BesselOrder {
    pub fn new(order: i32) -> Result<Self> {
        if order.abs() > MAX_BESSEL_ORDER {
            return Err(Error::BesselOrderOutOfRange {
                order: order as i64,
                max: MAX_BESSEL_ORDER,
            });
        }
        Ok(Self(order))
    }

    pub fn get(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for BesselOrder {
    type Error = Error;

    fn try_from(order: i32) -> Result<Self> {
        Self::new(order)
    }
}

/// J_l(x), the Bessel function of the first kind of integer order.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { value: x });
    }
    Ok(jn(order.get(), x))
}

/// Unchecked J_l(x) for orders already known to be admissible.
pub(crate) fn jn(order: i32, x: f64) -> f64 {
    let n = order.unsigned_abs();
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    let odd_flips = (order < 0) as u32 + (x < 0.0) as u32;
    let value = jn_nonneg(n, x.abs());
    if n % 2 == 1 && odd_flips == 1 {
        -value
    } else {
        value
    }
}

fn jn_nonneg(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= 4.0 {
        series(n, x)
    } else {
        miller(n, x)
    }
}

/// Ascending power series; cancellation is harmless for x <= 4.
fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence, normalised with J_0 + 2 sum_k J_2k = 1.
fn miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut start = (top + 20.0 + 6.0 * top.sqrt()).ceil() as u32;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut current = 1e-300; // J_k
    let mut result = 0.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let previous = k as f64 * two_over_x * current - next;
        next = current;
        current = previous;
        // `current` now holds J_{k-1}
        if k - 1 == n {
            result = current;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            result *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += current;
    result / norm
}

/// Smallest positive root of J_0.
pub fn first_zero_j0() -> f64 {
    // Newton on J_0 with J_0' = -J_1, started inside the basin of the root.
    let mut x = 2.4;
    for _ in 0..50 {
        let step = jn(0, x) / -jn(1, x);
        x -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    x
}

/// Location of the first maximum of J_1 on (0, 3).
pub fn argmax_j1() -> f64 {
    // J_1' = (J_0 - J_2) / 2 changes sign from + to - at the maximum.
    let slope = |x: f64| jn(0, x) - jn(2, x);
    let (mut lo, mut hi) = (1.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trapezoidal rule on the periodic integral representation
    /// J_n(x) = (1 / 2pi) int_0^{2pi} cos(n t - x sin t) dt, which converges
    /// geometrically in the number of nodes.
    fn quadrature(n: i32, x: f64) -> f64 {
        let nodes = 512;
        let h = std::f64::consts::TAU / nodes as f64;
        (0..nodes)
            .map(|k| {
                let t = k as f64 * h;
                (n as f64 * t - x * t.sin()).cos()
            })
            .sum::<f64>()
            / nodes as f64
    }

    fn order(l: i32) -> BesselOrder {
        BesselOrder::new(l).unwrap()
    }

    #[test]
    fn value_at_origin() {
        assert_eq!(bessel_j(order(0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(order(3), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn quoted_values() {
        assert!((bessel_j(order(1), 1.20242).unwrap() - 0.499).abs() < 5e-4);
        assert!((bessel_j(order(1), 1.832).unwrap() - 0.582).abs() < 5e-4);
        assert!(bessel_j(order(0), 2.40483).unwrap().abs() < 5e-6);
    }

    #[test]
    fn rejects_large_orders_and_non_finite_arguments() {
        assert!(matches!(
            BesselOrder::new(65),
            Err(Error::BesselOrderOutOfRange { order: 65, .. })
        ));
        assert!(BesselOrder::try_from(-64).is_ok());
        assert!(bessel_j(order(0), f64::NAN).is_err());
    }

    #[test]
    fn matches_quadrature_on_a_grid() {
        for l in -64..=64 {
            for i in 0..=80 {
                let x = -20.0 + 0.5 * i as f64;
                let diff = (jn(l, x) - quadrature(l, x)).abs();
                assert!(diff <= 1e-12, "l={l} x={x} diff={diff:e}");
            }
        }
    }

    #[test]
    fn zero_and_peak_locations() {
        let zero = first_zero_j0();
        assert!(jn(0, zero).abs() < 1e-10);
        assert!((zero - 2.40483).abs() < 5e-6);
        let peak = argmax_j1();
        assert!(jn(1, peak) >= jn(1, peak + 1e-3));
        assert!(jn(1, peak) >= jn(1, peak - 1e-3));
    }
}
