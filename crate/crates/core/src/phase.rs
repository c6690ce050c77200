//! The additive character `e(x) = exp(2πix)` with argument reduction.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// `e(x)` for a real `x`; the argument is reduced to `[0, 1)` first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (TAU * x.rem_euclid(1.0)).sin_cos();
    Complex64::new(c, s)
}

/// `e(num/den)` evaluated from the exact residue `num mod den`.
#[inline]
pub fn e_ratio(num: i128, den: u64) -> Complex64 {
    unit_root(num.rem_euclid(den as i128) as u64, den)
}

/// `e(r/den)` for `0 ≤ r < den`, exact at quarter turns.
#[inline]
fn unit_root(r: u64, den: u64) -> Complex64 {
    if (4 * r as u128).is_multiple_of(den as u128) {
        return match (4 * r as u128) / den as u128 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (TAU * r as f64 / den as f64).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part of `n·alpha` for `alpha ∈ [0, 1)`, keeping the rounding
/// error of the product.
#[inline]
pub(crate) fn frac_mul(n: f64, alpha: f64) -> f64 {
    let p = n * alpha;
    let err = n.mul_add(alpha, -p);
    let f = p - p.floor();
    (f + err).rem_euclid(1.0)
}

/// Table `e(m/q)` for `m = 0..q`.
pub(crate) fn roots_of_unity(q: u64) -> Vec<Complex64> {
    (0..q).map(|m| unit_root(m, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_exact() {
        assert_eq!(e_ratio(1, 2), Complex64::new(-1.0, 0.0));
        assert_eq!(e_ratio(-1, 4), Complex64::new(0.0, -1.0));
        assert_eq!(roots_of_unity(4)[1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn quarter_turns() {
        let z = e(0.25);
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let z = e(-0.5);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let z = e_ratio(-7, 4);
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn frac_mul_large_products() {
        let alpha = 1.0 / 3.0;
        let f = frac_mul(3.0e8 + 1.0, alpha);
        assert!((f - 1.0 / 3.0).abs() < 1e-8);
    }
}
