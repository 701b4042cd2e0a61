//! Exact rational scalars used throughout the crate.
//!
//! All geometry here lives in lattices of rank at most 10 with tiny Gram
//! entries, so `i128`-backed ratios never get anywhere near overflow while
//! staying much faster than bignums.

use num::rational::Ratio;
use num::{One, Signed, Zero};

pub type Rat = Ratio<i128>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n as i128, d as i128)
}

pub fn int(n: i64) -> Rat {
    Ratio::from_integer(n as i128)
}

pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one() || x.numer().is_zero()
}

/// Rounds to the nearest integer, ties toward zero.
pub fn round_nearest(x: &Rat) -> i128 {
    let floor = x.floor().to_integer();
    let frac = x - Ratio::from_integer(floor);
    let half = Ratio::new(1i128, 2i128);
    if frac > half || (frac == half && x.is_negative()) {
        floor + 1
    } else {
        floor
    }
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (g, _, _) = ext_gcd(a as i128, b as i128);
    g as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_nearest(&rat(3, 2)), 1); // tie toward zero
        assert_eq!(round_nearest(&rat(-3, 2)), -1);
        assert_eq!(round_nearest(&rat(7, 4)), 2);
        assert_eq!(round_nearest(&rat(-7, 4)), -2);
        assert_eq!(round_nearest(&rat(1, 3)), 0);
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12, 18), (-4, 6), (0, 5), (7, 0), (-9, -6)] {
            let (g, x, y) = ext_gcd(a, b);
            assert!(g >= 0);
            assert_eq!(a * x + b * y, g);
        }
    }
}
