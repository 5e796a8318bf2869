//! Bisection over the ordered lattice of `f64` values.
//!
//! Splitting on the integer key of each float instead of on the arithmetic
//! midpoint gives at most 64 steps for any bracket, including brackets with
//! infinite ends, and always stops at two adjacent floats.

fn key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        bits ^ i64::MAX
    } else {
        bits
    }
}

fn from_key(k: i64) -> f64 {
    if k < 0 {
        f64::from_bits((k ^ i64::MAX) as u64)
    } else {
        f64::from_bits(k as u64)
    }
}

/// Midpoint of `lo` and `hi` on the float lattice.
pub fn lattice_mid(lo: f64, hi: f64) -> f64 {
    let (a, b) = (key(lo) as i128, key(hi) as i128);
    from_key((a + (b - a) / 2) as i64)
}

/// Given `pred(lo) == true` and `pred(hi) == false` for a predicate that is
/// true on a prefix of `[lo, hi]`, returns the last true and first false
/// lattice points. The caller is responsible for checking the end values.
pub fn last_true(mut lo: f64, mut hi: f64, mut pred: impl FnMut(f64) -> bool) -> (f64, f64) {
    debug_assert!(lo <= hi);
    loop {
        let mid = lattice_mid(lo, hi);
        if mid == lo || mid == hi {
            return (lo, hi);
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Fixed-step arithmetic bisection; used where the step budget is part of the contract.
pub fn bisect_steps(
    mut inside: f64,
    mut outside: f64,
    steps: usize,
    mut pred: impl FnMut(f64) -> bool,
) -> (f64, f64) {
    for _ in 0..steps {
        let mid = 0.5 * (inside + outside);
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    (inside, outside)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_monotone_across_zero_and_infinity() {
        let xs = [
            f64::NEG_INFINITY,
            -1e300,
            -1.0,
            -f64::MIN_POSITIVE,
            -0.0,
            0.0,
            5e-324,
            1.0,
            1e300,
            f64::INFINITY,
        ];
        for w in xs.windows(2) {
            assert!(key(w[0]) < key(w[1]), "{} vs {}", w[0], w[1]);
            assert_eq!(from_key(key(w[0])).to_bits(), w[0].to_bits());
        }
    }

    #[test]
    fn finds_sqrt_two_to_adjacent_floats() {
        let (lo, hi) = last_true(0.0, 4.0, |x| x * x < 2.0);
        assert!(lo * lo < 2.0 && hi * hi >= 2.0);
        assert_eq!(lo.next_up(), hi);
    }

    #[test]
    fn infinite_brackets_terminate() {
        let (lo, hi) = last_true(f64::NEG_INFINITY, f64::INFINITY, |x| x < 3.5);
        assert!(lo < 3.5 && hi >= 3.5);
        assert_eq!(hi, 3.5);
    }
}
