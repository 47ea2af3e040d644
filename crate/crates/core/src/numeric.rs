//! Small numerical helpers shared across modules.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// Below this argument `log n!` is taken from the exact big-integer factorial.
const EXACT_FACTORIAL_LIMIT: u64 = 64;

/// Natural log of `n!`: exact big-integer product for `n < 64`, log-gamma above.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < EXACT_FACTORIAL_LIMIT {
        let mut acc = BigUint::one();
        for k in 2..=n {
            acc *= k;
        }
        log_biguint(&acc)
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

/// `log n!` for every `n` in `0..=n_max`.
pub fn log_factorials(n_max: usize) -> Vec<f64> {
    (0..=n_max as u64).map(log_factorial).collect()
}

/// Natural log of a big unsigned integer without overflowing `f64`.
///
/// Returns `-inf` for zero.
pub fn log_biguint(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return value.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    // keep 64 leading bits, account for the shift in log2
    let shift = bits - 64;
    let head = (value >> shift).to_f64().unwrap_or(f64::INFINITY);
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Pairwise (tree) reduction; the reduction order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Geometric grid of `n` points between `lo` and `hi` (both > 0).
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_factorial_exact_and_gamma_agree_at_the_seam() {
        let exact = {
            let mut acc = BigUint::one();
            for k in 2..=64u64 {
                acc *= k;
            }
            log_biguint(&acc)
        };
        assert!((exact - log_factorial(64)).abs() < 1e-10 * exact);
        assert_eq!(log_factorial(0), 0.0);
        assert!((log_factorial(5) - 120f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_biguint_large() {
        let big = BigUint::one() << 5000u32;
        let expected = 5000.0 * std::f64::consts::LN_2;
        assert!((log_biguint(&big) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = neumaier_sum([1e16, 1.0, -1e16]);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((ls_slope(&xs, &ys) - 2.0).abs() < 1e-15);
    }
}
