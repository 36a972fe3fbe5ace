//! Independent oracles for the integration tests.
//!
//! Nothing in this module touches the library's own numeric paths: erf
//! comes from a Maclaurin series and a continued fraction, binomial
//! quantities from exact big-integer arithmetic, and large ln-gamma
//! values from the Stirling series. Agreement between these and the
//! implementation is the point of the tests that use them.

// each test binary uses its own subset of the oracles
#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Compensated accumulator (the oracles must not drift either).
#[derive(Default, Clone, Copy)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

// ---------------------------------------------------------------------------
// erf oracle: series + continued fraction
// ---------------------------------------------------------------------------

/// erf by its Maclaurin series; no cancellation trouble for |x| <= 2.
fn erf_series(x: f64) -> f64 {
    let mut sum = Kahan::default();
    let mut power = x; // (-1)^k x^(2k+1) / k!
    let mut k = 0u32;
    loop {
        let contribution = power / (2 * k + 1) as f64;
        sum.add(contribution);
        if contribution.abs() < 1e-22 {
            break;
        }
        k += 1;
        power *= -x * x / k as f64;
    }
    TWO_OVER_SQRT_PI * sum.value()
}

/// erfc by the Laplace continued fraction, evaluated backward; accurate
/// for x >= 2.
fn erfc_continued_fraction(x: f64) -> f64 {
    let mut tail = 0.0;
    for m in (1..=200u32).rev() {
        tail = (m as f64 / 2.0) / (x + tail);
    }
    (-x * x).exp() / (x + tail) * (TWO_OVER_SQRT_PI / 2.0)
}

/// Reference erf for any finite x.
pub fn erf_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return -erf_oracle(-x);
    }
    if x <= 2.0 {
        erf_series(x)
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

/// Reference erfc, keeping relative precision in the right tail.
pub fn erfc_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_oracle(-x);
    }
    if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Reference Gaussian upper tail P(Z >= z).
pub fn normal_upper_oracle(z: f64) -> f64 {
    0.5 * erfc_oracle(z / SQRT_2)
}

// ---------------------------------------------------------------------------
// big-integer binomial machinery
// ---------------------------------------------------------------------------

/// Exact C(n, k).
pub fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..k {
        result *= n - i;
        result /= i + 1;
    }
    result
}

/// ln of a positive big integer, good to a few 1e-16 relative.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53 bits fit f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact-rational value of num/den rounded into f64.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // scale the quotient to ~2^64 so the mantissa is full, then undo
    let scale = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if scale >= 0 {
        (num << scale as u64) / den
    } else {
        num / (den << (-scale) as u64)
    };
    q.to_f64().expect("scaled quotient is ~64 bits") * (-scale as f64).exp2()
}

/// Exact P(X >= k) for X ~ Binomial(n, 1/2), as the correctly rounded f64.
pub fn exact_fair_upper_tail(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    let mut term = big_binomial(n, k);
    let mut sum = BigUint::zero();
    for j in k..=n {
        sum += &term;
        if j < n {
            term *= n - j;
            term /= j + 1;
        }
    }
    ratio_to_f64(&sum, &(BigUint::one() << n))
}

/// Exact P(X >= k) for X ~ Binomial(n, p) with dyadic p = num / 2^bits.
pub fn exact_dyadic_upper_tail(n: u64, k: u64, p_num: u64, p_bits: u32) -> f64 {
    assert!(k <= n);
    assert!(p_num <= 1u64 << p_bits);
    let num = BigUint::from(p_num);
    let q = BigUint::from((1u64 << p_bits) - p_num);

    let mut coeff = big_binomial(n, k);
    let mut p_power = num.pow(k as u32);
    let mut q_power = q.pow((n - k) as u32);
    let mut sum = BigUint::zero();
    for j in k..=n {
        sum += &coeff * &p_power * &q_power;
        if j < n {
            coeff *= n - j;
            coeff /= j + 1;
            p_power *= &num;
            if !q.is_zero() {
                q_power /= &q; // exact: q_power is a power of q
            }
        }
    }
    ratio_to_f64(&sum, &(BigUint::one() << (p_bits as u64 * n)))
}

// ---------------------------------------------------------------------------
// Stirling ln-gamma for huge binomial coefficients
// ---------------------------------------------------------------------------

/// ln Gamma(x) by the Stirling series with six Bernoulli terms; relative
/// error is far below 1e-15 for x >= 100.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    assert!(x >= 100.0, "Stirling oracle needs a large argument");
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360_360.0)))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// ln C(n, k) when n, k and n-k are all large.
pub fn lnc_stirling(n: u64, k: u64) -> f64 {
    ln_gamma_stirling((n + 1) as f64)
        - ln_gamma_stirling((k + 1) as f64)
        - ln_gamma_stirling((n - k + 1) as f64)
}

/// ln C(n, k) for small k: sum of ln(n - i) minus ln k!.
pub fn lnc_small_k(n: u64, k: u64) -> f64 {
    assert!(k <= 20, "exact factorial table stops at 20!");
    let mut sum = Kahan::default();
    for i in 0..k {
        sum.add(((n - i) as f64).ln());
    }
    let mut factorial = 1u64;
    for i in 2..=k {
        factorial *= i;
    }
    sum.value() - (factorial as f64).ln()
}
