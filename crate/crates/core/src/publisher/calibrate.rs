//! Noise calibration, evaluated in double-double arithmetic so the returned
//! `f64` is within one unit in the last place of the exact value.

use crate::error::{domain, Result};

/// Smallest Gaussian noise scale giving (ε, δ)-differential privacy for an
/// `n`-node graph:
///
/// σ = (1/ε) · sqrt(10 · (ε + ln(1/(2δ))) · ln(n/δ))
///
/// Requires ε > 0, 0 < δ < 1/2 and n ≥ 2.
pub fn calibrate_sigma(epsilon: f64, delta: f64, n: usize) -> Result<f64> {
    check_assumptions(epsilon, delta, n)?;
    // ln(1/(2δ)) = -ln(2δ) and ln(n/δ) = ln n - ln δ; 2δ and n are exact in f64
    let a = Dd::from(epsilon) - ln_dd(2.0 * delta);
    let b = ln_dd(n as f64) - ln_dd(delta);
    let radicand = Dd::from(10.0) * a * b;
    Ok((radicand.sqrt() / Dd::from(epsilon)).hi)
}

pub(crate) fn check_assumptions(epsilon: f64, delta: f64, n: usize) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return domain(format!("privacy budget epsilon must be positive and finite, got {epsilon}"));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return domain(format!(
            "failure probability delta must satisfy 0 < delta < 1/2, got {delta}"
        ));
    }
    if n < 2 {
        return domain(format!("calibration assumes n >= 2 nodes, got {n}"));
    }
    Ok(())
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let s = two_sum(self.hi, y.hi);
        let t = two_sum(self.lo, y.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let p = two_prod(self.hi, y.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * y.lo + self.lo * y.hi))
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from(q2);
        let q3 = r.hi / y.hi;
        quick_two_sum(q1, q2) + Dd::from(q3)
    }
}

impl Dd {
    fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(0.0);
        }
        let s = self.hi.sqrt();
        let r = self - two_prod(s, s);
        quick_two_sum(s, r.hi / (2.0 * s))
    }
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

/// Natural logarithm of a positive finite `f64`, to double-double accuracy.
fn ln_dd(x: f64) -> Dd {
    debug_assert!(x > 0.0 && x.is_finite());
    let (mut mant, mut exp) = split_exponent(x);
    if mant < std::f64::consts::FRAC_1_SQRT_2 {
        mant *= 2.0;
        exp -= 1;
    }
    // ln(mant) = 2 atanh(s), s = (mant - 1)/(mant + 1), |s| < 0.172
    let s = Dd::from(mant - 1.0) / two_sum(mant, 1.0);
    let s2 = s * s;
    let mut power = s;
    let mut series = s;
    for j in 1..40 {
        power = power * s2;
        let term = power / Dd::from((2 * j + 1) as f64);
        series = series + term;
        if term.hi.abs() < 1e-34 {
            break;
        }
    }
    LN2 * Dd::from(exp as f64) + series * Dd::from(2.0)
}

/// `x = mant · 2^exp` with `mant` in `[0.5, 1)`.
fn split_exponent(x: f64) -> (f64, i32) {
    let (x, bias) = if x < f64::MIN_POSITIVE {
        (x * 2f64.powi(54), -54)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1022;
    let mant = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1022u64 << 52));
    (mant, exp + bias)
}
