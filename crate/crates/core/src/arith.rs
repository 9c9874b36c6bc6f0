//! Exact scalars: big rationals and Gaussian rationals.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;
pub type Gauss = Complex<Rat>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn g(re: Rat, im: Rat) -> Gauss {
    Complex::new(re, im)
}

pub fn g_int(n: i64) -> Gauss {
    Complex::new(rat_int(n), Rat::zero())
}

pub fn g_rat(r: Rat) -> Gauss {
    Complex::new(r, Rat::zero())
}

pub fn g_i() -> Gauss {
    Complex::new(Rat::zero(), Rat::one())
}

pub fn g_half() -> Gauss {
    g_rat(rat(1, 2))
}

pub fn g_is_zero(z: &Gauss) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

pub fn g_conj(z: &Gauss) -> Gauss {
    Complex::new(z.re.clone(), -z.im.clone())
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn g_pow(z: &Gauss, e: i64) -> Gauss {
    let base = if e < 0 { z.inv() } else { z.clone() };
    let mut out = Gauss::one();
    for _ in 0..e.unsigned_abs() {
        out *= base.clone();
    }
    out
}

pub fn rat_pow(r: &Rat, e: i64) -> Rat {
    let base = if e < 0 { r.recip() } else { r.clone() };
    let mut out = Rat::one();
    for _ in 0..e.unsigned_abs() {
        out *= base.clone();
    }
    out
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn g_to_f64(z: &Gauss) -> Complex<f64> {
    Complex::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Parses `n` or `n/d`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_gauss(z: &Gauss) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => fmt_rat(&z.re),
        (true, false) => format!("{}i", fmt_rat(&z.im)),
        (false, false) => {
            let sign = if z.im.is_negative() { "-" } else { "+" };
            format!("{}{}{}i", fmt_rat(&z.re), sign, fmt_rat(&z.im.abs()))
        }
    }
}
