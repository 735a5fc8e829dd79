//! High-precision real arithmetic on rationals.
//!
//! Approximate values are rationals carrying [`PRECISION`] significant bits.
//! Transcendental functions run in binary fixed point with guard bits and
//! standard argument reductions, so quotients of nearly cancelling terms
//! (for example `sqrt(1 + t^2) - 1` at `t = 1e-7`) keep full float accuracy.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Significant bits kept in approximate values.
pub const PRECISION: u64 = 256;

const GUARD: u64 = 64;

/// Largest |argument| accepted by `exp`.
const EXP_LIMIT: i64 = 1_000_000;

/// Rounds to [`PRECISION`] significant bits (toward zero).
pub fn round(r: &Rational) -> Rational {
    if r.is_zero() {
        return r.clone();
    }
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits() as i64 - d.bits() as i64 - PRECISION as i64;
    if shift <= 0 && d.bits() <= PRECISION {
        // already representable with few enough bits in the denominator
        if n.bits() <= 2 * PRECISION {
            return r.clone();
        }
    }
    if shift >= 0 {
        let q = n / (d << shift as usize);
        Rational::from_integer(q << shift as usize)
    } else {
        let s = (-shift) as usize;
        let q = (n << s) / d;
        Rational::new(q, BigInt::one() << s)
    }
}

fn to_fixed(r: &Rational, w: u64) -> BigInt {
    let scaled = r.numer() << w as usize;
    scaled.div_floor(r.denom())
}

fn from_fixed(x: BigInt, w: u64) -> Rational {
    round(&Rational::new(x, BigInt::one() << w as usize))
}

fn fixed_mul(a: &BigInt, b: &BigInt, w: u64) -> BigInt {
    (a * b) >> w as usize
}

fn fixed_div(a: &BigInt, b: &BigInt, w: u64) -> BigInt {
    (a << w as usize) / b
}

fn isqrt(n: &BigInt) -> BigInt {
    BigInt::from(n.to_biguint().expect("non-negative").sqrt())
}

fn fixed_sqrt(a: &BigInt, w: u64) -> BigInt {
    isqrt(&(a << w as usize))
}

/// atanh(p/q) for |p/q| <= 1/2 in fixed point.
fn fixed_atanh(z: &BigInt, w: u64) -> BigInt {
    let z2 = fixed_mul(z, z, w);
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = fixed_mul(&power, &z2, w);
        k += 1;
    }
    sum
}

/// atan(z) for |z| <= 1/4 in fixed point.
fn fixed_atan_small(z: &BigInt, w: u64) -> BigInt {
    let z2 = fixed_mul(z, z, w);
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power = fixed_mul(&power, &z2, w);
        k += 1;
    }
    sum
}

fn fixed_ln2(w: u64) -> BigInt {
    let third = (BigInt::one() << w as usize) / BigInt::from(3);
    fixed_atanh(&third, w) * 2
}

fn fixed_pi(w: u64) -> BigInt {
    let one = BigInt::one() << w as usize;
    let a = fixed_atan_small(&(&one / BigInt::from(5)), w);
    let b = fixed_atan_small(&(&one / BigInt::from(239)), w);
    a * 16 - b * 4
}

/// Square root; `None` for negative input. The flag reports exactness.
pub fn sqrt(r: &Rational) -> Option<(Rational, bool)> {
    if r.is_negative() {
        return None;
    }
    if let Some(exact) = super::simplify::exact_sqrt(r) {
        return Some((exact, true));
    }
    let (n, d) = (r.numer(), r.denom());
    let nd = n * d;
    let k = (2 * (PRECISION + GUARD)).saturating_sub(nd.bits()) / 2 + 1;
    let root = isqrt(&(nd << (2 * k) as usize));
    Some((round(&Rational::new(root, d << k as usize)), false))
}

/// Natural logarithm; `None` for non-positive input.
pub fn ln(r: &Rational) -> Option<(Rational, bool)> {
    if !r.is_positive() {
        return None;
    }
    if r.is_one() {
        return Some((Rational::zero(), true));
    }
    let w = PRECISION + GUARD + 8;
    // r = m * 2^e with m in [1, 2)
    let mut e = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scale = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(BigInt::one() << e as usize)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut m = r / scale(e);
    let two = Rational::from_integer(BigInt::from(2));
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < Rational::one() {
        m *= &two;
        e -= 1;
    }
    // ln m = 2 atanh((m - 1)/(m + 1)), argument in [0, 1/3)
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let zf = to_fixed(&z, w);
    let ln_m = fixed_atanh(&zf, w) * 2;
    let total = ln_m + fixed_ln2(w) * BigInt::from(e);
    Some((from_fixed(total, w), false))
}

pub enum ExpOutcome {
    Value(Rational, bool),
    Overflow,
}

pub fn exp(r: &Rational) -> ExpOutcome {
    if r.is_zero() {
        return ExpOutcome::Value(Rational::one(), true);
    }
    match r.to_f64() {
        Some(v) if v.abs() <= EXP_LIMIT as f64 => {}
        _ if r.is_positive() => return ExpOutcome::Overflow,
        _ => return ExpOutcome::Value(Rational::zero(), false),
    }
    let w = PRECISION + GUARD + 16;
    let ln2 = fixed_ln2(w + 32);
    let rf = to_fixed(r, w + 32);
    // r = q ln2 + s, |s| <= ln2 / 2
    let q = rounded_div(&rf, &ln2);
    let s = (rf - &q * &ln2) >> 32usize;
    // exp(s) = exp(s / 2^8)^(2^8)
    const HALVINGS: u64 = 8;
    let small = s >> HALVINGS as usize;
    let one = BigInt::one() << w as usize;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k: u64 = 1;
    loop {
        term = fixed_mul(&term, &small, w) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..HALVINGS {
        sum = fixed_mul(&sum, &sum, w);
    }
    let q = q.to_i64().expect("bounded exponent");
    let value = Rational::new(sum, BigInt::one() << w as usize);
    let scaled = if q >= 0 {
        value * Rational::from_integer(BigInt::one() << q as usize)
    } else {
        value / Rational::from_integer(BigInt::one() << (-q) as usize)
    };
    ExpOutcome::Value(round(&scaled), false)
}

fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (r * 2) >= *b {
        q + 1
    } else {
        q
    }
}

/// (sin r, cos r) in fixed point at `w` bits.
fn fixed_sin_cos(r: &Rational, w: u64) -> (BigInt, BigInt) {
    let magnitude_bits = (r.numer().bits() as i64 - r.denom().bits() as i64).max(0) as u64;
    let wide = w + magnitude_bits + 8;
    let two_pi = fixed_pi(wide) * 2;
    let rf = to_fixed(r, wide);
    let q = rounded_div(&rf, &two_pi);
    let s = (rf - q * &two_pi) >> (wide - w) as usize;
    const HALVINGS: u64 = 8;
    let small = s >> HALVINGS as usize;
    let one = BigInt::one() << w as usize;
    // Taylor series for sin and cos of the reduced argument
    let mut sin = BigInt::zero();
    let mut cos = BigInt::zero();
    let mut term = one.clone();
    let mut k: u64 = 0;
    while !term.is_zero() {
        match k % 4 {
            0 => cos += &term,
            1 => sin += &term,
            2 => cos -= &term,
            _ => sin -= &term,
        }
        k += 1;
        term = fixed_mul(&term, &small, w) / BigInt::from(k);
    }
    for _ in 0..HALVINGS {
        let s2 = fixed_mul(&sin, &cos, w) * 2;
        let c2 = fixed_mul(&cos, &cos, w) * 2 - &one;
        sin = s2;
        cos = c2;
    }
    (sin, cos)
}

pub fn sin(r: &Rational) -> (Rational, bool) {
    if r.is_zero() {
        return (Rational::zero(), true);
    }
    let w = PRECISION + GUARD;
    let (s, _) = fixed_sin_cos(r, w);
    (from_fixed(s, w), false)
}

pub fn cos(r: &Rational) -> (Rational, bool) {
    if r.is_zero() {
        return (Rational::one(), true);
    }
    let w = PRECISION + GUARD;
    let (_, c) = fixed_sin_cos(r, w);
    (from_fixed(c, w), false)
}

pub fn arctan(r: &Rational) -> (Rational, bool) {
    if r.is_zero() {
        return (Rational::zero(), true);
    }
    let w = PRECISION + GUARD;
    let negative = r.is_negative();
    let a = r.abs();
    let one = BigInt::one() << w as usize;
    let (z, complement) = if a > Rational::one() {
        (to_fixed(&a.recip(), w), true)
    } else {
        (to_fixed(&a, w), false)
    };
    // atan(z) = 2 atan(z / (1 + sqrt(1 + z^2))), applied twice: z <= tan(pi/16)
    let mut z = z;
    for _ in 0..2 {
        let root = fixed_sqrt(&(&one + fixed_mul(&z, &z, w)), w);
        z = fixed_div(&z, &(&one + root), w);
    }
    let mut value: BigInt = fixed_atan_small(&z, w) * 4u32;
    if complement {
        value = fixed_pi(w) / 2 - value;
    }
    if negative {
        value = -value;
    }
    (from_fixed(value, w), false)
}
