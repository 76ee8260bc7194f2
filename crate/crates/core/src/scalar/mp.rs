//! Binary multiprecision float with a per-thread working precision.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

use super::{Real, Scalar};

type Inner = FBig<HalfEven>;

const DEFAULT_PRECISION: usize = 256;
const GUARD_BITS: usize = 32;

thread_local! {
    static PRECISION: Cell<usize> = const { Cell::new(DEFAULT_PRECISION) };
    static PI_CACHE: RefCell<HashMap<usize, Inner>> = RefCell::new(HashMap::new());
}

/// Working precision in bits for [`Mp`] values created on this thread.
pub fn precision() -> usize {
    PRECISION.with(|p| p.get())
}

/// Set the working precision (bits, at least 64) for this thread.
pub fn set_precision(bits: usize) {
    PRECISION.with(|p| p.set(bits.max(64)));
}

/// Scoped precision change, restored on drop.
pub struct PrecisionGuard {
    previous: usize,
}

impl PrecisionGuard {
    pub fn new(bits: usize) -> Self {
        let previous = precision();
        set_precision(bits);
        PrecisionGuard { previous }
    }
}

impl Drop for PrecisionGuard {
    fn drop(&mut self) {
        set_precision(self.previous);
    }
}

/// Multiprecision binary float.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(Inner);

fn at(x: Inner, bits: usize) -> Inner {
    x.with_precision(bits).value()
}

fn bigint_to_ibig(v: &BigInt) -> IBig {
    let (sign, bytes) = v.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    match sign {
        Sign::Minus => -mag,
        _ => mag,
    }
}

impl Mp {
    fn lift(x: Inner) -> Self {
        Mp(at(x, precision()))
    }

    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite f64 cannot be converted to Mp");
        Mp::lift(Inner::try_from(v).expect("finite float"))
    }

    pub fn from_int(v: i64) -> Self {
        Mp::lift(Inner::from(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Mp::lift(Inner::from(bigint_to_ibig(v)))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Mp::from_bigint(r.numer()) / Mp::from_bigint(r.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Precision of this value in bits.
    pub fn bits(&self) -> usize {
        self.0.precision()
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        if self.0.repr().is_zero() {
            return "0".to_string();
        }
        let dec = self.0.to_decimal().value().with_precision(digits.max(1)).value();
        let mag = self.to_f64().abs();
        if (1e-5..1e16).contains(&mag) {
            format!("{}", dec)
        } else {
            format!("{:e}", dec)
        }
    }

    fn default_digits(&self) -> usize {
        ((self.bits().max(64) as f64) * std::f64::consts::LOG10_2) as usize
    }
}

fn atan_inv(k: u32, bits: usize) -> Inner {
    // atan(1/k) by its alternating Taylor series.
    let one = at(Inner::ONE, bits);
    let kk = at(Inner::from(k), bits);
    let k2 = &kk * &kk;
    let mut power = &one / &kk;
    let mut sum = power.clone();
    let eps = at(Inner::from_parts(IBig::ONE, -(bits as isize)), bits);
    let mut n: u32 = 1;
    loop {
        power = &power / &k2;
        let term = &power / &at(Inner::from(2 * n + 1), bits);
        if term < eps {
            break;
        }
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    sum
}

fn pi_inner(bits: usize) -> Inner {
    PI_CACHE.with(|cache| {
        if let Some(v) = cache.borrow().get(&bits) {
            return v.clone();
        }
        let w = bits + GUARD_BITS;
        let pi = at(Inner::from(16), w) * atan_inv(5, w) - at(Inner::from(4), w) * atan_inv(239, w);
        let pi = at(pi, bits);
        cache.borrow_mut().insert(bits, pi.clone());
        pi
    })
}

fn cos_sin(x: &Inner, bits: usize) -> (Inner, Inner) {
    let w = bits + GUARD_BITS;
    let x = at(x.clone(), w);
    let two_pi = pi_inner(w) * at(Inner::from(2), w);
    let k = (x.to_f64().value() / (2.0 * std::f64::consts::PI)).round();
    let mut r = x - at(Inner::try_from(k).expect("finite"), w) * two_pi;
    let halvings = 12;
    let scale = at(Inner::from(1u64 << halvings), w);
    r = &r / &scale;
    let one = at(Inner::ONE, w);
    let eps = at(Inner::from_parts(IBig::ONE, -(w as isize)), w);
    let r2 = &r * &r;
    let mut s = r.clone();
    let mut c = one.clone();
    let mut term_s = r.clone();
    let mut term_c = one.clone();
    let mut n: u64 = 1;
    loop {
        term_c = -(&term_c * &r2) / at(Inner::from((2 * n - 1) * (2 * n)), w);
        term_s = -(&term_s * &r2) / at(Inner::from((2 * n) * (2 * n + 1)), w);
        c += term_c.clone();
        s += term_s.clone();
        let mag = if term_c < Inner::ZERO { -term_c.clone() } else { term_c.clone() };
        if mag < eps {
            break;
        }
        n += 1;
    }
    let two = at(Inner::from(2), w);
    for _ in 0..halvings {
        let s2 = &two * &s * &c;
        let c2 = &c * &c - &s * &s;
        s = s2;
        c = c2;
    }
    (at(c, bits), at(s, bits))
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| self.default_digits());
        f.write_str(&self.to_string_digits(digits))
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({})", self.to_string_digits(self.default_digits()))
    }
}

impl FromStr for Mp {
    type Err = crate::literal::LiteralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::literal::parse_literal(s).map(|v| v.to_mp())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                Mp(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Mp> for &'a Mp {
            type Output = Mp;
            fn $method(self, rhs: &'a Mp) -> Mp {
                Mp(&self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);
forward_binop!(Div, div, /);

impl AddAssign for Mp {
    fn add_assign(&mut self, rhs: Mp) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Mp {
    fn sub_assign(&mut self, rhs: Mp) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Mp {
    fn mul_assign(&mut self, rhs: Mp) {
        self.0 *= rhs.0;
    }
}

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, rhs: Mp) -> Mp {
        let q = (&self.0 / &rhs.0).trunc();
        Mp(self.0 - q * rhs.0)
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Zero for Mp {
    fn zero() -> Self {
        Mp::lift(Inner::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
}

impl One for Mp {
    fn one() -> Self {
        Mp::lift(Inner::ONE)
    }
}

impl Num for Mp {
    type FromStrRadixErr = crate::literal::LiteralError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(crate::literal::LiteralError::Radix(radix));
        }
        s.parse()
    }
}

impl Scalar for Mp {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Mp::from_int(v)
    }
    fn from_rational(r: &BigRational) -> Self {
        Mp::from_rational(r)
    }
    fn to_f64(&self) -> f64 {
        Mp::to_f64(self)
    }
    fn to_mp(&self) -> Mp {
        self.clone()
    }
    fn from_f64(v: f64) -> Self {
        Mp::from_f64(v)
    }
    fn unit_roundoff() -> f64 {
        2f64.powi(-(precision() as i32))
    }
    fn try_sqrt(&self) -> Option<Self> {
        if self.0 < Inner::ZERO {
            None
        } else {
            Some(Real::sqrt(self))
        }
    }
    fn vanishing_threshold() -> f64 {
        1e-20
    }
    fn abs(&self) -> Self {
        if self.0 < Inner::ZERO {
            Mp(-self.0.clone())
        } else {
            self.clone()
        }
    }
}

impl Real for Mp {
    fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Mp(self.0.sqrt())
    }
    fn pi() -> Self {
        Mp(pi_inner(precision()))
    }
    fn cos(&self) -> Self {
        Mp(cos_sin(&self.0, precision()).0)
    }
    fn sin(&self) -> Self {
        Mp(cos_sin(&self.0, precision()).1)
    }
    fn epsilon() -> Self {
        let p = precision();
        Mp(at(Inner::from_parts(IBig::ONE, -(p as isize)), p))
    }
    fn from_mp(x: &Mp) -> Self {
        x.clone()
    }
}

impl PartialEq<f64> for Mp {
    fn eq(&self, other: &f64) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd<f64> for Mp {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        if !other.is_finite() {
            return None;
        }
        self.0.partial_cmp(&Inner::try_from(*other).ok()?)
    }
}
