//! Exact arithmetic: arbitrary-precision rationals, Gaussian rationals,
//! generalized binomials and Catalan numbers.
//!
//! Everything symbolic in this crate is built over the field ℚ(i)
//! provided here. Values are always kept in canonical form (reduced
//! fraction, positive denominator), so equality and hashing are cheap.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use std::sync::Mutex;

/// Arbitrary-precision rational number in canonical form.
///
/// Wraps `num_rational::BigRational`, which maintains gcd-reduced form
/// with positive denominator after every operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: i64) -> Self {
        if exp == 0 {
            return Rational::one();
        }
        if exp < 0 {
            return self.recip().pow(-exp);
        }
        let mut acc = Rational::one();
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("rational out of f64 range")
    }

    /// Serialized form `p/q`, with `/q` omitted when the value is an integer.
    pub fn to_frac_string(&self) -> String {
        if self.0.is_integer() {
            format!("{}", self.0.numer())
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }

    /// Parse `p` or `p/q`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            None => BigInt::from_str(s).ok().map(|n| Rational(BigRational::from_integer(n))),
            Some((num, den)) => {
                let num = BigInt::from_str(num.trim()).ok()?;
                let den = BigInt::from_str(den.trim()).ok()?;
                if den.is_zero() {
                    None
                } else {
                    Some(Rational(BigRational::new(num, den)))
                }
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_frac_string())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_frac_string())
    }
}

macro_rules! impl_rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

impl_rational_binop!(Add, add);
impl_rational_binop!(Sub, sub);
impl_rational_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl<'a> Neg for &'a Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        self.0 *= rhs.0;
    }
}

/// Element of ℚ(i): `re + im·i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }

    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational::new(Rational::from_int(n), Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        GaussianRational::new(r, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    /// Squared modulus `re² + im²` as a rational.
    pub fn norm_sq(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "division by zero");
        GaussianRational::new(&self.re / &n, &(-&self.im) / &n)
    }

    /// `(-i)^n` for n ≥ 0; cycles with period 4.
    pub fn neg_i_pow(n: u32) -> Self {
        match n % 4 {
            0 => GaussianRational::one(),
            1 => -GaussianRational::i(),
            2 => -GaussianRational::one(),
            _ => GaussianRational::i(),
        }
    }

    /// `i^n` for n ≥ 0.
    pub fn i_pow(n: u32) -> Self {
        match n % 4 {
            0 => GaussianRational::one(),
            1 => GaussianRational::i(),
            2 => -GaussianRational::one(),
            _ => -GaussianRational::i(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = GaussianRational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex_f64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        GaussianRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'a GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        GaussianRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &'a GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        (&self).mul(&rhs)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &'a GaussianRational) -> GaussianRational {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        GaussianRational::new(re, im)
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: GaussianRational) -> GaussianRational {
        (&self).mul(&rhs.recip())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl AddAssign for GaussianRational {
    fn add_assign(&mut self, rhs: GaussianRational) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

/// Generalized binomial coefficient `binom(a, k)` for rational `a` and
/// integer `k`, via the falling factorial `a(a-1)⋯(a-k+1)/k!`.
/// Returns 0 for k < 0; coefficients not explicitly defined are zero.
pub fn binom(a: &Rational, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut num = Rational::one();
    let mut term = a.clone();
    for _ in 0..k {
        num = &num * &term;
        term = term - Rational::one();
    }
    let mut fact = Rational::one();
    for i in 1..=k {
        fact = fact * Rational::from_int(i);
    }
    num / fact
}

/// `binom(n, k)` with integer upper argument.
pub fn binom_int(n: i64, k: i64) -> Rational {
    binom(&Rational::from_int(n), k)
}

/// `binom(p/q, k)` with a rational upper argument given as a fraction.
pub fn binom_frac(num: i64, den: i64, k: i64) -> Rational {
    binom(&Rational::new(num, den), k)
}

static CATALAN_MEMO: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(vec![Rational::one()]));

/// Catalan number Cₙ, defined by C₀ = 1 and the convolution recurrence
/// C_{n+1} = Σ_{k=0}^{n} C_k C_{n−k}.
pub fn catalan(n: i64) -> Rational {
    assert!(n >= 0, "catalan index must be nonnegative");
    let n = n as usize;
    let mut memo = CATALAN_MEMO.lock().unwrap();
    while memo.len() <= n {
        let m = memo.len() - 1;
        let mut next = Rational::zero();
        for k in 0..=m {
            next += &memo[k] * &memo[m - k];
        }
        memo.push(next);
    }
    memo[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_canonical_form() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_frac_string(), "-3/2");
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn rational_parse_round_trip() {
        for s in ["5", "-7/3", "0", "22/7"] {
            let r = Rational::parse(s).unwrap();
            assert_eq!(r.to_frac_string(), s);
        }
        assert!(Rational::parse("1/0").is_none());
    }

    #[test]
    fn binom_half_integer_values() {
        // binom(1/2, 1) = 1/2
        assert_eq!(binom_frac(1, 2, 1), Rational::new(1, 2));
        // binom(1/2, 3) = (1/2)(-1/2)(-3/2)/6 = 1/16
        assert_eq!(binom_frac(1, 2, 3), Rational::new(1, 16));
        // empty product
        for m in -3..4 {
            assert_eq!(binom(&Rational::new(2 * m - 1, 2), 0), Rational::one());
        }
        // negative k convention
        assert_eq!(binom_frac(1, 2, -1), Rational::zero());
    }

    #[test]
    fn binom_matches_pascal_for_integers() {
        let mut row = vec![Rational::one()];
        for n in 0..12i64 {
            for k in 0..=n {
                assert_eq!(binom_int(n, k), row[k as usize]);
            }
            let mut next = vec![Rational::one()];
            for k in 1..=n {
                next.push(&row[(k - 1) as usize] + &row[k as usize]);
            }
            next.push(Rational::one());
            row = next;
        }
    }

    #[test]
    fn catalan_small_values() {
        assert_eq!(catalan(0), Rational::one());
        assert_eq!(catalan(1), Rational::one());
        assert_eq!(catalan(4), Rational::from_int(14));
        assert_eq!(catalan(10), Rational::from_int(16796));
    }

    #[test]
    fn catalan_binomial_identity() {
        // C_m (m+1) = 4^m binom(m - 1/2, m)
        for m in 0..=30i64 {
            let lhs = catalan(m) * Rational::from_int(m + 1);
            let rhs = Rational::from_int(4).pow(m) * binom(&Rational::new(2 * m - 1, 2), m);
            assert_eq!(lhs, rhs, "m = {m}");
        }
    }

    #[test]
    fn gaussian_conjugation_involution() {
        let z = GaussianRational::new(Rational::new(3, 7), Rational::new(-2, 5));
        assert_eq!(z.conj().conj(), z);
        let prod = (&z).mul(&z.conj());
        assert!(prod.is_real());
        assert_eq!(prod.re, z.norm_sq());
    }

    #[test]
    fn neg_i_powers() {
        let i = GaussianRational::i();
        let mut acc = GaussianRational::one();
        for n in 0..8 {
            assert_eq!(GaussianRational::neg_i_pow(n), acc);
            acc = acc * (-i.clone());
        }
    }

    proptest! {
        #[test]
        fn rational_mul_inverse(a in -200i64..200, b in 1i64..200) {
            prop_assume!(a != 0);
            let r = Rational::new(a, b);
            prop_assert_eq!(r.clone() * r.recip(), Rational::one());
        }

        #[test]
        fn gaussian_field_axioms(ar in -20i64..20, ai in -20i64..20, br in -20i64..20, bi in -20i64..20) {
            let a = GaussianRational::new(Rational::from_int(ar), Rational::from_int(ai));
            let b = GaussianRational::new(Rational::from_int(br), Rational::from_int(bi));
            // commutativity and conjugation homomorphism
            prop_assert_eq!((&a).mul(&b), (&b).mul(&a));
            prop_assert_eq!((&a).mul(&b).conj(), (&a.conj()).mul(&b.conj()));
            if !b.is_zero() {
                let q = a.clone() / b.clone();
                prop_assert_eq!(q * b, a);
            }
        }
    }
}
