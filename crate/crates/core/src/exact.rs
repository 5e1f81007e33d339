//! Exact rational scalars and vectors, the norms used throughout the crate,
//! and the binary entropy function.
//!
//! Coordinates are [`Rational`] (arbitrary precision, always reduced). Index
//! sets returned here are 0-based; the CLI and JSON reports shift them to
//! 1-based.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"p/q"`, `"p"` or a decimal string such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad rational {s:?}")));
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let r = Rational::from_str(s).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(r)
}

/// A point of rational n-space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| int(c)).collect())
    }

    /// Builds a vector from `(num, den)` pairs.
    pub fn from_fracs(coords: &[(i64, i64)]) -> Self {
        Self(coords.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    /// Parses a comma separated list such as `"1/4,1/4,0,1/2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let coords = s
            .split(',')
            .map(|c| parse_rational(c.trim().trim_matches('"')))
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse("empty vector".into()));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self(self.0.iter().map(|c| c * k).collect())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()))
    }

    /// The representative of `{v, -v}` whose first nonzero coordinate is positive.
    pub fn sign_normalized(&self) -> Self {
        match self.0.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: Self) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: Self) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coord {
            Text(String),
            Int(i64),
        }
        let raw = Vec::<Coord>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|c| match c {
                Coord::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
                Coord::Int(i) => Ok(int(i)),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RationalVector)
    }
}

/// Serde adapter writing a single rational as `"p/q"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Orders two rationals lexicographically by `(numerator, denominator)`.
fn cmp_num_den(a: &Rational, b: &Rational) -> Ordering {
    a.numer().cmp(b.numer()).then_with(|| a.denom().cmp(b.denom()))
}

/// Canonical vector ordering: coordinate-wise lexicographic on
/// `(numerator, denominator)` pairs.
pub fn canonical_cmp(a: &RationalVector, b: &RationalVector) -> Ordering {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| cmp_num_den(x, y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.dim().cmp(&b.dim()))
}

pub fn l1_norm(v: &RationalVector) -> Rational {
    v.iter().fold(Rational::zero(), |acc, c| acc + c.abs())
}

pub fn linf_norm(v: &RationalVector) -> Rational {
    v.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
}

pub fn l1_distance(a: &RationalVector, b: &RationalVector) -> Rational {
    l1_norm(&(a - b))
}

/// Indices of the nonzero coordinates.
pub fn support(v: &RationalVector) -> BTreeSet<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Indices `i` with `|v_i| = ‖v‖_∞`.
pub fn max_coordinates(v: &RationalVector) -> Result<BTreeSet<usize>> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let m = linf_norm(v);
    Ok(v.iter()
        .enumerate()
        .filter(|(_, c)| c.abs() == m)
        .map(|(i, _)| i)
        .collect())
}

/// `(x, y) ↦ (x + y, x − y)`. Carries ℓ¹ on the plane onto ℓ∞:
/// `max(|x+y|, |x−y|) = |x| + |y|`.
pub fn hadamard_pair_transform(v: &RationalVector) -> Result<RationalVector> {
    if v.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: v.dim(),
        });
    }
    Ok(RationalVector(vec![&v[0] + &v[1], &v[0] - &v[1]]))
}

/// Applies [`hadamard_pair_transform`] to consecutive coordinate pairs.
pub fn blockwise_hadamard(v: &RationalVector) -> Result<RationalVector> {
    if !v.dim().is_multiple_of(2) {
        return Err(Error::Dimension {
            expected: v.dim() + 1,
            got: v.dim(),
        });
    }
    let mut out = Vec::with_capacity(v.dim());
    for pair in v.coords().chunks(2) {
        let t = hadamard_pair_transform(&RationalVector(pair.to_vec()))?;
        out.extend(t.into_coords());
    }
    Ok(RationalVector(out))
}

/// Value of the binary entropy function, in bits.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyValue(pub f64);

impl EntropyValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `H(s) = −s log₂ s − (1−s) log₂(1−s)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(s: f64) -> Result<EntropyValue> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("binary entropy argument {s} outside [0,1]")));
    }
    Ok(EntropyValue(entropy_unchecked(s)))
}

pub(crate) fn entropy_unchecked(s: f64) -> f64 {
    if s == 0.0 || s == 1.0 {
        0.0
    } else {
        -s * s.log2() - (1.0 - s) * (1.0 - s).log2()
    }
}

/// `log₂ C(n, k)` through log-Gamma; `-∞` when `k > n`.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)) / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[(i64, i64)]) -> RationalVector {
        RationalVector::from_fracs(c)
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_norm(&RationalVector::zero(4)), int(0));
        assert_eq!(l1_norm(&v(&[(1, 4); 4])), int(1));
        assert_eq!(l1_norm(&v(&[(1, 8), (-3, 8), (1, 8), (-3, 8)])), int(1));
    }

    #[test]
    fn linf_examples() {
        assert_eq!(linf_norm(&v(&[(1, 2), (1, 2), (0, 1), (0, 1)])), rat(1, 2));
        assert_eq!(linf_norm(&RationalVector::zero(3)), int(0));
        assert_eq!(linf_norm(&v(&[(1, 8), (-3, 8), (3, 8), (-1, 8)])), rat(3, 8));
    }

    #[test]
    fn support_and_max_coordinates() {
        let a = v(&[(1, 2), (1, 2), (0, 1), (0, 1)]);
        assert_eq!(support(&a), BTreeSet::from([0, 1]));
        assert!(support(&RationalVector::zero(4)).is_empty());
        let b = v(&[(1, 4), (-1, 4), (0, 1), (1, 2)]);
        assert_eq!(support(&b), BTreeSet::from([0, 1, 3]));

        assert_eq!(max_coordinates(&a).unwrap(), BTreeSet::from([0, 1]));
        assert_eq!(max_coordinates(&v(&[(1, 4); 4])).unwrap(), BTreeSet::from([0, 1, 2, 3]));
        assert_eq!(max_coordinates(&b).unwrap(), BTreeSet::from([3]));
        assert!(matches!(max_coordinates(&RationalVector::zero(2)), Err(Error::ZeroVector)));
    }

    #[test]
    fn hadamard_examples() {
        let t = |c: &[(i64, i64)]| hadamard_pair_transform(&v(c)).unwrap();
        assert_eq!(t(&[(1, 1), (0, 1)]), RationalVector::from_ints(&[1, 1]));
        assert_eq!(t(&[(1, 2), (1, 2)]), RationalVector::from_ints(&[1, 0]));
        for x in [rat(0, 1), rat(1, 4), rat(1, 2)] {
            let p = RationalVector::new(vec![x.clone(), rat(1, 2) - &x]);
            let w = hadamard_pair_transform(&p).unwrap();
            assert_eq!(w, RationalVector::new(vec![rat(1, 2), &x * int(2) - rat(1, 2)]));
            assert_eq!(linf_norm(&w), rat(1, 2));
        }
        assert!(matches!(
            hadamard_pair_transform(&RationalVector::zero(3)),
            Err(Error::Dimension { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap().value(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap().value(), 0.0);
        assert!((binary_entropy(0.5).unwrap().value() - 1.0).abs() < 1e-15);
        // direct evaluation: 0.296·log2(1/0.296) + 0.704·log2(1/0.704)
        assert!((binary_entropy(0.296).unwrap().value() - 0.876346).abs() < 1e-5);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn canonical_order_and_sign() {
        let a = v(&[(-1, 2), (1, 2)]);
        assert_eq!(a.sign_normalized(), v(&[(1, 2), (-1, 2)]));
        assert_eq!(canonical_cmp(&v(&[(1, 2)]), &v(&[(1, 4)])), Ordering::Less);
        assert_eq!(canonical_cmp(&v(&[(0, 1), (1, 1)]), &v(&[(1, 8), (0, 1)])), Ordering::Less);
    }

    #[test]
    fn parse_forms() {
        let p = RationalVector::parse("1/4, -1/4,0,0.5").unwrap();
        assert_eq!(p, v(&[(1, 4), (-1, 4), (0, 1), (1, 2)]));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert!(parse_rational("x").is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/4","-1/4","0","1/2"]"#);
        let back: RationalVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn entropy_binomial_limit_tightens() {
        for a in [0.1, 0.296, 0.5] {
            let h = binary_entropy(a).unwrap().value();
            let gaps: Vec<f64> = [100u64, 1000, 10000]
                .iter()
                .map(|&n| (log2_binomial(n, (a * n as f64).floor() as u64) / n as f64 - h).abs())
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "a={a}: {gaps:?}");
        }
    }
}
