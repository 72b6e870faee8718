//! Exact integer helpers shared by every module.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational used for every reported gap, ratio and slack.
pub type Rational = Ratio<i64>;

/// The numerically least residue of an integer: the representative in
/// `(-n/2, n/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedResidue {
    pub value: i64,
    pub modulus: u32,
}

impl SignedResidue {
    pub fn abs(&self) -> u64 {
        self.value.unsigned_abs()
    }
}

impl fmt::Display for SignedResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Numerically least residue of `x` modulo `n`.
pub fn nlr(x: i64, n: u32) -> SignedResidue {
    assert!(n >= 1, "modulus must be positive");
    let n64 = i64::from(n);
    let mut r = x.rem_euclid(n64);
    if 2 * r > n64 {
        r -= n64;
    }
    SignedResidue {
        value: r,
        modulus: n,
    }
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u32) -> Vec<u32> {
    assert!(n >= 1, "divisors of zero are not defined");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u32;
    while u64::from(d) * u64::from(d) <= u64::from(n) {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Residues in `[1, n)` coprime to `n`; `[0]` for `n = 1`.
pub fn units(n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0];
    }
    (1..n)
        .filter(|&u| gcd(u64::from(u), u64::from(n)) == 1)
        .collect()
}

/// Inverse of `a` modulo `m` when it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// `min over l in [1, k] of |order - n/l|`, with the smallest minimizing `l`.
pub fn nearest_fraction_gap(order: u32, n: u32, k: u32) -> (u32, Rational) {
    let rho = Rational::from_integer(i64::from(order));
    (1..=k.max(1))
        .map(|l| {
            let target = Rational::new(i64::from(n), i64::from(l));
            (l, abs_ratio(rho - target))
        })
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("k >= 1")
}

pub fn abs_ratio(r: Rational) -> Rational {
    if r < Rational::from_integer(0) {
        -r
    } else {
        r
    }
}

/// Parses a decimal ("2.04"), fraction ("51/25") or integer into an exact
/// rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs() * scale + f;
        return Ok(Rational::new(if negative { -mag } else { mag }, scale));
    }
    t.parse::<i64>()
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// Serde adapter writing rationals as `"p/q"` strings (`"p"` when integral).
pub mod ratio_str {
    use super::Rational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(de::Error::custom)
    }

    pub mod option {
        use super::Rational;
        use serde::{de, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.collect_str(r),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| t.parse().map_err(de::Error::custom))
                .transpose()
        }
    }
}

/// The order of a basis, or `Infinite` for a non-basis. Serialized as a JSON
/// number or `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Option<u32>", into = "Option<u32>")]
pub enum OrderValue {
    Finite(u32),
    Infinite,
}

impl OrderValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            OrderValue::Finite(h) => Some(h),
            OrderValue::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, OrderValue::Finite(_))
    }
}

impl From<Option<u32>> for OrderValue {
    fn from(v: Option<u32>) -> Self {
        v.map_or(OrderValue::Infinite, OrderValue::Finite)
    }
}

impl From<OrderValue> for Option<u32> {
    fn from(v: OrderValue) -> Self {
        v.finite()
    }
}

impl PartialOrd for OrderValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use OrderValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for OrderValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderValue::Finite(h) => write!(f, "{h}"),
            OrderValue::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for OrderValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(OrderValue::Infinite),
            t => t
                .parse()
                .map(OrderValue::Finite)
                .map_err(|_| Error::InvalidArgument(format!("not an order value: {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nlr_examples() {
        assert_eq!(nlr(7, 10).value, -3);
        assert_eq!(nlr(5, 10).value, 5);
        assert_eq!(nlr(22, 9).value, 4);
        assert_eq!(nlr(-5, 10).value, 5);
        assert_eq!(nlr(3, 1).value, 0);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(7), vec![1, 7]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
    }

    #[test]
    fn divisors_match_trial_division() {
        for n in 1..=300u32 {
            let brute: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(divisors(n), brute, "n = {n}");
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("2.04").unwrap(), Rational::new(51, 25));
        assert_eq!(parse_rational("51/25").unwrap(), Rational::new(51, 25));
        assert_eq!(parse_rational("3").unwrap(), Rational::from_integer(3));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn order_value_tokens() {
        assert_eq!("inf".parse::<OrderValue>().unwrap(), OrderValue::Infinite);
        assert_eq!(OrderValue::Finite(4).to_string(), "4");
        assert_eq!(
            serde_json::to_string(&OrderValue::Infinite).unwrap(),
            "null"
        );
        assert_eq!(
            serde_json::from_str::<OrderValue>("7").unwrap(),
            OrderValue::Finite(7)
        );
        assert!(OrderValue::Finite(100) < OrderValue::Infinite);
    }

    #[test]
    fn nearest_gap_examples() {
        assert_eq!(
            nearest_fraction_gap(6, 7, 2),
            (1, Rational::from_integer(1))
        );
        assert_eq!(nearest_fraction_gap(7, 20, 3), (3, Rational::new(1, 3)));
        assert_eq!(nearest_fraction_gap(26, 99, 4), (4, Rational::new(5, 4)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn nlr_stable_under_representatives(x in -10_000i64..10_000, k in -50i64..50, n in 1u32..500) {
                let a = nlr(x, n);
                let b = nlr(x + k * i64::from(n), n);
                prop_assert_eq!(a, b);
                prop_assert!(2 * a.value <= i64::from(n) && 2 * a.value > -i64::from(n));
                prop_assert_eq!((a.value - x).rem_euclid(i64::from(n)), 0);
            }
        }
    }
}
