//! Exact rational angles on the circle `R/Z`.
//!
//! An [`Angle`] is always stored in lowest terms with `0 <= num < den`, so two
//! angles are equal exactly when their `(num, den)` pairs are. Numerators and
//! denominators are arbitrary precision: pulling a chord back `g` times
//! multiplies its denominator by `2^g`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Denominators up to this bound are stored inline; their products and
/// doubled values still fit in `u128` and `u64`.
const SMALL_MAX: u64 = u64::MAX >> 1;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle(Repr);

// Canonical: `Small` exactly when `den <= SMALL_MAX`, so derived equality
// and hashing agree with equality of values.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: u64, den: u64 },
    Big { num: BigUint, den: BigUint },
}

impl Angle {
    /// Canonical representative of `num/den` modulo 1.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if den < 0 {
            (-(num as i128), -(den as i128))
        } else {
            (num as i128, den as i128)
        };
        Ok(Self::from_u128(num.rem_euclid(den) as u128, den as u128))
    }

    pub fn from_bigint(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if den.sign() == Sign::Minus {
            (-num, -den)
        } else {
            (num, den)
        };
        let num = num.mod_floor(&den);
        let num = num.to_biguint().expect("mod_floor by a positive modulus");
        let den = den.to_biguint().expect("positive denominator");
        Ok(Self::reduced(num, den))
    }

    pub fn from_biguint(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let num = num % &den;
        Ok(Self::reduced(num, den))
    }

    /// `num/den` with `num < den`, reduced.
    fn from_u128(num: u128, den: u128) -> Self {
        if num == 0 {
            return Self::zero();
        }
        let g = num.gcd(&den);
        Self::from_coprime_u128(num / g, den / g)
    }

    fn from_coprime_u128(num: u128, den: u128) -> Self {
        if den <= SMALL_MAX as u128 {
            Angle(Repr::Small {
                num: num as u64,
                den: den as u64,
            })
        } else {
            Angle(Repr::Big {
                num: BigUint::from(num),
                den: BigUint::from(den),
            })
        }
    }

    fn reduced(num: BigUint, den: BigUint) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Self::from_coprime(num, den)
        } else {
            Self::from_coprime(num / &g, den / g)
        }
    }

    fn from_coprime(num: BigUint, den: BigUint) -> Self {
        match (num.to_u64(), den.to_u64()) {
            (Some(n), Some(d)) if d <= SMALL_MAX => Angle(Repr::Small { num: n, den: d }),
            _ => Angle(Repr::Big { num, den }),
        }
    }

    pub fn zero() -> Self {
        Angle(Repr::Small { num: 0, den: 1 })
    }

    pub fn num(&self) -> BigUint {
        match &self.0 {
            Repr::Small { num, .. } => BigUint::from(*num),
            Repr::Big { num, .. } => num.clone(),
        }
    }

    pub fn den(&self) -> BigUint {
        match &self.0 {
            Repr::Small { den, .. } => BigUint::from(*den),
            Repr::Big { den, .. } => den.clone(),
        }
    }

    /// Angle doubling, `t -> 2t mod 1`.
    pub fn double(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => {
                if den % 2 == 0 {
                    // num is odd here, so num/(den/2) is already in lowest terms.
                    let half = den / 2;
                    Self::from_coprime_u128((num % half) as u128, half as u128)
                } else {
                    Self::from_coprime_u128((2 * *num as u128) % *den as u128, *den as u128)
                }
            }
            Repr::Big { num, den } => {
                if den.is_even() {
                    let den = den >> 1u32;
                    let num = num % &den;
                    if num.is_zero() {
                        return Self::zero();
                    }
                    Self::from_coprime(num, den)
                } else {
                    Self::from_coprime((num << 1u32) % den, den.clone())
                }
            }
        }
    }

    /// The two preimages under doubling, `(t/2, (t+1)/2)`.
    pub fn halve(&self) -> (Self, Self) {
        match &self.0 {
            Repr::Small { num, den } => {
                let (num, den) = (*num as u128, *den as u128);
                (
                    Self::half_of_small(num, den),
                    Self::half_of_small(num + den, den),
                )
            }
            Repr::Big { num, den } => (
                Self::half_of(num.clone(), den),
                Self::half_of(num + den, den),
            ),
        }
    }

    // `num/(2 den)` for `num` coprime to `den`; never needs a gcd.
    fn half_of_small(num: u128, den: u128) -> Self {
        if num == 0 {
            Self::zero()
        } else if num.is_multiple_of(2) {
            Self::from_coprime_u128(num / 2, den)
        } else {
            Self::from_coprime_u128(num, 2 * den)
        }
    }

    fn half_of(num: BigUint, den: &BigUint) -> Self {
        if num.is_zero() {
            Self::zero()
        } else if num.is_even() {
            Self::from_coprime(num >> 1u32, den.clone())
        } else {
            Self::from_coprime(num, den << 1u32)
        }
    }

    /// `t + 1/2 mod 1`.
    pub fn antipode(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => {
                let den2 = 2 * *den as u128;
                Self::from_u128((2 * *num as u128 + *den as u128) % den2, den2)
            }
            Repr::Big { num, den } => {
                let den2 = den << 1u32;
                Self::reduced(((num << 1u32) + den) % &den2, den2)
            }
        }
    }

    /// True iff `self` lies strictly inside the counterclockwise arc from `a`
    /// to `b`. When `a == b` the arc is the whole circle minus `a`.
    pub fn in_open_arc(&self, a: &Angle, b: &Angle) -> bool {
        match a.cmp(b) {
            Ordering::Less => a < self && self < b,
            Ordering::Greater => self > a || self < b,
            Ordering::Equal => self != a,
        }
    }

    /// Counterclockwise arc length from `self` to `other`, in `[0, 1)`.
    pub fn arc_to(&self, other: &Angle) -> Angle {
        if let (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) =
            (&self.0, &other.0)
        {
            let den = *d1 as u128 * *d2 as u128;
            let (a, b) = (*n2 as u128 * *d1 as u128, *n1 as u128 * *d2 as u128);
            let num = if a >= b { a - b } else { den - (b - a) };
            return Self::from_u128(num, den);
        }
        let num = BigInt::from(other.num() * self.den()) - BigInt::from(self.num() * other.den());
        let den = BigInt::from(self.den() * other.den());
        Angle::from_bigint(num, den).expect("nonzero product of denominators")
    }

    pub fn to_f64(&self) -> f64 {
        let (num, den) = match &self.0 {
            Repr::Small { num, den } => return *num as f64 / *den as f64,
            Repr::Big { num, den } => (num, den),
        };
        match (num.to_f64(), den.to_f64()) {
            (Some(n), Some(d)) if d.is_finite() => n / d,
            _ => {
                // Both huge: scale down before converting.
                let shift = den.bits().saturating_sub(60);
                let n = (num >> shift).to_f64().unwrap_or(0.0);
                let d = (den >> shift).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                if d1 == d2 {
                    n1.cmp(n2)
                } else {
                    (*n1 as u128 * *d2 as u128).cmp(&(*n2 as u128 * *d1 as u128))
                }
            }
            _ => (self.num() * other.den()).cmp(&(other.num() * self.den())),
        }
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// Accepts `num/den` or a bare integer. Non-reduced or out-of-range input
    /// is normalized.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid angle {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| bad())?;
        let den: BigInt = d.parse().map_err(|_| bad())?;
        Angle::from_bigint(num, den)
    }
}

/// Shorthand for tests and tables: panics on a zero denominator.
pub fn angle(num: i64, den: i64) -> Angle {
    Angle::new(num, den).expect("nonzero denominator")
}
