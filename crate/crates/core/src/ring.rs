//! Scalars. Everything linear in the crate is generic over [`Ring`]; the two
//! instances we use are `i64` (the integers) and [`F2`].

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub trait Ring:
    Copy
    + Debug
    + Display
    + Eq
    + Ord
    + std::hash::Hash
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const NAME: &'static str;

    fn from_i64(v: i64) -> Self;

    /// Integer representative, used for reports.
    fn to_i64(self) -> i64;
}

impl Ring for i64 {
    const NAME: &'static str = "z";

    fn from_i64(v: i64) -> Self {
        v
    }

    fn to_i64(self) -> i64 {
        self
    }
}

/// The field with two elements.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct F2(pub bool);

impl F2 {
    pub const ZERO: F2 = F2(false);
    pub const ONE: F2 = F2(true);
}

impl Debug for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

impl Display for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

impl Add for F2 {
    type Output = F2;
    fn add(self, rhs: F2) -> F2 {
        F2(self.0 ^ rhs.0)
    }
}

impl Sub for F2 {
    type Output = F2;
    fn sub(self, rhs: F2) -> F2 {
        F2(self.0 ^ rhs.0)
    }
}

impl Mul for F2 {
    type Output = F2;
    fn mul(self, rhs: F2) -> F2 {
        F2(self.0 & rhs.0)
    }
}

impl Neg for F2 {
    type Output = F2;
    fn neg(self) -> F2 {
        self
    }
}

impl Zero for F2 {
    fn zero() -> F2 {
        F2(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl One for F2 {
    fn one() -> F2 {
        F2(true)
    }
}

impl Ring for F2 {
    const NAME: &'static str = "f2";

    fn from_i64(v: i64) -> Self {
        F2(v.rem_euclid(2) == 1)
    }

    fn to_i64(self) -> i64 {
        self.0 as i64
    }
}

/// Ring selector used by the CLI and the relation checker.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Z,
    F2,
}

impl std::str::FromStr for RingKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "z" | "Z" => Ok(RingKind::Z),
            "f2" | "F2" => Ok(RingKind::F2),
            other => Err(format!("unknown ring `{other}` (expected z or f2)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_arith() {
        let (o, z) = (F2::one(), F2::zero());
        assert_eq!(o + o, z);
        assert_eq!(o * o, o);
        assert_eq!(-o, o);
        assert_eq!(F2::from_i64(-3), o);
        assert_eq!(F2::from_i64(4), z);
    }
}
