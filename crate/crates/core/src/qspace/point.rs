use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use super::QSpaceError;

/// Longest bit-string a [`QPoint`] can hold.
pub const MAX_LEN: u8 = 63;

/// A rational of the canonical presentation: a finite bit-string.
///
/// Strings are ordered so that everything extending `σ0` precedes `σ`,
/// which precedes everything extending `σ1`. Equivalently `σ` sits at the
/// dyadic value `Σ σ_j 2^-(j+1) + 2^-(|σ|+1)` in `(0, 1)`. The enumeration
/// index lists strings in length-lexicographic order, so `ε` is rational
/// number `0`, `"0"` is `1`, `"1"` is `2`, `"00"` is `3`, and so on.
///
/// `Ord` is the dense order `≤_Q`, not the index order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QPoint {
    len: u8,
    // Bits read as a binary numeral, first bit most significant.
    bits: u64,
}

/// Exact dyadic value `num / 2^exp` of a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub num: u64,
    pub exp: u32,
}

impl Dyadic {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u128 << self.exp) as f64
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp < 64 {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl QPoint {
    /// The empty string `ε`, with value 1/2 and index 0.
    pub const ROOT: QPoint = QPoint { len: 0, bits: 0 };

    /// Builds a point from its bits, first bit first.
    pub fn from_bits(bits: &[bool]) -> Result<QPoint, QSpaceError> {
        if bits.len() > MAX_LEN as usize {
            return Err(QSpaceError::TooDeep { len: bits.len() });
        }
        let bits_val = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Ok(QPoint { len: bits.len() as u8, bits: bits_val })
    }

    /// Point with the given length and numeral; `numeral < 2^len`.
    pub fn from_numeral(len: u8, numeral: u64) -> QPoint {
        assert!(len <= MAX_LEN, "bit-string longer than {MAX_LEN}");
        assert!(numeral >> len == 0, "numeral does not fit the length");
        QPoint { len, bits: numeral }
    }

    /// Inverse of [`QPoint::index`]. `None` only when `n` would need more
    /// than [`MAX_LEN`] bits.
    pub fn try_from_index(n: u64) -> Option<QPoint> {
        // n + 1 = 2^len + numeral with numeral < 2^len.
        let m = (n as u128) + 1;
        let len = 127 - m.leading_zeros();
        if len > MAX_LEN as u32 {
            return None;
        }
        let bits = (m - (1u128 << len)) as u64;
        Some(QPoint { len: len as u8, bits })
    }

    /// The `n`-th rational of the enumeration.
    ///
    /// Panics if `n ≥ 2^64 - 1`, which needs a 64-bit string.
    pub fn from_index(n: u64) -> QPoint {
        QPoint::try_from_index(n).expect("index exceeds the representable depth")
    }

    /// Enumeration index `2^|σ| - 1 + numeral(σ)`.
    pub fn index(self) -> u64 {
        ((1u128 << self.len) - 1 + self.bits as u128) as u64
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_root(self) -> bool {
        self.len == 0
    }

    pub fn numeral(self) -> u64 {
        self.bits
    }

    /// Bit `j` (0-based from the left).
    pub fn bit(self, j: usize) -> bool {
        assert!(j < self.len as usize);
        (self.bits >> (self.len as usize - 1 - j)) & 1 == 1
    }

    pub fn child(self, bit: bool) -> Option<QPoint> {
        if self.len >= MAX_LEN {
            return None;
        }
        Some(QPoint { len: self.len + 1, bits: (self.bits << 1) | bit as u64 })
    }

    pub fn parent(self) -> Option<QPoint> {
        if self.len == 0 {
            None
        } else {
            Some(QPoint { len: self.len - 1, bits: self.bits >> 1 })
        }
    }

    /// First `len` bits; `len ≤ self.len()`.
    pub fn prefix(self, len: usize) -> QPoint {
        assert!(len <= self.len as usize);
        QPoint { len: len as u8, bits: self.bits >> (self.len as usize - len) }
    }

    /// `self ⪯ other` in the prefix order.
    pub fn is_prefix_of(self, other: QPoint) -> bool {
        self.len <= other.len && other.prefix(self.len as usize) == self
    }

    pub fn value(self) -> Dyadic {
        Dyadic { num: (self.bits << 1) | 1, exp: self.len as u32 + 1 }
    }

    pub fn bits(self) -> impl Iterator<Item = bool> {
        (0..self.len as usize).map(move |j| self.bit(j))
    }
}

/// Three-way comparison in the dense order.
pub fn q_compare(x: QPoint, y: QPoint) -> Ordering {
    // Bring both values to the common denominator 2^(L+1).
    let top = x.len.max(y.len);
    let a = ((x.bits << 1) | 1) << (top - x.len);
    let b = ((y.bits << 1) | 1) << (top - y.len);
    a.cmp(&b)
}

pub fn q_of_index(n: u64) -> QPoint {
    QPoint::from_index(n)
}

pub fn q_index(x: QPoint) -> u64 {
    x.index()
}

impl Ord for QPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        q_compare(*self, *other)
    }
}

impl PartialOrd for QPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            f.write_str("ε")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

impl FromStr for QPoint {
    type Err = QSpaceError;

    /// Parses a bit-string; the empty string is `ε`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_LEN as usize {
            return Err(QSpaceError::TooDeep { len: s.len() });
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(QSpaceError::BadPointChar(other)),
                };
        }
        Ok(QPoint { len: s.len() as u8, bits })
    }
}
