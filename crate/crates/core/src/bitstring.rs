use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A fixed-length bit string of at most 64 bits.
///
/// Bit `k` is qubit `k`, which is also bit `k` of the basis-state index
/// used by the simulator. The text form puts qubit 0 leftmost.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bitstring {
    len: u8,
    bits: u64,
}

impl Bitstring {
    pub const MAX_LEN: usize = 64;

    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > Self::MAX_LEN {
            return Err(Error::domain(format!("bit strings hold at most 64 bits, got {len}")));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::domain("bits set beyond the string length"));
        }
        Ok(Bitstring {
            len: len as u8,
            bits,
        })
    }

    pub fn zeros(len: usize) -> Self {
        Bitstring::new(len, 0).expect("length checked by caller")
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | (b as u64) << k);
        Bitstring::new(bits.len(), value)
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Basis-state index (qubit `k` = bit `k`).
    pub fn index(self) -> u64 {
        self.bits
    }

    pub fn get(self, k: usize) -> bool {
        debug_assert!(k < self.len());
        self.bits >> k & 1 == 1
    }

    pub fn set(&mut self, k: usize, value: bool) {
        debug_assert!(k < self.len());
        if value {
            self.bits |= 1 << k;
        } else {
            self.bits &= !(1 << k);
        }
    }

    pub fn flipped(mut self, k: usize) -> Self {
        self.bits ^= 1 << k;
        self
    }

    pub fn count_ones(self) -> u32 {
        self.bits.count_ones()
    }

    /// Key whose numeric order equals the lexicographic order of the text form.
    pub fn lex_key(self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.bits.reverse_bits() >> (64 - self.len as u32)
        }
    }

    pub fn to_bools(self) -> Vec<bool> {
        (0..self.len()).map(|k| self.get(k)).collect()
    }
}

impl PartialOrd for Bitstring {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by length, then lexicographically on the text form.
impl Ord for Bitstring {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len, self.lex_key()).cmp(&(other.len, other.lex_key()))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bools = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(format!("invalid bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Bitstring::from_bools(&bools)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_zero_is_leftmost() {
        let b = Bitstring::new(4, 0b0001).unwrap();
        assert_eq!(b.to_string(), "1000");
        assert_eq!("0011".parse::<Bitstring>().unwrap().index(), 0b1100);
    }

    #[test]
    fn lexicographic_order() {
        let mut v: Vec<Bitstring> = ["110", "001", "100", "011"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        v.sort();
        let s: Vec<String> = v.iter().map(|b| b.to_string()).collect();
        assert_eq!(s, ["001", "011", "100", "110"]);
    }

    #[test]
    fn rejects_stray_bits() {
        assert!(Bitstring::new(3, 0b1000).is_err());
        assert!("01x".parse::<Bitstring>().is_err());
    }
}
