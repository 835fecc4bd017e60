use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A classical bit string, most significant bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random()).collect())
    }

    /// The `width`-bit big-endian representation of `value`.
    pub fn from_value(value: usize, width: usize) -> Self {
        Self(
            (0..width)
                .rev()
                .map(|shift| (value >> shift) & 1 == 1)
                .collect(),
        )
    }

    /// Big-endian integer value.
    pub fn value(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn chunks(&self, width: usize) -> impl Iterator<Item = Bits> + '_ {
        self.0.chunks(width).map(|c| Bits(c.to_vec()))
    }

    pub fn concat(parts: impl IntoIterator<Item = Bits>) -> Self {
        Self(parts.into_iter().flat_map(|b| b.0).collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses `"1011"` or `"0xB"` (four bits per hex digit).
impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            if hex.is_empty() {
                return Err(Error::BadBits(s.to_string()));
            }
            let mut out = Vec::with_capacity(hex.len() * 4);
            for ch in hex.chars() {
                let d = ch.to_digit(16).ok_or_else(|| Error::BadBits(s.to_string()))?;
                out.extend((0..4).rev().map(|shift| (d >> shift) & 1 == 1));
            }
            return Ok(Self(out));
        }
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BadBits(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
