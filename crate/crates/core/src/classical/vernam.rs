use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Ordered sequence of bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("`{other}` is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Bitwise XOR of message and key; applying it twice with the same key
/// returns the message.
pub fn vernam(message: &BitString, key: &BitString) -> Result<BitString> {
    if message.len() != key.len() {
        return Err(Error::KeyLengthError {
            message: message.len(),
            key: key.len(),
        });
    }
    Ok(BitString::new(
        message.bits.iter().zip(&key.bits).map(|(m, k)| m ^ k).collect(),
    ))
}
