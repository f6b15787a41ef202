use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bellmap::EncodingOp;

/// A bit string, serialized as `"0110..."`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Message(Vec<bool>);

impl Message {
    pub fn new(bits: Vec<bool>) -> Self {
        Message(bits)
    }

    pub fn empty() -> Self {
        Message(Vec::new())
    }

    /// UTF-8 bytes, most significant bit first.
    pub fn from_text(text: &str) -> Self {
        Message(
            text.bytes()
                .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
                .collect(),
        )
    }

    pub fn from_ops(ops: &[EncodingOp]) -> Self {
        Message(ops.iter().flat_map(|op| op.bits()).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Two-bit codewords in order. Panics on odd length.
    pub fn ops(&self) -> Vec<EncodingOp> {
        assert!(self.0.len().is_multiple_of(2), "message length must be even");
        self.0.chunks(2).map(|c| EncodingOp::from_bits(c[0], c[1])).collect()
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Message {
    type Err = String;

    /// Binary (`"0110"`) or hex with a `0x` prefix (`"0x6"` is `"0110"`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            let mut bits = Vec::with_capacity(hex.len() * 4);
            for c in hex.chars() {
                let v = c.to_digit(16).ok_or_else(|| format!("invalid hex digit `{c}`"))?;
                bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
            }
            return Ok(Message(bits));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(format!("invalid bit `{c}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Message)
    }
}

impl Serialize for Message {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Message {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_binary_and_hex() {
        let m: Message = "0110".parse().unwrap();
        assert_eq!(m.to_string(), "0110");
        assert_eq!("0x6".parse::<Message>().unwrap(), m);
        assert!("01a".parse::<Message>().is_err());
        assert!("0xg".parse::<Message>().is_err());
        assert!("".parse::<Message>().unwrap().is_empty());
    }

    #[test]
    fn ops_follow_codewords() {
        let m: Message = "0110".parse().unwrap();
        assert_eq!(m.ops(), vec![EncodingOp::U1, EncodingOp::U2]);
        assert_eq!(Message::from_ops(&m.ops()), m);
    }

    #[test]
    fn text_helper() {
        assert_eq!(Message::from_text("A").to_string(), "01000001");
    }
}
