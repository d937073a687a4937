//! The three edge colors and their fixed total order.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Edge color. The order red < green < blue is fixed so that iteration over
/// colors is deterministic everywhere (serialization, sampling, tests).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
}

pub const COLORS: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

impl Color {
    pub const fn index(self) -> usize {
        match self {
            Color::Red => 0,
            Color::Green => 1,
            Color::Blue => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        COLORS[i]
    }

    /// Two-bit payload used by the address-string encoding. Never zero, so a
    /// zero chunk unambiguously marks padding.
    pub const fn code(self) -> u64 {
        self.index() as u64 + 1
    }

    pub fn from_code(code: u64) -> Option<Self> {
        match code {
            1 => Some(Color::Red),
            2 => Some(Color::Green),
            3 => Some(Color::Blue),
            _ => None,
        }
    }

    /// The two colors other than `self`, in order.
    pub fn others(self) -> [Color; 2] {
        match self {
            Color::Red => [Color::Green, Color::Blue],
            Color::Green => [Color::Red, Color::Blue],
            Color::Blue => [Color::Red, Color::Green],
        }
    }

    pub fn short(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Green => 'g',
            Color::Blue => 'b',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "r" | "red" => Some(Color::Red),
            "g" | "green" => Some(Color::Green),
            "b" | "blue" => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        };
        f.write_str(name)
    }
}

/// Parse a compact color sequence such as "bgbrbgrgr".
pub fn parse_color_seq(s: &str) -> Option<Vec<Color>> {
    s.chars()
        .map(|c| match c {
            'r' => Some(Color::Red),
            'g' => Some(Color::Green),
            'b' => Some(Color::Blue),
            _ => None,
        })
        .collect()
}

/// True when no two consecutive colors are equal. Sequences with a repeat
/// contain an even-length palindrome and immediately backtrack in the graph.
pub fn is_repeat_free(t: &[Color]) -> bool {
    t.windows(2).all(|w| w[0] != w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_red_green_blue() {
        assert!(Color::Red < Color::Green && Color::Green < Color::Blue);
        assert_eq!(COLORS.map(|c| c.index()), [0, 1, 2]);
    }

    #[test]
    fn codes_round_trip_and_avoid_zero() {
        for c in COLORS {
            assert_ne!(c.code(), 0);
            assert_eq!(Color::from_code(c.code()), Some(c));
            assert_eq!(Color::parse(&c.to_string()), Some(c));
            assert_eq!(Color::parse(&c.short().to_string()), Some(c));
        }
        assert_eq!(Color::from_code(0), None);
        assert_eq!(Color::parse("mauve"), None);
    }

    #[test]
    fn repeat_detection() {
        let t = parse_color_seq("bgbrbgrgr").unwrap();
        assert!(is_repeat_free(&t));
        assert!(!is_repeat_free(&parse_color_seq("rr").unwrap()));
        assert!(is_repeat_free(&[]));
    }
}
