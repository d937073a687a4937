//! Addresses: color sequences naming walks from the entrance, the tree they
//! form, and their fixed-width bit-string encoding.
//!
//! A tuple address is a repeat-free color sequence whose first color is not
//! the one missing at the entrance; together with four named specials these
//! are the vertices of a depth-`p_max` tree. `lambda` is the per-color
//! neighbor map on that tree, `encode`/`decode` are the bijection into
//! `2·p_max`-bit strings, and `l_prime`/`l_map` resolve addresses to actual
//! vertex labels by querying the oracle.

use crate::color::{is_repeat_free, Color};
use crate::error::{Error, Result};
use crate::oracle::{GraphView, Oracle};

/// An address: one of the four specials or a color tuple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Address {
    Zero,
    Empty,
    NoEdge,
    Invalid,
    Tuple(Vec<Color>),
}

impl Address {
    pub fn tuple(colors: &[Color]) -> Self {
        Address::Tuple(colors.to_vec())
    }

    pub fn len(&self) -> usize {
        match self {
            Address::Tuple(t) => t.len(),
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Address::Empty)
    }
}

impl std::fmt::Display for Address {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Address::Zero => f.write_str("zero"),
            Address::Empty => f.write_str("empty"),
            Address::NoEdge => f.write_str("noedge"),
            Address::Invalid => f.write_str("invalid"),
            Address::Tuple(t) => {
                for c in t {
                    write!(f, "{}", c.short())?;
                }
                Ok(())
            }
        }
    }
}

/// Encoding context: the depth cap (the circuit's gate budget) and the color
/// missing at the entrance, which determines which tuples are tree labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddressCodec {
    p_max: u32,
    c_star: Color,
}

/// Encoded specials. Zero must be the all-zero string; the others are the
/// three smallest nonzero values, which keeps them clear of every tuple
/// image (tuples have a nonzero leading 2-bit chunk).
pub const ZERO_STRING: u64 = 0;
pub const EMPTY_STRING: u64 = 1;
pub const NOEDGE_STRING: u64 = 2;
pub const INVALID_STRING: u64 = 3;

impl AddressCodec {
    pub fn new(p_max: u32, c_star: Color) -> Result<Self> {
        if !(2..=31).contains(&p_max) {
            return Err(Error::Precondition(format!(
                "address depth cap must be in [2, 31], got {p_max}"
            )));
        }
        Ok(AddressCodec { p_max, c_star })
    }

    pub fn p_max(&self) -> u32 {
        self.p_max
    }

    pub fn c_star(&self) -> Color {
        self.c_star
    }

    /// Width of encoded address strings in bits.
    pub fn string_bits(&self) -> u32 {
        2 * self.p_max
    }

    /// Is `t` a vertex label of the address tree?
    pub fn is_tree_label(&self, t: &Address) -> bool {
        match t {
            Address::Tuple(colors) => {
                !colors.is_empty()
                    && colors.len() <= self.p_max as usize
                    && colors[0] != self.c_star
                    && is_repeat_free(colors)
            }
            _ => true,
        }
    }

    /// The color-c neighbor of `t` in the address tree: append or strip a
    /// color on tuples, with the special vertices wired as follows. The root
    /// sends the missing color to `NoEdge`; `Zero`, `NoEdge`, and `Invalid`
    /// all send every color to `Invalid`.
    pub fn lambda(&self, t: &Address, c: Color) -> Result<Address> {
        debug_assert!(self.is_tree_label(t), "lambda on a non-label: {t}");
        Ok(match t {
            Address::Zero | Address::NoEdge | Address::Invalid => Address::Invalid,
            Address::Empty => {
                if c == self.c_star {
                    Address::NoEdge
                } else {
                    Address::Tuple(vec![c])
                }
            }
            Address::Tuple(colors) => {
                if *colors.last().expect("tuples are nonempty") == c {
                    if colors.len() == 1 {
                        Address::Empty
                    } else {
                        Address::Tuple(colors[..colors.len() - 1].to_vec())
                    }
                } else {
                    if colors.len() >= self.p_max as usize {
                        return Err(Error::AddressDepth { p_max: self.p_max });
                    }
                    let mut ext = colors.clone();
                    ext.push(c);
                    Address::Tuple(ext)
                }
            }
        })
    }

    /// Parent of a tree label, toward the root: strip the last color of a
    /// tuple; `NoEdge` hangs off the root. `Empty`, `Zero`, and `Invalid`
    /// have no parent on the root side.
    pub fn parent(&self, t: &Address) -> Option<Address> {
        match t {
            Address::Tuple(colors) if colors.len() == 1 => Some(Address::Empty),
            Address::Tuple(colors) => Some(Address::Tuple(colors[..colors.len() - 1].to_vec())),
            Address::NoEdge => Some(Address::Empty),
            _ => None,
        }
    }

    /// The injective string encoding: specials take the four smallest
    /// values (zero address = all-zero string) and a tuple packs its colors
    /// two bits each from the top of the string, zero-padded.
    pub fn encode(&self, t: &Address) -> Result<u64> {
        if !self.is_tree_label(t) {
            return Err(Error::NotAnAddress(t.to_string()));
        }
        Ok(match t {
            Address::Zero => ZERO_STRING,
            Address::Empty => EMPTY_STRING,
            Address::NoEdge => NOEDGE_STRING,
            Address::Invalid => INVALID_STRING,
            Address::Tuple(colors) => {
                let mut s = 0u64;
                for (i, c) in colors.iter().enumerate() {
                    s |= c.code() << (2 * (self.p_max as usize - 1 - i));
                }
                s
            }
        })
    }

    /// Total inverse of `encode`: strings outside the range decode to
    /// `Invalid`.
    pub fn decode(&self, s: u64) -> Address {
        if self.string_bits() < 64 && s >> self.string_bits() != 0 {
            return Address::Invalid;
        }
        match s {
            ZERO_STRING => return Address::Zero,
            EMPTY_STRING => return Address::Empty,
            NOEDGE_STRING => return Address::NoEdge,
            INVALID_STRING => return Address::Invalid,
            _ => {}
        }
        let mut colors = Vec::new();
        let mut padding = false;
        for i in 0..self.p_max {
            let chunk = (s >> (2 * (self.p_max - 1 - i))) & 3;
            match (padding, Color::from_code(chunk)) {
                (false, Some(c)) => colors.push(c),
                (false, None) => padding = true,
                (true, None) => {}
                (true, Some(_)) => return Address::Invalid,
            }
        }
        let t = Address::Tuple(colors);
        if self.is_tree_label(&t) {
            t
        } else {
            Address::Invalid
        }
    }

    /// All tree labels reachable from the root by `lambda`, i.e. the whole
    /// vertex set of the address tree. Exponential in `p_max`; test use.
    pub fn enumerate_labels(&self) -> Vec<Address> {
        let mut seen = std::collections::BTreeSet::new();
        let mut queue = std::collections::VecDeque::new();
        for t in [Address::Zero, Address::Empty] {
            seen.insert(t.clone());
            queue.push_back(t);
        }
        while let Some(t) = queue.pop_front() {
            for c in crate::color::COLORS {
                let next = match self.lambda(&t, c) {
                    Ok(next) => next,
                    Err(_) => continue, // depth cap: the frontier stops here
                };
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Resolve an address to a vertex label through metered queries: the empty
/// address is the entrance (zero queries), a tuple is a fold of `query`
/// over its colors costing exactly its length.
pub fn l_prime(oracle: &Oracle, t: &Address) -> u64 {
    match t {
        Address::Zero => 0,
        Address::Invalid => oracle.view().invalid_label(),
        Address::NoEdge => oracle.view().noedge_label(),
        Address::Empty => oracle.entrance_label(),
        Address::Tuple(colors) => {
            let mut v = oracle.entrance_label();
            for &c in colors {
                v = oracle.query(c, v);
            }
            v
        }
    }
}

/// Unmetered resolution against a graph view; analysis-side only.
pub fn resolve_address(view: &GraphView, t: &Address) -> u64 {
    match t {
        Address::Zero => 0,
        Address::Invalid => view.invalid_label(),
        Address::NoEdge => view.noedge_label(),
        Address::Empty => view.entrance_label(),
        Address::Tuple(colors) => {
            let mut v = view.entrance_label();
            for &c in colors {
                v = view.eta(c, v);
            }
            v
        }
    }
}

/// Componentwise resolution of encoded address registers to vertex labels.
pub fn l_map(oracle: &Oracle, codec: &AddressCodec, regs: &[u64]) -> Vec<u64> {
    regs.iter()
        .map(|&s| l_prime(oracle, &codec.decode(s)))
        .collect()
}

/// Unmetered componentwise resolution.
pub fn l_map_white_box(view: &GraphView, codec: &AddressCodec, regs: &[u64]) -> Vec<u64> {
    regs.iter()
        .map(|&s| resolve_address(view, &codec.decode(s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{parse_color_seq, Color, COLORS};
    use crate::fixtures::{bits, n3_reference};

    fn codec() -> AddressCodec {
        AddressCodec::new(9, Color::Green).unwrap()
    }

    #[test]
    fn lambda_at_the_root() {
        let cx = codec();
        assert_eq!(cx.lambda(&Address::Empty, Color::Green).unwrap(), Address::NoEdge);
        assert_eq!(
            cx.lambda(&Address::Empty, Color::Red).unwrap(),
            Address::tuple(&[Color::Red])
        );
    }

    #[test]
    fn lambda_strips_and_appends() {
        let cx = codec();
        let r = Address::tuple(&[Color::Red]);
        assert_eq!(cx.lambda(&r, Color::Red).unwrap(), Address::Empty);
        assert_eq!(
            cx.lambda(&r, Color::Green).unwrap(),
            Address::tuple(&[Color::Red, Color::Green])
        );
    }

    #[test]
    fn lambda_sends_dead_ends_to_invalid() {
        let cx = codec();
        for t in [Address::Zero, Address::NoEdge, Address::Invalid] {
            for c in COLORS {
                assert_eq!(cx.lambda(&t, c).unwrap(), Address::Invalid);
            }
        }
    }

    #[test]
    fn lambda_depth_cap_is_an_error() {
        let cx = AddressCodec::new(3, Color::Green).unwrap();
        let full = Address::tuple(&parse_color_seq("rgb").unwrap());
        assert!(matches!(
            cx.lambda(&full, Color::Red),
            Err(Error::AddressDepth { .. })
        ));
        // Stripping at full depth still works.
        assert_eq!(
            cx.lambda(&full, Color::Blue).unwrap(),
            Address::tuple(&parse_color_seq("rg").unwrap())
        );
    }

    #[test]
    fn encoding_pins_the_reserved_strings() {
        let cx = codec();
        assert_eq!(cx.encode(&Address::Zero).unwrap(), 0);
        assert_eq!(cx.decode(0), Address::Zero);
        assert_eq!(cx.decode(EMPTY_STRING), Address::Empty);
        assert_eq!(cx.decode(NOEDGE_STRING), Address::NoEdge);
        assert_eq!(cx.decode(INVALID_STRING), Address::Invalid);
    }

    #[test]
    fn out_of_range_strings_decode_to_invalid() {
        let cx = codec();
        let all_ones = (1u64 << cx.string_bits()) - 1;
        assert_eq!(cx.decode(all_ones), Address::Invalid);
        // Payload after padding.
        assert_eq!(cx.decode(0b01_00_01 << (2 * 6)), Address::Invalid);
        // Tuple starting with the missing color is not a tree label.
        let bad = cx.c_star().code() << (2 * (cx.p_max() - 1));
        assert_eq!(cx.decode(bad), Address::Invalid);
        // Repeats are not tree labels.
        let rr = Address::Tuple(vec![Color::Red, Color::Red]);
        assert!(cx.encode(&rr).is_err());
    }

    #[test]
    fn encode_decode_round_trip_on_all_labels() {
        let cx = AddressCodec::new(6, Color::Blue).unwrap();
        let labels = cx.enumerate_labels();
        // 4 specials plus 2^k tuples per length k.
        let expected = 4 + (1..=6).map(|k| 1usize << k).sum::<usize>();
        assert_eq!(labels.len(), expected);
        for t in &labels {
            assert!(cx.is_tree_label(t));
            if let Address::Tuple(colors) = t {
                assert!(is_repeat_free(colors));
                assert_ne!(colors[0], cx.c_star());
            }
            let s = cx.encode(t).unwrap();
            assert_eq!(&cx.decode(s), t, "string {s:#b}");
        }
    }

    #[test]
    fn lambda_is_an_involution_on_tuples() {
        let cx = AddressCodec::new(5, Color::Red).unwrap();
        for t in cx.enumerate_labels() {
            if !matches!(t, Address::Tuple(_)) {
                continue;
            }
            for c in COLORS {
                match cx.lambda(&t, c) {
                    Ok(u) => {
                        if matches!(u, Address::Tuple(_) | Address::Empty) {
                            assert_eq!(cx.lambda(&u, c).unwrap(), t);
                        }
                    }
                    Err(Error::AddressDepth { .. }) => {}
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn l_prime_pinned_resolutions() {
        let g = n3_reference();
        let o = Oracle::new(&g);
        let cx = AddressCodec::new(9, g.missing_color()).unwrap();
        assert_eq!(l_prime(&o, &Address::Empty), g.entrance_label());
        assert_eq!(o.meter(), 0);
        assert_eq!(
            l_prime(&o, &Address::tuple(&parse_color_seq("b").unwrap())),
            bits("101000")
        );
        assert_eq!(o.meter(), 1);
        let t = parse_color_seq("bgbrbgrgr").unwrap();
        assert_eq!(l_prime(&o, &Address::tuple(&t)), g.exit_label());
        assert_eq!(o.meter(), 1 + 9);
        assert_eq!(l_prime(&o, &Address::Zero), 0);
        assert_eq!(l_prime(&o, &Address::Invalid), g.invalid_label());
        assert_eq!(l_prime(&o, &Address::NoEdge), g.noedge_label());
        // l_map agrees componentwise, starting from all-zero registers.
        let regs = vec![0u64; 4];
        assert_eq!(l_map(&o, &cx, &regs), vec![0; 4]);
        let one = cx.encode(&Address::tuple(&parse_color_seq("b").unwrap())).unwrap();
        assert_eq!(l_map(&o, &cx, &[one]), vec![bits("101000")]);
    }
}
