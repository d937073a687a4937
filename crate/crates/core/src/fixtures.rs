//! Hand-constructed small instances with pinned labels and colors.
//!
//! The n = 3 instance below is fixed once and for all so tests can assert
//! exact oracle answers, address resolutions, and path embeddings against
//! hand-checked values instead of seed-dependent ones.

use crate::color::Color::{Blue as B, Green as G, Red as R};
use crate::graph::{RawGraph, WeldedTree};

/// Parse a binary label string, e.g. `bits("010110")`.
pub fn bits(s: &str) -> u64 {
    u64::from_str_radix(s, 2).expect("binary literal")
}

/// A fixed n = 3 welded tree with 30 vertices and a known proper coloring.
///
/// Vertex 0 is the entrance (label 000010) and vertex 15 the exit (label
/// 000011). The color missing at the entrance is green. A few places the
/// test-suite relies on: the red neighbor of the entrance is 010110, the
/// blue neighbor is 101000, and following blue-green-blue-red-blue-green-
/// red-green-red from the entrance ends at the exit.
pub fn n3_reference() -> WeldedTree {
    let labels = [
        "000010", "010110", "101000", "011101", "101001", "110100", "101010", "001100", "110011",
        "101111", "111001", "011000", "010100", "101110", "000001", "000011", "101101", "001010",
        "101100", "001011", "011110", "010101", "100100", "001001", "010001", "000101", "000100",
        "110101", "001110", "110110",
    ];
    let edges = vec![
        // left tree
        (0, 1, R),
        (0, 2, B),
        (1, 3, G),
        (1, 4, B),
        (2, 5, G),
        (2, 6, R),
        (3, 7, B),
        (3, 8, R),
        (4, 9, G),
        (4, 10, R),
        (5, 11, R),
        (5, 12, B),
        (6, 13, G),
        (6, 14, B),
        // right tree
        (15, 16, B),
        (15, 17, R),
        (16, 19, G),
        (16, 18, R),
        (17, 21, G),
        (17, 20, B),
        (19, 25, R),
        (19, 24, B),
        (18, 23, G),
        (18, 22, B),
        (21, 29, B),
        (21, 28, R),
        (20, 27, G),
        (20, 26, R),
        // weld cycle
        (14, 25, G),
        (25, 9, B),
        (9, 22, R),
        (22, 12, G),
        (12, 27, R),
        (27, 10, B),
        (10, 28, G),
        (28, 8, B),
        (8, 29, G),
        (29, 13, R),
        (13, 26, B),
        (26, 7, G),
        (7, 24, R),
        (24, 11, G),
        (11, 23, B),
        (23, 14, R),
    ];
    let raw = RawGraph {
        n: 3,
        label_bits: 6,
        seed: None,
        entrance: 0,
        exit: 15,
        labels: labels
            .iter()
            .map(|b| format!("{:02x}", bits(b)))
            .collect(),
        edges,
    };
    WeldedTree::from_raw(&raw).expect("reference instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Color;
    use crate::graph::{validate_welded_tree, Side};

    #[test]
    fn reference_instance_is_valid() {
        let g = n3_reference();
        assert!(validate_welded_tree(&g).is_ok());
        assert_eq!(g.vertex_count(), 30);
        assert_eq!(g.missing_color(), Color::Green);
        assert_eq!(g.entrance_label(), bits("000010"));
        assert_eq!(g.exit_label(), bits("000011"));
    }

    #[test]
    fn pinned_neighbors() {
        let g = n3_reference();
        let red_child = g.neighbor(g.entrance(), Color::Red).unwrap();
        assert_eq!(g.label_of(red_child), bits("010110"));
        let blue_child = g.neighbor(g.entrance(), Color::Blue).unwrap();
        assert_eq!(g.label_of(blue_child), bits("101000"));
        assert_eq!(g.neighbor(g.entrance(), Color::Green), None);
    }

    #[test]
    fn level_two_color_counts() {
        // Left tree, level 2: two green edges, one red, one blue.
        let g = n3_reference();
        assert_eq!(g.gamma_count(Side::Left, Color::Green, 2).unwrap(), 2);
        assert_eq!(g.gamma_count(Side::Left, Color::Red, 2).unwrap(), 1);
        assert_eq!(g.gamma_count(Side::Left, Color::Blue, 2).unwrap(), 1);
        // Level 1 has one edge of each non-missing color.
        assert_eq!(g.gamma_count(Side::Left, Color::Green, 1).unwrap(), 0);
        assert_eq!(g.gamma_count(Side::Left, Color::Red, 1).unwrap(), 1);
        assert_eq!(g.gamma_count(Side::Left, Color::Blue, 1).unwrap(), 1);
    }

    #[test]
    fn swapping_two_red_left_vertices_rewires_the_weld() {
        use crate::permutation::{apply_permutation, ColorPreservingPermutation};
        let g = n3_reference();
        // Vertices 11 and 10 are both red-left.
        assert_eq!(g.weld_class(11), Some((Side::Left, Color::Red)));
        assert_eq!(g.weld_class(10), Some((Side::Left, Color::Red)));
        let sigma = ColorPreservingPermutation::transposition(&g, 11, 10).unwrap();
        let h = apply_permutation(&g, &sigma).unwrap();
        assert!(validate_welded_tree(&h).is_ok());
        // The four weld edges at 10 and 11 move; spot-check the new wiring.
        assert_eq!(h.neighbor(11, Color::Blue), Some(27));
        assert_eq!(h.neighbor(11, Color::Green), Some(28));
        assert_eq!(h.neighbor(10, Color::Green), Some(24));
        assert_eq!(h.neighbor(10, Color::Blue), Some(23));
        // Tree edges are untouched.
        assert_eq!(h.neighbor(11, Color::Red), Some(5));
        assert_eq!(h.neighbor(10, Color::Red), Some(4));
    }
}
