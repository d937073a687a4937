//! Color-preserving permutations of the weld.
//!
//! The weld vertices split into six classes by (side, tree-edge color). A
//! permutation that fixes every class maps valid welded trees to valid
//! welded trees when the weld edges are carried along. `sample` draws
//! uniformly from the product of the six symmetric groups, which is the
//! distribution the hardness experiments integrate over.

use crate::color::COLORS;
use crate::error::{Error, Result};
use crate::graph::{Side, WeldedTree};
use crate::rng::RngStream;

/// A permutation of weld vertices that preserves each (side, color) class;
/// identity on all other vertices. Stored densely with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorPreservingPermutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl ColorPreservingPermutation {
    pub fn identity(g: &WeldedTree) -> Self {
        let forward: Vec<u32> = (0..g.vertex_count() as u32).collect();
        ColorPreservingPermutation {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Build from a full forward map, verifying bijectivity, identity off the
    /// weld, and class preservation.
    pub fn from_forward(g: &WeldedTree, forward: Vec<u32>) -> Result<Self> {
        if forward.len() != g.vertex_count() {
            return Err(Error::NotColorPreserving("length mismatch".into()));
        }
        let mut inverse = vec![u32::MAX; forward.len()];
        for (v, &w) in forward.iter().enumerate() {
            let v = v as u32;
            if w as usize >= forward.len() || inverse[w as usize] != u32::MAX {
                return Err(Error::NotColorPreserving(format!("not a bijection at {v}")));
            }
            inverse[w as usize] = v;
            if g.weld_class(v) != g.weld_class(w) {
                return Err(Error::NotColorPreserving(format!(
                    "vertex {v} maps across classes to {w}"
                )));
            }
            if !g.is_weld_vertex(v) && v != w {
                return Err(Error::NotColorPreserving(format!(
                    "non-weld vertex {v} is moved"
                )));
            }
        }
        Ok(ColorPreservingPermutation { forward, inverse })
    }

    /// Uniform draw from the product of the six per-class symmetric groups.
    pub fn sample(g: &WeldedTree, rng: &mut RngStream) -> Self {
        let mut forward: Vec<u32> = (0..g.vertex_count() as u32).collect();
        for side in [Side::Left, Side::Right] {
            for color in COLORS {
                let members = g.weld_class_members(side, color);
                let mut image = members.clone();
                rng.shuffle(&mut image);
                for (&v, &w) in members.iter().zip(&image) {
                    forward[v as usize] = w;
                }
            }
        }
        let mut inverse = vec![0u32; forward.len()];
        for (v, &w) in forward.iter().enumerate() {
            inverse[w as usize] = v as u32;
        }
        ColorPreservingPermutation { forward, inverse }
    }

    /// The transposition of two same-class weld vertices.
    pub fn transposition(g: &WeldedTree, a: u32, b: u32) -> Result<Self> {
        let mut forward: Vec<u32> = (0..g.vertex_count() as u32).collect();
        forward[a as usize] = b;
        forward[b as usize] = a;
        Self::from_forward(g, forward)
    }

    pub fn map(&self, v: u32) -> u32 {
        self.forward[v as usize]
    }

    pub fn inv(&self, v: u32) -> u32 {
        self.inverse[v as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(v, &w)| v as u32 == w)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let forward: Vec<u32> = other.forward.iter().map(|&w| self.forward[w as usize]).collect();
        let mut inverse = vec![0u32; forward.len()];
        for (v, &w) in forward.iter().enumerate() {
            inverse[w as usize] = v as u32;
        }
        ColorPreservingPermutation { forward, inverse }
    }
}

/// The permuted graph: weld edge `(u, v, c)` becomes `(σ(u), σ(v), c)`,
/// everything else is untouched.
pub fn apply_permutation(
    g: &WeldedTree,
    sigma: &ColorPreservingPermutation,
) -> Result<WeldedTree> {
    // Re-verify class preservation so stale permutations cannot corrupt.
    for v in g.weld_vertices() {
        if g.weld_class(v) != g.weld_class(sigma.map(v)) {
            return Err(Error::NotColorPreserving(format!(
                "vertex {v} maps across classes"
            )));
        }
    }
    let mut adjacency: Vec<[Option<u32>; 3]> = (0..g.vertex_count() as u32)
        .map(|v| {
            let mut row = [None; 3];
            for c in COLORS {
                row[c.index()] = g.neighbor(v, c);
            }
            row
        })
        .collect();
    for u in g.weld_vertices() {
        let class_color = g.weld_class(u).expect("weld vertex has a class").1;
        for c in COLORS {
            if c == class_color {
                continue;
            }
            let v = g.neighbor(u, c).expect("weld vertices have all three colors");
            adjacency[sigma.map(u) as usize][c.index()] = Some(sigma.map(v));
        }
    }
    Ok(g.with_weld_adjacency(adjacency))
}

/// Total number of color-preserving permutations, if it fits in u64.
pub fn permutation_count(g: &WeldedTree) -> Option<u64> {
    let mut total = 1u64;
    for side in [Side::Left, Side::Right] {
        for color in COLORS {
            let k = g.weld_class_members(side, color).len() as u64;
            for f in 2..=k {
                total = total.checked_mul(f)?;
            }
        }
    }
    Some(total)
}

/// Enumerate every color-preserving permutation. Guarded: refuses when the
/// total exceeds `limit` (the count grows factorially in the class sizes).
pub fn enumerate_permutations(
    g: &WeldedTree,
    limit: u64,
) -> Result<Vec<ColorPreservingPermutation>> {
    let total = permutation_count(g)
        .filter(|&t| t <= limit)
        .ok_or_else(|| Error::Precondition(format!(
            "permutation family larger than the enumeration limit {limit}"
        )))?;
    let classes: Vec<Vec<u32>> = [Side::Left, Side::Right]
        .into_iter()
        .flat_map(|side| COLORS.into_iter().map(move |c| (side, c)))
        .map(|(side, c)| g.weld_class_members(side, c))
        .collect();
    let mut out = Vec::with_capacity(total as usize);
    for mut index in 0..total {
        let mut forward: Vec<u32> = (0..g.vertex_count() as u32).collect();
        for class in &classes {
            let k = class.len() as u64;
            let size: u64 = (1..=k).product();
            let sub = index % size;
            index /= size;
            let perm = nth_permutation(class, sub);
            for (&v, w) in class.iter().zip(perm) {
                forward[v as usize] = w;
            }
        }
        out.push(ColorPreservingPermutation::from_forward(g, forward)?);
    }
    Ok(out)
}

/// The `index`-th permutation of `items` in Lehmer-code order.
fn nth_permutation(items: &[u32], mut index: u64) -> Vec<u32> {
    let mut pool: Vec<u32> = items.to_vec();
    let mut out = Vec::with_capacity(items.len());
    for pos in (1..=items.len() as u64).rev() {
        let fact: u64 = (1..pos).product();
        let pick = (index / fact) as usize;
        index %= fact;
        out.push(pool.remove(pick));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_canonical, validate_welded_tree};

    #[test]
    fn identity_permutation_reproduces_the_graph() {
        let g = build_canonical(3, 21).unwrap();
        let id = ColorPreservingPermutation::identity(&g);
        let h = apply_permutation(&g, &id).unwrap();
        assert_eq!(
            serde_json::to_string(&g.to_raw().edges).unwrap(),
            serde_json::to_string(&h.to_raw().edges).unwrap()
        );
    }

    #[test]
    fn sampled_permutations_yield_valid_graphs() {
        let g = build_canonical(4, 33).unwrap();
        for trial in 0..50 {
            let mut rng = RngStream::derive(33, "sigma", trial);
            let sigma = ColorPreservingPermutation::sample(&g, &mut rng);
            let h = apply_permutation(&g, &sigma).unwrap();
            let report = validate_welded_tree(&h);
            assert!(report.is_ok(), "trial {trial}: {report}");
        }
    }

    #[test]
    fn gamma_counts_invariant_under_permutation() {
        let g = build_canonical(4, 8).unwrap();
        let mut rng = RngStream::derive(8, "sigma", 0);
        let sigma = ColorPreservingPermutation::sample(&g, &mut rng);
        let h = apply_permutation(&g, &sigma).unwrap();
        for side in [Side::Left, Side::Right] {
            for c in COLORS {
                for i in 1..=4 {
                    assert_eq!(
                        g.gamma_count(side, c, i).unwrap(),
                        h.gamma_count(side, c, i).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn cross_class_transposition_is_rejected() {
        let g = build_canonical(3, 5).unwrap();
        let mut classes = std::collections::HashMap::new();
        for v in g.weld_vertices() {
            classes.entry(g.weld_class(v).unwrap()).or_insert_with(Vec::new).push(v);
        }
        let mut iter = classes.into_iter();
        let (_, a) = iter.next().unwrap();
        let (_, b) = iter.next().unwrap();
        assert!(ColorPreservingPermutation::transposition(&g, a[0], b[0]).is_err());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let g = build_canonical(3, 77).unwrap();
        let mut r1 = RngStream::derive(77, "sigma", 1);
        let mut r2 = RngStream::derive(77, "sigma", 2);
        let sigma = ColorPreservingPermutation::sample(&g, &mut r1);
        let rho = ColorPreservingPermutation::sample(&g, &mut r2);
        let once = apply_permutation(&g, &sigma.compose(&rho)).unwrap();
        let twice = apply_permutation(&apply_permutation(&g, &rho).unwrap(), &sigma).unwrap();
        assert_eq!(
            serde_json::to_string(&once.to_raw().edges).unwrap(),
            serde_json::to_string(&twice.to_raw().edges).unwrap()
        );
    }

    #[test]
    fn enumeration_count_matches_class_sizes() {
        let g = build_canonical(2, 4).unwrap();
        // class sizes at n = 2: c_* has ceil(4/3) = 2 per side, others 1.
        let total = permutation_count(&g).unwrap();
        assert_eq!(total, 4);
        let all = enumerate_permutations(&g, 100).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().any(|p| p.is_identity()));
    }
}
