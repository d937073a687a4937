//! Classical simulation of compliant rooted circuits, and the generic
//! subtree-sampling classical query algorithm.
//!
//! The simulation runs the circuit's address-space analog, which needs the
//! oracle only to learn the color missing at the entrance (two queries).
//! At each prefix it samples a basis configuration with Born probability
//! and resolves the sampled address registers to vertex labels through the
//! oracle, paying one query per tuple color. The meter is the quantity
//! under test; the exponential-time state computation is the point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::address::{l_map, l_map_white_box, Address, AddressCodec};
use crate::circuit::Circuit;
use crate::color::{Color, COLORS};
use crate::error::{Error, Result};
use crate::oracle::{GraphView, Oracle};
use crate::rng::RngStream;
use crate::simulator::{apply_gate, initial_state, BasisConfig, SimContext, SimOptions, SparseState};

/// One sampled prefix: the drawn configuration and its resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepSample {
    pub step: usize,
    /// Encoded address registers of the sampled configuration, hex.
    pub address_strings: Vec<String>,
    pub workspace: u64,
    /// Resolved vertex labels, hex.
    pub labels: Vec<String>,
    /// Queries spent resolving this step's registers.
    pub queries: u64,
}

#[derive(Debug, Clone)]
pub struct ClassicalRun {
    pub c_star: Color,
    pub samples: Vec<StepSample>,
    /// Total meter reading, always `2 + resolved_tuple_lengths`.
    pub total_queries: u64,
    pub resolved_tuple_lengths: u64,
    /// Raw sampled configurations, for analyses that want them.
    pub configs: Vec<BasisConfig>,
}

fn hex_width(bits: u32) -> usize {
    (bits as usize).div_ceil(4)
}

/// Draw one configuration with Born probability, deterministically in the
/// stream, walking the canonically ordered support.
pub fn sample_config(state: &SparseState, rng: &mut RngStream) -> BasisConfig {
    let total = state.norm_sq();
    let mut r = rng.next_f64() * total;
    let mut last = None;
    for (config, amp) in state.iter() {
        let w = amp.norm_sqr();
        if r < w {
            return config.clone();
        }
        r -= w;
        last = Some(config);
    }
    last.expect("nonempty state").clone()
}

/// Simulate a compliant rooted circuit classically: run its address-space
/// analog (two real queries, for the missing color), then for every prefix
/// sample a configuration and resolve it through the oracle.
pub fn simulate_classical(
    circuit: &Circuit,
    oracle: &Oracle,
    seed: u64,
    opts: &SimOptions,
) -> Result<ClassicalRun> {
    circuit.validate()?;
    if oracle.meter() != 0 {
        return Err(Error::Precondition("oracle meter must start at zero".into()));
    }
    let c_star = oracle.missing_color();
    debug_assert_eq!(oracle.meter(), 2);
    let codec = AddressCodec::new(circuit.p.max(2), c_star)?;
    let ctx = SimContext::Address(codec);
    let label_hex = hex_width(oracle.view().graph().label_bits());
    let addr_hex = hex_width(codec.string_bits());

    let mut state = initial_state(&ctx, circuit.p);
    let mut samples = Vec::with_capacity(circuit.gates.len());
    let mut configs = Vec::with_capacity(circuit.gates.len());
    let mut resolved_tuple_lengths = 0u64;
    for (index, gate) in circuit.gates.iter().enumerate() {
        state = apply_gate(&state, gate, index, &ctx, opts)?;
        let step = index + 1;
        let mut stream = RngStream::derive(seed, "transcript-sample", step as u64);
        let config = sample_config(&state, &mut stream);
        let before = oracle.meter();
        let labels = l_map(oracle, &codec, &config.regs);
        let queries = oracle.meter() - before;
        let lengths: u64 = config.regs.iter().map(|&s| codec.decode(s).len() as u64).sum();
        debug_assert_eq!(queries, lengths, "resolution cost is the total tuple length");
        resolved_tuple_lengths += lengths;
        // Sampled configurations are parent-closed, so an output that
        // reveals the exit label must reveal a whole entrance-exit path.
        // A violation here is a defect, not a data condition.
        if labels.contains(&oracle.view().exit_label()) {
            assert!(
                exit_connected_through(&labels, &oracle.view()),
                "step {step}: exit revealed without a connected path"
            );
        }
        samples.push(StepSample {
            step,
            address_strings: config.regs.iter().map(|s| format!("{s:0addr_hex$x}")).collect(),
            workspace: config.work,
            labels: labels.iter().map(|l| format!("{l:0label_hex$x}")).collect(),
            queries,
        });
        configs.push(config);
    }
    let total_queries = oracle.meter();
    debug_assert_eq!(total_queries, 2 + resolved_tuple_lengths);
    Ok(ClassicalRun {
        c_star,
        samples,
        total_queries,
        resolved_tuple_lengths,
        configs,
    })
}

/// Is the exit reachable from the entrance walking only across the stored
/// labels?
fn exit_connected_through(labels: &[u64], view: &GraphView) -> bool {
    let stored: std::collections::BTreeSet<u64> = labels.iter().copied().collect();
    let mut reached = std::collections::BTreeSet::new();
    let mut frontier = vec![view.entrance_label()];
    reached.insert(view.entrance_label());
    while let Some(v) = frontier.pop() {
        for c in COLORS {
            let u = view.eta(c, v);
            if stored.contains(&u) && reached.insert(u) {
                frontier.push(u);
            }
        }
    }
    reached.contains(&view.exit_label())
}

/// Exact measurement distribution of the resolved register contents of an
/// address-space state: probability by label tuple, workspace marginalized.
pub fn exact_output_distribution(
    state: &SparseState,
    view: &GraphView,
    codec: &AddressCodec,
) -> BTreeMap<Vec<u64>, f64> {
    let mut dist = BTreeMap::new();
    for (config, amp) in state.iter() {
        let labels = l_map_white_box(view, codec, &config.regs);
        *dist.entry(labels).or_insert(0.0) += amp.norm_sqr();
    }
    dist
}

/// A parent-closed set of addresses containing the root and no other
/// specials, stored parent-before-child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddressSubtree {
    nodes: Vec<Address>,
}

impl AddressSubtree {
    pub fn new(mut nodes: Vec<Address>, codec: &AddressCodec) -> Result<Self> {
        nodes.sort_by_key(|t| (t.len(), t.clone()));
        nodes.dedup();
        if nodes.first() != Some(&Address::Empty) {
            return Err(Error::BadSubtree("must contain the empty address".into()));
        }
        if nodes.len() > codec.p_max() as usize {
            return Err(Error::BadSubtree(format!(
                "{} nodes exceed the size cap {}",
                nodes.len(),
                codec.p_max()
            )));
        }
        for t in &nodes {
            match t {
                Address::Empty => {}
                Address::Tuple(_) => {
                    if !codec.is_tree_label(t) {
                        return Err(Error::BadSubtree(format!("{t} is not a tree label")));
                    }
                    let parent = codec.parent(t).expect("tuples have parents");
                    if !nodes.contains(&parent) {
                        return Err(Error::BadSubtree(format!("{t} is missing its parent")));
                    }
                }
                _ => {
                    return Err(Error::BadSubtree(format!("special address {t} not allowed")));
                }
            }
        }
        Ok(AddressSubtree { nodes })
    }

    /// Nodes in parent-before-child order.
    pub fn nodes(&self) -> &[Address] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Compact JSON form: one color string per node, root as "".
    pub fn to_json(&self) -> String {
        let strings: Vec<String> = self.nodes.iter().map(|t| t.to_string()).collect();
        let strings: Vec<String> = strings
            .into_iter()
            .map(|s| if s == "empty" { String::new() } else { s })
            .collect();
        serde_json::to_string_pretty(&strings).expect("serializes")
    }

    pub fn from_json(s: &str, codec: &AddressCodec) -> Result<Self> {
        let strings: Vec<String> =
            serde_json::from_str(s).map_err(|e| Error::BadSubtree(e.to_string()))?;
        let mut nodes = Vec::with_capacity(strings.len());
        for s in strings {
            if s.is_empty() {
                nodes.push(Address::Empty);
            } else {
                let colors = crate::color::parse_color_seq(&s)
                    .ok_or_else(|| Error::BadSubtree(format!("bad color string {s:?}")))?;
                nodes.push(Address::Tuple(colors));
            }
        }
        AddressSubtree::new(nodes, codec)
    }
}

/// A subtree resolved to vertex labels, isomorphic to its address subtree.
#[derive(Debug, Clone)]
pub struct SubtreeEmbedding {
    pub nodes: Vec<Address>,
    pub labels: Vec<u64>,
    exit_label: u64,
    noedge_label: u64,
    invalid_label: u64,
}

impl SubtreeEmbedding {
    pub fn found_exit(&self) -> bool {
        self.labels.contains(&self.exit_label)
    }

    /// Two nodes resolving to the same actual vertex label reveal two
    /// distinct entrance walks to one vertex, i.e. a cycle.
    pub fn found_cycle(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        for &l in &self.labels {
            if l == self.noedge_label || l == self.invalid_label {
                continue;
            }
            if !seen.insert(l) {
                return true;
            }
        }
        false
    }
}

/// Resolve a subtree through the oracle: the root is the entrance (free),
/// every other node costs exactly one query from its parent's label.
pub fn subtree_embedding(
    oracle: &Oracle,
    codec: &AddressCodec,
    tree: &AddressSubtree,
) -> Result<SubtreeEmbedding> {
    let mut resolved: BTreeMap<Address, u64> = BTreeMap::new();
    let mut labels = Vec::with_capacity(tree.len());
    for t in tree.nodes() {
        let label = match t {
            Address::Empty => oracle.entrance_label(),
            Address::Tuple(colors) => {
                let parent = codec.parent(t).expect("tuples have parents");
                let &parent_label = resolved
                    .get(&parent)
                    .ok_or_else(|| Error::BadSubtree(format!("{t} resolved before its parent")))?;
                oracle.query(*colors.last().expect("nonempty"), parent_label)
            }
            _ => unreachable!("validated subtrees hold no other specials"),
        };
        resolved.insert(t.clone(), label);
        labels.push(label);
    }
    let view = oracle.view();
    Ok(SubtreeEmbedding {
        nodes: tree.nodes().to_vec(),
        labels,
        exit_label: view.exit_label(),
        noedge_label: view.noedge_label(),
        invalid_label: view.invalid_label(),
    })
}

/// Grow a uniform-ish random parent-closed subtree of exactly `size` nodes
/// (fewer only if the tree saturates): repeatedly attach a uniformly random
/// missing child of a uniformly random present node.
pub fn random_parent_closed_subtree(
    codec: &AddressCodec,
    size: usize,
    rng: &mut RngStream,
) -> AddressSubtree {
    let size = size.clamp(1, codec.p_max() as usize);
    let mut nodes = vec![Address::Empty];
    while nodes.len() < size {
        let t = &nodes[rng.next_usize(nodes.len())];
        let mut extensions = Vec::new();
        for c in COLORS {
            let child = match t {
                Address::Empty => {
                    if c == codec.c_star() {
                        continue;
                    }
                    Address::Tuple(vec![c])
                }
                Address::Tuple(colors) => {
                    if *colors.last().expect("nonempty") == c
                        || colors.len() >= codec.p_max() as usize
                    {
                        continue;
                    }
                    let mut ext = colors.clone();
                    ext.push(c);
                    Address::Tuple(ext)
                }
                _ => unreachable!(),
            };
            if !nodes.contains(&child) {
                extensions.push(child);
            }
        }
        if extensions.is_empty() {
            continue;
        }
        nodes.push(extensions[rng.next_usize(extensions.len())].clone());
    }
    AddressSubtree::new(nodes, codec).expect("grown trees are parent-closed")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SamplerOutcome {
    pub found_exit: bool,
    pub found_cycle: bool,
    pub queries: u64,
}

/// One run of a subtree-sampling classical algorithm: draw a tree from the
/// sampler, embed it, and report what the embedding revealed.
pub fn run_subtree_sampler<F>(
    sampler: F,
    oracle: &Oracle,
    codec: &AddressCodec,
    seed: u64,
) -> Result<SamplerOutcome>
where
    F: FnOnce(&mut RngStream) -> AddressSubtree,
{
    let mut rng = RngStream::derive(seed, "subtree-sample", 0);
    let tree = sampler(&mut rng);
    let before = oracle.meter();
    let embedding = subtree_embedding(oracle, codec, &tree)?;
    Ok(SamplerOutcome {
        found_exit: embedding.found_exit(),
        found_cycle: embedding.found_cycle(),
        queries: oracle.meter() - before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::l_prime;
    use crate::circuit::Gate;
    use crate::color::parse_color_seq;
    use crate::fixtures::{bits, n3_reference};

    fn tuples(specs: &[&str]) -> Vec<Address> {
        specs
            .iter()
            .map(|s| {
                if s.is_empty() {
                    Address::Empty
                } else {
                    Address::Tuple(parse_color_seq(s).unwrap())
                }
            })
            .collect()
    }

    #[test]
    fn root_only_subtree_embeds_to_the_entrance() {
        let g = n3_reference();
        let o = Oracle::new(&g);
        let codec = AddressCodec::new(4, g.missing_color()).unwrap();
        let tree = AddressSubtree::new(vec![Address::Empty], &codec).unwrap();
        let e = subtree_embedding(&o, &codec, &tree).unwrap();
        assert_eq!(e.labels, vec![g.entrance_label()]);
        assert!(!e.found_exit() && !e.found_cycle());
        assert_eq!(o.meter(), 0);
    }

    #[test]
    fn pinned_fourteen_node_subtree_embedding() {
        let g = n3_reference();
        let o = Oracle::new(&g);
        let codec = AddressCodec::new(14, g.missing_color()).unwrap();
        let tree = AddressSubtree::new(
            tuples(&[
                "", "r", "b", "rg", "rb", "bg", "br", "rbg", "rbr", "bgb", "rbgr", "rbrb", "bgbr",
                "bgbg",
            ]),
            &codec,
        )
        .unwrap();
        let e = subtree_embedding(&o, &codec, &tree).unwrap();
        let by_node: BTreeMap<String, u64> = e
            .nodes
            .iter()
            .zip(&e.labels)
            .map(|(t, &l)| (t.to_string(), l))
            .collect();
        assert_eq!(by_node["bgbg"], bits("100100"));
        assert_eq!(by_node["rbgr"], bits("100100"));
        assert_eq!(by_node["rbrb"], bits("110101"));
        assert_eq!(by_node["bgbr"], bits("110101"));
        // Thirteen non-root nodes, thirteen queries.
        assert_eq!(o.meter(), 13);
        assert!(e.found_cycle());
        assert!(!e.found_exit());
    }

    #[test]
    fn path_shaped_subtree_matches_l_prime() {
        let g = n3_reference();
        let codec = AddressCodec::new(6, g.missing_color()).unwrap();
        let tree = AddressSubtree::new(tuples(&["", "b", "bg", "bgb", "bgbr"]), &codec).unwrap();
        let o = Oracle::new(&g);
        let e = subtree_embedding(&o, &codec, &tree).unwrap();
        for (t, &l) in e.nodes.iter().zip(&e.labels) {
            let o2 = Oracle::new(&g);
            assert_eq!(l_prime(&o2, t), l);
        }
    }

    #[test]
    fn malformed_subtrees_are_rejected() {
        let g = n3_reference();
        let codec = AddressCodec::new(6, g.missing_color()).unwrap();
        assert!(AddressSubtree::new(tuples(&["", "bg"]), &codec).is_err()); // parent missing
        assert!(AddressSubtree::new(tuples(&["b"]), &codec).is_err()); // no root
        assert!(AddressSubtree::new(vec![Address::Empty, Address::NoEdge], &codec).is_err());
        // The missing color cannot start a tuple.
        assert!(AddressSubtree::new(tuples(&["", "g"]), &codec).is_err());
    }

    #[test]
    fn grown_subtrees_validate_and_cap_depth() {
        let g = n3_reference();
        let codec = AddressCodec::new(8, g.missing_color()).unwrap();
        for k in 0..20 {
            let mut rng = RngStream::derive(9, "grow", k);
            let tree = random_parent_closed_subtree(&codec, 8, &mut rng);
            assert_eq!(tree.len(), 8);
            // Re-validation must succeed.
            AddressSubtree::new(tree.nodes().to_vec(), &codec).unwrap();
        }
    }

    #[test]
    fn workspace_only_circuit_outputs_entrance_and_zeros() {
        let g = n3_reference();
        let o = Oracle::new(&g);
        let c = Circuit::new(3, 3, 2, vec![Gate::hadamard(0), Gate::hadamard(1)]).unwrap();
        let run = simulate_classical(&c, &o, 4242, &SimOptions::default()).unwrap();
        assert_eq!(run.total_queries, 2);
        assert_eq!(run.resolved_tuple_lengths, 0);
        for sample in &run.samples {
            assert_eq!(sample.labels[0], format!("{:02x}", g.entrance_label()));
            assert!(sample.labels[1..].iter().all(|l| l == "00"));
        }
    }

    #[test]
    fn single_query_circuit_reveals_the_blue_child() {
        let g = n3_reference();
        let o = Oracle::new(&g);
        let c = Circuit::new(
            3,
            2,
            1,
            vec![
                Gate::pauli_x(0),
                Gate::Oracle { color: Color::Blue, control: 0, input: 0, output: 1 },
            ],
        )
        .unwrap();
        let run = simulate_classical(&c, &o, 7, &SimOptions::default()).unwrap();
        let last = run.samples.last().unwrap();
        assert!(last.labels.contains(&format!("{:02x}", bits("101000"))));
        // 2 for the missing color, 1 for resolving the length-1 tuple at
        // step 2 (step 1 resolves only the empty address and zeros).
        assert_eq!(run.total_queries, 2 + 1);
    }

    #[test]
    fn sampler_outcomes_for_trivial_and_exit_trees() {
        let g = n3_reference();
        let codec = AddressCodec::new(10, g.missing_color()).unwrap();
        // A sampler stuck on the root alone finds nothing and pays nothing.
        let o = Oracle::new(&g);
        let outcome = run_subtree_sampler(
            |_| AddressSubtree::new(vec![Address::Empty], &codec).unwrap(),
            &o,
            &codec,
            1,
        )
        .unwrap();
        assert!(!outcome.found_exit && !outcome.found_cycle);
        assert_eq!(outcome.queries, 0);
        // A full-depth path sampler along the pinned exit walk finds it.
        let path = parse_color_seq("bgbrbgrgr").unwrap();
        let nodes: Vec<Address> = std::iter::once(Address::Empty)
            .chain((1..=path.len()).map(|k| Address::Tuple(path[..k].to_vec())))
            .collect();
        let o = Oracle::new(&g);
        let outcome = run_subtree_sampler(
            |_| AddressSubtree::new(nodes.clone(), &codec).unwrap(),
            &o,
            &codec,
            1,
        )
        .unwrap();
        assert!(outcome.found_exit);
        assert_eq!(outcome.queries, 9);
    }

    #[test]
    fn sampled_distribution_tracks_the_exact_one() {
        let g = n3_reference();
        let view = GraphView::new(&g);
        let c = Circuit::new(
            3,
            3,
            2,
            vec![
                Gate::hadamard(0),
                Gate::Oracle { color: Color::Red, control: 0, input: 0, output: 1 },
                Gate::SwapRot {
                    theta: std::f64::consts::FRAC_PI_4,
                    control: 0,
                    a: 1,
                    b: 2,
                },
            ],
        )
        .unwrap();
        let codec = AddressCodec::new(3, g.missing_color()).unwrap();
        let ctx = SimContext::Address(codec);
        let opts = SimOptions::default();
        let final_state = crate::simulator::run_prefix(&c, 3, &ctx, &opts).unwrap();
        let exact = exact_output_distribution(&final_state, &view, &codec);

        let trials = 20_000u64;
        let mut counts: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for t in 0..trials {
            let o = Oracle::new(&g);
            let seed = RngStream::derive(99, "alg2-trial", t).next_u64();
            let run = simulate_classical(&c, &o, seed, &opts).unwrap();
            let labels: Vec<u64> = run.configs[2]
                .regs
                .iter()
                .map(|&s| crate::address::resolve_address(&view, &codec.decode(s)))
                .collect();
            *counts.entry(labels).or_insert(0.0) += 1.0 / trials as f64;
        }
        let tv = crate::stats::total_variation(&exact, &counts);
        assert!(tv < 0.02, "total variation {tv}");
    }
}
