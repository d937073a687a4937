//! The restricted gate set and circuits built from it.
//!
//! Vertex labels can only be stored, queried through the oracle, swapped
//! with a phase, and compared against each other or the reserved strings;
//! everything else happens on workspace qubits. A circuit fixes one budget
//! `p` for both its register count and its gate count.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::color::Color;
use crate::error::{Error, Result};

/// One gate. Register indices address the `p` label registers; `control`
/// and `target` indices address workspace qubits. Matrices are row-major
/// `[re, im]` pairs and must be unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    /// XOR the color-`color` neighbor of register `input` into register
    /// `output`, on branches whose control bit is set. The output register
    /// must hold zero or exactly that neighbor on every supported branch.
    Oracle {
        color: Color,
        control: usize,
        input: usize,
        output: usize,
    },
    /// cos θ · identity + i sin θ · swap on registers `a`, `b`, controlled.
    SwapRot {
        theta: f64,
        control: usize,
        a: usize,
        b: usize,
    },
    /// XOR `[register a == register b]` into a workspace bit.
    EqCheck { a: usize, b: usize, target: usize },
    /// XOR `[register holds the no-edge string]` into a workspace bit.
    NoEdgeCheck { reg: usize, target: usize },
    /// XOR `[register holds the zero string]` into a workspace bit.
    ZeroCheck { reg: usize, target: usize },
    /// Arbitrary single-qubit unitary on one workspace qubit.
    Workspace1 { qubit: usize, matrix: [[f64; 2]; 4] },
    /// Arbitrary two-qubit unitary on two workspace qubits; basis index is
    /// `bit(qubits[0])·2 + bit(qubits[1])`.
    Workspace2 {
        qubits: [usize; 2],
        matrix: Vec<[f64; 2]>,
    },
}

impl Gate {
    pub fn is_oracle(&self) -> bool {
        matches!(self, Gate::Oracle { .. })
    }

    pub fn workspace1(qubit: usize, m: [[Complex64; 2]; 2]) -> Gate {
        Gate::Workspace1 {
            qubit,
            matrix: [
                [m[0][0].re, m[0][0].im],
                [m[0][1].re, m[0][1].im],
                [m[1][0].re, m[1][0].im],
                [m[1][1].re, m[1][1].im],
            ],
        }
    }

    pub fn pauli_x(qubit: usize) -> Gate {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Gate::workspace1(qubit, [[zero, one], [one, zero]])
    }

    pub fn hadamard(qubit: usize) -> Gate {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate::workspace1(qubit, [[h, h], [h, -h]])
    }
}

/// A circuit: `p` is both the register count and the gate budget, so a
/// `p`-gate circuit always has enough registers for every label it can
/// possibly compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: u32,
    pub p: u32,
    pub workspace: u32,
    pub gates: Vec<Gate>,
}

const UNITARITY_TOL: f64 = 1e-12;

fn matrix_from_pairs(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn is_unitary(m: &[Complex64], dim: usize) -> bool {
    for i in 0..dim {
        for j in 0..dim {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                dot += m[i * dim + k] * m[j * dim + k].conj();
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot - expected).norm() > UNITARITY_TOL {
                return false;
            }
        }
    }
    true
}

impl Circuit {
    pub fn new(n: u32, p: u32, workspace: u32, gates: Vec<Gate>) -> Result<Self> {
        let c = Circuit { n, p, workspace, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        // Address-space execution additionally needs p ≤ 31 so encoded
        // addresses fit a u64 register; the codec enforces that.
        if self.p == 0 || self.p > 256 {
            return Err(Error::InvalidCircuit(format!(
                "register budget p = {} out of range [1, 256]",
                self.p
            )));
        }
        if self.workspace > 60 {
            return Err(Error::InvalidCircuit("workspace wider than 60 qubits".into()));
        }
        if self.gates.len() > self.p as usize {
            return Err(Error::InvalidCircuit(format!(
                "{} gates exceed the budget p = {}",
                self.gates.len(),
                self.p
            )));
        }
        let reg_ok = |r: usize| r < self.p as usize;
        let work_ok = |w: usize| w < self.workspace as usize;
        for (i, gate) in self.gates.iter().enumerate() {
            let bad = |msg: &str| Error::InvalidCircuit(format!("gate {i}: {msg}"));
            match gate {
                Gate::Oracle { control, input, output, .. } => {
                    if !reg_ok(*input) || !reg_ok(*output) || input == output {
                        return Err(bad("oracle register indices"));
                    }
                    if !work_ok(*control) {
                        return Err(bad("oracle control index"));
                    }
                }
                Gate::SwapRot { theta, control, a, b } => {
                    if !theta.is_finite() {
                        return Err(bad("non-finite angle"));
                    }
                    if !reg_ok(*a) || !reg_ok(*b) || a == b || !work_ok(*control) {
                        return Err(bad("swap indices"));
                    }
                }
                Gate::EqCheck { a, b, target } => {
                    if !reg_ok(*a) || !reg_ok(*b) || a == b || !work_ok(*target) {
                        return Err(bad("equality-check indices"));
                    }
                }
                Gate::NoEdgeCheck { reg, target } | Gate::ZeroCheck { reg, target } => {
                    if !reg_ok(*reg) || !work_ok(*target) {
                        return Err(bad("check indices"));
                    }
                }
                Gate::Workspace1 { qubit, matrix } => {
                    if !work_ok(*qubit) {
                        return Err(bad("workspace qubit index"));
                    }
                    if !is_unitary(&matrix_from_pairs(matrix), 2) {
                        return Err(bad("matrix is not unitary"));
                    }
                }
                Gate::Workspace2 { qubits, matrix } => {
                    if !work_ok(qubits[0]) || !work_ok(qubits[1]) || qubits[0] == qubits[1] {
                        return Err(bad("workspace qubit indices"));
                    }
                    if matrix.len() != 16 || !is_unitary(&matrix_from_pairs(matrix), 4) {
                        return Err(bad("matrix is not a 4x4 unitary"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn oracle_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_oracle()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Circuit =
            serde_json::from_str(s).map_err(|e| Error::InvalidCircuit(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

/// The address-space analog of a circuit has the same gate list gate for
/// gate: oracle gates walk the address tree instead of the graph, the
/// reserved-string checks test the encoded specials, and workspace gates
/// are untouched. The execution space picks the semantics, so translation
/// is structure-preserving and only revalidates.
pub fn translate_circuit(c: &Circuit) -> Result<Circuit> {
    c.validate()?;
    Ok(c.clone())
}

/// Inline the oracle-side checking gadget: each oracle gate is replaced by
/// a seven-gate sequence that computes the queried neighbor into a shared
/// ancilla register, writes `[output ∈ {0, neighbor}]` into a scratch
/// workspace bit, fires the real gate controlled on that bit, and uncomputes
/// everything. Intended for circuits whose oracle controls are held at 1;
/// the gadget replaces the original control wiring.
pub fn with_inline_oracle_checks(c: &Circuit) -> Result<Circuit> {
    c.validate()?;
    let ancilla = c.p as usize;
    let one_bit = c.workspace as usize;
    let check_bit = one_bit + 1;
    let mut gates = vec![Gate::pauli_x(one_bit)];
    for gate in &c.gates {
        match *gate {
            Gate::Oracle { color, input, output, .. } => {
                gates.extend([
                    Gate::Oracle { color, control: one_bit, input, output: ancilla },
                    Gate::ZeroCheck { reg: output, target: check_bit },
                    Gate::EqCheck { a: ancilla, b: output, target: check_bit },
                    Gate::Oracle { color, control: check_bit, input, output },
                    Gate::EqCheck { a: ancilla, b: output, target: check_bit },
                    Gate::ZeroCheck { reg: output, target: check_bit },
                    Gate::Oracle { color, control: one_bit, input, output: ancilla },
                ]);
            }
            ref other => gates.push(other.clone()),
        }
    }
    let p = (gates.len() as u32).max(c.p + 1);
    Circuit::new(c.n, p, c.workspace + 2, gates)
}
