//! Reversible gate IR and the classical-primitive constructions built on it.
//!
//! Every gate in the set is real and self-inverse, so a circuit is inverted
//! by reversing its gate order.

use std::fmt;
use std::ops::AddAssign;

use crate::error::{arg_err, Error, Result};

/// Which basis value of a control qubit enables the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Fires when the control is `|1⟩`.
    Positive,
    /// Fires when the control is `|0⟩`.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Positive }
    }

    pub fn negative(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Negative }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    X(usize),
    Swap(usize, usize),
    /// Multi-controlled X with per-control polarity. CNOT and CCNOT are the
    /// one- and two-control cases.
    Mcx {
        controls: Vec<Control>,
        target: usize,
    },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Mcx { controls: vec![Control::positive(control)], target }
    }

    pub fn ccnot(a: usize, b: usize, target: usize) -> Self {
        Gate::Mcx { controls: vec![Control::positive(a), Control::positive(b)], target }
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        Gate::Mcx { controls, target }
    }

    /// All qubits the gate touches, targets first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) => vec![*q],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Mcx { controls, target } => {
                let mut qs = Vec::with_capacity(controls.len() + 1);
                qs.push(*target);
                qs.extend(controls.iter().map(|c| c.qubit));
                qs
            }
        }
    }

    /// Checks index range and pairwise distinctness against a register of
    /// `num_qubits` qubits.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if let Gate::Mcx { controls, .. } = self {
            if controls.is_empty() {
                return Err(Error::MalformedGate("MCX needs at least one control".into()));
            }
        }
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitIndex { index: q, num_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Swap(..) => GateKind::Swap,
            Gate::Mcx { .. } => GateKind::Mcx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Swap,
    Mcx,
}

impl fmt::Display for Gate {
    /// `KIND targets… [controls]`, e.g. `MCX 4 [+1 -2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Swap(a, b) => write!(f, "SWAP {a} {b}"),
            Gate::Mcx { controls, target } => {
                write!(f, "MCX {target} [")?;
                for (i, c) in controls.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    let sign = match c.polarity {
                        Polarity::Positive => '+',
                        Polarity::Negative => '-',
                    };
                    write!(f, "{sign}{}", c.qubit)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Gate counts by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateStats {
    pub h: u64,
    pub x: u64,
    pub swap: u64,
    pub mcx: u64,
}

impl GateStats {
    pub fn record(&mut self, gate: &Gate) {
        match gate.kind() {
            GateKind::H => self.h += 1,
            GateKind::X => self.x += 1,
            GateKind::Swap => self.swap += 1,
            GateKind::Mcx => self.mcx += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.h + self.x + self.swap + self.mcx
    }
}

impl AddAssign for GateStats {
    fn add_assign(&mut self, rhs: Self) {
        self.h += rhs.h;
        self.x += rhs.x;
        self.swap += rhs.swap;
        self.mcx += rhs.mcx;
    }
}

/// An ordered gate list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    label: String,
}

impl Circuit {
    pub fn new(num_qubits: usize, label: impl Into<String>) -> Self {
        Circuit { num_qubits, gates: Vec::new(), label: label.into() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Static gate counts of this circuit (not execution counts).
    pub fn stats(&self) -> GateStats {
        let mut stats = GateStats::default();
        for g in &self.gates {
            stats.record(g);
        }
        stats
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return arg_err(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            ));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// The exact inverse: gate order reversed, each gate unchanged.
    pub fn invert(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().cloned().collect(),
            label: format!("inverse({})", self.label),
        }
    }

    /// Writes `target ^= a XOR b` with two CNOTs. `target` is expected to be
    /// a fresh `|0⟩` service qubit.
    pub fn emit_xor_into(&mut self, a: usize, b: usize, target: usize) -> Result<()> {
        distinct3(a, b, target)?;
        self.push(Gate::cnot(a, target))?;
        self.push(Gate::cnot(b, target))
    }

    /// Writes `target ^= a AND b` with one CCNOT.
    pub fn emit_and_into(&mut self, a: usize, b: usize, target: usize) -> Result<()> {
        distinct3(a, b, target)?;
        self.push(Gate::ccnot(a, b, target))
    }

    pub fn emit_not(&mut self, a: usize) -> Result<()> {
        self.push(Gate::X(a))
    }

    /// Cyclic left rotation of `register` by `k` positions: afterwards
    /// position `i` holds what position `(i - k) mod len` held before.
    ///
    /// Each cycle of the permutation (ascending by start index) becomes
    /// `L - 1` swaps against the cycle start.
    pub fn emit_rotate_left(&mut self, register: &[usize], k: usize) -> Result<()> {
        let len = register.len();
        if len == 0 {
            return arg_err("rotation register is empty");
        }
        if k >= len {
            return arg_err(format!("rotation amount {k} out of range for {len} qubits"));
        }
        if k == 0 {
            return Ok(());
        }
        let cycles = gcd(len, k);
        let cycle_len = len / cycles;
        for start in 0..cycles {
            for step in 1..cycle_len {
                let pos = (start + step * k) % len;
                self.push(Gate::Swap(register[start], register[pos]))?;
            }
        }
        Ok(())
    }

    /// One gate per line, preceded by a `#` header naming the circuit.
    pub fn dump(&self) -> String {
        let mut out = format!("# {} ({} qubits, {} gates)\n", self.label, self.num_qubits, self.len());
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

fn distinct3(a: usize, b: usize, c: usize) -> Result<()> {
    if a == b || a == c || b == c {
        return arg_err(format!("qubits {a}, {b}, {c} must be distinct"));
    }
    Ok(())
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
