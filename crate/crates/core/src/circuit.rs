//! Linear circuits: DAGs of fan-in-2 XOR gates.
//!
//! Nodes are the `n` inputs followed by the gates in creation order. A gate may
//! only reference nodes created before it, so gate order is a topological order.
//! Outputs are an ordered list of node references labelled `y1..ym`; an output
//! may be an input (a unit row costs nothing) or [`NodeRef::Zero`] (a zero row).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::gf2::{BitMatrix, BitVector};
use crate::{Error, Result};

/// A reference to a circuit node. Ordinals are 0-based; the text form is 1-based
/// (`Input(0)` prints as `x1`, `Gate(0)` as `t1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    Input(usize),
    Gate(usize),
    /// Constant zero. Only valid as an output.
    Zero,
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Input(i) => write!(f, "x{}", i + 1),
            NodeRef::Gate(g) => write!(f, "t{}", g + 1),
            NodeRef::Zero => f.write_str("0"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub left: NodeRef,
    pub right: NodeRef,
}

impl Gate {
    pub fn children(&self) -> [NodeRef; 2] {
        [self.left, self.right]
    }
}

/// A linear circuit over `num_inputs` variables.
///
/// Equality is structural: same input count, same gate list, same outputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearCircuit {
    num_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<NodeRef>,
}

impl LinearCircuit {
    pub fn new(num_inputs: usize) -> Self {
        Self {
            num_inputs,
            gates: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn from_parts(num_inputs: usize, gates: Vec<Gate>, outputs: Vec<NodeRef>) -> Result<Self> {
        let mut c = LinearCircuit::new(num_inputs);
        for g in gates {
            c.add_gate(g.left, g.right)?;
        }
        for o in outputs {
            c.add_output(o)?;
        }
        Ok(c)
    }

    fn check_operand(&self, r: NodeRef) -> Result<()> {
        match r {
            NodeRef::Input(i) if i < self.num_inputs => Ok(()),
            NodeRef::Gate(g) if g < self.gates.len() => Ok(()),
            NodeRef::Zero => Err(Error::InvalidCircuit(
                "the zero marker cannot be a gate operand".into(),
            )),
            other => Err(Error::InvalidCircuit(format!("{other} is not defined"))),
        }
    }

    /// Appends the gate `left ⊕ right`.
    pub fn add_gate(&mut self, left: NodeRef, right: NodeRef) -> Result<NodeRef> {
        self.check_operand(left)?;
        self.check_operand(right)?;
        self.gates.push(Gate { left, right });
        Ok(NodeRef::Gate(self.gates.len() - 1))
    }

    /// Appends output `y_{m+1}`.
    pub fn add_output(&mut self, r: NodeRef) -> Result<()> {
        if r != NodeRef::Zero {
            self.check_operand(r)?;
        }
        self.outputs.push(r);
        Ok(())
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    /// `|C|`, the number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: usize) -> Gate {
        self.gates[g]
    }

    pub fn outputs(&self) -> &[NodeRef] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Inputs plus gates.
    pub fn node_count(&self) -> usize {
        self.num_inputs + self.gates.len()
    }

    /// Dense node id: inputs first, then gates. `None` for the zero marker.
    pub fn node_id(&self, r: NodeRef) -> Option<usize> {
        match r {
            NodeRef::Input(i) => Some(i),
            NodeRef::Gate(g) => Some(self.num_inputs + g),
            NodeRef::Zero => None,
        }
    }

    pub fn node_ref(&self, id: usize) -> NodeRef {
        if id < self.num_inputs {
            NodeRef::Input(id)
        } else {
            NodeRef::Gate(id - self.num_inputs)
        }
    }

    /// Value vectors `κ` for every node, indexed by [`node_id`](Self::node_id).
    ///
    /// `κ(x_i) = e^(i)` and `κ(u) = κ(left) ⊕ κ(right)`.
    pub fn value_vectors(&self) -> Vec<BitVector> {
        let n = self.num_inputs;
        let mut kappa: Vec<BitVector> = (1..=n).map(|i| BitVector::unit(n, i)).collect();
        kappa.reserve(self.gates.len());
        for g in &self.gates {
            let v = &kappa[self.id(g.left)] ^ &kappa[self.id(g.right)];
            kappa.push(v);
        }
        kappa
    }

    /// Value vector of each output in label order.
    pub fn output_vectors(&self) -> Vec<BitVector> {
        let kappa = self.value_vectors();
        self.outputs
            .iter()
            .map(|&o| match self.node_id(o) {
                Some(id) => kappa[id].clone(),
                None => BitVector::zeros(self.num_inputs),
            })
            .collect()
    }

    fn id(&self, r: NodeRef) -> usize {
        self.node_id(r).expect("gate operand is never the zero marker")
    }

    /// Whether output `i` has value vector equal to row `i` of `a`, for all `i`.
    pub fn computes(&self, a: &BitMatrix) -> Result<bool> {
        if a.cols() != self.num_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.num_inputs,
                found: a.cols(),
            });
        }
        if a.rows() != self.outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.outputs.len(),
                found: a.rows(),
            });
        }
        Ok(self
            .output_vectors()
            .iter()
            .zip(a.row_vectors())
            .all(|(k, r)| k == r))
    }

    /// Simulates the circuit on one input assignment.
    pub fn evaluate(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.num_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.num_inputs,
                found: x.len(),
            });
        }
        let mut val: Vec<bool> = (1..=self.num_inputs).map(|i| x.get(i)).collect();
        for g in &self.gates {
            let b = val[self.id(g.left)] ^ val[self.id(g.right)];
            val.push(b);
        }
        let mut y = BitVector::zeros(self.outputs.len());
        for (k, &o) in self.outputs.iter().enumerate() {
            if let Some(id) = self.node_id(o) {
                y.set(k + 1, val[id]);
            }
        }
        Ok(y)
    }

    /// The gates an output set depends on, ascending.
    pub fn cone(&self, outputs: &[usize]) -> BTreeSet<usize> {
        let mut seen = vec![false; self.gates.len()];
        let mut stack: Vec<usize> = outputs
            .iter()
            .filter_map(|&label| match self.outputs[label - 1] {
                NodeRef::Gate(g) => Some(g),
                _ => None,
            })
            .collect();
        while let Some(g) = stack.pop() {
            if std::mem::replace(&mut seen[g], true) {
                continue;
            }
            for c in self.gates[g].children() {
                if let NodeRef::Gate(h) = c {
                    if !seen[h] {
                        stack.push(h);
                    }
                }
            }
        }
        (0..self.gates.len()).filter(|&g| seen[g]).collect()
    }

    /// Extracts the cone of `keep_outputs` (1-indexed labels) as a circuit on
    /// `keep_inputs` (1-indexed, renumbered in the given order). Fails if the
    /// cone reads an input that was not kept.
    pub fn subcircuit(&self, keep_inputs: &[usize], keep_outputs: &[usize]) -> Result<LinearCircuit> {
        let mut input_map = vec![None; self.num_inputs];
        for (new, &old) in keep_inputs.iter().enumerate() {
            if old == 0 || old > self.num_inputs {
                return Err(Error::InvalidArgument(format!("input x{old} out of range")));
            }
            input_map[old - 1] = Some(new);
        }
        for &label in keep_outputs {
            if label == 0 || label > self.outputs.len() {
                return Err(Error::InvalidArgument(format!("output y{label} out of range")));
            }
        }
        let cone = self.cone(keep_outputs);
        let mut gate_map = vec![None; self.gates.len()];
        let mut sub = LinearCircuit::new(keep_inputs.len());
        let remap = |r: NodeRef, gate_map: &[Option<usize>]| -> Result<NodeRef> {
            match r {
                NodeRef::Input(i) => input_map[i].map(NodeRef::Input).ok_or_else(|| {
                    Error::InvalidArgument(format!("cone reads dropped input x{}", i + 1))
                }),
                NodeRef::Gate(g) => Ok(NodeRef::Gate(gate_map[g].expect("cone is closed"))),
                NodeRef::Zero => Ok(NodeRef::Zero),
            }
        };
        for &g in &cone {
            let gate = self.gates[g];
            let l = remap(gate.left, &gate_map)?;
            let r = remap(gate.right, &gate_map)?;
            sub.add_gate(l, r)?;
            gate_map[g] = Some(sub.size() - 1);
        }
        for &label in keep_outputs {
            let o = remap(self.outputs[label - 1], &gate_map)?;
            sub.add_output(o)?;
        }
        Ok(sub)
    }

    /// Sets the inputs in `zeroed` (1-indexed) to 0 and removes every gate that
    /// then computes `0 ⊕ w` or `0 ⊕ 0`, cascading.
    ///
    /// A node is zero under the restriction iff every input with a path to it
    /// is zeroed. An eliminated gate forwards its surviving child (or the zero
    /// marker); outputs landing on eliminated gates are re-pointed the same
    /// way. The reduced circuit keeps all `n` inputs, the zeroed ones unused, and
    /// computes the original matrix with the zeroed columns cleared.
    pub fn eliminate(&self, zeroed: &BTreeSet<usize>) -> Result<EliminationResult> {
        if let Some(&bad) = zeroed.iter().find(|&&i| i == 0 || i > self.num_inputs) {
            return Err(Error::InvalidArgument(format!(
                "input x{bad} out of range 1..={}",
                self.num_inputs
            )));
        }
        // Replacement for every original node in the reduced circuit.
        let mut rep: Vec<NodeRef> = (0..self.num_inputs)
            .map(|i| {
                if zeroed.contains(&(i + 1)) {
                    NodeRef::Zero
                } else {
                    NodeRef::Input(i)
                }
            })
            .collect();
        let mut reduced = LinearCircuit::new(self.num_inputs);
        let mut eliminated = BTreeSet::new();
        let mut gate_map = Vec::new();
        for (g, gate) in self.gates.iter().enumerate() {
            let l = rep[self.id(gate.left)];
            let r = rep[self.id(gate.right)];
            let out = match (l, r) {
                (NodeRef::Zero, other) | (other, NodeRef::Zero) => {
                    eliminated.insert(g);
                    other
                }
                (l, r) => {
                    gate_map.push(g);
                    reduced.add_gate(l, r)?
                }
            };
            rep.push(out);
        }
        let mut forwarded_outputs = BTreeMap::new();
        for (k, &o) in self.outputs.iter().enumerate() {
            let new = match self.node_id(o) {
                Some(id) => rep[id],
                None => NodeRef::Zero,
            };
            if matches!(o, NodeRef::Gate(g) if eliminated.contains(&g)) {
                forwarded_outputs.insert(k + 1, new);
            }
            reduced.add_output(new)?;
        }
        Ok(EliminationResult {
            reduced,
            eliminated,
            forwarded_outputs,
            gate_map,
        })
    }

    /// Straight-line-program text.
    pub fn to_slp(&self) -> String {
        self.to_string()
    }

    /// Parses straight-line-program text:
    ///
    /// ```text
    /// inputs 3
    /// t1 = x1 + x2
    /// t2 = t1 + x3
    /// y1 = t2
    /// y2 = x1
    /// ```
    ///
    /// `#` starts a comment; blank lines are ignored. Gates are numbered from 1
    /// in file order and all precede the outputs. `y<i> = 0` is a zero output.
    pub fn parse_slp(text: &str) -> Result<Self> {
        let mut circuit: Option<LinearCircuit> = None;
        let mut outputs: BTreeMap<usize, NodeRef> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let Some(c) = circuit.as_mut() else {
                match tokens.as_slice() {
                    ["inputs", n] => {
                        let n = n
                            .parse()
                            .map_err(|_| Error::parse(line_no, format!("bad input count {n:?}")))?;
                        circuit = Some(LinearCircuit::new(n));
                        continue;
                    }
                    _ => return Err(Error::parse(line_no, "expected header `inputs <n>`")),
                }
            };
            let (target, rhs) = match tokens.as_slice() {
                [target, "=", rhs @ ..] => (*target, rhs),
                _ => return Err(Error::parse(line_no, "expected `<name> = ...`")),
            };
            if let Some(idx) = target.strip_prefix('t') {
                let j = parse_index(idx, line_no, target)?;
                if !outputs.is_empty() {
                    return Err(Error::parse(line_no, "gate definition after outputs"));
                }
                if j != c.size() + 1 {
                    return Err(Error::parse(
                        line_no,
                        format!("expected gate t{}, found {target}", c.size() + 1),
                    ));
                }
                let [l, "+", r] = rhs else {
                    return Err(Error::parse(
                        line_no,
                        format!("gate {target} must have fan-in exactly 2"),
                    ));
                };
                let l = parse_operand(c, l, line_no, false)?;
                let r = parse_operand(c, r, line_no, false)?;
                c.add_gate(l, r)?;
            } else if let Some(idx) = target.strip_prefix('y') {
                let label = parse_index(idx, line_no, target)?;
                let [src] = rhs else {
                    return Err(Error::parse(line_no, format!("output {target} takes one operand")));
                };
                let src = parse_operand(c, src, line_no, true)?;
                if outputs.insert(label, src).is_some() {
                    return Err(Error::parse(line_no, format!("duplicate output label {target}")));
                }
            } else {
                return Err(Error::parse(line_no, format!("unknown identifier {target:?}")));
            }
        }
        let mut c = circuit.ok_or_else(|| Error::parse(1, "missing header `inputs <n>`"))?;
        for (expected, (&label, &src)) in (1..).zip(&outputs) {
            if label != expected {
                return Err(Error::parse(0, format!("output y{expected} is missing")));
            }
            c.add_output(src)?;
        }
        Ok(c)
    }
}

fn parse_index(digits: &str, line: usize, token: &str) -> Result<usize> {
    match digits.parse::<usize>() {
        Ok(i) if i >= 1 && !digits.starts_with('+') => Ok(i),
        _ => Err(Error::parse(line, format!("unknown identifier {token:?}"))),
    }
}

fn parse_operand(c: &LinearCircuit, token: &str, line: usize, allow_zero: bool) -> Result<NodeRef> {
    if token == "0" && allow_zero {
        return Ok(NodeRef::Zero);
    }
    if let Some(idx) = token.strip_prefix('x') {
        let i = parse_index(idx, line, token)?;
        if i > c.num_inputs() {
            return Err(Error::parse(line, format!("unknown identifier {token:?}")));
        }
        Ok(NodeRef::Input(i - 1))
    } else if let Some(idx) = token.strip_prefix('t') {
        let j = parse_index(idx, line, token)?;
        if j > c.size() {
            return Err(Error::parse(line, format!("{token} used before definition")));
        }
        Ok(NodeRef::Gate(j - 1))
    } else {
        Err(Error::parse(line, format!("unknown identifier {token:?}")))
    }
}

impl fmt::Display for LinearCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {}", self.num_inputs)?;
        for (j, g) in self.gates.iter().enumerate() {
            writeln!(f, "t{} = {} + {}", j + 1, g.left, g.right)?;
        }
        for (i, o) in self.outputs.iter().enumerate() {
            writeln!(f, "y{} = {}", i + 1, o)?;
        }
        Ok(())
    }
}

/// Outcome of [`LinearCircuit::eliminate`].
#[derive(Clone, Debug)]
pub struct EliminationResult {
    pub reduced: LinearCircuit,
    /// Original gate indices (0-based) that were removed.
    pub eliminated: BTreeSet<usize>,
    /// Outputs (1-indexed labels) that pointed at an eliminated gate, with the
    /// node of `reduced` they now read.
    pub forwarded_outputs: BTreeMap<usize, NodeRef>,
    /// `gate_map[j]` is the original index of reduced gate `j`.
    pub gate_map: Vec<usize>,
}

impl EliminationResult {
    /// Original indices of the gates that survived.
    pub fn surviving(&self) -> BTreeSet<usize> {
        self.gate_map.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use NodeRef::{Gate as T, Input as X};

    fn circuit(n: usize, gates: &[(NodeRef, NodeRef)], outputs: &[NodeRef]) -> LinearCircuit {
        LinearCircuit::from_parts(
            n,
            gates.iter().map(|&(left, right)| Gate { left, right }).collect(),
            outputs.to_vec(),
        )
        .unwrap()
    }

    fn mat(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows[0].len(), rows.iter().map(|r| r.parse().unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn value_vector_examples() {
        let c = circuit(2, &[(X(0), X(1))], &[T(0)]);
        assert_eq!(c.value_vectors()[2].to_string(), "11");

        let c = LinearCircuit::new(4);
        assert_eq!(c.value_vectors()[2].to_string(), "0010");

        let c = circuit(2, &[(X(0), X(1)), (T(0), X(1))], &[T(1)]);
        assert_eq!(c.value_vectors()[3].to_string(), "10");
    }

    #[test]
    fn computes_examples() {
        let c = circuit(2, &[(X(0), X(1))], &[T(0), X(0)]);
        assert!(c.computes(&mat(&["11", "10"])).unwrap());
        assert!(!c.computes(&BitMatrix::identity(2)).unwrap());
        assert!(c.computes(&BitMatrix::identity(3)).is_err());
    }

    #[test]
    fn zero_output_marker() {
        let c = circuit(2, &[], &[NodeRef::Zero, X(1)]);
        assert!(c.computes(&mat(&["00", "01"])).unwrap());
        assert_eq!(c.evaluate(&"11".parse().unwrap()).unwrap().to_string(), "01");
    }

    #[test]
    fn evaluate_examples() {
        let id = circuit(3, &[], &[X(0), X(1), X(2)]);
        assert_eq!(id.evaluate(&"101".parse().unwrap()).unwrap().to_string(), "101");
        let s1 = circuit(2, &[(X(0), X(1))], &[X(0), T(0)]);
        assert_eq!(s1.evaluate(&"11".parse().unwrap()).unwrap().to_string(), "10");
        assert!(s1.evaluate(&"1".parse().unwrap()).is_err());
    }

    #[test]
    fn builder_rejects_forward_references() {
        let mut c = LinearCircuit::new(2);
        assert!(c.add_gate(X(0), T(0)).is_err());
        assert!(c.add_gate(X(0), X(2)).is_err());
        assert!(c.add_gate(X(0), NodeRef::Zero).is_err());
        assert!(c.add_output(T(3)).is_err());
    }

    #[test]
    fn eliminate_nothing() {
        let c = circuit(3, &[(X(0), X(1)), (T(0), X(2))], &[T(1)]);
        let r = c.eliminate(&BTreeSet::new()).unwrap();
        assert!(r.eliminated.is_empty());
        assert_eq!(r.reduced, c);
    }

    #[test]
    fn eliminate_forwards_through_chain() {
        let c = circuit(3, &[(X(0), X(1)), (T(0), X(2))], &[T(0), T(1)]);
        let r = c.eliminate(&BTreeSet::from([1])).unwrap();
        assert_eq!(r.eliminated, BTreeSet::from([0]));
        assert_eq!(r.reduced.size(), 1);
        assert_eq!(r.reduced.gate(0), Gate { left: X(1), right: X(2) });
        assert_eq!(r.forwarded_outputs, BTreeMap::from([(1, X(1))]));
        assert!(r.reduced.computes(&mat(&["010", "011"])).unwrap());
    }

    #[test]
    fn eliminate_cascades_to_zero() {
        let c = circuit(3, &[(X(0), X(1)), (T(0), X(2))], &[T(1)]);
        let r = c.eliminate(&BTreeSet::from([1, 2, 3])).unwrap();
        assert_eq!(r.eliminated, BTreeSet::from([0, 1]));
        assert_eq!(r.reduced.outputs(), &[NodeRef::Zero]);
        assert!(c.eliminate(&BTreeSet::from([4])).is_err());
    }

    #[test]
    fn cone_and_subcircuit() {
        let c = circuit(4, &[(X(0), X(1)), (X(2), X(3)), (T(1), X(1))], &[T(0), T(2)]);
        assert_eq!(c.cone(&[2]), BTreeSet::from([1, 2]));
        let sub = c.subcircuit(&[2, 3, 4], &[2]).unwrap();
        assert_eq!(sub.size(), 2);
        assert!(sub.computes(&mat(&["111"])).unwrap());
        assert!(c.subcircuit(&[2, 3], &[2]).is_err());
    }

    const SAMPLE: &str = "inputs 3\nt1 = x1 + x2\nt2 = t1 + x3\ny1 = t2\ny2 = x1\ny3 = 0\n";

    #[test]
    fn slp_round_trip() {
        let c = LinearCircuit::parse_slp(SAMPLE).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(c.outputs(), &[T(1), X(0), NodeRef::Zero]);
        assert_eq!(c.to_slp(), SAMPLE);
        for c in [
            circuit(2, &[(X(0), X(1))], &[T(0)]),
            LinearCircuit::new(4),
            circuit(2, &[(X(0), X(1)), (T(0), X(1))], &[T(1)]),
        ] {
            assert_eq!(LinearCircuit::parse_slp(&c.to_slp()).unwrap(), c);
        }
    }

    #[test]
    fn slp_comments_and_blank_lines() {
        let text = "# header\ninputs 2\n\nt1 = x1 + x2   # gate\ny1 = t1\n";
        let c = LinearCircuit::parse_slp(text).unwrap();
        assert_eq!(c, circuit(2, &[(X(0), X(1))], &[T(0)]));
    }

    #[test]
    fn slp_errors() {
        let err = |s: &str| LinearCircuit::parse_slp(s).unwrap_err().to_string();
        assert!(err("inputs 2\nt1 = t2 + x1\n").contains("before definition"));
        assert!(err("inputs 2\nt1 = x1 + z1\n").contains("unknown identifier"));
        assert!(err("inputs 2\nt1 = x1 + x3\n").contains("unknown identifier"));
        assert!(err("inputs 2\nt1 = x1\n").contains("fan-in"));
        assert!(err("inputs 3\nt1 = x1 + x2 + x3\n").contains("fan-in"));
        assert!(err("inputs 2\nt1 = x1 + x2\ny1 = t1\ny1 = x1\n").contains("duplicate"));
        assert!(err("inputs 2\nt2 = x1 + x2\n").contains("expected gate t1"));
        assert!(err("inputs 2\ny1 = x1\nt1 = x1 + x2\n").contains("after outputs"));
        assert!(err("inputs 2\ny2 = x1\n").contains("y1 is missing"));
        assert!(err("t1 = x1 + x2\n").contains("header"));
        assert!(err("inputs 2\nt1 = x0 + x1\n").contains("unknown identifier"));
    }
}
