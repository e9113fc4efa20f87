//! Cancellation-freeness.
//!
//! A linear circuit is cancellation-free when no gate ever loses a term that
//! one of its predecessors had: for every gate `u` and every node `w` upstream
//! of it, `κ(u) ≥ κ(w)` coordinatewise. Three deciders are provided, each built
//! on a different characterization:
//!
//! - [`is_cf_disjoint_support`]: the two children of every gate have disjoint
//!   value-vector supports.
//! - [`is_cf_monotone`]: `κ` is monotone along every upstream relation.
//! - [`is_cf_reachability`]: whenever `κ(v)_i = 0`, input `x_i` has no path to `v`.
//!
//! All three report the first violation in topological order, so on a non-CF
//! circuit they agree on the offending gate.

use crate::circuit::{LinearCircuit, NodeRef};
use crate::gf2::BitVector;

/// Evidence that a circuit is not cancellation-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfViolation {
    /// Both children of `gate` contain `x_coordinate`. `paths` are two paths
    /// from a common node to the gate, disjoint except at their endpoints; the
    /// first enters through the left child, the second through the right.
    SharedTerm {
        gate: usize,
        coordinate: usize,
        paths: [Vec<NodeRef>; 2],
    },
    /// `upstream` has a path to `gate` and contains `x_coordinate`, but `gate` does not.
    NotMonotone {
        gate: usize,
        upstream: NodeRef,
        coordinate: usize,
    },
    /// `x_coordinate` has a path to `node` yet `κ(node)_coordinate = 0`.
    CancelledInput { node: NodeRef, coordinate: usize },
}

impl CfViolation {
    /// The gate (0-based) the violation is attributed to.
    pub fn gate(&self) -> usize {
        match self {
            CfViolation::SharedTerm { gate, .. } | CfViolation::NotMonotone { gate, .. } => *gate,
            CfViolation::CancelledInput { node, .. } => match node {
                NodeRef::Gate(g) => *g,
                _ => unreachable!("inputs never cancel"),
            },
        }
    }

    pub fn coordinate(&self) -> usize {
        match self {
            CfViolation::SharedTerm { coordinate, .. }
            | CfViolation::NotMonotone { coordinate, .. }
            | CfViolation::CancelledInput { coordinate, .. } => *coordinate,
        }
    }

    /// Re-verifies the witness against `c` from scratch.
    pub fn recheck(&self, c: &LinearCircuit) -> bool {
        let kappa = c.value_vectors();
        let reach = reachability(c);
        let k = |r: NodeRef| &kappa[c.node_id(r).unwrap()];
        match self {
            CfViolation::SharedTerm {
                gate,
                coordinate,
                paths,
            } => {
                let Some(g) = c.gates().get(*gate) else {
                    return false;
                };
                let i = *coordinate;
                if i == 0 || i > c.num_inputs() || !k(g.left).get(i) || !k(g.right).get(i) {
                    return false;
                }
                check_disjoint_paths(c, NodeRef::Gate(*gate), paths)
            }
            CfViolation::NotMonotone {
                gate,
                upstream,
                coordinate,
            } => {
                let i = *coordinate;
                *gate < c.size()
                    && i >= 1
                    && i <= c.num_inputs()
                    && has_path(c, *upstream, NodeRef::Gate(*gate))
                    && k(*upstream).get(i)
                    && !k(NodeRef::Gate(*gate)).get(i)
            }
            CfViolation::CancelledInput { node, coordinate } => {
                let i = *coordinate;
                let Some(id) = c.node_id(*node) else {
                    return false;
                };
                i >= 1 && i <= c.num_inputs() && reach[id].get(i) && !kappa[id].get(i)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfVerdict {
    pub is_cf: bool,
    pub witness: Option<CfViolation>,
}

impl CfVerdict {
    fn from_witness(witness: Option<CfViolation>) -> Self {
        Self {
            is_cf: witness.is_none(),
            witness,
        }
    }
}

/// Inputs with a path to each node, indexed by node id.
fn reachability(c: &LinearCircuit) -> Vec<BitVector> {
    let n = c.num_inputs();
    let mut reach: Vec<BitVector> = (1..=n).map(|i| BitVector::unit(n, i)).collect();
    for g in c.gates() {
        let v = &reach[c.node_id(g.left).unwrap()] | &reach[c.node_id(g.right).unwrap()];
        reach.push(v);
    }
    reach
}

fn has_path(c: &LinearCircuit, from: NodeRef, to: NodeRef) -> bool {
    let (Some(from), Some(to)) = (c.node_id(from), c.node_id(to)) else {
        return false;
    };
    let mut stack = vec![to];
    let mut seen = vec![false; c.node_count()];
    while let Some(v) = stack.pop() {
        if v == from {
            return true;
        }
        if v < c.num_inputs() || std::mem::replace(&mut seen[v], true) {
            continue;
        }
        let g = c.gate(v - c.num_inputs());
        stack.extend(g.children().iter().map(|&r| c.node_id(r).unwrap()));
    }
    false
}

/// A path from `x_i` to `node`, following left children first.
fn path_from_input(c: &LinearCircuit, reach: &[BitVector], i: usize, node: NodeRef) -> Vec<NodeRef> {
    let mut path = vec![node];
    let mut cur = node;
    while let NodeRef::Gate(g) = cur {
        let gate = c.gate(g);
        cur = gate
            .children()
            .into_iter()
            .find(|&r| reach[c.node_id(r).unwrap()].get(i))
            .expect("x_i reaches a child of every gate it reaches");
        path.push(cur);
    }
    debug_assert_eq!(cur, NodeRef::Input(i - 1));
    path.reverse();
    path
}

fn shared_term_paths(
    c: &LinearCircuit,
    reach: &[BitVector],
    gate: usize,
    i: usize,
) -> [Vec<NodeRef>; 2] {
    let g = c.gate(gate);
    let p = path_from_input(c, reach, i, g.left);
    let q = path_from_input(c, reach, i, g.right);
    // Last node of q that lies on p; both suffixes from there avoid each other.
    let (qi, pi) = q
        .iter()
        .enumerate()
        .rev()
        .find_map(|(qi, node)| p.iter().position(|x| x == node).map(|pi| (qi, pi)))
        .expect("both paths start at x_i");
    let mut first = p[pi..].to_vec();
    let mut second = q[qi..].to_vec();
    first.push(NodeRef::Gate(gate));
    second.push(NodeRef::Gate(gate));
    [first, second]
}

fn check_disjoint_paths(c: &LinearCircuit, target: NodeRef, paths: &[Vec<NodeRef>; 2]) -> bool {
    let [a, b] = paths;
    if a.len() < 2 || b.len() < 2 || a[0] != b[0] || a.last() != Some(&target) || b.last() != Some(&target) {
        return false;
    }
    let edge_ok = |from: NodeRef, to: NodeRef| match to {
        NodeRef::Gate(g) if g < c.size() => c.gate(g).children().contains(&from),
        _ => false,
    };
    if !a.windows(2).all(|w| edge_ok(w[0], w[1])) || !b.windows(2).all(|w| edge_ok(w[0], w[1])) {
        return false;
    }
    let NodeRef::Gate(t) = target else {
        return false;
    };
    let gate = c.gate(t);
    if a[a.len() - 2] != gate.left || b[b.len() - 2] != gate.right {
        return false;
    }
    let inner_a = &a[1..a.len() - 1];
    let inner_b = &b[1..b.len() - 1];
    inner_a.iter().all(|x| !inner_b.contains(x))
}

/// Every gate combines two children with disjoint supports.
pub fn is_cf_disjoint_support(c: &LinearCircuit) -> CfVerdict {
    let kappa = c.value_vectors();
    for (g, gate) in c.gates().iter().enumerate() {
        let l = &kappa[c.node_id(gate.left).unwrap()];
        let r = &kappa[c.node_id(gate.right).unwrap()];
        if l.intersects(r) {
            let i = (l & r).first_one().unwrap();
            let reach = reachability(c);
            return CfVerdict::from_witness(Some(CfViolation::SharedTerm {
                gate: g,
                coordinate: i,
                paths: shared_term_paths(c, &reach, g, i),
            }));
        }
    }
    CfVerdict::from_witness(None)
}

/// `κ(u) ≥ κ(w)` for every gate `u` and every node `w` with a path to `u`.
pub fn is_cf_monotone(c: &LinearCircuit) -> CfVerdict {
    let kappa = c.value_vectors();
    let nodes = c.node_count();
    let n = c.num_inputs();
    // Upstream closure of each gate, as a node-id bit set.
    let mut upstream: Vec<BitVector> = Vec::with_capacity(c.size());
    for (g, gate) in c.gates().iter().enumerate() {
        let mut up = BitVector::zeros(nodes);
        for child in gate.children() {
            let id = c.node_id(child).unwrap();
            up.set(id + 1, true);
            if id >= n {
                up = &up | &upstream[id - n];
            }
        }
        let mine = &kappa[n + g];
        for w in up.iter_ones().map(|b| b - 1) {
            if !kappa[w].is_subset_of(mine) {
                let i = kappa[w].difference(mine).first_one().unwrap();
                return CfVerdict::from_witness(Some(CfViolation::NotMonotone {
                    gate: g,
                    upstream: c.node_ref(w),
                    coordinate: i,
                }));
            }
        }
        upstream.push(up);
    }
    CfVerdict::from_witness(None)
}

/// No input reaches a node whose value vector omits it.
pub fn is_cf_reachability(c: &LinearCircuit) -> CfVerdict {
    let kappa = c.value_vectors();
    let reach = reachability(c);
    for id in c.num_inputs()..c.node_count() {
        let lost = reach[id].difference(&kappa[id]);
        if let Some(i) = lost.first_one() {
            return CfVerdict::from_witness(Some(CfViolation::CancelledInput {
                node: c.node_ref(id),
                coordinate: i,
            }));
        }
    }
    CfVerdict::from_witness(None)
}

/// Runs all three deciders and returns the disjoint-support verdict.
///
/// # Panics
///
/// If the deciders disagree.
pub fn check(c: &LinearCircuit) -> CfVerdict {
    let support = is_cf_disjoint_support(c);
    let monotone = is_cf_monotone(c);
    let reach = is_cf_reachability(c);
    assert!(
        support.is_cf == monotone.is_cf && support.is_cf == reach.is_cf,
        "cancellation-free deciders disagree: support={} monotone={} reachability={}",
        support.is_cf,
        monotone.is_cf,
        reach.is_cf
    );
    support
}

pub fn is_cancellation_free(c: &LinearCircuit) -> bool {
    check(c).is_cf
}
