//! Circuit constructors.
//!
//! Every synthesizer returns a [`SynthReport`] whose circuit has been checked to
//! compute the requested matrix and whose cancellation-free flag comes from
//! [`cfcheck::check`], never from the construction's own claim.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::cfcheck;
use crate::circuit::{LinearCircuit, NodeRef};
use crate::gen;
use crate::gf2::BitMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Naive,
    Lupanov,
    Greedy,
    Sierpinski,
    PrefixCancel,
    PrefixCf,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Lupanov => "lupanov",
            Method::Greedy => "greedy",
            Method::Sierpinski => "sierpinski",
            Method::PrefixCancel => "prefix-cancel",
            Method::PrefixCf => "prefix-cf",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Method::Naive,
            Method::Lupanov,
            Method::Greedy,
            Method::Sierpinski,
            Method::PrefixCancel,
            Method::PrefixCf,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown synthesis method {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct SynthReport {
    pub circuit: LinearCircuit,
    pub method: Method,
    pub gate_count: usize,
    pub cancellation_free: bool,
}

impl SynthReport {
    fn verified(circuit: LinearCircuit, method: Method, target: &BitMatrix) -> Self {
        assert!(
            circuit.computes(target).unwrap_or(false),
            "{method} produced a circuit that does not compute its matrix"
        );
        Self {
            gate_count: circuit.size(),
            cancellation_free: cfcheck::is_cancellation_free(&circuit),
            circuit,
            method,
        }
    }
}

impl fmt::Display for SynthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "method={} gates={} cf={}",
            self.method, self.gate_count, self.cancellation_free
        )
    }
}

fn check_nonempty(a: &BitMatrix) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidArgument(format!(
            "matrix must have positive dimensions, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// XORs `terms` left to right. Empty sums are the zero marker.
fn chain(c: &mut LinearCircuit, terms: &[NodeRef]) -> NodeRef {
    let Some((&first, rest)) = terms.split_first() else {
        return NodeRef::Zero;
    };
    rest.iter().fold(first, |acc, &t| {
        c.add_gate(acc, t).expect("chain operands are defined")
    })
}

/// Each row computed independently as a left-to-right chain: `Σ max(|row|-1, 0)` gates.
pub fn synth_naive(a: &BitMatrix) -> Result<SynthReport> {
    check_nonempty(a)?;
    let mut c = LinearCircuit::new(a.cols());
    for row in a.row_vectors() {
        let terms: Vec<NodeRef> = row.iter_ones().map(|j| NodeRef::Input(j - 1)).collect();
        let out = chain(&mut c, &terms);
        c.add_output(out)?;
    }
    Ok(SynthReport::verified(c, Method::Naive, a))
}

/// The default block width for [`synth_lupanov`]:
/// `max(1, ⌊log₂ n⌋ - ⌊2 log₂ log₂ n⌋)`, clamped to `[1, n]`.
pub fn default_block_width(n: usize) -> usize {
    if n < 4 {
        return 1;
    }
    let log_n = (n as f64).log2();
    let b = log_n.floor() as i64 - (2.0 * log_n.log2()).floor() as i64;
    (b.max(1) as usize).min(n)
}

/// Upper bound on [`synth_lupanov`]'s gate count for block width `b`:
/// `⌈n/b⌉ (2^b - b - 1) + Σ_i max(nonzero blocks of row i - 1, 0)`.
pub fn lupanov_bound(a: &BitMatrix, b: usize) -> u128 {
    let n = a.cols();
    let blocks = n.div_ceil(b);
    let per_block = (1u128 << b.min(127)) - b as u128 - 1;
    let assembly: usize = a
        .row_vectors()
        .iter()
        .map(|r| {
            let nz = (0..blocks)
                .filter(|&blk| (blk * b + 1..=((blk + 1) * b).min(n)).any(|j| r.get(j)))
                .count();
            nz.saturating_sub(1)
        })
        .sum();
    blocks as u128 * per_block + assembly as u128
}

/// Column-block construction: columns are cut into blocks of `b`; inside each
/// block every occurring row pattern of two or more columns is built once
/// from smaller patterns; each row then sums its nonzero block patterns.
///
/// Each (block, pattern, rows using it) triple is a rank-1 piece of a
/// rectangular decomposition of `a`, so the result is cancellation-free.
pub fn synth_lupanov(a: &BitMatrix, b: usize) -> Result<SynthReport> {
    check_nonempty(a)?;
    let n = a.cols();
    if b == 0 || b > n || b > 63 {
        return Err(Error::InvalidArgument(format!(
            "block width {b} outside 1..={}",
            n.min(63)
        )));
    }
    let blocks = n.div_ceil(b);
    let pattern = |row: &crate::BitVector, blk: usize| -> u64 {
        (0..b)
            .filter(|&t| {
                let j = blk * b + t + 1;
                j <= n && row.get(j)
            })
            .fold(0u64, |m, t| m | 1 << t)
    };

    let mut c = LinearCircuit::new(n);
    let mut built: Vec<HashMap<u64, NodeRef>> = Vec::with_capacity(blocks);
    for blk in 0..blocks {
        let mut needed: BTreeSet<(u32, u64)> = BTreeSet::new();
        for row in a.row_vectors() {
            let mut m = pattern(row, blk);
            // A pattern needs every prefix obtained by peeling its lowest bit.
            while m.count_ones() >= 2 {
                needed.insert((m.count_ones(), m));
                m &= m - 1;
            }
        }
        let mut table: HashMap<u64, NodeRef> = (0..b)
            .map(|t| (1u64 << t, NodeRef::Input(blk * b + t)))
            .collect();
        for (_, m) in needed {
            let low = m & m.wrapping_neg();
            let rest = table[&(m ^ low)];
            let node = c.add_gate(rest, table[&low])?;
            table.insert(m, node);
        }
        built.push(table);
    }
    for row in a.row_vectors() {
        let terms: Vec<NodeRef> = (0..blocks)
            .filter_map(|blk| {
                let m = pattern(row, blk);
                (m != 0).then(|| built[blk][&m])
            })
            .collect();
        let out = chain(&mut c, &terms);
        c.add_output(out)?;
    }
    Ok(SynthReport::verified(c, Method::Lupanov, a))
}

/// Recursive construction for the `2^k x 2^k` Sierpinski matrix with exactly
/// `k 2^(k-1)` gates: build both halves, then `y_{h+j} = y_j ⊕ t_j`.
pub fn synth_sierpinski(k: u32) -> Result<SynthReport> {
    if k > 20 {
        return Err(Error::InvalidArgument(format!("k = {k} is too large")));
    }
    let n = 1usize << k;
    let mut c = LinearCircuit::new(n);
    let outs = sierpinski_block(&mut c, 0, n);
    for o in outs {
        c.add_output(o)?;
    }
    Ok(SynthReport::verified(c, Method::Sierpinski, &gen::gen_sierpinski(k)))
}

fn sierpinski_block(c: &mut LinearCircuit, offset: usize, size: usize) -> Vec<NodeRef> {
    if size == 1 {
        return vec![NodeRef::Input(offset)];
    }
    let half = size / 2;
    let top = sierpinski_block(c, offset, half);
    let bottom = sierpinski_block(c, offset + half, half);
    let mut outs = top.clone();
    for (&t, &u) in top.iter().zip(&bottom) {
        outs.push(c.add_gate(t, u).expect("operands are defined"));
    }
    outs
}

fn check_prefix_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("prefix matrix needs n >= 3, got {n}")));
    }
    Ok(())
}

/// `n` gates for the prefix matrix using cancellation: the chain
/// `y_2 = x_1 ⊕ x_2`, `y_j = y_{j-1} ⊕ x_j`, then `y_1 = y_n ⊕ x_1`.
pub fn synth_prefix_cancel(n: usize) -> Result<SynthReport> {
    check_prefix_n(n)?;
    let mut c = LinearCircuit::new(n);
    let mut prefix = vec![NodeRef::Input(0)];
    for j in 1..n {
        let prev = *prefix.last().unwrap();
        prefix.push(c.add_gate(prev, NodeRef::Input(j))?);
    }
    let y1 = c.add_gate(prefix[n - 1], NodeRef::Input(0))?;
    c.add_output(y1)?;
    for &p in &prefix[1..] {
        c.add_output(p)?;
    }
    Ok(SynthReport::verified(c, Method::PrefixCancel, &gen::gen_prefix(n)?))
}

/// `2n - 3` gates for the prefix matrix without cancellation: the prefix chain
/// for `y_2..y_n` plus a separate chain `x_2 ⊕ ... ⊕ x_n` for `y_1`.
pub fn synth_prefix_cf(n: usize) -> Result<SynthReport> {
    check_prefix_n(n)?;
    let mut c = LinearCircuit::new(n);
    let mut prefix = vec![NodeRef::Input(0)];
    for j in 1..n {
        let prev = *prefix.last().unwrap();
        prefix.push(c.add_gate(prev, NodeRef::Input(j))?);
    }
    let suffix: Vec<NodeRef> = (1..n).map(NodeRef::Input).collect();
    let y1 = chain(&mut c, &suffix);
    c.add_output(y1)?;
    for &p in &prefix[1..] {
        c.add_output(p)?;
    }
    Ok(SynthReport::verified(c, Method::PrefixCf, &gen::gen_prefix(n)?))
}

/// Pair-extraction heuristic: while some row has two or more terms, replace
/// the pair of terms that co-occurs in the most rows by a fresh term. Ties go
/// to the lexicographically smallest `(term, term)` pair; inputs are terms
/// `0..n` and extracted pairs are numbered after them.
pub fn synth_greedy_cse(a: &BitMatrix) -> Result<SynthReport> {
    check_nonempty(a)?;
    let n = a.cols();
    let mut c = LinearCircuit::new(n);
    let mut terms: Vec<NodeRef> = (0..n).map(NodeRef::Input).collect();
    let mut rows: Vec<BTreeSet<usize>> = a
        .row_vectors()
        .iter()
        .map(|r| r.iter_ones().map(|j| j - 1).collect())
        .collect();
    loop {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for row in rows.iter().filter(|r| r.len() >= 2) {
            let items: Vec<usize> = row.iter().copied().collect();
            for (x, &p) in items.iter().enumerate() {
                for &q in &items[x + 1..] {
                    *counts.entry((p, q)).or_default() += 1;
                }
            }
        }
        let Some((&(p, q), _)) = counts
            .iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
        else {
            break;
        };
        let fresh = terms.len();
        terms.push(c.add_gate(terms[p], terms[q])?);
        for row in rows.iter_mut() {
            if row.contains(&p) && row.contains(&q) {
                row.remove(&p);
                row.remove(&q);
                row.insert(fresh);
            }
        }
    }
    for row in &rows {
        let out = row.first().map_or(NodeRef::Zero, |&t| terms[t]);
        c.add_output(out)?;
    }
    Ok(SynthReport::verified(c, Method::Greedy, a))
}

/// Runs every general-purpose synthesizer and returns the smallest circuit.
pub fn best_of(a: &BitMatrix) -> Result<SynthReport> {
    let candidates = [
        synth_naive(a)?,
        synth_lupanov(a, default_block_width(a.cols()))?,
        synth_greedy_cse(a)?,
    ];
    Ok(candidates
        .into_iter()
        .min_by_key(|r| r.gate_count)
        .expect("non-empty candidate list"))
}
