//! Exhaustive minimum-circuit search for small matrices.
//!
//! A search state is the set of value vectors computed so far, starting from
//! the unit vectors. A step XORs two available vectors into a new one (in
//! cancellation-free mode the two must have disjoint supports). The search
//! deepens one gate at a time until every nonzero row of the matrix is
//! available, so the first depth that succeeds is the minimum size.
//!
//! Pruning, all of it admissible:
//!
//! - each gate adds one vector, so at least `missing` more gates are needed;
//! - in cancellation-free mode a missing row `r` is a disjoint union of
//!   available vectors plus new gates, so it needs at least `⌈|r| / s⌉ - 1`
//!   more gates where `s` is the largest available vector inside `r`;
//! - in cancellation-free mode a new vector must lie inside some missing row,
//!   because every gate of a minimal circuit feeds an output that contains it;
//! - states are memoized per depth by their vector set, keeping the largest
//!   remaining budget seen.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use num_rational::Rational64;

use crate::circuit::{LinearCircuit, NodeRef};
use crate::gf2::BitMatrix;
use crate::synth;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    General,
    CancellationFree,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::General => "general",
            Mode::CancellationFree => "cf",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Found,
    ExceedsBudget,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub status: Status,
    pub min_gates: Option<usize>,
    pub circuit: Option<LinearCircuit>,
    pub mode: Mode,
    pub nodes_expanded: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub mode: Mode,
    pub budget: usize,
    /// Worker threads for the top-level branches; 1 searches sequentially.
    pub threads: usize,
}

impl OracleConfig {
    pub fn new(mode: Mode, budget: usize) -> Self {
        Self {
            mode,
            budget,
            threads: 1,
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }
}

/// Twice the size of the best synthesized circuit.
pub fn default_budget(a: &BitMatrix) -> Result<usize> {
    Ok(2 * synth::best_of(a)?.gate_count)
}

/// Minimum number of gates over all circuits (of the given mode) computing
/// `a`, searched sequentially up to `budget` gates.
pub fn min_circuit_size(a: &BitMatrix, mode: Mode, budget: usize) -> Result<OracleResult> {
    min_circuit_size_with(a, &OracleConfig::new(mode, budget))
}

pub fn min_circuit_size_with(a: &BitMatrix, config: &OracleConfig) -> Result<OracleResult> {
    let n = a.cols();
    if n > 64 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search supports at most 64 columns, got {n}"
        )));
    }
    let units: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    let mut targets: Vec<u64> = Vec::new();
    for r in a.row_vectors() {
        let v = r.to_u64();
        if v.count_ones() >= 2 && !targets.contains(&v) {
            targets.push(v);
        }
    }
    let problem = Problem {
        mode: config.mode,
        targets,
    };
    let expanded = AtomicU64::new(0);
    let start = problem.lower_bound(&units);
    let mut found = None;
    for depth in start..=config.budget {
        if let Some(pairs) = problem.solve_depth(&units, depth, config.threads, &expanded) {
            found = Some(pairs);
            break;
        }
    }
    let nodes_expanded = expanded.load(Ordering::Relaxed);
    let Some(pairs) = found else {
        return Ok(OracleResult {
            status: Status::ExceedsBudget,
            min_gates: None,
            circuit: None,
            mode: config.mode,
            nodes_expanded,
        });
    };
    let circuit = build_witness(a, &units, &pairs)?;
    Ok(OracleResult {
        status: Status::Found,
        min_gates: Some(pairs.len()),
        circuit: Some(circuit),
        mode: config.mode,
        nodes_expanded,
    })
}

fn build_witness(a: &BitMatrix, units: &[u64], pairs: &[(usize, usize)]) -> Result<LinearCircuit> {
    let n = units.len();
    let node = |idx: usize| {
        if idx < n {
            NodeRef::Input(idx)
        } else {
            NodeRef::Gate(idx - n)
        }
    };
    let mut c = LinearCircuit::new(n);
    let mut avail = units.to_vec();
    for &(i, j) in pairs {
        c.add_gate(node(i), node(j))?;
        avail.push(avail[i] ^ avail[j]);
    }
    for r in a.row_vectors() {
        let v = r.to_u64();
        let out = if v == 0 {
            NodeRef::Zero
        } else {
            let idx = avail
                .iter()
                .position(|&x| x == v)
                .expect("search stops only when every row is available");
            node(idx)
        };
        c.add_output(out)?;
    }
    Ok(c)
}

struct Problem {
    mode: Mode,
    targets: Vec<u64>,
}

impl Problem {
    fn missing<'a>(&'a self, avail: &'a [u64]) -> impl Iterator<Item = u64> + 'a {
        self.targets.iter().copied().filter(|t| !avail.contains(t))
    }

    fn lower_bound(&self, avail: &[u64]) -> usize {
        let mut bound = 0;
        let mut count = 0;
        for r in self.missing(avail) {
            count += 1;
            if self.mode == Mode::CancellationFree {
                let largest = avail
                    .iter()
                    .filter(|&&v| v & !r == 0)
                    .map(|v| v.count_ones())
                    .max()
                    .unwrap_or(1);
                bound = bound.max(r.count_ones().div_ceil(largest) as usize - 1);
            }
        }
        bound.max(count)
    }

    /// Candidate steps from `avail`, in fixed expansion order.
    fn moves(&self, avail: &[u64], remaining: usize) -> Vec<(usize, usize)> {
        let missing: Vec<u64> = self.missing(avail).collect();
        let only_targets = remaining == missing.len();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for i in 0..avail.len() {
            for j in i + 1..avail.len() {
                let (a, b) = (avail[i], avail[j]);
                if self.mode == Mode::CancellationFree && a & b != 0 {
                    continue;
                }
                let v = a ^ b;
                if v == 0 || avail.contains(&v) || !seen.insert(v) {
                    continue;
                }
                if only_targets && !missing.contains(&v) {
                    continue;
                }
                if self.mode == Mode::CancellationFree && !missing.iter().any(|&r| v & !r == 0) {
                    continue;
                }
                out.push((i, j));
            }
        }
        out
    }

    /// Searches for a circuit of exactly `depth` more gates (or fewer, which
    /// cannot happen once shallower depths have failed).
    fn solve_depth(
        &self,
        units: &[u64],
        depth: usize,
        threads: usize,
        expanded: &AtomicU64,
    ) -> Option<Vec<(usize, usize)>> {
        if self.missing(units).next().is_none() {
            return Some(Vec::new());
        }
        if depth == 0 {
            return None;
        }
        let roots = self.moves(units, depth);
        let best = AtomicUsize::new(usize::MAX);
        let next = AtomicUsize::new(0);
        let results: Vec<Option<(usize, Vec<(usize, usize)>)>> = std::thread::scope(|s| {
            let workers: Vec<_> = (0..threads.min(roots.len()).max(1))
                .map(|_| {
                    s.spawn(|| {
                        let mut walker = Walker {
                            problem: self,
                            avail: units.to_vec(),
                            path: Vec::new(),
                            memo: HashMap::new(),
                            expanded: 0,
                        };
                        let mut mine = None;
                        loop {
                            let idx = next.fetch_add(1, Ordering::Relaxed);
                            if idx >= roots.len() || idx > best.load(Ordering::Relaxed) {
                                break;
                            }
                            if walker.try_root(roots[idx], depth) {
                                best.fetch_min(idx, Ordering::Relaxed);
                                mine = Some((idx, walker.path.clone()));
                                break;
                            }
                        }
                        expanded.fetch_add(walker.expanded, Ordering::Relaxed);
                        mine
                    })
                })
                .collect();
            workers.into_iter().map(|w| w.join().expect("search worker panicked")).collect()
        });
        results.into_iter().flatten().min_by_key(|(idx, _)| *idx).map(|(_, path)| path)
    }
}

struct Walker<'a> {
    problem: &'a Problem,
    avail: Vec<u64>,
    path: Vec<(usize, usize)>,
    memo: HashMap<Vec<u64>, usize>,
    expanded: u64,
}

impl Walker<'_> {
    fn try_root(&mut self, (i, j): (usize, usize), depth: usize) -> bool {
        self.apply(i, j);
        if self.dfs(depth - 1) {
            return true;
        }
        self.undo();
        false
    }

    fn apply(&mut self, i: usize, j: usize) {
        self.avail.push(self.avail[i] ^ self.avail[j]);
        self.path.push((i, j));
    }

    fn undo(&mut self) {
        self.avail.pop();
        self.path.pop();
    }

    fn dfs(&mut self, remaining: usize) -> bool {
        let need = self.problem.lower_bound(&self.avail);
        if need == 0 {
            return true;
        }
        if need > remaining {
            return false;
        }
        let units = self.avail.len() - self.path.len();
        let mut key = self.avail[units..].to_vec();
        key.sort_unstable();
        match self.memo.get(&key) {
            Some(&seen) if seen >= remaining => return false,
            _ => {
                self.memo.insert(key, remaining);
            }
        }
        self.expanded += 1;
        for (i, j) in self.problem.moves(&self.avail, remaining) {
            self.apply(i, j);
            if self.dfs(remaining - 1) {
                return true;
            }
            self.undo();
        }
        false
    }
}

/// Outcome of [`cancellation_ratio`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioOutcome {
    /// `min_cf / min_general`; defined as 1 when both are zero.
    Ratio {
        min_general: usize,
        min_cf: usize,
        ratio: Rational64,
    },
    ExceedsBudget,
}

pub fn cancellation_ratio(a: &BitMatrix, budget: usize) -> Result<RatioOutcome> {
    cancellation_ratio_with(a, budget, 1)
}

pub fn cancellation_ratio_with(a: &BitMatrix, budget: usize, threads: usize) -> Result<RatioOutcome> {
    let general = min_circuit_size_with(a, &OracleConfig::new(Mode::General, budget).threads(threads))?;
    let cf = min_circuit_size_with(
        a,
        &OracleConfig::new(Mode::CancellationFree, budget).threads(threads),
    )?;
    let (Some(g), Some(f)) = (general.min_gates, cf.min_gates) else {
        return Ok(RatioOutcome::ExceedsBudget);
    };
    let ratio = if g == 0 {
        // A zero-gate general circuit is cancellation-free too.
        Rational64::from_integer(1)
    } else {
        Rational64::new(f as i64, g as i64)
    };
    Ok(RatioOutcome::Ratio {
        min_general: g,
        min_cf: f,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfcheck;
    use crate::gen::{gen_prefix, gen_random, gen_sierpinski};

    fn solve(a: &BitMatrix, mode: Mode) -> OracleResult {
        let r = min_circuit_size(a, mode, 20).unwrap();
        let c = r.circuit.as_ref().expect("found");
        assert!(c.computes(a).unwrap());
        assert_eq!(c.size(), r.min_gates.unwrap());
        if mode == Mode::CancellationFree {
            assert!(cfcheck::is_cancellation_free(c));
        }
        r
    }

    #[test]
    fn small_examples() {
        for mode in [Mode::General, Mode::CancellationFree] {
            assert_eq!(solve(&gen_sierpinski(1), mode).min_gates, Some(1));
            assert_eq!(solve(&BitMatrix::identity(5), mode).min_gates, Some(0));
        }
        assert_eq!(solve(&gen_sierpinski(2), Mode::CancellationFree).min_gates, Some(4));
    }

    #[test]
    fn prefix_matrix_gap() {
        let p4 = gen_prefix(4).unwrap();
        assert_eq!(solve(&p4, Mode::General).min_gates, Some(4));
        assert_eq!(solve(&p4, Mode::CancellationFree).min_gates, Some(5));
        let p3 = gen_prefix(3).unwrap();
        assert_eq!(solve(&p3, Mode::General).min_gates, Some(3));
        assert_eq!(solve(&p3, Mode::CancellationFree).min_gates, Some(3));
    }

    #[test]
    fn zero_and_repeated_rows() {
        let a: BitMatrix = "3 3\n000\n110\n110\n".parse().unwrap();
        let r = solve(&a, Mode::General);
        assert_eq!(r.min_gates, Some(1));
        assert_eq!(r.circuit.unwrap().outputs()[0], NodeRef::Zero);
    }

    #[test]
    fn budget_exhaustion() {
        let r = min_circuit_size(&gen_prefix(4).unwrap(), Mode::CancellationFree, 4).unwrap();
        assert_eq!(r.status, Status::ExceedsBudget);
        assert!(r.min_gates.is_none() && r.circuit.is_none());
        let r = min_circuit_size(&BitMatrix::ones(3, 3), Mode::General, 0).unwrap();
        assert_eq!(r.status, Status::ExceedsBudget);
    }

    #[test]
    fn ratio_examples() {
        match cancellation_ratio(&gen_prefix(4).unwrap(), 20).unwrap() {
            RatioOutcome::Ratio { ratio, .. } => assert_eq!(ratio, Rational64::new(5, 4)),
            other => panic!("{other:?}"),
        }
        match cancellation_ratio(&BitMatrix::identity(3), 5).unwrap() {
            RatioOutcome::Ratio { ratio, min_general, .. } => {
                assert_eq!(min_general, 0);
                assert_eq!(ratio, Rational64::from_integer(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        for seed in 0..10 {
            let a = gen_random(4, 4, 0.5, seed);
            for mode in [Mode::General, Mode::CancellationFree] {
                let one = min_circuit_size_with(&a, &OracleConfig::new(mode, 16)).unwrap();
                let four =
                    min_circuit_size_with(&a, &OracleConfig::new(mode, 16).threads(4)).unwrap();
                assert_eq!(one.min_gates, four.min_gates);
                assert_eq!(one.circuit, four.circuit, "seed {seed} {mode}");
            }
        }
    }

    #[test]
    fn rejects_wide_matrices() {
        assert!(min_circuit_size(&BitMatrix::identity(65), Mode::General, 1).is_err());
    }
}
