//! Lower bounds on circuit size.

use std::fmt;

use num_rational::Rational64;

use crate::gf2::{BitMatrix, BitVector};
use crate::{Error, Result};

/// Largest `C(cols, b) * rows` that [`kab_free`] will enumerate.
pub const KAB_WORK_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Exact(Rational64),
    Real(f64),
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(r) => write!(f, "{r}"),
            BoundValue::Real(x) => write!(f, "{x}"),
        }
    }
}

/// A named bound. When `applicable` is false the value makes no claim.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: BoundValue,
    pub applicable: bool,
    pub params: Vec<(&'static str, i64)>,
}

impl BoundReport {
    /// The exact value, for bounds that have one.
    pub fn exact(&self) -> Option<Rational64> {
        match self.value {
            BoundValue::Exact(r) => Some(r),
            BoundValue::Real(_) => None,
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name, self.value, self.applicable)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Whether `a`, read as a bipartite adjacency matrix (rows vs columns), has
/// no `K_{rows_side, cols_side}`: no `rows_side` rows share `cols_side` common
/// columns of ones.
pub fn kab_free(a: &BitMatrix, rows_side: usize, cols_side: usize) -> Result<bool> {
    if rows_side == 0 || cols_side == 0 {
        return Err(Error::InvalidArgument("K_{a,b} needs a, b >= 1".into()));
    }
    let work = binomial(a.cols() as u128, cols_side as u128).saturating_mul(a.rows() as u128);
    if work > KAB_WORK_LIMIT {
        return Err(Error::LimitExceeded {
            work,
            limit: KAB_WORK_LIMIT,
        });
    }
    if cols_side > a.cols() || rows_side > a.rows() {
        return Ok(true);
    }
    // Only rows with at least `cols_side` ones can take part.
    let rows: Vec<&BitVector> = a
        .row_vectors()
        .iter()
        .filter(|r| r.weight() >= cols_side)
        .collect();
    let mut subset: Vec<usize> = (1..=cols_side).collect();
    let n = a.cols();
    loop {
        let mask = BitVector::from_support(n, subset.iter().copied());
        let hits = rows.iter().filter(|r| mask.is_subset_of(r)).count();
        if hits >= rows_side {
            return Ok(false);
        }
        // Next b-subset in lexicographic order.
        let Some(pos) = (0..cols_side).rev().find(|&t| subset[t] < n - (cols_side - 1 - t)) else {
            return Ok(true);
        };
        subset[pos] += 1;
        for t in pos + 1..cols_side {
            subset[t] = subset[t - 1] + 1;
        }
    }
}

/// `Σ_i max(|M_i|/k - 1, 0) / h`, a lower bound on the cancellation-free
/// circuit size of `a` whenever `a` is `K_{h+1,k+1}`-free (checked here).
pub fn mehlhorn_bound(a: &BitMatrix, h: usize, k: usize) -> Result<BoundReport> {
    if h == 0 || k == 0 {
        return Err(Error::InvalidArgument("h and k must be at least 1".into()));
    }
    let applicable = kab_free(a, h + 1, k + 1)?;
    let (h64, k64) = (h as i64, k as i64);
    let value = a
        .row_vectors()
        .iter()
        .map(|r| {
            let term = Rational64::new(r.weight() as i64, k64) - 1;
            term.max(Rational64::from_integer(0))
        })
        .fold(Rational64::from_integer(0), |acc, t| acc + t)
        / h64;
    Ok(BoundReport {
        name: "mehlhorn",
        value: BoundValue::Exact(value),
        applicable,
        params: vec![("h", h64), ("k", k64)],
    })
}

/// `log₂((n+M)^{2M} (n+M+1)^n / M!)`, an upper bound on the log-count of
/// circuits with `n` inputs, `n` outputs and `M` gates. `log₂ M!` is summed
/// term by term.
pub fn log2_circuit_count(n: u64, gates: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let (nf, mf) = (n as f64, gates as f64);
    let log2_fact: f64 = (2..=gates).map(|i| (i as f64).log2()).sum();
    Ok(2.0 * mf * (nf + mf).log2() + nf * (nf + mf + 1.0).log2() - log2_fact)
}

pub fn counting_bound(n: u64, gates: u64) -> Result<BoundReport> {
    let value = log2_circuit_count(n, gates)?;
    let n_sq = (n as f64) * (n as f64);
    Ok(BoundReport {
        name: "counting",
        value: BoundValue::Real(value),
        // Fewer circuits than matrices: some n x n matrix needs more than M gates.
        applicable: value < n_sq,
        params: vec![("n", n as i64), ("m", gates as i64)],
    })
}

/// `½ n log₂ n`, the cancellation-free size lower bound for the `n x n`
/// Sierpinski matrix.
pub fn sierpinski_cf_lower(n: u64) -> Result<u64> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "n = {n} is not a power of two >= 2"
        )));
    }
    Ok(n / 2 * u64::from(n.trailing_zeros()))
}

pub fn sierpinski_bound(n: u64) -> Result<BoundReport> {
    let v = sierpinski_cf_lower(n)?;
    Ok(BoundReport {
        name: "sierpinski",
        value: BoundValue::Exact(Rational64::from_integer(v as i64)),
        applicable: true,
        params: vec![("n", n as i64)],
    })
}
