//! Matrix generators.

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::gf2::{BitMatrix, BitVector};
use crate::{Error, Result};

/// The `2^k x 2^k` Sierpinski gasket matrix, built by the block recursion
/// `S_0 = [1]`, `S_{k+1} = [[S_k, 0], [S_k, S_k]]`.
pub fn gen_sierpinski(k: u32) -> BitMatrix {
    let mut rows = vec![BitVector::from_bools(&[true])];
    for level in 0..k {
        let half = 1usize << level;
        let size = 2 * half;
        let mut next = Vec::with_capacity(size);
        for r in &rows {
            next.push(BitVector::from_support(size, r.iter_ones()));
        }
        for r in &rows {
            next.push(BitVector::from_support(
                size,
                r.iter_ones().chain(r.iter_ones().map(|j| j + half)),
            ));
        }
        rows = next;
    }
    BitMatrix::from_rows(1 << k, rows).expect("rows have equal length")
}

/// Entry `(i, j)` (1-indexed) of `S_k` without materializing it: one iff the
/// 0-based column index is a bit-subset of the 0-based row index.
pub fn sierpinski_entry(i: usize, j: usize) -> bool {
    let (r, c) = (i - 1, j - 1);
    c & !r == 0
}

/// `S_k` from [`sierpinski_entry`].
pub fn gen_sierpinski_bitmask(k: u32) -> BitMatrix {
    let n = 1usize << k;
    BitMatrix::from_fn(n, n, sierpinski_entry)
}

/// The prefix matrix `P_n`: row 1 is `(0, 1, ..., 1)`, row `j >= 2` has `j`
/// leading ones.
pub fn gen_prefix(n: usize) -> Result<BitMatrix> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("prefix matrix needs n >= 3, got {n}")));
    }
    Ok(BitMatrix::from_fn(n, n, |i, j| if i == 1 { j >= 2 } else { j <= i }))
}

/// Parameters of Brown's `K_{3,3}`-free graph over `F_p^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BrownParams {
    p: u64,
    delta: u64,
}

impl BrownParams {
    pub fn new(p: u64, delta: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("p = {p} is not an odd prime")));
        }
        if delta == 0 || delta >= p {
            return Err(Error::InvalidArgument(format!(
                "delta = {delta} must lie in 1..={}",
                p - 1
            )));
        }
        if p > 1000 {
            return Err(Error::InvalidArgument(format!("p = {p} is too large")));
        }
        Ok(Self { p, delta })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Brown's graph as a `p^3 x p^3` matrix: vertices are points of `F_p^3` in
/// lexicographic order of their coordinate triples, and `u ~ v` iff
/// `Σ (u_i - v_i)^2 ≡ delta (mod p)`.
pub fn gen_brown(params: BrownParams) -> BitMatrix {
    let p = params.p;
    let n = (p * p * p) as usize;
    let coords = |v: usize| {
        let v = v as u64;
        [v / (p * p), (v / p) % p, v % p]
    };
    BitMatrix::from_fn(n, n, |i, j| {
        let (u, v) = (coords(i - 1), coords(j - 1));
        let dist = u
            .iter()
            .zip(&v)
            .map(|(&a, &b)| {
                let d = (a + p - b) % p;
                d * d
            })
            .sum::<u64>()
            % p;
        dist == params.delta
    })
}

/// A seeded random `m x n` matrix; each entry is one with probability `density`.
///
/// Entries are drawn row-major from SplitMix64 seeded with `seed`: entry is one
/// iff the next 64-bit output is below `density * 2^64`. The result depends only
/// on the arguments, not on platform.
pub fn gen_random(n: usize, m: usize, density: f64, seed: u64) -> BitMatrix {
    assert!(
        (0.0..=1.0).contains(&density),
        "density {density} outside [0, 1]"
    );
    let threshold = (density * 2f64.powi(64)) as u128;
    let mut rng = SplitMix64::seed_from_u64(seed);
    BitMatrix::from_fn(m, n, |_, _| (rng.next_u64() as u128) < threshold)
}
