//! Bit-packed vectors and matrices over GF(2).
//!
//! Coordinates are 1-indexed at the API boundary, so coordinate `i` of a
//! [`BitVector`] corresponds to input `x_i`. Internally coordinate `i` lives in
//! word `(i-1) / 64` at bit `(i-1) % 64`, least significant coordinate first.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, BitXorAssign};
use std::str::FromStr;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector in `F_2^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.trim();
        v
    }

    /// The unit vector `e^(i)`, `1 <= i <= len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Builds a vector from its support (1-indexed).
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if b {
                v.set(j + 1, true);
            }
        }
        v
    }

    /// Packs the low `len` bits of `mask`; bit 0 is coordinate 1.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 needs len <= 64, got {len}");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask;
            v.trim();
        }
        v
    }

    /// The packed low word. Only meaningful when `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn locate(&self, i: usize) -> (usize, u64) {
        assert!(
            (1..=self.len).contains(&i),
            "coordinate {i} out of range 1..={}",
            self.len
        );
        let k = i - 1;
        (k / WORD_BITS, 1u64 << (k % WORD_BITS))
    }

    pub fn get(&self, i: usize) -> bool {
        let (w, m) = self.locate(i);
        self.words[w] & m != 0
    }

    pub fn set(&mut self, i: usize, value: bool) {
        let (w, m) = self.locate(i);
        if value {
            self.words[w] |= m;
        } else {
            self.words[w] &= !m;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Coordinates equal to one, ascending and 1-indexed.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + b + 1)
            })
        })
    }

    /// Lowest coordinate equal to one.
    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Coordinatewise `self <= other`.
    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitVector) -> bool {
        self.check_len(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// `self AND NOT other`.
    pub fn difference(&self, other: &BitVector) -> BitVector {
        self.check_len(other);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        self.check_len(other);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    fn check_len(&self, other: &BitVector) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
    }

    fn trim(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    fn zip_with(&self, other: &BitVector, f: impl Fn(u64, u64) -> u64) -> BitVector {
        self.check_len(other);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        self.zip_with(rhs, |a, b| a ^ b)
    }
}

impl BitAnd for &BitVector {
    type Output = BitVector;
    fn bitand(self, rhs: &BitVector) -> BitVector {
        self.zip_with(rhs, |a, b| a & b)
    }
}

impl BitOr for &BitVector {
    type Output = BitVector;
    fn bitor(self, rhs: &BitVector) -> BitVector {
        self.zip_with(rhs, |a, b| a | b)
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        self.check_len(rhs);
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(Error::parse(1, format!("unexpected character {other:?}"))),
            }
        }
        Ok(BitVector::from_bools(&bits))
    }
}

/// An `m x n` Boolean matrix, stored as `m` packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            data: vec![BitVector::ones(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            data: (1..=n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix with `cols` columns from its rows. Ragged rows are rejected.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, data: rows })
    }

    /// Builds a matrix entrywise; `f` receives 1-indexed `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let data = (1..=rows)
            .map(|i| {
                let mut r = BitVector::zeros(cols);
                for j in 1..=cols {
                    if f(i, j) {
                        r.set(j, true);
                    }
                }
                r
            })
            .collect();
        Self { cols, data }
    }

    pub fn rows(&self) -> usize {
        self.data.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols
    }

    /// Row `i`, 1-indexed.
    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i - 1]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i - 1].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i - 1].set(j, value);
    }

    /// Total number of ones, `|A|`.
    pub fn weight(&self) -> usize {
        self.data.iter().map(BitVector::weight).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_fn(self.cols, self.rows(), |i, j| self.get(j, i))
    }

    /// Copy with the given (1-indexed) columns cleared.
    pub fn with_columns_zeroed(&self, cols: &[usize]) -> BitMatrix {
        let mask = BitVector::from_support(self.cols, cols.iter().copied());
        BitMatrix {
            cols: self.cols,
            data: self.data.iter().map(|r| r.difference(&mask)).collect(),
        }
    }

    /// `y = Ax` over GF(2).
    pub fn matvec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut y = BitVector::zeros(self.rows());
        for (i, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                y.set(i + 1, true);
            }
        }
        Ok(y)
    }

    /// Rank over GF(2). Works on a copy of the rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = self.data.iter().map(|r| r.words.clone()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, m) = (col / WORD_BITS, 1u64 << (col % WORD_BITS));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & m != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for r in tail.iter_mut() {
                if r[w] & m != 0 {
                    for (a, b) in r.iter_mut().zip(pivot_row) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Determinant over GF(2): `true` iff the matrix is nonsingular.
    pub fn det(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols,
            });
        }
        Ok(self.rank() == self.cols)
    }

    /// Parses the text format: a header line `m n`, then `m` lines of `n`
    /// characters from `{0,1}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let dims: Vec<&str> = header.split(' ').collect();
        let [m, n] = dims.as_slice() else {
            return Err(Error::parse(1, "header must be `m n`"));
        };
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("bad dimension {s:?}")))
        };
        let (m, n) = (parse_dim(m)?, parse_dim(n)?);
        let mut data = Vec::with_capacity(m);
        for i in 0..m {
            let line_no = i + 2;
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(line_no, format!("expected {m} rows, found {i}")))?;
            if line.len() != n {
                return Err(Error::parse(
                    line_no,
                    format!("row has {} entries, expected {n}", line.len()),
                ));
            }
            let row: BitVector = line.parse().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(line_no, msg),
                other => other,
            })?;
            data.push(row);
        }
        if let Some((k, extra)) = lines.enumerate().find(|(_, l)| !l.is_empty()) {
            return Err(Error::parse(
                m + 2 + k,
                format!("trailing content {extra:?}"),
            ));
        }
        Ok(BitMatrix { cols: n, data })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows(), self.cols)?;
        for r in &self.data {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix[")?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::parse(s)
    }
}
