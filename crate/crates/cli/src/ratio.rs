use std::fmt::Write as _;

use num_rational::Rational64;

use xorsynth::gen::gen_random;
use xorsynth::oracle::{self, RatioOutcome};
use xorsynth::{BitMatrix, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioRow {
    Done {
        seed_index: usize,
        min_general: usize,
        min_cf: usize,
        ratio: Rational64,
    },
    ExceedsBudget {
        seed_index: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    fn ratios(&self) -> impl Iterator<Item = Rational64> + '_ {
        self.rows.iter().filter_map(|r| match r {
            RatioRow::Done { ratio, .. } => Some(*ratio),
            RatioRow::ExceedsBudget { .. } => None,
        })
    }

    pub fn max_ratio(&self) -> Option<Rational64> {
        self.ratios().max()
    }

    pub fn mean_ratio(&self) -> Option<Rational64> {
        let (sum, count) = self
            .ratios()
            .fold((Rational64::from_integer(0), 0i64), |(s, c), r| (s + r, c + 1));
        (count > 0).then(|| sum / count)
    }

    /// Header `seed_index,min_general,min_cf,ratio,status`, one row per
    /// instance, then `max` and `mean` summary rows over completed instances.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed_index,min_general,min_cf,ratio,status\n");
        for row in &self.rows {
            match row {
                RatioRow::Done {
                    seed_index,
                    min_general,
                    min_cf,
                    ratio,
                } => writeln!(s, "{seed_index},{min_general},{min_cf},{ratio},ok"),
                RatioRow::ExceedsBudget { seed_index } => {
                    writeln!(s, "{seed_index},,,,exceeds_budget")
                }
            }
            .unwrap();
        }
        let fmt = |r: Option<Rational64>| r.map(|r| r.to_string()).unwrap_or_default();
        writeln!(s, "max,,,{},summary", fmt(self.max_ratio())).unwrap();
        writeln!(s, "mean,,,{},summary", fmt(self.mean_ratio())).unwrap();
        s
    }
}

/// Cancellation ratio of one matrix, as a table row.
pub fn ratio_row(a: &BitMatrix, seed_index: usize, budget: Option<usize>, threads: usize) -> Result<RatioRow> {
    let budget = match budget {
        Some(b) => b,
        None => oracle::default_budget(a)?,
    };
    Ok(match oracle::cancellation_ratio_with(a, budget, threads)? {
        RatioOutcome::Ratio {
            min_general,
            min_cf,
            ratio,
        } => RatioRow::Done {
            seed_index,
            min_general,
            min_cf,
            ratio,
        },
        RatioOutcome::ExceedsBudget => RatioRow::ExceedsBudget { seed_index },
    })
}

/// Minimum general and cancellation-free sizes for `count` random `n x n`
/// matrices; instance `i` is `gen_random(n, n, density, seed + i)`.
pub fn ratio_experiment(
    n: usize,
    count: usize,
    density: f64,
    seed: u64,
    budget: Option<usize>,
    threads: usize,
) -> Result<RatioTable> {
    let rows = (0..count)
        .map(|i| {
            let a = gen_random(n, n, density, seed.wrapping_add(i as u64));
            ratio_row(&a, i, budget, threads)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioTable { rows })
}
