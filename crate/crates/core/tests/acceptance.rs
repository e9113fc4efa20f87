//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any failed.
//!
//! Set `XORSYNTH_STRETCH=1` to also run the minimum cancellation-free circuit
//! search for the 8x8 Sierpinski matrix (about a minute and a half on one core).

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Rational64;

use common::{random_circuit, TestRng};
use xorsynth::bounds::{kab_free, log2_circuit_count, mehlhorn_bound};
use xorsynth::cfcheck::{is_cf_disjoint_support, is_cf_monotone, is_cf_reachability};
use xorsynth::circuit::{LinearCircuit, NodeRef};
use xorsynth::gen::{gen_brown, gen_prefix, gen_random, gen_sierpinski, BrownParams};
use xorsynth::oracle::{min_circuit_size, min_circuit_size_with, Mode, OracleConfig};
use xorsynth::synth::{
    default_block_width, lupanov_bound, synth_lupanov, synth_naive, synth_prefix_cancel,
    synth_prefix_cf, synth_sierpinski,
};
use xorsynth::BitMatrix;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn all_three_cf(c: &LinearCircuit) -> [bool; 3] {
    [
        is_cf_disjoint_support(c).is_cf,
        is_cf_monotone(c).is_cf,
        is_cf_reachability(c).is_cf,
    ]
}

fn sierpinski_tightness() -> Outcome {
    for k in 1..=8u32 {
        let r = synth_sierpinski(k).map_err(|e| e.to_string())?;
        let expected = (k as usize) << k >> 1;
        ensure!(
            r.circuit.computes(&gen_sierpinski(k)).unwrap(),
            "k={k}: circuit does not compute S_k"
        );
        ensure!(all_three_cf(&r.circuit) == [true; 3], "k={k}: not cancellation-free");
        ensure!(r.gate_count == expected, "k={k}: {} gates, expected {expected}", r.gate_count);
    }
    Ok("k=1..8 sizes 1,4,12,32,80,192,448,1024".into())
}

fn oracle_sierpinski_n4() -> Outcome {
    let r = min_circuit_size(&gen_sierpinski(2), Mode::CancellationFree, 16).map_err(|e| e.to_string())?;
    ensure!(r.min_gates == Some(4), "min CF size of S_2 = {:?}, expected 4", r.min_gates);
    let w = r.circuit.unwrap();
    ensure!(w.computes(&gen_sierpinski(2)).unwrap(), "witness does not compute S_2");
    ensure!(all_three_cf(&w) == [true; 3], "witness is not cancellation-free");
    Ok(format!("min_cf(S_2)=4 nodes={}", r.nodes_expanded))
}

fn oracle_sierpinski_n8_stretch() -> Outcome {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = OracleConfig::new(Mode::CancellationFree, 12).threads(threads);
    let r = min_circuit_size_with(&gen_sierpinski(3), &config).map_err(|e| e.to_string())?;
    ensure!(r.min_gates == Some(12), "min CF size of S_3 = {:?}, expected 12", r.min_gates);
    ensure!(
        all_three_cf(r.circuit.as_ref().unwrap()) == [true; 3],
        "witness is not cancellation-free"
    );
    Ok(format!("min_cf(S_3)=12 nodes={}", r.nodes_expanded))
}

fn prefix_ratio() -> Outcome {
    let mut detail = Vec::new();
    for n in [3usize, 4] {
        let p = gen_prefix(n).map_err(|e| e.to_string())?;
        let general = min_circuit_size(&p, Mode::General, 2 * n).unwrap().min_gates;
        let cf = min_circuit_size(&p, Mode::CancellationFree, 2 * n).unwrap().min_gates;
        ensure!(general == Some(n), "n={n}: general minimum {general:?}, expected {n}");
        ensure!(cf == Some(2 * n - 3), "n={n}: CF minimum {cf:?}, expected {}", 2 * n - 3);
        let cancel = synth_prefix_cancel(n).unwrap();
        ensure!(cancel.gate_count == n, "n={n}: cancelling circuit has {} gates", cancel.gate_count);
        ensure!(
            all_three_cf(&cancel.circuit) == [false; 3],
            "n={n}: cancelling circuit not rejected by every checker"
        );
        let cf_circuit = synth_prefix_cf(n).unwrap();
        ensure!(
            all_three_cf(&cf_circuit.circuit) == [true; 3],
            "n={n}: CF construction rejected"
        );
        ensure!(cf_circuit.gate_count == 2 * n - 3, "n={n}: CF construction size");
        detail.push(format!("P_{n}: general={n} cf={}", 2 * n - 3));
    }
    Ok(detail.join(", "))
}

fn counting_bound() -> Outcome {
    let (n, m) = (64u64, 85u64);
    let v = log2_circuit_count(n, m).map_err(|e| e.to_string())?;
    ensure!(v < 4096.0 - 1e-9, "log2 count = {v}, not below 4096");
    // Exact integer check: (n+M)^{2M} (n+M+1)^n < 2^4096 * M!
    let lhs = BigUint::from(n + m).pow(2 * m as u32) * BigUint::from(n + m + 1).pow(n as u32);
    let fact = (1..=m).fold(BigUint::from(1u32), |acc, i| acc * i);
    let rhs = (BigUint::from(1u32) << 4096u32) * &fact;
    ensure!(lhs < rhs, "exact comparison disagrees");
    // Float value agrees with the exact rational's bit length to within one.
    let exact_bits = (lhs.bits() as f64) - (fact.bits() as f64);
    ensure!((v - exact_bits).abs() <= 1.0 + 1e-9, "float {v} vs exact ~{exact_bits}");
    Ok(format!("log2_circuit_count(64,85)={v:.6}"))
}

fn lupanov_properties() -> Outcome {
    let mut not_worse = 0;
    let b = default_block_width(32);
    for seed in 0..100u64 {
        let a = gen_random(32, 32, 0.5, seed);
        let r = synth_lupanov(&a, b).map_err(|e| e.to_string())?;
        ensure!(r.circuit.computes(&a).unwrap(), "seed {seed}: does not compute A");
        ensure!(all_three_cf(&r.circuit) == [true; 3], "seed {seed}: not CF");
        ensure!(
            r.gate_count as u128 <= lupanov_bound(&a, b),
            "seed {seed}: {} gates above bound {}",
            r.gate_count,
            lupanov_bound(&a, b)
        );
        if r.gate_count <= synth_naive(&a).unwrap().gate_count {
            not_worse += 1;
        }
    }
    ensure!(not_worse >= 95, "only {not_worse}/100 within naive size");
    Ok(format!("b={b}, {not_worse}/100 <= naive"))
}

fn checker_equivalence() -> Outcome {
    let mut rng = TestRng::new(0xACCE_0006);
    let mut non_cf = 0;
    for i in 0..10_000 {
        let c = random_circuit(&mut rng, 12, 40, 0.7);
        let v = all_three_cf(&c);
        ensure!(v[0] == v[1] && v[1] == v[2], "circuit {i} verdicts {v:?}:\n{c}");
        if !v[0] {
            non_cf += 1;
        }
    }
    Ok(format!("10000 circuits, {non_cf} not CF"))
}

fn mehlhorn_soundness() -> Outcome {
    let mut samples: Vec<BitMatrix> = (0..200u64).map(|s| gen_random(5, 5, 0.4, s)).collect();
    samples.push(BitMatrix::identity(5));
    let mut checked = 0;
    for (i, a) in samples.iter().enumerate() {
        if !kab_free(a, 2, 2).unwrap() {
            continue;
        }
        let bound = mehlhorn_bound(a, 1, 1).unwrap();
        ensure!(bound.applicable, "sample {i}: bound not applicable on a K22-free matrix");
        let r = min_circuit_size(a, Mode::CancellationFree, 25).unwrap();
        let Some(min_cf) = r.min_gates else {
            return Err(format!("sample {i}: oracle exceeded budget"));
        };
        let value = bound.exact().unwrap();
        ensure!(
            value <= Rational64::from_integer(min_cf as i64),
            "sample {i}: bound {value} > min_cf {min_cf}"
        );
        checked += 1;
    }
    ensure!(checked >= 20, "only {checked} K22-free samples");
    Ok(format!("{checked} K22-free matrices checked"))
}

fn brown_instance() -> Outcome {
    let b = gen_brown(BrownParams::new(3, 1).unwrap());
    ensure!(b.rows() == 27 && b.cols() == 27, "wrong dimensions");
    ensure!(b == b.transpose(), "not symmetric");
    let w = b.row(1).weight();
    ensure!(b.row_vectors().iter().all(|r| r.weight() == w), "not regular");
    ensure!((1..=27).all(|i| !b.get(i, i)), "nonzero diagonal");
    ensure!(kab_free(&b, 3, 3).unwrap(), "contains K_{{3,3}}");
    let r = mehlhorn_bound(&b, 2, 2).unwrap();
    ensure!(r.applicable, "bound not applicable");
    let v = r.exact().unwrap();
    ensure!(v > Rational64::from_integer(0), "bound {v} not positive");
    Ok(format!("degree {w}, mehlhorn(h=2,k=2)={v}"))
}

fn det_rank() -> Outcome {
    for k in 0..=6u32 {
        let s = gen_sierpinski(k);
        ensure!(s.det().unwrap(), "det(S_{k}) = 0");
        ensure!(s.rank() == 1 << k, "rank(S_{k}) = {}", s.rank());
    }
    Ok("k=0..6".into())
}

/// Zero-status of every node by repeated sweeps in the given gate order until
/// nothing changes. Independent of `LinearCircuit::eliminate`.
fn eliminated_fixed_point(c: &LinearCircuit, zeroed: &BTreeSet<usize>, order: &[usize]) -> BTreeSet<usize> {
    let n = c.num_inputs();
    let mut zero: Vec<bool> = (0..c.node_count()).map(|id| id < n && zeroed.contains(&(id + 1))).collect();
    loop {
        let mut changed = false;
        for &g in order {
            let gate = c.gate(g);
            let l = zero[c.node_id(gate.left).unwrap()];
            let r = zero[c.node_id(gate.right).unwrap()];
            if l && r && !zero[n + g] {
                zero[n + g] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..c.size())
        .filter(|&g| {
            let gate = c.gate(g);
            zero[c.node_id(gate.left).unwrap()] || zero[c.node_id(gate.right).unwrap()]
        })
        .collect()
}

fn gate_elimination() -> Outcome {
    let mut rng = TestRng::new(10);
    for k in 1..=5u32 {
        let n = 1usize << k;
        let half = n / 2;
        let c = synth_sierpinski(k).unwrap().circuit;
        let zeroed: BTreeSet<usize> = (1..=half).collect();
        let r = c.eliminate(&zeroed).map_err(|e| e.to_string())?;

        // Surviving gates read only the bottom inputs and compute S_{k-1} there.
        let bottom_inputs: Vec<usize> = (half + 1..=n).collect();
        let bottom_outputs: Vec<usize> = (half + 1..=n).collect();
        let sub = r
            .reduced
            .subcircuit(&bottom_inputs, &bottom_outputs)
            .map_err(|e| format!("k={k}: {e}"))?;
        ensure!(sub.computes(&gen_sierpinski(k - 1)).unwrap(), "k={k}: survivors do not compute S_{{k-1}}");
        let lower = (k as usize - 1) << (k - 1) >> 1;
        ensure!(
            r.reduced.size() >= lower,
            "k={k}: {} survivors below ½(n/2)log(n/2) = {lower}",
            r.reduced.size()
        );
        ensure!(
            r.reduced.outputs()[..half].iter().all(|&o| o == NodeRef::Zero),
            "k={k}: top outputs did not vanish"
        );

        // Gates outside the top half's cone that were eliminated: at least n/2 of them.
        let top_cone = c.cone(&(1..=half).collect::<Vec<_>>());
        let cut = r.eliminated.difference(&top_cone).count();
        ensure!(cut >= half, "k={k}: only {cut} eliminated gates outside the top cone");

        // The eliminated set is the fixed point under any sweep order.
        let mut order: Vec<usize> = (0..c.size()).collect();
        for attempt in 0..5 {
            if attempt == 1 {
                order.reverse();
            } else if attempt > 1 {
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.below(i + 1));
                }
            }
            let fp = eliminated_fixed_point(&c, &zeroed, &order);
            ensure!(fp == r.eliminated, "k={k}: fixed point differs under order {attempt}");
        }

        // And it is the same whether inputs are zeroed at once or in two steps.
        let first = c.eliminate(&(1..=half / 2).collect()).unwrap();
        let rest: BTreeSet<usize> = (half / 2 + 1..=half).collect();
        let second = first.reduced.eliminate(&rest).unwrap();
        let mut stepwise = first.eliminated.clone();
        stepwise.extend(second.eliminated.iter().map(|&g| first.gate_map[g]));
        ensure!(stepwise == r.eliminated, "k={k}: stepwise elimination differs");
    }
    Ok("k=1..5".into())
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: "1", name: "Sierpinski tightness", limit: Duration::from_secs(1), run: sierpinski_tightness },
        Criterion { id: "2", name: "oracle confirms Sierpinski bound at n=4", limit: Duration::from_secs(10), run: oracle_sierpinski_n4 },
        Criterion { id: "3", name: "prefix-matrix ratio", limit: Duration::from_secs(60), run: prefix_ratio },
        Criterion { id: "4", name: "counting bound at finite n", limit: Duration::from_secs(1), run: counting_bound },
        Criterion { id: "5", name: "Lupanov construction properties", limit: Duration::from_secs(30), run: lupanov_properties },
        Criterion { id: "6", name: "checker equivalence", limit: Duration::from_secs(60), run: checker_equivalence },
        Criterion { id: "7", name: "Mehlhorn soundness", limit: Duration::from_secs(300), run: mehlhorn_soundness },
        Criterion { id: "8", name: "Brown instance", limit: Duration::from_secs(60), run: brown_instance },
        Criterion { id: "9", name: "determinant and rank", limit: Duration::from_secs(1), run: det_rank },
        Criterion { id: "10", name: "gate-elimination semantics", limit: Duration::from_secs(5), run: gate_elimination },
    ];
    let stretch = Criterion {
        id: "2*",
        name: "stretch: oracle S_3 CF = 12",
        limit: Duration::from_secs(600),
        run: oracle_sierpinski_n8_stretch,
    };

    let mut failed = 0;
    for c in &criteria {
        if !report(c) {
            failed += 1;
        }
    }
    if std::env::var("XORSYNTH_STRETCH").is_ok_and(|v| v == "1") {
        // Optional; a miss is reported but does not fail the suite.
        report(&stretch);
    } else {
        println!("criterion {:>2}: SKIP  {} (set XORSYNTH_STRETCH=1)", stretch.id, stretch.name);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn report(c: &Criterion) -> bool {
    let start = Instant::now();
    let outcome = (c.run)();
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took {elapsed:?}, limit {:?}", c.limit)),
        other => other,
    };
    match &outcome {
        Ok(detail) => println!("criterion {:>2}: PASS  {} ({detail}; {elapsed:.2?})", c.id, c.name),
        Err(why) => println!("criterion {:>2}: FAIL  {}: {why}", c.id, c.name),
    }
    outcome.is_ok()
}
