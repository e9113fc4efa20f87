#![allow(dead_code)]

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use xorsynth::{BitVector, LinearCircuit, NodeRef};

pub struct TestRng(SplitMix64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        ((self.0.next_u64() >> 11) as f64) / ((1u64 << 53) as f64) < p
    }
}

/// A random circuit with `2 <= n <= max_inputs` and at most `max_gates` gates.
///
/// Each gate, with probability `cf_bias`, joins two nodes with disjoint value
/// vectors when such a pair exists; otherwise it joins an arbitrary pair.
pub fn random_circuit(rng: &mut TestRng, max_inputs: usize, max_gates: usize, cf_bias: f64) -> LinearCircuit {
    let n = rng.range(2, max_inputs);
    let gates = rng.range(1, max_gates);
    let mut c = LinearCircuit::new(n);
    let mut kappa: Vec<BitVector> = (1..=n).map(|i| BitVector::unit(n, i)).collect();
    let node = |id: usize| if id < n { NodeRef::Input(id) } else { NodeRef::Gate(id - n) };
    for _ in 0..gates {
        let count = kappa.len();
        let mut pick = None;
        if rng.chance(cf_bias) {
            for _ in 0..20 {
                let (a, b) = (rng.below(count), rng.below(count));
                if a != b && !kappa[a].intersects(&kappa[b]) {
                    pick = Some((a, b));
                    break;
                }
            }
        }
        let (a, b) = pick.unwrap_or_else(|| (rng.below(count), rng.below(count)));
        c.add_gate(node(a), node(b)).unwrap();
        let v = &kappa[a] ^ &kappa[b];
        kappa.push(v);
    }
    let outputs = rng.range(1, 4);
    for _ in 0..outputs {
        let id = rng.below(kappa.len());
        c.add_output(node(id)).unwrap();
    }
    c
}
