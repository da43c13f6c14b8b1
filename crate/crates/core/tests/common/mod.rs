//! Helpers shared by the integration tests.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use sorted_fmf::sat::Lit;

pub struct Instance {
    pub nvars: u32,
    pub clauses: Vec<Vec<Lit>>,
    pub assumptions: Vec<Lit>,
}

pub fn random_instance(rng: &mut StdRng) -> Instance {
    let nvars = rng.gen_range(1..=20u32);
    let nclauses = (nvars as f64 * rng.gen_range(0.5..4.5)) as usize;
    let clauses = (0..nclauses)
        .map(|_| {
            let width = if rng.gen_bool(0.05) { 1 } else { rng.gen_range(2..=3usize) };
            let mut c: Vec<Lit> = Vec::new();
            while c.len() < width.min(nvars as usize) {
                let v = rng.gen_range(1..=nvars);
                if c.iter().all(|l| l.var() != v) {
                    c.push(Lit::new(v, rng.gen_bool(0.5)));
                }
            }
            c
        })
        .collect();
    let mut assumptions = Vec::new();
    for v in 1..=nvars {
        if rng.gen_bool(0.15) {
            assumptions.push(Lit::new(v, rng.gen_bool(0.5)));
        }
    }
    Instance { nvars, clauses, assumptions }
}

fn masks(c: &[Lit]) -> (u32, u32) {
    let mut pos = 0u32;
    let mut neg = 0u32;
    for l in c {
        let bit = 1u32 << (l.var() - 1);
        if l.is_positive() {
            pos |= bit;
        } else {
            neg |= bit;
        }
    }
    (pos, neg)
}

pub fn brute_force(nvars: u32, clauses: &[Vec<Lit>]) -> bool {
    let ms: Vec<(u32, u32)> = clauses.iter().map(|c| masks(c)).collect();
    (0u32..(1u32 << nvars)).any(|a| ms.iter().all(|&(p, n)| a & p != 0 || !a & n != 0))
}

pub fn with_units(clauses: &[Vec<Lit>], units: &[Lit]) -> Vec<Vec<Lit>> {
    clauses.iter().cloned().chain(units.iter().map(|&l| vec![l])).collect()
}
