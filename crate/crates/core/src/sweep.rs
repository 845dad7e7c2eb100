//! Seeded random model specifications for verification sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Domain, ModelSpec, Parity, RootSpec};
use crate::radical::Sign;
use crate::Rational;

/// Ranges used when drawing random specs.
#[derive(Clone, Debug)]
pub struct SweepRanges {
    /// Roots are drawn from `[-root_bound, root_bound]`.
    pub root_bound: i64,
    pub max_denominator: i64,
    pub param_bound: i64,
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges {
            root_bound: 5,
            max_denominator: 3,
            param_bound: 3,
        }
    }
}

pub(crate) fn rational_in(rng: &mut impl Rng, bound: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(-bound * d..=bound * d);
    Rational::new(n.into(), d.into())
}

pub(crate) fn nonzero_in(rng: &mut impl Rng, bound: i64, max_den: i64) -> Rational {
    loop {
        let r = rational_in(rng, bound, max_den);
        if r != Rational::from_integer(0.into()) {
            return r;
        }
    }
}

/// All multiplicity patterns (non-increasing) summing to `n`.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for m in (1..=rest.min(cap)).rev() {
            cur.push(m);
            go(rest - m, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Random `ModelSpec` with the given multiplicity pattern.
pub fn random_spec_with(
    rng: &mut impl Rng,
    parity: Parity,
    mults: &[u32],
    ranges: &SweepRanges,
) -> ModelSpec {
    let mut values: Vec<Rational> = Vec::new();
    while values.len() < mults.len() {
        let r = rational_in(rng, ranges.root_bound, ranges.max_denominator);
        if !values.contains(&r) {
            values.push(r);
        }
    }
    let mut sorted = values.clone();
    sorted.sort();
    let zero = Rational::from_integer(0.into());
    // split positions: roots below the split get ε = +1, the rest ε = −1
    let splits: Vec<usize> = (0..=sorted.len())
        .filter(|&s| s == sorted.len() || sorted[s] > zero)
        .collect();
    let split = *splits
        .choose(rng)
        .expect("the all-plus split is always admissible");
    let lo = if split == 0 {
        zero.clone()
    } else {
        sorted[split - 1].clone().max(zero.clone())
    };
    let hi = sorted.get(split).cloned();

    let roots = values
        .iter()
        .zip(mults)
        .map(|(v, &m)| {
            let sign = if split < sorted.len() && v >= &sorted[split] {
                Sign::Minus
            } else {
                Sign::Plus
            };
            let params = (0..m)
                .map(|_| nonzero_in(rng, ranges.param_bound, ranges.max_denominator))
                .collect();
            RootSpec {
                value: v.clone(),
                multiplicity: m,
                sign,
                params,
            }
        })
        .collect();
    let nu = match parity {
        Parity::Even => zero,
        Parity::Odd => nonzero_in(rng, ranges.param_bound, ranges.max_denominator),
    };
    ModelSpec::new(parity, roots, nu, Domain::new(lo, hi)).expect("generated spec is admissible")
}

/// Random `ModelSpec` of degree `n` with a random multiplicity pattern.
pub fn random_spec(rng: &mut impl Rng, parity: Parity, n: u32, ranges: &SweepRanges) -> ModelSpec {
    let pats = partitions(n);
    let mut mults = pats.choose(rng).unwrap().clone();
    mults.shuffle(rng);
    random_spec_with(rng, parity, &mults, ranges)
}

/// `cases` specs with `n` cycling through `1..=max_n`.
pub fn generate_specs(parity: Parity, cases: usize, seed: u64, max_n: u32) -> Vec<ModelSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = SweepRanges::default();
    (0..cases)
        .map(|i| random_spec(&mut rng, parity, (i as u32 % max_n) + 1, &ranges))
        .collect()
}

/// One `ModelSpec` per multiplicity pattern for each `n` in `1..=max_n`, repeated `per_pattern` times.
pub fn pattern_specs(parity: Parity, max_n: u32, per_pattern: usize, seed: u64) -> Vec<ModelSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = SweepRanges::default();
    let mut out = Vec::new();
    for n in 1..=max_n {
        for pat in partitions(n) {
            for _ in 0..per_pattern {
                out.push(random_spec_with(&mut rng, parity, &pat, &ranges));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_four() {
        assert_eq!(
            partitions(4),
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        let a = generate_specs(Parity::Odd, 20, 11, 5);
        let b = generate_specs(Parity::Odd, 20, 11, 5);
        assert_eq!(a, b);
        for s in &a {
            s.validate().unwrap();
            assert!(s.n() <= 5);
        }
    }
}
