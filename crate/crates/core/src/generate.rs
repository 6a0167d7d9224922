//! Random IA networks: the biology-like `B(n)` model and the density-driven
//! `S(n, p)` model with an embedded solution.
//!
//! Randomness comes from ChaCha8 seeded through `SeedableRng::seed_from_u64`
//! (rand_core's PCG32 seed expansion). Bounded integers are drawn by
//! rejection: a raw `u64` below `2^64 mod bound` is discarded, otherwise the
//! result is `x mod bound`. No other sampling primitive is used, so instances
//! are identical on every platform.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::algebra::{Basic, Label};
use crate::network::Network;

/// Portable seeded generator.
pub struct InstanceRng(ChaCha8Rng);

impl InstanceRng {
    pub fn new(seed: u64) -> InstanceRng {
        InstanceRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `0..bound`; `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let reject_under = bound.wrapping_neg() % bound;
        loop {
            let x = self.0.next_u64();
            if x >= reject_under {
                return x % bound;
            }
        }
    }

    /// `true` with probability `num / den`.
    pub fn chance(&mut self, p: Probability) -> bool {
        self.below(p.den) < p.num
    }
}

/// A probability written as a fraction, `num <= den`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Probability {
    pub num: u64,
    pub den: u64,
}

impl Probability {
    pub fn new(num: u64, den: u64) -> Result<Probability, GenerateError> {
        if den == 0 || num > den {
            return Err(GenerateError::BadProbability(format!("{num}/{den}")));
        }
        Ok(Probability { num, den })
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Probability {
    type Err = GenerateError;

    /// Accepts `NUM/DEN` or a bare `0`/`1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenerateError::BadProbability(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Probability::new(num, den)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("probability `{0}` is not a fraction in [0, 1]")]
    BadProbability(String),
    #[error("need at least 2 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("fractions must lie in [0, 1] and sum to at most 1")]
    BadFractions,
    #[error("{kind} target of {wanted} edges exceeds the {available} available (short by {})", wanted - available)]
    Deficit {
        kind: &'static str,
        wanted: usize,
        available: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Model {
    /// Keep about `intersects` of all pairs as intersects and `disjoint` as
    /// disjoint; every other edge is `I`.
    B { intersects: f64, disjoint: f64 },
    /// Each edge present with probability `p` and given a random nonempty
    /// label; `embed` unions in the relations of a random solution.
    S { p: Probability, embed: bool },
}

impl Model {
    pub fn b() -> Model {
        Model::B { intersects: 0.06, disjoint: 0.17 }
    }

    pub fn s(p: Probability) -> Model {
        Model::S { p, embed: true }
    }

    pub fn letter(&self) -> char {
        match self {
            Model::B { .. } => 'b',
            Model::S { .. } => 's',
        }
    }

    /// `(num, den)` of the edge probability; `B` reports `0/1`.
    pub fn p_fraction(&self) -> (u64, u64) {
        match self {
            Model::B { .. } => (0, 1),
            Model::S { p, .. } => (p.num, p.den),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub model: Model,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn b(n: usize, seed: u64) -> GeneratorConfig {
        GeneratorConfig { model: Model::b(), n, seed }
    }

    pub fn s(n: usize, p: Probability, seed: u64) -> GeneratorConfig {
        GeneratorConfig { model: Model::s(p), n, seed }
    }

    pub fn with_seed(self, seed: u64) -> GeneratorConfig {
        GeneratorConfig { seed, ..self }
    }
}

/// A generated network and the intervals used to build it.
#[derive(Clone, Debug)]
pub struct Generated {
    pub network: Network,
    pub witness: Vec<(i64, i64)>,
}

fn draw_intervals(rng: &mut InstanceRng, n: usize) -> Vec<(i64, i64)> {
    let range = 4 * n as u64 + 1;
    (0..n)
        .map(|_| loop {
            let a = rng.below(range) as i64;
            let b = rng.below(range) as i64;
            if a != b {
                break (a.min(b), a.max(b));
            }
        })
        .collect()
}

/// `n` intervals with integer endpoints drawn uniformly from `[0, 4n]`.
pub fn random_intervals(n: usize, seed: u64) -> Vec<(i64, i64)> {
    draw_intervals(&mut InstanceRng::new(seed), n)
}

pub fn relation_of(a: (i64, i64), b: (i64, i64)) -> Basic {
    Basic::between(&a.0, &a.1, &b.0, &b.1)
}

fn check(cfg: &GeneratorConfig) -> Result<(), GenerateError> {
    if cfg.n < 2 {
        return Err(GenerateError::TooFewIntervals(cfg.n));
    }
    Ok(())
}

fn pick(rng: &mut InstanceRng, pool: &mut [(usize, usize)], count: usize) {
    for t in 0..count {
        let k = t + rng.below((pool.len() - t) as u64) as usize;
        pool.swap(t, k);
    }
}

/// Generates a network according to `cfg.model`.
pub fn generate(cfg: &GeneratorConfig) -> Result<Generated, GenerateError> {
    match cfg.model {
        Model::B { intersects, disjoint } => gen_b(cfg.n, intersects, disjoint, cfg.seed),
        Model::S { p, embed } => gen_s(cfg.n, p, embed, cfg.seed),
    }
}

pub fn gen_b(n: usize, intersects: f64, disjoint: f64, seed: u64) -> Result<Generated, GenerateError> {
    check(&GeneratorConfig::b(n, seed))?;
    let ok = |f: f64| (0.0..=1.0).contains(&f);
    if !ok(intersects) || !ok(disjoint) || intersects + disjoint > 1.0 {
        return Err(GenerateError::BadFractions);
    }
    let mut rng = InstanceRng::new(seed);
    let witness = draw_intervals(&mut rng, n);
    let pairs = n * (n - 1) / 2;

    let mut meeting = Vec::new();
    let mut apart = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if Label::DISJOINT.contains(relation_of(witness[i], witness[j])) {
                apart.push((i, j));
            } else {
                meeting.push((i, j));
            }
        }
    }
    let want_meeting = (intersects * pairs as f64).round() as usize;
    let want_apart = (disjoint * pairs as f64).round() as usize;
    for (kind, wanted, available) in [
        ("intersects", want_meeting, meeting.len()),
        ("disjoint", want_apart, apart.len()),
    ] {
        if wanted > available {
            return Err(GenerateError::Deficit { kind, wanted, available });
        }
    }
    pick(&mut rng, &mut meeting, want_meeting);
    pick(&mut rng, &mut apart, want_apart);

    let mut network = Network::new(n);
    for &(i, j) in &meeting[..want_meeting] {
        network.set(i, j, Label::INTERSECTS);
    }
    for &(i, j) in &apart[..want_apart] {
        network.set(i, j, Label::DISJOINT);
    }
    Ok(Generated { network, witness })
}

pub fn gen_s(n: usize, p: Probability, embed: bool, seed: u64) -> Result<Generated, GenerateError> {
    check(&GeneratorConfig::s(n, p, seed))?;
    let mut rng = InstanceRng::new(seed);
    let mut network = Network::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.chance(p) {
                let bits = 1 + rng.below(Label::COUNT as u64 - 1) as u16;
                network.set(i, j, Label::from_bits_truncate(bits));
            }
        }
    }
    let witness = draw_intervals(&mut rng, n);
    if embed {
        for i in 0..n {
            for j in i + 1..n {
                let r = relation_of(witness[i], witness[j]);
                let l = network.get(i, j) | Label::singleton(r);
                network.set(i, j, l);
            }
        }
    }
    Ok(Generated { network, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interval() {
        let iv = random_intervals(1, 3);
        assert_eq!(iv.len(), 1);
        assert!(iv[0].0 < iv[0].1);
    }

    #[test]
    fn deterministic() {
        assert_eq!(random_intervals(50, 9), random_intervals(50, 9));
        let a = gen_s(20, Probability::new(1, 2).unwrap(), true, 4).unwrap().network;
        let b = gen_s(20, Probability::new(1, 2).unwrap(), true, 4).unwrap().network;
        assert_eq!(a, b);
        assert_ne!(a, gen_s(20, Probability::new(1, 2).unwrap(), true, 5).unwrap().network);
    }

    #[test]
    fn intervals_stay_in_range() {
        for (s, e) in random_intervals(200, 1) {
            assert!(0 <= s && s < e && e <= 800);
        }
    }

    #[test]
    fn below_is_in_range() {
        let mut rng = InstanceRng::new(0);
        for bound in [1, 2, 3, 7, 8191, u64::MAX] {
            for _ in 0..100 {
                assert!(rng.below(bound) < bound);
            }
        }
    }

    #[test]
    fn b_with_zero_fractions_is_all_full() {
        let g = gen_b(10, 0.0, 0.0, 1).unwrap();
        assert_eq!(g.network, Network::new(10));
    }

    #[test]
    fn s_with_zero_density_is_all_full() {
        let g = gen_s(10, Probability::new(0, 1).unwrap(), true, 1).unwrap();
        assert_eq!(g.network, Network::new(10));
    }

    #[test]
    fn deficit_is_reported() {
        let e = gen_b(10, 0.0, 1.0, 1).unwrap_err();
        assert!(matches!(e, GenerateError::Deficit { kind: "disjoint", .. }), "{e}");
        assert_eq!(gen_b(10, 0.7, 0.7, 1).unwrap_err(), GenerateError::BadFractions);
    }

    #[test]
    fn probability_text() {
        assert_eq!("1/4".parse::<Probability>().unwrap(), Probability { num: 1, den: 4 });
        assert_eq!("1".parse::<Probability>().unwrap(), Probability { num: 1, den: 1 });
        assert!("5/4".parse::<Probability>().is_err());
        assert!("1/0".parse::<Probability>().is_err());
        assert!("x".parse::<Probability>().is_err());
    }
}
