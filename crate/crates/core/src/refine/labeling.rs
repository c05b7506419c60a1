//! Strictly increasing labelings `n ↦ α_n` of the indices of a space by
//! countable ordinals, and the induced colouring `r(k, l) = ρ̄(α_k, α_l)`.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sigma::unpair;
use super::RefineError;
use crate::ordinal::Ordinal;
use crate::walks::{RhoBar, WalkError, Walker};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labeling {
    /// `α_n = n`.
    Identity,
    /// `α_n = ω·a + b` where `n = a(a+1)/2 + b`, `0 ≤ b ≤ a`: the Cantor
    /// diagonals laid end to end, cofinal in `ω²`.
    Omega2Diagonal,
    /// Finitely many labels, from a file or a seeded generator.
    Explicit(Vec<Ordinal>),
}

impl Labeling {
    /// Builds a labeling from its name: `identity`, `omega2-diagonal`, or
    /// `seeded-sample:<k>` (needs `count`, the number of labels to draw).
    pub fn from_name(name: &str, seed: u64, count: usize) -> Result<Self, RefineError> {
        match name {
            "identity" => Ok(Labeling::Identity),
            "omega2-diagonal" => Ok(Labeling::Omega2Diagonal),
            _ => {
                let k = name
                    .strip_prefix("seeded-sample:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| RefineError::UnknownLabeling(name.to_string()))?;
                Ok(Self::seeded_sample(k, seed, count))
            }
        }
    }

    /// A pseudo-random increasing sequence below `ω^k`: each label adds
    /// `ω^e·c` to the previous one, with `c ∈ {1, 2, 3}` and `e < k`
    /// geometrically distributed (each further level with probability 1/8).
    pub fn seeded_sample(k: u32, seed: u64, count: usize) -> Self {
        assert!(k >= 1, "need k >= 1 for an infinite increasing sequence");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels = Vec::with_capacity(count);
        let mut current = Ordinal::from_u64(rng.gen_range(0..3));
        for _ in 0..count {
            labels.push(current.clone());
            let mut e = 0u32;
            while e + 1 < k && rng.gen_bool(0.125) {
                e += 1;
            }
            let c = BigUint::from(rng.gen_range(1u32..=3));
            current = current.add_term(&Ordinal::from_u64(e as u64), &c);
        }
        Labeling::Explicit(labels)
    }

    /// Parses lines `n CNF`; indices must cover `0..count` exactly once.
    pub fn parse_file(text: &str) -> Result<Self, RefineError> {
        let mut by_index: HashMap<usize, Ordinal> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let bad = |message: String| RefineError::LabelFile {
                line: i + 1,
                message,
            };
            let (n, cnf) = body
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad("expected `n CNF`".into()))?;
            let n: usize = n.parse().map_err(|_| bad(format!("bad index {n}")))?;
            let label: Ordinal = cnf.parse().map_err(|e| bad(format!("{e}")))?;
            if by_index.insert(n, label).is_some() {
                return Err(bad(format!("duplicate index {n}")));
            }
        }
        let labels = (0..by_index.len())
            .map(|n| {
                by_index.remove(&n).ok_or(RefineError::LabelFile {
                    line: 0,
                    message: format!("index {n} missing"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Labeling::Explicit(labels))
    }

    pub fn label(&self, n: usize) -> Option<Ordinal> {
        match self {
            Labeling::Identity => Some(Ordinal::from_u64(n as u64)),
            Labeling::Omega2Diagonal => {
                let (x, y) = unpair(n as u64);
                let omega_part = Ordinal::omega_pow(Ordinal::one(), x + y);
                Some(omega_part.plus_finite(&BigUint::from(y)))
            }
            Labeling::Explicit(v) => v.get(n).cloned(),
        }
    }

    /// Labels for `0..window`, checked to be strictly increasing.
    pub fn materialize(&self, window: usize) -> Result<Vec<Ordinal>, RefineError> {
        let mut out: Vec<Ordinal> = Vec::with_capacity(window);
        for n in 0..window {
            let label = self
                .label(n)
                .ok_or(RefineError::LabelingTooShort { needed: window })?;
            if let Some(prev) = out.last() {
                if *prev >= label {
                    return Err(RefineError::InvalidLabeling { index: n });
                }
            }
            out.push(label);
        }
        Ok(out)
    }
}

/// `r(k, l) = ρ̄(α_k, α_l)` for `k < l`, cached by index pair.
pub struct RColouring {
    walker: Walker,
    labels: Vec<Ordinal>,
    cache: HashMap<(u32, u32), RhoBar>,
}

const CACHE_CAP: usize = 1 << 22;

impl RColouring {
    pub fn new(walker: Walker, labels: Vec<Ordinal>) -> Self {
        RColouring {
            walker,
            labels,
            cache: HashMap::new(),
        }
    }

    pub fn labels(&self) -> &[Ordinal] {
        &self.labels
    }

    pub fn r(&mut self, k: usize, l: usize) -> Result<RhoBar, WalkError> {
        debug_assert!(k < l);
        let key = (k as u32, l as u32);
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = self.walker.rhobar(&self.labels[k], &self.labels[l])?;
        if self.cache.len() >= CACHE_CAP {
            self.cache.clear();
        }
        self.cache.insert(key, v);
        Ok(v)
    }
}
