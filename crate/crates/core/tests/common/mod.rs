//! Reference implementations for the integration tests. Nothing here calls
//! into the library's arithmetic: ordinals below ω^ω are plain coefficient
//! vectors, rationals are `i128` pairs, and every recursion is unmemoized.

#![allow(dead_code)]

use std::cmp::Ordering;

use rand::Rng;
use rhowalk::Ordinal;

/// `ω^(k-1)·c[k-1] + … + ω·c[1] + c[0]`, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Small(pub Vec<u64>);

impl Small {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Small(c)
    }

    pub fn nat(n: u64) -> Self {
        Small::new(vec![n])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.0[0] == 0
    }

    pub fn pred(&self) -> Small {
        assert!(!self.is_zero() && self.0[0] > 0);
        let mut c = self.0.clone();
        c[0] -= 1;
        Small::new(c)
    }

    /// `self[n]` for a limit: lower the last nonzero `ω^e` (e ≥ 1) by one
    /// and add `ω^(e-1)·(n+1)`.
    pub fn fund(&self, n: u64) -> Small {
        assert!(self.is_limit());
        let e = self.0.iter().position(|&x| x > 0).unwrap();
        let mut c = self.0.clone();
        c[e] -= 1;
        c[e - 1] = n + 1;
        Small::new(c)
    }

    pub fn max_coeff(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn to_ordinal(&self) -> Ordinal {
        self.render().parse().unwrap()
    }

    /// Reads back [`Small::render`] output.
    pub fn parse(s: &str) -> Small {
        let mut c = vec![0u64; 8];
        if s == "0" {
            return Small::new(c);
        }
        for part in s.split('+') {
            let (base, k) = match part.split_once('*') {
                Some((b, k)) => (b, k.parse().unwrap()),
                None if part.starts_with('w') => (part, 1),
                None => ("", part.parse().unwrap()),
            };
            let e = match base {
                "" => 0,
                "w" => 1,
                b => b.strip_prefix("w^").unwrap().parse().unwrap(),
            };
            c[e] += k;
        }
        Small::new(c)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (e, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let base = match e {
                0 => None,
                1 => Some("w".to_string()),
                _ => Some(format!("w^{e}")),
            };
            parts.push(match (base, c) {
                (None, c) => c.to_string(),
                (Some(b), 1) => b,
                (Some(b), c) => format!("{b}*{c}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

impl Ord for Small {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Small {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// ρ over the canonical C-sequence: the largest of `|C_β ∩ α|`,
/// `ρ(α, min(C_β \ α))` and `ρ(ξ, α)` for `ξ ∈ C_β ∩ α`.
pub fn rho(alpha: &Small, beta: &Small) -> u64 {
    rho_with(alpha, beta, &|b: &Small, n| b.fund(n))
}

/// As [`rho`], with `elem(β, i)` the `i`-th element of `C_β` for limits.
pub fn rho_with(alpha: &Small, beta: &Small, elem: &dyn Fn(&Small, u64) -> Small) -> u64 {
    assert!(alpha <= beta);
    if alpha == beta {
        return 0;
    }
    if !beta.is_limit() {
        // C_{γ+1} = {γ} and γ ≥ α, so nothing of C_β lies below α
        return rho_with(alpha, &beta.pred(), elem);
    }
    let mut n = 0;
    let mut inner = 0;
    loop {
        let step = elem(beta, n);
        if step >= *alpha {
            return n.max(rho_with(alpha, &step, elem)).max(inner);
        }
        inner = inner.max(rho_with(&step, alpha, elem));
        n += 1;
    }
}

/// Walk steps from β down to α.
pub fn walk(alpha: &Small, beta: &Small) -> Vec<Small> {
    let mut out = vec![beta.clone()];
    let mut cur = beta.clone();
    while cur != *alpha {
        cur = if cur.is_limit() {
            (0..).map(|n| cur.fund(n)).find(|s| s >= alpha).unwrap()
        } else {
            cur.pred()
        };
        out.push(cur.clone());
    }
    out
}

/// Every ordinal `≤ alpha` with no more terms than `alpha` and every
/// coefficient `≤ bound`, ascending.
pub fn box_below(alpha: &Small, bound: u64) -> Vec<Small> {
    let len = alpha.0.len().max(1);
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u64>| {
                (0..=bound).map(move |c| {
                    let mut v = v.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    let mut out: Vec<Small> = out
        .into_iter()
        .map(Small::new)
        .filter(|x| x <= alpha)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `{ξ ≤ α : ρ(ξ, α) ≤ n}` by filtering a box that is large enough: a
/// coefficient of ξ more than `n + 1` above the matching one of α forces
/// ρ past `n`.
pub fn fiber(alpha: &Small, n: u64) -> Vec<Small> {
    box_below(alpha, alpha.max_coeff() + n + 2)
        .into_iter()
        .filter(|x| rho(x, alpha) <= n)
        .collect()
}

pub fn rhobar(alpha: &Small, beta: &Small) -> u128 {
    let e = rho(alpha, beta);
    let count = fiber(alpha, e).len() as u128;
    (1u128 << e) * (2 * count + 1)
}

/// A uniformly drawn ordinal `≤ alpha` with coefficients `≤ bound`.
pub fn sample_below(alpha: &Small, bound: u64, rng: &mut impl Rng) -> Small {
    loop {
        let len = alpha.0.len().max(1);
        let x = Small::new((0..len).map(|_| rng.gen_range(0..=bound)).collect());
        if x <= *alpha {
            return x;
        }
    }
}

/// `(numerator, denominator)` with a positive denominator.
pub type Frac = (i128, i128);

pub fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The canonical enumeration of `[0,1]`, by denominator then numerator.
pub fn canonical_points(count: usize) -> Vec<Frac> {
    let mut out = vec![(0, 1), (1, 1)];
    let mut q = 2;
    while out.len() < count {
        for p in 1..q {
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
        q += 1;
    }
    out.truncate(count);
    out
}

/// `|x − y| < 1/(j+1)`.
pub fn close(x: Frac, y: Frac, j: u64) -> bool {
    let diff = (x.0 * y.1 - y.0 * x.1).abs();
    // an overflowing left side is far above any denominator product here
    match diff.checked_mul(j as i128 + 1) {
        Some(lhs) => lhs < x.1 * y.1,
        None => false,
    }
}

/// Crowding at depth `depth`, checked for every `j` separately.
pub fn crowded(points: &[Frac], set: &[usize], depth: u64) -> bool {
    !set.is_empty()
        && set.iter().all(|&i| {
            (0..=depth).all(|j| {
                set.iter()
                    .any(|&n| n != i && close(points[n], points[i], j))
            })
        })
}

/// Greatest crowded subset: drop unsupported points until none are left.
pub fn kernel(points: &[Frac], set: &[usize], depth: u64) -> Vec<usize> {
    let mut cur: Vec<usize> = set.to_vec();
    cur.sort_unstable();
    cur.dedup();
    loop {
        let keep: Vec<usize> = cur
            .iter()
            .copied()
            .filter(|&i| {
                cur.iter()
                    .any(|&n| n != i && close(points[n], points[i], depth))
            })
            .collect();
        if keep.len() == cur.len() {
            return keep;
        }
        cur = keep;
    }
}
