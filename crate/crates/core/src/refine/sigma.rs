//! Parent-first coding of finite sequences of naturals.
//!
//! `code(⟨⟩) = 0` and `code(σ⌢⟨j⟩) = pair(code(σ), j) + 1`, with `pair` the
//! Cantor pairing function. Since `pair(a, b) ≥ a`, a sequence always gets a
//! larger code than any of its proper initial segments.

use num_integer::Roots;

/// Cantor pairing `(a+b)(a+b+1)/2 + b`, or `None` on overflow.
pub fn pair(a: u64, b: u64) -> Option<u64> {
    let w = a.checked_add(b)?;
    let tri = (w as u128 * (w as u128 + 1)) / 2;
    u64::try_from(tri + b as u128).ok()
}

pub fn unpair(z: u64) -> (u64, u64) {
    let w = ((8 * z as u128 + 1).sqrt() - 1) / 2;
    let tri = w * (w + 1) / 2;
    let b = z as u128 - tri;
    ((w - b) as u64, b as u64)
}

pub fn code(seq: &[u64]) -> Option<u64> {
    seq.iter()
        .try_fold(0u64, |acc, &j| pair(acc, j)?.checked_add(1))
}

/// `(r, j)` with `σ_s = σ_r⌢⟨j⟩`; `None` for `s = 0`.
pub fn parent(s: u64) -> Option<(u64, u64)> {
    (s > 0).then(|| unpair(s - 1))
}

pub fn sigma(s: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut cur = s;
    while let Some((r, j)) = parent(cur) {
        out.push(j);
        cur = r;
    }
    out.reverse();
    out
}
