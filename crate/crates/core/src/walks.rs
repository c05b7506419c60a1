//! Minimal walks, the functions ρ and ρ̄, and checkers for their
//! ultrametric-style triangle properties.
//!
//! ```text
//! ρ(α, β) = max{ |C_β ∩ α|, ρ(α, min(C_β \ α)), ρ(ξ, α) : ξ ∈ C_β ∩ α }   (α < β)
//! ρ(α, α) = 0
//! ρ̄(α, β) = 2^ρ(α,β) · (2·|{ξ ≤ α : ρ(ξ, α) ≤ ρ(α, β)}| + 1)
//! ```
//!
//! The set `{ξ ≤ α : ρ(ξ, α) ≤ n}` (a [`Fiber`]) is finite. If `ξ < α` is a
//! member and `k = |C_α ∩ ξ|`, then `k ≤ ρ(ξ, α) ≤ n`, `ξ ≤ C_α[k]` and
//! `ρ(ξ, C_α[k]) ≤ n`, so `ξ` lies in the fiber of `C_α[k]`. Hence every
//! member is reachable from `α` by repeatedly moving to one of the first
//! `n + 1` elements of the current C-set. [`Walker::fiber`] enumerates that
//! reachable set and filters it by `ρ`.
//!
//! When `α ≤ min C_β` the walk's first step contributes nothing, and when
//! also `α < λ` for `min C_β = λ + m` the value is `ρ(α, λ)`. These steps
//! follow a chain `β, λ, λ', …` that does not depend on `α`; it is cached
//! per `β` and binary-searched.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use rustc_hash::{FxBuildHasher, FxHashSet};
use thiserror::Error;

use crate::cseq::{CSeqError, CSequence};
use crate::ordinal::{Kind, Ordinal};

/// Entries kept per memo table before it is flushed.
const MEMO_CAP: usize = 1 << 21;
/// Longest cached descent chain; longer descents continue from its end.
const CHAIN_CAP: usize = 1024;
const CHAIN_MEMO_CAP: usize = 1 << 14;

type FxDashMap<K, V> = DashMap<K, V, FxBuildHasher>;

/// One node of a descent chain: the limit `node`, `min C_node`, and the
/// limit part of the latter (zero at the end of the chain).
#[derive(Debug)]
struct Link {
    node: Ordinal,
    first: Option<Ordinal>,
    next: Ordinal,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("expected {alpha} <= {beta}")]
    NotLessEq { alpha: Ordinal, beta: Ordinal },
    #[error("expected {alpha} < {beta}")]
    NotLess { alpha: Ordinal, beta: Ordinal },
    #[error("expected {0} < {1} < {2}")]
    NotIncreasing(Ordinal, Ordinal, Ordinal),
    #[error("universe must be sorted and free of duplicates")]
    UnsortedUniverse,
    #[error("fiber of {0} is too large to count")]
    Overflow(Ordinal),
    #[error(transparent)]
    CSeq(#[from] CSeqError),
}

/// A value of ρ̄, stored as `(ρ, |fiber|)` and ordered by the number
/// `2^ρ · (2·|fiber| + 1)` it denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RhoBar {
    pub rho: u64,
    pub fiber_size: u64,
}

impl RhoBar {
    fn odd(&self) -> u128 {
        2 * self.fiber_size as u128 + 1
    }

    pub fn value(&self) -> BigUint {
        BigUint::from(self.odd()) << self.rho
    }

    pub fn to_u128(&self) -> Option<u128> {
        let odd = self.odd();
        if self.rho >= 128 || (odd.leading_zeros() as u64) < self.rho {
            None
        } else {
            Some(odd << self.rho)
        }
    }
}

impl Ord for RhoBar {
    fn cmp(&self, other: &Self) -> Ordering {
        fn shifted_cmp(small_exp: u128, shift: u64, other: u128) -> Ordering {
            let bits = |x: u128| 128 - x.leading_zeros() as u64;
            match (bits(small_exp) + shift).cmp(&bits(other)) {
                Ordering::Equal => (small_exp << shift).cmp(&other),
                ord => ord,
            }
        }
        match self.rho.cmp(&other.rho) {
            Ordering::Equal => self.odd().cmp(&other.odd()),
            Ordering::Greater => shifted_cmp(self.odd(), self.rho - other.rho, other.odd()),
            Ordering::Less => shifted_cmp(other.odd(), other.rho - self.rho, self.odd()).reverse(),
        }
    }
}

impl PartialOrd for RhoBar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RhoBar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The walk `β = β₀ > β₁ > … > β_k = α`, `β_{i+1} = min(C_{β_i} \ α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTrace {
    pub steps: Vec<Ordinal>,
}

/// `{ξ ≤ alpha : ρ(ξ, alpha) ≤ bound}`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub alpha: Ordinal,
    pub bound: u64,
    pub members: Vec<Ordinal>,
}

/// ρ̄ values of a triple `a < b < c` and the outcome of each property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub triple: [Ordinal; 3],
    pub ab: RhoBar,
    pub ac: RhoBar,
    pub bc: RhoBar,
    /// ρ̄(a,c) ≠ ρ̄(b,c)
    pub distinct: bool,
    /// ρ̄(a,c) ≤ max{ρ̄(a,b), ρ̄(b,c)}
    pub ac_bounded: bool,
    /// ρ̄(a,b) ≤ max{ρ̄(a,c), ρ̄(b,c)}
    pub ab_bounded: bool,
    /// ρ̄(a,c) > ρ̄(b,c) ⇒ ρ̄(a,b) = ρ̄(a,c)
    pub d1: bool,
    /// ρ̄(a,b) > ρ̄(b,c) ⇒ ρ̄(a,c) = ρ̄(a,b)
    pub d2: bool,
}

impl PropertyReport {
    pub fn evaluate(triple: [Ordinal; 3], ab: RhoBar, ac: RhoBar, bc: RhoBar) -> Self {
        PropertyReport {
            triple,
            ab,
            ac,
            bc,
            distinct: ac != bc,
            ac_bounded: ac <= ab.max(bc),
            ab_bounded: ab <= ac.max(bc),
            d1: ac <= bc || ab == ac,
            d2: ab <= bc || ac == ab,
        }
    }

    pub fn flags(&self) -> [bool; 5] {
        [
            self.distinct,
            self.ac_bounded,
            self.ab_bounded,
            self.d1,
            self.d2,
        ]
    }

    pub fn passed(&self) -> bool {
        self.flags().iter().all(|&b| b)
    }

    /// One line: `triple=a,b,c ab=.. ac=.. bc=.. p1=.. p2=.. p3=.. d1=.. d2=..`.
    pub fn to_record(&self) -> String {
        let [a, b, c] = &self.triple;
        format!(
            "triple={a},{b},{c} ab={} ac={} bc={} p1={} p2={} p3={} d1={} d2={}",
            self.ab,
            self.ac,
            self.bc,
            self.distinct,
            self.ac_bounded,
            self.ab_bounded,
            self.d1,
            self.d2
        )
    }
}

/// Result of checking every triple of a finite universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniverseSummary {
    pub size: usize,
    pub triples: u64,
    pub failures: u64,
    /// Failure counts for p1, p2, p3, d1, d2.
    pub property_failures: [u64; 5],
    /// Lexicographically first failing triple.
    pub first_failure: Option<PropertyReport>,
}

impl UniverseSummary {
    pub fn to_record(&self) -> String {
        format!("triples={} failures={}", self.triples, self.failures)
    }
}

/// Computes walks for a fixed C-sequence, memoizing ρ and fiber sizes.
///
/// Memo tables are only ever filled with values of the pure recursion, so
/// concurrent use is indistinguishable from uncached evaluation.
#[derive(Debug, Default)]
pub struct Walker {
    cseq: CSequence,
    rho_memo: FxDashMap<(Ordinal, Ordinal), u64>,
    fiber_sizes: FxDashMap<(Ordinal, u64), u64>,
    chains: FxDashMap<Ordinal, Arc<[Link]>>,
    above_first: FxDashMap<(Ordinal, u64), u64>,
}

fn memo_put<K: Eq + Hash, V>(map: &FxDashMap<K, V>, key: K, value: V) {
    memo_put_capped(map, key, value, MEMO_CAP)
}

fn memo_put_capped<K: Eq + Hash, V>(map: &FxDashMap<K, V>, key: K, value: V, cap: usize) {
    if map.len() >= cap {
        map.clear();
    }
    map.insert(key, value);
}

impl Walker {
    pub fn new(cseq: CSequence) -> Self {
        Walker {
            cseq,
            ..Default::default()
        }
    }

    pub fn canonical() -> Self {
        Self::new(CSequence::canonical())
    }

    pub fn cseq(&self) -> &CSequence {
        &self.cseq
    }

    pub fn rho(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<u64, WalkError> {
        if alpha > beta {
            return Err(WalkError::NotLessEq {
                alpha: alpha.clone(),
                beta: beta.clone(),
            });
        }
        self.rho_unchecked(alpha, beta)
    }

    /// The descent chain from the limit `beta`, at most [`CHAIN_CAP`] long.
    fn chain(&self, beta: &Ordinal) -> Arc<[Link]> {
        if let Some(c) = self.chains.get(beta) {
            return c.clone();
        }
        let mut links = Vec::new();
        let mut node = beta.clone();
        while links.len() < CHAIN_CAP {
            let first = self.cseq.element(&node, 0);
            let next = first
                .as_ref()
                .map_or_else(Ordinal::zero, |f| f.split_finite().0);
            let done = next.is_zero();
            links.push(Link {
                node,
                first,
                next: next.clone(),
            });
            if done {
                break;
            }
            node = next;
        }
        let links: Arc<[Link]> = links.into();
        memo_put_capped(&self.chains, beta.clone(), links.clone(), CHAIN_MEMO_CAP);
        links
    }

    fn rho_unchecked(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<u64, WalkError> {
        if alpha == beta {
            return Ok(0);
        }
        // successor steps contribute nothing: ρ(α, λ+m) = ρ(α, λ) for α < λ,
        // and 0 when λ ≤ α
        let (lam, _) = beta.split_finite();
        if *alpha >= lam {
            return Ok(0);
        }
        let chain = self.chain(&lam);
        let k = chain.partition_point(|l| *alpha < l.next);
        let Some(link) = chain.get(k) else {
            // ran off a capped chain
            return self.rho_unchecked(alpha, &chain[chain.len() - 1].next);
        };
        match &link.first {
            Some(first) if alpha <= first => return Ok(0),
            _ => {}
        }
        let key = (alpha.clone(), link.node.clone());
        if let Some(v) = self.rho_memo.get(&key) {
            return Ok(*v);
        }
        let trace = self.cseq.trace(&key.1, alpha)?;
        let mut value = trace.count.max(self.rho_unchecked(alpha, &trace.step)?);
        for xi in &trace.below {
            value = value.max(self.rho_unchecked(xi, alpha)?);
        }
        memo_put(&self.rho_memo, key, value);
        Ok(value)
    }

    pub fn walk_trace(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<WalkTrace, WalkError> {
        if alpha > beta {
            return Err(WalkError::NotLessEq {
                alpha: alpha.clone(),
                beta: beta.clone(),
            });
        }
        let mut steps = vec![beta.clone()];
        let mut current = beta.clone();
        while current != *alpha {
            current = self.cseq.trace(&current, alpha)?.step;
            steps.push(current.clone());
        }
        Ok(WalkTrace { steps })
    }

    /// Candidate set for the fiber: everything reachable from `alpha` through
    /// the first `bound + 1` elements of each C-set.
    fn fiber_candidates(&self, alpha: &Ordinal, bound: u64) -> FxHashSet<Ordinal> {
        let mut seen = FxHashSet::default();
        let mut stack = vec![alpha.clone()];
        while let Some(x) = stack.pop() {
            if seen.contains(&x) {
                continue;
            }
            match x.classify() {
                Kind::Zero => {}
                Kind::Successor(p) => stack.push(p),
                Kind::Limit => {
                    for k in 0..=bound {
                        match self.cseq.element(&x, k) {
                            Some(e) => stack.push(e),
                            None => break,
                        }
                    }
                }
            }
            seen.insert(x);
        }
        seen
    }

    pub fn fiber(&self, alpha: &Ordinal, bound: u64) -> Result<Fiber, WalkError> {
        let mut members = Vec::new();
        for xi in self.fiber_candidates(alpha, bound) {
            if self.rho_unchecked(&xi, alpha)? <= bound {
                members.push(xi);
            }
        }
        members.sort();
        Ok(Fiber {
            alpha: alpha.clone(),
            bound,
            members,
        })
    }

    pub fn fiber_size(&self, alpha: &Ordinal, bound: u64) -> Result<u64, WalkError> {
        // ρ(ξ, λ+b) is 0 on [λ, λ+b] and ρ(ξ, λ) below λ, so the fiber of
        // λ+b is the fiber of λ plus b points
        let (lam, fin) = alpha.split_finite();
        let fin = fin
            .to_u64()
            .ok_or_else(|| WalkError::Overflow(alpha.clone()))?;
        if lam.is_zero() {
            return Ok(fin + 1);
        }
        Ok(fin + self.limit_fiber_size(lam, bound)?)
    }

    /// `|fiber(β, n)|` for a limit `β`, with `C_β = {c_0 < c_1 < …}`:
    ///
    /// * members `ξ ≤ c_0` are exactly the fiber of `c_0`;
    /// * a member with `|C_β ∩ ξ| = i ≥ 1` lies in `(c_{i-1}, c_i]` and is
    ///   reachable from `c_i` without dropping to `c_{i-1}`;
    /// * nothing above `c_n` qualifies.
    ///
    /// The fiber of `c_0 = λ + m` is that of `λ` plus `m` points, so sizes
    /// are accumulated backwards along the descent chain.
    fn limit_fiber_size(&self, beta: Ordinal, bound: u64) -> Result<u64, WalkError> {
        let mut nodes: Vec<(Ordinal, Option<Ordinal>)> = Vec::new();
        let mut base = 0u64;
        let mut cur = beta;
        'descend: loop {
            let chain = self.chain(&cur);
            for link in chain.iter() {
                if let Some(v) = self.fiber_sizes.get(&(link.node.clone(), bound)) {
                    base = *v;
                    break 'descend;
                }
                nodes.push((link.node.clone(), link.first.clone()));
                if link.next.is_zero() {
                    break 'descend;
                }
            }
            cur = chain[chain.len() - 1].next.clone();
        }
        for (node, first) in nodes.into_iter().rev() {
            let up_to_first = match first {
                None => 0,
                Some(f) => {
                    let (lam, m) = f.split_finite();
                    let m = m.to_u64().ok_or_else(|| WalkError::Overflow(f.clone()))?;
                    m + if lam.is_zero() { 1 } else { base }
                }
            };
            let size = 1 + up_to_first + self.fiber_above_first(&node, bound)?;
            memo_put(&self.fiber_sizes, (node, bound), size);
            base = size;
        }
        Ok(base)
    }

    /// Members of `fiber(β, n)` above `min C_β`.
    ///
    /// Canonical walks commute with left translation: for `β = δ + ω^γ` every
    /// ordinal involved is `δ + x` with `x ≤ ω^γ`, and `ρ(δ+x, δ+y) =
    /// ρ(x, y)`. The count is therefore that of `ω^γ`.
    fn fiber_above_first(&self, beta: &Ordinal, bound: u64) -> Result<u64, WalkError> {
        if !self.cseq.is_canonical() {
            return self.count_above_first(beta, bound);
        }
        let last = beta.terms().last().expect("limit").exponent().clone();
        let key = (Ordinal::omega_pow(last, 1u32), bound);
        if let Some(v) = self.above_first.get(&key) {
            return Ok(*v);
        }
        let count = self.count_above_first(&key.0, bound)?;
        memo_put(&self.above_first, key, count);
        Ok(count)
    }

    fn count_above_first(&self, beta: &Ordinal, bound: u64) -> Result<u64, WalkError> {
        let mut count = 0;
        let Some(mut floor) = self.cseq.element(beta, 0) else {
            return Ok(0);
        };
        for i in 1..=bound {
            let Some(top) = self.cseq.element(beta, i) else {
                break;
            };
            for xi in self.reachable_above(&top, &floor, bound) {
                if self.rho_unchecked(&xi, beta)? <= bound {
                    count += 1;
                }
            }
            floor = top;
        }
        Ok(count)
    }

    /// Everything reachable from `top` through the first `bound + 1`
    /// elements of each C-set while staying above `floor`.
    fn reachable_above(&self, top: &Ordinal, floor: &Ordinal, bound: u64) -> FxHashSet<Ordinal> {
        let mut seen = FxHashSet::default();
        let mut stack = vec![top.clone()];
        while let Some(x) = stack.pop() {
            if x <= *floor || seen.contains(&x) {
                continue;
            }
            match x.classify() {
                Kind::Zero => {}
                Kind::Successor(p) => stack.push(p),
                Kind::Limit => {
                    for k in 0..=bound {
                        match self.cseq.element(&x, k) {
                            Some(e) => stack.push(e),
                            None => break,
                        }
                    }
                }
            }
            seen.insert(x);
        }
        seen
    }

    pub fn rhobar(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<RhoBar, WalkError> {
        if alpha >= beta {
            return Err(WalkError::NotLess {
                alpha: alpha.clone(),
                beta: beta.clone(),
            });
        }
        let rho = self.rho_unchecked(alpha, beta)?;
        let fiber_size = self.fiber_size(alpha, rho)?;
        if fiber_size >= 1 << 62 {
            return Err(WalkError::Overflow(alpha.clone()));
        }
        Ok(RhoBar { rho, fiber_size })
    }

    pub fn check_triple(
        &self,
        a: &Ordinal,
        b: &Ordinal,
        c: &Ordinal,
    ) -> Result<PropertyReport, WalkError> {
        if !(a < b && b < c) {
            return Err(WalkError::NotIncreasing(a.clone(), b.clone(), c.clone()));
        }
        Ok(PropertyReport::evaluate(
            [a.clone(), b.clone(), c.clone()],
            self.rhobar(a, b)?,
            self.rhobar(a, c)?,
            self.rhobar(b, c)?,
        ))
    }

    /// ρ̄ for every pair `i < j` of a sorted universe; row `i` holds
    /// the values for `j = i+1, …, n-1`.
    pub fn pair_table(&self, universe: &[Ordinal]) -> Result<Vec<Vec<RhoBar>>, WalkError> {
        if universe.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WalkError::UnsortedUniverse);
        }
        (0..universe.len())
            .into_par_iter()
            .map(|i| {
                universe[i + 1..]
                    .iter()
                    .map(|b| self.rhobar(&universe[i], b))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect()
    }

    /// Runs [`Walker::check_triple`] on every triple of the universe.
    pub fn check_universe(&self, universe: &[Ordinal]) -> Result<UniverseSummary, WalkError> {
        let table = self.pair_table(universe)?;
        let n = universe.len();
        let at = |i: usize, j: usize| table[i][j - i - 1];

        struct Partial {
            triples: u64,
            failures: u64,
            per: [u64; 5],
            first: Option<(usize, usize, usize)>,
        }

        let partials: Vec<Partial> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut p = Partial {
                    triples: 0,
                    failures: 0,
                    per: [0; 5],
                    first: None,
                };
                for j in i + 1..n {
                    for k in j + 1..n {
                        p.triples += 1;
                        let report = PropertyReport::evaluate(
                            [Ordinal::zero(), Ordinal::zero(), Ordinal::zero()],
                            at(i, j),
                            at(i, k),
                            at(j, k),
                        );
                        if !report.passed() {
                            p.failures += 1;
                            for (slot, ok) in p.per.iter_mut().zip(report.flags()) {
                                *slot += u64::from(!ok);
                            }
                            p.first.get_or_insert((i, j, k));
                        }
                    }
                }
                p
            })
            .collect();

        let mut summary = UniverseSummary {
            size: n,
            triples: 0,
            failures: 0,
            property_failures: [0; 5],
            first_failure: None,
        };
        for p in partials {
            summary.triples += p.triples;
            summary.failures += p.failures;
            for (acc, v) in summary.property_failures.iter_mut().zip(p.per) {
                *acc += v;
            }
            if summary.first_failure.is_none() {
                if let Some((i, j, k)) = p.first {
                    summary.first_failure = Some(PropertyReport::evaluate(
                        [
                            universe[i].clone(),
                            universe[j].clone(),
                            universe[k].clone(),
                        ],
                        at(i, j),
                        at(i, k),
                        at(j, k),
                    ));
                }
            }
        }
        Ok(summary)
    }

    /// Searches for `k < i₀ < … < i_{u+1}` with `ρ̄(k, i_v) = u` for all `v`
    /// and `ρ̄(i_v, i_{v+1}) < u`. Properties (1) and (3) rule such chains
    /// out, so a hit is a counterexample.
    pub fn pigeonhole_chain(
        &self,
        universe: &[Ordinal],
    ) -> Result<Option<Vec<Ordinal>>, WalkError> {
        let table = self.pair_table(universe)?;
        let n = universe.len();
        let at = |i: usize, j: usize| table[i][j - i - 1];
        for k in 0..n {
            let mut classes: Vec<(RhoBar, Vec<usize>)> = Vec::new();
            for i in k + 1..n {
                let u = at(k, i);
                match classes.iter_mut().find(|(v, _)| *v == u) {
                    Some((_, members)) => members.push(i),
                    None => classes.push((u, vec![i])),
                }
            }
            for (u, members) in classes {
                let need = match u.to_u128() {
                    Some(v) => v + 2,
                    None => continue,
                };
                if (members.len() as u128) < need {
                    continue;
                }
                // longest chain ending at each member
                let mut len = vec![1u128; members.len()];
                let mut prev = vec![usize::MAX; members.len()];
                for b in 0..members.len() {
                    for a in 0..b {
                        if at(members[a], members[b]) < u && len[a] + 1 > len[b] {
                            len[b] = len[a] + 1;
                            prev[b] = a;
                        }
                    }
                    if len[b] >= need {
                        let mut chain = vec![universe[members[b]].clone()];
                        let mut cur = b;
                        while prev[cur] != usize::MAX {
                            cur = prev[cur];
                            chain.push(universe[members[cur]].clone());
                        }
                        chain.push(universe[k].clone());
                        chain.reverse();
                        return Ok(Some(chain));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Parses `w<k>:<c>`: every ordinal `ω^k·a_k + … + ω·a_1 + a_0` with finite
/// exponents `0..=k` and coefficients `a_i ≤ c`, sorted ascending.
pub fn universe_from_spec(spec: &str) -> Option<Vec<Ordinal>> {
    let (k, c) = spec.strip_prefix('w')?.split_once(':')?;
    let k: u32 = k.parse().ok()?;
    let c: u64 = c.parse().ok()?;
    let mut out = vec![Ordinal::zero()];
    for e in (0..=k).rev() {
        let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
        for base in &out {
            for coeff in 0..=c {
                next.push(base.add_term(&Ordinal::from_u64(e as u64), &BigUint::from(coeff)));
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    Some(out)
}
