//! Depth-first construction of `k_0 < k_1 < …` following the σ-tree
//! schedule.
//!
//! At step `t > 0`, with `σ_t = σ_r⌢⟨j⟩`, a candidate `m` must satisfy
//!
//! * `m > k_{t-1}` and `m` lies in the domain `D` (the crowded kernel of the
//!   window);
//! * `m ∈ A_{k_r, j}`;
//! * `r(k_0, m) < r(k_1, m) < … < r(k_{t-1}, m)`, which is membership in
//!   every `E_{p,q}` together with the new instances of the strong property.
//!
//! Candidates are tried in batches of `beam` in index order; inside a batch
//! they are ranked by a largeness score (how much of the window ahead can
//! still extend the prefix near the candidate), ties by index. Candidates
//! scoring zero are held back until the rest of the window is used up. When
//! a level runs dry the search backtracks.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::labeling::RColouring;
use super::sigma::{pair, parent};
use super::RefineError;
use crate::qspace::{kernel, PointEnumeration};
use crate::walks::WalkError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineParams {
    /// Index `S` of the last element; the prefix has `S + 1` entries.
    pub target: usize,
    /// Only indices `< window` are used.
    pub window: usize,
    /// Crowding depth `J` for the domain and the largeness score.
    pub depth: u64,
    /// Ball depths `w ≤ lookahead` considered by the score.
    pub lookahead: u64,
    /// Maximum number of search nodes.
    pub budget: u64,
    /// Candidates scored together before any is tried.
    pub beam: usize,
    /// How far past a candidate the score looks.
    pub span: usize,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            target: 32,
            window: 10_000,
            depth: 2,
            lookahead: 2,
            budget: 1_000_000,
            beam: 8,
            span: 256,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub visited: u64,
    pub backtracks: u64,
    pub scanned: u64,
    pub scored: u64,
}

/// The prefix built so far plus the fixed domain it draws from.
#[derive(Clone, Debug)]
pub struct RefinementState {
    chosen: Vec<usize>,
    /// Membership in the domain `D`, indexed by position in the window.
    domain: Vec<bool>,
    /// `chain[l - 2][m]`: whether `r(k_0, m) < … < r(k_{l-1}, m)`, as
    /// 0 (unknown), 1 (yes) or 2 (no). Rows above the prefix length are
    /// all zero.
    chain: Vec<Vec<u8>>,
}

const UNKNOWN: u8 = 0;
const ALIVE: u8 = 1;
const DEAD: u8 = 2;

impl RefinementState {
    /// Empty prefix over the kernel of the window at the given depth.
    pub fn new(space: &PointEnumeration, window: usize, depth: u64) -> Self {
        let all: Vec<usize> = (0..window).collect();
        let mut domain = vec![false; window];
        for i in kernel(space, &all, depth) {
            domain[i] = true;
        }
        RefinementState {
            chosen: Vec::new(),
            domain,
            chain: Vec::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.domain.len()
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn in_domain(&self, m: usize) -> bool {
        self.domain.get(m).copied().unwrap_or(false)
    }

    /// Appends `m` without checking it.
    pub fn push(&mut self, m: usize) {
        self.chosen.push(m);
        let len = self.chosen.len();
        if len >= 2 && self.chain.len() < len - 1 {
            self.chain.push(vec![UNKNOWN; self.window()]);
        }
    }

    pub fn truncate(&mut self, len: usize) {
        for l in len.max(1) + 1..=self.chosen.len() {
            self.chain[l - 2].fill(UNKNOWN);
        }
        self.chosen.truncate(len);
    }

    /// Ball constraint `(k_r, j)` for the next position, if any.
    fn ball_constraint(&self) -> Option<(usize, u64)> {
        parent(self.chosen.len() as u64).map(|(r, j)| (self.chosen[r as usize], j))
    }

    /// `r(k_0, m) < r(k_1, m) < … < r(k_last, m)`.
    pub fn chain_increasing(&mut self, m: usize, r: &mut RColouring) -> Result<bool, WalkError> {
        let len = self.chosen.len();
        let mut known = len;
        while known >= 2 {
            match self.chain[known - 2][m] {
                UNKNOWN => known -= 1,
                ALIVE => break,
                _ => return Ok(false),
            }
        }
        for l in known.max(1) + 1..=len {
            let ok = r.r(self.chosen[l - 2], m)? < r.r(self.chosen[l - 1], m)?;
            self.chain[l - 2][m] = if ok { ALIVE } else { DEAD };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `m` may be appended.
    pub fn qualifies(
        &mut self,
        m: usize,
        space: &PointEnumeration,
        r: &mut RColouring,
    ) -> Result<bool, WalkError> {
        if !self.in_domain(m) {
            return Ok(false);
        }
        if matches!(self.chosen.last(), Some(&last) if m <= last) {
            return Ok(false);
        }
        if let Some((centre, j)) = self.ball_constraint() {
            if !space.in_ball(m, centre, j) {
                return Ok(false);
            }
        }
        self.chain_increasing(m, r)
    }
}

/// Largeness of the prefix extended by `m`: the smallest, over `w ≤
/// lookahead`, of the crowded kernel of the indices in the next `span`
/// positions that lie in `A_{m,w}` and could follow `m` in the chain.
pub fn score(
    state: &mut RefinementState,
    m: usize,
    space: &PointEnumeration,
    r: &mut RColouring,
    params: &RefineParams,
) -> Result<usize, WalkError> {
    let end = state
        .window()
        .min(m.saturating_add(1).saturating_add(params.span));
    let last = state.chosen.last().copied();
    let mut ahead = Vec::new();
    for m2 in m + 1..end {
        if !state.in_domain(m2) || !space.in_ball(m2, m, 0) {
            continue;
        }
        if !state.chain_increasing(m2, r)? {
            continue;
        }
        if let Some(k) = last {
            if r.r(k, m2)? >= r.r(m, m2)? {
                continue;
            }
        }
        ahead.push(m2);
    }
    let mut best = usize::MAX;
    for w in 0..=params.lookahead {
        ahead.retain(|&m2| space.in_ball(m2, m, w));
        best = best.min(kernel(space, &ahead, params.depth).len());
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// Every candidate for the next position, ordered by score (descending),
/// then index.
pub fn candidates(
    state: &mut RefinementState,
    space: &PointEnumeration,
    r: &mut RColouring,
    params: &RefineParams,
) -> Result<Vec<usize>, WalkError> {
    let start = state.chosen.last().map_or(0, |&k| k + 1);
    let mut out = Vec::new();
    for m in start..state.window() {
        if state.qualifies(m, space, r)? {
            out.push(m);
        }
    }
    Ok(rank(state, out, space, r, params)?
        .into_iter()
        .map(|(_, m)| m)
        .collect())
}

fn rank(
    state: &mut RefinementState,
    batch: Vec<usize>,
    space: &PointEnumeration,
    r: &mut RColouring,
    params: &RefineParams,
) -> Result<Vec<(usize, usize)>, WalkError> {
    if state.chosen.is_empty() {
        return Ok(batch.into_iter().map(|m| (1, m)).collect());
    }
    let mut scored = Vec::with_capacity(batch.len());
    for m in batch {
        scored.push((score(state, m, space, r, params)?, m));
    }
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored)
}

struct Frontier {
    queue: VecDeque<usize>,
    /// Zero-score candidates, in index order.
    deferred: VecDeque<usize>,
    scan: usize,
}

impl Frontier {
    fn new(state: &RefinementState) -> Self {
        Frontier {
            queue: VecDeque::new(),
            deferred: VecDeque::new(),
            scan: state.chosen.last().map_or(0, |&k| k + 1),
        }
    }

    fn next(
        &mut self,
        state: &mut RefinementState,
        space: &PointEnumeration,
        r: &mut RColouring,
        params: &RefineParams,
        stats: &mut SearchStats,
    ) -> Result<Option<usize>, WalkError> {
        loop {
            if let Some(m) = self.queue.pop_front() {
                return Ok(Some(m));
            }
            let mut batch = Vec::new();
            while self.scan < state.window() && batch.len() < params.beam.max(1) {
                let m = self.scan;
                self.scan += 1;
                stats.scanned += 1;
                if state.qualifies(m, space, r)? {
                    batch.push(m);
                }
            }
            if batch.is_empty() {
                return Ok(self.deferred.pop_front());
            }
            if !state.chosen.is_empty() {
                stats.scored += batch.len() as u64;
            }
            for (score, m) in rank(state, batch, space, r, params)? {
                if score == 0 {
                    self.deferred.push_back(m);
                } else {
                    self.queue.push_back(m);
                }
            }
        }
    }
}

/// Successful search output: the prefix and the σ-tree coverage it realizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub chosen: Vec<usize>,
    /// `(parent position, j, child position)` for every child code in range.
    pub coverage: Vec<(usize, u64, usize)>,
    pub stats: SearchStats,
}

pub fn search(
    space: &PointEnumeration,
    r: &mut RColouring,
    params: &RefineParams,
) -> Result<SearchOutcome, RefineError> {
    let mut state = RefinementState::new(space, params.window, params.depth);
    let mut stats = SearchStats::default();
    let mut frontiers = vec![Frontier::new(&state)];
    let mut deepest: Vec<usize> = Vec::new();

    while !frontiers.is_empty() {
        // the top frontier chooses position `frontiers.len() - 1`
        state.truncate(frontiers.len() - 1);
        let frontier = frontiers.last_mut().expect("non-empty");
        let next = frontier.next(&mut state, space, r, params, &mut stats)?;
        let Some(m) = next else {
            frontiers.pop();
            stats.backtracks += 1;
            continue;
        };
        stats.visited += 1;
        if stats.visited > params.budget {
            return Err(RefineError::SearchExhausted {
                deepest,
                visited: stats.visited - 1,
                budget_hit: true,
            });
        }
        state.push(m);
        if state.chosen.len() > deepest.len() {
            deepest = state.chosen.clone();
        }
        if state.chosen.len() == params.target + 1 {
            let coverage = coverage(state.chosen.len());
            return Ok(SearchOutcome {
                chosen: state.chosen,
                coverage,
                stats,
            });
        }
        frontiers.push(Frontier::new(&state));
    }
    Err(RefineError::SearchExhausted {
        deepest,
        visited: stats.visited,
        budget_hit: false,
    })
}

fn coverage(len: usize) -> Vec<(usize, u64, usize)> {
    let mut out = Vec::new();
    for p in 0..len {
        for j in 0.. {
            match pair(p as u64, j).and_then(|c| c.checked_add(1)) {
                Some(c) if (c as usize) < len => out.push((p, j, c as usize)),
                _ => break,
            }
        }
    }
    out.sort_by_key(|&(_, _, c)| c);
    out
}
