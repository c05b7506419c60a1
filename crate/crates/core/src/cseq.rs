//! C-sequences: for every countable ordinal β a set `C_β ⊆ β`, with
//! `C_{α+1} = {α}` and, at limits, an ω-type sequence cofinal in β.
//!
//! The canonical scheme uses [`Ordinal::fund_seq`]. Individual limits may be
//! overridden by an explicit finite prefix, optionally continued by the
//! canonical elements lying above the prefix.

use std::collections::HashMap;

use thiserror::Error;

use crate::ordinal::{Kind, Ordinal, ParseError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CSeqError {
    #[error("expected {alpha} < {beta}")]
    NotBelow { alpha: Ordinal, beta: Ordinal },
    #[error("override for {limit} is exhausted before reaching {target}")]
    Exhausted { limit: Ordinal, target: Ordinal },
    #[error("invalid override for {limit}: {reason}")]
    InvalidOverride { limit: Ordinal, reason: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Clone, Debug)]
struct Override {
    prefix: Vec<Ordinal>,
    /// Index into the canonical sequence where the tail starts, if any.
    tail_start: Option<u64>,
}

/// `C_β ∩ α`, its size, and `min(C_β \ α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CTrace {
    pub count: u64,
    pub below: Vec<Ordinal>,
    pub step: Ordinal,
}

/// A C-sequence: the canonical scheme plus per-limit overrides.
#[derive(Clone, Debug, Default)]
pub struct CSequence {
    overrides: HashMap<Ordinal, Override>,
}

impl CSequence {
    pub fn canonical() -> Self {
        Self::default()
    }

    pub fn is_canonical(&self) -> bool {
        self.overrides.is_empty()
    }

    /// Replaces `C_limit` by `prefix`, followed by the canonical elements
    /// above the prefix when `canonical_tail` is set.
    pub fn set_override(
        &mut self,
        limit: Ordinal,
        prefix: Vec<Ordinal>,
        canonical_tail: bool,
    ) -> Result<(), CSeqError> {
        let invalid = |reason: &str| CSeqError::InvalidOverride {
            limit: limit.clone(),
            reason: reason.to_string(),
        };
        if !limit.is_limit() {
            return Err(invalid("not a limit ordinal"));
        }
        if prefix.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("prefix is not strictly increasing"));
        }
        if prefix.iter().any(|x| *x >= limit) {
            return Err(invalid("prefix element is not below the limit"));
        }
        if prefix.is_empty() && !canonical_tail {
            return Err(invalid("empty sequence"));
        }
        let tail_start = if canonical_tail {
            match prefix.last() {
                None => Some(0),
                Some(top) => {
                    let mut n = 0u64;
                    // terminates: the canonical sequence is cofinal in `limit`
                    while limit.fund_seq(n).expect("limit") <= *top {
                        n += 1;
                    }
                    Some(n)
                }
            }
        } else {
            None
        };
        self.overrides
            .insert(limit, Override { prefix, tail_start });
        Ok(())
    }

    /// Parses the override file format: one line per limit,
    /// `CNF ":" CNF ("," CNF)* [";canonical"]`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_overrides(text: &str) -> Result<Self, CSeqError> {
        let mut seq = Self::canonical();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (body, tail) = match body.strip_suffix(";canonical") {
                Some(b) => (b, true),
                None => (body, false),
            };
            let (head, rest) = body.split_once(':').ok_or_else(|| CSeqError::Format {
                line,
                message: "missing ':'".into(),
            })?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<Ordinal>()
                    .map_err(|source| CSeqError::Parse { line, source })
            };
            let limit = parse(head)?;
            let prefix = rest.split(',').map(parse).collect::<Result<Vec<_>, _>>()?;
            if seq.overrides.contains_key(&limit) {
                return Err(CSeqError::Format {
                    line,
                    message: format!("duplicate override for {limit}"),
                });
            }
            seq.set_override(limit, prefix, tail)?;
        }
        Ok(seq)
    }

    /// The `i`-th element (from 0) of `C_beta` in increasing order, or `None`
    /// past the end (`C_0 = ∅`, `C_{α+1} = {α}`, finite overrides).
    pub fn element(&self, beta: &Ordinal, i: u64) -> Option<Ordinal> {
        match beta.classify() {
            Kind::Zero => None,
            Kind::Successor(pred) => (i == 0).then_some(pred),
            Kind::Limit => match self.overrides.get(beta) {
                None => Some(beta.fund_seq(i).expect("limit")),
                Some(ov) => {
                    let plen = ov.prefix.len() as u64;
                    if i < plen {
                        Some(ov.prefix[i as usize].clone())
                    } else {
                        ov.tail_start
                            .map(|t| beta.fund_seq(t + (i - plen)).expect("limit"))
                    }
                }
            },
        }
    }

    /// The first `count` elements of `C_beta` (fewer if it is shorter).
    pub fn prefix(&self, beta: &Ordinal, count: u64) -> Vec<Ordinal> {
        (0..count).map_while(|i| self.element(beta, i)).collect()
    }

    /// Scans `C_beta` upward until it reaches `alpha`.
    pub fn trace(&self, beta: &Ordinal, alpha: &Ordinal) -> Result<CTrace, CSeqError> {
        if alpha >= beta {
            return Err(CSeqError::NotBelow {
                alpha: alpha.clone(),
                beta: beta.clone(),
            });
        }
        let mut below = Vec::new();
        let mut i = 0u64;
        loop {
            match self.element(beta, i) {
                None => {
                    return Err(CSeqError::Exhausted {
                        limit: beta.clone(),
                        target: alpha.clone(),
                    })
                }
                Some(x) if x >= *alpha => {
                    return Ok(CTrace {
                        count: i,
                        below,
                        step: x,
                    })
                }
                Some(x) => below.push(x),
            }
            i += 1;
        }
    }
}
