//! Enumerated countable metric spaces of exact rationals.
//!
//! A [`PointEnumeration`] is an injective sequence `x_0, x_1, …` of rationals
//! with `d(i, k) = |x_i − x_k|`. `A_{i,j}` is the set of indices whose point
//! lies strictly within `1/(j+1)` of `x_i`. A set is *crowded at depth J* when
//! each of its points has another member in `A_{i,j}` for every `j ≤ J`; the
//! [`kernel`] of a set is its largest subset crowded at depth `J`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("crowding check needs a nonempty set")]
    EmptySet,
    #[error("index {index} is outside the space of {len} points")]
    OutOfRange { index: usize, len: usize },
    #[error("points {first} and {second} coincide")]
    NotInjective { first: usize, second: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// An injective enumeration of rationals.
#[derive(Clone, Debug)]
pub struct PointEnumeration {
    points: Vec<BigRational>,
    /// Position of each point in value order.
    rank: Vec<u32>,
    /// `(numerator, denominator)` when every point fits in machine words.
    small: Option<Vec<(i64, i64)>>,
}

impl PartialEq for PointEnumeration {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for PointEnumeration {}

impl PointEnumeration {
    /// The first `count` reduced fractions in `[0, 1]`, ordered by
    /// denominator then numerator: `0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, …`.
    pub fn canonical(count: usize) -> Self {
        let mut points = Vec::with_capacity(count);
        let mut q = 1u64;
        'outer: while points.len() < count {
            let numerators: Box<dyn Iterator<Item = u64>> = if q == 1 {
                Box::new(0..=1)
            } else {
                Box::new((1..q).filter(move |p| p.gcd(&q) == 1))
            };
            for p in numerators {
                if points.len() == count {
                    break 'outer;
                }
                points.push(BigRational::new(BigInt::from(p), BigInt::from(q)));
            }
            q += 1;
        }
        Self::build(points)
    }

    fn build(points: Vec<BigRational>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].cmp(&points[b]));
        let mut rank = vec![0u32; points.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        let small = points
            .iter()
            .map(|x| {
                let n = x.numer().to_i64()?;
                let d = x.denom().to_i64()?;
                (n.unsigned_abs() < 1 << 62 && d < 1 << 62).then_some((n, d))
            })
            .collect();
        PointEnumeration {
            points,
            rank,
            small,
        }
    }

    pub fn from_points(points: Vec<BigRational>) -> Result<Self, SpaceError> {
        let mut seen: HashMap<&BigRational, usize> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if let Some(&first) = seen.get(p) {
                return Err(SpaceError::NotInjective { first, second: i });
            }
            seen.insert(p, i);
        }
        Ok(Self::build(points))
    }

    /// Reads the space file format: `points <count>` followed by one
    /// rational (`p/q` or integer) per line.
    pub fn parse(text: &str) -> Result<Self, SpaceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(SpaceError::Format {
            line: 1,
            message: "missing header".into(),
        })?;
        let count: usize = header
            .strip_prefix("points")
            .and_then(|c| c.trim().parse().ok())
            .ok_or_else(|| SpaceError::Format {
                line,
                message: "expected `points <count>`".into(),
            })?;
        let mut points = Vec::with_capacity(count);
        for (line, body) in lines {
            let value: BigRational = body.parse().map_err(|_| SpaceError::Format {
                line,
                message: format!("not a rational: {body}"),
            })?;
            points.push(value);
        }
        if points.len() != count {
            return Err(SpaceError::Format {
                line: 1,
                message: format!("header declares {count} points, found {}", points.len()),
            });
        }
        Self::from_points(points)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("points {}\n", self.points.len());
        for p in &self.points {
            writeln!(out, "{p}").unwrap();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Panics if `n` is outside the enumeration.
    pub fn point(&self, n: usize) -> &BigRational {
        &self.points[n]
    }

    pub fn distance(&self, i: usize, k: usize) -> BigRational {
        (&self.points[i] - &self.points[k]).abs()
    }

    /// `n ∈ A_{i,j}`, i.e. `d(x_n, x_i) < 1/(j+1)`.
    pub fn in_ball(&self, n: usize, i: usize, j: u64) -> bool {
        match &self.small {
            Some(small) => within_small(small[n], small[i], j),
            None => within(&self.points[n], &self.points[i], j),
        }
    }

    /// `A_{i,j} ∩ [0, window)`; the window must not exceed the enumeration.
    pub fn ball_members(&self, i: usize, j: u64, window: usize) -> Vec<usize> {
        assert!(window <= self.len(), "window exceeds the enumeration");
        (0..window).filter(|&n| self.in_ball(n, i, j)).collect()
    }

    fn check_indices(&self, set: &[usize]) -> Result<(), SpaceError> {
        match set.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(SpaceError::OutOfRange {
                index,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }
}

/// `|a − b|·(j+1) < 1` on reduced fractions with positive denominators.
fn within_small((an, ad): (i64, i64), (bn, bd): (i64, i64), j: u64) -> bool {
    // |an·bd − bn·ad|·(j+1) < ad·bd; each product is below 2^124
    let diff = (an as i128 * bd as i128 - bn as i128 * ad as i128).unsigned_abs();
    let scale = ad as u128 * bd as u128;
    match diff.checked_mul(j as u128 + 1) {
        Some(lhs) => lhs < scale,
        None => false,
    }
}

fn within(a: &BigRational, b: &BigRational, j: u64) -> bool {
    let d = (a - b).abs();
    d * BigRational::from_integer(BigInt::from(j) + 1) < BigRational::one()
}

/// Witnesses that every point of `set` has a distinct neighbor in `set`
/// within `1/(j+1)` for all `j ≤ depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrowdingCertificate {
    pub set: Vec<usize>,
    pub depth: u64,
    /// `(i, j, n)`: the least `n ∈ set`, `n ≠ i`, with `n ∈ A_{i,j}`.
    pub witnesses: Vec<(usize, u64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Crowding {
    Certified(CrowdingCertificate),
    /// The least `(i, j)` (lexicographically) with no witness.
    Failed {
        i: usize,
        j: u64,
    },
}

impl Crowding {
    pub fn is_certified(&self) -> bool {
        matches!(self, Crowding::Certified(_))
    }
}

pub fn crowding_check(
    space: &PointEnumeration,
    set: &[usize],
    depth: u64,
) -> Result<Crowding, SpaceError> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(SpaceError::EmptySet);
    }
    space.check_indices(&set)?;
    let mut witnesses = Vec::with_capacity(set.len() * (depth as usize + 1));
    for &i in &set {
        for j in 0..=depth {
            let witness = set
                .iter()
                .copied()
                .find(|&n| n != i && space.in_ball(n, i, j));
            match witness {
                Some(n) => witnesses.push((i, j, n)),
                None => return Ok(Crowding::Failed { i, j }),
            }
        }
    }
    Ok(Crowding::Certified(CrowdingCertificate {
        set,
        depth,
        witnesses,
    }))
}

/// The largest subset of `set` crowded at `depth` (possibly empty).
///
/// Balls shrink as `j` grows, so crowding at depth `J` only needs a
/// neighbor within `1/(J+1)`, and the nearest neighbor in value order is
/// always one of the two adjacent survivors. Points are pruned from a
/// value-sorted linked list until every survivor has a close neighbor.
pub fn kernel(space: &PointEnumeration, set: &[usize], depth: u64) -> Vec<usize> {
    let mut order = set.to_vec();
    order.sort_unstable();
    order.dedup();
    order.retain(|&i| i < space.len());
    order.sort_by_key(|&i| space.rank[i]);

    let n = order.len();
    let none = usize::MAX;
    let mut prev: Vec<usize> = (0..n).map(|p| if p == 0 { none } else { p - 1 }).collect();
    let mut next: Vec<usize> = (0..n)
        .map(|p| if p + 1 == n { none } else { p + 1 })
        .collect();
    let mut alive = vec![true; n];
    let close = |a: usize, b: usize| space.in_ball(order[a], order[b], depth);

    let mut queue: VecDeque<usize> = (0..n).collect();
    while let Some(p) = queue.pop_front() {
        if !alive[p] {
            continue;
        }
        let supported =
            (prev[p] != none && close(p, prev[p])) || (next[p] != none && close(p, next[p]));
        if supported {
            continue;
        }
        alive[p] = false;
        let (l, r) = (prev[p], next[p]);
        if l != none {
            next[l] = r;
            queue.push_back(l);
        }
        if r != none {
            prev[r] = l;
            queue.push_back(r);
        }
    }

    let mut out: Vec<usize> = (0..n).filter(|&p| alive[p]).map(|p| order[p]).collect();
    out.sort_unstable();
    out
}

/// Parses `p/q` or an integer.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let r: BigRational = text.trim().parse().ok()?;
    (!r.denom().is_zero()).then_some(r)
}
