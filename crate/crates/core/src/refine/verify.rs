//! Independent re-check of a refinement prefix. Nothing here shares state
//! with the search: values are recomputed with a fresh [`Walker`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::labeling::Labeling;
use super::sigma::{pair, parent};
use super::RefineError;
use crate::ordinal::Ordinal;
use crate::qspace::{kernel, PointEnumeration};
use crate::walks::{RhoBar, WalkError, Walker};

/// Itemized failures kept per report; counts are always exact.
const MAX_ITEMS: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyFailure {
    /// Indices or labels not strictly increasing at this position.
    Order { position: usize },
    /// `r(k_q, k_t) < r(k_r, k_t)` fails.
    Strong { q: usize, r: usize, t: usize },
    /// `r(k_q, k_r) ≤ r(k_r, k_t)` fails.
    Shift { q: usize, r: usize, t: usize },
    /// `k_t ∉ A_{k_parent, j}` where `σ_t = σ_parent⌢⟨j⟩`.
    Ball { t: usize, parent: usize, j: u64 },
    /// The child coding `σ_parent⌢⟨j⟩` is not in `A_{k_parent, j}`.
    Coverage { parent: usize, j: u64, child: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub length: usize,
    pub order_failures: u64,
    pub strong_checked: u64,
    pub strong_failures: u64,
    pub shift_checked: u64,
    pub shift_failures: u64,
    pub ball_checked: u64,
    pub ball_failures: u64,
    pub coverage_checked: u64,
    pub coverage_failures: u64,
    /// Size of the largest subset of the prefix crowded at the given depth.
    pub kernel_size: usize,
    pub items: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.order_failures == 0
            && self.strong_failures == 0
            && self.shift_failures == 0
            && self.ball_failures == 0
            && self.coverage_failures == 0
    }

    fn fail(&mut self, item: VerifyFailure) {
        if self.items.len() < MAX_ITEMS {
            self.items.push(item);
        }
    }

    pub fn to_record(&self) -> String {
        format!(
            "verify length={} order={} strong={}/{} shift={}/{} ball={}/{} coverage={}/{} kernel={} passed={}",
            self.length,
            self.order_failures,
            self.strong_failures,
            self.strong_checked,
            self.shift_failures,
            self.shift_checked,
            self.ball_failures,
            self.ball_checked,
            self.coverage_failures,
            self.coverage_checked,
            self.kernel_size,
            self.passed()
        )
    }
}

/// ρ̄ on an unordered pair of labels; `None` when they coincide.
fn r_pair(walker: &Walker, a: &Ordinal, b: &Ordinal) -> Result<Option<RhoBar>, WalkError> {
    match a.cmp(b) {
        std::cmp::Ordering::Less => walker.rhobar(a, b).map(Some),
        std::cmp::Ordering::Greater => walker.rhobar(b, a).map(Some),
        std::cmp::Ordering::Equal => Ok(None),
    }
}

fn in_ball(x: &BigRational, centre: &BigRational, j: u64) -> bool {
    (x - centre).abs() * BigRational::from_integer(BigInt::from(j) + 1) < BigRational::one()
}

/// Checks a prefix `⟨k_0, …, k_S⟩` against a space and labeling.
pub fn verify_result(
    chosen: &[usize],
    space: &PointEnumeration,
    labeling: &Labeling,
    depth: u64,
) -> Result<VerifyReport, RefineError> {
    let mut points = Vec::with_capacity(chosen.len());
    let mut labels = Vec::with_capacity(chosen.len());
    for &k in chosen {
        if k >= space.len() {
            return Err(RefineError::OutOfWindow { index: k });
        }
        points.push(space.point(k).clone());
        labels.push(
            labeling
                .label(k)
                .ok_or(RefineError::LabelingTooShort { needed: k + 1 })?,
        );
    }
    verify_points(chosen, &points, &labels, depth)
}

/// As [`verify_result`], given the points and labels of the chosen indices.
///
/// Triples are read positionally: `(q, r, t)` with `q < r < t` indexes the
/// prefix, and `r` of two labels is evaluated on the pair in label order.
pub fn verify_points(
    chosen: &[usize],
    points: &[BigRational],
    labels: &[Ordinal],
    depth: u64,
) -> Result<VerifyReport, RefineError> {
    assert_eq!(chosen.len(), points.len());
    assert_eq!(chosen.len(), labels.len());
    let len = chosen.len();
    let walker = Walker::canonical();
    let mut report = VerifyReport {
        length: len,
        ..Default::default()
    };

    for t in 1..len {
        if chosen[t - 1] >= chosen[t] || labels[t - 1] >= labels[t] {
            report.order_failures += 1;
            report.fail(VerifyFailure::Order { position: t });
        }
    }

    let mut table = vec![vec![None; len]; len];
    for a in 0..len {
        for b in a + 1..len {
            let v = r_pair(&walker, &labels[a], &labels[b])?;
            table[a][b] = v;
            table[b][a] = v;
        }
    }

    for q in 0..len {
        for r in q + 1..len {
            for t in r + 1..len {
                let (qr, qt, rt) = (table[q][r], table[q][t], table[r][t]);
                report.strong_checked += 1;
                if !matches!((qt, rt), (Some(x), Some(y)) if x < y) {
                    report.strong_failures += 1;
                    report.fail(VerifyFailure::Strong { q, r, t });
                }
                report.shift_checked += 1;
                if !matches!((qr, rt), (Some(x), Some(y)) if x <= y) {
                    report.shift_failures += 1;
                    report.fail(VerifyFailure::Shift { q, r, t });
                }
            }
        }
    }

    for t in 1..len {
        let (p, j) = parent(t as u64).expect("t > 0");
        let p = p as usize;
        report.ball_checked += 1;
        if !in_ball(&points[t], &points[p], j) {
            report.ball_failures += 1;
            report.fail(VerifyFailure::Ball { t, parent: p, j });
        }
    }

    for p in 0..len {
        for j in 0.. {
            let child = match pair(p as u64, j).and_then(|c| c.checked_add(1)) {
                Some(c) if (c as usize) < len => c as usize,
                _ => break,
            };
            report.coverage_checked += 1;
            if !in_ball(&points[child], &points[p], j) {
                report.coverage_failures += 1;
                report.fail(VerifyFailure::Coverage {
                    parent: p,
                    j,
                    child,
                });
            }
        }
    }

    if let Ok(space) = PointEnumeration::from_points(points.to_vec()) {
        let all: Vec<usize> = (0..len).collect();
        report.kernel_size = kernel(&space, &all, depth).len();
    }
    Ok(report)
}

/// Whether the strong form and the shift-increasing property hold on a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImplicationReport {
    /// `∀ k<l<m: r(k,m) < r(l,m)`
    pub strong: bool,
    /// `∀ k<l<m: r(k,l) ≤ r(l,m)`
    pub shift_increasing: bool,
}

impl ImplicationReport {
    /// The strong form implies shift-increasing.
    pub fn holds(&self) -> bool {
        !self.strong || self.shift_increasing
    }
}

pub fn implication_check(
    set: &[usize],
    labeling: &Labeling,
    walker: &Walker,
) -> Result<ImplicationReport, RefineError> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    let labels = set
        .iter()
        .map(|&k| {
            labeling
                .label(k)
                .ok_or(RefineError::LabelingTooShort { needed: k + 1 })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = labels.len();
    let mut out = ImplicationReport {
        strong: true,
        shift_increasing: true,
    };
    for a in 0..n {
        for b in a + 1..n {
            let ab = walker.rhobar(&labels[a], &labels[b])?;
            for c in b + 1..n {
                let ac = walker.rhobar(&labels[a], &labels[c])?;
                let bc = walker.rhobar(&labels[b], &labels[c])?;
                out.strong &= ac < bc;
                out.shift_increasing &= ab <= bc;
            }
        }
    }
    Ok(out)
}
