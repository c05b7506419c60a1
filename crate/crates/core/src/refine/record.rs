//! Serialized refinement results and their re-check from the file alone.

use serde::{Deserialize, Serialize};

use super::labeling::Labeling;
use super::search::{RefineParams, SearchStats};
use super::verify::{verify_points, VerifyReport};
use super::{RefineError, RefinementResult};
use crate::ordinal::Ordinal;
use crate::qspace::{parse_rational, PointEnumeration};
use crate::walks::Walker;

/// Everything needed to re-check a refinement without re-running it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Labeling name (`identity`, `omega2-diagonal`, `seeded-sample:<k>`) or
    /// `file` for labels read from disk.
    pub labeling: String,
    pub seed: u64,
    /// `canonical` or `custom`.
    pub space: String,
    pub params: RefineParams,
    pub chosen: Vec<usize>,
    pub points: Vec<String>,
    pub labels: Vec<String>,
    /// Row `q` holds `r(k_q, k_t)` for `t > q`.
    pub r_matrix: Vec<Vec<String>>,
    pub stats: SearchStats,
    pub report: VerifyReport,
}

/// Outcome of re-checking a [`ResultRecord`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recheck {
    pub report: VerifyReport,
    /// Recorded values that disagree with recomputation.
    pub mismatches: Vec<String>,
}

impl Recheck {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.mismatches.is_empty()
    }
}

impl ResultRecord {
    pub fn build(
        result: &RefinementResult,
        space: &PointEnumeration,
        space_kind: &str,
        labeling: &Labeling,
        labeling_name: &str,
        seed: u64,
        params: &RefineParams,
    ) -> Result<Self, RefineError> {
        let labels: Vec<Ordinal> = result
            .chosen
            .iter()
            .map(|&k| {
                labeling
                    .label(k)
                    .ok_or(RefineError::OutOfWindow { index: k })
            })
            .collect::<Result<_, _>>()?;
        Ok(ResultRecord {
            labeling: labeling_name.to_string(),
            seed,
            space: space_kind.to_string(),
            params: params.clone(),
            chosen: result.chosen.clone(),
            points: result
                .chosen
                .iter()
                .map(|&k| space.point(k).to_string())
                .collect(),
            labels: labels.iter().map(|l| l.to_string()).collect(),
            r_matrix: r_matrix(&labels)?,
            stats: result.stats.clone(),
            report: result.report.clone(),
        })
    }

    /// Line-delimited `key=value` rendering.
    pub fn to_lines(&self, with_matrix: bool) -> Vec<String> {
        let p = &self.params;
        let mut out = vec![format!(
            "status=ok labeling={} seed={} space={} target={} window={} depth={} lookahead={} budget={} visited={} backtracks={}",
            self.labeling,
            self.seed,
            self.space,
            p.target,
            p.window,
            p.depth,
            p.lookahead,
            p.budget,
            self.stats.visited,
            self.stats.backtracks
        )];
        for (s, &k) in self.chosen.iter().enumerate() {
            let parent = match super::sigma::parent(s as u64) {
                Some((r, j)) => format!("parent={r} j={j}"),
                None => "parent=- j=-".to_string(),
            };
            out.push(format!(
                "k s={s} index={k} point={} label={} {parent}",
                self.points[s], self.labels[s]
            ));
        }
        if with_matrix {
            for (q, row) in self.r_matrix.iter().enumerate() {
                for (off, v) in row.iter().enumerate() {
                    out.push(format!("r q={q} t={} value={v}", q + 1 + off));
                }
            }
        }
        out.push(self.report.to_record());
        out
    }

    /// Recomputes the verifier report from the recorded points and labels,
    /// and compares recorded values with fresh ones.
    pub fn recheck(&self) -> Result<Recheck, RefineError> {
        let n = self.chosen.len();
        if self.points.len() != n || self.labels.len() != n {
            return Err(RefineError::Record("length mismatch".into()));
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                parse_rational(p).ok_or_else(|| RefineError::Record(format!("bad rational {p}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let labels = self
            .labels
            .iter()
            .map(|l| {
                l.parse::<Ordinal>()
                    .map_err(|e| RefineError::Record(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut mismatches = Vec::new();
        if self.space == "canonical" {
            let top = self.chosen.iter().max().map_or(0, |m| m + 1);
            let space = PointEnumeration::canonical(top);
            for (s, &k) in self.chosen.iter().enumerate() {
                if *space.point(k) != points[s] {
                    mismatches.push(format!("point s={s} index={k}"));
                }
            }
        }
        if self.labeling != "file" {
            let top = self.chosen.iter().max().map_or(0, |m| m + 1);
            let labeling = Labeling::from_name(&self.labeling, self.seed, top)?;
            for (s, &k) in self.chosen.iter().enumerate() {
                if labeling.label(k).as_ref() != Some(&labels[s]) {
                    mismatches.push(format!("label s={s} index={k}"));
                }
            }
        }
        let fresh = r_matrix(&labels);
        match fresh {
            Ok(m) if m == self.r_matrix => {}
            _ => mismatches.push("r_matrix".to_string()),
        }
        let report = verify_points(&self.chosen, &points, &labels, self.params.depth)?;
        if report != self.report {
            mismatches.push("report".to_string());
        }
        Ok(Recheck { report, mismatches })
    }
}

fn r_matrix(labels: &[Ordinal]) -> Result<Vec<Vec<String>>, RefineError> {
    let walker = Walker::canonical();
    let mut rows = Vec::with_capacity(labels.len());
    for q in 0..labels.len() {
        let mut row = Vec::with_capacity(labels.len() - q - 1);
        for t in q + 1..labels.len() {
            row.push(walker.rhobar(&labels[q], &labels[t])?.to_string());
        }
        rows.push(row);
    }
    Ok(rows)
}
