//! Refinement of an enumerated rational space to a finite prefix
//! `⟨k_0, …, k_S⟩` on which the labeling colour `r` is strongly increasing
//! (`r(k_q, k_t) < r(k_r, k_t)` for `q < r < t`, hence shift-increasing),
//! and which realizes the ball requirements of the σ-tree schedule.

mod labeling;
mod record;
mod search;
mod sigma;
mod verify;

use thiserror::Error;

use crate::qspace::{PointEnumeration, SpaceError};
use crate::walks::{WalkError, Walker};

pub use labeling::{Labeling, RColouring};
pub use record::{Recheck, ResultRecord};
pub use search::{
    candidates, score, search, RefineParams, RefinementState, SearchOutcome, SearchStats,
};
pub use sigma::{code, pair, parent, sigma, unpair};
pub use verify::{
    implication_check, verify_points, verify_result, ImplicationReport, VerifyFailure, VerifyReport,
};

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("search exhausted after {visited} nodes (deepest prefix has {} entries{})", deepest.len(), if *budget_hit { ", budget reached" } else { "" })]
    SearchExhausted {
        deepest: Vec<usize>,
        visited: u64,
        budget_hit: bool,
    },
    #[error("labeling is not strictly increasing at index {index}")]
    InvalidLabeling { index: usize },
    #[error("labeling has fewer than {needed} labels")]
    LabelingTooShort { needed: usize },
    #[error("unknown labeling `{0}`")]
    UnknownLabeling(String),
    #[error("labeling file line {line}: {message}")]
    LabelFile { line: usize, message: String },
    #[error("index {index} is outside the window")]
    OutOfWindow { index: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed result record: {0}")]
    Record(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A successful refinement, re-checked by [`verify_result`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementResult {
    pub chosen: Vec<usize>,
    /// `(parent position, j, child position)`: each child lies in
    /// `A_{k_parent, j}`.
    pub coverage: Vec<(usize, u64, usize)>,
    pub stats: SearchStats,
    pub report: VerifyReport,
}

/// Runs the search and verifies its output independently.
pub fn refine(
    space: &PointEnumeration,
    labeling: &Labeling,
    params: &RefineParams,
) -> Result<RefinementResult, RefineError> {
    if params.window == 0 {
        return Err(RefineError::InvalidParams("window must be positive".into()));
    }
    if params.window > space.len() {
        return Err(RefineError::InvalidParams(format!(
            "window {} exceeds the {} points of the space",
            params.window,
            space.len()
        )));
    }
    let labels = labeling.materialize(params.window)?;
    let mut colouring = RColouring::new(Walker::canonical(), labels);
    let outcome = search(space, &mut colouring, params)?;
    let report = verify_result(&outcome.chosen, space, labeling, params.depth)?;
    Ok(RefinementResult {
        chosen: outcome.chosen,
        coverage: outcome.coverage,
        stats: outcome.stats,
        report,
    })
}
