//! Braid words and their closures.

use serde::{Deserialize, Serialize};

use crate::diagram::LinkDiagram;
use crate::error::DiagramError;
use crate::slices::{SliceCrossing, SliceDiagram};

/// Word in the Artin generators: letter `k` is `σ_k`, `-k` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    #[serde(rename = "word")]
    pub letters: Vec<i64>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i64>) -> Result<Self, DiagramError> {
        let b = Self { strands, letters };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        if self.strands == 0 {
            return Err(DiagramError::InvalidBraid("strand count must be at least 1".into()));
        }
        for &l in &self.letters {
            if l == 0 || l.unsigned_abs() as usize >= self.strands {
                return Err(DiagramError::InvalidBraid(format!(
                    "letter {l} is not a generator of the {}-strand braid group",
                    self.strands
                )));
            }
        }
        Ok(())
    }

    /// Closure with every strand oriented upward. Letter `+k` lets the strand
    /// at position `k-1` pass over the one at position `k`, a positive crossing.
    /// Components are numbered in order of their lowest strand position.
    pub fn to_slices(&self) -> SliceDiagram {
        let crossings = self
            .letters
            .iter()
            .map(|&l| SliceCrossing { pos: l.unsigned_abs() as usize - 1, left_over: l > 0 })
            .collect();
        SliceDiagram::with_cycle_labels(self.strands, crossings, vec![true; self.strands])
    }

    pub fn closure(&self) -> LinkDiagram {
        self.to_slices().to_link_diagram()
    }
}
