//! Braid-like presentations: crossings stacked bottom to top between vertical
//! strand positions, closed up on the right. Strands may run up or down.
//!
//! Every diagram built from a braid word, by reversing components, deleting
//! components or cabling stays in this form, which keeps it planar and lets
//! the Alexander route sweep it level by level.

use crate::diagram::{LinkDiagram, LinkingMatrix, Sign, Visit, Walks};
use crate::error::DiagramError;

/// Crossing between positions `pos` and `pos + 1`; the two strands trade places.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SliceCrossing {
    pub pos: usize,
    pub left_over: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SliceDiagram {
    width: usize,
    crossings: Vec<SliceCrossing>,
    /// Direction of the strand at each bottom position.
    upward: Vec<bool>,
    /// Component (1-based) of the strand at each bottom position.
    labels: Vec<usize>,
    components: usize,
}

/// Strand traffic through the stack. Threads are named by their bottom position.
pub(crate) struct Sweep {
    /// `(left thread, right thread)` at each crossing.
    pub pairs: Vec<(usize, usize)>,
    /// Thread occupying each top position.
    pub top: Vec<usize>,
    /// Top position reached by each thread.
    pub end: Vec<usize>,
}

impl SliceDiagram {
    pub fn new(
        width: usize,
        crossings: Vec<SliceCrossing>,
        upward: Vec<bool>,
        labels: Vec<usize>,
    ) -> Result<Self, DiagramError> {
        let components = labels.iter().copied().max().unwrap_or(0);
        let d = Self { width, crossings, upward, labels, components };
        d.validate()?;
        Ok(d)
    }

    /// Numbers components by their lowest bottom position.
    pub(crate) fn with_cycle_labels(width: usize, crossings: Vec<SliceCrossing>, upward: Vec<bool>) -> Self {
        let mut d = Self { width, crossings, upward, labels: vec![0; width], components: 0 };
        let sweep = d.sweep();
        let mut next = 0;
        for p in 0..width {
            if d.labels[p] != 0 {
                continue;
            }
            next += 1;
            let mut t = p;
            while d.labels[t] == 0 {
                d.labels[t] = next;
                t = sweep.end[t];
            }
        }
        d.components = next;
        d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn crossings(&self) -> &[SliceCrossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn upward(&self) -> &[bool] {
        &self.upward
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let bad = |m: String| Err(DiagramError::InvalidSlices(m));
        if self.width == 0 {
            return Err(DiagramError::EmptyDiagram);
        }
        if self.upward.len() != self.width || self.labels.len() != self.width {
            return bad("direction and label vectors must match the width".into());
        }
        if let Some(c) = self.crossings.iter().find(|c| c.pos + 1 >= self.width) {
            return bad(format!("crossing at position {} exceeds width {}", c.pos, self.width));
        }
        let sweep = self.sweep();
        let mut seen = vec![false; self.width];
        let mut cycle_of_label = vec![false; self.components + 1];
        for p in 0..self.width {
            if seen[p] {
                continue;
            }
            let label = self.labels[p];
            if label == 0 || label > self.components {
                return Err(DiagramError::ComponentGap { component: label });
            }
            if cycle_of_label[label] {
                return Err(DiagramError::ComponentCycle { component: label });
            }
            cycle_of_label[label] = true;
            let mut t = p;
            while !seen[t] {
                seen[t] = true;
                if self.labels[t] != label {
                    return Err(DiagramError::ComponentCycle { component: label });
                }
                if self.upward[t] != self.upward[p] {
                    return bad(format!("component {label} changes direction through the closure"));
                }
                t = sweep.end[t];
            }
        }
        if let Some(missing) = (1..=self.components).find(|&c| !cycle_of_label[c]) {
            return Err(DiagramError::ComponentGap { component: missing });
        }
        Ok(())
    }

    pub(crate) fn sweep(&self) -> Sweep {
        let mut at: Vec<usize> = (0..self.width).collect();
        let mut pairs = Vec::with_capacity(self.crossings.len());
        for c in &self.crossings {
            pairs.push((at[c.pos], at[c.pos + 1]));
            at.swap(c.pos, c.pos + 1);
        }
        let mut end = vec![0; self.width];
        for (q, &t) in at.iter().enumerate() {
            end[t] = q;
        }
        Sweep { pairs, top: at, end }
    }

    fn dir(&self, thread: usize) -> i64 {
        if self.upward[thread] {
            1
        } else {
            -1
        }
    }

    /// Signs of all crossings, from the strand directions.
    pub(crate) fn signs(&self, sweep: &Sweep) -> Vec<Sign> {
        self.crossings
            .iter()
            .zip(&sweep.pairs)
            .map(|(c, &(l, r))| {
                let s = if c.left_over { 1 } else { -1 } * self.dir(l) * self.dir(r);
                Sign::from_int(s).expect("unit sign")
            })
            .collect()
    }

    pub fn linking_matrix(&self) -> LinkingMatrix {
        let sweep = self.sweep();
        let signs = self.signs(&sweep);
        let mut twice = vec![vec![0i64; self.components + 1]; self.components + 1];
        for (&(l, r), s) in sweep.pairs.iter().zip(&signs) {
            let (i, j) = (self.labels[l], self.labels[r]);
            if i != j {
                twice[i][j] += s.value();
                twice[j][i] += s.value();
            }
        }
        let mut lm = LinkingMatrix::zeros(self.components);
        for i in 1..=self.components {
            for j in i + 1..=self.components {
                lm.set(i, j, twice[i][j] / 2);
            }
        }
        lm
    }

    pub fn self_writhe(&self, i: usize) -> i64 {
        let sweep = self.sweep();
        let signs = self.signs(&sweep);
        sweep
            .pairs
            .iter()
            .zip(&signs)
            .filter(|(&(l, r), _)| self.labels[l] == i && self.labels[r] == i)
            .map(|(_, s)| s.value())
            .sum()
    }

    pub fn to_link_diagram(&self) -> LinkDiagram {
        let sweep = self.sweep();
        let signs = self.signs(&sweep);
        let mut visits: Vec<Vec<Visit>> = vec![Vec::new(); self.width];
        for (k, (c, &(l, r))) in self.crossings.iter().zip(&sweep.pairs).enumerate() {
            visits[l].push(Visit { crossing: k, over: c.left_over });
            visits[r].push(Visit { crossing: k, over: !c.left_over });
        }
        for (t, v) in visits.iter_mut().enumerate() {
            if !self.upward[t] {
                v.reverse();
            }
        }
        let mut walks = Vec::with_capacity(self.components);
        for comp in 1..=self.components {
            let start = (0..self.width).find(|&p| self.labels[p] == comp).expect("label in use");
            let mut walk = Vec::new();
            let mut t = start;
            loop {
                walk.extend_from_slice(&visits[t]);
                t = if self.upward[t] { sweep.end[t] } else { sweep.top[t] };
                if t == start {
                    break;
                }
            }
            walks.push(walk);
        }
        Walks { walks, signs }.into_diagram()
    }

    fn check_component(&self, i: usize) -> Result<(), DiagramError> {
        if i == 0 || i > self.components {
            Err(DiagramError::BadComponent { component: i, count: self.components })
        } else {
            Ok(())
        }
    }

    pub fn reverse_component(&self, i: usize) -> Result<Self, DiagramError> {
        self.check_component(i)?;
        let mut d = self.clone();
        for (p, up) in d.upward.iter_mut().enumerate() {
            if self.labels[p] == i {
                *up = !*up;
            }
        }
        Ok(d)
    }

    pub fn mirror(&self) -> Self {
        let mut d = self.clone();
        for c in &mut d.crossings {
            c.left_over = !c.left_over;
        }
        d
    }

    /// Keeps the listed components, renumbered in the listed order.
    pub fn sublink(&self, keep: &[usize]) -> Result<Self, DiagramError> {
        let mut new_label = vec![0; self.components + 1];
        for (k, &i) in keep.iter().enumerate() {
            self.check_component(i)?;
            if new_label[i] != 0 {
                return Err(DiagramError::BadPermutation { count: self.components });
            }
            new_label[i] = k + 1;
        }
        let alive: Vec<bool> = self.labels.iter().map(|&l| new_label[l] != 0).collect();
        let mut at: Vec<usize> = (0..self.width).collect();
        let mut crossings = Vec::new();
        for c in &self.crossings {
            let (l, r) = (at[c.pos], at[c.pos + 1]);
            if alive[l] && alive[r] {
                let pos = at[..c.pos].iter().filter(|&&t| alive[t]).count();
                crossings.push(SliceCrossing { pos, left_over: c.left_over });
            }
            at.swap(c.pos, c.pos + 1);
        }
        let keep_pos: Vec<usize> = (0..self.width).filter(|&p| alive[p]).collect();
        Ok(Self {
            width: keep_pos.len(),
            crossings,
            upward: keep_pos.iter().map(|&p| self.upward[p]).collect(),
            labels: keep_pos.iter().map(|&p| new_label[self.labels[p]]).collect(),
            components: keep.len(),
        })
    }

    pub fn delete_component(&self, i: usize) -> Result<Self, DiagramError> {
        self.check_component(i)?;
        let keep: Vec<usize> = (1..=self.components).filter(|&c| c != i).collect();
        self.sublink(&keep)
    }

    /// Old component `i` becomes `perm[i - 1]`.
    pub fn permute_components(&self, perm: &[usize]) -> Result<Self, DiagramError> {
        let m = self.components;
        let mut seen = vec![false; m + 1];
        if perm.len() != m || perm.iter().any(|&p| p == 0 || p > m || std::mem::replace(&mut seen[p], true)) {
            return Err(DiagramError::BadPermutation { count: m });
        }
        let mut d = self.clone();
        for l in &mut d.labels {
            *l = perm[*l - 1];
        }
        Ok(d)
    }

    /// Zero-framed blackboard cable. Each strand of component `i` becomes a
    /// bundle of `mults[i-1]` parallel strands and each crossing a grid of
    /// crossings of the same sign. The framing is corrected by full twists of
    /// the bundle; when `connected`, a `σ_1^{∓1} ⋯ σ_{λ-1}^{∓1}` block joins
    /// the copies into one component (negative unless the component's total
    /// linking is negative, as for [`LinkDiagram::cable`]), otherwise copy `j` of component `i` becomes its own
    /// component, numbered after all copies of lower components.
    pub fn cable(&self, mults: &[i64], connected: bool) -> Result<Self, DiagramError> {
        let net = self.linking_matrix().net_linking();
        let blocks: Vec<bool> = net.iter().map(|&n| n < 0).collect();
        self.cable_with_blocks(mults, connected, &blocks)
    }

    pub fn cable_with_blocks(&self, mults: &[i64], connected: bool, blocks: &[bool]) -> Result<Self, DiagramError> {
        let m = self.components;
        if mults.len() != m {
            return Err(DiagramError::MultiplicityCount { expected: m, found: mults.len() });
        }
        if let Some((k, &v)) = mults.iter().enumerate().find(|(_, &v)| v < 1) {
            return Err(DiagramError::BadMultiplicity { component: k + 1, value: v });
        }
        let lam: Vec<usize> = mults.iter().map(|&v| v as usize).collect();
        let bundle = |t: usize| lam[self.labels[t] - 1];
        let sweep = self.sweep();
        let signs = self.signs(&sweep);
        let mut writhe = vec![0i64; m + 1];
        for (&(l, r), s) in sweep.pairs.iter().zip(&signs) {
            if self.labels[l] == self.labels[r] {
                writhe[self.labels[l]] += s.value();
            }
        }

        let mut crossings = Vec::new();
        let mut done = vec![false; m + 1];
        let mut offset = 0;
        for p in 0..self.width {
            let comp = self.labels[p];
            let l = bundle(p);
            if !done[comp] && l > 1 {
                let w = writhe[comp];
                for _ in 0..w.unsigned_abs() {
                    for _ in 0..l {
                        for k in 0..l - 1 {
                            crossings.push(SliceCrossing { pos: offset + k, left_over: w < 0 });
                        }
                    }
                }
                if connected {
                    for k in 0..l - 1 {
                        crossings.push(SliceCrossing { pos: offset + k, left_over: blocks[comp - 1] });
                    }
                }
            }
            done[comp] = true;
            offset += l;
        }

        let mut at: Vec<usize> = (0..self.width).collect();
        for c in &self.crossings {
            let base: usize = at[..c.pos].iter().map(|&t| bundle(t)).sum();
            let (a, b) = (bundle(at[c.pos]), bundle(at[c.pos + 1]));
            for i in (0..a).rev() {
                for j in 0..b {
                    crossings.push(SliceCrossing { pos: base + i + j, left_over: c.left_over });
                }
            }
            at.swap(c.pos, c.pos + 1);
        }

        let mut upward = Vec::new();
        let mut labels = Vec::new();
        let first_copy: Vec<usize> = (0..=m).map(|i| lam[..i.saturating_sub(1)].iter().sum()).collect();
        for p in 0..self.width {
            let comp = self.labels[p];
            let l = bundle(p);
            for q in 0..l {
                upward.push(self.upward[p]);
                labels.push(if connected {
                    comp
                } else {
                    let copy = if self.upward[p] { l - 1 - q } else { q };
                    first_copy[comp] + copy + 1
                });
            }
        }
        let components = if connected { m } else { lam.iter().sum() };
        let d = Self { width: upward.len(), crossings, upward, labels, components };
        debug_assert!(d.validate().is_ok());
        Ok(d)
    }
}
