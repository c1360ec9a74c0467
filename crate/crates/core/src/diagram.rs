//! Oriented link diagrams as signed crossing data.
//!
//! A diagram is a list of crossings whose four slots name the arcs entering
//! and leaving the crossing on the under- and over-strand. Every arc is the
//! outgoing slot of exactly one crossing and the incoming slot of exactly one
//! crossing, so following arcs traces each component as a closed walk.
//! Components without crossings are recorded as free loops.
//!
//! Planarity is not stored or checked; all diagrams built by this crate come
//! from braid closures, cables and local twist regions, which are realizable.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::DiagramError;

pub type ArcId = u32;

/// Crossing sign: `Pos` when the under-strand passes from right to left
/// beneath the over-strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub under_in: ArcId,
    pub under_out: ArcId,
    pub over_in: ArcId,
    pub over_out: ArcId,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkDiagram {
    pub(crate) crossings: Vec<Crossing>,
    pub(crate) arc_component: BTreeMap<ArcId, usize>,
    pub(crate) components: usize,
    pub(crate) free_loops: BTreeMap<usize, u32>,
}

/// Symmetric matrix of pairwise linking numbers, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkingMatrix {
    size: usize,
    entries: Vec<i64>,
}

impl LinkingMatrix {
    pub fn zeros(size: usize) -> Self {
        Self { size, entries: vec![0; size * size] }
    }

    /// Three-component matrix from `((1,2), (2,3), (3,1))`.
    pub fn from_triple(l12: i64, l23: i64, l31: i64) -> Self {
        let mut m = Self::zeros(3);
        m.set(1, 2, l12);
        m.set(2, 3, l23);
        m.set(3, 1, l31);
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.size + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[(i - 1) * self.size + (j - 1)] = v;
        self.entries[(j - 1) * self.size + (i - 1)] = v;
    }

    /// `((1,2), (2,3), (3,1))` of a three-component matrix.
    pub fn triple(&self) -> (i64, i64, i64) {
        assert_eq!(self.size, 3, "triple() needs a 3x3 linking matrix");
        (self.get(1, 2), self.get(2, 3), self.get(3, 1))
    }

    /// `k = (1,2)(2,3)(3,1)`.
    pub fn product(&self) -> i64 {
        let (a, b, c) = self.triple();
        a * b * c
    }

    /// Sum of each component's linking numbers with all the others.
    pub fn net_linking(&self) -> Vec<i64> {
        let n = self.size();
        (1..=n).map(|i| (1..=n).filter(|&j| j != i).map(|j| self.get(i, j)).sum()).collect()
    }

    /// Lowest Conway coefficient `c_0` predicted by the linking numbers: the
    /// weighted spanning-tree count of the linking graph (a cofactor of its
    /// Laplacian). Equals 1 for knots and `lk` for two-component links.
    pub fn spanning_tree_sum(&self) -> i128 {
        let n = self.size;
        if n <= 1 {
            return 1;
        }
        // Reduced Laplacian: drop the row and column of component 1.
        let mut mat = vec![vec![0i128; n - 1]; n - 1];
        for r in 0..n - 1 {
            for c in 0..n - 1 {
                let (i, j) = (r + 2, c + 2);
                mat[r][c] = if i == j {
                    (1..=n).filter(|&k| k != i).map(|k| self.get(i, k) as i128).sum()
                } else {
                    -(self.get(i, j) as i128)
                };
            }
        }
        bareiss_det(mat)
    }
}

fn bareiss_det(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// One passage of a component through a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Visit {
    pub crossing: usize,
    pub over: bool,
}

/// Walk form of a diagram: each component is the cyclic sequence of its
/// crossing passages. An empty walk is a crossing-free loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Walks {
    pub walks: Vec<Vec<Visit>>,
    pub signs: Vec<Sign>,
}

impl Walks {
    /// Builds the diagram with the deterministic numbering: crossings in order
    /// of first passage, arcs numbered consecutively along each walk so that
    /// the arc entering a walk's first passage is the component's lowest arc.
    /// Crossings never visited are dropped.
    pub fn into_diagram(self) -> LinkDiagram {
        let mut new_index = vec![usize::MAX; self.signs.len()];
        let mut order = Vec::new();
        for w in &self.walks {
            for v in w {
                if new_index[v.crossing] == usize::MAX {
                    new_index[v.crossing] = order.len();
                    order.push(v.crossing);
                }
            }
        }
        let blank = Crossing { under_in: 0, under_out: 0, over_in: 0, over_out: 0, sign: Sign::Pos };
        let mut crossings: Vec<Crossing> = order
            .iter()
            .map(|&old| Crossing { sign: self.signs[old], ..blank })
            .collect();
        let mut arc_component = BTreeMap::new();
        let mut free_loops = BTreeMap::new();
        let mut next: ArcId = 1;
        for (ci, w) in self.walks.iter().enumerate() {
            let comp = ci + 1;
            if w.is_empty() {
                free_loops.insert(comp, 1);
                continue;
            }
            let base = next;
            let len = w.len() as ArcId;
            for (k, v) in w.iter().enumerate() {
                let incoming = base + k as ArcId;
                let outgoing = base + (k as ArcId + 1) % len;
                let c = &mut crossings[new_index[v.crossing]];
                if v.over {
                    c.over_in = incoming;
                    c.over_out = outgoing;
                } else {
                    c.under_in = incoming;
                    c.under_out = outgoing;
                }
                arc_component.insert(incoming, comp);
            }
            next += len;
        }
        LinkDiagram { crossings, arc_component, components: self.walks.len(), free_loops }
    }

    /// For every crossing, the walk indices of its over- and under-passage.
    pub fn owners(&self) -> Vec<(usize, usize)> {
        let mut own = vec![(usize::MAX, usize::MAX); self.signs.len()];
        for (wi, w) in self.walks.iter().enumerate() {
            for v in w {
                if v.over {
                    own[v.crossing].0 = wi;
                } else {
                    own[v.crossing].1 = wi;
                }
            }
        }
        own
    }
}

impl LinkDiagram {
    /// Builds and validates a diagram from raw parts.
    pub fn new(
        crossings: Vec<Crossing>,
        arc_component: BTreeMap<ArcId, usize>,
        components: usize,
        free_loops: BTreeMap<usize, u32>,
    ) -> Result<Self, DiagramError> {
        let d = Self { crossings, arc_component, components, free_loops };
        d.validate()?;
        Ok(d)
    }

    /// Split union of `m` crossing-free circles.
    pub fn unlink(m: usize) -> Self {
        Walks { walks: vec![Vec::new(); m], signs: Vec::new() }.into_diagram()
    }

    pub fn unknot() -> Self {
        Self::unlink(1)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn arc_component(&self) -> &BTreeMap<ArcId, usize> {
        &self.arc_component
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn free_loops(&self) -> &BTreeMap<usize, u32> {
        &self.free_loops
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        if self.components == 0 {
            return Err(DiagramError::EmptyDiagram);
        }
        let mut in_use: BTreeMap<ArcId, u32> = BTreeMap::new();
        let mut out_use: BTreeMap<ArcId, u32> = BTreeMap::new();
        for (ci, c) in self.crossings.iter().enumerate() {
            if c.under_in == c.under_out || c.over_in == c.over_out {
                return Err(DiagramError::DegenerateCrossing { crossing: ci });
            }
            for a in [c.under_in, c.over_in] {
                *in_use.entry(a).or_default() += 1;
            }
            for a in [c.under_out, c.over_out] {
                *out_use.entry(a).or_default() += 1;
            }
        }
        for &a in self.arc_component.keys() {
            if in_use.get(&a) != Some(&1) || out_use.get(&a) != Some(&1) {
                return Err(DiagramError::ArcMismatch { arc: a });
            }
        }
        for &a in in_use.keys().chain(out_use.keys()) {
            if !self.arc_component.contains_key(&a) {
                return Err(DiagramError::ArcMismatch { arc: a });
            }
        }
        for (ci, c) in self.crossings.iter().enumerate() {
            if self.arc_component[&c.under_in] != self.arc_component[&c.under_out]
                || self.arc_component[&c.over_in] != self.arc_component[&c.over_out]
            {
                return Err(DiagramError::SlotComponentMix { crossing: ci });
            }
        }
        let mut used = BTreeSet::new();
        for &comp in self.arc_component.values() {
            if comp == 0 || comp > self.components {
                return Err(DiagramError::ComponentGap { component: comp });
            }
            used.insert(comp);
        }
        for (&comp, &n) in &self.free_loops {
            if comp == 0 || comp > self.components {
                return Err(DiagramError::ComponentGap { component: comp });
            }
            if n == 0 {
                continue;
            }
            if n > 1 || used.contains(&comp) {
                return Err(DiagramError::ComponentCycle { component: comp });
            }
            used.insert(comp);
        }
        if let Some(missing) = (1..=self.components).find(|c| !used.contains(c)) {
            return Err(DiagramError::ComponentGap { component: missing });
        }
        // Each component's arcs must form exactly one cycle.
        let walks = self.trace_walks();
        for (ci, w) in walks.iter().enumerate() {
            let comp = ci + 1;
            let arcs = self.arc_component.values().filter(|&&c| c == comp).count();
            if w.len() != arcs {
                return Err(DiagramError::ComponentCycle { component: comp });
            }
        }
        let lk2 = self.doubled_linking();
        for i in 1..=self.components {
            for j in i + 1..=self.components {
                if lk2[i - 1][j - 1] % 2 != 0 {
                    return Err(DiagramError::NonIntegralLinking { i, j });
                }
            }
        }
        Ok(())
    }

    /// Walks from each component's lowest arc; assumes slot usage is valid.
    fn trace_walks(&self) -> Vec<Vec<Visit>> {
        let mut entry: BTreeMap<ArcId, Visit> = BTreeMap::new();
        for (ci, c) in self.crossings.iter().enumerate() {
            entry.insert(c.under_in, Visit { crossing: ci, over: false });
            entry.insert(c.over_in, Visit { crossing: ci, over: true });
        }
        let mut start: Vec<Option<ArcId>> = vec![None; self.components];
        for (&a, &comp) in &self.arc_component {
            let s = &mut start[comp - 1];
            if s.is_none() {
                *s = Some(a);
            }
        }
        start
            .iter()
            .map(|s| {
                let mut walk = Vec::new();
                let Some(first) = *s else { return walk };
                let mut arc = first;
                loop {
                    let v = entry[&arc];
                    walk.push(v);
                    let c = &self.crossings[v.crossing];
                    arc = if v.over { c.over_out } else { c.under_out };
                    if arc == first || walk.len() > 2 * self.crossings.len() {
                        break;
                    }
                }
                walk
            })
            .collect()
    }

    pub(crate) fn to_walks(&self) -> Walks {
        Walks { walks: self.trace_walks(), signs: self.crossings.iter().map(|c| c.sign).collect() }
    }

    /// Deterministic renumbering: crossings in order of first passage, arcs
    /// consecutive along each component starting from its lowest arc.
    pub fn renumber(&self) -> Self {
        self.to_walks().into_diagram()
    }

    fn doubled_linking(&self) -> Vec<Vec<i64>> {
        let m = self.components;
        let mut lk2 = vec![vec![0i64; m]; m];
        for c in &self.crossings {
            let i = self.arc_component[&c.under_in];
            let j = self.arc_component[&c.over_in];
            if i != j {
                lk2[i - 1][j - 1] += c.sign.value();
                lk2[j - 1][i - 1] += c.sign.value();
            }
        }
        lk2
    }

    pub fn linking_matrix(&self) -> LinkingMatrix {
        let lk2 = self.doubled_linking();
        let mut lm = LinkingMatrix::zeros(self.components);
        for i in 1..=self.components {
            for j in i + 1..=self.components {
                lm.set(i, j, lk2[i - 1][j - 1] / 2);
            }
        }
        lm
    }

    /// Sum of the signs of crossings with both strands on component `i`.
    pub fn self_writhe(&self, i: usize) -> i64 {
        self.crossings
            .iter()
            .filter(|c| self.arc_component[&c.under_in] == i && self.arc_component[&c.over_in] == i)
            .map(|c| c.sign.value())
            .sum()
    }

    fn check_component(&self, i: usize) -> Result<(), DiagramError> {
        if i == 0 || i > self.components {
            Err(DiagramError::BadComponent { component: i, count: self.components })
        } else {
            Ok(())
        }
    }

    fn check_crossing(&self, c: usize) -> Result<(), DiagramError> {
        if c >= self.crossings.len() {
            Err(DiagramError::BadCrossing { crossing: c, count: self.crossings.len() })
        } else {
            Ok(())
        }
    }

    /// Reverses the orientation of component `i`. Crossings with exactly one
    /// strand on `i` change sign.
    pub fn reverse_component(&self, i: usize) -> Result<Self, DiagramError> {
        self.check_component(i)?;
        let mut w = self.to_walks();
        let owners = w.owners();
        for (c, &(o, u)) in owners.iter().enumerate() {
            if (o == i - 1) != (u == i - 1) {
                w.signs[c] = w.signs[c].flip();
            }
        }
        w.walks[i - 1].reverse();
        Ok(w.into_diagram())
    }

    /// Mirror image: every crossing switches over/under and changes sign.
    pub fn mirror(&self) -> Self {
        let mut w = self.to_walks();
        for walk in &mut w.walks {
            for v in walk {
                v.over = !v.over;
            }
        }
        for s in &mut w.signs {
            *s = s.flip();
        }
        w.into_diagram()
    }

    /// Removes component `i` together with every crossing it takes part in.
    /// Deleting the only component yields the (invalid) empty diagram.
    pub fn delete_component(&self, i: usize) -> Result<Self, DiagramError> {
        self.check_component(i)?;
        let mut w = self.to_walks();
        let owners = w.owners();
        let doomed: Vec<bool> = owners.iter().map(|&(o, u)| o == i - 1 || u == i - 1).collect();
        w.walks.remove(i - 1);
        for walk in &mut w.walks {
            walk.retain(|v| !doomed[v.crossing]);
        }
        Ok(w.into_diagram())
    }

    /// Keeps only the listed components, in the listed order.
    pub fn sublink(&self, keep: &[usize]) -> Result<Self, DiagramError> {
        for &k in keep {
            self.check_component(k)?;
        }
        let w = self.to_walks();
        let owners = w.owners();
        let kept: BTreeSet<usize> = keep.iter().map(|k| k - 1).collect();
        let alive: Vec<bool> =
            owners.iter().map(|&(o, u)| kept.contains(&o) && kept.contains(&u)).collect();
        let walks = keep
            .iter()
            .map(|&k| w.walks[k - 1].iter().copied().filter(|v| alive[v.crossing]).collect())
            .collect();
        Ok(Walks { walks, signs: w.signs }.into_diagram())
    }

    /// Relabels components: old component `i` becomes `perm[i - 1]`.
    pub fn permute_components(&self, perm: &[usize]) -> Result<Self, DiagramError> {
        let m = self.components;
        let mut seen = vec![false; m];
        if perm.len() != m {
            return Err(DiagramError::BadPermutation { count: m });
        }
        for &p in perm {
            if p == 0 || p > m || seen[p - 1] {
                return Err(DiagramError::BadPermutation { count: m });
            }
            seen[p - 1] = true;
        }
        let w = self.to_walks();
        let mut walks = vec![Vec::new(); m];
        for (old, walk) in w.walks.into_iter().enumerate() {
            walks[perm[old] - 1] = walk;
        }
        Ok(Walks { walks, signs: w.signs }.into_diagram())
    }

    /// Changes crossing `c` into its opposite: over and under strands trade
    /// places and the sign flips. Components are unchanged.
    pub fn skein_switch(&self, c: usize) -> Result<Self, DiagramError> {
        self.check_crossing(c)?;
        let mut w = self.to_walks();
        for walk in &mut w.walks {
            for v in walk.iter_mut().filter(|v| v.crossing == c) {
                v.over = !v.over;
            }
        }
        w.signs[c] = w.signs[c].flip();
        Ok(w.into_diagram())
    }

    /// Oriented smoothing of crossing `c`. A self-crossing splits its
    /// component in two (the new piece is appended as the last component); an
    /// inter-component crossing merges the two components into the lower index.
    pub fn skein_smooth(&self, c: usize) -> Result<Self, DiagramError> {
        self.check_crossing(c)?;
        let w = self.to_walks();
        let walks = smooth_walks(&w.walks, c);
        Ok(Walks { walks, signs: w.signs }.into_diagram())
    }

    /// Zero-framed blackboard cable of every component.
    ///
    /// Curls are first added so that each cabled component has self-writhe
    /// zero. Copy `j` runs parallel to the component at offset `j` on its left,
    /// so every crossing becomes a grid of crossings of the same sign. With
    /// `connected`, a block of `λ-1` crossings at the end of each walk joins
    /// the copies into a single component. The block is negative unless the
    /// component's total linking with the others is negative, so that
    /// mirroring commutes with cabling away from that tie. Otherwise copy `j` of
    /// component `i` becomes its own component, numbered after all copies of
    /// lower components.
    pub fn cable(&self, mults: &[i64], connected: bool) -> Result<Self, DiagramError> {
        let m = self.components;
        if mults.len() != m {
            return Err(DiagramError::MultiplicityCount { expected: m, found: mults.len() });
        }
        if let Some((k, &v)) = mults.iter().enumerate().find(|(_, &v)| v < 1) {
            return Err(DiagramError::BadMultiplicity { component: k + 1, value: v });
        }
        let lam: Vec<usize> = mults.iter().map(|&v| v as usize).collect();
        let net = self.linking_matrix().net_linking();
        let mut w = self.to_walks();
        for i in 1..=m {
            let writhe = self.self_writhe(i);
            if lam[i - 1] > 1 && writhe != 0 {
                let sign = if writhe > 0 { Sign::Neg } else { Sign::Pos };
                Self::with_kinks(&mut w, i, writhe.unsigned_abs() as usize, sign);
            }
        }
        let owners = w.owners();
        // Grid crossing ids: base[c] + a * λ(under) + b.
        let mut base = Vec::with_capacity(w.signs.len());
        let mut signs = Vec::new();
        for (c, &(o, u)) in owners.iter().enumerate() {
            base.push(signs.len());
            signs.extend(std::iter::repeat_n(w.signs[c], lam[o] * lam[u]));
        }
        let mut walks = Vec::new();
        for (ci, walk) in w.walks.iter().enumerate() {
            let l = lam[ci];
            let mut copies: Vec<Vec<Visit>> = (0..l)
                .map(|j| {
                    let mut out = Vec::new();
                    for v in walk {
                        let (o, u) = owners[v.crossing];
                        let lu = lam[u];
                        let positive = w.signs[v.crossing] == Sign::Pos;
                        if v.over {
                            let bs: Vec<usize> =
                                if positive { (0..lu).rev().collect() } else { (0..lu).collect() };
                            for b in bs {
                                out.push(Visit { crossing: base[v.crossing] + j * lu + b, over: true });
                            }
                        } else {
                            let lo = lam[o];
                            let as_: Vec<usize> =
                                if positive { (0..lo).collect() } else { (0..lo).rev().collect() };
                            for a in as_ {
                                out.push(Visit { crossing: base[v.crossing] + a * lu + j, over: false });
                            }
                        }
                    }
                    out
                })
                .collect();
            if connected {
                if l > 1 {
                    let first = signs.len();
                    let positive = net[ci] < 0;
                    let sign = if positive { Sign::Pos } else { Sign::Neg };
                    signs.extend(std::iter::repeat_n(sign, l - 1));
                    for k in 1..l {
                        copies[l - 1].push(Visit { crossing: first + k - 1, over: positive });
                        copies[l - 1 - k].push(Visit { crossing: first + k - 1, over: !positive });
                    }
                }
                walks.push(copies.concat());
            } else {
                walks.extend(copies);
            }
        }
        Ok(Walks { walks, signs }.into_diagram())
    }

    /// Inserts `count` curls of the given sign at the start of component `i`.
    pub(crate) fn with_kinks(walks: &mut Walks, i: usize, count: usize, sign: Sign) {
        for _ in 0..count {
            let k = walks.signs.len();
            walks.signs.push(sign);
            let w = &mut walks.walks[i - 1];
            w.insert(0, Visit { crossing: k, over: false });
            w.insert(0, Visit { crossing: k, over: true });
        }
    }
}

/// Splits or merges walks at the oriented smoothing of crossing `c`.
pub(crate) fn smooth_walks(walks: &[Vec<Visit>], c: usize) -> Vec<Vec<Visit>> {
    let mut hits = Vec::new();
    for (wi, w) in walks.iter().enumerate() {
        for (pos, v) in w.iter().enumerate() {
            if v.crossing == c {
                hits.push((wi, pos));
            }
        }
    }
    debug_assert_eq!(hits.len(), 2);
    let (wa, x) = hits[0];
    let (wb, y) = hits[1];
    let mut out: Vec<Vec<Visit>> = walks.to_vec();
    if wa == wb {
        let w = &walks[wa];
        let inner: Vec<Visit> = w[x + 1..y].to_vec();
        let mut outer: Vec<Visit> = w[y + 1..].to_vec();
        outer.extend_from_slice(&w[..x]);
        out[wa] = outer;
        out.push(inner);
    } else {
        let rot = |w: &Vec<Visit>, p: usize| {
            let mut r: Vec<Visit> = w[p + 1..].to_vec();
            r.extend_from_slice(&w[..p]);
            r
        };
        let mut merged = rot(&walks[wa], x);
        merged.extend(rot(&walks[wb], y));
        let (lo, hi) = (wa.min(wb), wa.max(wb));
        out[lo] = merged;
        out.remove(hi);
    }
    out
}
