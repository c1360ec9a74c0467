//! Conway polynomial by descending-diagram skein recursion.
//!
//! Components are walked in index order from their basepoints. The first
//! crossing reached on its under-strand is resolved with
//! `∇(D) = ∇(D with c switched) + ε z ∇(D with c smoothed)`; a diagram with no
//! such crossing is a descending unlink. Results are memoized on the full
//! canonical encoding of each intermediate diagram.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::diagram::LinkDiagram;
use crate::error::InvariantError;
use crate::poly::IntPolynomial;

/// Canonical encoding of a diagram: component count, each walk as its length
/// followed by `2 * crossing + over` codes, then the crossing signs.
pub type MemoKey = Vec<u32>;

/// Memo entries remember the degree bound they were computed to.
pub type Memo = HashMap<MemoKey, (usize, IntPolynomial)>;

/// Walk-form diagram with crossings numbered by first passage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct State {
    walks: Vec<Vec<u32>>,
    signs: Vec<i8>,
}

fn code(crossing: u32, over: bool) -> u32 {
    crossing << 1 | over as u32
}

impl State {
    pub fn from_diagram(d: &LinkDiagram) -> Self {
        let w = d.to_walks();
        Self {
            walks: w.walks.iter().map(|walk| walk.iter().map(|v| code(v.crossing as u32, v.over)).collect()).collect(),
            signs: w.signs.iter().map(|s| s.value() as i8).collect(),
        }
    }

    fn components(&self) -> usize {
        self.walks.len()
    }

    /// Renumbers crossings by first passage and drops unused ones.
    fn canonical(mut self) -> Self {
        let mut map = vec![u32::MAX; self.signs.len()];
        let mut signs = Vec::new();
        for walk in &mut self.walks {
            for v in walk.iter_mut() {
                let c = (*v >> 1) as usize;
                if map[c] == u32::MAX {
                    map[c] = signs.len() as u32;
                    signs.push(self.signs[c]);
                }
                *v = code(map[c], *v & 1 == 1);
            }
        }
        self.signs = signs;
        self
    }

    fn key(&self) -> MemoKey {
        let mut k = Vec::with_capacity(2 * self.signs.len() * 2 + self.walks.len() + 1);
        k.push(self.walks.len() as u32);
        for w in &self.walks {
            k.push(w.len() as u32);
            k.extend_from_slice(w);
        }
        k.extend(self.signs.iter().map(|&s| (s > 0) as u32));
        k
    }

    /// Removes curls: a crossing passed twice in a row along one walk.
    fn remove_kinks(&mut self) {
        for walk in &mut self.walks {
            let mut changed = true;
            while changed && walk.len() >= 2 {
                changed = false;
                let n = walk.len();
                for i in 0..n {
                    let j = (i + 1) % n;
                    if walk[i] >> 1 == walk[j] >> 1 {
                        if j == 0 {
                            walk.remove(i);
                            walk.remove(0);
                        } else {
                            walk.drain(i..=j);
                        }
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    /// True when the components fall into groups with no crossings between them.
    fn is_split(&self) -> bool {
        let m = self.walks.len();
        if m < 2 {
            return false;
        }
        let mut owner = vec![usize::MAX; self.signs.len()];
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (wi, w) in self.walks.iter().enumerate() {
            for &v in w {
                let c = (v >> 1) as usize;
                if owner[c] == usize::MAX {
                    owner[c] = wi;
                } else if owner[c] != wi {
                    let (a, b) = (find(&mut parent, owner[c]), find(&mut parent, wi));
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, 0);
        (1..m).any(|i| find(&mut parent, i) != root)
    }

    fn first_bad(&self) -> Option<usize> {
        let mut seen = vec![false; self.signs.len()];
        for w in &self.walks {
            for &v in w {
                let c = (v >> 1) as usize;
                if !seen[c] {
                    seen[c] = true;
                    if v & 1 == 0 {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    fn switch(&self, c: usize) -> Self {
        let mut s = self.clone();
        for w in &mut s.walks {
            for v in w.iter_mut() {
                if (*v >> 1) as usize == c {
                    *v ^= 1;
                }
            }
        }
        s.signs[c] = -s.signs[c];
        s
    }

    fn smooth(&self, c: usize) -> Self {
        let mut hits = Vec::with_capacity(2);
        for (wi, w) in self.walks.iter().enumerate() {
            for (pos, &v) in w.iter().enumerate() {
                if (v >> 1) as usize == c {
                    hits.push((wi, pos));
                }
            }
        }
        let (wa, x) = hits[0];
        let (wb, y) = hits[1];
        let mut walks = self.walks.clone();
        if wa == wb {
            let w = &self.walks[wa];
            let inner = w[x + 1..y].to_vec();
            let mut outer = w[y + 1..].to_vec();
            outer.extend_from_slice(&w[..x]);
            walks[wa] = outer;
            walks.push(inner);
        } else {
            let rot = |w: &Vec<u32>, p: usize| {
                let mut r = w[p + 1..].to_vec();
                r.extend_from_slice(&w[..p]);
                r
            };
            let mut merged = rot(&self.walks[wa], x);
            merged.extend(rot(&self.walks[wb], y));
            walks[wa.min(wb)] = merged;
            walks.remove(wa.max(wb));
        }
        Self { walks, signs: self.signs.clone() }
    }
}

/// Counters describing one engine's work.
#[derive(Debug, Default)]
pub struct EngineStats {
    pub nodes: AtomicU64,
    pub memo_hits: AtomicU64,
}

/// Skein evaluator. The memo is per call unless a shared cache is attached.
#[derive(Debug, Default, Clone)]
pub struct SkeinEngine {
    shared: Option<Arc<Mutex<Memo>>>,
    stats: Arc<EngineStats>,
}

impl SkeinEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Engine whose memo persists across calls and is shared by clones.
    pub fn with_shared_cache(cache: Arc<Mutex<Memo>>) -> Self {
        Self { shared: Some(cache), stats: Arc::default() }
    }

    pub fn stats(&self) -> &EngineStats {
        &self.stats
    }

    pub fn shared_cache(&self) -> Option<&Arc<Mutex<Memo>>> {
        self.shared.as_ref()
    }

    /// Full Conway polynomial.
    pub fn conway(&self, d: &LinkDiagram) -> Result<IntPolynomial, InvariantError> {
        self.conway_upto(d, d.crossing_count() + d.component_count())
    }

    /// Conway polynomial with every term above `max_degree` dropped.
    pub fn conway_upto(&self, d: &LinkDiagram, max_degree: usize) -> Result<IntPolynomial, InvariantError> {
        d.validate()?;
        let mut memo = Memo::new();
        Ok(self.eval(State::from_diagram(d), max_degree, &mut memo))
    }

    fn lookup(&self, key: &MemoKey, max_degree: usize, memo: &Memo) -> Option<IntPolynomial> {
        let hit = |(deg, p): &(usize, IntPolynomial)| (*deg >= max_degree).then(|| p.truncate(max_degree));
        if let Some(p) = memo.get(key).and_then(hit) {
            return Some(p);
        }
        let shared = self.shared.as_ref()?;
        let guard = shared.lock().expect("memo lock");
        guard.get(key).and_then(hit)
    }

    fn eval(&self, mut s: State, max_degree: usize, memo: &mut Memo) -> IntPolynomial {
        self.stats.nodes.fetch_add(1, Ordering::Relaxed);
        let m = s.components();
        if max_degree + 1 < m {
            return IntPolynomial::zero();
        }
        s.remove_kinks();
        if s.walks.iter().any(|w| w.is_empty()) {
            return if m == 1 { IntPolynomial::one() } else { IntPolynomial::zero() };
        }
        if s.is_split() {
            return IntPolynomial::zero();
        }
        let s = s.canonical();
        let Some(c) = s.first_bad() else {
            return if m == 1 { IntPolynomial::one() } else { IntPolynomial::zero() };
        };
        let key = s.key();
        if let Some(p) = self.lookup(&key, max_degree, memo) {
            self.stats.memo_hits.fetch_add(1, Ordering::Relaxed);
            return p;
        }
        let eps = s.signs[c] as i128;
        let switched = self.eval(s.switch(c), max_degree, memo);
        let result = if max_degree == 0 {
            switched
        } else {
            let smoothed = self.eval(s.smooth(c), max_degree - 1, memo);
            &switched + &smoothed.shift(1).scale(eps)
        };
        if let Some(shared) = &self.shared {
            shared.lock().expect("memo lock").insert(key.clone(), (max_degree, result.clone()));
        }
        memo.insert(key, (max_degree, result.clone()));
        result
    }
}

/// Conway polynomial with a fresh engine.
pub fn conway(d: &LinkDiagram) -> Result<IntPolynomial, InvariantError> {
    SkeinEngine::new().conway(d)
}

/// Truncated Conway polynomial with a fresh engine.
pub fn conway_upto(d: &LinkDiagram, max_degree: usize) -> Result<IntPolynomial, InvariantError> {
    SkeinEngine::new().conway_upto(d, max_degree)
}

/// Encodes a memo key as text for the on-disk cache.
pub fn key_to_string(key: &MemoKey) -> String {
    key.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn key_from_string(s: &str) -> Option<MemoKey> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|t| t.parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;

    fn closure(n: usize, w: &[i64]) -> LinkDiagram {
        BraidWord::new(n, w.to_vec()).unwrap().closure()
    }

    #[test]
    fn base_cases() {
        assert_eq!(conway(&LinkDiagram::unknot()).unwrap(), IntPolynomial::one());
        assert!(conway(&LinkDiagram::unlink(2)).unwrap().is_zero());
        assert!(conway(&LinkDiagram::unlink(0)).is_err());
    }

    #[test]
    fn small_links() {
        assert_eq!(conway(&closure(2, &[1, 1])).unwrap(), IntPolynomial::monomial(1, 1));
        assert_eq!(conway(&closure(2, &[1, 1, 1])).unwrap(), IntPolynomial::from_coeffs(vec![1, 0, 1]));
        assert_eq!(conway(&closure(2, &[1, 1, 1, 1])).unwrap(), IntPolynomial::from_coeffs(vec![0, 2, 0, 1]));
        // Figure-eight knot.
        assert_eq!(conway(&closure(3, &[1, -2, 1, -2])).unwrap(), IntPolynomial::from_coeffs(vec![1, 0, -1]));
    }

    #[test]
    fn truncation_agrees() {
        let d = closure(3, &[1, 1, 2, -1, 2, 2, 1, -2]);
        let full = conway(&d).unwrap();
        for k in 0..6 {
            assert_eq!(conway_upto(&d, k).unwrap(), full.truncate(k));
        }
    }

    #[test]
    fn shared_cache_reuses_work() {
        let cache = Arc::new(Mutex::new(Memo::new()));
        let e = SkeinEngine::with_shared_cache(cache.clone());
        let d = closure(3, &[1, 2, 1, 2, 1, 2, 1, 2]);
        let a = e.conway(&d).unwrap();
        assert!(!cache.lock().unwrap().is_empty());
        let b = e.conway(&d).unwrap();
        assert_eq!(a, b);
        assert!(e.stats().memo_hits.load(Ordering::Relaxed) > 0);
    }

    #[test]
    fn key_round_trip() {
        let k = vec![2, 3, 0, 5, 7];
        assert_eq!(key_from_string(&key_to_string(&k)), Some(k));
    }
}
