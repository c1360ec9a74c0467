//! The invariant tower of three-component links: Sato–Levine `β`, the
//! triple invariant `γ`, `M̃`, its orientation average `M̃ᵃᵛ`, the correction
//! polynomials `P₁` and `R`, and the asymptotic invariant `M`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::alexander;
use crate::diagram::{LinkDiagram, LinkingMatrix};
use crate::error::{DiagramError, InvariantError};
use crate::poly::{check_parity, IntPolynomial};
use crate::rational::Rational;
use crate::skein::SkeinEngine;
use crate::slices::SliceDiagram;

/// Operations the tower needs from a diagram representation.
pub trait Link: Clone + Send + Sync {
    fn component_count(&self) -> usize;
    fn crossing_count(&self) -> usize;
    fn linking_matrix(&self) -> LinkingMatrix;
    fn sublink(&self, keep: &[usize]) -> Result<Self, DiagramError>;
    fn reverse_component(&self, i: usize) -> Result<Self, DiagramError>;
    fn mirror(&self) -> Self;
    fn permute_components(&self, perm: &[usize]) -> Result<Self, DiagramError>;
    fn cable(&self, mults: &[i64], connected: bool) -> Result<Self, DiagramError>;
    /// Conway polynomial up to `max_degree`, without structural checks.
    fn raw_conway_upto(&self, engine: &SkeinEngine, max_degree: usize) -> Result<IntPolynomial, InvariantError>;
}

impl Link for LinkDiagram {
    fn component_count(&self) -> usize {
        LinkDiagram::component_count(self)
    }
    fn crossing_count(&self) -> usize {
        LinkDiagram::crossing_count(self)
    }
    fn linking_matrix(&self) -> LinkingMatrix {
        LinkDiagram::linking_matrix(self)
    }
    fn sublink(&self, keep: &[usize]) -> Result<Self, DiagramError> {
        LinkDiagram::sublink(self, keep)
    }
    fn reverse_component(&self, i: usize) -> Result<Self, DiagramError> {
        LinkDiagram::reverse_component(self, i)
    }
    fn mirror(&self) -> Self {
        LinkDiagram::mirror(self)
    }
    fn permute_components(&self, perm: &[usize]) -> Result<Self, DiagramError> {
        LinkDiagram::permute_components(self, perm)
    }
    fn cable(&self, mults: &[i64], connected: bool) -> Result<Self, DiagramError> {
        LinkDiagram::cable(self, mults, connected)
    }
    fn raw_conway_upto(&self, engine: &SkeinEngine, max_degree: usize) -> Result<IntPolynomial, InvariantError> {
        engine.conway_upto(self, max_degree)
    }
}

/// Diagrams above this many crossings go through the Alexander route when it applies.
pub const SKEIN_CROSSING_LIMIT: usize = 30;

impl Link for SliceDiagram {
    fn component_count(&self) -> usize {
        SliceDiagram::component_count(self)
    }
    fn crossing_count(&self) -> usize {
        SliceDiagram::crossing_count(self)
    }
    fn linking_matrix(&self) -> LinkingMatrix {
        SliceDiagram::linking_matrix(self)
    }
    fn sublink(&self, keep: &[usize]) -> Result<Self, DiagramError> {
        SliceDiagram::sublink(self, keep)
    }
    fn reverse_component(&self, i: usize) -> Result<Self, DiagramError> {
        SliceDiagram::reverse_component(self, i)
    }
    fn mirror(&self) -> Self {
        SliceDiagram::mirror(self)
    }
    fn permute_components(&self, perm: &[usize]) -> Result<Self, DiagramError> {
        SliceDiagram::permute_components(self, perm)
    }
    fn cable(&self, mults: &[i64], connected: bool) -> Result<Self, DiagramError> {
        SliceDiagram::cable(self, mults, connected)
    }
    fn raw_conway_upto(&self, engine: &SkeinEngine, max_degree: usize) -> Result<IntPolynomial, InvariantError> {
        if self.crossing_count() > SKEIN_CROSSING_LIMIT {
            if let Some(p) = alexander::conway_upto(self, max_degree)? {
                return Ok(p);
            }
        }
        engine.conway_upto(&self.to_link_diagram(), max_degree)
    }
}

static EVALUATIONS: AtomicU64 = AtomicU64::new(0);
static PARITY_VIOLATIONS: AtomicU64 = AtomicU64::new(0);
static LOWEST_COEFF_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Process-wide tally of the structural checks run on every Conway evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub evaluations: u64,
    pub parity_violations: u64,
    pub lowest_coeff_violations: u64,
}

pub fn audit() -> Audit {
    Audit {
        evaluations: EVALUATIONS.load(Ordering::SeqCst),
        parity_violations: PARITY_VIOLATIONS.load(Ordering::SeqCst),
        lowest_coeff_violations: LOWEST_COEFF_VIOLATIONS.load(Ordering::SeqCst),
    }
}

/// Conway polynomial up to `max_degree`, checked for parity and for the
/// lowest coefficient predicted by the linking numbers.
pub fn checked_conway<L: Link>(engine: &SkeinEngine, d: &L, max_degree: usize) -> Result<IntPolynomial, InvariantError> {
    let m = d.component_count();
    if m == 0 {
        return Err(DiagramError::EmptyDiagram.into());
    }
    let p = d.raw_conway_upto(engine, max_degree)?;
    audit_conway(&p, m, &d.linking_matrix(), max_degree)?;
    Ok(p)
}

/// Runs the structural checks on a Conway polynomial of an `m`-component
/// link known up to `max_degree`, and records the outcome in [`audit`].
pub fn audit_conway(
    p: &IntPolynomial,
    m: usize,
    lk: &LinkingMatrix,
    max_degree: usize,
) -> Result<(), InvariantError> {
    EVALUATIONS.fetch_add(1, Ordering::SeqCst);
    if let Err(e) = check_parity(p, m) {
        PARITY_VIOLATIONS.fetch_add(1, Ordering::SeqCst);
        return Err(e);
    }
    if max_degree + 1 >= m {
        let expected = lk.spanning_tree_sum();
        let found = p.coeff(m - 1);
        if found != expected {
            LOWEST_COEFF_VIOLATIONS.fetch_add(1, Ordering::SeqCst);
            return Err(InvariantError::LowestCoefficient { expected, found });
        }
    }
    Ok(())
}

fn expect_components<L: Link>(d: &L, m: usize) -> Result<(), InvariantError> {
    let found = d.component_count();
    if found == m {
        Ok(())
    } else {
        Err(InvariantError::WrongComponentCount { expected: m, found })
    }
}

/// `c_1` of a link: the coefficient of `z^(m+1)`.
pub fn c1_with<L: Link>(engine: &SkeinEngine, d: &L) -> Result<i128, InvariantError> {
    let m = d.component_count();
    Ok(checked_conway(engine, d, m + 1)?.coeff(m + 1))
}

pub fn c1<L: Link>(d: &L) -> Result<i128, InvariantError> {
    c1_with(&SkeinEngine::new(), d)
}

/// Sato–Levine invariant `β = c_1(L) - c_0(L) (c_1(L_1) + c_1(L_2))`.
pub fn beta<L: Link>(d: &L) -> Result<i128, InvariantError> {
    expect_components(d, 2)?;
    let e = SkeinEngine::new();
    let lk = d.linking_matrix().get(1, 2) as i128;
    let link = c1_with(&e, d)?;
    let k1 = c1_with(&e, &d.sublink(&[1])?)?;
    let k2 = c1_with(&e, &d.sublink(&[2])?)?;
    Ok(link - lk * (k1 + k2))
}

/// Every Conway coefficient the three-component formulas use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tower {
    /// `((1,2), (2,3), (3,1))`.
    pub lk: (i64, i64, i64),
    pub c1_components: [i128; 3],
    /// `c_1` of `L_2 ∪ L_3`, `L_3 ∪ L_1`, `L_1 ∪ L_2`.
    pub c1_sublinks: [i128; 3],
    pub c1_link: i128,
    /// `β` of `L_2 ∪ L_3`, `L_3 ∪ L_1`, `L_1 ∪ L_2`.
    pub betas: [i128; 3],
    pub gamma: i128,
}

impl Tower {
    pub fn compute<L: Link>(engine: &SkeinEngine, d: &L) -> Result<Self, InvariantError> {
        expect_components(d, 3)?;
        let parts: Vec<Vec<usize>> = vec![vec![1], vec![2], vec![3], vec![2, 3], vec![1, 3], vec![1, 2], vec![1, 2, 3]];
        let values: Vec<i128> = parts
            .par_iter()
            .map(|keep| {
                if keep.len() == 3 {
                    c1_with(engine, d)
                } else {
                    c1_with(engine, &d.sublink(keep)?)
                }
            })
            .collect::<Result<_, _>>()?;
        let lk = d.linking_matrix().triple();
        Ok(Self::from_coefficients(lk, [values[0], values[1], values[2]], [values[3], values[4], values[5]], values[6]))
    }

    pub fn from_coefficients(lk: (i64, i64, i64), comps: [i128; 3], subs: [i128; 3], link: i128) -> Self {
        let (a, b, c) = (lk.0 as i128, lk.1 as i128, lk.2 as i128);
        let [k1, k2, k3] = comps;
        let b23 = subs[0] - b * (k2 + k3);
        let b31 = subs[1] - c * (k3 + k1);
        let b12 = subs[2] - a * (k1 + k2);
        let gamma = link
            - (a * b + b * c + c * a) * (k1 + k2 + k3)
            - (c + b) * b12
            - (a + c) * b23
            - (b + a) * b31;
        Self { lk, c1_components: comps, c1_sublinks: subs, c1_link: link, betas: [b23, b31, b12], gamma }
    }

    /// `M̃ = -(1,2)(2,3)(3,1) γ + Σ` of the cyclically symmetric `β` terms.
    pub fn m_tilde(&self) -> Rational {
        let (a, b, c) = (self.lk.0 as i128, self.lk.1 as i128, self.lk.2 as i128);
        let [b23, b31, b12] = self.betas;
        Rational::int(-a * b * c * self.gamma + a * a * c * c * b23 + b * b * a * a * b31 + c * c * b * b * b12)
    }
}

fn lk_ints(lk: &LinkingMatrix) -> (i128, i128, i128) {
    let (a, b, c) = lk.triple();
    (a as i128, b as i128, c as i128)
}

/// `P₁ = (1/6) k² Σ(i,j) + (1/12) k Σ(i,j)(j,k)` with `k = (1,2)(2,3)(3,1)`.
pub fn p1(lk: &LinkingMatrix) -> Rational {
    let (a, b, c) = lk_ints(lk);
    let k = a * b * c;
    Rational::new(k * k * (a + b + c), 6) + Rational::new(k * (a * b + b * c + c * a), 12)
}

/// `R = (1/24) Σ_cyclic (i,j)³ (j,k)³ [(k,i)³ - (k,i)]`.
pub fn r_poly(lk: &LinkingMatrix) -> Rational {
    let (a, b, c) = lk_ints(lk);
    let term = |x: i128, y: i128, z: i128| x.pow(3) * y.pow(3) * (z.pow(3) - z);
    Rational::new(term(a, b, c) + term(b, c, a) + term(c, a, b), 24)
}

/// Change of `M̃` when component 1 is reversed, written in the linking
/// numbers of the link after the reversal.
pub fn jump_op1(lk: &LinkingMatrix) -> Rational {
    let (a, b, c) = lk_ints(lk);
    let k = a * b * c;
    -Rational::new(k * k * (a + c), 3) - Rational::new(k * (a * b + b * c), 6)
}

/// Witness that a linking matrix is good: `√|(i,j)| = μ_i μ_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GoodLinkCertificate {
    pub mu: (i64, i64, i64),
    pub k: i64,
    pub sqrt_k: i64,
}

fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as i64;
    (r - 1..=r + 1).find(|&x| x >= 0 && x * x == n)
}

pub fn good_link_check(lk: &LinkingMatrix) -> Result<Option<GoodLinkCertificate>, InvariantError> {
    let (a, b, c) = lk.triple();
    if a == 0 || b == 0 || c == 0 {
        return Err(InvariantError::ZeroLinking);
    }
    let (Some(s12), Some(s23), Some(s31)) = (exact_sqrt(a.abs()), exact_sqrt(b.abs()), exact_sqrt(c.abs())) else {
        return Ok(None);
    };
    // μ_1² = s12 s31 / s23.
    if (s12 * s31) % s23 != 0 {
        return Ok(None);
    }
    let Some(mu1) = exact_sqrt(s12 * s31 / s23) else { return Ok(None) };
    if mu1 == 0 || s12 % mu1 != 0 || s31 % mu1 != 0 {
        return Ok(None);
    }
    let (mu2, mu3) = (s12 / mu1, s31 / mu1);
    if mu2 * mu3 != s23 {
        return Ok(None);
    }
    let sqrt_k = s12 * s23 * s31;
    Ok(Some(GoodLinkCertificate { mu: (mu1, mu2, mu3), k: sqrt_k * sqrt_k, sqrt_k }))
}

/// Cable with multiplicities `(|(2,3)|, |(3,1)|, |(1,2)|)`; all pairwise
/// linking numbers become `±k`.
pub fn normalize<L: Link>(d: &L) -> Result<L, InvariantError> {
    expect_components(d, 3)?;
    let (a, b, c) = d.linking_matrix().triple();
    if a == 0 || b == 0 || c == 0 {
        return Err(InvariantError::ZeroLinking);
    }
    Ok(d.cable(&[b.abs(), c.abs(), a.abs()], true)?)
}

/// Secondary normalization: the normalization cabled again with multiplicity `√k`.
pub fn normalize_secondary<L: Link>(d: &L, cert: &GoodLinkCertificate) -> Result<L, InvariantError> {
    let norm = normalize(d)?;
    Ok(norm.cable(&[cert.sqrt_k; 3], true)?)
}

/// Evaluates the tower with one engine, so an attached shared memo is reused.
#[derive(Clone, Debug, Default)]
pub struct Evaluator {
    pub engine: SkeinEngine,
}

impl Evaluator {
    pub fn new(engine: SkeinEngine) -> Self {
        Self { engine }
    }

    pub fn tower<L: Link>(&self, d: &L) -> Result<Tower, InvariantError> {
        Tower::compute(&self.engine, d)
    }

    pub fn gamma<L: Link>(&self, d: &L) -> Result<i128, InvariantError> {
        Ok(self.tower(d)?.gamma)
    }

    pub fn m_tilde<L: Link>(&self, d: &L) -> Result<Rational, InvariantError> {
        Ok(self.tower(d)?.m_tilde())
    }

    /// Average of `M̃` over reversing all components and each single component.
    pub fn m_av<L: Link>(&self, d: &L) -> Result<Rational, InvariantError> {
        expect_components(d, 3)?;
        let all = d.reverse_component(1)?.reverse_component(2)?.reverse_component(3)?;
        let variants = vec![all, d.reverse_component(3)?, d.reverse_component(1)?, d.reverse_component(2)?];
        let values: Vec<Rational> =
            variants.par_iter().map(|v| self.m_tilde(v)).collect::<Result<_, _>>()?;
        Ok(values.into_iter().sum::<Rational>() / Rational::int(4))
    }

    /// `M`, reduced to all-positive linking numbers by mirroring and reversal.
    pub fn m_invariant<L: Link>(&self, d: &L) -> Result<Rational, InvariantError> {
        expect_components(d, 3)?;
        let lk = d.linking_matrix();
        let (a, b, c) = lk.triple();
        let k = a * b * c;
        if k == 0 {
            return self.m_av(d);
        }
        if k < 0 {
            return Ok(-self.m_invariant(&d.mirror())?);
        }
        let common = match (a < 0, b < 0, c < 0) {
            (false, false, false) => None,
            (true, true, false) => Some(2),
            (false, true, true) => Some(3),
            (true, false, true) => Some(1),
            _ => unreachable!("positive product has an even number of negative entries"),
        };
        if let Some(i) = common {
            return self.m_invariant(&d.reverse_component(i)?);
        }
        Ok(self.m_av(d)? + r_poly(&lk))
    }

    /// `M = k⁻² k_norm⁻³ M̃ᵃᵛ(L_NORM)` with `k_norm = k²`.
    pub fn m_via_normalization<L: Link>(&self, d: &L, cert: &GoodLinkCertificate) -> Result<Rational, InvariantError> {
        let big = normalize_secondary(d, cert)?;
        let k = d.linking_matrix().product() as i128;
        let k_norm = k * k;
        Ok(self.m_av(&big)? / Rational::int(k * k * k_norm * k_norm * k_norm))
    }

    pub fn report<L: Link>(&self, d: &L) -> Result<InvariantReport, InvariantError> {
        let t = self.tower(d)?;
        let lk = d.linking_matrix();
        let m_tilde = t.m_tilde();
        Ok(InvariantReport {
            p1: p1(&lk),
            r: r_poly(&lk),
            m_av: self.m_av(d)?,
            m: self.m_invariant(d)?,
            m_tilde,
            tower: t,
        })
    }
}

/// The full tower of one link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    #[serde(flatten)]
    pub tower: Tower,
    pub m_tilde: Rational,
    pub p1: Rational,
    pub r: Rational,
    pub m_av: Rational,
    pub m: Rational,
}

impl InvariantReport {
    pub fn k(&self) -> i64 {
        let (a, b, c) = self.tower.lk;
        a * b * c
    }

    pub fn k_norm(&self) -> i64 {
        self.k() * self.k()
    }
}

pub fn gamma<L: Link>(d: &L) -> Result<i128, InvariantError> {
    Evaluator::default().gamma(d)
}

pub fn m_tilde<L: Link>(d: &L) -> Result<Rational, InvariantError> {
    Evaluator::default().m_tilde(d)
}

pub fn m_av<L: Link>(d: &L) -> Result<Rational, InvariantError> {
    Evaluator::default().m_av(d)
}

pub fn m_invariant<L: Link>(d: &L) -> Result<Rational, InvariantError> {
    Evaluator::default().m_invariant(d)
}

pub fn m_via_normalization<L: Link>(d: &L, cert: &GoodLinkCertificate) -> Result<Rational, InvariantError> {
    Evaluator::default().m_via_normalization(d, cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;

    fn lk(a: i64, b: i64, c: i64) -> LinkingMatrix {
        LinkingMatrix::from_triple(a, b, c)
    }

    #[test]
    fn p1_values() {
        assert_eq!(p1(&lk(1, 1, 1)), Rational::new(3, 4));
        assert_eq!(p1(&lk(2, 1, 2)), Rational::int(16));
        assert_eq!(p1(&lk(-1, 1, 1)), Rational::new(1, 4));
        assert_eq!(p1(&lk(2, 2, 2)), Rational::int(72));
        assert!(p1(&lk(3, 0, -2)).is_zero());
    }

    #[test]
    fn r_values() {
        assert!(r_poly(&lk(1, 1, 1)).is_zero());
        assert_eq!(r_poly(&lk(2, 1, 2)), Rational::int(4));
        assert_eq!(r_poly(&lk(2, 2, 2)), Rational::int(48));
    }

    #[test]
    fn jump_values() {
        assert_eq!(jump_op1(&lk(1, 1, 1)), Rational::int(-1));
        assert_eq!(jump_op1(&lk(2, 1, 2)), Rational::int(-24));
        assert!(jump_op1(&lk(0, 2, 2)).is_zero());
    }

    #[test]
    fn good_links() {
        let c = good_link_check(&lk(1, 1, 1)).unwrap().unwrap();
        assert_eq!(c.mu, (1, 1, 1));
        let c = good_link_check(&lk(4, 1, 4)).unwrap().unwrap();
        assert_eq!(c.mu, (2, 1, 1));
        assert_eq!(c.sqrt_k, 4);
        assert_eq!(c.k, 16);
        assert_eq!(good_link_check(&lk(4, 4, 4)).unwrap(), None);
        assert_eq!(good_link_check(&lk(2, 1, 1)).unwrap(), None);
        assert_eq!(good_link_check(&lk(0, 1, 1)), Err(InvariantError::ZeroLinking));
    }

    #[test]
    fn beta_of_small_hopf_links() {
        for (p, expected) in [(1i64, 0), (2, 1), (3, 4), (-2, -1)] {
            let letter = if p > 0 { 1 } else { -1 };
            let d = BraidWord::new(2, vec![letter; 2 * p.unsigned_abs() as usize]).unwrap().closure();
            assert_eq!(beta(&d).unwrap(), expected, "p = {p}");
        }
        let three = BraidWord::new(3, vec![1, 2]).unwrap().closure();
        assert!(matches!(beta(&three), Err(InvariantError::WrongComponentCount { .. })));
    }

    #[test]
    fn tower_wants_three_components() {
        let d = BraidWord::new(2, vec![1, 1]).unwrap().closure();
        assert!(matches!(gamma(&d), Err(InvariantError::WrongComponentCount { expected: 3, found: 2 })));
    }
}
