//! Generators for the special links: two- and three-component Hopf links,
//! the standard link `L₀(a, b, c)`, and the worked figures.

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::diagram::{LinkDiagram, LinkingMatrix, Sign, Visit, Walks};
use crate::error::{DiagramError, InvariantError};
use crate::invariants::Link;
use crate::poly::IntPolynomial;
use crate::skein::SkeinEngine;
use crate::slices::SliceDiagram;

fn power_word(letters: &[i64], reps: usize) -> Vec<i64> {
    letters.iter().copied().cycle().take(letters.len() * reps).collect()
}

/// Closure of `σ_1^(2p)`: two co-oriented unknots with linking number `p`.
pub fn hopf2_slices(p: i64) -> SliceDiagram {
    let letter = if p >= 0 { 1 } else { -1 };
    BraidWord { strands: 2, letters: power_word(&[letter], 2 * p.unsigned_abs() as usize) }.to_slices()
}

pub fn hopf2(p: i64) -> LinkDiagram {
    hopf2_slices(p).to_link_diagram()
}

/// `hopf2(-p)` with the second component reversed; linking number `p`.
pub fn hopf2_op_slices(p: i64) -> SliceDiagram {
    hopf2_slices(-p).reverse_component(2).expect("two components")
}

pub fn hopf2_op(p: i64) -> LinkDiagram {
    hopf2_op_slices(p).to_link_diagram()
}

/// Three parallel copies of a `p`-framed unknot: the closure of the `p`-th
/// power of the full twist `(σ_1 σ_2)^3`. Pairwise linking numbers are all `p`.
pub fn hopf3_slices(p: i64) -> SliceDiagram {
    let letters = if p >= 0 { [1, 2] } else { [-1, -2] };
    BraidWord { strands: 3, letters: power_word(&letters, 3 * p.unsigned_abs() as usize) }.to_slices()
}

pub fn hopf3(p: i64) -> LinkDiagram {
    hopf3_slices(p).to_link_diagram()
}

/// `hopf3(1)` with component `i` reversed wherever `signs[i-1] = -1`, so that
/// `(i,j) = s_i s_j`.
pub fn hopf_fibers_slices(signs: [i64; 3]) -> Result<SliceDiagram, DiagramError> {
    let mut d = hopf3_slices(1);
    for (i, &s) in signs.iter().enumerate() {
        match s {
            1 => {}
            -1 => d = d.reverse_component(i + 1)?,
            _ => return Err(DiagramError::InvalidSlices(format!("fiber sign {s} must be +1 or -1"))),
        }
    }
    Ok(d)
}

pub fn hopf_fibers(signs: [i64; 3]) -> Result<LinkDiagram, DiagramError> {
    Ok(hopf_fibers_slices(signs)?.to_link_diagram())
}

/// Three round circles, each pair meeting in an antiparallel twist region
/// of `2|k|` crossings of sign `sgn k`. Parameters are `((2,3), (3,1), (1,2))`;
/// every two-component sublink is the opposite-oriented Hopf link of its parameter.
pub fn l0(a: i64, b: i64, c: i64) -> LinkDiagram {
    let mut signs = Vec::new();
    // Region for the pair (first, second): crossing ids in the first ring's order.
    let mut region = |k: i64| -> (Vec<usize>, bool) {
        let n = 2 * k.unsigned_abs() as usize;
        let start = signs.len();
        let sign = if k > 0 { Sign::Pos } else { Sign::Neg };
        signs.extend(std::iter::repeat_n(sign, n));
        // The first ring passes over at its odd crossings exactly for negative regions.
        ((start..start + n).collect(), k < 0)
    };
    let r12 = region(c);
    let r23 = region(a);
    let r31 = region(b);
    let forward = |r: &(Vec<usize>, bool)| -> Vec<Visit> {
        r.0.iter().enumerate().map(|(i, &x)| Visit { crossing: x, over: (i % 2 == 0) == r.1 }).collect()
    };
    let backward = |r: &(Vec<usize>, bool)| -> Vec<Visit> {
        let mut v: Vec<Visit> = forward(r).into_iter().map(|v| Visit { over: !v.over, ..v }).collect();
        v.reverse();
        v
    };
    let walks = vec![
        [forward(&r12), backward(&r31)].concat(),
        [forward(&r23), backward(&r12)].concat(),
        [forward(&r31), backward(&r23)].concat(),
    ];
    Walks { walks, signs }.into_diagram()
}

/// Links of the worked calculations, numbered by figure; 11 is `hopf3(2)`.
pub fn paper_figure_slices(n: u32) -> Result<SliceDiagram, InvariantError> {
    let d = match n {
        6 => hopf_fibers_slices([1, 1, 1])?,
        7 => hopf3_slices(-1).reverse_component(1)?,
        8 => hopf_fibers_slices([1, 1, 1])?.cable(&[2, 1, 1], true)?,
        9 => hopf3_slices(-1).cable(&[4, 1, 1], true)?,
        10 => hopf_fibers_slices([1, 1, -1])?.cable(&[2, 1, 1], true)?,
        11 => hopf3_slices(2),
        _ => return Err(InvariantError::BadFigure(n)),
    };
    Ok(d)
}

pub fn paper_figure(n: u32) -> Result<LinkDiagram, InvariantError> {
    Ok(paper_figure_slices(n)?.to_link_diagram())
}

/// A diagram in whichever form a generator produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyLink {
    Plain(LinkDiagram),
    Slices(SliceDiagram),
}

impl AnyLink {
    pub fn to_link_diagram(&self) -> LinkDiagram {
        match self {
            AnyLink::Plain(d) => d.clone(),
            AnyLink::Slices(s) => s.to_link_diagram(),
        }
    }
}

macro_rules! both {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            AnyLink::Plain($d) => $e,
            AnyLink::Slices($d) => $e,
        }
    };
}

macro_rules! wrap {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            AnyLink::Plain($d) => AnyLink::Plain($e),
            AnyLink::Slices($d) => AnyLink::Slices($e),
        }
    };
}

impl Link for AnyLink {
    fn component_count(&self) -> usize {
        both!(self, d => Link::component_count(d))
    }
    fn crossing_count(&self) -> usize {
        both!(self, d => Link::crossing_count(d))
    }
    fn linking_matrix(&self) -> LinkingMatrix {
        both!(self, d => Link::linking_matrix(d))
    }
    fn sublink(&self, keep: &[usize]) -> Result<Self, DiagramError> {
        Ok(wrap!(self, d => Link::sublink(d, keep)?))
    }
    fn reverse_component(&self, i: usize) -> Result<Self, DiagramError> {
        Ok(wrap!(self, d => Link::reverse_component(d, i)?))
    }
    fn mirror(&self) -> Self {
        wrap!(self, d => Link::mirror(d))
    }
    fn permute_components(&self, perm: &[usize]) -> Result<Self, DiagramError> {
        Ok(wrap!(self, d => Link::permute_components(d, perm)?))
    }
    fn cable(&self, mults: &[i64], connected: bool) -> Result<Self, DiagramError> {
        Ok(wrap!(self, d => Link::cable(d, mults, connected)?))
    }
    fn raw_conway_upto(&self, engine: &SkeinEngine, max_degree: usize) -> Result<IntPolynomial, InvariantError> {
        both!(self, d => d.raw_conway_upto(engine, max_degree))
    }
}

/// Named generator with integer parameters, as accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: String,
    pub params: Vec<i64>,
}

impl FamilySpec {
    pub fn new(family: &str, params: &[i64]) -> Self {
        Self { family: family.to_string(), params: params.to_vec() }
    }

    /// Number of parameters a family takes, or `None` for an unknown name.
    pub fn arity(family: &str) -> Option<usize> {
        match family {
            "hopf2" | "hopf2_op" | "hopf3" | "figure" => Some(1),
            "hopf_fibers" | "l0" => Some(3),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<AnyLink, InvariantError> {
        let arity = |n: usize| -> Result<(), InvariantError> {
            if self.params.len() == n {
                Ok(())
            } else {
                Err(DiagramError::InvalidSlices(format!(
                    "family {} takes {n} parameter(s), got {}",
                    self.family,
                    self.params.len()
                ))
                .into())
            }
        };
        let p = &self.params;
        Ok(match self.family.as_str() {
            "hopf2" => {
                arity(1)?;
                AnyLink::Slices(hopf2_slices(p[0]))
            }
            "hopf2_op" => {
                arity(1)?;
                AnyLink::Slices(hopf2_op_slices(p[0]))
            }
            "hopf3" => {
                arity(1)?;
                AnyLink::Slices(hopf3_slices(p[0]))
            }
            "hopf_fibers" => {
                arity(3)?;
                AnyLink::Slices(hopf_fibers_slices([p[0], p[1], p[2]])?)
            }
            "l0" => {
                arity(3)?;
                AnyLink::Plain(l0(p[0], p[1], p[2]))
            }
            "figure" => {
                arity(1)?;
                let n = u32::try_from(p[0]).map_err(|_| InvariantError::BadFigure(0))?;
                AnyLink::Slices(paper_figure_slices(n)?)
            }
            other => return Err(DiagramError::InvalidSlices(format!("unknown family {other}")).into()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_linking() {
        for p in -4..=4 {
            assert_eq!(hopf2(p).linking_matrix().get(1, 2), p);
            assert_eq!(hopf2_op(p).linking_matrix().get(1, 2), p);
            assert_eq!(hopf3(p).linking_matrix().triple(), (p, p, p));
        }
        assert_eq!(hopf2(1).crossing_count(), 2);
    }

    #[test]
    fn fibers_linking() {
        let d = hopf_fibers([1, -1, 1]).unwrap();
        assert_eq!(d.linking_matrix().triple(), (-1, -1, 1));
        assert!(hopf_fibers([1, 2, 1]).is_err());
    }

    #[test]
    fn l0_linking_and_validity() {
        for (a, b, c) in [(0, 0, 0), (1, -2, 2), (-1, -1, -1)] {
            let d = l0(a, b, c);
            d.validate().unwrap();
            assert_eq!(d.linking_matrix().triple(), (c, a, b));
        }
        assert_eq!(l0(0, 0, 0), LinkDiagram::unlink(3));
    }

    #[test]
    fn figure_linking() {
        let t = |n| paper_figure(n).unwrap().linking_matrix().triple();
        assert_eq!(t(6), (1, 1, 1));
        assert_eq!(t(7), (1, -1, 1));
        assert_eq!(t(8), (2, 1, 2));
        assert_eq!(t(9), (-4, -1, -4));
        assert_eq!(t(10), (2, -1, -2));
        assert_eq!(t(11), (2, 2, 2));
        assert_eq!(paper_figure(5), Err(InvariantError::BadFigure(5)));
    }

    #[test]
    fn spec_parsing() {
        let s: FamilySpec = serde_json::from_str(r#"{"family":"hopf3","params":[2]}"#).unwrap();
        assert_eq!(s.build().unwrap().linking_matrix().triple(), (2, 2, 2));
        assert!(FamilySpec::new("hopf3", &[1, 2]).build().is_err());
        assert!(FamilySpec::new("nope", &[]).build().is_err());
    }
}
