//! Low Conway coefficients of large braid-like diagrams through the
//! one-variable Alexander polynomial.
//!
//! Sweeping a [`SliceDiagram`] level by level turns the Wirtinger relations
//! into a `w × w` transfer matrix `T` over `Z[t^±1]`, `w` the width. The
//! matrix `I - T` is equivalent to the Alexander matrix, so with `t = 1 + s`
//! one of its cofactors equals `±(1+s)^f ∇(s (1+s)^(-1/2))` up to the usual
//! normalization. Only coefficients up to a small degree are needed, so all
//! arithmetic happens in `F_p[s] / (s^P)` for a few 61-bit primes and the
//! integers are recovered by Chinese remaindering. The unit `±(1+s)^f` is
//! pinned down by the lowest coefficient, which the linking numbers predict;
//! when that coefficient vanishes the route declines and the caller falls
//! back to the skein engine.

use crate::error::InvariantError;
use crate::poly::IntPolynomial;
use crate::slices::SliceDiagram;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The largest primes below `2^61`.
fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 61) - 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Truncated power series in `s` over `F_p`.
#[derive(Clone, Copy)]
struct Ring {
    p: u64,
    prec: usize,
}

impl Ring {
    fn zero(&self) -> Vec<u64> {
        vec![0; self.prec]
    }

    fn constant(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    fn reduce(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u128; self.prec];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b[..self.prec - i].iter().enumerate() {
                out[i + j] = (out[i + j] + x as u128 * y as u128) % self.p as u128;
            }
        }
        out.into_iter().map(|v| v as u64).collect()
    }

    fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| mul_mod(x, c, self.p)).collect()
    }

    fn inv_scalar(&self, c: u64) -> u64 {
        pow_mod(c, self.p - 2, self.p)
    }

    /// Inverse of a series with nonzero constant term.
    fn inv(&self, a: &[u64]) -> Vec<u64> {
        let c = self.inv_scalar(a[0]);
        let mut out = self.zero();
        out[0] = c;
        for k in 1..self.prec {
            let mut acc = 0u128;
            for i in 1..=k {
                acc = (acc + a[i] as u128 * out[k - i] as u128) % self.p as u128;
            }
            out[k] = mul_mod((self.p - acc as u64) % self.p, c, self.p);
        }
        out
    }

    /// `(1+s)^e` by the binomial series.
    fn one_plus_s_pow(&self, e: i64) -> Vec<u64> {
        let mut out = self.zero();
        let mut c = 1u64;
        let e_mod = self.reduce(e);
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = c;
            let factor = (e_mod + self.p - (j as u64 % self.p)) % self.p;
            c = mul_mod(mul_mod(c, factor, self.p), self.inv_scalar(j as u64 + 1), self.p);
        }
        out
    }

    fn valuation(&self, a: &[u64]) -> Option<usize> {
        a.iter().position(|&x| x != 0)
    }

    /// Determinant by elimination with a pivot of least valuation. Because
    /// every remaining entry is divisible by the pivot's power of `s`, no
    /// precision is lost.
    fn det(&self, mut a: Vec<Vec<Vec<u64>>>) -> Vec<u64> {
        let n = a.len();
        let mut det = self.constant(1);
        for k in 0..n {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(k) {
                for (j, e) in row.iter().enumerate().skip(k) {
                    if let Some(v) = self.valuation(e) {
                        if best.is_none_or(|b| v < b.0) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let Some((v, pi, pj)) = best else { return self.zero() };
            if pi != k {
                a.swap(pi, k);
                det = self.scale(&det, self.p - 1);
            }
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(pj, k);
                }
                det = self.scale(&det, self.p - 1);
            }
            let pivot = a[k][k].clone();
            det = self.mul(&det, &pivot);
            let mut unit = pivot[v..].to_vec();
            unit.resize(self.prec, 0);
            let unit_inv = self.inv(&unit);
            let pivot_row = a[k].clone();
            for row in a.iter_mut().skip(k + 1) {
                if self.valuation(&row[k]).is_none() {
                    continue;
                }
                let mut q = row[k][v..].to_vec();
                q.resize(self.prec, 0);
                let q = self.mul(&q, &unit_inv);
                for j in k + 1..n {
                    let t = self.mul(&q, &pivot_row[j]);
                    row[j] = self.sub(&row[j], &t);
                }
                row[k] = self.zero();
            }
        }
        det
    }
}

/// Cofactor of `I - T` as a truncated series mod `p`, or `None` when there
/// is no crossing relation to delete.
fn cofactor(d: &SliceDiagram, ring: Ring) -> Option<Vec<u64>> {
    let w = d.width();
    let sweep = d.sweep();
    let signs = d.signs(&sweep);
    let t = ring.add(&ring.constant(1), &{
        let mut s = ring.zero();
        if ring.prec > 1 {
            s[1] = 1;
        }
        s
    });
    let t_inv = ring.inv(&t);
    let one = ring.constant(1);
    let mut forms: Vec<Vec<Vec<u64>>> =
        (0..w).map(|p| (0..w).map(|q| if p == q { one.clone() } else { ring.zero() }).collect()).collect();
    let mut at: Vec<usize> = (0..w).collect();
    let mut created = vec![false; w];
    for ((c, &(l, r)), sign) in d.crossings().iter().zip(&sweep.pairs).zip(&signs) {
        let (u_pos, o_pos, under) = if c.left_over { (c.pos + 1, c.pos, r) } else { (c.pos, c.pos + 1, l) };
        let up = d.upward()[under];
        let pos_power = (sign.value() > 0) == up;
        let tp = if pos_power { &t } else { &t_inv };
        let rest = ring.sub(&one, tp);
        let new_row: Vec<Vec<u64>> = forms[u_pos]
            .iter()
            .zip(&forms[o_pos])
            .map(|(x, y)| ring.add(&ring.mul(tp, x), &ring.mul(&rest, y)))
            .collect();
        forms[u_pos] = new_row;
        created[under] = true;
        forms.swap(c.pos, c.pos + 1);
        at.swap(c.pos, c.pos + 1);
    }
    let r = (0..w).find(|&q| created[at[q]])?;
    let mut a: Vec<Vec<Vec<u64>>> = forms
        .iter()
        .enumerate()
        .map(|(p, row)| {
            row.iter()
                .enumerate()
                .map(|(q, e)| {
                    let id = if p == q { one.clone() } else { ring.zero() };
                    ring.sub(&id, e)
                })
                .collect()
        })
        .collect();
    a[r][0] = ring.add(&a[r][0], &one);
    Some(ring.det(a))
}

fn symmetric(v: u64, p: u64) -> i128 {
    if v > p / 2 {
        v as i128 - p as i128
    } else {
        v as i128
    }
}

/// Conway coefficients `a_0 ..= a_max` mod `p`, or `None` if `p` divides the
/// lowest coefficient.
fn coefficients_mod(d: &SliceDiagram, c0: i128, max_degree: usize, p: u64) -> Result<Option<Vec<u64>>, InvariantError> {
    let m = d.component_count();
    let prec = max_degree.max(m) + 2;
    let ring = Ring { p, prec };
    let c0_mod = c0.rem_euclid(p as i128) as u64;
    if c0_mod == 0 {
        return Ok(None);
    }
    let Some(det) = cofactor(d, ring) else {
        return Err(InvariantError::Alexander("diagram has no crossing relation".into()));
    };
    let low = m - 1;
    if let Some(v) = ring.valuation(&det) {
        if v != low {
            return Err(InvariantError::Alexander(format!(
                "cofactor has order {v} in s, expected {low}"
            )));
        }
    } else {
        return Err(InvariantError::Alexander("cofactor vanished to working precision".into()));
    }
    let unit = if det[low] == c0_mod {
        1
    } else if det[low] == (p - c0_mod) % p {
        p - 1
    } else {
        return Err(InvariantError::Alexander("lowest coefficient disagrees with linking numbers".into()));
    };
    let f = symmetric(mul_mod(det[low + 1], ring.inv_scalar(det[low]), p), p);
    let mut g = ring.mul(&ring.scale(&det, unit), &ring.one_plus_s_pow(-(f as i64)));
    let mut out = vec![0u64; max_degree + 1];
    for k in 0..=max_degree {
        let coeff = g[k];
        if coeff == 0 {
            continue;
        }
        if k < low || (k - low) % 2 == 1 {
            return Err(InvariantError::Alexander(format!("nonzero coefficient in forbidden degree {k}")));
        }
        out[k] = coeff;
        let exp = (low as i64 - k as i64) / 2;
        let mut term = ring.one_plus_s_pow(exp);
        term.rotate_right(k);
        term[..k].iter_mut().for_each(|x| *x = 0);
        g = ring.sub(&g, &ring.scale(&term, coeff));
    }
    Ok(Some(out))
}

/// Conway polynomial truncated to `max_degree`, or `Ok(None)` when the
/// linking numbers predict a vanishing lowest coefficient.
pub fn conway_upto(d: &SliceDiagram, max_degree: usize) -> Result<Option<IntPolynomial>, InvariantError> {
    d.validate()?;
    let m = d.component_count();
    let c0 = d.linking_matrix().spanning_tree_sum();
    if c0 == 0 {
        return Ok(None);
    }
    if d.crossing_count() == 0 {
        return Ok(Some(if m == 1 { IntPolynomial::one() } else { IntPolynomial::zero() }));
    }
    let mut residues = Vec::new();
    for p in primes(6) {
        if let Some(r) = coefficients_mod(d, c0, max_degree, p)? {
            residues.push((p, r));
        }
        if residues.len() == 3 {
            break;
        }
    }
    if residues.len() < 3 {
        return Err(InvariantError::Alexander("no usable primes".into()));
    }
    let (p1, r1) = &residues[0];
    let (p2, r2) = &residues[1];
    let (p3, r3) = &residues[2];
    let modulus = *p1 as i128 * *p2 as i128;
    let p1_inv_mod_p2 = pow_mod(*p1 % *p2, *p2 - 2, *p2);
    let mut coeffs = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        // x = r1 + p1 * ((r2 - r1) * p1^-1 mod p2), lifted to the symmetric range.
        let diff = (r2[k] as i128 - r1[k] as i128).rem_euclid(*p2 as i128) as u64;
        let h = mul_mod(diff, p1_inv_mod_p2, *p2);
        let mut x = r1[k] as i128 + *p1 as i128 * h as i128;
        if x > modulus / 2 {
            x -= modulus;
        }
        if x.rem_euclid(*p3 as i128) as u64 != r3[k] {
            return Err(InvariantError::Alexander(format!("coefficient of degree {k} exceeds the modulus")));
        }
        coeffs.push(x);
    }
    Ok(Some(IntPolynomial::from_coeffs(coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;
    use crate::skein;

    fn check(n: usize, word: &[i64]) {
        let s = BraidWord::new(n, word.to_vec()).unwrap().to_slices();
        let d = s.to_link_diagram();
        let max = d.component_count() + 3;
        let expected = skein::conway_upto(&d, max).unwrap();
        match conway_upto(&s, max).unwrap() {
            Some(p) => assert_eq!(p, expected, "word {word:?}"),
            None => assert_eq!(expected.coeff(d.component_count() - 1), 0),
        }
    }

    #[test]
    fn primes_are_prime() {
        let ps = primes(3);
        assert_eq!(ps[0], (1 << 61) - 1);
        assert!(ps.iter().all(|&p| is_prime(p)));
        assert!(!is_prime(1 << 40));
    }

    #[test]
    fn agrees_with_skein_on_braids() {
        check(2, &[1, 1, 1]);
        check(2, &[1, 1]);
        check(2, &[-1, -1, -1, -1]);
        check(3, &[1, -2, 1, -2]);
        check(3, &[1, 2, 1, 2, 1, 2]);
        check(3, &[1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
        check(3, &[-1, -2, -1, -2, -1, -2, 1, 1]);
        check(4, &[1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3, 2, 2]);
    }

    #[test]
    fn agrees_with_skein_on_reversed_and_cabled() {
        let s = BraidWord::new(3, vec![1, 2, 1, 2, 1, 2]).unwrap().to_slices();
        for variant in [
            s.reverse_component(1).unwrap(),
            s.reverse_component(2).unwrap().mirror(),
            s.cable(&[2, 1, 1], true).unwrap(),
            s.reverse_component(3).unwrap().cable(&[1, 2, 1], true).unwrap(),
            s.sublink(&[1, 3]).unwrap().cable(&[2, 2], true).unwrap(),
        ] {
            let d = variant.to_link_diagram();
            let max = d.component_count() + 1;
            let expected = skein::conway_upto(&d, max).unwrap();
            assert_eq!(conway_upto(&variant, max).unwrap().unwrap(), expected);
        }
    }
}
