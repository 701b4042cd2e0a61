//! Root systems of `Q^perp`, their simple systems and weight data.
//!
//! Roots are the lattice vectors with `rho.rho = -2`, `rho.Q = 0`. For
//! degrees 1..6 this is E8, E7, E6, D5, A4, A2+A1; degree 7 gives a single
//! A1, degree 8 odd is empty, the even quadric component is again A1.

use super::{Basis, LatticeVector, RationalVector};
use crate::error::{Error, Result};
use crate::rat::{int, Rat};
use num::Zero;
use std::collections::BTreeSet;
use std::sync::Mutex;
use std::sync::OnceLock;

/// All roots of `Q^perp`, sorted by coefficient vector.
///
/// Coefficients of roots in the `(h, e_i)` basis are bounded by
/// `|h-coefficient| <= 3` on every del Pezzo Picard lattice; the enumeration
/// below is exhaustive under that bound and the counts are pinned by tests.
pub fn roots_of_qperp(basis: Basis) -> Result<Vec<LatticeVector>> {
    match basis {
        Basis::DelPezzo(0) => Err(Error::domain(
            "degree 0 has an affine (infinite) root system; supported degrees are 1..=9 and 8e"
                .to_string(),
        )),
        Basis::DelPezzo(d) if (1..=9).contains(&d) => Ok(enumerate_diagonal_roots(d)),
        Basis::Quadric => Ok(vec![
            LatticeVector::new(basis, vec![1, -1]).unwrap(),
            LatticeVector::new(basis, vec![-1, 1]).unwrap(),
        ]),
        Basis::DelPezzo(d) => Err(Error::domain(format!(
            "unsupported degree {d}; supported degrees are 1..=9 and 8e"
        ))),
    }
}

fn enumerate_diagonal_roots(d: i64) -> Vec<LatticeVector> {
    let n = (9 - d) as usize;
    let basis = Basis::DelPezzo(d);
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    for a in -3..=3i64 {
        // rho.Q = 0 forces sum(b_i) = -3a; rho.rho = -2 forces sum(b_i^2) = a^2 + 2.
        let target_sum = -3 * a;
        let target_sq = a * a + 2;
        rec(&mut out, basis, a, &mut cur, 0, 0, 0, target_sum, target_sq);
    }
    out.sort_by(|x, y| x.coeffs.cmp(&y.coeffs));
    out
}

#[allow(clippy::too_many_arguments)]
fn rec(
    out: &mut Vec<LatticeVector>,
    basis: Basis,
    a: i64,
    cur: &mut Vec<i64>,
    i: usize,
    sum: i64,
    sq: i64,
    target_sum: i64,
    target_sq: i64,
) {
    let n = cur.len();
    if sq > target_sq || (target_sum - sum).abs() > 3 * (n - i) as i64 {
        return;
    }
    if i == n {
        if sum == target_sum && sq == target_sq {
            let mut coeffs = Vec::with_capacity(n + 1);
            coeffs.push(a);
            coeffs.extend_from_slice(cur);
            out.push(LatticeVector { basis, coeffs });
        }
        return;
    }
    for b in -3..=3i64 {
        cur[i] = b;
        rec(out, basis, a, cur, i + 1, sum + b, sq + b * b, target_sum, target_sq);
        cur[i] = 0;
    }
}

/// Declared simple roots: `h - e1 - e2 - e3` followed by `e_i - e_{i+1}`.
pub fn simple_roots(basis: Basis) -> Vec<LatticeVector> {
    match basis {
        Basis::DelPezzo(d) => {
            let n = (10 - d) as usize;
            let mut out = Vec::new();
            if n >= 4 {
                let mut c = vec![0; n];
                c[0] = 1;
                c[1] = -1;
                c[2] = -1;
                c[3] = -1;
                out.push(LatticeVector { basis, coeffs: c });
            }
            for i in 1..n - 1 {
                let mut c = vec![0; n];
                c[i] = 1;
                c[i + 1] = -1;
                out.push(LatticeVector { basis, coeffs: c });
            }
            out
        }
        Basis::Quadric => vec![LatticeVector::new(basis, vec![1, -1]).unwrap()],
    }
}

/// Reflection in a root, in either form (roots have intersection norm -2).
pub fn reflect(x: &LatticeVector, root: &LatticeVector) -> LatticeVector {
    let c = -x.dot(root).expect("matching basis"); // positive-form pairing
    x.sub(&root.scale(c))
}

pub fn reflect_rational(x: &RationalVector, root: &LatticeVector) -> RationalVector {
    let c = -x.dot(&root.to_rational()).expect("matching basis");
    x.sub(&root.to_rational().scale(&c))
}

/// Cached invariants of the root system of one lattice.
pub struct RootData {
    pub basis: Basis,
    pub roots: Vec<LatticeVector>,
    pub simples: Vec<LatticeVector>,
    /// Positive-form Gram matrix of the simple roots.
    pub gram: Vec<Vec<i64>>,
    /// Partition of simple-root indices into irreducible factors.
    pub factors: Vec<Vec<usize>>,
    /// Highest root of each factor.
    pub highest: Vec<LatticeVector>,
    /// Marks of each factor's highest root in the simple basis (factor order).
    pub marks: Vec<Vec<i64>>,
    /// Fundamental weights dual to the simple roots under the positive form.
    pub weights: Vec<RationalVector>,
    root_set: BTreeSet<Vec<i64>>,
}

static CACHE: OnceLock<Mutex<Vec<(Basis, &'static RootData)>>> = OnceLock::new();

impl RootData {
    /// Cached lookup; panics on degree 0 where no finite root system exists.
    pub fn get(basis: Basis) -> Result<&'static RootData> {
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().unwrap();
        if let Some((_, data)) = guard.iter().find(|(b, _)| *b == basis) {
            return Ok(data);
        }
        let data = Box::leak(Box::new(RootData::build(basis)?));
        guard.push((basis, data));
        Ok(data)
    }

    fn build(basis: Basis) -> Result<RootData> {
        let roots = roots_of_qperp(basis)?;
        let simples = simple_roots(basis);
        let n = simples.len();
        let mut gram = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = simples[i].pos_dot(&simples[j])?;
            }
        }
        // connected components of the Coxeter graph
        let mut seen = vec![false; n];
        let mut factors = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![i];
            while let Some(x) = stack.pop() {
                if seen[x] {
                    continue;
                }
                seen[x] = true;
                comp.push(x);
                for y in 0..n {
                    if y != x && gram[x][y] != 0 && !seen[y] {
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            factors.push(comp);
        }
        factors.sort();

        let root_set: BTreeSet<Vec<i64>> = roots.iter().map(|r| r.coeffs.clone()).collect();
        let weights = fundamental_weights(&simples, &gram)?;

        let mut highest = Vec::new();
        let mut marks = Vec::new();
        for factor in &factors {
            let hr = highest_root(&roots, &simples, &weights, factor)?;
            let mk = simple_coords(&hr.to_rational(), &simples, &gram)?;
            let factor_marks: Vec<i64> = factor
                .iter()
                .map(|&j| {
                    debug_assert!(crate::rat::is_integer(&mk[j]));
                    *mk[j].numer() as i64
                })
                .collect();
            highest.push(hr);
            marks.push(factor_marks);
        }

        Ok(RootData {
            basis,
            roots,
            simples,
            gram,
            factors,
            highest,
            marks,
            weights,
            root_set,
        })
    }

    pub fn is_root(&self, v: &LatticeVector) -> bool {
        v.basis == self.basis && self.root_set.contains(&v.coeffs)
    }

    /// A root is positive iff its simple-basis coordinates are nonnegative.
    pub fn is_positive_root(&self, v: &LatticeVector) -> bool {
        if !self.is_root(v) {
            return false;
        }
        match simple_coords(&v.to_rational(), &self.simples, &self.gram) {
            Ok(c) => c.iter().all(|x| *x >= Rat::zero()),
            Err(_) => false,
        }
    }

    pub fn positive_roots(&self) -> Vec<LatticeVector> {
        self.roots
            .iter()
            .filter(|r| self.is_positive_root(r))
            .cloned()
            .collect()
    }

    /// Coordinates of `x` in the simple-root basis (positive form), if `x`
    /// lies in the span of the simple roots.
    pub fn simple_coordinates(&self, x: &RationalVector) -> Result<Vec<Rat>> {
        simple_coords(x, &self.simples, &self.gram)
    }

    /// Orthogonal projection of `x` onto the span of the simple roots.
    pub fn project_to_root_span(&self, x: &RationalVector) -> Result<RationalVector> {
        let coords = self.simple_coordinates(x)?;
        let mut acc = RationalVector::zero(self.basis);
        for (c, s) in coords.iter().zip(&self.simples) {
            acc = acc.add(&s.to_rational().scale(c));
        }
        Ok(acc)
    }
}

/// Solve for the weights dual to the simple roots: `<w_i, a_j> = delta_ij`.
fn fundamental_weights(
    simples: &[LatticeVector],
    gram: &[Vec<i64>],
) -> Result<Vec<RationalVector>> {
    let n = simples.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rhs: Vec<Rat> = (0..n).map(|j| if i == j { int(1) } else { int(0) }).collect();
        let coeffs = solve_gram(gram, &rhs)?;
        let basis = simples
            .first()
            .map(|s| s.basis)
            .unwrap_or(Basis::DelPezzo(9));
        let mut w = RationalVector::zero(basis);
        for (c, s) in coeffs.iter().zip(simples) {
            w = w.add(&s.to_rational().scale(c));
        }
        out.push(w);
    }
    Ok(out)
}

fn solve_gram(gram: &[Vec<i64>], rhs: &[Rat]) -> Result<Vec<Rat>> {
    let n = gram.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = gram[i].iter().map(|&x| int(x)).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n)
            .find(|&r| !m[r][c].is_zero())
            .ok_or_else(|| Error::domain("singular Gram matrix".to_string()))?;
        m.swap(c, pivot);
        let pv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= pv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c];
                for j in 0..=n {
                    let sub = f * m[c][j];
                    m[r][j] -= sub;
                }
            }
        }
    }
    Ok((0..n).map(|i| m[i][n]).collect())
}

fn simple_coords(
    x: &RationalVector,
    simples: &[LatticeVector],
    gram: &[Vec<i64>],
) -> Result<Vec<Rat>> {
    let rhs: Vec<Rat> = simples
        .iter()
        .map(|s| x.pos_dot(&s.to_rational()))
        .collect::<Result<_>>()?;
    solve_gram(gram, &rhs)
}

/// The positive root of a factor pairing nonnegatively with every simple root.
fn highest_root(
    roots: &[LatticeVector],
    simples: &[LatticeVector],
    weights: &[RationalVector],
    factor: &[usize],
) -> Result<LatticeVector> {
    let mut best: Option<(Rat, LatticeVector)> = None;
    for r in roots {
        // must lie in the factor's span: pairings with other-factor weights vanish
        let mut in_factor = true;
        for (j, w) in weights.iter().enumerate() {
            let c = r.to_rational().pos_dot(w)?;
            if factor.contains(&j) {
                continue;
            }
            if !c.is_zero() {
                in_factor = false;
                break;
            }
        }
        if !in_factor {
            continue;
        }
        if factor
            .iter()
            .any(|&j| r.pos_dot(&simples[j]).unwrap() < 0)
        {
            continue;
        }
        let height: Rat = {
            let mut acc = Rat::zero();
            for w in weights {
                acc += r.to_rational().pos_dot(w)?;
            }
            acc
        };
        match &best {
            Some((h, _)) if *h >= height => {}
            _ => best = Some((height, r.clone())),
        }
    }
    best.map(|(_, r)| r)
        .ok_or_else(|| Error::domain("factor has no dominant root".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts_match_e_series() {
        // brute-force enumeration is the oracle; counts pinned to E8..A1
        let expected = [(1, 240), (2, 126), (3, 72), (4, 40), (5, 20), (6, 8), (7, 2)];
        for (d, n) in expected {
            let roots = roots_of_qperp(Basis::DelPezzo(d)).unwrap();
            assert_eq!(roots.len(), n, "root count at degree {d}");
            for r in &roots {
                assert_eq!(r.dot(&r).unwrap(), -2);
                assert_eq!(r.dot_q(), 0);
            }
        }
        assert!(roots_of_qperp(Basis::DelPezzo(8)).unwrap().is_empty());
        assert!(roots_of_qperp(Basis::DelPezzo(9)).unwrap().is_empty());
        assert_eq!(roots_of_qperp(Basis::Quadric).unwrap().len(), 2);
        assert!(roots_of_qperp(Basis::DelPezzo(0)).is_err());
    }

    #[test]
    fn e8_marks() {
        let data = RootData::get(Basis::DelPezzo(1)).unwrap();
        assert_eq!(data.factors.len(), 1);
        assert_eq!(data.marks[0], vec![3, 2, 4, 6, 5, 4, 3, 2]);
        // the affine-diagram identity: marks sum + 1 = Coxeter number 30
        let total: i64 = data.marks[0].iter().sum();
        assert_eq!(total + 1, 30);
    }

    #[test]
    fn degree_six_factors() {
        let data = RootData::get(Basis::DelPezzo(6)).unwrap();
        assert_eq!(data.factors.len(), 2);
        let sizes: Vec<usize> = data.factors.iter().map(|f| f.len()).collect();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn positive_roots_are_half() {
        for d in 1..=7 {
            let data = RootData::get(Basis::DelPezzo(d)).unwrap();
            let pos = data.positive_roots();
            assert_eq!(pos.len() * 2, data.roots.len(), "degree {d}");
            for r in &pos {
                let coords = data.simple_coordinates(&r.to_rational()).unwrap();
                assert!(coords.iter().all(|c| *c >= Rat::zero()));
            }
        }
    }

    #[test]
    fn weights_are_dual_to_simples() {
        let data = RootData::get(Basis::DelPezzo(1)).unwrap();
        for (i, w) in data.weights.iter().enumerate() {
            for (j, s) in data.simples.iter().enumerate() {
                let c = w.pos_dot(&s.to_rational()).unwrap();
                assert_eq!(c, int(if i == j { 1 } else { 0 }));
            }
        }
        // norms of the fundamental weights of E8 in our node order
        let norms: Vec<Rat> = data.weights.iter().map(|w| w.norm_pos()).collect();
        let expected: Vec<Rat> = [8, 4, 14, 30, 20, 12, 6, 2].iter().map(|&n| int(n)).collect();
        assert_eq!(norms, expected);
    }

    #[test]
    fn reflection_preserves_form() {
        let data = RootData::get(Basis::DelPezzo(2)).unwrap();
        let v = LatticeVector::new(Basis::DelPezzo(2), vec![2, -1, 3, 0, 1, -2, 4, 1]).unwrap();
        let w = LatticeVector::new(Basis::DelPezzo(2), vec![1, 1, 0, -1, 2, 0, -3, 2]).unwrap();
        for root in data.roots.iter().take(24) {
            let rv = reflect(&v, root);
            let rw = reflect(&w, root);
            assert_eq!(rv.dot(&rw).unwrap(), v.dot(&w).unwrap());
            assert_eq!(reflect(&rv, root), v, "involution");
        }
    }
}
