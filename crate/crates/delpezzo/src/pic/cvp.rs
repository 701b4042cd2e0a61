//! Exact closest-vector search in `Q^perp` under the negated intersection
//! form, by branch-and-bound enumeration over an integer basis.
//!
//! The lattices have rank at most 8 and tiny Gram entries, so exhaustive
//! enumeration inside the Babai-seeded radius is instant and needs no
//! floating point anywhere.

use super::snf::qperp_basis;
use super::{Basis, LatticeVector, RationalVector};
use crate::error::{Error, Result};
use crate::rat::{int, round_nearest, Rat};
use num::Zero;

#[derive(Clone, Debug)]
pub struct CvpResult {
    /// Squared distance in the positive form.
    pub dist2: Rat,
    /// Every lattice vector attaining it, canonically sorted.
    pub minimizers: Vec<LatticeVector>,
}

struct Ldl {
    l: Vec<Vec<Rat>>, // unit lower triangular
    d: Vec<Rat>,      // positive diagonal
}

fn ldl(gram: &[Vec<i64>]) -> Ldl {
    let n = gram.len();
    let mut l = vec![vec![Rat::zero(); n]; n];
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = int(gram[j][j]);
        for k in 0..j {
            dj -= l[j][k] * l[j][k] * d[k];
        }
        d[j] = dj;
        l[j][j] = int(1);
        for i in (j + 1)..n {
            let mut v = int(gram[i][j]);
            for k in 0..j {
                v -= l[i][k] * l[j][k] * d[k];
            }
            l[i][j] = v / dj;
        }
    }
    Ldl { l, d }
}

struct Search<'a> {
    ldl: &'a Ldl,
    y: &'a [Rat],
    best: Rat,
    hits: Vec<Vec<i128>>,
    collect_all_in_ball: bool,
}

impl Search<'_> {
    /// Fix coordinate `i` (levels descend from n-1 to 0). `partial` is the
    /// cost of the coordinates above `i`; `shift[t]` holds the accumulated
    /// corrections `sum_{fixed j > t} L[j][t] (z_j - y_j)`.
    fn descend(&mut self, i: usize, partial: Rat, z: &mut Vec<i128>, shift: &mut Vec<Rat>) {
        let center = self.y[i] - shift[i];
        let di = self.ldl.d[i];
        let budget = self.best - partial;
        if budget < Rat::zero() {
            return;
        }
        let mid = round_nearest(&center);
        // valid candidates form a contiguous interval around the center
        let mut offsets: Vec<i128> = Vec::new();
        let mut k = 0i128;
        loop {
            let before = offsets.len();
            let delta = Rat::from_integer(mid + k) - center;
            if di * delta * delta <= budget {
                offsets.push(mid + k);
            }
            if k > 0 {
                let delta = Rat::from_integer(mid - k) - center;
                if di * delta * delta <= budget {
                    offsets.push(mid - k);
                }
            }
            if offsets.len() == before && k > 0 {
                break;
            }
            k += 1;
            assert!(k <= 1 << 20, "runaway CVP enumeration");
        }
        for cand in offsets {
            let delta = Rat::from_integer(cand) - center;
            let cost = partial + di * delta * delta;
            if cost > self.best {
                continue;
            }
            z[i] = cand;
            if i == 0 {
                if self.collect_all_in_ball {
                    self.hits.push(z.clone());
                } else if cost < self.best {
                    self.best = cost;
                    self.hits.clear();
                    self.hits.push(z.clone());
                } else {
                    self.hits.push(z.clone());
                }
            } else {
                let w = Rat::from_integer(cand) - self.y[i];
                for t in 0..i {
                    let add = self.ldl.l[i][t] * w;
                    shift[t] += add;
                }
                self.descend(i - 1, cost, z, shift);
                for t in 0..i {
                    let sub = self.ldl.l[i][t] * w;
                    shift[t] -= sub;
                }
            }
        }
    }
}

fn run_search(
    gram: &[Vec<i64>],
    y: &[Rat],
    initial: Rat,
    collect_all_in_ball: bool,
) -> (Rat, Vec<Vec<i128>>) {
    let n = gram.len();
    let dec = ldl(gram);
    let mut search = Search {
        ldl: &dec,
        y,
        best: initial,
        hits: Vec::new(),
        collect_all_in_ball,
    };
    let mut z = vec![0i128; n];
    let mut shift = vec![Rat::zero(); n];
    search.descend(n - 1, Rat::zero(), &mut z, &mut shift);
    (search.best, search.hits)
}

/// Babai nearest-plane estimate, used only to seed the search radius.
fn babai(ldl_dec: &Ldl, y: &[Rat]) -> Vec<i128> {
    let n = y.len();
    let mut z = vec![0i128; n];
    let mut shift = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let center = y[i] - shift[i];
        z[i] = round_nearest(&center);
        let zi = Rat::from_integer(z[i]) - y[i];
        for t in 0..i {
            shift[t] += ldl_dec.l[i][t] * zi;
        }
    }
    z
}

fn norm_in_gram(gram: &[Vec<i64>], y: &[Rat], z: &[i128]) -> Rat {
    let n = y.len();
    let diff: Vec<Rat> = (0..n).map(|i| Rat::from_integer(z[i]) - y[i]).collect();
    let mut acc = Rat::zero();
    for i in 0..n {
        for j in 0..n {
            acc += diff[i] * diff[j] * int(gram[i][j]);
        }
    }
    acc
}

fn target_coords(
    basis_vecs: &[LatticeVector],
    gram: &[Vec<i64>],
    target: &RationalVector,
) -> Result<Vec<Rat>> {
    let n = basis_vecs.len();
    let rhs: Vec<Rat> = basis_vecs
        .iter()
        .map(|b| target.pos_dot(&b.to_rational()))
        .collect::<Result<_>>()?;
    // solve gram * y = rhs
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = gram[i].iter().map(|&g| int(g)).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !m[r][c].is_zero())
            .ok_or_else(|| Error::domain("degenerate Gram matrix".to_string()))?;
        m.swap(c, p);
        let pv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= pv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c];
                for j in 0..=n {
                    let s = f * m[c][j];
                    m[r][j] -= s;
                }
            }
        }
    }
    Ok((0..n).map(|i| m[i][n]).collect())
}

fn setup(target: &RationalVector) -> Result<(Vec<LatticeVector>, Vec<Vec<i64>>, Vec<Rat>)> {
    if !target.dot_q().is_zero() {
        return Err(Error::domain(format!(
            "CVP target must lie in Q^perp (target.Q = {})",
            target.dot_q()
        )));
    }
    if target.basis == Basis::DelPezzo(0) {
        return Err(Error::domain(
            "Q^perp is degenerate at degree 0; CVP is not defined there".to_string(),
        ));
    }
    let basis_vecs = qperp_basis(target.basis)?;
    let n = basis_vecs.len();
    let mut gram = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = basis_vecs[i].pos_dot(&basis_vecs[j])?;
        }
    }
    let y = target_coords(&basis_vecs, &gram, target)?;
    Ok((basis_vecs, gram, y))
}

fn assemble(basis_vecs: &[LatticeVector], z: &[i128]) -> LatticeVector {
    let mut acc = LatticeVector::zero(basis_vecs[0].basis);
    for (zi, b) in z.iter().zip(basis_vecs) {
        acc = acc.add(&b.scale(*zi as i64));
    }
    acc
}

/// All closest lattice vectors of `Q^perp` to `target`, with the squared
/// distance in the positive form.
pub fn closest_vectors(target: &RationalVector) -> Result<CvpResult> {
    let (basis_vecs, gram, y) = setup(target)?;
    let dec = ldl(&gram);
    let seed = babai(&dec, &y);
    let initial = norm_in_gram(&gram, &y, &seed);
    let (dist2, hits) = run_search(&gram, &y, initial, false);
    let mut minimizers: Vec<LatticeVector> = hits.iter().map(|z| assemble(&basis_vecs, z)).collect();
    minimizers.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    minimizers.dedup();
    Ok(CvpResult { dist2, minimizers })
}

/// Every lattice vector of `Q^perp` within squared distance `radius2` of the
/// target (inclusive), canonically sorted.
pub fn closest_vectors_in_ball(target: &RationalVector, radius2: Rat) -> Result<Vec<LatticeVector>> {
    let (basis_vecs, gram, y) = setup(target)?;
    let (_, hits) = run_search(&gram, &y, radius2, true);
    let mut out: Vec<LatticeVector> = hits.iter().map(|z| assemble(&basis_vecs, z)).collect();
    out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn zero_target() {
        let t = RationalVector::zero(Basis::DelPezzo(1));
        let res = closest_vectors(&t).unwrap();
        assert!(res.dist2.is_zero());
        assert_eq!(res.minimizers.len(), 1);
        assert!(res.minimizers[0].is_zero());
    }

    #[test]
    fn midpoint_of_a_norm_two_vector() {
        // target = rho/2 for a root rho: distance^2 = 1/2, minimizers {0, rho}
        let data = super::super::roots::RootData::get(Basis::DelPezzo(1)).unwrap();
        let rho = data.roots[17].clone();
        let target = rho.to_rational().scale(&rat(1, 2));
        let res = closest_vectors(&target).unwrap();
        assert_eq!(res.dist2, rat(1, 2));
        assert_eq!(res.minimizers.len(), 2);
        assert!(res.minimizers.contains(&LatticeVector::zero(Basis::DelPezzo(1))));
        assert!(res.minimizers.contains(&rho));
    }

    #[test]
    fn deep_hole_distance_is_one() {
        // the order-two alcove vertex of E8 is a deep hole
        let data = super::super::roots::RootData::get(Basis::DelPezzo(1)).unwrap();
        let hole = data.weights[1].scale(&rat(1, 2));
        let res = closest_vectors(&hole).unwrap();
        assert_eq!(res.dist2, int(1));
    }

    #[test]
    fn ball_listing_contains_minimizers() {
        let data = super::super::roots::RootData::get(Basis::DelPezzo(4)).unwrap();
        let t = data.weights[2].scale(&rat(1, 3));
        let res = closest_vectors(&t).unwrap();
        let ball = closest_vectors_in_ball(&t, int(4)).unwrap();
        for m in &res.minimizers {
            assert!(ball.contains(m));
        }
        // everything in the ball is at least dist2 away
        for v in &ball {
            let d = t.sub(&v.to_rational()).norm_pos();
            assert!(d >= res.dist2);
            assert!(d <= int(4));
        }
    }
}
