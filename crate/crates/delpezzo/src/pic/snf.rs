//! Smith normal form over the integers, plus the small integer-linear-algebra
//! helpers built on it (kernel bases, membership in a sublattice).

use super::{Basis, LatticeVector};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub rank: usize,
    /// Elementary divisors d_1 | d_2 | ... (including 1s), one per pivot.
    pub divisors: Vec<i64>,
}

impl SmithForm {
    pub fn torsion(&self) -> Vec<i64> {
        self.divisors.iter().copied().filter(|&d| d > 1).collect()
    }
}

/// Smith normal form invariants of an integer matrix.
pub fn smith_invariants(matrix: &[Vec<i64>]) -> SmithForm {
    if matrix.is_empty() || matrix[0].is_empty() {
        return SmithForm {
            rank: 0,
            divisors: vec![],
        };
    }
    let mut m: Vec<Vec<i128>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    let divisors = snf_in_place(&mut m);
    SmithForm {
        rank: divisors.len(),
        divisors: divisors.iter().map(|&d| d as i64).collect(),
    }
}

fn snf_in_place(m: &mut Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m[0].len();
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut dirty = false;
        for i in (t + 1)..rows {
            let q = m[i][t].div_euclid(m[t][t]);
            if q != 0 {
                for j in t..cols {
                    m[i][j] -= q * m[t][j];
                }
            }
            if m[i][t] != 0 {
                dirty = true;
            }
        }
        for j in (t + 1)..cols {
            let q = m[t][j].div_euclid(m[t][t]);
            if q != 0 {
                for row in m.iter_mut() {
                    row[j] -= q * row[t];
                }
            }
            if m[t][j] != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // divisibility: fold in a violating row so the pivot shrinks next pass
        let p = m[t][t];
        let mut fixed = true;
        'outer: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if m[i][j] % p != 0 {
                    for jj in t..cols {
                        let add = m[i][jj];
                        m[t][jj] += add;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        divisors.push(p.abs());
        t += 1;
    }
    divisors
}

/// Integer basis of the kernel of the 1 x n matrix `v . x = 0` over the
/// Picard lattice: a basis of `Q^perp` as an abelian group.
pub fn qperp_basis(basis: Basis) -> Result<Vec<LatticeVector>> {
    let q = LatticeVector::anticanonical(basis);
    let n = basis.dim();
    // functional x -> x.Q in coordinates
    let mut coeffs = vec![0i64; n];
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        let v = LatticeVector::new(basis, e)?;
        coeffs[i] = v.dot(&q)?;
    }
    let ker = integer_kernel(&[coeffs]);
    ker.into_iter()
        .map(|k| LatticeVector::new(basis, k.iter().map(|&x| x as i64).collect()))
        .collect()
}

/// Basis of the integer kernel {x : M x = 0} of a small integer matrix.
pub fn integer_kernel(matrix: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let rows = matrix.len();
    if rows == 0 {
        return vec![];
    }
    let cols = matrix[0].len();
    let mut m: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // column operations tracked in u (cols x cols identity at start)
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut t = 0;
    for row in 0..rows {
        if t >= cols {
            break;
        }
        loop {
            let Some(pj) = (t..cols).find(|&j| m[row][j] != 0) else {
                break;
            };
            // move the smallest nonzero entry of this row block to column t
            let mut best = pj;
            for j in t..cols {
                if m[row][j] != 0 && m[row][j].abs() < m[row][best].abs() {
                    best = j;
                }
            }
            for r in m.iter_mut() {
                r.swap(t, best);
            }
            u.swap(t, best);
            let p = m[row][t];
            let mut clean = true;
            for j in (t + 1)..cols {
                let q = m[row][j].div_euclid(p);
                if q != 0 {
                    for r in m.iter_mut() {
                        r[j] -= q * r[t];
                    }
                    for k in 0..cols {
                        let sub = q * u[t][k];
                        u[j][k] -= sub;
                    }
                }
                if m[row][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                t += 1;
                break;
            }
        }
    }
    (t..cols).map(|j| u[j].clone()).collect()
}

/// Solve `sum_i x_i rows[i] = target` over the integers, if possible.
pub fn solve_integer(rows: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    if rows.is_empty() {
        return if target.iter().all(|&t| t == 0) {
            Some(vec![])
        } else {
            None
        };
    }
    let n = rows.len();
    let cols = rows[0].len();
    // augment: does target lie in the row lattice? Use SNF bookkeeping via
    // Gaussian-style elimination with the extended-gcd pivoting.
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut trans: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut tgt: Vec<i128> = target.iter().map(|&x| x as i128).collect();
    let mut coeff = vec![0i128; n];
    let mut r0 = 0;
    for c in 0..cols {
        // gcd-eliminate column c below r0
        loop {
            let nz: Vec<usize> = (r0..n).filter(|&i| m[i][c] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let &imin = nz
                .iter()
                .min_by_key(|&&i| m[i][c].abs())
                .unwrap();
            for &i in &nz {
                if i == imin {
                    continue;
                }
                let q = m[i][c].div_euclid(m[imin][c]);
                for j in 0..cols {
                    m[i][j] -= q * m[imin][j];
                }
                for j in 0..n {
                    let sub = q * trans[imin][j];
                    trans[i][j] -= sub;
                }
            }
        }
        if let Some(piv) = (r0..n).find(|&i| m[i][c] != 0) {
            m.swap(r0, piv);
            trans.swap(r0, piv);
            // reduce target against this pivot row
            if tgt[c] != 0 {
                if tgt[c] % m[r0][c] != 0 {
                    return None;
                }
                let q = tgt[c] / m[r0][c];
                for j in 0..cols {
                    tgt[j] -= q * m[r0][j];
                }
                for j in 0..n {
                    coeff[j] += q * trans[r0][j];
                }
            }
            r0 += 1;
        } else if tgt[c] != 0 {
            return None;
        }
    }
    if tgt.iter().any(|&t| t != 0) {
        return None;
    }
    Some(coeff.iter().map(|&x| x as i64).collect())
}

/// Elementary divisors (> 1) of the saturation quotient of the span of the
/// given vectors inside the ambient lattice.
pub fn saturation_torsion(vectors: &[LatticeVector]) -> Result<Vec<i64>> {
    if vectors.is_empty() {
        return Ok(vec![]);
    }
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.coeffs.clone()).collect();
    let b = vectors[0].basis;
    for v in vectors {
        if v.basis != b {
            return Err(Error::dimension("mixed lattice contexts".to_string()));
        }
    }
    Ok(smith_invariants(&rows).torsion())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_scalar() {
        let id3 = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let s = smith_invariants(&id3);
        assert_eq!(s.rank, 3);
        assert_eq!(s.divisors, vec![1, 1, 1]);

        let two = vec![vec![2]];
        let s = smith_invariants(&two);
        assert_eq!(s.rank, 1);
        assert_eq!(s.divisors, vec![2]);
    }

    #[test]
    fn divisibility_chain() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]];
        let s = smith_invariants(&m);
        assert_eq!(s.rank, 3);
        for w in s.divisors.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        // |det| must equal the product of divisors
        let det = 2 * (6 * 16 - 12 * 4) - 4 * (-6 * 16 - 12 * 10) + 4 * (-6 * 4 - 6 * 10);
        let prod: i64 = s.divisors.iter().product();
        assert_eq!(prod, det.abs());
    }

    #[test]
    fn kernel_of_q_functional() {
        for d in 1..=9 {
            let basis = Basis::DelPezzo(d);
            let ker = qperp_basis(basis).unwrap();
            assert_eq!(ker.len(), basis.dim() - 1);
            for v in &ker {
                assert_eq!(v.dot_q(), 0, "degree {d}");
            }
            // saturated: the kernel of a surjective functional always is
            let rows: Vec<Vec<i64>> = ker.iter().map(|v| v.coeffs.clone()).collect();
            let s = smith_invariants(&rows);
            assert!(s.torsion().is_empty());
        }
    }

    #[test]
    fn integer_solve() {
        let rows = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve_integer(&rows, &[4, -3]), Some(vec![2, -1]));
        assert_eq!(solve_integer(&rows, &[1, 0]), None);
        assert!(solve_integer(&[], &[0, 0]).is_some());
        assert!(solve_integer(&[], &[1]).is_none());
    }

    #[test]
    fn random_snf_matches_rank_and_det() {
        // tiny deterministic pseudo-random matrices, checked against the
        // rational rank and determinant computed by fraction-free elimination
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        for _ in 0..50 {
            let m: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| next()).collect()).collect();
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            let s = smith_invariants(&m);
            if det != 0 {
                assert_eq!(s.rank, 3);
                let prod: i64 = s.divisors.iter().product();
                assert_eq!(prod, det.abs());
            } else {
                assert!(s.rank < 3);
            }
        }
    }
}
