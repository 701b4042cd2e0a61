//! ADE classification of root subsystems and their orthogonal complements.

use super::roots::{reflect, RootData};
use super::snf::saturation_torsion;
use super::{Basis, LatticeVector};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// One irreducible ADE factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CartanType {
    pub letter: char,
    pub rank: usize,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter, self.rank)
    }
}

/// Factors printed largest first, e.g. "A5A1".
pub fn type_string(factors: &[CartanType]) -> String {
    let mut sorted = factors.to_vec();
    sorted.sort_by(|a, b| b.rank.cmp(&a.rank).then(a.letter.cmp(&b.letter)));
    sorted.iter().map(|t| t.to_string()).collect()
}

/// Affine-diagram marks of one ADE factor, as a sorted multiset including the
/// affine node's 1.
pub fn affine_marks(t: CartanType) -> Vec<i64> {
    let n = t.rank;
    let mut marks: Vec<i64> = match t.letter {
        'A' => vec![1; n + 1],
        'D' => {
            // affine D_n: four end nodes 1, the rest 2
            let mut m = vec![1, 1, 1, 1];
            m.extend(std::iter::repeat(2).take(n.saturating_sub(3)));
            m
        }
        'E' => match n {
            6 => vec![1, 1, 1, 2, 2, 2, 3],
            7 => vec![1, 1, 2, 2, 2, 3, 3, 4],
            8 => vec![1, 2, 2, 3, 3, 4, 4, 5, 6],
            _ => unreachable!("E-type rank {n}"),
        },
        _ => unreachable!(),
    };
    marks.sort_unstable();
    marks
}

/// Report on a set of roots: the types of the generated subsystem and of its
/// orthogonal-root complement, the ambient rank they fail to span, and the
/// elementary divisors of the saturation of their integer span.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsystemReport {
    pub basis: Basis,
    pub input: Vec<LatticeVector>,
    pub cartan_type: Vec<CartanType>,
    pub orthogonal_type: Vec<CartanType>,
    pub rank_deficit: i64,
    pub torsion: Vec<i64>,
}

impl SubsystemReport {
    pub fn cartan_string(&self) -> String {
        type_string(&self.cartan_type)
    }
    pub fn orthogonal_string(&self) -> String {
        type_string(&self.orthogonal_type)
    }
}

/// Classify a simple system (pairwise positive-form products in {0, -1},
/// norms 2) by its Coxeter graph.
pub fn classify_simple_system(simples: &[LatticeVector]) -> Result<Vec<CartanType>> {
    let n = simples.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        if simples[i].pos_dot(&simples[i])? != 2 {
            return Err(Error::domain("simple system vector of norm != 2".to_string()));
        }
        for j in (i + 1)..n {
            match simples[i].pos_dot(&simples[j])? {
                0 => {}
                -1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                }
                g => {
                    return Err(Error::domain(format!(
                        "not a simple system: off-diagonal Gram entry {g}"
                    )))
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut factors = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            comp.push(x);
            stack.extend(adj[x].iter().copied().filter(|&y| !seen[y]));
        }
        let branch: Vec<usize> = comp.iter().copied().filter(|&x| adj[x].len() >= 3).collect();
        let k = comp.len();
        let t = if branch.is_empty() {
            // a path (cycles cannot occur in a positive definite simple system)
            CartanType {
                letter: 'A',
                rank: k,
            }
        } else {
            if branch.len() != 1 || adj[branch[0]].len() != 3 {
                return Err(Error::domain("invalid Coxeter graph".to_string()));
            }
            let b = branch[0];
            let mut legs: Vec<usize> = adj[b]
                .iter()
                .map(|&s| {
                    let mut len = 1;
                    let (mut prev, mut cur) = (b, s);
                    while let Some(&next) = adj[cur].iter().find(|&&y| y != prev) {
                        prev = cur;
                        cur = next;
                        len += 1;
                    }
                    len
                })
                .collect();
            legs.sort_unstable();
            if legs[0] == 1 && legs[1] == 1 {
                CartanType {
                    letter: 'D',
                    rank: k,
                }
            } else if legs[0] == 1 && legs[1] == 2 {
                CartanType {
                    letter: 'E',
                    rank: k,
                }
            } else {
                return Err(Error::domain("non-ADE Coxeter graph".to_string()));
            }
        };
        factors.push(t);
    }
    factors.sort_by(|a, b| b.rank.cmp(&a.rank).then(a.letter.cmp(&b.letter)));
    Ok(factors)
}

/// Extract the indecomposable positive roots of a symmetric root subset.
pub fn extract_simple_system(
    data: &RootData,
    subset: &BTreeSet<Vec<i64>>,
) -> Vec<LatticeVector> {
    let pos: Vec<LatticeVector> = subset
        .iter()
        .map(|c| LatticeVector {
            basis: data.basis,
            coeffs: c.clone(),
        })
        .filter(|v| data.is_positive_root(v))
        .collect();
    let pos_set: BTreeSet<&Vec<i64>> = pos.iter().map(|v| &v.coeffs).collect();
    pos.iter()
        .filter(|b| {
            !pos.iter().any(|g| {
                if g.coeffs == b.coeffs {
                    return false;
                }
                let diff = b.sub(g);
                pos_set.contains(&diff.coeffs)
            })
        })
        .cloned()
        .collect()
}

/// Reflection closure of a set of roots within the ambient root system.
pub fn reflection_closure(data: &RootData, roots: &[LatticeVector]) -> BTreeSet<Vec<i64>> {
    let mut closure: BTreeSet<Vec<i64>> = BTreeSet::new();
    for r in roots {
        closure.insert(r.coeffs.clone());
        closure.insert(r.neg().coeffs);
    }
    loop {
        let current: Vec<LatticeVector> = closure
            .iter()
            .map(|c| LatticeVector {
                basis: data.basis,
                coeffs: c.clone(),
            })
            .collect();
        let mut grew = false;
        for a in &current {
            for b in &current {
                let c = reflect(b, a);
                if data.is_root(&c) && closure.insert(c.coeffs.clone()) {
                    grew = true;
                }
            }
        }
        if !grew {
            return closure;
        }
    }
}

/// Roots of the ambient system orthogonal to every input vector.
pub fn orthogonal_roots(data: &RootData, vectors: &[LatticeVector]) -> Vec<LatticeVector> {
    data.roots
        .iter()
        .filter(|r| vectors.iter().all(|v| r.dot(v).unwrap() == 0))
        .cloned()
        .collect()
}

/// Classify the subsystem generated by the inputs and its orthogonal
/// complement; report rank deficit and saturation torsion.
pub fn subsystem_analyze(roots: &[LatticeVector]) -> Result<SubsystemReport> {
    let basis = roots.first().map(|r| r.basis).unwrap_or(Basis::DelPezzo(1));
    let data = RootData::get(basis)?;
    for r in roots {
        if r.basis != basis {
            return Err(Error::dimension("mixed lattice contexts".to_string()));
        }
        if !data.is_root(r) {
            return Err(Error::domain(format!("{} is not a root of Q^perp", r)));
        }
    }
    let cartan_type = if roots.is_empty() {
        vec![]
    } else {
        let closure = reflection_closure(data, roots);
        classify_simple_system(&extract_simple_system(data, &closure))?
    };
    let orth = orthogonal_roots(data, roots);
    let orthogonal_type = if orth.is_empty() {
        vec![]
    } else {
        let set: BTreeSet<Vec<i64>> = orth.iter().map(|r| r.coeffs.clone()).collect();
        classify_simple_system(&extract_simple_system(data, &set))?
    };
    let ambient_rank = basis.dim() as i64 - 1;
    let in_rank: i64 = cartan_type.iter().map(|t| t.rank as i64).sum();
    let orth_rank: i64 = orthogonal_type.iter().map(|t| t.rank as i64).sum();
    let rank_deficit = ambient_rank - in_rank - orth_rank;
    let torsion = saturation_torsion(roots)?;
    Ok(SubsystemReport {
        basis,
        input: roots.to_vec(),
        cartan_type,
        orthogonal_type,
        rank_deficit,
        torsion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root(d: i64, coeffs: Vec<i64>) -> LatticeVector {
        LatticeVector::new(Basis::DelPezzo(d), coeffs).unwrap()
    }

    #[test]
    fn full_systems_have_expected_types() {
        let expected = [
            (1, "E8"),
            (2, "E7"),
            (3, "E6"),
            (4, "D5"),
            (5, "A4"),
            (6, "A2A1"),
            (7, "A1"),
        ];
        for (d, name) in expected {
            let data = RootData::get(Basis::DelPezzo(d)).unwrap();
            let report = subsystem_analyze(&data.roots).unwrap();
            assert_eq!(report.cartan_string(), name, "degree {d}");
            assert_eq!(report.orthogonal_string(), "");
        }
    }

    #[test]
    fn single_root_in_e8_has_e7_complement() {
        let alpha = root(1, vec![0, 0, 0, 0, 0, 0, 0, 1, -1]); // e7 - e8
        let report = subsystem_analyze(&[alpha]).unwrap();
        assert_eq!(report.cartan_string(), "A1");
        assert_eq!(report.orthogonal_string(), "E7");
        assert_eq!(report.rank_deficit, 0);
        assert!(report.torsion.is_empty());
    }

    #[test]
    fn a1_in_e6_context() {
        // degree 4 has Q^perp of type D5; a single root there leaves A3A1.
        // The E6 check from the moduli tables: degree 3, one root -> A5.
        let alpha = root(3, vec![0, 0, 0, 0, 0, 1, -1]);
        let report = subsystem_analyze(&[alpha]).unwrap();
        assert_eq!(report.orthogonal_string(), "A5");
    }

    #[test]
    fn empty_input_reports_full_orthogonal() {
        let data = RootData::get(Basis::DelPezzo(1)).unwrap();
        let report = subsystem_analyze(&[]).unwrap();
        let _ = data;
        assert_eq!(report.cartan_string(), "");
        assert_eq!(report.orthogonal_string(), "E8");
        assert_eq!(report.rank_deficit, 0);
    }

    #[test]
    fn non_root_input_is_rejected() {
        let v = root(1, vec![1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert!(subsystem_analyze(&[v]).is_err());
    }

    #[test]
    fn affine_marks_tables() {
        let t = |letter, rank| CartanType { letter, rank };
        assert_eq!(affine_marks(t('E', 8)), vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);
        assert_eq!(affine_marks(t('E', 7)), vec![1, 1, 2, 2, 2, 3, 3, 4]);
        assert_eq!(affine_marks(t('E', 6)), vec![1, 1, 1, 2, 2, 2, 3]);
        assert_eq!(affine_marks(t('D', 5)), vec![1, 1, 1, 1, 2, 2]);
        assert_eq!(affine_marks(t('A', 4)), vec![1, 1, 1, 1, 1]);
        assert_eq!(affine_marks(t('D', 6)), vec![1, 1, 1, 1, 2, 2, 2]);
    }
}
