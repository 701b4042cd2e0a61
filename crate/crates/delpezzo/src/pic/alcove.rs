//! Finite and affine Weyl reduction to the fundamental chamber / alcove.
//!
//! The closed alcove is cut out by `<x, a_i> >= 0` for the declared simple
//! roots together with `<x, hr> <= 1` for the highest root of each
//! irreducible factor. Every step is logged so callers can replay the
//! transform exactly.

use super::roots::{reflect_rational, RootData};
use super::{Basis, LatticeVector, RationalVector};
use crate::error::{Error, Result};
use crate::rat::{int, Rat};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReduceMode {
    Finite,
    Affine,
}

/// One step of a Weyl reduction, replayable on any vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    Reflect(LatticeVector),
    Translate(LatticeVector),
}

impl Transform {
    pub fn apply(&self, x: &RationalVector) -> RationalVector {
        match self {
            Transform::Reflect(root) => reflect_rational(x, root),
            Transform::Translate(t) => x.add(&t.to_rational()),
        }
    }

    /// Linear part only (translations act as the identity).
    pub fn apply_linear(&self, x: &LatticeVector) -> LatticeVector {
        match self {
            Transform::Reflect(root) => super::roots::reflect(x, root),
            Transform::Translate(_) => x.clone(),
        }
    }
}

/// A point of the closed fundamental alcove.
///
/// `walls[i] = <x, a_i>` against the declared simple roots; `affine[k] =
/// 1 - <x, hr_k>` for the highest root of the k-th irreducible factor. The
/// identity `affine[k] + sum(marks * walls) = 1` holds per factor. For the
/// irreducible lattices (degree <= 5) `coords()` is the single tuple
/// `(c_0; c_1..c_rank)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlcovePoint {
    pub basis: Basis,
    pub affine: Vec<Rat>,
    pub walls: Vec<Rat>,
    pub representative: RationalVector,
}

impl AlcovePoint {
    /// Affine coordinates first, then the wall coordinates.
    pub fn coords(&self) -> Vec<Rat> {
        let mut out = self.affine.clone();
        out.extend(self.walls.iter().cloned());
        out
    }

    /// Multiset of coordinates (sorted), used to match printed tuples whose
    /// node ordering is not pinned down.
    pub fn coord_multiset(&self) -> Vec<Rat> {
        let mut c = self.coords();
        c.sort();
        c
    }
}

/// Result of a reduction: the output vector, its alcove data in affine mode,
/// and the exact transform log mapping input to output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Reduction {
    pub output: RationalVector,
    pub alcove: Option<AlcovePoint>,
    pub log: Vec<Transform>,
}

impl Reduction {
    pub fn replay(&self, x: &RationalVector) -> RationalVector {
        let mut cur = x.clone();
        for t in &self.log {
            cur = t.apply(&cur);
        }
        cur
    }
}

/// Reduce `x in Q^perp (x) QQ` to the dominant chamber (finite mode) or the
/// fundamental alcove (affine mode).
pub fn reduce_to_alcove(x: &RationalVector, mode: ReduceMode) -> Result<Reduction> {
    if !x.dot_q().is_zero() {
        return Err(Error::domain(format!(
            "vector is not orthogonal to Q (x.Q = {})",
            x.dot_q()
        )));
    }
    let data = RootData::get(x.basis)?;
    let mut cur = x.clone();
    let mut log = Vec::new();
    dominate(data, &mut cur, &mut log);
    if mode == ReduceMode::Finite {
        return Ok(Reduction {
            output: cur,
            alcove: None,
            log,
        });
    }
    loop {
        let mut moved = false;
        for hr in &data.highest {
            let c = cur.pos_dot(&hr.to_rational())?;
            if c > Rat::one() {
                // affine reflection s_{hr,1}: x -> s_hr(x) + hr
                cur = reflect_rational(&cur, hr);
                log.push(Transform::Reflect(hr.clone()));
                cur = cur.add(&hr.to_rational());
                log.push(Transform::Translate(hr.clone()));
                moved = true;
                break;
            }
        }
        if !moved {
            break;
        }
        dominate(data, &mut cur, &mut log);
    }
    let walls: Vec<Rat> = data
        .simples
        .iter()
        .map(|a| cur.pos_dot(&a.to_rational()))
        .collect::<Result<_>>()?;
    let affine: Vec<Rat> = data
        .highest
        .iter()
        .map(|hr| Ok(int(1) - cur.pos_dot(&hr.to_rational())?))
        .collect::<Result<_>>()?;
    debug_assert!(walls.iter().all(|c| *c >= Rat::zero()));
    debug_assert!(affine.iter().all(|c| *c >= Rat::zero()));
    // per-factor mark identity, checked numerically
    for ((factor, marks), aff) in data.factors.iter().zip(&data.marks).zip(&affine) {
        let mut acc = *aff;
        for (&j, &m) in factor.iter().zip(marks) {
            acc += int(m) * walls[j];
        }
        debug_assert_eq!(acc, int(1));
    }
    Ok(Reduction {
        alcove: Some(AlcovePoint {
            basis: x.basis,
            affine,
            walls,
            representative: cur.clone(),
        }),
        output: cur,
        log,
    })
}

fn dominate(data: &RootData, cur: &mut RationalVector, log: &mut Vec<Transform>) {
    loop {
        let mut done = true;
        for a in &data.simples {
            if cur.pos_dot(&a.to_rational()).unwrap() < Rat::zero() {
                *cur = reflect_rational(cur, a);
                log.push(Transform::Reflect(a.clone()));
                done = false;
                break;
            }
        }
        if done {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn origin_is_an_alcove_vertex() {
        let x = RationalVector::zero(Basis::DelPezzo(1));
        let red = reduce_to_alcove(&x, ReduceMode::Affine).unwrap();
        let p = red.alcove.unwrap();
        assert_eq!(p.affine, vec![int(1)]);
        assert!(p.walls.iter().all(|c| c.is_zero()));
        assert!(red.log.is_empty());
    }

    #[test]
    fn any_root_dominates_to_the_highest_root() {
        // single Weyl orbit on E6 and E7 roots
        for d in [2, 3] {
            let data = RootData::get(Basis::DelPezzo(d)).unwrap();
            let hi = &data.highest[0];
            for root in data.roots.iter().step_by(5) {
                let red = reduce_to_alcove(&root.to_rational(), ReduceMode::Finite).unwrap();
                assert_eq!(red.output, hi.to_rational(), "degree {d}");
            }
        }
    }

    #[test]
    fn replay_matches_output() {
        let basis = Basis::DelPezzo(1);
        let x = RationalVector::new(
            basis,
            vec![
                rat(9, 2),
                rat(-5, 2),
                rat(-3, 2),
                rat(1, 2),
                rat(-7, 2),
                rat(3, 2),
                rat(-1, 2),
                rat(-3, 2),
                rat(1, 2),
            ],
        )
        .unwrap();
        assert!(x.dot_q().is_zero());
        let red = reduce_to_alcove(&x, ReduceMode::Affine).unwrap();
        assert_eq!(red.replay(&x), red.output);
        let p = red.alcove.unwrap();
        assert!(p.walls.iter().all(|c| *c >= Rat::zero()));
        assert!(p.affine.iter().all(|c| *c >= Rat::zero()));
    }

    #[test]
    fn idempotent_on_alcove_points() {
        let basis = Basis::DelPezzo(1);
        let data = RootData::get(basis).unwrap();
        let x = data.weights[1].scale(&rat(1, 2)); // the order-2 alcove vertex
        let red = reduce_to_alcove(&x, ReduceMode::Affine).unwrap();
        assert_eq!(red.output, x);
        assert!(red.log.is_empty());
    }

    #[test]
    fn rejects_vectors_off_qperp() {
        let x = LatticeVector::h(Basis::DelPezzo(1)).to_rational();
        assert!(reduce_to_alcove(&x, ReduceMode::Finite).is_err());
    }
}
