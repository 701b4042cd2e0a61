//! Shapes of the standard free resolutions of the simple modules over the
//! graded category attached to a slope-ordered sequence of bundles.
//!
//! Everything here is computed from (rank, deg, det) data alone: iterating
//! the twist functors through the sequence turns the resolved object into a
//! shift of a sheaf at every stage, the shift jumping exactly when the sign
//! of `rank + eps deg` changes, and each object of the sequence contributes
//! its Hom or Ext dimensions at the homological degrees the shift dictates.

use crate::elliptic::{
    apply_autoequivalence, chi_e, AutoeqKind, Autoequivalence, DetClass, DivisorialBundle,
    EllipticClass, RelationSet, Slope,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Rule producing the slope-ordered objects `M_i`, `i` in ZZ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SequenceSpec {
    /// Translates of a bundle's components under the autoequivalence,
    /// ordered by slope.
    Generated {
        bundle: DivisorialBundle,
        psi: Autoequivalence,
    },
    /// An explicit finite window `M_first, M_first+1, ...` with strictly
    /// increasing slopes.
    Explicit {
        first: i64,
        objects: Vec<EllipticClass>,
    },
}

impl SequenceSpec {
    pub fn generated(bundle: DivisorialBundle, psi: Autoequivalence) -> Result<SequenceSpec> {
        bundle.check_window(psi.dl)?;
        Ok(SequenceSpec::Generated { bundle, psi })
    }

    pub fn explicit(first: i64, objects: Vec<EllipticClass>) -> Result<SequenceSpec> {
        let mut slopes = Vec::new();
        for o in &objects {
            match o.slope() {
                Slope::Finite(s) => slopes.push(s),
                Slope::Infinite => {
                    return Err(Error::domain(
                        "sequence objects must have finite slope".to_string(),
                    ))
                }
            }
        }
        if slopes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "sequence slopes must strictly increase".to_string(),
            ));
        }
        Ok(SequenceSpec::Explicit { first, objects })
    }

    /// The object `M_i`.
    pub fn object(&self, i: i64) -> Result<EllipticClass> {
        match self {
            SequenceSpec::Explicit { first, objects } => {
                let idx = i - first;
                if idx < 0 || idx as usize >= objects.len() {
                    return Err(Error::domain(format!(
                        "index {i} is outside the explicit sequence window"
                    )));
                }
                Ok(objects[idx as usize].clone())
            }
            SequenceSpec::Generated { bundle, psi } => {
                let mut comps: Vec<EllipticClass> = bundle
                    .components
                    .iter()
                    .map(|(c, m)| EllipticClass {
                        rank: m * c.rank,
                        deg: m * c.deg,
                        det: c.det.scale(*m),
                        shift: 0,
                    })
                    .collect();
                comps.sort_by(|a, b| a.slope().cmp(&b.slope()));
                let c = comps.len() as i64;
                let q = i.div_euclid(c);
                let k = i.rem_euclid(c) as usize;
                let mut obj = comps[k].clone();
                let kind = if q >= 0 {
                    AutoeqKind::Psi(psi.clone())
                } else {
                    AutoeqKind::PsiInverse(psi.clone())
                };
                for _ in 0..q.abs() {
                    obj = apply_autoequivalence(&kind, &obj)?;
                }
                Ok(obj)
            }
        }
    }
}

/// A projective index appearing in two consecutive homological degrees; the
/// pair is minimal exactly when the recorded determinant difference vanishes
/// under the active relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceMarker {
    pub index: i64,
    pub degrees: (usize, usize),
    pub det_diff: DetClass,
}

/// Per homological degree, the multiset of contributing object indices.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ResolutionShape {
    pub resolved_index: i64,
    pub depth: usize,
    /// `terms[k]` maps object index -> multiplicity at homological degree k.
    pub terms: Vec<BTreeMap<i64, i64>>,
    pub markers: Vec<CoincidenceMarker>,
}

impl ResolutionShape {
    /// Paper-style bracket notation, highest degree first:
    /// `[-6,-5,-4,-3] -> [-3,-2,-1] -> [0]`.
    pub fn bracket_string(&self) -> String {
        let mut parts = Vec::new();
        for k in (0..=self.depth).rev() {
            let mut entries = Vec::new();
            if let Some(level) = self.terms.get(k) {
                for (&idx, &mult) in level {
                    for _ in 0..mult {
                        entries.push(idx);
                    }
                }
            }
            entries.sort_unstable();
            let inner: Vec<String> = entries.iter().map(|i| i.to_string()).collect();
            parts.push(format!("[{}]", inner.join(",")));
        }
        parts.join(" -> ")
    }

    pub fn degree(&self, k: usize) -> BTreeMap<i64, i64> {
        self.terms.get(k).cloned().unwrap_or_default()
    }
}

impl fmt::Display for ResolutionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bracket_string())
    }
}

/// Compute the standard free resolution shape of the simple module at index
/// `i`, through homological degree `depth`.
pub fn free_shape(seq: &SequenceSpec, i: i64, depth: usize) -> Result<ResolutionShape> {
    if depth < 1 {
        return Err(Error::domain("depth must be at least 1".to_string()));
    }
    let mut shape = ResolutionShape {
        resolved_index: i,
        depth,
        terms: vec![BTreeMap::new(); depth + 1],
        markers: Vec::new(),
    };
    shape.terms[0].insert(i, 1);

    // raw class of Phi_{M_{j+1}} ... Phi_{M_{i-1}} (M_i), with determinant
    let start = seq.object(i)?;
    let mut raw = (start.rank, start.deg, start.det.clone());
    let mut sigma = sign_of(raw.0, raw.1);
    if sigma < 0 {
        return Err(Error::domain(
            "the resolved object must satisfy the positivity convention".to_string(),
        ));
    }
    let mut shift = 0usize;
    let mut j = i - 1;
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 10_000 * (depth + 2) {
            return Err(Error::domain(
                "resolution iteration failed to advance past the requested depth".to_string(),
            ));
        }
        if shift > depth {
            break;
        }
        let mj = seq.object(j)?;
        // normalized sheaf class of the iterated image
        let sheaf = EllipticClass {
            rank: sigma * raw.0,
            deg: sigma * raw.1,
            det: raw.2.scale(sigma),
            shift: 0,
        };
        match mj.slope().cmp(&sheaf.slope()) {
            std::cmp::Ordering::Less => {
                let mult = chi_e(&mj, &sheaf);
                debug_assert!(mult > 0);
                if shift + 1 <= depth {
                    *shape.terms[shift + 1].entry(j).or_insert(0) += mult;
                }
            }
            std::cmp::Ordering::Greater => {
                let mult = -chi_e(&mj, &sheaf);
                debug_assert!(mult > 0);
                *shape.terms[shift].entry(j).or_insert(0) += mult;
            }
            std::cmp::Ordering::Equal => {
                if !mj.is_stable_class() || !sheaf.is_stable_class() {
                    return Err(Error::unsupported(format!(
                        "equal-slope non-stable comparison at index {j}; \
                         the shape needs sheaf-level data there"
                    )));
                }
                *shape.terms[shift].entry(j).or_insert(0) += 1;
                if shift + 1 <= depth {
                    *shape.terms[shift + 1].entry(j).or_insert(0) += 1;
                }
                shape.markers.push(CoincidenceMarker {
                    index: j,
                    degrees: (shift, shift + 1),
                    det_diff: mj.det.sub(&sheaf.det),
                });
            }
        }
        // advance: apply Phi_{M_j} to the raw class
        let m = mj.gcd();
        let chi = mj.rank * raw.1 - mj.deg * raw.0;
        debug_assert_eq!(chi.rem_euclid(m), 0);
        let c = chi / m;
        raw = (
            raw.0 - c * mj.rank,
            raw.1 - c * mj.deg,
            raw.2.sub(&mj.det.scale(c)),
        );
        assert!(
            raw.0 != 0 || raw.1 != 0,
            "iterated twist image cannot vanish"
        );
        let new_sigma = sign_of(raw.0, raw.1);
        if new_sigma != sigma {
            shift += 1;
            sigma = new_sigma;
        }
        j -= 1;
    }
    shape.markers.sort_by_key(|m| (m.degrees, m.index));
    Ok(shape)
}

fn sign_of(rank: i64, deg: i64) -> i64 {
    // sign of rank + eps * deg with eps an infinitesimal positive
    if rank != 0 {
        rank.signum()
    } else {
        deg.signum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// Markers whose determinant difference does not vanish under the
    /// relations: (object index, the two homological degrees).
    pub culprits: Vec<(i64, (usize, usize))>,
}

/// The free shape is minimal iff every coincidence marker has determinant
/// difference zero modulo the relations.
pub fn minimality_report(shape: &ResolutionShape, relations: &RelationSet) -> MinimalityReport {
    let culprits: Vec<(i64, (usize, usize))> = shape
        .markers
        .iter()
        .filter(|m| !relations.reduces_to_zero(&m.det_diff))
        .map(|m| (m.index, m.degrees))
        .collect();
    MinimalityReport {
        minimal: culprits.is_empty(),
        culprits,
    }
}

/// Convenience: the sequence generated by the structure sheaf.
pub fn structure_sheaf_sequence(dl: i64) -> Result<SequenceSpec> {
    let v = DivisorialBundle::stable(1, 0)?;
    SequenceSpec::generated(v, Autoequivalence::new(dl)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape_for(dl: i64, depth: usize) -> ResolutionShape {
        let seq = structure_sheaf_sequence(dl).unwrap();
        free_shape(&seq, 0, depth).unwrap()
    }

    fn level(shape: &ResolutionShape, k: usize) -> Vec<(i64, i64)> {
        shape.degree(k).into_iter().collect()
    }

    #[test]
    fn degree_one_shape() {
        let s = shape_for(1, 4);
        assert_eq!(level(&s, 0), vec![(0, 1)]);
        assert_eq!(level(&s, 1), vec![(-3, 1), (-2, 1), (-1, 1)]);
        assert_eq!(level(&s, 2), vec![(-6, 1), (-5, 1), (-4, 1), (-3, 1)]);
        assert_eq!(level(&s, 3), vec![(-9, 1), (-8, 1), (-7, 1), (-6, 1)]);
        assert_eq!(level(&s, 4), vec![(-12, 1), (-11, 1), (-10, 1), (-9, 1)]);
        assert_eq!(
            s.bracket_string(),
            "[-12,-11,-10,-9] -> [-9,-8,-7,-6] -> [-6,-5,-4,-3] -> [-3,-2,-1] -> [0]"
        );
    }

    #[test]
    fn degree_two_shape() {
        let s = shape_for(2, 4);
        assert_eq!(level(&s, 1), vec![(-2, 1), (-1, 2)]);
        assert_eq!(level(&s, 2), vec![(-4, 1), (-3, 2), (-2, 1)]);
        assert_eq!(level(&s, 3), vec![(-6, 1), (-5, 2), (-4, 1)]);
        assert_eq!(level(&s, 4), vec![(-8, 1), (-7, 2), (-6, 1)]);
    }

    #[test]
    fn degree_three_shape() {
        let s = shape_for(3, 4);
        assert_eq!(level(&s, 1), vec![(-1, 3)]);
        assert_eq!(level(&s, 2), vec![(-3, 1), (-2, 3)]);
        assert_eq!(level(&s, 3), vec![(-4, 3), (-3, 1)]);
        assert_eq!(level(&s, 4), vec![(-6, 1), (-5, 3)]);
    }

    #[test]
    fn minimality_criteria() {
        // degree 1: minimal iff the translation squares to the identity
        let s = shape_for(1, 4);
        let untwisted = minimality_report(&s, &RelationSet::torsion_translation(2));
        assert!(untwisted.minimal);
        let generic = minimality_report(&s, &RelationSet::none());
        assert!(!generic.minimal);
        assert!(generic.culprits.contains(&(-3, (1, 2))));

        // degree 2: same criterion
        let s = shape_for(2, 4);
        assert!(minimality_report(&s, &RelationSet::torsion_translation(2)).minimal);
        assert!(!minimality_report(&s, &RelationSet::none()).minimal);

        // degree 3: always minimal
        let s = shape_for(3, 6);
        assert!(minimality_report(&s, &RelationSet::none()).minimal);
        assert!(minimality_report(&s, &RelationSet::torsion_translation(5)).minimal);
    }

    #[test]
    fn periodicity_of_the_degree_one_shape() {
        // index shift by -3 moves each level up by one degree
        let s = shape_for(1, 7);
        for k in 2..=6usize {
            let this: Vec<(i64, i64)> = level(&s, k);
            let next: Vec<(i64, i64)> = level(&s, k + 1)
                .into_iter()
                .map(|(i, m)| (i + 3, m))
                .collect();
            assert_eq!(this, next, "period at degree {k}");
        }
    }

    #[test]
    fn explicit_sequences_check_slopes() {
        let objs = vec![EllipticClass::raw(1, 0), EllipticClass::raw(1, 1)];
        assert!(SequenceSpec::explicit(0, objs).is_ok());
        let bad = vec![EllipticClass::raw(1, 1), EllipticClass::raw(1, 0)];
        assert!(SequenceSpec::explicit(0, bad).is_err());
    }
}
