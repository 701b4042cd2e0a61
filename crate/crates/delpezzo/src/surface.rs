//! Numerical K-theory of (noncommutative) del Pezzo surfaces.
//!
//! A class is `(rank, c1, chi)`. The Euler pairing is
//! `chi(M,N) = -rM rN + rM chiN + chiM rN - c1(M).(c1(N) + rN Q)`,
//! numerically exact on every lattice context in this crate.

use crate::elliptic::EllipticClass;
use crate::error::{Error, Result};
use crate::pic::{closest_vectors, Basis, LatticeVector, RationalVector, RootData};
use crate::rat::{int, rat, Rat};
use num::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceClass {
    pub rank: i64,
    pub c1: LatticeVector,
    pub chi: i64,
}

impl SurfaceClass {
    pub fn new(rank: i64, c1: LatticeVector, chi: i64) -> SurfaceClass {
        SurfaceClass { rank, c1, chi }
    }

    pub fn basis(&self) -> Basis {
        self.c1.basis
    }

    /// The structure sheaf class (1, 0, 1).
    pub fn structure_sheaf(basis: Basis) -> SurfaceClass {
        SurfaceClass::new(1, LatticeVector::zero(basis), 1)
    }

    /// The line bundle O(D).
    pub fn line_bundle(d: &LatticeVector) -> SurfaceClass {
        let q = LatticeVector::anticanonical(d.basis);
        let chi = 1 + (d.dot(d).unwrap() + d.dot(&q).unwrap()) / 2;
        SurfaceClass::new(1, d.clone(), chi)
    }

    pub fn add(&self, other: &SurfaceClass) -> SurfaceClass {
        SurfaceClass::new(
            self.rank + other.rank,
            self.c1.add(&other.c1),
            self.chi + other.chi,
        )
    }

    pub fn sub(&self, other: &SurfaceClass) -> SurfaceClass {
        SurfaceClass::new(
            self.rank - other.rank,
            self.c1.sub(&other.c1),
            self.chi - other.chi,
        )
    }

    pub fn neg(&self) -> SurfaceClass {
        SurfaceClass::new(-self.rank, self.c1.neg(), -self.chi)
    }

    pub fn c1_dot_q(&self) -> i64 {
        self.c1.dot_q()
    }

    /// Slope with respect to Q; undefined for rank 0.
    pub fn slope(&self) -> Option<Rat> {
        if self.rank == 0 {
            None
        } else {
            Some(rat(self.c1_dot_q(), self.rank))
        }
    }

    /// `D_E = c1 - (c1.Q / Q^2) Q`, the Q-orthogonal part of c1.
    pub fn d_part(&self) -> RationalVector {
        let q = LatticeVector::anticanonical(self.basis()).to_rational();
        let q2 = q.dot(&q).unwrap();
        let c1 = self.c1.to_rational();
        let coeff = c1.dot(&q).unwrap() / q2;
        c1.sub(&q.scale(&coeff))
    }

    /// Numerically exceptional: positive rank and chi(E,E) = 1.
    pub fn is_exceptional(&self) -> bool {
        self.rank > 0 && euler_pairing(self, self).map_or(false, |x| x == 1)
    }

    /// Serialization `(<rank>; <c1>; <chi>)`.
    pub fn serialize(&self) -> String {
        format!("({}; {}; {})", self.rank, self.c1.serialize(), self.chi)
    }

    pub fn parse(s: &str) -> Result<SurfaceClass> {
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("class must look like (r; c1; chi): {s:?}")))?;
        let parts: Vec<&str> = body.split(';').map(|p| p.trim()).collect();
        if parts.len() != 3 {
            return Err(Error::parse(format!("expected three ';' fields in {s:?}")));
        }
        let rank: i64 = parts[0]
            .parse()
            .map_err(|_| Error::parse(format!("bad rank {:?}", parts[0])))?;
        let c1 = LatticeVector::parse(parts[1])?;
        let chi: i64 = parts[2]
            .parse()
            .map_err(|_| Error::parse(format!("bad chi {:?}", parts[2])))?;
        Ok(SurfaceClass::new(rank, c1, chi))
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// The Euler pairing chi(M, N).
pub fn euler_pairing(m: &SurfaceClass, n: &SurfaceClass) -> Result<i64> {
    if m.basis() != n.basis() {
        return Err(Error::dimension(
            "Euler pairing needs matching lattice contexts".to_string(),
        ));
    }
    let q = LatticeVector::anticanonical(m.basis());
    Ok(-m.rank * n.rank + m.rank * n.chi + m.chi * n.rank
        - (m.c1.dot(&n.c1)? + n.rank * m.c1.dot(&q)?))
}

/// Twist by a line bundle: M (x) O(D).
pub fn twist(m: &SurfaceClass, d: &LatticeVector) -> Result<SurfaceClass> {
    if m.basis() != d.basis {
        return Err(Error::dimension("twist needs matching contexts".to_string()));
    }
    let q = LatticeVector::anticanonical(d.basis);
    let dd = d.dot(d)?;
    let dq = d.dot(&q)?;
    // (D.D + D.Q) is always even on these lattices
    assert_eq!((dd + dq).rem_euclid(2), 0);
    Ok(SurfaceClass::new(
        m.rank,
        m.c1.add(&d.scale(m.rank)),
        m.chi + m.c1.dot(d)? + m.rank * (dd + dq) / 2,
    ))
}

/// Restriction to the anticanonical curve: rank is preserved and
/// `deg = c1.Q + delta * rank`.
pub fn restrict_to_elliptic(m: &SurfaceClass, delta: i64) -> EllipticClass {
    EllipticClass::raw(m.rank, m.c1_dot_q() + delta * m.rank)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiStarMode {
    /// On the rational elliptic surface (degree 0 context with section `e`).
    General,
    /// Simplified action on the RGamma = 0 subcategory of the degree-1 surface.
    Anticanonical,
}

/// The contravariant transform swapping the structure sheaf and O_e(-1).
pub fn phi_star(m: &SurfaceClass, mode: PhiStarMode) -> Result<SurfaceClass> {
    let q = LatticeVector::anticanonical(m.basis());
    match mode {
        PhiStarMode::General => {
            if m.basis() != Basis::DelPezzo(0) {
                return Err(Error::domain(
                    "general mode works on the degree-0 (elliptic surface) context".to_string(),
                ));
            }
            // e is the last exceptional class of the degree-0 basis
            let e = LatticeVector::e(m.basis(), 9)?;
            let c1q = m.c1.dot(&q)?;
            let c1e = m.c1.dot(&e)?;
            let rank = c1q;
            let c1 = m
                .c1
                .neg()
                .add(&q.add(&e).scale(c1q + m.rank))
                .add(&q.scale(c1e - m.chi));
            let chi = -c1e;
            Ok(SurfaceClass::new(rank, c1, chi))
        }
        PhiStarMode::Anticanonical => {
            if m.basis() != Basis::DelPezzo(1) {
                return Err(Error::domain(
                    "anticanonical mode works on the degree-1 context".to_string(),
                ));
            }
            let c1q = m.c1.dot(&q)?;
            let rank = c1q;
            let c1 = m.c1.neg().add(&q.scale(c1q + m.rank));
            Ok(SurfaceClass::new(rank, c1, 0))
        }
    }
}

/// Sign-normalize a class so that rank > 0, or rank = 0 with c1.Q > 0.
pub fn sign_normalize(m: &SurfaceClass) -> SurfaceClass {
    if m.rank < 0 || (m.rank == 0 && m.c1_dot_q() < 0) {
        m.neg()
    } else {
        m.clone()
    }
}

/// The exceptional bundle attached to a rational-curve class D
/// (D.D = D.Q - 2, D.Q >= 2): rank D.Q, c1 = -D + (D.Q - 1) Q, chi = 0.
pub fn rational_curve_bundle(d: &LatticeVector) -> Result<SurfaceClass> {
    let q = LatticeVector::anticanonical(d.basis);
    let dq = d.dot(&q)?;
    let dd = d.dot(d)?;
    if dd != dq - 2 {
        return Err(Error::domain(format!(
            "not a rational-curve class: D.D = {dd} but D.Q - 2 = {}",
            dq - 2
        )));
    }
    if dq < 2 {
        return Err(Error::domain(format!(
            "rational-curve construction needs D.Q >= 2, got {dq}"
        )));
    }
    let e = SurfaceClass::new(dq, d.neg().add(&q.scale(dq - 1)), 0);
    debug_assert_eq!(euler_pairing(&e, &e).unwrap(), 1);
    Ok(e)
}

/// Maximize `chi(twist(Eprime, -D), E)` over `D in Q^perp`.
///
/// The value differs from a constant by `-(r r'/2) |D - Delta|^2` with
/// `Delta = D_{E'}/r' - D_E/r`, so the maximum is attained exactly at the
/// closest lattice vectors to Delta; all minimizers are checked and returned.
pub fn line_twist_max(
    e: &SurfaceClass,
    eprime: &SurfaceClass,
) -> Result<(i64, Vec<LatticeVector>)> {
    if e.rank <= 0 || eprime.rank <= 0 {
        return Err(Error::domain(
            "line_twist_max needs positive ranks".to_string(),
        ));
    }
    let delta = eprime
        .d_part()
        .scale(&rat(1, eprime.rank))
        .sub(&e.d_part().scale(&rat(1, e.rank)));
    let cvp = closest_vectors(&delta)?;
    let mut best: Option<i64> = None;
    for d in &cvp.minimizers {
        let val = euler_pairing(&twist(eprime, &d.neg())?, e)?;
        match best {
            None => best = Some(val),
            Some(b) => assert_eq!(b, val, "all CVP minimizers give equal pairings"),
        }
    }
    Ok((best.expect("CVP returns at least one minimizer"), cvp.minimizers))
}

/// Diagnostics for a would-be numerical exceptional collection.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CollectionReport {
    pub ok: bool,
    /// Indices whose class fails rank > 0 or chi(E,E) = 1.
    pub non_exceptional: Vec<usize>,
    /// Pairs (i, j) violating the slope window.
    pub slope_window_violations: Vec<(usize, usize)>,
    /// Pairs (i, j), i < j, with chi(E_j, E_i) != 0.
    pub nonzero_backward_pairings: Vec<(usize, usize)>,
    /// Equal-slope pairs whose c1 difference is not a positive root.
    pub non_positive_root_pairs: Vec<(usize, usize)>,
    /// With determinants supplied: equal-slope pairs that share a restriction
    /// determinant while c1(E_i) - c1(E_j) is a positive root (an effective
    /// difference class).
    pub effective_difference_pairs: Vec<(usize, usize)>,
}

/// Validate the numerical exceptional-collection conditions: slope window
/// `mu(E_1) <= ... <= mu(E_n) < mu(E_1) + Q^2`, vanishing backward pairings,
/// and the positive-root test on equal-slope pairs. Optional elliptic
/// determinants refine the equal-slope test.
pub fn validate_collection(
    classes: &[SurfaceClass],
    dets: Option<&[crate::elliptic::DetClass]>,
) -> Result<CollectionReport> {
    let mut report = CollectionReport {
        ok: true,
        ..Default::default()
    };
    if classes.is_empty() {
        return Ok(report);
    }
    let basis = classes[0].basis();
    let data = RootData::get(basis)?;
    let q2 = {
        let q = LatticeVector::anticanonical(basis);
        q.dot(&q)?
    };
    for (i, c) in classes.iter().enumerate() {
        if !c.is_exceptional() {
            report.non_exceptional.push(i);
        }
    }
    let slopes: Vec<Rat> = classes
        .iter()
        .map(|c| c.slope().unwrap_or_else(Rat::zero))
        .collect();
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            if slopes[i] > slopes[j] {
                report.slope_window_violations.push((i, j));
            }
        }
        if !slopes.is_empty() && slopes[i] >= slopes[0] + int(q2) && i > 0 {
            report.slope_window_violations.push((0, i));
        }
    }
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            if euler_pairing(&classes[j], &classes[i])? != 0 {
                report.nonzero_backward_pairings.push((i, j));
            }
            if slopes[i] == slopes[j] {
                // a sheaf of class [E_i]-[E_j] exists iff c1(E_i)-c1(E_j) is a
                // positive root and the restrictions to the anticanonical
                // curve agree; without determinants we use the sufficient
                // criterion that c1(E_j)-c1(E_i) is a positive root
                if !data.is_positive_root(&classes[j].c1.sub(&classes[i].c1)) {
                    report.non_positive_root_pairs.push((i, j));
                }
                if let Some(ds) = dets {
                    if data.is_positive_root(&classes[i].c1.sub(&classes[j].c1))
                        && ds[i] == ds[j]
                    {
                        report.effective_difference_pairs.push((i, j));
                    }
                }
            }
        }
    }
    let equal_slope_ok = if dets.is_some() {
        report.effective_difference_pairs.is_empty()
    } else {
        report.non_positive_root_pairs.is_empty()
    };
    report.ok = report.non_exceptional.is_empty()
        && report.slope_window_violations.is_empty()
        && report.nonzero_backward_pairings.is_empty()
        && equal_slope_ok;
    Ok(report)
}
