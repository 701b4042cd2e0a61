//! Exact arithmetic in the Picard lattice of a del Pezzo surface.
//!
//! The lattice of a degree-`d` surface has basis `h, e_1, ..., e_{9-d}` with
//! the diagonal intersection form `h.h = 1`, `e_i.e_i = -1`. The anticanonical
//! class is `Q = 3h - e_1 - ... - e_{9-d}` with `Q.Q = d`. Degree 0 is the
//! rational elliptic surface (ten basis vectors, `Q.Q = 0`); the even
//! quadric component in degree 8 uses the hyperbolic `(s, f)` basis instead.

mod alcove;
mod cvp;
mod roots;
mod snf;
mod subsystem;

pub use alcove::{reduce_to_alcove, AlcovePoint, ReduceMode, Reduction, Transform};
pub use cvp::{closest_vectors, closest_vectors_in_ball, CvpResult};
pub use roots::RootData;
pub use snf::{smith_invariants, solve_integer, SmithForm};
pub use subsystem::{classify_simple_system, subsystem_analyze, CartanType, SubsystemReport};

use crate::error::{Error, Result};
use crate::rat::{int, Rat};
use num::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which Picard lattice we are working in.
///
/// `DelPezzo(d)` is the blowup basis for degrees 0..=9 (degree 0 being the
/// rational elliptic surface). `Quadric` is the even degree-8 component,
/// with basis `s, f` and form `[[0,1],[1,0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    DelPezzo(i64),
    Quadric,
}

impl Basis {
    pub fn degree(&self) -> i64 {
        match self {
            Basis::DelPezzo(d) => *d,
            Basis::Quadric => 8,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::DelPezzo(d) => (10 - d) as usize,
            Basis::Quadric => 2,
        }
    }

    pub fn new_del_pezzo(d: i64) -> Result<Basis> {
        if !(0..=9).contains(&d) {
            return Err(Error::domain(format!(
                "del Pezzo degree must lie in 0..=9, got {d}"
            )));
        }
        Ok(Basis::DelPezzo(d))
    }

    fn tag(&self) -> String {
        match self {
            Basis::DelPezzo(d) => format!("{d}"),
            Basis::Quadric => "8e".to_string(),
        }
    }

    fn from_tag(s: &str) -> Result<Basis> {
        if s == "8e" {
            return Ok(Basis::Quadric);
        }
        let d: i64 = s
            .parse()
            .map_err(|_| Error::parse(format!("bad degree tag {s:?}")))?;
        Basis::new_del_pezzo(d)
    }
}

/// Integer vector in the Picard lattice.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    pub basis: Basis,
    pub coeffs: Vec<i64>,
}

/// Vector with exact rational coefficients, same basis conventions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalVector {
    pub basis: Basis,
    pub coeffs: Vec<Rat>,
}

impl LatticeVector {
    pub fn new(basis: Basis, coeffs: Vec<i64>) -> Result<LatticeVector> {
        if coeffs.len() != basis.dim() {
            return Err(Error::dimension(format!(
                "expected {} coefficients for degree {}, got {}",
                basis.dim(),
                basis.tag(),
                coeffs.len()
            )));
        }
        Ok(LatticeVector { basis, coeffs })
    }

    pub fn zero(basis: Basis) -> LatticeVector {
        LatticeVector {
            coeffs: vec![0; basis.dim()],
            basis,
        }
    }

    /// The anticanonical class `Q`.
    pub fn anticanonical(basis: Basis) -> LatticeVector {
        match basis {
            Basis::DelPezzo(_) => {
                let mut c = vec![-1; basis.dim()];
                c[0] = 3;
                LatticeVector { basis, coeffs: c }
            }
            Basis::Quadric => LatticeVector {
                basis,
                coeffs: vec![2, 2],
            },
        }
    }

    /// Basis vector `h` (or `s` on the quadric).
    pub fn h(basis: Basis) -> LatticeVector {
        let mut c = vec![0; basis.dim()];
        c[0] = 1;
        LatticeVector { basis, coeffs: c }
    }

    /// Basis vector `e_i`, 1-indexed (or `f` on the quadric with i = 1).
    pub fn e(basis: Basis, i: usize) -> Result<LatticeVector> {
        if i == 0 || i >= basis.dim() {
            return Err(Error::dimension(format!(
                "e_{i} out of range for degree {}",
                basis.tag()
            )));
        }
        let mut c = vec![0; basis.dim()];
        c[i] = 1;
        Ok(LatticeVector { basis, coeffs: c })
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|&c| int(c)).collect(),
        }
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.basis, other.basis);
        LatticeVector {
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.basis, other.basis);
        LatticeVector {
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> LatticeVector {
        LatticeVector {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| k * c).collect(),
        }
    }

    /// Intersection product.
    pub fn dot(&self, other: &LatticeVector) -> Result<i64> {
        check_basis(self.basis, other.basis)?;
        Ok(dot_raw(self.basis, &self.coeffs, &other.coeffs))
    }

    /// Negated intersection product; positive definite on `Q^perp` for d > 0.
    pub fn pos_dot(&self, other: &LatticeVector) -> Result<i64> {
        Ok(-self.dot(other)?)
    }

    pub fn norm_pos(&self) -> i64 {
        -dot_raw(self.basis, &self.coeffs, &self.coeffs)
    }

    pub fn dot_q(&self) -> i64 {
        let q = LatticeVector::anticanonical(self.basis);
        dot_raw(self.basis, &self.coeffs, &q.coeffs)
    }

    pub fn is_in_qperp(&self) -> bool {
        self.dot_q() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Canonical text form `d=<d>:[c_h,c_1,...]`.
    pub fn serialize(&self) -> String {
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("d={}:[{}]", self.basis.tag(), cs.join(","))
    }

    pub fn parse(s: &str) -> Result<LatticeVector> {
        let r = RationalVector::parse(s)?;
        let mut coeffs = Vec::with_capacity(r.coeffs.len());
        for c in &r.coeffs {
            if !crate::rat::is_integer(c) {
                return Err(Error::parse(format!("non-integer coefficient {c} in {s:?}")));
            }
            coeffs.push(*c.numer() as i64);
        }
        LatticeVector::new(r.basis, coeffs)
    }
}

impl RationalVector {
    pub fn new(basis: Basis, coeffs: Vec<Rat>) -> Result<RationalVector> {
        if coeffs.len() != basis.dim() {
            return Err(Error::dimension(format!(
                "expected {} coefficients for degree {}, got {}",
                basis.dim(),
                basis.tag(),
                coeffs.len()
            )));
        }
        Ok(RationalVector { basis, coeffs })
    }

    pub fn zero(basis: Basis) -> RationalVector {
        RationalVector {
            coeffs: vec![Rat::zero(); basis.dim()],
            basis,
        }
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        RationalVector {
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        RationalVector {
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> RationalVector {
        RationalVector {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn dot(&self, other: &RationalVector) -> Result<Rat> {
        check_basis(self.basis, other.basis)?;
        Ok(dot_raw_rat(self.basis, &self.coeffs, &other.coeffs))
    }

    pub fn pos_dot(&self, other: &RationalVector) -> Result<Rat> {
        Ok(-self.dot(other)?)
    }

    pub fn norm_pos(&self) -> Rat {
        -dot_raw_rat(self.basis, &self.coeffs, &self.coeffs)
    }

    pub fn dot_q(&self) -> Rat {
        let q = LatticeVector::anticanonical(self.basis).to_rational();
        dot_raw_rat(self.basis, &self.coeffs, &q.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Exact integer part if all coefficients are integers.
    pub fn to_lattice(&self) -> Option<LatticeVector> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !crate::rat::is_integer(c) {
                return None;
            }
            coeffs.push(*c.numer() as i64);
        }
        Some(LatticeVector {
            basis: self.basis,
            coeffs,
        })
    }

    pub fn serialize(&self) -> String {
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("d={}:[{}]", self.basis.tag(), cs.join(","))
    }

    pub fn parse(s: &str) -> Result<RationalVector> {
        let s = s.trim();
        let rest = s
            .strip_prefix("d=")
            .ok_or_else(|| Error::parse(format!("vector must start with 'd=': {s:?}")))?;
        let (tag, body) = rest
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("missing ':' in vector {s:?}")))?;
        let basis = Basis::from_tag(tag)?;
        let body = body
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::parse(format!("missing [..] in vector {s:?}")))?;
        let mut coeffs = Vec::new();
        for part in body.split(',') {
            coeffs.push(parse_rat(part.trim())?);
        }
        RationalVector::new(basis, coeffs)
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad numerator {n:?}")))?;
        let d: i128 = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad denominator {d:?}")))?;
        if d == 0 {
            return Err(Error::parse("zero denominator".to_string()));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: i128 = s
            .parse()
            .map_err(|_| Error::parse(format!("bad integer {s:?}")))?;
        Ok(Rat::from_integer(n))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

fn check_basis(a: Basis, b: Basis) -> Result<()> {
    if a != b {
        return Err(Error::dimension(format!(
            "mismatched lattice contexts: degree {} vs {}",
            a.tag(),
            b.tag()
        )));
    }
    Ok(())
}

fn dot_raw(basis: Basis, a: &[i64], b: &[i64]) -> i64 {
    match basis {
        Basis::DelPezzo(_) => {
            let mut acc = a[0] * b[0];
            for i in 1..a.len() {
                acc -= a[i] * b[i];
            }
            acc
        }
        Basis::Quadric => a[0] * b[1] + a[1] * b[0],
    }
}

fn dot_raw_rat(basis: Basis, a: &[Rat], b: &[Rat]) -> Rat {
    match basis {
        Basis::DelPezzo(_) => {
            let mut acc = a[0] * b[0];
            for i in 1..a.len() {
                acc -= a[i] * b[i];
            }
            acc
        }
        Basis::Quadric => a[0] * b[1] + a[1] * b[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn defining_form() {
        let b = Basis::DelPezzo(1);
        let h = LatticeVector::h(b);
        let e1 = LatticeVector::e(b, 1).unwrap();
        assert_eq!(h.dot(&h).unwrap(), 1);
        assert_eq!(e1.dot(&e1).unwrap(), -1);
        assert_eq!(h.dot(&e1).unwrap(), 0);
    }

    #[test]
    fn anticanonical_self_intersection() {
        for d in 0..=9 {
            let q = LatticeVector::anticanonical(Basis::DelPezzo(d));
            assert_eq!(q.dot(&q).unwrap(), d, "Q.Q at degree {d}");
        }
        let q = LatticeVector::anticanonical(Basis::Quadric);
        assert_eq!(q.dot(&q).unwrap(), 8);
    }

    #[test]
    fn q_squared_at_degree_one() {
        // expand 3h - e_1 - ... - e_8 in the diagonal form
        let q = LatticeVector::anticanonical(Basis::DelPezzo(1));
        assert_eq!(q.dot(&q).unwrap(), 9 - 8);
    }

    #[test]
    fn mismatched_degree_is_an_error() {
        let a = LatticeVector::h(Basis::DelPezzo(1));
        let b = LatticeVector::h(Basis::DelPezzo(2));
        assert!(a.dot(&b).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let v = LatticeVector::new(Basis::DelPezzo(3), vec![3, -1, 0, 2, -1, 5, 0]).unwrap();
        assert_eq!(v.serialize(), "d=3:[3,-1,0,2,-1,5,0]");
        assert_eq!(LatticeVector::parse(&v.serialize()).unwrap(), v);

        let r = RationalVector::new(Basis::DelPezzo(8), vec![rat(1, 2), rat(-3, 7)]).unwrap();
        assert_eq!(RationalVector::parse(&r.serialize()).unwrap(), r);

        let s = LatticeVector::new(Basis::Quadric, vec![1, -1]).unwrap();
        assert_eq!(LatticeVector::parse("d=8e:[1,-1]").unwrap(), s);
    }
}
