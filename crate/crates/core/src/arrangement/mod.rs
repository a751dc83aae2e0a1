//! Faces of affine hyperplane arrangements and their bounded complex.
//!
//! A face is encoded by its sign vector: for every hyperplane
//! `⟨x, normal⟩ = offset` the face lies strictly below it (`Minus`), on it
//! (`Zero`) or strictly above it (`Plus`). Faces are relatively open.

mod svg;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{feasible_witness, rank, LinearConstraint, Rat, RatMat, RatVec, Relation};

pub use svg::render_svg;

/// Largest arrangement accepted by [`enumerate_faces`].
pub const MAX_HYPERPLANES: usize = 14;
/// Largest ambient dimension accepted by [`enumerate_faces`].
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArrangementError {
    #[error("hyperplane {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("hyperplane {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("arrangement of {hyperplanes} hyperplanes in dimension {dim} exceeds capacity ({MAX_HYPERPLANES} hyperplanes, dimension {MAX_DIM})")]
    CapacityExceeded { hyperplanes: usize, dim: usize },
    #[error("bounded complex is not closed: boundary face {missing} of {face} is missing")]
    ComplexClosureViolation { face: SignVector, missing: SignVector },
    #[error("no faces supplied")]
    NoFaces,
    #[error("rendering needs a planar arrangement, got dimension {0}")]
    UnsupportedDimension(usize),
}

/// The affine hyperplane `⟨x, normal⟩ = offset`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: RatVec,
    pub offset: Rat,
}

impl Hyperplane {
    pub fn new(normal: RatVec, offset: Rat) -> Self {
        Hyperplane { normal, offset }
    }

    fn constraint(&self, sign: Sign) -> LinearConstraint {
        let relation = match sign {
            Sign::Minus => Relation::Lt,
            Sign::Zero => Relation::Eq,
            Sign::Plus => Relation::Gt,
        };
        LinearConstraint::new(self.normal.clone(), relation, self.offset.clone())
    }

    pub fn side_of(&self, x: &RatVec) -> Sign {
        match self.normal.dot(x).cmp(&self.offset) {
            std::cmp::Ordering::Less => Sign::Minus,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Minus, Sign::Zero, Sign::Plus];

    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zero_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, s)| **s == Sign::Zero).map(|(i, _)| i)
    }

    /// Whether the face with sign vector `other` lies in the closure of this one.
    pub fn is_refined_by(&self, other: &SignVector) -> bool {
        self.0.iter().zip(&other.0).all(|(mine, theirs)| theirs == mine || *theirs == Sign::Zero)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Face {
    pub sign: SignVector,
    pub dim: usize,
    pub bounded: bool,
    pub witness: RatVec,
}

/// A validated arrangement in `ℝⁿ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arrangement {
    n: usize,
    hyperplanes: Vec<Hyperplane>,
}

impl Arrangement {
    pub fn new(n: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, ArrangementError> {
        for (index, h) in hyperplanes.iter().enumerate() {
            if h.normal.dim() != n {
                return Err(ArrangementError::DimensionMismatch { index, expected: n, found: h.normal.dim() });
            }
            if h.normal.is_zero() {
                return Err(ArrangementError::ZeroNormal(index));
            }
        }
        if hyperplanes.len() > MAX_HYPERPLANES || n > MAX_DIM {
            return Err(ArrangementError::CapacityExceeded { hyperplanes: hyperplanes.len(), dim: n });
        }
        Ok(Arrangement { n, hyperplanes })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn constraints(&self, sign: &SignVector) -> Vec<LinearConstraint> {
        self.hyperplanes.iter().zip(&sign.0).map(|(h, &s)| h.constraint(s)).collect()
    }

    fn normals_span(&self) -> bool {
        let rows = self.hyperplanes.iter().map(|h| h.normal.clone()).collect();
        rank(&RatMat::new(rows, self.n).expect("normals share the ambient dimension")) == self.n
    }

    /// Boundedness of the nonempty face with the given sign, assuming the
    /// normals span. A nonzero recession direction `v` then pairs nonzero with
    /// some normal, and always with the sign of that hyperplane, so one probe
    /// `Σ σ_k ⟨u_k, v⟩ > 0` over the recession cone decides it.
    fn spanning_face_bounded(&self, sign: &[Sign]) -> bool {
        let mut cone = Vec::with_capacity(sign.len() + 1);
        let mut total = RatVec::zeros(self.n);
        for (h, &s) in self.hyperplanes.iter().zip(sign) {
            let relation = match s {
                Sign::Minus => Relation::Le,
                Sign::Zero => Relation::Eq,
                Sign::Plus => Relation::Ge,
            };
            match s {
                Sign::Minus => total = total.sub(&h.normal),
                Sign::Plus => total = total.add(&h.normal),
                Sign::Zero => {}
            }
            cone.push(LinearConstraint::new(h.normal.clone(), relation, Rat::zero()));
        }
        cone.push(LinearConstraint::new(total, Relation::Gt, Rat::zero()));
        feasible_witness(&cone, self.n).is_none()
    }

    /// Dimension of the affine hull of a nonempty face.
    pub fn face_dim(&self, sign: &SignVector) -> usize {
        let rows: Vec<RatVec> = sign.zero_positions().map(|i| self.hyperplanes[i].normal.clone()).collect();
        let on = RatMat::new(rows, self.n).expect("normals share the ambient dimension");
        self.n - rank(&on)
    }
}

/// Every nonempty cell of the arrangement, in lexicographic sign order
/// (`Minus < Zero < Plus`).
///
/// The search extends sign patterns one hyperplane at a time and abandons a
/// prefix as soon as its cell is empty. A child reuses the parent witness when
/// that point already satisfies the new sign.
pub fn enumerate_faces(arr: &Arrangement) -> Vec<Face> {
    let mut out = Vec::new();
    let mut constraints = Vec::with_capacity(arr.hyperplanes.len());
    let mut signs = Vec::with_capacity(arr.hyperplanes.len());
    let spanning = arr.normals_span();
    extend(arr, spanning, &mut constraints, &mut signs, RatVec::zeros(arr.n), &mut out);
    out
}

fn extend(
    arr: &Arrangement,
    spanning: bool,
    constraints: &mut Vec<LinearConstraint>,
    signs: &mut Vec<Sign>,
    witness: RatVec,
    out: &mut Vec<Face>,
) {
    let i = signs.len();
    if i == arr.hyperplanes.len() {
        let sign = SignVector(signs.clone());
        let dim = arr.face_dim(&sign);
        // Without spanning normals every face contains a line.
        let bounded = spanning && arr.spanning_face_bounded(&sign.0);
        out.push(Face { sign, dim, bounded, witness });
        return;
    }
    for s in Sign::ALL {
        let c = arr.hyperplanes[i].constraint(s);
        let next = if c.is_satisfied_by(&witness) {
            Some(witness.clone())
        } else {
            constraints.push(c.clone());
            let w = feasible_witness(constraints, arr.n);
            constraints.pop();
            w
        };
        if let Some(w) = next {
            constraints.push(c);
            signs.push(s);
            extend(arr, spanning, constraints, signs, w, out);
            signs.pop();
            constraints.pop();
        }
    }
}

/// Bounded faces of an arrangement, grouped by dimension.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BoundedComplex {
    pub n: usize,
    pub faces_by_dim: Vec<Vec<Face>>,
    pub counts: Vec<usize>,
}

impl BoundedComplex {
    /// `Σ (−1)^k d_k`.
    pub fn euler_sum(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    pub fn vertices(&self) -> &[Face] {
        &self.faces_by_dim[0]
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces_by_dim.iter().flatten()
    }
}

/// Keeps every bounded face (not only faces of bounded chambers) and checks
/// the result is closed under taking boundary faces.
pub fn bounded_complex(faces: &[Face]) -> Result<BoundedComplex, ArrangementError> {
    let n = faces.first().ok_or(ArrangementError::NoFaces)?.witness.dim();
    let by_sign: HashMap<&SignVector, &Face> = faces.iter().map(|f| (&f.sign, f)).collect();
    let mut faces_by_dim = vec![Vec::new(); n + 1];
    for face in faces.iter().filter(|f| f.bounded) {
        for (i, s) in face.sign.0.iter().enumerate() {
            if *s == Sign::Zero {
                continue;
            }
            let mut boundary = face.sign.clone();
            boundary.0[i] = Sign::Zero;
            if let Some(b) = by_sign.get(&boundary) {
                if !b.bounded {
                    return Err(ArrangementError::ComplexClosureViolation { face: face.sign.clone(), missing: boundary });
                }
            }
        }
        faces_by_dim[face.dim].push(face.clone());
    }
    let counts = faces_by_dim.iter().map(Vec::len).collect();
    Ok(BoundedComplex { n, faces_by_dim, counts })
}
