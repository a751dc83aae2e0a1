use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, Rat};

/// Dense vector of rationals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVec(Vec<Rat>);

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rat::zero(); dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = Rat::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVec(entries.iter().map(|&x| Rat::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rat> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        assert_eq!(self.dim(), other.dim(), "dot product of mismatched vectors");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, factor: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim());
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim());
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Rat::to_f64).collect()
    }
}

impl Index<usize> for RatVec {
    type Output = Rat;
    fn index(&self, index: usize) -> &Rat {
        &self.0[index]
    }
}

impl FromIterator<Rat> for RatVec {
    fn from_iter<I: IntoIterator<Item = Rat>>(iter: I) -> Self {
        RatVec(iter.into_iter().collect())
    }
}

impl std::fmt::Debug for RatVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// Rectangular rational matrix stored by rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: Vec<RatVec>,
    cols: usize,
}

impl RatMat {
    pub fn new(rows: Vec<RatVec>, cols: usize) -> Result<Self, ExactError> {
        if let Some(bad) = rows.iter().position(|r| r.dim() != cols) {
            return Err(ExactError::Ragged { row: bad, expected: cols, found: rows[bad].dim() });
        }
        Ok(RatMat { rows, cols })
    }

    /// Builds from integer rows. Panics if rows differ in length.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| RatVec::from_ints(r)).collect();
        RatMat::new(rows, cols).expect("ragged integer matrix")
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[RatVec] {
        &self.rows
    }

    pub fn transpose(&self) -> RatMat {
        let rows = (0..self.cols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        RatMat { rows, cols: self.rows.len() }
    }

    pub fn mul_vec(&self, x: &RatVec) -> RatVec {
        self.rows.iter().map(|r| r.dot(x)).collect()
    }
}

/// Exact rank over the rationals.
///
/// Rows are first cleared of denominators, then reduced with Bareiss
/// fraction-free elimination so every intermediate entry stays an integer
/// minor of the input.
pub fn rank(a: &RatMat) -> usize {
    let mut m: Vec<Vec<BigInt>> = a.rows.iter().map(integer_row).collect();
    let nrows = m.len();
    let ncols = a.cols;
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pivot) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in r + 1..nrows {
            for j in col + 1..ncols {
                let v = &m[i][j] * &m[r][col] - &m[i][col] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        r += 1;
    }
    r
}

/// Exact determinant of a square matrix.
pub fn determinant(a: &RatMat) -> Result<Rat, ExactError> {
    if a.nrows() != a.ncols() {
        return Err(ExactError::DimensionMismatch { expected: a.ncols(), found: a.nrows() });
    }
    let mut m: Vec<Vec<Rat>> = a.rows.iter().map(|r| r.entries().to_vec()).collect();
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Ok(Rat::zero());
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        let inv = m[col][col].recip();
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot = &upper[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] * &inv;
            for (x, p) in row[col..n].iter_mut().zip(&pivot[col..n]) {
                let delta = &factor * p;
                *x -= &delta;
            }
        }
    }
    Ok(det)
}

fn integer_row(row: &RatVec) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Particular solution and kernel basis of an affine system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineSolution {
    pub witness: RatVec,
    pub nullspace_basis: Vec<RatVec>,
}

/// Reduced row echelon form with leftmost pivots. Returns the pivot columns.
fn rref(m: &mut [Vec<Rat>], ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in 0..m[i].len() {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= &delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Solves `A x = b` exactly.
///
/// The witness sets every free variable to zero; each kernel basis vector
/// sets one free variable to one and the others to zero.
pub fn solve_affine(a: &RatMat, b: &RatVec) -> Result<Option<AffineSolution>, ExactError> {
    if a.nrows() != b.dim() {
        return Err(ExactError::DimensionMismatch { expected: a.nrows(), found: b.dim() });
    }
    let n = a.ncols();
    let mut m: Vec<Vec<Rat>> = a
        .rows
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut v = row.entries().to_vec();
            v.push(rhs.clone());
            v
        })
        .collect();
    let pivots = rref(&mut m, n);
    if m[pivots.len()..].iter().any(|row| !row[n].is_zero()) {
        return Ok(None);
    }
    let mut witness = vec![Rat::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        witness[c] = m[r][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let nullspace_basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); n];
            v[f] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -&m[r][f];
            }
            RatVec::new(v)
        })
        .collect();
    Ok(Some(AffineSolution { witness: RatVec::new(witness), nullspace_basis }))
}

/// Kernel basis of `A` (same convention as [`solve_affine`]).
pub fn nullspace(a: &RatMat) -> Vec<RatVec> {
    solve_affine(a, &RatVec::zeros(a.nrows()))
        .expect("dimensions agree by construction")
        .expect("homogeneous system is consistent")
        .nullspace_basis
}
