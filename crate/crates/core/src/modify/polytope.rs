use serde::{Deserialize, Serialize};

use crate::exact::{feasible_witness, LinearConstraint, Rat, RatVec, Relation};

use super::ModifyError;

/// Half-space `⟨x, normal⟩ ≥ offset`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: RatVec,
    pub offset: Rat,
}

impl HalfSpace {
    pub fn new(normal: RatVec, offset: Rat) -> Self {
        HalfSpace { normal, offset }
    }

    fn constraint(&self) -> LinearConstraint {
        LinearConstraint::new(self.normal.clone(), Relation::Ge, self.offset.clone())
    }

    fn complement(&self) -> LinearConstraint {
        LinearConstraint::new(self.normal.clone(), Relation::Lt, self.offset.clone())
    }
}

/// Closed polyhedron in H-representation. Constraints may be redundant and
/// the set may be empty.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    pub constraints: Vec<HalfSpace>,
}

impl Polytope {
    pub fn new(dim: usize, constraints: Vec<HalfSpace>) -> Result<Self, ModifyError> {
        if let Some(bad) = constraints.iter().find(|h| h.normal.dim() != dim) {
            return Err(ModifyError::DimensionMismatch { expected: dim, found: bad.normal.dim() });
        }
        Ok(Polytope { dim, constraints })
    }

    /// Axis-aligned box `∏ [lo_i, hi_i]`.
    pub fn cuboid(bounds: &[(Rat, Rat)]) -> Polytope {
        let dim = bounds.len();
        let mut constraints = Vec::with_capacity(2 * dim);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            constraints.push(HalfSpace::new(RatVec::unit(dim, i), lo.clone()));
            constraints.push(HalfSpace::new(RatVec::unit(dim, i).scale(&Rat::from(-1)), -hi));
        }
        Polytope { dim, constraints }
    }

    fn linear_constraints(&self) -> Vec<LinearConstraint> {
        self.constraints.iter().map(HalfSpace::constraint).collect()
    }

    pub fn witness(&self) -> Option<RatVec> {
        feasible_witness(&self.linear_constraints(), self.dim)
    }

    pub fn is_empty(&self) -> bool {
        self.witness().is_none()
    }

    pub fn contains_point(&self, x: &RatVec) -> bool {
        self.linear_constraints().iter().all(|c| c.is_satisfied_by(x))
    }

    /// `other ⊆ self`, decided by infeasibility of `other ∧ ¬h` for every
    /// constraint `h` of `self`.
    pub fn contains(&self, other: &Polytope) -> bool {
        assert_eq!(self.dim, other.dim, "containment across dimensions");
        let base = other.linear_constraints();
        self.constraints.iter().all(|h| {
            let mut probe = base.clone();
            probe.push(h.complement());
            feasible_witness(&probe, self.dim).is_none()
        })
    }

    /// Same point set.
    pub fn same_set(&self, other: &Polytope) -> bool {
        self.contains(other) && other.contains(self)
    }

    pub fn intersect(&self, other: &Polytope) -> Result<Polytope, ModifyError> {
        if self.dim != other.dim {
            return Err(ModifyError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        Ok(Polytope { dim: self.dim, constraints })
    }

    /// The set translated by `shift`.
    pub fn translated(&self, shift: &RatVec) -> Result<Polytope, ModifyError> {
        if shift.dim() != self.dim {
            return Err(ModifyError::DimensionMismatch { expected: self.dim, found: shift.dim() });
        }
        let constraints = self
            .constraints
            .iter()
            .map(|h| HalfSpace::new(h.normal.clone(), &h.offset + &h.normal.dot(shift)))
            .collect();
        Ok(Polytope { dim: self.dim, constraints })
    }
}

/// Moment image of the symplectic cut at level `eps` for the circle with
/// weight `a`: the part of `p` where `⟨x, a⟩ ≥ eps`.
pub fn symplectic_cut_polytope(p: &Polytope, a: &RatVec, eps: &Rat) -> Result<Polytope, ModifyError> {
    if a.dim() != p.dim {
        return Err(ModifyError::DimensionMismatch { expected: p.dim, found: a.dim() });
    }
    let mut out = p.clone();
    out.constraints.push(HalfSpace::new(a.clone(), eps.clone()));
    Ok(out)
}

/// Cut by a polytope: keep the part of `p` inside `delta + shift`.
pub fn generalized_cut(p: &Polytope, delta: &Polytope, shift: &RatVec) -> Result<Polytope, ModifyError> {
    p.intersect(&delta.translated(shift)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polytope {
        Polytope::cuboid(&[(Rat::zero(), Rat::one()), (Rat::zero(), Rat::one())])
    }

    #[test]
    fn cut_square_in_half() {
        let cut = symplectic_cut_polytope(&unit_square(), &RatVec::from_ints(&[1, 0]), &Rat::new(1, 2)).unwrap();
        let expected = Polytope::cuboid(&[(Rat::new(1, 2), Rat::one()), (Rat::zero(), Rat::one())]);
        assert!(cut.same_set(&expected));
    }

    #[test]
    fn low_cut_is_noop_high_cut_is_empty() {
        let a = RatVec::from_ints(&[1, 0]);
        let low = symplectic_cut_polytope(&unit_square(), &a, &Rat::from(-1)).unwrap();
        assert!(low.same_set(&unit_square()));
        let high = symplectic_cut_polytope(&unit_square(), &a, &Rat::from(2)).unwrap();
        assert!(high.is_empty());
    }

    #[test]
    fn generalized_cut_examples() {
        let two = Polytope::cuboid(&[(Rat::zero(), Rat::from(2)), (Rat::zero(), Rat::from(2))]);
        let got = generalized_cut(&two, &unit_square(), &RatVec::zeros(2)).unwrap();
        assert!(got.same_set(&unit_square()));
        let off = generalized_cut(&two, &unit_square(), &RatVec::from_ints(&[5, 0])).unwrap();
        assert!(off.is_empty());
        let big = Polytope::cuboid(&[(Rat::from(-3), Rat::from(3)), (Rat::from(-3), Rat::from(3))]);
        assert!(generalized_cut(&two, &big, &RatVec::zeros(2)).unwrap().same_set(&two));
    }

    #[test]
    fn dimension_errors() {
        assert!(symplectic_cut_polytope(&unit_square(), &RatVec::from_ints(&[1]), &Rat::zero()).is_err());
        assert!(generalized_cut(&unit_square(), &unit_square(), &RatVec::zeros(3)).is_err());
        assert!(Polytope::new(2, vec![HalfSpace::new(RatVec::zeros(1), Rat::zero())]).is_err());
    }
}
