//! Fourier–Motzkin feasibility with strict-inequality tracking.

use std::collections::BTreeMap;

use super::{ExactError, Rat, RatVec};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    /// Same direction, strictness dropped.
    pub fn relaxed(self) -> Relation {
        match self {
            Relation::Lt | Relation::Le => Relation::Le,
            Relation::Eq => Relation::Eq,
            Relation::Ge | Relation::Gt => Relation::Ge,
        }
    }

    /// The relation describing the complement of the half-space, if any.
    pub fn negated(self) -> Option<Relation> {
        match self {
            Relation::Lt => Some(Relation::Ge),
            Relation::Le => Some(Relation::Gt),
            Relation::Eq => None,
            Relation::Ge => Some(Relation::Lt),
            Relation::Gt => Some(Relation::Le),
        }
    }
}

/// `⟨normal, x⟩ relation offset`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearConstraint {
    pub normal: RatVec,
    pub relation: Relation,
    pub offset: Rat,
}

impl LinearConstraint {
    pub fn new(normal: RatVec, relation: Relation, offset: Rat) -> Self {
        LinearConstraint { normal, relation, offset }
    }

    pub fn is_satisfied_by(&self, x: &RatVec) -> bool {
        self.relation.holds(&self.normal.dot(x), &self.offset)
    }

    /// Recession-cone counterpart: offset zeroed, strictness relaxed.
    pub fn homogenized(&self) -> LinearConstraint {
        LinearConstraint {
            normal: self.normal.clone(),
            relation: self.relation.relaxed(),
            offset: Rat::zero(),
        }
    }
}

/// `coeffs · x + constant > 0` (strict) or `≥ 0`.
#[derive(Clone, Debug)]
struct Ineq {
    coeffs: Vec<Rat>,
    constant: Rat,
    strict: bool,
}

impl Ineq {
    fn eval_partial(&self, x: &[Rat], upto: usize) -> Rat {
        let mut acc = self.constant.clone();
        for (c, v) in self.coeffs[..upto].iter().zip(x) {
            if !c.is_zero() {
                acc += &(c * v);
            }
        }
        acc
    }
}

/// Affine expression `Σ coeffs_j x_j + constant` used for eliminated variables.
#[derive(Clone, Debug)]
struct Subst {
    var: usize,
    coeffs: Vec<Rat>,
    constant: Rat,
}

fn substitute(coeffs: &mut [Rat], constant: &mut Rat, s: &Subst) {
    let c = std::mem::replace(&mut coeffs[s.var], Rat::zero());
    if c.is_zero() {
        return;
    }
    for (dst, src) in coeffs.iter_mut().zip(&s.coeffs) {
        if !src.is_zero() {
            *dst += &(&c * src);
        }
    }
    *constant += &(&c * &s.constant);
}

/// Keeps the tightest inequality per normalized direction. `None` when a
/// constant inequality is violated.
fn normalize(system: Vec<Ineq>) -> Option<Vec<Ineq>> {
    let mut by_dir: BTreeMap<Vec<Rat>, (Rat, bool)> = BTreeMap::new();
    for ineq in system {
        let Some(lead) = ineq.coeffs.iter().find(|c| !c.is_zero()) else {
            let ok = if ineq.strict { ineq.constant.is_positive() } else { !ineq.constant.is_negative() };
            if !ok {
                return None;
            }
            continue;
        };
        let scale = lead.abs().recip();
        let coeffs: Vec<Rat> = ineq.coeffs.iter().map(|c| c * &scale).collect();
        let constant = &ineq.constant * &scale;
        by_dir
            .entry(coeffs)
            .and_modify(|(c, s)| {
                if constant < *c {
                    *c = constant.clone();
                    *s = ineq.strict;
                } else if constant == *c {
                    *s |= ineq.strict;
                }
            })
            .or_insert((constant, ineq.strict));
    }
    Some(
        by_dir
            .into_iter()
            .map(|(coeffs, (constant, strict))| Ineq { coeffs, constant, strict })
            .collect(),
    )
}

/// Finds an exact point satisfying every constraint (strict ones strictly),
/// or `None` when the region is empty.
///
/// Equalities are eliminated by substitution on their leftmost variable; the
/// remaining inequalities go through Fourier–Motzkin from the last variable
/// down. Back-substitution picks the midpoint of each admissible interval,
/// `bound ± 1` for a strict half-line, the bound itself for a closed one, and
/// zero when unconstrained.
///
/// # Panics
/// If some constraint normal does not have length `dim`.
pub fn feasible_witness(cs: &[LinearConstraint], dim: usize) -> Option<RatVec> {
    for c in cs {
        assert_eq!(c.normal.dim(), dim, "constraint normal has wrong dimension");
    }

    let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut ineqs: Vec<Ineq> = Vec::new();
    for c in cs {
        let a = c.normal.entries();
        match c.relation {
            Relation::Eq => eqs.push((a.to_vec(), -&c.offset)),
            Relation::Gt | Relation::Ge => ineqs.push(Ineq {
                coeffs: a.to_vec(),
                constant: -&c.offset,
                strict: c.relation == Relation::Gt,
            }),
            Relation::Lt | Relation::Le => ineqs.push(Ineq {
                coeffs: a.iter().map(|x| -x).collect(),
                constant: c.offset.clone(),
                strict: c.relation == Relation::Lt,
            }),
        }
    }

    // Equalities `coeffs · x + constant = 0`.
    let mut substs: Vec<Subst> = Vec::new();
    for eq in &eqs {
        let (mut coeffs, mut constant) = eq.clone();
        for s in &substs {
            substitute(&mut coeffs, &mut constant, s);
        }
        let Some(p) = coeffs.iter().position(|c| !c.is_zero()) else {
            if !constant.is_zero() {
                return None;
            }
            continue;
        };
        let inv = -coeffs[p].recip();
        coeffs[p] = Rat::zero();
        let s = Subst {
            var: p,
            coeffs: coeffs.iter().map(|c| c * &inv).collect(),
            constant: &constant * &inv,
        };
        for prev in substs.iter_mut() {
            let (mut pc, mut pk) = (prev.coeffs.clone(), prev.constant.clone());
            substitute(&mut pc, &mut pk, &s);
            prev.coeffs = pc;
            prev.constant = pk;
        }
        substs.push(s);
    }
    for ineq in ineqs.iter_mut() {
        for s in &substs {
            substitute(&mut ineq.coeffs, &mut ineq.constant, s);
        }
    }

    let mut system = normalize(ineqs)?;
    let mut levels: Vec<Vec<Ineq>> = vec![Vec::new(); dim];
    for var in (0..dim).rev() {
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in system {
            match ineq.coeffs[var].signum() {
                1 => lower.push(ineq),
                -1 => upper.push(ineq),
                _ => rest.push(ineq),
            }
        }
        for lo in &lower {
            for up in &upper {
                // lo: a x + p > 0 with a > 0, up: -b x + q > 0 with b > 0.
                let a = &lo.coeffs[var];
                let b = -&up.coeffs[var];
                let coeffs = lo
                    .coeffs
                    .iter()
                    .zip(&up.coeffs)
                    .map(|(l, u)| &b * l + a * u)
                    .collect::<Vec<_>>();
                let constant = &b * &lo.constant + a * &up.constant;
                rest.push(Ineq { coeffs, constant, strict: lo.strict || up.strict });
            }
        }
        let mut kept = lower;
        kept.extend(upper);
        levels[var] = kept;
        system = normalize(rest)?;
    }

    let mut x = vec![Rat::zero(); dim];
    for var in 0..dim {
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for ineq in &levels[var] {
            let a = &ineq.coeffs[var];
            let bound = -ineq.eval_partial(&x, var) / a;
            if a.is_positive() {
                tighten(&mut lo, bound, ineq.strict, |new, old| new > old);
            } else {
                tighten(&mut hi, bound, ineq.strict, |new, old| new < old);
            }
        }
        x[var] = match (lo, hi) {
            (Some((l, _)), Some((h, _))) => {
                if l == h {
                    l
                } else {
                    (l + h) / Rat::from(2)
                }
            }
            (Some((l, strict)), None) => {
                if strict {
                    l + Rat::one()
                } else {
                    l
                }
            }
            (None, Some((h, strict))) => {
                if strict {
                    h - Rat::one()
                } else {
                    h
                }
            }
            (None, None) => Rat::zero(),
        };
    }
    for s in &substs {
        let mut v = s.constant.clone();
        for (c, xv) in s.coeffs.iter().zip(&x) {
            if !c.is_zero() {
                v += &(c * xv);
            }
        }
        x[s.var] = v;
    }
    let witness = RatVec::new(x);
    debug_assert!(cs.iter().all(|c| c.is_satisfied_by(&witness)));
    Some(witness)
}

fn tighten(slot: &mut Option<(Rat, bool)>, bound: Rat, strict: bool, better: impl Fn(&Rat, &Rat) -> bool) {
    match slot {
        None => *slot = Some((bound, strict)),
        Some((old, old_strict)) => {
            if better(&bound, old) {
                *slot = Some((bound, strict));
            } else if bound == *old {
                *old_strict |= strict;
            }
        }
    }
}

/// Whether the closure of the (nonempty) region is bounded, i.e. its
/// recession cone is `{0}`.
pub fn is_bounded(cs: &[LinearConstraint], dim: usize) -> Result<bool, ExactError> {
    if feasible_witness(cs, dim).is_none() {
        return Err(ExactError::EmptyRegion);
    }
    let cone: Vec<LinearConstraint> = cs.iter().map(LinearConstraint::homogenized).collect();
    for axis in 0..dim {
        for relation in [Relation::Gt, Relation::Lt] {
            let mut probe = cone.clone();
            probe.push(LinearConstraint::new(RatVec::unit(dim, axis), relation, Rat::zero()));
            if feasible_witness(&probe, dim).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
