//! Membership tests for the cone family `K(gamma)`, `K*(gamma)` and
//! `D(x0)`.
//!
//! `K*(gamma)` is defined by quantification over the ball `K(gamma)`, which
//! is not directly executable; the implementation uses the closed form
//! `min_{d in K(gamma)} d'(x - x0) = c'(x - x0) - gamma * ||x - x0||_dual`
//! where the dual norm swaps l1 and l-infinity.

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::instance::MilpInstance;
use crate::milp::{is_feasible_objective, ObjectiveFeasibility};
use crate::rational::{dot, norm, sub, Norm, Rat};

#[derive(Debug, Clone, PartialEq)]
pub struct ConeQuery {
    pub c: Vec<Rat>,
    pub x0: Vec<Rat>,
    pub gamma: Rat,
    pub norm: Norm,
}

/// Position of a point relative to the radial cone `K*(gamma)` at `x0`.
///
/// The apex is its own class: interior/boundary semantics there are
/// gamma-dependent and the dual-bound characterization excludes `x0`
/// explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KstarClass {
    Interior,
    Boundary,
    Outside,
    Apex,
}

/// `min_{d in K(gamma)} d'(x - x0)`, the margin deciding K* membership.
pub fn kstar_margin(x: &[Rat], q: &ConeQuery) -> Rat {
    let v = sub(x, &q.x0);
    dot(&q.c, &v) - &q.gamma * norm(&v, q.norm.dual())
}

pub fn kstar_classify(x: &[Rat], q: &ConeQuery) -> KstarClass {
    if x == q.x0.as_slice() {
        return KstarClass::Apex;
    }
    let margin = kstar_margin(x, q);
    if margin.is_positive() {
        KstarClass::Interior
    } else if margin.is_zero() {
        KstarClass::Boundary
    } else {
        KstarClass::Outside
    }
}

/// `||c - d|| <= gamma`: membership in the ball `K(gamma)`.
pub fn in_k(d: &[Rat], q: &ConeQuery) -> bool {
    norm(&sub(&q.c, d), q.norm) <= q.gamma
}

/// `d ∈ D(x0)`: delegates to the forward oracle.
pub fn in_d(x0: &[Rat], d: &[Rat], inst: &MilpInstance) -> Result<bool, Error> {
    let inv = crate::instance::InverseInstance::new(
        inst.clone(),
        x0.to_vec(),
        vec![Rat::zero(); inst.num_vars],
        Norm::Linf,
    )?;
    Ok(matches!(is_feasible_objective(&inv, d)?, ObjectiveFeasibility::Feasible))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::desk_instance;
    use crate::rational::{rat, ratio};
    use proptest::prelude::*;

    fn desk_query(gamma: Rat) -> ConeQuery {
        let inv = desk_instance();
        ConeQuery { c: inv.c, x0: inv.x0, gamma, norm: Norm::Linf }
    }

    #[test]
    fn classify_examples() {
        let q = desk_query(rat(1));
        assert_eq!(kstar_classify(&[rat(3), rat(0)], &q), KstarClass::Interior);
        assert_eq!(kstar_classify(&[rat(0), rat(3)], &q), KstarClass::Apex);
        let q = desk_query(ratio(3, 2));
        assert_eq!(kstar_classify(&[rat(3), rat(0)], &q), KstarClass::Boundary);
    }

    #[test]
    fn ball_membership() {
        let q = desk_query(ratio(3, 2));
        assert!(in_k(&[rat(2), rat(-1)], &q));
        assert!(in_k(&[ratio(1, 2), ratio(1, 2)], &q));
        let q = desk_query(rat(1));
        assert!(!in_k(&[ratio(1, 2), ratio(1, 2)], &q));
    }

    #[test]
    fn feasible_cone_examples() {
        let inv = desk_instance();
        assert!(in_d(&inv.x0, &[ratio(2, 5), ratio(3, 5)], &inv.forward).unwrap());
        assert!(!in_d(&inv.x0, &[rat(2), rat(-1)], &inv.forward).unwrap());
        assert!(in_d(&inv.x0, &[rat(0), rat(0)], &inv.forward).unwrap());
    }

    fn arb_point() -> impl Strategy<Value = Vec<Rat>> {
        proptest::collection::vec((-6i64..7, 1i64..4).prop_map(|(p, q)| ratio(p, q)), 2)
    }

    proptest! {
        // the closed form agrees with minimizing over the 2^n corners of the
        // l-infinity ball K(gamma)
        #[test]
        fn closed_form_matches_ball_corners(x in arb_point(), g in 0i64..4) {
            let q = desk_query(rat(g));
            let v = crate::rational::sub(&x, &q.x0);
            let mut corner_min: Option<Rat> = None;
            for mask in 0..4u8 {
                let d = vec![
                    &q.c[0] + if mask & 1 == 0 { rat(g) } else { rat(-g) },
                    &q.c[1] + if mask & 2 == 0 { rat(g) } else { rat(-g) },
                ];
                let val = dot(&d, &v);
                corner_min = Some(match corner_min {
                    None => val,
                    Some(m) => m.min(val),
                });
            }
            prop_assert_eq!(kstar_margin(&x, &q), corner_min.unwrap());
        }

        // gamma = 0 collapses K* to the half-space c'x >= c'x0
        #[test]
        fn zero_gamma_is_halfspace(x in arb_point()) {
            let q = desk_query(rat(0));
            let member = matches!(
                kstar_classify(&x, &q),
                KstarClass::Interior | KstarClass::Boundary | KstarClass::Apex
            );
            prop_assert_eq!(member, dot(&q.c, &x) >= dot(&q.c, &q.x0));
        }

        // growing gamma shrinks K*
        #[test]
        fn monotone_in_gamma(x in arb_point(), g1 in 0i64..4, extra in 0i64..4) {
            let small = desk_query(rat(g1));
            let large = desk_query(rat(g1 + extra));
            let in_large = !kstar_margin(&x, &large).is_negative();
            let in_small = !kstar_margin(&x, &small).is_negative();
            prop_assert!(!in_large || in_small);
        }
    }
}
