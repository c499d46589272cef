//! The cutting-plane method for the inverse problem, and its Fenchel-cut
//! separation variant.
//!
//! Iteration k solves a master LP restricted to the cuts collected so far,
//! asks the forward oracle for a maximizer of the candidate objective, and
//! either terminates (no violation) or adds the maximizer as a new cut. If
//! the very first oracle call is unbounded the loop stops with the fallback
//! `theta* = ||c||`, `d* = 0`; unboundedness at any later iteration aborts
//! with a diagnostic.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::instance::{InverseInstance, MilpInstance};
use crate::lp::{solve_lp, LpOutcome, LpProblem, Relation, Sense};
use crate::milp::{solve_milp, MilpOutcome};
use crate::rational::{dot, norm, sub, zeros, Norm, Rat};

/// One row of the trace: the master solution at iteration `k` and the
/// oracle's answer (absent when the oracle was unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub d: Vec<Rat>,
    pub theta: Rat,
    pub x: Option<Vec<Rat>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveOutcome {
    Converged,
    UnboundedForward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub iterations: Vec<IterationRecord>,
    pub e_final: Vec<Vec<Rat>>,
    pub outcome: SolveOutcome,
}

impl SolveTrace {
    /// The cut set the master saw at iteration `k` (1-based): all points
    /// generated strictly before it.
    pub fn cuts_at(&self, k: usize) -> Vec<Vec<Rat>> {
        self.iterations.iter().take(k.saturating_sub(1)).filter_map(|it| it.x.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub d_star: Vec<Rat>,
    pub theta_star: Rat,
    pub trace: SolveTrace,
}

/// Master LP for the l-infinity norm: variables `(d, theta)`, rows
/// `c_i - d_i <= theta`, `d_i - c_i <= theta`, and `d'(x - x0) <= 0` for
/// every cut point.
pub fn build_master_linf(e: &[Vec<Rat>], c: &[Rat], x0: &[Rat]) -> LpProblem {
    let n = c.len();
    let mut obj = zeros(n + 1);
    obj[n] = Rat::one();
    let mut p = LpProblem::new(Sense::Min, obj);
    for i in 0..n {
        // c_i - d_i <= theta
        let mut row = zeros(n + 1);
        row[i] = -Rat::one();
        row[n] = -Rat::one();
        p.push_row(row, Relation::Le, -&c[i]);
        // d_i - c_i <= theta
        let mut row = zeros(n + 1);
        row[i] = Rat::one();
        row[n] = -Rat::one();
        p.push_row(row, Relation::Le, c[i].clone());
    }
    for x in e {
        let mut row = sub(x, x0);
        row.push(Rat::zero());
        p.push_row(row, Relation::Le, Rat::zero());
    }
    p
}

/// Master LP for the l1 norm: variables `(d, y, theta)` with
/// `theta = sum y_i`, `c_i - d_i <= y_i`, `d_i - c_i <= y_i`, plus cuts.
pub fn build_master_l1(e: &[Vec<Rat>], c: &[Rat], x0: &[Rat]) -> LpProblem {
    let n = c.len();
    let t = 2 * n; // theta's index
    let mut obj = zeros(2 * n + 1);
    obj[t] = Rat::one();
    let mut p = LpProblem::new(Sense::Min, obj);
    let mut link = zeros(2 * n + 1);
    link[t] = Rat::one();
    for i in 0..n {
        link[n + i] = -Rat::one();
    }
    p.push_row(link, Relation::Eq, Rat::zero());
    for i in 0..n {
        let mut row = zeros(2 * n + 1);
        row[i] = -Rat::one();
        row[n + i] = -Rat::one();
        p.push_row(row, Relation::Le, -&c[i]);
        let mut row = zeros(2 * n + 1);
        row[i] = Rat::one();
        row[n + i] = -Rat::one();
        p.push_row(row, Relation::Le, c[i].clone());
    }
    for x in e {
        let mut row = sub(x, x0);
        row.extend(zeros(n + 1));
        p.push_row(row, Relation::Le, Rat::zero());
    }
    p
}

pub fn build_master(e: &[Vec<Rat>], c: &[Rat], x0: &[Rat], which: Norm) -> LpProblem {
    match which {
        Norm::Linf => build_master_linf(e, c, x0),
        Norm::L1 => build_master_l1(e, c, x0),
    }
}

const ITERATION_LIMIT: usize = 100_000;

/// The cutting-plane loop.
pub fn solve_inverse(inv: &InverseInstance) -> Result<InverseSolution, Error> {
    if inv.estimate_is_zero() {
        return Err(Error::ZeroEstimate);
    }
    let n = inv.forward.num_vars;
    let mut cuts: Vec<Vec<Rat>> = Vec::new();
    let mut iterations: Vec<IterationRecord> = Vec::new();

    for k in 1..=ITERATION_LIMIT {
        let master = build_master(&cuts, &inv.c, &inv.x0, inv.norm);
        let (d_k, theta_k) = match solve_lp(&master)? {
            LpOutcome::Optimal { primal, value, .. } => (primal[..n].to_vec(), value),
            o => return Err(Error::Internal(format!("master not optimal: {o:?}"))),
        };
        debug_assert_eq!(theta_k, norm(&sub(&inv.c, &d_k), inv.norm));

        match solve_milp(&inv.forward, &d_k)? {
            MilpOutcome::Infeasible => return Err(Error::EmptyFeasibleSet),
            MilpOutcome::Unbounded { .. } => {
                if k > 1 {
                    return Err(Error::UnboundedDirection { iteration: k });
                }
                iterations.push(IterationRecord { k, d: d_k, theta: theta_k, x: None });
                let theta_star = norm(&inv.c, inv.norm);
                return Ok(InverseSolution {
                    d_star: zeros(n),
                    theta_star,
                    trace: SolveTrace {
                        iterations,
                        e_final: cuts,
                        outcome: SolveOutcome::UnboundedForward,
                    },
                });
            }
            MilpOutcome::Optimal { argmax, value } => {
                let violation = &value - dot(&d_k, &inv.x0);
                iterations.push(IterationRecord {
                    k,
                    d: d_k.clone(),
                    theta: theta_k.clone(),
                    x: Some(argmax.clone()),
                });
                if violation.is_positive() {
                    debug_assert!(!cuts.contains(&argmax));
                    cuts.push(argmax);
                } else {
                    return Ok(InverseSolution {
                        d_star: d_k,
                        theta_star: theta_k,
                        trace: SolveTrace {
                            iterations,
                            e_final: cuts,
                            outcome: SolveOutcome::Converged,
                        },
                    });
                }
            }
        }
    }
    Err(Error::SearchLimit)
}

/// Result of separating `x0` from `conv(S)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeparationOutcome {
    /// `x0` is a convex combination of the listed points of S.
    InHull(Vec<(Vec<Rat>, Rat)>),
    /// `d'x <= beta` is valid for S and `d'x0 > beta`.
    Cut { d: Vec<Rat>, beta: Rat },
}

/// Fenchel separation: the same loop with the master objective replaced by
/// the violation `d'x0 - beta`, box-normalized to `-1 <= d_i <= 1`.
pub fn fenchel_separate(inst: &MilpInstance, x0: &[Rat]) -> Result<SeparationOutcome, Error> {
    if x0.len() != inst.num_vars {
        return Err(Error::DimensionMismatch { expected: inst.num_vars, got: x0.len() });
    }
    if inst.contains(x0)? {
        return Ok(SeparationOutcome::InHull(vec![(x0.to_vec(), Rat::one())]));
    }
    let n = inst.num_vars;
    // seed the point pool so the master is bounded
    let seed = match solve_milp(inst, &zeros(n))? {
        MilpOutcome::Optimal { argmax, .. } => argmax,
        MilpOutcome::Infeasible => return Err(Error::EmptyFeasibleSet),
        MilpOutcome::Unbounded { .. } => unreachable!("zero objective cannot be unbounded"),
    };
    let mut pool: Vec<Vec<Rat>> = vec![seed];

    for _ in 0..ITERATION_LIMIT {
        // maximize d'x0 - beta  st  d'x <= beta for x in pool, -1 <= d <= 1
        let mut obj: Vec<Rat> = x0.to_vec();
        obj.push(-Rat::one());
        let mut master = LpProblem::new(Sense::Max, obj);
        for x in &pool {
            let mut row = x.clone();
            row.push(-Rat::one());
            master.push_row(row, Relation::Le, Rat::zero());
        }
        for j in 0..n {
            master.set_bounds(j, Some(-Rat::one()), Some(Rat::one()));
        }
        let (d, beta, violation) = match solve_lp(&master)? {
            LpOutcome::Optimal { primal, value, .. } => {
                (primal[..n].to_vec(), primal[n].clone(), value)
            }
            o => return Err(Error::Internal(format!("separation master: {o:?}"))),
        };
        if !violation.is_positive() {
            // x0 is in conv(pool); recover weights by a feasibility LP
            let weights = crate::brute::convex_weights(x0, &pool)?
                .ok_or_else(|| Error::Internal("hull membership without weights".into()))?;
            let support: Vec<(Vec<Rat>, Rat)> =
                pool.into_iter().zip(weights).filter(|(_, w)| !w.is_zero()).collect();
            return Ok(SeparationOutcome::InHull(support));
        }
        match solve_milp(inst, &d)? {
            MilpOutcome::Unbounded { .. } => {
                return Err(Error::Domain(
                    "forward problem unbounded in a separation direction".into(),
                ))
            }
            MilpOutcome::Infeasible => unreachable!("pool is nonempty"),
            MilpOutcome::Optimal { argmax, value } => {
                if value <= beta {
                    return Ok(SeparationOutcome::Cut { d, beta });
                }
                pool.push(argmax);
            }
        }
    }
    Err(Error::SearchLimit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::desk_instance;
    use crate::rational::{rat, ratio};

    #[test]
    fn empty_master_recovers_estimate() {
        let inv = desk_instance();
        let p = build_master_linf(&[], &inv.c, &inv.x0);
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { primal, value, .. } => {
                assert_eq!(value, rat(0));
                assert_eq!(&primal[..2], &[rat(2), rat(-1)]);
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn master_with_cuts_matches_worked_example() {
        let inv = desk_instance();
        let e1 = vec![vec![rat(3), rat(0)]];
        let p = build_master_linf(&e1, &inv.c, &inv.x0);
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(3, 2)),
            o => panic!("unexpected {o:?}"),
        }
        let e2 = vec![vec![rat(3), rat(0)], vec![rat(3), rat(1)]];
        let p = build_master_linf(&e2, &inv.c, &inv.x0);
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(8, 5)),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn l1_master_examples() {
        let inv = desk_instance();
        let p = build_master_l1(&[], &inv.c, &inv.x0);
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(0)),
            o => panic!("unexpected {o:?}"),
        }
        // one cut: minimize |2-d1| + |-1-d2| st d1 <= d2; the objective is
        // constant 3 on the segment d1 = d2 in [-1, 2]
        let e1 = vec![vec![rat(3), rat(0)]];
        let p = build_master_l1(&e1, &inv.c, &inv.x0);
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(3)),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn desk_solve_reproduces_worked_trace() {
        let inv = desk_instance();
        let sol = solve_inverse(&inv).unwrap();
        assert_eq!(sol.theta_star, ratio(8, 5));
        assert_eq!(sol.d_star, vec![ratio(2, 5), ratio(3, 5)]);
        let it = &sol.trace.iterations;
        assert_eq!(it.len(), 3);
        assert_eq!(it[0].d, vec![rat(2), rat(-1)]);
        assert_eq!(it[0].x.as_ref().unwrap(), &vec![rat(3), rat(0)]);
        assert_eq!(it[0].theta, rat(0));
        assert_eq!(it[1].d, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(it[1].x.as_ref().unwrap(), &vec![rat(3), rat(1)]);
        assert_eq!(it[1].theta, ratio(3, 2));
        assert_eq!(it[2].d, vec![ratio(2, 5), ratio(3, 5)]);
        assert_eq!(it[2].x.as_ref().unwrap(), &vec![rat(3), rat(1)]);
        assert_eq!(it[2].theta, ratio(8, 5));
        assert_eq!(sol.trace.outcome, SolveOutcome::Converged);
    }

    #[test]
    fn already_optimal_target() {
        let mut inv = desk_instance();
        inv.x0 = vec![rat(3), rat(0)];
        let sol = solve_inverse(&inv).unwrap();
        assert_eq!(sol.theta_star, rat(0));
        assert_eq!(sol.d_star, inv.c);
    }

    #[test]
    fn unbounded_forward_fallback() {
        let mut fwd = MilpInstance::new(2, 2);
        fwd.set_bounds(0, Some(rat(0)), None);
        fwd.set_bounds(1, Some(rat(0)), None);
        let inv = InverseInstance::new(fwd, vec![rat(0), rat(0)], vec![rat(1), rat(1)], Norm::Linf)
            .unwrap();
        let sol = solve_inverse(&inv).unwrap();
        assert_eq!(sol.trace.outcome, SolveOutcome::UnboundedForward);
        assert_eq!(sol.theta_star, rat(1));
        assert_eq!(sol.d_star, vec![rat(0), rat(0)]);
        assert_eq!(sol.trace.iterations.len(), 1);
        assert!(sol.trace.iterations[0].x.is_none());
    }

    #[test]
    fn l1_fallback_uses_l1_norm() {
        let mut fwd = MilpInstance::new(2, 2);
        fwd.set_bounds(0, Some(rat(0)), None);
        fwd.set_bounds(1, Some(rat(0)), None);
        let inv = InverseInstance::new(fwd, vec![rat(0), rat(0)], vec![rat(1), rat(1)], Norm::L1)
            .unwrap();
        let sol = solve_inverse(&inv).unwrap();
        assert_eq!(sol.theta_star, rat(2));
    }

    #[test]
    fn zero_estimate_rejected() {
        let mut inv = desk_instance();
        inv.c = vec![rat(0), rat(0)];
        assert_eq!(solve_inverse(&inv), Err(Error::ZeroEstimate));
    }

    #[test]
    fn empty_s_rejected() {
        let mut inv = desk_instance();
        inv.forward.push_row(vec![rat(1), rat(0)], rat(-1));
        assert_eq!(solve_inverse(&inv), Err(Error::EmptyFeasibleSet));
    }

    #[test]
    fn theta_is_nondecreasing() {
        let inv = desk_instance();
        let sol = solve_inverse(&inv).unwrap();
        for w in sol.trace.iterations.windows(2) {
            assert!(w[0].theta <= w[1].theta);
        }
    }

    #[test]
    fn fenchel_cut_for_outside_point() {
        let inv = desk_instance();
        match fenchel_separate(&inv.forward, &inv.x0).unwrap() {
            SeparationOutcome::Cut { d, beta } => {
                let region = crate::brute::enumerate_region(&inv.forward, Some(&inv.x0)).unwrap();
                for pt in &region.points {
                    assert!(dot(&d, pt) <= beta);
                }
                assert!(dot(&d, &inv.x0) > beta);
            }
            o => panic!("expected a cut, got {o:?}"),
        }
    }

    #[test]
    fn fenchel_member_of_s_short_circuits() {
        let inv = desk_instance();
        match fenchel_separate(&inv.forward, &[rat(1), rat(1)]).unwrap() {
            SeparationOutcome::InHull(w) => {
                assert_eq!(w, vec![(vec![rat(1), rat(1)], rat(1))]);
            }
            o => panic!("expected in-hull, got {o:?}"),
        }
    }

    #[test]
    fn fenchel_fractional_hull_member() {
        let inv = desk_instance();
        let x = vec![ratio(3, 2), ratio(1, 2)];
        match fenchel_separate(&inv.forward, &x).unwrap() {
            SeparationOutcome::InHull(support) => {
                let mut total = rat(0);
                let mut combo = vec![rat(0), rat(0)];
                for (pt, w) in &support {
                    assert!(inv.forward.contains(pt).unwrap());
                    assert!(!w.is_negative());
                    total += w;
                    combo[0] += &pt[0] * w;
                    combo[1] += &pt[1] * w;
                }
                assert_eq!(total, rat(1));
                assert_eq!(combo, x);
            }
            o => panic!("expected in-hull, got {o:?}"),
        }
    }
}
