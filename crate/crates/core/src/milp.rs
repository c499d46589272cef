//! Branch-and-bound forward oracle: `max d'x over S`.
//!
//! This is the separation oracle of the cutting-plane loop. Pure
//! branch-and-bound over exact LP relaxations, no cutting planes inside the
//! oracle. Branching picks the lowest-index integer variable with a
//! fractional LP value and explores the down branch first; node selection is
//! best bound with insertion order breaking ties, so traces are
//! reproducible. Among equal-value integer optima the lexicographically
//! largest argmax is returned (established by a refinement pass after the
//! optimal value is known).

use std::cell::Cell;

use num_traits::One;

use crate::error::Error;
use crate::instance::{InverseInstance, MilpInstance};
use crate::lp::{solve_lp, LpOutcome, LpProblem, LpRow, Relation, Sense};
use crate::rational::{dot, zeros, Rat};

/// Outcome of the forward problem `max d'x over S`.
#[derive(Debug, Clone, PartialEq)]
pub enum MilpOutcome {
    Optimal { argmax: Vec<Rat>, value: Rat },
    Unbounded { ray: Vec<Rat> },
    Infeasible,
}

thread_local! {
    static MILP_SOLVES: Cell<u64> = const { Cell::new(0) };
}

/// Number of `solve_milp` calls made by the current thread.
pub fn milp_solve_count() -> u64 {
    MILP_SOLVES.with(|c| c.get())
}

const NODE_LIMIT: u64 = 1_000_000;

fn node_lp(
    inst: &MilpInstance,
    d: &[Rat],
    extra_rows: &[LpRow],
    lower: &[Option<Rat>],
    upper: &[Option<Rat>],
) -> LpProblem {
    let mut p = LpProblem::new(Sense::Max, d.to_vec());
    for (coeffs, rhs) in &inst.rows {
        p.push_row(coeffs.clone(), Relation::Le, rhs.clone());
    }
    for row in extra_rows {
        p.push_row(row.coeffs.clone(), row.rel, row.rhs.clone());
    }
    for j in 0..inst.num_vars {
        p.set_bounds(j, lower[j].clone(), upper[j].clone());
    }
    p
}

struct Node {
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
    bound: Option<Rat>, // parent LP value; None at the root
    seq: u64,
}

/// Branch and bound without the lexicographic refinement.
fn solve_raw(inst: &MilpInstance, d: &[Rat], extra_rows: &[LpRow]) -> Result<MilpOutcome, Error> {
    if d.len() != inst.num_vars {
        return Err(Error::DimensionMismatch { expected: inst.num_vars, got: d.len() });
    }

    let root = node_lp(inst, d, extra_rows, &inst.lower, &inst.upper);
    match solve_lp(&root)? {
        LpOutcome::Infeasible { .. } => Ok(MilpOutcome::Infeasible),
        LpOutcome::Unbounded { ray } => {
            // The relaxation improves along a rational ray; if S holds any
            // point at all, integer multiples of the ray stay feasible and
            // integral, so the MILP itself is unbounded.
            if find_integer_point(inst, extra_rows)?.is_some() {
                Ok(MilpOutcome::Unbounded { ray })
            } else {
                Ok(MilpOutcome::Infeasible)
            }
        }
        LpOutcome::Optimal { primal, value, .. } => {
            let mut queue: Vec<Node> = Vec::new();
            let mut incumbent: Option<(Rat, Vec<Rat>)> = None;
            let mut seq = 0u64;
            let mut nodes = 0u64;

            // seed with the solved root
            process(
                inst,
                &inst.lower,
                &inst.upper,
                primal,
                value,
                &mut incumbent,
                &mut queue,
                &mut seq,
            );

            while let Some(idx) = select_best(&queue) {
                nodes += 1;
                if nodes > NODE_LIMIT {
                    return Err(Error::SearchLimit);
                }
                let node = queue.swap_remove(idx);
                // only strict improvements matter: argmax canonicalization
                // happens in the refinement pass
                if let (Some((inc, _)), Some(bound)) = (&incumbent, &node.bound) {
                    if bound <= inc {
                        continue;
                    }
                }
                let p = node_lp(inst, d, extra_rows, &node.lower, &node.upper);
                match solve_lp(&p)? {
                    LpOutcome::Infeasible { .. } => continue,
                    LpOutcome::Unbounded { .. } => {
                        return Err(Error::Internal("subnode unbounded below bounded root".into()))
                    }
                    LpOutcome::Optimal { primal, value, .. } => {
                        if let Some((inc, _)) = &incumbent {
                            if value <= *inc {
                                continue;
                            }
                        }
                        process(
                            inst,
                            &node.lower,
                            &node.upper,
                            primal,
                            value,
                            &mut incumbent,
                            &mut queue,
                            &mut seq,
                        );
                    }
                }
            }
            match incumbent {
                Some((value, argmax)) => Ok(MilpOutcome::Optimal { argmax, value }),
                None => Ok(MilpOutcome::Infeasible),
            }
        }
    }
}

/// Either record an integral LP optimum or branch on the first fractional
/// integer variable (down branch first).
#[allow(clippy::too_many_arguments)]
fn process(
    inst: &MilpInstance,
    lower: &[Option<Rat>],
    upper: &[Option<Rat>],
    primal: Vec<Rat>,
    value: Rat,
    incumbent: &mut Option<(Rat, Vec<Rat>)>,
    queue: &mut Vec<Node>,
    seq: &mut u64,
) {
    let frac = (0..inst.num_int).find(|&j| !primal[j].is_integer());
    match frac {
        None => {
            let better = match incumbent {
                None => true,
                Some((inc, _)) => value > *inc,
            };
            if better {
                *incumbent = Some((value, primal));
            }
        }
        Some(j) => {
            let down = lower.to_vec();
            let mut down_up = upper.to_vec();
            down_up[j] = Some(primal[j].floor());
            let mut up = lower.to_vec();
            up[j] = Some(primal[j].ceil());
            queue.push(Node { lower: down, upper: down_up, bound: Some(value.clone()), seq: *seq });
            *seq += 1;
            queue.push(Node { lower: up, upper: upper.to_vec(), bound: Some(value), seq: *seq });
            *seq += 1;
        }
    }
}

fn select_best(queue: &[Node]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, node) in queue.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let cur = &queue[b];
                match (&node.bound, &cur.bound) {
                    (None, _) => true,
                    (_, None) => false,
                    (Some(nb), Some(cb)) => nb > cb || (nb == cb && node.seq < cur.seq),
                }
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Any member of S (honoring `extra_rows`), found by branch and bound with
/// a zero objective, whose relaxations are never unbounded.
fn find_integer_point(
    inst: &MilpInstance,
    extra_rows: &[LpRow],
) -> Result<Option<Vec<Rat>>, Error> {
    match solve_raw(inst, &zeros(inst.num_vars), extra_rows)? {
        MilpOutcome::Optimal { argmax, .. } => Ok(Some(argmax)),
        MilpOutcome::Infeasible => Ok(None),
        MilpOutcome::Unbounded { .. } => Err(Error::Internal("zero objective unbounded".into())),
    }
}

/// `max d'x over S`, deterministic: among equal-value optima the
/// lexicographically largest point is returned.
pub fn solve_milp(inst: &MilpInstance, d: &[Rat]) -> Result<MilpOutcome, Error> {
    solve_milp_with_rows(inst, d, &[])
}

pub(crate) fn solve_milp_with_rows(
    inst: &MilpInstance,
    d: &[Rat],
    extra_rows: &[LpRow],
) -> Result<MilpOutcome, Error> {
    MILP_SOLVES.with(|c| c.set(c.get() + 1));
    let raw = solve_raw(inst, d, extra_rows)?;
    let MilpOutcome::Optimal { argmax, value } = raw else {
        return Ok(raw);
    };

    // Lexicographic refinement over the optimal face: fix coordinates one at
    // a time, maximizing each in turn subject to d'x >= value.
    let mut rows = extra_rows.to_vec();
    rows.push(LpRow { coeffs: d.to_vec(), rel: Relation::Ge, rhs: value.clone() });
    let mut fixed = inst.clone();
    let mut point = argmax.clone();
    for j in 0..inst.num_vars {
        let mut e = zeros(inst.num_vars);
        e[j] = Rat::one();
        match solve_raw(&fixed, &e, &rows)? {
            MilpOutcome::Optimal { argmax: _, value: best_j } => {
                point[j] = best_j.clone();
                fixed.lower[j] = Some(best_j.clone());
                fixed.upper[j] = Some(best_j);
            }
            // an unbounded coordinate on the optimal face: no lexicographic
            // maximum exists, keep the incumbent from the main search
            MilpOutcome::Unbounded { .. } => return Ok(MilpOutcome::Optimal { argmax, value }),
            MilpOutcome::Infeasible => {
                return Err(Error::Internal("optimal face empty during refinement".into()))
            }
        }
    }
    debug_assert_eq!(dot(d, &point), value);
    Ok(MilpOutcome::Optimal { argmax: point, value })
}

/// Answer of the separation problem for `D(x0)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveFeasibility {
    /// `max d'x over S <= d'x0`, so `d` is a feasible objective.
    Feasible,
    /// A point of S whose objective value exceeds `d'x0`.
    Violated(Vec<Rat>),
    /// The forward problem is unbounded in direction `d`; the ray witnesses
    /// that `d` is not a feasible objective.
    UnboundedRay(Vec<Rat>),
}

impl ObjectiveFeasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ObjectiveFeasibility::Feasible)
    }
}

/// Decide `d ∈ D(x0)` by solving the forward problem: feasible iff
/// `max_{x in S} d'x <= d'x0`. An empty S makes every objective feasible.
pub fn is_feasible_objective(
    inv: &InverseInstance,
    d: &[Rat],
) -> Result<ObjectiveFeasibility, Error> {
    match solve_milp(&inv.forward, d)? {
        MilpOutcome::Optimal { argmax, value } => {
            if value <= dot(d, &inv.x0) {
                Ok(ObjectiveFeasibility::Feasible)
            } else {
                Ok(ObjectiveFeasibility::Violated(argmax))
            }
        }
        MilpOutcome::Unbounded { ray } => Ok(ObjectiveFeasibility::UnboundedRay(ray)),
        MilpOutcome::Infeasible => Ok(ObjectiveFeasibility::Feasible),
    }
}
