//! Independent reference implementations by exhaustive enumeration.
//!
//! Everything here is deliberately naive: enumerate the integer points of a
//! boxed pure-integer region, find hull vertices by per-point convex
//! combination LPs, optimize by scanning, and solve the inverse problem as a
//! single LP over the full point list. The rest of the crate is tested
//! against these.

use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::instance::MilpInstance;
use crate::lp::{solve_lp, LpOutcome, LpProblem, Relation, Sense};
use crate::milp::MilpOutcome;
use crate::rational::{dot, lex_cmp, Norm, Rat};
use crate::solver::build_master;

/// Safety valve for the enumeration volume.
const MAX_POINTS: u64 = 1_000_000;

/// All of S plus the vertex description of `conv(S+)`.
///
/// `hull_vertices` lists the vertices of `conv(S)` followed by `x0` when it
/// lies outside `conv(S)`; together they V-represent `conv(S+)` and include
/// every extreme point of `conv(S)`, which is what the encoding-length
/// bounds need.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedRegion {
    pub points: Vec<Vec<Rat>>,
    pub hull_vertices: Vec<Vec<Rat>>,
}

/// Exact convex-combination weights expressing `target` over `points`, if
/// any. The weights come from a basic feasible solution, so at most
/// `n + 1` of them are nonzero.
pub fn convex_weights(target: &[Rat], points: &[Vec<Rat>]) -> Result<Option<Vec<Rat>>, Error> {
    if points.is_empty() {
        return Ok(None);
    }
    let n = target.len();
    let k = points.len();
    let mut p = LpProblem::new(Sense::Min, vec![Rat::zero(); k]);
    for i in 0..n {
        let coeffs: Vec<Rat> = points.iter().map(|pt| pt[i].clone()).collect();
        p.push_row(coeffs, Relation::Eq, target[i].clone());
    }
    p.push_row(vec![Rat::one(); k], Relation::Eq, Rat::one());
    for j in 0..k {
        p.set_bounds(j, Some(Rat::zero()), None);
    }
    match solve_lp(&p)? {
        LpOutcome::Optimal { primal, .. } => Ok(Some(primal)),
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded { .. } => Err(Error::Internal("feasibility LP unbounded".into())),
    }
}

/// Enumerate the points of a bounded pure-integer region in lexicographic
/// order, without the hull computation.
pub fn enumerate_points(inst: &MilpInstance) -> Result<Vec<Vec<Rat>>, Error> {
    if !inst.is_pure_integer() {
        return Err(Error::Unsupported("enumeration requires a pure-integer instance".into()));
    }
    if !inst.is_box_bounded() {
        return Err(Error::Unsupported(
            "enumeration requires finite bounds on all variables".into(),
        ));
    }
    let n = inst.num_vars;
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut volume: u64 = 1;
    for j in 0..n {
        let l = inst.lower[j].as_ref().unwrap().ceil().to_integer();
        let h = inst.upper[j].as_ref().unwrap().floor().to_integer();
        if h < l {
            return Ok(Vec::new());
        }
        let width = (&h - &l + 1u32)
            .to_u64()
            .filter(|w| *w <= MAX_POINTS)
            .ok_or_else(|| Error::Unsupported("enumeration box too large".into()))?;
        volume = volume
            .checked_mul(width)
            .filter(|v| *v <= MAX_POINTS)
            .ok_or_else(|| Error::Unsupported("enumeration box too large".into()))?;
        lo.push(l);
        hi.push(h);
    }

    let mut points = Vec::new();
    let mut cursor = lo.clone();
    'outer: loop {
        let candidate: Vec<Rat> = cursor.iter().map(|v| Rat::from_integer(v.clone())).collect();
        if inst.contains(&candidate)? {
            points.push(candidate);
        }
        // odometer increment, last coordinate fastest for lex order
        let mut j = n;
        loop {
            if j == 0 {
                break 'outer;
            }
            j -= 1;
            if cursor[j] < hi[j] {
                cursor[j] += 1u32;
                cursor[(j + 1)..n].clone_from_slice(&lo[(j + 1)..n]);
                break;
            }
        }
    }
    Ok(points)
}

/// Enumerate a bounded pure-integer region and compute the hull vertices
/// of `S+`.
pub fn enumerate_region(
    inst: &MilpInstance,
    x0: Option<&[Rat]>,
) -> Result<EnumeratedRegion, Error> {
    let points = enumerate_points(inst)?;
    let hull_vertices = hull_of(&points, x0)?;
    Ok(EnumeratedRegion { points, hull_vertices })
}

fn hull_of(points: &[Vec<Rat>], x0: Option<&[Rat]>) -> Result<Vec<Vec<Rat>>, Error> {
    let mut verts: Vec<Vec<Rat>> = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        let others: Vec<Vec<Rat>> =
            points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        if convex_weights(pt, &others)?.is_none() {
            verts.push(pt.clone());
        }
    }
    if let Some(x0) = x0 {
        if convex_weights(x0, points)?.is_none() {
            verts.push(x0.to_vec());
        }
    }
    verts.sort_by(|a, b| lex_cmp(a, b));
    verts.dedup();
    Ok(verts)
}

/// `max d'x` by scanning, lexicographically largest argmax on ties (the
/// same rule the branch-and-bound oracle uses).
pub fn brute_forward_opt(region: &EnumeratedRegion, d: &[Rat]) -> MilpOutcome {
    let mut best: Option<(Rat, &Vec<Rat>)> = None;
    for pt in &region.points {
        let v = dot(d, pt);
        let better = match &best {
            None => true,
            Some((bv, bp)) => {
                v > *bv || (v == *bv && lex_cmp(pt, bp) == std::cmp::Ordering::Greater)
            }
        };
        if better {
            best = Some((v, pt));
        }
    }
    match best {
        Some((value, argmax)) => MilpOutcome::Optimal { argmax: argmax.clone(), value },
        None => MilpOutcome::Infeasible,
    }
}

/// Solve the inverse problem in one shot: the master LP with every
/// enumerated point as a cut. No cutting loop, one LP.
pub fn brute_inverse_opt(
    region: &EnumeratedRegion,
    c: &[Rat],
    x0: &[Rat],
    norm: Norm,
) -> Result<(Rat, Vec<Rat>), Error> {
    inverse_opt_over_points(&region.points, c, x0, norm)
}

pub(crate) fn inverse_opt_over_points(
    points: &[Vec<Rat>],
    c: &[Rat],
    x0: &[Rat],
    norm: Norm,
) -> Result<(Rat, Vec<Rat>), Error> {
    if points.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    let master = build_master(points, c, x0, norm);
    match solve_lp(&master)? {
        LpOutcome::Optimal { primal, value, .. } => Ok((value, primal[..c.len()].to_vec())),
        o => Err(Error::Internal(format!("full master not optimal: {o:?}"))),
    }
}
