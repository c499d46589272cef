//! The six bound/value verification problems, the Karp reductions between
//! the forward and inverse families, and Carathéodory certificates.
//!
//! Deciders solve to optimality and compare exactly; arithmetic is exact so
//! there are no tolerance semantics anywhere. Certificates are lists of at
//! most `n + 1` points of `S+` with convex weights whose combination lands
//! in (or on) the cone `K*(gamma)`; verifying one is pure arithmetic and
//! never touches an oracle.

use num_traits::{One, Signed, Zero};

use crate::brute::{convex_weights, enumerate_points, enumerate_region, inverse_opt_over_points};
use crate::error::Error;
use crate::geometry::{kstar_classify, kstar_margin, ConeQuery, KstarClass};
use crate::instance::{InverseInstance, MilpInstance};
use crate::lp::{solve_lp, LpOutcome, LpProblem, Relation, Sense};
use crate::milp::{solve_milp, MilpOutcome};
use crate::rational::{
    dot, encoding_length_rat, encoding_length_vec, l2_norm_squared, pow2, scale, sub, Norm, Rat,
};
use crate::solver::solve_inverse;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
}

impl Decision {
    pub fn from_bool(b: bool) -> Decision {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn as_bool(self) -> bool {
        self == Decision::Yes
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
        }
    }
}

/// Does some `x in S` achieve `d'x >= alpha`?
///
/// Unbounded instances answer YES for every alpha, empty ones NO.
pub fn decide_mpvp(alpha: &Rat, inst: &MilpInstance, d: &[Rat]) -> Result<Decision, Error> {
    Ok(match solve_milp(inst, d)? {
        MilpOutcome::Optimal { value, .. } => Decision::from_bool(value >= *alpha),
        MilpOutcome::Unbounded { .. } => Decision::Yes,
        MilpOutcome::Infeasible => Decision::No,
    })
}

/// Is `d'x <= alpha` for all `x in S`? Vacuously YES on empty instances.
pub fn decide_mdvp(alpha: &Rat, inst: &MilpInstance, d: &[Rat]) -> Result<Decision, Error> {
    Ok(match solve_milp(inst, d)? {
        MilpOutcome::Optimal { value, .. } => Decision::from_bool(value <= *alpha),
        MilpOutcome::Unbounded { .. } => Decision::No,
        MilpOutcome::Infeasible => Decision::Yes,
    })
}

/// Is `max d'x over S` exactly alpha? The intersection of the two bound
/// verification languages.
pub fn decide_movp(alpha: &Rat, inst: &MilpInstance, d: &[Rat]) -> Result<Decision, Error> {
    Ok(match solve_milp(inst, d)? {
        MilpOutcome::Optimal { value, .. } => Decision::from_bool(value == *alpha),
        MilpOutcome::Unbounded { .. } | MilpOutcome::Infeasible => Decision::No,
    })
}

/// Is there a feasible objective within gamma of the estimate, i.e. is
/// `K(gamma) ∩ D(x0)` nonempty?
pub fn decide_impvp(gamma: &Rat, inv: &InverseInstance) -> Result<Decision, Error> {
    let sol = solve_inverse(inv)?;
    Ok(Decision::from_bool(sol.theta_star <= *gamma))
}

/// Is `||c - d|| >= gamma` for every feasible objective?
pub fn decide_imdvp(gamma: &Rat, inv: &InverseInstance) -> Result<Decision, Error> {
    let sol = solve_inverse(inv)?;
    Ok(Decision::from_bool(sol.theta_star >= *gamma))
}

/// Is the inverse optimum exactly gamma?
pub fn decide_imovp(gamma: &Rat, inv: &InverseInstance) -> Result<Decision, Error> {
    let sol = solve_inverse(inv)?;
    Ok(Decision::from_bool(sol.theta_star == *gamma))
}

/// Data produced by a reduction: the constructed target, the granularity
/// constants, the vertex complexity used, and the bound to decide at.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionArtifacts {
    pub x_target: Vec<Rat>,
    pub epsilon: Rat,
    pub delta: Rat,
    pub nu: u64,
    pub gamma_out: Rat,
}

impl ReductionArtifacts {
    /// The inverse instance the reduction decides.
    pub fn inverse_instance(
        &self,
        inst: &MilpInstance,
        c: &[Rat],
        norm: Norm,
    ) -> Result<InverseInstance, Error> {
        InverseInstance::new(inst.clone(), self.x_target.clone(), c.to_vec(), norm)
    }
}

/// `alpha * c / ||c||_2^2`: the point whose forward objective value is
/// exactly alpha.
fn scaled_target(alpha: &Rat, c: &[Rat]) -> Result<Vec<Rat>, Error> {
    let nsq = l2_norm_squared(c);
    if nsq.is_zero() {
        return Err(Error::ZeroEstimate);
    }
    Ok(scale(c, &(alpha / nsq)))
}

/// MDVP -> IMPVP: decide `d'x <= alpha for all x` by asking whether the
/// estimate itself is a feasible objective for the target `x^alpha`,
/// i.e. IMPVP at gamma = 0.
pub fn reduce_mdvp_to_impvp(
    alpha: &Rat,
    _inst: &MilpInstance,
    c: &[Rat],
) -> Result<ReductionArtifacts, Error> {
    Ok(ReductionArtifacts {
        x_target: scaled_target(alpha, c)?,
        epsilon: Rat::zero(),
        delta: Rat::zero(),
        nu: 0,
        gamma_out: Rat::zero(),
    })
}

/// Vertex complexity of `conv(S+)` (or of `conv(S)` when no target is
/// given): the maximum encoding length over a V-representation.
///
/// Exact mode enumerates the hull of bounded pure-integer instances; for
/// `r = 0` the bound `4 n^2 phi` over the facet complexity is returned.
/// General mixed instances need a user-supplied value.
pub fn vertex_complexity(inst: &MilpInstance, x0: Option<&[Rat]>) -> Result<u64, Error> {
    if inst.is_pure_integer() && inst.is_box_bounded() {
        let region = enumerate_region(inst, x0)?;
        return region
            .hull_vertices
            .iter()
            .map(|v| encoding_length_vec(v))
            .max()
            .ok_or(Error::EmptyFeasibleSet);
    }
    if inst.num_int == 0 {
        let n = inst.num_vars as u64;
        let mut phi: u64 = 0;
        let mut consider = |coeffs: &[Rat], rhs: &Rat| {
            phi = phi.max(encoding_length_vec(coeffs) + encoding_length_rat(rhs));
        };
        for (coeffs, rhs) in &inst.rows {
            consider(coeffs, rhs);
        }
        for j in 0..inst.num_vars {
            if let Some(lo) = &inst.lower[j] {
                let mut row = vec![Rat::zero(); inst.num_vars];
                row[j] = -Rat::one();
                consider(&row, &-lo);
            }
            if let Some(hi) = &inst.upper[j] {
                let mut row = vec![Rat::zero(); inst.num_vars];
                row[j] = Rat::one();
                consider(&row, hi);
            }
        }
        return Ok(4 * n * n * phi);
    }
    Err(Error::Unsupported(
        "vertex complexity of general mixed instances must be supplied explicitly".into(),
    ))
}

/// The granularity constants of the bound-separation argument:
/// `epsilon = 2^(-max(<c> + nu, <alpha>) - 1)` and
/// `delta = 2^(-<x_target> - nu - 1)`.
///
/// `x0_target` is the already-constructed target `x^(alpha - epsilon)`; the
/// delta exponent uses its encoding length (two-pass computation).
pub fn lemma3_constants(alpha: &Rat, c: &[Rat], x0_target: &[Rat], nu: u64) -> (Rat, Rat) {
    let eps = epsilon_constant(alpha, c, nu);
    let delta = pow2(-((encoding_length_vec(x0_target) + nu + 1) as i64));
    (eps, delta)
}

fn epsilon_constant(alpha: &Rat, c: &[Rat], nu: u64) -> Rat {
    let e = (encoding_length_vec(c) + nu).max(encoding_length_rat(alpha));
    pow2(-(e as i64) - 1)
}

/// MPVP -> IMDVP: decide `exists x with c'x >= alpha` by verifying the
/// dual bound `epsilon * delta` on the inverse instance with target
/// `x^(alpha - epsilon)`.
pub fn reduce_mpvp_to_imdvp(
    alpha: &Rat,
    inst: &MilpInstance,
    c: &[Rat],
    nu_override: Option<u64>,
) -> Result<ReductionArtifacts, Error> {
    let nu = match nu_override {
        Some(nu) => nu,
        None => vertex_complexity(inst, None)?,
    };
    let epsilon = epsilon_constant(alpha, c, nu);
    let x_target = scaled_target(&(alpha - &epsilon), c)?;
    let (_, delta) = lemma3_constants(alpha, c, &x_target, nu);
    let gamma_out = &epsilon * &delta;
    Ok(ReductionArtifacts { x_target, epsilon, delta, nu, gamma_out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertClaim {
    /// Witnesses that gamma is a strict dual bound: the IMPVP answer is NO.
    ImpvpNo,
    /// Witnesses that gamma is a dual bound: the IMDVP answer is YES.
    ImdvpYes,
}

impl CertClaim {
    pub fn as_str(self) -> &'static str {
        match self {
            CertClaim::ImpvpNo => "impvp-no",
            CertClaim::ImdvpYes => "imdvp-yes",
        }
    }

    pub fn parse(s: &str) -> Option<CertClaim> {
        match s {
            "impvp-no" => Some(CertClaim::ImpvpNo),
            "imdvp-yes" => Some(CertClaim::ImdvpYes),
            _ => None,
        }
    }
}

/// A short certificate: at most `n + 1` members of `S+` with convex weights
/// whose combination classifies inside (or on) `K*(gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub points: Vec<Vec<Rat>>,
    pub weights: Vec<Rat>,
    pub claim: CertClaim,
    pub gamma: Rat,
}

// Maximize the K*-margin `c'(xbar - x0) - gamma ||xbar - x0||_dual` over
// the convex hull of `generators`, linearized through auxiliary variables
// bounding the dual norm.
fn margin_max(
    generators: &[Vec<Rat>],
    c: &[Rat],
    x0: &[Rat],
    gamma: &Rat,
    norm: Norm,
    require_nonneg_margin: bool,
) -> Result<Option<(Rat, Vec<Rat>)>, Error> {
    if generators.is_empty() {
        return Ok(None);
    }
    let n = x0.len();
    let k = generators.len();
    let aux = match norm.dual() {
        Norm::L1 => n,
        Norm::Linf => 1,
    };
    let total = k + aux;

    let margin_coeffs = |obj: &mut [Rat]| {
        for (j, g) in generators.iter().enumerate() {
            obj[j] = dot(c, &sub(g, x0));
        }
        for a in 0..aux {
            obj[k + a] = -gamma.clone();
        }
    };

    let mut obj = vec![Rat::zero(); total];
    if require_nonneg_margin {
        // stage two: maximize the dual-norm proxy subject to margin >= 0
        for a in 0..aux {
            obj[k + a] = Rat::one();
        }
    } else {
        margin_coeffs(&mut obj);
    }

    let mut p = LpProblem::new(Sense::Max, obj);
    // |xbar_i - x0_i| <= aux var
    for i in 0..n {
        let ai = k + if aux == 1 { 0 } else { i };
        let mut row = vec![Rat::zero(); total];
        for (j, g) in generators.iter().enumerate() {
            row[j] = g[i].clone();
        }
        row[ai] = -Rat::one();
        p.push_row(row.clone(), Relation::Le, x0[i].clone());
        let mut neg = row;
        for item in neg.iter_mut().take(k) {
            *item = -&*item;
        }
        p.push_row(neg, Relation::Le, -&x0[i]);
    }
    // convexity
    let mut conv = vec![Rat::zero(); total];
    for item in conv.iter_mut().take(k) {
        *item = Rat::one();
    }
    p.push_row(conv, Relation::Eq, Rat::one());
    if require_nonneg_margin {
        let mut row = vec![Rat::zero(); total];
        margin_coeffs(&mut row);
        p.push_row(row, Relation::Ge, Rat::zero());
    }
    for j in 0..total {
        p.set_bounds(j, Some(Rat::zero()), None);
    }

    match solve_lp(&p)? {
        LpOutcome::Optimal { primal, value, .. } => {
            let mut xbar = vec![Rat::zero(); n];
            for (j, g) in generators.iter().enumerate() {
                if !primal[j].is_zero() {
                    for (xi, gi) in xbar.iter_mut().zip(g) {
                        *xi += &primal[j] * gi;
                    }
                }
            }
            Ok(Some((value, xbar)))
        }
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded { .. } => Err(Error::Internal("margin LP unbounded".into())),
    }
}

fn prune_to_certificate(
    xbar: &[Rat],
    generators: &[Vec<Rat>],
    claim: CertClaim,
    gamma: &Rat,
) -> Result<Certificate, Error> {
    let weights = convex_weights(xbar, generators)?
        .ok_or_else(|| Error::Internal("witness lost its own hull".into()))?;
    let mut points = Vec::new();
    let mut kept = Vec::new();
    for (g, w) in generators.iter().zip(weights) {
        if !w.is_zero() {
            points.push(g.clone());
            kept.push(w);
        }
    }
    debug_assert!(points.len() <= xbar.len() + 1);
    Ok(Certificate { points, weights: kept, claim, gamma: gamma.clone() })
}

/// Existence (with witness) of an interior point of `K*(gamma)` in
/// `conv(S+)`: the primal-space characterization of "gamma is a strict
/// dual bound".
pub fn interior_witness(inv: &InverseInstance, gamma: &Rat) -> Result<Option<Vec<Rat>>, Error> {
    let mut generators = enumerate_points(&inv.forward)?;
    generators.push(inv.x0.clone());
    let Some((_, xbar)) = margin_max(&generators, &inv.c, &inv.x0, gamma, inv.norm, false)? else {
        return Ok(None);
    };
    let q =
        ConeQuery { c: inv.c.clone(), x0: inv.x0.clone(), gamma: gamma.clone(), norm: inv.norm };
    if kstar_margin(&xbar, &q).is_positive() {
        Ok(Some(xbar))
    } else {
        Ok(None)
    }
}

/// Existence (with witness) of a point of `conv(S+)` other than `x0` inside
/// `K*(gamma)`: the characterization of "gamma is a dual bound". Needs
/// `gamma > 0`.
pub fn boundary_witness(inv: &InverseInstance, gamma: &Rat) -> Result<Option<Vec<Rat>>, Error> {
    if !gamma.is_positive() {
        return Err(Error::Domain("dual-bound witnesses need gamma > 0".into()));
    }
    if let Some(xbar) = interior_witness(inv, gamma)? {
        return Ok(Some(xbar));
    }
    // No interior point: look for a zero-margin point away from the apex,
    // maximizing its dual-norm distance from x0. A cone argument moves any
    // witness in conv(S+) into conv(S), so the generators exclude x0 and a
    // positive optimum certifies xbar != x0.
    let points = enumerate_points(&inv.forward)?;
    if points.is_empty() {
        return Ok(None);
    }
    match margin_max(&points, &inv.c, &inv.x0, gamma, inv.norm, true)? {
        Some((dist, xbar)) if dist.is_positive() => Ok(Some(xbar)),
        _ => Ok(None),
    }
}

/// Build a certificate for the strongest claim available at this gamma:
/// an interior witness when `gamma < theta*` (IMPVP answer NO), a
/// dual-bound witness when `gamma = theta* > 0` (IMDVP answer YES), and
/// nothing when `gamma > theta*`.
pub fn build_certificate(inv: &InverseInstance, gamma: &Rat) -> Result<Option<Certificate>, Error> {
    let cnorm = inv.estimate_norm()?;
    if gamma.is_negative() || *gamma >= cnorm {
        return Err(Error::Domain("certificate gamma must satisfy 0 <= gamma < ||c||".into()));
    }
    let points = enumerate_points(&inv.forward)?;
    if points.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    let (theta, _) = inverse_opt_over_points(&points, &inv.c, &inv.x0, inv.norm)?;
    let mut generators = points;
    generators.push(inv.x0.clone());
    if *gamma < theta {
        let xbar = interior_witness(inv, gamma)?
            .ok_or_else(|| Error::Internal("strict dual bound without interior witness".into()))?;
        Ok(Some(prune_to_certificate(&xbar, &generators, CertClaim::ImpvpNo, gamma)?))
    } else if *gamma == theta && gamma.is_positive() {
        let xbar = boundary_witness(inv, gamma)?
            .ok_or_else(|| Error::Internal("dual bound without boundary witness".into()))?;
        Ok(Some(prune_to_certificate(&xbar, &generators, CertClaim::ImdvpYes, gamma)?))
    } else {
        Ok(None)
    }
}

/// Check a certificate by direct substitution: membership of every point in
/// `S+`, convexity of the weights, and the cone classification of the
/// combination. Never calls an LP, MILP or inverse solve.
pub fn verify_certificate(cert: &Certificate, inv: &InverseInstance) -> bool {
    let n = inv.forward.num_vars;
    if cert.points.is_empty()
        || cert.points.len() != cert.weights.len()
        || cert.points.len() > n + 1
    {
        return false;
    }
    if cert.gamma.is_negative() || cert.gamma >= inv.norm.eval(&inv.c) {
        return false;
    }
    if cert.claim == CertClaim::ImdvpYes && !cert.gamma.is_positive() {
        return false;
    }
    let mut total = Rat::zero();
    let mut xbar = vec![Rat::zero(); n];
    for (pt, w) in cert.points.iter().zip(&cert.weights) {
        if w.is_negative() {
            return false;
        }
        match inv.contains_plus(pt) {
            Ok(true) => {}
            _ => return false,
        }
        total += w;
        for (xi, pi) in xbar.iter_mut().zip(pt) {
            *xi += w * pi;
        }
    }
    if !total.is_one() {
        return false;
    }
    let q = ConeQuery {
        c: inv.c.clone(),
        x0: inv.x0.clone(),
        gamma: cert.gamma.clone(),
        norm: inv.norm,
    };
    matches!(
        (cert.claim, kstar_classify(&xbar, &q)),
        (CertClaim::ImpvpNo, KstarClass::Interior)
            | (CertClaim::ImdvpYes, KstarClass::Interior | KstarClass::Boundary)
    )
}
