//! Exact rational simplex.
//!
//! Two-phase primal simplex with Bland's smallest-index rule throughout, so
//! every solve terminates and is deterministic. Optimal outcomes carry exact
//! duals, unbounded outcomes an improving ray, infeasible outcomes a Farkas
//! vector; [`check_lp_certificate`] re-verifies any outcome by direct
//! substitution. All comparisons are exact; there is no epsilon anywhere in
//! this module.

use std::cell::Cell;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{dot, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

/// A linear program over free or bounded variables.
///
/// Bounds are semantically ordinary rows; they are stored separately so the
/// solver can absorb simple lower bounds into variable shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<Rat>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<(Option<Rat>, Option<Rat>)>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<Rat>) -> Self {
        let n = objective.len();
        LpProblem { sense, objective, rows: Vec::new(), bounds: vec![(None, None); n] }
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) {
        assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push(LpRow { coeffs, rel, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lo: Option<Rat>, hi: Option<Rat>) {
        self.bounds[var] = (lo, hi);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

/// Solver outcome with its certificate.
///
/// For `Optimal`, `dual` has one multiplier per explicit row. With sense
/// `Min` the multipliers satisfy `y <= 0` on `<=` rows and `y >= 0` on `>=`
/// rows (mirrored for `Max`), `obj - A'y` vanishes except against active
/// variable bounds, and strong duality holds exactly.
///
/// For `Infeasible`, `farkas` holds nonnegative multipliers on the
/// `<=`-normalized rows (free sign on equalities) whose aggregate is
/// violated by every point of the bound box.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { primal: Vec<Rat>, value: Rat, dual: Vec<Rat> },
    Unbounded { ray: Vec<Rat> },
    Infeasible { farkas: Vec<Rat> },
}

thread_local! {
    static LP_SOLVES: Cell<u64> = const { Cell::new(0) };
}

/// Number of `solve_lp` calls made by the current thread.
pub fn lp_solve_count() -> u64 {
    LP_SOLVES.with(|c| c.get())
}

const PIVOT_LIMIT: u64 = 2_000_000;

// How a structural column maps back to a problem variable.
#[derive(Debug, Clone)]
struct Col {
    var: usize,
    sign: i8, // +1 or -1
}

struct Standardized {
    cols: Vec<Col>,
    shifts: Vec<Rat>,
    // equality system rows: matrix over (structural + slack + artificial)
    // columns, rhs >= 0 after sign flips
    matrix: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    flipped: Vec<bool>,
    n_structural: usize,
    n_slack: usize,
    slack_of_row: Vec<Option<usize>>, // column index of the row's slack
    artificial_of_row: Vec<Option<usize>>,
    n_explicit: usize, // original rows; the rest are upper-bound rows
}

fn standardize(p: &LpProblem) -> Standardized {
    let n = p.num_vars();
    let mut cols = Vec::new();
    let mut shifts = vec![Rat::zero(); n];
    let mut upper_rows: Vec<(usize, Rat)> = Vec::new(); // (var, hi - lo in x' coords)

    for (j, bound) in p.bounds.iter().enumerate() {
        match bound {
            (Some(lo), hi) => {
                shifts[j] = lo.clone();
                cols.push(Col { var: j, sign: 1 });
                if let Some(hi) = hi {
                    upper_rows.push((j, hi - lo));
                }
            }
            (None, Some(hi)) => {
                shifts[j] = hi.clone();
                cols.push(Col { var: j, sign: -1 });
            }
            (None, None) => {
                cols.push(Col { var: j, sign: 1 });
                cols.push(Col { var: j, sign: -1 });
            }
        }
    }
    let n_structural = cols.len();

    // Structural part of every row, with shift-adjusted rhs.
    let mut rows: Vec<(Vec<Rat>, Relation, Rat)> = Vec::new();
    for row in &p.rows {
        let mut coeffs = Vec::with_capacity(n_structural);
        for col in &cols {
            let a = &row.coeffs[col.var];
            coeffs.push(if col.sign == 1 { a.clone() } else { -a });
        }
        let adj: Rat = row.coeffs.iter().zip(&shifts).map(|(a, s)| a * s).sum();
        rows.push((coeffs, row.rel, &row.rhs - adj));
    }
    let n_explicit = rows.len();
    for (var, cap) in upper_rows {
        // x'_var <= hi - lo
        let mut coeffs = vec![Rat::zero(); n_structural];
        let ci = cols.iter().position(|c| c.var == var && c.sign == 1).unwrap();
        coeffs[ci] = Rat::one();
        rows.push((coeffs, Relation::Le, cap));
    }

    let m = rows.len();
    let mut slack_sign: Vec<i8> = Vec::with_capacity(m);
    let mut flipped = vec![false; m];
    for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
        let mut s: i8 = match rel {
            Relation::Le => 1,
            Relation::Ge => -1,
            Relation::Eq => 0,
        };
        if rhs.is_negative() {
            flipped[i] = true;
            for a in coeffs.iter_mut() {
                *a = -&*a;
            }
            *rhs = -&*rhs;
            s = -s;
        }
        slack_sign.push(s);
    }

    let n_slack = slack_sign.iter().filter(|s| **s != 0).count();
    let n_art = slack_sign.iter().filter(|s| **s != 1).count();
    let total = n_structural + n_slack + n_art;

    let mut matrix = vec![vec![Rat::zero(); total]; m];
    let mut rhs_vec = Vec::with_capacity(m);
    let mut slack_of_row = vec![None; m];
    let mut artificial_of_row = vec![None; m];
    let mut next = n_structural;
    for (i, (coeffs, _, rhs)) in rows.iter().enumerate() {
        matrix[i][..n_structural].clone_from_slice(coeffs);
        rhs_vec.push(rhs.clone());
        if slack_sign[i] != 0 {
            matrix[i][next] = if slack_sign[i] == 1 { Rat::one() } else { -Rat::one() };
            slack_of_row[i] = Some(next);
            next += 1;
        }
    }
    for i in 0..m {
        if slack_sign[i] != 1 {
            matrix[i][next] = Rat::one();
            artificial_of_row[i] = Some(next);
            next += 1;
        }
    }
    debug_assert_eq!(next, total);

    Standardized {
        cols,
        shifts,
        matrix,
        rhs: rhs_vec,
        flipped,
        n_structural,
        n_slack,
        slack_of_row,
        artificial_of_row,
        n_explicit,
    }
}

struct Tableau {
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    basis: Vec<usize>,
    rc: Vec<Rat>,
    active: Vec<bool>,
    pivots: u64,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn reduced_costs(&mut self, cost: &[Rat]) {
        let ncols = self.rc.len();
        for j in 0..ncols {
            let mut rc = cost[j].clone();
            for (i, row) in self.a.iter().enumerate() {
                if self.active[i] {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() {
                        rc -= cb * &row[j];
                    }
                }
            }
            self.rc[j] = rc;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Error> {
        self.pivots += 1;
        if self.pivots > PIVOT_LIMIT {
            return Err(Error::PivotLimit);
        }
        let piv = self.a[r][c].clone();
        debug_assert!(!piv.is_zero());
        for x in self.a[r].iter_mut() {
            *x = &*x / &piv;
        }
        self.b[r] = &self.b[r] / &piv;
        let prow = self.a[r].clone();
        let pb = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, p) in self.a[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.b[i] -= &f * &pb;
        }
        let f = self.rc[c].clone();
        if !f.is_zero() {
            for (x, p) in self.rc.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Bland: entering column is the lowest index with negative reduced
    /// cost, leaving row the minimum ratio with lowest basis index on ties.
    fn run(&mut self, allowed: &[bool]) -> Result<Step, Error> {
        loop {
            let mut entering = None;
            for (j, rc) in self.rc.iter().enumerate() {
                if allowed[j] && rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let c = match entering {
                Some(c) => c,
                None => return Ok(Step::Optimal),
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.a.len() {
                if !self.active[i] || !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / &self.a[i][c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c)?,
                None => return Ok(Step::Unbounded(c)),
            }
        }
    }
}

/// Solve `Bᵀ y = c_B` for the duals of the active rows by exact Gaussian
/// elimination over the original (unpivoted) columns.
fn basis_duals(std: &Standardized, tab: &Tableau, cost: &[Rat]) -> Result<Vec<Rat>, Error> {
    let rows: Vec<usize> = (0..tab.a.len()).filter(|i| tab.active[*i]).collect();
    let k = rows.len();
    // aug[e] is the equation for basis column of active row e.
    let mut aug: Vec<Vec<Rat>> = Vec::with_capacity(k);
    for &e in &rows {
        let col = tab.basis[e];
        let mut eq: Vec<Rat> = rows.iter().map(|&i| std.matrix[i][col].clone()).collect();
        eq.push(cost[col].clone());
        aug.push(eq);
    }
    // forward elimination with partial (first nonzero) pivoting
    for p in 0..k {
        let pr = (p..k)
            .find(|&r| !aug[r][p].is_zero())
            .ok_or_else(|| Error::Internal("singular basis".into()))?;
        aug.swap(p, pr);
        let piv = aug[p][p].clone();
        for x in aug[p].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..k {
            if r == p {
                continue;
            }
            let f = aug[r][p].clone();
            if f.is_zero() {
                continue;
            }
            let prow = aug[p].clone();
            for (x, q) in aug[r].iter_mut().zip(&prow) {
                if !q.is_zero() {
                    *x -= &f * q;
                }
            }
        }
    }
    let mut y = vec![Rat::zero(); tab.a.len()];
    for (e, &i) in rows.iter().enumerate() {
        y[i] = aug[e][k].clone();
    }
    Ok(y)
}

pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome, Error> {
    LP_SOLVES.with(|c| c.set(c.get() + 1));
    let n = p.num_vars();
    if p.bounds.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.bounds.len() });
    }
    for row in &p.rows {
        if row.coeffs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.coeffs.len() });
        }
    }
    // crossing bounds are self-certifying
    for (lo, hi) in &p.bounds {
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo > hi {
                return Ok(LpOutcome::Infeasible { farkas: vec![Rat::zero(); p.rows.len()] });
            }
        }
    }

    let cost_min: Vec<Rat> = match p.sense {
        Sense::Min => p.objective.clone(),
        Sense::Max => p.objective.iter().map(|c| -c).collect(),
    };
    let std = standardize(p);
    let m = std.matrix.len();
    let total = if m > 0 { std.matrix[0].len() } else { std.n_structural };

    let mut cost_std = vec![Rat::zero(); total];
    for (j, col) in std.cols.iter().enumerate() {
        cost_std[j] = if col.sign == 1 { cost_min[col.var].clone() } else { -&cost_min[col.var] };
    }

    let mut tab = Tableau {
        a: std.matrix.clone(),
        b: std.rhs.clone(),
        basis: vec![0; m],
        rc: vec![Rat::zero(); total],
        active: vec![true; m],
        pivots: 0,
    };
    for i in 0..m {
        tab.basis[i] = match (std.slack_of_row[i], std.artificial_of_row[i]) {
            (_, Some(a)) => a,
            (Some(s), None) => s,
            (None, None) => unreachable!(),
        };
    }

    let is_artificial = |j: usize| j >= std.n_structural + std.n_slack;
    let has_artificials = std.artificial_of_row.iter().any(Option::is_some);

    if has_artificials {
        // Phase 1: minimize the sum of artificials.
        let mut cost1 = vec![Rat::zero(); total];
        for c in cost1[std.n_structural + std.n_slack..].iter_mut() {
            *c = Rat::one();
        }
        tab.reduced_costs(&cost1);
        let allowed = vec![true; total];
        match tab.run(&allowed)? {
            Step::Optimal => {}
            Step::Unbounded(_) => {
                return Err(Error::Internal("phase 1 unbounded".into()));
            }
        }
        let infeas: Rat =
            (0..m).filter(|&i| is_artificial(tab.basis[i])).map(|i| tab.b[i].clone()).sum();
        if !infeas.is_zero() {
            let w = basis_duals(&std, &tab, &cost1)?;
            // u_i = -w_i on unflipped rows, +w_i on flipped ones; the public
            // vector is u normalized onto <=-form rows.
            let mut farkas = Vec::with_capacity(std.n_explicit);
            for i in 0..std.n_explicit {
                let u = if std.flipped[i] { w[i].clone() } else { -&w[i] };
                let f = match p.rows[i].rel {
                    Relation::Le | Relation::Eq => u,
                    Relation::Ge => -u,
                };
                farkas.push(f);
            }
            return Ok(LpOutcome::Infeasible { farkas });
        }
        // Drive artificials out of the basis; rows where that is impossible
        // are redundant and get deactivated.
        for r in 0..m {
            if !is_artificial(tab.basis[r]) {
                continue;
            }
            debug_assert!(tab.b[r].is_zero());
            let c = (0..std.n_structural + std.n_slack).find(|&j| !tab.a[r][j].is_zero());
            match c {
                Some(c) => tab.pivot(r, c)?,
                None => tab.active[r] = false,
            }
        }
    }

    // Phase 2 over the real objective, artificials barred from entering.
    tab.reduced_costs(&cost_std);
    let allowed: Vec<bool> = (0..total).map(|j| !is_artificial(j)).collect();
    let step = tab.run(&allowed)?;

    match step {
        Step::Unbounded(c_enter) => {
            // direction: entering column moves up, basic columns compensate
            let mut zdir = vec![Rat::zero(); total];
            zdir[c_enter] = Rat::one();
            for i in 0..m {
                if tab.active[i] && !tab.a[i][c_enter].is_zero() {
                    zdir[tab.basis[i]] = -&tab.a[i][c_enter];
                }
            }
            let mut ray = vec![Rat::zero(); n];
            for (j, col) in std.cols.iter().enumerate() {
                if !zdir[j].is_zero() {
                    if col.sign == 1 {
                        ray[col.var] += &zdir[j];
                    } else {
                        ray[col.var] -= &zdir[j];
                    }
                }
            }
            Ok(LpOutcome::Unbounded { ray })
        }
        Step::Optimal => {
            let mut z = vec![Rat::zero(); total];
            for i in 0..m {
                if tab.active[i] {
                    z[tab.basis[i]] = tab.b[i].clone();
                }
            }
            let mut primal = std.shifts.clone();
            for (j, col) in std.cols.iter().enumerate() {
                if !z[j].is_zero() {
                    if col.sign == 1 {
                        primal[col.var] += &z[j];
                    } else {
                        primal[col.var] -= &z[j];
                    }
                }
            }
            let y_std = basis_duals(&std, &tab, &cost_std)?;
            let mut dual = Vec::with_capacity(std.n_explicit);
            for i in 0..std.n_explicit {
                let mut yi = if std.flipped[i] { -&y_std[i] } else { y_std[i].clone() };
                if p.sense == Sense::Max {
                    yi = -yi;
                }
                dual.push(yi);
            }
            let value = dot(&p.objective, &primal);
            Ok(LpOutcome::Optimal { primal, value, dual })
        }
    }
}

fn box_min(g: &[Rat], bounds: &[(Option<Rat>, Option<Rat>)]) -> Option<Rat> {
    let mut total = Rat::zero();
    for (gj, (lo, hi)) in g.iter().zip(bounds) {
        if gj.is_zero() {
            continue;
        }
        if gj.is_positive() {
            total += gj * lo.as_ref()?;
        } else {
            total += gj * hi.as_ref()?;
        }
    }
    Some(total)
}

/// Re-verify an outcome's certificate by direct substitution. Returns false
/// on any failure; never errors.
pub fn check_lp_certificate(p: &LpProblem, o: &LpOutcome) -> bool {
    let n = p.num_vars();
    if p.bounds.len() != n || p.rows.iter().any(|r| r.coeffs.len() != n) {
        return false;
    }
    match o {
        LpOutcome::Optimal { primal, value, dual } => {
            if primal.len() != n || dual.len() != p.rows.len() {
                return false;
            }
            // primal feasibility
            for (xj, (lo, hi)) in primal.iter().zip(&p.bounds) {
                if lo.as_ref().is_some_and(|lo| xj < lo) || hi.as_ref().is_some_and(|hi| xj > hi) {
                    return false;
                }
            }
            for row in &p.rows {
                let lhs = dot(&row.coeffs, primal);
                let ok = match row.rel {
                    Relation::Le => lhs <= row.rhs,
                    Relation::Ge => lhs >= row.rhs,
                    Relation::Eq => lhs == row.rhs,
                };
                if !ok {
                    return false;
                }
            }
            if *value != dot(&p.objective, primal) {
                return false;
            }
            // dual feasibility and complementary slackness
            for (yi, row) in dual.iter().zip(&p.rows) {
                let sign_ok = match (p.sense, row.rel) {
                    (_, Relation::Eq) => true,
                    (Sense::Min, Relation::Le) | (Sense::Max, Relation::Ge) => !yi.is_positive(),
                    (Sense::Min, Relation::Ge) | (Sense::Max, Relation::Le) => !yi.is_negative(),
                };
                if !sign_ok {
                    return false;
                }
                if !yi.is_zero() && dot(&row.coeffs, primal) != row.rhs {
                    return false;
                }
            }
            // reduced costs against variable bounds
            let mut dual_value = Rat::zero();
            for (yi, row) in dual.iter().zip(&p.rows) {
                dual_value += yi * &row.rhs;
            }
            for j in 0..n {
                let mut zj = p.objective[j].clone();
                for (yi, row) in dual.iter().zip(&p.rows) {
                    zj -= yi * &row.coeffs[j];
                }
                if zj.is_zero() {
                    continue;
                }
                let at_lower = p.bounds[j].0.as_ref() == Some(&primal[j]);
                let at_upper = p.bounds[j].1.as_ref() == Some(&primal[j]);
                let ok = match (p.sense, zj.is_positive()) {
                    (Sense::Min, true) | (Sense::Max, false) => at_lower,
                    (Sense::Min, false) | (Sense::Max, true) => at_upper,
                };
                if !ok {
                    return false;
                }
                dual_value += &zj * &primal[j];
            }
            // strong duality, exactly
            dual_value == *value
        }
        LpOutcome::Unbounded { ray } => {
            if ray.len() != n || ray.iter().all(Zero::is_zero) {
                return false;
            }
            for (rj, (lo, hi)) in ray.iter().zip(&p.bounds) {
                if lo.is_some() && rj.is_negative() {
                    return false;
                }
                if hi.is_some() && rj.is_positive() {
                    return false;
                }
            }
            for row in &p.rows {
                let d = dot(&row.coeffs, ray);
                let ok = match row.rel {
                    Relation::Le => !d.is_positive(),
                    Relation::Ge => !d.is_negative(),
                    Relation::Eq => d.is_zero(),
                };
                if !ok {
                    return false;
                }
            }
            let improve = dot(&p.objective, ray);
            match p.sense {
                Sense::Min => improve.is_negative(),
                Sense::Max => improve.is_positive(),
            }
        }
        LpOutcome::Infeasible { farkas } => {
            if farkas.len() != p.rows.len() {
                return false;
            }
            if p.bounds.iter().any(|(lo, hi)| matches!((lo, hi), (Some(lo), Some(hi)) if lo > hi)) {
                return true;
            }
            let mut g = vec![Rat::zero(); n];
            let mut beta = Rat::zero();
            for (fi, row) in farkas.iter().zip(&p.rows) {
                let ui = match row.rel {
                    Relation::Le | Relation::Eq => fi.clone(),
                    Relation::Ge => -fi,
                };
                if row.rel != Relation::Eq && fi.is_negative() {
                    return false;
                }
                for (gj, aj) in g.iter_mut().zip(&row.coeffs) {
                    *gj += &ui * aj;
                }
                beta += &ui * &row.rhs;
            }
            match box_min(&g, &p.bounds) {
                Some(min) => min > beta,
                None => false,
            }
        }
    }
}
