//! Instance file parsing and machine-readable results.
//!
//! The instance format is line oriented:
//!
//! ```text
//! # comment
//! dim n 2
//! ints r 2
//! row 1 0 <= 3
//! bound 1 0 3
//! bound 2 0 *
//! estimate 2 -1
//! target 0 3
//! norm linf
//! ```
//!
//! Rationals are written `p/q` or `p`; a `*` in a bound position means the
//! variable is unbounded on that side. Results and traces are JSON with
//! every rational as a string, so outputs are byte deterministic and parse
//! back to identical values.

use serde::{Deserialize, Serialize};

use crate::decide::{CertClaim, Certificate, ReductionArtifacts};
use crate::error::Error;
use crate::instance::{InverseInstance, MilpInstance};
use crate::rational::{format_rat, format_vec, parse_rat, Norm, Rat};
use crate::solver::{SeparationOutcome, SolveOutcome, SolveTrace};

/// Parsed instance file; `target`, `estimate` and `norm` stay optional so
/// forward-only commands can run on files that omit them.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub forward: MilpInstance,
    pub x0: Option<Vec<Rat>>,
    pub c: Option<Vec<Rat>>,
    pub norm: Option<Norm>,
}

impl RawInstance {
    /// Assemble the inverse-problem input, with an optional norm override.
    pub fn into_inverse(self, norm_override: Option<Norm>) -> Result<InverseInstance, Error> {
        let x0 =
            self.x0.ok_or_else(|| Error::Domain("target required for inverse commands".into()))?;
        let c =
            self.c.ok_or_else(|| Error::Domain("estimate required for inverse commands".into()))?;
        let norm = norm_override.or(self.norm).unwrap_or(Norm::Linf);
        InverseInstance::new(self.forward, x0, c, norm)
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn rat_at(line: usize, tok: &str) -> Result<Rat, Error> {
    parse_rat(tok).map_err(|msg| perr(line, msg))
}

pub fn parse_instance(text: &str) -> Result<RawInstance, Error> {
    let mut dim: Option<usize> = None;
    let mut ints: Option<usize> = None;
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut bounds: Vec<(usize, Option<Rat>, Option<Rat>)> = Vec::new();
    let mut estimate: Option<Vec<Rat>> = None;
    let mut target: Option<Vec<Rat>> = None;
    let mut norm: Option<Norm> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.split_once('#') {
            Some((head, _)) => head,
            None => raw_line,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "dim" => {
                let args = if toks.get(1) == Some(&"n") { &toks[2..] } else { &toks[1..] };
                if dim.is_some() {
                    return Err(perr(lineno, "duplicate dim"));
                }
                let [v] = args else { return Err(perr(lineno, "usage: dim n <int>")) };
                let v: usize = v.parse().map_err(|_| perr(lineno, "invalid dimension"))?;
                if v == 0 {
                    return Err(perr(lineno, "dimension must be positive"));
                }
                dim = Some(v);
            }
            "ints" => {
                let args = if toks.get(1) == Some(&"r") { &toks[2..] } else { &toks[1..] };
                if ints.is_some() {
                    return Err(perr(lineno, "duplicate ints"));
                }
                let [v] = args else { return Err(perr(lineno, "usage: ints r <int>")) };
                ints = Some(v.parse().map_err(|_| perr(lineno, "invalid integer count"))?);
            }
            "row" => {
                let n = dim.ok_or_else(|| perr(lineno, "dim must precede row"))?;
                if toks.len() != n + 3 || toks[n + 1] != "<=" {
                    return Err(perr(lineno, format!("usage: row a1 .. a{n} <= b")));
                }
                let coeffs =
                    toks[1..=n].iter().map(|t| rat_at(lineno, t)).collect::<Result<Vec<_>, _>>()?;
                let rhs = rat_at(lineno, toks[n + 2])?;
                rows.push((coeffs, rhs));
            }
            "bound" => {
                let n = dim.ok_or_else(|| perr(lineno, "dim must precede bound"))?;
                if toks.len() != 4 {
                    return Err(perr(lineno, "usage: bound i lo hi"));
                }
                let i: usize =
                    toks[1].parse().map_err(|_| perr(lineno, "invalid variable index"))?;
                if i == 0 || i > n {
                    return Err(perr(lineno, format!("variable index out of range 1..={n}")));
                }
                let side = |tok: &str| -> Result<Option<Rat>, Error> {
                    if tok == "*" {
                        Ok(None)
                    } else {
                        rat_at(lineno, tok).map(Some)
                    }
                };
                bounds.push((i - 1, side(toks[2])?, side(toks[3])?));
            }
            "estimate" | "target" => {
                let n = dim.ok_or_else(|| perr(lineno, "dim must precede vectors"))?;
                if toks.len() != n + 1 {
                    return Err(perr(lineno, format!("expected {n} entries")));
                }
                let v =
                    toks[1..].iter().map(|t| rat_at(lineno, t)).collect::<Result<Vec<_>, _>>()?;
                let slot = if toks[0] == "estimate" { &mut estimate } else { &mut target };
                if slot.is_some() {
                    return Err(perr(lineno, format!("duplicate {}", toks[0])));
                }
                *slot = Some(v);
            }
            "norm" => {
                if toks.len() != 2 {
                    return Err(perr(lineno, "usage: norm l1|linf"));
                }
                norm = Some(
                    Norm::parse(toks[1]).ok_or_else(|| perr(lineno, "norm must be l1 or linf"))?,
                );
            }
            other => return Err(perr(lineno, format!("unknown directive `{other}`"))),
        }
    }

    let n = dim.ok_or_else(|| perr(text.lines().count().max(1), "missing dim"))?;
    let r = ints.unwrap_or(0);
    if r > n {
        return Err(perr(1, format!("ints r = {r} exceeds dim n = {n}")));
    }
    let mut inst = MilpInstance::new(n, r);
    for (coeffs, rhs) in rows {
        inst.push_row(coeffs, rhs);
    }
    for (i, lo, hi) in bounds {
        inst.set_bounds(i, lo, hi);
    }
    Ok(RawInstance { forward: inst, x0: target, c: estimate, norm })
}

/// Render an instance in the same line format (used by tests to round-trip).
pub fn emit_instance(raw: &RawInstance) -> String {
    let mut out = String::new();
    let inst = &raw.forward;
    out.push_str(&format!("dim n {}\n", inst.num_vars));
    out.push_str(&format!("ints r {}\n", inst.num_int));
    for (coeffs, rhs) in &inst.rows {
        let body: Vec<String> = coeffs.iter().map(format_rat).collect();
        out.push_str(&format!("row {} <= {}\n", body.join(" "), format_rat(rhs)));
    }
    for j in 0..inst.num_vars {
        if inst.lower[j].is_none() && inst.upper[j].is_none() {
            continue;
        }
        let side = |b: &Option<Rat>| b.as_ref().map_or("*".to_string(), format_rat);
        out.push_str(&format!(
            "bound {} {} {}\n",
            j + 1,
            side(&inst.lower[j]),
            side(&inst.upper[j])
        ));
    }
    if let Some(c) = &raw.c {
        out.push_str(&format!("estimate {}\n", format_vec(c).join(" ")));
    }
    if let Some(x0) = &raw.x0 {
        out.push_str(&format!("target {}\n", format_vec(x0).join(" ")));
    }
    if let Some(norm) = raw.norm {
        out.push_str(&format!("norm {norm}\n"));
    }
    out
}

/// One row of the emitted iteration table, mirroring the worked example's
/// columns: the cut set in force, the master solution, the oracle answer and
/// the distance `||c - d^k||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub k: usize,
    pub e_k: Vec<Vec<String>>,
    pub d_k: Vec<String>,
    pub theta_k: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_k: Option<Vec<String>>,
    pub norm_c_minus_d: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub point: Vec<String>,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationOut {
    pub kind: String, // "cut" | "in-hull"
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<SupportEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionOut {
    pub x_target: Vec<String>,
    pub epsilon: String,
    pub delta: String,
    pub nu: u64,
    pub gamma_out: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub claim: String,
    pub gamma: String,
    pub points: Vec<Vec<String>>,
    pub weights: Vec<String>,
}

/// The single machine-readable output document every CLI command emits.
/// Field order is fixed, so identical inputs produce byte-identical output.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunResult {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_star: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<Vec<IterationRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hull_vertices: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_complexity: Option<u64>,
}

impl RunResult {
    pub fn new(command: &str) -> RunResult {
        RunResult { command: command.to_string(), ..Default::default() }
    }
}

/// Deterministic key-ordered rendering; identical inputs yield
/// byte-identical output.
pub fn emit_result(r: &RunResult) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("result serialization");
    s.push('\n');
    s
}

pub fn parse_result(text: &str) -> Result<RunResult, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
}

pub fn iteration_rows(trace: &SolveTrace, c: &[Rat], norm: Norm) -> Vec<IterationRow> {
    trace
        .iterations
        .iter()
        .map(|it| IterationRow {
            k: it.k,
            e_k: trace.cuts_at(it.k).iter().map(|p| format_vec(p)).collect(),
            d_k: format_vec(&it.d),
            theta_k: format_rat(&it.theta),
            x_k: it.x.as_ref().map(|x| format_vec(x)),
            norm_c_minus_d: format_rat(&norm.eval(&crate::rational::sub(c, &it.d))),
        })
        .collect()
}

pub fn outcome_str(outcome: SolveOutcome) -> &'static str {
    match outcome {
        SolveOutcome::Converged => "converged",
        SolveOutcome::UnboundedForward => "unbounded-forward",
    }
}

pub fn separation_out(sep: &SeparationOutcome) -> SeparationOut {
    match sep {
        SeparationOutcome::Cut { d, beta } => SeparationOut {
            kind: "cut".into(),
            d: Some(format_vec(d)),
            beta: Some(format_rat(beta)),
            support: None,
        },
        SeparationOutcome::InHull(support) => SeparationOut {
            kind: "in-hull".into(),
            d: None,
            beta: None,
            support: Some(
                support
                    .iter()
                    .map(|(p, w)| SupportEntry { point: format_vec(p), weight: format_rat(w) })
                    .collect(),
            ),
        },
    }
}

pub fn reduction_out(r: &ReductionArtifacts) -> ReductionOut {
    ReductionOut {
        x_target: format_vec(&r.x_target),
        epsilon: format_rat(&r.epsilon),
        delta: format_rat(&r.delta),
        nu: r.nu,
        gamma_out: format_rat(&r.gamma_out),
    }
}

pub fn certificate_to_file(cert: &Certificate) -> CertificateFile {
    CertificateFile {
        claim: cert.claim.as_str().to_string(),
        gamma: format_rat(&cert.gamma),
        points: cert.points.iter().map(|p| format_vec(p)).collect(),
        weights: cert.weights.iter().map(format_rat).collect(),
    }
}

pub fn certificate_from_file(file: &CertificateFile) -> Result<Certificate, Error> {
    let claim = CertClaim::parse(&file.claim)
        .ok_or_else(|| Error::Domain(format!("unknown certificate claim `{}`", file.claim)))?;
    let gamma = parse_rat(&file.gamma).map_err(|msg| Error::Parse { line: 0, msg })?;
    let points = file
        .points
        .iter()
        .map(|p| crate::rational::parse_vec(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|msg| Error::Parse { line: 0, msg })?;
    let weights =
        crate::rational::parse_vec(&file.weights).map_err(|msg| Error::Parse { line: 0, msg })?;
    Ok(Certificate { points, weights, claim, gamma })
}

pub fn parse_certificate(text: &str) -> Result<Certificate, Error> {
    let file: CertificateFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    certificate_from_file(&file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    pub(crate) const DESK: &str = "\
# 0 <= x1 <= 3, 0 <= x2 <= 1, both integer
dim n 2
ints r 2
bound 1 0 3
bound 2 0 1
estimate 2 -1
target 0 3
norm linf
";

    #[test]
    fn parse_desk_file() {
        let raw = parse_instance(DESK).unwrap();
        assert_eq!(raw.forward.num_vars, 2);
        assert_eq!(raw.forward.num_int, 2);
        assert_eq!(raw.forward.num_rows(), 0);
        assert_eq!(raw.forward.upper[0], Some(rat(3)));
        let inv = raw.into_inverse(None).unwrap();
        assert_eq!(inv.c, vec![rat(2), rat(-1)]);
        assert_eq!(inv.x0, vec![rat(0), rat(3)]);
        assert_eq!(inv.norm, Norm::Linf);
    }

    #[test]
    fn instance_round_trip() {
        let raw = parse_instance(DESK).unwrap();
        let text = emit_instance(&raw);
        assert_eq!(parse_instance(&text).unwrap(), raw);
    }

    #[test]
    fn zero_denominator_rejected() {
        let text = "dim n 1\nestimate 1/0\n";
        match parse_instance(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("zero denominator"));
            }
            o => panic!("expected parse error, got {o:?}"),
        }
    }

    #[test]
    fn missing_target_flagged_on_assembly() {
        let text = "dim n 1\nbound 1 0 1\nestimate 2\n";
        let raw = parse_instance(text).unwrap();
        match raw.into_inverse(None) {
            Err(Error::Domain(msg)) => assert!(msg.contains("target required")),
            o => panic!("expected domain error, got {o:?}"),
        }
    }

    #[test]
    fn rows_parse_with_relation() {
        let text = "dim n 2\nrow 1 1 <= 5/2\nrow -1 0 <= 0\n";
        let raw = parse_instance(text).unwrap();
        assert_eq!(raw.forward.rows[0].0, vec![rat(1), rat(1)]);
        assert_eq!(raw.forward.rows[0].1, ratio(5, 2));
    }

    #[test]
    fn result_round_trip_and_determinism() {
        let mut r = RunResult::new("solve-inverse");
        r.norm = Some("linf".into());
        r.theta_star = Some("8/5".into());
        r.d_star = Some(vec!["2/5".into(), "3/5".into()]);
        let a = emit_result(&r);
        let b = emit_result(&r);
        assert_eq!(a, b);
        assert_eq!(parse_result(&a).unwrap(), r);
    }

    #[test]
    fn certificate_file_round_trip() {
        let cert = Certificate {
            points: vec![vec![rat(3), rat(0)]],
            weights: vec![rat(1)],
            claim: CertClaim::ImpvpNo,
            gamma: rat(1),
        };
        let file = certificate_to_file(&cert);
        let text = serde_json::to_string_pretty(&file).unwrap();
        assert_eq!(parse_certificate(&text).unwrap(), cert);
    }

    mod random_round_trips {
        use super::super::*;
        use crate::instance::MilpInstance;
        use crate::rational::{ratio, Norm};
        use proptest::prelude::*;

        fn arb_raw() -> impl Strategy<Value = RawInstance> {
            (
                1usize..4,
                proptest::collection::vec(
                    (proptest::collection::vec((-9i64..10, 1i64..5), 3), (-9i64..10, 1i64..5)),
                    0..3,
                ),
                proptest::collection::vec(
                    (0usize..4, (-6i64..7, 1i64..4), (0i64..7, 1i64..4)),
                    3,
                ),
                proptest::option::of(proptest::collection::vec((-6i64..7, 1i64..4), 3)),
                proptest::option::of(proptest::collection::vec((-6i64..7, 1i64..4), 3)),
                proptest::option::of(prop::bool::ANY),
            )
                .prop_map(|(n, rows, bnds, c, x0, norm)| {
                    let r = n.min(1);
                    let mut inst = MilpInstance::new(n, r);
                    for (coeffs, rhs) in rows {
                        let coeffs =
                            coeffs.into_iter().take(n).map(|(p, q)| ratio(p, q)).collect();
                        inst.push_row(coeffs, ratio(rhs.0, rhs.1));
                    }
                    for (j, (kind, lo, span)) in bnds.into_iter().take(n).enumerate() {
                        let lo_rat = ratio(lo.0, lo.1);
                        let hi_rat = &lo_rat + ratio(span.0, span.1);
                        let (lo, hi) = match kind {
                            0 => (Some(lo_rat), Some(hi_rat)),
                            1 => (Some(lo_rat), None),
                            2 => (None, Some(hi_rat)),
                            _ => (None, None),
                        };
                        inst.set_bounds(j, lo, hi);
                    }
                    let to_vec = |v: Option<Vec<(i64, i64)>>| {
                        v.map(|v| v.into_iter().take(n).map(|(p, q)| ratio(p, q)).collect())
                    };
                    RawInstance {
                        forward: inst,
                        x0: to_vec(x0),
                        c: to_vec(c),
                        norm: norm.map(|b| if b { Norm::L1 } else { Norm::Linf }),
                    }
                })
        }

        proptest! {
            // every rational in an emitted instance parses back identically
            #[test]
            fn instance_emit_parse_identity(raw in arb_raw()) {
                let text = emit_instance(&raw);
                prop_assert_eq!(parse_instance(&text).unwrap(), raw);
            }
        }
    }
}
