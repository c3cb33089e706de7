//! Subcommands, their reports, and the residual checks that `verify` re-runs.
//!
//! Every report embeds the problem it was built from, so a report file is
//! self-contained: `verify` rebuilds the cone from the embedded problem and
//! repeats the checks made at emit time, without constructing anything.

use std::collections::BTreeMap;

use rog_core::classify::{self, RogCertificate, Verdict};
use rog_core::cones::{self, ConeSpec};
use rog_core::decompose::{self, Decomposition};
use rog_core::linalg::{self, SymMatrix};
use rog_core::qcqp::{self, QcqpInstance, RoundedSolution, SlicePiece};
use rog_core::rng_from_seed;
use rog_core::witness::{self, LineSet, WitnessBundle};
use serde::{Deserialize, Serialize};

use crate::error::{verifying, CliError, CliResult, EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN};
use crate::problem::ProblemFile;

/// Named residuals of a check.
pub type Residuals = BTreeMap<String, f64>;

/// Default membership tolerance for atoms and rounded points.
pub const MEMBER_TOL: f64 = 1e-7;
/// Default band for the perspective hull tests.
pub const HULL_TOL: f64 = 1e-9;
/// Relative reconstruction error allowed for decompositions.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Relative residual allowed for a variety line.
pub const LINE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Decompose,
    Witness,
    Variety,
    Round,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Certificate {
        problem: ProblemFile,
        seed: u64,
        certificate: RogCertificate,
        verification: Residuals,
    },
    Decomposition {
        problem: ProblemFile,
        seed: u64,
        tol: f64,
        certificate: RogCertificate,
        decomposition: Decomposition,
        verification: Residuals,
    },
    Witness {
        problem: ProblemFile,
        seed: u64,
        bundle: WitnessBundle,
        verification: Residuals,
    },
    Variety {
        problem: ProblemFile,
        lines: LineSet,
        verification: Residuals,
    },
    Rounding {
        problem: ProblemFile,
        seed: u64,
        tol: f64,
        certificate: RogCertificate,
        solution: RoundedSolution,
        rank_two: Vec<SlicePiece>,
        verification: Residuals,
    },
    HullCheck {
        point: [f64; 3],
        tol: f64,
        inside: bool,
        lifted: bool,
    },
}

/// Output of `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub kind: String,
    pub of: String,
    pub passed: bool,
    pub residuals: Residuals,
}

fn fail<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Verify(msg.into()))
}

/// Runs a problem-file subcommand.
pub fn run(cmd: Command, problem: ProblemFile, seed: u64, tol: Option<f64>) -> CliResult<Report> {
    let mut rng = rng_from_seed(seed);
    let member_tol = tol.or(problem.tol).unwrap_or(MEMBER_TOL);
    match cmd {
        Command::Classify => {
            let spec = problem.spec()?;
            let certificate = classify::classify(&spec, &mut rng)?;
            let verification = check_certificate(&spec, &certificate)?;
            Ok(Report::Certificate {
                problem,
                seed,
                certificate,
                verification,
            })
        }
        Command::Decompose => {
            let spec = problem.spec()?;
            let x = problem.x()?;
            let certificate = classify::classify(&spec, &mut rng)?;
            if !certificate.is_rog() {
                return Err(CliError::Input(format!(
                    "cone is not certified ROG (verdict {})",
                    verdict_name(certificate.verdict)
                )));
            }
            let decomposition = decompose::decompose(&spec, &x, Some(&certificate))?;
            let verification = check_decomposition(&spec, &x, &decomposition, member_tol)?;
            Ok(Report::Decomposition {
                problem,
                seed,
                tol: member_tol,
                certificate,
                decomposition,
                verification,
            })
        }
        Command::Witness => {
            let (m1, m2) = problem.pair()?;
            let bundle = match &problem.pinned_w {
                Some(w) => witness::witness_n3(&m1, &m2, &mut rng, Some(w))?,
                None => witness::witness(&m1, &m2, &mut rng)?,
            };
            let verification = witness::verify_bundle(&m1, &m2, &bundle).map_err(verifying)?;
            Ok(Report::Witness {
                problem,
                seed,
                bundle,
                verification,
            })
        }
        Command::Variety => {
            let (m1, m2) = problem.pair()?;
            let lines = witness::variety_lines_3d(&m1, &m2)?;
            let verification = check_variety(&m1, &m2, &lines)?;
            Ok(Report::Variety {
                problem,
                lines,
                verification,
            })
        }
        Command::Round => {
            let spec = problem.spec()?;
            let x = problem.x()?;
            let inst = QcqpInstance::new(problem.m0()?, problem.b()?, spec)?;
            let certificate = classify::classify(&inst.spec, &mut rng)?;
            let solution = qcqp::sdp_round(&inst, &x, &certificate)?;
            let rank_two = qcqp::rank2_reduce(&inst, &x, &certificate)?;
            let mut verification = check_certificate(&inst.spec, &certificate)?;
            verification.extend(check_rounding(&inst, &x, &solution, &rank_two, member_tol)?);
            Ok(Report::Rounding {
                problem,
                seed,
                tol: member_tol,
                certificate,
                solution,
                rank_two,
                verification,
            })
        }
    }
}

/// Membership of `(y₁, y₂, t)` in the perspective hull, by the closed form and the lifted check.
pub fn hull_check(point: [f64; 3], tol: f64) -> Report {
    let [y1, y2, t] = point;
    Report::HullCheck {
        point,
        tol,
        inside: qcqp::perspective_hull_member(y1, y2, t, tol),
        lifted: qcqp::perspective_lift_check_tol(y1, y2, t, tol),
    }
}

impl Report {
    pub fn kind(&self) -> &'static str {
        match self {
            Report::Certificate { .. } => "certificate",
            Report::Decomposition { .. } => "decomposition",
            Report::Witness { .. } => "witness",
            Report::Variety { .. } => "variety",
            Report::Rounding { .. } => "rounding",
            Report::HullCheck { .. } => "hull_check",
        }
    }

    /// 0 for ROG, SufficientROG, constructions and hull members; 10 for NotROG
    /// and points outside the hull; 20 for Unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Report::Certificate { certificate, .. } => match certificate.verdict {
                Verdict::Rog | Verdict::SufficientRog => EXIT_OK,
                Verdict::NotRog => EXIT_NEGATIVE,
                Verdict::Unknown => EXIT_UNKNOWN,
            },
            Report::HullCheck { inside: false, .. } => EXIT_NEGATIVE,
            _ => EXIT_OK,
        }
    }

    /// One line for the terminal.
    pub fn summary(&self) -> String {
        match self {
            Report::Certificate { certificate, .. } => verdict_name(certificate.verdict).to_string(),
            Report::Decomposition { decomposition, .. } => format!("{} atoms", decomposition.len()),
            Report::Witness { bundle, .. } => format!("witness on a {}-dimensional subspace", bundle.w.dim()),
            Report::Variety { lines, .. } => format!("{} lines", lines.lines.len()),
            Report::Rounding { solution, .. } => format!("best value {:.6e}", solution.best_value),
            Report::HullCheck { inside, .. } => (if *inside { "inside" } else { "outside" }).to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Rog => "rog",
        Verdict::NotRog => "not_rog",
        Verdict::SufficientRog => "sufficient_rog",
        Verdict::Unknown => "unknown",
    }
}

/// Re-runs the residual checks of an emitted report.
pub fn verify(report: &Report) -> CliResult<Verification> {
    let residuals = match report {
        Report::Certificate {
            problem, certificate, ..
        } => check_certificate(&problem.spec()?, certificate)?,
        Report::Decomposition {
            problem,
            tol,
            certificate,
            decomposition,
            ..
        } => {
            let spec = problem.spec()?;
            let mut res = check_certificate(&spec, certificate)?;
            res.extend(check_decomposition(&spec, &problem.x()?, decomposition, *tol)?);
            res
        }
        Report::Witness { problem, bundle, .. } => {
            let (m1, m2) = problem.pair()?;
            witness::verify_bundle(&m1, &m2, bundle).map_err(verifying)?
        }
        Report::Variety { problem, lines, .. } => {
            let (m1, m2) = problem.pair()?;
            check_variety(&m1, &m2, lines)?
        }
        Report::Rounding {
            problem,
            tol,
            certificate,
            solution,
            rank_two,
            ..
        } => {
            let inst = QcqpInstance::new(problem.m0()?, problem.b()?, problem.spec()?)?;
            let mut res = check_certificate(&inst.spec, certificate)?;
            res.extend(check_rounding(&inst, &problem.x()?, solution, rank_two, *tol)?);
            res
        }
        Report::HullCheck {
            point,
            tol,
            inside,
            lifted,
        } => {
            if hull_check(*point, *tol) != report.clone() {
                return fail(format!(
                    "recomputed membership differs from inside={inside}, lifted={lifted}"
                ));
            }
            Residuals::new()
        }
    };
    Ok(Verification {
        kind: "verification".into(),
        of: report.kind().into(),
        passed: true,
        residuals,
    })
}

fn check_certificate(spec: &ConeSpec, cert: &RogCertificate) -> CliResult<Residuals> {
    classify::verify_certificate(spec, cert).map_err(verifying)
}

fn check_decomposition(spec: &ConeSpec, x: &SymMatrix, d: &Decomposition, tol: f64) -> CliResult<Residuals> {
    let n = spec.n;
    let mut res = Residuals::new();
    if d.atoms.iter().any(|a| a.vector.len() != n) {
        return fail("atom of the wrong dimension");
    }
    if d.atoms.iter().any(|a| !(a.weight >= 0.0)) {
        return fail("negative atom weight");
    }
    let recon = (x - &d.reconstruct(n)).frobenius() / (1.0 + x.frobenius());
    res.insert("reconstruction".into(), recon);
    if !(recon <= RECONSTRUCTION_TOL) {
        return fail(format!("atoms reconstruct X only to {recon:.3e}"));
    }
    let mut worst = 0.0f64;
    for (i, a) in d.atoms.iter().enumerate() {
        let m = cones::member(spec, &a.matrix(), tol)?;
        worst = worst.max(m.worst_violation);
        if !m.feasible {
            return fail(format!("atom {i} is not in the cone"));
        }
    }
    res.insert("worst_atom_violation".into(), worst);
    res.insert("atoms".into(), d.len() as f64);
    Ok(res)
}

fn check_variety(m1: &SymMatrix, m2: &SymMatrix, lines: &LineSet) -> CliResult<Residuals> {
    if lines.lines.len() > 4 {
        return fail("more than four variety lines");
    }
    let mut worst = 0.0f64;
    for l in &lines.lines {
        let Some(u) = (l.len() == m1.n()).then(|| linalg::normalized(l)).flatten() else {
            return fail("variety line is zero or has the wrong dimension");
        };
        let r = (m1.quad(&u).abs() / (1.0 + m1.frobenius())).max(m2.quad(&u).abs() / (1.0 + m2.frobenius()));
        worst = worst.max(r);
    }
    if !(worst <= LINE_TOL) {
        return fail(format!("a line leaves the variety (residual {worst:.3e})"));
    }
    let mut res = Residuals::new();
    res.insert("line_variety".into(), worst);
    res.insert("lines".into(), lines.lines.len() as f64);
    Ok(res)
}

fn check_rounding(
    inst: &QcqpInstance,
    x: &SymMatrix,
    sol: &RoundedSolution,
    pieces: &[SlicePiece],
    tol: f64,
) -> CliResult<Residuals> {
    let n = inst.spec.n;
    let mut res = Residuals::new();
    if sol.points.is_empty() || sol.points.iter().any(|p| p.x.len() != n || !(p.weight >= 0.0)) {
        return fail("rounded points are missing, misshapen or negatively weighted");
    }
    let wsum = (qcqp::weight_sum(&sol.points) - 1.0).abs();
    let slice = qcqp::slice_error(inst, &sol.points);
    res.insert("weight_sum".into(), wsum);
    res.insert("slice".into(), slice);
    if !(wsum <= qcqp::SLICE_TOL && slice <= qcqp::SLICE_TOL) {
        return fail("weights do not sum to one or points leave the slice");
    }
    let mut worst = 0.0f64;
    for (i, p) in sol.points.iter().enumerate() {
        let m = cones::member(&inst.spec, &SymMatrix::outer(&p.x), tol)?;
        worst = worst.max(m.worst_violation);
        if !m.feasible {
            return fail(format!("rounded point {i} is infeasible"));
        }
        let v = inst.m0.quad(&p.x);
        if !((v - p.value).abs() <= 1e-9 * (1.0 + v.abs())) {
            return fail(format!("rounded point {i} has a wrong objective value"));
        }
    }
    res.insert("worst_point_violation".into(), worst);
    let best = sol.points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    if best != sol.best_value {
        return fail("best value is not the smallest point value");
    }
    let rebuilt = sol
        .points
        .iter()
        .fold(sol.recession.clone(), |m, p| m.add_outer(p.weight, &p.x));
    let recon = (x - &rebuilt).frobenius() / (1.0 + x.frobenius());
    res.insert("rounding_reconstruction".into(), recon);
    if !(recon <= RECONSTRUCTION_TOL) {
        return fail(format!("points and recession reconstruct X only to {recon:.3e}"));
    }

    let psum = (pieces.iter().map(|p| p.weight).sum::<f64>() - 1.0).abs();
    res.insert("rank_two_weight_sum".into(), psum);
    if pieces.iter().any(|p| p.matrix.n() != n || !(p.weight >= 0.0)) || !(psum <= qcqp::SLICE_TOL) {
        return fail("rank-two weights are negative or do not sum to one");
    }
    let mut worst = 0.0f64;
    let mut slice = 0.0f64;
    for (i, p) in pieces.iter().enumerate() {
        if linalg::numerical_rank(&p.matrix, linalg::RANK_TOL) > 2 {
            return fail(format!("rank-two piece {i} has rank above two"));
        }
        let m = cones::member(&inst.spec, &p.matrix, tol)?;
        worst = worst.max(m.worst_violation);
        if !m.feasible {
            return fail(format!("rank-two piece {i} is infeasible"));
        }
        slice = slice.max((inst.b.inner(&p.matrix) - 1.0).abs());
    }
    res.insert("rank_two_worst_violation".into(), worst);
    res.insert("rank_two_slice".into(), slice);
    if !(slice <= qcqp::SLICE_TOL) {
        return fail("a rank-two piece leaves the slice");
    }
    let sum = pieces
        .iter()
        .fold(SymMatrix::zeros(n), |m, p| m.axpy(p.weight, &p.matrix));
    let recon = (x - &sum).frobenius() / (1.0 + x.frobenius());
    res.insert("rank_two_reconstruction".into(), recon);
    if !(recon <= RECONSTRUCTION_TOL) {
        return fail(format!("rank-two pieces reconstruct X only to {recon:.3e}"));
    }
    Ok(res)
}
