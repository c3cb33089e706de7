//! Rank-one decompositions `X = Σ wᵢ vᵢvᵢᵀ` with every atom feasible.
//!
//! Inputs are normalized to unit Frobenius norm before peeling so that all
//! rank and tightness thresholds are relative.

mod facewalk;
pub mod sampling;

use serde::{Deserialize, Serialize};

use crate::classify::{self, Reason, RogCertificate};
use crate::cones::{self, ConeSpec, Constraint, Family, Sense};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, norm, sign_normalize, sym_outer, SymMatrix, RANK_TOL};
use crate::pencil;

use facewalk::{Oracle, Walk};

/// Relative feasibility tolerance for inputs and atoms.
pub const FEAS_TOL: f64 = 1e-7;
/// Relative reconstruction tolerance, `‖X − Σ‖_F ≤ RECON_TOL·(1 + ‖X‖_F)`.
pub const RECON_TOL: f64 = 1e-8;
/// Form values below this (relative to `‖M‖_F`) count as zero when peeling.
const ZERO_Q_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    /// Unit vector, sign-normalized.
    pub vector: Vec<f64>,
}

impl Atom {
    pub fn matrix(&self) -> SymMatrix {
        SymMatrix::outer(&self.vector).scale(self.weight)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub atoms: Vec<Atom>,
    /// `‖X − Σ wᵢ vᵢvᵢᵀ‖_F`.
    pub residual_norm: f64,
    /// Worst relative violation of any atom.
    pub atom_feasibility: f64,
}

impl Decomposition {
    pub fn reconstruct(&self, n: usize) -> SymMatrix {
        self.atoms
            .iter()
            .fold(SymMatrix::zeros(n), |m, a| m.add_outer(a.weight, &a.vector))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms as unnormalized factors `√w · v`.
    pub fn factors(&self) -> Vec<Vec<f64>> {
        self.atoms
            .iter()
            .map(|a| linalg::scaled(&a.vector, a.weight.sqrt()))
            .collect()
    }
}

/// Builds a checked decomposition from factors of `X`.
fn finish(spec: &ConeSpec, x: &SymMatrix, factors: Vec<Vec<f64>>) -> Result<Decomposition> {
    let mut atoms = Vec::new();
    for f in factors {
        let w = dot(&f, &f);
        if w == 0.0 {
            continue;
        }
        let mut v = linalg::scaled(&f, 1.0 / w.sqrt());
        sign_normalize(&mut v);
        atoms.push(Atom { weight: w, vector: v });
    }
    let mut d = Decomposition {
        atoms,
        residual_norm: 0.0,
        atom_feasibility: 0.0,
    };
    d.residual_norm = (x - &d.reconstruct(x.n())).frobenius();
    for a in &d.atoms {
        let r = cones::member(spec, &a.matrix(), FEAS_TOL)?;
        d.atom_feasibility = d.atom_feasibility.max(r.worst_violation);
    }
    if d.residual_norm > RECON_TOL * (1.0 + x.frobenius()) {
        return Err(Error::Internal(format!(
            "reconstruction residual {:.3e} exceeds tolerance",
            d.residual_norm
        )));
    }
    if d.atom_feasibility > FEAS_TOL {
        return Err(Error::Internal(format!(
            "atom violation {:.3e} exceeds tolerance",
            d.atom_feasibility
        )));
    }
    Ok(d)
}

fn check_input(spec: &ConeSpec, x: &SymMatrix) -> Result<()> {
    let r = cones::member(spec, x, FEAS_TOL)?;
    if !r.feasible {
        return Err(Error::InfeasibleInput {
            violation: r.worst_violation,
        });
    }
    Ok(())
}

/// Runs `f` on `X / ‖X‖_F` and rescales the resulting factors.
fn normalized_run(x: &SymMatrix, f: impl FnOnce(&SymMatrix) -> Result<Vec<Vec<f64>>>) -> Result<Vec<Vec<f64>>> {
    let s = x.frobenius();
    if s == 0.0 {
        return Ok(Vec::new());
    }
    let out = f(&x.scale(1.0 / s))?;
    Ok(out.into_iter().map(|v| linalg::scaled(&v, s.sqrt())).collect())
}

/// Peels the eigen-decomposition of a psd matrix.
fn eigen_factors(x: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let e = linalg::eig(x)?;
    let thr = e.rank_threshold(RANK_TOL);
    Ok(e.values
        .iter()
        .zip(&e.vectors)
        .filter(|(l, _)| **l > thr)
        .map(|(l, v)| linalg::scaled(v, l.sqrt()))
        .collect())
}

fn single_lmi_factors(m: &SymMatrix, sense: Sense, x: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let mf = m.frobenius();
    let zero_q = ZERO_Q_TOL * mf.max(f64::MIN_POSITIVE);
    let mut y = x.clone();
    let mut out = Vec::new();
    loop {
        let e = linalg::eig(&y)?;
        let thr = e.rank_threshold(RANK_TOL);
        let comps: Vec<(f64, &Vec<f64>)> = e
            .values
            .iter()
            .zip(&e.vectors)
            .filter(|(l, _)| **l > thr)
            .map(|(l, v)| (*l, v))
            .collect();
        if comps.len() <= 1 {
            out.extend(comps.iter().map(|(l, v)| linalg::scaled(v, l.sqrt())));
            return Ok(out);
        }
        let g = m.inner(&y);
        let qs: Vec<f64> = comps.iter().map(|(_, v)| m.quad(v)).collect();
        // an eigencomponent whose removal keeps the remainder feasible
        let peelable = comps.iter().zip(&qs).position(|((l, _), q)| match sense {
            Sense::Eq => q.abs() <= zero_q,
            Sense::Geq => *q >= -zero_q && l * q <= g + zero_q,
        });
        let x_dir = match peelable {
            Some(i) => comps[i].1.clone(),
            None => {
                let ip = (0..qs.len()).max_by(|&i, &j| qs[i].total_cmp(&qs[j])).unwrap_or(0);
                let ineg = (0..qs.len()).min_by(|&i, &j| qs[i].total_cmp(&qs[j])).unwrap_or(0);
                if qs[ip] <= 0.0 || qs[ineg] >= 0.0 {
                    return Err(Error::Internal("no sign change of the form on the range".into()));
                }
                zero_on_segment(m, comps[ip].1, comps[ineg].1)
            }
        };
        let t = linalg::peel_step_from(&e, &x_dir)?;
        out.push(linalg::scaled(&x_dir, t.sqrt()));
        y = y.add_outer(-t, &x_dir);
    }
}

/// Unit `x ∈ [x₁, x₂]` with `xᵀMx = 0`, given `x₁ᵀMx₁ > 0 > x₂ᵀMx₂`.
fn zero_on_segment(m: &SymMatrix, x1: &[f64], x2: &[f64]) -> Vec<f64> {
    let p = m.quad(x1);
    let q = m.quad(x2);
    let mm = m.bilinear(x1, x2);
    let f = |t: f64| (p - 2.0 * mm + q) * t * t + (2.0 * mm - 2.0 * p) * t + p;
    let a = p - 2.0 * mm + q;
    let b = 2.0 * mm - 2.0 * p;
    let mut t = if a.abs() <= 1e-14 * (p.abs() + q.abs()) {
        -p / b
    } else {
        let disc = (b * b - 4.0 * a * p).max(0.0);
        let r = -0.5 * (b + b.signum() * disc.sqrt());
        let cands = [r / a, if r != 0.0 { p / r } else { f64::NAN }];
        cands.into_iter().find(|t| (0.0..=1.0).contains(t)).unwrap_or(0.5)
    };
    // bisection safeguard on f(0) > 0 > f(1)
    if !(0.0..=1.0).contains(&t) || f(t).abs() > 1e-12 * (p.abs() + q.abs()) {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            t = 0.5 * (lo + hi);
            if f(t) > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
        }
    }
    let x = linalg::axpy(&linalg::scaled(x1, 1.0 - t), t, x2);
    linalg::normalized(&x).unwrap_or_else(|| x1.to_vec())
}

/// Decomposition for the single constraint `⟨M, X⟩ ≥ 0` (or `= 0`).
pub fn decompose_single_lmi(m: &SymMatrix, sense: Sense, x: &SymMatrix) -> Result<Decomposition> {
    check_dim(m.n(), x.n())?;
    let spec = ConeSpec::single(m.clone(), sense);
    check_input(&spec, x)?;
    let factors = normalized_run(x, |y| {
        if m.frobenius() == 0.0 {
            eigen_factors(y)
        } else {
            single_lmi_factors(m, sense, y)
        }
    })?;
    finish(&spec, x, factors)
}

fn walk_decompose(spec: &ConeSpec, walk: &Walk, x: &SymMatrix) -> Result<Decomposition> {
    check_input(spec, x)?;
    let factors = normalized_run(x, |y| walk.run(y))?;
    finish(spec, x, factors)
}

/// Decomposition for a common-vector family, or a two-constraint spec with a shared rank-two factor.
pub fn decompose_common_vector(spec: &ConeSpec, x: &SymMatrix) -> Result<Decomposition> {
    spec.validate()?;
    check_dim(spec.n, x.n())?;
    let a = match &spec.family {
        Some(Family::CommonVector { a, .. }) => a.clone(),
        Some(_) => return Err(Error::PreconditionViolated("spec is not a common-vector family".into())),
        None => {
            let cs = &spec.constraints;
            if cs.len() != 2 {
                return Err(Error::PreconditionViolated(
                    "an untagged spec needs exactly two constraints".into(),
                ));
            }
            pencil::cond_ii(&cs[0].matrix, &cs[1].matrix)
                .ok_or_else(|| Error::PreconditionViolated("the pair has no shared rank-two factor".into()))?
                .c
        }
    };
    perp_decompose(spec, &a, x)
}

fn perp_decompose(spec: &ConeSpec, a: &[f64], x: &SymMatrix) -> Result<Decomposition> {
    let cs = spec.linear_constraints();
    let walk = Walk {
        mats: cs.iter().map(|c| c.matrix.clone()).collect(),
        senses: cs.iter().map(|c| c.sense).collect(),
        oracle: Oracle::Perp(a.to_vec()),
    };
    walk_decompose(spec, &walk, x)
}

/// Decomposition for the constraints `Sym(abᵀ)`, `Sym(acᵀ)`, `Sym(bcᵀ)`.
pub fn decompose_three_products(a: &[f64], b: &[f64], c: &[f64], sense: Sense, x: &SymMatrix) -> Result<Decomposition> {
    let spec = ConeSpec::with_family(
        x.n(),
        Family::ThreeProducts {
            a: a.to_vec(),
            b: b.to_vec(),
            c: c.to_vec(),
            sense,
        },
    )?;
    let walk = Walk {
        mats: vec![sym_outer(a, b), sym_outer(a, c), sym_outer(b, c)],
        senses: vec![sense; 3],
        oracle: Oracle::ThreeProducts {
            a: a.to_vec(),
            b: b.to_vec(),
            c: c.to_vec(),
        },
    };
    walk_decompose(&spec, &walk, x)
}

/// Decomposition for the slice `{X ⪰ 0 : Xc ∈ Lⁿ, ⟨L, X⟩ ≥ 0}`.
pub fn decompose_soc_slice(c: &[f64], x: &SymMatrix) -> Result<Decomposition> {
    let spec = ConeSpec::with_family(x.n(), Family::SocSlice { c: c.to_vec() })?;
    walk_decompose(&spec, &Walk::soc(c), x)
}

/// Decomposition for two constraints, following the certificate's reason.
pub fn decompose_two_lmi(
    m1: &SymMatrix,
    m2: &SymMatrix,
    senses: [Sense; 2],
    x: &SymMatrix,
    cert: &RogCertificate,
) -> Result<Decomposition> {
    check_dim(m1.n(), m2.n())?;
    check_dim(m1.n(), x.n())?;
    let spec = ConeSpec::new(
        m1.n(),
        vec![
            Constraint {
                matrix: m1.clone(),
                sense: senses[0],
            },
            Constraint {
                matrix: m2.clone(),
                sense: senses[1],
            },
        ],
    )?;
    if !cert.is_rog() {
        return Err(Error::CertificateMismatch(format!(
            "verdict {:?} does not allow decomposition",
            cert.verdict
        )));
    }
    classify::verify_certificate(&spec, cert).map_err(|e| Error::CertificateMismatch(e.to_string()))?;
    check_input(&spec, x)?;
    match cert.reason() {
        Reason::SingleLmi => {
            let (m, sense) = effective_single(m1, m2, senses);
            let factors = normalized_run(x, |y| match &m {
                Some(m) => single_lmi_factors(m, sense, y),
                None => eigen_factors(y),
            })?;
            finish(&spec, x, factors)
        }
        Reason::CondII { c, .. } => perp_decompose(&spec, c, x),
        Reason::CondI { weights, .. } => {
            if senses == [Sense::Eq, Sense::Eq] {
                let p = m1.scale(weights.0).axpy(weights.1, m2);
                let factors = normalized_run(x, |y| cond_i_eq_factors(m1, m2, &p, y))?;
                finish(&spec, x, factors)
            } else {
                let walk = Walk {
                    mats: vec![m1.clone(), m2.clone()],
                    senses: senses.to_vec(),
                    oracle: Oracle::Generic,
                };
                walk_decompose(&spec, &walk, x)
            }
        }
        other => Err(Error::CertificateMismatch(format!(
            "reason {other:?} does not apply to a pair"
        ))),
    }
}

/// The one constraint a dependent pair amounts to; `None` for the whole psd cone.
fn effective_single(m1: &SymMatrix, m2: &SymMatrix, senses: [Sense; 2]) -> (Option<SymMatrix>, Sense) {
    let (n1, n2) = (m1.frobenius(), m2.frobenius());
    let floor = 1e-10 * n1.max(n2);
    if n1.max(n2) == 0.0 {
        return (None, Sense::Geq);
    }
    if n2 <= floor {
        return (Some(m1.clone()), senses[0]);
    }
    if n1 <= floor {
        return (Some(m2.clone()), senses[1]);
    }
    let lambda = m1.inner(m2) / (n1 * n1);
    let sense = match senses {
        [Sense::Geq, Sense::Geq] if lambda > 0.0 => Sense::Geq,
        _ => Sense::Eq,
    };
    (Some(m1.clone()), sense)
}

/// Equality pair with psd combination `P`: every feasible point lives on `ker P`,
/// where the restricted pair is dependent.
fn cond_i_eq_factors(m1: &SymMatrix, m2: &SymMatrix, p: &SymMatrix, y: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let k = linalg::kernel_basis(p)?;
    if k.dim() == 0 {
        return Ok(Vec::new());
    }
    let yk = y.congruence(&k.basis);
    let r1 = m1.congruence(&k.basis);
    let r2 = m2.congruence(&k.basis);
    let r = if r1.frobenius() >= r2.frobenius() { r1 } else { r2 };
    let inner = if r.frobenius() <= 1e-12 * (m1.frobenius() + m2.frobenius()) {
        eigen_factors(&yk)?
    } else {
        single_lmi_factors(&r, Sense::Eq, &yk)?
    };
    Ok(inner.iter().map(|v| k.embed(v)).collect())
}

/// Decomposition of a feasible point of any cone with an ROG certificate.
///
/// Structured families use their own oracles; untagged specs follow `cert`,
/// which is required for two or more constraints.
pub fn decompose(spec: &ConeSpec, x: &SymMatrix, cert: Option<&RogCertificate>) -> Result<Decomposition> {
    spec.validate()?;
    check_dim(spec.n, x.n())?;
    if let Some(f) = &spec.family {
        return match f {
            Family::CommonVector { .. } => decompose_common_vector(spec, x),
            Family::ThreeProducts { a, b, c, sense } => decompose_three_products(a, b, c, *sense, x),
            Family::SocSlice { c } => decompose_soc_slice(c, x),
        };
    }
    let cs = &spec.constraints;
    match cs.len() {
        0 => {
            check_input(spec, x)?;
            let factors = normalized_run(x, eigen_factors)?;
            finish(spec, x, factors)
        }
        1 => decompose_single_lmi(&cs[0].matrix, cs[0].sense, x),
        _ => {
            let cert = cert.ok_or_else(|| {
                Error::CertificateMismatch("a certificate is required for two or more constraints".into())
            })?;
            if cs.len() == 2 {
                return decompose_two_lmi(&cs[0].matrix, &cs[1].matrix, [cs[0].sense, cs[1].sense], x, cert);
            }
            if !cert.is_rog() {
                return Err(Error::CertificateMismatch(format!(
                    "verdict {:?} does not allow decomposition",
                    cert.verdict
                )));
            }
            classify::verify_certificate(spec, cert).map_err(|e| Error::CertificateMismatch(e.to_string()))?;
            let walk = Walk {
                mats: cs.iter().map(|c| c.matrix.clone()).collect(),
                senses: cs.iter().map(|c| c.sense).collect(),
                oracle: Oracle::Generic,
            };
            walk_decompose(spec, &walk, x)
        }
    }
}

/// Whether every atom is entrywise nonnegative (after sign normalization).
pub fn atoms_nonnegative(d: &Decomposition, tol: f64) -> bool {
    d.atoms
        .iter()
        .all(|a| a.vector.iter().all(|v| *v >= -tol * norm(&a.vector)))
}
