//! ROG decisions with certificates.
//!
//! Two constraints are decided completely: a psd pencil combination or a
//! shared rank-two factor proves ROG, and otherwise a rank-two witness
//! disproves it. Larger systems get the pairwise sufficient condition only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cones::{ConeSpec, Sense};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Subspace, SymMatrix};
use crate::pencil::{self, RogRng, SharedFactor};
use crate::witness::{self, WitnessBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Rog,
    NotRog,
    SufficientRog,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    /// Weights of a psd combination of constraints `i` and `j`, if one was found.
    pub weights: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reason {
    /// `α₁M₁ + α₂M₂` is positive semidefinite.
    CondI {
        weights: (f64, f64),
        marginal: bool,
    },
    /// `M₁ = Sym(a cᵀ)`, `M₂ = Sym(b cᵀ)`.
    #[serde(rename = "cond_ii")]
    CondII {
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    },
    /// At most one independent constraint.
    SingleLmi,
    PairwisePsd {
        table: Vec<PairEntry>,
    },
    StructuredFamily {
        tag: String,
    },
    Witness {
        bundle: Box<WitnessBundle>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub step: String,
    pub subspace: Subspace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RogCertificate {
    pub verdict: Verdict,
    /// Supporting reasons; the first is primary. Near ties list every verified reason.
    pub reasons: Vec<Reason>,
    pub reduction_trace: Vec<ReductionStep>,
    pub residuals: BTreeMap<String, f64>,
}

impl RogCertificate {
    pub fn reason(&self) -> &Reason {
        &self.reasons[0]
    }

    pub fn is_rog(&self) -> bool {
        matches!(self.verdict, Verdict::Rog | Verdict::SufficientRog)
    }

    pub fn cond_i_weights(&self) -> Option<(f64, f64)> {
        self.reasons.iter().find_map(|r| match r {
            Reason::CondI { weights, .. } => Some(*weights),
            _ => None,
        })
    }

    pub fn shared_factor(&self) -> Option<SharedFactor> {
        self.reasons.iter().find_map(|r| match r {
            Reason::CondII { a, b, c } => Some(SharedFactor {
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
            }),
            _ => None,
        })
    }

    pub fn witness(&self) -> Option<&WitnessBundle> {
        self.reasons.iter().find_map(|r| match r {
            Reason::Witness { bundle } => Some(bundle.as_ref()),
            _ => None,
        })
    }
}

fn certificate(verdict: Verdict, reasons: Vec<Reason>, reduction_trace: Vec<ReductionStep>) -> RogCertificate {
    RogCertificate {
        verdict,
        reasons,
        reduction_trace,
        residuals: BTreeMap::new(),
    }
}

/// Decides the ROG property of the cone cut out by two constraints.
///
/// The verdict does not depend on the senses: a two-constraint cone is ROG
/// exactly when its equality version is.
pub fn classify_two(m1: &SymMatrix, m2: &SymMatrix, _senses: [Sense; 2], rng: &mut RogRng) -> Result<RogCertificate> {
    check_dim(m1.n(), m2.n())?;
    let mats = [m1.clone(), m2.clone()];
    if pencil::dependent(m1, m2) {
        let mut cert = certificate(Verdict::Rog, vec![Reason::SingleLmi], Vec::new());
        cert.residuals = verify_pair(&mats, &cert)?;
        return Ok(cert);
    }
    let w = witness::joint_range(m1, m2)?;
    let d = w.dim();
    let trace = vec![ReductionStep {
        step: "span_restrict".into(),
        subspace: w.clone(),
    }];
    let r1 = m1.congruence(&w.basis);
    let r2 = m2.congruence(&w.basis);

    let mut reasons = Vec::new();
    let search = pencil::psd_search(&r1, &r2)?;
    if search.holds {
        reasons.push(Reason::CondI {
            weights: search.weights,
            marginal: search.marginal,
        });
    }
    if d >= 3 {
        if let Some(sf) = pencil::cond_ii(&r1, &r2) {
            reasons.push(Reason::CondII {
                a: w.embed(&sf.a),
                b: w.embed(&sf.b),
                c: w.embed(&sf.c),
            });
        }
    }
    // keep only reasons that verify in the original coordinates
    let mut verified = Vec::new();
    for r in reasons {
        let probe = certificate(Verdict::Rog, vec![r.clone()], Vec::new());
        if verify_pair(&mats, &probe).is_ok() {
            verified.push(r);
        }
    }
    let mut cert = if !verified.is_empty() {
        certificate(Verdict::Rog, verified, trace)
    } else {
        let bundle = match d {
            2 => witness::witness_n2(m1, m2)?,
            3 => witness::witness_n3(m1, m2, rng, None)?,
            _ => witness::witness_high_dim(m1, m2, rng)?,
        };
        certificate(
            Verdict::NotRog,
            vec![Reason::Witness {
                bundle: Box::new(bundle),
            }],
            trace,
        )
    };
    cert.residuals =
        verify_pair(&mats, &cert).map_err(|e| Error::Internal(format!("certificate failed self-verification: {e}")))?;
    Ok(cert)
}

/// Pairwise sufficient condition: every pair admits a nonzero psd combination.
pub fn classify_pairwise(ms: &[SymMatrix]) -> Result<RogCertificate> {
    if ms.len() < 2 {
        return Err(Error::InvalidInput(
            "pairwise classification needs at least two matrices".into(),
        ));
    }
    for m in ms {
        check_dim(ms[0].n(), m.n())?;
    }
    let mut table = Vec::new();
    let mut all = true;
    for i in 0..ms.len() {
        for j in (i + 1)..ms.len() {
            let weights = pair_weights(&ms[i], &ms[j])?;
            all &= weights.is_some();
            table.push(PairEntry { i, j, weights });
        }
    }
    let verdict = if all { Verdict::SufficientRog } else { Verdict::Unknown };
    let mut cert = certificate(verdict, vec![Reason::PairwisePsd { table }], Vec::new());
    cert.residuals = verify_pairwise(ms, &cert)?;
    Ok(cert)
}

fn pair_weights(a: &SymMatrix, b: &SymMatrix) -> Result<Option<(f64, f64)>> {
    if pencil::dependent(a, b) {
        // some nonzero combination vanishes
        let (na, nb) = (a.frobenius(), b.frobenius());
        let w = if na == 0.0 {
            (1.0, 0.0)
        } else if nb == 0.0 {
            (0.0, 1.0)
        } else {
            let lambda = a.inner(b) / (na * na);
            let s = (lambda * lambda + 1.0).sqrt();
            (lambda / s, -1.0 / s)
        };
        return Ok(Some(w));
    }
    let s = pencil::psd_search(a, b)?;
    Ok(s.holds.then_some(s.weights))
}

/// Structured families are ROG by construction; only the tag is validated.
pub fn classify_structured(spec: &ConeSpec) -> Result<RogCertificate> {
    spec.validate()?;
    let Some(f) = &spec.family else {
        return Err(Error::UntaggedSpec);
    };
    Ok(certificate(
        Verdict::Rog,
        vec![Reason::StructuredFamily {
            tag: f.name().to_string(),
        }],
        Vec::new(),
    ))
}

/// Dispatches on the shape of the cone description.
pub fn classify(spec: &ConeSpec, rng: &mut RogRng) -> Result<RogCertificate> {
    spec.validate()?;
    if spec.family.is_some() {
        return classify_structured(spec);
    }
    let cs = &spec.constraints;
    match cs.len() {
        0 | 1 => Ok(certificate(Verdict::Rog, vec![Reason::SingleLmi], Vec::new())),
        2 => classify_two(&cs[0].matrix, &cs[1].matrix, [cs[0].sense, cs[1].sense], rng),
        _ => {
            let ms: Vec<SymMatrix> = cs.iter().map(|c| c.matrix.clone()).collect();
            classify_pairwise(&ms)
        }
    }
}

/// Re-runs the residual checks of a certificate against its cone.
pub fn verify_certificate(spec: &ConeSpec, cert: &RogCertificate) -> Result<BTreeMap<String, f64>> {
    spec.validate()?;
    if let Some(f) = &spec.family {
        return match cert.reason() {
            Reason::StructuredFamily { tag } if tag == f.name() && cert.verdict == Verdict::Rog => Ok(BTreeMap::new()),
            _ => Err(Error::CertificateMismatch(
                "structured cone needs a matching family reason".into(),
            )),
        };
    }
    let ms: Vec<SymMatrix> = spec.constraints.iter().map(|c| c.matrix.clone()).collect();
    match ms.len() {
        0 | 1 => match (cert.verdict, cert.reason()) {
            (Verdict::Rog, Reason::SingleLmi) => Ok(BTreeMap::new()),
            _ => Err(Error::CertificateMismatch(
                "a single constraint is certified by the single-LMI reason".into(),
            )),
        },
        2 => verify_pair(&ms, cert),
        _ => verify_pairwise(&ms, cert),
    }
}

fn verify_pair(ms: &[SymMatrix], cert: &RogCertificate) -> Result<BTreeMap<String, f64>> {
    let (m1, m2) = (&ms[0], &ms[1]);
    let mismatch = |s: &str| Err(Error::CertificateMismatch(s.to_string()));
    let mut res = BTreeMap::new();
    if cert.reasons.is_empty() {
        return mismatch("certificate carries no reason");
    }
    for r in &cert.reasons {
        match (cert.verdict, r) {
            (Verdict::Rog, Reason::SingleLmi) => {
                if !pencil::dependent(m1, m2) {
                    return mismatch("constraints are not linearly dependent");
                }
            }
            (Verdict::Rog, Reason::CondI { weights, .. }) => {
                let p = m1.scale(weights.0).axpy(weights.1, m2);
                let e = linalg::eig(&p)?;
                res.insert("cond_i_min_eig".into(), e.min());
                let wn = (weights.0 * weights.0 + weights.1 * weights.1).sqrt();
                if wn == 0.0 || !linalg::is_psd(&p, linalg::PSD_TOL) {
                    return mismatch("pencil combination is not positive semidefinite");
                }
            }
            (Verdict::Rog, Reason::CondII { a, b, c }) => {
                let sf = SharedFactor {
                    a: a.clone(),
                    b: b.clone(),
                    c: c.clone(),
                };
                if a.len() != m1.n() || b.len() != m1.n() || c.len() != m1.n() {
                    return mismatch("shared-factor vectors have the wrong length");
                }
                let r = sf.residual(m1, m2);
                res.insert("cond_ii_reconstruction".into(), r);
                if r > 1e-8 {
                    return mismatch("shared-factor triple does not reconstruct the pair");
                }
            }
            (Verdict::NotRog, Reason::Witness { bundle }) => {
                for (k, v) in witness::verify_bundle(m1, m2, bundle)? {
                    res.insert(k, v);
                }
            }
            _ => return mismatch("reason does not support the verdict for two constraints"),
        }
    }
    Ok(res)
}

fn verify_pairwise(ms: &[SymMatrix], cert: &RogCertificate) -> Result<BTreeMap<String, f64>> {
    let Reason::PairwisePsd { table } = cert.reason() else {
        return Err(Error::CertificateMismatch(
            "systems of three or more constraints need a pairwise table".into(),
        ));
    };
    let k = ms.len();
    if table.len() != k * (k - 1) / 2 {
        return Err(Error::CertificateMismatch("pairwise table is incomplete".into()));
    }
    let mut worst = f64::INFINITY;
    let mut all = true;
    for e in table {
        if e.i >= k || e.j >= k || e.i == e.j {
            return Err(Error::CertificateMismatch("pairwise table index out of range".into()));
        }
        match e.weights {
            Some((a, b)) => {
                let p = ms[e.i].scale(a).axpy(b, &ms[e.j]);
                worst = worst.min(linalg::eig(&p)?.min());
                if (a == 0.0 && b == 0.0) || !linalg::is_psd(&p, linalg::PSD_TOL) {
                    return Err(Error::CertificateMismatch(format!(
                        "pair ({}, {}) combination is not positive semidefinite",
                        e.i, e.j
                    )));
                }
            }
            None => all = false,
        }
    }
    let expected = if all { Verdict::SufficientRog } else { Verdict::Unknown };
    if cert.verdict != expected {
        return Err(Error::CertificateMismatch(
            "verdict does not match the pairwise table".into(),
        ));
    }
    let mut res = BTreeMap::new();
    if worst.is_finite() {
        res.insert("pairwise_min_eig".into(), worst);
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Family;
    use crate::linalg::{sym_outer, unit};
    use crate::pencil::default_rng;

    #[test]
    fn diagonal_pair_is_not_rog() {
        let m1 = SymMatrix::diag(&[1.0, -1.0, 0.0]);
        let m2 = SymMatrix::diag(&[0.0, 1.0, -1.0]);
        let c = classify_two(&m1, &m2, [Sense::Eq; 2], &mut default_rng()).unwrap();
        assert_eq!(c.verdict, Verdict::NotRog);
        let b = c.witness().unwrap();
        assert_eq!(b.lines.lines.len(), 4);
        let g = classify_two(&m1, &m2, [Sense::Geq; 2], &mut default_rng()).unwrap();
        assert_eq!(g.verdict, Verdict::NotRog);
    }

    #[test]
    fn shared_factor_is_rog() {
        let e = |i| unit(3, i);
        let m1 = sym_outer(&e(0), &e(2));
        let m2 = sym_outer(&e(1), &e(2));
        let c = classify_two(&m1, &m2, [Sense::Geq; 2], &mut default_rng()).unwrap();
        assert_eq!(c.verdict, Verdict::Rog);
        let sf = c.shared_factor().unwrap();
        assert!(linalg::line_angle(&sf.c, &e(2)) < 1e-12);
        assert!(linalg::line_angle(&sf.a, &e(0)) < 1e-12);
        assert!(linalg::line_angle(&sf.b, &e(1)) < 1e-12);
    }

    #[test]
    fn lifted_pair_is_not_rog() {
        let e = |i| unit(4, i);
        let m1 = sym_outer(&e(0), &e(1));
        let m2 = sym_outer(&e(0), &e(2)).axpy(-1.0, &SymMatrix::outer(&e(3)));
        let c = classify_two(&m1, &m2, [Sense::Eq; 2], &mut default_rng()).unwrap();
        assert_eq!(c.verdict, Verdict::NotRog);
        assert_eq!(c.reduction_trace[0].subspace.dim(), 4);
    }

    #[test]
    fn dependent_pair_collapses() {
        let m = SymMatrix::diag(&[1.0, -2.0]);
        let c = classify_two(&m, &m.scale(-3.0), [Sense::Geq; 2], &mut default_rng()).unwrap();
        assert_eq!(c.verdict, Verdict::Rog);
        assert_eq!(c.reason(), &Reason::SingleLmi);
    }

    #[test]
    fn pairwise_examples() {
        let ms = [
            SymMatrix::identity(2),
            SymMatrix::diag(&[1.0, 0.0]),
            SymMatrix::diag(&[0.0, 1.0]),
        ];
        assert_eq!(classify_pairwise(&ms).unwrap().verdict, Verdict::SufficientRog);

        let ms = [
            SymMatrix::diag(&[1.0, -1.0, 0.0]),
            SymMatrix::diag(&[0.0, 1.0, -1.0]),
            SymMatrix::identity(3),
        ];
        assert_eq!(classify_pairwise(&ms).unwrap().verdict, Verdict::Unknown);

        let ms = [SymMatrix::diag(&[1.0, -1.0]), SymMatrix::diag(&[-1.0, 2.0])];
        assert_eq!(classify_pairwise(&ms).unwrap().verdict, Verdict::SufficientRog);
    }

    #[test]
    fn structured_examples() {
        let e = |i| unit(3, i);
        let spec = ConeSpec::with_family(
            3,
            Family::CommonVector {
                a: e(0),
                bs: vec![e(1), e(2)],
                sense: Sense::Geq,
            },
        )
        .unwrap();
        assert_eq!(classify_structured(&spec).unwrap().verdict, Verdict::Rog);
        let spec = ConeSpec::with_family(
            3,
            Family::ThreeProducts {
                a: e(0),
                b: e(1),
                c: e(2),
                sense: Sense::Geq,
            },
        )
        .unwrap();
        assert_eq!(classify_structured(&spec).unwrap().verdict, Verdict::Rog);
        let spec = ConeSpec::with_family(2, Family::SocSlice { c: unit(2, 0) }).unwrap();
        assert_eq!(classify_structured(&spec).unwrap().verdict, Verdict::Rog);
        let plain = ConeSpec::single(SymMatrix::identity(2), Sense::Geq);
        assert!(matches!(classify_structured(&plain), Err(Error::UntaggedSpec)));
    }

    #[test]
    fn verify_rejects_tampering() {
        let m1 = SymMatrix::diag(&[1.0, -1.0]);
        let m2 = SymMatrix::diag(&[-1.0, 2.0]);
        let spec = ConeSpec::pair(m1.clone(), m2.clone(), Sense::Geq).unwrap();
        let mut c = classify(&spec, &mut default_rng()).unwrap();
        assert!(verify_certificate(&spec, &c).is_ok());
        c.reasons = vec![Reason::CondI {
            weights: (1.0, 0.0),
            marginal: false,
        }];
        assert!(verify_certificate(&spec, &c).is_err());
    }
}
