//! Spectrahedral cones cut out by linear matrix inequalities and equalities.
//!
//! A [`ConeSpec`] is either an explicit finite list of constraints or one of
//! the structured families whose constraint sets are generated on demand.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, norm, sym_outer, Subspace, SymMatrix, PSD_TOL};
use crate::pencil;

/// Constraint sense: `⟨M, X⟩ ≥ 0` or `⟨M, X⟩ = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Geq,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub matrix: SymMatrix,
    pub sense: Sense,
}

impl Constraint {
    pub fn geq(matrix: SymMatrix) -> Self {
        Constraint {
            matrix,
            sense: Sense::Geq,
        }
    }

    pub fn eq(matrix: SymMatrix) -> Self {
        Constraint {
            matrix,
            sense: Sense::Eq,
        }
    }
}

/// Structured families with generated constraint sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Constraints `Sym(a bᵀ)` for every listed `b`.
    CommonVector {
        a: Vec<f64>,
        bs: Vec<Vec<f64>>,
        #[serde(default)]
        sense: Sense,
    },
    /// Constraints `Sym(a bᵀ)`, `Sym(a cᵀ)`, `Sym(b cᵀ)`.
    ThreeProducts {
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        #[serde(default)]
        sense: Sense,
    },
    /// `X c` in the second-order cone and `⟨L, X⟩ ≥ 0` with `L = Diag(-1, …, -1, 1)`.
    SocSlice { c: Vec<f64> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::CommonVector { .. } => "common_vector",
            Family::ThreeProducts { .. } => "three_products",
            Family::SocSlice { .. } => "soc_slice",
        }
    }
}

/// The Lorentz form `Diag(-1, …, -1, 1)`.
pub fn lorentz(n: usize) -> SymMatrix {
    let mut d = vec![-1.0; n];
    d[n - 1] = 1.0;
    SymMatrix::diag(&d)
}

/// Membership of `y` in the second-order cone `{y : y_n ≥ ‖y_{1..n-1}‖}`, as a signed slack.
pub fn soc_slack(y: &[f64]) -> f64 {
    let n = y.len();
    y[n - 1] - norm(&y[..n - 1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub n: usize,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

impl ConeSpec {
    pub fn new(n: usize, constraints: Vec<Constraint>) -> Result<Self> {
        let spec = ConeSpec {
            n,
            constraints,
            family: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_family(n: usize, family: Family) -> Result<Self> {
        let spec = ConeSpec {
            n,
            constraints: Vec::new(),
            family: Some(family),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single(m: SymMatrix, sense: Sense) -> Self {
        ConeSpec {
            n: m.n(),
            constraints: vec![Constraint { matrix: m, sense }],
            family: None,
        }
    }

    pub fn pair(m1: SymMatrix, m2: SymMatrix, sense: Sense) -> Result<Self> {
        Self::new(
            m1.n(),
            vec![Constraint { matrix: m1, sense }, Constraint { matrix: m2, sense }],
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > linalg::MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "dimension {} exceeds {}",
                self.n,
                linalg::MAX_DIM
            )));
        }
        for c in &self.constraints {
            check_dim(self.n, c.matrix.n())?;
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match &self.family {
            None => {}
            Some(f) => {
                if !self.constraints.is_empty() {
                    return Err(Error::InvalidInput(
                        "a family-tagged cone carries no explicit constraints".into(),
                    ));
                }
                let vectors: Vec<&Vec<f64>> = match f {
                    Family::CommonVector { a, bs, .. } => std::iter::once(a).chain(bs.iter()).collect(),
                    Family::ThreeProducts { a, b, c, .. } => vec![a, b, c],
                    Family::SocSlice { c } => {
                        if self.n < 2 {
                            return Err(Error::InvalidInput("second-order cone slice needs n >= 2".into()));
                        }
                        vec![c]
                    }
                };
                for v in vectors {
                    check_dim(self.n, v.len())?;
                    if !finite(v) {
                        return Err(Error::InvalidInput("non-finite family vector".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// The explicit constraint list, generating it for the finite families.
    ///
    /// For the second-order cone slice only the `L` inequality is returned; the
    /// cone condition on `Xc` is handled separately by [`member`].
    pub fn linear_constraints(&self) -> Vec<Constraint> {
        match &self.family {
            None => self.constraints.clone(),
            Some(Family::CommonVector { a, bs, sense }) => bs
                .iter()
                .map(|b| Constraint {
                    matrix: sym_outer(a, b),
                    sense: *sense,
                })
                .collect(),
            Some(Family::ThreeProducts { a, b, c, sense }) => [(a, b), (a, c), (b, c)]
                .into_iter()
                .map(|(u, v)| Constraint {
                    matrix: sym_outer(u, v),
                    sense: *sense,
                })
                .collect(),
            Some(Family::SocSlice { .. }) => vec![Constraint::geq(lorentz(self.n))],
        }
    }

    pub fn soc_vector(&self) -> Option<&[f64]> {
        match &self.family {
            Some(Family::SocSlice { c }) => Some(c),
            _ => None,
        }
    }

    pub fn all_eq(&self) -> bool {
        self.soc_vector().is_none() && self.linear_constraints().iter().all(|c| c.sense == Sense::Eq)
    }

    /// Restricts every constraint to `w` (coordinates of the orthonormal basis).
    pub fn restrict(&self, w: &Subspace) -> Result<ConeSpec> {
        check_dim(self.n, w.n)?;
        if self.soc_vector().is_some() {
            return Err(Error::InvalidInput(
                "restriction of a second-order cone slice is not a cone spec".into(),
            ));
        }
        let constraints = self
            .linear_constraints()
            .into_iter()
            .map(|c| Constraint {
                matrix: c.matrix.congruence(&w.basis),
                sense: c.sense,
            })
            .collect();
        Ok(ConeSpec {
            n: w.dim(),
            constraints,
            family: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub feasible: bool,
    /// Worst relative violation: psd deficit over `1 + ‖X‖_F`, constraint
    /// violations over `1 + ‖M‖_F ‖X‖_F`.
    pub worst_violation: f64,
    pub tight_set: Vec<usize>,
}

fn rel_scale(m: &SymMatrix, x: &SymMatrix) -> f64 {
    1.0 + m.frobenius() * x.frobenius()
}

/// Checks `X` against psd-ness and every constraint of `spec`.
///
/// For the second-order cone slice, index 0 is the `L` inequality and index 1
/// the cone condition on `Xc`.
pub fn member(spec: &ConeSpec, x: &SymMatrix, tol: f64) -> Result<MembershipReport> {
    check_dim(spec.n, x.n())?;
    let e = linalg::eig(x)?;
    let mut worst = (-e.min()).max(0.0) / (1.0 + x.frobenius());
    let mut tight_set = Vec::new();
    for (i, c) in spec.linear_constraints().iter().enumerate() {
        let scale = rel_scale(&c.matrix, x);
        let g = c.matrix.inner(x) / scale;
        let v = match c.sense {
            Sense::Geq => (-g).max(0.0),
            Sense::Eq => g.abs(),
        };
        worst = worst.max(v);
        if g.abs() <= tol {
            tight_set.push(i);
        }
    }
    if let Some(c) = spec.soc_vector() {
        let y = x.matvec(c);
        let slack = soc_slack(&y) / (1.0 + x.frobenius() * norm(c));
        worst = worst.max((-slack).max(0.0));
        if slack <= tol {
            tight_set.push(1);
        }
    }
    Ok(MembershipReport {
        feasible: worst <= tol,
        worst_violation: worst,
        tight_set,
    })
}

/// Whether `x` lies in the envelope `{ |xᵀMx| ≤ ⟨M,X⟩ }` of the constraints at `X`.
pub fn envelope_member(spec: &ConeSpec, x_mat: &SymMatrix, x: &[f64], tol: f64) -> Result<bool> {
    check_dim(spec.n, x.len())?;
    if spec.soc_vector().is_some() {
        return Err(Error::InvalidInput(
            "envelope test needs a finite constraint list".into(),
        ));
    }
    let report = member(spec, x_mat, PSD_TOL.max(tol))?;
    if !report.feasible {
        return Err(Error::InfeasibleBase {
            violation: report.worst_violation,
        });
    }
    Ok(spec.linear_constraints().iter().all(|c| {
        let q = c.matrix.quad(x).abs();
        match c.sense {
            Sense::Geq => q <= c.matrix.inner(x_mat) + tol,
            Sense::Eq => q <= tol,
        }
    }))
}

/// Whether `x` is a common zero of all constraint forms (relative tolerance).
pub fn variety_member(spec: &ConeSpec, x: &[f64], tol: f64) -> bool {
    if x.len() != spec.n {
        return false;
    }
    let xx = dot(x, x);
    spec.linear_constraints()
        .iter()
        .all(|c| c.matrix.quad(x).abs() <= tol * (1.0 + c.matrix.frobenius() * xx))
}

const FR_FLOOR: f64 = 1e-7;

/// Result of facial reduction on an equality-only cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacialReduction {
    /// Subspace on which every feasible `X` vanishes.
    pub zero_space: Subspace,
    /// Orthonormal basis of the complement, the coordinates of `spec`.
    pub kept: Subspace,
    pub spec: ConeSpec,
}

/// Repeatedly removes ranges of psd elements found among single constraints and pairs.
pub fn facial_reduce(spec: &ConeSpec) -> Result<FacialReduction> {
    if !spec.all_eq() {
        return Err(Error::InvalidInput(
            "facial reduction applies to equality constraints only".into(),
        ));
    }
    let n = spec.n;
    let mut kept = Subspace::full(n);
    let mut mats: Vec<SymMatrix> = spec.linear_constraints().into_iter().map(|c| c.matrix).collect();
    // kernels of psd combinations are only accurate to about √ε, so
    // restricted constraints at this level count as zero
    let floor = FR_FLOOR * mats.iter().fold(1.0f64, |s, m| s.max(m.frobenius()));
    loop {
        mats.retain(|m| m.frobenius() > floor);
        let Some(p) = find_psd_element(&mats)? else {
            break;
        };
        let ker = linalg::kernel_basis(&p)?;
        if ker.dim() == kept.dim() {
            break;
        }
        // coordinates of ker are w.r.t. the current kept basis
        kept = Subspace {
            n,
            basis: ker.basis.iter().map(|c| kept.embed(c)).collect(),
        };
        mats = mats.iter().map(|m| m.congruence(&ker.basis)).collect();
        if kept.dim() == 0 {
            mats.clear();
            break;
        }
    }
    let zero_space = kept.complement();
    let spec = ConeSpec {
        n: kept.dim(),
        constraints: mats.into_iter().map(Constraint::eq).collect(),
        family: None,
    };
    Ok(FacialReduction { zero_space, kept, spec })
}

fn find_psd_element(mats: &[SymMatrix]) -> Result<Option<SymMatrix>> {
    for m in mats {
        if linalg::is_psd(m, PSD_TOL) {
            return Ok(Some(m.clone()));
        }
        let neg = -m;
        if linalg::is_psd(&neg, PSD_TOL) {
            return Ok(Some(neg));
        }
    }
    for i in 0..mats.len() {
        for j in (i + 1)..mats.len() {
            if pencil::dependent(&mats[i], &mats[j]) {
                continue;
            }
            let r = pencil::cond_i(&mats[i], &mats[j], &mut pencil::default_rng())?;
            if r.holds {
                let (a, b) = r.weights;
                return Ok(Some(mats[i].scale(a).axpy(b, &mats[j])));
            }
        }
    }
    Ok(None)
}

/// Restricts the constraints to the joint span of their ranges.
pub fn span_restrict(spec: &ConeSpec) -> Result<(Subspace, ConeSpec)> {
    let mut vectors = Vec::new();
    for c in spec.linear_constraints() {
        vectors.extend(linalg::range_basis(&c.matrix)?.basis);
    }
    let w = Subspace::span(spec.n, &vectors, 1e-9);
    let restricted = spec.restrict(&w)?;
    Ok((w, restricted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit;

    fn chordal() -> (ConeSpec, SymMatrix) {
        let e = |i| unit(4, i);
        let spec = ConeSpec::new(
            4,
            vec![
                Constraint::geq(sym_outer(&e(0), &e(1))),
                Constraint::geq(sym_outer(&e(1), &e(2))),
                Constraint::geq(sym_outer(&e(2), &e(3))),
            ],
        )
        .unwrap();
        let x = SymMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0, -1.0],
            vec![1.0, 1.0, 2.0, 0.0],
            vec![1.0, -1.0, 0.0, 2.0],
        ])
        .unwrap();
        (spec, x)
    }

    fn diagonal_pair() -> ConeSpec {
        ConeSpec::pair(
            SymMatrix::diag(&[1.0, -1.0, 0.0]),
            SymMatrix::diag(&[0.0, 1.0, -1.0]),
            Sense::Eq,
        )
        .unwrap()
    }

    #[test]
    fn member_examples() {
        let r = member(&diagonal_pair(), &SymMatrix::identity(3), 1e-9).unwrap();
        assert!(r.feasible);
        assert_eq!(r.tight_set, vec![0, 1]);
        assert!(member(&diagonal_pair(), &SymMatrix::zeros(3), 1e-9).unwrap().feasible);
        let (spec, x) = chordal();
        assert!(member(&spec, &x, 1e-9).unwrap().feasible);
        assert!(member(&spec, &SymMatrix::identity(3), 1e-9).is_err());
    }

    #[test]
    fn envelope_examples() {
        let spec = ConeSpec::single(SymMatrix::diag(&[1.0, -1.0]), Sense::Eq);
        let h = 0.5f64.sqrt();
        assert!(envelope_member(&spec, &SymMatrix::identity(2), &[h, h], 1e-9).unwrap());
        assert!(envelope_member(&spec, &SymMatrix::identity(2), &[0.0, 0.0], 1e-9).unwrap());
        assert!(!envelope_member(&spec, &SymMatrix::identity(2), &[1.0, 0.0], 1e-9).unwrap());
        let bad = SymMatrix::diag(&[1.0, 0.0]);
        assert!(matches!(
            envelope_member(&spec, &bad, &[h, h], 1e-9),
            Err(Error::InfeasibleBase { .. })
        ));
    }

    #[test]
    fn variety_examples() {
        let spec = diagonal_pair();
        assert!(variety_member(&spec, &[1.0, 1.0, 1.0], 1e-12));
        assert!(!variety_member(&spec, &[1.0, 1.0, 2f64.sqrt()], 1e-9));
        assert!(variety_member(&spec, &[0.0, 0.0, 0.0], 0.0));
    }

    #[test]
    fn facial_reduce_examples() {
        let r = facial_reduce(&ConeSpec::single(SymMatrix::identity(3), Sense::Eq)).unwrap();
        assert_eq!(r.zero_space.dim(), 3);
        assert_eq!(r.spec.n, 0);

        let spec = ConeSpec::pair(SymMatrix::diag(&[1.0, 0.0]), SymMatrix::diag(&[0.0, -1.0]), Sense::Eq).unwrap();
        let r = facial_reduce(&spec).unwrap();
        // {X ⪰ 0 : X11 = 0, X22 = 0} = {0}
        assert_eq!(r.zero_space.dim(), 2);
        assert!(r.spec.constraints.is_empty());

        // one forced coordinate, one genuine equality left over
        let spec = ConeSpec::pair(
            SymMatrix::diag(&[1.0, 0.0, 0.0]),
            SymMatrix::diag(&[0.0, 1.0, -1.0]),
            Sense::Eq,
        )
        .unwrap();
        let r = facial_reduce(&spec).unwrap();
        assert_eq!(r.zero_space.dim(), 1);
        assert!((r.zero_space.basis[0][0].abs() - 1.0).abs() < 1e-12);
        assert_eq!(r.spec.constraints.len(), 1);

        let r = facial_reduce(&diagonal_pair()).unwrap();
        assert_eq!(r.zero_space.dim(), 0);
        assert_eq!(r.spec.constraints.len(), 2);
    }

    #[test]
    fn span_restrict_examples() {
        let (w, s) = span_restrict(&ConeSpec::single(SymMatrix::diag(&[1.0, -1.0, 0.0]), Sense::Eq)).unwrap();
        assert_eq!(w.dim(), 2);
        assert_eq!(s.n, 2);
        assert!(w.basis.iter().all(|b| b[2].abs() < 1e-15));

        let e = |i| unit(4, i);
        let spec = ConeSpec::pair(sym_outer(&e(0), &e(2)), sym_outer(&e(1), &e(2)), Sense::Geq).unwrap();
        let (w, _) = span_restrict(&spec).unwrap();
        assert_eq!(w.dim(), 3);
        assert!(w.basis.iter().all(|b| b[3].abs() < 1e-15));

        let (w, _) = span_restrict(&ConeSpec::single(SymMatrix::identity(3), Sense::Eq)).unwrap();
        assert_eq!(w.dim(), 3);
    }

    #[test]
    fn soc_membership() {
        let spec = ConeSpec::with_family(2, Family::SocSlice { c: unit(2, 0) }).unwrap();
        let x = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = member(&spec, &x, 1e-9).unwrap();
        assert!(r.feasible);
        assert_eq!(r.tight_set, vec![1]);
        let bad = SymMatrix::diag(&[1.0, 0.5]);
        assert!(!member(&spec, &bad, 1e-9).unwrap().feasible);
        assert!(ConeSpec::with_family(1, Family::SocSlice { c: vec![1.0] }).is_err());
    }
}
