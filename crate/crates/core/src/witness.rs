//! Non-ROG witnesses for two-constraint cones.
//!
//! A witness is a rank-two `X` in the equality cone whose range meets the
//! common zero set of the two forms only at the origin. In dimension three the
//! zero set is at most four lines, which are enumerated explicitly so the
//! range condition can be checked by angles.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    self, axpy, cross, dot, line_angle, norm, normalized, scaled, sign_normalize, Subspace, SymMatrix,
};
use crate::pencil::{self, RogRng};
use crate::roots;

const LINE_TOL: f64 = 1e-8;
const MIN_ANGLE: f64 = 1e-6;
const W_MARGIN: f64 = 1e-3;
const W_TRIES: usize = 10_000;

/// One-dimensional subspaces given by unit, sign-normalized vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSet {
    pub lines: Vec<Vec<f64>>,
    pub complete: bool,
}

impl LineSet {
    fn insert(&mut self, v: &[f64]) {
        let Some(mut u) = normalized(v) else {
            return;
        };
        sign_normalize(&mut u);
        if self.lines.iter().all(|l| line_angle(l, &u) > 1e-7) {
            self.lines.push(u);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBundle {
    /// The rank-two element of the equality cone.
    pub x: SymMatrix,
    /// Subspace carrying the reduced problem (dimension 2 or 3).
    pub w: Subspace,
    /// Variety lines of the reduced problem, embedded in the ambient space.
    pub lines: LineSet,
    /// Generating vectors with `X = w wᵀ + z zᵀ`.
    pub w_z: (Vec<f64>, Vec<f64>),
    pub residuals: BTreeMap<String, f64>,
}

/// Span of the ranges of the two matrices.
pub fn joint_range(m1: &SymMatrix, m2: &SymMatrix) -> Result<Subspace> {
    let mut v = linalg::range_basis(m1)?.basis;
    v.extend(linalg::range_basis(m2)?.basis);
    Ok(Subspace::span(m1.n(), &v, 1e-9))
}

fn require_no_psd_combination(m1: &SymMatrix, m2: &SymMatrix) -> Result<()> {
    match pencil::psd_search(m1, m2) {
        Ok(s) if !s.holds => Ok(()),
        Ok(_) => Err(Error::PreconditionViolated(
            "a nonzero psd combination of the pair exists".into(),
        )),
        Err(Error::DegeneratePencil) => Err(Error::PreconditionViolated("the pair is linearly dependent".into())),
        Err(e) => Err(e),
    }
}

/// Enumerates the common zero lines of two quadratic forms on ℝ³.
pub fn variety_lines_3d(m1: &SymMatrix, m2: &SymMatrix) -> Result<LineSet> {
    check_dim(3, m1.n())?;
    check_dim(3, m2.n())?;
    require_no_psd_combination(m1, m2)?;
    if pencil::cond_ii(m1, m2).is_some() {
        return Err(Error::PreconditionViolated("the pair shares a rank-two factor".into()));
    }
    if joint_range(m1, m2)?.dim() != 3 {
        return Err(Error::PreconditionViolated(
            "the joint range of the pair is not all of R^3".into(),
        ));
    }

    let mut set = LineSet {
        lines: Vec::new(),
        complete: true,
    };
    if let (Some(f1), Some(f2)) = (pencil::rank_two_factor(m1), pencil::rank_two_factor(m2)) {
        for u in [&f1.a, &f1.b] {
            for v in [&f2.a, &f2.b] {
                let l = cross(u, v);
                if norm(&l) > 1e-12 {
                    set.insert(&polish_line(m1, m2, &l));
                }
            }
        }
        return Ok(set);
    }

    // best-conditioned combination P, and its orthogonal partner Q
    let mut best = (0.0, -1.0);
    for k in 0..64 {
        let th = k as f64 * std::f64::consts::PI / 64.0;
        let p = m1.scale(th.cos()).axpy(th.sin(), m2);
        let e = linalg::eig(&p)?;
        let fro = p.frobenius();
        let cond = (e.values[0] * e.values[1] * e.values[2]).abs() / fro.powi(3);
        if cond > best.1 {
            best = (th, cond);
        }
    }
    let th = best.0;
    let mut p = m1.scale(th.cos()).axpy(th.sin(), m2);
    let q = m1.scale(-th.sin()).axpy(th.cos(), m2);
    let mut e = linalg::eig(&p)?;
    if e.values[1] < 0.0 {
        p = -&p;
        e = linalg::eig(&p)?;
    }
    if !(e.values[1] > 0.0 && e.values[2] < 0.0) {
        return Err(Error::PreconditionViolated(
            "no pencil combination of signature (+,+,-)".into(),
        ));
    }
    // columns of T: Tᵀ P T = Diag(1, 1, -1)
    let t: Vec<Vec<f64>> = (0..3)
        .map(|i| scaled(&e.vectors[i], 1.0 / e.values[i].abs().sqrt()))
        .collect();
    let qq = q.congruence(&t);
    let (a, b, c) = (qq.get(0, 0), qq.get(0, 1), qq.get(0, 2));
    let (d, ee, f) = (qq.get(1, 1), qq.get(1, 2), qq.get(2, 2));
    let am = a - d;
    let dp = d + f;
    let coeffs = [
        am * am + 4.0 * b * b,
        4.0 * am * c + 8.0 * b * ee,
        2.0 * am * dp + 4.0 * c * c + 4.0 * ee * ee - 4.0 * b * b,
        4.0 * c * dp - 8.0 * b * ee,
        dp * dp - 4.0 * ee * ee,
    ];
    let cscale = coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if cscale <= 1e-12 * (1.0 + qq.frobenius()).powi(2) {
        return Err(Error::PreconditionViolated(
            "the variety is not a finite union of lines".into(),
        ));
    }
    let to_ambient = |y: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; 3];
        for (yi, ti) in y.iter().zip(&t) {
            x = axpy(&x, *yi, ti);
        }
        x
    };
    let hq = (1.0 + qq.frobenius()) * 1e-6;
    for xi in roots::poly_roots(&coeffs)?
        .into_iter()
        .filter(|(re, im)| im.abs() <= 1e-6 * re.abs().max(1.0))
        .map(|(re, _)| re)
        .filter(|re| re.abs() <= 1.0 + 1e-6)
    {
        let xi = xi.clamp(-1.0, 1.0);
        let eta = (1.0 - xi * xi).max(0.0).sqrt();
        for s in [1.0, -1.0] {
            let y = [xi, s * eta, 1.0];
            let g = am * xi * xi + 2.0 * c * xi + dp;
            let h = 2.0 * b * xi + 2.0 * ee;
            if (g + s * eta * h).abs() > hq.max(1e-3 * (g.abs() + h.abs())) {
                continue;
            }
            let cand = polish_line(m1, m2, &to_ambient(&y));
            if line_residual(m1, m2, &cand) <= 1e-10 {
                set.insert(&cand);
            }
        }
    }
    Ok(set)
}

/// Relative residual of the two forms on the unit vector along `x`.
fn line_residual(m1: &SymMatrix, m2: &SymMatrix, x: &[f64]) -> f64 {
    let Some(u) = normalized(x) else {
        return f64::INFINITY;
    };
    let r1 = m1.quad(&u).abs() / (1.0 + m1.frobenius());
    let r2 = m2.quad(&u).abs() / (1.0 + m2.frobenius());
    r1.max(r2)
}

/// Newton refinement of a common zero on the unit sphere.
pub(crate) fn polish_line(m1: &SymMatrix, m2: &SymMatrix, x: &[f64]) -> Vec<f64> {
    let Some(mut u) = normalized(x) else {
        return x.to_vec();
    };
    let mut best = line_residual(m1, m2, &u);
    for _ in 0..20 {
        if best <= 1e-16 {
            break;
        }
        let j1 = scaled(&m1.matvec(&u), 2.0);
        let j2 = scaled(&m2.matvec(&u), 2.0);
        let r = [m1.quad(&u), m2.quad(&u)];
        let a = dot(&j1, &j1);
        let b = dot(&j1, &j2);
        let d = dot(&j2, &j2);
        let det = a * d - b * b;
        if !(det.abs() > 1e-300) {
            break;
        }
        let y0 = (d * r[0] - b * r[1]) / det;
        let y1 = (a * r[1] - b * r[0]) / det;
        let cand = axpy(&axpy(&u, -y0, &j1), -y1, &j2);
        let Some(cand) = normalized(&cand) else {
            break;
        };
        let rc = line_residual(m1, m2, &cand);
        if rc >= best {
            break;
        }
        best = rc;
        u = cand;
    }
    u
}

fn common_zero_lines_2d(m1: &SymMatrix, m2: &SymMatrix) -> Vec<Vec<f64>> {
    // zero lines of whichever form has the larger norm, filtered by the other
    let (p, q) = if m1.frobenius() >= m2.frobenius() {
        (m1, m2)
    } else {
        (m2, m1)
    };
    let mut out = Vec::new();
    let Ok(e) = linalg::eig(p) else {
        return out;
    };
    let (l1, l2) = (e.values[0], e.values[1]);
    let mut cands = Vec::new();
    let thr = 1e-12 * (1.0 + p.frobenius());
    if l1.abs() <= thr {
        cands.push(e.vectors[0].clone());
    }
    if l2.abs() <= thr {
        cands.push(e.vectors[1].clone());
    }
    if l1 > thr && l2 < -thr {
        let (s1, s2) = ((-l2).sqrt(), l1.sqrt());
        cands.push(axpy(&scaled(&e.vectors[0], s1), s2, &e.vectors[1]));
        cands.push(axpy(&scaled(&e.vectors[0], s1), -s2, &e.vectors[1]));
    }
    for c in cands {
        if line_residual(p, q, &c) <= LINE_TOL {
            let mut u = normalized(&c).unwrap_or(c);
            sign_normalize(&mut u);
            out.push(u);
        }
    }
    out
}

fn embed_vec(w: &Subspace, v: &[f64]) -> Vec<f64> {
    w.embed(v)
}

/// Witness for a pair whose joint range is two-dimensional: the positive
/// definite generator of the orthogonal complement of the pair.
pub fn witness_n2(m1: &SymMatrix, m2: &SymMatrix) -> Result<WitnessBundle> {
    check_dim(m1.n(), m2.n())?;
    require_no_psd_combination(m1, m2)?;
    let w = joint_range(m1, m2)?;
    if w.dim() != 2 {
        return Err(Error::PreconditionViolated(format!(
            "joint range has dimension {}, expected 2",
            w.dim()
        )));
    }
    let r1 = m1.congruence(&w.basis);
    let r2 = m2.congruence(&w.basis);
    let s2 = 2f64.sqrt();
    let vecm = |m: &SymMatrix| [m.get(0, 0), m.get(1, 1), s2 * m.get(0, 1)];
    let k = cross(&vecm(&r1), &vecm(&r2));
    let mut x2 = SymMatrix::from_rows(&[vec![k[0], k[2] / s2], vec![k[2] / s2, k[1]]])?;
    if x2.trace() < 0.0 {
        x2 = -&x2;
    }
    x2 = x2.scale(1.0 / x2.frobenius());
    let x = w.lift(&x2);
    let e = linalg::eig(&x2)?;
    let wv = embed_vec(&w, &scaled(&e.vectors[0], e.values[0].max(0.0).sqrt()));
    let zv = embed_vec(&w, &scaled(&e.vectors[1], e.values[1].max(0.0).sqrt()));
    let lines: Vec<Vec<f64>> = common_zero_lines_2d(&r1, &r2)
        .iter()
        .map(|l| embed_vec(&w, l))
        .collect();
    let mut bundle = WitnessBundle {
        x,
        w,
        lines: LineSet { lines, complete: true },
        w_z: (wv, zv),
        residuals: BTreeMap::new(),
    };
    bundle.residuals = verify_bundle(m1, m2, &bundle)?;
    Ok(bundle)
}

fn rank_two_from(w: &[f64], z: &[f64]) -> SymMatrix {
    SymMatrix::outer(w).add_outer(1.0, z)
}

/// Distance of unit `w` to every line and every plane spanned by two lines.
fn avoids_line_spans(w: &[f64], lines: &[Vec<f64>]) -> bool {
    for (i, a) in lines.iter().enumerate() {
        if line_angle(w, a).sin() <= W_MARGIN {
            return false;
        }
        for b in &lines[i + 1..] {
            if let Some(nrm) = normalized(&cross(a, b)) {
                if dot(w, &nrm).abs() <= W_MARGIN {
                    return false;
                }
            }
        }
    }
    true
}

fn random_unit(n: usize, rng: &mut RogRng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// Witness for a pair whose joint range is three-dimensional.
///
/// `pinned_w` fixes the first generator instead of sampling it.
pub fn witness_n3(m1: &SymMatrix, m2: &SymMatrix, rng: &mut RogRng, pinned_w: Option<&[f64]>) -> Result<WitnessBundle> {
    check_dim(m1.n(), m2.n())?;
    let w_space = joint_range(m1, m2)?;
    if w_space.dim() != 3 {
        return Err(Error::PreconditionViolated(format!(
            "joint range has dimension {}, expected 3",
            w_space.dim()
        )));
    }
    let r1 = m1.congruence(&w_space.basis);
    let r2 = m2.congruence(&w_space.basis);
    let lines3 = variety_lines_3d(&r1, &r2)?;
    let lines_amb: Vec<Vec<f64>> = lines3.lines.iter().map(|l| w_space.embed(l)).collect();
    let pinned = match pinned_w {
        Some(w) => {
            check_dim(m1.n(), w.len())?;
            Some(w_space.coords(w))
        }
        None => None,
    };

    for attempt in 0..W_TRIES {
        let w = match &pinned {
            Some(w) => w.clone(),
            None => {
                let u = random_unit(3, rng);
                if !avoids_line_spans(&u, &lines3.lines) {
                    continue;
                }
                u
            }
        };
        let z = match antipodal(&r1, &r2, &w, attempt > 0, rng) {
            Ok(z) => z,
            Err(Error::SolveFailed { .. }) if pinned.is_none() => continue,
            Err(e) => return Err(e),
        };
        let wv = w_space.embed(&w);
        let zv = w_space.embed(&z);
        let mut bundle = WitnessBundle {
            x: rank_two_from(&wv, &zv),
            w: w_space.clone(),
            lines: LineSet {
                lines: lines_amb.clone(),
                complete: lines3.complete,
            },
            w_z: (wv, zv),
            residuals: BTreeMap::new(),
        };
        if let Ok(res) = verify_bundle(m1, m2, &bundle) {
            bundle.residuals = res;
            return Ok(bundle);
        }
    }
    Err(Error::SamplingFailed { tries: W_TRIES })
}

/// Antipodal solve; retries use random starts so a pinned `w` can get a different `z`.
fn antipodal(r1: &SymMatrix, r2: &SymMatrix, w: &[f64], retry: bool, rng: &mut RogRng) -> Result<Vec<f64>> {
    if !retry {
        return pencil::antipodal_solve(r1, r2, w, rng);
    }
    let im = pencil::image(r1, r2, w);
    pencil::dines_solve_random(r1, r2, [-im[0], -im[1]], rng)
}

/// Smallest singular value of the matrix with the given columns.
fn min_singular(cols: &[Vec<f64>]) -> f64 {
    let g = SymMatrix::from_fn(cols.len(), |i, j| dot(&cols[i], &cols[j]));
    linalg::eig(&g).map(|e| e.min().max(0.0).sqrt()).unwrap_or(0.0)
}

/// Witness for a pair whose joint range has dimension at least four, via a
/// three-dimensional subspace on which the restricted pair still fails both conditions.
pub fn witness_high_dim(m1: &SymMatrix, m2: &SymMatrix, rng: &mut RogRng) -> Result<WitnessBundle> {
    check_dim(m1.n(), m2.n())?;
    let span = joint_range(m1, m2)?;
    if span.dim() < 4 {
        return Err(Error::PreconditionViolated(format!(
            "joint range has dimension {}, expected at least 4",
            span.dim()
        )));
    }
    let a1 = m1.congruence(&span.basis);
    let a2 = m2.congruence(&span.basis);
    require_no_psd_combination(&a1, &a2)?;

    let mut us = Vec::with_capacity(3);
    for k in 0..3 {
        let ang = k as f64 * std::f64::consts::TAU / 3.0;
        us.push(pencil::dines_solve(&a1, &a2, [ang.cos(), ang.sin()], rng)?);
    }
    let (b1, b2) = pencil::rank3_combo(&a1, &a2)?;
    let p = a1.scale(b1).axpy(b2, &a2);
    let e = linalg::eig(&p)?;
    let mut idx: Vec<usize> = (0..e.values.len()).collect();
    idx.sort_by(|&i, &j| e.values[j].abs().total_cmp(&e.values[i].abs()));
    let vs: Vec<Vec<f64>> = idx[..3].iter().map(|&i| e.vectors[i].clone()).collect();

    let mut mu = 0.5;
    while mu >= 1e-6 {
        let xs: Vec<Vec<f64>> = us
            .iter()
            .zip(&vs)
            .map(|(u, v)| {
                let x = axpy(&scaled(u, 1.0 - mu), mu, v);
                normalized(&x).unwrap_or(x)
            })
            .collect();
        if min_singular(&xs) > 1e-6 {
            let w3 = Subspace::span(span.dim(), &xs, 1e-9);
            let r1 = a1.congruence(&w3.basis);
            let r2 = a2.congruence(&w3.basis);
            let pr = r1.scale(b1).axpy(b2, &r2);
            let ok_rank = linalg::numerical_rank(&pr, linalg::RANK_TOL) == 3;
            let ok_cond = ok_rank
                && matches!(pencil::psd_search(&r1, &r2), Ok(s) if !s.holds)
                && pencil::cond_ii(&r1, &r2).is_none();
            if ok_cond {
                // lift the reduced subspace back to the ambient space
                let amb = Subspace {
                    n: m1.n(),
                    basis: w3.basis.iter().map(|b| span.embed(b)).collect(),
                };
                let n1 = m1.congruence(&amb.basis);
                let n2 = m2.congruence(&amb.basis);
                if let Ok(inner) = witness_n3(&n1, &n2, rng, None) {
                    let lift = |v: &[f64]| amb.embed(v);
                    let mut bundle = WitnessBundle {
                        x: amb.lift(&inner.x),
                        w: Subspace {
                            n: m1.n(),
                            basis: inner.w.basis.iter().map(|b| lift(b)).collect(),
                        },
                        lines: LineSet {
                            lines: inner.lines.lines.iter().map(|l| lift(l)).collect(),
                            complete: inner.lines.complete,
                        },
                        w_z: (lift(&inner.w_z.0), lift(&inner.w_z.1)),
                        residuals: BTreeMap::new(),
                    };
                    bundle.residuals = verify_bundle(m1, m2, &bundle)?;
                    return Ok(bundle);
                }
            }
        }
        mu /= 2.0;
    }
    Err(Error::ReductionFailed(
        "no reduction weight above 1e-6 certified all three conditions".into(),
    ))
}

/// Dispatches on the dimension of the joint range.
pub fn witness(m1: &SymMatrix, m2: &SymMatrix, rng: &mut RogRng) -> Result<WitnessBundle> {
    check_dim(m1.n(), m2.n())?;
    match joint_range(m1, m2)?.dim() {
        0 | 1 => Err(Error::PreconditionViolated(
            "joint range of dimension below two admits no witness".into(),
        )),
        2 => witness_n2(m1, m2),
        3 => witness_n3(m1, m2, rng, None),
        _ => witness_high_dim(m1, m2, rng),
    }
}

/// Re-checks every bundle invariant without constructing anything.
///
/// Returns the named residuals, or `CertificateMismatch` naming the first failed check.
pub fn verify_bundle(m1: &SymMatrix, m2: &SymMatrix, b: &WitnessBundle) -> Result<BTreeMap<String, f64>> {
    let n = m1.n();
    check_dim(n, m2.n())?;
    check_dim(n, b.x.n())?;
    check_dim(n, b.w.n)?;
    let fail = |what: &str| Err(Error::CertificateMismatch(what.to_string()));
    let mut res = BTreeMap::new();

    let e = linalg::eig(&b.x)?;
    let min_eig = e.min();
    res.insert("psd_min_eig".to_string(), min_eig);
    if min_eig < -1e-9 * (1.0 + b.x.frobenius()) {
        return fail("X is not positive semidefinite");
    }
    let rank = e.rank(linalg::RANK_TOL);
    res.insert("rank".to_string(), rank as f64);
    if rank != 2 {
        return fail("X does not have rank two");
    }
    for (name, m) in [("inner_m1", m1), ("inner_m2", m2)] {
        let v = m.inner(&b.x).abs() / (1.0 + m.frobenius() * b.x.frobenius());
        res.insert(name.to_string(), v);
        if v > 1e-8 {
            return fail("X does not annihilate the constraint matrices");
        }
    }
    let ortho = b.w.orthonormality_error();
    res.insert("w_orthonormality".to_string(), ortho);
    if ortho > 1e-10 || !(2..=3).contains(&b.w.dim()) {
        return fail("reduction subspace is not an orthonormal 2- or 3-frame");
    }
    let range: Vec<Vec<f64>> = e.vectors[..2].to_vec();
    let range_res = range
        .iter()
        .map(|v| norm(&axpy(v, -1.0, &b.w.project(v))))
        .fold(0.0f64, f64::max);
    res.insert("range_in_w".to_string(), range_res);
    if range_res > 1e-8 {
        return fail("range of X leaves the reduction subspace");
    }
    if b.lines.lines.len() > 4 {
        return fail("more than four variety lines");
    }
    let mut worst_line = 0.0f64;
    let mut min_angle = std::f64::consts::FRAC_PI_2;
    let range_space = Subspace::span(n, &range, 1e-12);
    for l in &b.lines.lines {
        if l.len() != n {
            return fail("variety line has the wrong dimension");
        }
        let in_w = norm(&axpy(l, -1.0, &b.w.project(l))) / norm(l).max(1e-300);
        worst_line = worst_line.max(in_w).max(line_residual(m1, m2, l));
        min_angle = min_angle.min(line_angle(l, &range_space.project(l)));
    }
    res.insert("line_variety".to_string(), worst_line);
    res.insert("min_line_angle".to_string(), min_angle);
    if worst_line > LINE_TOL {
        return fail("a listed line is not in the variety of the reduced pair");
    }
    if min_angle <= MIN_ANGLE {
        return fail("a variety line lies in the range of X");
    }
    if b.w.dim() == 2 && !b.lines.lines.is_empty() {
        return fail("two-dimensional reduction with a nonzero variety");
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sym_outer, unit};
    use crate::pencil::default_rng;

    fn diagonal_pair() -> (SymMatrix, SymMatrix) {
        (SymMatrix::diag(&[1.0, -1.0, 0.0]), SymMatrix::diag(&[0.0, 1.0, -1.0]))
    }

    #[test]
    fn diagonal_pair_lines_are_sign_patterns() {
        let (m1, m2) = diagonal_pair();
        let ls = variety_lines_3d(&m1, &m2).unwrap();
        assert!(ls.complete);
        assert_eq!(ls.lines.len(), 4);
        for s in [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [1.0, -1.0, -1.0]] {
            assert!(ls.lines.iter().any(|l| line_angle(l, &s) < 1e-10), "{s:?} missing");
        }
    }

    #[test]
    fn rank_two_pair_lines_are_cross_products() {
        let e = |i| unit(3, i);
        let m1 = sym_outer(&e(0), &e(1));
        let m2 = sym_outer(&axpy(&e(0), 1.0, &e(1)), &e(2));
        let ls = variety_lines_3d(&m1, &m2).unwrap();
        assert!(ls.lines.len() <= 4 && !ls.lines.is_empty());
        // independent oracle: x1 x2 = 0 and (x1 + x2) x3 = 0
        for l in &ls.lines {
            assert!((l[0] * l[1]).abs() < 1e-12);
            assert!(((l[0] + l[1]) * l[2]).abs() < 1e-12);
        }
        for expect in [e(2), e(0), e(1)] {
            assert!(ls.lines.iter().any(|l| line_angle(l, &expect) < 1e-12));
        }
    }

    #[test]
    fn variety_lines_guard() {
        let e = |i| unit(3, i);
        let m1 = sym_outer(&e(0), &e(2));
        let m2 = sym_outer(&e(1), &e(2));
        assert!(matches!(
            variety_lines_3d(&m1, &m2),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn n2_examples() {
        let m1 = SymMatrix::diag(&[1.0, -1.0]);
        let m2 = sym_outer(&unit(2, 0), &unit(2, 1)).scale(2.0);
        let b = witness_n2(&m1, &m2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((&b.x - &SymMatrix::diag(&[h, h])).frobenius() < 1e-12);
        assert!(matches!(
            witness_n2(&m1, &SymMatrix::identity(2)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn n3_diagonal_pair_pinned() {
        let (m1, m2) = diagonal_pair();
        let w = [1.0, 1.0, 2f64.sqrt()];
        let b = witness_n3(&m1, &m2, &mut default_rng(), Some(&w)).unwrap();
        let expected = SymMatrix::outer(&w).add_outer(1.0, &[-1.0, 1.0, 0.0]);
        let s = b.x.inner(&expected) / b.x.inner(&b.x);
        let rel = (&b.x.scale(s) - &expected).frobenius() / expected.frobenius();
        assert!(rel < 1e-8, "relative error {rel}");
    }

    #[test]
    fn n3_random_and_guard() {
        let (m1, m2) = diagonal_pair();
        let b = witness_n3(&m1, &m2, &mut default_rng(), None).unwrap();
        assert!(b.residuals["min_line_angle"] > 1e-6);
        let e = |i| unit(3, i);
        assert!(matches!(
            witness_n3(
                &sym_outer(&e(0), &e(2)),
                &sym_outer(&e(1), &e(2)),
                &mut default_rng(),
                None
            ),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn high_dim_examples() {
        let a = SymMatrix::diag(&[1.0, -1.0, 1.0, -1.0]);
        let b = SymMatrix::diag(&[1.0, 1.0, -1.0, -1.0]);
        let bundle = witness_high_dim(&a, &b, &mut default_rng()).unwrap();
        assert_eq!(bundle.w.dim(), 3);
        assert!(verify_bundle(&a, &b, &bundle).is_ok());

        let e = |i| unit(4, i);
        let m1 = sym_outer(&e(0), &e(1));
        let m2 = sym_outer(&e(0), &e(2)).axpy(-1.0, &SymMatrix::outer(&e(3)));
        let bundle = witness_high_dim(&m1, &m2, &mut default_rng()).unwrap();
        assert!(verify_bundle(&m1, &m2, &bundle).is_ok());

        assert!(matches!(
            witness_high_dim(&SymMatrix::identity(4), &a, &mut default_rng()),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
