//! Random feasible points for property tests and benchmarks.
//!
//! Candidates `AAᵀ` with standard normal `A` are accepted when feasible, up
//! to a retry cap. Cones with equality constraints (or where rejection fails)
//! are sampled by facial reduction, then a center built from common zeros of
//! the forms, perturbed by a random psd matrix projected onto the equality
//! constraints.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::cones::{self, ConeSpec, Family, Sense};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, normalized, Subspace, SymMatrix};
use crate::pencil::RogRng;

pub const MAX_TRIES: usize = 10_000;
const SAMPLE_TOL: f64 = 1e-9;
const CENTER_POINTS_EXTRA: usize = 3;
const ZERO_RESTRICTED: f64 = 1e-10;

pub fn gaussian_vector(n: usize, rng: &mut RogRng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn unit_vector(n: usize, rng: &mut RogRng) -> Vec<f64> {
    loop {
        if let Some(v) = normalized(&gaussian_vector(n, rng)) {
            return v;
        }
    }
}

/// `AAᵀ` for an `n × k` standard normal `A`.
pub fn wishart(n: usize, k: usize, rng: &mut RogRng) -> SymMatrix {
    (0..k).fold(SymMatrix::zeros(n), |m, _| m.add_outer(1.0, &gaussian_vector(n, rng)))
}

/// Random symmetric matrix with independent standard normal entries.
pub fn gaussian_sym(n: usize, rng: &mut RogRng) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Random orthogonal matrix, as columns, from Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut RogRng) -> Vec<Vec<f64>> {
    loop {
        let cols: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vector(n, rng)).collect();
        let s = Subspace::span(n, &cols, 1e-8);
        if s.dim() == n {
            return s.basis;
        }
    }
}

fn feasible(spec: &ConeSpec, x: &SymMatrix) -> Result<bool> {
    Ok(cones::member(spec, x, SAMPLE_TOL)?.feasible)
}

/// A random nonzero feasible point of `spec`.
pub fn sample_feasible(spec: &ConeSpec, rng: &mut RogRng) -> Result<SymMatrix> {
    sample_feasible_rank(spec, spec.n, rng)
}

/// Like [`sample_feasible`], with rejection candidates of rank at most `k`.
pub fn sample_feasible_rank(spec: &ConeSpec, k: usize, rng: &mut RogRng) -> Result<SymMatrix> {
    spec.validate()?;
    let n = spec.n;
    let has_eq = spec.linear_constraints().iter().any(|c| c.sense == Sense::Eq);
    if !has_eq {
        let soc = spec.soc_vector().is_some();
        for i in 0..MAX_TRIES {
            let mut x = wishart(n, k, rng);
            if soc && i % 2 == 1 {
                // tilt toward the cone axis
                let sigma = 1.0 + rng.random::<f64>() * 3.0 * (n as f64).sqrt();
                let mut d = vec![1.0; n];
                d[n - 1] = sigma;
                x = SymMatrix::from_fn(n, |r, c| d[r] * x.get(r, c) * d[c]);
            }
            if feasible(spec, &x)? {
                return Ok(x);
            }
        }
    }
    projected_sample(spec, rng)
}

fn projected_sample(spec: &ConeSpec, rng: &mut RogRng) -> Result<SymMatrix> {
    let n = spec.n;
    let kept = kept_subspace(spec)?;
    let d = kept.dim();
    if d == 0 {
        return Err(Error::SamplingFailed { tries: 0 });
    }
    let pts = center_points(spec, &kept, d + CENTER_POINTS_EXTRA, rng)?;
    if pts.is_empty() {
        return Err(Error::SamplingFailed { tries: MAX_TRIES });
    }
    let center = pts.iter().fold(SymMatrix::zeros(n), |m, p| m.add_outer(1.0, p));
    // project inside the kept subspace so the perturbation stays on the face
    let eq: Vec<SymMatrix> = spec
        .linear_constraints()
        .into_iter()
        .filter(|c| c.sense == Sense::Eq)
        .map(|c| c.matrix.congruence(&kept.basis))
        .collect();
    for _ in 0..100 {
        let z = kept.lift(&project_out(&wishart(d, d, rng), &eq)?);
        let c = center.scale(z.trace().max(1.0) / center.trace());
        let mut t = 1.0;
        while t > 1e-6 {
            let x = c.axpy(t, &z);
            if feasible(spec, &x)? {
                return Ok(x);
            }
            t *= 0.5;
        }
    }
    if feasible(spec, &center)? {
        return Ok(center);
    }
    Err(Error::SamplingFailed { tries: MAX_TRIES })
}

/// Subspace carrying every feasible point, from facial reduction of the equality part.
fn kept_subspace(spec: &ConeSpec) -> Result<Subspace> {
    if spec.family.is_some() {
        return Ok(Subspace::full(spec.n));
    }
    let eq: Vec<_> = spec
        .constraints
        .iter()
        .filter(|c| c.sense == Sense::Eq)
        .cloned()
        .collect();
    if eq.is_empty() {
        return Ok(Subspace::full(spec.n));
    }
    let fr = cones::facial_reduce(&ConeSpec::new(spec.n, eq)?)?;
    Ok(fr.kept)
}

/// Removes the component of `z` in the span of `mats`.
fn project_out(z: &SymMatrix, mats: &[SymMatrix]) -> Result<SymMatrix> {
    if mats.is_empty() {
        return Ok(z.clone());
    }
    let gram = SymMatrix::from_fn(mats.len(), |i, j| mats[i].inner(&mats[j]));
    let rhs: Vec<f64> = mats.iter().map(|m| m.inner(z)).collect();
    let coef = pinv_solve(&gram, &rhs)?;
    Ok(mats.iter().zip(&coef).fold(z.clone(), |acc, (m, c)| acc.axpy(-c, m)))
}

fn pinv_solve(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let e = linalg::eig(a)?;
    let tol = 1e-12 * e.max_abs();
    let mut x = vec![0.0; b.len()];
    for (l, v) in e.values.iter().zip(&e.vectors) {
        if l.abs() > tol {
            x = linalg::axpy(&x, dot(v, b) / l, v);
        }
    }
    Ok(x)
}

/// Feasible rank-one factors used as the sampling center.
fn center_points(spec: &ConeSpec, kept: &Subspace, count: usize, rng: &mut RogRng) -> Result<Vec<Vec<f64>>> {
    let n = spec.n;
    let mut out = Vec::new();
    match &spec.family {
        Some(Family::CommonVector { a, .. }) => {
            let s = Subspace::full(n).intersect_perp(a);
            for _ in 0..count {
                out.push(s.embed(&gaussian_vector(s.dim(), rng)));
            }
        }
        Some(Family::ThreeProducts { a, b, c, .. }) => {
            let pairs = [(a, b), (a, c), (b, c)];
            for i in 0..count {
                let (u, v) = pairs[i % 3];
                let s = Subspace::full(n).intersect_perp(u).intersect_perp(v);
                if s.dim() > 0 {
                    out.push(s.embed(&gaussian_vector(s.dim(), rng)));
                }
            }
        }
        Some(Family::SocSlice { c }) => {
            // xxᵀ is feasible for x in the cone with x·c ≥ 0
            let mut tries = 0;
            while out.len() < count && tries < MAX_TRIES {
                tries += 1;
                let mut x = gaussian_vector(n, rng);
                x[n - 1] = norm(&x[..n - 1]) * (1.0 + rng.random::<f64>());
                if dot(&x, c) >= 0.0 {
                    out.push(x);
                }
            }
        }
        None => {
            // forms that vanish on the kept subspace impose nothing
            let mats: Vec<SymMatrix> = spec
                .constraints
                .iter()
                .map(|c| (c.matrix.congruence(&kept.basis), c.matrix.frobenius()))
                .filter(|(r, s)| r.frobenius() > ZERO_RESTRICTED * s)
                .map(|(r, _)| r)
                .collect();
            let mut tries = 0;
            while out.len() < count && tries < 50 * count {
                tries += 1;
                if let Some(x) = common_zero_point(&mats, kept.dim(), rng) {
                    out.push(kept.embed(&x));
                }
            }
        }
    }
    out.retain(|x| norm(x) > 0.0 && feasible(spec, &SymMatrix::outer(x)).unwrap_or(false));
    Ok(out)
}

/// Gauss–Newton on the unit sphere for `xᵀMⱼx = 0` for every `j`.
///
/// Returns `None` when the iteration stalls at a nonzero residual.
pub fn common_zero_point(mats: &[SymMatrix], d: usize, rng: &mut RogRng) -> Option<Vec<f64>> {
    if d == 0 {
        return None;
    }
    let mut x = unit_vector(d, rng);
    let scales: Vec<f64> = mats.iter().map(|m| m.frobenius().max(1e-300)).collect();
    for _ in 0..100 {
        let f: Vec<f64> = mats.iter().zip(&scales).map(|(m, s)| m.quad(&x) / s).collect();
        if f.iter().all(|v| v.abs() <= 1e-14) {
            return Some(x);
        }
        // tangent rows only: the forms are homogeneous, so the radial part of
        // an unrestricted step just rescales x and is undone by normalization
        let jac: Vec<Vec<f64>> = mats
            .iter()
            .zip(&scales)
            .map(|(m, s)| {
                let g = linalg::scaled(&m.matvec(&x), 2.0 / s);
                linalg::axpy(&g, -dot(&g, &x), &x)
            })
            .collect();
        let jjt = SymMatrix::from_fn(mats.len(), |i, j| dot(&jac[i], &jac[j]));
        let lam = pinv_solve(&jjt, &f).ok()?;
        let mut step = vec![0.0; d];
        for (l, row) in lam.iter().zip(&jac) {
            step = linalg::axpy(&step, *l, row);
        }
        x = normalized(&linalg::axpy(&x, -1.0, &step))?;
    }
    None
}
