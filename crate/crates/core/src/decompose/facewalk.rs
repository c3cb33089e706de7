//! Face walk: rank-one decomposition by moving along directions of the
//! current face.
//!
//! At a feasible `Y` of rank at least two, an oracle returns `x ∈ range(Y)`
//! whose form vanishes on every tight constraint. The line `Y + s·xxᵀ` stays
//! feasible on an interval `[s_lo, s_hi]`. If the interval is unbounded above
//! `x` is peeled, otherwise `Y` splits as a convex combination of the two
//! endpoints, each of which has lower rank or a larger tight set.

use crate::cones::{lorentz, soc_slack, Sense};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, normalized, EigDecomp, Subspace, SymMatrix, RANK_TOL};

/// Tightness threshold relative to `1 + ‖M‖_F ‖Y‖_F`.
const TIGHT_TOL: f64 = 1e-9;
/// Relative size below which an eigenvalue of a restricted form counts as zero.
const ZERO_FORM_TOL: f64 = 1e-12;
/// Second-largest over largest Gram eigenvalue for a numerically one-dimensional span.
const GRAM_DEP_TOL: f64 = 1e-12;

/// How the walk picks its direction.
#[derive(Clone, Debug)]
pub(crate) enum Oracle {
    /// Common zero of the restricted tight forms, which must span at most one dimension.
    Generic,
    /// Any range vector orthogonal to the shared factor.
    Perp(Vec<f64>),
    /// Forms `Sym(abᵀ)`, `Sym(acᵀ)`, `Sym(bcᵀ)` in this order.
    ThreeProducts { a: Vec<f64>, b: Vec<f64>, c: Vec<f64> },
    /// Slice `Xc ∈ Lⁿ`, `⟨L, X⟩ ≥ 0`; the walk carries `L` as its only form.
    Soc { c: Vec<f64> },
}

pub(crate) struct Walk {
    pub mats: Vec<SymMatrix>,
    pub senses: Vec<Sense>,
    pub oracle: Oracle,
}

impl Walk {
    pub fn soc(c: &[f64]) -> Walk {
        Walk {
            mats: vec![lorentz(c.len())],
            senses: vec![Sense::Geq],
            oracle: Oracle::Soc { c: c.to_vec() },
        }
    }

    /// Rank-one factors `v` with `Σ v vᵀ = X`, for feasible `X`.
    pub fn run(&self, x: &SymMatrix) -> Result<Vec<Vec<f64>>> {
        let r = linalg::eig(x)?.rank(RANK_TOL);
        let cap = r + self.mats.len() + 5;
        let mut out = Vec::new();
        self.step(x.clone(), 0, cap, &mut out)?;
        Ok(merge_collinear(out))
    }

    fn step(&self, y: SymMatrix, depth: usize, cap: usize, out: &mut Vec<Vec<f64>>) -> Result<()> {
        let e = linalg::eig(&y)?;
        let thr = e.rank_threshold(RANK_TOL);
        let range: Vec<Vec<f64>> = e
            .values
            .iter()
            .zip(&e.vectors)
            .filter(|(l, _)| **l > thr)
            .map(|(_, v)| v.clone())
            .collect();
        match range.len() {
            0 => return Ok(()),
            1 => {
                out.push(linalg::scaled(&range[0], e.values[0].sqrt()));
                return Ok(());
            }
            _ => {}
        }
        if depth > cap {
            return Err(Error::Internal("face walk exceeded its depth bound".into()));
        }
        let u = Subspace { n: y.n(), basis: range };
        let yf = y.frobenius();
        let g: Vec<f64> = self.mats.iter().map(|m| m.inner(&y)).collect();
        let tight: Vec<bool> = self
            .mats
            .iter()
            .zip(&g)
            .zip(&self.senses)
            .map(|((m, gi), s)| *s == Sense::Eq || gi.abs() <= TIGHT_TOL * (1.0 + m.frobenius() * yf))
            .collect();

        let x = self.direction(&y, &e, &u, &tight)?;
        let t_max = linalg::peel_step_from(&e, &x)?;
        let mut s_lo = -t_max;
        let mut s_hi = f64::INFINITY;
        for ((m, gi), is_tight) in self.mats.iter().zip(&g).zip(&tight) {
            if *is_tight {
                continue;
            }
            let q = m.quad(&x);
            if q.abs() <= ZERO_FORM_TOL * m.frobenius() {
                continue;
            }
            if q > 0.0 {
                s_lo = s_lo.max(-gi / q);
            } else if q < 0.0 {
                s_hi = s_hi.min(gi / -q);
            }
        }
        if let Oracle::Soc { c } = &self.oracle {
            let (lo, hi) = soc_interval(&y.matvec(c), &linalg::scaled(&x, dot(&x, c)), &x, &y, c);
            s_lo = s_lo.max(lo);
            s_hi = s_hi.min(hi);
        }
        let s_lo = s_lo.min(0.0);
        let s_hi = s_hi.max(0.0);
        if s_hi.is_infinite() {
            out.push(linalg::scaled(&x, (-s_lo).sqrt()));
            return self.step(y.add_outer(s_lo, &x), depth + 1, cap, out);
        }
        // both weights and both products directly, since 1 − θ by subtraction
        // loses its digits when one step dwarfs the other
        let width = s_hi - s_lo;
        let (theta, theta_c) = (s_hi / width, -s_lo / width);
        let shift = s_lo * s_hi / width;
        self.step(y.scale(theta).add_outer(shift, &x), depth + 1, cap, out)?;
        self.step(y.scale(theta_c).add_outer(-shift, &x), depth + 1, cap, out)
    }

    fn direction(&self, y: &SymMatrix, e: &EigDecomp, u: &Subspace, tight: &[bool]) -> Result<Vec<f64>> {
        let top = || e.vectors[0].clone();
        let perp = |a: &[f64]| -> Vec<f64> {
            let v = u.intersect_perp(a);
            v.basis.first().cloned().unwrap_or_else(top)
        };
        let x = match &self.oracle {
            Oracle::Generic => {
                let restricted: Vec<SymMatrix> = self
                    .mats
                    .iter()
                    .zip(tight)
                    .filter(|(_, t)| **t)
                    .map(|(m, _)| m.congruence(&u.basis))
                    .collect();
                u.embed(&common_zero(u.dim(), &restricted)?)
            }
            Oracle::Perp(a) => perp(a),
            Oracle::ThreeProducts { a, b, c } => match (tight[0], tight[1], tight[2]) {
                (false, false, false) => top(),
                (true, true, true) => [a, b, c]
                    .iter()
                    .map(|v| y.matvec(v))
                    .find(|w| norm(w) > RANK_TOL * (1.0 + y.frobenius() * norm(a).max(norm(b)).max(norm(c))))
                    .unwrap_or_else(top),
                (true, true, false) | (true, false, false) => perp(a),
                (true, false, true) | (false, false, true) => perp(b),
                (false, true, true) | (false, true, false) => perp(c),
            },
            Oracle::Soc { c } => self.soc_direction(y, u, tight[0], c)?,
        };
        // drop components along eigenvalues under the rank threshold
        normalized(&u.project(&x)).ok_or_else(|| Error::Internal("face walk produced a zero direction".into()))
    }

    fn soc_direction(&self, y: &SymMatrix, u: &Subspace, l_tight: bool, c: &[f64]) -> Result<Vec<f64>> {
        let l = &self.mats[0];
        let v = u.intersect_perp(c);
        if !l_tight {
            return Ok(v.basis.first().cloned().unwrap_or_else(|| u.basis[0].clone()));
        }
        if v.dim() > 0 {
            if let Some(z) = zero_of_form(&l.congruence(&v.basis)) {
                return Ok(v.embed(&z));
            }
        }
        let yc = y.matvec(c);
        let scale = 1.0 + y.frobenius() * norm(c);
        if norm(&yc) > RANK_TOL * scale && soc_slack(&yc) <= TIGHT_TOL * scale {
            return Ok(yc);
        }
        zero_of_form(&l.congruence(&u.basis))
            .map(|z| u.embed(&z))
            .ok_or_else(|| Error::Internal("no Lorentz-null direction in the range".into()))
    }
}

/// A unit vector annihilating a single form, or `None` when the form is definite.
pub(crate) fn zero_of_form(r: &SymMatrix) -> Option<Vec<f64>> {
    let e = linalg::eig(r).ok()?;
    let tol = ZERO_FORM_TOL * (1.0 + e.max_abs());
    let (hi, lo) = (e.max(), e.min());
    let k = e.values.len();
    if let Some(i) = (0..k)
        .filter(|&i| e.values[i].abs() <= tol)
        .min_by(|&i, &j| e.values[i].abs().total_cmp(&e.values[j].abs()))
    {
        return Some(e.vectors[i].clone());
    }
    if hi > 0.0 && lo < 0.0 {
        let z = linalg::axpy(
            &linalg::scaled(&e.vectors[0], (-lo).sqrt()),
            hi.sqrt(),
            &e.vectors[k - 1],
        );
        return normalized(&z);
    }
    None
}

/// Common zero of forms whose span is numerically at most one-dimensional.
fn common_zero(k: usize, forms: &[SymMatrix]) -> Result<Vec<f64>> {
    let any = || linalg::unit(k, 0);
    if forms.is_empty() {
        return Ok(any());
    }
    let gram = SymMatrix::from_fn(forms.len(), |i, j| forms[i].inner(&forms[j]));
    let ge = linalg::eig(&gram)?;
    let top = ge.max();
    if top <= 0.0 {
        return Ok(any());
    }
    if ge.values.len() > 1 && ge.values[1] > GRAM_DEP_TOL * top {
        return Err(Error::Internal(
            "tight forms are independent on the current face".into(),
        ));
    }
    let mut dominant = SymMatrix::zeros(k);
    for (w, f) in ge.vectors[0].iter().zip(forms) {
        dominant = dominant.axpy(*w, f);
    }
    zero_of_form(&dominant).ok_or_else(|| Error::Internal("tight form is definite on the current face".into()))
}

/// Interval of `s` with `Y c + s (x·c) x` in the second-order cone.
fn soc_interval(yc: &[f64], v: &[f64], x: &[f64], y: &SymMatrix, c: &[f64]) -> (f64, f64) {
    let n = yc.len();
    let scale = 1.0 + y.frobenius() * norm(c);
    let whole = (f64::NEG_INFINITY, f64::INFINITY);
    if norm(v) <= 1e-15 * scale {
        return whole;
    }
    let l = lorentz(n);
    let yy = dot(yc, yc);
    // along the ray through Yc the cone condition is a sign condition
    let ray = yy > 0.0 && linalg::line_angle(x, yc) <= 1e-12;
    if ray {
        let kappa = dot(v, yc) / yy;
        return if kappa > 0.0 {
            (-1.0 / kappa, f64::INFINITY)
        } else if kappa < 0.0 {
            (f64::NEG_INFINITY, -1.0 / kappa)
        } else {
            whole
        };
    }
    let a = l.quad(v);
    let b = l.bilinear(yc, v);
    let cc = l.quad(yc);
    let mut roots = Vec::new();
    if a.abs() <= 1e-14 * (l.quad(v).abs() + dot(v, v)) {
        if b != 0.0 {
            roots.push(-cc / (2.0 * b));
        }
    } else {
        let disc = b * b - a * cc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -(b + b.signum() * sq);
            if q != 0.0 {
                roots.push(q / a);
                roots.push(cc / q);
            } else {
                roots.push(-b / a);
            }
        }
    }
    let valid: Vec<f64> = roots
        .into_iter()
        .filter(|s| yc[n - 1] + s * v[n - 1] >= -1e-12 * scale)
        .collect();
    let hi = valid.iter().copied().filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    let lo = valid
        .iter()
        .copied()
        .filter(|s| *s < 0.0)
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Sums atoms along the same line.
pub(crate) fn merge_collinear(atoms: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in atoms {
        let nv = norm(&v);
        if nv == 0.0 {
            continue;
        }
        match out.iter_mut().find(|w| linalg::line_angle(w, &v) <= 1e-9) {
            Some(w) => {
                let nw = norm(w);
                let s = (nw * nw + nv * nv).sqrt() / nw;
                w.iter_mut().for_each(|x| *x *= s);
            }
            None => out.push(v),
        }
    }
    out
}
