//! QCQP post-processing on ROG cones: rounding SDP points to feasible
//! quadratic solutions, rank-two reduction on affine slices, and the
//! perspective hull of a binary on/off set.

use serde::{Deserialize, Serialize};

use crate::classify::{self, RogCertificate};
use crate::cones::ConeSpec;
use crate::decompose::{self, Decomposition};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, SymMatrix, RANK_TOL};

/// Allowed deviation of `⟨B, X⟩` from one.
pub const SLICE_TOL: f64 = 1e-8;
/// Recession objective below this flags an unbounded direction.
pub const RECESSION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcqpInstance {
    pub m0: SymMatrix,
    pub b: SymMatrix,
    pub spec: ConeSpec,
}

impl QcqpInstance {
    /// Instance with slice matrix `b`, or `e₁e₁ᵀ` when `None`.
    pub fn new(m0: SymMatrix, b: Option<SymMatrix>, spec: ConeSpec) -> Result<Self> {
        let n = spec.n;
        check_dim(n, m0.n())?;
        let b = b.unwrap_or_else(|| SymMatrix::outer(&linalg::unit(n, 0)));
        check_dim(n, b.n())?;
        spec.validate()?;
        Ok(QcqpInstance { m0, b, spec })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundedPoint {
    pub weight: f64,
    /// Feasible point with `xᵀBx = 1`.
    pub x: Vec<f64>,
    /// `xᵀM₀x`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundedSolution {
    pub points: Vec<RoundedPoint>,
    /// Part of `X` with zero slice value left after the points.
    pub recession: SymMatrix,
    pub best_value: f64,
    /// Recession atom with negative objective, when `⟨M₀, recession⟩ < 0`.
    pub unbounded_direction: Option<Vec<f64>>,
}

impl RoundedSolution {
    pub fn best_point(&self) -> Option<&RoundedPoint> {
        self.points.iter().min_by(|a, b| a.value.total_cmp(&b.value))
    }
}

fn prepare(inst: &QcqpInstance, x: &SymMatrix, cert: &RogCertificate) -> Result<Decomposition> {
    check_dim(inst.spec.n, x.n())?;
    let slice = inst.b.inner(x);
    if (slice - 1.0).abs() > SLICE_TOL {
        return Err(Error::SliceMismatch { value: slice });
    }
    if !cert.is_rog() {
        return Err(Error::CertificateMismatch(format!(
            "verdict {:?} does not certify ROG",
            cert.verdict
        )));
    }
    classify::verify_certificate(&inst.spec, cert).map_err(|e| Error::CertificateMismatch(e.to_string()))?;
    decompose::decompose(&inst.spec, x, Some(cert))
}

/// Rounds an SDP-feasible `X` with `⟨B, X⟩ = 1` to feasible points `x̂ᵢ` with
/// `x̂ᵢᵀBx̂ᵢ = 1` and weights summing to one.
pub fn sdp_round(inst: &QcqpInstance, x: &SymMatrix, cert: &RogCertificate) -> Result<RoundedSolution> {
    let d = prepare(inst, x, cert)?;
    let mut atoms: Vec<(f64, Vec<f64>)> = d.factors().into_iter().map(|v| (inst.b.quad(&v), v)).collect();
    atoms.sort_by(|a, b| b.0.total_cmp(&a.0));

    let n = x.n();
    let mut points = Vec::new();
    let mut recession = SymMatrix::zeros(n);
    let mut acc = 0.0;
    let mut done = false;
    for (beta, v) in &atoms {
        if done || *beta <= 0.0 {
            recession = recession.add_outer(1.0, v);
            continue;
        }
        // the boundary atom is split so that the weights sum to exactly one
        let mu = if acc + beta >= 1.0 { 1.0 - acc } else { *beta };
        let xh = linalg::scaled(v, 1.0 / beta.sqrt());
        recession = recession.add_outer(1.0 - mu / beta, v);
        points.push(RoundedPoint {
            weight: mu,
            value: inst.m0.quad(&xh),
            x: xh,
        });
        acc += mu;
        done = acc >= 1.0;
    }
    if points.is_empty() {
        return Err(Error::Internal("no atom has positive slice value".into()));
    }
    let best_value = points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let scale = 1.0 + inst.m0.frobenius() * recession.frobenius();
    let unbounded_direction = if inst.m0.inner(&recession) < -RECESSION_TOL * scale {
        let rec_atoms = decompose_psd(&recession)?;
        rec_atoms
            .into_iter()
            .min_by(|a, b| inst.m0.quad(a).total_cmp(&inst.m0.quad(b)))
    } else {
        None
    };
    Ok(RoundedSolution {
        points,
        recession,
        best_value,
        unbounded_direction,
    })
}

fn decompose_psd(x: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let e = linalg::eig(x)?;
    let thr = e.rank_threshold(RANK_TOL);
    Ok(e.values
        .iter()
        .zip(e.vectors)
        .filter(|(l, _)| **l > thr)
        .map(|(l, v)| linalg::scaled(&v, l.sqrt()))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePiece {
    pub weight: f64,
    /// Feasible, rank at most two, `⟨B, matrix⟩ = 1`.
    pub matrix: SymMatrix,
}

/// Writes a slice point as a convex combination of slice points of rank at most two.
pub fn rank2_reduce(inst: &QcqpInstance, x: &SymMatrix, cert: &RogCertificate) -> Result<Vec<SlicePiece>> {
    let d = prepare(inst, x, cert)?;
    let mut atoms = d.factors();
    let mut pieces = Vec::new();
    let mut weight = 1.0;
    let gram = |vs: &[Vec<f64>]| vs.iter().fold(SymMatrix::zeros(x.n()), |m, v| m.add_outer(1.0, v));
    let pos_tol = 1e-12;
    loop {
        if atoms.len() <= 2 {
            pieces.push(SlicePiece {
                weight,
                matrix: gram(&atoms),
            });
            break;
        }
        let betas: Vec<f64> = atoms.iter().map(|v| inst.b.quad(v)).collect();
        if betas.iter().all(|b| *b > pos_tol) {
            for (v, b) in atoms.iter().zip(&betas) {
                pieces.push(SlicePiece {
                    weight: weight * b,
                    matrix: SymMatrix::outer(v).scale(1.0 / b),
                });
            }
            break;
        }
        let i1 = argmax(&betas);
        let i2 = argmin(&betas);
        let (b1, b2) = (betas[i1], betas[i2]);
        // (α₁, α₂) on the path (1,0) → (1,1) → (0,1) with μ = α₁β₁ + α₂β₂
        let (a1, a2, mu) = if b1 < 1.0 {
            (1.0, 0.0, b1)
        } else if b1 + b2 <= 0.5 {
            (1.0, (0.5 - b1) / b2, 0.5)
        } else {
            ((0.5 - b2) / b1, 1.0, 0.5)
        };
        let left = SymMatrix::outer(&atoms[i1])
            .scale(a1)
            .add_outer(a2, &atoms[i2])
            .scale(1.0 / mu);
        pieces.push(SlicePiece {
            weight: weight * mu,
            matrix: left,
        });
        let s = 1.0 / (1.0 - mu).sqrt();
        let mut rest = Vec::new();
        for (i, v) in atoms.iter().enumerate() {
            let keep = if i == i1 {
                1.0 - a1
            } else if i == i2 {
                1.0 - a2
            } else {
                1.0
            };
            if keep > 0.0 {
                rest.push(linalg::scaled(v, keep.sqrt() * s));
            }
        }
        atoms = rest;
        weight *= 1.0 - mu;
    }
    pieces.retain(|p| p.weight > 0.0);
    Ok(pieces)
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap_or(0)
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap_or(0)
}

/// Closed-form perspective hull of `{(y, t) : y₂² ≤ t, (1 − y₁)y₁ = 0, (1 − y₁)y₂ = 0}`:
/// `0 ≤ y₁ ≤ 1`, `y₁t ≥ y₂²`, `t ≥ 0`.
pub fn perspective_hull_member(y1: f64, y2: f64, t: f64, tol: f64) -> bool {
    y1 >= -tol && y1 <= 1.0 + tol && y1 * t - y2 * y2 >= -tol && t >= -tol
}

/// The lifted description `y₁ ≥ y₁²`, `t ≥ y₂²`, `(y₁ − y₁²)(t − y₂²) ≥ (y₂ − y₁y₂)²`.
pub fn perspective_lift_check(y1: f64, y2: f64, t: f64) -> bool {
    perspective_lift_check_tol(y1, y2, t, 0.0)
}

pub fn perspective_lift_check_tol(y1: f64, y2: f64, t: f64, tol: f64) -> bool {
    let a = y1 - y1 * y1;
    let c = t - y2 * y2;
    let off = y2 - y1 * y2;
    a >= -tol && c >= -tol && a * c - off * off >= -tol
}

/// The lifted matrix `[[1, yᵀ], [y, Y]]` with `Y = [[y₁, y₂], [y₂, t]]`.
pub fn perspective_lift(y1: f64, y2: f64, t: f64) -> SymMatrix {
    SymMatrix::from_fn(3, |i, j| {
        let rows = [[1.0, y1, y2], [y1, y1, y2], [y2, y2, t]];
        rows[i][j]
    })
}

/// Slice value `⟨B, X⟩` and objective `⟨M₀, X⟩` of a point.
pub fn evaluate(inst: &QcqpInstance, x: &SymMatrix) -> (f64, f64) {
    (inst.b.inner(x), inst.m0.inner(x))
}

/// `Σμᵢ`, for checks.
pub fn weight_sum(points: &[RoundedPoint]) -> f64 {
    points.iter().map(|p| p.weight).sum()
}

/// Largest `|x̂ᵢᵀBx̂ᵢ − 1|` over the points.
pub fn slice_error(inst: &QcqpInstance, points: &[RoundedPoint]) -> f64 {
    points
        .iter()
        .map(|p| (inst.b.quad(&p.x) - 1.0).abs())
        .fold(0.0, f64::max)
}
