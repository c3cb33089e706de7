//! Polynomial roots as eigenvalues of the companion matrix.
//!
//! The companion matrix is already upper Hessenberg, so after balancing a
//! shifted double-step Francis QR iteration yields all eigenvalues.

// the QR sweeps read and write several rows of `a` per index
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

const RADIX: f64 = 2.0;
const MAX_ITS: usize = 60;

/// All complex roots `(re, im)` of `c[0] xᵈ + c[1] xᵈ⁻¹ + … + c[d]`.
///
/// Leading zero coefficients are dropped; an all-zero polynomial has no roots.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let start = coeffs
        .iter()
        .position(|c| c.abs() > 1e-14 * scale)
        .unwrap_or(coeffs.len());
    let c = &coeffs[start..];
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    // 1-based Hessenberg storage to keep the classic index arithmetic readable
    let mut a = vec![vec![0.0; d + 1]; d + 1];
    for j in 1..=d {
        a[1][j] = -c[j] / c[0];
    }
    for i in 2..=d {
        a[i][i - 1] = 1.0;
    }
    balance(&mut a, d);
    let mut roots = hqr(&mut a, d)?;
    for r in roots.iter_mut() {
        if r.1 == 0.0 {
            r.0 = newton_polish(c, r.0);
        }
    }
    Ok(roots)
}

/// Real roots (imaginary part within `im_tol · max(1, |z|)`), sorted ascending.
pub fn real_roots(coeffs: &[f64], im_tol: f64) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = poly_roots(coeffs)?
        .into_iter()
        .filter(|(re, im)| im.abs() <= im_tol * re.abs().max(1.0))
        .map(|(re, _)| newton_polish(coeffs, re))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn poly_eval(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for ci in c {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

fn newton_polish(c: &[f64], mut x: f64) -> f64 {
    let (mut best_p, _) = poly_eval(c, x);
    for _ in 0..8 {
        let (p, dp) = poly_eval(c, x);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let nx = x - p / dp;
        let (np, _) = poly_eval(c, nx);
        if np.abs() >= best_p.abs() {
            break;
        }
        best_p = np;
        x = nx;
    }
    x
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().skip(1).take(n) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix (1-based, destroyed on output).
fn hqr(a: &mut [Vec<f64>], n: usize) -> Result<Vec<(f64, f64)>> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = a[nn - 1][nn - 1];
            w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITS {
                return Err(Error::Internal("companion QR iteration did not converge".into()));
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                z = a[m][m];
                r = x - z;
                let s0 = y - z;
                p = (r * s0 - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s0;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| (wr[i], wi[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_and_quartic() {
        let r = real_roots(&[1.0, 0.0, -1.0], 1e-9).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);

        // (x-1)(x-2)(x+3)(x-0.5)
        let c = [1.0, -0.5, -7.0, 9.5, -3.0];
        let r = real_roots(&c, 1e-9).unwrap();
        let expect = [-3.0, 0.5, 1.0, 2.0];
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_pairs_are_filtered() {
        // (x²+1)(x-2)
        let r = real_roots(&[1.0, -2.0, 1.0, -2.0], 1e-9).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-13);
        let all = poly_roots(&[1.0, -2.0, 1.0, -2.0]).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn leading_zeros_and_constants() {
        let r = real_roots(&[0.0, 0.0, 2.0, -4.0], 1e-9).unwrap();
        assert_eq!(r, vec![2.0]);
        assert!(poly_roots(&[0.0, 3.0]).unwrap().is_empty());
        assert!(poly_roots(&[0.0, 0.0]).unwrap().is_empty());
    }
}
