//! Random instance generators shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rog_core::classify::classify_two;
use rog_core::decompose::sampling::{gaussian_sym, gaussian_vector, sample_feasible, wishart};
use rog_core::linalg::sym_outer;
use rog_core::{ConeSpec, Family, RogCertificate, RogRng, Sense, SymMatrix};

pub const FAMILIES: [&str; 8] = [
    "single_geq",
    "single_eq",
    "common_vector",
    "three_products",
    "soc_slice",
    "cond_i_eq",
    "cond_i_geq",
    "cond_ii",
];

pub struct Instance {
    pub spec: ConeSpec,
    pub cert: Option<RogCertificate>,
}

/// Random pair with a mix of rank profiles, planted psd combinations and shared factors.
pub fn random_pair(n: usize, rng: &mut RogRng) -> (SymMatrix, SymMatrix) {
    match rng.random_range(0..4) {
        0 => (gaussian_sym(n, rng), gaussian_sym(n, rng)),
        1 => (signed_low_rank(n, rng), signed_low_rank(n, rng)),
        2 => {
            let p = wishart(n, rng.random_range(1..=n), rng);
            let m1 = gaussian_sym(n, rng);
            let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0));
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (m1.clone(), p.axpy(-a, &m1).scale(sign / b))
        }
        _ => {
            let c = gaussian_vector(n, rng);
            (
                sym_outer(&gaussian_vector(n, rng), &c),
                sym_outer(&gaussian_vector(n, rng), &c),
            )
        }
    }
}

fn signed_low_rank(n: usize, rng: &mut RogRng) -> SymMatrix {
    let r = rng.random_range(1..=n);
    (0..r).fold(SymMatrix::zeros(n), |m, _| {
        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
        m.add_outer(s, &gaussian_vector(n, rng))
    })
}

fn draw(family: &str, n: usize, sense: Sense, rng: &mut RogRng) -> rog_core::Result<Instance> {
    let tagged = |f| ConeSpec::with_family(n, f).map(|spec| Instance { spec, cert: None });
    match family {
        "single_geq" => Ok(Instance {
            spec: ConeSpec::single(gaussian_sym(n, rng), Sense::Geq),
            cert: None,
        }),
        "single_eq" => Ok(Instance {
            spec: ConeSpec::single(gaussian_sym(n, rng), Sense::Eq),
            cert: None,
        }),
        "common_vector" => {
            let k = rng.random_range(1..=3);
            tagged(Family::CommonVector {
                a: gaussian_vector(n, rng),
                bs: (0..k).map(|_| gaussian_vector(n, rng)).collect(),
                sense,
            })
        }
        "three_products" => tagged(Family::ThreeProducts {
            a: gaussian_vector(n, rng),
            b: gaussian_vector(n, rng),
            c: gaussian_vector(n, rng),
            sense,
        }),
        "soc_slice" => tagged(Family::SocSlice {
            c: gaussian_vector(n, rng),
        }),
        "cond_i_eq" | "cond_i_geq" => {
            let s = if family == "cond_i_eq" { Sense::Eq } else { Sense::Geq };
            let p = wishart(n, rng.random_range(0..=n.saturating_sub(2)), rng);
            let m1 = gaussian_sym(n, rng);
            let m2 = &p - &m1;
            let cert = classify_two(&m1, &m2, [s, s], rng)?;
            Ok(Instance {
                spec: ConeSpec::pair(m1, m2, s)?,
                cert: Some(cert),
            })
        }
        _ => {
            let c = gaussian_vector(n, rng);
            let m1 = sym_outer(&gaussian_vector(n, rng), &c);
            let m2 = sym_outer(&gaussian_vector(n, rng), &c);
            let cert = classify_two(&m1, &m2, [sense, sense], rng)?;
            Ok(Instance {
                spec: ConeSpec::pair(m1, m2, sense)?,
                cert: Some(cert),
            })
        }
    }
}

/// A random instance of `family` with a feasible point.
///
/// Draws whose cone is `{0}` are redrawn, since they have nothing to decompose.
/// Three generic products vanish together only on `{0}` in the plane, so that
/// family starts at `n = 3`; use `x.n()` for the dimension.
pub fn family_instance(
    family: &str,
    n: usize,
    sense: Sense,
    rng: &mut RogRng,
) -> rog_core::Result<(Instance, SymMatrix)> {
    let n = if family == "three_products" { n.max(3) } else { n };
    let mut last = None;
    for _ in 0..50 {
        let inst = draw(family, n, sense, rng)?;
        match sample_feasible(&inst.spec, rng) {
            Ok(x) => return Ok((inst, x)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one draw"))
}
