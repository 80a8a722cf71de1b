use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::model::NovikovPoint;
use super::{PeriodMethod, PeriodResult};
use crate::charges::ComplexifiedClass;
use crate::chow::{
    combinations, curve_coordinates, divisor_dot_curve, evaluate_top, gamma_class, CohClass, DivisorClass,
};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::fan::Fan;
use crate::par::{map_slice, Exec};

type C = Complex64;

fn to_i64(x: &Q) -> i64 {
    x.to_integer().try_into().expect("intersection number fits in i64")
}

/// Intersection vectors (D_i·g) of the Mori cone generators, for Picard rank ≤ 2.
pub(crate) fn mori_generators(fan: &Fan) -> Result<Vec<Vec<i64>>> {
    let m = fan.num_rays();
    let curves = fan.curves();
    let evec = |cv: &Vec<usize>| -> Vec<i64> {
        (0..m).map(|i| to_i64(&divisor_dot_curve(fan, &DivisorClass::ray(m, i), cv))).collect()
    };
    let coords = |cv: &Vec<usize>| -> Vec<i64> { curve_coordinates(fan, cv).iter().map(to_i64).collect() };
    let primitive = |e: Vec<i64>, c: &[i64]| -> Vec<i64> {
        let g = c.iter().fold(0i64, |a, &x| a.gcd(&x)).max(1);
        e.into_iter().map(|x| x / g).collect()
    };
    match fan.picard_rank() {
        1 => {
            let cv = &curves[0];
            Ok(vec![primitive(evec(cv), &coords(cv))])
        }
        2 => {
            let cs: Vec<Vec<i64>> = curves.iter().map(&coords).collect();
            let cross = |a: &[i64], b: &[i64]| a[0] * b[1] - a[1] * b[0];
            let mut gens = vec![];
            for side in [1i64, -1] {
                let i = (0..cs.len())
                    .find(|&i| cs.iter().all(|w| side * cross(&cs[i], w) >= 0))
                    .ok_or_else(|| Error::Numerical("Mori cone is not strictly convex".into()))?;
                let g = primitive(evec(&curves[i]), &cs[i]);
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
            Ok(gens)
        }
        r => Err(Error::Unsupported(format!("I-function work needs Picard rank <= 2, got {r}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClass {
    /// Multiplicities of the Mori generators.
    pub multi: Vec<u64>,
    /// D_i·d for each ray.
    pub e: Vec<i64>,
    pub degree: u64,
}

/// Nonnegative combinations of the Mori generators of total degree ≤ N,
/// sorted by degree then lexicographically.
pub fn enumerate_curve_classes(fan: &Fan, n_max: u64) -> Result<Vec<CurveClass>> {
    let gens = mori_generators(fan)?;
    let r = gens.len();
    let m = fan.num_rays();
    let mut out = vec![];
    for deg in 0..=n_max {
        // compositions of deg into r parts, lexicographic
        let parts = combinations(deg as usize + r - 1, r - 1);
        let mut level: Vec<Vec<u64>> = parts
            .iter()
            .map(|bars| {
                let mut v = vec![];
                let mut prev: i64 = -1;
                for &b in bars {
                    v.push((b as i64 - prev - 1) as u64);
                    prev = b as i64;
                }
                v.push((deg as i64 + r as i64 - 1 - prev - 1) as u64);
                v
            })
            .collect();
        level.sort();
        for multi in level {
            let e = (0..m).map(|i| multi.iter().zip(&gens).map(|(&a, g)| a as i64 * g[i]).sum()).collect();
            out.push(CurveClass { multi, e, degree: deg });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IFunction {
    pub value: CohClass<C>,
    /// Sum of the degree-N terms, the last partial-sum increment.
    pub last_shell: CohClass<C>,
    pub truncation: u64,
    pub error_estimate: f64,
}

fn norm(c: &CohClass<C>) -> f64 {
    c.terms().values().fold(0.0, |a, x| a.max(x.norm()))
}

/// (D + jz)^{-1} = Σ_k (−D)^k/(jz)^{k+1}
fn inverse_linear(d: &CohClass<C>, jz: C, n: usize) -> CohClass<C> {
    let mut out = CohClass::zero(n);
    let mut pw = CohClass::one(n);
    let mut den = jz;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out = &out + &pw.scale(&(C::new(sign, 0.0) / den));
        pw = &pw * d;
        den *= jz;
    }
    out
}

fn term(fan: &Fan, q: &NovikovPoint, z: C, cc: &CurveClass) -> CohClass<C> {
    let n = fan.dim();
    let mut t = CohClass::constant(n, q.q_pow(&cc.e));
    for (i, &e) in cc.e.iter().enumerate() {
        let d = CohClass::<C>::monomial(n, &[i]);
        if e >= 0 {
            for j in 1..=e {
                t = &t * &inverse_linear(&d, z * j as f64, n);
            }
        } else {
            for j in (e + 1)..=0 {
                t = &t * &(&d + &CohClass::constant(n, z * j as f64));
            }
        }
    }
    t
}

/// I(q, z) = Σ_d q^{d + p/z} Π_i Π_{j≤0}(D_i + jz) / Π_{j≤D_i·d}(D_i + jz), truncated at degree N.
pub fn i_function(fan: &Fan, q: &NovikovPoint, z: C, n_max: u64) -> Result<IFunction> {
    if z.norm() == 0.0 {
        return Err(Error::Precondition("z must be nonzero".into()));
    }
    let n = fan.dim();
    let classes = enumerate_curve_classes(fan, n_max)?;
    let terms = map_slice(Exec::default(), &classes, |cc: &CurveClass| term(fan, q, z, cc));
    let mut shells = vec![CohClass::<C>::zero(n); n_max as usize + 1];
    for (cc, t) in classes.iter().zip(&terms) {
        let s = &mut shells[cc.degree as usize];
        *s = &*s + t;
    }
    let mut sum = CohClass::zero(n);
    for s in &shells {
        sum = &sum + s;
    }
    let p: Vec<C> = q.log_q.iter().map(|c| c / z).collect();
    let pre = CohClass::linear(n, &p).exp_nilpotent();
    let value = &pre * &sum;
    let last = &pre * shells.last().unwrap();
    let err = norm(&last);
    if !err.is_finite() || !norm(&value).is_finite() {
        return Err(Error::Numerical("I-function overflow".into()));
    }
    if n_max >= 2 {
        let prev = norm(&(&pre * &shells[n_max as usize - 1]));
        if err > prev && err > 1e-12 * norm(&value) {
            return Err(Error::Numerical(format!("partial sums not Cauchy at N = {n_max}")));
        }
    }
    Ok(IFunction { value, last_shell: last, truncation: n_max, error_estimate: err })
}

fn gamma_pairing(fan: &Fan, i: &CohClass<C>, z: C, ch: &CohClass<C>) -> C {
    let n = fan.dim();
    let c1: Vec<C> = vec![C::one(); fan.num_rays()];
    let zc1 = CohClass::linear(n, &c1).scale(&z.ln()).exp_nilpotent();
    let a = i.grade_scale(&z);
    let g = gamma_class(fan);
    let chs = ch.grade_scale(&C::new(0.0, 2.0 * PI));
    evaluate_top(fan, &(&(&(&zc1 * &a) * &g) * &chs))
}

/// ∫_X z^{c₁} z^{deg/2} I(q, −z) ∪ Γ̂ ∪ (2πi)^{deg/2} ch(E).
pub fn gamma_lhs(fan: &Fan, q: &NovikovPoint, z: C, e: &CohClass<Q>, n_max: u64) -> Result<PeriodResult> {
    let i = i_function(fan, q, -z, n_max)?;
    let ch = e.map(|x| C::new(crate::exact::q_to_f64(x), 0.0));
    let value = gamma_pairing(fan, &i.value, z, &ch);
    let err = gamma_pairing(fan, &i.last_shell, z, &ch).norm();
    Ok(PeriodResult {
        value,
        method: PeriodMethod::GammaLhs,
        error_estimate: err,
        truncation: Some(n_max as usize),
        normalization: 1.0,
        level: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSweep {
    pub ks: Vec<u64>,
    pub target: C,
    pub rescaled: Vec<C>,
    pub discrepancies: Vec<f64>,
    /// −d log(discrepancy)/d log k, least squares.
    pub rate: f64,
}

/// (2πi)^{−n}k^{−n}·gamma_lhs(q_{kω}, ch(L^k)) against ∫_X e^{−iω}ch(L).
pub fn asymptotic_sweep(
    fan: &Fan,
    c: &ComplexifiedClass,
    l: &DivisorClass,
    z: f64,
    ks: &[u64],
    n_max: u64,
) -> Result<AsymptoticSweep> {
    let n = fan.dim();
    let w = c.omega.to_class::<C>(n).scale(&C::new(c.omega_factor().to_f64(), 0.0));
    let lc = l.to_class::<C>(n);
    let target = evaluate_top(fan, &(&w.scale(&C::new(0.0, -1.0)) + &lc).exp_nilpotent());
    let mut rescaled = vec![];
    let mut disc = vec![];
    for &k in ks {
        let ck = c.clone().with_k(&c.k * Q::from_integer(k.into()))?;
        let q = NovikovPoint::from_class(&ck);
        let e = crate::chow::chern_character(&l.scale(&Q::from_integer(k.into())), n);
        let p = gamma_lhs(fan, &q, C::new(z, 0.0), &e, n_max)?;
        let v = p.value / (C::new(0.0, 2.0 * PI * k as f64)).powu(n as u32);
        disc.push((v - target).norm());
        rescaled.push(v);
    }
    let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let ys: Vec<f64> = disc.iter().map(|d| d.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(AsymptoticSweep { ks: ks.to_vec(), target, rescaled, discrepancies: disc, rate: -sxy / sxx })
}
