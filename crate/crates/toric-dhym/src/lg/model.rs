use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::solve_complex;
use crate::charges::ComplexifiedClass;
use crate::chow::{divisor_dot_curve, is_weak_fano, solve_linear, DivisorClass};
use crate::error::{Error, Result};
use crate::exact::{q, Surd, Q};
use crate::fan::Fan;

/// A point of the Novikov torus, as c_j with q^d = exp(Σ_j c_j D_j·d).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NovikovPoint {
    pub log_q: Vec<Complex64>,
}

impl NovikovPoint {
    /// c_j = 2π(−k·sqrt(s)·ω_j + i·k·β_j).
    pub fn from_class(c: &ComplexifiedClass) -> Self {
        let w = c.omega_factor().to_f64();
        let k = crate::exact::q_to_f64(&c.k);
        let log_q = c
            .omega
            .coeffs
            .iter()
            .zip(&c.beta.coeffs)
            .map(|(o, b)| {
                Complex64::new(-2.0 * PI * w * crate::exact::q_to_f64(o), 2.0 * PI * k * crate::exact::q_to_f64(b))
            })
            .collect();
        NovikovPoint { log_q }
    }

    /// q_a for each Mori generator g_a, in the order of `enumerate_curve_classes`.
    pub fn from_generators(fan: &Fan, qs: &[f64]) -> Result<Self> {
        let gens = super::ifunc::mori_generators(fan)?;
        if gens.len() != qs.len() {
            return Err(Error::Arity { expected: gens.len(), got: qs.len() });
        }
        if qs.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Precondition("q must be positive".into()));
        }
        let basis = fan.pic_basis();
        let a: Vec<Vec<Complex64>> =
            gens.iter().map(|g| basis.iter().map(|&b| Complex64::new(g[b] as f64, 0.0)).collect()).collect();
        let rhs: Vec<Complex64> = qs.iter().map(|x| Complex64::new(x.ln(), 0.0)).collect();
        let sol = solve_complex(a, rhs).ok_or_else(|| Error::Numerical("singular generator matrix".into()))?;
        let mut log_q = vec![Complex64::zero(); fan.num_rays()];
        for (v, &b) in sol.into_iter().zip(&basis) {
            log_q[b] = v;
        }
        Ok(NovikovPoint { log_q })
    }

    /// q^d for the intersection vector e_j = D_j·d.
    pub fn q_pow(&self, e: &[i64]) -> Complex64 {
        self.log_q.iter().zip(e).map(|(c, &x)| c * x as f64).sum::<Complex64>().exp()
    }

    /// The point for k times the class.
    pub fn scaled(&self, k: f64) -> Self {
        NovikovPoint { log_q: self.log_q.iter().map(|c| c * k).collect() }
    }

    pub fn is_real(&self) -> bool {
        self.log_q.iter().all(|c| c.im == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LgModel {
    pub dim: usize,
    pub exponents: Vec<Vec<i64>>,
    pub log_coeffs: Vec<Complex64>,
    /// (Re, Im) of log aᵢ / 2π, exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_args_over_2pi: Option<Vec<(Surd, Surd)>>,
    /// (Re, Im) of c_j / 2π before gauge fixing, exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_over_2pi: Option<Vec<(Surd, Surd)>>,
    /// Rays whose coefficients are fixed to 1.
    pub gauge: Vec<usize>,
    pub novikov: NovikovPoint,
    pub max_cones: usize,
    pub warnings: Vec<String>,
}

impl LgModel {
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.log_coeffs.iter().map(|c| c.exp()).collect()
    }

    /// W at x = e^u.
    pub fn w_log(&self, u: &[Complex64]) -> Complex64 {
        self.exponents.iter().zip(&self.log_coeffs).map(|(v, a)| (a + dotc(v, u)).exp()).sum()
    }

    /// W, x∂W and the log-coordinate Hessian at x = e^u.
    pub fn derivatives(&self, u: &[Complex64]) -> (Complex64, Vec<Complex64>, Vec<Vec<Complex64>>) {
        let n = self.dim;
        let mut w = Complex64::zero();
        let mut g = vec![Complex64::zero(); n];
        let mut h = vec![vec![Complex64::zero(); n]; n];
        for (v, a) in self.exponents.iter().zip(&self.log_coeffs) {
            let t = (a + dotc(v, u)).exp();
            w += t;
            for k in 0..n {
                g[k] += t * v[k] as f64;
                for l in 0..n {
                    h[k][l] += t * (v[k] * v[l]) as f64;
                }
            }
        }
        (w, g, h)
    }

    /// W on the real positive torus; requires real coefficients.
    pub fn w_real(&self, u: &[f64], real_logs: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(real_logs)
            .map(|(v, a)| (a + v.iter().zip(u).map(|(&x, y)| x as f64 * y).sum::<f64>()).exp())
            .sum()
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.log_coeffs.iter().all(|c| c.im.abs() < 1e-12)
    }
}

fn dotc(v: &[i64], u: &[Complex64]) -> Complex64 {
    v.iter().zip(u).map(|(&x, y)| y * x as f64).sum()
}

/// Lexicographically first maximal cone; on Pⁿ this gives W = x₁ + … + xₙ + q/(x₁⋯xₙ).
fn gauge_cone(fan: &Fan) -> Vec<usize> {
    fan.max_cones()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort();
            c
        })
        .min()
        .expect("fan has a maximal cone")
}

/// Gauge: log aᵢ = c_i + ⟨m, vᵢ⟩ with m chosen so log a = 0 on the gauge cone.
fn gauge_fix(fan: &Fan, vals: &[Q]) -> Result<Vec<Q>> {
    let sigma = &gauge_cone(fan);
    let a: Vec<Vec<Q>> = sigma.iter().map(|&j| fan.rays()[j].iter().map(|&x| q(x)).collect()).collect();
    let b: Vec<Q> = sigma.iter().map(|&j| -vals[j].clone()).collect();
    let m = solve_linear(&a, &b).ok_or_else(|| Error::Precondition("rank-deficient gauge system".into()))?;
    Ok(fan.rays().iter().zip(vals).map(|(v, c)| c + v.iter().zip(&m).map(|(&x, y)| q(x) * y).sum::<Q>()).collect())
}

fn model_from(fan: &Fan, novikov: NovikovPoint) -> Result<LgModel> {
    let sigma = gauge_cone(fan);
    let n = fan.dim();
    let a: Vec<Vec<Complex64>> =
        sigma.iter().map(|&j| fan.rays()[j].iter().map(|&x| Complex64::new(x as f64, 0.0)).collect()).collect();
    let b: Vec<Complex64> = sigma.iter().map(|&j| -novikov.log_q[j]).collect();
    let m = solve_complex(a, b).ok_or_else(|| Error::Precondition("rank-deficient gauge system".into()))?;
    let mut log_coeffs: Vec<Complex64> =
        fan.rays().iter().zip(&novikov.log_q).map(|(v, c)| c + dotc(v, &m[..n])).collect();
    for &j in &sigma {
        log_coeffs[j] = Complex64::zero();
    }
    let mut warnings = vec![];
    if !is_weak_fano(fan) {
        warnings.push("fan is not weak Fano; the potential is used without mirror-map correction".into());
    } else if !crate::chow::positivity_cones(fan, &crate::chow::anticanonical(fan)).is_kahler {
        warnings.push("weak Fano but not Fano; trivial mirror map assumed".into());
    }
    Ok(LgModel {
        dim: n,
        exponents: fan.rays().to_vec(),
        log_coeffs,
        log_args_over_2pi: None,
        class_over_2pi: None,
        gauge: sigma,
        novikov,
        max_cones: fan.max_cones().len(),
        warnings,
    })
}

/// W = Σ aᵢ x^{vᵢ} with Π aᵢ^{dᵢ} = exp(−2π∫_d kω + 2πi∫_d kβ) for every relation.
pub fn build_lg(fan: &Fan, c: &ComplexifiedClass) -> Result<LgModel> {
    let mut model = model_from(fan, NovikovPoint::from_class(c))?;
    let rw = gauge_fix(fan, &c.omega.coeffs)?;
    let rb = gauge_fix(fan, &c.beta.coeffs)?;
    let f = c.omega_factor();
    let k = c.k.clone();
    model.log_args_over_2pi = Some(rw.iter().zip(&rb).map(|(w, b)| (-f.scale(w), Surd::rational(&k * b))).collect());
    model.class_over_2pi =
        Some(c.omega.coeffs.iter().zip(&c.beta.coeffs).map(|(w, b)| (-f.scale(w), Surd::rational(&k * b))).collect());
    Ok(model)
}

impl LgModel {
    /// Model at an arbitrary Novikov point (float log-arguments only).
    pub fn at_point(fan: &Fan, point: NovikovPoint) -> Result<Self> {
        if point.log_q.len() != fan.num_rays() {
            return Err(Error::Arity { expected: fan.num_rays(), got: point.log_q.len() });
        }
        model_from(fan, point)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relations: usize,
    pub max_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

/// Π aᵢ^{dᵢ} against q^d for the relations dᵢ = Dᵢ·C of all toric curves C.
pub fn check_relations(fan: &Fan, model: &LgModel) -> RelationCheck {
    let m = fan.num_rays();
    let mut max_defect: f64 = 0.0;
    let mut exact = model.log_args_over_2pi.as_ref().map(|_| true);
    let curves = fan.curves();
    for cv in &curves {
        let d: Vec<i64> = (0..m)
            .map(|i| {
                let x = divisor_dot_curve(fan, &DivisorClass::ray(m, i), cv);
                x.to_integer().try_into().unwrap_or(0)
            })
            .collect();
        let lhs: Complex64 = d.iter().zip(&model.log_coeffs).map(|(&x, a)| a * x as f64).sum();
        let rhs: Complex64 = d.iter().zip(&model.novikov.log_q).map(|(&x, c)| c * x as f64).sum();
        // compare up to 2πi·ℤ
        let diff = lhs - rhs;
        let im = diff.im - (2.0 * PI) * (diff.im / (2.0 * PI)).round();
        max_defect = max_defect.max(diff.re.abs()).max(im.abs());
        if let (Some(args), Some(cls), Some(ok)) = (&model.log_args_over_2pi, &model.class_over_2pi, exact.as_mut()) {
            let sum = |v: &[(Surd, Surd)], pick: fn(&(Surd, Surd)) -> &Surd| {
                v.iter().zip(&d).fold(Surd::zero(), |acc, (p, &x)| acc + pick(p).scale(&q(x)))
            };
            *ok &= sum(args, |p| &p.0) == sum(cls, |p| &p.0) && sum(args, |p| &p.1) == sum(cls, |p| &p.1);
        }
    }
    RelationCheck { relations: curves.len(), max_defect, exact }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::preset_fan;

    #[test]
    fn p1_potential() {
        let f = preset_fan("p1").unwrap();
        let t = 0.7;
        let p = NovikovPoint::from_generators(&f, &[(-2.0 * PI * t).exp()]).unwrap();
        let m = LgModel::at_point(&f, p).unwrap();
        let a = m.coefficients();
        // rays e and −e; gauge on the first cone fixes one coefficient to 1
        let prod = a[0] * a[1];
        assert!((prod.re - (-2.0 * PI * t).exp()).abs() < 1e-15);
        assert!(a.iter().any(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn exact_relations_hold() {
        for name in ["p2", "blp_p2", "p1xp1", "hirzebruch(2)", "blpq_p2", "pn(3)"] {
            let f = preset_fan(name).unwrap();
            let w = crate::chow::ample_class(&f);
            let c = ComplexifiedClass::kahler(&f, w.clone()).unwrap();
            let c = ComplexifiedClass { beta: DivisorClass::ray(f.num_rays(), 0), ..c };
            let m = build_lg(&f, &c).unwrap();
            let r = check_relations(&f, &m);
            assert_eq!(r.exact, Some(true), "{name}");
            assert!(r.max_defect < 1e-12, "{name}");
            assert_eq!(m.log_coeffs.iter().filter(|c| c.norm() == 0.0).count(), f.dim());
        }
    }

    #[test]
    fn blp_p2_two_relations() {
        let f = preset_fan("blp_p2").unwrap();
        let p = NovikovPoint::from_generators(&f, &[0.3, 0.05]).unwrap();
        let m = LgModel::at_point(&f, p).unwrap();
        assert!(check_relations(&f, &m).max_defect < 1e-12);
        assert!(m.warnings.is_empty());
        let f2 = preset_fan("hirzebruch(2)").unwrap();
        let p = NovikovPoint::from_generators(&f2, &[0.3, 0.05]).unwrap();
        assert_eq!(LgModel::at_point(&f2, p).unwrap().warnings.len(), 1);
    }
}
