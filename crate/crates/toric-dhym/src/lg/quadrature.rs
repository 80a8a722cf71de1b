use std::f64::consts::PI;

use num_complex::Complex64;

use super::model::LgModel;
use super::{PeriodMethod, PeriodResult};
use crate::error::{Error, Result};
use crate::par::{map_range, Exec};

/// Integrand cut-off: exp(−745) is below the smallest positive double.
const CUTOFF: f64 = 745.0;
const T_MAX: f64 = 3.5;
const MAX_LEVEL: u32 = 10;

fn grad_hess(model: &LgModel, logs: &[f64], u: &[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let n = u.len();
    let mut w = 0.0;
    let mut g = vec![0.0; n];
    let mut h = vec![vec![0.0; n]; n];
    for (v, a) in model.exponents.iter().zip(logs) {
        let t = (a + v.iter().zip(u).map(|(&x, y)| x as f64 * y).sum::<f64>()).exp();
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

fn solve_real(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c] == 0.0 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Minimizer of the strictly convex function u ↦ W(e^u).
fn minimize(model: &LgModel, logs: &[f64]) -> Result<Vec<f64>> {
    let n = model.dim;
    let mut u = vec![0.0; n];
    for _ in 0..500 {
        let (w, g, h) = grad_hess(model, logs, &u);
        if g.iter().fold(0.0f64, |a, x| a.max(x.abs())) <= 1e-14 * w {
            return Ok(u);
        }
        let d = solve_real(h, g.iter().map(|x| -x).collect())
            .ok_or_else(|| Error::Numerical("singular Hessian while minimizing W".into()))?;
        let mut s = 1.0;
        loop {
            let cand: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            if model.w_real(&cand, logs) < w || s < 1e-12 {
                u = cand;
                break;
            }
            s *= 0.5;
        }
    }
    let (w, g, _) = grad_hess(model, logs, &u);
    if g.iter().fold(0.0f64, |a, x| a.max(x.abs())) <= 1e-10 * w {
        Ok(u)
    } else {
        Err(Error::Numerical("W has no minimum on the positive torus".into()))
    }
}

/// Bounding box of {W − W* ≤ CUTOFF·z} from a ray scan about the minimizer.
fn bounding_box(model: &LgModel, logs: &[f64], u0: &[f64], w0: f64, z: f64) -> Vec<(f64, f64)> {
    let n = model.dim;
    let dirs: Vec<Vec<f64>> = if n == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..128).map(|k| 2.0 * PI * k as f64 / 128.0).map(|t| vec![t.cos(), t.sin()]).collect()
    };
    let excess = |s: f64, d: &[f64]| {
        let p: Vec<f64> = u0.iter().zip(d).map(|(a, b)| a + s * b).collect();
        model.w_real(&p, logs) - w0 - CUTOFF * z
    };
    let mut bx: Vec<(f64, f64)> = u0.iter().map(|&x| (x, x)).collect();
    for d in &dirs {
        let mut hi = 1.0;
        while excess(hi, d) < 0.0 && hi < 1e4 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if excess(mid, d) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for k in 0..n {
            let p = u0[k] + hi * d[k];
            bx[k].0 = bx[k].0.min(p);
            bx[k].1 = bx[k].1.max(p);
        }
    }
    bx.into_iter().map(|(a, b)| (a - 0.5, b + 0.5)).collect()
}

/// Tanh-sinh nodes and weights on [a, b] with step 2^{−level}.
fn tanh_sinh(a: f64, b: f64, level: u32) -> Vec<(f64, f64)> {
    let h = (0.5f64).powi(level as i32);
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let kmax = (T_MAX / h).ceil() as i64;
    (-kmax..=kmax)
        .map(|k| {
            let t = k as f64 * h;
            let s = 0.5 * PI * t.sinh();
            let w = r * h * 0.5 * PI * t.cosh() / (s.cosh() * s.cosh());
            (c + r * s.tanh(), w)
        })
        .filter(|&(_, w)| w > 0.0)
        .collect()
}

fn integrate(exec: Exec, model: &LgModel, logs: &[f64], bx: &[(f64, f64)], w0: f64, z: f64, level: u32) -> f64 {
    let f = |u: &[f64]| (-(model.w_real(u, logs) - w0) / z).exp();
    let nodes: Vec<Vec<(f64, f64)>> = bx.iter().map(|&(a, b)| tanh_sinh(a, b, level)).collect();
    match model.dim {
        1 => nodes[0].iter().map(|&(x, w)| w * f(&[x])).sum(),
        _ => {
            let rows = map_range(exec, nodes[0].len(), |i| {
                let (x, wx) = nodes[0][i];
                wx * nodes[1].iter().map(|&(y, wy)| wy * f(&[x, y])).sum::<f64>()
            });
            rows.into_iter().sum()
        }
    }
}

/// ∫_{(ℝ_{>0})ⁿ} e^{−W/z} dx₁/x₁ ∧ … ∧ dxₙ/xₙ for real positive coefficients, n ≤ 2.
pub fn positive_cycle_period(model: &LgModel, z: f64) -> Result<PeriodResult> {
    positive_cycle_period_with(Exec::default(), model, z, 1e-13)
}

pub fn positive_cycle_period_with(exec: Exec, model: &LgModel, z: f64, rel_tol: f64) -> Result<PeriodResult> {
    if !(z > 0.0) {
        return Err(Error::Precondition("z must be positive".into()));
    }
    if model.dim == 0 || model.dim > 2 {
        return Err(Error::Unsupported(format!("quadrature is implemented for n <= 2, got {}", model.dim)));
    }
    if !model.has_real_coefficients() {
        return Err(Error::Precondition("non-real coefficients: the positive real cycle needs beta = 0".into()));
    }
    let logs: Vec<f64> = model.log_coeffs.iter().map(|c| c.re).collect();
    let u0 = minimize(model, &logs)?;
    let w0 = model.w_real(&u0, &logs);
    let bx = bounding_box(model, &logs, &u0, w0, z);
    let scale = (-w0 / z).exp();
    let mut prev = integrate(exec, model, &logs, &bx, w0, z, 2);
    for level in 3..=MAX_LEVEL {
        let cur = integrate(exec, model, &logs, &bx, w0, z, level);
        let err = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::Numerical("non-convergent integrand".into()));
        }
        if err <= rel_tol * cur.abs() || level == MAX_LEVEL {
            return Ok(PeriodResult {
                value: Complex64::new(scale * cur, 0.0),
                method: PeriodMethod::Quadrature,
                error_estimate: scale * err,
                truncation: None,
                normalization: 1.0,
                level: Some(level),
            });
        }
        prev = cur;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::preset_fan;
    use crate::lg::NovikovPoint;

    fn bessel_k0(x: f64) -> f64 {
        // K₀(x) = −(ln(x/2) + γ)I₀(x) + Σ_{k≥1} H_k (x²/4)^k/(k!)²
        let y = x * x / 4.0;
        let (mut i0, mut s, mut t, mut h) = (1.0, 0.0, 1.0, 0.0);
        for k in 1..60 {
            t *= y / (k * k) as f64;
            h += 1.0 / k as f64;
            i0 += t;
            s += h * t;
        }
        -((x / 2.0).ln() + crate::chow::EULER_GAMMA) * i0 + s
    }

    #[test]
    fn bessel_oracle() {
        assert!((bessel_k0(0.2) - 1.752_703_855_5).abs() < 1e-9);
        assert!((bessel_k0(0.4) - 1.114_529_134_9).abs() < 1e-9);
    }

    #[test]
    fn p1_periods() {
        let p1 = preset_fan("p1").unwrap();
        for (q, z) in [(0.01, 1.0), (0.04, 1.0), (0.01, 0.5), (0.04, 2.0)] {
            let m = LgModel::at_point(&p1, NovikovPoint::from_generators(&p1, &[q]).unwrap()).unwrap();
            let p = positive_cycle_period(&m, z).unwrap();
            let oracle = 2.0 * bessel_k0(2.0 * f64::sqrt(q) / z);
            assert!((p.value.re - oracle).abs() < 1e-10 * oracle, "{q} {z}: {} vs {oracle}", p.value.re);
            assert!(p.error_estimate < 1e-9);
        }
    }

    #[test]
    fn refuses_complex_coefficients() {
        let p1 = preset_fan("p1").unwrap();
        let pt = NovikovPoint { log_q: vec![Complex64::new(-1.0, 0.5), Complex64::new(0.0, 0.0)] };
        let m = LgModel::at_point(&p1, pt).unwrap();
        assert!(positive_cycle_period(&m, 1.0).is_err());
    }
}
