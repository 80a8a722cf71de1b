use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::LgModel;
use super::{det_complex, solve_complex};
use crate::error::{Error, Result};
use crate::par::{map_range, Exec};

const STARTS: usize = 200;
const MERGE_TOL: f64 = 1e-10;
const ROUNDS: u32 = 6;

/// Laurent polynomial Σ c·x^e in n variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    pub n: usize,
    pub terms: Vec<(Vec<i64>, Complex64)>,
}

impl LaurentPoly {
    pub fn constant(n: usize, c: Complex64) -> Self {
        LaurentPoly { n, terms: vec![(vec![0; n], c)] }
    }

    pub fn monomial(e: Vec<i64>, c: Complex64) -> Self {
        LaurentPoly { n: e.len(), terms: vec![(e, c)] }
    }

    /// Parses sums like "2*x*y^-1 - y + 0.5". Variables are x, y, z, w
    /// or x1..x9.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let err = |m: &str| Error::Parse(format!("laurent polynomial '{s}': {m}"));
        let mut terms = Vec::new();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        // split on +/- that are not part of an exponent
        let mut pieces = Vec::new();
        let mut cur = String::new();
        let mut prev = ' ';
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && prev != '^' && prev != 'e' {
                pieces.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
            prev = ch;
        }
        pieces.push(cur);
        for p in pieces {
            let (sign, body) = match p.strip_prefix('-') {
                Some(b) => (-1.0, b),
                None => (1.0, p.strip_prefix('+').unwrap_or(&p)),
            };
            let mut coeff = sign;
            let mut e = vec![0i64; n];
            for f in body.split('*') {
                if f.is_empty() {
                    return Err(err("empty factor"));
                }
                let (base, pow) = match f.split_once('^') {
                    Some((b, p)) => (b, p.parse::<i64>().map_err(|_| err("bad exponent"))?),
                    None => (f, 1),
                };
                if let Some(i) = var_index(base) {
                    if i >= n {
                        return Err(err(&format!("variable {base} out of range for n = {n}")));
                    }
                    e[i] += pow;
                } else {
                    let c = parse_number(base).ok_or_else(|| err(&format!("bad factor {base}")))?;
                    coeff *= c.powi(pow as i32);
                }
            }
            terms.push((e, Complex64::new(coeff, 0.0)));
        }
        Ok(LaurentPoly { n, terms })
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product::<Complex64>())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        LaurentPoly { n: self.n, terms }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        LaurentPoly { n: self.n, terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect() }
    }
}

fn var_index(s: &str) -> Option<usize> {
    match s {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        "w" => Some(3),
        _ => {
            let d = s.strip_prefix('x')?;
            let i: usize = d.parse().ok()?;
            (1..=9).contains(&i).then(|| i - 1)
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
}

/// Damped Newton on x∂W = 0 in log coordinates from one start.
fn newton(model: &LgModel, mut u: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let norm = |g: &[Complex64]| g.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = model.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
    let (_, mut g, mut h) = model.derivatives(&u);
    for _ in 0..200 {
        let r = norm(&g);
        if r <= 1e-14 * scale {
            return Some(u);
        }
        let d = solve_complex(h.clone(), g.iter().map(|c| -c).collect())?;
        let mut s = 1.0;
        loop {
            let cand: Vec<Complex64> = u.iter().zip(&d).map(|(a, b)| a + b * s).collect();
            let (_, g2, h2) = model.derivatives(&cand);
            let r2 = norm(&g2);
            if r2.is_finite() && (r2 < r || s < 1e-6) {
                u = cand;
                g = g2;
                h = h2;
                break;
            }
            s *= 0.5;
        }
        if u.iter().any(|c| !c.is_finite() || c.re.abs() > 700.0) {
            return None;
        }
    }
    (norm(&g) <= 1e-11 * scale).then_some(u)
}

/// Critical points of W in (ℂ*)ⁿ, as x-coordinates.
pub fn critical_points(model: &LgModel) -> Result<Vec<Vec<Complex64>>> {
    critical_points_with(Exec::default(), model, 7, STARTS)
}

pub fn critical_points_with(exec: Exec, model: &LgModel, seed: u64, starts: usize) -> Result<Vec<Vec<Complex64>>> {
    if model.dim == 0 || model.dim > 2 {
        return Err(Error::Unsupported(format!("critical points are implemented for n <= 2, got {}", model.dim)));
    }
    let n = model.dim;
    let target = newton_polytope_volume(&model.exponents);
    // Typical |log x| sits near the average |log a|; later rounds widen the spread
    // to catch roots pushed far out by small coefficients.
    let base = 1.0 + model.log_coeffs.iter().map(|c| c.norm()).sum::<f64>() / model.log_coeffs.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<Complex64>> = vec![];
    for round in 0..ROUNDS {
        let spread = base * (1u32 << round) as f64;
        let inits: Vec<Vec<Complex64>> = (0..starts)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        Complex64::new(
                            rng.gen_range(-spread..spread),
                            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                        )
                    })
                    .collect()
            })
            .collect();
        found.extend(map_range(exec, starts, |i| newton(model, inits[i].clone())).into_iter().flatten());
        if merge(&found).len() >= target {
            break;
        }
    }
    let pts = merge(&found);
    if pts.len() != model.max_cones {
        return Err(Error::Numerical(format!(
            "found {} critical points ({target} expected from the Newton polytope), but there are {} maximal cones",
            pts.len(),
            model.max_cones
        )));
    }
    Ok(pts)
}

/// Distinct points in x-coordinates, sorted.
fn merge(found: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut pts: Vec<Vec<Complex64>> = Vec::new();
    for u in found {
        let x: Vec<Complex64> = u.iter().map(|c| c.exp()).collect();
        if x.iter().any(|c| !c.is_finite()) {
            continue;
        }
        let dup = pts
            .iter()
            .any(|p| p.iter().zip(&x).all(|(a, b)| (a - b).norm() <= MERGE_TOL * a.norm().max(b.norm()).max(1e-300)));
        if !dup {
            pts.push(x);
        }
    }
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts
}

/// n!·vol of the convex hull of the exponents (n ≤ 2): the number of
/// critical points of a Laurent polynomial with generic coefficients.
pub fn newton_polytope_volume(exps: &[Vec<i64>]) -> usize {
    match exps.first().map(|e| e.len()) {
        Some(1) => {
            let xs = exps.iter().map(|e| e[0]);
            (xs.clone().max().unwrap() - xs.min().unwrap()) as usize
        }
        Some(2) => {
            // monotone chain hull, then shoelace
            let mut p: Vec<(i64, i64)> = exps.iter().map(|e| (e[0], e[1])).collect();
            p.sort();
            p.dedup();
            let cross =
                |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
            let mut hull: Vec<(i64, i64)> = vec![];
            for pass in 0..2 {
                let start = hull.len();
                let it: Box<dyn Iterator<Item = &(i64, i64)>> =
                    if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
                for &q in it {
                    while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0 {
                        hull.pop();
                    }
                    hull.push(q);
                }
                hull.pop();
            }
            let twice: i64 = (0..hull.len())
                .map(|i| {
                    let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
                    a.0 * b.1 - a.1 * b.0
                })
                .sum();
            twice.unsigned_abs() as usize
        }
        _ => 0,
    }
}

/// Σ_p f·g / (Π xᵢ² det ∇²W) over the critical points. At a critical point
/// the denominator equals the determinant of the log-coordinate Hessian.
pub fn residue_pairing(model: &LgModel, f: &LaurentPoly, g: &LaurentPoly) -> Result<Complex64> {
    if f.n != model.dim || g.n != model.dim {
        return Err(Error::Arity { expected: model.dim, got: f.n.min(g.n) });
    }
    let pts = critical_points(model)?;
    let mut total = Complex64::new(0.0, 0.0);
    for x in &pts {
        let u: Vec<Complex64> = x.iter().map(|c| c.ln()).collect();
        let (_, _, h) = model.derivatives(&u);
        let scale = h.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        let det = det_complex(h);
        if det.norm() <= 1e-12 * scale.powi(model.dim as i32) {
            return Err(Error::Numerical(format!("singular Hessian at critical point {x:?}")));
        }
        total += f.eval(x) * g.eval(x) / det;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::preset_fan;
    use crate::lg::NovikovPoint;

    fn model(name: &str, qs: &[f64]) -> LgModel {
        let fan = preset_fan(name).unwrap();
        LgModel::at_point(&fan, NovikovPoint::from_generators(&fan, qs).unwrap()).unwrap()
    }

    #[test]
    fn parse_and_eval() {
        let p = LaurentPoly::parse("2*x*y^-1 - y + 1/2", 2).unwrap();
        let c = |a: f64| Complex64::new(a, 0.0);
        assert_eq!(p.eval(&[c(3.0), c(2.0)]), c(1.5));
        assert!(LaurentPoly::parse("x*q", 2).is_err());
        assert!(LaurentPoly::parse("z", 2).is_err());
        let p = LaurentPoly::parse("x1^2 - 3*x2^-2", 2).unwrap();
        assert_eq!(p.eval(&[c(2.0), c(1.0)]), c(1.0));
    }

    #[test]
    fn polytope_volumes() {
        let vol = |name: &str| newton_polytope_volume(preset_fan(name).unwrap().rays());
        assert_eq!(vol("p1"), 2);
        assert_eq!(vol("p2"), 3);
        assert_eq!(vol("blp_p2"), 4);
        assert_eq!(vol("hirzebruch(2)"), 4);
        // (0,1) falls inside the hull once a ≥ 2, and the area grows with a
        assert_eq!(vol("hirzebruch(3)"), 5);
    }

    #[test]
    fn p1_points() {
        let m = model("p1", &[0.04]);
        let pts = critical_points(&m).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0][0].re + 0.2).abs() < 1e-12 && (pts[1][0].re - 0.2).abs() < 1e-12);
    }

    #[test]
    fn p2_cube_roots() {
        let m = model("p2", &[0.001]);
        let pts = critical_points(&m).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            // x = y with x³ = q
            assert!((p[0] - p[1]).norm() < 1e-12);
            assert!((p[0].powi(3) - Complex64::new(0.001, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn blp_p2_four_points() {
        let m = model("blp_p2", &[0.3, 0.2]);
        assert_eq!(critical_points(&m).unwrap().len(), 4);
    }

    #[test]
    fn p1_residues() {
        let m = model("p1", &[0.01]);
        let one = LaurentPoly::parse("1", 1).unwrap();
        let x = LaurentPoly::parse("x", 1).unwrap();
        assert!(residue_pairing(&m, &one, &one).unwrap().norm() < 1e-10);
        assert!((residue_pairing(&m, &one, &x).unwrap() - 1.0).norm() < 1e-10);
        assert!(residue_pairing(&m, &x, &x).unwrap().norm() < 1e-10);
    }

    #[test]
    fn count_mismatch_is_reported() {
        let m = model("p2", &[0.001]);
        let e = critical_points_with(Exec::Sequential, &m, 1, 0).unwrap_err();
        assert!(e.is_numerical());
    }
}
