//! Intersection ring of a smooth complete toric variety.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, parse_rational, q, q_vec_string, Coeff, Q};
use crate::fan::Fan;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ζ(k) for k = 2..=12.
const ZETA: [f64; 11] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_37,
    1.017_343_061_984_449,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308,
];

pub fn zeta(k: usize) -> f64 {
    assert!((2..=12).contains(&k), "zeta({k}) not tabulated");
    ZETA[k - 2]
}

/// Polynomial in the toric divisors D_i, truncated above degree n.
/// Monomials are sorted multisets of ray indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CohClass<T> {
    dim: usize,
    terms: BTreeMap<Vec<usize>, T>,
}

impl<T: Coeff> CohClass<T> {
    pub fn zero(dim: usize) -> Self {
        CohClass { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        let mut z = Self::zero(dim);
        z.add_term(vec![], c);
        z
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, T::one())
    }

    /// Σ c_i D_i.
    pub fn linear(dim: usize, coeffs: &[T]) -> Self {
        let mut z = Self::zero(dim);
        if dim == 0 {
            return z;
        }
        for (i, c) in coeffs.iter().enumerate() {
            z.add_term(vec![i], c.clone());
        }
        z
    }

    pub fn from_divisor(dim: usize, d: &DivisorClass) -> Self {
        let c: Vec<T> = d.coeffs.iter().map(T::from_q).collect();
        Self::linear(dim, &c)
    }

    /// Π_{i∈σ} D_i, the Poincaré dual of the stratum of σ.
    pub fn monomial(dim: usize, idx: &[usize]) -> Self {
        let mut k = idx.to_vec();
        k.sort_unstable();
        let mut z = Self::zero(dim);
        z.add_term(k, T::one());
        z
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, T> {
        &self.terms
    }

    pub fn add_term(&mut self, mono: Vec<usize>, c: T) {
        if mono.len() > self.dim || c.is_zero() {
            return;
        }
        let e = self.terms.entry(mono).or_insert_with(T::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &[usize]) -> T {
        let mut k = mono.to_vec();
        k.sort_unstable();
        self.terms.get(&k).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coefficient(&[])
    }

    pub fn degree_part(&self, k: usize) -> Self {
        CohClass {
            dim: self.dim,
            terms: self.terms.iter().filter(|(m, _)| m.len() == k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut z = Self::zero(self.dim);
        for (m, v) in &self.terms {
            z.add_term(m.clone(), v.clone() * c.clone());
        }
        z
    }

    /// Multiplies the degree-k part by w^k.
    pub fn grade_scale(&self, w: &T) -> Self {
        let mut pows = vec![T::one()];
        for k in 1..=self.dim {
            pows.push(pows[k - 1].clone() * w.clone());
        }
        let mut z = Self::zero(self.dim);
        for (m, v) in &self.terms {
            z.add_term(m.clone(), v.clone() * pows[m.len()].clone());
        }
        z
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> CohClass<U> {
        let mut z = CohClass::<U>::zero(self.dim);
        for (m, v) in &self.terms {
            z.add_term(m.clone(), f(v));
        }
        z
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut r = Self::one(self.dim);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// exp(x) = Σ_j x^j/j! for x without constant term.
    pub fn exp_nilpotent(&self) -> Self {
        assert!(self.constant_term().is_zero(), "exp of a class with constant term");
        let mut total = Self::one(self.dim);
        let mut term = Self::one(self.dim);
        for j in 1..=self.dim {
            term = (&term * self).scale(&T::from_q(&Q::new(1.into(), (j as i64).into())));
            total = &total + &term;
        }
        total
    }
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v.sort_unstable();
    v
}

impl<T: Coeff> Add for &CohClass<T> {
    type Output = CohClass<T>;
    fn add(self, o: &CohClass<T>) -> CohClass<T> {
        let mut z = self.clone();
        for (m, v) in &o.terms {
            z.add_term(m.clone(), v.clone());
        }
        z
    }
}

impl<T: Coeff> Sub for &CohClass<T> {
    type Output = CohClass<T>;
    fn sub(self, o: &CohClass<T>) -> CohClass<T> {
        let mut z = self.clone();
        for (m, v) in &o.terms {
            z.add_term(m.clone(), -v.clone());
        }
        z
    }
}

impl<T: Coeff> Neg for &CohClass<T> {
    type Output = CohClass<T>;
    fn neg(self) -> CohClass<T> {
        self.map(|v| -v.clone())
    }
}

impl<T: Coeff> Mul for &CohClass<T> {
    type Output = CohClass<T>;
    fn mul(self, o: &CohClass<T>) -> CohClass<T> {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut z = CohClass::zero(self.dim);
        for (ma, va) in &self.terms {
            for (mb, vb) in &o.terms {
                if ma.len() + mb.len() <= self.dim {
                    z.add_term(merge(ma, mb), va.clone() * vb.clone());
                }
            }
        }
        z
    }
}

/// Divisor class Σ c_i D_i with rational coefficients aligned with ray order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorClass {
    #[serde(with = "q_vec_string")]
    pub coeffs: Vec<Q>,
}

impl DivisorClass {
    pub fn new(coeffs: Vec<Q>) -> Self {
        DivisorClass { coeffs }
    }

    pub fn zero(m: usize) -> Self {
        DivisorClass { coeffs: vec![Q::zero(); m] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        DivisorClass { coeffs: v.iter().map(|&x| q(x)).collect() }
    }

    pub fn ray(m: usize, i: usize) -> Self {
        let mut d = Self::zero(m);
        d.coeffs[i] = Q::one();
        d
    }

    /// Combination of the fan's declared basis, e.g. (2, −1) in (h, e).
    pub fn from_basis(fan: &Fan, coords: &[Q]) -> Result<Self> {
        let basis = fan.basis();
        if basis.is_empty() {
            return Err(Error::Precondition("fan declares no named basis".into()));
        }
        if coords.len() != basis.len() {
            return Err(Error::Parse(format!("expected {} basis coefficients, got {}", basis.len(), coords.len())));
        }
        let mut d = Self::zero(fan.num_rays());
        for (c, (_, v)) in coords.iter().zip(basis) {
            for (i, &x) in v.iter().enumerate() {
                d.coeffs[i] += c * q(x);
            }
        }
        Ok(d)
    }

    /// Parses "2,-1" (ray or declared basis, by length) or "2,-1@basis(h,e)".
    pub fn parse(fan: &Fan, s: &str) -> Result<Self> {
        let (nums, names) = match s.split_once('@') {
            Some((a, b)) => {
                let inner = b
                    .trim()
                    .strip_prefix("basis(")
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("bad basis annotation '{b}'")))?;
                (a, Some(inner.split(',').map(|x| x.trim().to_ascii_lowercase()).collect::<Vec<_>>()))
            }
            None => (s, None),
        };
        let vals: Vec<Q> = nums.split(',').map(parse_rational).collect::<Result<_>>()?;
        if let Some(names) = names {
            if names.len() != vals.len() {
                return Err(Error::Parse("basis names and coefficients differ in length".into()));
            }
            let mut d = Self::zero(fan.num_rays());
            for (name, c) in names.iter().zip(&vals) {
                let clean = name.trim_end_matches('\'');
                let v = fan
                    .basis()
                    .iter()
                    .find(|(n, _)| n == clean)
                    .map(|(_, v)| v)
                    .ok_or_else(|| Error::Parse(format!("unknown basis element '{name}'")))?;
                for (i, &x) in v.iter().enumerate() {
                    d.coeffs[i] += c * q(x);
                }
            }
            return Ok(d);
        }
        if vals.len() == fan.num_rays() {
            Ok(DivisorClass::new(vals))
        } else if vals.len() == fan.basis().len() {
            Self::from_basis(fan, &vals)
        } else {
            Err(Error::Parse(format!(
                "{} coefficients fit neither the {} rays nor the declared basis",
                vals.len(),
                fan.num_rays()
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn to_class<T: Coeff>(&self, dim: usize) -> CohClass<T> {
        CohClass::from_divisor(dim, self)
    }

    pub fn render(&self) -> String {
        self.coeffs.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::exact::q_to_f64).collect()
    }
}

fn solve_rational(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut row = r.clone();
            row.push(x.clone());
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let piv = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &piv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Solves a square rational linear system; None when singular.
pub fn solve_linear(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    solve_rational(a, b)
}

fn intersect_cached(fan: &Fan, factors: &[usize]) -> i64 {
    let mut key = factors.to_vec();
    key.sort_unstable();
    if let Some(&v) = fan.cache.read().unwrap().get(&key) {
        return v;
    }
    let v = intersect_raw(fan, &key);
    fan.cache.write().unwrap().insert(key, v);
    v
}

fn intersect_raw(fan: &Fan, key: &[usize]) -> i64 {
    let mut support = key.to_vec();
    support.dedup();
    let Some(ci) = fan.max_cone_containing(&support) else {
        return 0;
    };
    if support.len() == key.len() {
        return 1;
    }
    // repeated index i: D_i = −Σ_{j∉σ} ⟨m,v_j⟩ D_j with ⟨m,v_i⟩ = 1, ⟨m,v_j⟩ = 0 on σ∖{i}
    let i = key.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
    let sigma = &fan.max_cones()[ci];
    let n = fan.dim();
    let a: Vec<Vec<Q>> = sigma.iter().map(|&j| fan.rays()[j].iter().map(|&x| q(x)).collect()).collect();
    let b: Vec<Q> = sigma.iter().map(|&j| if j == i { Q::one() } else { Q::zero() }).collect();
    let m = solve_rational(&a, &b).expect("maximal cone is a basis");
    let pos = key.iter().position(|&x| x == i).unwrap();
    let mut total = 0i64;
    for j in 0..fan.num_rays() {
        if sigma.contains(&j) {
            continue;
        }
        let pairing: Q = (0..n).map(|t| &m[t] * q(fan.rays()[j][t])).sum();
        if pairing.is_zero() {
            continue;
        }
        assert!(pairing.is_integer(), "non-integral dual vector");
        let mut next = key.to_vec();
        next[pos] = j;
        let coef: i64 = (-pairing).to_integer().try_into().unwrap();
        total += coef * intersect_cached(fan, &next);
    }
    total
}

/// ∫_X D_{i1}···D_{in}.
pub fn intersection_number(fan: &Fan, factors: &[usize]) -> Result<Q> {
    if factors.len() != fan.dim() {
        return Err(Error::Arity { expected: fan.dim(), got: factors.len() });
    }
    if let Some(&bad) = factors.iter().find(|&&i| i >= fan.num_rays()) {
        return Err(Error::Precondition(format!("no ray {bad}")));
    }
    Ok(q(intersect_cached(fan, factors)))
}

/// ∫_X c: the degree-n coefficients against intersection numbers.
pub fn evaluate_top<T: Coeff>(fan: &Fan, c: &CohClass<T>) -> T {
    let mut total = T::zero();
    for (m, v) in c.terms() {
        if m.len() == fan.dim() {
            let x = intersect_cached(fan, m);
            if x != 0 {
                total = total + v.clone() * T::from_q(&q(x));
            }
        }
    }
    total
}

/// ∫_X c ∪ PD(σ).
pub fn integrate_over<T: Coeff>(fan: &Fan, c: &CohClass<T>, cone: &[usize]) -> T {
    evaluate_top(fan, &(c * &CohClass::monomial(fan.dim(), cone)))
}

/// D · C for a toric curve C given by its cone of size n − 1.
pub fn divisor_dot_curve(fan: &Fan, d: &DivisorClass, curve: &[usize]) -> Q {
    integrate_over(fan, &d.to_class::<Q>(fan.dim()), curve)
}

/// D · D' on a surface.
pub fn dot(fan: &Fan, a: &DivisorClass, b: &DivisorClass) -> Q {
    let n = fan.dim();
    evaluate_top(fan, &(&a.to_class::<Q>(n) * &b.to_class::<Q>(n)))
}

/// ∫_X D^n.
pub fn top_power(fan: &Fan, d: &DivisorClass) -> Q {
    evaluate_top(fan, &d.to_class::<Q>(fan.dim()).pow(fan.dim()))
}

/// ch(L) = exp(c₁(L)) truncated at degree n.
pub fn chern_character(d: &DivisorClass, n: usize) -> CohClass<Q> {
    d.to_class::<Q>(n).exp_nilpotent()
}

/// Γ̂_X = Π_i exp(−γD_i + Σ_{k≥2} (−1)^k ζ(k)/k D_i^k), float mode.
pub fn gamma_class(fan: &Fan) -> CohClass<Complex64> {
    let n = fan.dim();
    let mut total = CohClass::<Complex64>::one(n);
    for i in 0..fan.num_rays() {
        let d = CohClass::<Complex64>::monomial(n, &[i]);
        let mut x = d.scale(&Complex64::new(-EULER_GAMMA, 0.0));
        let mut dk = d.clone();
        for k in 2..=n {
            dk = &dk * &d;
            let c = if k % 2 == 0 { 1.0 } else { -1.0 } * zeta(k) / k as f64;
            x = &x + &dk.scale(&Complex64::new(c, 0.0));
        }
        total = &total * &x.exp_nilpotent();
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Positivity {
    pub is_kahler: bool,
    pub is_nef: bool,
}

/// Toric Kleiman criterion: ω·C over the torus-invariant curves.
pub fn positivity_cones(fan: &Fan, omega: &DivisorClass) -> Positivity {
    let vals: Vec<Q> = fan.curves().iter().map(|c| divisor_dot_curve(fan, omega, c)).collect();
    Positivity { is_kahler: vals.iter().all(|v| v.is_positive()), is_nef: vals.iter().all(|v| !v.is_negative()) }
}

pub fn anticanonical(fan: &Fan) -> DivisorClass {
    DivisorClass::new(vec![Q::one(); fan.num_rays()])
}

/// −K nef and (−K)ⁿ > 0.
pub fn is_weak_fano(fan: &Fan) -> bool {
    let k = anticanonical(fan);
    positivity_cones(fan, &k).is_nef && top_power(fan, &k).is_positive()
}

/// Intersection row (D_b · C) of a curve against the Pic basis.
pub fn curve_coordinates(fan: &Fan, curve: &[usize]) -> Vec<Q> {
    fan.pic_basis().iter().map(|&b| divisor_dot_curve(fan, &DivisorClass::ray(fan.num_rays(), b), curve)).collect()
}

/// Extremal rays of the nef cone, as divisor classes in the Pic basis.
pub fn nef_generators(fan: &Fan) -> Vec<DivisorClass> {
    let basis = fan.pic_basis();
    let rho = basis.len();
    let rows: Vec<Vec<Q>> = fan.curves().iter().map(|c| curve_coordinates(fan, c)).collect();
    let mut gens: Vec<Vec<Q>> = vec![];
    let mut push = |v: Vec<Q>| {
        // normalize by the first nonzero entry's absolute value
        let Some(p) = v.iter().find(|x| !x.is_zero()) else { return };
        let p = p.abs();
        let v: Vec<Q> = v.iter().map(|x| x / &p).collect();
        if !gens.contains(&v) {
            gens.push(v);
        }
    };
    for subset in combinations(rows.len(), rho.saturating_sub(1)) {
        let sub: Vec<&Vec<Q>> = subset.iter().map(|&i| &rows[i]).collect();
        if let Some(v) = null_vector(&sub, rho) {
            for cand in [v.clone(), v.iter().map(|x| -x.clone()).collect()] {
                let ok = rows.iter().all(|r| {
                    let s: Q = r.iter().zip(&cand).map(|(a, b)| a * b).sum();
                    !s.is_negative()
                });
                if ok {
                    push(cand);
                }
            }
        }
    }
    gens.into_iter()
        .map(|v| {
            let mut d = DivisorClass::zero(fan.num_rays());
            for (c, &b) in v.iter().zip(&basis) {
                d.coeffs[b] = c.clone();
            }
            d
        })
        .collect()
}

/// Sum of the nef generators: an ample class for any projective fan.
pub fn ample_class(fan: &Fan) -> DivisorClass {
    nef_generators(fan).iter().fold(DivisorClass::zero(fan.num_rays()), |a, g| a.add(g))
}

/// k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A nonzero vector orthogonal to the given rows, if their rank is dim − 1.
fn null_vector(rows: &[&Vec<Q>], dim: usize) -> Option<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| (*r).clone()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for j in 0..dim {
            m[r][j] = &m[r][j] / &piv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..dim {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() + 1 != dim {
        return None;
    }
    let free = (0..dim).find(|c| !pivots.contains(c)).unwrap();
    let mut v = vec![Q::zero(); dim];
    v[free] = Q::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    Some(v)
}
