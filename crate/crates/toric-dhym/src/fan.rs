//! Smooth complete toric fans: validation, presets, strata and toric curves.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::gcd_i64;

/// Fan document as read from and written to JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDocument {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Named divisor classes, each given by its toric-divisor coefficients.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<BasisElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub divisor: Vec<i64>,
}

/// A validated smooth complete fan. Cheap to clone; the intersection cache
/// is shared between clones.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    name: Option<String>,
    basis: Vec<(String, Vec<i64>)>,
    pub(crate) cache: Arc<RwLock<HashMap<Vec<usize>, i64>>>,
}

/// Closure of the torus orbit of a nonzero cone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Stratum {
    pub cone: Vec<usize>,
    pub codim: usize,
}

impl Stratum {
    pub fn dim(&self, n: usize) -> usize {
        n - self.codim
    }
}

/// Self-intersection data of a toric surface divisor: v_{i−1} + v_{i+1} = c·v_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceCurve {
    pub ray: usize,
    pub c: i64,
    pub self_intersection: i64,
}

pub fn det(m: &[Vec<i64>]) -> i64 {
    // Bareiss fraction-free elimination
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// λ with Σ λ_i·rays[c_i] = p, for a unimodular cone c (Cramer's rule).
fn cone_coordinates(rays: &[Vec<i64>], c: &[usize], p: &[i64]) -> Vec<i64> {
    let m: Vec<Vec<i64>> = c.iter().map(|&i| rays[i].clone()).collect();
    let d = det(&m);
    (0..c.len())
        .map(|i| {
            let mut mi = m.clone();
            mi[i] = p.to_vec();
            det(&mi) * d
        })
        .collect()
}

/// The cones must cover ℝⁿ once: neighbours lie on opposite sides of their
/// common facet, and an interior point of the first cone lies in no other.
fn check_covering(
    dim: usize,
    rays: &[Vec<i64>],
    cones: &[Vec<usize>],
    facets: &BTreeMap<Vec<usize>, Vec<usize>>,
) -> Result<()> {
    for (f, owners) in facets {
        let apex = |c: &Vec<usize>| *c.iter().find(|i| !f.contains(i)).expect("facet of a simplicial cone");
        let (a, b) = (apex(&cones[owners[0]]), apex(&cones[owners[1]]));
        // a and b are on opposite sides iff b has a negative a-coordinate in the first cone
        let lam = cone_coordinates(rays, &cones[owners[0]], &rays[b]);
        let pos = cones[owners[0]].iter().position(|&i| i == a).unwrap();
        if lam[pos] >= 0 {
            return Err(Error::IncompleteFan(format!(
                "cones {:?} and {:?} overlap across facet {f:?}",
                owners[0], owners[1]
            )));
        }
    }
    // weights 1, N, N², … keep the point off every other cone's boundary for large N
    for n in [7i64, 31, 127, 1021] {
        let p: Vec<i64> =
            (0..dim).map(|j| cones[0].iter().enumerate().map(|(i, &r)| n.pow(i as u32) * rays[r][j]).sum()).collect();
        let lams: Vec<Vec<i64>> = cones.iter().map(|c| cone_coordinates(rays, c, &p)).collect();
        if lams.iter().any(|l| l.iter().all(|&x| x >= 0) && l.contains(&0)) {
            continue;
        }
        let hits = lams.iter().filter(|l| l.iter().all(|&x| x > 0)).count();
        if hits != 1 {
            return Err(Error::IncompleteFan(format!("the cones cover a generic point {hits} times")));
        }
        return Ok(());
    }
    Ok(())
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::InvalidFan("dimension must be positive".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidFan(format!("ray {i} has length {} (dim {dim})", r.len())));
            }
            if r.iter().fold(0, |g, &x| gcd_i64(g, x)) != 1 {
                return Err(Error::NonPrimitiveRay(i));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (ci, c) in max_cones.iter().enumerate() {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != dim {
                return Err(Error::InvalidFan(format!("cone {ci} does not have {dim} distinct rays")));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {ci} references missing ray {bad}")));
            }
            let mat: Vec<Vec<i64>> = s.iter().map(|&i| rays[i].clone()).collect();
            if det(&mat).abs() != 1 {
                return Err(Error::NonSmoothCone(ci));
            }
            cones.push(s);
        }
        let mut seen = BTreeSet::new();
        for (ci, c) in cones.iter().enumerate() {
            if !seen.insert(c.clone()) {
                return Err(Error::InvalidFan(format!("duplicate cone {ci}")));
            }
        }
        for i in 0..rays.len() {
            if !cones.iter().any(|c| c.contains(&i)) {
                return Err(Error::InvalidFan(format!("ray {i} lies in no maximal cone")));
            }
        }
        // each facet lies in exactly two maximal cones
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, c) in cones.iter().enumerate() {
            for skip in 0..dim {
                let f: Vec<usize> = c.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x).collect();
                facets.entry(f).or_default().push(ci);
            }
        }
        for (f, owners) in &facets {
            if owners.len() != 2 {
                return Err(Error::IncompleteFan(format!("facet {:?} lies in {} maximal cone(s)", f, owners.len())));
            }
        }
        // connectedness through shared facets
        let mut reached = vec![false; cones.len()];
        let mut stack = vec![0usize];
        if !cones.is_empty() {
            reached[0] = true;
        }
        while let Some(c) = stack.pop() {
            for owners in facets.values() {
                if owners.contains(&c) {
                    for &o in owners {
                        if !reached[o] {
                            reached[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
        }
        if cones.is_empty() || reached.iter().any(|r| !r) {
            return Err(Error::IncompleteFan("maximal cones are not connected".into()));
        }
        check_covering(dim, &rays, &cones, &facets)?;
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
            name: None,
            basis: Vec::new(),
            cache: Arc::new(RwLock::new(HashMap::new())),
        })
    }

    pub fn from_document(doc: &FanDocument) -> Result<Fan> {
        let mut f = Fan::new(doc.dim, doc.rays.clone(), doc.max_cones.clone())?;
        for b in &doc.basis {
            if b.divisor.len() != f.rays.len() {
                return Err(Error::Parse(format!("basis element '{}' needs {} coefficients", b.name, f.rays.len())));
            }
        }
        f.name = doc.name.clone();
        f.basis = doc.basis.iter().map(|b| (b.name.clone(), b.divisor.clone())).collect();
        Ok(f)
    }

    /// Parses and validates a fan document.
    pub fn load(text: &str) -> Result<Fan> {
        let doc: FanDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Fan::from_document(&doc)
    }

    pub fn to_document(&self) -> FanDocument {
        FanDocument {
            dim: self.dim,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
            name: self.name.clone(),
            basis: self.basis.iter().map(|(n, v)| BasisElement { name: n.clone(), divisor: v.clone() }).collect(),
        }
    }

    fn named(mut self, name: &str, basis: Vec<(&str, Vec<i64>)>) -> Fan {
        self.name = Some(name.to_string());
        self.basis = basis.into_iter().map(|(n, v)| (n.to_string(), v)).collect();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Declared divisor basis (name, ray-coordinate vector), if any.
    pub fn basis(&self) -> &[(String, Vec<i64>)] {
        &self.basis
    }

    pub fn picard_rank(&self) -> usize {
        self.rays.len() - self.dim
    }

    /// Index of the first maximal cone containing all of `s`.
    pub fn max_cone_containing(&self, s: &[usize]) -> Option<usize> {
        self.max_cones.iter().position(|c| s.iter().all(|i| c.contains(i)))
    }

    pub fn is_cone(&self, s: &[usize]) -> bool {
        self.max_cone_containing(s).is_some()
    }

    /// All nonzero cones, sorted by size then lexicographically.
    pub fn cones(&self) -> Vec<Vec<usize>> {
        let mut all = BTreeSet::new();
        for c in &self.max_cones {
            for mask in 1u32..(1 << c.len()) {
                let s: Vec<usize> = (0..c.len()).filter(|j| mask >> j & 1 == 1).map(|j| c[j]).collect();
                all.insert(s);
            }
        }
        let mut v: Vec<Vec<usize>> = all.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        v
    }

    /// One stratum per nonzero cone, sorted by codimension.
    pub fn enumerate_strata(&self) -> Vec<Stratum> {
        self.cones().into_iter().map(|c| Stratum { codim: c.len(), cone: c }).collect()
    }

    /// Torus-invariant curves, as cones of size n − 1.
    pub fn curves(&self) -> Vec<Vec<usize>> {
        if self.dim == 1 {
            // the only curve is X itself, the zero cone
            return vec![vec![]];
        }
        self.cones().into_iter().filter(|c| c.len() + 1 == self.dim).collect()
    }

    /// Rays outside the first maximal cone; their divisors form a Z-basis of Pic.
    pub fn pic_basis(&self) -> Vec<usize> {
        (0..self.rays.len()).filter(|i| !self.max_cones[0].contains(i)).collect()
    }

    /// Cyclic order of the rays of a surface fan by angle.
    pub fn cyclic_order(&self) -> Result<Vec<usize>> {
        if self.dim != 2 {
            return Err(Error::NotSurface(self.dim));
        }
        let mut idx: Vec<usize> = (0..self.rays.len()).collect();
        idx.sort_by(|&a, &b| {
            let ta = (self.rays[a][1] as f64).atan2(self.rays[a][0] as f64);
            let tb = (self.rays[b][1] as f64).atan2(self.rays[b][0] as f64);
            ta.partial_cmp(&tb).unwrap()
        });
        Ok(idx)
    }

    /// For each ray: c with v_{i−1} + v_{i+1} = c·v_i and D_i² = −c.
    pub fn surface_curve_selfintersections(&self) -> Result<Vec<SurfaceCurve>> {
        let order = self.cyclic_order()?;
        let m = order.len();
        let mut out = vec![];
        for (pos, &i) in order.iter().enumerate() {
            let prev = &self.rays[order[(pos + m - 1) % m]];
            let next = &self.rays[order[(pos + 1) % m]];
            let s = [prev[0] + next[0], prev[1] + next[1]];
            let v = &self.rays[i];
            let c = if v[0] != 0 { s[0] / v[0] } else { s[1] / v[1] };
            if s[0] != c * v[0] || s[1] != c * v[1] {
                return Err(Error::InvalidFan(format!("ray {i}: neighbours are not a smooth fan")));
            }
            out.push(SurfaceCurve { ray: i, c, self_intersection: -c });
        }
        out.sort_by_key(|s| s.ray);
        Ok(out)
    }

    /// True when the rays and maximal cones agree with `other` up to relabelling.
    pub fn same_fan(&self, other: &Fan) -> bool {
        if self.dim != other.dim || self.rays.len() != other.rays.len() {
            return false;
        }
        let map: Option<Vec<usize>> = self.rays.iter().map(|r| other.rays.iter().position(|s| s == r)).collect();
        let Some(map) = map else { return false };
        let mine: BTreeSet<Vec<usize>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|&i| map[i]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        let theirs: BTreeSet<Vec<usize>> = other.max_cones.iter().cloned().collect();
        mine == theirs
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn indicator(m: usize, idx: &[usize]) -> Vec<i64> {
    let mut v = vec![0; m];
    for &i in idx {
        v[i] += 1;
    }
    v
}

/// Projective space: rays e_1..e_n and −Σe_i (index n).
pub fn pn(n: usize) -> Result<Fan> {
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i)).collect();
    rays.push(vec![-1; n]);
    let cones = (0..=n).map(|skip| (0..=n).filter(|&j| j != skip).collect()).collect();
    let name = if n == 1 { "p1".to_string() } else { format!("pn({n})") };
    let basis = vec![("h", indicator(n + 1, &[n]))];
    Ok(Fan::new(n, rays, cones)?.named(&name, basis))
}

/// Blow-up of Pⁿ at a torus-fixed point: star subdivision of ⟨e_1..e_n⟩ by
/// (1,..,1). Ray n is −Σe_i (class H), ray n+1 the exceptional divisor E.
pub fn blp_pn(n: usize) -> Result<Fan> {
    if n < 2 {
        return Err(Error::UnknownPreset(format!("blp_pn({n})")));
    }
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i)).collect();
    rays.push(vec![-1; n]);
    rays.push(vec![1; n]);
    let mut cones: Vec<Vec<usize>> = vec![];
    for skip in 0..n {
        // cones of Pⁿ containing −Σe
        cones.push((0..=n).filter(|&j| j != skip).collect());
        // subdivided cones
        let mut c: Vec<usize> = (0..n).filter(|&j| j != skip).collect();
        c.push(n + 1);
        cones.push(c);
    }
    let basis = vec![("h", indicator(n + 2, &[n])), ("e", indicator(n + 2, &[n + 1]))];
    let name = if n == 2 { "blp_p2".to_string() } else { format!("blp_pn({n})") };
    Ok(Fan::new(n, rays, cones)?.named(&name, basis))
}

/// Hirzebruch surface F_a with rays (1,0),(0,1),(−1,a),(0,−1).
pub fn hirzebruch(a: i64) -> Result<Fan> {
    let rays = vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]];
    let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
    let basis = vec![("f", indicator(4, &[0])), ("c", indicator(4, &[1]))];
    Ok(Fan::new(2, rays, cones)?.named(&format!("hirzebruch({a})"), basis))
}

pub fn p1xp1() -> Result<Fan> {
    let rays = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
    let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
    let basis = vec![("f1", indicator(4, &[0])), ("f2", indicator(4, &[1]))];
    Ok(Fan::new(2, rays, cones)?.named("p1xp1", basis))
}

/// Blow-up of P² at two torus-fixed points, the centres of the adjacent
/// cones ⟨(1,0),(0,1)⟩ and ⟨(0,1),(−1,−1)⟩.
pub fn blpq_p2() -> Result<Fan> {
    let rays = vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1]];
    let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0]];
    let basis = vec![("h", indicator(5, &[3, 4])), ("e1", indicator(5, &[1])), ("e2", indicator(5, &[3]))];
    Ok(Fan::new(2, rays, cones)?.named("blpq_p2", basis))
}

fn paren_arg(name: &str, prefix: &str) -> Option<i64> {
    name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
}

/// Named preset: p1, p2, pn(n), p1xp1, hirzebruch(a), blp_p2, blpq_p2, blp_pn(n).
pub fn preset_fan(name: &str) -> Result<Fan> {
    let name = name.trim().to_ascii_lowercase();
    let unknown = || Error::UnknownPreset(name.clone());
    match name.as_str() {
        "p1" => return pn(1),
        "p2" => return pn(2),
        "p1xp1" => return p1xp1(),
        "blp_p2" => return blp_pn(2),
        "blpq_p2" => return blpq_p2(),
        _ => {}
    }
    if let Some(n) = paren_arg(&name, "pn") {
        return if n >= 1 { pn(n as usize) } else { Err(unknown()) };
    }
    if let Some(n) = paren_arg(&name, "blp_pn") {
        return if n >= 2 { blp_pn(n as usize) } else { Err(unknown()) };
    }
    if let Some(a) = paren_arg(&name, "hirzebruch") {
        return if a >= 0 { hirzebruch(a) } else { Err(unknown()) };
    }
    Err(unknown())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2_doc() -> FanDocument {
        FanDocument {
            dim: 2,
            rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            name: None,
            basis: vec![],
        }
    }

    #[test]
    fn load_p2() {
        let text = serde_json::to_string(&p2_doc()).unwrap();
        let f = Fan::load(&text).unwrap();
        assert_eq!(f.num_rays(), 3);
        assert_eq!(f.picard_rank(), 1);
        let b = preset_fan("blp_p2").unwrap();
        let back = Fan::load(&serde_json::to_string(&b.to_document()).unwrap()).unwrap();
        assert_eq!(back.basis(), b.basis());
        assert_eq!(back.name(), Some("blp_p2"));
    }

    #[test]
    fn load_errors() {
        let mut d = p2_doc();
        d.rays[0] = vec![2, 0];
        assert_eq!(Fan::from_document(&d).unwrap_err(), Error::NonPrimitiveRay(0));
        let mut d = p2_doc();
        d.max_cones.remove(1);
        assert!(matches!(Fan::from_document(&d).unwrap_err(), Error::IncompleteFan(_)));
        let mut d = p2_doc();
        d.rays[2] = vec![-1, -2];
        assert_eq!(Fan::from_document(&d).unwrap_err(), Error::NonSmoothCone(2));
        assert!(matches!(Fan::load("{\"dim\": 2}"), Err(Error::Parse(_))));
        // combinatorially complete and unimodular, but two cones overlap
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, 2], vec![1, -1]];
        let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        assert!(matches!(Fan::new(2, rays, cones), Err(Error::IncompleteFan(_))));
        // the same cones wrapped twice around the origin
        let rays = [vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
        let doubled: Vec<Vec<i64>> = rays.iter().chain(rays.iter()).cloned().collect();
        let cones = (0..8).map(|i| vec![i, (i + 1) % 8]).collect();
        assert!(Fan::new(2, doubled, cones).is_err());
    }

    #[test]
    fn presets_shapes() {
        let b = preset_fan("blp_p2").unwrap();
        assert_eq!((b.num_rays(), b.max_cones().len()), (4, 4));
        let p3 = preset_fan("pn(3)").unwrap();
        assert_eq!((p3.num_rays(), p3.max_cones().len(), p3.dim()), (4, 4, 3));
        let b3 = preset_fan("blp_pn(3)").unwrap();
        assert_eq!(b3.num_rays(), 5);
        assert_eq!(b3.max_cones().len(), 6);
        assert!(preset_fan("p7q").is_err());
        assert!(b.same_fan(&preset_fan("BLP_P2").unwrap()));
    }

    #[test]
    fn strata_counts() {
        let p2 = preset_fan("p2").unwrap();
        let s = p2.enumerate_strata();
        assert_eq!(s.len(), 6);
        assert_eq!(s.iter().filter(|x| x.codim == 1).count(), 3);
        let b = preset_fan("blp_p2").unwrap();
        assert_eq!(b.enumerate_strata().len(), 8);
        assert_eq!(preset_fan("p1xp1").unwrap().enumerate_strata().len(), 8);
    }

    #[test]
    fn surface_selfintersections() {
        let si = |name: &str| -> Vec<i64> {
            preset_fan(name)
                .unwrap()
                .surface_curve_selfintersections()
                .unwrap()
                .iter()
                .map(|s| s.self_intersection)
                .collect()
        };
        assert_eq!(si("p2"), vec![1, 1, 1]);
        assert_eq!(si("blp_p2"), vec![0, 0, 1, -1]);
        assert_eq!(si("hirzebruch(2)"), vec![0, -2, 0, 2]);
        assert_eq!(si("blpq_p2"), vec![0, -1, -1, -1, 0]);
        assert!(preset_fan("pn(3)").unwrap().surface_curve_selfintersections().is_err());
    }

    #[test]
    fn determinant() {
        assert_eq!(det(&[vec![1, 2], vec![3, 4]]), -2);
        assert_eq!(det(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]), -1);
        assert_eq!(det(&[vec![1, 1], vec![1, 1]]), 0);
    }
}
