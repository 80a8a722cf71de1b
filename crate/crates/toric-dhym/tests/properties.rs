#![allow(clippy::needless_range_loop)]

mod common;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toric_dhym::bridgeland::heart_membership;
use toric_dhym::charges::{
    dhym_nakai_moishezon, negative_dhym_nakai_moishezon, topological_angles, ComplexifiedClass, Tolerance,
};
use toric_dhym::chow::{
    ample_class, chern_character, dot, evaluate_top, gamma_class, intersection_number, CohClass, EULER_GAMMA,
};
use toric_dhym::exact::{q, Surd};
use toric_dhym::lg::{build_lg, check_relations, residue_pairing, LaurentPoly, LgModel, NovikovPoint};
use toric_dhym::minangle::minimal_angle;
use toric_dhym::{preset_fan, DivisorClass, Fan, Q};

use common::*;

const PRESETS: [&str; 9] =
    ["p1", "p2", "p1xp1", "blp_p2", "blpq_p2", "hirzebruch(2)", "hirzebruch(3)", "pn(3)", "blp_pn(3)"];

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// Independent validity oracle: primitive rays, unimodular maximal cones,
/// and random directions each lying in exactly one maximal cone.
fn valid_smooth_complete(dim: usize, rays: &[Vec<i64>], cones: &[Vec<usize>]) -> bool {
    use rand::Rng;
    let gcd = |v: &[i64]| v.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
    if rays.iter().any(|v| gcd(v) != 1) {
        return false;
    }
    if !cones.iter().all(|c| {
        let m: Vec<Vec<i64>> = c.iter().map(|&i| rays[i].clone()).collect();
        toric_dhym::fan::det(&m).abs() == 1
    }) {
        return false;
    }
    // λ solving Σ λ_i r_i = p by Gaussian elimination on the transposed system
    let coords = |c: &[usize], p: &[f64]| -> Vec<f64> {
        let mut a: Vec<Vec<f64>> =
            (0..dim).map(|j| c.iter().map(|&i| rays[i][j] as f64).chain([p[j]]).collect()).collect();
        for k in 0..dim {
            let piv = (k..dim).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap();
            a.swap(k, piv);
            for r in 0..dim {
                if r != k {
                    let f = a[r][k] / a[k][k];
                    for col in k..=dim {
                        a[r][col] -= f * a[k][col];
                    }
                }
            }
        }
        (0..dim).map(|k| a[k][dim] / a[k][k]).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..300).all(|_| {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        cones.iter().filter(|c| coords(c, &p).iter().all(|&x| x > 1e-12)).count() == 1
    })
}

#[test]
fn single_entry_mutations_are_classified_correctly() {
    let (mut rejected, mut total) = (0, 0);
    for name in PRESETS {
        let f = preset_fan(name).unwrap();
        for i in 0..f.num_rays() {
            for j in 0..f.dim() {
                let mut rays = f.rays().to_vec();
                rays[i][j] += 1;
                let accepted = Fan::new(f.dim(), rays.clone(), f.max_cones().to_vec()).is_ok();
                assert_eq!(accepted, valid_smooth_complete(f.dim(), &rays, f.max_cones()), "{name} ray {i} entry {j}");
                total += 1;
                rejected += usize::from(!accepted);
            }
        }
    }
    // some mutations give another smooth complete fan: p1xp1 with (1,0) → (1,1) is F₁
    assert!(rejected > total / 2);
}

#[test]
fn strata_and_euler_relation() {
    for name in PRESETS {
        let f = preset_fan(name).unwrap();
        assert_eq!(f.enumerate_strata().len(), f.cones().len(), "{name}");
        if f.dim() == 2 {
            let m = f.num_rays() as i64;
            assert_eq!(f.max_cones().len() as i64, m, "{name}");
            let curves = f.surface_curve_selfintersections().unwrap();
            assert_eq!(curves.iter().map(|c| c.c).sum::<i64>(), 3 * m - 12, "{name}");
            assert_eq!(curves.iter().map(|c| c.self_intersection).sum::<i64>(), 12 - 3 * m, "{name}");
        }
    }
}

#[test]
fn gamma_degree_one_is_minus_euler_gamma_times_anticanonical() {
    for name in ["p1", "p2", "blp_p2", "pn(3)"] {
        let f = preset_fan(name).unwrap();
        let g = gamma_class(&f).degree_part(1);
        for i in 0..f.num_rays() {
            let c = g.coefficient(&[i]);
            assert!((c - Complex64::new(-EULER_GAMMA, 0.0)).norm() < 1e-15, "{name} D{i}");
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn intersection_numbers_are_symmetric(p in 0usize..9, picks in prop::collection::vec(0usize..16, 3), seed in any::<u64>()) {
        let f = preset_fan(PRESETS[p]).unwrap();
        let n = f.dim();
        let m = f.num_rays();
        let mut factors: Vec<usize> = picks.iter().cycle().take(n).map(|&i| i % m).collect();
        let base = intersection_number(&f, &factors).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::seq::SliceRandom;
        factors.shuffle(&mut rng);
        prop_assert_eq!(intersection_number(&f, &factors).unwrap(), base);
    }

    #[test]
    fn linear_relations_vanish(p in 0usize..9, mv in prop::collection::vec(-4i64..=4, 3), picks in prop::collection::vec(0usize..16, 3)) {
        let f = preset_fan(PRESETS[p]).unwrap();
        let n = f.dim();
        let rel = DivisorClass::new(f.rays().iter().map(|v| q(v.iter().zip(&mv).map(|(a, b)| a * b).sum())).collect());
        let mono: Vec<usize> = picks.iter().take(n - 1).map(|&i| i % f.num_rays()).collect();
        let c = &rel.to_class::<Q>(n) * &CohClass::monomial(n, &mono);
        prop_assert!(evaluate_top(&f, &c).is_zero());
    }

    #[test]
    fn chern_character_is_multiplicative(p in 0usize..9, seed in any::<u64>()) {
        let f = preset_fan(PRESETS[p]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = f.dim();
        let a = DivisorClass::new((0..f.num_rays()).map(|_| rand_q(&mut rng, -4, 4, 3)).collect());
        let b = DivisorClass::new((0..f.num_rays()).map(|_| rand_q(&mut rng, -4, 4, 3)).collect());
        let lhs = &chern_character(&a, n) * &chern_character(&b, n);
        let rhs = chern_character(&a.add(&b), n);
        for d in 0..=n {
            prop_assert_eq!(lhs.degree_part(d), rhs.degree_part(d));
        }
    }

    #[test]
    fn dhym_verdicts_scale_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, w, a) = rand_surface_instance(&mut rng);
        let c = ComplexifiedClass::kahler(&f, w).unwrap();
        if let Ok(r1) = dhym_nakai_moishezon(&f, &c, &a, Tolerance::Exact) {
            for k in [2i64, 7] {
                let rk = dhym_nakai_moishezon(&f, &c.clone().with_k(q(k)).unwrap(), &a, Tolerance::Exact).unwrap();
                prop_assert_eq!(rk.verdicts(), r1.verdicts());
                prop_assert_eq!(rk.generic, r1.generic);
            }
        }
    }

    #[test]
    fn conjugate_form_gives_same_verdicts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, w, a) = rand_surface_instance(&mut rng);
        let c = ComplexifiedClass::kahler(&f, w).unwrap();
        if let Ok(r) = dhym_nakai_moishezon(&f, &c, &a, Tolerance::Exact) {
            let neg = negative_dhym_nakai_moishezon(&f, &c, &a, Tolerance::Exact).unwrap();
            prop_assert_eq!(neg.verdicts(), r.verdicts());
        }
    }

    #[test]
    fn surface_cot_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, w, a) = rand_surface_instance(&mut rng);
        let c = ComplexifiedClass::kahler(&f, w.clone()).unwrap();
        let aw = dot(&f, &a, &w);
        if let Ok(ang) = topological_angles(&f, &c, &a) {
            if !aw.is_zero() {
                let expect = (dot(&f, &a, &a) - dot(&f, &w, &w)) / (q(2) * aw);
                prop_assert_eq!(ang.cot_varphi, Some(Surd::rational(expect)));
            }
        }
    }

    #[test]
    fn minimal_angle_bounds_and_scaling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, w, a) = rand_surface_instance(&mut rng);
        prop_assume!(dot(&f, &w, &a).is_positive());
        let r = minimal_angle(&f, &w, &a).unwrap();
        // certificate: no sampled feasible point beats the optimum
        prop_assert!(r.sample_max <= r.cot_theta_min + 1e-9);
        prop_assert!(r.cot_theta_min >= toric_dhym::exact::q_to_f64(&r.cot_phi) - 1e-12);
        let r3 = minimal_angle(&f, &w.scale(&q(3)), &a.scale(&q(3))).unwrap();
        prop_assert!((r3.cot_theta_min - r.cot_theta_min).abs() < 1e-9);
        for (x, y) in r.d_star.iter().zip(&r3.d_star) {
            prop_assert!((3.0 * x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn lg_relations_hold_exactly(p in 0usize..9, seed in any::<u64>()) {
        let f = preset_fan(PRESETS[p]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = rand_kahler(&mut rng, &f);
        let beta = DivisorClass::new((0..f.num_rays()).map(|_| rand_q(&mut rng, -3, 3, 4)).collect());
        let c = ComplexifiedClass::new(&f, w, beta, q(1)).unwrap();
        let m = build_lg(&f, &c).unwrap();
        let r = check_relations(&f, &m);
        prop_assert_eq!(r.exact, Some(true));
        prop_assert!(r.max_defect < 1e-9);
    }

    #[test]
    fn line_bundle_is_in_exactly_one_heart_position(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, w, a) = rand_surface_instance(&mut rng);
        let c = ComplexifiedClass::kahler(&f, w).unwrap();
        let ch = chern_character(&a, 2);
        let m0 = heart_membership(&f, &c, &ch, 0).unwrap().member;
        let m1 = heart_membership(&f, &c, &ch, 1).unwrap().member;
        prop_assert!(!(m0 && m1));
    }
}

fn rand_laurent(rng: &mut ChaCha8Rng, n: usize) -> LaurentPoly {
    use rand::Rng;
    let terms = (0..rng.gen_range(1..4))
        .map(|_| {
            let e: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            (e, Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        })
        .collect();
    LaurentPoly { n, terms }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn residue_pairing_symmetric_bilinear(p in 0usize..4, seed in any::<u64>()) {
        let name = ["p1", "p2", "blp_p2", "p1xp1"][p];
        let fan = preset_fan(name).unwrap();
        let qs: Vec<f64> = (0..fan.picard_rank()).map(|i| 0.05 + 0.1 * i as f64).collect();
        let m = LgModel::at_point(&fan, NovikovPoint::from_generators(&fan, &qs).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (rand_laurent(&mut rng, fan.dim()), rand_laurent(&mut rng, fan.dim()), rand_laurent(&mut rng, fan.dim()));
        let s = Complex64::new(0.7, -1.3);
        let kfg = residue_pairing(&m, &f, &g).unwrap();
        let kgf = residue_pairing(&m, &g, &f).unwrap();
        let kfh = residue_pairing(&m, &f, &h).unwrap();
        let lin = residue_pairing(&m, &f, &g.add(&h.scale(s))).unwrap();
        let scale = 1.0 + kfg.norm() + kfh.norm();
        prop_assert!((kfg - kgf).norm() <= 1e-9 * scale);
        prop_assert!((lin - (kfg + s * kfh)).norm() <= 1e-8 * scale);
    }
}

#[test]
fn ample_representatives_are_kahler() {
    for name in PRESETS {
        let f = preset_fan(name).unwrap();
        assert!(ComplexifiedClass::kahler(&f, ample_class(&f)).is_ok(), "{name}");
    }
}
