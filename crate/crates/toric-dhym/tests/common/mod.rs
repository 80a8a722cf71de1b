#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toric_dhym::chow::nef_generators;
use toric_dhym::exact::q_frac;
use toric_dhym::{preset_fan, DivisorClass, Fan, Q};

pub const SURFACES: [&str; 5] = ["p2", "blp_p2", "p1xp1", "hirzebruch(2)", "blpq_p2"];

pub fn rand_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Q {
    q_frac(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
}

/// Ample class as a positive rational combination of the nef generators.
pub fn rand_kahler(rng: &mut ChaCha8Rng, fan: &Fan) -> DivisorClass {
    nef_generators(fan)
        .iter()
        .fold(DivisorClass::zero(fan.num_rays()), |acc, g| acc.add(&g.scale(&rand_q(rng, 1, 6, 3))))
}

pub fn rand_class(rng: &mut ChaCha8Rng, fan: &Fan) -> DivisorClass {
    let coords: Vec<Q> = (0..fan.basis().len()).map(|_| rand_q(rng, -6, 6, 3)).collect();
    DivisorClass::from_basis(fan, &coords).unwrap()
}

/// (fan, ω, α) on a random surface preset.
pub fn rand_surface_instance(rng: &mut ChaCha8Rng) -> (Fan, DivisorClass, DivisorClass) {
    let fan = preset_fan(SURFACES[rng.gen_range(0..SURFACES.len())]).unwrap();
    let w = rand_kahler(rng, &fan);
    let a = rand_class(rng, &fan);
    (fan, w, a)
}

/// ω = xH − yE with x > y > 0 on blp_p2.
pub fn rand_blp_p2_kahler(rng: &mut ChaCha8Rng, fan: &Fan) -> DivisorClass {
    let y = rand_q(rng, 1, 8, 2);
    let x = &y + rand_q(rng, 1, 8, 2);
    DivisorClass::from_basis(fan, &[x, -y]).unwrap()
}
