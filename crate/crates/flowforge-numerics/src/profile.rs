//! Smooth profiles: the cut-off χ, the mollifier bump and Gauss-Legendre nodes.

/// Quintic smoothstep rising on [1, 2]: 0 below 1, 1 above 2.
pub fn chi(t: f64) -> f64 {
    let u = (t - 1.0).clamp(0.0, 1.0);
    u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

pub fn chi_prime(t: f64) -> f64 {
    if !(1.0..=2.0).contains(&t) {
        return 0.0;
    }
    let u = t - 1.0;
    30.0 * u * u * (1.0 - u) * (1.0 - u)
}

/// exp(−1/(1−u²)) on (−1, 1), zero outside.
pub fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// ∫_a^b f by 8-point Gauss-Legendre on `pieces` equal subintervals.
pub fn gauss(a: f64, b: f64, pieces: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / pieces as f64;
    let mut acc = 0.0;
    for p in 0..pieces {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in GL8 {
            acc += w * f(mid + 0.5 * h * x);
        }
    }
    acc * 0.5 * h
}
