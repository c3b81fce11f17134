//! Numerical helpers shared by the checks: normal and χ² distribution
//! functions, adaptive quadrature, Kolmogorov–Smirnov statistics, and simple
//! sample moments.

use std::f64::consts::SQRT_2;

use crate::sampler::chi2_pdf;

// 15-point Kronrod / 7-point Gauss nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Subinterval cap for [`integrate`].
const MAX_INTERVALS: usize = 2000;

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`: the
/// subinterval with the largest error estimate is bisected until the summed
/// estimate drops below `tol` (or below the roundoff floor of the result).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (k, e) = kronrod15(&f, a, b);
    let mut parts = vec![(a, b, k, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol.max(50.0 * f64::EPSILON * total.abs()) || parts.len() >= MAX_INTERVALS {
            return total;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (k1, e1) = kronrod15(&f, lo, mid);
        let (k2, e2) = kronrod15(&f, mid, hi);
        parts.push((lo, mid, k1, e1));
        parts.push((mid, hi, k2, e2));
    }
}

/// `∫_a^∞ f` through the substitution `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        f(a + t / s) / (s * s)
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal upper tail `P(Z > x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// χ² CDF with `m` degrees of freedom, by quadrature of the density.
///
/// Integrates in `u = sqrt(x)`, where the integrand `2u f_m(u^2)` is bounded
/// for every `m >= 1`.
pub fn chi2_cdf(x: f64, m: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let g = |u: f64| {
        if u <= 0.0 {
            return if m == 1 {
                2.0 * chi2_density_times_sqrt_at_zero()
            } else {
                0.0
            };
        }
        2.0 * u * chi2_pdf(u * u, m).unwrap_or(0.0)
    };
    let mean = m as f64;
    let upper = x.sqrt();
    // Split at the bulk so the adaptive rule sees the peak.
    let mid = mean.sqrt().min(upper);
    let v = integrate(g, 0.0, mid, 1e-15) + integrate(g, mid, upper, 1e-15);
    v.clamp(0.0, 1.0)
}

/// lim_{x→0} sqrt(x) f_1(x) = 1/sqrt(2π).
fn chi2_density_times_sqrt_at_zero() -> f64 {
    1.0 / (2.0 * std::f64::consts::PI).sqrt()
}

/// One-sample Kolmogorov–Smirnov distance of `xs` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a KS distance with effective sample size `n`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let s = n.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of a binomial proportion.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Integrated autocorrelation time with Geyer's initial positive sequence
/// estimator. Returns 1 for constant or very short series.
pub fn iact(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 1.0;
    }
    let m = mean(xs);
    let acov = |lag: usize| -> f64 {
        (0..n - lag)
            .map(|i| (xs[i] - m) * (xs[i + lag] - m))
            .sum::<f64>()
            / n as f64
    };
    let g0 = acov(0);
    if g0 <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = acov(2 * k) + acov(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        k += 1;
    }
    (2.0 * sum / g0 - 1.0).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // High-precision reference values (40-digit arithmetic).
    const NORMAL_REF: [(f64, f64); 20] = [
        (-8.0, 6.220_960_574_271_784e-16),
        (-6.0, 9.865_876_450_376_981e-10),
        (-5.0, 2.866_515_718_791_939e-7),
        (-4.0, 3.167_124_183_311_992e-5),
        (-3.0, 1.349_898_031_630_094_5e-3),
        (-2.5, 6.209_665_325_776_135e-3),
        (-2.0, 0.022_750_131_948_179_207),
        (-1.5, 0.066_807_201_268_858_07),
        (-1.0, 0.158_655_253_931_457_05),
        (-0.5, 0.308_537_538_725_986_9),
        (0.25, 0.598_706_325_682_923_7),
        (0.75, 0.773_372_647_623_131_8),
        (1.25, 0.894_350_226_333_144_7),
        (1.75, 0.959_940_843_136_182_9),
        (2.25, 0.987_775_527_344_955_3),
        (3.0, 0.998_650_101_968_369_9),
        (3.5, 0.999_767_370_920_964_5),
        (4.5, 0.999_996_602_326_875_3),
        (6.0, 0.999_999_999_013_412_4),
        (7.5, 0.999_999_999_999_968_1),
    ];

    const CHI2_REF: [(f64, u32, f64); 20] = [
        (0.05, 1, 0.176_936_726_241_878_53),
        (0.5, 1, 0.520_499_877_813_046_5),
        (2.0, 1, 0.842_700_792_949_714_9),
        (6.0, 1, 0.985_694_121_564_570_4),
        (0.3, 2, 0.139_292_023_574_942_2),
        (4.0, 3, 0.738_535_870_050_889_4),
        (1.0, 4, 0.090_204_010_431_049_86),
        (9.0, 4, 0.938_900_519_039_667_3),
        (2.5, 5, 0.223_504_928_876_677_3),
        (12.0, 6, 0.938_031_195_583_341),
        (5.0, 8, 0.242_423_866_866_934_04),
        (15.0, 10, 0.867_938_143_712_279_4),
        (20.0, 14, 0.869_858_579_117_517),
        (30.0, 30, 0.534_346_291_055_990_4),
        (25.0, 30, 0.274_968_115_819_399_96),
        (40.0, 30, 0.895_135_718_892_015_3),
        (0.2, 3, 0.022_410_702_238_350_602),
        (60.0, 30, 0.999_079_317_603_851_3),
        (7.0, 2, 0.969_802_616_577_681_5),
        (10.0, 7, 0.811_426_532_486_549_9),
    ];

    #[test]
    fn normal_cdf_reference_values() {
        for (x, want) in NORMAL_REF {
            assert!((normal_cdf(x) - want).abs() < 1e-10, "{x}");
            assert!((normal_sf(-x) - want).abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn chi2_cdf_reference_values() {
        for (x, m, want) in CHI2_REF {
            let got = chi2_cdf(x, m);
            assert!((got - want).abs() < 1e-10, "x={x} m={m}: {got} vs {want}");
        }
    }

    #[test]
    fn quadrature_polynomial_and_exponential() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-14);
        assert!((v - 4.0).abs() < 1e-13);
        let e = integrate_to_infinity(|x| (-x).exp(), 0.0, 1e-13);
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_tails() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-15);
        assert!((normal_sf(3.0) - 1.349_898_031_630_094_5e-3).abs() < 1e-17);
    }

    #[test]
    fn chi2_two_dof_is_exponential() {
        for x in [0.1, 1.0, 2.5, 7.0, 20.0] {
            let exact = 1.0 - (-x / 2.0f64).exp();
            assert!((chi2_cdf(x, 2) - exact).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn ks_distances() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&xs, |x| x) <= 0.0005 + 1e-12);
        assert_eq!(ks_two_sample(&xs, &xs), 0.0);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.1).collect();
        assert!((ks_two_sample(&xs, &shifted) - 0.1).abs() < 2e-3);
    }

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.36) ≈ 0.0494, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_sf(1.36) - 0.049_4).abs() < 5e-4);
        assert!((kolmogorov_sf(1.63) - 0.009_8).abs() < 2e-4);
    }

    #[test]
    fn iact_of_ar1() {
        // AR(1) with coefficient 0.5 has tau = (1 + 0.5) / (1 - 0.5) = 3.
        let mut rng = crate::sampler::RngStream::new(3, 0);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                x = 0.5 * x + rng.normal();
                x
            })
            .collect();
        let tau = iact(&xs);
        assert!((tau - 3.0).abs() < 0.2, "{tau}");
        assert_eq!(iact(&[1.0; 50]), 1.0);
    }
}
