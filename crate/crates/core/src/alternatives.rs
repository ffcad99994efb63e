//! The four alternative families used for power and efficiency work.
//!
//! Every family reduces to the unit exponential at θ = 0:
//!
//! * Makeham: g(x,θ) = (1 + θ(1 - e^{-x})) exp(-x - θ(e^{-x} - 1 + x))
//! * Weibull: g(x,θ) = (1 + θ) x^θ exp(-x^{1+θ})
//! * Gamma:   g(x,θ) = x^θ e^{-x} / Γ(θ + 1)   (shape θ+1, scale 1)
//! * EMNW(β): g(x,θ) = (1 + θ) e^{-x} - θ β e^{-βx}, valid for
//!   θ <= 1/(β - 1) where the negative weight keeps the density nonnegative.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng::SplitMix64;
use crate::special::{reg_lower_gamma, EULER_GAMMA};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlternativeFamily {
    Makeham,
    Weibull,
    Gamma,
    Emnw { beta: f64 },
}

impl std::fmt::Display for AlternativeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlternativeFamily::Makeham => write!(f, "Makeham"),
            AlternativeFamily::Weibull => write!(f, "Weibull"),
            AlternativeFamily::Gamma => write!(f, "Gamma"),
            AlternativeFamily::Emnw { beta } => write!(f, "EMNW({beta})"),
        }
    }
}

/// A family together with its departure parameter θ (θ = 0 is the null).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    pub family: AlternativeFamily,
    pub theta: f64,
}

impl AlternativeSpec {
    pub fn new(family: AlternativeFamily, theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "theta must be finite and nonnegative, got {theta}"
            )));
        }
        if let AlternativeFamily::Emnw { beta } = family {
            if !(beta > 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "EMNW needs beta > 1, got {beta}"
                )));
            }
            if theta > 1.0 / (beta - 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "EMNW(beta={beta}) needs theta in [0, {}], got {theta}",
                    1.0 / (beta - 1.0)
                )));
            }
        }
        Ok(Self { family, theta })
    }

    pub fn makeham(theta: f64) -> Result<Self> {
        Self::new(AlternativeFamily::Makeham, theta)
    }
    pub fn weibull(theta: f64) -> Result<Self> {
        Self::new(AlternativeFamily::Weibull, theta)
    }
    pub fn gamma(theta: f64) -> Result<Self> {
        Self::new(AlternativeFamily::Gamma, theta)
    }
    pub fn emnw(beta: f64, theta: f64) -> Result<Self> {
        Self::new(AlternativeFamily::Emnw { beta }, theta)
    }
}

/// Density g(x, θ); zero for x < 0.
pub fn density(spec: &AlternativeSpec, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let th = spec.theta;
    match spec.family {
        AlternativeFamily::Makeham => {
            (1.0 + th * (1.0 - (-x).exp())) * (-x - th * ((-x).exp() - 1.0 + x)).exp()
        }
        AlternativeFamily::Weibull => {
            if th == 0.0 {
                (-x).exp()
            } else if x == 0.0 {
                // x^θ -> 0 for θ > 0
                0.0
            } else {
                (1.0 + th) * x.powf(th) * (-x.powf(1.0 + th)).exp()
            }
        }
        AlternativeFamily::Gamma => {
            if th == 0.0 {
                (-x).exp()
            } else if x == 0.0 {
                0.0
            } else {
                (th * x.ln() - x - libm::lgamma(th + 1.0)).exp()
            }
        }
        AlternativeFamily::Emnw { beta } => {
            (1.0 + th) * (-x).exp() - th * beta * (-beta * x).exp()
        }
    }
}

/// Distribution function of g(x, θ); closed forms except for Gamma, which
/// uses the regularized incomplete gamma.
pub fn cdf(spec: &AlternativeSpec, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let th = spec.theta;
    match spec.family {
        AlternativeFamily::Makeham => 1.0 - (-x - th * ((-x).exp() - 1.0 + x)).exp(),
        AlternativeFamily::Weibull => 1.0 - (-x.powf(1.0 + th)).exp(),
        AlternativeFamily::Gamma => reg_lower_gamma(th + 1.0, x),
        AlternativeFamily::Emnw { beta } => {
            (1.0 + th) * (1.0 - (-x).exp()) - th * (1.0 - (-beta * x).exp())
        }
    }
}

/// Quantile x with cdf(x) = u, solved to |F(x) - u| <= 1e-12.
pub fn quantile(spec: &AlternativeSpec, u: f64) -> f64 {
    assert!((0.0..1.0).contains(&u), "u must lie in [0, 1)");
    if u == 0.0 {
        return 0.0;
    }
    if let AlternativeFamily::Weibull = spec.family {
        // closed-form inverse transform
        return (-(-u).ln_1p()).powf(1.0 / (1.0 + spec.theta));
    }
    invert_cdf(|x| cdf(spec, x), |x| density(spec, x), u)
}

/// One draw with d.f. cdf(spec, .), consuming exactly one uniform from the
/// caller's stream.
pub fn sample(spec: &AlternativeSpec, rng: &mut SplitMix64) -> f64 {
    quantile(spec, rng.next_f64())
}

/// Bracketed Newton iteration with bisection fallback on the monotone cdf.
fn invert_cdf(f: impl Fn(f64) -> f64, pdf: impl Fn(f64) -> f64, u: f64) -> f64 {
    let mut hi = 1.0;
    while f(hi) <= u {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = 0.0;
    let mut x = 0.5 * hi;
    for _ in 0..200 {
        let fx = f(x);
        if (fx - u).abs() <= 1e-12 {
            return x;
        }
        if fx < u {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let mut next = if d > 0.0 { x - (fx - u) / d } else { x };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            break;
        }
        x = next;
    }
    x
}

/// ∂g(x, θ)/∂θ at θ = 0, the direction the family leaves the null in.
pub fn theta_derivative(family: AlternativeFamily, x: f64) -> Result<f64> {
    match family {
        AlternativeFamily::Weibull | AlternativeFamily::Gamma if x <= 0.0 => {
            Err(Error::InvalidParameter(format!(
                "theta derivative of {family} needs x > 0, got {x}"
            )))
        }
        _ => Ok(theta_derivative_unchecked(family, x)),
    }
}

#[inline]
pub(crate) fn theta_derivative_unchecked(family: AlternativeFamily, x: f64) -> f64 {
    let e = (-x).exp();
    match family {
        AlternativeFamily::Makeham => e * (2.0 - 2.0 * e - x),
        AlternativeFamily::Weibull => e * (1.0 + (1.0 - x) * x.ln()),
        AlternativeFamily::Gamma => e * (x.ln() + EULER_GAMMA),
        AlternativeFamily::Emnw { beta } => e - beta * (-beta * x).exp(),
    }
}

/// Kullback–Leibler curvature lim_{θ->0} 2 K(θ)/θ² against the composite
/// exponential null, via the regularity identity
/// 2K(θ) ~ [∫ h²(x) eˣ dx - (∫ x h(x) dx)²] θ².
pub fn kl_curvature(family: AlternativeFamily) -> Result<f64> {
    let h = |x: f64| theta_derivative_unchecked(family, x);
    let second_moment = quadrature::halfline(|x| h(x) * h(x) * x.exp(), 1e-11)?;
    let mean_shift = quadrature::halfline(|x| x * h(x), 1e-12)?;
    let curvature = second_moment - mean_shift * mean_shift;
    if !curvature.is_finite() || curvature <= 0.0 {
        return Err(Error::NumericFailure(format!(
            "KL curvature for {family} came out as {curvature}"
        )));
    }
    Ok(curvature)
}

/// Small-θ evaluation of K(θ) itself through its inf-over-rate definition:
/// K(θ) = ∫ g ln g dx + ln(mean of g) + 1, the infimum over λ of the KL
/// divergence to exponential(λ) being attained at λ = 1/mean.
/// Used as an independent cross-check of [`kl_curvature`].
pub fn kl_divergence_to_null(spec: &AlternativeSpec) -> Result<f64> {
    let entropy = quadrature::halfline(
        |x| {
            let g = density(spec, x);
            if g > 0.0 {
                g * g.ln()
            } else {
                0.0
            }
        },
        1e-12,
    )?;
    let mean = quadrature::halfline(|x| x * density(spec, x), 1e-12)?;
    Ok(entropy + mean.ln() + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMILIES: [AlternativeFamily; 4] = [
        AlternativeFamily::Makeham,
        AlternativeFamily::Weibull,
        AlternativeFamily::Gamma,
        AlternativeFamily::Emnw { beta: 3.0 },
    ];

    #[test]
    fn validation_rules() {
        assert!(AlternativeSpec::makeham(-0.1).is_err());
        assert!(AlternativeSpec::emnw(1.0, 0.1).is_err());
        assert!(AlternativeSpec::emnw(3.0, 0.51).is_err());
        assert!(AlternativeSpec::emnw(3.0, 0.5).is_ok());
    }

    #[test]
    fn theta_zero_reduces_to_exponential() {
        for family in FAMILIES {
            let spec = AlternativeSpec::new(family, 0.0).unwrap();
            for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
                assert!(
                    (density(&spec, x) - (-x as f64).exp()).abs() < 1e-12,
                    "{family} at {x}"
                );
                assert!((cdf(&spec, x) - (1.0 - (-x as f64).exp())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn density_hand_values() {
        let emnw = AlternativeSpec::emnw(3.0, 0.5).unwrap();
        assert_eq!(density(&emnw, 0.0), 0.0); // 1.5 - 0.5*3
        let gamma = AlternativeSpec::gamma(1.0).unwrap();
        for x in [0.3, 1.0, 4.0] {
            assert!((density(&gamma, x) - x * (-x as f64).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        for family in FAMILIES {
            for theta in [0.25, 0.5] {
                let spec = AlternativeSpec::new(family, theta).unwrap();
                let mass = quadrature::halfline(|x| density(&spec, x), 1e-10).unwrap();
                assert!((mass - 1.0).abs() < 1e-8, "{family} theta={theta}: {mass}");
            }
        }
    }

    #[test]
    fn densities_are_nonnegative() {
        for family in FAMILIES {
            for theta in [0.0, 0.25, 0.5] {
                let spec = AlternativeSpec::new(family, theta).unwrap();
                for i in 0..400 {
                    let x = i as f64 * 0.05;
                    assert!(density(&spec, x) >= 0.0, "{family} theta={theta} x={x}");
                }
            }
        }
    }

    #[test]
    fn cdf_matches_density_derivative() {
        for family in FAMILIES {
            let spec = AlternativeSpec::new(family, 0.4).unwrap();
            for x in [0.3, 0.8, 1.5, 3.0] {
                let eps = 1e-5;
                let numeric = (cdf(&spec, x + eps) - cdf(&spec, x - eps)) / (2.0 * eps);
                assert!(
                    (numeric - density(&spec, x)).abs() < 1e-6,
                    "{family} x={x}: {numeric} vs {}",
                    density(&spec, x)
                );
            }
        }
    }

    #[test]
    fn cdf_hand_forms() {
        let mk = AlternativeSpec::makeham(0.7).unwrap();
        for x in [0.2, 1.0, 2.5] {
            let direct = 1.0 - (-x - 0.7 * ((-x as f64).exp() - 1.0 + x)).exp();
            assert!((cdf(&mk, x) - direct).abs() < 1e-14);
        }
        let wb = AlternativeSpec::weibull(0.3).unwrap();
        for x in [0.2, 1.0, 2.5] {
            let direct = 1.0 - (-(x as f64).powf(1.3)).exp();
            assert!((cdf(&wb, x) - direct).abs() < 1e-14);
        }
        let em = AlternativeSpec::emnw(3.0, 0.5).unwrap();
        for x in [0.2, 1.0, 2.5] {
            let direct =
                1.5 * (1.0 - (-x as f64).exp()) - 0.5 * (1.0 - (-3.0 * x as f64).exp());
            assert!((cdf(&em, x) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn weibull_quantile_closed_form() {
        let spec = AlternativeSpec::weibull(0.5).unwrap();
        let u = 1.0 - (-1.0f64).exp();
        assert!((quantile(&spec, u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for family in FAMILIES {
            let spec = AlternativeSpec::new(family, 0.4).unwrap();
            for u in [0.01, 0.2, 0.5, 0.9, 0.999] {
                let x = quantile(&spec, u);
                assert!(
                    (cdf(&spec, x) - u).abs() <= 1e-10,
                    "{family} u={u}: x={x} F={}",
                    cdf(&spec, x)
                );
            }
        }
    }

    /// One-sample Kolmogorov bound at level 0.01 (asymptotic critical value
    /// 1.6276 / sqrt(n)).
    fn ks_against(draws: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
        draws.sort_by(f64::total_cmp);
        let n = draws.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in draws.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n).abs());
            d = d.max(((i + 1) as f64 / n - f).abs());
        }
        (d, 1.6276 / n.sqrt())
    }

    #[test]
    fn sampler_matches_null_at_theta_zero() {
        for (fi, family) in FAMILIES.into_iter().enumerate() {
            let spec = AlternativeSpec::new(family, 0.0).unwrap();
            let mut rng = SplitMix64::new(400 + fi as u64);
            let mut draws: Vec<f64> =
                (0..100_000).map(|_| sample(&spec, &mut rng)).collect();
            let (d, crit) = ks_against(&mut draws, |x| 1.0 - (-x).exp());
            assert!(d < crit, "{family}: D={d} crit={crit}");
        }
    }

    #[test]
    fn sampler_probability_integral_transform_is_uniform() {
        for (fi, family) in FAMILIES.into_iter().enumerate() {
            for theta in [0.25, 0.5] {
                let spec = AlternativeSpec::new(family, theta).unwrap();
                let mut rng = SplitMix64::new(7000 + fi as u64 + (theta * 100.0) as u64);
                let mut pit: Vec<f64> = (0..100_000)
                    .map(|_| cdf(&spec, sample(&spec, &mut rng)))
                    .collect();
                let (d, crit) = ks_against(&mut pit, |u| u.clamp(0.0, 1.0));
                assert!(d < crit, "{family} theta={theta}: D={d} crit={crit}");
            }
        }
    }

    #[test]
    fn emnw_sample_mean() {
        let spec = AlternativeSpec::emnw(3.0, 0.5).unwrap();
        let mut rng = SplitMix64::new(99);
        let n = 1_000_000usize;
        let mean: f64 = (0..n).map(|_| sample(&spec, &mut rng)).sum::<f64>() / n as f64;
        // E X = 1.5 - 0.5/3 = 4/3, Var X = 10/9
        let se = (10.0f64 / 9.0 / n as f64).sqrt();
        assert!((mean - 4.0 / 3.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn theta_derivative_hand_values() {
        assert!(theta_derivative(AlternativeFamily::Makeham, 1e-12)
            .unwrap()
            .abs() < 1e-10);
        let emnw = AlternativeFamily::Emnw { beta: 3.0 };
        assert_eq!(theta_derivative(emnw, 0.0).unwrap(), -2.0);
        assert!(theta_derivative(AlternativeFamily::Weibull, 0.0).is_err());
        assert!(theta_derivative(AlternativeFamily::Gamma, -1.0).is_err());
    }

    #[test]
    fn theta_derivative_matches_finite_differences() {
        let eps = 1e-4;
        for family in FAMILIES {
            for i in 1..=80 {
                let x = 0.1 * i as f64;
                let h = theta_derivative(family, x).unwrap();
                let plus = AlternativeSpec {
                    family,
                    theta: eps,
                };
                let minus = AlternativeSpec {
                    family,
                    theta: -eps,
                };
                let fd = (density(&plus, x) - density(&minus, x)) / (2.0 * eps);
                assert!(
                    (h - fd).abs() < 1e-5,
                    "{family} x={x}: h={h} fd={fd}"
                );
            }
        }
    }

    #[test]
    fn theta_derivatives_integrate_to_zero() {
        for family in FAMILIES {
            let v = quadrature::halfline(
                |x| theta_derivative_unchecked(family, x),
                1e-11,
            )
            .unwrap();
            assert!(v.abs() < 1e-9, "{family}: ∫h = {v:.2e}");
        }
    }

    #[test]
    fn kl_curvature_closed_values() {
        // Makeham: 1/12. Weibull: π²/6. Gamma: π²/6 - 1. EMNW(3): 16/45.
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        let cases = [
            (AlternativeFamily::Makeham, 1.0 / 12.0),
            (AlternativeFamily::Weibull, pi2_6),
            (AlternativeFamily::Gamma, pi2_6 - 1.0),
            (AlternativeFamily::Emnw { beta: 3.0 }, 16.0 / 45.0),
        ];
        for (family, expect) in cases {
            let v = kl_curvature(family).unwrap();
            assert!((v - expect).abs() < 1e-6, "{family}: {v} vs {expect}");
            assert!(v > 0.0);
        }
    }

    #[test]
    fn kl_curvature_matches_small_theta_divergence() {
        // Richardson extrapolation of K(θ)/θ² at θ = 0.01, 0.005.
        let family = AlternativeFamily::Emnw { beta: 3.0 };
        let k1 = kl_divergence_to_null(&AlternativeSpec::new(family, 0.01).unwrap()).unwrap();
        let k2 =
            kl_divergence_to_null(&AlternativeSpec::new(family, 0.005).unwrap()).unwrap();
        let c1 = k1 / 0.01f64.powi(2);
        let c2 = k2 / 0.005f64.powi(2);
        let extrapolated = 2.0 * (2.0 * c2 - c1);
        let direct = kl_curvature(family).unwrap();
        assert!(
            (extrapolated - direct).abs() / direct < 0.01,
            "extrapolated {extrapolated} vs {direct}"
        );
    }
}
