//! Kernels, projections and variances behind the asymptotic null theory.
//!
//! The integral statistic is a V-statistic of degree k+1 with the symmetrized
//! kernel Ψ_k; its projection on one argument under the unit exponential is
//!
//!   ψ_k(s) = (1 - (1 - e^{-s})^k)/(k+1)
//!          - (k+1)^{-2} Σ_{r=1}^{k} (1 + 1/r) e^{-s/r},
//!
//! with variance Δ_k² available in closed form for every k. For a fixed t the
//! difference H_n(t) - G_n(t) is a V-statistic of degree k with kernel Ξ_k
//! and projection ξ_k(s; t); its variance δ_k²(t) has closed forms for
//! k = 2, 3 and is obtained by quadrature otherwise.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::sample::{StatisticKind, TestFamily};
use crate::search::grid_then_golden_max;
use serde::{Deserialize, Serialize};

/// Domain where the sup over t of δ_k²(t) and of |b(t)| is searched; the
/// functions decay exponentially and are below 1e-8 past t = 20.
pub const SUP_SEARCH_UPPER: f64 = 20.0;
pub const SUP_SEARCH_STEP: f64 = 0.01;
pub const SUP_SEARCH_TOL: f64 = 1e-6;

fn check_order(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidOrder { k });
    }
    Ok(())
}

/// Run `body` for every permutation of `items` (Heap's algorithm).
pub(crate) fn for_each_permutation<T: Copy>(items: &mut [T], mut body: impl FnMut(&[T])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    body(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            body(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Symmetrized kernel Ψ_k evaluated at k+1 points: the average over which
/// point plays the comparison role of [max-of-others < x] minus the
/// permutation average of [weighted-sum-of-others < x].
pub fn kernel_psi(k: u32, points: &[f64]) -> Result<f64> {
    check_order(k)?;
    let degree = k as usize + 1;
    assert_eq!(
        points.len(),
        degree,
        "kernel of order {k} takes {degree} points"
    );

    let mut factorial = 1.0f64;
    for j in 2..=k as u64 {
        factorial *= j as f64;
    }

    let mut max_part = 0.0f64;
    let mut sum_part = 0.0f64;
    let mut others = vec![0.0f64; k as usize];
    let mut divisors: Vec<u32> = (1..=k).collect();
    for i in 0..degree {
        let x = points[i];
        let mut slot = 0;
        for (j, &p) in points.iter().enumerate() {
            if j != i {
                others[slot] = p;
                slot += 1;
            }
        }
        if others.iter().all(|&o| o < x) {
            max_part += 1.0;
        }
        let mut hits = 0u64;
        for_each_permutation(&mut divisors, |perm| {
            let mut s = 0.0;
            for (o, &d) in others.iter().zip(perm.iter()) {
                s += o / d as f64;
            }
            if s < x {
                hits += 1;
            }
        });
        sum_part += hits as f64 / factorial;
    }
    Ok((max_part - sum_part) / degree as f64)
}

/// Projection ψ_k(s) of Ψ_k under the null, in closed form.
pub fn projection_psi(k: u32, s: f64) -> f64 {
    assert!(k >= 2, "projection defined for k >= 2");
    let kf = k as f64;
    let u = (-s).exp();
    let mut tail = 0.0;
    for r in 1..=k {
        let rf = r as f64;
        tail += (1.0 + 1.0 / rf) * (-s / rf).exp();
    }
    (1.0 - (1.0 - u).powi(k as i32)) / (kf + 1.0) - tail / (kf + 1.0).powi(2)
}

/// Evaluable projection of the integral-statistic kernel.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionPsi {
    pub k: u32,
}

impl ProjectionPsi {
    pub fn new(k: u32) -> Result<Self> {
        check_order(k)?;
        Ok(Self { k })
    }

    pub fn eval(&self, s: f64) -> f64 {
        projection_psi(self.k, s)
    }
}

/// Closed-form variance Δ_k² = Var ψ_k(X) under the null.
///
/// The k! factor of the middle term is folded into the product
/// Π_{m=2}^{k+1} m/(m + 1/r) so the expression stays in floating range for
/// every k up to well past 30.
pub fn variance_delta_sq(k: u32) -> f64 {
    assert!(k >= 2, "variance defined for k >= 2");
    let kf = k as f64;
    let lead = 1.0 / (kf + 1.0).powi(3);

    let poly = (-12.0 * kf.powi(4) - 38.0 * kf.powi(3) - 35.0 * kf.powi(2) - 11.0 * kf)
        / (4.0 * (kf + 1.0).powi(2) * (kf + 2.0) * (2.0 * kf + 1.0));

    let mut middle = 0.0;
    for r in 1..=k {
        let inv_r = 1.0 / r as f64;
        let mut prod = 1.0;
        for m in 2..=(k as u64 + 1) {
            prod *= m as f64 / (m as f64 + inv_r);
        }
        middle += prod / (kf + 1.0);
    }
    middle *= 2.0;

    let mut pair = 0.0;
    for i in 1..=k {
        for j in (i + 1)..=k {
            pair += 1.0 / (i as f64 + j as f64 + (i * j) as f64);
        }
    }
    pair *= 2.0 / (kf + 1.0);

    lead * (poly + middle + pair)
}

/// Kernel Ξ_k(x_1..x_k; t) of the pointwise difference H_n(t) - G_n(t).
pub fn kernel_xi(k: u32, points: &[f64], t: f64) -> Result<f64> {
    check_order(k)?;
    assert_eq!(points.len(), k as usize, "kernel of order {k} takes {k} points");
    let max_part = if points.iter().all(|&p| p < t) { 1.0 } else { 0.0 };
    let mut factorial = 1.0f64;
    for j in 2..=k as u64 {
        factorial *= j as f64;
    }
    let mut hits = 0u64;
    let mut divisors: Vec<u32> = (1..=k).collect();
    for_each_permutation(&mut divisors, |perm| {
        let mut s = 0.0;
        for (&p, &d) in points.iter().zip(perm.iter()) {
            s += p / d as f64;
        }
        if s < t {
            hits += 1;
        }
    });
    Ok(max_part - hits as f64 / factorial)
}

/// Projection ξ_k(s; t) of Ξ_k on its first argument under the null.
///
/// k = 2 and k = 3 use the verified closed forms; larger k fall back to the
/// general expression, which reproduces the closed forms exactly for
/// k = 2, 3 but has seen less numerical scrutiny for large k.
pub fn projection_xi(k: u32, s: f64, t: f64) -> f64 {
    assert!(k >= 2, "projection defined for k >= 2");
    match k {
        2 => projection_xi_2(s, t),
        3 => projection_xi_3(s, t),
        _ => projection_xi_general(k, s, t),
    }
}

fn f_exp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x).exp()
    }
}

fn projection_xi_2(s: f64, t: f64) -> f64 {
    let mut v = 0.0;
    if s < t {
        v += f_exp(t) - 0.5 * f_exp(2.0 * (t - s));
    }
    if s < 2.0 * t {
        v -= 0.5 * f_exp(t - s / 2.0);
    }
    v
}

fn projection_xi_3(s: f64, t: f64) -> f64 {
    let mut v = 0.0;
    if s < t {
        v += f_exp(t).powi(2) - f_exp(2.0 * (t - s)) + (2.0 / 3.0) * f_exp(3.0 * (t - s));
    }
    if s < 2.0 * t {
        v -= 0.5 * f_exp(t - s / 2.0) - (1.0 / 6.0) * f_exp(3.0 * (t - s / 2.0));
    }
    if s < 3.0 * t {
        v -= (2.0 / 3.0) * f_exp(t - s / 3.0) - (1.0 / 3.0) * f_exp(2.0 * (t - s / 3.0));
    }
    v
}

fn projection_xi_general(k: u32, s: f64, t: f64) -> f64 {
    let kf = k as f64;
    let mut v = if s < t {
        f_exp(t).powi(k as i32 - 1)
    } else {
        0.0
    };
    for j in 1..=k {
        let jf = j as f64;
        if s < jf * t {
            let gap = t - s / jf;
            let mut inner = 1.0;
            for i in 1..=k {
                if i == j {
                    continue;
                }
                let mut prod = 1.0;
                for h in 1..=k {
                    if h == i || h == j {
                        continue;
                    }
                    prod *= h as f64 / (h as f64 - i as f64);
                }
                inner -= (-(i as f64) * gap).exp() * prod;
            }
            v -= inner / kf;
        }
    }
    v
}

/// Evaluable projection of the Kolmogorov-statistic kernel family.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionXi {
    pub k: u32,
}

impl ProjectionXi {
    pub fn new(k: u32) -> Result<Self> {
        check_order(k)?;
        Ok(Self { k })
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        projection_xi(self.k, s, t)
    }
}

/// Variance δ_k²(t) = Var ξ_k(X; t) under the null. Closed forms for
/// k = 2, 3; quadrature of the squared projection otherwise.
pub fn delta_sq_of_t(k: u32, t: f64) -> f64 {
    assert!(k >= 2);
    if t <= 0.0 {
        return 0.0;
    }
    match k {
        2 => delta_sq_2(t),
        3 => delta_sq_3(t),
        _ => delta_sq_by_quadrature(k, t).expect("projection variance quadrature"),
    }
}

fn delta_sq_2(t: f64) -> f64 {
    let e = |a: f64| (-a * t).exp();
    (1.0 / 3.0) * e(1.0) - 1.25 * e(2.0) - (1.0 / 3.0) * e(3.0) - (1.0 / 12.0) * e(4.0)
        - (2.0 / 3.0) * e(1.5)
        + 2.0 * e(2.5)
        + 0.5 * t * e(2.0)
}

fn delta_sq_3(t: f64) -> f64 {
    let e = |a: f64| (-a * t).exp();
    (8.0 / 15.0) * e(1.0)
        + (0.5 * t - 1.0 / 24.0) * e(2.0)
        + (41.0 / 9.0 - (4.0 / 3.0) * t) * e(3.0)
        - (179.0 / 210.0) * e(4.0)
        + (113.0 / 210.0) * e(5.0)
        - (419.0 / 2520.0) * e(6.0)
        - (14.0 / 15.0) * e(1.5)
        + (122.0 / 35.0) * e(2.5)
        - (2.0 / 3.0) * e(3.5)
        - (2.0 / 3.0) * e(4.5)
        - (5.0 / 7.0) * e(5.0 / 3.0)
        - 2.5 * e(7.0 / 3.0)
        + (10.0 / 7.0) * e(8.0 / 3.0)
        - 4.0 * e(10.0 / 3.0)
        - 2.0 * e(11.0 / 3.0)
        + 2.0 * e(13.0 / 3.0)
}

/// Quadrature route for δ_k²(t); the oracle the closed forms are checked
/// against, and the implementation for k >= 4.
pub fn delta_sq_by_quadrature(k: u32, t: f64) -> Result<f64> {
    let breaks: Vec<f64> = (1..=k).map(|j| j as f64 * t).collect();
    quadrature::exp_weighted_with_breaks(
        |s| projection_xi(k, s, t).powi(2),
        &breaks,
        1e-12,
    )
}

/// Location and value of sup_{t >= 0} δ_k²(t): coarse grid on [0, 20]
/// followed by golden-section refinement.
pub fn sup_delta_sq(k: u32) -> (f64, f64) {
    grid_then_golden_max(
        |t| delta_sq_of_t(k, t),
        0.0,
        SUP_SEARCH_UPPER,
        SUP_SEARCH_STEP,
        SUP_SEARCH_TOL,
    )
}

/// Null asymptotics of one statistic family: projection variance, limit
/// scale and the quadratic large-deviation coefficient.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NullAsymptotics {
    pub kind: StatisticKind,
    /// Δ_k² for the integral family, sup_t δ_k²(t) for the Kolmogorov family.
    pub projection_variance: f64,
    /// Variance of the normal limit of sqrt(n) I_n, i.e. (k+1)² Δ_k², for the
    /// integral family; k² δ_k² (the exact-slope divisor) for Kolmogorov.
    pub limit_scale: f64,
    /// Coefficient of a² in the large-deviation rate of the statistic.
    pub ld_coefficient: f64,
    /// Argmax of δ_k²(t) (Kolmogorov family only).
    pub witness_t: Option<f64>,
}

/// Assemble the null asymptotics for a statistic kind.
///
/// The Kolmogorov family is served for k in {2, 3}, where the projection
/// variances have verified closed forms; the integral family for any k >= 2.
pub fn null_asymptotics(kind: StatisticKind) -> Result<NullAsymptotics> {
    check_order(kind.k)?;
    let k = kind.k;
    let kf = k as f64;
    match kind.family {
        TestFamily::Integral => {
            let var = variance_delta_sq(k);
            let scale = (kf + 1.0).powi(2) * var;
            Ok(NullAsymptotics {
                kind,
                projection_variance: var,
                limit_scale: scale,
                ld_coefficient: 1.0 / (2.0 * scale),
                witness_t: None,
            })
        }
        TestFamily::Kolmogorov => {
            if k > 3 {
                return Err(Error::UnsupportedOrder {
                    what: "Kolmogorov-family null asymptotics",
                    k,
                });
            }
            let (t_star, var) = sup_delta_sq(k);
            let scale = kf * kf * var;
            Ok(NullAsymptotics {
                kind,
                projection_variance: var,
                limit_scale: scale,
                ld_coefficient: 1.0 / (2.0 * scale),
                witness_t: Some(t_star),
            })
        }
    }
}
