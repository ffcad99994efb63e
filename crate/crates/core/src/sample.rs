//! Observation samples, V-empirical distribution functions and the two
//! test statistics.
//!
//! For a sample X_1..X_n and an order k >= 2 the two V-empirical d.f.'s are
//!
//! * H_n(t): fraction of ordered k-tuples with max(X_{i_1},..,X_{i_k}) < t,
//!   which factors as F_n(t)^k;
//! * G_n(t): fraction of ordered k-tuples, averaged over all divisor
//!   permutations, with X_{i_1}/j_1 + .. + X_{i_k}/j_k < t. Because the outer
//!   sum runs over all ordered tuples, the permutation average equals the
//!   fixed-divisor enumeration Σ_j X_{i_j}/j over the same n^k tuples.
//!
//! The integral statistic is ∫ (H_n - G_n) dF_n and the Kolmogorov statistic
//! is sup_t |H_n(t) - G_n(t)|; both are scale-free, and large values reject
//! exponentiality. All indicators use strict `<`, so the d.f.'s are
//! left-continuous step functions.

use crate::error::{Error, Result};
use crate::kernels::kernel_psi;
use crate::rng::substream;
use serde::{Deserialize, Serialize};

/// Default cap on the number of tuples an exact enumeration may touch.
pub const DEFAULT_TUPLE_BUDGET: u64 = 20_000_000;

/// Sorted, validated vector of nonnegative observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validate and sort the observations. Negative or non-finite entries are
    /// hard errors; the index reported refers to the input order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
            if v < 0.0 {
                return Err(Error::NegativeValue { index, value: v });
            }
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Observations sorted ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distinct values with multiplicities, ascending.
    fn distinct(&self) -> (Vec<f64>, Vec<usize>) {
        let mut vals = Vec::new();
        let mut mult = Vec::new();
        for &v in &self.values {
            match vals.last() {
                Some(&last) if last == v => *mult.last_mut().expect("parallel vec") += 1,
                _ => {
                    vals.push(v);
                    mult.push(1);
                }
            }
        }
        (vals, mult)
    }
}

/// The two statistic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFamily {
    /// ∫ (H_n - G_n) dF_n
    Integral,
    /// sup_t |H_n(t) - G_n(t)|
    Kolmogorov,
}

impl std::fmt::Display for TestFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestFamily::Integral => write!(f, "integral"),
            TestFamily::Kolmogorov => write!(f, "kolmogorov"),
        }
    }
}

/// Choice of statistic family together with its order k >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatisticKind {
    pub family: TestFamily,
    pub k: u32,
}

impl StatisticKind {
    pub fn new(family: TestFamily, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidOrder { k });
        }
        Ok(Self { family, k })
    }

    pub fn integral(k: u32) -> Result<Self> {
        Self::new(TestFamily::Integral, k)
    }

    pub fn kolmogorov(k: u32) -> Result<Self> {
        Self::new(TestFamily::Kolmogorov, k)
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(k={})", self.family, self.k)
    }
}

/// Controls how the n^k tuple enumeration behind G_n is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TupleStrategy {
    /// Exact enumeration, refused when n^k exceeds the budget.
    Exact { budget: u64 },
    /// Monte Carlo over `sample_count` uniformly drawn index tuples; the
    /// stream for tuple i is a pure function of (seed, i).
    Sampled { sample_count: u64, seed: u64 },
}

impl Default for TupleStrategy {
    fn default() -> Self {
        TupleStrategy::Exact {
            budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

impl TupleStrategy {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn sampled(sample_count: u64, seed: u64) -> Self {
        TupleStrategy::Sampled { sample_count, seed }
    }
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueKind {
    AsymptoticNormal,
    MonteCarlo,
    None,
}

/// Outcome of evaluating one statistic on one sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestResult {
    pub kind: StatisticKind,
    pub value: f64,
    pub n: usize,
    pub p_value: Option<f64>,
    pub p_method: PValueKind,
}

/// Usual empirical d.f. F_n(t) = #{X_i < t} / n (strict inequality,
/// left-continuous).
pub fn empirical_cdf(sample: &Sample, t: f64) -> f64 {
    let below = sample.values.partition_point(|&x| x < t);
    below as f64 / sample.n() as f64
}

/// Max-type V-empirical d.f. H_n(t) = F_n(t)^k.
pub fn max_vdf(sample: &Sample, k: u32, t: f64) -> Result<f64> {
    check_order(k)?;
    Ok(empirical_cdf(sample, t).powi(k as i32))
}

fn check_order(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidOrder { k });
    }
    Ok(())
}

fn tuple_count(n: usize, k: u32) -> u128 {
    (n as u128).checked_pow(k).unwrap_or(u128::MAX)
}

fn check_budget(n: usize, k: u32, budget: u64) -> Result<u128> {
    let required = tuple_count(n, k);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget,
        });
    }
    Ok(required)
}

/// All n^k weighted sums Σ_j X_{i_j}/j in exact mode, or `sample_count`
/// sums over uniformly drawn tuples in sampled mode. Sorted ascending.
pub fn weighted_sums(sample: &Sample, k: u32, strategy: &TupleStrategy) -> Result<Vec<f64>> {
    check_order(k)?;
    let mut sums = match *strategy {
        TupleStrategy::Exact { budget } => {
            check_budget(sample.n(), k, budget)?;
            let mut acc = vec![0.0f64];
            for divisor in 1..=k {
                let scaled: Vec<f64> =
                    sample.values.iter().map(|&x| x / divisor as f64).collect();
                let mut next = Vec::with_capacity(acc.len() * scaled.len());
                for &partial in &acc {
                    for &x in &scaled {
                        next.push(partial + x);
                    }
                }
                acc = next;
            }
            acc
        }
        TupleStrategy::Sampled { sample_count, seed } => {
            sampled_sums(&sample.values, k, sample_count, seed)
        }
    };
    sums.sort_by(f64::total_cmp);
    Ok(sums)
}

fn sampled_sums(values: &[f64], k: u32, sample_count: u64, seed: u64) -> Vec<f64> {
    let n = values.len();
    (0..sample_count)
        .map(|i| {
            let mut stream = substream(seed, i);
            let mut s = 0.0;
            for divisor in 1..=k {
                s += values[stream.next_index(n)] / divisor as f64;
            }
            s
        })
        .collect()
}

/// Sum-type V-empirical d.f. G_n(t): fraction of weighted sums strictly
/// below t.
pub fn sum_vdf(sample: &Sample, k: u32, t: f64, strategy: &TupleStrategy) -> Result<f64> {
    check_order(k)?;
    let counter = TupleCounter::new(sample, k, strategy)?;
    Ok(counter.count_below(t) as f64 / counter.total() as f64)
}

/// Counts weighted sums below thresholds without materializing all n^k
/// tuples: the divisors are split in two halves and the partial sums of each
/// half are sorted once, so a threshold query is a merge or a batch of
/// binary searches.
enum TupleCounter {
    Exact {
        left: Vec<f64>,
        right: Vec<f64>,
        total: u128,
    },
    Sampled {
        sums: Vec<f64>,
    },
}

impl TupleCounter {
    fn new(sample: &Sample, k: u32, strategy: &TupleStrategy) -> Result<Self> {
        check_order(k)?;
        match *strategy {
            TupleStrategy::Exact { budget } => {
                let total = check_budget(sample.n(), k, budget)?;
                let split = k / 2;
                let left = partial_sums(&sample.values, 1..=split);
                let right = partial_sums(&sample.values, split + 1..=k);
                Ok(TupleCounter::Exact { left, right, total })
            }
            TupleStrategy::Sampled { sample_count, seed } => {
                if sample_count == 0 {
                    return Err(Error::InvalidConfig(
                        "sampled tuple strategy needs sample_count >= 1".into(),
                    ));
                }
                let mut sums = sampled_sums(&sample.values, k, sample_count, seed);
                sums.sort_by(f64::total_cmp);
                Ok(TupleCounter::Sampled { sums })
            }
        }
    }

    fn total(&self) -> u128 {
        match self {
            TupleCounter::Exact { total, .. } => *total,
            TupleCounter::Sampled { sums } => sums.len() as u128,
        }
    }

    fn count_below(&self, t: f64) -> u128 {
        self.count(t, |s, t| s < t)
    }

    fn count_at_most(&self, t: f64) -> u128 {
        self.count(t, |s, t| s <= t)
    }

    fn count(&self, t: f64, pred: impl Fn(f64, f64) -> bool) -> u128 {
        match self {
            TupleCounter::Sampled { sums } => {
                sums.partition_point(|&s| pred(s, t)) as u128
            }
            TupleCounter::Exact { left, right, .. } => {
                // per-element binary search when the left side is small,
                // a single merge sweep otherwise
                let log_right = (usize::BITS - right.len().leading_zeros()) as usize;
                if left.len() * log_right < left.len() + right.len() {
                    left.iter()
                        .map(|&l| right.partition_point(|&r| pred(l + r, t)) as u128)
                        .sum()
                } else {
                    let mut idx = right.len();
                    let mut count = 0u128;
                    for &l in left {
                        while idx > 0 && !pred(l + right[idx - 1], t) {
                            idx -= 1;
                        }
                        count += idx as u128;
                    }
                    count
                }
            }
        }
    }
}

/// Sorted partial sums Σ x_{i_d}/d over the given divisor range.
fn partial_sums(values: &[f64], divisors: std::ops::RangeInclusive<u32>) -> Vec<f64> {
    let coeffs: Vec<f64> = divisors.map(|d| 1.0 / d as f64).collect();
    weighted_partial_sums(values, &coeffs)
}

/// Sorted sums Σ c_i x_{a_i} over all index tuples, for positive weights.
fn weighted_partial_sums(values: &[f64], coeffs: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0f64];
    for &c in coeffs {
        let scaled: Vec<f64> = values.iter().map(|&x| c * x).collect();
        let mut next = Vec::with_capacity(acc.len() * scaled.len());
        for &partial in &acc {
            for &x in &scaled {
                next.push(partial + x);
            }
        }
        acc = next;
    }
    acc.sort_by(f64::total_cmp);
    acc
}

/// #{(l, r) in left x right : l + r < t} for sorted arrays.
fn count_split_below(left: &[f64], right: &[f64], t: f64) -> u128 {
    let log_right = (usize::BITS - right.len().leading_zeros()) as usize;
    if left.len() * log_right < left.len() + right.len() {
        left.iter()
            .map(|&l| right.partition_point(|&r| l + r < t) as u128)
            .sum()
    } else {
        let mut idx = right.len();
        let mut count = 0u128;
        for &l in left {
            while idx > 0 && !(l + right[idx - 1] < t) {
                idx -= 1;
            }
            count += idx as u128;
        }
        count
    }
}

struct StatisticTables {
    /// distinct sample values, ascending
    distinct: Vec<f64>,
    /// multiplicity of each distinct value
    mult: Vec<usize>,
    /// #{weighted sums < d_j} for each distinct value
    sums_below: Vec<u128>,
    /// #{weighted sums <= d_j}
    sums_at_most: Vec<u128>,
    total_tuples: u128,
    n: usize,
}

fn statistic_tables(sample: &Sample, k: u32, strategy: &TupleStrategy) -> Result<StatisticTables> {
    let counter = TupleCounter::new(sample, k, strategy)?;
    let (distinct, mult) = sample.distinct();
    let sums_below = distinct.iter().map(|&d| counter.count_below(d)).collect();
    let sums_at_most = distinct.iter().map(|&d| counter.count_at_most(d)).collect();
    Ok(StatisticTables {
        distinct,
        mult,
        sums_below,
        sums_at_most,
        total_tuples: counter.total(),
        n: sample.n(),
    })
}

fn integral_from_tables(t: &StatisticTables, k: u32) -> f64 {
    let n = t.n as f64;
    let total = t.total_tuples as f64;
    let mut cum_below = 0usize;
    let mut acc = 0.0;
    for (j, &m) in t.mult.iter().enumerate() {
        let h = (cum_below as f64 / n).powi(k as i32);
        let g = t.sums_below[j] as f64 / total;
        acc += m as f64 * (h - g);
        cum_below += m;
    }
    acc / n
}

/// Integral statistic I_n = (1/n) Σ_i [H_n(X_i) - G_n(X_i)].
pub fn integral_statistic(sample: &Sample, k: u32, strategy: &TupleStrategy) -> Result<f64> {
    let tables = statistic_tables(sample, k, strategy)?;
    Ok(integral_from_tables(&tables, k))
}

fn ks_from_tables(t: &StatisticTables, k: u32) -> f64 {
    let n = t.n as f64;
    let total = t.total_tuples as f64;
    let m = t.distinct.len();

    // H and G are left-continuous steps; the difference is constant between
    // consecutive breakpoints, and within a data interval the extremes of G
    // are attained at its ends, so it suffices to compare each plateau of H
    // with the smallest and largest value G takes there.
    let mut best: f64 = 0.0;
    // before the first data value: H = 0, G climbs to #{sums < d_0}/total
    best = best.max(t.sums_below[0] as f64 / total);
    let mut cum = 0usize;
    for j in 0..m {
        cum += t.mult[j];
        let h = (cum as f64 / n).powi(k as i32);
        // just right of d_j
        let g_low = t.sums_at_most[j] as f64 / total;
        best = best.max((h - g_low).abs());
        // just left of the next data value (or the limit 1 at infinity)
        let g_high = if j + 1 < m {
            t.sums_below[j + 1] as f64 / total
        } else {
            1.0
        };
        best = best.max((h - g_high).abs());
    }
    best
}

/// Kolmogorov statistic D_n = sup_{t >= 0} |H_n(t) - G_n(t)|, computed
/// exactly from the breakpoint structure of the two step functions.
pub fn ks_statistic(sample: &Sample, k: u32, strategy: &TupleStrategy) -> Result<f64> {
    let tables = statistic_tables(sample, k, strategy)?;
    Ok(ks_from_tables(&tables, k))
}

/// Both statistics from one pass over the tuple counts; the Monte Carlo
/// engine relies on this to price each replicate once.
pub(crate) fn both_statistics(
    sample: &Sample,
    k: u32,
    strategy: &TupleStrategy,
) -> Result<(f64, f64)> {
    let tables = statistic_tables(sample, k, strategy)?;
    Ok((
        integral_from_tables(&tables, k),
        ks_from_tables(&tables, k),
    ))
}

/// (integral-family value, Kolmogorov value), with the integral slot holding
/// either the V-statistic or its U-statistic companion.
pub(crate) fn statistics_with_variant(
    sample: &Sample,
    k: u32,
    strategy: &TupleStrategy,
    u_statistic: bool,
) -> Result<(f64, f64)> {
    let (v, d) = both_statistics(sample, k, strategy)?;
    if u_statistic {
        Ok((u_integral_statistic(sample, k)?, d))
    } else {
        Ok((v, d))
    }
}

/// U-statistic companion of the integral statistic: the symmetrized kernel
/// averaged over all (k+1)-subsets of distinct indices.
///
/// Computed by inclusion–exclusion over index-coincidence patterns in
/// O(n^ceil(k/2) + n² log n) rather than by enumerating subsets; the
/// enumeration route remains available as [`u_integral_by_enumeration`].
pub fn u_integral_statistic(sample: &Sample, k: u32) -> Result<f64> {
    check_order(k)?;
    let degree = k as usize + 1;
    let n = sample.n();
    if n < degree {
        return Err(Error::InsufficientSample { n, degree });
    }
    // half-split partial sums must stay modest
    let half = (n as u128).checked_pow(k.div_ceil(2)).unwrap_or(u128::MAX);
    if k <= 8 && half <= DEFAULT_TUPLE_BUDGET as u128 {
        Ok(u_integral_fast(sample, k))
    } else {
        u_integral_by_enumeration(sample, k)
    }
}

fn falling_factorial(r: usize, terms: u32) -> f64 {
    let mut out = 1.0f64;
    for i in 0..terms as usize {
        if r < i + 1 {
            return 0.0;
        }
        out *= (r - i) as f64;
    }
    out
}

/// All set partitions of {0, .., k-1}, each as a list of blocks.
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    fn recurse(pos: usize, k: usize, used: usize, assign: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if pos == k {
            let mut blocks = vec![Vec::new(); used];
            for (item, &b) in assign.iter().enumerate() {
                blocks[b].push(item);
            }
            out.push(blocks);
            return;
        }
        for b in 0..=used.min(pos) {
            assign[pos] = b;
            recurse(pos + 1, k, used.max(b + 1), assign, out);
        }
    }
    let mut out = Vec::new();
    recurse(0, k, 0, &mut vec![0; k], &mut out);
    out
}

/// Exact U-statistic via the Möbius expansion over coincidence patterns:
/// ordered injective tuples are all tuples minus the merged ones, and every
/// merged pattern is a plain weighted-sum count with collapsed coefficients.
fn u_integral_fast(sample: &Sample, k: u32) -> f64 {
    let values = sample.values();
    let n = sample.n();
    let (distinct, mult) = sample.distinct();

    // max side: ordered injective k-tuples below X_m, per m
    let mut s_max = 0.0;
    let mut below = 0usize;
    for (j, &m) in mult.iter().enumerate() {
        let _ = j;
        s_max += m as f64 * falling_factorial(below, k);
        below += m;
    }

    // sum side: Σ_m #{ordered injective k-tuples avoiding m with
    // Σ_j X_{a_j}/j < X_m}
    let mut s_sum = 0.0;
    for partition in set_partitions(k as usize) {
        let mut mobius = 1.0f64;
        for block in &partition {
            let mut factor = 1.0;
            for i in 1..block.len() {
                factor *= i as f64;
            }
            if block.len() % 2 == 0 {
                factor = -factor;
            }
            mobius *= factor;
        }
        let coeffs: Vec<f64> = partition
            .iter()
            .map(|block| block.iter().map(|&j| 1.0 / (j + 1) as f64).sum())
            .collect();
        let blocks = coeffs.len();
        for mask in 0u32..(1 << blocks) {
            let mut sigma = 0.0;
            let mut free: Vec<f64> = Vec::with_capacity(blocks);
            for (b, &c) in coeffs.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    sigma += c;
                } else {
                    free.push(c);
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let split = free.len() / 2;
            let left = weighted_partial_sums(values, &free[..split]);
            let right = weighted_partial_sums(values, &free[split..]);
            let mut total = 0.0;
            for (&d, &m) in distinct.iter().zip(mult.iter()) {
                let t = d * (1.0 - sigma);
                total += m as f64 * count_split_below(&left, &right, t) as f64;
            }
            s_sum += mobius * sign * total;
        }
    }

    (s_max - s_sum) / falling_factorial(n, k + 1)
}

/// Direct subset enumeration of the U-statistic; O(C(n, k+1)) kernel
/// evaluations, intended for small n and as the oracle for the fast route.
pub fn u_integral_by_enumeration(sample: &Sample, k: u32) -> Result<f64> {
    check_order(k)?;
    let degree = k as usize + 1;
    let n = sample.n();
    if n < degree {
        return Err(Error::InsufficientSample { n, degree });
    }
    let values = sample.values();
    let mut indices: Vec<usize> = (0..degree).collect();
    let mut points = vec![0.0f64; degree];
    let mut sum = 0.0;
    let mut count = 0u64;
    loop {
        for (slot, &i) in indices.iter().enumerate() {
            points[slot] = values[i];
        }
        sum += kernel_psi(k, &points)?;
        count += 1;
        // next lexicographic combination
        let mut pos = degree;
        loop {
            if pos == 0 {
                return Ok(sum / count as f64);
            }
            pos -= 1;
            if indices[pos] != pos + n - degree {
                break;
            }
        }
        indices[pos] += 1;
        for j in pos + 1..degree {
            indices[j] = indices[j - 1] + 1;
        }
    }
}
