//! Size and average-degree estimators computed from a walk record.
//!
//! Size estimators examine ordered sample pairs `(k, l)`, `k ≠ l`, whose
//! positions are at least `m` apart. With `w` the public-degree and `d` the
//! degree of a sample:
//!
//! ```text
//! Φ  = mean of 1[x_k = x_l]
//! Ψ  = mean of w_k / w_l          n_nc  = Ψ / Φ   (node-collision estimator)
//! Ψ̂  = mean of d_k / w_l          n_hat = Ψ̂ / Φ
//! ```
//!
//! The average degree is estimated by harmonic means: `r / Σ 1/w` (smooth
//! estimator, smoothing constant 0) and `r / Σ 1/d`.
//!
//! The pair sums are evaluated in O(r log r): weight sums factor into prefix
//! sums over the band `|k − l| ≥ m`, and collisions are counted per node from
//! its sorted occurrence positions.

use thiserror::Error;

use crate::graph::NodeId;
use crate::numeric::{self, CompensatedSum};
use crate::walker::WalkRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("no sample pair at distance >= {m} collides; the size estimate is undefined")]
    NoCollision { m: usize },
    #[error("collision gap m = {m} must satisfy 1 <= m < r = {r}")]
    InvalidGap { m: usize, r: usize },
    #[error("sample {index} has public-degree {value}, it cannot be a denominator")]
    ZeroPublicDegree { index: usize, value: f64 },
    #[error("sample {index} has degree 0")]
    ZeroDegree { index: usize },
    #[error("record is empty")]
    EmptyRecord,
}

/// Default collision gap: 2.5% of the sample size, rounded up.
pub fn default_gap(r: usize) -> usize {
    gap_for_fraction(r, 0.025)
}

/// `⌈fraction · r⌉`, at least 1.
pub fn gap_for_fraction(r: usize, fraction: f64) -> usize {
    // Trim float noise so that e.g. 0.025 · 1000 stays 25.
    let raw = fraction * r as f64;
    let rounded = raw.round();
    let m = if (raw - rounded).abs() < 1e-9 * raw.max(1.0) { rounded } else { raw.ceil() };
    (m as usize).max(1)
}

/// Output of the two size estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeEstimates {
    /// Φ, collision frequency.
    pub collision_mean: f64,
    /// Ψ, mean of public-degree ratios.
    pub weight_mean_prior: f64,
    /// Ψ̂, mean of degree over public-degree.
    pub weight_mean_proposed: f64,
    pub n_nc: f64,
    pub n_hat: f64,
    pub m: usize,
    /// |I|, number of ordered pairs.
    pub pair_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageDegreeEstimates {
    pub davg_smooth: f64,
    pub davg_hat: f64,
}

/// Everything the estimators derive from one record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub size: SizeEstimates,
    pub degree: AverageDegreeEstimates,
    pub p_hat_n: f64,
    pub p_hat_avg: f64,
    pub r: usize,
}

impl EstimateReport {
    pub fn n_nc(&self) -> f64 {
        self.size.n_nc
    }

    pub fn n_hat(&self) -> f64 {
        self.size.n_hat
    }

    pub fn davg_smooth(&self) -> f64 {
        self.degree.davg_smooth
    }

    pub fn davg_hat(&self) -> f64 {
        self.degree.davg_hat
    }
}

/// Number of ordered pairs in `1..=r` at distance at least `m`.
pub fn ordered_pair_count(r: usize, m: usize) -> u64 {
    if m >= r {
        return 0;
    }
    let span = (r - m) as u64;
    span * (span + 1)
}

/// Checks that every sample that appears as a denominator is positive.
fn check_denominators(values: impl Iterator<Item = f64>, r: usize, m: usize) -> Result<(), EstimateError> {
    for (index, value) in values.enumerate() {
        // Position l has a partner iff l - m >= 0 or l + m < r.
        let paired = index >= m || index + m < r;
        if paired && (value.is_nan() || value <= 0.0) {
            return Err(EstimateError::ZeroPublicDegree { index, value });
        }
    }
    Ok(())
}

/// Σ over ordered pairs with |k − l| ≥ m of `num[k] · inv[l]`, via prefix sums.
fn banded_product_sum(num: &[f64], inv: &[f64], m: usize) -> f64 {
    let r = num.len();
    // prefix[i] = Σ_{k < i} num[k]
    let mut prefix = Vec::with_capacity(r + 1);
    let mut acc = CompensatedSum::new();
    prefix.push(0.0);
    for &x in num {
        acc.add(x);
        prefix.push(acc.value());
    }
    let total = prefix[r];
    let mut sum = CompensatedSum::new();
    for (l, &g) in inv.iter().enumerate() {
        let mut partners = 0.0;
        if l >= m {
            partners += prefix[l - m + 1];
        }
        if l + m < r {
            partners += total - prefix[l + m];
        }
        sum.add(g * partners);
    }
    sum.value()
}

/// Number of ordered colliding pairs at distance at least `m`.
fn collision_count(nodes: &[NodeId], m: usize) -> u64 {
    let mut order: Vec<(NodeId, u32)> = nodes
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as u32))
        .collect();
    order.sort_unstable();
    let mut unordered = 0u64;
    let mut start = 0;
    while start < order.len() {
        let node = order[start].0;
        let mut end = start;
        while end < order.len() && order[end].0 == node {
            end += 1;
        }
        // Positions are sorted; count pairs with gap >= m by a moving pointer.
        let positions = &order[start..end];
        let mut j = 0;
        for i in 0..positions.len() {
            if j < i + 1 {
                j = i + 1;
            }
            while j < positions.len() && (positions[j].1 - positions[i].1) < m as u32 {
                j += 1;
            }
            unordered += (positions.len() - j) as u64;
        }
        start = end;
    }
    2 * unordered
}

/// Φ, Ψ, Ψ̂ and the two size estimates for gap `m`.
pub fn size_estimates(record: &WalkRecord, m: usize) -> Result<SizeEstimates, EstimateError> {
    let r = record.len();
    if r == 0 {
        return Err(EstimateError::EmptyRecord);
    }
    if m == 0 || m >= r {
        return Err(EstimateError::InvalidGap { m, r });
    }
    let samples = record.samples();
    check_denominators(samples.iter().map(|s| s.public_degree), r, m)?;

    let public: Vec<f64> = samples.iter().map(|s| s.public_degree).collect();
    let degree: Vec<f64> = samples.iter().map(|s| s.degree as f64).collect();
    let inverse: Vec<f64> = public.iter().map(|&w| if w > 0.0 { 1.0 / w } else { 0.0 }).collect();
    let nodes: Vec<NodeId> = samples.iter().map(|s| s.node).collect();

    let pairs = ordered_pair_count(r, m);
    let pairs_f = pairs as f64;
    let collisions = collision_count(&nodes, m);
    let phi = collisions as f64 / pairs_f;
    let psi = banded_product_sum(&public, &inverse, m) / pairs_f;
    let psi_hat = banded_product_sum(&degree, &inverse, m) / pairs_f;
    if collisions == 0 {
        return Err(EstimateError::NoCollision { m });
    }
    Ok(SizeEstimates {
        collision_mean: phi,
        weight_mean_prior: psi,
        weight_mean_proposed: psi_hat,
        // Ratios of sums; the 1/|I| factors cancel exactly.
        n_nc: psi / phi,
        n_hat: psi_hat / phi,
        m,
        pair_count: pairs,
    })
}

/// Harmonic-mean average-degree estimates.
pub fn avg_degree_estimates(record: &WalkRecord) -> Result<AverageDegreeEstimates, EstimateError> {
    let r = record.len();
    if r == 0 {
        return Err(EstimateError::EmptyRecord);
    }
    let mut inv_public = CompensatedSum::new();
    let mut inv_degree = CompensatedSum::new();
    for (index, s) in record.samples().iter().enumerate() {
        if s.public_degree.is_nan() || s.public_degree <= 0.0 {
            return Err(EstimateError::ZeroPublicDegree { index, value: s.public_degree });
        }
        if s.degree == 0 {
            return Err(EstimateError::ZeroDegree { index });
        }
        inv_public.add(1.0 / s.public_degree);
        inv_degree.add(1.0 / s.degree as f64);
    }
    Ok(AverageDegreeEstimates {
        davg_smooth: r as f64 / inv_public.value(),
        davg_hat: r as f64 / inv_degree.value(),
    })
}

/// `(p̂_n, p̂_avg) = (1 − n_nc/n_hat, 1 − davg_smooth/davg_hat)`, unclamped.
pub fn estimate_privacy_rate(size: &SizeEstimates, degree: &AverageDegreeEstimates) -> (f64, f64) {
    (1.0 - size.n_nc / size.n_hat, estimate_privacy_rate_avg(degree))
}

/// p̂_avg alone; available even when the size estimators saw no collision.
pub fn estimate_privacy_rate_avg(degree: &AverageDegreeEstimates) -> f64 {
    1.0 - degree.davg_smooth / degree.davg_hat
}

/// Runs all estimators on a record.
pub fn estimate(record: &WalkRecord, m: usize) -> Result<EstimateReport, EstimateError> {
    let size = size_estimates(record, m)?;
    let degree = avg_degree_estimates(record)?;
    let (p_hat_n, p_hat_avg) = estimate_privacy_rate(&size, &degree);
    Ok(EstimateReport { size, degree, p_hat_n, p_hat_avg, r: record.len() })
}

/// Literal O(r²) evaluation of (Φ, Ψ, Ψ̂) over ordered pairs. Reference
/// implementation for checking [`size_estimates`]; too slow for real walks.
pub fn size_sums_quadratic(record: &WalkRecord, m: usize) -> (f64, f64, f64) {
    let s = record.samples();
    let r = s.len();
    let mut phi = 0u64;
    let mut psi = Vec::new();
    let mut psi_hat = Vec::new();
    for k in 0..r {
        for l in 0..r {
            if k.abs_diff(l) < m || k == l {
                continue;
            }
            if s[k].node == s[l].node {
                phi += 1;
            }
            psi.push(s[k].public_degree / s[l].public_degree);
            psi_hat.push(s[k].degree as f64 / s[l].public_degree);
        }
    }
    let pairs = psi.len() as f64;
    (phi as f64 / pairs, numeric::sum(psi) / pairs, numeric::sum(psi_hat) / pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walker::{PublicDegreeMode, Sample};

    fn record(samples: &[(NodeId, u32, f64)]) -> WalkRecord {
        WalkRecord::from_samples(
            samples
                .iter()
                .map(|&(node, degree, public_degree)| Sample { node, degree, public_degree })
                .collect(),
            PublicDegreeMode::ExactIdeal,
        )
    }

    #[test]
    fn single_node_saturates() {
        let rec = record(&[(3, 4, 4.0); 20]);
        let s = size_estimates(&rec, 2).unwrap();
        assert_eq!(s.collision_mean, 1.0);
        assert_eq!(s.weight_mean_prior, 1.0);
        assert_eq!(s.weight_mean_proposed, 1.0);
        assert_eq!((s.n_nc, s.n_hat), (1.0, 1.0));
        let d = avg_degree_estimates(&rec).unwrap();
        assert_eq!((d.davg_smooth, d.davg_hat), (4.0, 4.0));
    }

    #[test]
    fn pair_count_formula() {
        for r in 2..40 {
            for m in 1..r {
                let brute = (0..r)
                    .flat_map(|k| (0..r).map(move |l| (k, l)))
                    .filter(|&(k, l): &(usize, usize)| k.abs_diff(l) >= m)
                    .count() as u64;
                assert_eq!(ordered_pair_count(r, m), brute);
            }
        }
    }

    #[test]
    fn default_gap_is_two_and_a_half_percent() {
        assert_eq!(default_gap(1_016_275), 25_407);
        assert_eq!(default_gap(1000), 25);
        assert_eq!(default_gap(100), 3);
        assert_eq!(default_gap(10), 1);
    }

    #[test]
    fn errors() {
        let rec = record(&[(0, 2, 1.0), (1, 2, 1.0), (2, 2, 1.0), (3, 2, 1.0)]);
        assert_eq!(size_estimates(&rec, 1).unwrap_err(), EstimateError::NoCollision { m: 1 });
        assert_eq!(size_estimates(&rec, 4).unwrap_err(), EstimateError::InvalidGap { m: 4, r: 4 });
        assert_eq!(size_estimates(&rec, 0).unwrap_err(), EstimateError::InvalidGap { m: 0, r: 4 });
        let zero = record(&[(0, 2, 0.0), (1, 2, 1.0), (0, 2, 1.0)]);
        assert!(matches!(size_estimates(&zero, 1), Err(EstimateError::ZeroPublicDegree { index: 0, .. })));
        assert!(matches!(avg_degree_estimates(&zero), Err(EstimateError::ZeroPublicDegree { .. })));
        // A middle sample without partners may have zero public-degree.
        let unpaired = record(&[(0, 2, 1.0), (1, 2, 0.0), (0, 2, 1.0)]);
        assert!(size_estimates(&unpaired, 2).is_ok());
    }

    #[test]
    fn all_public_estimates_coincide() {
        let rec = record(&[(0, 3, 3.0), (1, 1, 1.0), (0, 3, 3.0), (2, 2, 2.0), (1, 1, 1.0), (0, 3, 3.0)]);
        let report = estimate(&rec, 1).unwrap();
        assert_eq!(report.n_nc(), report.n_hat());
        assert_eq!(report.davg_smooth(), report.davg_hat());
        assert_eq!(report.p_hat_n, 0.0);
        assert_eq!(report.p_hat_avg, 0.0);
    }

    #[test]
    fn matches_quadratic_on_small_record() {
        let rec = record(&[
            (0, 5, 2.0), (1, 3, 3.0), (0, 5, 2.0), (2, 4, 1.5), (1, 3, 3.0),
            (3, 6, 4.0), (0, 5, 2.0), (2, 4, 1.5), (3, 6, 4.0), (1, 3, 3.0),
        ]);
        for m in 1..10 {
            let (phi, psi, psi_hat) = size_sums_quadratic(&rec, m);
            match size_estimates(&rec, m) {
                Ok(s) => {
                    assert!((s.collision_mean - phi).abs() <= 1e-12 * phi);
                    assert!((s.weight_mean_prior - psi).abs() <= 1e-12 * psi);
                    assert!((s.weight_mean_proposed - psi_hat).abs() <= 1e-12 * psi_hat);
                }
                Err(EstimateError::NoCollision { .. }) => assert_eq!(phi, 0.0),
                Err(e) => panic!("{e}"),
            }
        }
    }
}
