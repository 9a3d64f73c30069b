//! Closed forms for `G(t;m)`, `G₁(t;m)` and `G₂(t;m,p)`, evaluated exactly.
//!
//! Every evaluator works over arbitrary-precision rationals and returns an
//! [`ExactScalar`]. Deletion probabilities are taken as `f64` and converted
//! to their exact dyadic value, so `p = 0.5` is exactly one half.
//!
//! Some of these formulas are asymptotic descriptors or are known not to
//! match direct measurement on small instances (the wheel clustering and the
//! `G₂` expectation sums). They are evaluated as written; the comparison
//! against measurement lives in reports, not here.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::exact::{big, one, pow, rational_from_f64, ExactScalar};
use crate::model::{checked_pow, DegreeClass, ModelParams, Variant};
use crate::{Error, Result};

/// Exponent of the cumulative distribution, `P_cum(k) ~ k^-1`.
pub const GAMMA_ALPHA: u32 = 1;
/// Exponent of the degree distribution, `P(k) ~ k^-2`.
pub const GAMMA: u32 = GAMMA_ALPHA + 1;

fn check_m(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParams("m must be at least 2"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<BigRational> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams("p must lie in [0, 1]"));
    }
    Ok(rational_from_f64(p))
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn vertices(m: u32, t: u32) -> BigRational {
    (pow(m as u64, t + 2) - one()) / int(m as u64 - 1)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Counts {
    pub vertices: ExactScalar,
    pub edges: ExactScalar,
}

/// `|V| = (m^(t+2) - 1)/(m - 1)` and `|E| = (t+1) m^(t+1)`.
pub fn counts(m: u32, t: u32) -> Result<Counts> {
    check_m(m)?;
    Ok(Counts {
        vertices: ExactScalar::new(vertices(m, t)),
        edges: ExactScalar::new(int(t as u64 + 1) * pow(m as u64, t + 1)),
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AverageDegree {
    /// `2|E|/|V|`.
    pub value: ExactScalar,
    /// `⟨k⟩ / t`, undefined at `t = 0`.
    pub per_generation: Option<ExactScalar>,
    /// `⟨k⟩ / (t+1)`; tends to `2(m-1)/m`.
    pub per_level: ExactScalar,
    /// `2(m-1)/m`.
    pub per_level_limit: ExactScalar,
}

pub fn average_degree(m: u32, t: u32) -> Result<AverageDegree> {
    let c = counts(m, t)?;
    let value = int(2) * c.edges.exact() / c.vertices.exact();
    let per_generation = (t > 0).then(|| ExactScalar::new(&value / int(t as u64)));
    let per_level = ExactScalar::new(&value / int(t as u64 + 1));
    Ok(AverageDegree {
        value: ExactScalar::new(value),
        per_generation,
        per_level,
        per_level_limit: ExactScalar::ratio(2 * (m as i64 - 1), m as i64),
    })
}

/// Level/degree/count rows, level 0 (the hub) first.
pub fn degree_table(m: u32, t: u32) -> Result<Vec<DegreeClass>> {
    check_m(m)?;
    let mut rows = Vec::with_capacity(t as usize + 2);
    for level in 0..=t {
        rows.push(DegreeClass {
            level,
            degree: checked_pow(m as u128, t + 1 - level)?,
            count: checked_pow(m as u128, level)?,
        });
    }
    rows.push(DegreeClass { level: t + 1, degree: t as u128 + 1, count: checked_pow(m as u128, t + 1)? });
    Ok(rows)
}

/// The two-branch power-law descriptor of the cumulative distribution:
/// `1/k` above the bottom degree `t+1`, and `1/k + 1/2` at or below it.
///
/// This is an asymptotic form. For the exact fraction of vertices with
/// degree at least `k` use [`cumulative_distribution_exact`].
pub fn cumulative_distribution_asymptotic(t: u32, k: u64) -> f64 {
    let base = 1.0 / k as f64;
    if k > t as u64 + 1 {
        base
    } else {
        base + 0.5
    }
}

/// Exact `P_cum(k' ≥ k)` of `G(t;m)`, counted from the degree table.
pub fn cumulative_distribution_exact(m: u32, t: u32, k: u128) -> Result<ExactScalar> {
    let table = degree_table(m, t)?;
    let at_least: u128 = table.iter().filter(|c| c.degree >= k).map(|c| c.count).sum();
    Ok(ExactScalar::new(big(at_least) / vertices(m, t)))
}

/// Diameter implied by the construction.
///
/// For `t ≥ 1` every variant has diameter 4. At `t = 0` the seed is
/// returned as is: the star has diameter 2, the wheel has diameter 1 when
/// it is complete (`m ≤ 3`) and 2 otherwise. A partially deleted `m ≤ 3`
/// wheel seed depends on which rim edges survived, so `None` is returned.
pub fn diameter_closed_form(variant: &Variant, m: u32, t: u32) -> Option<u32> {
    if t >= 1 {
        return Some(4);
    }
    let wheel = if m <= 3 { 1 } else { 2 };
    match *variant {
        Variant::Base => Some(2),
        Variant::WheelSeed => Some(wheel),
        Variant::WheelDeleted { p, .. } if p == 0.0 => Some(wheel),
        Variant::WheelDeleted { p, .. } if p == 1.0 || m >= 4 => Some(2),
        Variant::WheelDeleted { .. } => None,
    }
}

/// `Σ_{i=0}^{t} 2 m^(t-i) / (m^(i+1) - 1)`, shared by both clustering forms.
fn clustering_level_sum(m: u32, t: u32) -> BigRational {
    (0..=t)
        .map(|i| int(2) * pow(m as u64, t - i) / (pow(m as u64, i + 1) - one()))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Average clustering of `G₁(t;m)` as given by the closed form
/// `[Σ_i 2m^(t-i)/(m^(i+1)-1) + 2(t+1)m^(t+1)/((t+3)(t+2))] / |V|`.
pub fn clustering_c1(m: u32, t: u32) -> Result<ExactScalar> {
    check_m(m)?;
    let t1 = t as u64;
    let bottom = int(2 * (t1 + 1)) * pow(m as u64, t + 1) / int((t1 + 3) * (t1 + 2));
    Ok(ExactScalar::new((clustering_level_sum(m, t) + bottom) / vertices(m, t)))
}

/// Expected average clustering of `G₂(t;m,p)` as given by its closed form.
pub fn clustering_c2_expected(m: u32, t: u32, p: f64) -> Result<ExactScalar> {
    check_m(m)?;
    let p = check_p(p)?;
    let q = one() - &p;
    let t1 = t as u64;
    let bracket = &q * &q * int(2 * (t1 + 1)) / int((t1 + 3) * (t1 + 2)) + int(2) * &p * &q / int(t1 + 2);
    let num = &q * clustering_level_sum(m, t) + bracket * pow(m as u64, t + 1);
    Ok(ExactScalar::new(num / vertices(m, t)))
}

/// Degree assortativity of `G(t;m)`, closed form.
pub fn assortativity_r(m: u32, t: u32) -> Result<ExactScalar> {
    check_m(m)?;
    let (mm, t1) = (m as u64, t as u64);
    let a = (pow(mm, t + 2) - int(mm)) / int(mm - 1);
    let mean = BigRational::new(BigInt::from(t1 + 1), BigInt::from(2u32))
        + (pow(mm, t + 2) - int(mm)) / int((2 * mm - 2) * (t1 + 1));
    let mean_sq = &mean * &mean;
    let second = BigRational::new(BigInt::from((t1 + 1) * (t1 + 1)), BigInt::from(2u32))
        + (pow(mm, 2 * t + 4) - int(mm * mm)) / int((2 * mm * mm - 2) * (t1 + 1));
    Ok(ExactScalar::new((a - &mean_sq) / (second - mean_sq)))
}

/// Combines edge count and the three endpoint-degree sums into the Pearson
/// degree correlation. `None` when the denominator vanishes.
pub fn pearson_from_sums(
    edges: &BigRational,
    sum_product: &BigRational,
    sum_plus: &BigRational,
    sum_squares: &BigRational,
) -> Option<BigRational> {
    if edges.is_zero() {
        return None;
    }
    let half_mean = sum_plus / (int(2) * edges);
    let hm_sq = &half_mean * &half_mean;
    let den = sum_squares / (int(2) * edges) - &hm_sq;
    if den.is_zero() {
        return None;
    }
    Some((sum_product / edges - hm_sq) / den)
}

/// The four expectation formulas for `G₂(t;m,p)` and the assortativity
/// obtained by feeding them into the Pearson statistic.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct G2Expectations {
    /// `E|E₂| = m^(t+1)(t+2-p)`.
    pub edges: ExactScalar,
    /// `E[Σ k_i k_j]`.
    pub sum_product: ExactScalar,
    /// `E[Σ (k_i + k_j)]`.
    pub sum_plus: ExactScalar,
    /// `E[Σ (k_i² + k_j²)]`.
    pub sum_squares: ExactScalar,
    /// `None` when the combined denominator is zero.
    pub r2: Option<ExactScalar>,
}

/// Evaluates the closed-form expectation sums for the deleted variant term by term.
pub fn g2_expected_sums(m: u32, t: u32, p: f64) -> Result<G2Expectations> {
    check_m(m)?;
    let p = check_p(p)?;
    let q = one() - &p;
    let (mm, t1) = (m as u64, t as u64);
    let top = pow(mm, t + 1);
    let ti = |k: u64| int(t1 + k);
    let sq = |x: BigRational| &x * &x;
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    let q4 = &q2 * &q2;
    let p2 = &p * &p;
    let levels = t as usize + 1;

    let edges = &top * (ti(2) - &p);

    // Σ_i over summands that do not depend on i.
    let mixed = &p2 * ti(1) + int(2) * &p * &q * ti(2);
    let sum_product = &top * (0..levels).map(|_| mixed.clone()).fold(BigRational::zero(), |a, b| a + b)
        + &top * (0..levels).map(|_| &q2 * ti(3)).fold(BigRational::zero(), |a, b| a + b)
        + &q4 * sq(ti(3)) * &top
        + int(4) * &p * &q2 * (&p * sq(ti(2)) + &q * ti(2) * ti(3)) * &top;

    let powers: Vec<BigRational> = (0..=t).map(|i| pow(mm, i)).collect();
    let sum_over = |f: &dyn Fn(&BigRational, u32) -> BigRational| {
        powers.iter().zip(0u32..).map(|(mi, i)| f(mi, i)).fold(BigRational::zero(), |a, b| a + b)
    };

    let sum_plus = &top * ti(1)
        + sum_over(&|mi, _| &q2 * ti(3) * mi)
        + sum_over(&|mi, _| mi * &mixed)
        + int(4) * &p * &q2 * (&p * int(2 * t1 + 4) + &q * int(2 * t1 + 5)) * &top
        + &q4 * int(2 * t1 + 6) * &top;

    let mixed_sq = &p2 * sq(ti(1)) + int(2) * &p * &q * sq(ti(2));
    let sum_squares = &top * sum_over(&|_, i| pow(mm, i + 1))
        + sum_over(&|mi, _| &q2 * sq(ti(3)) * mi)
        + sum_over(&|mi, _| mi * &mixed_sq)
        + int(2) * &q2 * (int(4) * &p2 * sq(ti(2)) + &q2 * sq(ti(3))) * &top
        + int(4) * &p * &q3 * (sq(ti(2)) + sq(ti(3))) * &top;

    let r2 = pearson_from_sums(&edges, &sum_product, &sum_plus, &sum_squares).map(ExactScalar::new);
    Ok(G2Expectations {
        edges: ExactScalar::new(edges),
        sum_product: ExactScalar::new(sum_product),
        sum_plus: ExactScalar::new(sum_plus),
        sum_squares: ExactScalar::new(sum_squares),
        r2,
    })
}

/// Trapping-problem closed forms with the trap on the hub of `G(t;m)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HittingClosedForms {
    /// Expected steps from any bottom vertex: `2t+1`.
    pub bottom: u64,
    /// Expected steps from any vertex on levels `1..=t`: `2t+2`. `None` at
    /// `t = 0`, where those levels are empty.
    pub intermediate: Option<u64>,
    /// Mean over all non-trap vertices.
    pub mean: ExactScalar,
    /// `mean / ln|V|`, which tends to `2 / ln m`.
    pub mean_over_ln_vertices: f64,
}

pub fn hitting_closed_forms(m: u32, t: u32) -> Result<HittingClosedForms> {
    check_m(m)?;
    let t1 = t as u64;
    let bottom = 2 * t1 + 1;
    let intermediate_pop = (1..=t).map(|l| pow(m as u64, l)).fold(BigRational::zero(), |a, b| a + b);
    let total = int(bottom + 1) * intermediate_pop + int(bottom) * pow(m as u64, t + 1);
    let v = vertices(m, t);
    let mean = ExactScalar::new(total / (&v - one()));
    let ln_v = libm::log(crate::exact::rational_to_f64(&v));
    Ok(HittingClosedForms {
        bottom,
        intermediate: (t >= 1).then_some(bottom + 1),
        mean_over_ln_vertices: mean.to_f64() / ln_v,
        mean,
    })
}

/// Every closed-form quantity for one parameter set.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClosedFormReport {
    pub params: ModelParams,
    pub vertices: ExactScalar,
    /// Edge count of `G(t;m)`.
    pub edges: ExactScalar,
    /// Edge count of the requested variant (expected value for `G₂`).
    pub variant_edges: ExactScalar,
    pub average_degree: AverageDegree,
    pub diameter: Option<u32>,
    pub gamma_alpha: u32,
    pub gamma: u32,
    pub clustering_base: ExactScalar,
    pub clustering_c1: ExactScalar,
    pub clustering_c2_expected: Option<ExactScalar>,
    pub assortativity_r: ExactScalar,
    pub g2: Option<G2Expectations>,
    pub hitting: HittingClosedForms,
}

pub fn closed_form_report(params: &ModelParams) -> Result<ClosedFormReport> {
    params.validate()?;
    let (m, t) = (params.m, params.t);
    let c = counts(m, t)?;
    let rim = if m == 2 { pow(2, t) } else { pow(m as u64, t + 1) };
    let variant_edges = match params.variant {
        Variant::Base => c.edges.clone(),
        Variant::WheelSeed => ExactScalar::new(c.edges.exact() + rim),
        Variant::WheelDeleted { p, .. } => ExactScalar::new(c.edges.exact() + rim * (one() - rational_from_f64(p))),
    };
    let p = params.variant.deletion_probability();
    Ok(ClosedFormReport {
        params: *params,
        vertices: c.vertices,
        edges: c.edges,
        variant_edges,
        average_degree: average_degree(m, t)?,
        diameter: diameter_closed_form(&params.variant, m, t),
        gamma_alpha: GAMMA_ALPHA,
        gamma: GAMMA,
        clustering_base: ExactScalar::new(BigRational::zero()),
        clustering_c1: clustering_c1(m, t)?,
        clustering_c2_expected: p.map(|p| clustering_c2_expected(m, t, p)).transpose()?,
        assortativity_r: assortativity_r(m, t)?,
        g2: p.map(|p| g2_expected_sums(m, t, p)).transpose()?,
        hitting: hitting_closed_forms(m, t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactScalar {
        ExactScalar::ratio(n, d)
    }

    #[test]
    fn counts_examples() {
        let c = counts(2, 0).unwrap();
        assert_eq!((c.vertices, c.edges), (r(3, 1), r(2, 1)));
        let c = counts(2, 2).unwrap();
        assert_eq!((c.vertices, c.edges), (r(15, 1), r(24, 1)));
        let c = counts(3, 1).unwrap();
        assert_eq!((c.vertices, c.edges), (r(13, 1), r(18, 1)));
        assert!(counts(1, 0).is_err());
    }

    #[test]
    fn average_degree_examples() {
        assert_eq!(average_degree(2, 1).unwrap().value, r(16, 7));
        let a0 = average_degree(2, 0).unwrap();
        assert_eq!(a0.value, r(4, 3));
        assert!(a0.per_generation.is_none());
        for m in 2..6 {
            let a = average_degree(m, 50).unwrap();
            let rel = (a.per_level.to_f64() - a.per_level_limit.to_f64()).abs() / a.per_level_limit.to_f64();
            assert!(rel < 0.02, "m={m} rel={rel}");
        }
    }

    #[test]
    fn degree_table_examples() {
        let row = |level, degree, count| DegreeClass { level, degree, count };
        assert_eq!(degree_table(2, 1).unwrap(), [row(0, 4, 1), row(1, 2, 2), row(2, 2, 4)]);
        assert_eq!(degree_table(3, 0).unwrap(), [row(0, 3, 1), row(1, 1, 3)]);
        assert_eq!(degree_table(2, 2).unwrap(), [row(0, 8, 1), row(1, 4, 2), row(2, 2, 4), row(3, 3, 8)]);
    }

    #[test]
    fn cumulative_examples() {
        for t in 0..5 {
            assert_eq!(cumulative_distribution_asymptotic(t, 1), 1.5);
        }
        assert_eq!(cumulative_distribution_asymptotic(1, 4), 0.25);
        assert_eq!(cumulative_distribution_exact(2, 1, 4).unwrap(), r(1, 7));
        assert_eq!(cumulative_distribution_asymptotic(12, 1 << 13), 1.0 / 8192.0);
        assert_eq!(cumulative_distribution_exact(2, 1, 1).unwrap(), r(1, 1));
        assert_eq!(GAMMA, 2);
    }

    #[test]
    fn diameter_cases() {
        assert_eq!(diameter_closed_form(&Variant::Base, 2, 0), Some(2));
        assert_eq!(diameter_closed_form(&Variant::WheelSeed, 3, 0), Some(1));
        assert_eq!(diameter_closed_form(&Variant::WheelSeed, 5, 0), Some(2));
        for t in 1..8 {
            assert_eq!(diameter_closed_form(&Variant::Base, 3, t), Some(4));
        }
        let del = Variant::WheelDeleted { p: 0.3, seed: 1 };
        assert_eq!(diameter_closed_form(&del, 3, 2), Some(4));
        assert_eq!(diameter_closed_form(&del, 3, 0), None);
        assert_eq!(diameter_closed_form(&del, 4, 0), Some(2));
    }

    #[test]
    fn clustering_c1_hand_values() {
        assert_eq!(clustering_c1(3, 0).unwrap(), r(1, 2));
        assert_eq!(clustering_c1(2, 0).unwrap(), r(8, 9));
    }

    #[test]
    fn clustering_c2_reductions() {
        for (m, t) in [(2, 0), (2, 3), (3, 2), (5, 4)] {
            assert_eq!(clustering_c2_expected(m, t, 0.0).unwrap(), clustering_c1(m, t).unwrap());
            assert_eq!(clustering_c2_expected(m, t, 1.0).unwrap(), ExactScalar::zero());
        }
        assert!(clustering_c2_expected(2, 1, 1.01).is_err());
    }

    #[test]
    fn assortativity_values() {
        for m in 2..9 {
            assert_eq!(assortativity_r(m, 0).unwrap(), r(-1, 1));
        }
        assert_eq!(assortativity_r(2, 1).unwrap(), r(-1, 3));
    }

    #[test]
    fn g2_edge_reductions() {
        for (m, t) in [(3, 0), (3, 3), (4, 2)] {
            let top = (m as i64).pow(t + 1);
            assert_eq!(g2_expected_sums(m, t, 0.0).unwrap().edges, r(top * (t as i64 + 2), 1));
            assert_eq!(g2_expected_sums(m, t, 1.0).unwrap().edges, r(top * (t as i64 + 1), 1));
        }
        assert_eq!(g2_expected_sums(3, 3, 0.5).unwrap().edges, r(729, 2));
    }

    #[test]
    fn hitting_examples() {
        let h = hitting_closed_forms(2, 0).unwrap();
        assert_eq!((h.bottom, h.intermediate, h.mean.clone()), (1, None, r(1, 1)));
        let h = hitting_closed_forms(2, 1).unwrap();
        assert_eq!((h.bottom, h.intermediate, h.mean.clone()), (3, Some(4), r(10, 3)));
        let h = hitting_closed_forms(2, 2).unwrap();
        assert_eq!((h.bottom, h.intermediate, h.mean.clone()), (5, Some(6), r(38, 7)));
    }

    #[test]
    fn report_assembles() {
        let rep = closed_form_report(&ModelParams::deleted(3, 3, 0.5, 1)).unwrap();
        assert_eq!(rep.variant_edges, r(729, 2));
        assert!(rep.g2.is_some() && rep.clustering_c2_expected.is_some());
        let rep = closed_form_report(&ModelParams::wheel(2, 2)).unwrap();
        assert_eq!(rep.variant_edges, r(24 + 4, 1));
    }
}
