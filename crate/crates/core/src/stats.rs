//! Moments, Kolmogorov-Smirnov distance to the normal law, chi-square
//! goodness of fit, and binomial residues.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analysis::LengthDistribution;
use crate::error::{Error, Result};

/// Standard normal distribution function, via the msun `erfc` port in
/// `libm` (error within about one ulp).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub variance: f64,
    /// `None` when the variance is zero.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub ks_to_normal: Option<f64>,
    /// Whether the moments were computed from exact rational weights.
    pub exact: bool,
}

fn shape(variance: f64, m3: f64, m4: f64) -> (Option<f64>, Option<f64>) {
    if variance > 0.0 {
        (Some(m3 / variance.powf(1.5)), Some(m4 / (variance * variance) - 3.0))
    } else {
        (None, None)
    }
}

/// Mean and central moments 2..4 of exact atoms.
pub fn exact_moments(atoms: &[(u64, BigRational)]) -> [BigRational; 4] {
    let mean: BigRational = atoms
        .iter()
        .map(|(x, p)| p * BigRational::from(BigInt::from(*x)))
        .sum();
    let mut c = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    for (x, p) in atoms {
        let d = BigRational::from(BigInt::from(*x)) - &mean;
        let d2 = &d * &d;
        c[0] += p * &d2;
        c[1] += p * &d2 * &d;
        c[2] += p * &d2 * &d2;
    }
    let [c2, c3, c4] = c;
    [mean, c2, c3, c4]
}

fn float_moments(atoms: &[(f64, f64)]) -> [f64; 4] {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mean = atoms.iter().map(|(x, p)| x * p).sum::<f64>() / total;
    let mut c = [0.0; 3];
    for (x, p) in atoms {
        let d = x - mean;
        c[0] += p * d * d;
        c[1] += p * d * d * d;
        c[2] += p * d * d * d * d;
    }
    [mean, c[0] / total, c[1] / total, c[2] / total]
}

/// `sup_x |F(x) - Phi(x)|` for the law of the atoms `(x, p)` after
/// normalising to mean 0 and variance 1. Both one-sided limits of `F` are
/// compared at every atom.
pub fn ks_to_normal(atoms: &[(f64, f64)]) -> Result<f64> {
    let [mean, var, _, _] = float_moments(atoms);
    if var.is_nan() || var <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sd = var.sqrt();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut sorted: Vec<(f64, f64)> = atoms.iter().filter(|a| a.1 > 0.0).copied().collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut before = 0.0;
    let mut ks: f64 = 0.0;
    for (x, p) in sorted {
        let phi = normal_cdf((x - mean) / sd);
        let after = before + p / total;
        ks = ks.max((before - phi).abs()).max((after - phi).abs());
        before = after;
    }
    Ok(ks.min(1.0))
}

fn stats_from(atoms: &[(f64, f64)], exact: Option<[BigRational; 4]>) -> SummaryStats {
    let [mean, variance, m3, m4] = match &exact {
        Some(m) => {
            let f = |r: &BigRational| crate::analysis::ratio_f64(r);
            [f(&m[0]), f(&m[1]), f(&m[2]), f(&m[3])]
        }
        None => float_moments(atoms),
    };
    let variance = variance.max(0.0);
    let (skewness, excess_kurtosis) = shape(variance, m3, m4);
    SummaryStats {
        mean,
        variance,
        skewness,
        excess_kurtosis,
        ks_to_normal: ks_to_normal(atoms).ok(),
        exact: exact.is_some(),
    }
}

/// Moments and KS distance of a length distribution; exact when the
/// weights are.
pub fn summarize(dist: &LengthDistribution) -> SummaryStats {
    let atoms: Vec<(f64, f64)> = dist.probabilities().iter().map(|&(l, p)| (l as f64, p)).collect();
    stats_from(&atoms, dist.exact_probabilities().map(|e| exact_moments(&e)))
}

/// [`summarize`] for explicit exact atoms.
pub fn summarize_exact(atoms: &[(u64, BigRational)]) -> SummaryStats {
    let f: Vec<(f64, f64)> = atoms
        .iter()
        .map(|(x, p)| (*x as f64, crate::analysis::ratio_f64(p)))
        .collect();
    stats_from(&f, Some(exact_moments(atoms)))
}

/// Sample statistics: unbiased variance, moment skewness and kurtosis, and
/// the KS distance of the empirical law to the fitted normal.
pub fn sample_summary(values: &[u64]) -> SummaryStats {
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for &v in values {
        *hist.entry(v).or_default() += 1;
    }
    let atoms: Vec<(f64, f64)> = hist.iter().map(|(&x, &c)| (x as f64, c as f64)).collect();
    let mut s = stats_from(&atoms, None);
    let n = values.len() as f64;
    if n > 1.0 {
        s.variance *= n / (n - 1.0);
    }
    s
}

/// Distribution of `Bin(m, p) mod modulus`, by DP over residues.
pub fn binom_mod_z<T: Num + Clone>(m: u64, p: T, modulus: usize) -> Vec<T> {
    assert!(modulus >= 1, "modulus must be positive");
    let q = T::one() - p.clone();
    let mut r = vec![T::zero(); modulus];
    r[0] = T::one();
    for _ in 0..m {
        let mut next = vec![T::zero(); modulus];
        for (z, w) in r.iter().enumerate() {
            next[z] = next[z].clone() + w.clone() * q.clone();
            let up = (z + 1) % modulus;
            next[up] = next[up].clone() + w.clone() * p.clone();
        }
        r = next;
    }
    r
}

/// Exact law of `Bin(m, p)` as `(k, P(k))` atoms.
pub fn binomial_atoms(m: u64, p: &BigRational) -> Vec<(u64, BigRational)> {
    let q = BigRational::one() - p;
    let mut row = vec![BigRational::one()];
    for _ in 0..m {
        let mut next = vec![BigRational::zero(); row.len() + 1];
        for (k, w) in row.iter().enumerate() {
            next[k] += w * &q;
            next[k + 1] += w * p;
        }
        row = next;
    }
    row.into_iter().enumerate().map(|(k, w)| (k as u64, w)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of cells after merging.
    pub cells: usize,
}

/// Pearson goodness of fit of observed values to a law given as
/// `(value, probability)` atoms. Adjacent cells are merged until every
/// expected count is at least 5; observations outside the support form a
/// cell of their own with expectation zero, which forces `p = 0`.
pub fn chi_square_gof(observed: &[u64], expected: &[(u64, f64)]) -> ChiSquare {
    let n = observed.len() as f64;
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for &v in observed {
        *hist.entry(v).or_default() += 1;
    }
    let mut outside = observed.len() as u64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for &(x, p) in expected {
        let o = hist.get(&x).copied().unwrap_or(0);
        outside -= o;
        o_acc += o as f64;
        e_acc += p * n;
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => cells.push((o_acc, e_acc)),
        }
    }
    if outside > 0 {
        return ChiSquare {
            statistic: f64::INFINITY,
            dof: cells.len(),
            p_value: 0.0,
            cells: cells.len() + 1,
        };
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).expect("positive dof");
        chi.sf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
        cells: cells.len(),
    }
}
