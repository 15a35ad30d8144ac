//! Zipf-like title popularity.
//!
//! The `i`-th most popular of `N` titles is requested with probability
//! proportional to `1 / i^alpha`, `0 < alpha < 1`. A distributed deployment
//! keeps the `k` most popular titles on local proxies, so the interesting
//! quantities are the popular mass `psi(k)` and its complement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("total_movies must be at least 1")]
    EmptyCatalog,
    #[error("popular_count must lie in 1..={total}, got {popular}")]
    PopularCount { popular: u64, total: u64 },
    #[error("zipf_exponent must lie strictly between 0 and 1, got {0}")]
    Exponent(f64),
}

/// Catalog size, number of locally cached popular titles and Zipf exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogModel {
    pub total_movies: u64,
    pub popular_count: u64,
    pub zipf_exponent: f64,
}

impl CatalogModel {
    pub fn new(
        total_movies: u64,
        popular_count: u64,
        zipf_exponent: f64,
    ) -> Result<Self, CatalogError> {
        let c = CatalogModel {
            total_movies,
            popular_count,
            zipf_exponent,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        if self.total_movies == 0 {
            return Err(CatalogError::EmptyCatalog);
        }
        if self.popular_count == 0 || self.popular_count > self.total_movies {
            return Err(CatalogError::PopularCount {
                popular: self.popular_count,
                total: self.total_movies,
            });
        }
        if !(self.zipf_exponent > 0.0 && self.zipf_exponent < 1.0) {
            return Err(CatalogError::Exponent(self.zipf_exponent));
        }
        Ok(())
    }

    fn popular_fraction(&self) -> f64 {
        self.popular_count as f64 / self.total_movies as f64
    }
}

/// Probability that a request targets one of the `k` popular titles, with
/// the Zipf weights normalised over the whole catalog.
///
/// Returns exactly `1.0` when `k == N`.
pub fn psi_exact(catalog: &CatalogModel) -> Result<f64, CatalogError> {
    catalog.validate()?;
    let alpha = catalog.zipf_exponent;
    let weight = |i: u64| (i as f64).powf(-alpha);
    // Summed smallest-first within each part to limit rounding drift.
    let head: f64 = (1..=catalog.popular_count).rev().map(weight).sum();
    let tail: f64 = (catalog.popular_count + 1..=catalog.total_movies)
        .rev()
        .map(weight)
        .sum();
    Ok(head / (head + tail))
}

/// Closed-form approximation `(k / N)^(1 - alpha)` of the popular mass.
pub fn psi_approx(catalog: &CatalogModel) -> Result<f64, CatalogError> {
    catalog.validate()?;
    Ok(catalog.popular_fraction().powf(1.0 - catalog.zipf_exponent))
}

/// Probability that a request targets a title outside the popular set,
/// `1 - (k / N)^(1 - alpha)`.
pub fn p_unpopular(catalog: &CatalogModel) -> Result<f64, CatalogError> {
    Ok(1.0 - psi_approx(catalog)?)
}

/// Largest `|psi_exact - psi_approx|` over `k` in `[ceil(N/100), N]`
/// for a catalog of `total_movies` titles.
pub fn max_approximation_error(total_movies: u64, zipf_exponent: f64) -> Result<f64, CatalogError> {
    CatalogModel::new(total_movies, total_movies, zipf_exponent)?;
    let lo = total_movies.div_ceil(100).max(1);
    let weights: Vec<f64> = (1..=total_movies)
        .map(|i| (i as f64).powf(-zipf_exponent))
        .collect();
    let norm: f64 = weights.iter().rev().sum();
    let mut head = 0.0;
    let mut worst = 0.0_f64;
    for (k, w) in (1..=total_movies).zip(&weights) {
        head += w;
        if k < lo {
            continue;
        }
        let exact = if k == total_movies { 1.0 } else { head / norm };
        let approx = (k as f64 / total_movies as f64).powf(1.0 - zipf_exponent);
        worst = worst.max((exact - approx).abs());
    }
    Ok(worst)
}
