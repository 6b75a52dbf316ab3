//! Randomized checks of the vector-valued Schatten inequalities:
//! Clarkson–McCarthy, the `ℓ^p(𝔖^p)` / `𝔖^p(ℓ^r)` sandwich and the dot bound.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::conjugate;
use crate::error::{domain, Result};
use crate::linalg::schatten;
use crate::norms::{mixed_schatten_matrices, MixedOrder};
use crate::Complex64;

use super::record::CheckRecord;

/// Matrix size of the random samples.
pub const VECTOR_DIM: usize = 6;
/// Components of the random tuples in the sandwich and dot checks.
pub const TUPLE_LEN: usize = 3;
/// Relative slack allowed for rounding.
pub const VECTOR_TOL: f64 = 1e-9;

/// Worst sample of one randomized inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy)]
struct Tally {
    lhs: f64,
    rhs: f64,
    worst: f64,
    violations: usize,
    samples: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            lhs: f64::NAN,
            rhs: f64::NAN,
            worst: f64::NEG_INFINITY,
            violations: 0,
            samples: 0,
        }
    }

    fn add(&mut self, lhs: f64, rhs: f64) {
        self.samples += 1;
        if lhs - rhs > VECTOR_TOL * lhs.abs().max(rhs.abs()) {
            self.violations += 1;
        }
        let ratio = lhs / rhs;
        if ratio > self.worst || self.worst.is_nan() {
            (self.lhs, self.rhs, self.worst) = (lhs, rhs, ratio);
        }
    }

    fn record(&self, check_id: &str) -> CheckRecord {
        CheckRecord::bounded(check_id, self.lhs, self.rhs, None, VECTOR_TOL)
            .with("samples", self.samples)
            .with("violations", self.violations)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Mat<Complex64> {
    // Spread the magnitudes so that norms of different sizes get compared.
    let scale = 10f64.powf(rng.random_range(-1.0..1.0));
    Mat::from_fn(VECTOR_DIM, VECTOR_DIM, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    })
}

fn lr(values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        values.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(domain("p", p, "1 < p < ∞"))
    }
}

/// With `r = max(p, p')`, `M = (A - B, A + B)` and `N = (A, B)`:
/// `‖M‖_{ℓ^r(𝔖^p)} ≤ 2^{1/r} ‖N‖_{ℓ^{r'}(𝔖^p)}` and
/// `2^{1/r'} ‖N‖_{ℓ^r(𝔖^p)} ≤ ‖M‖_{ℓ^{r'}(𝔖^p)}`.
pub fn check_clarkson_mccarthy(p: f64, samples: usize, seed: u64) -> Result<Vec<CheckRecord>> {
    check_p(p)?;
    let r = p.max(conjugate(p));
    let rc = conjugate(r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut direct, mut reverse) = (Tally::new(), Tally::new());
    for _ in 0..samples {
        let (a, b) = (random_matrix(&mut rng), random_matrix(&mut rng));
        let n = [schatten(a.as_ref(), p)?, schatten(b.as_ref(), p)?];
        let m = [schatten((&a - &b).as_ref(), p)?, schatten((&a + &b).as_ref(), p)?];
        direct.add(lr(&m, r), 2f64.powf(1.0 / r) * lr(&n, rc));
        reverse.add(2f64.powf(1.0 / rc) * lr(&n, r), lr(&m, rc));
    }
    Ok([(direct, "clarkson_mccarthy"), (reverse, "clarkson_mccarthy_reverse")]
        .into_iter()
        .map(|(t, id)| t.record(id).with("p", p).with("r", r).with("seed", seed))
        .collect())
}

/// For `p ≥ r`: `‖A‖_{ℓ^p(𝔖^p)} ≤ ‖A‖_{𝔖^p(ℓ^r)} ≤ ‖A‖_{ℓ^r(𝔖^p)}`.
/// For `p ≤ r`: `n^{1/r - 1/p} ‖A‖_{ℓ^p(𝔖^p)} ≤ ‖A‖_{𝔖^p(ℓ^r)} ≤ ‖A‖_{ℓ^p(𝔖^p)}`.
pub fn check_vector_sandwich(p: f64, r: f64, samples: usize, seed: u64) -> Result<Vec<CheckRecord>> {
    check_p(p)?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err(domain("r", r, "1 <= r < ∞"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lower, mut upper) = (Tally::new(), Tally::new());
    let n = TUPLE_LEN as f64;
    for _ in 0..samples {
        let mats: Vec<Mat<Complex64>> = (0..TUPLE_LEN).map(|_| random_matrix(&mut rng)).collect();
        let mixed = mixed_schatten_matrices(&mats, p, r, MixedOrder::SumThenSchatten)?;
        let lp = mixed_schatten_matrices(&mats, p, p, MixedOrder::SchattenThenSum)?;
        if p >= r {
            lower.add(lp, mixed);
            upper.add(mixed, mixed_schatten_matrices(&mats, p, r, MixedOrder::SchattenThenSum)?);
        } else {
            lower.add(n.powf(1.0 / r - 1.0 / p) * lp, mixed);
            upper.add(mixed, lp);
        }
    }
    Ok([(lower, "vector_sandwich_lower"), (upper, "vector_sandwich_upper")]
        .into_iter()
        .map(|(t, id)| t.record(id).with("p", p).with("r", r).with("seed", seed))
        .collect())
}

/// `‖x·A‖_{𝔖^p} ≤ |x| ‖A‖_{𝔖^p(ℓ²)}` for real `x`.
pub fn check_dot_bound(p: f64, samples: usize, seed: u64) -> Result<CheckRecord> {
    check_p(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    for _ in 0..samples {
        let mats: Vec<Mat<Complex64>> = (0..TUPLE_LEN).map(|_| random_matrix(&mut rng)).collect();
        let x: Vec<f64> = (0..TUPLE_LEN).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut dot = Mat::<Complex64>::zeros(VECTOR_DIM, VECTOR_DIM);
        for (m, &w) in mats.iter().zip(&x) {
            dot += m * faer::Scale(Complex64::new(w, 0.0));
        }
        let length = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rhs = length * mixed_schatten_matrices(&mats, p, 2.0, MixedOrder::SumThenSchatten)?;
        tally.add(schatten(dot.as_ref(), p)?, rhs);
    }
    Ok(tally.record("vector_dot_bound").with("p", p).with("seed", seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::record::Status;

    #[test]
    fn clarkson_mccarthy_holds() {
        for p in [1.5, 2.0, 4.0] {
            for rec in check_clarkson_mccarthy(p, 200, 5).unwrap() {
                assert_eq!(rec.status, Status::Pass, "{} p={p}: {}", rec.check_id, rec.ratio);
            }
        }
    }

    #[test]
    fn clarkson_mccarthy_is_equality_in_hilbert_schmidt() {
        // At p = 2 the parallelogram law makes both sides equal.
        let recs = check_clarkson_mccarthy(2.0, 20, 1).unwrap();
        assert!((recs[0].ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_and_dot_bound_hold() {
        for p in [1.5, 3.0] {
            for r in [1.0, 2.0, 3.0] {
                for rec in check_vector_sandwich(p, r, 100, 2).unwrap() {
                    assert_eq!(rec.status, Status::Pass, "{} p={p} r={r}: {}", rec.check_id, rec.ratio);
                }
            }
            assert_eq!(check_dot_bound(p, 100, 3).unwrap().status, Status::Pass);
        }
    }

    #[test]
    fn sandwich_detects_a_wrong_direction() {
        // The reversed lower bound of the p ≥ r case fails on generic samples.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mats: Vec<Mat<Complex64>> = (0..TUPLE_LEN).map(|_| random_matrix(&mut rng)).collect();
        let mixed = mixed_schatten_matrices(&mats, 3.0, 2.0, MixedOrder::SumThenSchatten).unwrap();
        let lp = mixed_schatten_matrices(&mats, 3.0, 3.0, MixedOrder::SchattenThenSum).unwrap();
        assert!(mixed > lp * (1.0 + 1e-6));
    }

    #[test]
    fn rejects_p_one() {
        assert!(check_clarkson_mccarthy(1.0, 1, 0).is_err());
    }
}
