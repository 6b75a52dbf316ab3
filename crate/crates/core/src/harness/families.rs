use std::fmt;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::PhasePoint;
use crate::error::{domain, Error, Result};
use crate::grid::{sample_symbol, PhaseGrid};
use crate::linalg::top_eigenpairs;
use crate::operator::KernelOperator;
use crate::quantization::{coherent_state, toplitz_quantize};
use crate::Complex64;

/// Largest rank a family may request.
pub const MAX_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKind {
    /// Töplitz quantization of a Gaussian of width `w √ħ`.
    ToplitzGaussian,
    /// Töplitz quantization of `(1 + |z / (w √ħ)|⁴)^{-1}`, the profile of the
    /// Sobolev optimizer for `(s, p) = (1/2, 4/3)`.
    ToplitzSobolevOptimizer,
    /// Random combinations of coherent states at lattice centers.
    RandomLowrankBandlimited,
    /// `h^{-1} Σ_{n < rank} |φ_n⟩⟨φ_n|` for Hermite functions of scale `w √ħ`.
    HermiteProjection,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::ToplitzGaussian,
        FamilyKind::ToplitzSobolevOptimizer,
        FamilyKind::RandomLowrankBandlimited,
        FamilyKind::HermiteProjection,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            FamilyKind::ToplitzGaussian => "toplitz-gaussian",
            FamilyKind::ToplitzSobolevOptimizer => "toplitz-sobolev-optimizer",
            FamilyKind::RandomLowrankBandlimited => "random-lowrank-bandlimited",
            FamilyKind::HermiteProjection => "hermite-projection",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == s)
    }

    fn index(&self) -> u64 {
        Self::ALL.iter().position(|k| k == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A family of test operators, one per grid.
///
/// Widths scale with `√ħ` and random draws do not depend on the grid, so the
/// same family evaluated along an ħ-sweep gives comparable operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    pub kind: FamilyKind,
    pub rank: usize,
    pub width: f64,
    pub seed: u64,
}

impl OperatorFamily {
    pub fn new(kind: FamilyKind, rank: usize, width: f64, seed: u64) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(domain("rank", rank as f64, "1 <= rank <= 8"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(domain("width", width, "finite width > 0"));
        }
        Ok(Self { kind, rank, width, seed })
    }

    pub fn default_for(kind: FamilyKind) -> Self {
        let (rank, width) = match kind {
            FamilyKind::ToplitzGaussian => (8, 1.0),
            FamilyKind::ToplitzSobolevOptimizer => (8, 1.0),
            FamilyKind::RandomLowrankBandlimited => (4, 1.5),
            FamilyKind::HermiteProjection => (3, 1.0),
        };
        Self {
            kind,
            rank,
            width,
            seed: 0,
        }
    }

    pub fn defaults() -> Vec<Self> {
        FamilyKind::ALL.into_iter().map(Self::default_for).collect()
    }

    fn rng(&self, run_seed: u64) -> ChaCha8Rng {
        let mixed = run_seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(self.seed.rotate_left(17))
            .wrapping_add(self.kind.index());
        ChaCha8Rng::seed_from_u64(mixed)
    }

    /// The family member on `grid`.
    pub fn generate(&self, grid: &PhaseGrid, run_seed: u64) -> Result<KernelOperator> {
        let scale = self.width * grid.hbar().sqrt();
        match self.kind {
            FamilyKind::ToplitzGaussian => truncated_toplitz(grid, self.rank, |r| (-(r * r) / (scale * scale)).exp()),
            FamilyKind::ToplitzSobolevOptimizer => truncated_toplitz(grid, self.rank, |r| 1.0 / (1.0 + (r / scale).powi(4))),
            FamilyKind::RandomLowrankBandlimited => self.random_lowrank(grid, run_seed, false),
            FamilyKind::HermiteProjection => hermite_projection(grid, self.rank, scale),
        }
    }

    /// A positive family member: the random family uses `Σ σ_k |u_k⟩⟨u_k|`,
    /// the others are positive already.
    pub fn generate_positive(&self, grid: &PhaseGrid, run_seed: u64) -> Result<KernelOperator> {
        match self.kind {
            FamilyKind::RandomLowrankBandlimited => self.random_lowrank(grid, run_seed, true),
            _ => self.generate(grid, run_seed),
        }
    }

    fn random_lowrank(&self, grid: &PhaseGrid, run_seed: u64, positive: bool) -> Result<KernelOperator> {
        let mut rng = self.rng(run_seed);
        let scale = self.width * grid.hbar().sqrt();
        let n = grid.n_points();
        let packet = |rng: &mut ChaCha8Rng| -> Result<Vec<Complex64>> {
            let mut u = vec![Complex64::new(0.0, 0.0); n];
            for _ in 0..3 {
                let x: f64 = rng.random_range(-2.0..2.0) * scale;
                let xi: f64 = rng.random_range(-2.0..2.0) * scale;
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let z = PhasePoint::lattice(grid, (x / grid.dx()).round() as isize, (xi / grid.dxi()).round() as isize);
                let psi = coherent_state(grid, z)?;
                for (acc, v) in u.iter_mut().zip(psi.amplitude()) {
                    *acc += c * v;
                }
            }
            let norm = (u.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
            Ok(u.into_iter().map(|v| v / norm).collect())
        };
        let mut total = KernelOperator::zeros(grid);
        for _ in 0..self.rank {
            let weight: f64 = rng.random_range(0.2..1.0);
            let u = packet(&mut rng)?;
            let v = if positive { u.clone() } else { packet(&mut rng)? };
            let term = KernelOperator::outer(grid, &u, &v, Complex64::new(weight / grid.h(), 0.0))?;
            total = total.add(&term)?;
        }
        Ok(total)
    }
}

impl fmt::Display for OperatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// Töplitz operator of a radial symbol, cut to its `rank` dominant eigenpairs.
fn truncated_toplitz(grid: &PhaseGrid, rank: usize, profile: impl Fn(f64) -> f64) -> Result<KernelOperator> {
    let symbol = sample_symbol(grid, |x, xi| profile(x.hypot(xi)))?;
    let full = toplitz_quantize(&symbol).hermitian_part();
    let (lambda, u) = top_eigenpairs(full.matrix().as_ref(), rank)?;
    let n = grid.n_points();
    let scaled = Mat::from_fn(n, lambda.len(), |i, c| u[(i, c)] * lambda[c]);
    KernelOperator::from_matrix(grid, &scaled * u.adjoint())
}

fn hermite_projection(grid: &PhaseGrid, rank: usize, scale: f64) -> Result<KernelOperator> {
    let xs = grid.positions();
    let mut prev: Vec<f64> = vec![0.0; xs.len()];
    let mut cur: Vec<f64> = xs.iter().map(|x| (-(x * x) / (2.0 * scale * scale)).exp()).collect();
    let mut total = KernelOperator::zeros(grid);
    let c = Complex64::new(1.0 / grid.h(), 0.0);
    for k in 0..rank {
        let norm = (cur.iter().map(|v| v * v).sum::<f64>() * grid.dx()).sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidGrid("Hermite function vanishes on the grid".into()));
        }
        let phi: Vec<Complex64> = cur.iter().map(|v| Complex64::new(v / norm, 0.0)).collect();
        total = total.add(&KernelOperator::outer(grid, &phi, &phi, c)?)?;
        let kf = k as f64;
        let next: Vec<f64> = xs
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(x, (c1, c0))| (2.0 / (kf + 1.0)).sqrt() * x / scale * c1 - (kf / (kf + 1.0)).sqrt() * c0)
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(total)
}
