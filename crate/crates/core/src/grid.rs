//! Discrete phase space: the periodic position grid, its dual momentum grid
//! and complex fields sampled on the product.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Position grid `x_k = -L + k dx` on `[-L, L)` together with the momentum
/// grid `ξ_n = (n - N/2) dξ`, `dξ = h / (2L)`, and the semiclassical
/// parameter `ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    d: usize,
    n: usize,
    half_width: f64,
    hbar: f64,
}

impl PhaseGrid {
    /// Builds a grid. Operator-level code supports `d = 1` only; the
    /// dimension is still recorded so constants can be queried with it.
    pub fn new(d: usize, n_points: usize, half_width: f64, hbar: f64) -> Result<Self> {
        if d != 1 {
            return Err(Error::UnsupportedDimension(d));
        }
        if n_points == 0 || n_points % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_points must be even and positive, got {n_points}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(domain("half_width", half_width, "finite L > 0"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(domain("hbar", hbar, "finite ħ > 0"));
        }
        Ok(Self {
            d,
            n: n_points,
            half_width,
            hbar,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Planck's constant `h = 2πħ`.
    pub fn h(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        self.h() / (2.0 * self.half_width)
    }

    /// Phase-space cell volume `dx dξ`.
    pub fn dz(&self) -> f64 {
        self.dx() * self.dxi()
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.dx()
    }

    pub fn xi(&self, n: usize) -> f64 {
        (n as f64 - (self.n / 2) as f64) * self.dxi()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|n| self.xi(n)).collect()
    }

    /// Half-length of the momentum box, `N dξ / 2`.
    pub fn momentum_half_width(&self) -> f64 {
        self.n as f64 * self.dxi() / 2.0
    }

    /// Same grid at a different `ħ`.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.d, self.n, self.half_width, hbar)
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Convenience constructor mirroring [`PhaseGrid::new`].
pub fn make_grid(d: usize, n_points: usize, half_width: f64, hbar: f64) -> Result<PhaseGrid> {
    PhaseGrid::new(d, n_points, half_width, hbar)
}

/// Complex samples on the phase-space grid, row-major with the position
/// index as row and the momentum index as column.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl SymbolField {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        let n = grid.n_points();
        Self {
            grid: *grid,
            values: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_values(grid: &PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.n_points();
        if values.len() != n * n {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self {
            grid: *grid,
            values,
        })
    }

    /// Samples a complex function at every `(x_m, ξ_n)`.
    pub fn from_fn_complex(grid: &PhaseGrid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let n = grid.n_points();
        let xs = grid.positions();
        let xis = grid.momenta();
        let mut values = Vec::with_capacity(n * n);
        for &x in &xs {
            for &xi in &xis {
                let v = f(x, xi);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite { x, xi });
                }
                values.push(v);
            }
        }
        Ok(Self {
            grid: *grid,
            values,
        })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.grid.n_points() + n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: Complex64) {
        let n_points = self.grid.n_points();
        self.values[m * n_points + n] = v;
    }

    /// `Σ f dz`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.dz()
    }

    /// `‖f‖_{L^p}` with the `dz` quadrature weight; `p = ∞` is the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let sum: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (sum * self.grid.dz()).powf(1.0 / p)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Periodic shift by whole cells: result at `(m, n)` is the input at
    /// `(m - s, n - k)`.
    pub fn shift(&self, s: isize, k: isize) -> Self {
        let n = self.grid.n_points() as isize;
        let mut out = Self::zeros(&self.grid);
        for m in 0..n {
            let src_m = (m - s).rem_euclid(n);
            for c in 0..n {
                let src_c = (c - k).rem_euclid(n);
                out.values[(m * n + c) as usize] = self.values[(src_m * n + src_c) as usize];
            }
        }
        out
    }
}

/// Samples a real phase-space function `f(x, ξ)` on the grid.
pub fn sample_symbol(grid: &PhaseGrid, f: impl Fn(f64, f64) -> f64) -> Result<SymbolField> {
    SymbolField::from_fn_complex(grid, |x, xi| Complex64::new(f(x, xi), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_arithmetic() {
        let g = make_grid(1, 128, 8.0, 1.0 / (2.0 * PI)).unwrap();
        assert!((g.dx() - 0.125).abs() < 1e-15);
        assert!((g.h() - 1.0).abs() < 1e-15);
        assert!((g.dx() * 128.0 - 16.0).abs() < 1e-12);
        assert!((g.dxi() * 128.0 * g.dx() - g.h()).abs() < 1e-12);
        assert_eq!(g.x(0), -8.0);
        assert_eq!(g.xi(64), 0.0);
    }

    #[test]
    fn minimal_and_invalid_grids() {
        assert!(make_grid(1, 2, 1.0, 1.0).is_ok());
        assert!(matches!(make_grid(1, 3, 1.0, 1.0), Err(Error::InvalidGrid(_))));
        assert!(make_grid(1, 0, 1.0, 1.0).is_err());
        assert!(make_grid(1, 4, -1.0, 1.0).is_err());
        assert!(make_grid(1, 4, 1.0, 0.0).is_err());
        assert!(matches!(make_grid(2, 4, 1.0, 1.0), Err(Error::UnsupportedDimension(2))));
    }

    #[test]
    fn constant_symbol() {
        let g = make_grid(1, 8, 2.0, 1.0).unwrap();
        let f = sample_symbol(&g, |_, _| 1.0).unwrap();
        assert!(f.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn gaussian_peak() {
        let g = make_grid(1, 32, 8.0, 1.0).unwrap();
        let h = g.h();
        let hbar = g.hbar();
        let f = sample_symbol(&g, |x, xi| 2.0 / h * (-(x * x + xi * xi) / hbar).exp()).unwrap();
        assert!((f.get(16, 16).re - 2.0 / h).abs() < 1e-15);
    }

    #[test]
    fn odd_function_antisymmetric() {
        let g = make_grid(1, 16, 3.0, 0.7).unwrap();
        let f = sample_symbol(&g, |x, xi| x * (-xi * xi).exp() + xi.powi(3)).unwrap();
        for m in 1..16 {
            for n in 1..16 {
                let a = f.get(m, n);
                let b = f.get(16 - m, 16 - n);
                assert!((a + b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_finite_rejected() {
        let g = make_grid(1, 8, 1.0, 1.0).unwrap();
        assert!(matches!(
            sample_symbol(&g, |x, _| 1.0 / x.abs().min(0.0)),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn shift_roundtrip() {
        let g = make_grid(1, 8, 1.0, 1.0).unwrap();
        let f = sample_symbol(&g, |x, xi| x + 3.0 * xi).unwrap();
        assert_eq!(f.shift(3, -2).shift(-3, 2), f);
        assert_eq!(f.shift(1, 0).get(1, 4), f.get(0, 4));
    }
}
