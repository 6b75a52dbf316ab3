//! Operators on the position grid stored by their integral kernels.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;

/// Kernel matrix `A(x_i, x_j)` of an operator on `L²` of the position grid.
///
/// The operator acts by `(Aφ)(x_i) = dx Σ_j A[i, j] φ(x_j)`, so its matrix in
/// the sample basis is `dx · kernel`.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    grid: PhaseGrid,
    kernel: Mat<Complex64>,
}

impl KernelOperator {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        let n = grid.n_points();
        Self {
            grid: *grid,
            kernel: Mat::zeros(n, n),
        }
    }

    /// Identity operator; its kernel is the discrete delta `dx^{-1} δ_ij`.
    pub fn identity(grid: &PhaseGrid) -> Self {
        let n = grid.n_points();
        let inv = Complex64::new(1.0 / grid.dx(), 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            grid: *grid,
            kernel: Mat::from_fn(n, n, |i, j| if i == j { inv } else { zero }),
        }
    }

    /// Kernel entries from index pairs.
    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let n = grid.n_points();
        let kernel = Mat::from_fn(n, n, |i, j| f(i, j));
        Self::from_kernel(grid, kernel)
    }

    pub fn from_kernel(grid: &PhaseGrid, kernel: Mat<Complex64>) -> Result<Self> {
        let n = grid.n_points();
        if kernel.nrows() != n || kernel.ncols() != n {
            return Err(Error::InvalidGrid(format!(
                "kernel is {}x{}, grid has {n} points",
                kernel.nrows(),
                kernel.ncols()
            )));
        }
        for j in 0..n {
            for i in 0..n {
                let v = kernel[(i, j)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite {
                        x: grid.x(i),
                        xi: grid.x(j),
                    });
                }
            }
        }
        Ok(Self { grid: *grid, kernel })
    }

    /// Builds an operator from its matrix `dx · kernel` in the sample basis.
    pub fn from_matrix(grid: &PhaseGrid, matrix: Mat<Complex64>) -> Result<Self> {
        let inv = 1.0 / grid.dx();
        Self::from_kernel(grid, matrix * faer::Scale(Complex64::new(inv, 0.0)))
    }

    /// `c |u⟩⟨v|` where `u`, `v` are grid samples of wave functions.
    pub fn outer(grid: &PhaseGrid, u: &[Complex64], v: &[Complex64], c: Complex64) -> Result<Self> {
        let n = grid.n_points();
        if u.len() != n || v.len() != n {
            return Err(Error::GridMismatch);
        }
        Self::from_fn(grid, |i, j| c * u[i] * v[j].conj())
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn kernel(&self) -> &Mat<Complex64> {
        &self.kernel
    }

    pub fn into_kernel(self) -> Mat<Complex64> {
        self.kernel
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.kernel[(i, j)]
    }

    pub fn n(&self) -> usize {
        self.grid.n_points()
    }

    /// Matrix of the operator in the sample basis, `dx · kernel`.
    pub fn matrix(&self) -> Mat<Complex64> {
        &self.kernel * faer::Scale(Complex64::new(self.grid.dx(), 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            kernel: &self.kernel * faer::Scale(c),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            kernel: &self.kernel + &other.kernel,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            kernel: &self.kernel - &other.kernel,
        })
    }

    /// Operator product; the kernel is `dx Σ_k A[i,k] B[k,j]`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let prod = &self.kernel * &other.kernel;
        Ok(Self {
            grid: self.grid,
            kernel: prod * faer::Scale(Complex64::new(self.grid.dx(), 0.0)),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid,
            kernel: self.kernel.adjoint().to_owned(),
        }
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let sum = &self.kernel + self.kernel.adjoint();
        Self {
            grid: self.grid,
            kernel: sum * faer::Scale(Complex64::new(0.5, 0.0)),
        }
    }

    /// `Tr A = dx Σ_i A[i, i]`.
    pub fn trace(&self) -> Complex64 {
        let n = self.n();
        (0..n).map(|i| self.kernel[(i, i)]).sum::<Complex64>() * self.grid.dx()
    }

    /// Largest entry of `|A - A*|` relative to the largest entry of `|A|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n();
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let a = self.kernel[(i, j)];
                defect = defect.max((a - self.kernel[(j, i)].conj()).norm());
                scale = scale.max(a.norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Entrywise Frobenius norm of the kernel.
    pub fn kernel_frobenius(&self) -> f64 {
        self.kernel.norm_l2()
    }

    /// Applies the operator to grid samples of a wave function.
    pub fn apply(&self, phi: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n();
        if phi.len() != n {
            return Err(Error::GridMismatch);
        }
        let dx = self.grid.dx();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.kernel[(i, j)] * phi[j]).sum::<Complex64>() * dx)
            .collect())
    }

    /// Entrywise map over `(i, j, value)`.
    pub fn map_entries(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let n = self.n();
        Self {
            grid: self.grid,
            kernel: Mat::from_fn(n, n, |i, j| f(i, j, self.kernel[(i, j)])),
        }
    }
}

/// `L²` inner product of grid samples, `dx Σ conj(u) v`.
pub fn inner(grid: &PhaseGrid, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<Complex64>() * grid.dx()
}
