//! Phase-space translations, quantum derivatives, semiclassical convolution,
//! fractional Laplacians, Littlewood–Paley blocks and the Riesz multiplier.
//!
//! Every homogeneous multiplier acts on the 2-D DFT of the Wigner transform.
//! Frequencies are `α = ã / (2L)` along `x` and `β = c̃ dx / h` along `ξ`, so
//! `∂_x` and `∂_ξ` become `2πiα` and `2πiβ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::riesz_constant;
use crate::error::{domain, Error, Result};
use crate::grid::{PhaseGrid, SymbolField};
use crate::norms::OperatorTuple;
use crate::operator::KernelOperator;
use crate::quadrature::{offsets, origin_cell_moments, tail_weight};
use crate::quantization::{operator_from_spectrum, symbol_spectrum};
use crate::spectral::{centered, fft2, ifftshift};

const LATTICE_TOL: f64 = 1e-9;

/// Phase-space offset `z = (x, ξ)`; `x` must sit on the position lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
}

impl PhasePoint {
    pub fn new(x: f64, xi: f64) -> Self {
        Self { x, xi }
    }

    pub fn origin() -> Self {
        Self { x: 0.0, xi: 0.0 }
    }

    /// Lattice point `(s dx, k dξ)`.
    pub fn lattice(grid: &PhaseGrid, s: isize, k: isize) -> Self {
        Self {
            x: s as f64 * grid.dx(),
            xi: k as f64 * grid.dxi(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.xi)
    }

    /// Number of position cells in `x`, rejecting off-lattice offsets.
    pub fn lattice_shift(&self, grid: &PhaseGrid) -> Result<isize> {
        let cells = self.x / grid.dx();
        let s = cells.round();
        if !cells.is_finite() || (cells - s).abs() > LATTICE_TOL * (1.0 + s.abs()) {
            return Err(Error::OffLattice(self.x));
        }
        Ok(s as isize)
    }
}

impl std::ops::Add for PhasePoint {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.xi + rhs.xi)
    }
}

impl std::ops::Neg for PhasePoint {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.xi)
    }
}

/// Position and momentum components of the quantum gradient.
#[derive(Debug, Clone)]
pub struct GradientPair {
    pub grad_x: Vec<KernelOperator>,
    pub grad_xi: Vec<KernelOperator>,
}

impl GradientPair {
    /// `(∇_x A, ∇_ξ A)` as one tuple.
    pub fn joint(&self) -> OperatorTuple {
        let mut parts = self.grad_x.clone();
        parts.extend(self.grad_xi.iter().cloned());
        OperatorTuple::new(parts).expect("gradient tuple is nonempty and shares a grid")
    }
}

/// `𝖳_z A = τ_z A τ_{-z}`: the kernel becomes `e^{iξ₀(x_i - x_j)/ħ} A[i-s, j-s]`.
pub fn translate(a: &KernelOperator, z: PhasePoint) -> Result<KernelOperator> {
    let grid = a.grid();
    let s = z.lattice_shift(grid)?;
    let n = grid.n_points() as isize;
    let hbar = grid.hbar();
    let xs = grid.positions();
    Ok(a.map_entries(|i, j, _| {
        let si = (i as isize - s).rem_euclid(n) as usize;
        let sj = (j as isize - s).rem_euclid(n) as usize;
        let phase = z.xi * (xs[i] - xs[j]) / hbar;
        a.get(si, sj) * Complex64::from_polar(1.0, phase)
    }))
}

/// Frequencies `(α, β)` of spectrum entry `(a, c)`.
pub(crate) fn frequencies(grid: &PhaseGrid, a: usize, c: usize) -> (f64, f64) {
    let n = grid.n_points();
    (
        centered(a, n) as f64 / (2.0 * grid.half_width()),
        centered(c, n) as f64 * grid.dx() / grid.h(),
    )
}

/// Multiplies the symbol spectrum by `m(α, β, is_nyquist_x, is_nyquist_ξ)`.
fn multiply(a: &KernelOperator, m: impl Fn(f64, f64, bool, bool) -> Complex64) -> KernelOperator {
    let grid = a.grid();
    let n = grid.n_points();
    let mut spectrum = symbol_spectrum(a);
    for ia in 0..n {
        for ic in 0..n {
            let (alpha, beta) = frequencies(grid, ia, ic);
            spectrum[ia * n + ic] *= m(alpha, beta, ia == n / 2, ic == n / 2);
        }
    }
    operator_from_spectrum(grid, &spectrum)
}

/// Applies a Fourier multiplier `m(α, β)` to the Wigner transform of `A`.
pub fn apply_symbol_multiplier(a: &KernelOperator, m: impl Fn(f64, f64) -> Complex64) -> KernelOperator {
    multiply(a, |alpha, beta, _, _| m(alpha, beta))
}

/// `∇_x A = [∇, A]` and `∇_ξ A = [x/(iħ), A]`, exact on the symbol side.
///
/// The Nyquist row and column are dropped since an odd multiplier has no
/// real-symmetric value there.
pub fn quantum_gradient(a: &KernelOperator) -> GradientPair {
    let gx = multiply(a, |alpha, _, nyq, _| {
        if nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 2.0 * PI * alpha)
        }
    });
    let gxi = multiply(a, |_, beta, _, nyq| {
        if nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 2.0 * PI * beta)
        }
    });
    GradientPair {
        grad_x: vec![gx],
        grad_xi: vec![gxi],
    }
}

/// `Δ_ħ A = op_{Δ f_A}`.
pub fn laplacian(a: &KernelOperator) -> KernelOperator {
    multiply(a, |alpha, beta, _, _| {
        Complex64::new(-4.0 * PI * PI * (alpha * alpha + beta * beta), 0.0)
    })
}

/// `(-Δ_ħ)^s A`: the symbol spectrum times `(2π|w|)^{2s}`, zero mode removed.
pub fn fractional_laplacian(a: &KernelOperator, s: f64) -> Result<KernelOperator> {
    let d = a.grid().d() as f64;
    if !(s > -d) || !s.is_finite() {
        return Err(domain("s", s, "s > -d"));
    }
    Ok(multiply(a, |alpha, beta, _, _| {
        let w = alpha.hypot(beta);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((2.0 * PI * w).powf(2.0 * s), 0.0)
        }
    }))
}

/// `(-Δ_ħ)^{s/2} A = c_{2,s} ∫ (A - 𝖳_z A) / |z|^{2+s} dz` as a lattice sum.
///
/// The sum runs over the symmetric offset cell. The origin cell enters
/// through the second-order Taylor term of `A - 𝖳_z A`. Beyond the cell the
/// translates leave the support of `A` and only the `A` term survives,
/// integrated analytically.
pub fn fractional_laplacian_integral(a: &KernelOperator, s: f64) -> Result<KernelOperator> {
    if !(s > 0.0 && s < 2.0) {
        return Err(domain("s", s, "0 < s < 2"));
    }
    let grid = a.grid();
    let alpha = 2.0 + s;
    let dz = grid.dz();
    let n = grid.n_points();
    let mut weights = SymbolField::zeros(grid);
    let mut total = tail_weight(grid, alpha);
    for o in offsets(grid) {
        let w = o.norm.powf(-alpha) * dz;
        total += w;
        let m = (o.s + (n / 2) as isize) as usize;
        let c = (o.k + (n / 2) as isize) as usize;
        weights.set(m, c, Complex64::new(w / dz, 0.0));
    }
    let smeared = semiclassical_convolve(&weights, a)?;
    let (mx, mxi) = origin_cell_moments(grid, alpha);
    let near = multiply(a, |fa, fb, _, _| {
        Complex64::new(2.0 * PI * PI * (mx * fa * fa + mxi * fb * fb), 0.0)
    });
    let c = riesz_constant(2.0 * grid.d() as f64, s)?;
    a.scale_real(total).sub(&smeared)?.add(&near).map(|r| r.scale_real(c))
}

/// `f ⋆ A = ∫ f(z) 𝖳_z A dz`, summed over every grid offset.
///
/// `f` is read as a function of the offset: sample `(m, n)` is the weight of
/// `z = (x_m, ξ_n)`.
pub fn semiclassical_convolve(f: &SymbolField, a: &KernelOperator) -> Result<KernelOperator> {
    let grid = a.grid();
    grid.ensure_same(f.grid())?;
    let n = grid.n_points();
    let mut weights = ifftshift(f.values(), n);
    fft2(&mut weights, n, false);
    let mut spectrum = symbol_spectrum(a);
    let dz = grid.dz();
    for (s, w) in spectrum.iter_mut().zip(&weights) {
        *s *= w * dz;
    }
    Ok(operator_from_spectrum(grid, &spectrum))
}

/// Smooth cutoff equal to 1 on `[0, 1]` and 0 on `[2, ∞)`.
fn cutoff(t: f64) -> f64 {
    let bump = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let u = t - 1.0;
    let step = if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        bump(u) / (bump(u) + bump(1.0 - u))
    };
    1.0 - step
}

/// Annular bump `χ(t) = η(t) - η(2t)`, supported in `(1/2, 2)`.
pub fn dyadic_bump(t: f64) -> f64 {
    cutoff(t) - cutoff(2.0 * t)
}

/// Smallest and largest `j` whose blocks are needed to tile the nonzero
/// frequencies of the grid.
pub fn resolvable_range(grid: &PhaseGrid) -> (i32, i32) {
    let n = grid.n_points();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for a in 0..n {
        for c in 0..n {
            let (alpha, beta) = frequencies(grid, a, c);
            let w = alpha.hypot(beta);
            if w > 0.0 {
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
    }
    (lo.log2().floor() as i32, hi.log2().ceil() as i32)
}

/// Littlewood–Paley block `Δ_j A = op_{φ(2^{-j} D) f_A}`.
pub fn dyadic_block(a: &KernelOperator, j: i32) -> KernelOperator {
    let scale = 2f64.powi(-j);
    multiply(a, |alpha, beta, _, _| {
        let w = alpha.hypot(beta);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(dyadic_bump(scale * w), 0.0)
        }
    })
}

/// Schur multiplier `-i sign(x_i - x_j)`, zero on the diagonal.
pub fn riesz_schur_multiplier(a: &KernelOperator) -> KernelOperator {
    a.map_entries(|i, j, v| match i.cmp(&j) {
        std::cmp::Ordering::Greater => v * Complex64::new(0.0, -1.0),
        std::cmp::Ordering::Less => v * Complex64::new(0.0, 1.0),
        std::cmp::Ordering::Equal => Complex64::new(0.0, 0.0),
    })
}
