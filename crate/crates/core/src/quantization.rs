//! Weyl quantization, the Wigner transform and the Gaussian objects built on
//! coherent states.
//!
//! The discrete pair works diagonal by diagonal. For a kernel diagonal
//! `y - x = c dx` the Weyl kernel is a momentum Fourier coefficient of the
//! symbol evaluated at the midpoint `x + c dx / 2`; the half-step is taken
//! exactly by a spectral phase on the position frequencies. The resulting map
//! between `N × N` symbols and `N × N` kernels is a bijection, so the
//! round trips, Plancherel identity and trace rule hold to rounding.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::calculus::{semiclassical_convolve, PhasePoint};
use crate::error::{Error, Result};
use crate::grid::{sample_symbol, PhaseGrid, SymbolField};
use crate::operator::KernelOperator;
use crate::spectral::{centered, fft, fft2, ifft2_normalized, ifftshift};

/// 2-D DFT of the Wigner transform of `a`, indexed `[position freq][momentum freq]`.
pub(crate) fn symbol_spectrum(a: &KernelOperator) -> Vec<Complex64> {
    let grid = a.grid();
    let n = grid.n_points();
    let weight = n as f64 * grid.dx();
    let mut by_diagonal = vec![Complex64::new(0.0, 0.0); n * n];
    for c in 0..n {
        let sign = if c % 2 == 0 { weight } else { -weight };
        let row = &mut by_diagonal[c * n..(c + 1) * n];
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = a.get(i, (i + c) % n) * sign;
        }
        fft(row, false);
        let ct = centered(c, n) as f64;
        for (k, slot) in row.iter_mut().enumerate() {
            let phase = -PI * centered(k, n) as f64 * ct / n as f64;
            *slot *= Complex64::from_polar(1.0, phase);
        }
    }
    crate::spectral::transpose(&by_diagonal, n)
}

/// Inverse of [`symbol_spectrum`].
pub(crate) fn operator_from_spectrum(grid: &PhaseGrid, spectrum: &[Complex64]) -> KernelOperator {
    let n = grid.n_points();
    let mut by_diagonal = crate::spectral::transpose(spectrum, n);
    let norm = 1.0 / (n as f64 * n as f64 * grid.dx());
    for c in 0..n {
        let row = &mut by_diagonal[c * n..(c + 1) * n];
        let ct = centered(c, n) as f64;
        for (k, slot) in row.iter_mut().enumerate() {
            let phase = PI * centered(k, n) as f64 * ct / n as f64;
            *slot *= Complex64::from_polar(1.0, phase);
        }
        fft(row, true);
    }
    KernelOperator::from_fn(grid, |i, j| {
        let c = (j + n - i) % n;
        let sign = if c % 2 == 0 { norm } else { -norm };
        by_diagonal[c * n + i] * sign
    })
    .expect("finite spectrum gives finite kernel")
}

/// Weyl quantization `op_f`.
pub fn weyl_quantize(f: &SymbolField) -> KernelOperator {
    let grid = f.grid();
    let n = grid.n_points();
    let mut spectrum = f.values().to_vec();
    fft2(&mut spectrum, n, false);
    operator_from_spectrum(grid, &spectrum)
}

/// Wigner transform `f_op`, the inverse of [`weyl_quantize`].
pub fn wigner_transform(a: &KernelOperator) -> SymbolField {
    let grid = a.grid();
    let n = grid.n_points();
    let mut values = symbol_spectrum(a);
    ifft2_normalized(&mut values, n);
    SymbolField::from_values(grid, values).expect("shape matches grid")
}

/// `g_h(z) = (2/h) e^{-|z|²/ħ}` sampled on the grid.
pub fn gaussian_symbol(grid: &PhaseGrid) -> SymbolField {
    let (h, hbar) = (grid.h(), grid.hbar());
    sample_symbol(grid, |x, xi| 2.0 / h * (-(x * x + xi * xi) / hbar).exp()).expect("Gaussian is finite")
}

/// The coherent state `τ_{z₀} ψ_h` sampled on the position grid.
#[derive(Debug, Clone)]
pub struct CoherentState {
    grid: PhaseGrid,
    center: PhasePoint,
    amplitude: Vec<Complex64>,
}

impl CoherentState {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn center(&self) -> PhasePoint {
        self.center
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        (self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx).sqrt()
    }

    /// `h^{-1} |ψ⟩⟨ψ|`, the Weyl quantization of the translated `g_h`.
    pub fn projector(&self) -> KernelOperator {
        let c = Complex64::new(1.0 / self.grid.h(), 0.0);
        KernelOperator::outer(&self.grid, &self.amplitude, &self.amplitude, c).expect("lengths match grid")
    }
}

/// `ψ_h(x) = (2/h)^{1/4} e^{-x²/(2ħ)}` translated to `z₀` with periodic wrap.
pub fn coherent_state(grid: &PhaseGrid, z0: PhasePoint) -> Result<CoherentState> {
    let n = grid.n_points();
    let shift = z0.lattice_shift(grid)?;
    let hbar = grid.hbar();
    let lead = (2.0 / grid.h()).powf(0.25);
    let amplitude = (0..n)
        .map(|k| {
            let src = (k as isize - shift).rem_euclid(n as isize) as usize;
            let y = grid.x(src);
            let envelope = lead * (-(y * y) / (2.0 * hbar)).exp();
            let phase = z0.xi * (grid.x(k) - z0.x / 2.0) / hbar;
            Complex64::from_polar(envelope, phase)
        })
        .collect();
    Ok(CoherentState {
        grid: *grid,
        center: z0,
        amplitude,
    })
}

/// Töplitz quantization `g_h ⋆ op_f = ∫ f(z) h^{-1} |τ_z ψ_h⟩⟨τ_z ψ_h| dz`.
pub fn toplitz_quantize(f: &SymbolField) -> KernelOperator {
    let psi = coherent_state(f.grid(), PhasePoint::origin()).expect("origin is on the lattice");
    semiclassical_convolve(f, &psi.projector()).expect("same grid")
}

/// Husimi transform `g_h ∗ f_op`, normalized so that the constant 1 maps to 1.
pub fn husimi_transform(a: &KernelOperator) -> SymbolField {
    let grid = a.grid();
    let n = grid.n_points();
    let g = gaussian_symbol(grid);
    let mass: f64 = g.values().iter().map(|v| v.re).sum::<f64>() * grid.dz();
    let mut kernel = ifftshift(g.values(), n);
    fft2(&mut kernel, n, false);
    let mut spectrum = symbol_spectrum(a);
    let scale = grid.dz() / mass;
    for (s, k) in spectrum.iter_mut().zip(&kernel) {
        *s *= k * scale;
    }
    ifft2_normalized(&mut spectrum, n);
    SymbolField::from_values(grid, spectrum).expect("shape matches grid")
}

/// Normalizes a positive operator to `h tr A = 1`.
pub fn normalize_state(a: &KernelOperator) -> Result<KernelOperator> {
    let tr = a.trace().re * a.grid().h();
    if tr.abs() < f64::MIN_POSITIVE || !tr.is_finite() {
        return Err(Error::ZeroTrace);
    }
    Ok(a.scale_real(1.0 / tr))
}
