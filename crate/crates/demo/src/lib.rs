//! Browser bindings: Wigner function of a cat state, the Gagliardo–Sobolev
//! ratio of a coherent projector and the uncertainty ratio of a mixture.

use qsobolev::harness::{check_gagliardo_sobolev, check_uncertainty};
use qsobolev::quantization::{coherent_state, wigner_transform};
use qsobolev::{Complex64, KernelOperator, PhaseGrid, PhasePoint};
use wasm_bindgen::prelude::*;

const HALF_WIDTH: f64 = 8.0;

fn err(e: qsobolev::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(n: usize, hbar: f64) -> qsobolev::Result<PhaseGrid> {
    PhaseGrid::new(1, n, HALF_WIDTH, hbar)
}

/// `|ψ_{-a}⟩ + |ψ_{+a}⟩`, normalized, as the operator `h^{-1}|ψ⟩⟨ψ|`.
pub fn cat_state(g: &PhaseGrid, separation: f64) -> qsobolev::Result<KernelOperator> {
    let left = coherent_state(g, PhasePoint::new(-separation / 2.0, 0.0))?;
    let right = coherent_state(g, PhasePoint::new(separation / 2.0, 0.0))?;
    let psi: Vec<Complex64> = left.amplitude().iter().zip(right.amplitude()).map(|(a, b)| a + b).collect();
    let norm = (psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx()).sqrt();
    let psi: Vec<Complex64> = psi.iter().map(|v| v / norm).collect();
    KernelOperator::outer(g, &psi, &psi, Complex64::new(1.0 / g.h(), 0.0))
}

/// Real part of the Wigner function of the cat state, row-major in `(x, ξ)`.
pub fn cat_wigner(n: usize, hbar: f64, separation: f64) -> qsobolev::Result<Vec<f64>> {
    let g = grid(n, hbar)?;
    Ok(wigner_transform(&cat_state(&g, separation)?).values().iter().map(|v| v.re).collect())
}

/// `(lhs, rhs, ratio)` of the Gagliardo–Sobolev check on the centered
/// coherent projector.
pub fn coherent_gagliardo(s: f64, p: f64, hbar: f64) -> qsobolev::Result<[f64; 3]> {
    let n = ((64.0 / hbar.sqrt()).ceil() as usize).next_multiple_of(2).min(256);
    let g = grid(n, hbar)?;
    let rec = check_gagliardo_sobolev(&coherent_state(&g, PhasePoint::origin())?.projector(), s, p)?;
    Ok([rec.lhs, rec.rhs, rec.ratio])
}

/// `D_x² / 2σ_x²` for an equal mixture of coherent states at `±a/2`.
pub fn mixture_uncertainty(hbar: f64, separation: f64) -> qsobolev::Result<f64> {
    let g = grid(128, hbar)?;
    let left = coherent_state(&g, PhasePoint::new(-separation / 2.0, 0.0))?.projector();
    let right = coherent_state(&g, PhasePoint::new(separation / 2.0, 0.0))?.projector();
    Ok(check_uncertainty(&left.add(&right)?)?.ratio)
}

#[wasm_bindgen(js_name = catWigner)]
pub fn cat_wigner_js(n: usize, hbar: f64, separation: f64) -> Result<Vec<f64>, JsError> {
    cat_wigner(n, hbar, separation).map_err(err)
}

#[wasm_bindgen(js_name = coherentGagliardo)]
pub fn coherent_gagliardo_js(s: f64, p: f64, hbar: f64) -> Result<Vec<f64>, JsError> {
    coherent_gagliardo(s, p, hbar).map(|v| v.to_vec()).map_err(err)
}

#[wasm_bindgen(js_name = mixtureUncertainty)]
pub fn mixture_uncertainty_js(hbar: f64, separation: f64) -> Result<f64, JsError> {
    mixture_uncertainty(hbar, separation).map_err(err)
}
