use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use crate::calculus::{
    apply_symbol_multiplier, dyadic_block, fractional_laplacian, quantum_gradient, resolvable_range, riesz_schur_multiplier,
    semiclassical_convolve,
};
use crate::constants::{
    besov_interpolation_bound, conjugate, gagliardo_constant, gagliardo_sobolev_bound_fractional,
    gagliardo_sobolev_bound_gradient, riesz_constant, smoothing_bound, sobolev_constant, sobolev_exponent,
    sphere_area, weak_norm_power,
};
use crate::error::{domain, Error, Result};
use crate::grid::{sample_symbol, PhaseGrid, SymbolField};
use crate::linalg::hermitian_eigenvalues;
use crate::norms::{
    besov_norm_diff1, besov_norm_diff2, bessel_norm, holder_norm, mixed_schatten_norm,
    schatten_norm, sobolev_norm, sobolev_norm_frac, DifferenceProfile, DyadicProfile, MixedOrder, OperatorTuple,
};
use crate::operator::KernelOperator;
use crate::quadrature::origin_cell_mass;
use crate::quantization::{coherent_state, normalize_state, toplitz_quantize, weyl_quantize};
use crate::{Complex64, PhasePoint};

use super::record::{CheckRecord, Params, EXACT_TOL, IDENTITY_TOL, QUADRATURE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum NormKind {
    Schatten,
    Sobolev,
    Bessel,
    Diff1,
    Diff2,
    Lp,
    Holder,
}

/// Norms of one operator, each computed at most once.
pub(crate) struct Norms<'a> {
    a: &'a KernelOperator,
    cache: RefCell<HashMap<(NormKind, u64, u64, u64), f64>>,
    profiles: RefCell<HashMap<(bool, u64), Rc<DifferenceProfile>>>,
    dyadic: RefCell<Option<Rc<DyadicProfile>>>,
}

impl<'a> Norms<'a> {
    pub fn new(a: &'a KernelOperator) -> Self {
        Self {
            a,
            cache: RefCell::new(HashMap::new()),
            profiles: RefCell::new(HashMap::new()),
            dyadic: RefCell::new(None),
        }
    }

    fn dyadic(&self) -> Result<Rc<DyadicProfile>> {
        if let Some(pr) = self.dyadic.borrow().as_ref() {
            return Ok(Rc::clone(pr));
        }
        let pr = Rc::new(DyadicProfile::new(self.a)?);
        *self.dyadic.borrow_mut() = Some(Rc::clone(&pr));
        Ok(pr)
    }

    fn profile(&self, second: bool, p: f64) -> Result<Rc<DifferenceProfile>> {
        let key = (second, p.to_bits());
        if let Some(pr) = self.profiles.borrow().get(&key) {
            return Ok(Rc::clone(pr));
        }
        let pr = Rc::new(DifferenceProfile::new(self.a, second, p)?);
        self.profiles.borrow_mut().insert(key, Rc::clone(&pr));
        Ok(pr)
    }

    fn difference(&self, second: bool, s: f64, p: f64, r: f64) -> Result<f64> {
        if p.is_infinite() {
            return if second {
                besov_norm_diff2(self.a, s, p, r)
            } else {
                besov_norm_diff1(self.a, s, p, r)
            };
        }
        self.profile(second, p)?.besov(s, r)
    }

    pub fn op(&self) -> &KernelOperator {
        self.a
    }

    fn get(&self, kind: NormKind, s: f64, p: f64, r: f64, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        let key = (kind, s.to_bits(), p.to_bits(), r.to_bits());
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = f()?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    pub fn schatten(&self, p: f64) -> Result<f64> {
        self.get(NormKind::Schatten, 0.0, p, 0.0, || schatten_norm(self.a, p))
    }

    /// `‖A‖_{Ẇ^{s,p}}`: the gradient norm at `s = 1`, Gagliardo below.
    pub fn sobolev(&self, s: f64, p: f64) -> Result<f64> {
        self.get(NormKind::Sobolev, s, p, 0.0, || {
            if s == 1.0 {
                sobolev_norm(self.a, 1, p)
            } else if s > 0.0 && s < 1.0 && p.is_finite() && p >= 1.0 {
                let gamma = gagliardo_constant(s, p, self.a.grid().d())?;
                Ok((gamma * self.profile(false, p)?.integral(p, 2.0 + s * p)?).powf(1.0 / p))
            } else {
                sobolev_norm_frac(self.a, s, p)
            }
        })
    }

    pub fn bessel(&self, s: f64, p: f64) -> Result<f64> {
        self.get(NormKind::Bessel, s, p, 0.0, || bessel_norm(self.a, s, p))
    }

    pub fn diff1(&self, s: f64, p: f64, r: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain("s", s, "0 < s < 1"));
        }
        self.get(NormKind::Diff1, s, p, r, || self.difference(false, s, p, r))
    }

    pub fn diff2(&self, s: f64, p: f64, r: f64) -> Result<f64> {
        if !(s > 0.0 && s < 2.0) {
            return Err(domain("s", s, "0 < s < 2"));
        }
        self.get(NormKind::Diff2, s, p, r, || self.difference(true, s, p, r))
    }

    pub fn lp(&self, s: f64, p: f64, r: f64) -> Result<f64> {
        self.get(NormKind::Lp, s, p, r, || self.dyadic()?.besov(s, p, r))
    }

    pub fn holder(&self, theta: f64) -> Result<f64> {
        self.get(NormKind::Holder, theta, 0.0, 0.0, || holder_norm(self.a, theta))
    }
}

/// `hbar`, `n` and `L` of a grid.
pub fn grid_params(grid: &PhaseGrid) -> Params {
    let mut params = Params::new();
    params.insert("hbar".into(), grid.hbar().into());
    params.insert("n".into(), grid.n_points().into());
    params.insert("L".into(), grid.half_width().into());
    params
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn ensure_d1(grid: &PhaseGrid) -> Result<()> {
    if grid.d() == 1 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(grid.d()))
    }
}

/// `C̃ ∫ |f|^{-a}`-type fields: `c |z|^{-a}` at every offset, with the
/// origin sample carrying the exact mass of its cell.
fn singular_field(grid: &PhaseGrid, a: f64, c: f64) -> Result<SymbolField> {
    let mut f = SymbolField::from_fn_complex(grid, |x, xi| {
        let r = x.hypot(xi);
        Complex64::new(if r > 0.0 { c * r.powf(-a) } else { 0.0 }, 0.0)
    })?;
    let n = grid.n_points();
    f.set(n / 2, n / 2, Complex64::new(c * origin_cell_mass(grid, a) / grid.dz(), 0.0));
    Ok(f)
}

/// Unit point mass at the origin.
fn delta_field(grid: &PhaseGrid) -> SymbolField {
    let mut f = SymbolField::zeros(grid);
    let n = grid.n_points();
    f.set(n / 2, n / 2, Complex64::new(1.0 / grid.dz(), 0.0));
    f
}

/// `1 + 1/p = 1/q + 1/r`.
pub fn young_relation(p: f64, q: f64, r: f64) -> Result<()> {
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        if !(v >= 1.0) {
            return Err(domain(name, v, "exponent in [1, ∞]"));
        }
    }
    if (1.0 + inv(p) - inv(q) - inv(r)).abs() > 1e-12 {
        return Err(Error::Exponents(format!("1 + 1/p != 1/q + 1/r for (p, q, r) = ({p}, {q}, {r})")));
    }
    Ok(())
}

pub fn check_young(f: &SymbolField, a: &KernelOperator, p: f64, q: f64, r: f64) -> Result<CheckRecord> {
    young_with(f, &Norms::new(a), p, q, r)
}

pub(crate) fn young_with(f: &SymbolField, a: &Norms, p: f64, q: f64, r: f64) -> Result<CheckRecord> {
    young_relation(p, q, r)?;
    let lhs = schatten_norm(&semiclassical_convolve(f, a.op())?, p)?;
    let rhs = f.lp_norm(q) * a.schatten(r)?;
    Ok(CheckRecord::bounded("young", lhs, rhs, Some(1.0), EXACT_TOL)
        .with("p", p)
        .with("q", q)
        .with("r", r)
        .with_params(&grid_params(a.op().grid())))
}

/// Convolution with a unit point mass: equality in Young's inequality.
pub fn check_young_delta(a: &KernelOperator, p: f64) -> Result<CheckRecord> {
    let f = delta_field(a.grid());
    let lhs = schatten_norm(&semiclassical_convolve(&f, a)?, p)?;
    let rhs = f.lp_norm(1.0) * schatten_norm(a, p)?;
    Ok(CheckRecord::equality("young_delta", lhs, rhs, Some(1.0), 1e-10)
        .with("p", p)
        .with_params(&grid_params(a.grid())))
}

/// `‖|z|^{-a} ⋆ A‖_{𝔏^p} / (‖|z|^{-a}‖_{L^{q,∞}} ‖A‖_{𝔏^r})` with
/// `q = 2/a` and `1 + 1/p = 1/q + 1/r`.
pub fn check_hls(a_exp: f64, a: &KernelOperator, p: f64) -> Result<CheckRecord> {
    hls_with(a_exp, &Norms::new(a), p)
}

pub(crate) fn hls_with(a_exp: f64, a: &Norms, p: f64) -> Result<CheckRecord> {
    let grid = *a.op().grid();
    ensure_d1(&grid)?;
    if !(a_exp > 0.0 && a_exp < 2.0) {
        return Err(domain("a", a_exp, "0 < a < 2d"));
    }
    let q = 2.0 / a_exp;
    let inv_r = 1.0 + inv(p) - 1.0 / q;
    if !(p >= 1.0) || !(inv_r > 0.0 && inv_r < 1.0) {
        return Err(Error::Exponents(format!("no r in (1, ∞) with 1 + 1/{p} = 1/{q} + 1/r")));
    }
    let r = 1.0 / inv_r;
    let f = singular_field(&grid, a_exp, 1.0)?;
    let lhs = schatten_norm(&semiclassical_convolve(&f, a.op())?, p)?;
    let rhs = weak_norm_power(a_exp, 1)? * a.schatten(r)?;
    Ok(CheckRecord::report("hls", lhs, rhs, None)
        .with("a", a_exp)
        .with("p", p)
        .with("q", q)
        .with("r", r)
        .with_params(&grid_params(&grid)))
}

fn sobolev_q(s: f64, p: f64) -> Result<f64> {
    sobolev_exponent(s, p, 1).ok_or_else(|| {
        Error::Exponents(format!("1/p - s/2 <= 0 for (s, p) = ({s}, {p}): q is infinite"))
    })
}

/// Explicit bound on the quantum Gagliardo–Sobolev constant in `d = 1`, or
/// `None` when only existence is known.
pub fn gagliardo_bound(s: f64, p: f64) -> Result<Option<f64>> {
    let q = sobolev_q(s, p)?;
    if s == 1.0 {
        let mut bound = gagliardo_sobolev_bound_gradient(p, 1)?;
        if (q - 2.0).abs() < 1e-12 {
            bound = bound.min(smoothing_bound(sobolev_constant(1.0, p, 1)?, 1.0)?);
        }
        Ok(Some(bound))
    } else if p == 2.0 {
        let c = sobolev_constant(s, 2.0, 1)?;
        Ok(Some(
            smoothing_bound(c, s)?.min(gagliardo_sobolev_bound_fractional(c, s, 2.0, 1)?),
        ))
    } else {
        Ok(None)
    }
}

pub fn check_gagliardo_sobolev(a: &KernelOperator, s: f64, p: f64) -> Result<CheckRecord> {
    gagliardo_with(&Norms::new(a), s, p)
}

pub(crate) fn gagliardo_with(a: &Norms, s: f64, p: f64) -> Result<CheckRecord> {
    ensure_d1(a.op().grid())?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("s", s, "0 < s <= 1"));
    }
    let q = sobolev_q(s, p)?;
    let bound = gagliardo_bound(s, p)?;
    let lhs = a.schatten(q)?;
    let w = a.sobolev(s, p)?;
    let record = match bound {
        Some(c) => CheckRecord::bounded("gagliardo_sobolev", lhs, c * w, Some(c), QUADRATURE_TOL),
        None => CheckRecord::report("gagliardo_sobolev", lhs, w, None),
    };
    Ok(record
        .with("s", s)
        .with("p", p)
        .with("q", q)
        .with_params(&grid_params(a.op().grid())))
}

/// Product and sum forms of the gradient inequality,
/// `‖A‖_q ≤ 2^{1/r} C̃ ‖∇_x A‖^{1/2} ‖∇_ξ A‖^{1/2}` and
/// `‖A‖_q ≤ C̃ (‖∇_x A‖^r + ‖∇_ξ A‖^r)^{1/r}` with `r = min(p, 2)`.
pub fn check_sobolev_product(a: &KernelOperator, p: f64) -> Result<Vec<CheckRecord>> {
    let (lhs, product, sum, c, q, r) = product_terms(a, p)?;
    let params = grid_params(a.grid());
    Ok(vec![
        CheckRecord::bounded("sobolev_product", lhs, product, Some(2f64.powf(1.0 / r) * c), QUADRATURE_TOL)
            .with("p", p)
            .with("q", q)
            .with("r", r)
            .with_params(&params),
        CheckRecord::bounded("sobolev_sum", lhs, sum, Some(c), QUADRATURE_TOL)
            .with("p", p)
            .with("q", q)
            .with("r", r)
            .with_params(&params),
    ])
}

/// `(‖A‖_q, product rhs, sum rhs, C̃, q, r)`.
fn product_terms(a: &KernelOperator, p: f64) -> Result<(f64, f64, f64, f64, f64, f64)> {
    ensure_d1(a.grid())?;
    let q = sobolev_q(1.0, p)?;
    let c = gagliardo_bound(1.0, p)?.ok_or(Error::NoClosedForm { s: 1.0, p, d: 1 })?;
    let r = p.min(2.0);
    let g = quantum_gradient(a);
    let nx = schatten_norm(&g.grad_x[0], p)?;
    let nxi = schatten_norm(&g.grad_xi[0], p)?;
    let lhs = schatten_norm(a, q)?;
    let product = 2f64.powf(1.0 / r) * c * (nx * nxi).sqrt();
    let sum = c * (nx.powf(r) + nxi.powf(r)).powf(1.0 / r);
    Ok((lhs, product, sum, c, q, r))
}

/// Weyl symbol of the Töplitz-quantized Gaussian `e^{-|z|²/(w²ħ)}`,
/// dilated to `f(λx, ξ/λ)`.
fn dilated_gaussian(grid: &PhaseGrid, width: f64, lambda: f64) -> Result<KernelOperator> {
    let w2 = width * width;
    let spread = (w2 + 1.0) * grid.hbar();
    let symbol = sample_symbol(grid, |x, xi| {
        let (u, v) = (lambda * x, xi / lambda);
        w2 / (w2 + 1.0) * (-(u * u + v * v) / spread).exp()
    })?;
    Ok(weyl_quantize(&symbol))
}

/// The product form on the dilations `A_λ(x, y) = λ A(λx, λy)` of a
/// Töplitz Gaussian: each must satisfy the bound, with the same ratio as at
/// `λ = 1`.
pub fn check_sobolev_dilation(grid: &PhaseGrid, width: f64, p: f64, lambdas: &[f64]) -> Result<Vec<CheckRecord>> {
    let base = dilated_gaussian(grid, width, 1.0)?;
    let (l0, prod0, ..) = product_terms(&base, p)?;
    let ratio0 = l0 / prod0;
    let mut out = Vec::new();
    for &lambda in lambdas {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain("lambda", lambda, "lambda > 0"));
        }
        let a = dilated_gaussian(grid, width, lambda)?;
        let (lhs, product, _, c, q, r) = product_terms(&a, p)?;
        let params = grid_params(grid);
        out.push(
            CheckRecord::bounded("sobolev_dilation", lhs, product, Some(2f64.powf(1.0 / r) * c), QUADRATURE_TOL)
                .with("lambda", lambda)
                .with("p", p)
                .with("q", q)
                .with("width", width)
                .with_params(&params),
        );
        out.push(
            CheckRecord::equality("sobolev_dilation_consistency", lhs / product, ratio0, None, QUADRATURE_TOL)
                .with("lambda", lambda)
                .with("p", p)
                .with("q", q)
                .with("width", width)
                .with_params(&params),
        );
    }
    Ok(out)
}

/// `‖A‖_q ≤ C̃_B ‖A‖_{Ḣ^{s,p}}`, plus the gradient form
/// `‖A‖_q ≤ C ‖(-Δ)^{(s-1)/2} ∇A‖_{𝔏^p(ℓ²)}` for `s ∈ (0, 1)`.
pub fn check_bessel_sobolev(a: &KernelOperator, s: f64, p: f64) -> Result<Vec<CheckRecord>> {
    bessel_with(&Norms::new(a), s, p)
}

pub(crate) fn bessel_with(a: &Norms, s: f64, p: f64) -> Result<Vec<CheckRecord>> {
    let grid = *a.op().grid();
    ensure_d1(&grid)?;
    if !(p > 1.0) {
        return Err(domain("p", p, "p > 1"));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("s", s, "0 < s <= 1"));
    }
    let q = sobolev_q(s, p)?;
    let params = grid_params(&grid);
    let lhs = a.schatten(q)?;
    let hs = a.bessel(s, p)?;
    let main = if p == 2.0 {
        let c = gagliardo_bound(s, p)?.ok_or(Error::NoClosedForm { s, p, d: 1 })?;
        CheckRecord::bounded("bessel_sobolev", lhs, c * hs, Some(c), QUADRATURE_TOL)
    } else {
        CheckRecord::report("bessel_sobolev", lhs, hs, None)
    };
    let mut out = vec![main.with("s", s).with("p", p).with("q", q).with_params(&params)];
    if s < 1.0 {
        let g = quantum_gradient(a.op());
        let parts = vec![
            fractional_laplacian(&g.grad_x[0], (s - 1.0) / 2.0)?,
            fractional_laplacian(&g.grad_xi[0], (s - 1.0) / 2.0)?,
        ];
        let tuple = OperatorTuple::new(parts)?;
        let rhs = grid.h().powf(1.0 / p) * mixed_schatten_norm(&tuple, p, 2.0, MixedOrder::SumThenSchatten)?;
        out.push(
            CheckRecord::report("bessel_sobolev_gradient", lhs, rhs, None)
                .with("s", s)
                .with("p", p)
                .with("q", q)
                .with_params(&params),
        );
    }
    Ok(out)
}

/// `K_s ⋆ (-Δ)^{s/2} A` against `A` for the centered coherent projector,
/// with `K_s = c_{2,-s} |z|^{-(2-s)}`. Passes when the relative `𝔏²` error
/// is at most 5%.
pub fn check_riesz_reconstruction(grid: &PhaseGrid, s: f64) -> Result<CheckRecord> {
    ensure_d1(grid)?;
    if !(s > 0.0 && s < 2.0) {
        return Err(domain("s", s, "0 < s < 2"));
    }
    let a = coherent_state(grid, PhasePoint::origin())?.projector();
    let lap = fractional_laplacian(&a, s / 2.0)?;
    let kernel = singular_field(grid, 2.0 - s, riesz_constant(2.0, -s)?)?;
    let back = semiclassical_convolve(&kernel, &lap)?;
    // The zero Fourier mode of the symbol is annihilated by the multiplier.
    let mean_free = apply_symbol_multiplier(&a, |alpha, beta| {
        Complex64::new(if alpha == 0.0 && beta == 0.0 { 0.0 } else { 1.0 }, 0.0)
    });
    let err = schatten_norm(&back.sub(&mean_free)?, 2.0)?;
    let norm = schatten_norm(&a, 2.0)?;
    Ok(CheckRecord::bounded("riesz_reconstruction", err, 0.05 * norm, Some(0.05), 0.0)
        .with("s", s)
        .with_params(&grid_params(grid)))
}

/// `‖A‖_{Ẇ^{θ,∞}} ≤ C ‖A‖_{Ẇ^{s,p}}` with `1/p = (s - θ)/2`.
pub fn check_morrey(a: &KernelOperator, s: f64, theta: f64) -> Result<CheckRecord> {
    morrey_with(&Norms::new(a), s, theta)
}

pub(crate) fn morrey_with(a: &Norms, s: f64, theta: f64) -> Result<CheckRecord> {
    ensure_d1(a.op().grid())?;
    if !(theta > 0.0 && theta <= s && s <= 1.0) {
        return Err(domain("theta", theta, "0 < theta <= s <= 1"));
    }
    if theta == s {
        return Err(Error::Exponents("theta = s forces p = ∞".into()));
    }
    let p = 2.0 / (s - theta);
    let lhs = a.holder(theta)?;
    let rhs = a.sobolev(s, p)?;
    Ok(CheckRecord::report("morrey", lhs, rhs, None)
        .with("s", s)
        .with("theta", theta)
        .with("p", p)
        .with_params(&grid_params(a.op().grid())))
}

/// `(2^x - 2^{sx})^{1/x}`, equal to 2 at `x = ∞`.
fn sharp_factor(x: f64, s: f64) -> f64 {
    if x.is_infinite() {
        2.0
    } else {
        (2f64.powf(x) - 2f64.powf(s * x)).powf(1.0 / x)
    }
}

/// Comparisons between the Gagliardo seminorm and the first- and
/// second-difference Besov norms at smoothness `s ∈ (0, 1)`, the
/// interpolation inequalities, and the Littlewood–Paley and inclusion
/// constants. `r` is the third Besov index.
pub fn check_besov_suite(a: &KernelOperator, s: f64, p: f64, r: f64) -> Result<Vec<CheckRecord>> {
    besov_with(&Norms::new(a), s, p, r)
}

pub(crate) fn besov_with(a: &Norms, s: f64, p: f64, r: f64) -> Result<Vec<CheckRecord>> {
    let grid = *a.op().grid();
    ensure_d1(&grid)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(domain("s", s, "0 < s < 1"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(domain("p", p, "1 <= p < ∞"));
    }
    if !(r >= 1.0) {
        return Err(domain("r", r, "1 <= r <= ∞"));
    }
    let mut out = Vec::new();
    let tag = |rec: CheckRecord| rec.with("s", s).with("p", p).with_params(&grid_params(&grid));

    let gamma_p = gagliardo_constant(s, p, 1)?.powf(1.0 / p);
    let w = a.sobolev(s, p)?;
    let b = a.diff2(s, p, p)?;
    out.push(tag(CheckRecord::bounded(
        "besov_comparison_lower",
        (2.0 - 2f64.powf(s)) * w,
        gamma_p * b,
        None,
        QUADRATURE_TOL,
    )));
    out.push(tag(CheckRecord::bounded(
        "besov_comparison_upper",
        gamma_p * b,
        2.0 * w,
        Some(2.0),
        QUADRATURE_TOL,
    )));
    let pc = conjugate(p);
    if p == 2.0 {
        let c = sharp_factor(2.0, s) / gamma_p;
        out.push(tag(CheckRecord::equality("besov_identity", b, c * w, Some(c), IDENTITY_TOL)));
    } else {
        let (lo, hi) = if p > 2.0 { (pc, p) } else { (p, pc) };
        let (c_lo, c_hi) = (sharp_factor(lo, s) / gamma_p, sharp_factor(hi, s) / gamma_p);
        out.push(tag(CheckRecord::bounded("besov_sharp_lower", c_lo * w, b, Some(c_lo), QUADRATURE_TOL)));
        out.push(tag(CheckRecord::bounded("besov_sharp_upper", b, c_hi * w, Some(c_hi), QUADRATURE_TOL)));
    }

    let d1 = a.diff1(s, p, r)?;
    let d2 = a.diff2(s, p, r)?;
    let big = p.max(pc).max(r).max(conjugate(r));
    let (c_lo, c_hi) = (sharp_factor(conjugate(big), s), sharp_factor(big, s));
    let tag_r = |rec: CheckRecord| tag(rec).with("r", r);
    out.push(tag_r(CheckRecord::bounded("besov_differences_lower", c_lo * d1, d2, Some(c_lo), QUADRATURE_TOL)));
    out.push(tag_r(CheckRecord::bounded("besov_differences_upper", d2, c_hi * d1, Some(c_hi), QUADRATURE_TOL)));

    let norm_p = a.schatten(p)?;
    let grad = a.sobolev(1.0, p)?;
    let mix = norm_p.powf(1.0 - s) * grad.powf(s);
    let c_int = besov_interpolation_bound(s, r, 1)?;
    out.push(tag_r(CheckRecord::bounded(
        "besov_interpolation",
        0.5 * d2,
        c_int * mix,
        Some(c_int),
        QUADRATURE_TOL,
    )));
    let gamma = gagliardo_constant(s, p, 1)?;
    let c_sob = (2f64.powf((1.0 - s) * p) * sphere_area(2.0)? * gamma / (s * (1.0 - s) * p)).powf(1.0 / p);
    out.push(tag(CheckRecord::bounded(
        "sobolev_interpolation",
        w,
        c_sob * mix,
        Some(c_sob),
        QUADRATURE_TOL,
    )));

    out.push(tag_r(CheckRecord::report("littlewood_paley", d2, a.lp(s, p, r)?, None)));
    if r.is_finite() {
        out.push(tag_r(CheckRecord::report(
            "besov_inclusion",
            a.diff2(s, p, f64::INFINITY)?,
            d2,
            None,
        )));
    }
    Ok(out)
}

/// `‖A‖_{Ḃ¹_{p,∞}} ≤ 2 ‖A‖_{Ẇ^{1,p}}`, and at `p = 2` the identity
/// `‖∇A‖²_{𝔏²} = ‖A‖²_{Ḃ¹_{2,2}} / (2π ln 4)`.
pub fn check_besov_endpoint(a: &KernelOperator, p: f64) -> Result<Vec<CheckRecord>> {
    besov_endpoint_with(&Norms::new(a), p)
}

pub(crate) fn besov_endpoint_with(a: &Norms, p: f64) -> Result<Vec<CheckRecord>> {
    let grid = *a.op().grid();
    ensure_d1(&grid)?;
    let params = grid_params(&grid);
    let grad = a.sobolev(1.0, p)?;
    let mut out = vec![CheckRecord::bounded(
        "besov_endpoint",
        a.diff2(1.0, p, f64::INFINITY)?,
        2.0 * grad,
        Some(2.0),
        QUADRATURE_TOL,
    )
    .with("p", p)
    .with_params(&params)];
    if p == 2.0 {
        let c = (1.0 / (4f64.ln() * sphere_area(2.0)?)).sqrt();
        out.push(
            CheckRecord::equality("besov_gradient_identity", grad, c * a.diff2(1.0, 2.0, 2.0)?, Some(c), IDENTITY_TOL)
                .with("p", p)
                .with_params(&params),
        );
    }
    Ok(out)
}

/// `C^{-1} ‖A‖_{B̃⁰_{p,∞}} ≤ ‖A‖_{𝔏^p} ≤ C ‖A‖_{B̃⁰_{p,1}}`, both constants
/// reported.
pub fn check_besov_schatten(a: &KernelOperator, p: f64) -> Result<Vec<CheckRecord>> {
    besov_schatten_with(&Norms::new(a), p)
}

pub(crate) fn besov_schatten_with(a: &Norms, p: f64) -> Result<Vec<CheckRecord>> {
    let params = grid_params(a.op().grid());
    let norm = a.schatten(p)?;
    Ok(vec![
        CheckRecord::report("besov_schatten_lower", a.lp(0.0, p, f64::INFINITY)?, norm, None)
            .with("p", p)
            .with_params(&params),
        CheckRecord::report("besov_schatten_upper", norm, a.lp(0.0, p, 1.0)?, None)
            .with("p", p)
            .with_params(&params),
    ])
}

/// Largest `‖∇^n Δ_j A‖_{𝔏^q} / (2^{j(n + 2(1/p - 1/q))} ‖A‖_{𝔏^p})` over
/// the resolvable blocks.
pub fn check_bernstein(a: &KernelOperator, n: u32, p: f64, q: f64) -> Result<CheckRecord> {
    bernstein_with(&Norms::new(a), n, p, q)
}

pub(crate) fn bernstein_with(a: &Norms, n: u32, p: f64, q: f64) -> Result<CheckRecord> {
    let grid = *a.op().grid();
    ensure_d1(&grid)?;
    if !(q >= p && p >= 1.0) {
        return Err(domain("q", q, "1 <= p <= q"));
    }
    let norm = a.schatten(p)?;
    let (lo, hi) = resolvable_range(&grid);
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for j in lo..=hi {
        let block = dyadic_block(a.op(), j);
        let lhs = sobolev_norm(&block, n, q)?;
        let rhs = 2f64.powf(j as f64 * (n as f64 + 2.0 * (inv(p) - inv(q)))) * norm;
        let c = lhs / rhs;
        if c > best.2 {
            best = (lhs, rhs, c);
        }
    }
    Ok(CheckRecord::report("bernstein", best.0, best.1, None)
        .with("order", n as i64)
        .with("p", p)
        .with("q", q)
        .with_params(&grid_params(&grid)))
}

/// `‖A‖_{Ḃ^{s₀}_{q,r}} ≤ C ‖A‖_{Ḃ^{s₁}_{p,r}}` with `s₁ - s₀ = 2(1/p - 1/q)`.
pub fn check_besov_embedding(a: &KernelOperator, p: f64, q: f64, s0: f64, r: f64) -> Result<CheckRecord> {
    besov_embedding_with(&Norms::new(a), p, q, s0, r)
}

pub(crate) fn besov_embedding_with(a: &Norms, p: f64, q: f64, s0: f64, r: f64) -> Result<CheckRecord> {
    ensure_d1(a.op().grid())?;
    if !(q >= p) {
        return Err(domain("q", q, "q >= p"));
    }
    let s1 = s0 + 2.0 * (inv(p) - inv(q));
    let lhs = a.diff2(s0, q, r)?;
    let rhs = a.diff2(s1, p, r)?;
    Ok(CheckRecord::report("besov_embedding", lhs, rhs, None)
        .with("p", p)
        .with("q", q)
        .with("r", r)
        .with("s0", s0)
        .with("s1", s1)
        .with_params(&grid_params(a.op().grid())))
}

/// `‖R A‖_{𝔏^p} / ‖A‖_{𝔏^p}` for the Riesz Schur multiplier.
pub fn check_riesz_transform(a: &KernelOperator, p: f64) -> Result<CheckRecord> {
    let lhs = schatten_norm(&riesz_schur_multiplier(a), p)?;
    Ok(CheckRecord::report("riesz_transform", lhs, schatten_norm(a, p)?, None)
        .with("p", p)
        .with_params(&grid_params(a.grid())))
}

/// `ħ² h ‖∇_ξ A‖²_{𝔏²} ≤ 2 σ_x²` for the normalized state `A / (h tr A)`.
pub fn check_uncertainty(a: &KernelOperator) -> Result<CheckRecord> {
    let grid = *a.grid();
    ensure_d1(&grid)?;
    let ev = hermitian_eigenvalues(a.hermitian_part().matrix().as_ref())?;
    let top = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if ev.first().is_some_and(|&lo| lo < -1e-10 * top) || a.hermiticity_defect() > 1e-10 * top.max(f64::MIN_POSITIVE) {
        return Err(domain("min eigenvalue", ev[0], "positive semidefinite operator"));
    }
    let rho = normalize_state(a)?;
    let (h, hbar, dx) = (grid.h(), grid.hbar(), grid.dx());
    let gxi = &quantum_gradient(&rho).grad_xi[0];
    let lhs = hbar * hbar * h * schatten_norm(gxi, 2.0)?.powi(2);
    let xs = grid.positions();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (i, x) in xs.iter().enumerate() {
        let w = rho.get(i, i).re * dx * h;
        m1 += w * x;
        m2 += w * x * x;
    }
    let rhs = 2.0 * (m2 - m1 * m1);
    Ok(CheckRecord::bounded("uncertainty", lhs, rhs, Some(1.0), EXACT_TOL).with_params(&grid_params(&grid)))
}

/// Balanced grid for the lower-bound sweep: `dx = dξ` with `N` points.
pub fn lower_bound_grid(hbar: f64, n_points: usize) -> Result<PhaseGrid> {
    let half_width = (n_points as f64 * PI * hbar / 2.0).sqrt();
    let grid = PhaseGrid::new(1, n_points, half_width, hbar)?;
    if grid.dx() > hbar.sqrt() / 2.0 || half_width < 3.0 {
        return Err(Error::GridTooCoarse(format!(
            "n = {n_points} at hbar = {hbar}: need dx <= sqrt(hbar)/2 and L >= 3, got dx = {}, L = {half_width}",
            grid.dx()
        )));
    }
    Ok(grid)
}

/// `R(ħ) = ‖A‖_{𝔏^q} / ‖A‖_{Ẇ^{s,p}}` for the Töplitz quantization of the
/// classical optimizer `(1 + |z|^{p'})^{-2/q}`.
pub fn optimizer_ratio(s: f64, p: f64, grid: &PhaseGrid) -> Result<(f64, f64)> {
    let q = sobolev_q(s, p)?;
    let pc = conjugate(p);
    let profile = move |r: f64| {
        if pc.is_infinite() {
            match r.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => 1.0,
                Some(std::cmp::Ordering::Equal) => 0.5f64.powf(2.0 / q),
                _ => 0.0,
            }
        } else {
            (1.0 + r.powf(pc)).powf(-2.0 / q)
        }
    };
    let symbol = sample_symbol(grid, |x, xi| profile(x.hypot(xi)))?;
    let a = toplitz_quantize(&symbol);
    let norms = Norms::new(&a);
    Ok((norms.schatten(q)?, norms.sobolev(s, p)?))
}

/// The lower-bound construction along an ħ-sweep: one report per ħ, and for
/// two or more values a monotonicity record (`max R(ħ_k)/R(ħ_{k+1}) ≤ 1`
/// with ħ decreasing) and a gap record (`0.9 C_S ≤ R(ħ_min)`).
pub fn estimate_lower_bound(s: f64, p: f64, hbar_list: &[f64], n_points: usize) -> Result<Vec<CheckRecord>> {
    if !(s == 1.0 || p == 2.0) {
        return Err(Error::NoClosedForm { s, p, d: 1 });
    }
    let q = sobolev_q(s, p)?;
    let c_s = sobolev_constant(s, p, 1)?;
    let mut hbars = hbar_list.to_vec();
    hbars.sort_by(|a, b| b.total_cmp(a));
    hbars.dedup();
    if hbars.is_empty() {
        return Ok(Vec::new());
    }
    let grids = hbars
        .iter()
        .map(|&hb| lower_bound_grid(hb, n_points))
        .collect::<Result<Vec<_>>>()?;
    let tag = |rec: CheckRecord| rec.with("s", s).with("p", p).with("q", q);
    let mut out = Vec::new();
    let mut ratios = Vec::new();
    for grid in &grids {
        let (lhs, rhs) = optimizer_ratio(s, p, grid)?;
        ratios.push(lhs / rhs);
        out.push(tag(CheckRecord::report("lower_bound", lhs, rhs, Some(c_s))).with_params(&grid_params(grid)));
    }
    if ratios.len() > 1 {
        let worst = ratios.windows(2).map(|w| w[0] / w[1]).fold(f64::NEG_INFINITY, f64::max);
        let finest = *ratios.last().expect("nonempty");
        let hbar_min = *hbars.last().expect("nonempty");
        // The fractional seminorm carries the singular-quadrature error.
        let tol = if s < 1.0 { QUADRATURE_TOL } else { EXACT_TOL };
        out.push(
            tag(CheckRecord::bounded("lower_bound_monotone", worst, 1.0, None, tol))
                .with("hbar_min", hbar_min)
                .with("n", n_points),
        );
        out.push(
            tag(CheckRecord::bounded("lower_bound_gap", 0.9 * c_s, finest, Some(c_s), EXACT_TOL))
                .with("hbar_min", hbar_min)
                .with("n", n_points),
        );
    }
    Ok(out)
}
