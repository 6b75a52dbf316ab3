//! Scaled Schatten norms and the Sobolev, Bessel, Hölder and Besov norms
//! built from them.
//!
//! `‖A‖_{𝔏^p} = h^{1/p} ‖dx · kernel‖_p`. Translation-difference norms sum
//! over the symmetric offset cell. The origin cell uses the leading Taylor
//! term of the difference; outside the cell the translates no longer overlap
//! `A` and the integrand is replaced by its disjoint-support value,
//! integrated in closed form.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::calculus::{dyadic_block, fractional_laplacian, quantum_gradient, resolvable_range};
use crate::constants::{conjugate, gagliardo_constant};
use crate::error::{domain, Error, Result};
use crate::grid::PhaseGrid;
use crate::linalg::{hermitian_eigenvalues, psd_trace_power, schatten, schatten_from_singular, singular_values};
use crate::operator::KernelOperator;
use crate::quadrature::{half_offsets, legendre_nodes, tail_weight, Offset};
use crate::quantization::symbol_spectrum;
use crate::spectral::fft2;

/// Smoothness and integrability exponents `(s, p, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl NormParams {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("r", r)?;
        if !s.is_finite() {
            return Err(domain("s", s, "finite"));
        }
        Ok(Self { s, p, r })
    }

    pub fn p_conjugate(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn r_conjugate(&self) -> f64 {
        conjugate(self.r)
    }
}

/// Ordered operators on one grid.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    components: Vec<KernelOperator>,
}

impl OperatorTuple {
    pub fn new(components: Vec<KernelOperator>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyTuple)?;
        for c in &components[1..] {
            first.grid().ensure_same(c.grid())?;
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[KernelOperator] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn grid(&self) -> &PhaseGrid {
        self.components[0].grid()
    }
}

/// Which mixed norm [`mixed_schatten_norm`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedOrder {
    /// `‖A‖_{ℓ^r(𝔖^p)} = (Σ ‖A_k‖_p^r)^{1/r}`.
    SchattenThenSum,
    /// `‖A‖_{𝔖^p(ℓ^r)} = ‖(Σ |A_k|^r)^{1/r}‖_p`.
    SumThenSchatten,
}

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(domain(name, p, "1 <= exponent <= ∞"))
    }
}

fn h_factor(grid: &PhaseGrid, p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        grid.h().powf(1.0 / p)
    }
}

/// `‖A‖_{𝔏^p}`.
pub fn schatten_norm(a: &KernelOperator, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    Ok(h_factor(a.grid(), p) * schatten(a.matrix().as_ref(), p)?)
}

/// Raw mixed Schatten norm of the matrices `dx · kernel` of a tuple.
pub fn mixed_schatten_norm(t: &OperatorTuple, p: f64, r: f64, order: MixedOrder) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("r", r)?;
    let mats: Vec<Mat<Complex64>> = t.components().iter().map(|c| c.matrix()).collect();
    mixed_schatten_matrices(&mats, p, r, order)
}

/// [`mixed_schatten_norm`] on bare square matrices.
pub fn mixed_schatten_matrices(mats: &[Mat<Complex64>], p: f64, r: f64, order: MixedOrder) -> Result<f64> {
    if mats.is_empty() {
        return Err(Error::EmptyTuple);
    }
    match order {
        MixedOrder::SchattenThenSum => {
            let norms = mats
                .iter()
                .map(|m| schatten(m.as_ref(), p))
                .collect::<Result<Vec<_>>>()?;
            Ok(lr_sum(&norms, r))
        }
        MixedOrder::SumThenSchatten => {
            let n = mats[0].nrows();
            let mut acc = Mat::<Complex64>::zeros(n, n);
            if r == 2.0 {
                for m in mats {
                    acc += m.adjoint() * m;
                }
            } else if r.is_infinite() {
                return Err(domain("r", r, "finite r for the 𝔖^p(ℓ^r) order"));
            } else {
                for m in mats {
                    acc += crate::linalg::abs_power(m.as_ref(), r)?;
                }
            }
            let herm = (&acc + acc.adjoint()) * faer::Scale(Complex64::new(0.5, 0.0));
            if p.is_infinite() {
                let top = hermitian_eigenvalues(herm.as_ref())?
                    .into_iter()
                    .fold(0.0, f64::max);
                Ok(top.powf(1.0 / r))
            } else {
                Ok(psd_trace_power(herm.as_ref(), p / r)?.powf(1.0 / p))
            }
        }
    }
}

fn lr_sum(values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        values.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `‖∇^n A‖_{𝔏^p}` for `n ∈ {0, 1, 2}`, components combined in `ℓ²`.
pub fn sobolev_norm(a: &KernelOperator, n: u32, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let tuple = match n {
        0 => return schatten_norm(a, p),
        1 => quantum_gradient(a).joint(),
        2 => {
            let first = quantum_gradient(a).joint();
            let mut parts = Vec::with_capacity(4);
            for c in first.components() {
                parts.extend(quantum_gradient(c).joint().components().iter().cloned());
            }
            OperatorTuple::new(parts)?
        }
        _ => return Err(domain("n", n as f64, "n in {0, 1, 2}")),
    };
    Ok(h_factor(a.grid(), p) * mixed_schatten_norm(&tuple, p, 2.0, MixedOrder::SumThenSchatten)?)
}

/// `‖A‖_{Ḣ^{s,p}} = ‖(-Δ_ħ)^{s/2} A‖_{𝔏^p}`.
pub fn bessel_norm(a: &KernelOperator, s: f64, p: f64) -> Result<f64> {
    schatten_norm(&fractional_laplacian(a, s / 2.0)?, p)
}

/// Fractional Gagliardo seminorm `‖A‖_{Ẇ^{s,p}}`, `s ∈ (0, 1)`, finite `p`.
pub fn sobolev_norm_frac(a: &KernelOperator, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain("s", s, "0 < s < 1"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(domain("p", p, "1 <= p < ∞"));
    }
    let gamma = gagliardo_constant(s, p, a.grid().d())?;
    let integral = difference_integral(a, Difference::First, p, p, 2.0 + s * p)?;
    Ok((gamma * integral).powf(1.0 / p))
}

/// `sup_z ‖𝖳_z A - A‖_{𝔏^∞} / |z|^s`.
pub fn holder_norm(a: &KernelOperator, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("s", s, "0 < s <= 1"));
    }
    difference_sup(a, Difference::First, f64::INFINITY, s)
}

/// `‖(𝖳_{2z} A - 2𝖳_z A + A) / |z|^{s + 2/r}‖_{L^r_z(𝔏^p)}`, `s ∈ (0, 2)`.
pub fn besov_norm_diff2(a: &KernelOperator, s: f64, p: f64, r: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(domain("s", s, "0 < s < 2"));
    }
    besov_difference(a, Difference::Second, s, p, r)
}

/// First-difference Besov norm, `s ∈ (0, 1)`.
pub fn besov_norm_diff1(a: &KernelOperator, s: f64, p: f64, r: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain("s", s, "0 < s < 1"));
    }
    besov_difference(a, Difference::First, s, p, r)
}

/// Besov seminorm from the first-difference definition extended to `s = 1`
/// with `r = ∞`, as used by the Sobolev comparison `‖A‖_{Ḃ¹_{p,∞}} ≤ 2‖A‖_{Ẇ^{1,p}}`.
pub fn besov_norm_diff1_endpoint(a: &KernelOperator, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    difference_sup(a, Difference::First, p, 1.0)
}

/// Littlewood–Paley Besov norm `‖2^{js} ‖Δ_j A‖_{𝔏^p}‖_{ℓ^r_j}` over the
/// resolvable band.
pub fn besov_norm_lp(a: &KernelOperator, s: f64, p: f64, r: f64) -> Result<f64> {
    DyadicProfile::new(a)?.besov(s, p, r)
}

/// Singular values of every resolvable dyadic block of one operator.
#[derive(Debug, Clone)]
pub struct DyadicProfile {
    grid: PhaseGrid,
    blocks: Vec<(i32, Vec<f64>)>,
}

impl DyadicProfile {
    pub fn new(a: &KernelOperator) -> Result<Self> {
        let (lo, hi) = resolvable_range(a.grid());
        let blocks = (lo..=hi)
            .map(|j| Ok((j, singular_values(dyadic_block(a, j).matrix().as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: *a.grid(), blocks })
    }

    /// `‖2^{js} ‖Δ_j A‖_{𝔏^p}‖_{ℓ^r_j}`.
    pub fn besov(&self, s: f64, p: f64, r: f64) -> Result<f64> {
        check_exponent("p", p)?;
        check_exponent("r", r)?;
        let scale = h_factor(&self.grid, p);
        let terms: Vec<f64> = self
            .blocks
            .iter()
            .map(|(j, sv)| 2f64.powf(*j as f64 * s) * scale * schatten_from_singular(sv, p))
            .collect();
        Ok(lr_sum(&terms, r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Difference {
    First,
    Second,
}

impl Difference {
    /// `‖δ_z A‖_{𝔏^p}` once `z` is far enough that translates are disjoint.
    fn far_field(self, norm_a: f64, p: f64) -> f64 {
        match (self, p.is_infinite()) {
            (Difference::First, true) => norm_a,
            (Difference::Second, true) => 2.0 * norm_a,
            (Difference::First, false) => 2f64.powf(1.0 / p) * norm_a,
            (Difference::Second, false) => (2.0 + 2f64.powf(p)).powf(1.0 / p) * norm_a,
        }
    }

    /// Triangle-inequality bound `‖δ_z A‖ ≤ c ‖A‖`.
    fn bound(self) -> f64 {
        match self {
            Difference::First => 2.0,
            Difference::Second => 4.0,
        }
    }
}

fn besov_difference(a: &KernelOperator, kind: Difference, s: f64, p: f64, r: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("r", r)?;
    if r.is_infinite() {
        return difference_sup(a, kind, p, s);
    }
    Ok(difference_integral(a, kind, p, r, s * r + 2.0)?.powf(1.0 / r))
}

/// `∫ ‖δ_z A‖_{𝔏^p}^r |z|^{-α} dz` including the analytic far field.
fn difference_integral(a: &KernelOperator, kind: Difference, p: f64, r: f64, alpha: f64) -> Result<f64> {
    DifferenceProfile::build(a, kind, p)?.integral(r, alpha)
}

/// The `𝔏^p` norms of the first or second differences of one operator at
/// every lattice offset, with the origin-cell directional norms. Every
/// Besov or Gagliardo quadrature at this `p` is a weighted sum of them.
#[derive(Debug, Clone)]
pub struct DifferenceProfile {
    grid: PhaseGrid,
    kind: Difference,
    p: f64,
    norm_a: f64,
    /// `(|z|, ‖δ_z A‖_{𝔏^p})` over one of each `±z` pair.
    values: Vec<(f64, f64)>,
    origin: OriginTerm,
}

impl DifferenceProfile {
    /// `second` selects `𝖳_z A + 𝖳_{-z} A - 2A` over `𝖳_z A - A`.
    pub fn new(a: &KernelOperator, second: bool, p: f64) -> Result<Self> {
        check_exponent("p", p)?;
        if p.is_infinite() {
            return Err(domain("p", p, "finite p"));
        }
        let kind = if second { Difference::Second } else { Difference::First };
        Self::build(a, kind, p)
    }

    fn build(a: &KernelOperator, kind: Difference, p: f64) -> Result<Self> {
        let grid = *a.grid();
        let offsets = half_offsets(&grid);
        let values = if p == 2.0 {
            let profile = L2Profile::new(a);
            offsets.iter().map(|o| (o.norm, profile.norm(kind, o))).collect()
        } else {
            let engine = DiffEngine::new(a)?;
            let scale = h_factor(&grid, p);
            offsets
                .iter()
                .map(|o| Ok((o.norm, scale * schatten_from_singular(&engine.singular_values(kind, o.s, o.k)?, p))))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Self {
            grid,
            kind,
            p,
            norm_a: schatten_norm(a, p)?,
            values,
            origin: OriginTerm::new(a, kind, p)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `∫ ‖δ_z A‖^r |z|^{-α} dz`.
    pub fn integral(&self, r: f64, alpha: f64) -> Result<f64> {
        let tail = self.kind.far_field(self.norm_a, self.p).powf(r) * tail_weight(&self.grid, alpha);
        let sum: f64 = self.values.iter().map(|(z, v)| v.powf(r) * z.powf(-alpha)).sum();
        Ok(2.0 * sum * self.grid.dz() + tail + self.origin.integral(r, alpha)?)
    }

    /// `‖ ‖δ_z A‖ / |z|^{s + 2/r} ‖_{L^r_z}`, the supremum over offsets when
    /// `r = ∞`.
    pub fn besov(&self, s: f64, r: f64) -> Result<f64> {
        check_exponent("r", r)?;
        if r.is_infinite() {
            return Ok(self.values.iter().map(|(z, v)| v * z.powf(-s)).fold(0.0, f64::max));
        }
        Ok(self.integral(r, s * r + 2.0)?.powf(1.0 / r))
    }
}

const ORIGIN_NODES: usize = 12;

/// Leading Taylor term of the integral over the origin cell: `δ_z A` is
/// replaced by `(z·∇)A` or `(z·∇)²A`, whose norm is `|z|^m G(θ)`. `G` is
/// stored at the angular quadrature nodes.
#[derive(Debug, Clone)]
struct OriginTerm {
    order: f64,
    /// `(weight, G(θ), reach(θ))` per node.
    nodes: Vec<(f64, f64, f64)>,
}

impl OriginTerm {
    fn new(a: &KernelOperator, kind: Difference, p: f64) -> Result<Self> {
        let grid = *a.grid();
        let first = quantum_gradient(a);
        let (gx, gxi) = (first.grad_x[0].clone(), first.grad_xi[0].clone());
        let parts: Vec<Mat<Complex64>> = match kind {
            Difference::First => vec![gx.matrix(), gxi.matrix()],
            Difference::Second => {
                let dx = quantum_gradient(&gx);
                let dxi = quantum_gradient(&gxi);
                vec![dx.grad_x[0].matrix(), dx.grad_xi[0].matrix(), dxi.grad_xi[0].matrix()]
            }
        };
        let parts = if p == 2.0 {
            parts
        } else {
            compress(&parts)?.unwrap_or(parts)
        };
        let scale = h_factor(&grid, p);
        let directional = |t: f64| -> Result<f64> {
            let (c, s) = (t.cos(), t.sin());
            let coef = match parts.len() {
                2 => vec![c, s],
                _ => vec![c * c, 2.0 * c * s, s * s],
            };
            let mut m = &parts[0] * faer::Scale(Complex64::new(coef[0], 0.0));
            for (part, w) in parts.iter().zip(&coef).skip(1) {
                m += part * faer::Scale(Complex64::new(*w, 0.0));
            }
            Ok(scale * schatten(m.as_ref(), p)?)
        };
        let (hx, hxi) = (0.5 * grid.dx(), 0.5 * grid.dxi());
        let corner = (hxi / hx).atan();
        let reach = |t: f64| (hx / t.cos().abs()).min(hxi / t.sin().abs());
        let pieces = [(0.0, corner), (corner, PI - corner), (PI - corner, PI)];
        let mut nodes = Vec::with_capacity(3 * ORIGIN_NODES);
        for (lo, hi) in pieces {
            for (t, w) in legendre_nodes(ORIGIN_NODES, lo, hi) {
                nodes.push((w, directional(t)?, reach(t)));
            }
        }
        let order = match kind {
            Difference::First => 1.0,
            Difference::Second => 2.0,
        };
        Ok(Self { order, nodes })
    }

    fn integral(&self, r: f64, alpha: f64) -> Result<f64> {
        let power = self.order * r - alpha + 2.0;
        if power <= 0.0 {
            return Err(domain("s", (alpha - 2.0) / r, "s below the difference order"));
        }
        let total: f64 = self
            .nodes
            .iter()
            .map(|(w, g, reach)| w * g.powf(r) * reach.powf(power) / power)
            .sum();
        Ok(2.0 * total)
    }
}

#[cfg(test)]
fn origin_cell(a: &KernelOperator, kind: Difference, p: f64, r: f64, alpha: f64) -> Result<f64> {
    OriginTerm::new(a, kind, p)?.integral(r, alpha)
}

/// Joint compression `M_i = Q_L C_i Q_R*` of matrices sharing low-rank
/// column and row spaces; `None` when the common rank is not small.
fn compress(mats: &[Mat<Complex64>]) -> Result<Option<Vec<Mat<Complex64>>>> {
    let n = mats[0].nrows();
    let m = mats.len();
    let wide = Mat::from_fn(n, n * m, |i, c| mats[c / n][(i, c % n)]);
    let tall = Mat::from_fn(n * m, n, |c, j| mats[c / n][(c % n, j)]);
    let (Some(left), Some(right)) = (range_basis(wide.as_ref(), false)?, range_basis(tall.as_ref(), true)?) else {
        return Ok(None);
    };
    Ok(Some(mats.iter().map(|x| left.adjoint() * x * &right).collect()))
}

/// Orthonormal basis of the column space, or of the row space when `rows`.
fn range_basis(m: faer::MatRef<'_, Complex64>, rows: bool) -> Result<Option<Mat<Complex64>>> {
    let svd = m.thin_svd().map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
    let sv: Vec<f64> = svd.S().column_vector().iter().map(|v| v.re).collect();
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().take_while(|&&v| v > RANK_TOL * top).count().max(1);
    let n = if rows { m.ncols() } else { m.nrows() };
    if 4 * rank > n {
        return Ok(None);
    }
    let basis = if rows { svd.V() } else { svd.U() };
    Ok(Some(basis.subcols(0, rank).to_owned()))
}

/// `max_z ‖δ_z A‖_{𝔏^p} / |z|^s`, visiting offsets by increasing `|z|` and
/// stopping once the triangle bound cannot beat the running maximum.
fn difference_sup(a: &KernelOperator, kind: Difference, p: f64, s: f64) -> Result<f64> {
    let grid = *a.grid();
    let norm_a = schatten_norm(a, p)?;
    if norm_a == 0.0 {
        return Ok(0.0);
    }
    let offsets = half_offsets(&grid);
    let profile = L2Profile::new(a);
    if p == 2.0 {
        return Ok(offsets.iter().map(|o| profile.norm(kind, o) * o.norm.powf(-s)).fold(0.0, f64::max));
    }
    // For p > 2 the 𝔏² norm bounds the 𝔏^p norm up to h^{1/p - 1/2}.
    let mut bounded: Vec<(f64, &Offset)> = offsets
        .iter()
        .map(|o| {
            let far = kind.bound() * norm_a;
            let cap = if p > 2.0 {
                far.min(h_factor(&grid, p) / h_factor(&grid, 2.0) * profile.norm(kind, o))
            } else {
                far
            };
            (cap * o.norm.powf(-s), o)
        })
        .collect();
    bounded.sort_by(|x, y| y.0.total_cmp(&x.0));
    let engine = DiffEngine::new(a)?;
    let scale = h_factor(&grid, p);
    let mut best = 0.0f64;
    for (cap, o) in bounded {
        if cap <= best {
            break;
        }
        let norm = scale * schatten_from_singular(&engine.singular_values(kind, o.s, o.k)?, p);
        best = best.max(norm * o.norm.powf(-s));
    }
    Ok(best)
}

/// All `𝔏²` difference norms at once from the autocorrelation of the symbol
/// spectrum.
struct L2Profile {
    n: usize,
    scale: f64,
    autocorr: Vec<f64>,
}

impl L2Profile {
    fn new(a: &KernelOperator) -> Self {
        let grid = a.grid();
        let n = grid.n_points();
        let mut power: Vec<Complex64> = symbol_spectrum(a)
            .into_iter()
            .map(|v| Complex64::new(v.norm_sqr(), 0.0))
            .collect();
        fft2(&mut power, n, true);
        Self {
            n,
            scale: grid.dz() / (n * n) as f64,
            autocorr: power.into_iter().map(|v| v.re).collect(),
        }
    }

    fn at(&self, s: isize, k: isize) -> f64 {
        let n = self.n as isize;
        self.autocorr[(s.rem_euclid(n) * n + k.rem_euclid(n)) as usize]
    }

    fn norm(&self, kind: Difference, o: &Offset) -> f64 {
        let p0 = self.at(0, 0);
        let sq = match kind {
            Difference::First => 2.0 * (p0 - self.at(o.s, o.k)),
            Difference::Second => 6.0 * p0 - 8.0 * self.at(o.s, o.k) + 2.0 * self.at(2 * o.s, 2 * o.k),
        };
        (sq * self.scale).max(0.0).sqrt()
    }
}

const RANK_TOL: f64 = 1e-14;

/// Overlap below which translated factors count as orthogonal to the originals.
const DISJOINT_TOL: f64 = 1e-13;

/// Singular values of `𝖳_z A - A` and `𝖳_z A + 𝖳_{-z} A - 2A` for lattice
/// offsets. Numerically low-rank operators go through a thin factorization
/// `A = U S V*`, so each offset costs a small factorization and SVD instead
/// of a full one.
struct DiffEngine {
    grid: PhaseGrid,
    matrix: Mat<Complex64>,
    factors: Option<(Mat<Complex64>, Vec<f64>, Mat<Complex64>)>,
    roots: Vec<Complex64>,
}

impl DiffEngine {
    fn new(a: &KernelOperator) -> Result<Self> {
        let grid = *a.grid();
        let n = grid.n_points();
        let matrix = a.matrix();
        let svd = matrix
            .thin_svd()
            .map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
        let sv: Vec<f64> = svd.S().column_vector().iter().map(|v| v.re).collect();
        let top = sv.first().copied().unwrap_or(0.0);
        let rank = sv.iter().take_while(|&&v| v > RANK_TOL * top).count();
        let factors = (3 * rank <= n / 2).then(|| {
            let u = svd.U().subcols(0, rank).to_owned();
            let v = svd.V().subcols(0, rank).to_owned();
            (u, sv[..rank].to_vec(), v)
        });
        let roots = (0..n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
            .collect();
        Ok(Self {
            grid,
            matrix,
            factors,
            roots,
        })
    }

    /// `e^{i ξ_k x_i / ħ}` on the lattice, which is `(-1)^k e^{2πi k i / N}`.
    fn phase(&self, k: isize, i: usize) -> Complex64 {
        let n = self.roots.len() as isize;
        let w = self.roots[(k * i as isize).rem_euclid(n) as usize];
        if k.rem_euclid(2) == 0 {
            w
        } else {
            -w
        }
    }

    /// `τ_z` applied to the columns of `m`.
    fn shift(&self, m: &Mat<Complex64>, s: isize, k: isize) -> Mat<Complex64> {
        let n = self.grid.n_points();
        let phases: Vec<Complex64> = (0..n).map(|i| self.phase(k, i)).collect();
        Mat::from_fn(n, m.ncols(), |i, c| {
            let src = (i as isize - s).rem_euclid(n as isize) as usize;
            phases[i] * m[(src, c)]
        })
    }

    fn translate_dense(&self, s: isize, k: isize) -> Mat<Complex64> {
        let n = self.grid.n_points();
        let phases: Vec<Complex64> = (0..n).map(|i| self.phase(k, i)).collect();
        Mat::from_fn(n, n, |i, j| {
            let si = (i as isize - s).rem_euclid(n as isize) as usize;
            let sj = (j as isize - s).rem_euclid(n as isize) as usize;
            phases[i] * phases[j].conj() * self.matrix[(si, sj)]
        })
    }

    fn singular_values(&self, kind: Difference, s: isize, k: isize) -> Result<Vec<f64>> {
        let Some((u, sv, v)) = &self.factors else {
            let diff = match kind {
                Difference::First => &self.translate_dense(s, k) - &self.matrix,
                Difference::Second => {
                    let two = &self.matrix * faer::Scale(Complex64::new(2.0, 0.0));
                    &(&self.translate_dense(s, k) + &self.translate_dense(-s, -k)) - &two
                }
            };
            return singular_values(diff.as_ref());
        };
        let r = sv.len();
        if r == 0 {
            return Ok(Vec::new());
        }
        let (left, right, weights): (Vec<Mat<Complex64>>, Vec<Mat<Complex64>>, Vec<f64>) = match kind {
            Difference::First => (
                vec![self.shift(u, s, k), u.clone()],
                vec![self.shift(v, s, k), v.clone()],
                vec![1.0, -1.0],
            ),
            Difference::Second => (
                vec![self.shift(u, s, k), self.shift(u, -s, -k), u.clone()],
                vec![self.shift(v, s, k), self.shift(v, -s, -k), v.clone()],
                vec![1.0, 1.0, -2.0],
            ),
        };
        let blocks = left.len();
        let n = self.grid.n_points();
        let w1 = Mat::from_fn(n, blocks * r, |i, c| left[c / r][(i, c % r)]);
        let w2 = Mat::from_fn(n, blocks * r, |i, c| right[c / r][(i, c % r)]);
        let (g1, g2) = (w1.adjoint() * &w1, w2.adjoint() * &w2);
        if off_block_max(&g1, r) <= DISJOINT_TOL && off_block_max(&g2, r) <= DISJOINT_TOL {
            return Ok(weights
                .iter()
                .flat_map(|w| sv.iter().map(move |x| w.abs() * x))
                .collect());
        }
        let (r1, r2) = match (gram_root(&g1)?, gram_root(&g2)?) {
            (Some(a), Some(b)) => (a, b),
            _ => (w1.qr().thin_R().to_owned(), w2.qr().thin_R().to_owned()),
        };
        let middle = Mat::from_fn(blocks * r, blocks * r, |i, j| {
            if i == j {
                Complex64::new(weights[i / r] * sv[i % r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let core = &r1 * &middle * r2.adjoint();
        singular_values(core.as_ref())
    }
}

/// Largest entry of a Gram matrix outside its `r × r` diagonal blocks.
fn off_block_max(g: &Mat<Complex64>, r: usize) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            if i / r != j / r {
                worst = worst.max(g[(i, j)].norm());
            }
        }
    }
    worst
}

/// `R` with `R* R = G` from the eigendecomposition, or `None` when `G` is
/// too close to singular for the square root to be accurate.
fn gram_root(g: &Mat<Complex64>) -> Result<Option<Mat<Complex64>>> {
    const CONDITION: f64 = 1e-6;
    let evd = g
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Linalg(format!("eigendecomposition: {e:?}")))?;
    let lambda: Vec<f64> = evd.S().column_vector().iter().map(|v| v.re).collect();
    let top = lambda.iter().copied().fold(0.0, f64::max);
    if lambda.iter().any(|&l| l < CONDITION * top) {
        return Ok(None);
    }
    let q = evd.U();
    Ok(Some(Mat::from_fn(g.nrows(), g.ncols(), |i, j| q[(j, i)].conj() * lambda[i].sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{translate, PhasePoint};
    use crate::grid::{sample_symbol, SymbolField};
    use crate::quantization::{coherent_state, gaussian_symbol, weyl_quantize};
    use crate::spectral::ifft2_normalized;

    fn grid(n: usize, hbar: f64) -> PhaseGrid {
        PhaseGrid::new(1, n, 8.0, hbar).unwrap()
    }

    fn gaussian_op(g: &PhaseGrid, width: f64) -> KernelOperator {
        let hb = g.hbar();
        weyl_quantize(&sample_symbol(g, |x, xi| (-(x * x + (xi - 0.3).powi(2)) / (width * width * hb)).exp()).unwrap())
    }

    fn mixed_state(g: &PhaseGrid) -> KernelOperator {
        let a = coherent_state(g, PhasePoint::lattice(g, 3, 1)).unwrap().projector();
        let b = coherent_state(g, PhasePoint::lattice(g, -4, -2)).unwrap().projector();
        a.add(&b.scale_real(0.5)).unwrap()
    }

    #[test]
    fn schatten_basics() {
        let g = grid(64, 0.5);
        let f = gaussian_symbol(&g);
        let a = weyl_quantize(&f);
        assert!((schatten_norm(&a, 2.0).unwrap() - f.lp_norm(2.0)).abs() < 1e-10);
        let one = schatten_norm(&a, 1.0).unwrap();
        assert!((one - 1.0).abs() < 1e-8, "{one}");
        let zero = KernelOperator::zeros(&g);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(schatten_norm(&zero, p).unwrap(), 0.0);
        }
        assert!(schatten_norm(&a, 0.5).is_err());
    }

    #[test]
    fn gradient_norms() {
        let g = grid(64, 0.5);
        let a = gaussian_op(&g, 1.3);
        let grad = quantum_gradient(&a);
        let sx = schatten_norm(&grad.grad_x[0], 2.0).unwrap();
        let sxi = schatten_norm(&grad.grad_xi[0], 2.0).unwrap();
        let joint = sobolev_norm(&a, 1, 2.0).unwrap();
        assert!((joint - sx.hypot(sxi)).abs() < 1e-10 * joint);
        let half = bessel_norm(&a, 1.0, 2.0).unwrap();
        assert!((joint - half).abs() < 1e-10 * joint);
        let id = KernelOperator::identity(&g);
        assert!(sobolev_norm(&id, 1, 2.0).unwrap() < 1e-10);
        // Second order: ℓ² over the four iterated components equals the Hessian norm.
        let two = sobolev_norm(&a, 2, 2.0).unwrap();
        assert!((two - bessel_norm(&a, 2.0, 2.0).unwrap()).abs() < 1e-8 * two);
    }

    #[test]
    fn fractional_sobolev_matches_bessel_at_p2() {
        let g = grid(64, 0.5);
        for (s, width) in [(0.25, 1.0), (0.5, 1.5), (0.75, 1.0)] {
            let a = gaussian_op(&g, width);
            let w = sobolev_norm_frac(&a, s, 2.0).unwrap();
            let b = bessel_norm(&a, s, 2.0).unwrap();
            assert!((w / b - 1.0).abs() < 0.02, "s = {s}: {w} vs {b}");
        }
        assert_eq!(sobolev_norm_frac(&KernelOperator::zeros(&g), 0.5, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn low_rank_engine_matches_dense() {
        let g = grid(32, 0.5);
        let a = mixed_state(&g);
        let engine = DiffEngine::new(&a).unwrap();
        assert!(engine.factors.is_some());
        let dense = DiffEngine {
            factors: None,
            ..DiffEngine::new(&a).unwrap()
        };
        for (s, k) in [(1, 0), (3, -2), (-7, 5), (0, 4), (16, 16), (-12, 9)] {
            for kind in [Difference::First, Difference::Second] {
                let x = engine.singular_values(kind, s, k).unwrap();
                let y = dense.singular_values(kind, s, k).unwrap();
                for p in [1.0, 1.5, 3.0, f64::INFINITY] {
                    let (nx, ny) = (schatten_from_singular(&x, p), schatten_from_singular(&y, p));
                    assert!((nx - ny).abs() < 1e-10 * ny.max(1e-300), "{kind:?} ({s},{k}) p = {p}");
                }
            }
        }
    }

    #[test]
    fn l2_profile_matches_engine() {
        let g = grid(32, 0.5);
        let a = gaussian_op(&g, 1.0);
        let profile = L2Profile::new(&a);
        let engine = DiffEngine::new(&a).unwrap();
        for o in half_offsets(&g).iter().step_by(37) {
            for kind in [Difference::First, Difference::Second] {
                let sv = engine.singular_values(kind, o.s, o.k).unwrap();
                let direct = g.h().sqrt() * schatten_from_singular(&sv, 2.0);
                assert!((profile.norm(kind, o) - direct).abs() < 1e-9 * (1.0 + direct));
            }
        }
    }

    #[test]
    fn fractional_sobolev_translation_invariant() {
        let g = grid(32, 0.5);
        let a = mixed_state(&g);
        let t = translate(&a, PhasePoint::new(2.0 * g.dx(), 0.4)).unwrap();
        for p in [1.5, 2.0] {
            let x = sobolev_norm_frac(&a, 0.5, p).unwrap();
            let y = sobolev_norm_frac(&t, 0.5, p).unwrap();
            assert!((x - y).abs() < 1e-9 * x);
        }
    }

    #[test]
    fn holder_properties() {
        let g = grid(32, 0.5);
        let a = mixed_state(&g);
        assert_eq!(holder_norm(&KernelOperator::zeros(&g), 0.5).unwrap(), 0.0);
        let h1 = holder_norm(&a, 0.5).unwrap();
        let h3 = holder_norm(&a.scale(Complex64::new(0.0, -3.0)), 0.5).unwrap();
        assert!((h3 - 3.0 * h1).abs() < 1e-10 * h3);
        let lip = holder_norm(&a, 1.0).unwrap();
        let grad = sobolev_norm(&a, 1, f64::INFINITY).unwrap();
        assert!(lip <= 2.0 * grad);
    }

    #[test]
    fn bessel_zero_order_removes_mean() {
        let g = grid(16, 0.5);
        let a = gaussian_op(&g, 1.0);
        let zero = bessel_norm(&a, 0.0, 2.0).unwrap();
        let n = g.n_points() as f64;
        let mean = crate::quantization::wigner_transform(&a).integral() / (n * n * g.dz());
        let centered = a.sub(&KernelOperator::identity(&g).scale(mean)).unwrap();
        assert!((zero - schatten_norm(&centered, 2.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn besov_p2_identity_with_bessel() {
        let g = grid(64, 0.5);
        let a = gaussian_op(&g, 1.2);
        for s in [0.25, 0.5, 0.75] {
            let gamma = gagliardo_constant(s, 2.0, 1).unwrap();
            let b = besov_norm_diff2(&a, s, 2.0, 2.0).unwrap();
            let lhs = bessel_norm(&a, s, 2.0).unwrap().powi(2);
            let rhs = gamma / (4.0 - 4f64.powf(s)) * b * b;
            assert!((lhs / rhs - 1.0).abs() < 0.02, "s = {s}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn besov_p2_matches_field_differences() {
        // Direct classical evaluation on the Wigner field: shift, difference, L² norm.
        let g = grid(32, 0.5);
        let a = gaussian_op(&g, 1.0);
        let f = crate::quantization::wigner_transform(&a);
        let (s, r) = (0.6, 3.0);
        let alpha = s * r + 2.0;
        let mut acc = 0.0;
        for o in crate::quadrature::offsets(&g) {
            let plus = f.shift(o.s, o.k);
            let minus = f.shift(-o.s, -o.k);
            let diff = plus.add(&minus).unwrap().sub(&f.scale(Complex64::new(2.0, 0.0))).unwrap();
            acc += diff.lp_norm(2.0).powf(r) * o.norm.powf(-alpha) * g.dz();
        }
        let far = 6f64.sqrt() * f.lp_norm(2.0);
        acc += far.powf(r) * tail_weight(&g, alpha);
        acc += origin_cell(&a, Difference::Second, 2.0, r, alpha).unwrap();
        let want = acc.powf(1.0 / r);
        let got = besov_norm_diff2(&a, s, 2.0, r).unwrap();
        assert!((got - want).abs() < 1e-9 * want);
        let _ = ifft2_normalized;
        let _ = SymbolField::zeros(&g);
    }

    #[test]
    fn origin_cell_matches_cartesian_midpoint() {
        // Midpoint sum of ‖(z·∇)A‖^r |z|^{-α} over a fine subdivision of the cell.
        let g = grid(32, 0.5);
        let a = gaussian_op(&g, 1.0);
        let grad = quantum_gradient(&a);
        let (s, p, r) = (0.4, 3.0, 2.5);
        let alpha = s * r + 2.0;
        let (hx, hxi) = (0.5 * g.dx(), 0.5 * g.dxi());
        let m = 100;
        let mut acc = 0.0;
        for i in 0..m {
            let x = -hx + (i as f64 + 0.5) * 2.0 * hx / m as f64;
            for j in 0..m {
                let y = -hxi + (j as f64 + 0.5) * 2.0 * hxi / m as f64;
                let op = grad.grad_x[0].scale_real(x).add(&grad.grad_xi[0].scale_real(y)).unwrap();
                acc += schatten_norm(&op, p).unwrap().powf(r) * (x * x + y * y).powf(-alpha / 2.0);
            }
        }
        acc *= 4.0 * hx * hxi / (m * m) as f64;
        let got = origin_cell(&a, Difference::First, p, r, alpha).unwrap();
        assert!((got - acc).abs() < 1e-3 * got, "{got} vs {acc}");
    }

    #[test]
    fn zero_operator_besov() {
        let g = grid(16, 0.5);
        let z = KernelOperator::zeros(&g);
        assert_eq!(besov_norm_diff2(&z, 0.5, 2.0, 2.0).unwrap(), 0.0);
        assert_eq!(besov_norm_diff1(&z, 0.5, 3.0, 2.0).unwrap(), 0.0);
        assert_eq!(besov_norm_lp(&z, 0.5, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn mixed_norm_single_component() {
        let g = grid(16, 0.5);
        let a = mixed_state(&g);
        let t = OperatorTuple::new(vec![a.clone()]).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let plain = schatten(a.matrix().as_ref(), p).unwrap();
            for order in [MixedOrder::SchattenThenSum, MixedOrder::SumThenSchatten] {
                let m = mixed_schatten_norm(&t, p, 2.0, order).unwrap();
                assert!((m - plain).abs() < 1e-7 * plain, "{p} {order:?}: {m} vs {plain}");
            }
        }
        assert!(matches!(OperatorTuple::new(vec![]), Err(Error::EmptyTuple)));
    }
}
