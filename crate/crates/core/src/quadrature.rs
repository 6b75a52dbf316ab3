//! Offset lattices for translation integrals and the analytic far-field
//! weight of `|z|^{-α}` outside the sampled cell.

use std::f64::consts::PI;

use crate::grid::PhaseGrid;

/// A nonzero lattice offset `z = (s dx, k dξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Offset {
    pub s: isize,
    pub k: isize,
    pub norm: f64,
}

/// Offsets of the symmetric cell `|s|, |k| ≤ N/2 - 1`, origin excluded.
pub(crate) fn offsets(grid: &PhaseGrid) -> Vec<Offset> {
    let half = (grid.n_points() / 2) as isize - 1;
    let (dx, dxi) = (grid.dx(), grid.dxi());
    let mut out = Vec::with_capacity(((2 * half + 1) * (2 * half + 1) - 1) as usize);
    for s in -half..=half {
        for k in -half..=half {
            if s == 0 && k == 0 {
                continue;
            }
            let norm = ((s as f64 * dx).powi(2) + (k as f64 * dxi).powi(2)).sqrt();
            out.push(Offset { s, k, norm });
        }
    }
    out
}

/// Offsets with `s > 0`, or `s = 0` and `k > 0`: one of each `±z` pair.
pub(crate) fn half_offsets(grid: &PhaseGrid) -> Vec<Offset> {
    offsets(grid)
        .into_iter()
        .filter(|o| o.s > 0 || (o.s == 0 && o.k > 0))
        .collect()
}

/// Half-sides `(X, Ξ)` of the rectangle covered by the offset cells.
pub(crate) fn cell_box(grid: &PhaseGrid) -> (f64, f64) {
    let half = (grid.n_points() / 2) as f64 - 0.5;
    (half * grid.dx(), half * grid.dxi())
}

/// `∫ |z|^{-α} dz` over the plane minus `[-X, X] × [-Ξ, Ξ]`, for `α > 2`.
pub(crate) fn tail_weight(grid: &PhaseGrid, alpha: f64) -> f64 {
    assert!(alpha > 2.0, "tail weight diverges for alpha <= 2");
    let (bx, bxi) = cell_box(grid);
    let split = (bxi / bx).atan();
    let radial = |rho: f64| rho.powf(2.0 - alpha) / (alpha - 2.0);
    let first = gauss_legendre(0.0, split, |t| radial(bx / t.cos()));
    let second = gauss_legendre(split, PI / 2.0, |t| radial(bxi / t.sin()));
    4.0 * (first + second)
}

/// Second moments `(∫ x² |z|^{-α}, ∫ ξ² |z|^{-α})` over the origin cell
/// `[-dx/2, dx/2] × [-dξ/2, dξ/2]`, for `α < 4`.
pub(crate) fn origin_cell_moments(grid: &PhaseGrid, alpha: f64) -> (f64, f64) {
    assert!(alpha < 4.0, "origin moments diverge for alpha >= 4");
    let (hx, hxi) = (0.5 * grid.dx(), 0.5 * grid.dxi());
    let split = (hxi / hx).atan();
    let radial = |rho: f64| rho.powf(4.0 - alpha) / (4.0 - alpha);
    let moment = |f: fn(f64) -> f64| {
        gauss_legendre(0.0, split, |t| f(t) * radial(hx / t.cos()))
            + gauss_legendre(split, PI / 2.0, |t| f(t) * radial(hxi / t.sin()))
    };
    (
        4.0 * moment(|t| t.cos().powi(2)),
        4.0 * moment(|t| t.sin().powi(2)),
    )
}

/// `∫ |z|^{-a} dz` over the origin cell, for `a < 2`.
pub(crate) fn origin_cell_mass(grid: &PhaseGrid, a: f64) -> f64 {
    assert!(a < 2.0, "origin mass diverges for a >= 2");
    let (hx, hxi) = (0.5 * grid.dx(), 0.5 * grid.dxi());
    let split = (hxi / hx).atan();
    let radial = |rho: f64| rho.powf(2.0 - a) / (2.0 - a);
    4.0 * (gauss_legendre(0.0, split, |t| radial(hx / t.cos()))
        + gauss_legendre(split, PI / 2.0, |t| radial(hxi / t.sin())))
}

const GL_ORDER: usize = 64;

/// 64-point Gauss–Legendre rule on `[a, b]`.
pub(crate) fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre_n(GL_ORDER, a, b, f)
}

/// `order`-point Gauss–Legendre rule on `[a, b]`.
pub(crate) fn gauss_legendre_n(order: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    legendre_nodes(order, a, b).into_iter().map(|(t, w)| w * f(t)).sum()
}

/// Nodes and weights `(t, w)` of the `order`-point rule on `[a, b]`.
pub(crate) fn legendre_nodes(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (nodes, weights) = legendre_rule(order);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    nodes.iter().zip(&weights).map(|(&t, &w)| (mid + half * t, w * half)).collect()
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
