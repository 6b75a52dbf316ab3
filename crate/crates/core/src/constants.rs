//! Closed-form constants: sphere areas, fractional-Laplacian normalizations,
//! sharp classical Sobolev constants and the bounds built from them.
//!
//! All functions take the spatial dimension `d`; phase space has dimension
//! `2d`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Area of the unit sphere `S^{m-1}`, `2 π^{m/2} / Γ(m/2)`.
///
/// Defined for every real `m` away from the poles of `Γ(m/2)`; negative
/// arguments return the signed Gamma continuation.
pub fn sphere_area(m: f64) -> Result<f64> {
    if !m.is_finite() {
        return Err(domain("m", m, "finite real"));
    }
    let half = m / 2.0;
    if half <= 0.0 && half == half.round() {
        return Err(Error::GammaPole(m));
    }
    Ok(2.0 * PI.powf(half) / libm::tgamma(half))
}

/// Normalization `γ_{s,p}` of the Gagliardo seminorm, chosen so that the
/// `p = 2` seminorm coincides with the `Ḣ^s` norm.
pub fn gagliardo_constant(s: f64, p: f64, d: usize) -> Result<f64> {
    check_open_unit("s", s)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(domain("p", p, "finite p >= 1"));
    }
    check_dim(d)?;
    let n = 2.0 * d as f64;
    // Logarithms keep ω_{p+1} and ω_{2d+sp} representable for large p.
    let ln_front = p.ln() + sphere_area(-2.0 * s)?.abs().ln() - 4f64.ln() - ln_sphere_area(n + s * p);
    let ln_inner = PI.ln() + ln_sphere_area(p + 1.0) - (p - 2.0) / 2.0 * s.ln();
    Ok((ln_front + s * ln_inner).exp())
}

/// `ln ω_m` for `m > 0`.
fn ln_sphere_area(m: f64) -> f64 {
    2f64.ln() + m / 2.0 * PI.ln() - libm::lgamma(m / 2.0)
}

/// `c_{m,s} = (2π)^s |ω_{-s}| / ω_{m+s}`, the constant of the singular
/// integral representation of `(-Δ)^{s/2}` on `R^m`.
///
/// With negative `s` this is `c_{m,-t} = ω_t / ((2π)^t ω_{m-t})`, the
/// normalization of the Riesz kernel `K_t`.
pub fn riesz_constant(m: f64, s: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(domain("m", m, "m > 0"));
    }
    Ok((2.0 * PI).powf(s) * sphere_area(-s)?.abs() / sphere_area(m + s)?)
}

/// Sobolev target exponent `q` from `1/p - 1/q = s/(2d)`; `None` when the
/// relation forces `q = ∞` or beyond.
pub fn sobolev_exponent(s: f64, p: f64, d: usize) -> Option<f64> {
    let inv_q = 1.0 / p - s / (2.0 * d as f64);
    (inv_q > 0.0).then(|| 1.0 / inv_q)
}

/// Hölder conjugate with `1' = ∞`, `∞' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Sharp constant of the classical Sobolev inequality on `R^{2d}`.
///
/// Available for `s = 1` (any admissible `p`, Aubin–Talenti) and for `p = 2`
/// (any `s ∈ (0, 1]`, Lieb). Other pairs return [`Error::NoClosedForm`]; pairs
/// for which the target exponent is infinite return [`Error::Exponents`].
pub fn sobolev_constant(s: f64, p: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("s", s, "0 < s <= 1"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(domain("p", p, "finite p >= 1"));
    }
    let Some(q) = sobolev_exponent(s, p, d) else {
        return Err(Error::Exponents(format!(
            "1/p - s/(2d) <= 0 for (s, p, d) = ({s}, {p}, {d}): q is infinite"
        )));
    };
    if p == 2.0 {
        sharp_bessel_p2(s, d)
    } else if s == 1.0 {
        sharp_gradient(p, q, d)
    } else {
        Err(Error::NoClosedForm { s, p, d })
    }
}

/// The `s = 1` (gradient) sharp constant.
pub(crate) fn sharp_gradient(p: f64, q: f64, d: usize) -> Result<f64> {
    let n = 2.0 * d as f64;
    let pc = conjugate(p);
    let qc = conjugate(q);
    let power = if pc.is_infinite() { 1.0 } else { (q / pc).powf(1.0 / pc) };
    let ratio = sphere_area(2.0 * n / p)? * sphere_area(2.0 * n / qc)?
        / (sphere_area(n + 2.0)? * sphere_area(2.0 * n)?);
    Ok(power * ratio.powf(1.0 / n) / n)
}

/// The `p = 2` sharp constant `C_B(s, 2) = C_S(s, 2)`.
pub(crate) fn sharp_bessel_p2(s: f64, d: usize) -> Result<f64> {
    let n = 2.0 * d as f64;
    let lead = PI.powf(s) * sphere_area(n + 1.0)?.powf(s / n);
    Ok((sphere_area(n + 2.0 * s)? / sphere_area(n - 2.0 * s)?).sqrt() / lead)
}

/// `θ_s = sup_{r ≥ 0} (1 - e^{-r}) / r^s`.
///
/// For `s < 1` the supremum is attained at the positive root of
/// `e^r = 1 + r/s`, located by bisection; `θ_1 = 1` is the `r → 0` limit.
pub fn theta(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("s", s, "0 < s <= 1"));
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    let r = theta_argmax(s)?;
    Ok(-libm::expm1(-r) / r.powf(s))
}

fn theta_argmax(s: f64) -> Result<f64> {
    // g(r) = e^r - 1 - r/s is negative just right of 0 and convex.
    let g = |r: f64| libm::expm1(r) - r / s;
    let mut lo = (1.0 / s - 1.0).min(1.0) * 1e-3;
    while g(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoConvergence(format!("no lower bracket for theta({s})")));
        }
    }
    let mut hi = 1.0_f64.max(2.0 * lo);
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoConvergence(format!("no upper bracket for theta({s})")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence(format!("bisection for theta({s})")))
}

/// Upper bound on the quantum Gagliardo–Sobolev constant when `s = 1`:
/// `C_S + ω_{2d}/ω_{2d+1}`.
pub fn gagliardo_sobolev_bound_gradient(p: f64, d: usize) -> Result<f64> {
    let n = 2.0 * d as f64;
    Ok(sobolev_constant(1.0, p, d)? + sphere_area(n)? / sphere_area(n + 1.0)?)
}

/// Upper bound `C + θ_s (8π)^{-s/2}`, valid when `p = 2` (with `C = C_S(s, 2)`)
/// or when `q = 2` (with the classical constant of that pair).
pub fn smoothing_bound(classical: f64, s: f64) -> Result<f64> {
    Ok(classical + theta(s)? / (8.0 * PI).powf(s / 2.0))
}

/// `C_{d,s,r} = (r')^{-(d + s/2)} (ω_{2d} / ω_{(2d+s) r'})^{1/r'}`, the norm of
/// `g_{2h}(z)|z|^{s+2d/r}` in `L^{r'}` divided by `h^{s/2}`.
pub fn gaussian_moment_constant(s: f64, r: f64, d: usize) -> Result<f64> {
    let n = 2.0 * d as f64;
    let rc = conjugate(r);
    if rc.is_infinite() {
        return Err(domain("r", r, "r > 1"));
    }
    Ok(rc.powf(-(d as f64 + s / 2.0)) * (sphere_area(n)? / sphere_area((n + s) * rc)?).powf(1.0 / rc))
}

/// Upper bound on the quantum Gagliardo–Sobolev constant for `s ∈ (0, 1)`:
/// `C_S + (1 - 2^{(s-1) r})^{1/r} γ_{s,p}^{-1/p} C_{d,s,p}`, `r = max(p, p')`.
pub fn gagliardo_sobolev_bound_fractional(classical: f64, s: f64, p: f64, d: usize) -> Result<f64> {
    check_open_unit("s", s)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("p", p, "1 < p < ∞"));
    }
    let r = p.max(conjugate(p));
    let gamma = gagliardo_constant(s, p, d)?;
    let head = (1.0 - 2f64.powf((s - 1.0) * r)).powf(1.0 / r);
    Ok(classical + head * gaussian_moment_constant(s, p, d)? / gamma.powf(1.0 / p))
}

/// Bound on the Besov–Sobolev interpolation constant,
/// `C_s ≤ 2^{1-s} (ω_{2d} / (s (1-s) r))^{1/r}`.
pub fn besov_interpolation_bound(s: f64, r: f64, d: usize) -> Result<f64> {
    check_open_unit("s", s)?;
    let n = 2.0 * d as f64;
    let tail = if r.is_infinite() {
        1.0
    } else {
        (sphere_area(n)? / (s * (1.0 - s) * r)).powf(1.0 / r)
    };
    Ok(2f64.powf(1.0 - s) * tail)
}

/// `‖ |z|^{-a} ‖_{L^{2d/a, ∞}(R^{2d})} = (ω_{2d} / (2d))^{a/(2d)}`.
pub fn weak_norm_power(a: f64, d: usize) -> Result<f64> {
    let n = 2.0 * d as f64;
    if !(a > 0.0 && a < n) {
        return Err(domain("a", a, "0 < a < 2d"));
    }
    Ok((sphere_area(n)? / n).powf(a / n))
}

fn check_open_unit(name: &'static str, s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(domain(name, s, "0 < s < 1"))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(domain("d", 0.0, "d >= 1"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Lanczos approximation (g = 7, n = 9); independent of libm.
    fn gamma_oracle(x: f64) -> f64 {
        const G: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if x < 0.5 {
            PI / ((PI * x).sin() * gamma_oracle(1.0 - x))
        } else {
            let x = x - 1.0;
            let t = x + 7.5;
            let mut a = G[0];
            for (i, g) in G.iter().enumerate().skip(1) {
                a += g / (x + i as f64);
            }
            (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
        }
    }

    #[test]
    fn sphere_area_small_cases() {
        assert!(rel(sphere_area(2.0).unwrap(), 2.0 * PI) < 1e-14);
        assert!(rel(sphere_area(3.0).unwrap(), 4.0 * PI) < 1e-14);
        // Γ(-1/2) = -2√π
        let oracle = (2.0 / PI.sqrt() / gamma_oracle(-0.5)).abs();
        assert!(rel(oracle, 1.0 / PI) < 1e-12);
        assert!(rel(sphere_area(-1.0).unwrap().abs(), oracle) < 1e-12);
    }

    #[test]
    fn sphere_area_poles_rejected() {
        for m in [0.0, -2.0, -4.0, -10.0] {
            assert!(matches!(sphere_area(m), Err(Error::GammaPole(_))));
        }
        assert!(sphere_area(-3.0).is_ok());
    }

    #[test]
    fn sphere_area_recursion() {
        for m in 1..=12 {
            let m = m as f64;
            let lhs = sphere_area(m + 2.0).unwrap();
            let rhs = 2.0 * PI / m * sphere_area(m).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn gagliardo_at_p2_matches_riesz() {
        for d in 1..=3 {
            for k in 1..=9 {
                let s = k as f64 / 10.0;
                let gamma = gagliardo_constant(s, 2.0, d).unwrap();
                let riesz = riesz_constant(2.0 * d as f64, 2.0 * s).unwrap() / 2.0;
                assert!(rel(gamma, riesz) < 1e-12, "s = {s}, d = {d}");
            }
        }
    }

    #[test]
    fn gagliardo_half_two_one_two_formulas() {
        // Both displayed closed forms at (1/2, 2, 1) evaluated from the oracle Gamma.
        let omega = |m: f64| 2.0 * PI.powf(m / 2.0) / gamma_oracle(m / 2.0);
        let (s, p) = (0.5, 2.0);
        let first = p * omega(-2.0 * s).abs() / (4.0 * omega(2.0 + s * p))
            * (PI * omega(p + 1.0) / s.powf((p - 2.0) / 2.0)).powf(s);
        let second = (2.0 * PI).powf(2.0 * s) * omega(-2.0 * s).abs() / (2.0 * omega(2.0 + 2.0 * s));
        assert!(rel(first, second) < 1e-12);
        assert!(rel(gagliardo_constant(s, p, 1).unwrap(), first) < 1e-12);
    }

    #[test]
    fn gagliardo_large_p_limit() {
        let s = 0.5;
        let a = gagliardo_constant(s, 1e3, 1).unwrap().powf(1e-3);
        let b = gagliardo_constant(s, 1e4, 1).unwrap().powf(1e-4);
        assert!((b - 1.0).abs() < (a - 1.0).abs());
        assert!((b - 1.0).abs() < 0.01, "γ^(1/p) at p = 1e4: {b}");
    }

    #[test]
    fn gagliardo_endpoint_asymptotics() {
        let d = 1;
        let n = 2.0;
        for p in [1.0, 1.5, 2.0, 3.0] {
            let s = 0.999;
            let near_one = p * sphere_area(p + 1.0).unwrap() / (2.0 * sphere_area(n + p).unwrap()) * (1.0 - s);
            let ratio = gagliardo_constant(s, p, d).unwrap() / near_one;
            assert!((ratio - 1.0).abs() < 0.05, "s -> 1, p = {p}: {ratio}");

            let s = 0.001;
            let near_zero = p * s / (2.0 * sphere_area(n).unwrap());
            let ratio = gagliardo_constant(s, p, d).unwrap() / near_zero;
            assert!((ratio - 1.0).abs() < 0.05, "s -> 0, p = {p}: {ratio}");
        }
    }

    #[test]
    fn riesz_constants() {
        assert!(rel(riesz_constant(2.0, 1.0).unwrap(), 1.0 / (2.0 * PI)) < 1e-13);
        for &(m, s) in &[(2.0, 0.5), (2.0, 1.5), (6.0, 0.3), (4.0, 1.0)] {
            let neg = riesz_constant(m, -s).unwrap();
            let identity = neg * sphere_area(m - s).unwrap() * (2.0 * PI).powf(s);
            assert!(rel(identity, sphere_area(s).unwrap()) < 1e-12);
        }
        for k in 1..40 {
            let s = k as f64 * 0.05;
            assert!(riesz_constant(2.0, s).unwrap() > 0.0);
        }
    }

    #[test]
    fn sobolev_constant_d3_value() {
        let expected = (20.0f64 / 9.0).powf(1.0 / 6.0) / (2.0 * (2.0 * PI).sqrt());
        assert!(rel(sobolev_constant(1.0, 2.0, 3).unwrap(), expected) < 1e-12);
        let gradient = sharp_gradient(2.0, 3.0, 3).unwrap();
        let bessel = sharp_bessel_p2(1.0, 3).unwrap();
        assert!(rel(gradient, bessel) < 1e-12);
    }

    #[test]
    fn sobolev_gradient_matches_talenti_gamma_form() {
        // Talenti's constant on R^n written with Gamma functions only.
        let talenti = |n: f64, p: f64| {
            let q = n * p / (n - p);
            let _ = q;
            PI.powf(-0.5)
                * n.powf(-1.0 / p)
                * ((p - 1.0) / (n - p)).powf(1.0 - 1.0 / p)
                * (gamma_oracle(1.0 + n / 2.0) * gamma_oracle(n)
                    / (gamma_oracle(n / p) * gamma_oracle(1.0 + n - n / p)))
                .powf(1.0 / n)
        };
        for &(d, p) in &[(1usize, 1.5), (1, 4.0 / 3.0), (2, 2.0), (2, 3.0), (3, 2.0), (3, 4.0)] {
            let got = sobolev_constant(1.0, p, d).unwrap();
            let want = talenti(2.0 * d as f64, p);
            assert!(rel(got, want) < 1e-10, "d = {d}, p = {p}: {got} vs {want}");
        }
        // p = 1: isoperimetric constant 1/(n V_n^{1/n}).
        for d in 1..=3 {
            let n = 2.0 * d as f64;
            let volume = PI.powf(n / 2.0) / gamma_oracle(n / 2.0 + 1.0);
            let want = 1.0 / (n * volume.powf(1.0 / n));
            assert!(rel(sobolev_constant(1.0, 1.0, d).unwrap(), want) < 1e-12);
        }
    }

    #[test]
    fn sobolev_constant_rejections() {
        assert!(matches!(sobolev_constant(1.0, 2.0, 1), Err(Error::Exponents(_))));
        assert!(matches!(sobolev_constant(0.5, 1.5, 1), Err(Error::NoClosedForm { .. })));
        let half = sobolev_constant(0.5, 2.0, 1).unwrap();
        assert!(half.is_finite() && half > 0.0);
        let lo = sobolev_constant(0.45, 2.0, 1).unwrap();
        let hi = sobolev_constant(0.55, 2.0, 1).unwrap();
        assert!((half - lo) * (hi - half) > 0.0, "not monotone near s = 1/2");
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(1.0).unwrap(), 1.0);
        let values: Vec<f64> = (1..=100).map(|k| theta(k as f64 / 100.0).unwrap()).collect();
        assert!(values.iter().all(|&t| t > 0.0 && t <= 1.0));
        // θ_s → 1 at both ends of (0, 1] with a single interior minimum.
        let (argmin, _) = values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &t)| if t < acc.1 { (i, t) } else { acc });
        assert!(argmin > 0 && argmin < 99);
        assert!(values[..=argmin].windows(2).all(|w| w[1] <= w[0] + 1e-14));
        assert!(values[argmin..].windows(2).all(|w| w[1] >= w[0] - 1e-14));
        assert!(theta(1e-4).unwrap() > 0.99);
    }

    #[test]
    fn theta_half_grid_search() {
        let n = 1_000_000;
        let mut best = 0.0f64;
        for k in 1..=n {
            let r = 50.0 * k as f64 / n as f64;
            best = best.max((1.0 - (-r).exp()) / r.sqrt());
        }
        let t = theta(0.5).unwrap();
        assert!(t >= best - 1e-12);
        assert!(rel(t, best) < 1e-8, "{t} vs {best}");
    }

    #[test]
    fn weak_norm_and_moment_constants() {
        // (ω_2 / 2)^{1/2} = √π for a = 1, d = 1.
        assert!(rel(weak_norm_power(1.0, 1).unwrap(), PI.sqrt()) < 1e-14);
        assert!(weak_norm_power(0.0, 1).is_err());
        let c = gaussian_moment_constant(1.0, f64::INFINITY, 1).unwrap();
        // r' = 1: ω_2/ω_3 = 1/2
        assert!(rel(c, 0.5) < 1e-14);
    }
}
