use std::collections::BTreeMap;
use std::fmt;

use crate::constants::sobolev_exponent;
use crate::error::{config, Result};
use crate::grid::PhaseGrid;
use crate::quantization::{coherent_state, gaussian_symbol};
use crate::PhasePoint;

use super::checks::{
    besov_embedding_with, besov_endpoint_with, besov_schatten_with, besov_with, bernstein_with, bessel_with,
    check_riesz_reconstruction, check_riesz_transform, check_sobolev_dilation, check_sobolev_product,
    check_uncertainty, check_young_delta, estimate_lower_bound, gagliardo_bound, gagliardo_with, grid_params,
    hls_with, morrey_with, young_with, Norms,
};
use super::families::OperatorFamily;
use super::record::{CheckRecord, ParamValue, Params, Report, Status};
use super::vector::{check_clarkson_mccarthy, check_dot_bound, check_vector_sandwich};

/// Groups of checks selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuiteId {
    Young,
    Hls,
    GagliardoSobolev,
    BesselSobolev,
    Morrey,
    Besov,
    LowerBound,
    Uncertainty,
    VectorSchatten,
    RieszTransform,
}

impl SuiteId {
    pub const ALL: [SuiteId; 10] = [
        SuiteId::Young,
        SuiteId::Hls,
        SuiteId::GagliardoSobolev,
        SuiteId::BesselSobolev,
        SuiteId::Morrey,
        SuiteId::Besov,
        SuiteId::LowerBound,
        SuiteId::Uncertainty,
        SuiteId::VectorSchatten,
        SuiteId::RieszTransform,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            SuiteId::Young => "young",
            SuiteId::Hls => "hls",
            SuiteId::GagliardoSobolev => "gagliardo_sobolev",
            SuiteId::BesselSobolev => "bessel_sobolev",
            SuiteId::Morrey => "morrey",
            SuiteId::Besov => "besov",
            SuiteId::LowerBound => "lower_bound",
            SuiteId::Uncertainty => "uncertainty",
            SuiteId::VectorSchatten => "vector_schatten",
            SuiteId::RieszTransform => "riesz_transform",
        }
    }

    /// Accepts the bare id, the `check_` form and `estimate_lower_bound`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let bare = s
            .strip_prefix("check_")
            .or_else(|| s.strip_prefix("estimate_"))
            .unwrap_or(s);
        let bare = if bare == "besov_suite" { "besov" } else { bare };
        Self::ALL.into_iter().find(|k| k.id() == bare)
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Base grid `(d, n, L)`; the suite refines `n` as ħ decreases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub d: usize,
    pub n_points: usize,
    pub half_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            d: 1,
            n_points: 64,
            half_width: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suites: Vec<SuiteId>,
    pub families: Vec<OperatorFamily>,
    pub hbar_list: Vec<f64>,
    pub grid: GridSpec,
    pub s_list: Vec<f64>,
    pub p_list: Vec<f64>,
    pub r_list: Vec<f64>,
    pub seed: u64,
    /// Cap on the refined grid size, also the size of the lower-bound grids.
    pub max_points: usize,
    /// Largest grid on which `p ≠ 2` difference norms are evaluated.
    pub diff_points_max: usize,
    /// Random samples per exponent in the vector Schatten checks.
    pub vector_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: SuiteId::ALL.to_vec(),
            families: OperatorFamily::defaults(),
            hbar_list: (0..6).map(|k| 0.5f64.powi(k)).collect(),
            grid: GridSpec::default(),
            s_list: vec![0.25, 0.5, 0.75, 1.0],
            p_list: vec![1.0, 1.5, 2.0, 3.0],
            r_list: vec![2.0],
            seed: 0,
            max_points: 512,
            diff_points_max: 96,
            vector_samples: 1000,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hbar_list.is_empty() {
            return Err(config("hbar_list", "must not be empty"));
        }
        if let Some(h) = self.hbar_list.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(config("hbar_list", format!("{h} is not a positive finite value")));
        }
        let g = &self.grid;
        if g.d != 1 {
            return Err(config("grid.d", format!("only d = 1 is supported, got {}", g.d)));
        }
        if g.n_points < 8 || g.n_points % 2 != 0 {
            return Err(config("grid.n_points", format!("must be even and at least 8, got {}", g.n_points)));
        }
        if !(g.half_width > 0.0 && g.half_width.is_finite()) {
            return Err(config("grid.half_width", format!("must be positive, got {}", g.half_width)));
        }
        if self.max_points < g.n_points || self.max_points % 2 != 0 {
            return Err(config("max_points", "must be even and at least grid.n_points"));
        }
        if let Some(s) = self.s_list.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return Err(config("s_list", format!("{s} is outside (0, 1]")));
        }
        if let Some(p) = self.p_list.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
            return Err(config("p_list", format!("{p} is outside [1, ∞)")));
        }
        if let Some(r) = self.r_list.iter().find(|r| !(**r >= 1.0)) {
            return Err(config("r_list", format!("{r} is below 1")));
        }
        Ok(())
    }

    /// Grid for one ħ: `n` grows like `ħ^{-1/2}`, rounded up to even and
    /// capped at `max_points`.
    pub fn grid_for(&self, hbar: f64) -> Result<PhaseGrid> {
        let scaled = (self.grid.n_points as f64 / hbar.sqrt()).ceil() as usize;
        let n = (scaled + scaled % 2).clamp(self.grid.n_points, self.max_points);
        PhaseGrid::new(self.grid.d, n, self.grid.half_width, hbar)
    }

    fn enabled(&self, id: SuiteId) -> bool {
        self.suites.contains(&id)
    }
}

/// Report-only checks judged by their spread over the ħ-sweep.
const STABILITY_CHECKS: [&str; 11] = [
    "besov_embedding",
    "besov_inclusion",
    "besov_schatten_lower",
    "besov_schatten_upper",
    "bernstein",
    "bessel_sobolev",
    "bessel_sobolev_gradient",
    "gagliardo_sobolev",
    "hls",
    "littlewood_paley",
    "morrey",
];

/// Ratio bound on `max C / min C` across ħ.
pub const STABILITY_FACTOR: f64 = 2.0;

const GRID_KEYS: [&str; 3] = ["hbar", "n", "L"];

const YOUNG_EXPONENTS: [(f64, f64, f64); 3] = [(2.0, 1.0, 2.0), (f64::INFINITY, 2.0, 2.0), (2.0, 4.0 / 3.0, 4.0 / 3.0)];
const HLS_EXPONENTS: [(f64, f64); 1] = [(1.0, 4.0)];
const MORREY_PAIRS: [(f64, f64); 3] = [(1.0, 0.5), (1.0, 1.0 / 3.0), (0.75, 1.0 / 12.0)];
const BERNSTEIN: [(u32, f64, f64); 2] = [(0, 1.0, 2.0), (1, 2.0, 4.0)];
const EMBEDDING: (f64, f64, f64) = (2.0, 4.0, 0.25);
const RIESZ_P: [f64; 3] = [1.5, 2.0, 3.0];
const DILATIONS: [f64; 3] = [0.5, 1.0, 2.0];
const VECTOR_P: [f64; 4] = [1.5, 2.0, 3.0, 4.0];
const SANDWICH_R: [f64; 3] = [1.0, 2.0, 3.0];

/// Runs every enabled check. Individual failures become failed records;
/// only an invalid configuration is an error.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.families.is_empty() {
        return Ok(Report::default());
    }
    let mut out = Vec::new();
    let mut hbars = cfg.hbar_list.clone();
    hbars.sort_by(|a, b| b.total_cmp(a));
    hbars.dedup();
    for &hbar in &hbars {
        let grid = match cfg.grid_for(hbar) {
            Ok(g) => g,
            Err(e) => {
                out.push(CheckRecord::failure("grid", e).with("hbar", hbar));
                continue;
            }
        };
        run_grid_checks(cfg, &grid, &mut out);
        for fam in &cfg.families {
            run_family(cfg, fam, &grid, &mut out);
        }
    }
    if cfg.enabled(SuiteId::LowerBound) {
        run_lower_bound(cfg, &hbars, &mut out);
    }
    if cfg.enabled(SuiteId::VectorSchatten) {
        run_vector(cfg, &mut out);
    }
    out.extend(stability_records(&out));
    Ok(Report::new(out))
}

fn collect(out: &mut Vec<CheckRecord>, id: &str, params: &Params, result: Result<Vec<CheckRecord>>) {
    match result {
        Ok(records) => out.extend(records.into_iter().map(|r| r.with_params(params))),
        Err(e) => out.push(CheckRecord::failure(id, e).with_params(params)),
    }
}

fn one(result: Result<CheckRecord>) -> Result<Vec<CheckRecord>> {
    result.map(|r| vec![r])
}

/// Family-independent checks on one grid.
fn run_grid_checks(cfg: &SuiteConfig, grid: &PhaseGrid, out: &mut Vec<CheckRecord>) {
    let params = grid_params(grid);
    if cfg.enabled(SuiteId::GagliardoSobolev) {
        for &p in cfg.p_list.iter().filter(|&&p| product_form_applies(p)) {
            collect(out, "sobolev_dilation", &params, check_sobolev_dilation(grid, 1.0, p, &DILATIONS));
        }
    }
    if cfg.enabled(SuiteId::BesselSobolev) {
        collect(out, "riesz_reconstruction", &params, one(check_riesz_reconstruction(grid, 0.5)));
    }
    if cfg.enabled(SuiteId::Uncertainty) {
        let states = coherent_state(grid, PhasePoint::origin()).map(|c| c.projector()).and_then(|single| {
            let shift = (grid.half_width() / 4.0 / grid.dx()).round() as isize;
            let left = coherent_state(grid, PhasePoint::lattice(grid, -shift, 0))?.projector();
            let right = coherent_state(grid, PhasePoint::lattice(grid, shift, 0))?.projector();
            Ok((single, left.add(&right)?))
        });
        let result = states.and_then(|(single, mixture)| {
            Ok(vec![
                check_uncertainty(&single)?.with("state", "coherent"),
                check_uncertainty(&mixture)?.with("state", "coherent-mixture"),
            ])
        });
        collect(out, "uncertainty", &params, result);
    }
}

/// `s = 1` product form: needs a finite `q` and an explicit constant.
fn product_form_applies(p: f64) -> bool {
    sobolev_exponent(1.0, p, 1).is_some() && matches!(gagliardo_bound(1.0, p), Ok(Some(_)))
}

fn run_family(cfg: &SuiteConfig, fam: &OperatorFamily, grid: &PhaseGrid, out: &mut Vec<CheckRecord>) {
    let mut params = grid_params(grid);
    params.insert("family".into(), fam.kind.id().into());
    params.insert("rank".into(), fam.rank.into());
    params.insert("width".into(), fam.width.into());
    params.insert("seed".into(), cfg.seed.into());
    let a = match fam.generate(grid, cfg.seed) {
        Ok(a) => a,
        Err(e) => {
            out.push(CheckRecord::failure("family", e).with_params(&params));
            return;
        }
    };
    let norms = Norms::new(&a);
    let diff_ok = grid.n_points() <= cfg.diff_points_max;
    // `p ≠ 2` difference quadratures cost one SVD per lattice offset.
    let budget = |p: f64| p == 2.0 || diff_ok;
    let fractional = cfg.s_list.iter().copied().filter(|&s| s < 1.0);

    if cfg.enabled(SuiteId::Young) {
        let f = gaussian_symbol(grid);
        for (p, q, r) in YOUNG_EXPONENTS {
            collect(out, "young", &params, one(young_with(&f, &norms, p, q, r)));
        }
        for p in [1.0, 2.0] {
            collect(out, "young_delta", &params, one(check_young_delta(&a, p)));
        }
    }
    if cfg.enabled(SuiteId::Hls) {
        for (a_exp, p) in HLS_EXPONENTS {
            collect(out, "hls", &params, one(hls_with(a_exp, &norms, p)));
        }
    }
    if cfg.enabled(SuiteId::GagliardoSobolev) {
        for &s in &cfg.s_list {
            for &p in &cfg.p_list {
                if sobolev_exponent(s, p, 1).is_none() || (s < 1.0 && !budget(p)) {
                    continue;
                }
                collect(out, "gagliardo_sobolev", &params, one(gagliardo_with(&norms, s, p)));
            }
        }
        for &p in cfg.p_list.iter().filter(|&&p| product_form_applies(p)) {
            collect(out, "sobolev_product", &params, check_sobolev_product(&a, p));
        }
    }
    if cfg.enabled(SuiteId::BesselSobolev) {
        for &s in &cfg.s_list {
            for &p in cfg.p_list.iter().filter(|&&p| p > 1.0) {
                if sobolev_exponent(s, p, 1).is_some() {
                    collect(out, "bessel_sobolev", &params, bessel_with(&norms, s, p));
                }
            }
        }
    }
    if cfg.enabled(SuiteId::Morrey) {
        for (s, theta) in MORREY_PAIRS {
            if s < 1.0 && !diff_ok {
                continue;
            }
            collect(out, "morrey", &params, one(morrey_with(&norms, s, theta)));
        }
    }
    if cfg.enabled(SuiteId::Besov) {
        for s in fractional {
            for &p in cfg.p_list.iter().filter(|&&p| budget(p)) {
                for &r in &cfg.r_list {
                    collect(out, "besov", &params, besov_with(&norms, s, p, r));
                }
            }
        }
        for &p in cfg.p_list.iter().filter(|&&p| budget(p)) {
            collect(out, "besov_endpoint", &params, besov_endpoint_with(&norms, p));
        }
        for &p in &cfg.p_list {
            collect(out, "besov_schatten", &params, besov_schatten_with(&norms, p));
        }
        for (n, p, q) in BERNSTEIN {
            collect(out, "bernstein", &params, one(bernstein_with(&norms, n, p, q)));
        }
        let (p, q, s0) = EMBEDDING;
        if diff_ok {
            for &r in &cfg.r_list {
                collect(out, "besov_embedding", &params, one(besov_embedding_with(&norms, p, q, s0, r)));
            }
        }
    }
    if cfg.enabled(SuiteId::Uncertainty) {
        let result = fam.generate_positive(grid, cfg.seed).and_then(|b| check_uncertainty(&b));
        collect(out, "uncertainty", &params, one(result.map(|r| r.with("state", "family"))));
    }
    if cfg.enabled(SuiteId::RieszTransform) {
        for p in RIESZ_P {
            collect(out, "riesz_transform", &params, one(check_riesz_transform(&a, p)));
        }
    }
}

/// Pairs with a known classical optimizer: `s = 1` or `p = 2`.
fn run_lower_bound(cfg: &SuiteConfig, hbars: &[f64], out: &mut Vec<CheckRecord>) {
    for &s in &cfg.s_list {
        for &p in &cfg.p_list {
            if !(s == 1.0 || p == 2.0) || sobolev_exponent(s, p, 1).is_none() {
                continue;
            }
            let params = Params::from([("s".to_string(), s.into()), ("p".to_string(), p.into())]);
            collect(out, "lower_bound", &params, estimate_lower_bound(s, p, hbars, cfg.max_points));
        }
    }
}

fn run_vector(cfg: &SuiteConfig, out: &mut Vec<CheckRecord>) {
    let n = cfg.vector_samples;
    for (i, p) in VECTOR_P.into_iter().enumerate() {
        let seed = cfg.seed.wrapping_add(1000 * i as u64);
        let params = Params::from([("p".to_string(), p.into())]);
        collect(out, "clarkson_mccarthy", &params, check_clarkson_mccarthy(p, n, seed));
        for (j, r) in SANDWICH_R.into_iter().enumerate() {
            collect(out, "vector_sandwich", &params, check_vector_sandwich(p, r, n, seed + 1 + j as u64));
        }
        collect(out, "vector_dot_bound", &params, one(check_dot_bound(p, n, seed + 10)));
    }
}

/// For each report-only check and parameter set seen at two or more ħ:
/// `max C ≤ 2 min C` over the sweep.
pub fn stability_records(records: &[CheckRecord]) -> Vec<CheckRecord> {
    let mut groups: BTreeMap<(String, Vec<(String, ParamValue)>), Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        if r.status != Status::ReportOnly || !STABILITY_CHECKS.contains(&r.check_id.as_str()) {
            continue;
        }
        let Some(hbar) = r.param("hbar").and_then(ParamValue::as_f64) else {
            continue;
        };
        let key: Vec<(String, ParamValue)> = r
            .params
            .iter()
            .filter(|(k, _)| !GRID_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        groups.entry((r.check_id.clone(), key)).or_default().push((hbar, r.ratio));
    }
    let mut out = Vec::new();
    for ((id, key), values) in groups {
        if values.len() < 2 {
            continue;
        }
        let finite: Vec<f64> = values.iter().map(|v| v.1).filter(|c| c.is_finite()).collect();
        let (hi, lo) = if finite.len() == values.len() {
            (
                finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                finite.iter().copied().fold(f64::INFINITY, f64::min),
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        let hbar_min = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let hbar_max = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
        let mut rec = CheckRecord::bounded(
            &format!("{id}_stability"),
            hi,
            STABILITY_FACTOR * lo,
            Some(STABILITY_FACTOR),
            0.0,
        )
        .with("hbar_min", hbar_min)
        .with("hbar_max", hbar_max)
        .with("sweep", values.len());
        for (k, v) in key {
            rec = rec.with(&k, v);
        }
        out.push(rec);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::families::FamilyKind;

    fn small() -> SuiteConfig {
        SuiteConfig {
            families: vec![OperatorFamily::default_for(FamilyKind::ToplitzGaussian)],
            hbar_list: vec![1.0, 0.5],
            grid: GridSpec {
                d: 1,
                n_points: 32,
                half_width: 8.0,
            },
            s_list: vec![0.5, 1.0],
            p_list: vec![1.5, 2.0],
            max_points: 64,
            diff_points_max: 32,
            vector_samples: 20,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn suite_ids_accept_prefixes() {
        assert_eq!(SuiteId::parse("check_young"), Some(SuiteId::Young));
        assert_eq!(SuiteId::parse("estimate_lower_bound"), Some(SuiteId::LowerBound));
        assert_eq!(SuiteId::parse("check_besov_suite"), Some(SuiteId::Besov));
        assert_eq!(SuiteId::parse("hls"), Some(SuiteId::Hls));
        assert_eq!(SuiteId::parse("nope"), None);
    }

    #[test]
    fn grids_refine_with_hbar() {
        let cfg = SuiteConfig::default();
        let ns: Vec<usize> = cfg.hbar_list.iter().map(|&h| cfg.grid_for(h).unwrap().n_points()).collect();
        assert_eq!(ns, [64, 92, 128, 182, 256, 364]);
        let capped = SuiteConfig { max_points: 128, ..cfg };
        assert_eq!(capped.grid_for(1.0 / 32.0).unwrap().n_points(), 128);
    }

    #[test]
    fn validation_names_the_field() {
        let cfg = SuiteConfig {
            hbar_list: vec![1.0, 0.0],
            ..SuiteConfig::default()
        };
        match cfg.validate() {
            Err(crate::Error::Config { field, .. }) => assert_eq!(field, "hbar_list"),
            other => panic!("{other:?}"),
        }
        let cfg = SuiteConfig {
            grid: GridSpec {
                d: 2,
                ..GridSpec::default()
            },
            ..SuiteConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(crate::Error::Config { field, .. }) if field == "grid.d"));
    }

    #[test]
    fn empty_family_list_gives_empty_report() {
        let cfg = SuiteConfig {
            families: vec![],
            ..small()
        };
        assert!(run_suite(&cfg).unwrap().is_empty());
    }

    #[test]
    fn small_suite_is_deterministic_and_sorted() {
        let cfg = small();
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.records().iter().zip(b.records()) {
            assert_eq!(x.check_id, y.check_id);
            assert_eq!(x.params, y.params);
            assert_eq!(x.lhs.to_bits(), y.lhs.to_bits());
        }
        let ids: Vec<&str> = a.records().iter().map(|r| r.check_id.as_str()).collect();
        assert!(ids.windows(2).all(|w| w[0] <= w[1]));
        assert!(ids.contains(&"hls_stability"));
    }

    #[test]
    fn suite_selection_limits_checks() {
        let cfg = SuiteConfig {
            suites: vec![SuiteId::Young],
            ..small()
        };
        let rep = run_suite(&cfg).unwrap();
        assert!(rep.records().iter().all(|r| r.check_id.starts_with("young")));
        assert!(!rep.failed());
    }

    #[test]
    fn stability_compares_extremes() {
        let mk = |hbar: f64, lhs: f64| CheckRecord::report("hls", lhs, 1.0, None).with("hbar", hbar).with("p", 4.0);
        let stable = stability_records(&[mk(1.0, 1.0), mk(0.5, 1.5)]);
        assert_eq!(stable.len(), 1);
        assert_eq!(stable[0].status, Status::Pass);
        assert_eq!(stable[0].check_id, "hls_stability");
        let unstable = stability_records(&[mk(1.0, 1.0), mk(0.5, 2.5), mk(0.25, 1.2)]);
        assert_eq!(unstable[0].status, Status::Fail);
        assert!(stability_records(&[mk(1.0, 1.0)]).is_empty());
    }
}
