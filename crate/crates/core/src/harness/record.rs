use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Tolerance for inequalities whose sides are computed exactly.
pub const EXACT_TOL: f64 = 1e-6;
/// Tolerance for inequalities involving singular-integral quadratures.
pub const QUADRATURE_TOL: f64 = 0.05;
/// Tolerance for the two-sided `p = 2` Besov identities.
pub const IDENTITY_TOL: f64 = 0.02;

/// Value of a named record parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Int(i64),
    Text(String),
}

impl ParamValue {
    fn rank(&self) -> u8 {
        match self {
            ParamValue::Real(_) => 0,
            ParamValue::Int(_) => 1,
            ParamValue::Text(_) => 2,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Real(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Text(_) => None,
        }
    }
}

impl Eq for ParamValue {}

impl Ord for ParamValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ParamValue::Real(a), ParamValue::Real(b)) => a.total_cmp(b),
            (ParamValue::Int(a), ParamValue::Int(b)) => a.cmp(b),
            (ParamValue::Text(a), ParamValue::Text(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for ParamValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(v) => f.write_str(&format_real(*v)),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ReportOnly => "report-only",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pass" => Some(Status::Pass),
            "fail" => Some(Status::Fail),
            "report-only" => Some(Status::ReportOnly),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated inequality.
///
/// For pass/fail records the paper's constant is already folded into `rhs`,
/// so a pass means `lhs / rhs ≤ 1 + tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub check_id: String,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub bound: Option<f64>,
    pub status: Status,
}

fn quotient(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        f64::NAN
    } else {
        lhs / rhs
    }
}

impl CheckRecord {
    fn build(check_id: &str, lhs: f64, rhs: f64, bound: Option<f64>, status: Status) -> Self {
        Self {
            check_id: check_id.to_string(),
            params: Params::new(),
            lhs,
            rhs,
            ratio: quotient(lhs, rhs),
            bound,
            status,
        }
    }

    /// `lhs ≤ rhs` up to a relative tolerance. Both sides zero is a trivial
    /// case and is reported only.
    pub fn bounded(check_id: &str, lhs: f64, rhs: f64, bound: Option<f64>, tol: f64) -> Self {
        let ratio = quotient(lhs, rhs);
        let status = if ratio.is_nan() && lhs == 0.0 {
            Status::ReportOnly
        } else if ratio <= 1.0 + tol {
            Status::Pass
        } else {
            Status::Fail
        };
        Self::build(check_id, lhs, rhs, bound, status).with("tol", tol)
    }

    /// `lhs = rhs` up to a relative tolerance.
    pub fn equality(check_id: &str, lhs: f64, rhs: f64, bound: Option<f64>, tol: f64) -> Self {
        let ratio = quotient(lhs, rhs);
        let status = if ratio.is_nan() && lhs == 0.0 {
            Status::ReportOnly
        } else if (ratio - 1.0).abs() <= tol {
            Status::Pass
        } else {
            Status::Fail
        };
        Self::build(check_id, lhs, rhs, bound, status).with("tol", tol)
    }

    /// Empirical constant `lhs / rhs` with no pass criterion.
    pub fn report(check_id: &str, lhs: f64, rhs: f64, bound: Option<f64>) -> Self {
        Self::build(check_id, lhs, rhs, bound, Status::ReportOnly)
    }

    /// A check that could not be evaluated.
    pub fn failure(check_id: &str, message: impl fmt::Display) -> Self {
        Self::build(check_id, f64::NAN, f64::NAN, None, Status::Fail).with("error", message.to_string())
    }

    pub fn with(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_params(mut self, params: &Params) -> Self {
        for (k, v) in params {
            self.params.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self
    }

    pub fn param(&self, key: &str) -> Option<&ParamValue> {
        self.params.get(key)
    }

    /// Parameters as `key=value` pairs joined by `;`.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn sort_cmp(&self, other: &Self) -> Ordering {
        self.check_id
            .cmp(&other.check_id)
            .then_with(|| self.params.iter().cmp(other.params.iter()))
    }
}

/// Floats at 12 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// Inverse of [`format_real`].
pub fn parse_real(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

/// Counts and per-check worst ratios of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub report_only: usize,
    /// Largest ratio among the pass/fail records of each check.
    pub worst: BTreeMap<String, f64>,
}

/// Records sorted by check id, then parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    records: Vec<CheckRecord>,
}

impl Report {
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.sort_cmp(b));
        Self { records }
    }

    pub fn records(&self) -> &[CheckRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<CheckRecord> {
        self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }

    pub fn summary(&self) -> Summary {
        let count = |s: Status| self.records.iter().filter(|r| r.status == s).count();
        let mut worst = BTreeMap::new();
        for r in &self.records {
            if r.status == Status::ReportOnly {
                continue;
            }
            let entry = worst.entry(r.check_id.clone()).or_insert(f64::NEG_INFINITY);
            if r.ratio.is_nan() {
                *entry = f64::NAN;
            } else if !entry.is_nan() {
                *entry = entry.max(r.ratio);
            }
        }
        Summary {
            total: self.records.len(),
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            report_only: count(Status::ReportOnly),
            worst,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_follow_ratio() {
        assert_eq!(CheckRecord::bounded("a", 1.0, 2.0, None, 0.0).status, Status::Pass);
        assert_eq!(CheckRecord::bounded("a", 2.0, 1.0, None, 0.5).status, Status::Fail);
        assert_eq!(CheckRecord::bounded("a", 1.04, 1.0, None, 0.05).status, Status::Pass);
        assert_eq!(CheckRecord::bounded("a", 1.0, 0.0, None, 0.05).status, Status::Fail);
        let zero = CheckRecord::bounded("a", 0.0, 0.0, None, 0.05);
        assert_eq!(zero.status, Status::ReportOnly);
        assert!(zero.ratio.is_nan());
        assert_eq!(CheckRecord::equality("a", 0.97, 1.0, None, 0.02).status, Status::Fail);
        assert_eq!(CheckRecord::equality("a", 1.01, 1.0, None, 0.02).status, Status::Pass);
    }

    #[test]
    fn real_format_round_trips() {
        for v in [0.0, 1.0, -2.5e-17, 6.02214076e23, 1.0 / 3.0, f64::INFINITY] {
            let text = format_real(v);
            let back = parse_real(&text).unwrap();
            assert_eq!(format_real(back), text);
            assert!((back - v).abs() <= 1e-11 * v.abs() || back == v);
        }
        assert!(parse_real(&format_real(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn report_sorts_and_summarizes() {
        let recs = vec![
            CheckRecord::bounded("b", 1.0, 2.0, None, 0.0).with("p", 2.0),
            CheckRecord::bounded("a", 3.0, 2.0, None, 0.0).with("p", 1.5),
            CheckRecord::bounded("a", 1.0, 2.0, None, 0.0).with("p", 1.0),
            CheckRecord::report("c", 1.0, 4.0, None),
        ];
        let rep = Report::new(recs);
        let ids: Vec<_> = rep.records().iter().map(|r| r.check_id.as_str()).collect();
        assert_eq!(ids, ["a", "a", "b", "c"]);
        assert_eq!(rep.records()[0].param("p"), Some(&ParamValue::Real(1.0)));
        let s = rep.summary();
        assert_eq!((s.total, s.pass, s.fail, s.report_only), (4, 2, 1, 1));
        assert_eq!(s.worst["a"], 1.5);
        assert!(rep.failed());
    }
}
