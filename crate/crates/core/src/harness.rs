//! Instance generators, batch sweeps with inequality checks, log-log
//! exponent fits and report serialization.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::load_function;
use crate::measures::inequality_chain;
use crate::model::{Builtin, InputString, PartialFunction, PromiseSet, TypeVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomMode {
    /// An independent bit per member.
    Free,
    /// One bit per type.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Generator {
    PermInversion { n: usize },
    OrTotal { n: usize },
    WeightPromise { n: usize },
    ThresholdSymmetric { n: usize, m: usize, cut: usize },
    RandomOnType { n: usize, m: usize, seed: u64, mode: RandomMode, types: Option<Vec<Vec<u32>>> },
    /// One marker symbol of multiplicity 1 hidden among random filler; the
    /// value says whether the marker sits in a random half of the positions.
    Marker { n: usize, m: usize, seed: u64 },
    ExplicitFile { path: PathBuf },
}

fn param<T: std::str::FromStr>(params: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = params.get(key).ok_or_else(|| Error::InvalidParameters(format!("missing parameter `{key}`")))?;
    raw.parse().map_err(|_| Error::InvalidParameters(format!("bad value `{raw}` for `{key}`")))
}

fn param_or<T: std::str::FromStr>(params: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    if params.contains_key(key) {
        param(params, key)
    } else {
        Ok(default)
    }
}

/// Parses `"2,1,1;3,0,1"` into type vectors.
pub fn parse_types(text: &str) -> Result<Vec<Vec<u32>>> {
    text.split(';')
        .map(|t| {
            t.split(',')
                .map(|v| v.trim().parse().map_err(|_| Error::InvalidParameters(format!("bad type `{t}`"))))
                .collect()
        })
        .collect()
}

impl Generator {
    /// Builds a generator from its id and `key=value` parameters.
    pub fn from_params(id: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        Ok(match id {
            "perm-inversion" => Generator::PermInversion { n: param(params, "n")? },
            "or-total" => Generator::OrTotal { n: param(params, "n")? },
            "weight-promise" => Generator::WeightPromise { n: param(params, "n")? },
            "threshold-symmetric" => Generator::ThresholdSymmetric {
                n: param(params, "n")?,
                m: param(params, "m")?,
                cut: param(params, "cut")?,
            },
            "random-on-type" => Generator::RandomOnType {
                n: param(params, "n")?,
                m: param(params, "m")?,
                seed: param_or(params, "seed", 0)?,
                mode: match params.get("mode").map(String::as_str) {
                    None | Some("free") => RandomMode::Free,
                    Some("constant") => RandomMode::Constant,
                    Some(other) => return Err(Error::InvalidParameters(format!("unknown mode `{other}`"))),
                },
                types: params.get("types").map(|t| parse_types(t)).transpose()?,
            },
            "marker" => Generator::Marker { n: param(params, "n")?, m: param(params, "m")?, seed: param_or(params, "seed", 0)? },
            "explicit-file" => Generator::ExplicitFile { path: param(params, "path")? },
            other => return Err(Error::InvalidParameters(format!("unknown generator `{other}`"))),
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            Generator::PermInversion { .. } => "perm-inversion",
            Generator::OrTotal { .. } => "or-total",
            Generator::WeightPromise { .. } => "weight-promise",
            Generator::ThresholdSymmetric { .. } => "threshold-symmetric",
            Generator::RandomOnType { .. } => "random-on-type",
            Generator::Marker { .. } => "marker",
            Generator::ExplicitFile { .. } => "explicit-file",
        }
    }

    /// The size parameter used for scaling fits, for parameterized families.
    pub fn family_parameter(&self) -> Option<usize> {
        match self {
            Generator::PermInversion { n }
            | Generator::OrTotal { n }
            | Generator::WeightPromise { n }
            | Generator::ThresholdSymmetric { n, .. } => Some(*n),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    #[serde(flatten)]
    pub generator: Generator,
}

impl InstanceSpec {
    pub fn new(name: impl Into<String>, generator: Generator) -> Self {
        InstanceSpec { name: name.into(), generator }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameters(msg.into()))
    }
}

fn random_type(n: usize, m: usize, rng: &mut ChaCha8Rng) -> TypeVector {
    let all = TypeVector::all(n, m);
    all[rng.gen_range(0..all.len())].clone()
}

/// Builds the instance described by `spec`; deterministic in the spec.
pub fn generate(spec: &InstanceSpec) -> Result<PartialFunction> {
    match &spec.generator {
        Generator::PermInversion { n } => {
            require(*n >= 1 && *n <= 255, "perm-inversion needs 1 <= n <= 255")?;
            PartialFunction::builtin(PromiseSet::single_type(TypeVector(vec![1; *n]))?, Builtin::PermInversion)
        }
        Generator::OrTotal { n } => {
            require(*n >= 1, "or-total needs n >= 1")?;
            PartialFunction::builtin(PromiseSet::total(*n, 2)?, Builtin::Or)
        }
        Generator::WeightPromise { n } => {
            require(*n >= 2, "weight-promise needs n >= 2")?;
            let types = BTreeSet::from([TypeVector(vec![*n as u32, 0]), TypeVector(vec![(n - n / 2) as u32, (n / 2) as u32])]);
            PartialFunction::builtin(PromiseSet::symmetric_union(*n, 2, types)?, Builtin::ZeroOnly)
        }
        Generator::ThresholdSymmetric { n, m, cut } => {
            require(*n >= 1 && *m >= 1 && *m <= 256, "threshold-symmetric needs n, M >= 1")?;
            PartialFunction::builtin(PromiseSet::total(*n, *m)?, Builtin::Threshold { cut: *cut })
        }
        Generator::RandomOnType { n, m, seed, mode, types } => {
            require(*n >= 1 && *m >= 1 && *m <= 256, "random-on-type needs n, M >= 1")?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let types: BTreeSet<TypeVector> = match types {
                Some(ts) => ts.iter().map(|t| TypeVector(t.clone())).collect(),
                None => BTreeSet::from([random_type(*n, *m, &mut rng)]),
            };
            let promise = if types.len() == 1 {
                PromiseSet::single_type(types.iter().next().unwrap().clone())?
            } else {
                PromiseSet::symmetric_union(*n, *m, types.clone())?
            };
            if promise.n() != *n || promise.m() != *m {
                return Err(Error::DimensionMismatch(format!("types do not fit n={n}, M={m}")));
            }
            let mut table = BTreeMap::new();
            for t in &types {
                let bit: bool = rng.gen();
                for x in t.expand()? {
                    let v = match mode {
                        RandomMode::Free => rng.gen(),
                        RandomMode::Constant => bit,
                    };
                    table.insert(x, v);
                }
            }
            PartialFunction::from_table(promise, table)
        }
        Generator::Marker { n, m, seed } => {
            require(*n >= 2 && *m >= 2 && *m <= 256, "marker needs n >= 2 and M >= 2")?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut mult = vec![0u32; *m];
            mult[0] = 1;
            for _ in 1..*n {
                mult[rng.gen_range(1..*m)] += 1;
            }
            let mut positions: Vec<usize> = (0..*n).collect();
            positions.shuffle(&mut rng);
            let half: BTreeSet<usize> = positions[..n / 2].iter().copied().collect();
            let promise = PromiseSet::single_type(TypeVector(mult))?;
            PartialFunction::from_fn(promise, |x: &InputString| {
                let at = x.0.iter().position(|&s| s == 0).expect("marker present");
                !half.contains(&at)
            })
        }
        Generator::ExplicitFile { path } => load_function(path),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Partitions of `n` into at most `parts` positive parts, non-increasing.
fn partitions(n: usize, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: usize, max: usize, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if parts == 0 {
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p as u32);
            rec(left - p, p, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, parts, &mut Vec::new(), &mut out);
    out
}

/// Every Boolean function on every single-type promise with `n <= max_n`
/// and `M <= max_m`, one per class under index permutation, value
/// complement and symbol relabeling. Types are the partitions of `n` with at
/// most `max_m` parts; unused symbols only relabel.
pub fn exhaustive_single_type(max_n: usize, max_m: usize) -> Result<Vec<(String, PartialFunction)>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let perms = permutations(n);
        for part in partitions(n, max_m) {
            let t = TypeVector(part);
            let members = t.expand()?;
            let size = members.len();
            if size > 20 {
                return Err(Error::BudgetExceeded { needed: 1u128 << size, cap: crate::budget::budget() });
            }
            let index: HashMap<&InputString, usize> = members.iter().enumerate().map(|(i, x)| (x, i)).collect();
            let images: Vec<Vec<usize>> = perms
                .iter()
                .map(|sigma| members.iter().map(|x| index[&x.permuted(sigma)]).collect())
                .collect();
            let full = (1u64 << size) - 1;
            for mask in 0..=full {
                let canonical = images
                    .iter()
                    .flat_map(|img| {
                        let moved = (0..size).fold(0u64, |acc, j| acc | ((mask >> j & 1) << img[j]));
                        [moved, full & !moved]
                    })
                    .min()
                    .unwrap();
                if canonical != mask {
                    continue;
                }
                let table = members.iter().enumerate().map(|(j, x)| (x.clone(), mask >> j & 1 == 1)).collect();
                let promise = PromiseSet::single_type(t.clone())?;
                out.push((format!("type{t}#{mask:x}"), PartialFunction::from_table(promise, table)?));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub name: String,
    pub generator: String,
    pub parameter: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    #[serde(rename = "D")]
    pub d: Option<u32>,
    #[serde(rename = "C")]
    pub c: Option<usize>,
    pub bs: Option<usize>,
    pub s: Option<usize>,
    pub product_bound_checked: bool,
    pub anomalies: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub family: String,
    pub measure: String,
    pub points: usize,
    /// Rows left out because the measure was 0.
    pub excluded_zero: Vec<String>,
    pub exponent: f64,
    pub intercept: f64,
    /// Root mean square of the log-log residuals.
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub violations: Vec<Violation>,
    pub fits: Vec<Fit>,
}

/// Least squares fit of `y = a x + b`; `None` with fewer than two distinct
/// `x`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    Some((a, b, (rss / k).sqrt()))
}

fn run_row(name: &str, generator: &str, parameter: Option<usize>, f: Result<PartialFunction>) -> (SweepRow, Option<Violation>) {
    let mut row = SweepRow {
        name: name.into(),
        generator: generator.into(),
        parameter,
        n: None,
        m: None,
        d: None,
        c: None,
        bs: None,
        s: None,
        product_bound_checked: false,
        anomalies: Vec::new(),
        error: None,
    };
    let f = match f {
        Ok(f) => f,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, None);
        }
    };
    row.n = Some(f.n());
    row.m = Some(f.m());
    match inequality_chain(&f) {
        Ok(r) => {
            row.d = Some(r.d);
            row.c = Some(r.c);
            row.bs = Some(r.bs);
            row.s = Some(r.s);
            row.product_bound_checked = r.product_bound_checked;
            row.anomalies = r.anomalies;
            (row, None)
        }
        Err(Error::InequalityViolation(msg)) => {
            row.error = Some(format!("inequality violated: {msg}"));
            (row, Some(Violation { name: name.into(), message: msg }))
        }
        Err(e) => {
            row.error = Some(e.to_string());
            (row, None)
        }
    }
}

fn assemble(mut rows: Vec<(SweepRow, Option<Violation>)>) -> SweepResult {
    rows.sort_by(|a, b| a.0.name.cmp(&b.0.name).then_with(|| a.0.generator.cmp(&b.0.generator)));
    let violations: Vec<Violation> = rows.iter().filter_map(|(_, v)| v.clone()).collect();
    let rows: Vec<SweepRow> = rows.into_iter().map(|(r, _)| r).collect();
    let fits = fit_families(&rows);
    SweepResult { rows, violations, fits }
}

/// Log-log fits per family and measure over rows with a family parameter.
pub fn fit_families(rows: &[SweepRow]) -> Vec<Fit> {
    let mut families: BTreeMap<&str, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        if r.parameter.is_some() && r.error.is_none() {
            families.entry(&r.generator).or_default().push(r);
        }
    }
    let mut fits = Vec::new();
    for (family, rs) in families {
        let measures: [(&str, fn(&SweepRow) -> Option<f64>); 4] = [
            ("D", |r| r.d.map(f64::from)),
            ("C", |r| r.c.map(|v| v as f64)),
            ("bs", |r| r.bs.map(|v| v as f64)),
            ("s", |r| r.s.map(|v| v as f64)),
        ];
        for (measure, get) in measures {
            let mut points = Vec::new();
            let mut excluded_zero = Vec::new();
            for r in &rs {
                let Some(y) = get(r) else { continue };
                if y == 0.0 {
                    excluded_zero.push(r.name.clone());
                    continue;
                }
                points.push(((r.parameter.unwrap() as f64).ln(), y.ln()));
            }
            points.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if let Some((exponent, intercept, residual)) = least_squares(&points) {
                fits.push(Fit {
                    family: family.into(),
                    measure: measure.into(),
                    points: points.len(),
                    excluded_zero,
                    exponent,
                    intercept,
                    residual,
                });
            }
        }
    }
    fits
}

/// Runs the inequality chain on every instance in parallel. Per-instance
/// errors are recorded in the rows.
pub fn sweep(specs: &[InstanceSpec]) -> SweepResult {
    let rows = specs
        .par_iter()
        .map(|spec| run_row(&spec.name, spec.generator.id(), spec.generator.family_parameter(), generate(spec)))
        .collect();
    assemble(rows)
}

/// The exhaustive single-type sweep.
pub fn sweep_exhaustive(max_n: usize, max_m: usize) -> Result<SweepResult> {
    let fs = exhaustive_single_type(max_n, max_m)?;
    let rows = fs.into_par_iter().map(|(name, f)| run_row(&name, "exhaustive", None, Ok(f))).collect();
    Ok(assemble(rows))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(Error::InvalidParameters(format!("unknown format `{other}`"))),
        }
    }
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), T::to_string)
}

const HEADER: [&str; 9] = ["name", "generator", "n", "M", "D", "C", "bs", "s", "error"];

fn row_cells(r: &SweepRow) -> [String; 9] {
    [
        r.name.clone(),
        r.generator.clone(),
        cell(&r.n),
        cell(&r.m),
        cell(&r.d),
        cell(&r.c),
        cell(&r.bs),
        cell(&r.s),
        r.error.clone().unwrap_or_default(),
    ]
}

/// Renders rows of cells as an aligned text table.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

/// Serializes a sweep result.
pub fn report(result: &SweepResult, format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(result).map_err(|e| Error::Parse(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(HEADER).map_err(|e| Error::Parse(e.to_string()))?;
            for r in &result.rows {
                w.write_record(row_cells(r)).map_err(|e| Error::Parse(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = result.rows.iter().map(|r| row_cells(r).to_vec()).collect();
            let mut out = text_table(&HEADER, &rows);
            if !result.fits.is_empty() {
                out += "\n";
                let fits: Vec<Vec<String>> = result
                    .fits
                    .iter()
                    .map(|f| {
                        vec![
                            f.family.clone(),
                            f.measure.clone(),
                            f.points.to_string(),
                            format!("{:.4}", f.exponent),
                            format!("{:.4}", f.residual),
                            f.excluded_zero.len().to_string(),
                        ]
                    })
                    .collect();
                out += &text_table(&["family", "measure", "points", "exponent", "residual", "zeros"], &fits);
            }
            out += &format!("\nviolations: {}\n", result.violations.len());
            for v in &result.violations {
                out += &format!("  {}: {}\n", v.name, v.message);
            }
            Ok(out)
        }
    }
}

pub fn parse_json(text: &str) -> Result<SweepResult> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: &str, kv: &[(&str, &str)]) -> InstanceSpec {
        let params = kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        InstanceSpec::new(format!("{id}{kv:?}"), Generator::from_params(id, &params).unwrap())
    }

    #[test]
    fn generator_examples() {
        let f = generate(&spec("perm-inversion", &[("n", "4")])).unwrap();
        assert_eq!(f.promise().size(), 24);
        assert_eq!(f.eval(&InputString(vec![0, 1, 2, 3])), Some(false));
        assert_eq!(f.eval(&InputString(vec![1, 2, 0, 3])), Some(true));
        let w = generate(&spec("weight-promise", &[("n", "4")])).unwrap();
        assert_eq!(w.promise().size(), 7);
        assert_eq!(w.eval(&InputString(vec![0; 4])), Some(false));
        let o = generate(&spec("or-total", &[("n", "1")])).unwrap();
        assert_eq!(o.eval(&InputString(vec![0])), Some(false));
        assert_eq!(o.eval(&InputString(vec![1])), Some(true));
        assert!(Generator::from_params("nope", &BTreeMap::new()).is_err());
        assert!(Generator::from_params("perm-inversion", &BTreeMap::new()).is_err());
    }

    #[test]
    fn generators_are_pure() {
        for s in [
            spec("random-on-type", &[("n", "4"), ("m", "3"), ("seed", "7")]),
            spec("random-on-type", &[("n", "3"), ("m", "2"), ("seed", "7"), ("mode", "constant"), ("types", "3,0;1,2")]),
            spec("marker", &[("n", "6"), ("m", "3"), ("seed", "11")]),
        ] {
            assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        }
    }

    #[test]
    fn exhaustive_counts() {
        // n = 1: one type, functions {0} up to complement
        let fs = exhaustive_single_type(1, 3).unwrap();
        assert_eq!(fs.len(), 1);
        // n = 2, M <= 2: types (2) and (1,1); (1,1) has two members related by the swap
        let fs = exhaustive_single_type(2, 2).unwrap();
        assert_eq!(fs.len(), 1 + 1 + 2);
    }

    #[test]
    fn sweep_and_reports() {
        let empty = sweep(&[]);
        assert_eq!(empty, SweepResult::default());
        assert_eq!(parse_json(&report(&empty, Format::Json).unwrap()).unwrap(), empty);
        let specs: Vec<_> =
            [4, 6, 8, 10].iter().map(|n| spec("perm-inversion", &[("n", &n.to_string())])).collect();
        let r = sweep(&specs);
        assert!(r.violations.is_empty());
        let c_fit = r.fits.iter().find(|f| f.measure == "C").unwrap();
        assert!(c_fit.exponent.abs() <= 0.01);
        let mut reversed = specs.clone();
        reversed.reverse();
        assert_eq!(sweep(&reversed), r);
        let csv = report(&sweep(&specs[..1]), Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(parse_json(&report(&r, Format::Json).unwrap()).unwrap(), r);
        assert!(report(&r, Format::Table).unwrap().contains("violations: 0"));
    }

    #[test]
    fn sweep_records_errors() {
        let bad = InstanceSpec::new("bad", Generator::ExplicitFile { path: "/nonexistent.toml".into() });
        let r = sweep(&[bad]);
        assert_eq!(r.rows.len(), 1);
        assert!(r.rows[0].error.is_some());
        assert!(r.violations.is_empty());
    }

    #[test]
    fn least_squares_line() {
        let (a, b, res) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && res < 1e-12);
        assert!(least_squares(&[(1.0, 1.0)]).is_none());
    }
}
