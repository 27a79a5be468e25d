//! Window preparation, construction runs and their artifacts.

use std::collections::BTreeMap;
use std::fmt;

use sheafbm_core::alcove::{build_window_order, periodic_quotient, AddressBox, Alcove, CartanType, RootSystem, WeylGroup};
use sheafbm_core::graph::{GkmResult, MomentGraph};
use sheafbm_core::kl::{Coxeter, KlTable};
use sheafbm_core::sheaf::{bm_build, CofilteredSheaf, ExtensionOrder, SheafWindow};
use sheafbm_core::verify::{bm_verify, global_sections, global_sections_report, rank_table, Report};
use sheafbm_core::{Error, Field, PrimeField, Rationals};

use crate::formats::{
    graph_file, load_graph, CheckRecord, EdgeModuleRecord, FieldRecord, GraphFile, Id, KlEntry, KlTableFile, LoadError,
    PointDims, SheafResult, StalkRecord, VerificationRecord,
};

/// Failure of a command, carrying its exit code class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    /// Exit 2.
    Verification(String),
    /// Exit 3.
    Input(String),
    /// Exit 4.
    Cutoff(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Input(_) => 3,
            CliError::Cutoff(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(s) => write!(f, "verification failed: {}", s),
            CliError::Input(s) => write!(f, "input error: {}", s),
            CliError::Cutoff(s) => write!(f, "{}", s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CutoffTooLow { .. } => CliError::Cutoff(format!("CUTOFF_TOO_LOW: {}", e)),
            Error::ClosureUncertified(_) => CliError::Cutoff(format!("CLOSURE_UNCERTIFIED: {}", e)),
            Error::CharacteristicTwo => CliError::Verification(format!("GKM: {}", e)),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Syntax(s) => CliError::Input(s),
            LoadError::Invalid(_) => CliError::Verification(e.to_string()),
        }
    }
}

/// Characteristic from `q` or `fp:P`. Characteristic 2 is accepted here so
/// that the GKM check can reject it.
pub fn parse_field(s: &str) -> Result<u64, CliError> {
    match s.trim() {
        "q" | "Q" => Ok(0),
        t => {
            let p = t
                .strip_prefix("fp:")
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| CliError::Input(format!("field must be q or fp:P, got {}", s)))?;
            if p == 2 {
                return Ok(2);
            }
            PrimeField::new(p)?;
            Ok(p)
        }
    }
}

/// Where the window comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// Finite Weyl group, trivial action, reverse Bruhat sheaf order.
    Bruhat(CartanType),
    /// Alcove window with the periodic quotient.
    Affine(CartanType),
    /// Moment graph file with `order_covers`.
    GraphFile(String),
}

/// `A2-bruhat` or `affine-A1`.
pub fn parse_type(s: &str) -> Result<Source, CliError> {
    let t = s.trim();
    if let Some(x) = t.strip_suffix("-bruhat") {
        return Ok(Source::Bruhat(CartanType::parse(x)?));
    }
    if let Some(x) = t.strip_prefix("affine-") {
        return Ok(Source::Affine(CartanType::parse(x)?));
    }
    Err(CliError::Input(format!("type must be X-bruhat or affine-X, got {}", s)))
}

/// `lo..hi` for every coordinate, or one `lo..hi` per coordinate separated
/// by commas.
pub fn parse_box(rs: &RootSystem, s: &str) -> Result<AddressBox, CliError> {
    let range = |r: &str| -> Result<(i64, i64), CliError> {
        let (a, b) = r.split_once("..").ok_or_else(|| CliError::Input(format!("bad range {}", r)))?;
        let lo = a.trim().parse().map_err(|_| CliError::Input(format!("bad range {}", r)))?;
        let hi = b.trim().parse().map_err(|_| CliError::Input(format!("bad range {}", r)))?;
        if lo > hi {
            return Err(CliError::Input(format!("empty range {}", r)));
        }
        Ok((lo, hi))
    };
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 1 {
        let (lo, hi) = range(parts[0])?;
        return Ok(AddressBox::uniform(rs, lo, hi));
    }
    if parts.len() != rs.num_positive() {
        return Err(CliError::Input(format!("box needs {} ranges, got {}", rs.num_positive(), parts.len())));
    }
    let ranges = parts.iter().map(|p| range(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(AddressBox { lo: ranges.iter().map(|r| r.0).collect(), hi: ranges.iter().map(|r| r.1).collect() })
}

/// Window options shared by the commands that build sheaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub source: Source,
    pub w: Option<String>,
    pub bx: Option<String>,
    pub margin: i64,
}

/// A window ready for the construction.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub label: String,
    pub window: SheafWindow,
    pub w: usize,
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {}", path, e)))
}

pub fn prepare(spec: &WindowSpec) -> Result<Prepared, CliError> {
    if spec.bx.is_some() && !matches!(spec.source, Source::Affine(_)) {
        return Err(CliError::Input("--box only applies to affine types".into()));
    }
    match &spec.source {
        Source::Bruhat(t) => {
            let rs = RootSystem::new(*t);
            let weyl = WeylGroup::new(&rs);
            let w = weyl.parse(spec.w.as_deref().unwrap_or("longest"))?;
            Ok(Prepared { label: format!("{:?}-bruhat", t), window: SheafWindow::classical(&weyl), w })
        }
        Source::Affine(t) => {
            let rs = RootSystem::new(*t);
            let w = Alcove::parse(&rs, spec.w.as_deref().unwrap_or("A0"))?;
            let bx = parse_box(&rs, spec.bx.as_deref().ok_or_else(|| CliError::Input("affine types need --box".into()))?)?;
            if spec.margin < 0 {
                return Err(CliError::Input("margin must be nonnegative".into()));
            }
            let win = build_window_order(&rs, &w, &bx, &bx.widened(spec.margin))?;
            let pd = periodic_quotient(&rs, &win);
            Ok(Prepared { label: format!("affine-{:?}", t), window: SheafWindow::periodic(&win, &pd), w: win.base })
        }
        Source::GraphFile(path) => {
            let loaded = load_graph(&read_file(path)?)?;
            let order = loaded.graph.order().cloned().ok_or_else(|| CliError::Input("graph file needs order_covers".into()))?;
            let q = if loaded.action.generators.is_empty() {
                let n = loaded.graph.num_vertices();
                loaded.graph.quotient_by_orbits(&(0..n).collect::<Vec<_>>(), loaded.graph.names().to_vec())
            } else {
                loaded.graph.quotient_by_action(&loaded.action)?
            };
            let names = loaded.graph.names().to_vec();
            let wname = spec.w.as_deref().ok_or_else(|| CliError::Input("graph files need --w".into()))?;
            let w = names.iter().position(|n| n == wname).ok_or_else(|| CliError::Input(format!("unknown vertex {}", wname)))?;
            let window = SheafWindow::new(order, names, q.orbit_map, q.quotient)?;
            Ok(Prepared { label: path.clone(), window, w })
        }
    }
}

/// Fails unless the quotient satisfies GKM over the field.
pub fn check_gkm(graph: &MomentGraph, characteristic: u64) -> Result<(), CliError> {
    let r = match characteristic {
        0 => graph.gkm_check(&Rationals),
        p => graph.gkm_check(&PrimeField::new_unchecked(p)),
    };
    match r {
        GkmResult::Ok => Ok(()),
        GkmResult::FailCharacteristic => Err(CliError::Verification("GKM: characteristic 2 is not allowed".into())),
        GkmResult::Fail { vertex, edges } => Err(CliError::Verification(format!(
            "GKM: labels of edges {} and {} at vertex {} are proportional",
            edges.0,
            edges.1,
            graph.name(vertex)
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Local properties of the sheaf.
    Fast,
    /// Also the checks on the global sections module.
    Full,
}

fn checks(report: &Report) -> Vec<CheckRecord> {
    report.checks.iter().map(|c| CheckRecord { name: c.name.clone(), passed: c.passed, failures: c.failures.clone() }).collect()
}

fn record<F: Field>(prep: &Prepared, b: &CofilteredSheaf<F>, verify: Option<VerifyLevel>) -> SheafResult {
    let win = &prep.window;
    let q = &win.quotient;
    let stalks = rank_table(b)
        .into_iter()
        .map(|(x, r)| StalkRecord {
            x: win.names[x].clone(),
            orbit: q.name(win.orbit_map[x]).to_string(),
            rank_poly: r.coefficients().clone(),
        })
        .collect();
    let edge_modules = q
        .edges()
        .iter()
        .enumerate()
        .map(|(ei, e)| {
            let fam = b.edge_family(ei);
            EdgeModuleRecord {
                u: q.name(e.u).to_string(),
                v: q.name(e.v).to_string(),
                label: e.label.coords().to_vec(),
                points: fam
                    .points()
                    .iter()
                    .map(|&x| PointDims { x: win.names[x].clone(), dims: fam.module(x).expect("point").dims().to_vec() })
                    .collect(),
            }
        })
        .collect();
    let verification = verify.map(|level| {
        let mut all = checks(&bm_verify(b));
        if level == VerifyLevel::Full {
            let bw = global_sections(b);
            all.extend(checks(&global_sections_report(b, &bw)));
        }
        VerificationRecord {
            level: if level == VerifyLevel::Full { "full" } else { "fast" }.into(),
            passed: all.iter().all(|c| c.passed),
            checks: all,
        }
    });
    SheafResult {
        source: prep.label.clone(),
        w: win.names[prep.w].clone(),
        cutoff: b.cutoff(),
        field: FieldRecord { characteristic: b.field().spec().characteristic() },
        stalks,
        edge_modules,
        verification,
    }
}

fn build_with<F: Field>(field: &F, prep: &Prepared, cutoff: i64, ext: ExtensionOrder, verify: Option<VerifyLevel>) -> Result<SheafResult, CliError> {
    let b = bm_build(field, &prep.window, prep.w, cutoff, ext)?;
    Ok(record(prep, &b, verify))
}

/// Builds `ℬ(w)` and its result record, verified at the given level.
pub fn bm_run(prep: &Prepared, characteristic: u64, cutoff: i64, ext: ExtensionOrder, verify: Option<VerifyLevel>) -> Result<SheafResult, CliError> {
    check_gkm(&prep.window.quotient, characteristic)?;
    match characteristic {
        0 => build_with(&Rationals, prep, cutoff, ext, verify),
        p => build_with(&PrimeField::new(p)?, prep, cutoff, ext, verify),
    }
}

/// Window export of an alcove window with its periodic quotient data.
pub fn alcove_window(t: CartanType, w: &str, bx: &str, margin: i64) -> Result<GraphFile, CliError> {
    let rs = RootSystem::new(t);
    let a = Alcove::parse(&rs, w)?;
    let bx = parse_box(&rs, bx)?;
    if margin < 0 {
        return Err(CliError::Input("margin must be nonnegative".into()));
    }
    let win = build_window_order(&rs, &a, &bx, &bx.widened(margin))?;
    let pd = periodic_quotient(&rs, &win);
    let graph = pd.graph.clone().with_order(Some(win.order.clone()));
    let mut f = graph_file(&graph, Some(&pd.action));
    f.alcove_addresses = Some(win.alcoves.iter().map(|a| a.address.clone()).collect());
    f.orbit_map = Some(pd.quotient.orbit_map.clone());
    f.base_alcove = Some(Id(win.alcoves[win.base].name()));
    Ok(f)
}

/// Quotient of a graph file by its action, with the orbit map.
pub fn graph_quotient(text: &str) -> Result<GraphFile, CliError> {
    let loaded = load_graph(text)?;
    let q = loaded.graph.quotient_by_action(&loaded.action)?;
    let mut f = graph_file(&q.quotient, None);
    f.orbit_map = Some(q.orbit_map);
    Ok(f)
}

/// `(x, w, P_{x,w})` for all `x ≤ w`, or for one `w`.
pub fn kl_table(type_name: &str, w: Option<&str>) -> Result<KlTableFile, CliError> {
    let name = type_name.trim().trim_end_matches("-bruhat").to_ascii_uppercase();
    let table = KlTable::new(Coxeter::new(&name)?);
    let g = table.group();
    let ws: Vec<usize> = match w {
        Some(s) => vec![g.parse(s)?],
        None => (0..g.len()).collect(),
    };
    let mut entries = Vec::new();
    for w in ws {
        for (x, p) in table.column(w) {
            let poly = p.coeffs().iter().enumerate().filter(|(_, &c)| c != 0).map(|(e, &c)| (e as i64, c as u64)).collect();
            entries.push(KlEntry { x: g.name(x).to_string(), w: g.name(w).to_string(), poly });
        }
    }
    Ok(KlTableFile { cartan_type: name, entries })
}

/// Differences between a rank table and the KL column of its `w`.
pub fn compare(result: &SheafResult, kl: &KlTableFile) -> Vec<String> {
    let expected: BTreeMap<&str, &BTreeMap<i64, u64>> =
        kl.entries.iter().filter(|e| e.w == result.w).map(|e| (e.x.as_str(), &e.poly)).collect();
    if expected.is_empty() {
        return vec![format!("no KL entries for w = {}", result.w)];
    }
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for s in &result.stalks {
        seen.push(s.x.as_str());
        let want = expected.get(s.x.as_str()).map(|p| (*p).clone()).unwrap_or_default();
        if want != s.rank_poly {
            out.push(format!(
                "{}: sheaf {} vs KL {}",
                s.x,
                crate::formats::poly_string(&s.rank_poly),
                crate::formats::poly_string(&want)
            ));
        }
    }
    for (x, p) in &expected {
        if !seen.contains(x) && !p.is_empty() {
            out.push(format!("{}: missing from the rank table, KL {}", x, crate::formats::poly_string(p)));
        }
    }
    out
}
