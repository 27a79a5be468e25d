//! JSON and CSV artifacts: moment graph files, alcove windows, sheaf
//! results and KL tables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};
use sheafbm_core::graph::{Edge, GroupAction, Label, MomentGraph, Violation};
use sheafbm_core::order::Poset;

/// A vertex id, given in files either as a string or as an integer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Id(pub String);

impl<'de> Deserialize<'de> for Id {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Str(s) => Id(s),
            Raw::Int(i) => Id(i.to_string()),
        })
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: Id,
    pub v: Id,
    pub label: Vec<i64>,
}

/// Moment graph file; the last three fields are only present on window
/// exports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub lattice_rank: usize,
    pub vertices: Vec<Id>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_covers: Option<Vec<[Id; 2]>>,
    /// Vertex index images per generator; `null` where the image leaves the
    /// window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_generators: Option<Vec<Vec<Option<usize>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alcove_addresses: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_alcove: Option<Id>,
}

/// One rejected invariant, with the 1-based line it was found on when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {}: {}: {}", l, self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadError {
    /// Malformed JSON or wrong field types.
    Syntax(String),
    /// Well-formed file describing an invalid moment graph.
    Invalid(Vec<Diagnostic>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Syntax(s) => write!(f, "{}", s),
            LoadError::Invalid(ds) => {
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{}", d)?;
                }
                Ok(())
            }
        }
    }
}

/// A loaded graph file with its vertex order and action.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub file: GraphFile,
    pub graph: MomentGraph,
    pub action: GroupAction,
}

/// 1-based line of the start of each element of the top-level array `key`.
fn element_lines(text: &str, key: &str) -> Vec<usize> {
    let pat = format!("\"{}\"", key);
    let Some(start) = text.find(&pat) else { return Vec::new() };
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut in_str = false;
    let mut escaped = false;
    let mut line = 1 + text[..start].matches('\n').count();
    let mut started = false;
    for c in text[start + pat.len()..].chars() {
        if c == '\n' {
            line += 1;
        }
        if in_str {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '[' | '{' => {
                depth += 1;
                if depth == 2 {
                    out.push(line);
                }
                started = true;
            }
            ']' | '}' => {
                depth -= 1;
                if started && depth == 0 {
                    break;
                }
            }
            _ => {}
        }
    }
    out
}

/// Parses and validates a graph file. Labels are normalized to canonical
/// sign on load.
pub fn load_graph(text: &str) -> Result<LoadedGraph, LoadError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| LoadError::Syntax(format!("line {}: {}", e.line(), e)))?;
    let lines = element_lines(text, "edges");
    let line_of = |k: usize| lines.get(k).copied();
    let mut diags = Vec::new();
    let mut index: BTreeMap<&Id, usize> = BTreeMap::new();
    for (i, v) in file.vertices.iter().enumerate() {
        if index.insert(v, i).is_some() {
            diags.push(Diagnostic { line: None, code: "DUPLICATE_VERTEX", message: format!("vertex {} listed twice", v) });
        }
    }
    if file.lattice_rank == 0 {
        diags.push(Diagnostic { line: None, code: "LATTICE_RANK", message: "lattice rank must be at least 1".into() });
    }
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (k, e) in file.edges.iter().enumerate() {
        let (Some(&u), Some(&v)) = (index.get(&e.u), index.get(&e.v)) else {
            diags.push(Diagnostic { line: line_of(k), code: "UNKNOWN_VERTEX", message: format!("edge {}-{}", e.u, e.v) });
            continue;
        };
        match Label::new(e.label.clone()) {
            Ok(label) => {
                edges.push(Edge { u, v, label });
                edge_lines.push(line_of(k));
            }
            Err(_) => diags.push(Diagnostic { line: line_of(k), code: "ZERO_LABEL", message: format!("edge {}-{}", e.u, e.v) }),
        }
    }
    let n = file.vertices.len();
    let mut order = None;
    if let Some(covers) = &file.order_covers {
        let mut rel = Vec::new();
        for [lo, hi] in covers {
            match (index.get(lo), index.get(hi)) {
                (Some(&a), Some(&b)) => rel.push((a, b)),
                _ => diags.push(Diagnostic { line: None, code: "UNKNOWN_VERTEX", message: format!("order cover {}-{}", lo, hi) }),
            }
        }
        match Poset::from_relations(n, &rel) {
            Ok(p) => order = Some(p),
            Err(e) => diags.push(Diagnostic { line: None, code: "ORDER_CYCLE", message: e.to_string() }),
        }
    }
    let mut action = GroupAction::trivial();
    if let Some(gens) = &file.action_generators {
        for (g, perm) in gens.iter().enumerate() {
            if perm.len() != n || perm.iter().flatten().any(|&y| y >= n) {
                diags.push(Diagnostic { line: None, code: "BAD_GENERATOR", message: format!("generator {} is not a map on the vertices", g) });
            }
        }
        action.generators = gens.clone();
    }
    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    let names: Vec<String> = file.vertices.iter().map(|v| v.0.clone()).collect();
    let graph = MomentGraph::new(file.lattice_rank, names, edges, order);
    let violations = graph.validate();
    if !violations.is_empty() {
        let diags = violations.iter().map(|v| locate(&graph, &edge_lines, v)).collect();
        return Err(LoadError::Invalid(diags));
    }
    if let Err(e) = graph.check_action(&action) {
        return Err(LoadError::Invalid(vec![Diagnostic { line: None, code: "NOT_AUTOMORPHISM", message: e.to_string() }]));
    }
    Ok(LoadedGraph { file, graph, action })
}

fn locate(graph: &MomentGraph, lines: &[Option<usize>], v: &Violation) -> Diagnostic {
    let pair = |a: &str, b: &str, e: &Edge| {
        let (x, y) = (graph.name(e.u), graph.name(e.v));
        (x == a && y == b) || (x == b && y == a)
    };
    let edges = graph.edges();
    let (code, k) = match v {
        Violation::Loop { vertex } => ("LOOP", edges.iter().position(|e| pair(vertex, vertex, e))),
        Violation::DoubleEdge { u, v } => ("DOUBLE_EDGE", edges.iter().rposition(|e| pair(u, v, e))),
        Violation::LabelRank { u, v, .. } => ("LABEL_RANK", edges.iter().position(|e| pair(u, v, e) && e.label.rank() != graph.rank())),
        Violation::Incomparable { u, v } => ("INCOMPARABLE", edges.iter().position(|e| pair(u, v, e))),
    };
    Diagnostic { line: k.and_then(|k| lines[k]), code, message: v.to_string() }
}

/// Graph file for a moment graph, with covers when it carries an order.
pub fn graph_file(graph: &MomentGraph, action: Option<&GroupAction>) -> GraphFile {
    let names = graph.names();
    GraphFile {
        lattice_rank: graph.rank(),
        vertices: names.iter().map(|n| Id(n.clone())).collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeRecord { u: Id(names[e.u].clone()), v: Id(names[e.v].clone()), label: e.label.coords().to_vec() })
            .collect(),
        order_covers: graph.order().map(|p| p.covers().into_iter().map(|(lo, hi)| [Id(names[lo].clone()), Id(names[hi].clone())]).collect()),
        action_generators: action.filter(|a| !a.generators.is_empty()).map(|a| a.generators.clone()),
        alcove_addresses: None,
        orbit_map: None,
        base_alcove: None,
    }
}

/// Rank polynomial as exponent to coefficient.
pub type PolyRecord = BTreeMap<i64, u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub characteristic: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StalkRecord {
    pub x: String,
    pub orbit: String,
    pub rank_poly: PolyRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDims {
    pub x: String,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeModuleRecord {
    pub u: String,
    pub v: String,
    pub label: Vec<i64>,
    pub points: Vec<PointDims>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub level: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

/// Result of one construction of `ℬ(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafResult {
    pub source: String,
    pub w: String,
    pub cutoff: i64,
    pub field: FieldRecord,
    pub stalks: Vec<StalkRecord>,
    pub edge_modules: Vec<EdgeModuleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlEntry {
    pub x: String,
    pub w: String,
    pub poly: PolyRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlTableFile {
    #[serde(rename = "type")]
    pub cartan_type: String,
    pub entries: Vec<KlEntry>,
}

/// Renders `Σ c_j q^j` as `1 + q`, `0` for the empty record.
pub fn poly_string(p: &PolyRecord) -> String {
    sheafbm_core::graded::RankPolynomial::new(p.clone()).to_string()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifacts serialize");
    s.push('\n');
    s
}

/// Rank table as CSV with columns `x,orbit,rank_poly`.
pub fn rank_csv(result: &SheafResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "orbit", "rank_poly"]).expect("in-memory write");
    for s in &result.stalks {
        w.write_record([s.x.as_str(), s.orbit.as_str(), &poly_string(&s.rank_poly)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

/// KL table as CSV with columns `x,w,poly`.
pub fn kl_csv(table: &KlTableFile) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "w", "poly"]).expect("in-memory write");
    for e in &table.entries {
        w.write_record([e.x.as_str(), e.w.as_str(), &poly_string(&e.poly)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"{
  "lattice_rank": 2,
  "vertices": ["a", "b", 3],
  "edges": [
    {"u": "a", "v": "b", "label": [-1, 0]},
    {"u": "b", "v": 3, "label": [0, 1]},
    {"u": "a", "v": 3, "label": [1, 1]}
  ],
  "order_covers": [["a", "b"], ["b", 3]]
}"#;

    #[test]
    fn loads_and_normalizes() {
        let g = load_graph(TRIANGLE).unwrap();
        assert_eq!(g.graph.edges()[0].label.coords(), &[1, 0]);
        assert_eq!(g.graph.name(2), "3");
        assert!(g.graph.order().unwrap().lt(0, 2));
    }

    #[test]
    fn loop_is_reported_with_its_line() {
        let text = TRIANGLE.replace(r#"{"u": "b", "v": 3, "label": [0, 1]}"#, r#"{"u": "b", "v": "b", "label": [0, 1]}"#);
        let Err(LoadError::Invalid(d)) = load_graph(&text) else { panic!("loop accepted") };
        assert_eq!(d[0].code, "LOOP");
        assert_eq!(d[0].line, Some(6));
    }

    #[test]
    fn double_edge_is_reported() {
        let text = TRIANGLE.replace(r#""label": [1, 1]"#, r#""label": [1, 1]}, {"u": "b", "v": "a", "label": [1, -1]"#);
        let Err(LoadError::Invalid(d)) = load_graph(&text) else { panic!("double edge accepted") };
        assert!(d.iter().any(|d| d.code == "DOUBLE_EDGE"));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let Err(LoadError::Syntax(s)) = load_graph("{\n\"lattice_rank\": }") else { panic!("bad json accepted") };
        assert!(s.starts_with("line 2"));
    }

    #[test]
    fn graph_file_round_trip() {
        let g = load_graph(TRIANGLE).unwrap();
        let f = graph_file(&g.graph, None);
        let again = load_graph(&to_json(&f)).unwrap();
        assert_eq!(again.file, f);
        assert_eq!(again.graph.edges(), g.graph.edges());
    }
}
