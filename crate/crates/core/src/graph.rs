//! Finite directed multigraphs and the path/cycle analyses the classifiers
//! consume.
//!
//! Vertices and edges are addressed by dense indices ([`VertexId`],
//! [`EdgeId`]) assigned in declaration order; the original string
//! identifiers are kept for reporting.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

/// Default ceiling on the number of cycles [`enumerate_cycles`] will produce.
pub const DEFAULT_MAX_CYCLES: usize = 100_000;

/// Environment variable overriding [`DEFAULT_MAX_CYCLES`].
pub const MAX_CYCLES_ENV: &str = "LPA_GRADE_MAX_CYCLES";

/// The cycle cap in effect: `LPA_GRADE_MAX_CYCLES` if set to a positive
/// integer, else [`DEFAULT_MAX_CYCLES`].
pub fn max_cycles() -> usize {
    std::env::var(MAX_CYCLES_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_CYCLES)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed statement: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate vertex identifier `{id}`")]
    DuplicateVertex { line: usize, id: String },
    #[error("line {line}: duplicate edge identifier `{id}`")]
    DuplicateEdge { line: usize, id: String },
    #[error("line {line}: edge endpoint `{id}` is not a declared vertex")]
    UndeclaredVertex { line: usize, id: String },
    #[error("empty vertex set")]
    EmptyVertexSet,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("edge list is not a cycle of this graph: {0}")]
    NotACycle(String),
    #[error("graph is not no-exit: {0}")]
    NotNoExit(String),
    #[error("vertex `{0}` does not lie on the given cycle")]
    TargetNotOnCycle(String),
    #[error("vertex `{0}` is not a sink; a forbidden cycle is required")]
    TargetNotSink(String),
    #[error("cycle enumeration exceeded the cap of {cap} cycles")]
    CycleLimit { cap: usize },
    #[error("path multiplicity overflowed 64 bits")]
    CountOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub source: VertexId,
    pub target: VertexId,
}

/// An immutable finite directed multigraph.
#[derive(Debug, Clone)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    index: HashMap<String, VertexId>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Reject edges whose endpoints are never declared with `vertex`.
    pub strict: bool,
}

fn valid_identifier(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c.is_whitespace() || c == ':' || c == '>')
}

enum Statement<'a> {
    Vertex(&'a str),
    Edge(&'a str, &'a str, &'a str),
}

fn parse_statement(line_no: usize, line: &str) -> Result<Option<Statement<'_>>, GraphError> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let malformed = |message: &str| GraphError::Malformed { line: line_no, message: message.to_string() };
    let (keyword, rest) = match line.find(char::is_whitespace) {
        Some(pos) => (&line[..pos], line[pos..].trim()),
        None => (line, ""),
    };
    match keyword {
        "vertex" => {
            if rest.is_empty() || rest.contains(char::is_whitespace) {
                return Err(malformed("expected `vertex <id>`"));
            }
            if !valid_identifier(rest) {
                return Err(malformed("invalid vertex identifier"));
            }
            Ok(Some(Statement::Vertex(rest)))
        }
        "edge" => {
            let colon = rest.find(':').ok_or_else(|| malformed("expected `edge <id>: <src> -> <dst>`"))?;
            let id = rest[..colon].trim();
            let ends = &rest[colon + 1..];
            let arrow = ends.find("->").ok_or_else(|| malformed("missing `->`"))?;
            let src = ends[..arrow].trim();
            let dst = ends[arrow + 2..].trim();
            for (what, ident) in [("edge", id), ("source", src), ("target", dst)] {
                if !valid_identifier(ident) {
                    return Err(malformed(&format!("invalid {what} identifier `{ident}`")));
                }
            }
            Ok(Some(Statement::Edge(id, src, dst)))
        }
        _ => Err(malformed(&format!("unknown keyword `{keyword}`"))),
    }
}

/// Parses the line-oriented graph format with default (non-strict) options.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    parse_graph_with(text, ParseOptions::default())
}

pub fn parse_graph_with(text: &str, options: ParseOptions) -> Result<Graph, GraphError> {
    let mut statements = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(stmt) = parse_statement(i + 1, line)? {
            statements.push((i + 1, stmt));
        }
    }

    let declared: HashSet<&str> = statements
        .iter()
        .filter_map(|(_, s)| match s {
            Statement::Vertex(v) => Some(*v),
            _ => None,
        })
        .collect();

    let mut builder = GraphBuilder::default();
    let mut explicit: HashSet<&str> = HashSet::new();
    for (line, stmt) in statements {
        match stmt {
            Statement::Vertex(v) => {
                if !explicit.insert(v) {
                    return Err(GraphError::DuplicateVertex { line, id: v.to_string() });
                }
                builder.vertex(v);
            }
            Statement::Edge(id, src, dst) => {
                if options.strict {
                    for end in [src, dst] {
                        if !declared.contains(end) {
                            return Err(GraphError::UndeclaredVertex { line, id: end.to_string() });
                        }
                    }
                }
                if !builder.edge(id, src, dst) {
                    return Err(GraphError::DuplicateEdge { line, id: id.to_string() });
                }
            }
        }
    }
    builder.build()
}

#[derive(Default)]
struct GraphBuilder {
    vertices: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    edge_ids: HashSet<String>,
}

impl GraphBuilder {
    fn vertex(&mut self, name: &str) -> VertexId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = VertexId(self.vertices.len());
        self.vertices.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    fn edge(&mut self, id: &str, src: &str, dst: &str) -> bool {
        if !self.edge_ids.insert(id.to_string()) {
            return false;
        }
        let source = self.vertex(src);
        let target = self.vertex(dst);
        self.edges.push(Edge { id: id.to_string(), source, target });
        true
    }

    fn build(self) -> Result<Graph, GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        let n = self.vertices.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out_edges[e.source.0].push(EdgeId(i));
            in_edges[e.target.0].push(EdgeId(i));
        }
        Ok(Graph { vertices: self.vertices, edges: self.edges, index: self.index, out_edges, in_edges })
    }
}

impl Graph {
    /// Builds a graph from explicit vertex names and `(edge, source, target)`
    /// triples. Every endpoint must be listed among `vertices`.
    pub fn from_parts<V, E, S>(vertices: V, edges: E) -> Result<Graph, GraphError>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut builder = GraphBuilder::default();
        for v in vertices {
            let v = v.as_ref();
            if builder.index.contains_key(v) {
                return Err(GraphError::DuplicateVertex { line: 0, id: v.to_string() });
            }
            builder.vertex(v);
        }
        for (id, src, dst) in edges {
            for end in [src.as_ref(), dst.as_ref()] {
                if !builder.index.contains_key(end) {
                    return Err(GraphError::UndeclaredVertex { line: 0, id: end.to_string() });
                }
            }
            if !builder.edge(id.as_ref(), src.as_ref(), dst.as_ref()) {
                return Err(GraphError::DuplicateEdge { line: 0, id: id.as_ref().to_string() });
            }
        }
        builder.build()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.id == name).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges[v.0].len()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out_edges[v.0].is_empty()
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.0 < self.vertices.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(format!("#{}", v.0)))
        }
    }

    /// Serializes back to the text format. Parsing the result yields an
    /// identical graph.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            s.push_str("vertex ");
            s.push_str(v);
            s.push('\n');
        }
        for e in &self.edges {
            s.push_str(&format!("edge {}: {} -> {}\n", e.id, self.vertex_name(e.source), self.vertex_name(e.target)));
        }
        s
    }
}

/// A cycle in canonical rotation: the first edge leaves the
/// lexicographically smallest vertex on the cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cycle {
    #[serde(skip)]
    edges: Vec<EdgeId>,
    #[serde(skip)]
    base: VertexId,
    #[serde(rename = "base")]
    base_name: String,
    #[serde(rename = "edges")]
    edge_names: Vec<String>,
    length: usize,
}

impl Cycle {
    /// Validates `edges` as a cycle of `g` and rotates it into canonical form.
    pub fn new(g: &Graph, edges: &[EdgeId]) -> Result<Cycle, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::NotACycle("empty edge list".into()));
        }
        if let Some(bad) = edges.iter().find(|e| e.0 >= g.edge_count()) {
            return Err(GraphError::NotACycle(format!("unknown edge #{}", bad.0)));
        }
        let m = edges.len();
        let mut sources = HashSet::new();
        for i in 0..m {
            let cur = g.edge(edges[i]);
            let next = g.edge(edges[(i + 1) % m]);
            if cur.target != next.source {
                return Err(GraphError::NotACycle(format!("edges `{}` and `{}` do not compose", cur.id, next.id)));
            }
            if !sources.insert(cur.source) {
                return Err(GraphError::NotACycle(format!(
                    "vertex `{}` is the source of two edges",
                    g.vertex_name(cur.source)
                )));
            }
        }
        let start = (0..m)
            .min_by(|&a, &b| g.vertex_name(g.edge(edges[a]).source).cmp(g.vertex_name(g.edge(edges[b]).source)))
            .unwrap_or(0);
        let rotated: Vec<EdgeId> = edges[start..].iter().chain(&edges[..start]).copied().collect();
        let base = g.edge(rotated[0]).source;
        Ok(Cycle {
            base,
            base_name: g.vertex_name(base).to_string(),
            edge_names: rotated.iter().map(|&e| g.edge(e).id.clone()).collect(),
            length: m,
            edges: rotated,
        })
    }

    /// Looks up a cycle by edge identifiers.
    pub fn from_names(g: &Graph, names: &[&str]) -> Result<Cycle, GraphError> {
        let ids = names
            .iter()
            .map(|n| g.edge_by_name(n).ok_or_else(|| GraphError::NotACycle(format!("unknown edge `{n}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Cycle::new(g, &ids)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn base_name(&self) -> &str {
        &self.base_name
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vertices in traversal order starting at the base.
    pub fn vertices(&self, g: &Graph) -> Vec<VertexId> {
        self.edges.iter().map(|&e| g.edge(e).source).collect()
    }

    /// Number of cycle edges from `from` forward to `to`, both on the cycle.
    pub fn distance(&self, g: &Graph, from: VertexId, to: VertexId) -> Option<usize> {
        let verts = self.vertices(g);
        let i = verts.iter().position(|&v| v == from)?;
        let j = verts.iter().position(|&v| v == to)?;
        Some((j + self.length - i) % self.length)
    }

    fn sort_key(&self) -> (&str, usize, &[String]) {
        (&self.base_name, self.length, &self.edge_names)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.edge_names.join(","), self.base_name)
    }
}

/// Multiset of path lengths, `length -> multiplicity`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LengthMultiset {
    counts: BTreeMap<u64, u64>,
}

impl LengthMultiset {
    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut ms = LengthMultiset::default();
        for (len, c) in counts {
            if c > 0 {
                *ms.counts.entry(len).or_insert(0) += c;
            }
        }
        ms
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Multiplicities of lengths reduced modulo `m`, indexed by residue.
    pub fn residue_counts(&self, m: usize) -> Vec<u64> {
        let mut out = vec![0u64; m];
        for (&len, &c) in &self.counts {
            out[(len % m as u64) as usize] += c;
        }
        out
    }

    fn add_shifted(&mut self, other: &LengthMultiset, by: u64) -> Result<(), GraphError> {
        for (&len, &c) in &other.counts {
            let slot = self.counts.entry(len + by).or_insert(0);
            *slot = slot.checked_add(c).ok_or(GraphError::CountOverflow)?;
        }
        Ok(())
    }
}

pub fn sinks(g: &Graph) -> Vec<VertexId> {
    g.vertex_ids().filter(|&v| g.is_sink(v)).collect()
}

/// Strongly connected component index for each vertex (Tarjan).
fn strongly_connected_components(g: &Graph) -> Vec<usize> {
    struct State<'a> {
        g: &'a Graph,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comp: Vec<usize>,
        ncomp: usize,
    }
    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &e in s.g.out_edges(VertexId(v)) {
            let w = s.g.edge(e).target.0;
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                s.comp[w] = s.ncomp;
                if w == v {
                    break;
                }
            }
            s.ncomp += 1;
        }
    }
    let n = g.vertex_count();
    let mut s = State {
        g,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comp: vec![0; n],
        ncomp: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.comp
}

/// `true` for every vertex lying on at least one cycle.
pub fn vertices_on_cycles(g: &Graph) -> Vec<bool> {
    let comp = strongly_connected_components(g);
    let mut size = HashMap::new();
    for &c in &comp {
        *size.entry(c).or_insert(0usize) += 1;
    }
    g.vertex_ids().map(|v| size[&comp[v.0]] > 1 || g.out_edges(v).iter().any(|&e| g.edge(e).target == v)).collect()
}

/// All cycles of `g`, canonically rotated and sorted, capped at
/// [`max_cycles`].
pub fn enumerate_cycles(g: &Graph) -> Result<Vec<Cycle>, GraphError> {
    enumerate_cycles_capped(g, max_cycles())
}

/// Johnson's elementary-circuit enumeration on the underlying simple digraph,
/// expanded over parallel edges.
pub fn enumerate_cycles_capped(g: &Graph, cap: usize) -> Result<Vec<Cycle>, GraphError> {
    let n = g.vertex_count();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut parallel: HashMap<(usize, usize), Vec<EdgeId>> = HashMap::new();
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let key = (edge.source.0, edge.target.0);
        let slot = parallel.entry(key).or_default();
        if slot.is_empty() {
            succ[key.0].push(key.1);
        }
        slot.push(e);
    }

    struct Search<'a> {
        succ: &'a [Vec<usize>],
        parallel: &'a HashMap<(usize, usize), Vec<EdgeId>>,
        blocked: Vec<bool>,
        blocked_by: Vec<BTreeSet<usize>>,
        stack: Vec<usize>,
        expanded: Vec<Vec<EdgeId>>,
        cap: usize,
    }

    impl Search<'_> {
        fn unblock(&mut self, v: usize) {
            self.blocked[v] = false;
            let waiting = std::mem::take(&mut self.blocked_by[v]);
            for w in waiting {
                if self.blocked[w] {
                    self.unblock(w);
                }
            }
        }

        fn emit(&mut self) -> Result<(), GraphError> {
            let k = self.stack.len();
            let choices: Vec<&Vec<EdgeId>> =
                (0..k).map(|i| &self.parallel[&(self.stack[i], self.stack[(i + 1) % k])]).collect();
            let mut combos: Vec<Vec<EdgeId>> = vec![Vec::with_capacity(k)];
            for options in choices {
                let mut next = Vec::with_capacity(combos.len() * options.len());
                for prefix in &combos {
                    for &e in options {
                        let mut p = prefix.clone();
                        p.push(e);
                        next.push(p);
                    }
                }
                if self.expanded.len() + next.len() > self.cap {
                    return Err(GraphError::CycleLimit { cap: self.cap });
                }
                combos = next;
            }
            self.expanded.extend(combos);
            Ok(())
        }

        fn circuit(&mut self, v: usize, start: usize) -> Result<bool, GraphError> {
            let mut found = false;
            self.stack.push(v);
            self.blocked[v] = true;
            for i in 0..self.succ[v].len() {
                let w = self.succ[v][i];
                if w < start {
                    continue;
                }
                if w == start {
                    self.emit()?;
                    found = true;
                } else if !self.blocked[w] && self.circuit(w, start)? {
                    found = true;
                }
            }
            if found {
                self.unblock(v);
            } else {
                for i in 0..self.succ[v].len() {
                    let w = self.succ[v][i];
                    if w >= start {
                        self.blocked_by[w].insert(v);
                    }
                }
            }
            self.stack.pop();
            Ok(found)
        }
    }

    let mut search = Search {
        succ: &succ,
        parallel: &parallel,
        blocked: vec![false; n],
        blocked_by: vec![BTreeSet::new(); n],
        stack: Vec::new(),
        expanded: Vec::new(),
        cap,
    };
    for start in 0..n {
        for v in start..n {
            search.blocked[v] = false;
            search.blocked_by[v].clear();
        }
        search.circuit(start, start)?;
    }

    let mut cycles = search.expanded.iter().map(|edges| Cycle::new(g, edges)).collect::<Result<Vec<_>, _>>()?;
    cycles.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    cycles.dedup();
    Ok(cycles)
}

/// Whether some vertex of `c` emits an edge outside `c`.
pub fn cycle_has_exit(g: &Graph, c: &Cycle) -> Result<bool, GraphError> {
    let checked = Cycle::new(g, c.edges())?;
    let members: HashSet<EdgeId> = checked.edges().iter().copied().collect();
    Ok(checked.vertices(g).into_iter().any(|v| g.out_edges(v).iter().any(|e| !members.contains(e))))
}

/// A cycle has an exit exactly when one of its vertices emits two or more
/// edges, so no-exit reduces to an out-degree test on cycle vertices.
pub fn is_no_exit(g: &Graph) -> bool {
    let on_cycle = vertices_on_cycles(g);
    g.vertex_ids().all(|v| !on_cycle[v.0] || g.out_degree(v) == 1)
}

/// A cycle with an exit, through the smallest-named branching cycle vertex.
pub fn find_cycle_with_exit(g: &Graph) -> Option<Cycle> {
    let on_cycle = vertices_on_cycles(g);
    let v = g
        .vertex_ids()
        .filter(|&v| on_cycle[v.0] && g.out_degree(v) > 1)
        .min_by(|&a, &b| g.vertex_name(a).cmp(g.vertex_name(b)))?;
    shortest_cycle_through(g, v)
}

/// Shortest closed walk through `v`, which is necessarily a cycle.
pub fn shortest_cycle_through(g: &Graph, v: VertexId) -> Option<Cycle> {
    let mut parent: Vec<Option<EdgeId>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &e in g.out_edges(v) {
        let w = g.edge(e).target;
        if w == v {
            return Cycle::new(g, &[e]).ok();
        }
        if !seen[w.0] {
            seen[w.0] = true;
            parent[w.0] = Some(e);
            queue.push_back(w);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &e in g.out_edges(u) {
            let w = g.edge(e).target;
            if w == v {
                let mut path = vec![e];
                let mut cur = u;
                while let Some(pe) = parent[cur.0] {
                    path.push(pe);
                    cur = g.edge(pe).source;
                    if cur == v {
                        break;
                    }
                }
                path.reverse();
                return Cycle::new(g, &path).ok();
            }
            if !seen[w.0] && w != v {
                seen[w.0] = true;
                parent[w.0] = Some(e);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Forward-reachable closure of `start`, including `start`.
pub fn reachable_from(g: &Graph, start: &[VertexId]) -> Result<BTreeSet<VertexId>, GraphError> {
    for &v in start {
        g.check_vertex(v)?;
    }
    let mut seen: BTreeSet<VertexId> = start.iter().copied().collect();
    let mut queue: VecDeque<VertexId> = start.iter().copied().collect();
    while let Some(u) = queue.pop_front() {
        for &e in g.out_edges(u) {
            let w = g.edge(e).target;
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    Ok(seen)
}

fn adjacency_matrix(g: &Graph) -> Vec<Vec<BigUint>> {
    let n = g.vertex_count();
    let mut a = vec![vec![BigUint::zero(); n]; n];
    for e in g.edges() {
        a[e.source.0][e.target.0] += 1u32;
    }
    a
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut c = vec![vec![BigUint::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    c
}

/// Number of paths of exactly `length` edges ending at `target`, by
/// repeated squaring of the adjacency matrix.
pub fn count_paths_of_length(g: &Graph, target: VertexId, length: u64) -> Result<BigUint, GraphError> {
    g.check_vertex(target)?;
    let n = g.vertex_count();
    let mut result: Vec<Vec<BigUint>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect()).collect();
    let mut base = adjacency_matrix(g);
    let mut exp = length;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        exp >>= 1;
        if exp > 0 {
            base = mat_mul(&base, &base);
        }
    }
    Ok(result.iter().map(|row| &row[target.0]).sum())
}

/// `table[len][v]` = number of paths of length `len` ending at `v`, for all
/// `len <= max_len`. Agrees entrywise with [`count_paths_of_length`].
pub fn path_count_table(g: &Graph, max_len: usize) -> Vec<Vec<BigUint>> {
    let n = g.vertex_count();
    let mut table = Vec::with_capacity(max_len + 1);
    table.push(vec![BigUint::one(); n]);
    for len in 0..max_len {
        let prev: &Vec<BigUint> = &table[len];
        let mut next = vec![BigUint::zero(); n];
        for e in g.edges() {
            next[e.target.0] += &prev[e.source.0];
        }
        table.push(next);
    }
    table
}

/// Lengths of all paths ending at `target` that do not contain
/// `forbidden_cycle`, where containing the cycle means running through `m`
/// consecutive cycle edges. Without a forbidden cycle the target must be a
/// sink.
///
/// Works backwards from the target. Once a path enters the cycle it cannot
/// leave it (no exits), so every path is an acyclic approach followed by a
/// cycle segment shorter than `m`. Revisiting a vertex on the current
/// backward path, or stepping backwards from an off-cycle vertex onto the
/// cycle, means the graph is not no-exit and is reported as an error.
pub fn paths_into(g: &Graph, target: VertexId, forbidden_cycle: Option<&Cycle>) -> Result<LengthMultiset, GraphError> {
    g.check_vertex(target)?;

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }

    struct Approach<'a> {
        g: &'a Graph,
        on_cycle: Vec<bool>,
        mark: Vec<Mark>,
        memo: Vec<Option<LengthMultiset>>,
    }

    impl Approach<'_> {
        // Paths ending at an off-cycle vertex `w`.
        fn paths(&mut self, w: VertexId) -> Result<LengthMultiset, GraphError> {
            match self.mark[w.0] {
                Mark::Done => return Ok(self.memo[w.0].clone().unwrap_or_default()),
                Mark::Active => {
                    return Err(GraphError::NotNoExit(format!(
                        "a cycle through `{}` reaches the target",
                        self.g.vertex_name(w)
                    )))
                }
                Mark::Fresh => {}
            }
            self.mark[w.0] = Mark::Active;
            let mut acc = LengthMultiset::from_counts([(0, 1)]);
            for &e in self.g.in_edges(w) {
                let s = self.g.edge(e).source;
                if self.on_cycle[s.0] {
                    return Err(GraphError::NotNoExit(format!(
                        "cycle vertex `{}` emits edge `{}` off the cycle",
                        self.g.vertex_name(s),
                        self.g.edge(e).id
                    )));
                }
                let sub = self.paths(s)?;
                acc.add_shifted(&sub, 1)?;
            }
            self.mark[w.0] = Mark::Done;
            self.memo[w.0] = Some(acc.clone());
            Ok(acc)
        }
    }

    let n = g.vertex_count();
    let mut search = Approach { g, on_cycle: vec![false; n], mark: vec![Mark::Fresh; n], memo: vec![None; n] };

    match forbidden_cycle {
        None => {
            if !g.is_sink(target) {
                return Err(GraphError::TargetNotSink(g.vertex_name(target).to_string()));
            }
            search.paths(target)
        }
        Some(c) => {
            let c = Cycle::new(g, c.edges())?;
            let verts = c.vertices(g);
            if !verts.contains(&target) {
                return Err(GraphError::TargetNotOnCycle(g.vertex_name(target).to_string()));
            }
            for &v in &verts {
                search.on_cycle[v.0] = true;
            }
            let members: HashSet<EdgeId> = c.edges().iter().copied().collect();
            let mut result = LengthMultiset::default();
            for &u in &verts {
                let d = c.distance(g, u, target).unwrap_or(0) as u64;
                let mut entering = LengthMultiset::from_counts([(0, 1)]);
                for &e in g.in_edges(u) {
                    if members.contains(&e) {
                        continue;
                    }
                    let s = g.edge(e).source;
                    if search.on_cycle[s.0] {
                        return Err(GraphError::NotNoExit(format!(
                            "cycle vertex `{}` emits edge `{}` off the cycle",
                            g.vertex_name(s),
                            g.edge(e).id
                        )));
                    }
                    let sub = search.paths(s)?;
                    entering.add_shifted(&sub, 1)?;
                }
                result.add_shifted(&entering, d)?;
            }
            Ok(result)
        }
    }
}

/// Outcome of the bounded Condition (Y) search. `Unknown` is not a refutation:
/// a longer prefix of the witness might still succeed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionY {
    Verified { depth: usize },
    Unknown { walk: Vec<String>, k: usize },
}

/// Checks that for every walk of length `depth` that extends to an infinite
/// path and every `1 <= k <= k_max`, some prefix `q` admits a path `r`
/// ending where `q` ends with `|r| = |q| + k`.
///
/// Only the terminal vertex and length of a prefix matter, so the search
/// tracks, layer by layer, the vertices reachable by walks all of whose
/// prefixes fail.
pub fn condition_y_bounded(g: &Graph, k_max: usize, depth: usize) -> ConditionY {
    let table = path_count_table(g, depth + k_max);
    let has_path = |len: usize, v: VertexId| !table[len][v.0].is_zero();

    let on_cycle = vertices_on_cycles(g);
    let cycle_starts: Vec<VertexId> = g.vertex_ids().filter(|v| on_cycle[v.0]).collect();
    // A walk extends to an infinite path iff its end reaches a cycle.
    let mut extendable = vec![false; g.vertex_count()];
    {
        let mut queue: VecDeque<VertexId> = cycle_starts.into_iter().collect();
        for v in &queue {
            extendable[v.0] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &e in g.in_edges(u) {
                let s = g.edge(e).source;
                if !extendable[s.0] {
                    extendable[s.0] = true;
                    queue.push_back(s);
                }
            }
        }
    }

    for k in 1..=k_max {
        // layer[v] = Some(parent edge) for vertices ending an all-failing walk.
        let mut layers: Vec<Vec<Option<Option<EdgeId>>>> = Vec::with_capacity(depth + 1);
        layers.push(g.vertex_ids().map(|v| if has_path(k, v) { None } else { Some(None) }).collect());
        for j in 0..depth {
            let mut next: Vec<Option<Option<EdgeId>>> = vec![None; g.vertex_count()];
            for v in g.vertex_ids() {
                if layers[j][v.0].is_none() {
                    continue;
                }
                for &e in g.out_edges(v) {
                    let w = g.edge(e).target;
                    if next[w.0].is_none() && !has_path(j + 1 + k, w) {
                        next[w.0] = Some(Some(e));
                    }
                }
            }
            layers.push(next);
        }
        if let Some(end) = g.vertex_ids().find(|v| layers[depth][v.0].is_some() && extendable[v.0]) {
            let mut walk = Vec::with_capacity(depth);
            let mut cur = end;
            for j in (1..=depth).rev() {
                let e = layers[j][cur.0].flatten().expect("parent edge recorded for every nonzero layer");
                walk.push(g.edge(e).id.clone());
                cur = g.edge(e).source;
            }
            walk.reverse();
            return ConditionY::Unknown { walk, k };
        }
    }
    ConditionY::Verified { depth }
}
