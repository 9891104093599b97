//! The graph monoid of a finite graph graded by path length, as a rewriting
//! system on the free commutative monoid over `(vertex, degree)` pairs.
//!
//! The only rule is A1: a regular term `v@d` rewrites to
//! `sum_{s(e) = v} r(e)@(d+1)`. Two elements are equivalent iff they have a
//! common reduct, and `[a] <= [b]` iff some reduct of `a` sits pointwise below
//! some reduct of `b`.
//!
//! Searches use the horizon normal form `N_D`, which expands every regular
//! term of degree below `D`. Rewriting a term below `D` does not change
//! `N_D`, so any rewrite derivation whose expanded terms all lie below `D`
//! is subsumed by `N_D`: `a ~ b` iff `N_D(a) = N_D(b)` for some `D`, and
//! `[a] <= [b]` iff `N_D(a) <= N_D(b)` pointwise for some `D`. Both
//! conditions are monotone in `D`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{enumerate_cycles, reachable_from, sinks, vertices_on_cycles, Graph, GraphError, VertexId};

pub const DEFAULT_WIDTH_CAP: usize = 100_000;
pub const N_MAX_CAP: u64 = 10_000;
/// Multiple tried for strong order-units when the graph has sinks.
pub const FALLBACK_MULTIPLE_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("cannot parse monoid element: {0}")]
    Parse(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{0}` is a sink; A1 does not apply")]
    Sink(String),
    #[error("term {0} does not occur in the element")]
    Absent(String),
    #[error("the zero element is not allowed here")]
    ZeroElement,
    #[error("term multiplicity overflowed 64 bits")]
    Overflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Finite map `(vertex, degree) -> positive multiplicity`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoidElement {
    terms: BTreeMap<(VertexId, i64), u64>,
}

impl MonoidElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(v: VertexId, degree: i64, multiplicity: u64) -> Self {
        let mut e = Self::zero();
        e.add_term(v, degree, multiplicity);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<(VertexId, i64), u64> {
        &self.terms
    }

    pub fn multiplicity(&self, v: VertexId, degree: i64) -> u64 {
        self.terms.get(&(v, degree)).copied().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.terms.keys().map(|&(v, _)| v).collect()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(_, d)| d).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(_, d)| d).max()
    }

    pub fn add_term(&mut self, v: VertexId, degree: i64, multiplicity: u64) {
        if multiplicity > 0 {
            *self.terms.entry((v, degree)).or_insert(0) += multiplicity;
        }
    }

    fn checked_add_term(&mut self, v: VertexId, degree: i64, multiplicity: u64) -> Option<()> {
        if multiplicity > 0 {
            let slot = self.terms.entry((v, degree)).or_insert(0);
            *slot = slot.checked_add(multiplicity)?;
        }
        Some(())
    }

    fn remove_term(&mut self, v: VertexId, degree: i64, multiplicity: u64) -> bool {
        match self.terms.get_mut(&(v, degree)) {
            Some(c) if *c >= multiplicity => {
                *c -= multiplicity;
                if *c == 0 {
                    self.terms.remove(&(v, degree));
                }
                true
            }
            _ => false,
        }
    }

    pub fn plus(&self, other: &MonoidElement) -> MonoidElement {
        let mut out = self.clone();
        for (&(v, d), &c) in &other.terms {
            out.add_term(v, d, c);
        }
        out
    }

    /// `x^n a`: raises every degree by `n`.
    pub fn shift(&self, n: i64) -> MonoidElement {
        MonoidElement { terms: self.terms.iter().map(|(&(v, d), &c)| ((v, d + n), c)).collect() }
    }

    pub fn scale(&self, k: u64) -> Option<MonoidElement> {
        let mut terms = BTreeMap::new();
        for (&key, &c) in &self.terms {
            if k > 0 {
                terms.insert(key, c.checked_mul(k)?);
            }
        }
        Some(MonoidElement { terms })
    }

    pub fn le_pointwise(&self, other: &MonoidElement) -> bool {
        self.terms.iter().all(|(key, &c)| other.terms.get(key).is_some_and(|&o| o >= c))
    }

    /// Parses `k*vertex@degree` terms joined by `+`; `k*` may be omitted and
    /// `0` denotes the zero element.
    pub fn parse(g: &Graph, text: &str) -> Result<MonoidElement, MonoidError> {
        let text = text.trim();
        let mut out = MonoidElement::zero();
        if text == "0" {
            return Ok(out);
        }
        for raw in text.split('+') {
            let raw = raw.trim();
            let (coeff, rest) = match raw.split_once('*') {
                Some((k, rest)) => {
                    let k = k
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| MonoidError::Parse(format!("bad multiplicity in `{raw}`")))?;
                    (k, rest.trim())
                }
                None => (1, raw),
            };
            let (name, degree) =
                rest.rsplit_once('@').ok_or_else(|| MonoidError::Parse(format!("missing `@degree` in `{raw}`")))?;
            let degree =
                degree.trim().parse::<i64>().map_err(|_| MonoidError::Parse(format!("bad degree in `{raw}`")))?;
            let v = g.vertex(name.trim()).ok_or_else(|| MonoidError::UnknownVertex(name.trim().to_string()))?;
            out.add_term(v, degree, coeff);
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, g: &'a Graph) -> impl fmt::Display + 'a {
        struct Show<'a>(&'a MonoidElement, &'a Graph);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_zero() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = self
                    .0
                    .terms
                    .iter()
                    .map(|(&(v, d), &c)| {
                        let name = self.1.vertex_name(v);
                        if c == 1 {
                            format!("{name}@{d}")
                        } else {
                            format!("{c}*{name}@{d}")
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join("+"))
            }
        }
        Show(self, g)
    }

    fn to_terms(&self, g: &Graph) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(&(v, d), &c)| Term { vertex: g.vertex_name(v).to_string(), degree: d, multiplicity: c })
            .collect()
    }

    fn from_terms(g: &Graph, terms: &[Term]) -> Result<MonoidElement, MonoidError> {
        let mut out = MonoidElement::zero();
        for t in terms {
            let v = g.vertex(&t.vertex).ok_or_else(|| MonoidError::UnknownVertex(t.vertex.clone()))?;
            out.add_term(v, t.degree, t.multiplicity);
        }
        Ok(out)
    }
}

/// `1_E = sum_v v@0`.
pub fn one_e(g: &Graph) -> MonoidElement {
    let mut e = MonoidElement::zero();
    for v in g.vertex_ids() {
        e.add_term(v, 0, 1);
    }
    e
}

/// Replaces one occurrence of `v@d` by `sum_{s(e) = v} r(e)@(d+1)`.
pub fn apply_a1(g: &Graph, a: &MonoidElement, at: (VertexId, i64)) -> Result<MonoidElement, MonoidError> {
    apply_batch(g, a, at.0, at.1, 1)
}

fn apply_batch(g: &Graph, a: &MonoidElement, v: VertexId, d: i64, count: u64) -> Result<MonoidElement, MonoidError> {
    if v.0 >= g.vertex_count() {
        return Err(MonoidError::UnknownVertex(format!("#{}", v.0)));
    }
    if g.is_sink(v) {
        return Err(MonoidError::Sink(g.vertex_name(v).to_string()));
    }
    let mut out = a.clone();
    if !out.remove_term(v, d, count) {
        return Err(MonoidError::Absent(format!("{count}*{}@{d}", g.vertex_name(v))));
    }
    for &e in g.out_edges(v) {
        out.checked_add_term(g.edge(e).target, d + 1, count).ok_or(MonoidError::Overflow)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub elements: BTreeSet<MonoidElement>,
    pub truncated: bool,
}

/// Everything reachable from `a` by at most `depth` single A1 steps.
pub fn forward_closure(g: &Graph, a: &MonoidElement, depth: usize, width_cap: usize) -> Closure {
    let mut elements = BTreeSet::from([a.clone()]);
    let mut frontier = vec![a.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for &(v, d) in x.terms.keys() {
                if g.is_sink(v) {
                    continue;
                }
                let Ok(y) = apply_a1(g, x, (v, d)) else { continue };
                if elements.insert(y.clone()) {
                    if elements.len() > width_cap {
                        return Closure { elements, truncated: true };
                    }
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Closure { elements, truncated: false }
}

/// Search limits. `depth` is how far past the largest operand degree the
/// horizon may move; `n_max` bounds the period; `multiple_max` bounds the
/// multiple of `1_E` tried for strong order-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonoidBounds {
    pub depth: usize,
    pub width_cap: usize,
    pub n_max: u64,
    pub multiple_max: u64,
}

/// Depth `2|E0| + 2 * max cycle length`, width cap `10^5`, `n_max` the lcm of
/// cycle lengths capped at `10^4`, and the paper-style multiple bound for the
/// degree-0 generators when the graph has no sinks.
pub fn default_bounds(g: &Graph) -> Result<MonoidBounds, MonoidError> {
    let cycles = enumerate_cycles(g)?;
    let max_len = cycles.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut lcm: u64 = 1;
    for c in &cycles {
        lcm = lcm.lcm(&(c.len() as u64));
        if lcm > N_MAX_CAP {
            lcm = N_MAX_CAP;
            break;
        }
    }
    Ok(MonoidBounds {
        depth: 2 * g.vertex_count() + 2 * max_len,
        width_cap: DEFAULT_WIDTH_CAP,
        n_max: lcm,
        multiple_max: FALLBACK_MULTIPLE_CAP,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub vertex: String,
    pub degree: i64,
    pub multiplicity: u64,
}

/// `count` applications of A1 to `vertex@degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub vertex: String,
    pub degree: i64,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Equivalence,
    LessEq,
    Periodicity,
}

/// Replayable evidence: applying `steps_left` to `left` and `steps_right` to
/// `right` yields `left_reduct` and `right_reduct`, which are equal
/// (equivalence, periodicity) or pointwise ordered (less-or-equal).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RewriteCertificate {
    pub kind: CertificateKind,
    pub left: Vec<Term>,
    pub right: Vec<Term>,
    pub steps_left: Vec<Step>,
    pub steps_right: Vec<Step>,
    pub left_reduct: Vec<Term>,
    pub right_reduct: Vec<Term>,
    pub horizon: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiple: Option<u64>,
}

impl RewriteCertificate {
    pub fn common_reduct(&self) -> Option<&[Term]> {
        (self.left_reduct == self.right_reduct).then_some(&self.left_reduct[..])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleOutcome {
    Proved { certificate: RewriteCertificate },
    Unknown { truncated: bool, horizon: i64 },
}

impl OracleOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, OracleOutcome::Proved { .. })
    }

    pub fn certificate(&self) -> Option<&RewriteCertificate> {
        match self {
            OracleOutcome::Proved { certificate } => Some(certificate),
            OracleOutcome::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("{side} replay ended at a different element than recorded")]
    ReductMismatch { side: &'static str },
    #[error("closing condition fails for a {0:?} certificate")]
    Closing(CertificateKind),
    #[error("certificate operands do not match the claim")]
    Operands,
}

fn replay(g: &Graph, start: &MonoidElement, steps: &[Step]) -> Result<MonoidElement, MonoidError> {
    let mut cur = start.clone();
    for s in steps {
        let v = g.vertex(&s.vertex).ok_or_else(|| MonoidError::UnknownVertex(s.vertex.clone()))?;
        cur = apply_batch(g, &cur, v, s.degree, s.count)?;
    }
    Ok(cur)
}

/// Replays both sides step by step and checks the closing condition.
pub fn verify_certificate(g: &Graph, cert: &RewriteCertificate) -> Result<(), ReplayError> {
    let left = MonoidElement::from_terms(g, &cert.left)?;
    let right = MonoidElement::from_terms(g, &cert.right)?;
    let l = replay(g, &left, &cert.steps_left)?;
    let r = replay(g, &right, &cert.steps_right)?;
    if l != MonoidElement::from_terms(g, &cert.left_reduct)? {
        return Err(ReplayError::ReductMismatch { side: "left" });
    }
    if r != MonoidElement::from_terms(g, &cert.right_reduct)? {
        return Err(ReplayError::ReductMismatch { side: "right" });
    }
    let closes = match cert.kind {
        CertificateKind::Equivalence => l == r,
        CertificateKind::Periodicity => l == r && cert.period.is_some_and(|n| n > 0 && right == left.shift(n as i64)),
        CertificateKind::LessEq => l.le_pointwise(&r),
    };
    if closes {
        Ok(())
    } else {
        Err(ReplayError::Closing(cert.kind))
    }
}

/// Checks a certificate and that it is about the given operands.
pub fn verify_certificate_for(
    g: &Graph,
    cert: &RewriteCertificate,
    left: &MonoidElement,
    right: &MonoidElement,
) -> Result<(), ReplayError> {
    if MonoidElement::from_terms(g, &cert.left)? != *left || MonoidElement::from_terms(g, &cert.right)? != *right {
        return Err(ReplayError::Operands);
    }
    verify_certificate(g, cert)
}

/// Successive horizon normal forms `N_lo(a), N_lo+1(a), ...`, remembering the
/// batched steps that produced them.
struct Horizon<'g> {
    g: &'g Graph,
    current: MonoidElement,
    horizon: i64,
    steps: Vec<(VertexId, i64, u64)>,
    width_cap: usize,
    truncated: bool,
}

impl<'g> Horizon<'g> {
    /// Starts at `N_lo(a)`; requires `lo <= min_degree(a)`, so no work.
    fn new(g: &'g Graph, a: &MonoidElement, lo: i64, width_cap: usize) -> Self {
        debug_assert!(a.min_degree().is_none_or(|d| d >= lo));
        Horizon { g, current: a.clone(), horizon: lo, steps: Vec::new(), width_cap, truncated: false }
    }

    /// Moves from `N_D` to `N_{D+1}` by expanding the regular terms at
    /// degree `D`. Returns `false` once truncated.
    fn advance(&mut self) -> bool {
        if self.truncated {
            return false;
        }
        let d = self.horizon;
        let at_d: Vec<(VertexId, u64)> = self
            .current
            .terms
            .iter()
            .filter(|(&(v, deg), _)| deg == d && !self.g.is_sink(v))
            .map(|(&(v, _), &c)| (v, c))
            .collect();
        for (v, c) in at_d {
            self.current.remove_term(v, d, c);
            for &e in self.g.out_edges(v) {
                if self.current.checked_add_term(self.g.edge(e).target, d + 1, c).is_none() {
                    self.truncated = true;
                    return false;
                }
            }
            self.steps.push((v, d, c));
        }
        if self.current.terms.len() > self.width_cap {
            self.truncated = true;
            return false;
        }
        self.horizon += 1;
        true
    }

    fn steps_below(&self, horizon: i64, shift: i64, scale: u64) -> Option<Vec<Step>> {
        self.steps
            .iter()
            .filter(|&&(_, d, _)| d < horizon)
            .map(|&(v, d, c)| {
                Some(Step {
                    vertex: self.g.vertex_name(v).to_string(),
                    degree: d + shift,
                    count: c.checked_mul(scale)?,
                })
            })
            .collect()
    }
}

fn span(elements: &[&MonoidElement]) -> (i64, i64) {
    let lo = elements.iter().filter_map(|e| e.min_degree()).min().unwrap_or(0);
    let hi = elements.iter().filter_map(|e| e.max_degree()).max().unwrap_or(0);
    (lo, hi)
}

fn compare_bounded(
    g: &Graph,
    a: &MonoidElement,
    b: &MonoidElement,
    bounds: &MonoidBounds,
    kind: CertificateKind,
) -> OracleOutcome {
    let (lo, hi) = span(&[a, b]);
    let limit = hi + bounds.depth as i64;
    let mut ha = Horizon::new(g, a, lo, bounds.width_cap);
    let mut hb = Horizon::new(g, b, lo, bounds.width_cap);
    loop {
        let closes = match kind {
            CertificateKind::LessEq => ha.current.le_pointwise(&hb.current),
            _ => ha.current == hb.current,
        };
        if closes {
            let d = ha.horizon;
            let certificate = RewriteCertificate {
                kind,
                left: a.to_terms(g),
                right: b.to_terms(g),
                steps_left: ha.steps_below(d, 0, 1).expect("unscaled"),
                steps_right: hb.steps_below(d, 0, 1).expect("unscaled"),
                left_reduct: ha.current.to_terms(g),
                right_reduct: hb.current.to_terms(g),
                horizon: d,
                period: None,
                multiple: None,
            };
            return OracleOutcome::Proved { certificate };
        }
        if ha.horizon >= limit {
            return OracleOutcome::Unknown { truncated: false, horizon: ha.horizon };
        }
        if !ha.advance() || !hb.advance() {
            return OracleOutcome::Unknown { truncated: true, horizon: ha.horizon };
        }
    }
}

/// Semi-decides `a ~ b`.
pub fn equiv_bounded(g: &Graph, a: &MonoidElement, b: &MonoidElement, bounds: &MonoidBounds) -> OracleOutcome {
    compare_bounded(g, a, b, bounds, CertificateKind::Equivalence)
}

/// Semi-decides `[a] <= [b]`. If `N_D(a) <= N_D(b)` pointwise then
/// `d = N_D(b) - N_D(a)` satisfies `a + d ~ b`.
pub fn leq_bounded(g: &Graph, a: &MonoidElement, b: &MonoidElement, bounds: &MonoidBounds) -> OracleOutcome {
    compare_bounded(g, a, b, bounds, CertificateKind::LessEq)
}

/// Graph-side criterion: everything reachable from the support of `a` is
/// regular and every cycle meeting that set has no exit.
pub fn is_periodic_graph(g: &Graph, a: &MonoidElement) -> Result<bool, MonoidError> {
    if a.is_zero() {
        return Err(MonoidError::ZeroElement);
    }
    let start: Vec<VertexId> = a.support().into_iter().collect();
    let reach = reachable_from(g, &start)?;
    let on_cycle = vertices_on_cycles(g);
    Ok(reach.iter().all(|&v| !g.is_sink(v) && (!on_cycle[v.0] || g.out_degree(v) == 1)))
}

/// Smallest `n <= n_max` with `a ~ x^n a` found within the bounds. Uses
/// `N_D(x^n a) = x^n N_{D-n}(a)`, so one normal-form sequence serves every n.
pub fn is_periodic_oracle(g: &Graph, a: &MonoidElement, bounds: &MonoidBounds) -> Result<OracleOutcome, MonoidError> {
    if a.is_zero() {
        return Err(MonoidError::ZeroElement);
    }
    let (lo, hi) = span(&[a]);
    let n_max = bounds.n_max as i64;
    let last = hi + n_max + bounds.depth as i64;
    let mut h = Horizon::new(g, a, lo, bounds.width_cap);
    let mut forms = vec![h.current.clone()];
    let mut truncated = false;
    while h.horizon < last {
        if !h.advance() {
            truncated = true;
            break;
        }
        forms.push(h.current.clone());
    }
    let reached = lo + forms.len() as i64 - 1;
    let form = |d: i64| &forms[(d.max(lo) - lo) as usize];
    for n in 1..=n_max {
        let top = (hi + n + bounds.depth as i64).min(reached);
        for d in lo + n..=top {
            if *form(d) == form(d - n).shift(n) {
                let shifted = a.shift(n);
                let certificate = RewriteCertificate {
                    kind: CertificateKind::Periodicity,
                    left: a.to_terms(g),
                    right: shifted.to_terms(g),
                    steps_left: h.steps_below(d, 0, 1).expect("unscaled"),
                    steps_right: h.steps_below(d - n, n, 1).expect("unscaled"),
                    left_reduct: form(d).to_terms(g),
                    right_reduct: form(d - n).shift(n).to_terms(g),
                    horizon: d,
                    period: Some(n as u64),
                    multiple: None,
                };
                return Ok(OracleOutcome::Proved { certificate });
            }
        }
    }
    Ok(OracleOutcome::Unknown { truncated, horizon: reached })
}

/// Smallest `N <= multiple_max` with `[a] <= N [1_E]` found within the
/// bounds, as the least over horizons of `max_t ceil(N_D(a)[t] / N_D(1_E)[t])`.
pub fn strong_order_unit_bounded(
    g: &Graph,
    a: &MonoidElement,
    bounds: &MonoidBounds,
) -> Result<OracleOutcome, MonoidError> {
    if a.is_zero() {
        return Err(MonoidError::ZeroElement);
    }
    let unit = one_e(g);
    let (lo, hi) = span(&[a, &unit]);
    let limit = hi + bounds.depth as i64;
    let mut ha = Horizon::new(g, a, lo, bounds.width_cap);
    let mut hu = Horizon::new(g, &unit, lo, bounds.width_cap);
    let mut best: Option<(u64, i64)> = None;
    let mut truncated = false;
    loop {
        let ratio = ha.current.terms.iter().try_fold(1u64, |acc, (key, &c)| {
            let have = hu.current.terms.get(key).copied().unwrap_or(0);
            (have > 0).then(|| acc.max(c.div_ceil(have)))
        });
        if let Some(r) = ratio {
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, ha.horizon));
            }
            if r == 1 {
                break;
            }
        }
        if ha.horizon >= limit {
            break;
        }
        if !ha.advance() || !hu.advance() {
            truncated = true;
            break;
        }
    }
    let Some((n, d)) = best.filter(|&(n, _)| n <= bounds.multiple_max) else {
        return Ok(OracleOutcome::Unknown { truncated, horizon: ha.horizon });
    };
    // Rebuild the two normal forms at the winning horizon.
    let mut ra = Horizon::new(g, a, lo, usize::MAX);
    let mut ru = Horizon::new(g, &unit, lo, usize::MAX);
    while ra.horizon < d {
        ra.advance();
        ru.advance();
    }
    let scaled_unit = unit.scale(n).expect("multiple fits: checked above");
    let certificate = RewriteCertificate {
        kind: CertificateKind::LessEq,
        left: a.to_terms(g),
        right: scaled_unit.to_terms(g),
        steps_left: ra.steps_below(d, 0, 1).expect("unscaled"),
        steps_right: match ru.steps_below(d, 0, n) {
            Some(s) => s,
            None => return Ok(OracleOutcome::Unknown { truncated: true, horizon: d }),
        },
        left_reduct: ra.current.to_terms(g),
        right_reduct: match ru.current.scale(n) {
            Some(e) => e.to_terms(g),
            None => return Ok(OracleOutcome::Unknown { truncated: true, horizon: d }),
        },
        horizon: d,
        period: None,
        multiple: Some(n),
    };
    Ok(OracleOutcome::Proved { certificate })
}

/// The constant `l` from the strong order-unit argument for sink-free
/// graphs: the largest repetition count among the cycle vertices `w_i`
/// dominating `x[v]`, or among the ranges of edges out of one vertex.
/// `None` when the graph has sinks.
pub fn bound_constant(g: &Graph) -> Result<Option<u64>, MonoidError> {
    if !sinks(g).is_empty() {
        return Ok(None);
    }
    let on_cycle = vertices_on_cycles(g);
    let cycles = enumerate_cycles(g)?;
    let mut l: u64 = 1;
    for v in g.vertex_ids() {
        let mut ranges: BTreeMap<VertexId, u64> = BTreeMap::new();
        for &e in g.out_edges(v) {
            *ranges.entry(g.edge(e).target).or_insert(0) += 1;
        }
        l = l.max(ranges.values().copied().max().unwrap_or(0));

        // v -> sum x^{k_i} v_i with every v_i on a cycle.
        let mut pending = MonoidElement::term(v, 0, 1);
        let mut landed = MonoidElement::zero();
        while let Some((&(u, k), &c)) = pending.terms.iter().next() {
            pending.remove_term(u, k, c);
            if on_cycle[u.0] {
                landed.checked_add_term(u, k, c);
                continue;
            }
            for &e in g.out_edges(u) {
                if pending.checked_add_term(g.edge(e).target, k + 1, c).is_none() {
                    return Ok(Some(u64::MAX));
                }
            }
        }
        let mut ws: BTreeMap<VertexId, u64> = BTreeMap::new();
        for (&(vi, ki), &c) in &landed.terms {
            let cycle = cycles
                .iter()
                .find(|cy| cy.vertices(g).contains(&vi))
                .ok_or_else(|| GraphError::NotACycle(format!("no cycle through `{}`", g.vertex_name(vi))))?;
            let verts = cycle.vertices(g);
            let n = verts.len();
            let back = ((ki + 1) as usize) % n;
            let idx = verts.iter().position(|&x| x == vi).expect("vertex on its cycle");
            let w = verts[(idx + n - back) % n];
            let slot = ws.entry(w).or_insert(0);
            *slot = slot.saturating_add(c);
        }
        l = l.max(ws.values().copied().max().unwrap_or(0));
    }
    Ok(Some(l))
}

/// `|E0|^{|d|-1} l^{|d|}` for `d != 0`, and `1` for `d = 0`; saturating.
pub fn paper_multiple_bound(vertex_count: usize, l: u64, d: i64) -> u64 {
    if d == 0 {
        return 1;
    }
    let e = d.unsigned_abs() as u32;
    (vertex_count as u64).saturating_pow(e - 1).saturating_mul(l.saturating_pow(e))
}

/// Bound for an arbitrary element: degree-0 terms contribute their count,
/// other terms `multiplicity * |E0|^{|d|-1} l^{|d|}`.
pub fn paper_bound_for(g: &Graph, a: &MonoidElement) -> Result<Option<u64>, MonoidError> {
    let Some(l) = bound_constant(g)? else { return Ok(None) };
    Ok(Some(a.terms.iter().fold(0u64, |acc, (&(_, d), &c)| {
        acc.saturating_add(c.saturating_mul(paper_multiple_bound(g.vertex_count(), l, d)))
    })))
}

/// Breadth-first search over single steps from both sides, for cross-checking
/// the normal-form engine on small inputs.
pub fn equiv_by_closure(g: &Graph, a: &MonoidElement, b: &MonoidElement, depth: usize, width_cap: usize) -> bool {
    let ca = forward_closure(g, a, depth, width_cap);
    let cb = forward_closure(g, b, depth, width_cap);
    ca.elements.intersection(&cb.elements).next().is_some()
}

/// Pointwise-containment search over the two forward closures.
pub fn leq_by_closure(g: &Graph, a: &MonoidElement, b: &MonoidElement, depth: usize, width_cap: usize) -> bool {
    let ca = forward_closure(g, a, depth, width_cap);
    let cb = forward_closure(g, b, depth, width_cap);
    ca.elements.iter().any(|x| cb.elements.iter().any(|y| x.le_pointwise(y)))
}
