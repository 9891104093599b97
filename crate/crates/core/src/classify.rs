//! Where `L_K(E)` sits in the hierarchy group ring, skew group ring, crossed
//! product, strongly graded, decided from the structure of `E`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{
    enumerate_cycles, find_cycle_with_exit, is_no_exit, paths_into, sinks, Cycle, Graph, GraphError, VertexId,
};

/// Condition EDL data for one cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdlEntry {
    pub cycle: Cycle,
    pub base: String,
    pub m: usize,
    pub residue_counts: BTreeMap<usize, u64>,
    pub k: Option<u64>,
}

impl EdlEntry {
    pub fn holds(&self) -> bool {
        self.k.is_some()
    }

    pub fn total(&self) -> u64 {
        self.residue_counts.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdlReport {
    pub cycles: Vec<EdlEntry>,
    pub overall: bool,
}

/// EDL data for `cycle`, counting paths into `vertex`, which must lie on it.
pub fn edl_entry_at(g: &Graph, cycle: &Cycle, vertex: VertexId) -> Result<EdlEntry, GraphError> {
    let m = cycle.len();
    let lengths = paths_into(g, vertex, Some(cycle))?;
    let residue_counts: BTreeMap<usize, u64> = lengths.residue_counts(m).into_iter().enumerate().collect();
    let first = residue_counts[&0];
    let k = (first > 0 && residue_counts.values().all(|&c| c == first)).then_some(first);
    Ok(EdlEntry { cycle: cycle.clone(), base: g.vertex_name(vertex).to_string(), m, residue_counts, k })
}

/// Evaluates Condition EDL at each cycle's base vertex. Sinks may be present;
/// the graph must be no-exit.
pub fn check_edl(g: &Graph) -> Result<EdlReport, GraphError> {
    if !is_no_exit(g) {
        let c = find_cycle_with_exit(g).map(|c| c.to_string()).unwrap_or_default();
        return Err(GraphError::NotNoExit(format!("cycle {c} has an exit")));
    }
    let cycles = enumerate_cycles(g)?.iter().map(|c| edl_entry_at(g, c, c.base())).collect::<Result<Vec<_>, _>>()?;
    let overall = cycles.iter().all(EdlEntry::holds);
    Ok(EdlReport { cycles, overall })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    pub sinks: Vec<String>,
    pub sinks_receiving_edges: Vec<String>,
    pub exit_cycle: Option<Cycle>,
    pub edl_failing_cycle: Option<Cycle>,
    pub non_unit_cycle: Option<Cycle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub unital: bool,
    pub finite: bool,
    pub no_sinks: bool,
    pub no_exit: bool,
    /// Present whenever the graph is no-exit.
    pub edl: Option<EdlReport>,
    pub strongly_graded: bool,
    pub crossed_product: bool,
    pub skew_group_ring: bool,
    pub group_ring: bool,
    pub graded_unit_regular: bool,
    pub witnesses: Witnesses,
}

pub fn classify_lpa(g: &Graph) -> Result<ClassificationReport, GraphError> {
    let mut sink_names: Vec<String> = sinks(g).into_iter().map(|v| g.vertex_name(v).to_string()).collect();
    sink_names.sort();
    let mut receiving: Vec<String> =
        sinks(g).into_iter().filter(|&v| !g.in_edges(v).is_empty()).map(|v| g.vertex_name(v).to_string()).collect();
    receiving.sort();

    let no_sinks = sink_names.is_empty();
    let no_exit = is_no_exit(g);
    let edl = if no_exit { Some(check_edl(g)?) } else { None };
    let edl_holds = edl.as_ref().is_some_and(|r| r.overall);

    let crossed_product = no_sinks && no_exit && edl_holds;
    let all_loops = edl.as_ref().is_some_and(|r| r.cycles.iter().all(|e| e.m == 1));
    let witnesses = Witnesses {
        exit_cycle: if no_exit { None } else { find_cycle_with_exit(g) },
        edl_failing_cycle: edl.as_ref().and_then(|r| r.cycles.iter().find(|e| !e.holds()).map(|e| e.cycle.clone())),
        non_unit_cycle: edl.as_ref().and_then(|r| r.cycles.iter().find(|e| e.m > 1).map(|e| e.cycle.clone())),
        sinks: sink_names,
        sinks_receiving_edges: receiving.clone(),
    };

    Ok(ClassificationReport {
        unital: true,
        finite: true,
        no_sinks,
        no_exit,
        strongly_graded: no_sinks,
        crossed_product,
        skew_group_ring: crossed_product,
        group_ring: crossed_product && all_loops,
        graded_unit_regular: no_exit && receiving.is_empty() && edl_holds,
        edl,
        witnesses,
    })
}
