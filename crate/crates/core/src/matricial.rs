//! Graded matricial representation of `L_K(E)` for finite no-exit graphs:
//! one `M_k(K)(shifts)` per sink and one `M_n(K[x^m, x^-m])(shifts)` per
//! cycle, plus the induced presentation of the graded Grothendieck group.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{enumerate_cycles, is_no_exit, paths_into, sinks, Cycle, Graph, GraphError, LengthMultiset};
use crate::matrix_ring::{MatrixRingError, ShiftedMatrixRing};

/// Blocks with more rows than this are not expanded into matrix rings.
pub const MAX_EXPANDED_BLOCK: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum MatricialError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    MatrixRing(#[from] MatrixRingError),
    #[error("block of size {0} is too large to expand")]
    BlockTooLarge(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkBlock {
    pub sink: String,
    pub shifts: LengthMultiset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBlock {
    pub cycle: Cycle,
    pub m: usize,
    pub shifts: LengthMultiset,
}

impl SinkBlock {
    pub fn size(&self) -> u64 {
        self.shifts.total()
    }

    /// `M_k(K)(shifts)` with `K` trivially graded, i.e. `Gamma_K = 0`.
    pub fn to_matrix_ring(&self) -> Result<ShiftedMatrixRing, MatricialError> {
        Ok(ShiftedMatrixRing::cyclic(0, &expand(&self.shifts)?)?)
    }
}

impl CycleBlock {
    pub fn size(&self) -> u64 {
        self.shifts.total()
    }

    /// `M_n(K[x^m, x^-m])(shifts)`, so `Gamma_K = mZ`.
    pub fn to_matrix_ring(&self) -> Result<ShiftedMatrixRing, MatricialError> {
        Ok(ShiftedMatrixRing::cyclic(self.m as i64, &expand(&self.shifts)?)?)
    }
}

fn expand(shifts: &LengthMultiset) -> Result<Vec<i64>, MatricialError> {
    let total = shifts.total();
    if total > MAX_EXPANDED_BLOCK {
        return Err(MatricialError::BlockTooLarge(total));
    }
    Ok(shifts.counts().iter().flat_map(|(&len, &c)| std::iter::repeat_n(len as i64, c as usize)).collect())
}

fn expanded_list(shifts: &LengthMultiset) -> Vec<u64> {
    shifts.counts().iter().flat_map(|(&len, &c)| std::iter::repeat_n(len, c as usize)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedMatricialAlgebra {
    pub sink_blocks: Vec<SinkBlock>,
    pub cycle_blocks: Vec<CycleBlock>,
}

impl Serialize for GradedMatricialAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Sink<'a> {
            sink: &'a str,
            size: u64,
            shifts: Vec<u64>,
        }
        #[derive(Serialize)]
        struct CycleOut<'a> {
            cycle_base: &'a str,
            cycle_edges: &'a [String],
            m: usize,
            size: u64,
            shifts: Vec<u64>,
        }
        let mut map = s.serialize_map(Some(2))?;
        let sinks: Vec<Sink<'_>> = self
            .sink_blocks
            .iter()
            .map(|b| Sink { sink: &b.sink, size: b.size(), shifts: expanded_list(&b.shifts) })
            .collect();
        let cycles: Vec<CycleOut<'_>> = self
            .cycle_blocks
            .iter()
            .map(|b| CycleOut {
                cycle_base: b.cycle.base_name(),
                cycle_edges: b.cycle.edge_names(),
                m: b.m,
                size: b.size(),
                shifts: expanded_list(&b.shifts),
            })
            .collect();
        map.serialize_entry("sink_blocks", &sinks)?;
        map.serialize_entry("cycle_blocks", &cycles)?;
        map.end()
    }
}

pub fn matricial_representation(g: &Graph) -> Result<GradedMatricialAlgebra, GraphError> {
    if !is_no_exit(g) {
        return Err(GraphError::NotNoExit("the matricial representation needs a no-exit graph".into()));
    }
    let mut sink_blocks = sinks(g)
        .into_iter()
        .map(|s| Ok(SinkBlock { sink: g.vertex_name(s).to_string(), shifts: paths_into(g, s, None)? }))
        .collect::<Result<Vec<_>, GraphError>>()?;
    sink_blocks.sort_by(|a, b| a.sink.cmp(&b.sink));
    let cycle_blocks = enumerate_cycles(g)?
        .into_iter()
        .map(|c| {
            let shifts = paths_into(g, c.base(), Some(&c))?;
            Ok(CycleBlock { m: c.len(), shifts, cycle: c })
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    Ok(GradedMatricialAlgebra { sink_blocks, cycle_blocks })
}

/// Rotation of residue counts with the lexicographically smallest profile;
/// ties go to the smallest translation.
fn canonical_cycle_shifts(m: usize, shifts: &LengthMultiset) -> LengthMultiset {
    let counts = shifts.residue_counts(m);
    let best = (0..m).map(|t| (0..m).map(|j| counts[(j + m - t) % m]).collect::<Vec<u64>>()).min().unwrap_or_default();
    LengthMultiset::from_counts(best.into_iter().enumerate().map(|(j, c)| (j as u64, c)))
}

fn canonical_sink_shifts(shifts: &LengthMultiset) -> LengthMultiset {
    let min = shifts.counts().keys().next().copied().unwrap_or(0);
    LengthMultiset::from_counts(shifts.counts().iter().map(|(&len, &c)| (len - min, c)))
}

/// Normal form under the shift-lemma moves: permuting shifts, translating a
/// block's shifts by a common amount, and adding `m` to a single shift of a
/// cycle block. Idempotent.
pub fn canonicalize(a: &GradedMatricialAlgebra) -> GradedMatricialAlgebra {
    let mut sink_blocks: Vec<SinkBlock> = a
        .sink_blocks
        .iter()
        .map(|b| SinkBlock { sink: b.sink.clone(), shifts: canonical_sink_shifts(&b.shifts) })
        .collect();
    sink_blocks.sort_by(|x, y| (x.size(), x.shifts.counts(), &x.sink).cmp(&(y.size(), y.shifts.counts(), &y.sink)));
    let mut cycle_blocks: Vec<CycleBlock> = a
        .cycle_blocks
        .iter()
        .map(|b| CycleBlock { cycle: b.cycle.clone(), m: b.m, shifts: canonical_cycle_shifts(b.m, &b.shifts) })
        .collect();
    cycle_blocks.sort_by(|x, y| {
        (x.m, x.size(), x.shifts.counts(), x.cycle.base_name(), x.cycle.edge_names()).cmp(&(
            y.m,
            y.size(),
            y.shifts.counts(),
            y.cycle.base_name(),
            y.cycle.edge_names(),
        ))
    });
    GradedMatricialAlgebra { sink_blocks, cycle_blocks }
}

type Signature = (Vec<BTreeMap<u64, u64>>, Vec<(usize, BTreeMap<u64, u64>)>);

fn signature(a: &GradedMatricialAlgebra) -> Signature {
    let c = canonicalize(a);
    let mut sinks: Vec<_> = c.sink_blocks.iter().map(|b| b.shifts.counts().clone()).collect();
    let mut cycles: Vec<_> = c.cycle_blocks.iter().map(|b| (b.m, b.shifts.counts().clone())).collect();
    sinks.sort();
    cycles.sort();
    (sinks, cycles)
}

/// Equal canonical forms, ignoring vertex and edge labels. `true` implies a
/// graded isomorphism; `false` only means none was identified.
pub fn graded_iso_sufficient(a: &GradedMatricialAlgebra, b: &GradedMatricialAlgebra) -> bool {
    signature(a) == signature(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KComponent {
    /// `(Z[x]/(x^m = 1), sum unit[j] x^j)`.
    Cyclic { m: usize, unit: Vec<u64> },
    /// `(Z[x, x^-1], sum c x^len)`.
    Free { unit: BTreeMap<u64, u64> },
}

impl Serialize for KComponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        match self {
            KComponent::Cyclic { m, unit } => {
                map.serialize_entry("cyclic", m)?;
                map.serialize_entry("unit", unit)?;
            }
            KComponent::Free { unit } => {
                let keyed: BTreeMap<String, u64> = unit.iter().map(|(k, v)| (k.to_string(), *v)).collect();
                map.serialize_entry("free", &keyed)?;
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KTheoryPresentation {
    pub components: Vec<KComponent>,
}

pub fn k_theory_presentation(a: &GradedMatricialAlgebra) -> KTheoryPresentation {
    let sinks = a.sink_blocks.iter().map(|b| KComponent::Free { unit: b.shifts.counts().clone() });
    let cycles = a.cycle_blocks.iter().map(|b| KComponent::Cyclic { m: b.m, unit: b.shifts.residue_counts(b.m) });
    KTheoryPresentation { components: sinks.chain(cycles).collect() }
}
