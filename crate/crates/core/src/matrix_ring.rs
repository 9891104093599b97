//! Graded matrix rings `M_n(K)(gamma_1, ..., gamma_n)` over a graded division
//! ring `K` with support `Gamma_K`, for `Gamma = Z^r`.
//!
//! The ring is strongly graded when every coset of `Gamma_K` occurs among the
//! shifts, a crossed product (equivalently a skew group ring) when in
//! addition every coset occurs equally often, and a group ring when
//! `Gamma_K = Gamma`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    quotient_structure, to_big, CosetRep, Lattice, LatticeError, QuotientOrder, QuotientStructure,
    MAX_ENUMERATED_COSETS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixRingError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("a matrix ring needs at least one shift")]
    NoShifts,
    #[error("ambient rank must be positive")]
    ZeroRank,
}

/// JSON input accepted by the `matrix-ring` subcommand.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRingInput {
    pub rank: usize,
    pub support: Vec<Vec<i64>>,
    pub shifts: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct ShiftedMatrixRing {
    support: Lattice,
    shifts: Vec<Vec<BigInt>>,
    quotient: QuotientStructure,
}

impl ShiftedMatrixRing {
    pub fn new(support: Lattice, shifts: Vec<Vec<BigInt>>) -> Result<Self, MatrixRingError> {
        if support.rank() == 0 {
            return Err(MatrixRingError::ZeroRank);
        }
        if shifts.is_empty() {
            return Err(MatrixRingError::NoShifts);
        }
        if let Some(bad) = shifts.iter().find(|s| s.len() != support.rank()) {
            return Err(LatticeError::DimensionMismatch { expected: support.rank(), found: bad.len() }.into());
        }
        let quotient = quotient_structure(&support);
        Ok(ShiftedMatrixRing { support, shifts, quotient })
    }

    pub fn from_input(input: &MatrixRingInput) -> Result<Self, MatrixRingError> {
        let support = Lattice::from_i64(input.rank, &input.support)?;
        Self::new(support, input.shifts.iter().map(|s| to_big(s)).collect())
    }

    /// `r = 1`, `Gamma_K = mZ`.
    pub fn cyclic(m: i64, shifts: &[i64]) -> Result<Self, MatrixRingError> {
        let support = Lattice::from_i64(1, &[vec![m]])?;
        Self::new(support, shifts.iter().map(|&s| vec![BigInt::from(s)]).collect())
    }

    pub fn rank(&self) -> usize {
        self.support.rank()
    }

    pub fn size(&self) -> usize {
        self.shifts.len()
    }

    pub fn support(&self) -> &Lattice {
        &self.support
    }

    pub fn shifts(&self) -> &[Vec<BigInt>] {
        &self.shifts
    }

    pub fn quotient(&self) -> &QuotientStructure {
        &self.quotient
    }

    /// `u = sum_i gamma_i Gamma_K`.
    pub fn order_unit(&self) -> OrderUnitVector {
        let mut coefficients = BTreeMap::new();
        for s in &self.shifts {
            let rep = self.quotient.canonical(s).expect("shift lengths checked at construction");
            *coefficients.entry(rep).or_insert(0) += 1;
        }
        OrderUnitVector { coefficients }
    }
}

/// An element of `Z^+[Gamma / Gamma_K]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderUnitVector {
    pub coefficients: BTreeMap<CosetRep, u64>,
}

impl OrderUnitVector {
    pub fn mass(&self) -> u64 {
        self.coefficients.values().sum()
    }

    /// The action of `delta` on the permutation module.
    pub fn translate(&self, q: &QuotientStructure, delta: &[BigInt]) -> Result<OrderUnitVector, LatticeError> {
        let mut coefficients = BTreeMap::new();
        for (rep, &c) in &self.coefficients {
            let moved: Vec<BigInt> = rep.0.iter().zip(delta).map(|(a, b)| a + b).collect();
            *coefficients.entry(q.canonical(&moved)?).or_insert(0) += c;
        }
        Ok(OrderUnitVector { coefficients })
    }
}

impl Serialize for OrderUnitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            coset: &'a CosetRep,
            multiplicity: u64,
        }
        s.collect_seq(self.coefficients.iter().map(|(coset, &multiplicity)| Term { coset, multiplicity }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetCount {
    pub coset: CosetRep,
    pub count: u64,
}

/// Evidence for the first level of the hierarchy that fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixRingWitness {
    InfiniteQuotient,
    MissingCoset { coset: CosetRep },
    UnequalMultiplicity { low: CosetCount, high: CosetCount },
    ProperSupport { quotient_order: CosetCount },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixRingClassification {
    pub strongly_graded: bool,
    pub crossed_product: bool,
    pub skew_group_ring: bool,
    pub group_ring: bool,
    pub witness: Option<MatrixRingWitness>,
}

impl MatrixRingClassification {
    fn levels(
        strongly_graded: bool,
        crossed_product: bool,
        group_ring: bool,
        witness: Option<MatrixRingWitness>,
    ) -> Self {
        MatrixRingClassification {
            strongly_graded,
            crossed_product,
            skew_group_ring: crossed_product,
            group_ring,
            witness,
        }
    }

    pub fn verdicts(&self) -> (bool, bool, bool) {
        (self.strongly_graded, self.crossed_product, self.group_ring)
    }
}

pub fn classify_matrix_ring(ring: &ShiftedMatrixRing) -> MatrixRingClassification {
    let q = ring.quotient();
    let order = match q.order() {
        QuotientOrder::Infinite => {
            return MatrixRingClassification::levels(false, false, false, Some(MatrixRingWitness::InfiniteQuotient))
        }
        QuotientOrder::Finite(n) => n,
    };
    let u = ring.order_unit();
    // At most `n` cosets are hit, so a miss shows up within the first n + 1.
    let cosets = q.cosets().expect("finite quotient");
    if let Some(coset) = cosets.take(ring.size() + 1).find(|c| !u.coefficients.contains_key(c)) {
        return MatrixRingClassification::levels(false, false, false, Some(MatrixRingWitness::MissingCoset { coset }));
    }
    let (low, high) = extremes(&u);
    if low.count != high.count {
        return MatrixRingClassification::levels(
            true,
            false,
            false,
            Some(MatrixRingWitness::UnequalMultiplicity { low, high }),
        );
    }
    if !order.is_one() {
        let quotient_order = CosetCount { coset: q.zero(), count: order.to_u64().unwrap_or(u64::MAX) };
        return MatrixRingClassification::levels(
            true,
            true,
            false,
            Some(MatrixRingWitness::ProperSupport { quotient_order }),
        );
    }
    MatrixRingClassification::levels(true, true, true, None)
}

fn extremes(u: &OrderUnitVector) -> (CosetCount, CosetCount) {
    let pick = |(c, &n): (&CosetRep, &u64)| CosetCount { coset: c.clone(), count: n };
    let low = u.coefficients.iter().min_by_key(|(_, &n)| n).map(pick).expect("nonempty order unit");
    let high = u.coefficients.iter().max_by_key(|(_, &n)| n).map(pick).expect("nonempty order unit");
    (low, high)
}

/// `Stab(u) = Gamma`. The stabilizer is a subgroup, so checking the unit
/// vectors suffices.
pub fn stabilizer_is_full(ring: &ShiftedMatrixRing) -> bool {
    let q = ring.quotient();
    if !q.is_finite() {
        return false;
    }
    let u = ring.order_unit();
    (0..ring.rank()).all(|i| {
        let mut e = vec![BigInt::from(0); ring.rank()];
        e[i] = BigInt::one();
        u.translate(q, &e).map(|t| t == u).unwrap_or(false)
    })
}

/// Orbit of `gamma Gamma_K` under translation by `Gamma`.
pub fn orbit_of_coset(ring: &ShiftedMatrixRing, gamma: &[BigInt]) -> Result<BTreeSet<CosetRep>, LatticeError> {
    let q = ring.quotient();
    match q.order() {
        QuotientOrder::Infinite => return Err(LatticeError::InfiniteQuotient),
        QuotientOrder::Finite(n) if n > BigInt::from(MAX_ENUMERATED_COSETS) => {
            return Err(LatticeError::TooManyCosets { order: n })
        }
        QuotientOrder::Finite(_) => {}
    }
    let start = q.canonical(gamma)?;
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for i in 0..ring.rank() {
            for step in [1, -1] {
                let mut moved = c.0.clone();
                moved[i] += step;
                let next = q.canonical(&moved)?;
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen)
}

/// Residue counting for `r = 1`, `Gamma_K = mZ`: strongly graded iff every
/// residue mod `m` occurs, crossed product iff all residues occur equally
/// often, group ring iff `m = 1`. Independent of the lattice machinery.
pub fn classify_cyclic(m: u64, shifts: &[i64]) -> MatrixRingClassification {
    if m == 0 {
        return MatrixRingClassification::levels(false, false, false, Some(MatrixRingWitness::InfiniteQuotient));
    }
    let mut counts = vec![0u64; m as usize];
    for &s in shifts {
        counts[s.rem_euclid(m as i64) as usize] += 1;
    }
    let rep = |r: usize| CosetRep(vec![BigInt::from(r)]);
    if let Some(r) = counts.iter().position(|&c| c == 0) {
        return MatrixRingClassification::levels(
            false,
            false,
            false,
            Some(MatrixRingWitness::MissingCoset { coset: rep(r) }),
        );
    }
    let lo = (0..counts.len()).min_by_key(|&r| counts[r]).unwrap_or(0);
    let hi = (0..counts.len()).max_by_key(|&r| counts[r]).unwrap_or(0);
    if counts[lo] != counts[hi] {
        return MatrixRingClassification::levels(
            true,
            false,
            false,
            Some(MatrixRingWitness::UnequalMultiplicity {
                low: CosetCount { coset: rep(lo), count: counts[lo] },
                high: CosetCount { coset: rep(hi), count: counts[hi] },
            }),
        );
    }
    if m > 1 {
        return MatrixRingClassification::levels(
            true,
            true,
            false,
            Some(MatrixRingWitness::ProperSupport { quotient_order: CosetCount { coset: rep(0), count: m } }),
        );
    }
    MatrixRingClassification::levels(true, true, true, None)
}
