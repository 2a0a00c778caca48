//! Filtration diagrams of finite quotient spaces and the machinery built on
//! them: martingales and their limits, consistent measure families and their
//! extension, dyadic experiments with closed-form oracles, and the exact
//! second-moment identities behind the Cauchy argument.

mod dyadic;
mod extension;
mod martingale;
mod moments;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finprob::{same_space, MeasurePreservingMap, SpaceRef};
use crate::scalar::Scalar;

pub use dyadic::{
    dyadic_error, dyadic_isometry_report, make_dyadic, DyadicExperiment, DyadicGround, Segment,
    MAX_DYADIC_DEPTH,
};
pub use extension::{kolmogorov_extend, rn_family, ConsistentMeasureFamily};
pub use martingale::{
    cauchy_certificate, induced_martingale, is_martingale, isometry_report, martingale_limit,
    second_moment_gap, CauchyCertificate, IsometryReport, Martingale, MartingaleCheck,
};
pub use moments::{moment_identities, MomentCheck, MomentItem, RefinementTriple};

pub type DiagramRef<S> = Arc<FiltrationDiagram<S>>;

/// The master space of a diagram together with its projections onto every
/// index space.
#[derive(Debug, Clone, PartialEq)]
pub struct Top<S> {
    space: SpaceRef<S>,
    /// Set when the master space is itself one of the indices.
    index: Option<usize>,
    proj: Vec<MeasurePreservingMap<S>>,
}

impl<S: Scalar> Top<S> {
    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn index(&self) -> Option<usize> {
        self.index
    }

    pub fn proj(&self, i: usize) -> &MeasurePreservingMap<S> {
        &self.proj[i]
    }
}

/// A finite directed poset of finite spaces with connecting maps
/// `connect(i ≤ j): Ω_j → Ω_i`, optionally with a master space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationDiagram<S> {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    spaces: Vec<SpaceRef<S>>,
    connect: BTreeMap<(usize, usize), MeasurePreservingMap<S>>,
    top: Option<Top<S>>,
}

/// One failed diagram invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotReflexive { index: String },
    NotAntisymmetric { i: String, j: String },
    NotTransitive { i: String, j: String, k: String },
    NotDirected { i: String, j: String },
    NotIdentity { index: String, atom: String },
    NotMeasurePreserving { lo: String, hi: String, atom: String },
    Functoriality { i: String, j: String, k: String, atom: String },
    TopNotMeasurePreserving { index: String, atom: String },
    TopIncompatible { i: String, j: String, atom: String },
    GenerationFailure { a: String, b: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotReflexive { index } => write!(f, "order is not reflexive at {index}"),
            Violation::NotAntisymmetric { i, j } => {
                write!(f, "order is not antisymmetric: {i} ≤ {j} ≤ {i}")
            }
            Violation::NotTransitive { i, j, k } => {
                write!(f, "order is not transitive: {i} ≤ {j} ≤ {k} but not {i} ≤ {k}")
            }
            Violation::NotDirected { i, j } => write!(f, "{i} and {j} have no upper bound"),
            Violation::NotIdentity { index, atom } => {
                write!(f, "connect({index} ≤ {index}) moves atom {atom}")
            }
            Violation::NotMeasurePreserving { lo, hi, atom } => {
                write!(f, "connect({lo} ≤ {hi}) is not measure preserving at {atom}")
            }
            Violation::Functoriality { i, j, k, atom } => write!(
                f,
                "connect({i} ≤ {j}) ∘ connect({j} ≤ {k}) ≠ connect({i} ≤ {k}) at atom {atom} of {k}"
            ),
            Violation::TopNotMeasurePreserving { index, atom } => {
                write!(f, "projection onto {index} is not measure preserving at {atom}")
            }
            Violation::TopIncompatible { i, j, atom } => write!(
                f,
                "connect({i} ≤ {j}) ∘ proj({j}) ≠ proj({i}) at top atom {atom}"
            ),
            Violation::GenerationFailure { a, b } => {
                write!(f, "top atoms {a} and {b} are not separated by any index")
            }
        }
    }
}

/// Outcome of [`FiltrationDiagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub(crate) fn closure(n: usize, relations: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(i, j) in relations {
        leq[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    leq
}

impl<S: Scalar> FiltrationDiagram<S> {
    /// Builds a diagram from generating order relations `(i, j)` meaning
    /// `i ≤ j`, closed reflexively and transitively. Every strict pair of the
    /// closure needs a connecting map `Ω_j → Ω_i`; identities are filled in.
    ///
    /// Only shapes are checked here. Order axioms, functoriality and the
    /// pushforward condition are reported by [`Self::validate`].
    pub fn new(
        labels: Vec<String>,
        spaces: Vec<SpaceRef<S>>,
        relations: &[(usize, usize)],
        connect: Vec<(usize, usize, MeasurePreservingMap<S>)>,
    ) -> Result<Self> {
        let n = labels.len();
        if spaces.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: spaces.len(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidDiagram("empty index set".into()));
        }
        if let Some(&(i, j)) = relations.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::InvalidDiagram(format!("relation ({i}, {j}) out of range")));
        }
        let leq = closure(n, relations);
        let mut table = BTreeMap::new();
        for (i, j, map) in connect {
            if i >= n || j >= n || !leq[i][j] {
                return Err(Error::InvalidDiagram(format!(
                    "connecting map given for a pair outside the order: ({i}, {j})"
                )));
            }
            if !same_space(map.src(), &spaces[j]) || !same_space(map.dst(), &spaces[i]) {
                return Err(Error::DomainMismatch(format!(
                    "connect({} ≤ {}) must map the space of {} to the space of {}",
                    labels[i], labels[j], labels[j], labels[i]
                )));
            }
            table.insert((i, j), map);
        }
        for i in 0..n {
            table
                .entry((i, i))
                .or_insert_with(|| MeasurePreservingMap::identity(spaces[i].clone()));
            for j in 0..n {
                if leq[i][j] && !table.contains_key(&(i, j)) {
                    return Err(Error::InvalidDiagram(format!(
                        "missing connecting map for {} ≤ {}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(Self {
            labels,
            leq,
            spaces,
            connect: table,
            top: None,
        })
    }

    /// A one-index diagram whose only space is also the top.
    pub fn single(space: SpaceRef<S>) -> Self {
        let mut connect = BTreeMap::new();
        connect.insert((0, 0), MeasurePreservingMap::identity(space.clone()));
        Self {
            labels: vec!["0".into()],
            leq: vec![vec![true]],
            spaces: vec![space.clone()],
            connect,
            top: Some(Top {
                space: space.clone(),
                index: Some(0),
                proj: vec![MeasurePreservingMap::identity(space)],
            }),
        }
    }

    /// Chain `0 ≤ 1 ≤ … ≤ n` from coarsening maps, `coarsen[k]: Ω_{k+1} → Ω_k`.
    /// The last level becomes the top.
    pub fn chain(coarsen: Vec<MeasurePreservingMap<S>>) -> Result<Self> {
        if coarsen.is_empty() {
            return Err(Error::InvalidDiagram("a chain needs at least one map".into()));
        }
        let n = coarsen.len() + 1;
        let mut spaces = vec![coarsen[0].dst().clone()];
        for (k, m) in coarsen.iter().enumerate() {
            if !same_space(m.dst(), &spaces[k]) {
                return Err(Error::DomainMismatch(format!(
                    "coarsening map {k} does not land on level {k}"
                )));
            }
            spaces.push(m.src().clone());
        }
        let mut connect = Vec::new();
        for j in 1..n {
            // Ω_j → Ω_i for i < j, built by composing downward.
            let mut acc = coarsen[j - 1].clone();
            connect.push((j - 1, j, acc.clone()));
            for i in (0..j - 1).rev() {
                acc = acc.compose(&coarsen[i])?;
                connect.push((i, j, acc.clone()));
            }
        }
        let relations: Vec<(usize, usize)> = (1..n).map(|j| (j - 1, j)).collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::new(labels, spaces, &relations, connect)?.with_top_index(n - 1)
    }

    /// Declares index `t` to be the top; it must dominate every index.
    pub fn with_top_index(mut self, t: usize) -> Result<Self> {
        if t >= self.len() || (0..self.len()).any(|i| !self.leq[i][t]) {
            return Err(Error::NoTopElement);
        }
        let proj = (0..self.len())
            .map(|i| self.connect[&(i, t)].clone())
            .collect();
        self.top = Some(Top {
            space: self.spaces[t].clone(),
            index: Some(t),
            proj,
        });
        Ok(self)
    }

    /// Attaches a master space outside the index set with projections
    /// `proj[i]: Ω → Ω_i`.
    pub fn with_master(mut self, space: SpaceRef<S>, proj: Vec<MeasurePreservingMap<S>>) -> Result<Self> {
        if proj.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: proj.len(),
            });
        }
        for (i, p) in proj.iter().enumerate() {
            if !same_space(p.src(), &space) || !same_space(p.dst(), &self.spaces[i]) {
                return Err(Error::DomainMismatch(format!(
                    "projection onto {} has the wrong endpoints",
                    self.labels[i]
                )));
            }
        }
        self.top = Some(Top {
            space,
            index: None,
            proj,
        });
        Ok(self)
    }

    pub fn into_ref(self) -> DiagramRef<S> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn space(&self, i: usize) -> &SpaceRef<S> {
        &self.spaces[i]
    }

    pub fn spaces(&self) -> &[SpaceRef<S>] {
        &self.spaces
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// `connect(i ≤ j): Ω_j → Ω_i`, when `i ≤ j`.
    pub fn connect(&self, i: usize, j: usize) -> Option<&MeasurePreservingMap<S>> {
        self.connect.get(&(i, j))
    }

    pub fn top(&self) -> Option<&Top<S>> {
        self.top.as_ref()
    }

    pub(crate) fn require_top(&self) -> Result<&Top<S>> {
        self.top.as_ref().ok_or(Error::NoTopElement)
    }

    /// The greatest index, if one exists.
    pub fn finest(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|i| self.leq[i][m]))
    }

    /// Strict pairs `i < j` with nothing strictly between them.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |i: usize, j: usize| i != j && self.leq[i][j];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Indices ordered from coarsest to finest when the poset is a chain.
    pub fn chain_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                if !self.leq[i][j] && !self.leq[j][i] {
                    return Err(Error::NotAChain(
                        self.labels[i].clone(),
                        self.labels[j].clone(),
                    ));
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (0..n).filter(|&k| self.leq[k][i]).count());
        Ok(order)
    }

    /// Pair of top atoms that no projection separates, if any.
    pub fn unseparated_top_atoms(&self) -> Option<(usize, usize)> {
        let top = self.top.as_ref()?;
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for a in 0..top.space.len() {
            let key: Vec<usize> = top.proj.iter().map(|p| p.image(a)).collect();
            if let Some(&b) = seen.get(&key) {
                return Some((b, a));
            }
            seen.insert(key, a);
        }
        None
    }

    /// Checks every diagram invariant and reports all failures.
    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        let l = |i: usize| self.labels[i].clone();
        let mut v = Vec::new();
        for i in 0..n {
            if !self.leq[i][i] {
                v.push(Violation::NotReflexive { index: l(i) });
            }
            for j in 0..n {
                if i < j && self.leq[i][j] && self.leq[j][i] {
                    v.push(Violation::NotAntisymmetric { i: l(i), j: l(j) });
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        v.push(Violation::NotTransitive {
                            i: l(i),
                            j: l(j),
                            k: l(k),
                        });
                    }
                }
                if i < j && !(0..n).any(|k| self.leq[i][k] && self.leq[j][k]) {
                    v.push(Violation::NotDirected { i: l(i), j: l(j) });
                }
            }
        }
        for i in 0..n {
            if let Some(id) = self.connect.get(&(i, i)) {
                if let Some(a) = (0..id.src().len()).find(|&a| id.image(a) != a) {
                    v.push(Violation::NotIdentity {
                        index: l(i),
                        atom: self.spaces[i].atom(a).to_string(),
                    });
                }
            }
        }
        for (&(i, j), map) in &self.connect {
            if let Err(Error::NotMeasurePreserving { atom, .. }) = map.check_measure_preserving() {
                v.push(Violation::NotMeasurePreserving {
                    lo: l(i),
                    hi: l(j),
                    atom,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || !(self.leq[i][j] && self.leq[j][k]) {
                        continue;
                    }
                    let (Some(ij), Some(jk), Some(ik)) = (
                        self.connect.get(&(i, j)),
                        self.connect.get(&(j, k)),
                        self.connect.get(&(i, k)),
                    ) else {
                        continue;
                    };
                    if let Some(a) =
                        (0..self.spaces[k].len()).find(|&a| ij.image(jk.image(a)) != ik.image(a))
                    {
                        v.push(Violation::Functoriality {
                            i: l(i),
                            j: l(j),
                            k: l(k),
                            atom: self.spaces[k].atom(a).to_string(),
                        });
                    }
                }
            }
        }
        if let Some(top) = &self.top {
            for (i, p) in top.proj.iter().enumerate() {
                if let Err(Error::NotMeasurePreserving { atom, .. }) = p.check_measure_preserving() {
                    v.push(Violation::TopNotMeasurePreserving { index: l(i), atom });
                }
            }
            for (&(i, j), map) in &self.connect {
                if i == j {
                    continue;
                }
                if let Some(a) = (0..top.space.len())
                    .find(|&a| map.image(top.proj[j].image(a)) != top.proj[i].image(a))
                {
                    v.push(Violation::TopIncompatible {
                        i: l(i),
                        j: l(j),
                        atom: top.space.atom(a).to_string(),
                    });
                }
            }
            if let Some((a, b)) = self.unseparated_top_atoms() {
                v.push(Violation::GenerationFailure {
                    a: top.space.atom(a).to_string(),
                    b: top.space.atom(b).to_string(),
                });
            }
        }
        ValidationReport { violations: v }
    }
}
