//! JSON documents for spaces, maps, measures, random variables, diagrams,
//! martingales, measure families, dyadic grounds and metric spaces.
//!
//! Scalars are written as strings (`"3/8"` for rationals, shortest
//! round-trip decimal for floats) and read from strings or JSON numbers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{closure, ConsistentMeasureFamily, DiagramRef, DyadicGround, FiltrationDiagram, Martingale, Segment};
use crate::error::{Error, Result};
use crate::finmeas::FiniteMeasure;
use crate::finprob::{FiniteProbSpace, MeasurePreservingMap, SpaceRef};
use crate::finrv::FiniteRandomVariable;
use crate::metcat::{self, Distance, FinPseudometricSpace, LipschitzMap, MetricRef};
use crate::scalar::Scalar;

/// A scalar literal: a string such as `"1/4"` or a bare JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lit {
    Text(String),
    Number(serde_json::Number),
}

impl Lit {
    pub fn of<S: Scalar>(v: &S) -> Self {
        Lit::Text(v.to_literal())
    }

    pub fn parse<S: Scalar>(&self) -> Result<S> {
        let text = self.to_string();
        S::parse_literal(&text).ok_or_else(|| Error::Parse(format!("not a number: {text:?}")))
    }

    pub fn parse_distance<S: Scalar>(&self) -> Result<Distance<S>> {
        let text = self.to_string();
        Distance::parse(&text).ok_or_else(|| Error::Parse(format!("not a distance: {text:?}")))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Text(s) => f.write_str(s),
            Lit::Number(n) => write!(f, "{n}"),
        }
    }
}

fn parse_all<S: Scalar>(lits: &[Lit]) -> Result<Vec<S>> {
    lits.iter().map(Lit::parse).collect()
}

fn lits<S: Scalar>(vs: &[S]) -> Vec<Lit> {
    vs.iter().map(Lit::of).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub atoms: Vec<String>,
    pub weights: Vec<Lit>,
}

impl SpaceDoc {
    pub fn encode<S: Scalar>(space: &FiniteProbSpace<S>) -> Self {
        Self {
            atoms: space.atoms().to_vec(),
            weights: lits(space.weights()),
        }
    }

    pub fn decode<S: Scalar>(&self) -> Result<SpaceRef<S>> {
        Ok(FiniteProbSpace::new(self.atoms.clone(), parse_all(&self.weights)?)?.into_ref())
    }
}

/// Source label to target label.
pub type AssignDoc = BTreeMap<String, String>;

fn encode_assign<S: Scalar>(m: &MeasurePreservingMap<S>) -> AssignDoc {
    (0..m.src().len())
        .map(|a| (m.src().atom(a).to_string(), m.dst().atom(m.image(a)).to_string()))
        .collect()
}

fn decode_assign<S: Scalar>(
    src: &SpaceRef<S>,
    dst: &SpaceRef<S>,
    assign: &AssignDoc,
    checked: bool,
) -> Result<MeasurePreservingMap<S>> {
    let mut table = vec![None; src.len()];
    for (a, b) in assign {
        let i = src.index_of(a).ok_or_else(|| Error::UnknownAtom(a.clone()))?;
        let j = dst.index_of(b).ok_or_else(|| Error::UnknownAtom(b.clone()))?;
        table[i] = Some(j);
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(i, j)| j.ok_or_else(|| Error::PartialAssignment(src.atom(i).to_string())))
        .collect::<Result<Vec<_>>>()?;
    if checked {
        MeasurePreservingMap::new(src.clone(), dst.clone(), table)
    } else {
        MeasurePreservingMap::new_unchecked(src.clone(), dst.clone(), table)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub src: SpaceDoc,
    pub dst: SpaceDoc,
    pub assign: AssignDoc,
}

impl MapDoc {
    pub fn encode<S: Scalar>(m: &MeasurePreservingMap<S>) -> Self {
        Self {
            src: SpaceDoc::encode(m.src()),
            dst: SpaceDoc::encode(m.dst()),
            assign: encode_assign(m),
        }
    }

    pub fn decode<S: Scalar>(&self) -> Result<MeasurePreservingMap<S>> {
        decode_assign(&self.src.decode()?, &self.dst.decode()?, &self.assign, true)
    }

    /// Decodes against an already loaded source space, sharing its handle.
    pub fn decode_from<S: Scalar>(&self, src: &SpaceRef<S>) -> Result<MeasurePreservingMap<S>> {
        let declared: SpaceRef<S> = self.src.decode()?;
        if declared != *src {
            return Err(Error::SpaceMismatch);
        }
        decode_assign(src, &self.dst.decode()?, &self.assign, true)
    }
}

/// A measure; `space` may be omitted when supplied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDoc>,
    pub mass: Vec<Lit>,
}

fn pick_space<S: Scalar>(own: &Option<SpaceDoc>, given: Option<&SpaceRef<S>>) -> Result<SpaceRef<S>> {
    match (own, given) {
        (_, Some(s)) => {
            if let Some(doc) = own {
                if doc.decode::<S>()? != *s {
                    return Err(Error::SpaceMismatch);
                }
            }
            Ok(s.clone())
        }
        (Some(doc), None) => doc.decode(),
        (None, None) => Err(Error::Parse("no space given".into())),
    }
}

impl MeasureDoc {
    pub fn encode<S: Scalar>(mu: &FiniteMeasure<S>, with_space: bool) -> Self {
        Self {
            space: with_space.then(|| SpaceDoc::encode(mu.space())),
            mass: lits(mu.mass()),
        }
    }

    pub fn decode<S: Scalar>(&self, space: Option<&SpaceRef<S>>) -> Result<FiniteMeasure<S>> {
        FiniteMeasure::new(pick_space(&self.space, space)?, parse_all(&self.mass)?)
    }
}

/// A random variable; `space` may be omitted when supplied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RvDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDoc>,
    pub values: Vec<Lit>,
}

impl RvDoc {
    pub fn encode<S: Scalar>(x: &FiniteRandomVariable<S>, with_space: bool) -> Self {
        Self {
            space: with_space.then(|| SpaceDoc::encode(x.space())),
            values: lits(x.values()),
        }
    }

    pub fn decode<S: Scalar>(&self, space: Option<&SpaceRef<S>>) -> Result<FiniteRandomVariable<S>> {
        FiniteRandomVariable::new(pick_space(&self.space, space)?, parse_all(&self.values)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectDoc {
    pub lo: String,
    pub hi: String,
    /// Atoms of `hi` to atoms of `lo`.
    pub assign: AssignDoc,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopDoc {
    /// An index that dominates all others.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
    /// A master space outside the index set, with `proj`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub proj: BTreeMap<String, AssignDoc>,
}

/// A diagram of finite spaces. `leq` lists generating relations `[lo, hi]`
/// and `connect` gives a map for each of them; maps for the remaining
/// comparable pairs are composed. Connecting maps are read without checking
/// measure preservation so that [`FiltrationDiagram::validate`] can report it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub index: Vec<String>,
    pub spaces: BTreeMap<String, SpaceDoc>,
    #[serde(default)]
    pub leq: Vec<[String; 2]>,
    #[serde(default)]
    pub connect: Vec<ConnectDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<TopDoc>,
}

impl DiagramDoc {
    pub fn encode<S: Scalar>(d: &FiltrationDiagram<S>) -> Self {
        let spaces = (0..d.len())
            .map(|i| (d.label(i).to_string(), SpaceDoc::encode(d.space(i))))
            .collect();
        let covers = d.covering_pairs();
        let leq = covers
            .iter()
            .map(|&(i, j)| [d.label(i).to_string(), d.label(j).to_string()])
            .collect();
        let connect = covers
            .iter()
            .map(|&(i, j)| ConnectDoc {
                lo: d.label(i).to_string(),
                hi: d.label(j).to_string(),
                assign: encode_assign(d.connect(i, j).expect("covering pair is comparable")),
            })
            .collect();
        let top = d.top().map(|t| match t.index() {
            Some(i) => TopDoc {
                index: Some(d.label(i).to_string()),
                ..TopDoc::default()
            },
            None => TopDoc {
                index: None,
                space: Some(SpaceDoc::encode(t.space())),
                proj: (0..d.len())
                    .map(|i| (d.label(i).to_string(), encode_assign(t.proj(i))))
                    .collect(),
            },
        });
        Self {
            index: d.labels().to_vec(),
            spaces,
            leq,
            connect,
            top,
        }
    }

    pub fn decode<S: Scalar>(&self) -> Result<FiltrationDiagram<S>> {
        let n = self.index.len();
        let pos = |l: &str| {
            self.index
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::UnknownAtom(l.to_string()))
        };
        let spaces = self
            .index
            .iter()
            .map(|l| {
                self.spaces
                    .get(l)
                    .ok_or_else(|| Error::Parse(format!("no space for index {l:?}")))?
                    .decode::<S>()
            })
            .collect::<Result<Vec<_>>>()?;
        let relations = self
            .leq
            .iter()
            .map(|[a, b]| Ok((pos(a)?, pos(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut maps: BTreeMap<(usize, usize), MeasurePreservingMap<S>> = BTreeMap::new();
        for c in &self.connect {
            let (i, j) = (pos(&c.lo)?, pos(&c.hi)?);
            maps.insert((i, j), decode_assign(&spaces[j], &spaces[i], &c.assign, false)?);
        }
        // Compose along known maps until every comparable pair has one.
        let leq = closure(n, &relations);
        loop {
            let mut added = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || !leq[i][j] || maps.contains_key(&(i, j)) {
                        continue;
                    }
                    let via = (0..n).find(|&k| {
                        k != i && k != j && maps.contains_key(&(i, k)) && maps.contains_key(&(k, j))
                    });
                    if let Some(k) = via {
                        let m = maps[&(k, j)].compose(&maps[&(i, k)])?;
                        maps.insert((i, j), m);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let connect = maps.into_iter().map(|((i, j), m)| (i, j, m)).collect();
        let d = FiltrationDiagram::new(self.index.clone(), spaces.clone(), &relations, connect)?;
        match &self.top {
            None => Ok(d),
            Some(TopDoc { index: Some(t), .. }) => d.with_top_index(pos(t)?),
            Some(TopDoc {
                index: None,
                space: Some(sd),
                proj,
            }) => {
                let master = sd.decode::<S>()?;
                let proj = (0..n)
                    .map(|i| {
                        let a = proj
                            .get(&self.index[i])
                            .ok_or_else(|| Error::Parse(format!("no projection onto {:?}", self.index[i])))?;
                        decode_assign(&master, &spaces[i], a, true)
                    })
                    .collect::<Result<Vec<_>>>()?;
                d.with_master(master, proj)
            }
            Some(_) => Err(Error::Parse("top needs an index or a space".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleDoc {
    pub diagram: DiagramDoc,
    pub bound: Lit,
    /// Values per index label, in atom order.
    pub values: BTreeMap<String, Vec<Lit>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_second_moment: Option<Lit>,
}

fn per_index<S: Scalar, T>(
    d: &DiagramRef<S>,
    table: &BTreeMap<String, Vec<Lit>>,
    build: impl Fn(SpaceRef<S>, Vec<S>) -> Result<T>,
) -> Result<Vec<T>> {
    (0..d.len())
        .map(|i| {
            let row = table
                .get(d.label(i))
                .ok_or_else(|| Error::Parse(format!("no entry for index {:?}", d.label(i))))?;
            build(d.space(i).clone(), parse_all(row)?)
        })
        .collect()
}

impl MartingaleDoc {
    pub fn encode<S: Scalar>(m: &Martingale<S>) -> Self {
        let d = m.diagram();
        Self {
            diagram: DiagramDoc::encode(d),
            bound: Lit::of(m.bound()),
            values: (0..d.len())
                .map(|i| (d.label(i).to_string(), lits(m.level(i).values())))
                .collect(),
            limit_second_moment: m.limit_second_moment().map(Lit::of),
        }
    }

    pub fn decode<S: Scalar>(&self) -> Result<Martingale<S>> {
        let d = self.diagram.decode::<S>()?.into_ref();
        let family = per_index(&d, &self.values, FiniteRandomVariable::new)?;
        let m = Martingale::new(d, family, self.bound.parse()?)?;
        Ok(match &self.limit_second_moment {
            Some(l) => m.with_limit_second_moment(l.parse()?),
            None => m,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub diagram: DiagramDoc,
    pub bound: Lit,
    /// Masses per index label, in atom order.
    pub mass: BTreeMap<String, Vec<Lit>>,
}

impl FamilyDoc {
    pub fn encode<S: Scalar>(fam: &ConsistentMeasureFamily<S>) -> Self {
        let d = fam.diagram();
        Self {
            diagram: DiagramDoc::encode(d),
            bound: Lit::of(fam.bound()),
            mass: (0..d.len())
                .map(|i| (d.label(i).to_string(), lits(fam.member(i).mass())))
                .collect(),
        }
    }

    pub fn decode<S: Scalar>(&self) -> Result<ConsistentMeasureFamily<S>> {
        let d = self.diagram.decode::<S>()?.into_ref();
        let family = per_index(&d, &self.mass, FiniteMeasure::new)?;
        ConsistentMeasureFamily::new(d, family, self.bound.parse()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub start: Lit,
    pub end: Lit,
    pub left: Lit,
    pub right: Lit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundDoc {
    pub segments: Vec<SegmentDoc>,
}

impl GroundDoc {
    pub fn encode<S: Scalar>(g: &DyadicGround<S>) -> Self {
        Self {
            segments: g
                .segments()
                .iter()
                .map(|s| SegmentDoc {
                    start: Lit::of(&s.start),
                    end: Lit::of(&s.end),
                    left: Lit::of(&s.left),
                    right: Lit::of(&s.right),
                })
                .collect(),
        }
    }

    pub fn decode<S: Scalar>(&self) -> Result<DyadicGround<S>> {
        let segments = self
            .segments
            .iter()
            .map(|s| Ok(Segment::new(s.start.parse()?, s.end.parse()?, s.left.parse()?, s.right.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        DyadicGround::new(segments)
    }
}

/// A metric table; `"inf"` marks infinite distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    pub points: Vec<String>,
    pub dist: Vec<Vec<Lit>>,
}

impl MetricDoc {
    pub fn encode<S: Scalar>(x: &FinPseudometricSpace<S>) -> Self {
        Self {
            points: x.points().to_vec(),
            dist: x
                .table()
                .iter()
                .map(|row| row.iter().map(|d| Lit::Text(d.to_literal())).collect())
                .collect(),
        }
    }

    fn table<S: Scalar>(&self) -> Result<Vec<Vec<Distance<S>>>> {
        self.dist
            .iter()
            .map(|row| row.iter().map(Lit::parse_distance).collect())
            .collect()
    }

    /// Decodes and checks every pseudometric axiom.
    pub fn decode<S: Scalar>(&self) -> Result<FinPseudometricSpace<S>> {
        FinPseudometricSpace::new(self.points.clone(), self.table()?)
    }

    /// Decodes with shape checks only.
    pub fn decode_unchecked<S: Scalar>(&self) -> Result<FinPseudometricSpace<S>> {
        FinPseudometricSpace::new_unchecked(self.points.clone(), self.table()?)
    }
}

/// A 1-Lipschitz map between named spaces of a [`MetcatDoc`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzDoc {
    pub src: String,
    pub dst: String,
    pub assign: AssignDoc,
}

/// A batch of constructions on named spaces and maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetcatDoc {
    pub spaces: BTreeMap<String, MetricDoc>,
    #[serde(default)]
    pub maps: BTreeMap<String, LipschitzDoc>,
    pub constructions: Vec<ConstructionDoc>,
}

/// `op` is one of `product`, `coproduct`, `tensor` (space names),
/// `equalizer`, `coequalizer` (two map names), `hom` (two space names then
/// map names), `scale` (one space, with `factor`), `reflect` (one space).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionDoc {
    pub op: String,
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<Lit>,
}

/// Axiom scan of one named input space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

/// One construction with its resulting space and triangle scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub op: String,
    pub args: Vec<String>,
    pub space: MetricDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
    /// Coequalizer class pairs whose single-intermediate distance exceeds
    /// the chain distance.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub one_step_differs: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetcatReport {
    pub backend: &'static str,
    pub inputs: Vec<InputReport>,
    pub constructions: Vec<ConstructionReport>,
}

impl MetcatReport {
    /// Every constructed space passed the axiom scan. Input tables are
    /// reported but not required to be pseudometrics.
    pub fn passed(&self) -> bool {
        self.constructions.iter().all(|c| c.violation.is_none())
    }

    pub fn failures(&self) -> Vec<String> {
        self.constructions
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.violation.as_ref().map(|v| format!("construction {k} ({}): {v}", c.op)))
            .collect()
    }
}

impl MetcatDoc {
    /// Decodes the named spaces (shape checks only) and maps (1-Lipschitz
    /// checked), then performs each construction in order.
    pub fn run<S: Scalar>(&self) -> Result<MetcatReport> {
        let spaces = self
            .spaces
            .iter()
            .map(|(name, doc)| Ok((name.clone(), doc.decode_unchecked::<S>()?.into_ref())))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let space = |name: &String| {
            spaces
                .get(name)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("unknown space {name:?}")))
        };
        let maps = self
            .maps
            .iter()
            .map(|(name, doc)| {
                let m = LipschitzMap::from_labels(
                    space(&doc.src)?,
                    space(&doc.dst)?,
                    doc.assign.iter().map(|(a, b)| (a.as_str(), b.as_str())),
                )?;
                Ok((name.clone(), m))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let map = |name: &String| {
            maps.get(name)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("unknown map {name:?}")))
        };
        let pair = |c: &ConstructionDoc| match c.args.as_slice() {
            [f, g] => Ok((map(f)?, map(g)?)),
            _ => Err(Error::Parse(format!("{} takes two maps", c.op))),
        };

        let inputs = spaces
            .iter()
            .map(|(name, x)| InputReport {
                name: name.clone(),
                violation: x.first_violation().map(|v| v.to_string()),
            })
            .collect();
        let mut constructions = Vec::with_capacity(self.constructions.len());
        for c in &self.constructions {
            let mut one_step = Vec::new();
            let result: MetricRef<S> = match c.op.as_str() {
                "product" => metcat::product(&c.args.iter().map(space).collect::<Result<Vec<_>>>()?)?.space,
                "coproduct" => metcat::coproduct(&c.args.iter().map(space).collect::<Result<Vec<_>>>()?)?.space,
                "tensor" => match c.args.as_slice() {
                    [x, y] => metcat::tensor(&space(x)?, &space(y)?)?.space,
                    _ => return Err(Error::Parse("tensor takes two spaces".into())),
                },
                "equalizer" => {
                    let (f, g) = pair(c)?;
                    metcat::equalizer(&f, &g)?.space
                }
                "coequalizer" => {
                    let (f, g) = pair(c)?;
                    let q = metcat::coequalizer(&f, &g)?;
                    one_step = q
                        .one_step_differs
                        .iter()
                        .map(|&(i, j)| [q.space.point_label(i).to_string(), q.space.point_label(j).to_string()])
                        .collect();
                    q.space
                }
                "hom" => match c.args.as_slice() {
                    [x, y, rest @ ..] => {
                        let family = rest.iter().map(map).collect::<Result<Vec<_>>>()?;
                        metcat::hom(&space(x)?, &space(y)?, family)?.space
                    }
                    _ => return Err(Error::Parse("hom takes two spaces and a list of maps".into())),
                },
                "scale" => match (c.args.as_slice(), &c.factor) {
                    ([x], Some(r)) => metcat::scale(&*space(x)?, &r.parse()?)?.into_ref(),
                    _ => return Err(Error::Parse("scale takes one space and a factor".into())),
                },
                "reflect" => match c.args.as_slice() {
                    [x] => metcat::reflect(&space(x)?).space,
                    _ => return Err(Error::Parse("reflect takes one space".into())),
                },
                other => return Err(Error::Parse(format!("unknown construction {other:?}"))),
            };
            constructions.push(ConstructionReport {
                op: c.op.clone(),
                args: c.args.clone(),
                space: MetricDoc::encode(&result),
                violation: result.first_violation().map(|v| v.to_string()),
                one_step_differs: one_step,
            });
        }
        Ok(MetcatReport {
            backend: S::NAME,
            inputs,
            constructions,
        })
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
}
