//! Faces of the disk cut along a lamination, and their names.
//!
//! Non-crossing chords are nested or disjoint as intervals of `[0, 1)`, so
//! the faces form a tree: every chord bounds the face just inside it (the
//! face it *encloses*) and the face just outside it. The face touching angle
//! `0` has no enclosing chord; it is an artifact of truncating the lamination
//! at finite depth and is excluded from labels and diffs.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;

use crate::angle::{angle, Angle};
use crate::error::{Error, Result};
use crate::lamination::{basilica_shared, Chord, Lamination};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Gap {
    /// The chord whose inside this face is; `None` for the outermost face.
    pub enclosing: Option<Chord>,
    /// Maximal chords strictly inside `enclosing`.
    pub inner: BTreeSet<Chord>,
}

impl Gap {
    pub fn boundary(&self) -> impl Iterator<Item = &Chord> {
        self.enclosing.iter().chain(self.inner.iter())
    }

    pub fn boundary_len(&self) -> usize {
        self.inner.len() + usize::from(self.enclosing.is_some())
    }

    pub fn is_outermost(&self) -> bool {
        self.enclosing.is_none()
    }

    pub fn touches(&self, c: &Chord) -> bool {
        self.enclosing.as_ref() == Some(c) || self.inner.contains(c)
    }
}

/// A face name `[a1,b1;a2,b2]`: `a1 ~ b2` is the outer identification,
/// `b1 ~ a2` the inner one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentLabel {
    pub a1: Angle,
    pub b1: Angle,
    pub a2: Angle,
    pub b2: Angle,
}

impl ComponentLabel {
    pub fn new(a1: Angle, b1: Angle, a2: Angle, b2: Angle) -> Result<Self> {
        if !(a1 < b1 && b1 < a2 && a2 < b2) {
            return Err(Error::Parse(format!(
                "label angles must increase strictly: [{a1},{b1};{a2},{b2}]"
            )));
        }
        Ok(Self { a1, b1, a2, b2 })
    }

    fn from_fractions(f: [(i64, i64); 4]) -> Self {
        Self::new(
            angle(f[0].0, f[0].1),
            angle(f[1].0, f[1].1),
            angle(f[2].0, f[2].1),
            angle(f[3].0, f[3].1),
        )
        .expect("table labels are increasing")
    }

    pub fn outer(&self) -> Chord {
        Chord::new(self.a1.clone(), self.b2.clone()).expect("a1 < b2")
    }

    pub fn inner(&self) -> Chord {
        Chord::new(self.b1.clone(), self.a2.clone()).expect("b1 < a2")
    }

    pub fn rotate_half(&self) -> ComponentLabel {
        let mut outer = self.outer().rotate_half();
        let mut inner = self.inner().rotate_half();
        // a pair straddling 1/2 swaps roles after the rotation
        if inner.encloses(&outer) {
            std::mem::swap(&mut outer, &mut inner);
        }
        ComponentLabel::new(
            outer.lo().clone(),
            inner.lo().clone(),
            inner.hi().clone(),
            outer.hi().clone(),
        )
        .expect("rotation of a nested pair stays nested")
    }

    /// Shorthand name, if this label is in the fixed table.
    pub fn name(&self) -> Option<&'static str> {
        NAMES
            .iter()
            .find(|(_, f)| &ComponentLabel::from_fractions(*f) == self)
            .map(|(n, _)| *n)
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{};{},{}]", self.a1, self.b1, self.a2, self.b2)
    }
}

impl fmt::Debug for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `[a1,b1;a2,b2]` or a shorthand name such as `2L`.
impl FromStr for ComponentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.starts_with('[') {
            return name_to_label(s);
        }
        let body = s
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("invalid label {s:?}")))?;
        let (top, bottom) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("label {s:?} lacks ';'")))?;
        let pair = |part: &str| -> Result<(Angle, Angle)> {
            let (x, y) = part
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("label {s:?} lacks ','")))?;
            Ok((x.parse()?, y.parse()?))
        };
        let (a1, b1) = pair(top)?;
        let (a2, b2) = pair(bottom)?;
        ComponentLabel::new(a1, b1, a2, b2)
    }
}

// Lowest-terms fractions. M through LB are the printed names; 2R, 2T, 2B,
// LT and RB were located by adjacency in the generation-6 face tree.
const NAMES: &[(&str, [(i64, i64); 4])] = &[
    ("M", [(1, 6), (1, 3), (2, 3), (5, 6)]),
    ("L", [(1, 3), (5, 12), (7, 12), (2, 3)]),
    ("R", [(1, 12), (1, 6), (5, 6), (11, 12)]),
    ("T", [(5, 24), (11, 48), (13, 48), (7, 24)]),
    ("B", [(17, 24), (35, 48), (37, 48), (19, 24)]),
    ("2L", [(5, 12), (11, 24), (13, 24), (7, 12)]),
    ("RT", [(5, 48), (11, 96), (13, 96), (7, 48)]),
    ("LB", [(29, 48), (59, 96), (61, 96), (31, 48)]),
    ("2R", [(1, 24), (1, 12), (11, 12), (23, 24)]),
    ("2T", [(11, 48), (23, 96), (25, 96), (13, 48)]),
    ("2B", [(35, 48), (71, 96), (73, 96), (37, 48)]),
    ("LT", [(17, 48), (35, 96), (37, 96), (19, 48)]),
    ("RB", [(41, 48), (83, 96), (85, 96), (43, 48)]),
];

pub fn shorthand_names() -> impl Iterator<Item = &'static str> {
    NAMES.iter().map(|(n, _)| *n)
}

pub fn name_to_label(name: &str) -> Result<ComponentLabel> {
    NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| ComponentLabel::from_fractions(*f))
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

pub fn label_to_name(label: &ComponentLabel) -> Option<&'static str> {
    label.name()
}

/// Faces of the disk cut along every chord of `lam`. The outermost face
/// comes first; the rest follow the chord order `(lo asc, hi desc)`.
pub fn compute_gaps(lam: &Lamination) -> Result<Vec<Gap>> {
    Ok(GapGraph::build(lam)?.gaps)
}

/// Face graph of the basilica at `generation`, built once per process.
pub(crate) fn basilica_graph(generation: u32) -> Result<Arc<GapGraph>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<GapGraph>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&generation)
    {
        return Ok(Arc::clone(g));
    }
    let graph = Arc::new(GapGraph::build(&basilica_shared(generation))?);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(Arc::clone(guard.entry(generation).or_insert(graph)))
}

/// Faces of a lamination together with the chord-sharing adjacency.
#[derive(Clone, Debug)]
pub struct GapGraph {
    pub generation: u32,
    pub gaps: Vec<Gap>,
    /// Computed on first use; most callers need only a few.
    labels: Vec<OnceLock<Option<ComponentLabel>>>,
    /// chord -> (face inside it, face outside it)
    sides: BTreeMap<Chord, (usize, usize)>,
}

impl GapGraph {
    pub fn build(lam: &Lamination) -> Result<Self> {
        lam.validate().map_err(Error::Crossing)?;

        let mut order: Vec<&Chord> = lam.chords.iter().collect();
        order.sort_by(|x, y| x.lo().cmp(y.lo()).then_with(|| y.hi().cmp(x.hi())));

        let mut gaps = vec![Gap {
            enclosing: None,
            inner: BTreeSet::new(),
        }];
        let mut sides = BTreeMap::new();
        let mut open: Vec<(&Chord, usize)> = Vec::new();
        for c in order {
            while let Some((top, _)) = open.last() {
                if top.hi() <= c.lo() {
                    open.pop();
                } else {
                    break;
                }
            }
            let parent = open.last().map_or(0, |&(_, idx)| idx);
            let idx = gaps.len();
            gaps.push(Gap {
                enclosing: Some(c.clone()),
                inner: BTreeSet::new(),
            });
            gaps[parent].inner.insert(c.clone());
            sides.insert(c.clone(), (idx, parent));
            open.push((c, idx));
        }

        let labels = gaps.iter().map(|_| OnceLock::new()).collect();
        Ok(Self {
            generation: lam.generation,
            gaps,
            labels,
            sides,
        })
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn label(&self, idx: usize) -> Option<&ComponentLabel> {
        self.labels[idx]
            .get_or_init(|| label_gap(&self.gaps[idx]).ok())
            .as_ref()
    }

    /// The face carrying `label`. Both naming chords lie on its boundary with
    /// the inner one nested in the outer, so it is the face just inside the
    /// outer chord.
    pub fn find(&self, label: &ComponentLabel) -> Option<usize> {
        let (inside, _) = self.faces_of(&label.outer())?;
        (self.label(inside) == Some(label)).then_some(inside)
    }

    /// The two faces on either side of `c`, inside first.
    pub fn faces_of(&self, c: &Chord) -> Option<(usize, usize)> {
        self.sides.get(c).copied()
    }

    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.gaps[idx].boundary().map(move |c| {
            let (inside, outside) = self.sides[c];
            if inside == idx {
                outside
            } else {
                inside
            }
        })
    }

    /// Shortest chain of faces from the face labeled `from` to the face
    /// labeled `to`, both ends included. The outermost face is never used.
    pub fn shortest_path(&self, from: &ComponentLabel, to: &ComponentLabel) -> Result<Vec<usize>> {
        let missing = |l: &ComponentLabel| {
            Error::InsufficientGeneration(format!(
                "no face labeled {l} at generation {}",
                self.generation
            ))
        };
        let start = self.find(from).ok_or_else(|| missing(from))?;
        let goal = self.find(to).ok_or_else(|| missing(to))?;

        let mut prev = vec![usize::MAX; self.gaps.len()];
        prev[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            if u == goal {
                break;
            }
            for v in self.neighbors(u) {
                if v != 0 && prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[goal] == usize::MAX {
            return Err(Error::InvalidPath(format!(
                "{to} is unreachable from {from}"
            )));
        }
        let mut path = vec![goal];
        while *path.last().expect("non-empty") != start {
            let last = *path.last().expect("non-empty");
            path.push(prev[last]);
        }
        path.reverse();
        Ok(path)
    }

    /// Breadth-first distances from `start` to every face reachable without
    /// passing through the outermost face.
    pub fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.gaps.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued faces have a distance");
            for v in self.neighbors(u) {
                if v != 0 && dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

fn sorted_dens(angles: [&Angle; 4]) -> [BigUint; 4] {
    let mut d = angles.map(|a| a.den());
    d.sort();
    d
}

/// Name a face by its lowest-denominator pair of nested boundary chords.
///
/// A pair whose two side arcs `(a1, b1)` and `(a2, b2)` have equal length
/// (the two identifications sit opposite each other on the face) beats any
/// unbalanced pair; within each class the ascending denominator 4-tuple
/// decides, then the angles themselves.
pub fn label_gap(gap: &Gap) -> Result<ComponentLabel> {
    let chords: Vec<&Chord> = gap.boundary().collect();
    if chords.len() < 2 {
        return Err(Error::Unlabelable);
    }
    let mut best: Option<(bool, [BigUint; 4], ComponentLabel)> = None;
    for outer in &chords {
        for inner in &chords {
            if !(outer.lo() < inner.lo() && inner.hi() < outer.hi()) {
                continue;
            }
            let (a1, b1, a2, b2) = (outer.lo(), inner.lo(), inner.hi(), outer.hi());
            let unbalanced = a1.arc_to(b1) != a2.arc_to(b2);
            let key = (unbalanced, sorted_dens([a1, b1, a2, b2]));
            let better = match &best {
                None => true,
                Some((u, d, l)) => {
                    (key.0, &key.1) < (*u, d)
                        || ((key.0, &key.1) == (*u, d)
                            && (a1, b1, a2, b2) < (&l.a1, &l.b1, &l.a2, &l.b2))
                }
            };
            if better {
                let label = ComponentLabel {
                    a1: a1.clone(),
                    b1: b1.clone(),
                    a2: a2.clone(),
                    b2: b2.clone(),
                };
                best = Some((key.0, key.1, label));
            }
        }
    }
    best.map(|(_, _, l)| l).ok_or(Error::Unlabelable)
}

/// Chain of faces from `L` to `target`; a single face when `target` is `L`.
pub fn adjacency_path(lam: &Lamination, target: &ComponentLabel) -> Result<Vec<Gap>> {
    let graph = GapGraph::build(lam)?;
    let start = name_to_label("L")?;
    let path = graph.shortest_path(&start, target)?;
    Ok(path.into_iter().map(|i| graph.gaps[i].clone()).collect())
}

/// The single chord two adjacent faces share.
pub fn meeting_chord(g1: &Gap, g2: &Gap) -> Result<Chord> {
    let shared: Vec<&Chord> = g1.boundary().filter(|c| g2.touches(c)).collect();
    match shared.as_slice() {
        [] => Err(Error::NotAdjacent),
        [c] => Ok((*c).clone()),
        many => Err(Error::AmbiguousMeeting(many.len())),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GapDiff {
    pub only_in_a: Vec<Gap>,
    pub only_in_b: Vec<Gap>,
}

/// Faces (other than the outermost) present in only one lamination.
pub fn gap_diff(a: &Lamination, b: &Lamination) -> Result<GapDiff> {
    if a.generation != b.generation {
        return Err(Error::GenerationMismatch(a.generation, b.generation));
    }
    let bounded = |lam: &Lamination| -> Result<BTreeSet<Gap>> {
        Ok(compute_gaps(lam)?
            .into_iter()
            .filter(|g| !g.is_outermost())
            .collect())
    };
    let ga = bounded(a)?;
    let gb = bounded(b)?;
    Ok(GapDiff {
        only_in_a: ga.difference(&gb).cloned().collect(),
        only_in_b: gb.difference(&ga).cloned().collect(),
    })
}
