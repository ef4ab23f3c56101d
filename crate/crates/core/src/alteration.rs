//! Split-and-reidentify: the lamination of a basilica preimage whose second
//! critical value sits in a component other than `L`.
//!
//! Walk the shortest face path `L = U_0, ..., U_N = target` in the basilica.
//! For each step the chord `s_i` where `U_i` meets `U_{i-1}` has four
//! preimage angles under doubling; they currently form two chords of the
//! working lamination, and those two are swapped for the other non-crossing
//! pairing of the same four points.

use std::fmt;

use crate::error::{Error, Result};
use crate::gaps::{basilica_graph, gap_diff, ComponentLabel, GapGraph};
use crate::lamination::{
    basilica, basilica_generation_of, basilica_shared, Chord, Kind, Lamination,
};

/// Where the second critical value is placed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// A face label or shorthand; the path is found by breadth-first search.
    Label(ComponentLabel),
    /// An explicit face chain, which must start at `L` and step between
    /// adjacent faces.
    Path(Vec<ComponentLabel>),
}

impl Target {
    pub fn name(name: &str) -> Result<Self> {
        Ok(Target::Label(name.parse()?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlterationStep {
    pub meeting_chord: Chord,
    pub removed: [Chord; 2],
    pub added: [Chord; 2],
}

impl fmt::Display for AlterationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s={} removed={},{} added={},{}",
            self.meeting_chord, self.removed[0], self.removed[1], self.added[0], self.added[1]
        )
    }
}

#[derive(Clone, Debug)]
pub struct AlterationResult {
    pub path: Vec<ComponentLabel>,
    pub steps: Vec<AlterationStep>,
    /// The basilica the steps were applied to; deeper than the input when
    /// the generation was extended.
    pub original: Lamination,
    pub altered: Lamination,
    /// Working lamination after each step except the last.
    pub intermediates: Vec<Lamination>,
}

impl AlterationResult {
    pub fn n(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AlterOptions {
    /// Deepen the basilica until the target is present, every path face is
    /// labelable and the generation is at least `N + 4`.
    pub auto_extend: bool,
    pub max_generation: u32,
}

impl Default for AlterOptions {
    fn default() -> Self {
        Self {
            auto_extend: true,
            max_generation: 20,
        }
    }
}

/// Extra generations beyond the path length, enough to see every toggled
/// chord and both naming chords of every face a step touches.
pub const DEPTH_MARGIN: u32 = 4;

/// Of the three ways to pair four points on a circle two are non-crossing;
/// given one, return the other.
pub fn toggle_pairing(c1: &Chord, c2: &Chord) -> Result<(Chord, Chord)> {
    if c1.shares_endpoint(c2) || c1.crosses(c2) {
        return Err(Error::BadPairing(
            Box::new(c1.clone()),
            Box::new(c2.clone()),
        ));
    }
    let mut p = [c1.lo(), c1.hi(), c2.lo(), c2.hi()];
    p.sort();
    let [p0, p1, p2, p3] = p.map(Clone::clone);
    let outer = Chord::new(p0.clone(), p3.clone())?;
    let nested = c1 == &outer || c2 == &outer;
    if nested {
        Ok((Chord::new(p0, p1)?, Chord::new(p2, p3)?))
    } else {
        Ok((outer, Chord::new(p1, p2)?))
    }
}

struct Plan {
    generation: u32,
    path: Vec<ComponentLabel>,
    meetings: Vec<Chord>,
}

fn plan_at(graph: &GapGraph, target: &Target) -> Result<Vec<usize>> {
    let l = crate::gaps::name_to_label("L")?;
    match target {
        Target::Label(label) => graph.shortest_path(&l, label),
        Target::Path(labels) => {
            let first = labels
                .first()
                .ok_or_else(|| Error::InvalidPath("empty path".into()))?;
            if first != &l {
                return Err(Error::InvalidPath(format!(
                    "path must start at L, not {first}"
                )));
            }
            let mut idx = Vec::with_capacity(labels.len());
            for label in labels {
                let i = graph.find(label).ok_or_else(|| {
                    Error::InsufficientGeneration(format!(
                        "no face labeled {label} at generation {}",
                        graph.generation
                    ))
                })?;
                if let Some(&prev) = idx.last() {
                    if !graph.neighbors(prev).any(|n| n == i) {
                        return Err(Error::InvalidPath(format!(
                            "{} and {label} are not adjacent",
                            graph.label(prev).expect("found by label")
                        )));
                    }
                }
                idx.push(i);
            }
            Ok(idx)
        }
    }
}

fn target_labels(target: &Target) -> &[ComponentLabel] {
    match target {
        Target::Label(l) => std::slice::from_ref(l),
        Target::Path(ls) => ls,
    }
}

/// First generation containing both naming chords of every target label.
fn label_floor(target: &Target) -> Result<u32> {
    let mut floor = 0;
    for label in target_labels(target) {
        for c in [label.outer(), label.inner()] {
            let g = basilica_generation_of(&c)
                .ok_or_else(|| Error::NoSuchComponent(label.to_string()))?;
            floor = floor.max(g);
        }
    }
    Ok(floor)
}

fn plan(generation: u32, target: &Target, opts: &AlterOptions) -> Result<Plan> {
    let floor = label_floor(target)?;
    let mut g = generation;
    if opts.auto_extend {
        g = g.max(floor);
    }
    loop {
        let graph = basilica_graph(g)?;
        let attempt = plan_at(&graph, target).and_then(|idx| {
            let labels = idx
                .iter()
                .map(|&i| {
                    graph.label(i).cloned().ok_or_else(|| {
                        Error::InsufficientGeneration(format!(
                            "path face {i} is unlabelable at generation {g}"
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let meetings = idx
                .windows(2)
                .map(|w| crate::gaps::meeting_chord(&graph.gaps[w[1]], &graph.gaps[w[0]]))
                .collect::<Result<Vec<_>>>()?;
            Ok((labels, meetings))
        });
        let needed = |meetings: &[Chord], n: usize| -> u32 {
            let toggled = meetings
                .iter()
                .map(|s| basilica_generation_of(s).map_or(u32::MAX, |x| x + 1))
                .max()
                .unwrap_or(0);
            let margin = if opts.auto_extend {
                n as u32 + DEPTH_MARGIN
            } else {
                0
            };
            toggled.max(margin)
        };
        match attempt {
            Ok((path, meetings)) => {
                let need = needed(&meetings, path.len() - 1);
                if need <= g {
                    return Ok(Plan {
                        generation: g,
                        path,
                        meetings,
                    });
                }
                if !opts.auto_extend {
                    return Err(Error::InsufficientGeneration(format!(
                        "path needs generation {need}, lamination has {g}"
                    )));
                }
                if need > opts.max_generation {
                    return Err(Error::InsufficientGeneration(format!(
                        "path needs generation {need}, above the limit {}",
                        opts.max_generation
                    )));
                }
                g = need;
            }
            Err(Error::InsufficientGeneration(msg)) => {
                // Both naming chords exist but no face carries the label.
                if g >= floor + DEPTH_MARGIN {
                    if let Some(l) = target_labels(target)
                        .iter()
                        .find(|l| graph.find(l).is_none())
                    {
                        return Err(Error::NoSuchComponent(l.to_string()));
                    }
                }
                if !opts.auto_extend || g >= opts.max_generation {
                    return Err(Error::InsufficientGeneration(msg));
                }
                g += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Apply one reidentification for meeting chord `s` to `work` in place.
pub fn apply_step(work: &mut Lamination, s: &Chord) -> Result<AlterationStep> {
    let p = s.preimage_angles();
    let pair =
        |i: usize, j: usize| Chord::new(p[i].clone(), p[j].clone()).expect("distinct preimages");
    let candidates = [
        pair(0, 1),
        pair(2, 3),
        pair(0, 3),
        pair(1, 2),
        pair(0, 2),
        pair(1, 3),
    ];
    let present: Vec<&Chord> = candidates.iter().filter(|c| work.contains(c)).collect();
    let removed = match present.as_slice() {
        [x, y] if !x.crosses(y) && !x.shares_endpoint(y) => [(*x).clone(), (*y).clone()],
        _ => {
            return Err(Error::Inconsistent(format!(
                "preimages of {s} form {} current chord(s) {:?}, expected one non-crossing pair",
                present.len(),
                present
            )))
        }
    };
    let (a, b) = toggle_pairing(&removed[0], &removed[1])?;
    for c in &removed {
        work.chords.remove(c);
    }
    work.chords.insert(a.clone());
    work.chords.insert(b.clone());
    Ok(AlterationStep {
        meeting_chord: s.clone(),
        removed,
        added: [a, b],
    })
}

fn check(lam: &Lamination, what: &str) -> Result<()> {
    if let Err(pairs) = lam.validate() {
        return Err(Error::Inconsistent(format!(
            "{what} has crossing chords {} x {}",
            pairs[0].0, pairs[0].1
        )));
    }
    if !lam.is_symmetric() {
        return Err(Error::Inconsistent(format!(
            "{what} is not symmetric under rotation by 1/2"
        )));
    }
    Ok(())
}

/// Alter the basilica `lam` for a second critical value in `target`.
pub fn alter(lam: &Lamination, target: &Target, opts: &AlterOptions) -> Result<AlterationResult> {
    if lam.kind != Kind::Basilica || lam.chords != basilica_shared(lam.generation).chords {
        return Err(Error::NotBasilica(format!(
            "kind={} with {} chords at generation {}",
            lam.kind.as_str(),
            lam.len(),
            lam.generation
        )));
    }
    let plan = plan(lam.generation, target, opts)?;
    let original = if plan.generation == lam.generation {
        lam.clone()
    } else {
        basilica(plan.generation)
    };

    let mut work = original.clone();
    let mut steps = Vec::with_capacity(plan.meetings.len());
    let mut intermediates = Vec::new();
    for (i, s) in plan.meetings.iter().enumerate() {
        steps.push(apply_step(&mut work, s)?);
        if i + 1 < plan.meetings.len() {
            let mut snap = work.clone();
            snap.kind = Kind::Intermediate;
            check(
                &snap,
                &format!("intermediate lamination after step {}", i + 1),
            )?;
            intermediates.push(snap);
        }
    }
    if !steps.is_empty() {
        work.kind = Kind::Altered;
    }
    check(&work, "altered lamination")?;

    Ok(AlterationResult {
        path: plan.path,
        steps,
        original,
        altered: work,
        intermediates,
    })
}

/// Per-side counts of chords and bounded faces that differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeafDiff {
    pub chords_only_in_a: usize,
    pub chords_only_in_b: usize,
    pub gaps_only_in_a: usize,
    pub gaps_only_in_b: usize,
}

impl LeafDiff {
    pub fn chord_changes(&self) -> usize {
        self.chords_only_in_a.max(self.chords_only_in_b)
    }

    pub fn gap_changes(&self) -> usize {
        self.gaps_only_in_a.max(self.gaps_only_in_b)
    }

    pub fn is_balanced(&self) -> bool {
        self.chords_only_in_a == self.chords_only_in_b && self.gaps_only_in_a == self.gaps_only_in_b
    }
}

impl fmt::Display for LeafDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_balanced() {
            write!(
                f,
                "chords={} gaps={}",
                self.chords_only_in_a, self.gaps_only_in_a
            )
        } else {
            write!(
                f,
                "chords={}/{} gaps={}/{}",
                self.chords_only_in_a,
                self.chords_only_in_b,
                self.gaps_only_in_a,
                self.gaps_only_in_b
            )
        }
    }
}

pub fn leaf_diff(a: &Lamination, b: &Lamination) -> Result<LeafDiff> {
    let chords = a.chord_diff(b);
    let gaps = gap_diff(a, b)?;
    Ok(LeafDiff {
        chords_only_in_a: chords.only_in_a.len(),
        chords_only_in_b: chords.only_in_b.len(),
        gaps_only_in_a: gaps.only_in_a.len(),
        gaps_only_in_b: gaps.only_in_b.len(),
    })
}

pub fn leaf_diff_report(result: &AlterationResult, original: &Lamination) -> Result<LeafDiff> {
    leaf_diff(&result.altered, original)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::name_to_label;
    use crate::lamination::chord;

    #[test]
    fn toggle_examples() {
        let (a, b) = toggle_pairing(&chord((1, 6), (5, 6)), &chord((1, 3), (2, 3))).unwrap();
        assert_eq!((a, b), (chord((1, 6), (1, 3)), chord((2, 3), (5, 6))));
        let (a, b) = toggle_pairing(&chord((5, 48), (7, 48)), &chord((29, 48), (31, 48))).unwrap();
        assert_eq!((a, b), (chord((5, 48), (31, 48)), chord((7, 48), (29, 48))));
    }

    #[test]
    fn toggle_rejects_bad_input() {
        assert!(toggle_pairing(&chord((0, 1), (1, 2)), &chord((1, 4), (3, 4))).is_err());
        assert!(toggle_pairing(&chord((1, 6), (1, 3)), &chord((1, 3), (2, 3))).is_err());
    }

    #[test]
    fn target_l_is_identity() {
        let b = basilica(6);
        let r = alter(&b, &Target::name("L").unwrap(), &AlterOptions::default()).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.altered, b);
        assert_eq!(r.path, vec![name_to_label("L").unwrap()]);
    }

    #[test]
    fn target_m_single_step() {
        let r = alter(
            &basilica(5),
            &Target::name("M").unwrap(),
            &AlterOptions::default(),
        )
        .unwrap();
        assert_eq!(r.steps.len(), 1);
        let s = &r.steps[0];
        assert_eq!(s.meeting_chord, chord((1, 3), (2, 3)));
        assert_eq!(s.removed, [chord((1, 6), (5, 6)), chord((1, 3), (2, 3))]);
        assert_eq!(s.added, [chord((1, 6), (1, 3)), chord((2, 3), (5, 6))]);
        assert!(r.intermediates.is_empty());
        assert_eq!(r.altered.kind, Kind::Altered);
    }

    #[test]
    fn auto_extension_reaches_n_plus_margin() {
        let r = alter(
            &basilica(0),
            &Target::name("T").unwrap(),
            &AlterOptions::default(),
        )
        .unwrap();
        assert_eq!(r.n(), 2);
        assert_eq!(r.original.generation, 6);
        assert_eq!(r.altered.generation, 6);
    }

    #[test]
    fn fixed_depth_is_respected_or_rejected() {
        let opts = AlterOptions {
            auto_extend: false,
            ..AlterOptions::default()
        };
        let r = alter(&basilica(4), &Target::name("T").unwrap(), &opts).unwrap();
        assert_eq!(r.altered.generation, 4);
        let err = alter(&basilica(3), &Target::name("RT").unwrap(), &opts).unwrap_err();
        assert!(matches!(err, Error::InsufficientGeneration(_)));
    }

    #[test]
    fn explicit_paths_are_validated() {
        let l = |n: &str| name_to_label(n).unwrap();
        let opts = AlterOptions::default();
        let ok = alter(
            &basilica(6),
            &Target::Path(vec![l("L"), l("M"), l("T")]),
            &opts,
        )
        .unwrap();
        let by_name = alter(&basilica(6), &Target::name("T").unwrap(), &opts).unwrap();
        assert_eq!(ok.altered, by_name.altered);

        let err = alter(&basilica(6), &Target::Path(vec![l("L"), l("T")]), &opts).unwrap_err();
        assert!(matches!(err, Error::InvalidPath(_)));
        let err = alter(&basilica(6), &Target::Path(vec![l("M"), l("T")]), &opts).unwrap_err();
        assert!(matches!(err, Error::InvalidPath(_)));
        let err = alter(&basilica(6), &Target::Path(vec![]), &opts).unwrap_err();
        assert!(matches!(err, Error::InvalidPath(_)));
    }

    #[test]
    fn non_basilica_input_is_rejected() {
        let mut lam = basilica(4);
        lam.kind = Kind::Altered;
        assert!(matches!(
            alter(&lam, &Target::name("M").unwrap(), &AlterOptions::default()),
            Err(Error::NotBasilica(_))
        ));
    }

    #[test]
    fn backtracking_step_undoes_itself() {
        let mut w = basilica(6);
        let s = chord((1, 3), (2, 3));
        let first = apply_step(&mut w, &s).unwrap();
        let second = apply_step(&mut w, &s).unwrap();
        assert_eq!(second.added, first.removed);
        assert_eq!(w.chords, basilica(6).chords);
    }

    #[test]
    fn step_without_matching_chords_is_an_error() {
        let mut w = basilica(2);
        let err = apply_step(&mut w, &chord((5, 24), (7, 24))).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
    }
}
