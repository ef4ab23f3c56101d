//! Chords, laminations, and the basilica pullback.
//!
//! A lamination here is a finite set of pairwise non-crossing chords of the
//! closed disk, each chord joining two rational angles that are identified.
//! The basilica lamination is generated from its minor leaf `{1/3, 2/3}` by
//! repeated pullback under angle doubling; the critical diameter
//! `{1/6, 2/3}` picks which of the two possible preimage pairings is the
//! invariant one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::angle::{angle, Angle};
use crate::error::{Error, Result};

/// An unordered pair of distinct angles, stored with `lo < hi`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chord {
    lo: Angle,
    hi: Angle,
}

impl Chord {
    pub fn new(a: Angle, b: Angle) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::DegenerateChord(a.to_string())),
        }
    }

    pub fn lo(&self) -> &Angle {
        &self.lo
    }

    pub fn hi(&self) -> &Angle {
        &self.hi
    }

    pub fn has_endpoint(&self, t: &Angle) -> bool {
        &self.lo == t || &self.hi == t
    }

    pub fn shares_endpoint(&self, other: &Chord) -> bool {
        self.has_endpoint(&other.lo) || self.has_endpoint(&other.hi)
    }

    /// Two chords cross iff their four endpoints are distinct and exactly one
    /// endpoint of `other` lies in the open arc `(lo, hi)`.
    pub fn crosses(&self, other: &Chord) -> bool {
        if self.shares_endpoint(other) {
            return false;
        }
        let inside = |t: &Angle| &self.lo < t && t < &self.hi;
        inside(&other.lo) != inside(&other.hi)
    }

    /// Interval containment `[other.lo, other.hi] ⊆ [lo, hi]`, other != self.
    pub fn encloses(&self, other: &Chord) -> bool {
        self != other && self.lo <= other.lo && other.hi <= self.hi
    }

    /// Image under doubling; `None` when the chord is a diameter.
    pub fn double(&self) -> Option<Chord> {
        Chord::new(self.lo.double(), self.hi.double()).ok()
    }

    pub fn rotate_half(&self) -> Chord {
        Chord::new(self.lo.antipode(), self.hi.antipode())
            .expect("rotation keeps endpoints distinct")
    }

    /// The four preimage angles of the endpoints under doubling, sorted.
    pub fn preimage_angles(&self) -> [Angle; 4] {
        let (a0, a1) = self.lo.halve();
        let (b0, b1) = self.hi.halve();
        let mut out = [a0, a1, b0, b1];
        out.sort();
        out
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

impl fmt::Debug for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `{a,b}` or `a b` or `a,b`.
impl FromStr for Chord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let parts: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        match parts.as_slice() {
            [a, b] => Chord::new(a.parse()?, b.parse()?),
            _ => Err(Error::Parse(format!("invalid chord {s:?}"))),
        }
    }
}

/// Shorthand for tests and tables.
pub fn chord(a: (i64, i64), b: (i64, i64)) -> Chord {
    Chord::new(angle(a.0, a.1), angle(b.0, b.1)).expect("distinct endpoints")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Basilica,
    Altered,
    Intermediate,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Basilica => "basilica",
            Kind::Altered => "altered",
            Kind::Intermediate => "intermediate",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basilica" => Ok(Kind::Basilica),
            "altered" => Ok(Kind::Altered),
            "intermediate" => Ok(Kind::Intermediate),
            _ => Err(Error::Parse(format!("unknown lamination kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lamination {
    pub chords: BTreeSet<Chord>,
    pub generation: u32,
    pub kind: Kind,
}

/// Chords present in only one of two laminations.
/// Outcome of [`Lamination::verify`]; each list is empty when that check passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verification {
    pub crossings: Vec<(Chord, Chord)>,
    pub asymmetric: Vec<Chord>,
    /// Images under doubling that are not basilica chords.
    pub outside_basilica: Vec<Chord>,
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        self.crossings.is_empty() && self.asymmetric.is_empty() && self.outside_basilica.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChordDiff {
    pub only_in_a: BTreeSet<Chord>,
    pub only_in_b: BTreeSet<Chord>,
}

impl ChordDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty()
    }
}

pub fn chords_cross(c1: &Chord, c2: &Chord) -> bool {
    c1.crosses(c2)
}

impl Lamination {
    pub fn new(chords: impl IntoIterator<Item = Chord>, generation: u32, kind: Kind) -> Self {
        Self {
            chords: chords.into_iter().collect(),
            generation,
            kind,
        }
    }

    pub fn empty() -> Self {
        Self::new([], 0, Kind::Basilica)
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn contains(&self, c: &Chord) -> bool {
        self.chords.contains(c)
    }

    /// `Ok(())` when no two chords cross; otherwise every crossing pair.
    pub fn validate(&self) -> std::result::Result<(), Vec<(Chord, Chord)>> {
        if self.is_laminar() {
            return Ok(());
        }
        let chords: Vec<&Chord> = self.chords.iter().collect();
        let mut bad = Vec::new();
        for (i, c1) in chords.iter().enumerate() {
            for c2 in &chords[i + 1..] {
                if c1.crosses(c2) {
                    bad.push(((*c1).clone(), (*c2).clone()));
                }
            }
        }
        Err(bad)
    }

    pub fn is_valid(&self) -> bool {
        self.is_laminar()
    }

    /// Non-crossing chords are exactly the laminar interval families; a single
    /// sweep with a stack of open intervals decides it in O(n log n).
    fn is_laminar(&self) -> bool {
        let mut order: Vec<&Chord> = self.chords.iter().collect();
        order.sort_by(|x, y| x.lo.cmp(&y.lo).then_with(|| y.hi.cmp(&x.hi)));
        let mut open: Vec<&Chord> = Vec::new();
        for c in order {
            while let Some(top) = open.last() {
                if top.hi <= c.lo {
                    open.pop();
                } else {
                    break;
                }
            }
            if let Some(top) = open.last() {
                if c.hi > top.hi {
                    return false;
                }
            }
            open.push(c);
        }
        true
    }

    /// Image under doubling. Diameters collapse and are dropped.
    pub fn pushforward(&self) -> Lamination {
        Lamination {
            chords: self.chords.iter().filter_map(Chord::double).collect(),
            generation: self.generation.saturating_sub(1),
            kind: self.kind,
        }
    }

    pub fn rotate_half(&self) -> Lamination {
        Lamination {
            chords: self.chords.iter().map(Chord::rotate_half).collect(),
            generation: self.generation,
            kind: self.kind,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.chords
            .iter()
            .all(|c| self.chords.contains(&c.rotate_half()))
    }

    /// Structural checks shared by every lamination this crate emits: no
    /// crossings, closed under rotation by 1/2, and the doubling image lies
    /// in the basilica one generation up. Generation 0 holds only the minor
    /// leaf, whose rotation first appears at generation 1, so it is exempt
    /// from the symmetry check.
    pub fn verify(&self) -> Verification {
        let crossings = self.validate().err().unwrap_or_default();
        let asymmetric = if self.generation == 0 {
            Vec::new()
        } else {
            self.chords
                .iter()
                .filter(|c| !self.chords.contains(&c.rotate_half()))
                .cloned()
                .collect()
        };
        let base = basilica_shared(self.generation.saturating_sub(1));
        let outside_basilica = self
            .chords
            .iter()
            .filter_map(Chord::double)
            .filter(|c| !base.contains(c))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Verification {
            crossings,
            asymmetric,
            outside_basilica,
        }
    }

    pub fn chord_diff(&self, other: &Lamination) -> ChordDiff {
        ChordDiff {
            only_in_a: self.chords.difference(&other.chords).cloned().collect(),
            only_in_b: other.chords.difference(&self.chords).cloned().collect(),
        }
    }

    /// Serialized text form; identical laminations give identical bytes.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "lamination v1 generation={} kind={}\n",
            self.generation,
            self.kind.as_str()
        );
        for c in &self.chords {
            out.push_str(&format!("{} {}\n", c.lo, c.hi));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty lamination file".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("lamination") || fields.next() != Some("v1") {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let mut generation = None;
        let mut kind = None;
        for field in fields {
            match field.split_once('=') {
                Some(("generation", g)) => {
                    generation = Some(
                        g.parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad generation {g:?}")))?,
                    )
                }
                Some(("kind", k)) => kind = Some(k.parse::<Kind>()?),
                _ => return Err(Error::Parse(format!("unexpected header field {field:?}"))),
            }
        }
        let generation =
            generation.ok_or_else(|| Error::Parse("header lacks generation".into()))?;
        let kind = kind.ok_or_else(|| Error::Parse("header lacks kind".into()))?;

        let mut chords = BTreeSet::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let c: Chord = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            chords.insert(c);
        }
        Ok(Lamination {
            chords,
            generation,
            kind,
        })
    }
}

fn critical_halves() -> (Angle, Angle) {
    (angle(1, 6), angle(2, 3))
}

/// The two preimage chords of `c` that lie on the same side of the critical
/// diameter `{1/6, 2/3}`. `None` if a preimage angle lands on the diameter,
/// which only happens for chords with endpoint `1/3`.
pub fn pullback(c: &Chord) -> Option<[Chord; 2]> {
    let (d0, d1) = critical_halves();
    let side = |t: &Angle| -> Option<bool> {
        if t == &d0 || t == &d1 {
            None
        } else {
            Some(t.in_open_arc(&d0, &d1))
        }
    };
    let (a0, a1) = c.lo.halve();
    let (b0, b1) = c.hi.halve();
    let (sa0, sb0) = (side(&a0)?, side(&b0)?);
    // a0 and a1 differ by 1/2, so they always sit on opposite sides.
    let (first, second) = if sa0 == sb0 {
        (Chord::new(a0, b0), Chord::new(a1, b1))
    } else {
        (Chord::new(a0, b1), Chord::new(a1, b0))
    };
    Some([first.ok()?, second.ok()?])
}

/// Chords added at each generation `0..=generation`.
pub fn basilica_layers(generation: u32) -> Vec<Vec<Chord>> {
    let mut layers: Vec<Vec<Chord>> = vec![vec![chord((1, 3), (2, 3))]];
    if generation >= 1 {
        layers.push(vec![chord((1, 6), (5, 6))]);
    }
    for _ in 2..=generation {
        let prev = layers.last().expect("at least two layers");
        let next: Vec<Chord> = prev
            .iter()
            .flat_map(|c| pullback(c).expect("only the minor leaf touches the critical diameter"))
            .collect();
        layers.push(next);
    }
    layers
}

/// Basilica lamination with all chords of generations `0..=generation`.
pub fn basilica(generation: u32) -> Lamination {
    basilica_shared(generation).as_ref().clone()
}

/// Basilica laminations are pure functions of the generation and are needed
/// over and over (alteration planning, verification), so each is built once
/// per process.
pub(crate) fn basilica_shared(generation: u32) -> Arc<Lamination> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Lamination>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(lam) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&generation)
    {
        return Arc::clone(lam);
    }
    let lam = Arc::new(Lamination::new(
        basilica_layers(generation).into_iter().flatten(),
        generation,
        Kind::Basilica,
    ));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Arc::clone(guard.entry(generation).or_insert(lam))
}

/// The generation at which `c` first appears in the basilica, if it is a
/// basilica chord at all.
pub fn basilica_generation_of(c: &Chord) -> Option<u32> {
    let den = c.lo.den();
    if den != c.hi.den() {
        return None;
    }
    let q = &den / 3u32;
    if q.clone() * 3u32 != den || q.count_ones() != 1 {
        return None;
    }
    // Earlier generations only use denominators dividing 3 * 2^(g-1).
    let g = q.trailing_zeros().unwrap_or(0) as u32;
    basilica_shared(g).contains(c).then_some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn crossing_predicate() {
        assert!(chord((0, 1), (1, 2)).crosses(&chord((1, 4), (3, 4))));
        assert!(!chord((1, 3), (2, 3)).crosses(&chord((1, 6), (5, 6))));
        assert!(!chord((1, 6), (1, 3)).crosses(&chord((1, 6), (5, 6))));
        assert!(!chord((1, 12), (1, 6)).crosses(&chord((1, 3), (2, 3))));
    }

    #[test]
    fn degenerate_chord_is_rejected() {
        assert!(Chord::new(angle(1, 3), angle(2, 6)).is_err());
    }

    #[test]
    fn validate_reports_crossings() {
        assert_eq!(basilica(3).validate(), Ok(()));
        assert_eq!(Lamination::empty().validate(), Ok(()));
        let x = chord((0, 1), (1, 2));
        let y = chord((1, 4), (3, 4));
        let lam = Lamination::new([x.clone(), y.clone()], 0, Kind::Altered);
        assert_eq!(lam.validate(), Err(vec![(x, y)]));
    }

    #[test]
    fn sweep_and_pairwise_check_agree_on_shared_endpoints() {
        let lam = Lamination::new(
            [
                chord((1, 6), (1, 3)),
                chord((1, 3), (2, 3)),
                chord((1, 6), (5, 6)),
                chord((1, 12), (11, 12)),
            ],
            2,
            Kind::Altered,
        );
        assert!(lam.is_valid());
        let lam = Lamination::new(
            [chord((1, 6), (1, 2)), chord((1, 3), (2, 3))],
            2,
            Kind::Altered,
        );
        assert!(!lam.is_valid());
    }

    #[test]
    fn small_basilicas() {
        let b2: Vec<Chord> = basilica(2).chords.into_iter().collect();
        let mut want = vec![
            chord((1, 3), (2, 3)),
            chord((1, 6), (5, 6)),
            chord((1, 12), (11, 12)),
            chord((5, 12), (7, 12)),
        ];
        want.sort();
        assert_eq!(b2, want);

        let b3 = basilica(3);
        assert!(b3.contains(&chord((5, 24), (7, 24))));
        assert!(b3.contains(&chord((17, 24), (19, 24))));
        let b4 = basilica(4);
        assert!(b4.contains(&chord((5, 48), (7, 48))));
        assert!(b4.contains(&chord((29, 48), (31, 48))));
    }

    #[test]
    fn pushforward_examples() {
        let lam = Lamination::new([chord((1, 6), (1, 3))], 1, Kind::Altered);
        assert_eq!(
            lam.pushforward().chords,
            BTreeSet::from([chord((1, 3), (2, 3))])
        );
        let lam = Lamination::new([chord((0, 1), (1, 2))], 1, Kind::Altered);
        assert!(lam.pushforward().is_empty());
    }

    #[test]
    fn rotate_half_examples() {
        let lam = Lamination::new([chord((1, 6), (1, 3))], 1, Kind::Altered);
        assert_eq!(
            lam.rotate_half().chords,
            BTreeSet::from([chord((2, 3), (5, 6))])
        );
        assert!(Lamination::empty().rotate_half().is_empty());
    }

    #[test]
    fn chord_diff_of_identical_is_empty() {
        let b = basilica(4);
        assert!(b.chord_diff(&b).is_empty());
    }

    #[test]
    fn generation_lookup() {
        assert_eq!(basilica_generation_of(&chord((1, 3), (2, 3))), Some(0));
        assert_eq!(basilica_generation_of(&chord((1, 6), (5, 6))), Some(1));
        assert_eq!(basilica_generation_of(&chord((5, 24), (7, 24))), Some(3));
        assert_eq!(basilica_generation_of(&chord((5, 24), (19, 24))), None);
        assert_eq!(basilica_generation_of(&chord((1, 5), (2, 5))), None);
    }

    #[test]
    fn text_format_is_exact() {
        let text = basilica(1).to_text();
        assert_eq!(
            text,
            "lamination v1 generation=1 kind=basilica\n1/6 5/6\n1/3 2/3\n"
        );
        assert_eq!(Lamination::from_text(&text).unwrap(), basilica(1));
    }

    #[test]
    fn text_format_rejects_garbage() {
        assert!(Lamination::from_text("").is_err());
        assert!(Lamination::from_text("lamination v2 generation=1 kind=basilica\n").is_err());
        assert!(Lamination::from_text("lamination v1 kind=basilica\n").is_err());
        assert!(Lamination::from_text("lamination v1 generation=1 kind=odd\n").is_err());
        assert!(Lamination::from_text("lamination v1 generation=1 kind=basilica\n1/3\n").is_err());
        assert!(
            Lamination::from_text("lamination v1 generation=1 kind=basilica\n1/3 2/6\n").is_err()
        );
    }

    proptest! {
        #[test]
        fn text_round_trip(g in 0u32..7, kind in prop_oneof![Just(Kind::Basilica), Just(Kind::Altered), Just(Kind::Intermediate)]) {
            let mut lam = basilica(g);
            lam.kind = kind;
            let text = lam.to_text();
            let back = Lamination::from_text(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back, lam);
        }

        #[test]
        fn sweep_matches_pairwise(pairs in prop::collection::vec((0i64..24, 0i64..24), 0..8)) {
            let chords: Vec<Chord> = pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| chord((a, 24), (b, 24)))
                .collect();
            let lam = Lamination::new(chords.clone(), 0, Kind::Altered);
            let pairwise = chords.iter().enumerate().any(|(i, x)| chords[i + 1..].iter().any(|y| x.crosses(y)));
            prop_assert_eq!(lam.is_valid(), !pairwise);
        }
    }
}
