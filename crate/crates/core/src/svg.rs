//! SVG lamination diagrams: the unit circle with straight chords.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt::Write;

use crate::lamination::{Chord, Lamination};

/// A set of chords to stroke in `color`. Chords not in the lamination (for
/// example ones a step removed) are drawn dashed.
#[derive(Clone, Debug)]
pub struct Highlight {
    pub color: String,
    pub chords: BTreeSet<Chord>,
}

impl Highlight {
    pub fn new(color: impl Into<String>, chords: impl IntoIterator<Item = Chord>) -> Self {
        Self {
            color: color.into(),
            chords: chords.into_iter().collect(),
        }
    }
}

fn point(t: f64) -> (f64, f64) {
    // y is flipped so angles run counterclockwise on screen
    let (s, c) = (TAU * t).sin_cos();
    (c, -s)
}

fn line(out: &mut String, c: &Chord, color: &str, dashed: bool) {
    let (x1, y1) = point(c.lo().to_f64());
    let (x2, y2) = point(c.hi().to_f64());
    let dash = if dashed {
        r#" stroke-dasharray="0.02 0.015""#
    } else {
        ""
    };
    writeln!(
        out,
        r#"  <line class="chord" data-chord="{} {}" x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}" stroke="{color}" stroke-width="0.006"{dash}/>"#,
        c.lo(),
        c.hi()
    )
    .expect("writing to a String");
}

pub fn lamination_to_svg(lam: &Lamination, highlights: &[Highlight]) -> String {
    let mut out = String::new();
    out.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    out.push('\n');
    out.push_str(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="-1.1 -1.1 2.2 2.2" width="800" height="800">"#,
    );
    out.push('\n');
    writeln!(
        out,
        "  <title>lamination generation={} kind={}</title>",
        lam.generation,
        lam.kind.as_str()
    )
    .expect("writing to a String");
    out.push_str(r#"  <rect x="-1.1" y="-1.1" width="2.2" height="2.2" fill="white"/>"#);
    out.push('\n');
    out.push_str(
        r#"  <circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.008"/>"#,
    );
    out.push('\n');

    let color_of = |c: &Chord| {
        highlights
            .iter()
            .rev()
            .find(|h| h.chords.contains(c))
            .map(|h| h.color.as_str())
    };
    for c in &lam.chords {
        line(&mut out, c, color_of(c).unwrap_or("black"), false);
    }
    for h in highlights {
        for c in h.chords.iter().filter(|c| !lam.contains(c)) {
            line(&mut out, c, &h.color, true);
        }
    }
    out.push_str("</svg>\n");
    out
}
