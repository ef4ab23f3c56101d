//! Acceptance criteria 1-10. Each test prints one `criterion K: PASS|FAIL`
//! line (run with `--nocapture` to see them) and then asserts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use lamina_core::gaps::name_to_label;
use lamina_core::lamination::{basilica, chord};
use lamina_core::render::rotation_mismatch;
use lamina_core::{
    alter, classify_map, leaf_diff, pixel_mismatch, render_julia, symmetry_residual,
    toggle_pairing, AlterOptions, Angle, Chord, ComponentLabel, GapGraph, ImageBuffer, Lamination,
    MapParams, OrbitConfig, OrbitResult, RenderConfig, Target,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lamina(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamina"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("running lamina")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "lamina failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> Lamination {
    Lamination::from_text(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

/// Print the verdict line, then fail the test with the collected problems.
fn report(k: u32, started: Instant, budget: Duration, mut problems: Vec<String>) {
    let elapsed = started.elapsed();
    if elapsed >= budget {
        problems.push(format!("took {elapsed:.2?}, budget {budget:.0?}"));
    }
    let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {k}: {verdict} ({elapsed:.2?})");
    for p in &problems {
        println!("criterion {k}:   {p}");
    }
    assert!(
        problems.is_empty(),
        "criterion {k}: {}",
        problems.join("; ")
    );
}

fn check(problems: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        problems.push(what.into());
    }
}

type Ends = ((i64, i64), (i64, i64));

fn set(chords: &[Ends]) -> BTreeSet<Chord> {
    chords.iter().map(|&(a, b)| chord(a, b)).collect()
}

#[test]
fn criterion_01_basilica_reproduction() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let mut problems = Vec::new();
    stdout(&lamina(
        &["basilica", "--depth", "6", "--out", "b6.lam"],
        dir.path(),
    ));
    let lam = read(dir.path(), "b6.lam");
    let want = set(&[
        ((1, 3), (2, 3)),
        ((1, 6), (5, 6)),
        ((1, 12), (11, 12)),
        ((5, 12), (7, 12)),
        ((5, 24), (7, 24)),
        ((17, 24), (19, 24)),
        ((11, 48), (13, 48)),
        ((35, 48), (37, 48)),
        ((5, 48), (7, 48)),
        ((29, 48), (31, 48)),
    ]);
    for c in &want {
        check(&mut problems, lam.contains(c), format!("chord {c} missing"));
    }
    let gaps = stdout(&lamina(&["gaps", "b6.lam"], dir.path()));
    let printed = [
        ("M", "[1/6,1/3;2/3,5/6]"),
        ("L", "[1/3,5/12;7/12,2/3]"),
        ("R", "[1/12,1/6;5/6,11/12]"),
        ("T", "[5/24,11/48;13/48,7/24]"),
        ("B", "[17/24,35/48;37/48,19/24]"),
        ("2L", "[5/12,11/24;13/24,7/12]"),
        ("RT", "[5/48,11/96;13/96,7/48]"),
        ("LB", "[29/48,59/96;61/96,31/48]"),
    ];
    for (name, label) in printed {
        let line = format!("label={label} name={name} ");
        check(
            &mut problems,
            gaps.lines().any(|l| l.starts_with(&line)),
            format!("{name} {label} not listed"),
        );
    }
    report(1, t, Duration::from_secs(1), problems);
}

#[test]
fn criterion_02_type_0() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let mut problems = Vec::new();
    stdout(&lamina(
        &["basilica", "--depth", "6", "--out", "b6.lam"],
        dir.path(),
    ));
    stdout(&lamina(
        &["alter", "--target", "L", "--depth", "6", "--out", "l.lam"],
        dir.path(),
    ));
    let diff = stdout(&lamina(&["diff", "l.lam", "b6.lam"], dir.path()));
    check(
        &mut problems,
        diff.trim() == "chords=0 gaps=0",
        format!("diff printed {:?}", diff.trim()),
    );
    let same = std::fs::read(dir.path().join("l.lam")).unwrap()
        == std::fs::read(dir.path().join("b6.lam")).unwrap();
    check(&mut problems, same, "files differ");
    report(2, t, Duration::from_secs(1), problems);
}

#[test]
fn criterion_03_type_1_1() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let mut problems = Vec::new();
    stdout(&lamina(
        &["basilica", "--depth", "6", "--out", "b6.lam"],
        dir.path(),
    ));
    stdout(&lamina(
        &["alter", "--target", "M", "--depth", "6", "--out", "m.lam"],
        dir.path(),
    ));
    let diff = read(dir.path(), "m.lam").chord_diff(&read(dir.path(), "b6.lam"));
    check(
        &mut problems,
        diff.only_in_b == set(&[((1, 6), (5, 6)), ((1, 3), (2, 3))]),
        format!("removed {:?}", diff.only_in_b),
    );
    check(
        &mut problems,
        diff.only_in_a == set(&[((1, 6), (1, 3)), ((2, 3), (5, 6))]),
        format!("added {:?}", diff.only_in_a),
    );
    let gaps = stdout(&lamina(&["gaps", "m.lam"], dir.path()));
    for label in [
        "[1/12,5/12;7/12,11/12]",
        "[1/6,5/24;7/24,1/3]",
        "[2/3,17/24;19/24,5/6]",
    ] {
        let line = format!("label={label} ");
        check(
            &mut problems,
            gaps.lines().any(|l| l.starts_with(&line)),
            format!("{label} not listed"),
        );
    }
    let d = stdout(&lamina(&["diff", "m.lam", "b6.lam"], dir.path()));
    check(
        &mut problems,
        d.trim() == "chords=2 gaps=3",
        format!("diff printed {:?}", d.trim()),
    );
    report(3, t, Duration::from_secs(1), problems);
}

#[test]
fn criterion_04_type_1_2() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let mut problems = Vec::new();
    stdout(&lamina(
        &["basilica", "--depth", "6", "--out", "b6.lam"],
        dir.path(),
    ));
    stdout(&lamina(
        &["alter", "--target", "2L", "--depth", "6", "--out", "2l.lam"],
        dir.path(),
    ));
    let diff = read(dir.path(), "2l.lam").chord_diff(&read(dir.path(), "b6.lam"));
    check(
        &mut problems,
        diff.only_in_b == set(&[((5, 24), (7, 24)), ((17, 24), (19, 24))]),
        format!("removed {:?}", diff.only_in_b),
    );
    check(
        &mut problems,
        diff.only_in_a == set(&[((5, 24), (19, 24)), ((7, 24), (17, 24))]),
        format!("added {:?}", diff.only_in_a),
    );
    let d = stdout(&lamina(&["diff", "2l.lam", "b6.lam"], dir.path()));
    check(
        &mut problems,
        d.trim().ends_with(" gaps=3"),
        format!("diff printed {:?}", d.trim()),
    );
    report(4, t, Duration::from_secs(1), problems);
}

#[test]
fn criterion_05_type_2() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let mut problems = Vec::new();
    stdout(&lamina(
        &["basilica", "--depth", "6", "--out", "b6.lam"],
        dir.path(),
    ));
    let log = stdout(&lamina(
        &[
            "alter",
            "--target",
            "T",
            "--out",
            "t.lam",
            "--steps-dir",
            "steps/",
        ],
        dir.path(),
    ));
    let steps: Vec<&str> = log.lines().filter(|l| l.starts_with("step")).collect();
    check(
        &mut problems,
        steps.len() == 2,
        format!("{} steps", steps.len()),
    );
    check(
        &mut problems,
        steps
            .get(1)
            .is_some_and(|s| s.ends_with("added={5/48,31/48},{7/48,29/48}")),
        format!("step 2 was {:?}", steps.get(1)),
    );
    for f in ["steps/step1.lam", "steps/step2.lam"] {
        check(
            &mut problems,
            dir.path().join(f).is_file(),
            format!("{f} not written"),
        );
    }
    let gaps = stdout(&lamina(&["gaps", "t.lam"], dir.path()));
    check(
        &mut problems,
        gaps.lines()
            .any(|l| l.starts_with("label=[5/48,7/48;29/48,31/48] ")),
        "merged central gap not listed",
    );
    let d = stdout(&lamina(&["diff", "t.lam", "b6.lam"], dir.path()));
    check(
        &mut problems,
        d.trim() == "chords=4 gaps=5",
        format!("diff printed {:?}", d.trim()),
    );
    report(5, t, Duration::from_secs(1), problems);
}

/// Every face of the generation-10 face tree within distance 6 of L, with
/// its distance. Faces with no label at generation 10 (a single boundary
/// chord) are named by the face that the same enclosing chord bounds one
/// generation deeper.
fn faces_near_l(max_n: usize) -> Vec<(usize, ComponentLabel)> {
    let g10 = GapGraph::build(&basilica(10)).unwrap();
    let g11 = GapGraph::build(&basilica(11)).unwrap();
    let by_chord: BTreeMap<Chord, usize> = (1..g11.len())
        .map(|i| (g11.gaps[i].enclosing.clone().unwrap(), i))
        .collect();
    let start = g10.find(&name_to_label("L").unwrap()).unwrap();
    let mut dist = vec![usize::MAX; g10.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(i) = queue.pop_front() {
        let label = match g10.label(i) {
            Some(l) => l.clone(),
            None => {
                let c = g10.gaps[i].enclosing.as_ref().unwrap();
                g11.label(by_chord[c])
                    .expect("labelled one generation deeper")
                    .clone()
            }
        };
        out.push((dist[i], label));
        if dist[i] == max_n {
            continue;
        }
        for j in g10.neighbors(i) {
            if j != 0 && dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    out
}

#[test]
fn criterion_06_two_n_plus_one_law() {
    let t = Instant::now();
    let mut problems = Vec::new();
    let faces = faces_near_l(6);
    let base = basilica(10);
    let mut per_n = [0usize; 7];
    for (n, label) in &faces {
        per_n[*n] += 1;
        let r = match alter(
            &base,
            &Target::Label(label.clone()),
            &AlterOptions::default(),
        ) {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("{label}: {e}"));
                continue;
            }
        };
        check(
            &mut problems,
            r.n() == *n,
            format!("{label}: path length {} != {n}", r.n()),
        );
        let d = leaf_diff(&r.altered, &r.original).unwrap();
        let want = if *n == 0 { (0, 0) } else { (2 * n, 2 * n + 1) };
        check(
            &mut problems,
            (d.chord_changes(), d.gap_changes()) == want,
            format!("{label}: N={n} gave {d}"),
        );
        for (k, lam) in r
            .intermediates
            .iter()
            .chain(std::iter::once(&r.altered))
            .enumerate()
        {
            let v = lam.verify();
            check(
                &mut problems,
                v.is_ok(),
                format!("{label}: lamination {} fails verify: {v:?}", k + 1),
            );
        }
    }
    println!(
        "criterion 6:   components per N = {per_n:?} ({} total)",
        faces.len()
    );
    report(6, t, Duration::from_secs(30), problems);
}

#[test]
fn criterion_07_toggle_involution() {
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let angles = proptest::collection::btree_set((1i64..=4096, 5u32..=12), 4)
        .prop_map(|v| {
            v.into_iter()
                .map(|(k, e)| Angle::new(k % (1 << e), 1 << e).unwrap())
                .collect::<BTreeSet<_>>()
        })
        .prop_filter("four distinct angles", |s| s.len() == 4);
    let result = runner.run(&(angles, any::<bool>()), |(s, nested)| {
        let p: Vec<Angle> = s.into_iter().collect();
        let (c1, c2) = if nested {
            (
                Chord::new(p[0].clone(), p[3].clone()).unwrap(),
                Chord::new(p[1].clone(), p[2].clone()).unwrap(),
            )
        } else {
            (
                Chord::new(p[0].clone(), p[1].clone()).unwrap(),
                Chord::new(p[2].clone(), p[3].clone()).unwrap(),
            )
        };
        let (d1, d2) = toggle_pairing(&c1, &c2).unwrap();
        prop_assert!(!d1.crosses(&d2));
        prop_assert_ne!((&d1, &d2), (&c1, &c2));
        prop_assert_eq!(toggle_pairing(&d1, &d2).unwrap(), (c1, c2));
        Ok(())
    });
    if let Err(e) = result {
        problems.push(e.to_string());
    }
    report(7, t, Duration::from_secs(1), problems);
}

#[test]
fn criterion_08_rotational_symmetry() {
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for set in 0..20u64 {
        let n = [3, 4, 5][rng.random_range(0..3)];
        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let b = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let p = MapParams::new(n, a, b).unwrap();
        let r = symmetry_residual(&p, 1000, set);
        worst = worst.max(r);
        check(
            &mut problems,
            r < 1e-10,
            format!("n={n} a={a} b={b}: residual {r:e}"),
        );
    }
    println!("criterion 8:   worst residual {worst:e}");
    report(8, t, Duration::from_secs(1), problems);
}

fn describe(o: &OrbitResult) -> String {
    match &o.cycle {
        Some(c) => format!(
            "{:?}, period {}, |multiplier| {:.4}",
            o.status,
            c.period,
            c.multiplier.norm()
        ),
        None => format!("{:?}, no cycle", o.status),
    }
}

#[test]
fn criterion_09_figure_parameters() {
    let t = Instant::now();
    let mut problems = Vec::new();
    let b = Complex64::new(0.01, 0.03);
    for a in [
        Complex64::new(0.0539, -0.0118),
        Complex64::new(0.054297, -0.012066),
    ] {
        let p = MapParams::new(3, a, b).unwrap();
        let r = classify_map(&p, &OrbitConfig::default());
        println!(
            "criterion 9:   a={a}: v+ {}; v- {}",
            describe(&r.v_plus),
            describe(&r.v_minus)
        );
        check(
            &mut problems,
            r.v_plus.is_bounded(),
            format!("a={a}: v+ escapes"),
        );
        check(
            &mut problems,
            r.v_minus.is_bounded(),
            format!("a={a}: v- escapes ({:?})", r.v_minus.status),
        );
        let cycle_ok = r
            .v_plus
            .cycle
            .as_ref()
            .is_some_and(|c| c.period == 2 && c.multiplier.norm() < 1.0);
        check(
            &mut problems,
            cycle_ok,
            format!("a={a}: v+ not on an attracting 2-cycle"),
        );
    }
    report(9, t, Duration::from_secs(5), problems);
}

const FIGURE_MAP: [&str; 6] = ["--n", "3", "--a", "0.05855,-0.01282", "--b", "0.02,0.03"];

fn julia(dir: &Path, extra: &[&str], out: &str) -> ImageBuffer {
    let mut args = vec!["julia"];
    args.extend(FIGURE_MAP);
    args.extend([
        "--width", "512", "--height", "512", "--scale", "4", "--out", out,
    ]);
    args.extend(extra);
    stdout(&lamina(&args, dir));
    ImageBuffer::from_ppm(&std::fs::read(dir.join(out)).unwrap()).unwrap()
}

#[test]
fn criterion_10_rendering() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let t = Instant::now();
    let mut problems = Vec::new();
    let one = julia(dir, &["--threads", "1"], "a.ppm");
    let four = julia(dir, &["--threads", "4"], "b.ppm");
    let again = julia(dir, &["--threads", "4"], "c.ppm");
    let bytes = |f: &str| std::fs::read(dir.join(f)).unwrap();
    check(
        &mut problems,
        bytes("a.ppm") == bytes("b.ppm"),
        "output depends on thread count",
    );
    check(
        &mut problems,
        bytes("b.ppm") == bytes("c.ppm"),
        "output differs between runs",
    );
    check(
        &mut problems,
        one == four && four == again,
        "decoded images differ",
    );
    let lib = render_julia(
        &MapParams::new(
            3,
            Complex64::new(0.05855, -0.01282),
            Complex64::new(0.02, 0.03),
        )
        .unwrap(),
        &RenderConfig::default(),
    )
    .unwrap();
    check(&mut problems, lib == one, "CLI and library renders differ");

    // The sampling grid turned by k/3 about the origin: pixel (x, y) of the
    // turned render samples exactly the rotated point, so any difference is
    // a failure of invariance rather than resampling.
    for (k, turn) in [(1, "0.3333333333333333"), (2, "0.6666666666666666")] {
        let turned = julia(dir, &["--rotate", turn], &format!("r{k}.ppm"));
        let m = pixel_mismatch(&one, &turned, 0).unwrap();
        let nearest = rotation_mismatch(&one, k as f64 / 3.0, 24);
        println!(
            "criterion 10:   rotation by {k}/3 turn: {:.4}% of pixels differ (nearest-pixel resampling: {:.2}%)",
            100.0 * m,
            100.0 * nearest
        );
        check(
            &mut problems,
            m <= 0.01,
            format!("rotation {k}/3: mismatch {m:.4}"),
        );
    }
    report(10, t, Duration::from_secs(60), problems);
}
