//! `lamina`: basilica laminations, their alterations, and Julia-set renders
//! from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lamina_core::alteration::DEPTH_MARGIN;
use lamina_core::dynamics::OrbitResult;
use lamina_core::{
    alter, basilica, classify_map, lamination_to_svg, leaf_diff, pixel_mismatch, render_julia,
    rotation_mismatch, symmetry_residual, write_ppm, AlterOptions, Chord, ComponentLabel, GapGraph,
    Highlight, ImageBuffer, Lamination, MapParams, OrbitConfig, Palette, RenderConfig, Target,
};
use num_complex::Complex64;

/// `println!` that reports write failures (a closed pipe) instead of panicking.
macro_rules! outln {
    ($($t:tt)*) => {
        writeln!(std::io::stdout(), $($t)*)?
    };
}

#[derive(Parser, Debug)]
#[command(
    name = "lamina",
    version,
    about = "Basilica laminations, altered pullbacks and Julia-set renders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the basilica lamination truncated at a generation.
    Basilica {
        /// Generation (pullback depth).
        #[arg(long, default_value_t = 6)]
        depth: u32,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Alter the basilica for a second critical value in another component.
    Alter {
        #[command(flatten)]
        target: TargetArgs,
        /// Exact generation to work at. Without it the generation is chosen
        /// automatically: at least N+4 for a path of N steps.
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        /// Also write each intermediate lamination as stepK.lam here.
        #[arg(long)]
        steps_dir: Option<PathBuf>,
    },
    /// Count chords and bounded faces that differ between two laminations.
    Diff { a: PathBuf, b: PathBuf },
    /// Check non-crossing, 180° symmetry and pushforward into the basilica.
    Verify { file: PathBuf },
    /// List the labelled faces of a lamination.
    Gaps { file: PathBuf },
    /// Print the face path from L to a target in the basilica.
    Path {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Draw a lamination as SVG.
    Svg {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// COLOR:CHORD;CHORD;... where each chord is "lo hi", e.g.
        /// "red:1/6 1/3;2/3 5/6". Repeatable.
        #[arg(long)]
        highlight: Vec<String>,
        /// Colour chords absent from this lamination red and draw the ones
        /// only it has dashed blue.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Render the Julia set of F(z) = z^n + a/z^n + b as binary PPM.
    Julia {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        /// Image center as re,im.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true, value_parser = parse_complex)]
        center: Complex64,
        /// Width of the image in the complex plane.
        #[arg(long, default_value_t = 4.0)]
        scale: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e6)]
        escape_radius: f64,
        /// classic or gray.
        #[arg(long, default_value = "classic")]
        palette: Palette,
        /// Rotate the sampling grid counterclockwise about the center, in turns.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rotate: f64,
        /// Samples per pixel side; pixels are the mean of supersample² samples.
        #[arg(long, default_value_t = 1)]
        supersample: usize,
        /// Worker threads; 0 uses every core. The image does not depend on it.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Follow both critical-value orbits and report any attracting cycle.
    Classify {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e6)]
        escape_radius: f64,
        /// Recurrence tolerance for cycle detection.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Largest deviation from n-fold rotational symmetry over random samples.
    Symmetry {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fraction of pixels at which two PPM images of equal size differ.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Per-channel difference tolerated before a pixel counts as changed.
        #[arg(long, default_value_t = 0)]
        channel_tol: u8,
    },
    /// Fraction of pixels of a PPM that change under rotation by 1/n turn,
    /// resampled to the nearest pixel.
    Rotation {
        file: PathBuf,
        #[arg(long)]
        n: u32,
        /// Per-channel difference tolerated before a pixel counts as changed.
        #[arg(long, default_value_t = 24)]
        channel_tol: u8,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Shorthand name (M, T, 2L, ...) or label "[a1,b1;a2,b2]".
    #[arg(long)]
    target: Option<String>,
    /// Explicit comma-separated face path starting at L, e.g. "L,M,T".
    #[arg(long)]
    path: Option<String>,
}

impl TargetArgs {
    fn resolve(&self) -> Result<Target> {
        match (&self.target, &self.path) {
            (Some(t), None) => Ok(Target::Label(t.trim().parse()?)),
            (None, Some(p)) => {
                let labels = split_path(p)
                    .into_iter()
                    .map(|s| s.parse::<ComponentLabel>())
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Target::Path(labels))
            }
            _ => bail!("give exactly one of --target and --path"),
        }
    }
}

#[derive(Args, Debug)]
struct MapArgs {
    /// Degree n ≥ 3.
    #[arg(long)]
    n: u32,
    /// Parameter a as re,im.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    a: Complex64,
    /// Parameter b as re,im.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    b: Complex64,
}

impl MapArgs {
    fn params(&self) -> Result<MapParams> {
        Ok(MapParams::new(self.n, self.a, self.b)?)
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

/// Split on commas outside brackets so labels can appear in a path.
fn split_path(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    parts.push(cur.trim().to_string());
    parts
}

fn read_lamination(path: &Path) -> Result<Lamination> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Lamination::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_ppm(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    ImageBuffer::from_ppm(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn write_lamination(path: &Path, lam: &Lamination) -> Result<()> {
    fs::write(path, lam.to_text()).with_context(|| format!("writing {}", path.display()))
}

fn alter_options(depth: Option<u32>) -> (Lamination, AlterOptions) {
    match depth {
        Some(g) => (
            basilica(g),
            AlterOptions {
                auto_extend: false,
                ..AlterOptions::default()
            },
        ),
        None => (basilica(DEPTH_MARGIN), AlterOptions::default()),
    }
}

fn face_name(label: &ComponentLabel) -> String {
    label
        .name()
        .map_or_else(|| label.to_string(), str::to_string)
}

fn parse_highlight(arg: &str) -> Result<Highlight> {
    let (color, chords) = arg
        .split_once(':')
        .with_context(|| format!("highlight {arg:?} should be COLOR:CHORD;CHORD;..."))?;
    let chords = chords
        .split(';')
        .filter(|c| !c.trim().is_empty())
        .map(|c| c.trim().parse::<Chord>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Highlight::new(color, chords))
}

fn print_orbit(tag: &str, o: &OrbitResult) -> Result<()> {
    match o.status {
        lamina_core::OrbitStatus::Escaped(k) => {
            outln!("{tag}_status=escaped {tag}_escape_iter={k}")
        }
        lamina_core::OrbitStatus::Bounded => outln!("{tag}_status=bounded"),
    }
    match &o.cycle {
        Some(c) => {
            let z = c.points.last().copied().unwrap_or_default();
            outln!("{tag}_period={}", c.period);
            outln!(
                "{tag}_multiplier={:.12e},{:.12e}",
                c.multiplier.re,
                c.multiplier.im
            );
            outln!("{tag}_multiplier_abs={:.12e}", c.multiplier.norm());
            outln!("{tag}_attracting={}", c.is_attracting());
            outln!("{tag}_cycle_point={:.12},{:.12}", z.re, z.im);
        }
        None => outln!("{tag}_period=none"),
    }
    Ok(())
}

/// Err(...) is an ordinary failure; Ok(false) means a check did not pass.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Basilica { depth, out } => {
            let lam = basilica(depth);
            match out {
                Some(p) => write_lamination(&p, &lam)?,
                None => write!(std::io::stdout(), "{}", lam.to_text())?,
            }
        }
        Command::Alter {
            target,
            depth,
            out,
            steps_dir,
        } => {
            let (base, opts) = alter_options(depth);
            let result = alter(&base, &target.resolve()?, &opts)?;
            let names: Vec<String> = result.path.iter().map(face_name).collect();
            outln!("path={}", names.join(","));
            outln!("generation={}", result.altered.generation);
            for (i, step) in result.steps.iter().enumerate() {
                outln!("step{}: {step}", i + 1);
            }
            if let Some(dir) = steps_dir {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                let all = result
                    .intermediates
                    .iter()
                    .chain(std::iter::once(&result.altered));
                for (i, lam) in all.take(result.n()).enumerate() {
                    write_lamination(&dir.join(format!("step{}.lam", i + 1)), lam)?;
                }
            }
            write_lamination(&out, &result.altered)?;
            outln!("{}", leaf_diff(&result.altered, &result.original)?);
        }
        Command::Diff { a, b } => {
            let (a, b) = (read_lamination(&a)?, read_lamination(&b)?);
            outln!("{}", leaf_diff(&a, &b)?);
        }
        Command::Verify { file } => {
            let lam = read_lamination(&file)?;
            let v = lam.verify();
            let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
            outln!("non_crossing={}", mark(v.crossings.is_empty()));
            for (c1, c2) in v.crossings.iter().take(10) {
                outln!("  crossing {c1} {c2}");
            }
            outln!("symmetric={}", mark(v.asymmetric.is_empty()));
            for c in v.asymmetric.iter().take(10) {
                outln!("  missing rotation of {c}");
            }
            outln!(
                "pushforward_in_basilica={}",
                mark(v.outside_basilica.is_empty())
            );
            for c in v.outside_basilica.iter().take(10) {
                outln!(
                    "  image {c} not in basilica({})",
                    lam.generation.saturating_sub(1)
                );
            }
            return Ok(v.is_ok());
        }
        Command::Gaps { file } => {
            let lam = read_lamination(&file)?;
            let graph = GapGraph::build(&lam)?;
            let mut rows: Vec<(ComponentLabel, usize)> = (1..graph.len())
                .filter_map(|i| {
                    graph
                        .label(i)
                        .map(|l| (l.clone(), graph.gaps[i].boundary_len()))
                })
                .collect();
            rows.sort();
            for (label, boundary) in &rows {
                outln!(
                    "label={label} name={} boundary={boundary}",
                    label.name().unwrap_or("-")
                );
            }
            let unlabelled = graph.len() - 1 - rows.len();
            outln!(
                "faces={} labelled={} unlabelled={unlabelled}",
                graph.len() - 1,
                rows.len()
            );
        }
        Command::Path { target, depth } => {
            let (base, opts) = alter_options(depth);
            let result = alter(&base, &target.resolve()?, &opts)?;
            let names: Vec<String> = result.path.iter().map(face_name).collect();
            outln!("path={}", names.join(","));
            outln!("n={}", result.n());
            for (label, step) in result.path.iter().skip(1).zip(&result.steps) {
                outln!(
                    "{} {label} meets at {}",
                    face_name(label),
                    step.meeting_chord
                );
            }
        }
        Command::Svg {
            file,
            out,
            highlight,
            against,
        } => {
            let lam = read_lamination(&file)?;
            let mut highlights = Vec::new();
            if let Some(base) = against {
                let base = read_lamination(&base)?;
                let diff = lam.chord_diff(&base);
                highlights.push(Highlight::new("red", diff.only_in_a));
                highlights.push(Highlight::new("blue", diff.only_in_b));
            }
            for h in &highlight {
                highlights.push(parse_highlight(h)?);
            }
            fs::write(&out, lamination_to_svg(&lam, &highlights))
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Julia {
            map,
            width,
            height,
            center,
            scale,
            max_iter,
            escape_radius,
            palette,
            rotate,
            supersample,
            threads,
            out,
        } => {
            let p = map.params()?;
            let cfg = RenderConfig {
                width,
                height,
                center,
                scale,
                max_iter,
                escape_radius,
                palette,
                supersample,
                rotation: rotate,
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()?;
            let img = pool.install(|| render_julia(&p, &cfg))?;
            write_ppm(&img, &out)?;
        }
        Command::Classify {
            map,
            max_iter,
            escape_radius,
            tol,
        } => {
            let p = map.params()?;
            let cfg = OrbitConfig {
                max_iter,
                escape_radius,
                tol,
                ..OrbitConfig::default()
            };
            let (vp, vm) = p.critical_values();
            outln!("v_plus={:.12},{:.12}", vp.re, vp.im);
            outln!("v_minus={:.12},{:.12}", vm.re, vm.im);
            let report = classify_map(&p, &cfg);
            print_orbit("v_plus", &report.v_plus)?;
            print_orbit("v_minus", &report.v_minus)?;
            outln!("same_cycle={}", report.same_cycle);
        }
        Command::Symmetry { map, samples, seed } => {
            let p = map.params()?;
            if samples == 0 {
                bail!("--samples must be at least 1");
            }
            outln!("residual={:e}", symmetry_residual(&p, samples, seed));
        }
        Command::Compare { a, b, channel_tol } => {
            let (a, b) = (read_ppm(&a)?, read_ppm(&b)?);
            outln!("mismatch={:.6}", pixel_mismatch(&a, &b, channel_tol)?);
        }
        Command::Rotation {
            file,
            n,
            channel_tol,
        } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let img = read_ppm(&file)?;
            outln!(
                "mismatch={:.6}",
                rotation_mismatch(&img, 1.0 / n as f64, channel_tol)
            );
        }
    }
    Ok(true)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
