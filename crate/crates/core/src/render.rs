//! Escape-time pictures of `J(F)` written as binary PPM.
//!
//! Escaping pixels are colored by a smoothed iteration count. Pixels captured
//! by an attracting cycle of a critical value are colored by the cycle phase
//! at which they arrive, so neighbouring Fatou components of a period-2 basin
//! alternate in shade.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{classify_map, Cycle, MapParams, OrbitConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Palette {
    #[default]
    Classic,
    Gray,
}

impl std::str::FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(Palette::Classic),
            "gray" | "grey" => Ok(Palette::Gray),
            _ => Err(Error::Parse(format!("unknown palette {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RenderConfig {
    pub width: usize,
    pub height: usize,
    pub center: Complex64,
    /// Width of the image in the complex plane; pixels are square.
    pub scale: f64,
    pub max_iter: usize,
    pub escape_radius: f64,
    pub palette: Palette,
    /// Samples per pixel side; each pixel is the mean of `supersample²`
    /// samples spread evenly over its square.
    pub supersample: usize,
    /// Counterclockwise rotation of the sampling grid about `center`, in
    /// turns.
    pub rotation: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            center: Complex64::new(0.0, 0.0),
            scale: 4.0,
            max_iter: 500,
            escape_radius: 1e6,
            palette: Palette::Classic,
            supersample: 1,
            rotation: 0.0,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidConfig(
                "width and height must be at least 1".into(),
            ));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidConfig("scale must be positive".into()));
        }
        if self.escape_radius.is_nan() || self.escape_radius <= 0.0 {
            return Err(Error::InvalidConfig(
                "escape radius must be positive".into(),
            ));
        }
        if !self.rotation.is_finite() {
            return Err(Error::InvalidConfig("rotation must be finite".into()));
        }
        if self.supersample == 0 || self.supersample > 16 {
            return Err(Error::InvalidConfig(
                "supersample must be between 1 and 16".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Complex coordinate of the center of pixel `(x, y)`, `y` growing down.
    pub fn pixel_to_point(&self, x: usize, y: usize) -> Complex64 {
        self.subpixel_to_point(x, y, 0, 0, 1)
    }

    /// Center of sub-sample `(i, j)` when pixel `(x, y)` is split `k × k`.
    fn subpixel_to_point(&self, x: usize, y: usize, i: usize, j: usize, k: usize) -> Complex64 {
        let step = self.scale / self.width as f64;
        let fx = x as f64 + (i as f64 + 0.5) / k as f64;
        let fy = y as f64 + (j as f64 + 0.5) / k as f64;
        let offset = Complex64::new(
            (fx - self.width as f64 / 2.0) * step,
            (self.height as f64 / 2.0 - fy) * step,
        );
        if self.rotation == 0.0 {
            self.center + offset
        } else {
            self.center + offset * Complex64::from_polar(1.0, std::f64::consts::TAU * self.rotation)
        }
    }
}

/// Row-major RGB pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != 3 * width * height {
            return Err(Error::InvalidConfig(format!(
                "buffer of {} bytes does not hold {width}x{height} RGB pixels",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            data: rgb.repeat(width * height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("PPM: {m}"));
        let mut fields = Vec::with_capacity(4);
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(
                std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?,
            );
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("only binary P6 with maxval 255 is supported"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
        // exactly one whitespace byte separates the header from the raster
        let raster = bytes.get(pos + 1..).ok_or_else(|| bad("missing raster"))?;
        ImageBuffer::new(width, height, raster.to_vec())
    }
}

pub fn write_ppm(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&img.to_ppm())?;
    f.flush()?;
    Ok(())
}

/// Radius within which an orbit counts as captured by a cycle point.
const CAPTURE_RADIUS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
enum PixelClass {
    Escaped(f64),
    Captured {
        cycle: usize,
        phase: usize,
        period: usize,
    },
    Bounded,
}

fn classify_pixel(
    p: &MapParams,
    z0: Complex64,
    cfg: &RenderConfig,
    cycles: &[Cycle],
) -> PixelClass {
    let log_r = cfg.escape_radius.ln();
    let log_n = (p.n() as f64).ln();
    let mut z = z0;
    for k in 0..cfg.max_iter {
        let r = z.norm();
        if r.is_nan() || r > cfg.escape_radius {
            let nu = if r.is_finite() && log_r > 0.0 {
                k as f64 + 1.0 - ((r.ln() / log_r).ln() / log_n)
            } else {
                k as f64
            };
            return PixelClass::Escaped(nu.max(0.0));
        }
        z = match p.eval(z) {
            Some(w) => w,
            None => return PixelClass::Escaped(k as f64 + 1.0),
        };
        for (ci, cyc) in cycles.iter().enumerate() {
            if let Some(j) = cyc
                .points
                .iter()
                .position(|pt| (z - pt).norm() < CAPTURE_RADIUS)
            {
                let period = cyc.period;
                let phase = (j + period - (k + 1) % period) % period;
                return PixelClass::Captured {
                    cycle: ci,
                    phase,
                    period,
                };
            }
        }
    }
    // Not captured yet: take the nearest cycle point at the cutoff.
    let nearest = cycles
        .iter()
        .enumerate()
        .flat_map(|(ci, cyc)| {
            cyc.points
                .iter()
                .enumerate()
                .map(move |(j, pt)| (ci, j, cyc.period, (z - pt).norm()))
        })
        .min_by(|x, y| x.3.total_cmp(&y.3));
    match nearest {
        Some((cycle, j, period, _)) => {
            let phase = (j + period - cfg.max_iter % period) % period;
            PixelClass::Captured {
                cycle,
                phase,
                period,
            }
        }
        None => PixelClass::Bounded,
    }
}

fn color(class: PixelClass, palette: Palette) -> [u8; 3] {
    match (palette, class) {
        (Palette::Classic, PixelClass::Escaped(nu)) => {
            let t = (nu * 0.08).rem_euclid(1.0);
            let ch = |phase: f64| {
                (127.5 * (1.0 + (std::f64::consts::TAU * (t + phase)).cos())).round() as u8
            };
            [ch(0.0), ch(0.15), ch(0.35)]
        }
        (Palette::Gray, PixelClass::Escaped(nu)) => {
            let v = (255.0 * (1.0 - (-nu / 12.0).exp())).round() as u8;
            [v, v, v]
        }
        (
            palette,
            PixelClass::Captured {
                cycle,
                phase,
                period,
            },
        ) => {
            let shade = 1.0 - 0.45 * phase as f64 / period.max(1) as f64;
            let base: [f64; 3] = match (palette, cycle % 2) {
                (Palette::Gray, _) => [40.0, 40.0, 40.0],
                (_, 0) => [30.0, 60.0, 160.0],
                _ => [150.0, 40.0, 60.0],
            };
            base.map(|c| (c * shade).round() as u8)
        }
        (_, PixelClass::Bounded) => [0, 0, 0],
    }
}

/// Attracting cycles reached by the critical values, deduplicated.
pub fn critical_cycles(p: &MapParams) -> Vec<Cycle> {
    let report = classify_map(p, &OrbitConfig::default());
    let mut cycles: Vec<Cycle> = Vec::new();
    for orbit in [&report.v_plus, &report.v_minus] {
        if let Some(c) = &orbit.cycle {
            if !c.is_attracting() {
                continue;
            }
            let dup = cycles.iter().any(|d| {
                d.period == c.period
                    && c.points
                        .iter()
                        .all(|z| d.points.iter().any(|w| (z - w).norm() < 1e-4))
            });
            if !dup {
                cycles.push(c.clone());
            }
        }
    }
    cycles
}

/// Render `J(F)` over the pixel grid of `cfg`. Rows are computed in parallel
/// into a preallocated buffer, so the bytes do not depend on the thread count.
pub fn render_julia(p: &MapParams, cfg: &RenderConfig) -> Result<ImageBuffer> {
    cfg.validate()?;
    let cycles = critical_cycles(p);
    let mut data = vec![0u8; 3 * cfg.width * cfg.height];
    data.par_chunks_mut(3 * cfg.width)
        .enumerate()
        .for_each(|(y, row)| {
            for x in 0..cfg.width {
                let k = cfg.supersample;
                let rgb = if k == 1 {
                    color(
                        classify_pixel(p, cfg.pixel_to_point(x, y), cfg, &cycles),
                        cfg.palette,
                    )
                } else {
                    let mut sum = [0u32; 3];
                    for j in 0..k {
                        for i in 0..k {
                            let z = cfg.subpixel_to_point(x, y, i, j, k);
                            let c = color(classify_pixel(p, z, cfg, &cycles), cfg.palette);
                            for (s, v) in sum.iter_mut().zip(c) {
                                *s += u32::from(v);
                            }
                        }
                    }
                    let n = (k * k) as u32;
                    sum.map(|s| ((s + n / 2) / n) as u8)
                };
                row[3 * x..3 * x + 3].copy_from_slice(&rgb);
            }
        });
    ImageBuffer::new(cfg.width, cfg.height, data)
}

/// Fraction of pixels at which `a` and `b` differ by more than `channel_tol`
/// in some channel.
pub fn pixel_mismatch(a: &ImageBuffer, b: &ImageBuffer, channel_tol: u8) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::InvalidConfig(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    let bad = a
        .data
        .chunks_exact(3)
        .zip(b.data.chunks_exact(3))
        .filter(|(p, q)| {
            p.iter()
                .zip(q.iter())
                .any(|(&u, &v)| u.abs_diff(v) > channel_tol)
        })
        .count();
    Ok(bad as f64 / (a.width * a.height) as f64)
}

/// Fraction of pixels whose nearest-neighbour image under rotation by
/// `turns` (a fraction of a full turn) about the image center differs by more
/// than `channel_tol` in some channel. Pixels rotated off the canvas are not
/// counted.
pub fn rotation_mismatch(img: &ImageBuffer, turns: f64, channel_tol: u8) -> f64 {
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    let (cx, cy) = (img.width as f64 / 2.0, img.height as f64 / 2.0);
    let mut compared = 0usize;
    let mut mismatched = 0usize;
    for y in 0..img.height {
        for x in 0..img.width {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            let rx = (c * dx - s * dy + cx - 0.5).round();
            let ry = (s * dx + c * dy + cy - 0.5).round();
            if rx < 0.0 || ry < 0.0 || rx >= img.width as f64 || ry >= img.height as f64 {
                continue;
            }
            compared += 1;
            let a = img.pixel(x, y);
            let b = img.pixel(rx as usize, ry as usize);
            if a.iter().zip(b).any(|(&u, v)| u.abs_diff(v) > channel_tol) {
                mismatched += 1;
            }
        }
    }
    if compared == 0 {
        0.0
    } else {
        mismatched as f64 / compared as f64
    }
}
