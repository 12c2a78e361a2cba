//! Rasterized views of the family: a complex-parameter-plane map colored
//! by the period of the cycle attracting the asymptotic value, and a
//! real-line orbit (bifurcation) diagram.
//!
//! Output is binary PPM (P6) so no image codec is needed; bytes are
//! deterministic for a fixed configuration.

use crate::error::{Result, TanError};
use crate::sided::SidedReal;
use crate::tanmap::{ComplexVal, MapParams};
use rayon::prelude::*;
use std::io::Write as _;
use std::path::Path;

/// Rectangle in the parameter plane. For the orbit diagram the real axis
/// is the `t` interval and the imaginary axis the plotted height range.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// Period -> color map: hue advances with log2 of the period, so a region
/// with one cycle of period N gets the same color as one with two cycles
/// of period N.
#[derive(Debug, Clone, Copy)]
pub struct Palette {
    pub non_convergent: [u8; 3],
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            non_convergent: [20, 20, 20],
        }
    }
}

impl Palette {
    pub fn color(&self, period_t: usize) -> [u8; 3] {
        let hue = ((period_t as f64).log2() * 0.135).fract();
        hsv_to_rgb(hue, 0.85, 0.95)
    }
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let i = h6.floor() as i32 % 6;
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub region: Rect,
    pub width: usize,
    pub height: usize,
    /// Iterates discarded before period detection / plotting.
    pub transient: usize,
    /// Total iteration budget per pixel.
    pub max_iter: usize,
    /// Largest detectable period (in T-steps); even, at most 2^10.
    pub max_period_t: usize,
    pub tol: f64,
    pub palette: Palette,
    /// Optional vertical marker lines (orbit diagram only).
    pub markers: Vec<f64>,
}

impl RenderConfig {
    pub fn new(region: Rect, width: usize, height: usize) -> Result<Self> {
        let cfg = RenderConfig {
            region,
            width,
            height,
            transient: 600,
            max_iter: 6000,
            max_period_t: 512,
            tol: 1e-7,
            palette: Palette::default(),
            markers: Vec::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(TanError::InvalidParams("raster dimensions must be positive".into()));
        }
        if self.max_period_t % 2 != 0 || self.max_period_t > 1 << 10 || self.max_period_t == 0 {
            return Err(TanError::InvalidParams(format!(
                "max_period_t must be even and in (0, 1024]; got {}",
                self.max_period_t
            )));
        }
        if !(self.tol > 0.0) {
            return Err(TanError::InvalidParams("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Row-major RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl Raster {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Raster {
        Raster {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Attracting period in T-steps for the orbit of the asymptotic value of
/// `f_t`, or `None` if no near-return shows up within the budget.
fn detect_period(p: &ComplexParams, cfg: &RenderConfig) -> Option<usize> {
    let mut z = p.t;
    let mut used = 0usize;
    let window = cfg.max_period_t / 2;
    loop {
        // burn a transient block
        let block = cfg.transient.min(cfg.max_iter.saturating_sub(used));
        for _ in 0..block {
            z = p.step_f(z).ok()?;
            if !z.re.is_finite() || !z.im.is_finite() {
                return None;
            }
        }
        used += block;
        if used + 2 * window > cfg.max_iter {
            return None;
        }
        // record a window of f-iterates and scan for the first (hence
        // minimal) near-return, confirmed at two phases so a slow drift
        // through a near-parabolic bottleneck is not mistaken for a cycle
        let mut orbit = Vec::with_capacity(2 * window + 2);
        orbit.push(z);
        for _ in 0..(2 * window + 1) {
            z = p.step_f(z).ok()?;
            if !z.re.is_finite() || !z.im.is_finite() {
                return None;
            }
            orbit.push(z);
        }
        used += 2 * window + 1;
        let scale = 1.0 + orbit[0].norm();
        for period_f in 1..=window {
            let d0 = (orbit[period_f] - orbit[0]).norm();
            let d1 = (orbit[period_f + 1] - orbit[1]).norm();
            if d0 < cfg.tol * scale && d1 < cfg.tol * scale {
                // period 1 in f-steps with the orbit at 0 is the fixed
                // point of T itself; every other cycle alternates sides
                let period_t = if period_f == 1 && orbit[0].norm() < 1e-6 {
                    1
                } else {
                    2 * period_f
                };
                return Some(period_t);
            }
        }
        if used >= cfg.max_iter {
            return None;
        }
    }
}

/// Color the parameter plane by attracting period; non-convergent pixels
/// (and per-pixel evaluation failures) get the palette's reserved color.
///
/// ```
/// use tanfam::render::{render_parameter_plane, Rect, RenderConfig};
///
/// let cfg = RenderConfig::new(
///     Rect { re_min: -3.15, re_max: 3.15, im_min: 0.0, im_max: 3.15 },
///     16, 16,
/// ).unwrap();
/// let raster = render_parameter_plane(&cfg).unwrap();
/// assert_eq!(raster.pixels.len(), 16 * 16);
/// ```
pub fn render_parameter_plane(cfg: &RenderConfig) -> Result<Raster> {
    cfg.validate()?;
    let (w, h) = (cfg.width, cfg.height);
    let r = cfg.region;
    let mut pixels = vec![[0u8; 3]; w * h];
    pixels
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, px)| {
            let (x, y) = (idx % w, idx / w);
            let re = r.re_min + (x as f64 + 0.5) / w as f64 * (r.re_max - r.re_min);
            let im = r.im_max - (y as f64 + 0.5) / h as f64 * (r.im_max - r.im_min);
            let t = ComplexVal::new(re, im);
            *px = match complex_params(t) {
                Some(p) => match detect_period(&p, cfg) {
                    Some(period) => cfg.palette.color(period),
                    None => cfg.palette.non_convergent,
                },
                None => cfg.palette.non_convergent,
            };
        });
    Ok(Raster {
        width: w,
        height: h,
        pixels,
    })
}

fn complex_params(t: ComplexVal) -> Option<ComplexParams> {
    if t.norm() < 1e-9 {
        return None;
    }
    Some(ComplexParams {
        t,
        unit: MapParams::new(1.0).expect("unit parameter is valid"),
    })
}

/// Iterator of T_t = it tan z for complex parameters, built on the
/// saturation-aware complex tangent of the unit map: T_t(z) = t * T_1(z).
struct ComplexParams {
    t: ComplexVal,
    unit: MapParams,
}

impl ComplexParams {
    fn eval_t(&self, z: ComplexVal) -> Result<ComplexVal> {
        Ok(self.t * self.unit.eval_t(z)?)
    }

    fn step_f(&self, z: ComplexVal) -> Result<ComplexVal> {
        self.eval_t(self.eval_t(z)?)
    }
}

/// Orbit diagram: per column the asymptotic-value orbit of `f_t` after a
/// transient, plotted black on white; optional markers drawn light red.
pub fn render_orbit_diagram(cfg: &RenderConfig) -> Result<Raster> {
    cfg.validate()?;
    let r = cfg.region;
    if !(r.re_min > 0.0 && r.re_max <= std::f64::consts::PI + 1e-9 && r.re_min < r.re_max) {
        return Err(TanError::InvalidParams(
            "orbit diagram t-interval must sit inside (0, pi]".into(),
        ));
    }
    let (w, h) = (cfg.width, cfg.height);
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); w];
    columns.par_iter_mut().enumerate().for_each(|(x, rows)| {
        let t = r.re_min + (x as f64 + 0.5) / w as f64 * (r.re_max - r.re_min);
        let Ok(p) = MapParams::new(t) else { return };
        let mut z = SidedReal::from_left(t);
        for _ in 0..cfg.transient {
            match p.eval_f(z) {
                Ok(next) => z = next,
                Err(_) => return,
            }
        }
        let keep = cfg.max_period_t.max(64);
        for _ in 0..keep {
            match p.eval_f(z) {
                Ok(next) => z = next,
                Err(_) => return,
            }
            let frac = (r.im_max - z.value) / (r.im_max - r.im_min);
            if (0.0..1.0).contains(&frac) {
                rows.push((frac * h as f64) as usize);
            }
        }
    });
    let mut raster = Raster::filled(w, h, [255, 255, 255]);
    for (x, marker) in cfg.markers.iter().map(|&m| {
        let frac = (m - r.re_min) / (r.re_max - r.re_min);
        ((frac * w as f64) as isize, m)
    }) {
        let _ = marker;
        if (0..w as isize).contains(&x) {
            for y in 0..h {
                raster.pixels[y * w + x as usize] = [255, 180, 180];
            }
        }
    }
    for (x, rows) in columns.iter().enumerate() {
        for &y in rows {
            raster.pixels[y * w + x] = [0, 0, 0];
        }
    }
    Ok(raster)
}

/// Distinct real heights visited by the attractor of `f_t`, clustered to
/// `tol`; a small utility behind the diagram's branch-count checks.
///
/// ```
/// use tanfam::render::column_heights;
///
/// // t = 3 sits past beta_1: one period-8 cycle, 4 real heights
/// let heights = column_heights(3.0, 20_000, 64, 1e-4).unwrap();
/// assert_eq!(heights.len(), 4);
/// ```
pub fn column_heights(t: f64, transient: usize, samples: usize, tol: f64) -> Result<Vec<f64>> {
    let p = MapParams::new(t)?;
    let mut z = SidedReal::from_left(t);
    for _ in 0..transient {
        z = p.eval_f(z)?;
    }
    let mut heights: Vec<f64> = Vec::new();
    for _ in 0..samples {
        z = p.eval_f(z)?;
        if !heights.iter().any(|&h| (h - z.value).abs() < tol) {
            heights.push(z.value);
        }
    }
    heights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(heights)
}

pub fn ppm_bytes(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    for px in &raster.pixels {
        out.extend_from_slice(px);
    }
    out
}

pub fn write_ppm(raster: &Raster, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&ppm_bytes(raster))?;
    Ok(())
}
