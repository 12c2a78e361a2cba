//! The renormalization tower: pre-poles, interval systems and the
//! restricted iterates `R^n_t = f_t^{2^n}`.
//!
//! For `t` past the level-`n` merging parameter, `f_t^{2^n}` restricted to
//! four intervals bounded by pre-poles of order `n` is again tangent-like:
//! continuous and strictly increasing on each interval, with one
//! discontinuity at the pole `+-pi/2` it contains. The pre-poles `a_n`
//! and `b_n = pi - a_n` are located by solving `R^{n-1}(x) = +-pi/2`
//! inside the level-`(n-1)` interval.

use crate::error::{Result, TanError};
use crate::sided::SidedReal;
use crate::tanmap::MapParams;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// One level of the renormalization tower.
#[derive(Debug, Clone, Serialize)]
pub struct RenormLevel {
    pub n: u32,
    /// Pre-pole in `(0, pi/2)`.
    pub a_n: f64,
    /// Mirror pre-pole `pi - a_n` in `(pi/2, pi)`.
    pub b_n: f64,
    /// The four closed intervals the restriction acts on.
    pub intervals: [(f64, f64); 4],
    /// `|R^n(pi/2+)|`, the first orbit constant of the renormalization.
    pub c1: f64,
    /// `|R^{2n}(pi/2+)|`, the second orbit constant.
    pub c2: f64,
}

const PREPOLE_GRID: usize = 1 << 10;
/// Root-acceptance gate for pre-pole refinement. Deep iterates pass close
/// to poles, so their evaluation noise floor sits a little above 1e-12;
/// discontinuity jumps rejected by this gate have O(1) residuals.
const PREPOLE_RESIDUAL: f64 = 1e-9;

/// `f^k(x)` and `(f^k)'(x)` along a plain (side-free) orbit.
fn iter_k(p: &MapParams, x: f64, k: usize) -> Result<(f64, f64)> {
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..k {
        d *= p.eval_f_prime(y)?;
        y = p.eval_f(SidedReal::plain(y))?.value;
    }
    Ok((y, d))
}

/// Locate the level-`n` pre-poles `(a_n, b_n)`.
///
/// `R^{n-1} = f^{2^{n-1}}` is strictly increasing on the open interval
/// `(a_{n-1}, pi/2)` (with `a_0 = 0`, where `f` itself is decreasing), so
/// exactly one of the two pole values `+-pi/2` is attained, exactly once.
/// The target sign alternates with the level; rather than hard-coding the
/// parity we scan for both and demand a unique crossing in total.
pub fn prepoles(t: f64, n: u32) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(TanError::InvalidParams("prepole level must be >= 1".into()));
    }
    let p = MapParams::new(t)?;
    let lo = if n == 1 { 0.0 } else { prepoles(t, n - 1)?.0 };
    let hi = FRAC_PI_2;
    let steps = 1usize << (n - 1); // R^{n-1} = f^{2^{n-1}}
    let a = unique_level_set(&p, lo, hi, steps).ok_or(TanError::NotRenormalizable {
        t,
        level: n,
    })?;
    Ok((a, PI - a))
}

/// Unique solution of `f^steps(x) = +-pi/2` in `(lo, hi)`, or `None` if the
/// grid scan finds no crossing or an ambiguous number of them.
///
/// Sign changes across a grid cell can come either from a continuous
/// crossing (arbitrarily steep at high levels) or from a jump across one
/// of the iterate's discontinuities; every candidate cell is refined by
/// bisection and only those converging to a genuine root survive.
fn unique_level_set(p: &MapParams, lo: f64, hi: f64, steps: usize) -> Option<f64> {
    let margin = (hi - lo) * 1e-6;
    let (lo, hi) = (lo + margin, hi - margin);
    let eval = |x: f64| iter_k(p, x, steps).map(|(v, _)| v);

    // grid fine enough to isolate the iterate's branches at deep levels
    let grid = PREPOLE_GRID.max(256 * steps);
    let mut cells: Vec<(f64, f64, f64)> = Vec::new(); // (xa, xb, target)
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=grid {
        let x = lo + (hi - lo) * i as f64 / grid as f64;
        let v = match eval(x) {
            Ok(v) => v,
            Err(_) => {
                prev = None;
                continue;
            }
        };
        if let Some((px, pv)) = prev {
            for target in [FRAC_PI_2, -FRAC_PI_2] {
                if (pv - target).signum() != (v - target).signum() {
                    cells.push((px, x, target));
                }
            }
        }
        prev = Some((x, v));
    }
    let roots: Vec<f64> = cells
        .into_iter()
        .filter_map(|(xa, xb, target)| refine_crossing(p, xa, xb, target, steps))
        .collect();
    if roots.len() == 1 {
        Some(roots[0])
    } else {
        None
    }
}

/// Bisection plus Newton polish on one sign-change cell; `None` when the
/// residual stays large, i.e. the sign change was a discontinuity jump.
fn refine_crossing(
    p: &MapParams,
    mut xa: f64,
    mut xb: f64,
    target: f64,
    steps: usize,
) -> Option<f64> {
    let g = |x: f64| iter_k(p, x, steps).map(|(v, _)| v - target);
    let mut ga = g(xa).ok()?;
    for _ in 0..200 {
        let xm = 0.5 * (xa + xb);
        if xm <= xa || xm >= xb {
            break;
        }
        let gm = g(xm).ok()?;
        if gm.signum() == ga.signum() {
            xa = xm;
            ga = gm;
        } else {
            xb = xm;
        }
    }
    // Newton polish with the chain-rule derivative
    let mut x = 0.5 * (xa + xb);
    for _ in 0..8 {
        let (v, d) = iter_k(p, x, steps).ok()?;
        if d == 0.0 {
            break;
        }
        let step = (v - target) / d;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    let residual = g(x).ok()?.abs();
    if residual < PREPOLE_RESIDUAL {
        Some(x)
    } else {
        // fall back to the bisection limit
        let xb = 0.5 * (xa + xb);
        (g(xb).ok()?.abs() < PREPOLE_RESIDUAL).then_some(xb)
    }
}

/// Assemble the full level record (pre-poles, intervals, orbit constants).
///
/// ```
/// use tanfam::renorm;
/// use std::f64::consts::PI;
///
/// let lv = renorm::level(3.0, 1).unwrap();
/// assert!((lv.a_n + lv.b_n - PI).abs() < 1e-12);
/// // at t = 3 the level-1 pre-pole has a closed form:
/// // a_1 = arctan(atanh(pi / (2 t)) / t)
/// let oracle = ((PI / 6.0f64).atanh() / 3.0).atan();
/// assert!((lv.a_n - oracle).abs() < 1e-12);
/// ```
pub fn level(t: f64, n: u32) -> Result<RenormLevel> {
    let (a_n, b_n) = prepoles(t, n)?;
    let (c1, _) = c_value(t, n, 1)?;
    let (c2, _) = c_value(t, n, 2)?;
    Ok(RenormLevel {
        n,
        a_n,
        b_n,
        intervals: [
            (-b_n, -FRAC_PI_2),
            (-FRAC_PI_2, -a_n),
            (a_n, FRAC_PI_2),
            (FRAC_PI_2, b_n),
        ],
        c1,
        c2,
    })
}

/// `R^n_t(x) = f_t^{2^n}(x)` with side tracking, restricted to the four
/// level-`n` intervals.
pub fn renorm_eval(t: f64, n: u32, x: SidedReal) -> Result<f64> {
    let (a_n, b_n) = prepoles(t, n)?;
    let v = x.value;
    let inside = (v >= -b_n && v <= -a_n) || (v >= a_n && v <= b_n);
    if !inside {
        return Err(TanError::OutOfDomain(v, n));
    }
    let p = MapParams::new(t)?;
    let mut y = x;
    for _ in 0..(1usize << n) {
        y = p.eval_f(y)?;
    }
    Ok(y.value)
}

/// Orbit constant `c_m(R^n_t) = |f_t^{2^n m}(pi/2+)|`.
///
/// Side tracking lets the orbit pass straight through poles; the returned
/// flag reports whether any orbit point after the start landed within the
/// pole tolerance (which happens exactly at virtual cycle parameters).
pub fn c_value(t: f64, n: u32, m: usize) -> Result<(f64, bool)> {
    let p = MapParams::new(t)?;
    let steps = (1usize << n) * m;
    let mut x = SidedReal::from_right(FRAC_PI_2);
    let mut hit_pole = false;
    for _ in 0..steps {
        x = p.eval_f(x)?;
        if p.near_pole(x.value) {
            hit_pole = true;
        }
    }
    Ok((x.value.abs(), hit_pole))
}

/// Whether the level-`n` renormalization is defined at `t`.
///
/// `R^n = f^{2^n}` restricted to `[a_n, b_n]` must have a unique preimage
/// of each pole `+-pi/2`: one per monotone branch. Just above a pre-pole
/// window opening (e.g. `t` between `pi/2` and the first merging for
/// `n = 1`) each branch still covers both pole values, producing two
/// preimages apiece, and the renormalization is not yet defined.
///
/// ```
/// use tanfam::renorm::is_renormalizable;
///
/// assert!(!is_renormalizable(2.0, 1));   // before the first merging
/// assert!(is_renormalizable(3.0, 1));    // after beta_1 ~ 2.9418
/// ```
pub fn is_renormalizable(t: f64, n: u32) -> bool {
    let p = match MapParams::new(t) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let (a_n, b_n) = match prepoles(t, n) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let steps = 1usize << n;
    unique_level_set(&p, a_n, FRAC_PI_2, steps).is_some()
        && unique_level_set(&p, FRAC_PI_2, b_n, steps).is_some()
}
