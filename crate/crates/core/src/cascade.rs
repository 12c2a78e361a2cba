//! The interleaved bifurcation sequences: doubling parameters `alpha_n`,
//! merging parameters `beta_n`, and the extrapolated limit `t_infinity`.
//!
//! `beta_n` is the parameter where the asymptotic-value orbit hits a pole
//! after `2^n - 1` steps (a virtual cycle parameter): the root of
//! `Phi_n(t) = f_t^{2^n - 1}(t) - (-1)^{n+1} pi/2`.
//! `alpha_n` is the parameter where the continued cycle of `f`-period
//! `2^n` turns parabolic: multiplier -1 for `n = 1` (period doubling of
//! the two asymmetric cycles), +1 for `n >= 2` (cycle doubling of the
//! merged symmetric cycle).

use crate::cycles::{locate_parabolic, ParabolicFix};
use crate::error::{Result, TanError};
use crate::sided::SidedReal;
use crate::tanmap::{eval_f_partials, MapParams};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// One solved bifurcation parameter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CascadeEntry {
    pub n: u32,
    pub t: f64,
    pub residual: f64,
}

/// The solved cascade up to some depth.
#[derive(Debug, Clone, Serialize)]
pub struct CascadeTable {
    pub alphas: Vec<CascadeEntry>,
    pub betas: Vec<CascadeEntry>,
    /// Geometric extrapolation of the betas; NaN when unavailable.
    pub t_infinity_estimate: f64,
    /// Successive gap ratios `(b_n - b_{n-1}) / (b_{n+1} - b_n)`.
    pub ratio_sequence: Vec<f64>,
    /// Set when the gap ratios do not indicate convergence.
    pub divergent_extrapolation: bool,
}

const BETA_GRID: usize = 4096;
const BETA_ACCEPT: f64 = 1e-11;

/// The merging-condition function `Phi_n` at parameter `t`.
///
/// The orbit starts at the asymptotic value `t = f_t(pi/2+)`, which
/// carries a from-the-left side, so intermediate pole hits take the
/// correct directional limit.
pub fn phi(t: f64, n: u32) -> Result<f64> {
    let p = MapParams::new(t)?;
    let steps = (1usize << n) - 1;
    let target = if n % 2 == 1 { FRAC_PI_2 } else { -FRAC_PI_2 };
    let mut x = SidedReal::from_left(t);
    for i in 0..steps {
        x = p.eval_f(x).map_err(|_| TanError::OrbitHitPole(i))?;
    }
    Ok(x.value - target)
}

/// `Phi_n` and `dPhi_n/dt` by forward accumulation along the orbit.
fn phi_with_derivative(t: f64, n: u32) -> Result<(f64, f64)> {
    let p = MapParams::new(t)?;
    let steps = (1usize << n) - 1;
    let target = if n % 2 == 1 { FRAC_PI_2 } else { -FRAC_PI_2 };
    let mut x = SidedReal::from_left(t);
    let mut dx = 1.0;
    for i in 0..steps {
        let (fw, fz) = eval_f_partials(t, x.value).map_err(|_| TanError::OrbitHitPole(i))?;
        dx = fw + fz * dx;
        x = p.eval_f(x).map_err(|_| TanError::OrbitHitPole(i))?;
    }
    Ok((x.value - target, dx))
}

/// Solve for the level-`n` merging parameter inside `bracket`.
///
/// A 4096-point grid scan locates sign changes of `Phi_n`; candidates are
/// bisected to machine width and Newton-polished, and accepted only when
/// the residual confirms a genuine root rather than a pre-pole
/// discontinuity jump. Candidates are tried nearest the low end first,
/// where the root is unique.
pub fn solve_beta(n: u32, bracket: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    if !(lo < hi) || n == 0 {
        return Err(TanError::InvalidParams(format!(
            "bad merging solve request: level {n}, bracket ({lo}, {hi})"
        )));
    }
    let g = |t: f64| phi(t, n);
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=BETA_GRID {
        let t = lo + (hi - lo) * i as f64 / BETA_GRID as f64;
        let v = match g(t) {
            Ok(v) => v,
            Err(_) => {
                prev = None;
                continue;
            }
        };
        if let Some((pt, pv)) = prev {
            if pv.signum() != v.signum() {
                candidates.push((pt, t));
            }
        }
        prev = Some((t, v));
    }
    if candidates.is_empty() {
        return Err(TanError::NoSignChange(lo, hi));
    }
    for (mut ta, mut tb) in candidates {
        let mut ga = match g(ta) {
            Ok(v) => v,
            Err(_) => continue,
        };
        for _ in 0..200 {
            let tm = 0.5 * (ta + tb);
            if tm <= ta || tm >= tb {
                break;
            }
            let gm = match g(tm) {
                Ok(v) => v,
                Err(_) => break,
            };
            if gm.signum() == ga.signum() {
                ta = tm;
                ga = gm;
            } else {
                tb = tm;
            }
        }
        // Newton polish from the bisection limit
        let mut best_t = ta;
        let mut best_r = g(ta).map(f64::abs).unwrap_or(f64::INFINITY);
        if let Ok(r) = g(tb) {
            if r.abs() < best_r {
                best_t = tb;
                best_r = r.abs();
            }
        }
        let mut t = best_t;
        for _ in 0..4 {
            let (v, d) = match phi_with_derivative(t, n) {
                Ok(x) => x,
                Err(_) => break,
            };
            if d == 0.0 || !(v / d).is_finite() {
                break;
            }
            let tn = t - v / d;
            if tn <= ta - (tb - ta) || tn >= tb + (tb - ta) {
                break;
            }
            t = tn;
            if let Ok(r) = g(t) {
                if r.abs() < best_r {
                    best_t = t;
                    best_r = r.abs();
                }
            }
        }
        if best_r < BETA_ACCEPT {
            return Ok((best_t, best_r));
        }
    }
    Err(TanError::NoSignChange(lo, hi))
}

/// Solve for the level-`n` doubling parameter inside `bracket`.
pub fn solve_alpha(n: u32, bracket: (f64, f64)) -> Result<(f64, f64)> {
    solve_alpha_fix(n, bracket).map(|fix| (fix.t_star, fix.residual_mult))
}

/// Like [`solve_alpha`] but returning the full parabolic cycle record.
pub fn solve_alpha_fix(n: u32, bracket: (f64, f64)) -> Result<ParabolicFix> {
    if n == 0 {
        return Err(TanError::InvalidParams("doubling level must be >= 1".into()));
    }
    if n == 1 {
        locate_parabolic(bracket, 1, -1.0)
    } else {
        locate_parabolic(bracket, 1usize << n, 1.0)
    }
}

/// Solve the cascade down to `depth`, chaining brackets level by level.
///
/// The table is truncated at the first level that fails to resolve;
/// interleaving of the solved prefix is enforced.
///
/// ```
/// use tanfam::cascade::cascade_table;
///
/// let table = cascade_table(5).unwrap();
/// for (a, b) in table.alphas.iter().zip(&table.betas) {
///     assert!(a.t < b.t);
///     assert!(b.residual.abs() < 1e-10);
/// }
/// // the windows shrink roughly geometrically
/// assert!(table.ratio_sequence.iter().all(|&r| r > 1.0));
/// ```
pub fn cascade_table(depth: u32) -> Result<CascadeTable> {
    cascade_table_from(depth, FRAC_PI_2)
}

/// Like [`cascade_table`] but with an explicit left end for the level-1
/// search bracket (the default is the virtual center pi/2).
pub fn cascade_table_from(depth: u32, seed_left: f64) -> Result<CascadeTable> {
    if depth == 0 || depth > 8 {
        return Err(TanError::InvalidParams(format!(
            "cascade depth {depth} outside 1..=8 (deeper needs more precision)"
        )));
    }
    if !(seed_left >= FRAC_PI_2 && seed_left < PI) {
        return Err(TanError::InvalidParams(format!(
            "seed bracket start {seed_left} outside [pi/2, pi)"
        )));
    }
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut beta_prev = seed_left;
    for n in 1..=depth {
        let alpha = match solve_alpha(n, (beta_prev, PI)) {
            Ok(a) => a,
            Err(_) => break,
        };
        let beta = match solve_beta(n, (alpha.0, PI)) {
            Ok(b) => b,
            Err(_) => {
                alphas.push(CascadeEntry {
                    n,
                    t: alpha.0,
                    residual: alpha.1,
                });
                break;
            }
        };
        if !(beta_prev < alpha.0 && alpha.0 < beta.0 && beta.0 < PI) {
            break;
        }
        alphas.push(CascadeEntry {
            n,
            t: alpha.0,
            residual: alpha.1,
        });
        betas.push(CascadeEntry {
            n,
            t: beta.0,
            residual: beta.1,
        });
        beta_prev = beta.0;
    }
    let mut table = CascadeTable {
        alphas,
        betas,
        t_infinity_estimate: f64::NAN,
        ratio_sequence: Vec::new(),
        divergent_extrapolation: false,
    };
    let beta_values: Vec<f64> = table.betas.iter().map(|e| e.t).collect();
    if let Ok(ex) = extrapolate_betas(&beta_values) {
        table.t_infinity_estimate = ex.0;
        table.ratio_sequence = ex.1;
        table.divergent_extrapolation = ex.2;
    }
    Ok(table)
}

/// Geometric extrapolation of the cascade limit from a solved table.
pub fn estimate_t_infinity(table: &CascadeTable) -> Result<(f64, Vec<f64>)> {
    let betas: Vec<f64> = table.betas.iter().map(|e| e.t).collect();
    let (t_inf, ratios, divergent) = extrapolate_betas(&betas)?;
    if divergent {
        return Err(TanError::InvalidParams(
            "gap ratios <= 1; geometric extrapolation diverges".into(),
        ));
    }
    Ok((t_inf, ratios))
}

/// Returns `(t_inf, ratios, divergent)`; `t_inf` is NaN when divergent.
pub fn extrapolate_betas(betas: &[f64]) -> Result<(f64, Vec<f64>, bool)> {
    if betas.len() < 3 {
        return Err(TanError::InsufficientData(3, betas.len()));
    }
    let mut ratios = Vec::with_capacity(betas.len() - 2);
    for w in betas.windows(3) {
        ratios.push((w[1] - w[0]) / (w[2] - w[1]));
    }
    let last = *ratios.last().unwrap();
    let k = betas.len();
    if !(last > 1.0) {
        return Ok((f64::NAN, ratios, true));
    }
    let t_inf = betas[k - 1] + (betas[k - 1] - betas[k - 2]) / (last - 1.0);
    Ok((t_inf, ratios, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{count_distinct_cycles, find_attracting_cycle};

    #[test]
    fn first_merging_parameter() {
        let a1 = solve_alpha(1, (FRAC_PI_2, 2.84)).unwrap();
        let (b1, r) = solve_beta(1, (a1.0, PI)).unwrap();
        assert!((b1 - 2.94).abs() < 0.01, "beta_1 = {b1}");
        assert!(r < BETA_ACCEPT);
        // scalar oracle: root of -t tanh(t tan t) = pi/2
        let f = |t: f64| -t * (t * t.tan()).tanh() - FRAC_PI_2;
        let (mut lo, mut hi) = (2.84, 2.99);
        let flo = f(lo);
        assert!(flo.signum() != f(hi).signum());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((b1 - 0.5 * (lo + hi)).abs() < 1e-11);
    }

    #[test]
    fn depth_two_interleaves() {
        let table = cascade_table(2).unwrap();
        assert_eq!(table.alphas.len(), 2);
        assert_eq!(table.betas.len(), 2);
        let a1 = table.alphas[0].t;
        let b1 = table.betas[0].t;
        let a2 = table.alphas[1].t;
        let b2 = table.betas[1].t;
        assert!(FRAC_PI_2 < a1 && a1 < 2.84);
        assert!(a1 < b1 && b1 < a2 && a2 < b2);
        assert!(b2 < 3.085, "beta_2 = {b2}");
    }

    #[test]
    fn merged_cycle_above_first_merging() {
        let table = cascade_table(1).unwrap();
        let t = table.betas[0].t + 5e-3;
        assert_eq!(count_distinct_cycles(t, 64).unwrap(), 1);
        let c = find_attracting_cycle(t, 64, 5000, 1e-9).unwrap().unwrap();
        assert_eq!(c.period_t, 8);
    }

    #[test]
    fn degenerate_extrapolation_is_flagged() {
        let (t_inf, ratios, divergent) = extrapolate_betas(&[1.0, 2.0, 3.0]).unwrap();
        assert!(divergent);
        assert!(t_inf.is_nan());
        assert_eq!(ratios, vec![1.0]);
        assert!(matches!(
            extrapolate_betas(&[1.0, 2.0]),
            Err(TanError::InsufficientData(3, 2))
        ));
    }
}
