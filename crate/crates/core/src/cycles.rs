//! Periodic cycles of `f_t` on the real line: detection, refinement,
//! multipliers, classification and parabolic parameter location.
//!
//! Every attracting or parabolic cycle of `T_t` attracts at least one of
//! the asymptotic values `+-t`, so cycle detection iterates the asymptotic
//! value. A `T_t`-cycle of even period `2N` meets the real axis in `N`
//! points forming an `f_t`-cycle; the only odd-period case is the fixed
//! point 0 (attracting for `t < 1`).

use crate::error::{Result, TanError};
use crate::sided::SidedReal;
use crate::tanmap::MapParams;
use serde::Serialize;

/// Stability class of a cycle by multiplier modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Attracting,
    Parabolic,
    Repelling,
}

/// A periodic cycle of `T_t` recorded through its real trace.
#[derive(Debug, Clone, Serialize)]
pub struct Cycle {
    /// Family parameter the cycle belongs to.
    pub t: f64,
    /// Period under `T_t`; even except for the fixed point 0.
    pub period_t: usize,
    /// The `f_t`-cycle, `period_t / 2` points (one point for period 1).
    pub real_points: Vec<f64>,
    /// Multiplier of the return map `f_t^{period_f}` along the cycle.
    pub multiplier: f64,
    pub classification: Classification,
}

impl Cycle {
    /// Number of `f_t`-steps the cycle closes after.
    pub fn period_f(&self) -> usize {
        self.real_points.len()
    }
}

/// A parameter where a cycle turns parabolic with the requested multiplier.
#[derive(Debug, Clone, Serialize)]
pub struct ParabolicFix {
    pub t_star: f64,
    pub cycle: Cycle,
    /// +1 or -1.
    pub target_multiplier: f64,
    /// `|f^N(x) - x|` at the solution.
    pub residual_fix: f64,
    /// `|multiplier - target|` at the solution.
    pub residual_mult: f64,
}

const NEWTON_RESIDUAL: f64 = 1e-13;
const NEAR_ONE_GUARD: f64 = 1e-8;
const DIVISOR_TOL: f64 = 1e-10;
const DISTINCT_TOL: f64 = 1e-6;

/// Follow the asymptotic value `t` and report the cycle it settles on.
///
/// Returns `Ok(None)` when no near-return shows up within
/// `max_period_t / 2` steps after the transient (as happens at the end of
/// the cascade) or when the orbit runs into an unsided pole.
///
/// ```
/// use tanfam::cycles::find_attracting_cycle;
///
/// // between pi/2 and the first doubling parameter the asymptotic value
/// // is attracted to a fixed point of f, i.e. a period-2 cycle of T
/// let cycle = find_attracting_cycle(2.0, 64, 500, 1e-9).unwrap().unwrap();
/// assert_eq!(cycle.period_t, 2);
/// assert!(cycle.multiplier.abs() < 1.0);
/// ```
pub fn find_attracting_cycle(
    t: f64,
    max_period_t: usize,
    transient: usize,
    tol: f64,
) -> Result<Option<Cycle>> {
    cycle_attracting_value(t, t, max_period_t, transient, tol)
}

/// Like [`find_attracting_cycle`] but following an arbitrary start value
/// (used with the other asymptotic value `-t`).
fn cycle_attracting_value(
    t: f64,
    start: f64,
    max_period_t: usize,
    transient: usize,
    tol: f64,
) -> Result<Option<Cycle>> {
    if max_period_t > 1 << 12 {
        return Err(TanError::InvalidParams(format!(
            "max_period_t = {max_period_t} exceeds 2^12"
        )));
    }
    let p = MapParams::new(t)?;
    let max_period_f = (max_period_t / 2).max(1);

    // The asymptotic value is the directional image of a pole, so the
    // orbit carries a side; +t arrives from the left, -t from the right.
    let mut x = if start >= 0.0 {
        SidedReal::from_left(start)
    } else {
        SidedReal::from_right(start)
    };
    let mut budget = transient.max(1);
    // Near-parabolic cycles contract very slowly; keep iterating (with a
    // hard cap) until the near-return is sharp enough to seed Newton.
    let cap = transient.max(1) * 128;
    loop {
        for _ in 0..budget {
            x = match p.eval_f(x) {
                Ok(v) => v,
                Err(_) => return Ok(None),
            };
        }
        let base = x.value;
        let mut y = x;
        let mut best: Option<(usize, f64)> = None;
        for k in 1..=max_period_f {
            y = match p.eval_f(y) {
                Ok(v) => v,
                Err(_) => return Ok(None),
            };
            let d = (y.value - base).abs();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
            if d < tol {
                break;
            }
        }
        let (k, d) = match best {
            Some(b) => b,
            None => return Ok(None),
        };
        if d < tol.max(1e-12) {
            return finish_cycle(&p, base, k, tol).map(Some);
        }
        if d < 1e-3 && budget < cap {
            budget = (budget * 4).min(cap);
            continue;
        }
        if d < 1e-3 {
            // converged as far as iteration alone will take us
            return finish_cycle(&p, base, k, tol).map(Some);
        }
        return Ok(None);
    }
}

fn finish_cycle(p: &MapParams, seed: f64, period_f: usize, tol: f64) -> Result<Cycle> {
    match refine_seeded(p, seed, period_f) {
        Ok(c) => Ok(c),
        // Near-parabolic: Newton's g' is fine down to 1e-8, and the
        // detection loop already iterated to convergence; fall back to
        // the raw orbit point if refinement is rejected.
        Err(TanError::DerivativeNearOne(_)) | Err(TanError::NewtonDiverged(_)) => {
            build_cycle(p, seed, period_f, tol)
        }
        Err(e) => Err(e),
    }
}

/// Newton-polish a cycle of known `f`-period from seed points.
pub fn refine_cycle_newton(t: f64, seed: &[f64], period_f: usize) -> Result<Cycle> {
    let p = MapParams::new(t)?;
    if seed.is_empty() || period_f == 0 {
        return Err(TanError::InvalidParams(
            "empty seed or zero period".into(),
        ));
    }
    refine_seeded(&p, seed[0], period_f)
}

fn refine_seeded(p: &MapParams, seed: f64, period_f: usize) -> Result<Cycle> {
    let mut x = seed;
    let mut last_res = f64::INFINITY;
    for _ in 0..60 {
        let (fx, dfx) = iterate_with_derivative(p, x, period_f)?;
        let g = fx - x;
        let gp = dfx - 1.0;
        if gp.abs() < NEAR_ONE_GUARD {
            return Err(TanError::DerivativeNearOne(dfx));
        }
        if g.abs() < NEWTON_RESIDUAL {
            return build_cycle(p, x, period_f, NEWTON_RESIDUAL);
        }
        last_res = g.abs();
        x -= g / gp;
    }
    Err(TanError::NewtonDiverged(last_res))
}

/// Assemble the cycle record from one point, reducing to the minimal period.
fn build_cycle(p: &MapParams, point: f64, period_f: usize, _tol: f64) -> Result<Cycle> {
    // minimal-period reduction: accept the smallest divisor that closes
    let mut period = period_f;
    for d in 1..period_f {
        if period_f % d == 0 {
            let (fd, _) = iterate_with_derivative(p, point, d)?;
            if (fd - point).abs() < DIVISOR_TOL {
                period = d;
                break;
            }
        }
    }
    let mut real_points = Vec::with_capacity(period);
    let mut x = point;
    for _ in 0..period {
        real_points.push(x);
        x = p.eval_f(SidedReal::plain(x))?.value;
    }
    let lambda = multiplier_of_points(p, &real_points)?;
    let period_t = if period == 1 && point.abs() < 1e-8 {
        1 // T_t fixes 0; every other real cycle point has T-period 2N
    } else {
        2 * period
    };
    Ok(Cycle {
        t: p.t,
        period_t,
        real_points,
        multiplier: lambda,
        classification: classify(lambda, 1e-9),
    })
}

/// `f^k(x)` and `(f^k)'(x)` by forward accumulation along the orbit.
fn iterate_with_derivative(p: &MapParams, x: f64, k: usize) -> Result<(f64, f64)> {
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..k {
        d *= p.eval_f_prime(y)?;
        y = p.eval_f(SidedReal::plain(y))?.value;
    }
    Ok((y, d))
}

/// Multiplier of the return map along the given `f_t`-cycle points,
/// computed as a signed log-sum to dodge under/overflow.
pub fn multiplier(t: f64, real_points: &[f64]) -> Result<f64> {
    let p = MapParams::new(t)?;
    multiplier_of_points(&p, real_points)
}

fn multiplier_of_points(p: &MapParams, real_points: &[f64]) -> Result<f64> {
    let mut log_sum = 0.0f64;
    let mut sign = 1.0f64;
    for &x in real_points {
        if p.near_pole(x) {
            return Err(TanError::PoleOnCycle(x));
        }
        let d = p.eval_f_prime(x)?;
        if d == 0.0 {
            return Ok(0.0);
        }
        sign *= d.signum();
        log_sum += d.abs().ln();
    }
    Ok(sign * log_sum.exp())
}

/// Attracting / parabolic / repelling by `|multiplier|` against `1 -+ tol`.
pub fn classify(multiplier: f64, tol: f64) -> Classification {
    let m = multiplier.abs();
    if m < 1.0 - tol {
        Classification::Attracting
    } else if (m - 1.0).abs() <= tol {
        Classification::Parabolic
    } else {
        Classification::Repelling
    }
}

/// How many distinct attracting cycles the two asymptotic values find.
///
/// Returns 2 when the limit sets of `+t` and `-t` are disjoint
/// (separation > 1e-6), 1 when they coincide (a symmetric merged cycle,
/// or the fixed point 0 attracting both).
pub fn count_distinct_cycles(t: f64, max_period_t: usize) -> Result<u8> {
    let a = cycle_attracting_value(t, t, max_period_t, 5000, 1e-9)?
        .ok_or(TanError::NoConvergence)?;
    let b = cycle_attracting_value(t, -t, max_period_t, 5000, 1e-9)?
        .ok_or(TanError::NoConvergence)?;
    let mut sep = f64::INFINITY;
    for &x in &a.real_points {
        for &y in &b.real_points {
            sep = sep.min((x - y).abs());
        }
    }
    Ok(if sep > DISTINCT_TOL { 2 } else { 1 })
}

/// Solve for the parameter in `t_bracket` where a cycle of the given
/// `f`-period turns parabolic with multiplier `target` (+1 or -1).
///
/// The cycle is continued in `t` from the low end of the bracket, where
/// it is attracting with small multiplier. For `target = -1` Newton runs
/// on `f^N(x) - x` (the linearization `mu - 1` stays away from 0 along
/// the whole window). For `target = +1` the cycle is symmetric, so the
/// half-orbit equation `f^{N/2}(x) = -x` is solved instead; its
/// linearization is `s + 1` with `s = (f^{N/2})' > 0`, which stays
/// near 2 even at the parabolic parameter where the full multiplier
/// `mu = s^2` reaches 1.
pub fn locate_parabolic(
    t_bracket: (f64, f64),
    period_f: usize,
    target: f64,
) -> Result<ParabolicFix> {
    let (lo, hi) = t_bracket;
    if !(lo < hi) || period_f == 0 || (target != 1.0 && target != -1.0) {
        return Err(TanError::InvalidParams(format!(
            "bad parabolic solve request: bracket ({lo}, {hi}), period {period_f}, target {target}"
        )));
    }
    if target > 0.0 && period_f % 2 != 0 {
        return Err(TanError::InvalidParams(
            "multiplier +1 cycles here are symmetric; period_f must be even".into(),
        ));
    }
    // sigma encodes the orbit equation f^m(x) = sigma * x
    let (m, sigma) = if target > 0.0 {
        (period_f / 2, -1.0)
    } else {
        (period_f, 1.0)
    };

    // h(t) = continued-branch multiplier minus its value at the target
    let h_of = |s: f64| -> f64 {
        if target > 0.0 {
            s - 1.0 // full multiplier s^2 hits +1 exactly when s = +1
        } else {
            s - target
        }
    };

    // seed: first grid parameter where the attracting cycle has the
    // right period (and symmetry, in the half-orbit case)
    // The window where the right cycle exists starts at the low end of
    // the bracket and can be very narrow at deep levels, so probe
    // log-spaced offsets from lo instead of a uniform grid.
    let mut seed = None;
    let grid = 48;
    for i in 0..grid {
        let frac = 10f64.powf(-7.0 + 6.9 * i as f64 / (grid - 1) as f64);
        let t = lo + (hi - lo) * frac;
        if let Some(c) = find_attracting_cycle(t, 4 * period_f.max(1), 5000, 1e-9)? {
            if c.period_f() != period_f {
                continue;
            }
            let p = MapParams::new(t)?;
            let x0 = c.real_points[0];
            let (fm, _) = iterate_with_derivative(&p, x0, m)?;
            if (fm - sigma * x0).abs() < 1e-6 {
                seed = Some((t, x0));
                break;
            }
        }
    }
    let (mut ta, mut xa) = seed.ok_or(TanError::NoCrossing(lo, hi))?;
    let mut ha = h_of(continue_branch(ta, &mut xa, m, sigma)?);

    // march toward the high end until h changes sign
    let mut step = (hi - ta) / 64.0;
    let (mut tb, mut xb, mut hb);
    loop {
        let tn = (ta + step).min(hi * (1.0 - 1e-14));
        let mut xn = xa;
        match continue_branch(tn, &mut xn, m, sigma) {
            Ok(s) => {
                let hn = h_of(s);
                if hn.signum() != ha.signum() {
                    tb = tn;
                    xb = xn;
                    hb = hn;
                    break;
                }
                if tn >= hi * (1.0 - 1e-13) {
                    return Err(TanError::NoCrossing(lo, hi));
                }
                ta = tn;
                xa = xn;
                ha = hn;
            }
            Err(_) => {
                step /= 2.0;
                if step < 1e-10 {
                    return Err(TanError::NoCrossing(lo, hi));
                }
            }
        }
    }
    let _ = (ha, hb);

    // bisection on the continued multiplier; monotone in each window
    for _ in 0..120 {
        let tm = 0.5 * (ta + tb);
        if tm <= ta || tm >= tb {
            break;
        }
        let mut xm = if (tm - ta) < (tb - tm) { xa } else { xb };
        let hm = h_of(continue_branch(tm, &mut xm, m, sigma)?);
        if hm.signum() == ha.signum() {
            ta = tm;
            xa = xm;
            ha = hm;
        } else {
            tb = tm;
            xb = xm;
            hb = hm;
        }
    }
    let (t_star, mut x_star) = if ha.abs() <= hb.abs() {
        (ta, xa)
    } else {
        (tb, xb)
    };
    let s_star = continue_branch(t_star, &mut x_star, m, sigma)?;
    let _ = s_star;

    // assemble the full cycle at the solved parameter
    let p = MapParams::new(t_star)?;
    let mut real_points = Vec::with_capacity(period_f);
    let mut x = x_star;
    for _ in 0..period_f {
        real_points.push(x);
        x = p.eval_f(SidedReal::plain(x))?.value;
    }
    let residual_fix = (x - x_star).abs();
    let mu = multiplier_of_points(&p, &real_points)?;
    let residual_mult = (mu - target).abs();
    let cycle = Cycle {
        t: t_star,
        period_t: 2 * period_f,
        real_points,
        multiplier: mu,
        classification: classify(mu, 1e-6),
    };
    Ok(ParabolicFix {
        t_star,
        cycle,
        target_multiplier: target,
        residual_fix,
        residual_mult,
    })
}

/// Newton-continue the branch solving `f_t^m(x) = sigma x` at parameter
/// `t` starting from the previous branch point; returns `(f^m)'(x)`.
fn continue_branch(t: f64, x: &mut f64, m: usize, sigma: f64) -> Result<f64> {
    let p = MapParams::new(t)?;
    let mut last = f64::INFINITY;
    for _ in 0..80 {
        let (fm, dm) = iterate_with_derivative(&p, *x, m)?;
        let g = fm - sigma * *x;
        let gp = dm - sigma;
        if gp.abs() < NEAR_ONE_GUARD {
            return Err(TanError::DerivativeNearOne(dm));
        }
        // accept at the strict tolerance, or once the residual stagnates
        // at the long-composition roundoff floor
        if g.abs() < NEWTON_RESIDUAL || (g.abs() < 1e-10 && g.abs() >= last) {
            return Ok(dm);
        }
        last = g.abs();
        *x -= g / gp;
    }
    Err(TanError::NewtonDiverged(last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn small_t_attracts_to_zero() {
        let c = find_attracting_cycle(0.5, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(c.period_t, 1);
        assert!(c.real_points[0].abs() < 1e-9);
        // T-multiplier magnitude is t; the return map along the real
        // trace has multiplier -t^2
        assert!((c.multiplier + 0.25).abs() < 1e-9);
        assert_eq!(c.classification, Classification::Attracting);
    }

    #[test]
    fn t_two_has_period_two_cycle() {
        let c = find_attracting_cycle(2.0, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(c.period_t, 2);
        let p = c.real_points[0];
        assert!(p > FRAC_PI_2 && p < 2.0, "fixed point {p} outside (pi/2, 2)");
        assert!(c.multiplier.abs() < 1.0);
    }

    #[test]
    fn t_three_has_merged_period_eight() {
        let c = find_attracting_cycle(3.0, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(c.period_t, 8);
        assert_eq!(c.real_points.len(), 4);
        assert_eq!(count_distinct_cycles(3.0, 64).unwrap(), 1);
    }

    #[test]
    fn quadrupled_window_probe() {
        let c = find_attracting_cycle(1.2, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(c.period_t, 4);
        assert_eq!(count_distinct_cycles(1.2, 64).unwrap(), 1);
    }

    #[test]
    fn two_cycles_after_splitting() {
        assert_eq!(count_distinct_cycles(2.0, 64).unwrap(), 2);
        assert_eq!(count_distinct_cycles(0.5, 64).unwrap(), 1);
    }

    #[test]
    fn refine_fixed_point() {
        let c = refine_cycle_newton(2.0, &[1.2], 1).unwrap();
        let x = c.real_points[0];
        let p = MapParams::new(2.0).unwrap();
        let res = (p.eval_f(SidedReal::plain(x)).unwrap().value - x).abs();
        assert!(res < 1e-13, "residual {res}");
        let z = refine_cycle_newton(1.7, &[0.0], 1).unwrap();
        assert!(z.real_points[0].abs() < 1e-13);
    }

    #[test]
    fn cycles_are_symmetric_under_negation() {
        let a = cycle_attracting_value(2.0, 2.0, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        let b = cycle_attracting_value(2.0, -2.0, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        let mut neg: Vec<f64> = b.real_points.iter().map(|x| -x).collect();
        neg.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let mut pts = a.real_points.clone();
        pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for (x, y) in pts.iter().zip(&neg) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_thresholds() {
        assert_eq!(classify(0.3, 1e-9), Classification::Attracting);
        assert_eq!(classify(1.0 + 1e-12, 1e-9), Classification::Parabolic);
        assert_eq!(classify(-1.0, 1e-9), Classification::Parabolic);
        assert_eq!(classify(-1.5, 1e-9), Classification::Repelling);
    }

    #[test]
    fn first_doubling_parameter() {
        let fix = locate_parabolic((FRAC_PI_2, 2.84), 1, -1.0).unwrap();
        assert!(fix.t_star > FRAC_PI_2 && fix.t_star < 2.84);
        assert!(fix.residual_mult < 1e-8, "mult residual {}", fix.residual_mult);
        assert!(fix.residual_fix < 1e-10, "fix residual {}", fix.residual_fix);
        // just past the doubling: two cycles of doubled period
        let t = fix.t_star + 1e-3;
        assert_eq!(count_distinct_cycles(t, 64).unwrap(), 2);
        let c = find_attracting_cycle(t, 64, 5000, 1e-9).unwrap().unwrap();
        assert_eq!(c.period_t, 4);
        let _ = PI;
    }

    #[test]
    fn multiplier_matches_finite_difference() {
        let c = find_attracting_cycle(2.0, 64, 5000, 1e-9)
            .unwrap()
            .unwrap();
        let p = MapParams::new(2.0).unwrap();
        let x = c.real_points[0];
        let h = 1e-6;
        let n = c.period_f();
        let fp = iterate_with_derivative(&p, x + h, n).unwrap().0;
        let fm = iterate_with_derivative(&p, x - h, n).unwrap().0;
        let fd = (fp - fm) / (2.0 * h);
        assert!(
            (fd - c.multiplier).abs() <= 1e-5 * c.multiplier.abs().max(1.0),
            "fd {fd} vs product {}",
            c.multiplier
        );
    }
}
