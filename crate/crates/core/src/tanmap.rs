//! Exact-formula kernels for the tangent family.
//!
//! The family under study is `T_t(z) = i t tan(z)` for `0 < t <= pi`.
//! Its second iterate restricted to the real line,
//! `f_t(x) = T_t^2(x) = -t tanh(t tan x)`,
//! is an odd, pi-periodic map that is strictly decreasing on each
//! fundamental interval `(k pi - pi/2, k pi + pi/2)` with range `(-t, t)`.
//! Evaluation near the poles `k pi + pi/2` is side-aware: the one-sided
//! limits are `f_t((k pi + pi/2)^-) = -t` and `f_t((k pi - pi/2)^+) = t`.
//!
//! ```
//! use tanfam::tanmap::MapParams;
//! use tanfam::sided::SidedReal;
//!
//! let p = MapParams::new(2.0).unwrap();
//! // f_2(pi/4) = -2 tanh(2 tan(pi/4)) = -2 tanh 2
//! let y = p.eval_f(SidedReal::plain(std::f64::consts::FRAC_PI_4)).unwrap();
//! assert!((y.value + 2.0 * 2.0f64.tanh()).abs() < 1e-14);
//! ```

use crate::error::{Result, TanError};
use crate::sided::{Side, SidedReal};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Complex values; the essential-singularity directions are handled by
/// saturating to the asymptotic values, so no infinity flag is needed.
pub type ComplexVal = Complex64;

pub const DEFAULT_POLE_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_SATURATION: f64 = 40.0;

/// Parameters of one member of the family plus evaluation knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    /// Family parameter, in `(0, pi]`.
    pub t: f64,
    /// Working precision. Native doubles (53) are used throughout; the
    /// field is validated so callers cannot silently request more.
    pub precision_bits: u32,
    /// Radius around a pole inside which evaluation demands a side.
    pub pole_tolerance: f64,
    /// `|t tan x|` beyond which tanh is clamped to +-1 exactly.
    pub saturation_threshold: f64,
}

impl MapParams {
    pub fn new(t: f64) -> Result<Self> {
        Self::with_options(t, 53, DEFAULT_POLE_TOLERANCE, DEFAULT_SATURATION)
    }

    pub fn with_options(
        t: f64,
        precision_bits: u32,
        pole_tolerance: f64,
        saturation_threshold: f64,
    ) -> Result<Self> {
        if !(t > 0.0 && t <= PI) {
            return Err(TanError::InvalidParams(format!(
                "t = {t} outside (0, pi]"
            )));
        }
        if precision_bits == 0 || precision_bits > 53 {
            return Err(TanError::InvalidParams(format!(
                "precision_bits = {precision_bits}; only native doubles (<= 53) are supported"
            )));
        }
        if !(pole_tolerance > 0.0) {
            return Err(TanError::InvalidParams("pole_tolerance must be > 0".into()));
        }
        if !(saturation_threshold >= 20.0) {
            return Err(TanError::InvalidParams(
                "saturation_threshold must be >= 20".into(),
            ));
        }
        Ok(MapParams {
            t,
            precision_bits,
            pole_tolerance,
            saturation_threshold,
        })
    }

    /// Same knobs, different parameter.
    pub fn at(&self, t: f64) -> Result<Self> {
        Self::with_options(
            t,
            self.precision_bits,
            self.pole_tolerance,
            self.saturation_threshold,
        )
    }

    /// `T_t(z) = i t tan z`, saturation-safe.
    ///
    /// For `|Im z|` beyond the saturation threshold the exact asymptotic
    /// value `-t` (upper half plane) or `t` (lower half plane) is returned.
    pub fn eval_t(&self, z: ComplexVal) -> Result<ComplexVal> {
        if z.im > self.saturation_threshold {
            return Ok(ComplexVal::new(-self.t, 0.0));
        }
        if z.im < -self.saturation_threshold {
            return Ok(ComplexVal::new(self.t, 0.0));
        }
        if z.im.abs() <= self.pole_tolerance {
            let (_, dx) = nearest_pole(z.re);
            if dx.abs() <= self.pole_tolerance {
                return Err(TanError::PoleProximity(z.re));
            }
        }
        let w = complex_tan(z);
        Ok(ComplexVal::new(-self.t * w.im, self.t * w.re))
    }

    /// `f_t(x) = -t tanh(t tan x)` with directional limits at poles.
    ///
    /// The output side follows the flip rule: `f_t` is strictly decreasing
    /// on each fundamental interval, so left maps to right and vice versa.
    ///
    /// ```
    /// use tanfam::tanmap::MapParams;
    /// use tanfam::sided::SidedReal;
    /// use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    ///
    /// let p = MapParams::new(2.0).unwrap();
    /// let y = p.eval_f(SidedReal::plain(FRAC_PI_4)).unwrap();
    /// assert!((y.value + 2.0 * (2.0f64).tanh()).abs() < 1e-15);
    ///
    /// // approaching the pole from the right gives the upper asymptotic
    /// // value +t exactly
    /// let lim = p.eval_f(SidedReal::from_right(FRAC_PI_2)).unwrap();
    /// assert_eq!(lim.value, 2.0);
    /// ```
    pub fn eval_f(&self, x: SidedReal) -> Result<SidedReal> {
        if !x.value.is_finite() {
            return Err(TanError::InvalidParams(format!(
                "non-finite input {}",
                x.value
            )));
        }
        let (_, dx) = nearest_pole(x.value);
        if dx.abs() <= self.pole_tolerance {
            let v = match x.side {
                Side::FromLeft => -self.t,
                Side::FromRight => self.t,
                Side::None => return Err(TanError::UnsidedPole(x.value)),
            };
            return Ok(SidedReal::new(v, x.side.flip()));
        }
        let u = self.t * stable_tan(x.value);
        let v = if u.abs() > self.saturation_threshold {
            -self.t * u.signum()
        } else {
            -self.t * u.tanh()
        };
        Ok(SidedReal::new(v, x.side.flip()))
    }

    /// `f_t'(x) = -t^2 sech^2(t tan x) sec^2 x`.
    ///
    /// Returns exactly 0 in the saturated region: the poles are flat
    /// critical points and sech^2 decays double-exponentially there.
    pub fn eval_f_prime(&self, x: f64) -> Result<f64> {
        let (_, dx) = nearest_pole(x);
        if dx.abs() <= self.pole_tolerance {
            return Err(TanError::PoleProximity(x));
        }
        let tan_x = stable_tan(x);
        let u = self.t * tan_x;
        if u.abs() > self.saturation_threshold {
            return Ok(0.0);
        }
        let sech2 = sech_sq(u);
        let sec2 = 1.0 + tan_x * tan_x;
        Ok(-self.t * self.t * sech2 * sec2)
    }

    /// Schwarzian derivative `f'''/f' - 3/2 (f''/f')^2` by 5-point
    /// finite differences of `eval_f` with step `1e-3 (1 + |x|)`.
    ///
    /// ```
    /// use tanfam::tanmap::MapParams;
    ///
    /// let p = MapParams::new(3.0).unwrap();
    /// assert!(p.schwarzian(0.3).unwrap() < 0.0);
    /// ```
    pub fn schwarzian(&self, x: f64) -> Result<f64> {
        let fp = self.eval_f_prime(x)?;
        if fp == 0.0 || !fp.is_finite() {
            return Err(TanError::DegenerateDerivative(x));
        }
        let h = 1e-3 * (1.0 + x.abs());
        let f = |y: f64| -> Result<f64> { Ok(self.eval_f(SidedReal::plain(y))?.value) };
        let fm2 = f(x - 2.0 * h)?;
        let fm1 = f(x - h)?;
        let f0 = f(x)?;
        let fp1 = f(x + h)?;
        let fp2 = f(x + 2.0 * h)?;
        let d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
        let d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
        let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
        if d1.abs() < 1e-12 {
            return Err(TanError::DegenerateDerivative(x));
        }
        Ok(d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1))
    }

    /// Forward `f_t`-orbit of `start`, side tracking included.
    ///
    /// Pole landings with a side pass through the directional limit;
    /// a pole landing without a side aborts with `UnsidedPole`.
    pub fn orbit(&self, start: SidedReal, k: usize) -> Result<Vec<SidedReal>> {
        let mut out = Vec::with_capacity(k);
        let mut x = start;
        for _ in 0..k {
            x = self.eval_f(x)?;
            out.push(x);
        }
        Ok(out)
    }

    /// True when `x` lies within the pole tolerance of some pole of tan.
    pub fn near_pole(&self, x: f64) -> bool {
        nearest_pole(x).1.abs() <= self.pole_tolerance
    }
}

/// Partials of the two-variable extension `F(w, z) = -w tanh(w tan z)`.
///
/// Returns `(dF/dw, dF/dz)` where
/// `dF/dw = -tanh(w tan z) - w tan z sech^2(w tan z)` and
/// `dF/dz = -w^2 sech^2(w tan z) sec^2 z`.
pub fn eval_f_partials(w: f64, z: f64) -> Result<(f64, f64)> {
    let (_, dx) = nearest_pole(z);
    if dx.abs() <= DEFAULT_POLE_TOLERANCE {
        return Err(TanError::PoleProximity(z));
    }
    let tan_z = stable_tan(z);
    let u = w * tan_z;
    if u.abs() > DEFAULT_SATURATION {
        return Ok((-u.signum(), 0.0));
    }
    let sech2 = sech_sq(u);
    let d_dw = -u.tanh() - u * sech2;
    let d_dz = -w * w * sech2 * (1.0 + tan_z * tan_z);
    Ok((d_dw, d_dz))
}

/// Centered finite-difference residual of `eval_f_partials`; test hook.
pub fn partials_fd_residual(w: f64, z: f64, step: f64) -> Result<(f64, f64)> {
    let f = |w: f64, z: f64| -w * (w * stable_tan(z)).tanh();
    let (dw, dz) = eval_f_partials(w, z)?;
    let fd_w = (f(w + step, z) - f(w - step, z)) / (2.0 * step);
    let fd_z = (f(w, z + step) - f(w, z - step)) / (2.0 * step);
    Ok((dw - fd_w, dz - fd_z))
}

/// Nearest pole `k pi + pi/2` of tan and the signed offset `x - pole`.
pub fn nearest_pole(x: f64) -> (f64, f64) {
    let k = ((x - FRAC_PI_2) / PI).round();
    let pole = k * PI + FRAC_PI_2;
    (pole, x - pole)
}

/// tan(x) through the offset to the nearest pole: `tan(pole + d) = -cot d`.
///
/// This avoids the catastrophic cancellation of evaluating tan directly
/// next to a pole and is exact in the same places libm tan is.
pub fn stable_tan(x: f64) -> f64 {
    let (_, d) = nearest_pole(x);
    if d.abs() < 0.3 {
        return -d.cos() / d.sin();
    }
    // away from poles, reduce mod pi and use libm (exact at 0)
    (x - (x / PI).round() * PI).tan()
}

fn sech_sq(u: f64) -> f64 {
    let c = u.cosh();
    1.0 / (c * c)
}

/// Complex tangent, overflow-safe for `|Im z| <=` the saturation threshold.
pub fn complex_tan(z: ComplexVal) -> ComplexVal {
    let (x2, y2) = (2.0 * z.re, 2.0 * z.im);
    let den = x2.cos() + y2.cosh();
    ComplexVal::new(x2.sin() / den, y2.sinh() / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_t_fixes_zero() {
        let p = MapParams::new(1.0).unwrap();
        let z = p.eval_t(ComplexVal::new(0.0, 0.0)).unwrap();
        assert_eq!(z, ComplexVal::new(0.0, 0.0));
    }

    #[test]
    fn eval_t_saturates_to_asymptotic_value() {
        let p = MapParams::new(2.0).unwrap();
        let z = p.eval_t(ComplexVal::new(0.0, 50.0)).unwrap();
        assert_eq!(z, ComplexVal::new(-2.0, 0.0));
        let z = p.eval_t(ComplexVal::new(0.0, -50.0)).unwrap();
        assert_eq!(z, ComplexVal::new(2.0, 0.0));
    }

    #[test]
    fn eval_t_quarter_pi() {
        let p = MapParams::new(2.0).unwrap();
        let z = p.eval_t(ComplexVal::new(FRAC_PI_2 / 2.0, 0.0)).unwrap();
        assert_relative_eq!(z.re, 0.0, epsilon = 1e-14);
        assert_relative_eq!(z.im, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn eval_t_rejects_pole() {
        let p = MapParams::new(1.0).unwrap();
        assert!(matches!(
            p.eval_t(ComplexVal::new(FRAC_PI_2, 0.0)),
            Err(TanError::PoleProximity(_))
        ));
    }

    #[test]
    fn eval_f_directional_limits() {
        let p = MapParams::new(2.0).unwrap();
        let y = p.eval_f(SidedReal::from_left(FRAC_PI_2)).unwrap();
        assert_eq!(y.value, -2.0);
        assert_eq!(y.side, Side::FromRight);
        let y = p.eval_f(SidedReal::from_right(-FRAC_PI_2)).unwrap();
        assert_eq!(y.value, 2.0);
        assert_eq!(y.side, Side::FromLeft);
    }

    #[test]
    fn eval_f_is_odd_at_zero() {
        for t in [0.3, 1.0, 2.5] {
            let p = MapParams::new(t).unwrap();
            assert_eq!(p.eval_f(SidedReal::plain(0.0)).unwrap().value, 0.0);
        }
    }

    #[test]
    fn eval_f_quarter_pi() {
        let p = MapParams::new(2.0).unwrap();
        let y = p.eval_f(SidedReal::plain(FRAC_PI_2 / 2.0)).unwrap();
        assert_relative_eq!(y.value, -2.0 * 2.0f64.tanh(), epsilon = 1e-14);
    }

    #[test]
    fn unsided_pole_is_an_error() {
        let p = MapParams::new(2.0).unwrap();
        assert!(matches!(
            p.eval_f(SidedReal::plain(FRAC_PI_2)),
            Err(TanError::UnsidedPole(_))
        ));
    }

    #[test]
    fn derivative_values() {
        let p = MapParams::new(2.0).unwrap();
        assert_relative_eq!(p.eval_f_prime(0.0).unwrap(), -4.0, epsilon = 1e-14);
        // flat critical point: saturation clamps to exactly 0
        assert_eq!(p.eval_f_prime(FRAC_PI_2 - 1e-6).unwrap(), 0.0);
        let p = MapParams::new(3.0).unwrap();
        let sech3 = 1.0 / 3.0f64.cosh();
        assert_relative_eq!(
            p.eval_f_prime(FRAC_PI_2 / 2.0).unwrap(),
            -9.0 * sech3 * sech3 * 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn partials_at_zero_and_quarter_pi() {
        let (dw, dz) = eval_f_partials(2.0, 0.0).unwrap();
        assert_eq!(dw, 0.0);
        assert_relative_eq!(dz, -4.0, epsilon = 1e-14);

        let (dw, dz) = eval_f_partials(1.0, FRAC_PI_2 / 2.0).unwrap();
        let sech1 = 1.0 / 1.0f64.cosh();
        assert_relative_eq!(dw, -1.0f64.tanh() - sech1 * sech1, epsilon = 1e-12);
        assert_relative_eq!(dz, -2.0 * sech1 * sech1, epsilon = 1e-12);
    }

    #[test]
    fn partials_match_finite_differences() {
        for (w, z) in [(2.0, 0.3), (1.5, 1.1), (3.0, -0.7), (2.7, 2.0)] {
            let (rw, rz) = partials_fd_residual(w, z, 1e-6).unwrap();
            let (dw, dz) = eval_f_partials(w, z).unwrap();
            assert!(rw.abs() < 1e-6 * (1.0 + dw.abs()), "dw residual {rw}");
            assert!(rz.abs() < 1e-5 * (1.0 + dz.abs()), "dz residual {rz}");
        }
    }

    #[test]
    fn schwarzian_sign_and_values() {
        let p = MapParams::new(2.0).unwrap();
        assert!(p.schwarzian(0.3).unwrap() < 0.0);
        assert_relative_eq!(p.schwarzian(0.0).unwrap(), -6.0, epsilon = 1e-4);
        let p = MapParams::new(0.5).unwrap();
        assert_relative_eq!(p.schwarzian(0.0).unwrap(), 1.5, epsilon = 1e-4);
    }

    #[test]
    fn orbit_through_pole() {
        let p = MapParams::new(2.0).unwrap();
        let o = p.orbit(SidedReal::from_right(FRAC_PI_2), 1).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].value, 2.0);
        assert_eq!(o[0].side, Side::FromLeft);
    }

    #[test]
    fn orbit_fixes_zero() {
        let p = MapParams::new(1.7).unwrap();
        let o = p.orbit(SidedReal::plain(0.0), 5).unwrap();
        assert!(o.iter().all(|x| x.value == 0.0));
    }

    #[test]
    fn stable_tan_matches_libm_away_from_poles() {
        for x in [-1.3, -0.4, 0.0, 0.9, 1.2, 2.8] {
            assert_relative_eq!(stable_tan(x), x.tan(), epsilon = 1e-12);
        }
    }
}
