//! Transversality certificates at the cycle-merging parameters.
//!
//! At a merging parameter the asymptotic value's forward orbit closes onto
//! a pole after `m - 1` steps. The derivative data of the two-variable
//! extension `F(w, z) = -w tanh(w tan z)` along that orbit assembles into
//! a small transfer matrix `A` and a polynomial `P(rho)`; the merging
//! condition `Phi(t) = f_t^{m-1}(t) - c_0` then satisfies
//! `Phi'(t0) = (F^{m-1})'(c_1) P(1)`, and `P(1) > 0` (equivalently: 1 is
//! not an eigenvalue of `A`) certifies that the merging parameter is a
//! transversal, hence locally unique, root.

use crate::cascade::phi;
use crate::error::{Result, TanError};
use crate::sided::SidedReal;
use crate::tanmap::{eval_f_partials, MapParams};
use nalgebra::{Complex, DMatrix};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// The closed orbit set `P = {c_0, c_1, ..., c_{m-1}}` at a merging
/// parameter: `c_0 = +-pi/2` (the pole hit), `c_1 = t0` (the asymptotic
/// value), `c_{i+1} = f_{t0}(c_i)`.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitSetP {
    pub t0: f64,
    /// Renormalization level; `m = 2^n`.
    pub n: u32,
    pub m: usize,
    /// `c_0, ..., c_{m-1}`.
    pub points: Vec<f64>,
    /// Minimum pairwise distance between orbit points.
    pub separation: f64,
}

/// The transfer matrix `A`: nonzero only in column 1 and the
/// superdiagonal, acting on `(v_1, ..., v_{m-1})` with `v_0 = v_m = 0`.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub dim: usize,
    pub entries: DMatrix<f64>,
}

const CLOSURE_TOL: f64 = 1e-10;

/// Build the closed orbit set at a computed merging parameter of level `n`.
pub fn build_orbit_p(t0: f64, n: u32) -> Result<OrbitSetP> {
    let p = MapParams::new(t0)?;
    let m = 1usize << n;
    let c0 = if n % 2 == 1 { FRAC_PI_2 } else { -FRAC_PI_2 };
    let mut points = Vec::with_capacity(m);
    points.push(c0);
    let mut x = SidedReal::from_left(t0);
    points.push(x.value);
    for _ in 2..m {
        x = p.eval_f(x)?;
        points.push(x.value);
    }
    let closure = (p.eval_f(x)?.value - c0).abs();
    if closure > CLOSURE_TOL {
        return Err(TanError::ClosureFailed(closure));
    }
    let mut separation = f64::INFINITY;
    for i in 0..m {
        for j in (i + 1)..m {
            separation = separation.min((points[i] - points[j]).abs());
        }
    }
    Ok(OrbitSetP {
        t0,
        n,
        m,
        points,
        separation,
    })
}

/// Assemble the reduced `(m-1) x (m-1)` transfer matrix from the partials
/// of `F` at `(w = c_1, z = c_i)`.
pub fn transfer_matrix(p: &OrbitSetP) -> Result<TransferMatrix> {
    let dim = p.m - 1;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 1..=dim {
        let (fw, fz) = eval_f_partials(p.t0, p.points[i])?;
        if fz == 0.0 {
            return Err(TanError::SingularPartial(p.points[i]));
        }
        a[(i - 1, 0)] += -fw / fz;
        if i + 1 <= dim {
            a[(i - 1, i)] += 1.0 / fz;
        }
    }
    Ok(TransferMatrix { dim, entries: a })
}

/// Eigenvalues of the transfer matrix.
pub fn eigenvalues(a: &TransferMatrix) -> Vec<Complex<f64>> {
    // the QR iteration stalls on an identically zero matrix
    if a.entries.iter().all(|&e| e == 0.0) {
        return vec![Complex::new(0.0, 0.0); a.dim];
    }
    a.entries.clone().complex_eigenvalues().iter().copied().collect()
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &TransferMatrix) -> f64 {
    eigenvalues(a)
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max)
}

/// Coefficients `p_0 = 1, p_k = L(c_k) / (F^k)'(c_1)` of the polynomial
/// `P(rho)`, where `L(z) = dF/dw at (t0, z)` and the orbit derivative is
/// the running product of `dF/dz`.
fn poly_coefficients(p: &OrbitSetP) -> Result<Vec<f64>> {
    let mut coeffs = Vec::with_capacity(p.m);
    coeffs.push(1.0);
    let mut chain = 1.0; // (F^k)'(c_1)
    for k in 1..p.m {
        let (fw, fz) = eval_f_partials(p.t0, p.points[k])?;
        chain *= fz;
        if chain == 0.0 {
            return Err(TanError::SingularPartial(p.points[k]));
        }
        coeffs.push(fw / chain);
    }
    Ok(coeffs)
}

/// Evaluate `P(rho) = 1 + sum rho^k L(c_k) / (F^k)'(c_1)`.
pub fn poly_p(p: &OrbitSetP, rho: f64) -> Result<f64> {
    let coeffs = poly_coefficients(p)?;
    // Horner, highest power first
    Ok(coeffs.iter().rev().fold(0.0, |acc, &c| acc * rho + c))
}

/// Roots of `P(rho)` via the companion matrix.
pub fn poly_p_roots(p: &OrbitSetP) -> Result<Vec<Complex<f64>>> {
    let coeffs = poly_coefficients(p)?;
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead == 0.0 {
        return Err(TanError::SingularPartial(p.t0));
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut c = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        c[(i, deg - 1)] = -coeffs[i] / lead;
    }
    Ok(c.complex_eigenvalues().iter().copied().collect())
}

/// The two independent computations of `Phi'(t0)` plus the positivity flag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiPrime {
    /// Centered finite difference of `Phi`, branch-jump-safe.
    pub numeric: f64,
    /// `(F^{m-1})'(c_1) * P(1)`.
    pub via_identity: f64,
    /// `Phi'(t0) / (F^{m-1})'(c_1) > 0`.
    pub positivity: bool,
}

/// Differentiate the merging condition at `t0` numerically and through
/// the transfer-operator identity.
pub fn phi_prime(p: &OrbitSetP) -> Result<PhiPrime> {
    let coeffs = poly_coefficients(p)?;
    let p1: f64 = coeffs.iter().sum();
    let mut chain = 1.0;
    for k in 1..p.m {
        let (_, fz) = eval_f_partials(p.t0, p.points[k])?;
        chain *= fz;
    }
    let via_identity = chain * p1;

    // centered finite difference with step halving: Phi has pre-pole
    // discontinuities arbitrarily near t0 on one side, and a stencil that
    // straddles one shows up as derivative estimates that disagree
    let mut h = 1e-7 * (1.0 + p.t0.abs());
    let numeric = loop {
        if h < 1e-12 {
            return Err(TanError::BranchJump(h));
        }
        let d_full = fd(p, h);
        let d_half = fd(p, h / 2.0);
        match (d_full, d_half) {
            (Ok(a), Ok(b)) if (a - b).abs() <= 1e-3 * b.abs().max(1e-6) => break b,
            _ => h /= 2.0,
        }
    };
    Ok(PhiPrime {
        numeric,
        via_identity,
        positivity: numeric / chain > 0.0,
    })
}

fn fd(p: &OrbitSetP, h: f64) -> Result<f64> {
    let a = phi(p.t0 + h, p.n)?;
    let b = phi(p.t0 - h, p.n)?;
    Ok((a - b) / (2.0 * h))
}

/// Full certificate for one merging parameter, JSON-serializable.
#[derive(Debug, Clone, Serialize)]
pub struct TransversalityReport {
    pub n: u32,
    pub t0: f64,
    pub m: usize,
    pub separation: f64,
    pub spectral_radius: f64,
    /// Eigenvalues of `A` as `[re, im]` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
    /// `min |1 - lambda|` over the eigenvalues.
    pub min_dist_to_one: f64,
    pub p1: f64,
    pub phi_prime_numeric: f64,
    pub phi_prime_identity: f64,
    pub positivity: bool,
    /// Worst distance between an eigenvalue and the reciprocal of its
    /// matched root of `P`.
    pub eig_root_match_error: f64,
}

/// Run the whole certificate at a computed merging parameter.
///
/// ```
/// use tanfam::{cascade, transversal};
///
/// let beta1 = cascade::cascade_table(1).unwrap().betas[0].t;
/// let report = transversal::certify(beta1, 1).unwrap();
/// assert!(report.spectral_radius < 1.0);
/// assert!(report.positivity);
/// ```
pub fn certify(t0: f64, n: u32) -> Result<TransversalityReport> {
    let orbit = build_orbit_p(t0, n)?;
    let a = transfer_matrix(&orbit)?;
    let eigs = eigenvalues(&a);
    let radius = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let min_dist_to_one = eigs
        .iter()
        .map(|l| (l - Complex::new(1.0, 0.0)).norm())
        .fold(f64::INFINITY, f64::min);
    let roots = poly_p_roots(&orbit)?;
    // match each root's reciprocal against the closest eigenvalue
    let mut match_error = 0.0f64;
    for r in &roots {
        let recip = 1.0 / r;
        let best = eigs
            .iter()
            .map(|l| (l - recip).norm())
            .fold(f64::INFINITY, f64::min);
        match_error = match_error.max(best);
    }
    let p1 = poly_p(&orbit, 1.0)?;
    let pp = phi_prime(&orbit)?;
    Ok(TransversalityReport {
        n,
        t0,
        m: orbit.m,
        separation: orbit.separation,
        spectral_radius: radius,
        eigenvalues: eigs.iter().map(|l| [l.re, l.im]).collect(),
        min_dist_to_one,
        p1,
        phi_prime_numeric: pp.numeric,
        phi_prime_identity: pp.via_identity,
        positivity: pp.positivity,
        eig_root_match_error: match_error,
    })
}
