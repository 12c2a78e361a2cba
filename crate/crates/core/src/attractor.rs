//! Binary Cantor interval systems built from the asymptotic-value orbit
//! at a parameter near the end of the cascade.
//!
//! With `o_m = f^m(pi/2+)` the signed orbit and `c_m = |o_m|`, level `n`
//! keeps the closed bridges `J_{nm+-}` bounded by `+-c_m` and
//! `+-c_{2^n + m}` for `m = 1..2^n`, and removes from each level-`(n-1)`
//! bridge the open gap `G_{(n-1)k+-}` bounded by `+-c_{2^n + k}` and
//! `+-c_{2^n + 2^{n-1} + k}`. Every endpoint is an orbit constant;
//! nothing is invented. The decomposition
//! `J_{(n-1)k} = J_{nk} u G_{(n-1)k} u J_{n(2^{n-1}+k)}`
//! is exact at shared endpoints by index bookkeeping.

use crate::error::{Result, TanError};
use crate::sided::SidedReal;
use crate::tanmap::MapParams;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bridge,
    Gap,
}

/// A bridge or gap with its endpoint provenance.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledInterval {
    pub level: u32,
    /// +1 for the positive-axis copy, -1 for its mirror.
    pub side: i8,
    /// `m` for bridges, `k` for gaps.
    pub index: usize,
    pub left: f64,
    pub right: f64,
    /// Orbit indices of `|left|` and `|right|`.
    pub left_orbit_index: usize,
    pub right_orbit_index: usize,
    pub kind: Kind,
}

impl LabeledInterval {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// One level of the construction.
#[derive(Debug, Clone, Serialize)]
pub struct CantorLevel {
    pub n: u32,
    pub bridges_plus: Vec<LabeledInterval>,
    pub bridges_minus: Vec<LabeledInterval>,
    /// Gaps removed from this level's bridges when the next one is built.
    pub gaps_plus: Vec<LabeledInterval>,
    pub gaps_minus: Vec<LabeledInterval>,
}

/// The full system at one parameter.
#[derive(Debug, Clone, Serialize)]
pub struct CantorSystem {
    pub t_star: f64,
    /// Magnitudes `c_1..c_M`.
    pub orbit_constants: Vec<f64>,
    /// Signed orbit values `o_1..o_M`.
    pub signed_orbit: Vec<f64>,
    pub levels: Vec<CantorLevel>,
}

/// Per-check results of [`verify_system`]; `failures` lists anything that
/// did not hold.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub t_star: f64,
    pub depth: u32,
    pub decomposition_exact: bool,
    pub disjoint: bool,
    pub images_match: bool,
    pub max_image_mismatch: f64,
    pub shrinking: bool,
    /// Max bridge length per level.
    pub max_bridge_lengths: Vec<f64>,
    pub density_ok: bool,
    pub pole_in_plus_bridge: bool,
    /// Largest |Re T(x)| over sampled endpoint images (should be 0).
    pub imaginary_image_max_re: f64,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const IMAGE_TOL: f64 = 1e-9;

/// Signed orbit `o_1..o_M` of the pole limit `pi/2+`; `o_1 = t` exactly.
fn signed_orbit(t_star: f64, m: usize) -> Result<Vec<f64>> {
    let p = MapParams::new(t_star)?;
    let mut out = Vec::with_capacity(m);
    let mut x = SidedReal::from_right(FRAC_PI_2);
    for _ in 0..m {
        x = p.eval_f(x)?;
        out.push(x.value);
    }
    Ok(out)
}

/// Orbit constants `c_1..c_M = |f^m(pi/2+)|`.
pub fn orbit_constants(t_star: f64, m: usize) -> Result<Vec<f64>> {
    Ok(signed_orbit(t_star, m)?.iter().map(|o| o.abs()).collect())
}

/// Build levels `0..=depth` of the binary Cantor system at `t_star`.
///
/// ```
/// use tanfam::{attractor, cascade};
///
/// let t_star = cascade::cascade_table(5).unwrap().t_infinity_estimate;
/// let system = attractor::build_levels(t_star, 3).unwrap();
/// let report = attractor::verify_system(&system);
/// assert!(report.all_passed(), "{:?}", report.failures);
/// // each level halves into bridges separated by gaps
/// assert_eq!(system.levels[3].bridges_plus.len(), 8);
/// ```
pub fn build_levels(t_star: f64, depth: u32) -> Result<CantorSystem> {
    if depth > 6 {
        return Err(TanError::InvalidParams(format!(
            "depth {depth} exceeds 6; orbit constants degrade past that"
        )));
    }
    let m_total = 1usize << (depth + 1);
    let o = signed_orbit(t_star, m_total)?;
    let c: Vec<f64> = o.iter().map(|x| x.abs()).collect();
    // 1-based access into the orbit constants
    let cv = |i: usize| c[i - 1];

    if !(cv(2) < FRAC_PI_2 && FRAC_PI_2 < cv(4) && cv(4) < cv(3) && cv(3) < cv(1)) {
        return Err(TanError::OrderingViolated(0));
    }

    let interval = |level: u32, side: i8, index: usize, i: usize, j: usize, kind: Kind| {
        let (a, b) = (side as f64 * cv(i), side as f64 * cv(j));
        let (left, right, li, ri) = if a < b { (a, b, i, j) } else { (b, a, j, i) };
        LabeledInterval {
            level,
            side,
            index,
            left,
            right,
            left_orbit_index: li,
            right_orbit_index: ri,
            kind,
        }
    };

    let mut levels: Vec<CantorLevel> = Vec::with_capacity(depth as usize + 1);
    for n in 0..=depth {
        let count = 1usize << n;
        let mut bridges_plus = Vec::with_capacity(count);
        let mut bridges_minus = Vec::with_capacity(count);
        for m in 1..=count {
            bridges_plus.push(interval(n, 1, m, m, count + m, Kind::Bridge));
            bridges_minus.push(interval(n, -1, m, m, count + m, Kind::Bridge));
        }
        levels.push(CantorLevel {
            n,
            bridges_plus,
            bridges_minus,
            gaps_plus: Vec::new(),
            gaps_minus: Vec::new(),
        });
        if n >= 1 {
            // gaps removed from level n-1: G_{(n-1)k} bounded by c_{2^n+k}
            // and c_{2^n + 2^{n-1} + k}
            let half = 1usize << (n - 1);
            let mut gaps_plus = Vec::with_capacity(half);
            let mut gaps_minus = Vec::with_capacity(half);
            for k in 1..=half {
                let (i, j) = ((1 << n) + k, (1 << n) + half + k);
                gaps_plus.push(interval(n - 1, 1, k, i, j, Kind::Gap));
                gaps_minus.push(interval(n - 1, -1, k, i, j, Kind::Gap));
            }
            let parent = &mut levels[(n - 1) as usize];
            parent.gaps_plus = gaps_plus;
            parent.gaps_minus = gaps_minus;
        }
    }

    let system = CantorSystem {
        t_star,
        orbit_constants: c,
        signed_orbit: o,
        levels,
    };
    // structural sanity: children and gap sit inside the parent in order
    for n in 1..=depth {
        for side_plus in [true, false] {
            let parent_bridges = side(&system.levels[(n - 1) as usize], side_plus, Kind::Bridge);
            let gaps = side(&system.levels[(n - 1) as usize], side_plus, Kind::Gap);
            let children = side(&system.levels[n as usize], side_plus, Kind::Bridge);
            for (k, parent) in parent_bridges.iter().enumerate() {
                let a = &children[k];
                let b = &children[(1 << (n - 1)) + k];
                let g = &gaps[k];
                let (lo_child, hi_child) = if a.left < b.left { (a, b) } else { (b, a) };
                let ordered = parent.left == lo_child.left
                    && lo_child.right == g.left
                    && g.right == hi_child.left
                    && hi_child.right == parent.right;
                if !ordered {
                    return Err(TanError::OrderingViolated(n));
                }
            }
        }
    }
    Ok(system)
}

fn side(level: &CantorLevel, plus: bool, kind: Kind) -> &[LabeledInterval] {
    match (plus, kind) {
        (true, Kind::Bridge) => &level.bridges_plus,
        (false, Kind::Bridge) => &level.bridges_minus,
        (true, Kind::Gap) => &level.gaps_plus,
        (false, Kind::Gap) => &level.gaps_minus,
    }
}

/// Run every finite-depth check of the construction.
pub fn verify_system(system: &CantorSystem) -> VerificationReport {
    let depth = system.levels.len() as u32 - 1;
    let mut failures = Vec::new();
    let p = MapParams::new(system.t_star).expect("system was built with a valid parameter");
    let m_total = system.orbit_constants.len();
    let cv = |i: usize| system.orbit_constants[i - 1];

    // (1) decomposition identities, exact at shared endpoints
    let mut decomposition_exact = true;
    for n in 1..=depth {
        for plus in [true, false] {
            let parents = side(&system.levels[(n - 1) as usize], plus, Kind::Bridge);
            let gaps = side(&system.levels[(n - 1) as usize], plus, Kind::Gap);
            let children = side(&system.levels[n as usize], plus, Kind::Bridge);
            for (k, parent) in parents.iter().enumerate() {
                let a = &children[k];
                let b = &children[(1 << (n - 1)) + k];
                let g = &gaps[k];
                let (lo, hi) = if a.left < b.left { (a, b) } else { (b, a) };
                if !(parent.left == lo.left
                    && lo.right == g.left
                    && g.right == hi.left
                    && hi.right == parent.right)
                {
                    decomposition_exact = false;
                    failures.push(format!(
                        "decomposition broken at level {n}, k={}, side {}",
                        k + 1,
                        if plus { '+' } else { '-' }
                    ));
                }
            }
        }
    }

    // (2) bridges at one level are pairwise disjoint
    let mut disjoint = true;
    for level in &system.levels {
        let mut all: Vec<(f64, f64)> = level
            .bridges_plus
            .iter()
            .chain(&level.bridges_minus)
            .map(|b| (b.left, b.right))
            .collect();
        all.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in all.windows(2) {
            if w[0].1 >= w[1].0 {
                disjoint = false;
                failures.push(format!("overlap at level {}", level.n));
            }
        }
    }

    // (3) f-images of bridge endpoints land on the successor orbit
    // constant: index bookkeeping plus numeric confirmation
    let mut max_image_mismatch = 0.0f64;
    for level in &system.levels {
        for b in level.bridges_plus.iter().chain(&level.bridges_minus) {
            for (val, idx) in [
                (b.left, b.left_orbit_index),
                (b.right, b.right_orbit_index),
            ] {
                if idx + 1 > m_total {
                    continue;
                }
                match p.eval_f(SidedReal::plain(val)) {
                    Ok(img) => {
                        let mismatch = (img.value.abs() - cv(idx + 1)).abs();
                        max_image_mismatch = max_image_mismatch.max(mismatch);
                    }
                    Err(_) => failures.push(format!(
                        "endpoint c_{idx} sits on a pole at level {}",
                        level.n
                    )),
                }
            }
        }
    }
    let images_match = max_image_mismatch < IMAGE_TOL;
    if !images_match {
        failures.push(format!("image mismatch {max_image_mismatch:.3e}"));
    }

    // (4) max bridge length strictly decreasing in the level
    let max_bridge_lengths: Vec<f64> = system
        .levels
        .iter()
        .map(|l| {
            l.bridges_plus
                .iter()
                .map(LabeledInterval::length)
                .fold(0.0, f64::max)
        })
        .collect();
    let shrinking = max_bridge_lengths.windows(2).all(|w| w[1] < w[0]);
    if !shrinking {
        failures.push("bridge lengths not strictly decreasing".into());
    }

    // (5) density proxy: an orbit point of index <= 2^{n+1} in each bridge
    let mut density_ok = true;
    for level in &system.levels {
        let cutoff = 1usize << (level.n + 1);
        for b in level.bridges_plus.iter().chain(&level.bridges_minus) {
            let hit = (1..=cutoff.min(m_total)).any(|j| {
                let x = b.side as f64 * cv(j);
                b.left <= x && x <= b.right
            });
            if !hit {
                density_ok = false;
                failures.push(format!(
                    "no early orbit point in level-{} bridge {}",
                    level.n, b.index
                ));
            }
        }
    }

    // (6) the pole pi/2 stays inside a plus-side bridge at every level
    let mut pole_in_plus_bridge = true;
    for level in &system.levels {
        if !level
            .bridges_plus
            .iter()
            .any(|b| b.left <= FRAC_PI_2 && FRAC_PI_2 <= b.right)
        {
            pole_in_plus_bridge = false;
            failures.push(format!("pole escaped at level {}", level.n));
        }
    }

    // (7) T maps endpoint samples to the imaginary axis
    let mut imaginary_image_max_re = 0.0f64;
    if let Some(last) = system.levels.last() {
        for b in &last.bridges_plus {
            for val in [b.left, b.right] {
                if let Ok(w) = p.eval_t(num_complex::Complex64::new(val, 0.0)) {
                    imaginary_image_max_re = imaginary_image_max_re.max(w.re.abs());
                }
            }
        }
    }
    if imaginary_image_max_re >= 1e-12 {
        failures.push("T-image strayed off the imaginary axis".into());
    }

    VerificationReport {
        t_star: system.t_star,
        depth,
        decomposition_exact,
        disjoint,
        images_match,
        max_image_mismatch,
        shrinking,
        max_bridge_lengths,
        density_ok,
        pole_in_plus_bridge,
        imaginary_image_max_re,
        failures,
    }
}

/// CSV dump of every interval: `level,side,index,left,right,kind`.
pub fn to_csv(system: &CantorSystem) -> String {
    let mut out = String::from("level,side,index,left,right,kind\n");
    for level in &system.levels {
        for iv in level
            .bridges_plus
            .iter()
            .chain(&level.bridges_minus)
            .chain(&level.gaps_plus)
            .chain(&level.gaps_minus)
        {
            let kind = match iv.kind {
                Kind::Bridge => "bridge",
                Kind::Gap => "gap",
            };
            out.push_str(&format!(
                "{},{},{},{:.17e},{:.17e},{}\n",
                iv.level, iv.side, iv.index, iv.left, iv.right, kind
            ));
        }
    }
    out
}
