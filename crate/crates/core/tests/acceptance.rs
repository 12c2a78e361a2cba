//! End-to-end checks of the numerical claims the library is built around.
//! Each test prints a single PASS/FAIL line for its criterion.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;
use std::time::Instant;

use tanfam::cascade::{cascade_table, CascadeTable};
use tanfam::cycles::{count_distinct_cycles, find_attracting_cycle};
use tanfam::render::{column_heights, ppm_bytes, render_orbit_diagram, render_parameter_plane, Rect, RenderConfig};
use tanfam::tanmap::MapParams;
use tanfam::sided::SidedReal;
use tanfam::{attractor, cascade, renorm, transversal};

fn table() -> &'static CascadeTable {
    static TABLE: OnceLock<CascadeTable> = OnceLock::new();
    TABLE.get_or_init(|| cascade_table(5).expect("depth-5 cascade solves"))
}

fn alpha(n: u32) -> f64 {
    table().alphas[(n - 1) as usize].t
}

fn beta(n: u32) -> f64 {
    table().betas[(n - 1) as usize].t
}

struct Criterion {
    label: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion {
            label,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("{}: PASS", self.label);
        } else {
            println!("{}: FAIL — {}", self.label, self.failures.join("; "));
            panic!("{} failed: {:?}", self.label, self.failures);
        }
    }
}

#[test]
fn criterion_1_cascade_anchors() {
    let mut c = Criterion::new("criterion 1 (cascade anchors)");
    let start = Instant::now();
    let fresh = cascade_table(5).expect("cascade solves");
    let elapsed = start.elapsed();
    let (a1, b1) = (fresh.alphas[0].t, fresh.betas[0].t);
    let (a2, b2) = (fresh.alphas[1].t, fresh.betas[1].t);
    c.check(FRAC_PI_2 < a1 && a1 < 2.84, "alpha_1 in (pi/2, 2.84)");
    c.check((b1 - 2.94).abs() <= 0.01, "beta_1 = 2.94 +- 0.01");
    c.check(b2 < 3.085, "beta_2 < 3.085");
    c.check(
        FRAC_PI_2 < a1 && a1 < b1 && b1 < a2 && a2 < b2 && b2 < PI,
        "strict interleaving",
    );
    c.check(elapsed.as_secs_f64() < 1.0, "runtime < 1 s");
    c.finish();
}

#[test]
fn criterion_2_virtual_cycle_residuals() {
    let mut c = Criterion::new("criterion 2 (virtual-cycle residuals)");
    let start = Instant::now();
    let fresh = cascade_table(5).expect("cascade solves");
    for entry in &fresh.betas {
        let residual = cascade::phi(entry.t, entry.n).expect("phi evaluates at beta_n");
        c.check(
            residual.abs() < 1e-10,
            &format!("|Phi_{}(beta_{})| = {:.2e} < 1e-10", entry.n, entry.n, residual.abs()),
        );
    }
    c.check(fresh.betas.len() == 5, "all five levels resolved");
    c.check(start.elapsed().as_secs_f64() < 10.0, "runtime < 10 s");
    c.finish();
}

#[test]
fn criterion_3_parabolic_multipliers() {
    let mut c = Criterion::new("criterion 3 (parabolic multipliers)");
    let mut left = FRAC_PI_2;
    for n in 1..=4u32 {
        let fix = cascade::solve_alpha_fix(n, (left, PI)).expect("parabolic parameter solves");
        let target = if n == 1 { -1.0 } else { 1.0 };
        c.check(
            (fix.cycle.multiplier - target).abs() < 1e-8,
            &format!(
                "multiplier at alpha_{} = {:+.1} +- 1e-8 (err {:.2e})",
                n,
                target,
                (fix.cycle.multiplier - target).abs()
            ),
        );
        // Probe just past the parabolic parameter, but stay inside
        // (alpha_n, beta_n): at n = 4 the window is narrower than 1e-3.
        let probe = (fix.t_star + 1e-3).min(0.5 * (fix.t_star + beta(n)));
        let count = count_distinct_cycles(probe, 1 << (n + 2)).expect("cycle count at probe");
        c.check(count == 2, &format!("two distinct cycles past alpha_{n}"));
        let cycle = find_attracting_cycle(probe, 1 << (n + 2), 4000, 1e-9)
            .expect("cycle search at probe")
            .expect("an attracting cycle exists at probe");
        c.check(
            cycle.period_t == 1 << (n + 1),
            &format!(
                "period past alpha_{} stays {} (got {})",
                n,
                1 << (n + 1),
                cycle.period_t
            ),
        );
        left = beta(n);
    }
    c.finish();
}

#[test]
fn criterion_4_transversality_certificates() {
    let mut c = Criterion::new("criterion 4 (transversality certificates)");
    let start = Instant::now();
    for n in 1..=4u32 {
        let report = transversal::certify(beta(n), n).expect("certificate builds");
        c.check(
            report.spectral_radius <= 1.0 + 1e-9,
            &format!("spectral radius at beta_{n} <= 1 + 1e-9"),
        );
        c.check(
            report.min_dist_to_one > 1e-6,
            &format!("min |1 - lambda| at beta_{n} > 1e-6"),
        );
        let rel = (report.phi_prime_numeric - report.phi_prime_identity).abs()
            / report.phi_prime_numeric.abs();
        c.check(rel < 1e-5, &format!("derivative identity at beta_{n} (rel {rel:.2e})"));
        c.check(report.positivity, &format!("positivity at beta_{n}"));
        c.check(
            report.eig_root_match_error < 1e-8,
            &format!("eigenvalue/root reciprocity at beta_{n}"),
        );
    }
    c.check(start.elapsed().as_secs_f64() < 30.0, "runtime < 30 s");
    c.finish();
}

fn probe_schedule(t: f64, max_period_t: usize) -> (u8, usize) {
    let count = count_distinct_cycles(t, max_period_t).expect("cycle count");
    let cycle = find_attracting_cycle(t, max_period_t, 4000, 1e-9)
        .expect("cycle search")
        .expect("attracting cycle at probe");
    (count, cycle.period_t)
}

#[test]
fn criterion_5_schedule_reproduction() {
    let mut c = Criterion::new("criterion 5 (bifurcation schedule)");
    let t29 = if alpha(1) < 2.9 && 2.9 < beta(1) {
        2.9
    } else {
        0.5 * (alpha(1) + beta(1))
    };
    for (t, want) in [
        (0.5, (1, 1)),
        (1.2, (1, 4)),
        (2.0, (2, 2)),
        (t29, (2, 4)),
        (3.0, (1, 8)),
    ] {
        let got = probe_schedule(t, 64);
        c.check(
            got == want,
            &format!("t = {t}: (count, period_T) = {got:?}, want {want:?}"),
        );
    }
    // deeper windows: merged cycle between beta_n and alpha_{n+1}, split
    // pair between alpha_{n+1} and beta_{n+1}
    for n in 2..=3u32 {
        let period = 1usize << (n + 2);
        let merged = probe_schedule(0.5 * (beta(n) + alpha(n + 1)), 2 * period);
        c.check(
            merged == (1, period),
            &format!("merged window after beta_{n}: {merged:?}, want (1, {period})"),
        );
        let split = probe_schedule(0.5 * (alpha(n + 1) + beta(n + 1)), 2 * period);
        c.check(
            split == (2, period),
            &format!("split window after alpha_{}: {split:?}, want (2, {period})", n + 1),
        );
    }
    c.finish();
}

#[test]
fn criterion_6_kernel_properties() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7a6e);
    let mut c = Criterion::new("criterion 6 (map-kernel properties)");
    let mut worst_fd = 0.0f64;
    for _ in 0..1000 {
        let t = rng.gen_range(1.0 + 1e-6..=PI);
        let p = MapParams::new(t).unwrap();
        // f' ~ sech^2(t tan x) collapses to zero exponentially fast toward
        // the poles, so bound t tan x to keep derivative checks meaningful
        let k = rng.gen_range(-3i32..=3) as f64;
        let slope = rng.gen_range(-5.0 / t..5.0 / t);
        let offset = slope.atan();
        let x = k * PI + offset;
        let fx = p.eval_f(SidedReal::plain(x)).unwrap().value;
        let f_neg = p.eval_f(SidedReal::plain(-x)).unwrap().value;
        let f_shift = p.eval_f(SidedReal::plain(x + PI)).unwrap().value;
        c.check((fx + f_neg).abs() < 1e-9, "oddness");
        c.check((fx - f_shift).abs() < 1e-9, "pi-periodicity");
        c.check(fx.abs() <= t + 1e-12, "range inside [-t, t]");
        let dx = rng.gen_range(1e-4..1e-2);
        if offset + dx < (5.0 / t).atan() {
            let fx2 = p.eval_f(SidedReal::plain(x + dx)).unwrap().value;
            c.check(fx2 < fx, "strictly decreasing per branch");
        }
        let d = p.eval_f_prime(x).unwrap();
        // fourth-order stencil keeps the truncation error comfortably
        // below the 1e-6 relative gate even where f''' is large
        let h = 1e-4 / (1.0 + slope * slope);
        let f = |y: f64| p.eval_f(SidedReal::plain(y)).unwrap().value;
        let fd = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
        if d.abs() > 1e-12 {
            worst_fd = worst_fd.max((fd - d).abs() / d.abs());
        }
        let s = p.schwarzian(x).unwrap();
        c.check(s < 0.0, "negative Schwarzian for t > 1");
    }
    c.check(worst_fd < 1e-6, &format!("derivative vs FD (worst rel {worst_fd:.2e})"));

    // pre-pole symmetry a_n + b_n = pi through level 5; admissible
    // parameters sit just past beta_4
    let (lo, hi) = (beta(4) + 5e-6, beta(5) - 5e-6);
    for _ in 0..20 {
        let t = rng.gen_range(lo..hi);
        for n in 1..=5u32 {
            let lv = renorm::level(t, n).expect("renormalization level exists");
            c.check(
                (lv.a_n + lv.b_n - PI).abs() < 1e-12,
                &format!("a_{n} + b_{n} = pi at t = {t:.9}"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_7_cantor_system() {
    let mut c = Criterion::new("criterion 7 (Cantor system)");
    let t_star = table().t_infinity_estimate;
    let system = attractor::build_levels(t_star, 4).expect("depth-4 system builds");
    let report = attractor::verify_system(&system);
    c.check(report.decomposition_exact, "decomposition exact at shared endpoints");
    c.check(report.disjoint, "bridges pairwise disjoint");
    c.check(
        report.images_match,
        &format!("f-images of endpoints (worst {:.2e})", report.max_image_mismatch),
    );
    c.check(report.shrinking, "max bridge length strictly decreasing");
    let cv = &system.orbit_constants;
    c.check(
        cv[1] < FRAC_PI_2 && FRAC_PI_2 < cv[3] && cv[3] < cv[2] && cv[2] < cv[0],
        "ordering c2 < pi/2 < c4 < c3 < c1",
    );
    c.check(report.all_passed(), "full verification report clean");
    c.finish();
}

#[test]
fn criterion_8_renders() {
    let mut c = Criterion::new("criterion 8 (renders)");
    let cfg = RenderConfig::new(
        Rect {
            re_min: -3.15,
            re_max: 3.15,
            im_min: 0.0,
            im_max: 3.15,
        },
        400,
        400,
    )
    .unwrap();
    let start = Instant::now();
    let first = render_parameter_plane(&cfg).unwrap();
    let elapsed = start.elapsed();
    c.check(elapsed.as_secs_f64() < 60.0, &format!("400x400 render in {elapsed:.2?} < 60 s"));
    let second = render_parameter_plane(&cfg).unwrap();
    c.check(ppm_bytes(&first) == ppm_bytes(&second), "deterministic bytes across runs");

    // bottom row sits at Im t = 0+; the color transitions there must line
    // up with the cascade parameters within one pixel
    let dt = (cfg.region.re_max - cfg.region.re_min) / cfg.width as f64;
    let bottom: Vec<[u8; 3]> = (0..cfg.width)
        .map(|x| first.get(x, cfg.height - 1))
        .collect();
    // first pixel whose center lies past the transition parameter
    let col_of = |t: f64| ((t - cfg.region.re_min) / dt - 0.5).ceil() as i64;
    for (what, tau, period_before) in [
        ("quadrupling at 1", 1.0, 1usize),
        ("splitting at pi/2", FRAC_PI_2, 4),
        ("doubling at alpha_1", alpha(1), 2),
        ("merging at beta_1", beta(1), 4),
        ("merging at beta_2", beta(2), 8),
    ] {
        // scan the positive-Re half only (the mirror half repeats the
        // pattern in reverse); the run of the pre-transition color must
        // end within one pixel of the transition, whatever comes next
        // (the next band can be narrower than a pixel, and a parabolic
        // boundary pixel may not converge at all)
        let cb = cfg.palette.color(period_before);
        let expected = col_of(tau);
        let hi = ((expected + 1).min(cfg.width as i64 - 1)) as usize;
        let run_end = (cfg.width / 2..=hi).rev().find(|&x| bottom[x] == cb);
        match run_end {
            Some(last) => c.check(
                (last as i64 + 1 - expected).abs() <= 1,
                &format!("{what}: color run ends off by more than one pixel"),
            ),
            None => c.check(false, &format!("{what}: pre-transition color not found")),
        }
    }

    // orbit diagram: branch counts across the quadrupling, splitting and
    // merging transitions
    for (t, want) in [
        (0.5, 1usize),
        (1.2, 2),
        (2.0, 1),
        (2.9, 2),
        (3.0, 4),
        (0.5 * (alpha(2) + beta(2)), 4),
    ] {
        let heights = column_heights(t, 30_000, 128, 1e-4).expect("column heights");
        c.check(
            heights.len() == want,
            &format!("branch count at t = {t:.4}: {} want {want}", heights.len()),
        );
    }
    let mut dcfg = RenderConfig::new(
        Rect {
            re_min: 0.05,
            re_max: PI,
            im_min: -PI,
            im_max: PI,
        },
        800,
        600,
    )
    .unwrap();
    dcfg.transient = 3000;
    let diagram = render_orbit_diagram(&dcfg).unwrap();
    let black = diagram.pixels.iter().filter(|&&p| p == [0, 0, 0]).count();
    c.check(black > 800, "diagram visibly populated");
    c.finish();
}
