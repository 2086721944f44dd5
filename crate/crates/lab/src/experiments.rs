//! Named experiments. Each one builds families, evaluates estimators over a
//! ladder of scales and returns a [`Report`]: fixed CSV columns, a summary,
//! and the pass/fail checks that decide the exit code.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use hkakeya::constructions::{self, TubeLattice};
use hkakeya::curves::{self, Interval, Quadratic};
use hkakeya::estimator::{self, RhsForm};
use hkakeya::heis::{HDirection, HPoint};
use hkakeya::incidence::{self, IncidenceParams};
use hkakeya::projection;
use hkakeya::sampling::{shard_rng, uniform, SampleSpec, ShardExecutor};
use hkakeya::tube::{self, Line, ProbeSpec, TubeFamily};
use hkakeya::{ExponentFit, HTube};
use thiserror::Error;

use crate::config::Config;
use crate::family;

pub const EXPERIMENTS: [&str; 10] = [
    "bush-refutes-naive",
    "opposed-pair-scaling",
    "bipartite-ball-sharpness",
    "clamshell-alpha",
    "parabolic-net-p23",
    "projection-containment",
    "fiber-length",
    "lemma-rect-structure",
    "wolff-bound-check",
    "broadness-scan",
];

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown experiment `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Core(#[from] hkakeya::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(experiment: &'static str, columns: &[&'static str]) -> Self {
        Report { experiment, columns: columns.to_vec(), rows: Vec::new(), summary: Vec::new(), checks: Vec::new() }
    }

    fn row(&mut self, values: Vec<String>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    fn fit_note(&mut self, key: &str, fit: &ExponentFit) {
        self.note(&format!("{key}_slope"), fit.slope);
        self.note(&format!("{key}_r2"), fit.r_squared);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn get_note(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Numeric values of one column; non-numeric cells become NaN.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.columns.iter().position(|c| *c == name) else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }

    /// The CSV body: header row then one line per record.
    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn f(v: f64) -> String {
    v.to_string()
}

fn seed(cfg: &Config) -> u64 {
    cfg.seed.unwrap_or(DEFAULT_SEED)
}

/// Runs the named experiment.
pub fn run<E: ShardExecutor>(name: &str, cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    match name {
        "bush-refutes-naive" => bush_refutes_naive(cfg, exec),
        "opposed-pair-scaling" => opposed_pair_scaling(cfg, exec),
        "bipartite-ball-sharpness" => bipartite_ball_sharpness(cfg, exec),
        "clamshell-alpha" => clamshell_alpha(cfg),
        "parabolic-net-p23" => parabolic_net(cfg, exec),
        "projection-containment" => projection_containment(cfg, exec),
        "fiber-length" => fiber_length(cfg, exec),
        "lemma-rect-structure" => lemma_rect_structure(cfg, exec),
        "wolff-bound-check" => wolff_bound_check(cfg, exec),
        "broadness-scan" => broadness_scan(cfg),
        _ => Err(ExperimentError::Unknown(name.to_string())),
    }
}

fn fit(points: &[(f64, f64)]) -> Result<ExponentFit, ExperimentError> {
    Ok(estimator::fit_exponent(points)?)
}

/// The bush against the naive right side `δ⁴ #T1^{3/4} #T2^{3/4}`.
///
/// Columns: `delta,n1,n2,lhs,stderr,rhs,ratio,bush_ratio,tube_ratio`, where
/// `rhs` is the naive form, `bush_ratio = lhs/(δ⁴ n1^{3/4} n2)` and
/// `tube_ratio` divides by the tube form.
pub fn bush_refutes_naive<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let p = cfg.p.unwrap_or(0.75);
    let samples = cfg.samples.unwrap_or(1_000_000);
    let mut rep = Report::new(
        "bush-refutes-naive",
        &["delta", "n1", "n2", "lhs", "stderr", "rhs", "ratio", "bush_ratio", "tube_ratio"],
    );
    let mut naive_pts = Vec::new();
    let mut bush_ok = true;
    for (i, delta) in cfg.ladder((4, 8)).into_iter().enumerate() {
        let (t1, t2) = constructions::build_bush(delta)?;
        let spec = SampleSpec::monte_carlo(samples, seed(cfg).wrapping_add(i as u64));
        let lhs = estimator::bilinear_tube_integral(&t1, &t2, p, &spec, exec)?;
        let (n1, n2) = (t1.len(), t2.len());
        let naive = estimator::rhs_bilinear(n1, n2, delta, p, RhsForm::Naive, 1.0);
        let bush = delta.powi(4) * (n1 as f64).powf(0.75) * n2 as f64;
        let tube = estimator::rhs_bilinear(n1, n2, delta, p, RhsForm::Tube, 1.0);
        let ratio = lhs.value / naive;
        let bush_ratio = lhs.value / bush;
        bush_ok &= (1.0 / 16.0..=16.0).contains(&bush_ratio);
        naive_pts.push((delta, ratio));
        rep.row(vec![
            f(delta),
            n1.to_string(),
            n2.to_string(),
            f(lhs.value),
            f(lhs.stderr),
            f(naive),
            f(ratio),
            f(bush_ratio),
            f(lhs.value / tube),
        ]);
    }
    let fit = fit(&naive_pts)?;
    rep.fit_note("naive_ratio", &fit);
    rep.check("bush_ratio_bounded", bush_ok, "lhs/(delta^4 n1^(3/4) n2) in [1/16, 16] at every delta");
    rep.check("naive_ratio_grows", fit.slope <= -0.15, format!("slope {} <= -0.15", fit.slope));
    Ok(rep)
}

fn planar_spec(cfg: &Config, delta: f64) -> SampleSpec {
    SampleSpec::grid(cfg.grid_res.unwrap_or(delta / 4.0))
}

/// Columns: `sweep,delta,rho,lhs,rhs,ratio,stderr`; `sweep` is `delta` for
/// the ladder at fixed ρ and `rho` for ρ ∈ {2⁻¹..2⁻⁴} at δ = 2⁻⁸.
pub fn opposed_pair_scaling<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let p = cfg.p.unwrap_or(0.75);
    let rho = cfg.rho.unwrap_or(1.0);
    let mut rep = Report::new("opposed-pair-scaling", &["sweep", "delta", "rho", "lhs", "rhs", "ratio", "stderr"]);
    let one = |rep: &mut Report, sweep: &str, delta: f64, rho: f64| -> Result<f64, ExperimentError> {
        let pair = constructions::build_opposed_pair(delta, rho)?;
        let lhs = estimator::bilinear_curve_integral(&pair.f, &pair.g, delta, p, &planar_spec(cfg, delta), exec)?;
        let rhs = estimator::rhs_bilinear(1, 1, delta, p, RhsForm::Curve, rho);
        rep.row(vec![sweep.into(), f(delta), f(rho), f(lhs.value), f(rhs), f(lhs.value / rhs), f(lhs.stderr)]);
        Ok(lhs.value)
    };
    let mut by_delta = Vec::new();
    for delta in cfg.ladder((4, 10)) {
        by_delta.push((delta, one(&mut rep, "delta", delta, rho)?));
    }
    let mut by_rho = Vec::new();
    for k in 1..=4 {
        let r = 0.5f64.powi(k);
        by_rho.push((r, one(&mut rep, "rho", 1.0 / 256.0, r)?));
    }
    let fd = fit(&by_delta)?;
    let fr = fit(&by_rho)?;
    rep.fit_note("delta", &fd);
    rep.fit_note("rho", &fr);
    rep.check("delta_slope", (fd.slope - 1.5).abs() <= 0.1, format!("slope vs delta {} = 1.5 +- 0.1", fd.slope));
    rep.check("rho_slope", (fr.slope + 0.5).abs() <= 0.1, format!("slope vs rho {} = -0.5 +- 0.1", fr.slope));
    Ok(rep)
}

/// Multiplicity of a coefficient-ball family at random points near its
/// central curve, divided by `(ρ/δ)²`.
fn ball_probe_ratios<E: ShardExecutor>(
    family: &[Quadratic],
    center: &Quadratic,
    delta: f64,
    rho: f64,
    probes: usize,
    seed: u64,
    exec: &E,
) -> Vec<f64> {
    let scale = (rho / delta).powi(2);
    exec.map_shards(probes, |i| {
        let mut rng = shard_rng(seed, i as u64);
        let s = uniform(&mut rng, 0.0, 1.0);
        let y = center.eval(s) + uniform(&mut rng, -0.25, 0.25) * rho;
        estimator::curve_multiplicity(family, delta, s, y) as f64 / scale
    })
}

/// Columns: `delta,n_f,n_g,lhs,stderr,rhs,ratio,scaled,probe_min,probe_max,probe_min_g,probe_max_g`
/// with `scaled = lhs·δ^{4p}` and probe ratios `m/(ρ/δ)²`.
pub fn bipartite_ball_sharpness<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let p = cfg.p.unwrap_or(0.75);
    let rho = cfg.rho.unwrap_or(0.25);
    let probes = cfg.samples.unwrap_or(1000) as usize;
    let mut rep = Report::new(
        "bipartite-ball-sharpness",
        &[
            "delta", "n_f", "n_g", "lhs", "stderr", "rhs", "ratio", "scaled", "probe_min", "probe_max", "probe_min_g",
            "probe_max_g",
        ],
    );
    let mut pts = Vec::new();
    let mut probe_ok = true;
    for (i, delta) in cfg.ladder((5, 7)).into_iter().enumerate() {
        let pair = constructions::build_bipartite_balls(delta, rho)?;
        let lhs = estimator::bilinear_curve_integral(&pair.f, &pair.g, delta, p, &planar_spec(cfg, delta), exec)?;
        let rhs = estimator::rhs_bilinear(pair.f.len(), pair.g.len(), delta, p, RhsForm::Curve, rho);
        let scaled = lhs.value * delta.powf(4.0 * p);
        let base = seed(cfg).wrapping_add(1000 * i as u64);
        let pf = ball_probe_ratios(&pair.f, &constructions::bipartite_ball_center(rho, 1.0), delta, rho, probes, base, exec);
        let pg = ball_probe_ratios(&pair.g, &constructions::bipartite_ball_center(rho, -1.0), delta, rho, probes, base + 1, exec);
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        probe_ok &= min(&pf) >= 1.0 / 8.0 && max(&pf) <= 8.0;
        pts.push((delta, scaled));
        rep.row(vec![
            f(delta),
            pair.f.len().to_string(),
            pair.g.len().to_string(),
            f(lhs.value),
            f(lhs.stderr),
            f(rhs),
            f(lhs.value / rhs),
            f(scaled),
            f(min(&pf)),
            f(max(&pf)),
            f(min(&pg)),
            f(max(&pg)),
        ]);
    }
    let fit = fit(&pts)?;
    rep.fit_note("scaled", &fit);
    rep.check("probe_multiplicity", probe_ok, "m_F/(rho/delta)^2 in [1/8, 8] at every probe");
    rep.check("scaled_flat", fit.slope.abs() <= 0.2, format!("|slope of lhs*delta^(4p)| = {} <= 0.2", fit.slope.abs()));
    Ok(rep)
}

/// Columns: `alpha,n_f,n_g,n_rects,rich_pieces,worst_ratio,probes,mu1_bound,mu2_bound,witness`.
/// `mu1_bound = δ^{1/3}N^{4/3}` and `mu2_bound = δ^{α/(1−α)}N^{1/(1−α)}` are
/// the two upper bounds on μ whose comparison forces α ≥ 1/4.
pub fn clamshell_alpha(cfg: &Config) -> Result<Report, ExperimentError> {
    let c = family::clamshell_from(cfg)?;
    let n = c.f.len();
    let mut alphas = vec![0.2, 0.25, 0.5];
    if let Some(a) = cfg.alpha {
        if !alphas.contains(&a) {
            alphas.push(a);
        }
    }
    let mut rep = Report::new(
        "clamshell-alpha",
        &["alpha", "n_f", "n_g", "n_rects", "rich_pieces", "worst_ratio", "probes", "mu1_bound", "mu2_bound", "witness"],
    );
    let rich = c
        .rects
        .iter()
        .map(|r| incidence::richness_of(r, &c.f, &c.g).map(|x| x.mu == c.mu && x.nu == c.nu))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|&ok| ok)
        .count();
    let expected_rects = (1.0 / c.t.sqrt()).round() as usize * n / c.mu;
    let mu1 = c.delta.powf(1.0 / 3.0) * (n as f64).powf(4.0 / 3.0);
    let mut ratios = Vec::new();
    for &alpha in &alphas {
        let b = incidence::quad_broadness(&c.f, c.delta, alpha, &ProbeSpec::default())?;
        let mu2 = c.delta.powf(alpha / (1.0 - alpha)) * (n as f64).powf(1.0 / (1.0 - alpha));
        ratios.push((alpha, b.worst_ratio));
        rep.row(vec![
            f(alpha),
            n.to_string(),
            c.g.len().to_string(),
            c.rects.len().to_string(),
            rich.to_string(),
            f(b.worst_ratio),
            b.probes.to_string(),
            f(mu1),
            f(mu2),
            b.witness,
        ]);
    }
    let at = |a: f64| ratios.iter().find(|r| r.0 == a).map(|r| r.1).unwrap_or(f64::NAN);
    rep.note("worst_ratio_0.2", at(0.2));
    rep.note("worst_ratio_0.5", at(0.5));
    rep.note("ratio_ceiling_0.2", c.delta.powf(-0.2));
    rep.check("family_size", n == cfg.n.unwrap_or(256), format!("#F = {n}"));
    rep.check("rect_count", c.rects.len() == expected_rects, format!("#R = {} (expected {expected_rects})", c.rects.len()));
    rep.check("every_piece_rich", rich == c.rects.len(), format!("{rich} of {} pieces are (mu, nu)-rich", c.rects.len()));
    rep.check("not_broad_at_0.2", at(0.2) > 10.0, format!("worst ratio at alpha = 0.2 is {} (> 10 required)", at(0.2)));
    rep.check("ratio_grows_with_alpha", at(0.5) > at(0.2), format!("ratio(0.5) = {} > ratio(0.2) = {}", at(0.5), at(0.2)));
    rep.check("mu1_consistent", (c.mu as f64) <= mu1, format!("mu = {} <= delta^(1/3) N^(4/3) = {mu1}", c.mu));
    Ok(rep)
}

/// Largest multiplicity of `lat` over random points of `B(0, 1)`.
fn max_multiplicity<E: ShardExecutor>(lat: &TubeLattice, probes: usize, seed: u64, exec: &E) -> u32 {
    exec.map_shards(probes, |i| {
        let mut rng = shard_rng(seed, i as u64);
        lat.multiplicity(&projection::sample_koranyi_ball(&mut rng, 1.0))
    })
    .into_iter()
    .max()
    .unwrap_or(0)
}

/// Columns: `delta,n1,n2,lhs,stderr,rhs,ratio,max_mult_x,max_mult_y`.
pub fn parabolic_net<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let p = cfg.p.unwrap_or(2.0 / 3.0);
    let samples = cfg.samples.unwrap_or(1_000_000);
    let mut rep = Report::new(
        "parabolic-net-p23",
        &["delta", "n1", "n2", "lhs", "stderr", "rhs", "ratio", "max_mult_x", "max_mult_y"],
    );
    let mut pts = Vec::new();
    let mut worst = 0;
    for (i, delta) in cfg.ladder((4, 6)).into_iter().enumerate() {
        let (x, y) = constructions::build_parabolic_net(delta)?;
        let s = seed(cfg).wrapping_add(i as u64);
        let lhs = estimator::bilinear_tube_integral_in(&x, &y, p, 1.0, &SampleSpec::monte_carlo(samples, s), exec)?;
        let rhs = estimator::rhs_bilinear(x.count(), y.count(), delta, p, RhsForm::Tube, 1.0);
        let probes = 10_000;
        let mx = max_multiplicity(&x, probes, s ^ 0x5151, exec);
        let my = max_multiplicity(&y, probes, s ^ 0xa2a2, exec);
        worst = worst.max(mx).max(my);
        pts.push((delta, lhs.value));
        rep.row(vec![
            f(delta),
            x.count().to_string(),
            y.count().to_string(),
            f(lhs.value),
            f(lhs.stderr),
            f(rhs),
            f(lhs.value / rhs),
            mx.to_string(),
            my.to_string(),
        ]);
    }
    let fit = fit(&pts)?;
    rep.fit_note("lhs", &fit);
    rep.check("lhs_flat", fit.slope.abs() <= 0.2, format!("|slope of lhs| = {} <= 0.2", fit.slope.abs()));
    rep.check("multiplicity_bounded", worst <= 8, format!("max multiplicity {worst} <= 8"));
    Ok(rep)
}

/// A tube with centre in `B(0, ½)` and direction at least ½ away from the
/// line `{(s, −s)}` (`|a + b| ≥ ½`).
pub fn random_projectable_tube(rng: &mut impl hkakeya::sampling::RngCore, delta: f64) -> HTube {
    let center = projection::sample_koranyi_ball(rng, 0.5);
    let angle = FRAC_PI_4 + uniform(rng, -1.2, 1.2) + if uniform(rng, 0.0, 1.0) < 0.5 { 0.0 } else { std::f64::consts::PI };
    HTube::new(center, HDirection::from_angle(angle), delta).expect("delta in (0, 1)")
}

const CONTAINMENT_TUBES: usize = 10;

/// Columns: `delta,tubes,samples,max_ratio`.
pub fn projection_containment<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let samples = cfg.samples.unwrap_or(100_000) as usize;
    let per_tube = samples.div_ceil(CONTAINMENT_TUBES);
    let mut rep = Report::new("projection-containment", &["delta", "tubes", "samples", "max_ratio"]);
    let mut pts = Vec::new();
    let mut worst: f64 = 0.0;
    for (level, delta) in cfg.ladder((4, 8)).into_iter().enumerate() {
        // Same tube geometry at every level; only δ changes.
        let ratios = exec.map_shards(CONTAINMENT_TUBES, |i| {
            let mut rng = shard_rng(seed(cfg), i as u64);
            let tube = random_projectable_tube(&mut rng, delta);
            projection::projection_containment_ratio(&tube, per_tube, seed(cfg) ^ ((level as u64) << 32 | i as u64))
        });
        let max = ratios.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
        worst = worst.max(max);
        pts.push((delta, max));
        rep.row(vec![f(delta), CONTAINMENT_TUBES.to_string(), (per_tube * CONTAINMENT_TUBES).to_string(), f(max)]);
    }
    let fit = fit(&pts)?;
    rep.fit_note("max_ratio", &fit);
    rep.check("ratio_bounded", worst <= 8.0, format!("max vertical distance / delta^2 = {worst} <= 8"));
    rep.check("no_growth", fit.slope.abs() <= 0.15, format!("|slope| = {} <= 0.15", fit.slope.abs()));
    Ok(rep)
}

/// Columns: `delta,pairs,max_ratio,mean_ratio,empty`; ratios are fiber
/// length over δ at resolution δ/100 (or `grid-res`).
pub fn fiber_length<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let pairs = cfg.samples.unwrap_or(1000) as usize;
    let mut rep = Report::new("fiber-length", &["delta", "pairs", "max_ratio", "mean_ratio", "empty"]);
    let mut worst: f64 = 0.0;
    for (level, delta) in cfg.ladder((6, 6)).into_iter().enumerate() {
        let res = cfg.grid_res.unwrap_or(delta / 100.0);
        let base = seed(cfg).wrapping_add(level as u64);
        let ratios = exec.map_shards(pairs, |i| {
            let mut rng = shard_rng(base, i as u64);
            let tube = random_projectable_tube(&mut rng, delta);
            let w = projection::sample_projected_point(&tube, &mut rng);
            projection::fiber_length(&tube, &w, res) / delta
        });
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
        let empty = ratios.iter().filter(|&&r| r == 0.0).count();
        worst = worst.max(max);
        rep.row(vec![f(delta), pairs.to_string(), f(max), f(mean), empty.to_string()]);
    }
    rep.check("length_bounded", worst <= 8.0, format!("max length/delta = {worst} <= 8"));
    Ok(rep)
}

/// A pair with a forced near-contact at a random point of `I/4`: the
/// difference has value ≤ δ/2 there, with log-uniform slope and curvature.
pub fn near_contact_pair(rng: &mut impl hkakeya::sampling::RngCore, delta: f64) -> (Quadratic, Quadratic, f64) {
    let window = Interval::PLANAR.quarter();
    let f0 = Quadratic::new(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
    let theta = uniform(rng, window.lo, window.hi);
    let ld = delta.log2() - 2.0;
    let signed = |hi: f64, rng: &mut _| {
        let m = 2f64.powf(uniform(rng, ld, hi));
        if uniform(rng, 0.0, 1.0) < 0.5 { -m } else { m }
    };
    let d = signed(1.0, rng);
    let k = signed(2.0, rng);
    let v = uniform(rng, -0.5, 0.5) * delta;
    (f0, f0.add(&Quadratic::from_jet(theta, [v, d, k])), theta)
}

/// Length scale `δ/√((τ+δ)(Δ+δ))` of the near-intersection intervals.
pub fn rect_length_scale(f: &Quadratic, g: &Quadratic, delta: f64) -> f64 {
    let dom = Interval::PLANAR;
    delta / ((curves::tau(f, g, &dom) + delta) * (curves::delta_gauge(f, g, &dom) + delta)).sqrt()
}

/// Columns: `delta,pairs,max_intervals,min_contact_ratio,max_ratio,violations`.
/// `min_contact_ratio` is the shortest interval containing the contact
/// point over the length scale, `max_ratio` the longest interval over it.
pub fn lemma_rect_structure<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let pairs = cfg.samples.unwrap_or(10_000) as usize;
    let ladder = cfg.ladder((4, 10));
    let window = Interval::PLANAR.quarter();
    let results = exec.map_shards(pairs, |i| {
        let delta = ladder[i % ladder.len()];
        let mut rng = shard_rng(seed(cfg), i as u64);
        let (f0, g0, theta) = near_contact_pair(&mut rng, delta);
        let ivs = curves::near_intersection_intervals(&f0, &g0, delta, &window);
        let scale = rect_length_scale(&f0, &g0, delta);
        let contact = ivs.iter().find(|iv| iv.contains(theta)).map(|iv| iv.len() / scale).unwrap_or(0.0);
        let longest = ivs.iter().map(|iv| iv.len() / scale).fold(0.0, f64::max);
        (i % ladder.len(), ivs.len(), contact, longest)
    });
    let mut rep = Report::new(
        "lemma-rect-structure",
        &["delta", "pairs", "max_intervals", "min_contact_ratio", "max_ratio", "violations"],
    );
    let (mut worst_count, mut total_viol) = (0, 0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (level, &delta) in ladder.iter().enumerate() {
        let mine: Vec<_> = results.iter().filter(|r| r.0 == level).collect();
        let count = mine.iter().map(|r| r.1).max().unwrap_or(0);
        let min_c = mine.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
        let max_l = mine.iter().map(|r| r.3).fold(0.0, f64::max);
        let viol = mine.iter().filter(|r| r.1 > 2 || r.2 < 1.0 / 32.0 || r.3 > 32.0).count();
        worst_count = worst_count.max(count);
        total_viol += viol;
        lo = lo.min(min_c);
        hi = hi.max(max_l);
        rep.row(vec![f(delta), mine.len().to_string(), count.to_string(), f(min_c), f(max_l), viol.to_string()]);
    }
    rep.note("min_contact_ratio", lo);
    rep.note("max_ratio", hi);
    rep.check("at_most_two_intervals", worst_count <= 2, format!("max interval count {worst_count}"));
    rep.check("length_law", total_viol == 0, format!("{total_viol} pairs outside [1/32, 32]; observed [{lo}, {hi}]"));
    Ok(rep)
}

/// A random bipartite instance: `F` near curvature 1 and `G` near −1, in
/// small coefficient boxes, with sizes in `8..=64`.
pub fn random_bipartite_instance(rng: &mut impl hkakeya::sampling::RngCore) -> (Vec<Quadratic>, Vec<Quadratic>) {
    let fam = |a0: f64, rng: &mut _| -> Vec<Quadratic> {
        let n = 8 + (uniform(rng, 0.0, 57.0) as usize).min(56);
        (0..n)
            .map(|_| Quadratic::new(a0 + uniform(rng, -0.01, 0.01), uniform(rng, -0.01, 0.01), uniform(rng, -0.05, 0.05)))
            .collect()
    };
    let f = fam(1.0, rng);
    let g = fam(-1.0, rng);
    (f, g)
}

pub const WOLFF_EPS: f64 = 0.1;
pub const WOLFF_K: f64 = 64.0;

/// Columns: `instance,n_f,n_g,mu,nu,delta,t,count,bound,scaled_bound,ok,rho`.
pub fn wolff_bound_check<E: ShardExecutor>(cfg: &Config, exec: &E) -> Result<Report, ExperimentError> {
    let instances = cfg.samples.unwrap_or(20) as usize;
    let delta = cfg.ladder((5, 5))[0];
    let params = IncidenceParams::default();
    let checks = exec.map_shards(instances, |i| {
        let mut rng = shard_rng(seed(cfg), i as u64);
        let (fs, gs) = random_bipartite_instance(&mut rng);
        let mu = 1 + (uniform(&mut rng, 0.0, 4.0) as usize).min(3);
        let nu = 1 + (uniform(&mut rng, 0.0, 4.0) as usize).min(3);
        let t = 1.0;
        incidence::wolff_bound_check(&fs, &gs, delta, t, mu, nu, WOLFF_EPS, WOLFF_K, &params)
            .map(|c| (format!("random-{i}"), fs.len(), gs.len(), mu, nu, delta, t, c))
    });
    let mut rows = checks.into_iter().collect::<Result<Vec<_>, _>>()?;
    let clam = constructions::build_clamshell(1.0 / 256.0, 1.0 / 16.0, 16, 4, 256)?;
    // The rich pieces are (δ, 1)-rectangles, so probe at t = 1.
    let cc = incidence::wolff_bound_check(&clam.f, &clam.g, clam.delta, 1.0, clam.mu, clam.nu, WOLFF_EPS, WOLFF_K, &params)?;
    rows.push(("clamshell".into(), clam.f.len(), clam.g.len(), clam.mu, clam.nu, clam.delta, 1.0, cc));
    let mut rep = Report::new(
        "wolff-bound-check",
        &["instance", "n_f", "n_g", "mu", "nu", "delta", "t", "count", "bound", "scaled_bound", "ok", "rho"],
    );
    let mut violations = 0;
    for (name, nf, ng, mu, nu, delta, t, c) in rows {
        violations += usize::from(!c.ok);
        rep.row(vec![
            name,
            nf.to_string(),
            ng.to_string(),
            mu.to_string(),
            nu.to_string(),
            f(delta),
            f(t),
            c.count.to_string(),
            f(c.bound),
            f(c.constant * c.bound),
            c.ok.to_string(),
            f(c.measured_rho),
        ]);
    }
    rep.check("no_violations", violations == 0, format!("{violations} instances exceed K * bound"));
    Ok(rep)
}

/// Lines through the origin at angular spacing δ² over a quarter circle.
pub fn quarter_fan(delta: f64) -> Vec<Line> {
    let n = (FRAC_PI_2 / (delta * delta)) as usize;
    (0..=n).map(|i| Line { point: HPoint::IDENTITY, dir: HDirection::from_angle(i as f64 * delta * delta) }).collect()
}

/// Columns: `family,alpha,delta,size,worst_ratio,probes`.
pub fn broadness_scan(cfg: &Config) -> Result<Report, ExperimentError> {
    let delta = cfg.ladder((5, 5))[0];
    let alphas = match cfg.alpha {
        Some(a) => vec![a],
        None => vec![0.1, 0.2, 0.25, 0.5, 1.0],
    };
    let probes = ProbeSpec::default();
    let (bush, _) = constructions::build_bush(delta.min(1.0 / 16.0))?;
    let bush_lines: Vec<Line> = bush.iter().map(Line::from).collect();
    let fan = quarter_fan(delta);
    let projected: Vec<Quadratic> = fan
        .iter()
        .filter_map(|l| {
            let t = HTube::new(l.point, l.dir, delta).ok()?;
            projection::tube_to_curve(&t).ok().map(|c| c.to_quadratic())
        })
        .collect();
    let clam = family::clamshell_from(&Config::default())?;
    let mut rep = Report::new("broadness-scan", &["family", "alpha", "delta", "size", "worst_ratio", "probes"]);
    let mut transfer_ok = true;
    for &alpha in &alphas {
        let b = tube::line_broadness(&bush_lines, delta.min(1.0 / 16.0), alpha, &probes)?;
        rep.row(vec!["bush".into(), f(alpha), f(delta.min(1.0 / 16.0)), bush_lines.len().to_string(), f(b.worst_ratio), b.probes.to_string()]);
        let q = tube::line_broadness(&fan, delta, alpha, &probes)?;
        rep.row(vec!["quarter-fan".into(), f(alpha), f(delta), fan.len().to_string(), f(q.worst_ratio), q.probes.to_string()]);
        let pq = incidence::quad_broadness(&projected, delta * delta, alpha, &probes)?;
        rep.row(vec!["projected-fan".into(), f(alpha), f(delta * delta), projected.len().to_string(), f(pq.worst_ratio), pq.probes.to_string()]);
        let c = incidence::quad_broadness(&clam.f, clam.delta, alpha, &probes)?;
        rep.row(vec!["clamshell".into(), f(alpha), f(clam.delta), clam.f.len().to_string(), f(c.worst_ratio), c.probes.to_string()]);
        transfer_ok &= pq.worst_ratio <= 16.0 * q.worst_ratio.max(1.0);
    }
    rep.check("broadness_transfer", transfer_ok, "projected fan ratio within 16x of the line fan ratio");
    Ok(rep)
}

/// Reduced parameters that exercise every code path of `name` in well under
/// a second each; used by smoke and reproducibility checks.
pub fn smoke_config(name: &str) -> Config {
    let pairs: &[(&str, &str)] = match name {
        "bush-refutes-naive" => &[("delta-exps", "4..6"), ("samples", "20000")],
        "opposed-pair-scaling" => &[("delta-exps", "4..6")],
        "bipartite-ball-sharpness" => &[("delta-exps", "4..6"), ("rho", "0.5"), ("samples", "100")],
        "parabolic-net-p23" => &[("delta-exps", "4..6"), ("samples", "20000")],
        "projection-containment" => &[("delta-exps", "4..6"), ("samples", "2000")],
        "fiber-length" => &[("samples", "100")],
        "lemma-rect-structure" => &[("samples", "1000")],
        "wolff-bound-check" => &[("samples", "5")],
        "broadness-scan" => &[("alpha", "0.5")],
        _ => &[],
    };
    let mut cfg = Config::default();
    for (k, v) in pairs {
        cfg.set(k, v).expect("valid smoke parameter");
    }
    cfg
}
