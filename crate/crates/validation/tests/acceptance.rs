//! Acceptance criteria for the workspace, one PASS/FAIL line each.
//!
//! Run with `cargo test -p casimir-validation --test acceptance`. The process
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Duration;

use casimir_core::geometry::{plane_cubature, slab_cubature_oracle, PlaneComponent};
use casimir_core::oracles::numerical_laplace;
use casimir_core::parallel::map_indexed;
use casimir_core::{
    closed_form_correlation, coupling_gradient, dissipated_energy, finite_difference_gradient,
    friction_kernel, halfspace_cubature_oracle, matsubara_convolution, overlap_strength,
    pair_friction, response_time_domain, verify_measure_identity, FrictionMode, OscillatorModel,
    SeparationVector, SpectralPolarizability, ThermalState, Tolerance, Trajectory,
};
use casimir_validation::{cli_binary, judge, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

const SEED: u64 = 0x5eed_ca51;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn th(beta: f64) -> Result<ThermalState, String> {
    ThermalState::new(beta).map_err(err)
}

fn lor(a: f64, e: f64, g: f64) -> Result<SpectralPolarizability, String> {
    SpectralPolarizability::lorentzian(a, e, g).map_err(err)
}

fn h0(s1: &SpectralPolarizability, s2: &SpectralPolarizability, beta: f64) -> Result<f64, String> {
    Ok(overlap_strength(s1, s2, &th(beta)?, Tolerance::relative(1e-10))
        .map_err(err)?
        .h0)
}

/// All principal minors of a symmetric 3×3 matrix, scaled to unit max entry.
fn principal_minors(g: &[[f64; 3]; 3]) -> [f64; 7] {
    let s = g.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let a = |i: usize, j: usize| g[i][j] / s;
    let m2 = |i: usize, j: usize| a(i, i) * a(j, j) - a(i, j) * a(j, i);
    let det = a(0, 0) * m2(1, 2) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    [a(0, 0), a(1, 1), a(2, 2), m2(0, 1), m2(0, 2), m2(1, 2), det]
}

fn tensor_identities() -> Outcome {
    const N: usize = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pts: Vec<[f64; 3]> = (0..N)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(-2.0..2.0));
            let c: f64 = rng.gen_range(-1.0..1.0);
            let phi = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - c * c).sqrt();
            [r * s * phi.cos(), r * s * phi.sin(), r * c]
        })
        .collect();
    let per_point = map_indexed(N, |i| -> Result<(f64, f64, bool), String> {
        let r = SeparationVector::new(pts[i]).map_err(err)?;
        let g = friction_kernel(&r).map_err(err)?;
        let c = coupling_gradient(&r).contract();
        let mut d = 0.0f64;
        for l in 0..3 {
            for q in 0..3 {
                d = d.max((g.get(l, q) - c.get(l, q)).abs());
            }
        }
        let exact = coupling_gradient(&r);
        let fd = finite_difference_gradient(&r, 1e-4 * r.norm()).map_err(err)?;
        let psd = principal_minors(&g.0).iter().all(|&m| m >= -1e-12);
        Ok((d / g.max_abs(), fd.max_abs_diff(&exact) / exact.max_abs(), psd))
    });
    let (mut closed, mut grad, mut psd) = (0.0f64, 0.0f64, true);
    for p in per_point {
        let (a, b, c) = p?;
        closed = closed.max(a);
        grad = grad.max(b);
        psd &= c;
    }
    Ok((
        closed <= 1e-12 && grad <= 1e-6 && psd,
        format!(
            "{N} separations, r in [1e-2, 1e2]: closed form vs contraction {closed:.2e} (<= 1e-12), \
             finite-difference gradient {grad:.2e} (<= 1e-6), G positive semidefinite: {psd}"
        ),
    ))
}

fn geometry_closed_forms() -> Outcome {
    let tol = 1e-8;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for z in [0.5, 1.0, 2.0] {
        let c = plane_cubature(z, PlaneComponent::Xx, tol).map_err(err)?;
        let d = rel(c.value, 15.0 * PI / (2.0 * z.powi(6)));
        worst = worst.max(d);
        parts.push(format!("plane z={z}: {d:.1e}"));
    }
    let half = halfspace_cubature_oracle(1.0, tol).map_err(err)?;
    let d = rel(half.value, 1.5 * PI);
    worst = worst.max(d);
    parts.push(format!("half-space {:.10} vs {:.10}: {d:.1e}", half.value, 1.5 * PI));
    let slab = slab_cubature_oracle(1.0, tol).map_err(err)?;
    let d = rel(slab.value, 3.0 * PI / 8.0);
    worst = worst.max(d);
    parts.push(format!("slab {:.10} vs {:.10}: {d:.1e}", slab.value, 3.0 * PI / 8.0));
    Ok((worst <= 1e-6, format!("worst {worst:.2e} (<= 1e-6); {}", parts.join(", "))))
}

fn random_oscillator_params(n: usize, seed: u64) -> Vec<(f64, f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.2..4.0),
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.2..4.0),
                rng.gen_range(0.1..5.0),
            )
        })
        .collect()
}

fn matsubara_oracle() -> Outcome {
    let params = random_oscillator_params(50, SEED + 3);
    let mut worst = 0.0f64;
    for &(a1, e1, a2, e2, beta) in &params {
        let o1 = OscillatorModel::new(a1, e1).map_err(err)?;
        let o2 = OscillatorModel::new(a2, e2).map_err(err)?;
        let t = th(beta)?;
        for n in 0..=10 {
            let sum = matsubara_convolution(&o1, &o2, &t, n, 100_000, 1e-8).map_err(err)?;
            let exact = closed_form_correlation(&o1, &o2, &t, t.matsubara(n)).map_err(err)?;
            worst = worst.max(rel(sum.value, exact));
        }
    }
    Ok((
        worst <= 1e-8,
        format!("50 parameter sets x n = 0..10, n_max = 1e5: worst {worst:.2e} (<= 1e-8)"),
    ))
}

fn transform_identity() -> Outcome {
    let params = random_oscillator_params(3, SEED + 4);
    let mut worst = 0.0f64;
    for &(a1, e1, a2, e2, beta) in &params {
        let o1 = OscillatorModel::new(a1, e1).map_err(err)?;
        let o2 = OscillatorModel::new(a2, e2).map_err(err)?;
        let t = th(beta)?;
        for i in 0..20 {
            let k = 0.1 * 100f64.powf(i as f64 / 19.0);
            let num = numerical_laplace(
                |s| response_time_domain(&o1, &o2, &t, s).unwrap_or(f64::NAN),
                k,
                e1 + e2,
            );
            let exact = closed_form_correlation(&o1, &o2, &t, k).map_err(err)?;
            worst = worst.max(rel(num, exact));
        }
    }
    Ok((
        worst <= 1e-4,
        format!("3 parameter sets x 20 values of K in [0.1, 10]: worst {worst:.2e} (<= 1e-4)"),
    ))
}

fn resonance_physics() -> Outcome {
    let r = SeparationVector::new([0.3, -0.2, 1.0]).map_err(err)?;
    let v = [1.0, 0.5, -0.25];
    let t = th(1.0)?;
    let tol = Tolerance::relative(1e-10);
    let force = |s1: &SpectralPolarizability, s2: &SpectralPolarizability| {
        pair_friction(&r, v, s1, s2, &t, tol).map_err(err)
    };

    let sharp = force(
        &SpectralPolarizability::sharp(1.0, 1.0).map_err(err)?,
        &SpectralPolarizability::sharp(1.0, 5.0).map_err(err)?,
    )?;
    let zero = sharp.mode == FrictionMode::SharpDetuned
        && sharp.force.is_some_and(|f| f.components().iter().all(|&x| x == 0.0));

    let coincident = force(&lor(1.0, 1.0, 1e-3)?, &lor(1.0, 1.0, 1e-3)?)?;
    let fc = coincident.force.ok_or("broadened force missing")?;
    let fv: f64 = fc.components().iter().zip(v).map(|(a, b)| a * b).sum();

    let detuned = force(&lor(1.0, 1.0, 1e-3)?, &lor(1.0, 5.0, 1e-3)?)?;
    let fd = detuned.force.ok_or("broadened force missing")?;
    let ratio = fd.magnitude() / fc.magnitude();
    let suppression = 1.0 / ratio;

    Ok((
        zero && fv < 0.0 && ratio <= 1e-8,
        format!(
            "sharp E1=1, E2=5 force exactly zero: {zero}; broadened coincident F.v = {fv:.3e} (< 0); \
             detuned E1=1, E2=5, gamma=1e-3, beta=1: |F_detuned|/|F_coincident| = {ratio:.3e}, \
             suppression {suppression:.3e} (>= 1e8)"
        ),
    ))
}

fn temperature_limits() -> Outcome {
    let s = lor(1.0, 1.0, 1e-2)?;
    let classical: Vec<f64> = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
        .iter()
        .map(|&b| h0(&s, &s, b).map(|h| h * b))
        .collect::<Result<_, _>>()?;
    let (lo, hi) = classical
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    let spread = hi / lo - 1.0;

    let mut slopes = Vec::new();
    let mut monotone = true;
    for e in [1.0, 2.0] {
        let narrow = lor(1.0, e, 1e-9)?;
        let mut prev = f64::INFINITY;
        for i in 0..=30 {
            let v = h0(&narrow, &narrow, 2.0 * i as f64 / e + 0.1)?;
            monotone &= v < prev && v >= 0.0;
            prev = v;
        }
        let (b1, b2) = (50.0 / e, 60.0 / e);
        let slope = (h0(&narrow, &narrow, b2)?.ln() - h0(&narrow, &narrow, b1)?.ln()) / (b2 - b1);
        slopes.push((e, slope, (slope + e).abs() / e));
    }
    let slope_ok = slopes.iter().all(|&(_, _, d)| d <= 0.05);
    let slope_text: Vec<String> = slopes
        .iter()
        .map(|(e, s, d)| format!("E={e}: slope {s:.4} ({:.2}% off)", 100.0 * d))
        .collect();
    Ok((
        spread <= 1e-2 && monotone && slope_ok,
        format!(
            "classical H0*beta spread {:.3}% (<= 1%) for beta in [1e-4, 1e-2], E=1, gamma=1e-2; \
             decreasing to zero for beta E in [0.1, 60]: {monotone}; quantum regime, gamma=1e-9, \
             beta E in [50, 60]: {}",
            100.0 * spread,
            slope_text.join(", ")
        ),
    ))
}

fn measure_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for e in [0.5, 1.0, 2.0] {
        let ratio = verify_measure_identity(e, 1e-3 * e).map_err(err)?;
        worst = worst.max((ratio - 1.0).abs());
        parts.push(format!("E={e}: {ratio:.6}"));
    }
    Ok((worst <= 1e-2, format!("gamma/E = 1e-3, {} (within 1%)", parts.join(", "))))
}

fn dissipated_energy_paths() -> Outcome {
    let t = th(1.0)?;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    let cases = [
        ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], SpectralPolarizability::sharp(1.0, 1.0).map_err(err)?, lor(1.0, 1.0, 0.05)?),
        ([0.4, 0.0, 1.2], [0.6, 0.8, 0.0], lor(1.0, 1.0, 0.1)?, lor(0.5, 1.3, 0.2)?),
    ];
    for (r0, dir, s1, s2) in &cases {
        let traj = Trajectory::from_fn(-12.0, 12.0, 4001, |s| {
            let a = (-0.5 * s * s).exp();
            [a * dir[0], a * dir[1], a * dir[2]]
        })
        .map_err(err)?;
        let r0 = SeparationVector::new(*r0).map_err(err)?;
        let rep = dissipated_energy(&traj, &r0, s1, s2, &t).map_err(err)?;
        let gap = rel(rep.time_domain, rep.frequency_domain);
        worst = worst.max(if rep.energy > 0.0 { gap } else { f64::INFINITY });
        parts.push(format!("W = {:.8e}, gap {gap:.1e}", rep.energy));
    }

    // ramp up over [0, 2], hold until 28, ramp down to 30
    let ramp = |s: f64| {
        if s <= 0.0 || s >= 30.0 {
            0.0
        } else if s < 2.0 {
            (PI * s / 4.0).sin().powi(2)
        } else if s <= 28.0 {
            1.0
        } else {
            (PI * (30.0 - s) / 4.0).sin().powi(2)
        }
    };
    let traj = Trajectory::from_fn(0.0, 30.0, 6001, |s| [ramp(s), 0.0, 0.0]).map_err(err)?;
    let r0 = SeparationVector::new([0.0, 0.0, 1.0]).map_err(err)?;
    let s = lor(1.0, 1.0, 0.05)?;
    let rep = dissipated_energy(&traj, &r0, &s, &s, &t).map_err(err)?;
    let interior: f64 = (0..traj.len())
        .filter(|&i| traj.time(i) > 2.5 && traj.time(i) < 27.5)
        .map(|i| rep.power[i].abs())
        .sum();
    let still = Trajectory::from_fn(0.0, 30.0, 6001, |_| [0.0; 3]).map_err(err)?;
    let rest = dissipated_energy(&still, &r0, &s, &s, &t).map_err(err)?.energy;

    Ok((
        worst <= 1e-4 && interior == 0.0 && rest == 0.0,
        format!(
            "Gaussian pulses: {}, (<= 1e-4); static interior power {interior:e}; resting particle W = {rest:e}",
            parts.join("; ")
        ),
    ))
}

fn run_cli(bin: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(bin).args(args).output().map_err(err)?;
    if !o.status.success() {
        return Err(format!(
            "{} {} exited with {}: {}",
            bin.display(),
            args.join(" "),
            o.status,
            String::from_utf8_lossy(&o.stderr).trim()
        ));
    }
    Ok(o.stdout)
}

/// `(swept value, first numeric column)` pairs from CLI CSV output.
fn sweep_column(csv: &[u8]) -> Result<Vec<(f64, f64)>, String> {
    let text = std::str::from_utf8(csv).map_err(err)?;
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let mut c = l.split(',');
            let x = c.next().ok_or("short row")?.parse::<f64>().map_err(err)?;
            let f = c.next().ok_or("short row")?.parse::<f64>().map_err(err)?;
            Ok((x, f))
        })
        .collect()
}

fn power_law_spread(rows: &[(f64, f64)], p: i32) -> f64 {
    let scaled: Vec<f64> = rows.iter().map(|&(x, f)| f.abs() * x.powi(p)).collect();
    scaled.iter().map(|&s| rel(s, scaled[0])).fold(0.0, f64::max)
}

const SPECTRA: &str = r#"[{"lines": [{"weight": 1.0, "center": 1.0, "width": 0.05}]},
                          {"lines": [{"weight": 0.8, "center": 1.1, "width": 0.08}]}]"#;

fn cli_power_laws() -> Outcome {
    let bin = cli_binary()?;
    let dir = tempfile::tempdir().map_err(err)?;
    let slabs = dir.path().join("slabs.json");
    std::fs::write(
        &slabs,
        format!(
            r#"{{"geometry": {{"d": 1, "density1": 1.5, "density2": 0.7, "v": 0.3}},
                "spectra": {SPECTRA}, "thermal": {{"beta": 2}},
                "sweep": {{"parameter": "d", "grid": {{"log_range": {{"start": 1, "stop": 10, "points": 11}}}}}}}}"#
        ),
    )
    .map_err(err)?;
    let plane = dir.path().join("plane.json");
    std::fs::write(
        &plane,
        format!(
            r#"{{"geometry": {{"z0": 1, "density": 1.5, "v": 0.3}},
                "spectra": {SPECTRA}, "thermal": {{"beta": 2}},
                "sweep": {{"parameter": "z0", "grid": {{"log_range": {{"start": 1, "stop": 10, "points": 11}}}}}}}}"#
        ),
    )
    .map_err(err)?;
    let s = sweep_column(&run_cli(&bin, &["slabs", "--config", slabs.to_str().unwrap()])?)?;
    let p = sweep_column(&run_cli(&bin, &["particle-plane", "--config", plane.to_str().unwrap()])?)?;
    let (ds, dp) = (power_law_spread(&s, 4), power_law_spread(&p, 5));
    Ok((
        s.len() == 11 && p.len() == 11 && ds <= 1e-10 && dp <= 1e-10,
        format!(
            "slab d-sweep over a decade: |F| d^4 spread {ds:.2e}; particle-plane z0-sweep: |F| z0^5 spread {dp:.2e} (<= 1e-10)"
        ),
    ))
}

fn determinism() -> Outcome {
    let bin = cli_binary()?;
    let dir = tempfile::tempdir().map_err(err)?;
    let cfg = dir.path().join("beta.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"geometry": {{"r": [0.2, 0.1, 1.0], "v": [1, 0, 0.5]}},
                "spectra": {SPECTRA}, "thermal": {{"beta": 1}},
                "sweep": {{"parameter": "beta", "grid": {{"log_range": {{"start": 0.01, "stop": 100, "points": 25}}}}}}}}"#
        ),
    )
    .map_err(err)?;
    let cfg = cfg.to_str().unwrap();
    let mut runs = 0;
    for format in ["csv", "json"] {
        let reference = run_cli(&bin, &["pair", "--config", cfg, "--format", format, "--jobs", "1"])?;
        for jobs in ["1", "2", "3", "8"] {
            let out = run_cli(&bin, &["pair", "--config", cfg, "--format", format, "--jobs", jobs])?;
            runs += 1;
            if out != reference {
                return Ok((false, format!("{format} output differs between --jobs 1 and --jobs {jobs}")));
            }
        }
    }
    Ok((true, format!("25-point beta sweep, csv and json, --jobs 1/2/3/8: {runs} runs byte-identical")))
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let verdicts: Vec<Verdict> = vec![
        judge(1, "tensor identity suite", secs(10), tensor_identities),
        judge(2, "geometry closed forms", secs(30), geometry_closed_forms),
        judge(3, "Matsubara oracle", secs(60), matsubara_oracle),
        judge(4, "transform identity", None, transform_identity),
        judge(5, "resonance physics", None, resonance_physics),
        judge(6, "temperature limits", None, temperature_limits),
        judge(7, "measure identity", None, measure_identity),
        judge(8, "dissipated energy", None, dissipated_energy_paths),
        judge(9, "CLI power laws", None, cli_power_laws),
        judge(10, "CLI determinism", None, determinism),
    ];
    for v in &verdicts {
        println!("{}", v.line());
    }
    let passed = verdicts.iter().filter(|v| v.passed).count();
    println!("acceptance: {passed}/{} criteria passed", verdicts.len());
    if passed != verdicts.len() {
        std::process::exit(1);
    }
}
