//! Acceptance criteria A1 to A10. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use sfflab::ensembles::{Beta, EnsembleSpec, EntryLaw, ParamLaw};
use sfflab::montecarlo::{
    run_mono_experiment, run_strip_experiment, run_wigner_experiment, MonoSetup, Parallelism, StripMode,
};
use sfflab::spectral::TimeGrid;
use sfflab::theory::{curve_s_res, e_wig, s_wig, ModelConfig};
use sfflab::verify::{
    exponent_checks, kernel_identity_checks, large_t_checks, triple_agreement_checks, unfolded_checks, Check,
};

const SEED: u64 = 0xacce_97a0;
const N: usize = 100;

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn from_checks(id: &'static str, checks: sfflab::Result<Vec<Check>>) -> Outcome {
    match checks {
        Ok(checks) => {
            let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
            let detail = if failed.is_empty() {
                format!("{} checks", checks.len())
            } else {
                format!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join("; "))
            };
            Outcome { id, passed: failed.is_empty(), detail }
        }
        Err(e) => Outcome { id, passed: false, detail: format!("error: {e}") },
    }
}

fn gue_model() -> ModelConfig {
    ModelConfig::new(N, Beta::Complex, 0.0, ParamLaw::uniform_circle()).unwrap()
}

fn gue_spec() -> EnsembleSpec {
    EnsembleSpec::new(N, EntryLaw::gue(), SEED).unwrap()
}

fn fraction(flags: impl Iterator<Item = bool>) -> f64 {
    let (mut hit, mut total) = (0usize, 0usize);
    for f in flags {
        total += 1;
        hit += f as usize;
    }
    hit as f64 / total as f64
}

/// A4 and A5 from one set of 2000 GUE spectra.
fn wigner_mean_and_plateau() -> (Outcome, Outcome) {
    let model = gue_model();
    let mut ts = TimeGrid::log(1.0, 300.0, 60).unwrap().values().to_vec();
    ts.push(1e5);
    let grid = TimeGrid::from_values(ts.clone()).unwrap();
    let w = run_wigner_experiment(&gue_spec(), &grid, 2000, Parallelism::Global).unwrap();
    let s = &w.stats;
    let ramp = 0..60;
    let z: Vec<f64> = ramp.clone().map(|i| (s.mean[i] - e_wig(ts[i], &model)).abs() / s.stderr[i]).collect();
    let inside = fraction(z.iter().map(|&z| z <= 5.0));
    let failing: Vec<String> =
        ramp.clone().filter(|&i| z[i] > 5.0).map(|i| format!("t={:.1}:{:.1}se", ts[i], z[i])).collect();
    let window: Vec<usize> = ramp.filter(|&i| (30.0..=300.0).contains(&ts[i])).collect();
    let std_ratio = window.iter().map(|&i| s.std[i] / s_wig(ts[i], &model)).sum::<f64>() / window.len() as f64;
    let a4 = Outcome {
        id: "A4",
        passed: inside >= 0.95 && (std_ratio - 1.0).abs() <= 0.15,
        detail: format!(
            "mean within 5 se at {:.1}% of points (need >= 95%), outside: [{}]; std/s_wig over [30,300] = {:.4} \
             (need 1 +- 0.15)",
            100.0 * inside,
            failing.join(" "),
            std_ratio
        ),
    };
    let plateau_z = (s.mean[60] - 1.0 / N as f64).abs() / s.stderr[60];
    let a5 = Outcome {
        id: "A5",
        passed: plateau_z <= 3.0,
        detail: format!("mean at t=1e5 = {:.6e}, |mean - 1/N| = {:.2} se (need <= 3)", s.mean[60], plateau_z),
    };
    (a4, a5)
}

fn mono_moments() -> Outcome {
    let model = gue_model();
    let grid = TimeGrid::log(2.0, 50.0, 20).unwrap();
    let ts = grid.values();
    let m = run_mono_experiment(
        &gue_spec(),
        &ParamLaw::uniform_circle(),
        &grid,
        MonoSetup::new(100, 200),
        Parallelism::Global,
    )
    .unwrap();
    let s_res = curve_s_res(&grid, &model).unwrap();
    let s_res = s_res.get("s_res").unwrap();
    let worst_mean = (0..ts.len())
        .map(|i| (m.mean_h_mean_s[i] - e_wig(ts[i], &model)).abs() / m.se_mean_h_mean_s[i])
        .fold(0.0, f64::max);
    let ratio = (0..ts.len()).map(|i| m.var_h_mean_s[i] / (s_res[i] * s_res[i])).sum::<f64>() / ts.len() as f64;
    let worst_identity = (0..ts.len())
        .map(|i| (m.pooled_var[i] - m.decomposed_var[i]).abs() / m.se_decomposed_var[i])
        .fold(0.0, f64::max);
    Outcome {
        id: "A6",
        passed: worst_mean <= 5.0 && (0.5..=2.0).contains(&ratio) && worst_identity <= 1.0,
        detail: format!(
            "(i) max |E_H E_s - E_wig| = {worst_mean:.2} se (need <= 5); (ii) mean Var_H E_s / S_res^2 = {ratio:.3} \
             (need within a factor 2); (iii) max |pooled - decomposed| = {worst_identity:.2e} jackknife se (need <= 1)"
        ),
    }
}

fn run_cli(args: &[&str], out: &std::path::Path, file: &str) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_sfflab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?} exited with {:?}", o.status.code()));
    }
    std::fs::read(out.join(file)).map_err(|e| e.to_string())
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let seed = format!("{SEED:#x}");
    let wigner = [
        "sample-wigner",
        "--n",
        "100",
        "--samples",
        "2000",
        "--points",
        "60",
        "--t-min",
        "1",
        "--t-max",
        "300",
        "--seed",
        &seed,
    ];
    let mut mismatches = Vec::new();
    for (name, args, file) in
        [("verify", &["verify"][..], "verify.csv"), ("sample-wigner", &wigner[..], "wigner_sff.csv")]
    {
        let mut outputs = Vec::new();
        for workers in ["1", "2", "8"] {
            let sub = dir.path().join(format!("{name}-{workers}"));
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--workers", workers]);
            match run_cli(&full, &sub, file) {
                Ok(bytes) => outputs.push(bytes),
                Err(e) => return Outcome { id: "A9", passed: false, detail: e },
            }
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(name);
        }
    }
    Outcome {
        id: "A9",
        passed: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            "verify.csv and wigner_sff.csv byte-identical for workers 1, 2, 8".into()
        } else {
            format!("outputs differ across worker counts for {}", mismatches.join(", "))
        },
    }
}

fn strip_study() -> Outcome {
    let model = gue_model();
    let grid = TimeGrid::log(1.0, 100.0, 60).unwrap();
    let ts = grid.values();
    let spec = gue_spec();
    let w = run_strip_experiment(&spec, &StripMode::Wigner, &grid, &[2, 10, 500], Parallelism::Global).unwrap();
    let n500 = &w.curves[2];
    let inside = fraction(
        (0..ts.len()).map(|i| (n500[i] - e_wig(ts[i], &model)).abs() <= 3.0 * s_wig(ts[i], &model) / 500f64.sqrt()),
    );
    let mode = StripMode::Mono { law: ParamLaw::uniform_circle(), components: 2 };
    let m = run_strip_experiment(&spec, &mode, &grid, &[1000], Parallelism::Global).unwrap();
    let s_res = curve_s_res(&grid, &model).unwrap();
    let s_res = s_res.get("s_res").unwrap();
    let window: Vec<usize> = (0..ts.len()).filter(|&i| (5.0..=50.0).contains(&ts[i])).collect();
    let above = fraction(window.iter().map(|&i| (m.curves[0][i] - e_wig(ts[i], &model)).abs() > 0.3 * s_res[i]));
    Outcome {
        id: "A10",
        passed: inside >= 0.95 && above >= 0.5,
        detail: format!(
            "wigner n=500 inside 3 band at {:.1}% of points (need >= 95%); mono n_params=1000 deviates by more \
             than 0.3 S_res at {:.1}% of points in [5,50] (need >= 50%)",
            100.0 * inside,
            100.0 * above
        ),
    }
}

fn main() {
    let mut outcomes = Vec::new();
    let mut timed = |f: &mut dyn FnMut() -> Vec<Outcome>| {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        for o in out {
            let status = if o.passed { "PASS" } else { "FAIL" };
            println!("{status} {} ({secs:.1} s) {}", o.id, o.detail);
            outcomes.push(o.passed);
        }
    };
    timed(&mut || vec![from_checks("A1", triple_agreement_checks())]);
    timed(&mut || vec![from_checks("A2", Ok(large_t_checks()))]);
    timed(&mut || vec![from_checks("A3", kernel_identity_checks())]);
    timed(&mut || {
        let (a4, a5) = wigner_mean_and_plateau();
        vec![a4, a5]
    });
    timed(&mut || vec![mono_moments()]);
    timed(&mut || vec![from_checks("A7", exponent_checks(Parallelism::Global))]);
    timed(&mut || vec![from_checks("A8", Ok(unfolded_checks()))]);
    timed(&mut || vec![reproducibility()]);
    timed(&mut || vec![strip_study()]);
    let failed = outcomes.iter().filter(|p| !**p).count();
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
