//! End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per
//! criterion and exits non-zero if any check fails.
//!
//! The optional real-data smoke test runs when `COPENT_NHANES_MANIFEST` names
//! a manifest of laboratory XPT URLs; downloads go to `COPENT_NHANES_DIR` if
//! set, otherwise to a temporary directory.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use copent::csv_io::{load_csv, CsvOptions};
use copent::parallel::association_matrix_parallel;
use copent::xpt::{ibm_to_ieee, read_xpt};
use copent_core::assoc::{extract_groups, AssociationMatrix};
use copent_core::classic::kendall_counts;
use copent_core::dataset::impute;
use copent_core::entropy::{decomposition_report, knn_entropy, mutual_information};
use copent_core::rng::SplitMix64;
use copent_core::synth::{generate, SynthKind, SynthSpec};
use copent_core::{Column, Dataset, EstimatorConfig, ImputePolicy, Measure, Points};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn jobs() -> usize {
    copent::parallel::default_jobs()
}

fn cfg(seed: u64) -> EstimatorConfig {
    EstimatorConfig::default().with_seed(seed)
}

fn pair(x: Vec<f64>, y: Vec<f64>) -> Dataset {
    Dataset::new(vec![Column::new("x", x), Column::new("y", y)]).unwrap()
}

fn gaussian_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for rho in [0.1f64, 0.3, 0.5, 0.7, 0.9] {
        let truth = -0.5 * (1.0 - rho * rho).ln();
        let mean = (0..20u64)
            .map(|s| {
                let ds = generate(&SynthSpec::gaussian_pair(rho, 2000, 1000 + s)).unwrap();
                mutual_information(&ds, &cfg(s + 1)).unwrap().value
            })
            .sum::<f64>()
            / 20.0;
        worst = worst.max((mean - truth).abs());
        detail.push(format!("rho {rho}: {mean:.4} vs {truth:.4}"));
    }
    check(
        worst < 0.05,
        format!("max |error| {worst:.4} < 0.05 ({})", detail.join("; ")),
    )
}

fn independence() -> Verdict {
    let mut worst = 0.0f64;
    for s in 0..20u64 {
        let mut rng = SplitMix64::new(5000 + s);
        let x: Vec<f64> = (0..5000).map(|_| rng.next_f64()).collect();
        let y: Vec<f64> = (0..5000).map(|_| rng.next_f64()).collect();
        let mi = mutual_information(&pair(x, y), &cfg(s)).unwrap().value;
        worst = worst.max(mi.abs());
    }
    check(worst < 0.05, format!("max |MI| over 20 seeds {worst:.4} < 0.05"))
}

fn random_dataset(seed: u64) -> Dataset {
    let mut rng = SplitMix64::new(seed);
    let n = 80 + (rng.next_u64() % 170) as usize;
    let d = 3 + (rng.next_u64() % 3) as usize;
    let latent: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
    let columns = (0..d)
        .map(|c| {
            let w = rng.next_f64();
            let grid = c % 2 == 1;
            let values = latent
                .iter()
                .map(|z| {
                    let v = w * z + (1.0 - w) * rng.standard_normal();
                    if grid {
                        (v * 4.0).round() / 4.0
                    } else {
                        v
                    }
                })
                .collect();
            Column::new(format!("c{c}"), values)
        })
        .collect();
    Dataset::new(columns).unwrap()
}

fn bits(m: &AssociationMatrix) -> Vec<Option<u64>> {
    m.rows().concat().into_iter().map(|v| v.map(f64::to_bits)).collect()
}

fn monotone_invariance() -> Verdict {
    let mut failures = Vec::new();
    for s in 0..50u64 {
        let ds = random_dataset(s);
        let max_abs: Vec<f64> = ds
            .columns()
            .iter()
            .map(|c| {
                c.complete_values()
                    .unwrap()
                    .iter()
                    .fold(0.0, |m: f64, v| m.max(v.abs()))
            })
            .collect();
        let cube = ds.map_values(|_, v| v * v * v);
        let expo = ds.map_values(|c, v| (v / max_abs[c]).exp());
        let c = cfg(s);
        for measure in [Measure::Ce, Measure::Spearman, Measure::Kendall, Measure::Pearson] {
            let base = bits(&association_matrix_parallel(&ds, measure, &c, jobs()).unwrap());
            for (name, t) in [("cube", &cube), ("exp", &expo)] {
                let other = bits(&association_matrix_parallel(t, measure, &c, jobs()).unwrap());
                let same = other == base;
                if same == (measure == Measure::Pearson) {
                    failures.push(format!("dataset {s} {measure} {name}"));
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "50 datasets x 2 transforms; violations: {}",
            if failures.is_empty() {
                "none".into()
            } else {
                failures.join(", ")
            }
        ),
    )
}

/// Direct O(n²) enumeration of concordant/discordant/tied pairs.
fn kendall_brute(x: &[f64], y: &[f64]) -> (u64, u64, u64, i64) {
    let n = x.len();
    let (mut tx, mut ty, mut score) = (0u64, 0u64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).unwrap() as i64;
            let dy = y[i].partial_cmp(&y[j]).unwrap() as i64;
            tx += u64::from(dx == 0);
            ty += u64::from(dy == 0);
            score += dx * dy;
        }
    }
    ((n * (n - 1) / 2) as u64, tx, ty, score)
}

fn kendall_oracle() -> Verdict {
    let mut mismatches = 0;
    for s in 0..200u64 {
        let mut rng = SplitMix64::new(s ^ 0xabc);
        let n = 2 + (rng.next_u64() % 199) as usize;
        let levels = (2 + rng.next_u64() % 30) as f64;
        let x: Vec<f64> = (0..n).map(|_| (rng.next_f64() * levels).floor()).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| ((v + rng.standard_normal() * 3.0) / 2.0).round())
            .collect();
        let fast = kendall_counts(&x, &y).unwrap();
        let (n0, tx, ty, score) = kendall_brute(&x, &y);
        let tau_brute = if n0 == tx || n0 == ty {
            None
        } else {
            Some((score as f64 / (((n0 - tx) as f64) * ((n0 - ty) as f64)).sqrt()).clamp(-1.0, 1.0))
        };
        let counts_equal = (fast.n_pairs, fast.ties_x, fast.ties_y, fast.score) == (n0, tx, ty, score);
        let tau_equal = fast.tau_b().ok().map(f64::to_bits) == tau_brute.map(f64::to_bits);
        if !(counts_equal && tau_equal) {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches} mismatches in 200 tied datasets"))
}

fn decomposition() -> Verdict {
    let mut detail = Vec::new();
    let mut ok = true;
    for rho in [0.0f64, 0.5] {
        let truth = 0.5 * ((2.0 * std::f64::consts::PI * std::f64::consts::E).powi(2) * (1.0 - rho * rho)).ln();
        let (mut residual, mut joint) = (0.0, 0.0);
        for s in 0..10u64 {
            let ds = generate(&SynthSpec::gaussian_pair(rho, 5000, 700 + s)).unwrap();
            let r = decomposition_report(&ds, &cfg(s)).unwrap();
            residual += r.residual / 10.0;
            joint += r.joint.value / 10.0;
        }
        ok &= residual.abs() < 0.1 && (joint - truth).abs() < 0.1;
        detail.push(format!(
            "rho {rho}: residual {residual:.4}, joint {joint:.4} vs {truth:.4}"
        ));
    }
    check(ok, detail.join("; "))
}

fn recovered(m: &AssociationMatrix, threshold: f64, truth: &[Vec<usize>]) -> bool {
    let mut got = extract_groups(m, threshold).unwrap().partition();
    let mut want = truth.to_vec();
    got.sort();
    want.sort();
    got == want
}

fn block_recovery() -> Verdict {
    let sizes = vec![4, 4, 3, 3, 2];
    let ce_threshold = Measure::Ce.default_threshold();
    // Correlation whose Gaussian mutual information equals the ce threshold.
    let matched = (1.0 - (-2.0 * ce_threshold).exp()).sqrt();
    let (mut ce_lin, mut pearson_lin, mut nonlinear) = (0, 0, 0);
    for s in 0..20u64 {
        let spec = SynthSpec::blocks(sizes.clone(), 0.85, 0.0, 2000, 40 + s);
        let truth = spec.ground_truth_groups().unwrap();
        let ds = generate(&spec).unwrap();
        let ce = association_matrix_parallel(&ds, Measure::Ce, &cfg(s), jobs()).unwrap();
        ce_lin += usize::from(recovered(&ce, ce_threshold, &truth));
        let p = association_matrix_parallel(&ds, Measure::Pearson, &cfg(s), jobs()).unwrap();
        pearson_lin += usize::from(recovered(&p, Measure::Pearson.default_threshold(), &truth));

        let spec = SynthSpec {
            kind: SynthKind::HarmonicBlocks {
                sizes: sizes.clone(),
                noise_sd: 0.1,
            },
            n_rows: 2000,
            seed: 90 + s,
        };
        let truth = spec.ground_truth_groups().unwrap();
        let ds = generate(&spec).unwrap();
        let ce = association_matrix_parallel(&ds, Measure::Ce, &cfg(s), jobs()).unwrap();
        let p = association_matrix_parallel(&ds, Measure::Pearson, &cfg(s), jobs()).unwrap();
        nonlinear += usize::from(recovered(&ce, ce_threshold, &truth) && !recovered(&p, matched, &truth));
    }
    check(
        ce_lin >= 18 && pearson_lin >= 18 && nonlinear >= 18,
        format!(
            "ce linear {ce_lin}/20, pearson linear {pearson_lin}/20, nonlinear ce-only {nonlinear}/20 (pearson threshold {matched:.4}); need >= 18"
        ),
    )
}

fn entropy_calibration() -> Verdict {
    let (mut uniform, mut normal) = (0.0, 0.0);
    for s in 0..10u64 {
        let mut rng = SplitMix64::new(300 + s);
        let u: Vec<f64> = (0..10_000).map(|_| rng.next_f64()).collect();
        let z: Vec<f64> = (0..10_000).map(|_| rng.standard_normal()).collect();
        uniform += knn_entropy(&Points::new(u, 1).unwrap(), &cfg(s)).unwrap().value / 10.0;
        normal += knn_entropy(&Points::new(z, 1).unwrap(), &cfg(s)).unwrap().value / 10.0;
    }
    let truth = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    check(
        uniform.abs() < 0.02 && (normal - truth).abs() < 0.02,
        format!("uniform {uniform:.4} vs 0, normal {normal:.4} vs {truth:.4}; tolerance 0.02"),
    )
}

fn xpt_golden() -> Verdict {
    let x = read_xpt(common::data_path("golden.xpt")).unwrap();
    let want = load_csv(common::data_path("golden.csv"), &CsvOptions::default()).unwrap();
    let cells = |d: &Dataset| -> Vec<Vec<Option<u64>>> {
        d.columns()
            .iter()
            .map(|c| c.iter().map(|v| v.map(f64::to_bits)).collect())
            .collect()
    };
    let golden = x.dataset.names() == want.names() && cells(&x.dataset) == cells(&want);
    let mut rng = SplitMix64::new(8);
    let mut bad = 0;
    for _ in 0..10_000 {
        let exp = (rng.next_u64() % 512) as i64 - 260;
        let bits = (rng.next_u64() & (1 << 63)) | (((exp + 1023) as u64) << 52) | (rng.next_u64() >> 12);
        let v = f64::from_bits(bits);
        if ibm_to_ieee(&common::ibm_encode(Some(v))).map(f64::to_bits) != Some(bits) {
            bad += 1;
        }
    }
    check(
        golden && bad == 0,
        format!("golden pair equal: {golden}; round-trip failures: {bad}/10000"),
    )
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_copent"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

/// Left join on the respondent id `SEQN` of the first file.
fn merge_on_seqn(parts: Vec<Dataset>) -> Result<Dataset, String> {
    let key = |d: &Dataset| d.column_index("SEQN").ok_or("file without SEQN");
    let base = parts.first().ok_or("no files")?;
    let base_ids: Vec<Option<f64>> = base.column(key(base)?).iter().collect();
    let mut columns = vec![base.column(key(base)?).clone()];
    for d in &parts {
        let k = key(d)?;
        let index: std::collections::HashMap<u64, usize> = d
            .column(k)
            .iter()
            .enumerate()
            .filter_map(|(r, v)| v.map(|v| (v.to_bits(), r)))
            .collect();
        for (c, col) in d.columns().iter().enumerate() {
            if c == k || columns.iter().any(|x| x.name() == col.name()) {
                continue;
            }
            let values = base_ids
                .iter()
                .map(|id| id.and_then(|id| index.get(&id.to_bits())).and_then(|&r| col.get(r)));
            columns.push(Column::from_options(col.name(), values));
        }
    }
    Dataset::new(columns).map_err(|e| e.to_string())
}

fn nhanes_smoke() -> Verdict {
    let Ok(manifest) = std::env::var("COPENT_NHANES_MANIFEST") else {
        return Verdict::Skip("COPENT_NHANES_MANIFEST not set".into());
    };
    let tmp = tempfile::tempdir().unwrap();
    let dest = std::env::var("COPENT_NHANES_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|_| tmp.path().into());
    let run = || -> Result<String, String> {
        cli(&["fetch", "--manifest", &manifest, "--dest", dest.to_str().unwrap()])?;
        let mut parts = Vec::new();
        let mut xpts: Vec<PathBuf> = std::fs::read_dir(&dest)
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("xpt")))
            .collect();
        xpts.sort();
        for xpt in &xpts {
            let csv = tmp
                .path()
                .join(format!("{}.csv", xpt.file_stem().unwrap().to_string_lossy()));
            cli(&[
                "convert",
                "--xpt",
                xpt.to_str().unwrap(),
                "--out",
                csv.to_str().unwrap(),
            ])?;
            parts.push(load_csv(&csv, &CsvOptions::default()).map_err(|e| e.to_string())?);
        }
        let merged = merge_on_seqn(parts)?;
        let imputed = impute(&merged, ImputePolicy::Mean).map_err(|e| e.to_string())?;
        let keep: Vec<usize> = (0..merged.n_cols())
            .filter(|&c| merged.column(c).name() != "SEQN" && merged.column(c).missing_count() < merged.n_rows())
            .filter(|&c| {
                let v = imputed.column(c).complete_values().unwrap();
                v.windows(2).any(|w| w[0] != w[1])
            })
            .take(30)
            .collect();
        if keep.len() < 2 {
            return Err("fewer than two usable columns".into());
        }
        let slice = merged.subset(&keep).map_err(|e| e.to_string())?;
        let data = tmp.path().join("slice.csv");
        copent::csv_io::save_csv(&slice, &data).map_err(|e| e.to_string())?;
        let matrix = tmp.path().join("M.json");
        cli(&[
            "assoc",
            "--input",
            data.to_str().unwrap(),
            "--measure",
            "ce",
            "--json",
            "--output",
            matrix.to_str().unwrap(),
        ])?;
        let m = copent::matrix_io::load_matrix(&matrix, Measure::Ce).map_err(|e| e.to_string())?;
        let n = m.n();
        let symmetric = (0..n).all(|i| (0..n).all(|j| m.get(i, j).map(f64::to_bits) == m.get(j, i).map(f64::to_bits)));
        let finite = (0..n).all(|i| (0..n).all(|j| i == j || m.get(i, j).is_some_and(f64::is_finite)));
        if symmetric && finite {
            Ok(format!(
                "{} files, {n} columns, {} rows: symmetric finite matrix",
                xpts.len(),
                slice.n_rows()
            ))
        } else {
            Err(format!("symmetric {symmetric}, finite {finite}"))
        }
    };
    match run() {
        Ok(d) => Verdict::Pass(d),
        Err(e) => Verdict::Fail(e),
    }
}

fn main() {
    type Check = (&'static str, fn() -> Verdict);
    let checks: [Check; 9] = [
        ("gaussian equivalence", gaussian_equivalence),
        ("independence zero", independence),
        ("exact monotone invariance", monotone_invariance),
        ("kendall oracle", kendall_oracle),
        ("entropy decomposition", decomposition),
        ("block recovery", block_recovery),
        ("knn entropy calibration", entropy_calibration),
        ("xpt golden pair", xpt_golden),
        ("nhanes smoke test", nhanes_smoke),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{}] {name} ({secs:.1}s): {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
