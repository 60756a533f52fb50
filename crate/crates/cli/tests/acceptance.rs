//! Release gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use frkan::data::{stratified_split, synth_gaussian_clusters, synth_periodic, EmbeddingSet};
use frkan::fourier::{BuiltinFunction, Norm};
use frkan::heads::{Head, HeadSpec};
use frkan::metrics::{compute_metrics, confusion_matrix};
use frkan::training::{evaluate, train};
use frkan::TrainConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("parameter counts", Duration::from_secs(1), param_counts),
        ("gradient correctness", Duration::from_secs(60), gradients),
        (
            "fourier convergence",
            Duration::from_secs(10),
            fourier_convergence,
        ),
        (
            "expressivity separation",
            Duration::from_secs(300),
            expressivity,
        ),
        ("sanity convergence", Duration::from_secs(120), sanity),
        ("metrics oracle", Duration::from_secs(60), metrics_oracle),
        ("determinism", Duration::from_secs(120), determinism),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let mut out = check();
        let elapsed = start.elapsed();
        if elapsed > budget {
            out.pass = false;
            out.detail += &format!("; over time budget {budget:?}");
        }
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {name} ({:.2}s): {}",
            elapsed.as_secs_f64(),
            out.detail
        );
        failed += usize::from(!out.pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

/// Rounds `count` to the precision of the printed thousands figure.
fn matches_printed(count: usize, printed: &str) -> bool {
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len());
    let shown = format!("{:.*}", decimals, count as f64 / 1000.0);
    shown == printed
}

fn param_counts() -> Outcome {
    const D: usize = 768;
    // (dataset, classes, hidden width, printed MLP count, printed FR-KAN count)
    let rows: [(&str, usize, usize, &str, &str); 7] = [
        ("AgNews", 4, 40, "30.9", "30.7"),
        ("Dbpedia", 14, 138, "108.1", "107.5"),
        ("IMDb", 2, 20, "15.4", "15.4"),
        ("Papluca", 20, 196, "154.6", "153.6"),
        ("SST-5", 5, 50, "38.7", "38.4"),
        ("TREC-50", 50, 477, "512.8", "384"),
        ("YELP-Full", 5, 50, "38.7", "38.4"),
    ];
    let mut problems = Vec::new();
    for (name, c, hidden, mlp_printed, fr_printed) in rows {
        let fr = Head::init(HeadSpec::Frkan { grid: 5 }, D, c, 0)
            .unwrap()
            .param_count();
        let fr_expected = 2 * D * c * 5 + c;
        if fr != fr_expected {
            problems.push(format!("{name} FR-KAN-5 {fr} != {fr_expected}"));
        }
        if !matches_printed(fr, fr_printed) {
            problems.push(format!("{name} FR-KAN-5 {fr} vs table {fr_printed}k"));
        }
        if name == "TREC-50" {
            continue;
        }
        let mlp = Head::init(HeadSpec::Mlp2 { hidden }, D, c, 0)
            .unwrap()
            .param_count();
        let mlp_expected = D * hidden + hidden + hidden * c + c;
        if mlp != mlp_expected {
            problems.push(format!("{name} MLP-{hidden} {mlp} != {mlp_expected}"));
        }
        if !matches_printed(mlp, mlp_printed) {
            problems.push(format!("{name} MLP-{hidden} {mlp} vs table {mlp_printed}k"));
        }
    }
    if problems.is_empty() {
        outcome(true, "all 13 rows match")
    } else {
        outcome(false, problems.join("; "))
    }
}

fn finite_difference_check(head: &Head, x: &[f64], g: &[f64], h: f64) -> f64 {
    let objective = |head: &Head, x: &[f64]| -> f64 {
        head.forward(x)
            .unwrap()
            .iter()
            .zip(g)
            .map(|(l, g)| l * g)
            .sum()
    };
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-3);
    let bundle = head.backward(x, g).unwrap();
    let mut worst = 0.0f64;
    let mut probe = head.clone();
    for (t, grad) in bundle.tensors.iter().enumerate() {
        for (k, &analytic) in grad.data.iter().enumerate() {
            let orig = probe.parameters()[t].data[k];
            probe.parameters_mut()[t].data[k] = orig + h;
            let up = objective(&probe, x);
            probe.parameters_mut()[t].data[k] = orig - h;
            let down = objective(&probe, x);
            probe.parameters_mut()[t].data[k] = orig;
            worst = worst.max(rel(analytic, (up - down) / (2.0 * h)));
        }
    }
    let mut xp = x.to_vec();
    for (i, &analytic) in bundle.grad_input.iter().enumerate() {
        xp[i] = x[i] + h;
        let up = objective(head, &xp);
        xp[i] = x[i] - h;
        let down = objective(head, &xp);
        xp[i] = x[i];
        worst = worst.max(rel(analytic, (up - down) / (2.0 * h)));
    }
    worst
}

fn gradients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in ["mlp1", "mlp2", "kan", "frkan"] {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let spec = match kind {
                "mlp1" => HeadSpec::Mlp1,
                "mlp2" => HeadSpec::Mlp2 {
                    hidden: rng.gen_range(1..=16),
                },
                "kan" => HeadSpec::Kan {
                    grid: rng.gen_range(1..=5),
                    degree: 3,
                },
                _ => HeadSpec::Frkan {
                    grid: rng.gen_range(1..=5),
                },
            };
            let (d, c) = (rng.gen_range(1..=32), rng.gen_range(1..=8));
            let mut head = Head::init(spec, d, c, rng.gen()).unwrap();
            for p in head.parameters_mut() {
                p.data
                    .iter_mut()
                    .for_each(|v| *v = rng.gen_range(-1.0..1.0));
            }
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let g: Vec<f64> = (0..c).map(|_| rng.gen_range(-1.0..1.0)).collect();
            worst = worst.max(finite_difference_check(&head, &x, &g, 1e-6));
        }
        pass &= worst < 1e-4;
        parts.push(format!("{kind} max rel err {worst:.2e}"));
    }
    outcome(pass, parts.join(", "))
}

fn fourier_convergence() -> Outcome {
    let mut problems = Vec::new();

    let exp_sup = BuiltinFunction::ExpSin.scan(20, Norm::Sup).unwrap();
    let at_20 = *exp_sup.errors.last().unwrap();
    if at_20 >= 1e-6 {
        problems.push(format!("exp_sin sup error at G=20 is {at_20:e}"));
    }
    let exp_l2 = BuiltinFunction::ExpSin.scan(20, Norm::L2).unwrap();
    for (g, w) in exp_l2.errors.windows(2).enumerate() {
        if w[1] > w[0] + 1e-12 {
            problems.push(format!(
                "exp_sin L2 rises at G={}: {:e} -> {:e}",
                g + 2,
                w[0],
                w[1]
            ));
        }
    }
    let sin3 = BuiltinFunction::Sin3x.scan(20, Norm::Sup).unwrap();
    for (&g, &e) in sin3.grids.iter().zip(&sin3.errors) {
        if g >= 3 && e >= 1e-9 {
            problems.push(format!("sin3x error at G={g} is {e:e}"));
        }
    }
    let square = BuiltinFunction::Square.scan(64, Norm::Sup).unwrap();
    let sq_64 = *square.errors.last().unwrap();
    let jump = BuiltinFunction::Square.jump_height();
    if sq_64 <= 0.15 * jump {
        problems.push(format!("square sup error at G=64 is {sq_64}, jump {jump}"));
    }
    // the scanned function really is the square wave
    debug_assert_eq!(BuiltinFunction::Square.eval(PI / 2.0), 1.0);

    if problems.is_empty() {
        outcome(
            true,
            format!(
                "exp_sin sup@20 {at_20:.2e}, sin3x max@G>=3 {:.2e}, square sup@64 {sq_64:.3} ({:.3} of jump)",
                sin3.errors[2..].iter().cloned().fold(0.0, f64::max),
                sq_64 / jump
            ),
        )
    } else {
        outcome(false, problems.join("; "))
    }
}

fn splits(set: &EmbeddingSet) -> (EmbeddingSet, EmbeddingSet, EmbeddingSet) {
    stratified_split(set, [0.7, 0.15, 0.15], 0).unwrap()
}

fn test_accuracy(spec: HeadSpec, set: &EmbeddingSet, cfg: &TrainConfig) -> f64 {
    let (tr, va, te) = splits(set);
    let head = Head::init(spec, set.dim(), set.n_classes(), cfg.seed).unwrap();
    let (head, _) = train(head, &tr, &va, cfg).unwrap();
    evaluate(&head, &te).unwrap().accuracy
}

fn expressivity() -> Outcome {
    let set = synth_periodic(10_000, 16, 3.0, 0).unwrap();
    let cfg = TrainConfig {
        learning_rate: 1e-2,
        batch_size: 64,
        epochs: 50,
        ..TrainConfig::default()
    };
    let fr = test_accuracy(HeadSpec::Frkan { grid: 5 }, &set, &cfg);
    let mlp = test_accuracy(HeadSpec::Mlp1, &set, &cfg);
    outcome(
        fr >= 0.90 && mlp <= 0.70,
        format!(
            "FR-KAN G=5 accuracy {fr:.4} (need >= 0.90), MLP1 accuracy {mlp:.4} (need <= 0.70)"
        ),
    )
}

fn sanity() -> Outcome {
    let set = synth_gaussian_clusters(4000, 32, 4, 6.0, 0).unwrap();
    let cfg = TrainConfig {
        learning_rate: 1e-2,
        epochs: 20,
        ..TrainConfig::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for spec in [
        HeadSpec::Mlp1,
        HeadSpec::Mlp2 { hidden: 16 },
        HeadSpec::Kan { grid: 1, degree: 3 },
        HeadSpec::Frkan { grid: 5 },
    ] {
        let acc = test_accuracy(spec, &set, &cfg);
        pass &= acc >= 0.95;
        parts.push(format!("{} {acc:.4}", spec.name()));
    }
    outcome(pass, parts.join(", "))
}

/// Metrics recomputed from scratch by counting over the raw pairs.
fn brute_force(preds: &[usize], labels: &[usize], k: usize) -> [f64; 4] {
    let n = preds.len() as f64;
    let correct = preds.iter().zip(labels).filter(|(p, t)| p == t).count() as f64;
    let accuracy = correct / n;
    let mut f1_sum = 0.0;
    let (mut tp_all, mut fp_all, mut fn_all) = (0.0, 0.0, 0.0);
    let mut pe = 0.0;
    for c in 0..k {
        let tp = preds
            .iter()
            .zip(labels)
            .filter(|&(&p, &t)| p == c && t == c)
            .count() as f64;
        let fp = preds
            .iter()
            .zip(labels)
            .filter(|&(&p, &t)| p == c && t != c)
            .count() as f64;
        let fneg = preds
            .iter()
            .zip(labels)
            .filter(|&(&p, &t)| p != c && t == c)
            .count() as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fneg > 0.0 {
            tp / (tp + fneg)
        } else {
            0.0
        };
        f1_sum += if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        tp_all += tp;
        fp_all += fp;
        fn_all += fneg;
        let pred_c = preds.iter().filter(|&&p| p == c).count() as f64;
        let true_c = labels.iter().filter(|&&t| t == c).count() as f64;
        pe += (pred_c / n) * (true_c / n);
    }
    let micro_p = tp_all / (tp_all + fp_all);
    let micro_r = tp_all / (tp_all + fn_all);
    let micro = 2.0 * micro_p * micro_r / (micro_p + micro_r);
    let kappa = if pe >= 1.0 {
        0.0
    } else {
        (accuracy - pe) / (1.0 - pe)
    };
    [accuracy, f1_sum / k as f64, micro, kappa]
}

fn metrics_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=200);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let preds: Vec<usize> = labels
            .iter()
            .map(|&t| {
                if rng.gen_bool(0.6) {
                    t
                } else {
                    rng.gen_range(0..k)
                }
            })
            .collect();
        let got = compute_metrics(&confusion_matrix(&preds, &labels, k).unwrap()).unwrap();
        let want = brute_force(&preds, &labels, k);
        for (g, w) in [got.accuracy, got.macro_f1, got.micro_f1, got.kappa]
            .iter()
            .zip(want)
        {
            worst = worst.max((g - w).abs());
        }
    }
    let ex = compute_metrics(&confusion_matrix(&[0, 0, 1, 0], &[0, 0, 1, 1], 2).unwrap()).unwrap();
    let example_ok = (ex.accuracy - 0.75).abs() < 1e-12
        && (ex.macro_f1 - 0.733333).abs() < 5e-7
        && (ex.micro_f1 - 0.75).abs() < 1e-12
        && (ex.kappa - 0.5).abs() < 1e-12;
    outcome(
        worst <= 1e-12 && example_ok,
        format!(
            "max deviation {worst:.1e} over 1000 instances; example acc {} macro {:.6} micro {} kappa {}",
            ex.accuracy, ex.macro_f1, ex.micro_f1, ex.kappa
        ),
    )
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_frkan"))
        .args(args)
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("frkan-acceptance-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let result = (|| {
        if !run_cli(&[
            "synth",
            "--kind",
            "clusters",
            "--n",
            "600",
            "--d",
            "8",
            "--classes",
            "3",
            "--seed",
            "5",
            "--out-dir",
            d,
        ]) {
            return outcome(false, "synth failed");
        }
        let mut mismatched = Vec::new();
        for head in [
            &["--head", "frkan", "--grid", "3"][..],
            &["--head", "kan", "--grid", "2"][..],
            &["--head", "mlp2", "--hidden", "6"][..],
            &["--head", "mlp1", "--precision", "f32"][..],
        ] {
            let mut reports = Vec::new();
            for run in 0..2 {
                let out = dir.join(format!("report-{run}.json"));
                let mut args = vec!["train"];
                args.extend_from_slice(head);
                let (tr, va, te) = (
                    format!("{d}/train.emb"),
                    format!("{d}/val.emb"),
                    format!("{d}/test.emb"),
                );
                let out_s = out.to_str().unwrap().to_owned();
                args.extend_from_slice(&[
                    "--train", &tr, "--val", &va, "--test", &te, "--epochs", "3", "--lr", "1e-2",
                    "--seed", "9", "--out", &out_s,
                ]);
                if !run_cli(&args) {
                    return outcome(false, format!("train {head:?} failed"));
                }
                reports.push(std::fs::read(Path::new(&out)).unwrap());
            }
            if reports[0] != reports[1] {
                mismatched.push(head[1]);
            }
        }
        if mismatched.is_empty() {
            outcome(
                true,
                "repeated train runs gave byte-identical reports for 4 heads",
            )
        } else {
            outcome(false, format!("reports differ for {mismatched:?}"))
        }
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}
