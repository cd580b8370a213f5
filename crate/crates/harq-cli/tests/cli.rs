use std::process::Command;

use harq_cli::config::Format;
use harq_cli::output::write_rows;
use harq_cli::presets::{preset, PRESETS};
use harq_cli::{run_sweep, verify, SweepConfig};

const SMALL: &str = include_str!("golden/small.cfg");
const GOLDEN: &str = include_str!("golden/small.csv");

fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let head = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn render(cfg: &SweepConfig) -> String {
    let mut buf = Vec::new();
    write_rows(cfg, &run_sweep(cfg), &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn golden_table() {
    let cfg = SweepConfig::parse(SMALL, "small.cfg").unwrap();
    let (gh, grows) = table(GOLDEN);
    let (h, rows) = table(&render(&cfg));
    assert_eq!(h, gh);
    assert_eq!(rows.len(), grows.len());
    for (row, gold) in rows.iter().zip(&grows) {
        for (i, name) in h.iter().enumerate() {
            if name.starts_with("mc_") && !name.ends_with("_se") {
                // sampled columns: agree within three standard errors
                let se: f64 = gold[i + 1].parse().unwrap();
                let (a, b): (f64, f64) = (row[i].parse().unwrap(), gold[i].parse().unwrap());
                assert!((a - b).abs() <= 3.0 * se.max(1e-12), "{name}: {a} vs {b}");
            } else if !name.starts_with("mc_") {
                assert_eq!(row[i], gold[i], "column {name}");
            }
        }
    }
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let cfg = SweepConfig::parse(SMALL, "small.cfg").unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    assert_eq!(one.install(|| render(&cfg)), four.install(|| render(&cfg)));
}

#[test]
fn jsonl_carries_the_same_numbers() {
    let mut cfg = SweepConfig::parse(SMALL, "small.cfg").unwrap();
    cfg.format = Format::Jsonl;
    let text = render(&cfg);
    let (h, rows) = table(GOLDEN);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let i = h.iter().position(|c| c == "outage_exact").unwrap();
    assert_eq!(first["outage_exact"].as_f64().unwrap(), rows[0][i].parse::<f64>().unwrap());
    assert!(first["error"].is_null());
    assert_eq!(text.lines().count(), rows.len());
}

#[test]
fn verify_passes_across_seeds() {
    let base = SweepConfig::parse(harq_cli::verify::DEFAULT_CONFIG, "default").unwrap();
    for seed in 1..=5 {
        let cfg = SweepConfig { seed, trials: 50_000, ..base.clone() };
        for c in verify(&cfg) {
            assert!(c.pass, "seed {seed}: {} {}", c.name, c.detail);
        }
    }
}

#[test]
fn verify_catches_a_bad_contour() {
    let text = format!("{}abscissa = 5\n", harq_cli::verify::DEFAULT_CONFIG);
    let checks = verify(&SweepConfig::parse(&text, "bad").unwrap());
    let eval = checks.iter().find(|c| c.name == "evaluation").unwrap();
    assert!(!eval.pass);
    assert!(eval.detail.contains("numerical inconsistency"), "{}", eval.detail);
}

#[test]
fn empty_axis_is_a_parse_error() {
    let err = SweepConfig::parse("axis = snr_db\nvalues =\n", "empty.cfg").unwrap_err();
    let msg = err.to_string();
    assert!(msg.starts_with("empty.cfg:2:"), "{msg}");
    assert!(msg.contains("values"), "{msg}");
}

#[test]
fn relay_gain_preset() {
    let mut cfg = SweepConfig::parse(preset("outage-relay-gain").unwrap(), "outage-relay-gain").unwrap();
    cfg.values = vec![0.0, 10.0, 20.0];
    for r in run_sweep(&cfg) {
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        let relay = r.get(&cfg, "outage_exact").unwrap();
        let direct = r.get(&cfg, "outage_no_relay").unwrap();
        let oracle = r.get(&cfg, "oracle_outage").unwrap();
        assert!(relay <= direct, "{} dB", r.point.snr_db);
        assert!((relay - oracle).abs() < 1e-6);
    }
}

#[test]
fn sojourn_preset_stays_near_one_and_a_half_frames() {
    let mut cfg = SweepConfig::parse(preset("sojourn-vs-snr").unwrap(), "sojourn-vs-snr").unwrap();
    cfg.values = vec![20.0, 30.0];
    for r in run_sweep(&cfg) {
        let t = r.get(&cfg, "sojourn_exact").unwrap();
        assert!(t > 1.5 && t < 1.6, "{} dB M={}: {t}", r.point.snr_db, r.point.max_rounds);
    }
    assert_eq!(PRESETS.len(), 10);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_harq-lab");
    let ok = Command::new(bin).args(["verify", "--trials", "20000"]).output().unwrap();
    assert!(ok.status.success());
    let out = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 7);

    let bad = Command::new(bin).args(["verify", "--abscissa", "5", "--trials", "1000"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let missing = Command::new(bin).args(["preset", "no-such-preset"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("unknown preset"));
}
