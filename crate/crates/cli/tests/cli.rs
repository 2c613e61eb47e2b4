use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stqm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stqm")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn arrival_defaults_normalize_at_every_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.cfg", "t_start = -2\nt_stop = 16\nt_count = 3601\n");
    let o = stqm(dir.path(), &["arrival", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout(&o);
    assert!(summary.starts_with("x,integral_rho,peak_t\n"));
    for line in summary.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[1] - 1.0).abs() < 1e-3, "{line}");
        assert!((f[2] - f[0] / 5.0).abs() < 0.02 * f[0] / 5.0, "{line}");
    }
    let csv = fs::read_to_string(dir.path().join("arrival.csv")).unwrap();
    assert!(csv.starts_with("t,x,rho,phi_plus_re,phi_plus_im,phi_minus_re,phi_minus_im\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 3601);
    assert!(column(&csv, "phi_minus_re").iter().all(|&v| v == 0.0));
}

#[test]
fn stationary_reports_linewidths() {
    let dir = tempfile::tempdir().unwrap();
    let o = stqm(dir.path(), &["stationary", "--out", "s.csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "T_mean,T_std,fwhm,fwhm_convolved,uncertainty_product\n1.0,1.0,1.0,1.0,1.0\n");
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let (a, b) = (column(&csv, "chi_sq"), column(&csv, "chi_sq_convolved"));
    assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() <= 1e-9));

    let cfg = write_config(dir.path(), "g.cfg", "scenario = stationary\ngamma = 2\n");
    let o = stqm(dir.path(), &["stationary", "--config", &cfg]);
    assert!(o.status.success());
    let values: Vec<f64> = stdout(&o).lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values[3], 3.0);
}

#[test]
fn bayes_demo_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.cfg", "n_events = 20000\n");
    let run = |out: &str| {
        let o = stqm(dir.path(), &["bayes-demo", "--config", &cfg, "--out", out, "--seed", "7"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let first = run("one.csv");
    let second = run("two.csv");
    assert_eq!(first.lines().nth(1), second.lines().nth(1));
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("one.csv"), read("two.csv"));
    assert_eq!(read("one_events.csv"), read("two_events.csv"));

    let fields: Vec<&str> = first.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[0], "20000");
    assert_eq!(fields[1], "7");
    let diff: f64 = fields[6].parse().unwrap();
    assert!(diff < 1e-3);
    let events = String::from_utf8(read("one_events.csv")).unwrap();
    assert!(events.starts_with("event_index,x,t\n0,"));
    assert_eq!(events.lines().count(), 20001);
}

#[test]
fn seed_flag_changes_the_events() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.cfg", "n_events = 100\n");
    for (out, seed) in [("a.csv", "1"), ("b.csv", "2")] {
        assert!(stqm(dir.path(), &["bayes-demo", "--config", &cfg, "--out", out, "--seed", seed]).status.success());
    }
    let a = fs::read(dir.path().join("a_events.csv")).unwrap();
    let b = fs::read(dir.path().join("b_events.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("x_list =\n", "arrival"),
        ("colour = red\n", "arrival"),
        ("scenario = stationary\n", "arrival"),
        ("lambda = 0\n", "stationary"),
    ];
    for (i, (text, cmd)) in cases.into_iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.cfg"), text);
        let o = stqm(dir.path(), &[cmd, "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{text:?}");
        assert!(!dir.path().join(format!("{cmd}.csv")).exists());
    }
    let o = stqm(dir.path(), &["arrival", "--config", "missing.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_guards_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coarse.cfg", "p_count = 16\n");
    let o = stqm(dir.path(), &["arrival", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("momentum grid too coarse"));

    let cfg = write_config(dir.path(), "short.cfg", "t_stop = 2\nt_count = 101\n");
    let o = stqm(dir.path(), &["bayes-demo", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_prints_one_row_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = stqm(dir.path(), &["verify"]);
    let table = stdout(&o);
    assert_eq!(table.lines().count(), 15);
    assert!(table.lines().next().unwrap().contains("measured"));
    let failing: Vec<&str> = table.lines().skip(1).filter(|l| l.contains("FAIL")).collect();
    assert_eq!(o.status.code(), Some(if failing.is_empty() { 0 } else { 1 }));

    let o = stqm(dir.path(), &["verify", "--perturb-branch"]);
    let row = stdout(&o).lines().nth(2).unwrap().to_string();
    assert!(row.trim_start().starts_with("2 ") && row.contains("FAIL"), "{row}");
    assert_eq!(o.status.code(), Some(1));
}
