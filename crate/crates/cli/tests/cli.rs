use std::path::Path;
use std::process::{Command, Output};

fn barron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barron")).args(args).output().expect("spawn barron")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn norm_of_gaussian_on_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = barron(&["norm", "--target", "gauss:d=1", "--domain", "box:-1,1", "--weight", "bracket:0", "--ell", "0", "--p", "2", "--out", out]);
    assert!(o.status.success());
    let text = stdout(&o);
    let value: f64 = text
        .trim()
        .strip_prefix("value = ")
        .and_then(|r| r.split(',').next())
        .unwrap()
        .parse()
        .unwrap();
    let expect = simpson(|x| (-x * x).exp(), -1.0, 1.0, 2000).sqrt();
    assert!((value / expect - 1.0).abs() < 1e-6, "{value} vs {expect}");
    assert!(dir.path().join("report.csv").exists());
    assert!(dir.path().join("config.echo.toml").exists());
}

#[test]
fn apcheck_reports_divergence_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = barron(&["apcheck", "--upsilon", "pow:1.5", "--p", "2", "--d", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("diverging"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(barron(&["norm", "--bogus", "1"]).status.code(), Some(64));
    assert_eq!(barron(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(barron(&["norm", "--p", "abc"]).status.code(), Some(65));
    assert_eq!(barron(&["norm", "--target", "nope:d=1", "--out", out]).status.code(), Some(65));
    let infeasible = barron(&["embed", "--case", "optimized-barron", "--gamma", "0.5", "--p", "4", "--d", "1", "--out", out]);
    assert_eq!(infeasible.status.code(), Some(2));
    assert!(stdout(&infeasible).contains("gamma_strict"));
    let missing = dir.path().join("absent.toml");
    assert_eq!(barron(&["rates", "--config", missing.to_str().unwrap()]).status.code(), Some(74));
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn rates_from_config_twice_is_bytewise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("example.toml");
    let runs: Vec<_> = ["a", "b"].iter().map(|n| dir.path().join(n)).collect();
    let mut snaps = Vec::new();
    for run in &runs {
        std::fs::write(
            &cfg,
            format!(
                "variant = \"bounded\"\ntarget = \"gauss:d=1\"\ndomain = \"box:-1,1\"\nN_list = [8, 16, 32]\nseeds = [1, 2, 3]\noutput_dir = \"{}\"\n",
                run.display()
            ),
        )
        .unwrap();
        let o = barron(&["rates", "--config", cfg.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        snaps.push(read_all(run));
    }
    // The echoes differ only in output_dir; everything else must match byte for byte.
    let strip = |s: &[(String, Vec<u8>)]| s.iter().filter(|(n, _)| n != "config.echo.toml").cloned().collect::<Vec<_>>();
    assert_eq!(strip(&snaps[0]), strip(&snaps[1]));
    assert!(snaps[0].iter().any(|(n, _)| n == "report.svg"));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "target = \"gauss:d=1\"\ndomain = \"box:-1,1\"\np = 2.0\n").unwrap();
    let out = dir.path().join("o");
    let o = barron(&["norm", "--config", cfg.to_str().unwrap(), "--p", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let echo = std::fs::read_to_string(out.join("config.echo.toml")).unwrap();
    assert!(echo.contains("p = 3.0"), "{echo}");
}
