use std::path::Path;
use std::process::{Command, Output};

fn gccf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gccf"))
        .args(args)
        .env_remove("GCCF_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

/// The `[lo, hi]` printed on the final `h in` line.
fn final_bracket(text: &str) -> (f64, f64) {
    let line = text.lines().find(|l| l.starts_with("h in [")).expect("bracket line");
    let inner = &line[line.find('[').unwrap() + 1..line.find(']').unwrap()];
    let (lo, hi) = inner.split_once(", ").unwrap();
    (lo.parse().unwrap(), hi.parse().unwrap())
}

#[test]
fn dim_prints_a_bracket_inside_one_two() {
    let o = gccf(&["dim", "--tau", "0+1i", "--N", "5,10", "--n", "1,2", "--target-width", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (lo, hi) = final_bracket(&stdout(&o));
    assert!(1.0 < lo && lo <= hi && hi < 2.0);
}

#[test]
fn dim_exit_codes() {
    let o = gccf(&["dim", "--tau", "-1+1i"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the parameter space"));
    assert_eq!(gccf(&["dim", "--tau", "0+1i", "--N", "5", "--n", "1"]).status.code(), Some(4));
    assert_eq!(gccf(&["dim", "--tau", "zero"]).status.code(), Some(2));
    assert_eq!(gccf(&["dim"]).status.code(), Some(2));
    assert_eq!(gccf(&["dim", "--tau", "0+1i", "--bogus"]).status.code(), Some(2));
    assert_eq!(gccf(&["dim", "--tau", "0+1i", "--N", "40", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn dim_twice_with_cache_hits_every_rung() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "dim",
        "--tau",
        "0+1i",
        "--N",
        "4,8",
        "--n",
        "1,2",
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let first = gccf(&args);
    assert!(stdout(&first).contains("cache hits: 0/4"));
    let second = gccf(&args);
    assert!(stdout(&second).contains("cache hits: 4/4"), "{}", stdout(&second));
    assert_eq!(final_bracket(&stdout(&first)), final_bracket(&stdout(&second)));
}

#[test]
fn dim_writes_ladder_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    gccf(&["dim", "--tau", "1+1i", "--N", "4", "--n", "1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(data_rows(&out.join("dim.csv")).len(), 2);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("dim.json")).unwrap()).unwrap();
    assert_eq!(doc["config"]["tau"], "1+1i");
    assert!(doc["code_version"].as_str().unwrap().starts_with("gccf-"));
    assert_eq!(doc["result"]["ladder"].as_array().unwrap().len(), 2);
}

#[test]
fn pressure_rows_and_sentinel() {
    let o = gccf(&["pressure", "--tau", "0+1i", "--t", "1.0,1.5,2.0", "--N", "10", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "inf");
    assert!(rows[1..].iter().all(|r| r[2] != "inf"));
    let p_lo: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(p_lo.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(gccf(&["pressure", "--tau", "0+1i", "--t", ""]).status.code(), Some(2));
    assert_eq!(gccf(&["pressure", "--tau", "0+1i", "--t", "3.5"]).status.code(), Some(2));
}

#[test]
fn limitset_random_cloud_is_inside_the_disk_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = gccf(&[
            "limitset",
            "--tau",
            "0+1i",
            "--N",
            "20",
            "--n",
            "6",
            "--random",
            "100000",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        out
    };
    let a = run("a");
    let rows = data_rows(&a.join("limitset.csv"));
    assert_eq!(rows.len(), 100_000);
    for row in &rows {
        let (re, im) = row.split_once(',').unwrap();
        let (re, im): (f64, f64) = (re.parse().unwrap(), im.parse().unwrap());
        assert!(((re - 0.5).powi(2) + im * im).sqrt() <= 0.5 + 1e-9);
    }
    let bin = std::fs::read(a.join("limitset.ccf1")).unwrap();
    assert_eq!(bin.len(), 12 + 16 * 100_000);
    let b = run("b");
    for f in ["limitset.csv", "limitset.ccf1", "limitset.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn limitset_svg_and_box_count() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("cloud.svg");
    let out = dir.path().join("o");
    let o = gccf(&[
        "limitset",
        "--tau",
        "0+1i",
        "--N",
        "10",
        "--n",
        "5",
        "--random",
        "20000",
        "--box-count",
        "--svg",
        svg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("box-counting slope"));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(data_rows(&out.join("boxcount.csv")).len(), 6);
}

#[test]
fn sweep_writes_one_row_per_lattice_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let svg = dir.path().join("heat.svg");
    let o = gccf(&[
        "sweep",
        "--region",
        "0,2,1,3",
        "--step",
        "0.5",
        "--N",
        "4",
        "--n",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(data_rows(&out.join("sweep.csv")).len(), 25);
    let analysis: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("analysis.json")).unwrap()).unwrap();
    assert_eq!(analysis["result"].as_array().unwrap().len(), 3);
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<rect").count(), 25);
    assert_eq!(gccf(&["sweep", "--region", "0,2,0.5,3", "--step", "0.5"]).status.code(), Some(3));
    assert_eq!(gccf(&["sweep", "--region", "0,2,1", "--step", "0.5"]).status.code(), Some(2));
}

#[test]
fn verify_passes_at_square_lattice() {
    let o = gccf(&["verify", "--tau", "0+1i"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "tau = \"-1+1i\"\n[solver]\ntruncations = [4]\nlevels = [1]\ntarget_width = 1.0\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    assert_eq!(gccf(&["--config", cfg, "dim"]).status.code(), Some(3));
    let o = gccf(&["--config", cfg, "dim", "--tau", "0+1i"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("N=4 "));
    std::fs::write(&path, "tau = 3\n").unwrap();
    assert_eq!(gccf(&["--config", cfg, "dim"]).status.code(), Some(2));
    assert_eq!(gccf(&["--config", "/no/such/file.toml", "dim"]).status.code(), Some(1));
}
