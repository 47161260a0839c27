use gccf::io::{
    decode_ccf1, encode_ccf1, grid_csv, parse_cache_line, parse_complex, parse_region, parse_run_config, parse_t_grid, pressure_csv,
    write_atomic, RungCache,
};
use gccf::pressure::PressureBracket;
use gccf::solver::{dimension_bracket, Rung, SolverConfig};
use gccf::sweep::{Region, SweepGrid};
use gccf::system::Parameter;
use gccf::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::path::Path;

fn small() -> SolverConfig {
    SolverConfig {
        truncations: vec![4, 8],
        levels: vec![1, 2],
        ..SolverConfig::default()
    }
}

#[test]
fn cache_makes_second_run_free_and_identical() {
    let dir = tempfile::tempdir().unwrap();
    let tau = Parameter::new(0.0, 1.0).unwrap();
    let first = dimension_bracket(&tau, &small(), Some(&RungCache::open(dir.path()).unwrap())).unwrap();
    assert_eq!(first.cache_hits(), 0);
    let cache = RungCache::open(dir.path()).unwrap();
    assert_eq!(cache.len(), 4);
    let second = dimension_bracket(&tau, &small(), Some(&cache)).unwrap();
    assert_eq!(second.cache_hits(), 4);
    assert_eq!(first.h_lo.to_bits(), second.h_lo.to_bits());
    assert_eq!(first.h_hi.to_bits(), second.h_hi.to_bits());
    let strip = |l: &[Rung]| {
        l.iter()
            .map(|r| (r.truncation, r.level, r.h_lo, r.h_hi, r.t_evals))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&first.ladder), strip(&second.ladder));
    // A different tolerance is a different key.
    let other = SolverConfig { tol: 2e-3, ..small() };
    assert_eq!(dimension_bracket(&tau, &other, Some(&cache)).unwrap().cache_hits(), 0);
}

#[test]
fn cache_lines_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let cache = RungCache::open(dir.path()).unwrap();
    dimension_bracket(&Parameter::new(1.0, 1.0).unwrap(), &small(), Some(&cache)).unwrap();
    let text = std::fs::read_to_string(cache.path()).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let entry = parse_cache_line(line).unwrap();
        assert!(entry.key.starts_with("u=1.0;v=1.0;"));
    }
}

#[test]
fn pressure_rows_mark_divergent_upper_bounds() {
    let rows = [
        PressureBracket {
            t: 1.0,
            p_lo: 0.5,
            p_hi: f64::INFINITY,
            level: 1,
            truncation: 10,
        },
        PressureBracket {
            t: 1.5,
            p_lo: -0.1,
            p_hi: 0.2,
            level: 1,
            truncation: 10,
        },
    ];
    let csv = pressure_csv(&rows, &serde_json::json!({"tau": "0+1i"}));
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config: ") && lines[0].contains("code_version"));
    assert_eq!(lines[1], "t,p_lo,p_hi");
    assert_eq!(lines[2], "1,0.5,inf");
    assert_eq!(lines[3], "1.5,-0.1,0.2");
}

#[test]
fn grid_csv_has_one_row_per_cell() {
    let g = SweepGrid::synthetic(Region::new(0.0, 2.0, 1.0, 3.0).unwrap(), 0.5, |u, v| {
        (1.0 + 0.01 * u, 1.1 + 0.01 * v)
    })
    .unwrap();
    let csv = grid_csv(&g).unwrap();
    assert_eq!(csv.lines().count(), 2 + 25);
    assert_eq!(csv.lines().nth(1).unwrap(), "u,v,h_lo,h_hi,N,n,seconds");
}

#[test]
fn atomic_writes_replace_and_report_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let missing = dir.path().join("no/such/dir/out.csv");
    let err = write_atomic(&missing, b"x").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("no/such/dir"));
}

#[test]
fn config_file_round_trip() {
    let cfg = parse_run_config("region = \"0,2,1,3\"\nstep = 0.25\n[solver]\nlevels = [2]\n").unwrap();
    assert_eq!(parse_region(cfg.region.as_deref().unwrap()).unwrap().u1, 2.0);
    let text = toml::to_string(&cfg).unwrap();
    assert_eq!(parse_run_config(&text).unwrap(), cfg);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

proptest! {
    #[test]
    fn complex_literals_round_trip(re in finite(), im in finite()) {
        let text = if im.is_sign_negative() { format!("{re}{im}i") } else { format!("{re}+{im}i") };
        let z = parse_complex(&text).unwrap();
        prop_assert_eq!(z.re.to_bits(), re.to_bits());
        prop_assert_eq!(z.im.to_bits(), im.to_bits());
    }

    #[test]
    fn parsers_never_panic(s in ".{0,40}") {
        let _ = parse_complex(&s);
        let _ = parse_region(&s);
        let _ = parse_t_grid(&s);
        let _ = parse_cache_line(&s);
        let _ = parse_run_config(&s);
    }

    #[test]
    fn ccf1_round_trips(pts in prop::collection::vec((finite(), finite()), 0..64)) {
        let pts: Vec<Complex64> = pts.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        prop_assert_eq!(decode_ccf1(&encode_ccf1(&pts)).unwrap(), pts);
    }

    #[test]
    fn ccf1_rejects_garbage_without_panicking(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        if let Ok(pts) = decode_ccf1(&bytes) {
            prop_assert_eq!(encode_ccf1(&pts), bytes);
        }
    }

    #[test]
    fn t_grids_stay_in_range(a in 0.0..3.0f64, b in 0.0..3.0f64, h in 0.01..1.0f64) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let ts = parse_t_grid(&format!("{a}:{b}:{h}")).unwrap();
        prop_assert!(!ts.is_empty());
        prop_assert!(ts.iter().all(|t| (0.0..=3.0).contains(t)));
        prop_assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn fuzz_seed_corpora_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus");
    let seeds = |target: &str| -> Vec<Vec<u8>> {
        let mut files: Vec<_> = std::fs::read_dir(root.join(target)).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        assert!(!files.is_empty(), "{target} has no seeds");
        files.iter().map(|p| std::fs::read(p).unwrap()).collect()
    };
    let text = |b: Vec<u8>| String::from_utf8(b).unwrap();
    for s in seeds("complex_literal") {
        parse_complex(&text(s)).unwrap();
    }
    for s in seeds("region") {
        parse_region(&text(s)).unwrap();
    }
    for s in seeds("t_grid") {
        parse_t_grid(&text(s)).unwrap();
    }
    for s in seeds("ccf1_decode") {
        decode_ccf1(&s).unwrap();
    }
    for s in seeds("cache_line") {
        parse_cache_line(text(s).trim_end()).unwrap();
    }
    for s in seeds("run_config") {
        parse_run_config(&text(s)).unwrap();
    }
}

mod cache {
    use std::fs::OpenOptions;
    use std::io::Write;

    use gccf::io::*;
    use gccf::pressure::Scope;
    use gccf::solver::*;
    use gccf::system::DomainKind;

    fn key(n: u32) -> RungKey {
        RungKey {
            u: 0.0,
            v: 1.0,
            truncation: n,
            level: 1,
            tol: 1e-3,
            domain: DomainKind::Lens,
            scope: Scope::Full,
            budget: 100,
        }
    }

    fn rung() -> Rung {
        Rung {
            truncation: 10,
            level: 1,
            letters: 100,
            h_lo: 1.25,
            h_hi: 1.5,
            t_evals: 20,
            passes: 2,
            seconds: 0.1,
            lower_from_theory: false,
            upper_from_theory: false,
            escalated_from: None,
            cached: false,
        }
    }

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RungCache::open(dir.path()).unwrap();
        assert!(cache.get(&key(10)).is_none());
        cache.put(&key(10), &rung()).unwrap();
        cache.put(&key(10), &Rung { h_lo: 0.0, ..rung() }).unwrap();
        let reopened = RungCache::open(dir.path()).unwrap();
        assert_eq!(reopened.len(), 1);
        assert_eq!(reopened.get(&key(10)).unwrap(), rung());
        assert!(reopened.get(&key(20)).is_none());
    }

    #[test]
    fn truncated_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RungCache::open(dir.path()).unwrap();
        cache.put(&key(10), &rung()).unwrap();
        let mut f = OpenOptions::new().append(true).open(cache.path()).unwrap();
        f.write_all(b"{\"key\":\"u=0.0;v=1").unwrap();
        let reopened = RungCache::open(dir.path()).unwrap();
        assert_eq!((reopened.len(), reopened.skipped_lines()), (1, 1));
    }

    #[test]
    fn rejects_inverted_brackets() {
        let line = serde_json::to_string(&CacheEntry {
            key: key(10).canonical(),
            rung: Rung { h_lo: 1.6, ..rung() },
        })
        .unwrap();
        assert!(parse_cache_line(&line).is_err());
    }
}

mod config {
    use gccf::io::*;
    use gccf::pressure::Scope;
    use gccf::solver::*;

    #[test]
    fn partial_solver_section_keeps_defaults() {
        let cfg = parse_run_config(
            r#"
    tau = "0+1i"
    jobs = 4

    [solver]
    truncations = [10, 20]
    scope = "finite"
    "#,
        )
        .unwrap();
        assert_eq!(cfg.tau.as_deref(), Some("0+1i"));
        assert_eq!(cfg.solver.truncations, vec![10, 20]);
        assert_eq!(cfg.solver.levels, SolverConfig::default().levels);
        assert_eq!(cfg.solver.scope, Scope::Finite);
        assert_eq!(cfg.jobs, Some(4));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_run_config("taus = \"0+1i\"").is_err());
        assert!(parse_run_config("[solver]\nN = 3").is_err());
        assert!(parse_run_config("jobs = -1").is_err());
    }
}

mod parsers {
    use gccf::error::*;
    use gccf::io::*;
    use num_complex::Complex64;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-1+1i").unwrap(), Complex64::new(-1.0, 1.0));
        assert_eq!(parse_complex("2.5-0.75i").unwrap(), Complex64::new(2.5, -0.75));
        assert_eq!(parse_complex("1e3+1e-2i").unwrap(), Complex64::new(1000.0, 0.01));
        assert_eq!(parse_complex("1+i").unwrap(), Complex64::new(1.0, 1.0));
        for bad in [
            "", "i", "1", "1+2", "1+2j", "nan+1i", "inf+1i", "1++2i", "1e+i", "a+bi", "1+2i ", "+-1i",
        ] {
            assert!(parse_complex(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn regions() {
        let r = parse_region("0,2,1,3").unwrap();
        assert_eq!((r.u0, r.u1, r.v0, r.v1), (0.0, 2.0, 1.0, 3.0));
        assert!(matches!(parse_region("0,2,1"), Err(Error::Parse(_))));
        assert!(matches!(parse_region("2,0,1,3"), Err(Error::Parse(_))));
        assert!(matches!(parse_region("-1,0,1,3"), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn t_grids() {
        assert_eq!(parse_t_grid("1.0,1.5,2.0").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_t_grid("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        for bad in ["", "1,,2", "4", "1:2", "2:1:0.5", "1:2:0", "-0.5"] {
            assert!(parse_t_grid(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn ccf1_round_trip_and_rejections() {
        let pts = vec![Complex64::new(0.25, -0.5), Complex64::new(1e-300, 0.75)];
        let bytes = encode_ccf1(&pts);
        assert_eq!(&bytes[..4], b"CCF1");
        assert_eq!(bytes.len(), 12 + 32);
        assert_eq!(decode_ccf1(&bytes).unwrap(), pts);
        assert!(decode_ccf1(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_ccf1(b"CCF2").is_err());
        let mut nan = bytes.clone();
        nan[12..20].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(decode_ccf1(&nan).is_err());
        let mut huge = bytes;
        huge[4..12].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode_ccf1(&huge).is_err());
    }
}
