use aperiodic::certificate::{
    build_dense_certificate, choose_compatible_config, Certificate, Configuration, Profile, Window,
};
use aperiodic::game::Coin;
use aperiodic::geometry::{build_hull, Convex, DiamondSpec, FamilyFile, LevelDims, Point};
use aperiodic::patterns::{Pattern, Site};
use aperiodic::rational::{fmt_q, frac, int, parse_q};
use aperiodic_cli::io::{parse_region, region_text, to_json, window, window_text};
use aperiodic_cli::scenes::{certificate_scene, hull_scene};
use aperiodic_cli::svg::{render_svg, svg_string, SvgError, SvgScene};
use proptest::prelude::*;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aperiodic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn one_bucket_two_coins_is_unorientable() {
    let o = run(&["game", "solve", "--buckets", "1", "--coins", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("UNORIENTABLE\n"));
    let o = run(&["game", "solve", "--buckets", "2", "--coins", "3", "--no-self-moves"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ORIENTABLE\n"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["game", "solve", "--buckets", "1", "--coins", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["game", "frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["safe", "query", "--file", "nowhere.json", "--point", "1,2"]).status.code(), Some(2));
    let o = run(&["cert", "build", "--profile", "desk1", "--window", "3/0", "--out", "unused.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zero denominator"));
    assert_eq!(run(&["safe", "query", "--file", "x", "--point", "1/0,2"]).status.code(), Some(2));
    assert_eq!(
        run(&["cert", "build", "--profile", "nonesuch", "--window", "10", "--out", "u.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn json_and_quiet() {
    let o = run(&["--json", "game", "greedy", "--buckets", "3", "--coins", "7"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["success"], true);
    let o = run(&["--quiet", "game", "greedy", "--buckets", "3", "--coins", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn game_table_reports_thresholds() {
    let o = run(&["game", "table", "--kmax", "3", "--nmax", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("threshold equals 2^k-1 for every k: yes"));
    assert!(text.contains("refuted for k in [1, 2, 3]"));
}

fn desk1_files(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let (c, x) = (dir.join("c.json"), dir.join("x.json"));
    let o = run(&["cert", "build", "--profile", "desk1", "--window", "30000", "--out", p(&c)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["cert", "config", "--cert", p(&c), "--out", p(&x)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    (c, x)
}

#[test]
fn certificate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (c, x) = desk1_files(dir.path());
    let o = run(&["cert", "validate", "--cert", p(&c), "--profile", "desk1", "--window", "30000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["cert", "compat", "--cert", p(&c), "--config", p(&x), "--budget", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("COMPATIBLE\n"));
    let o = run(&["cert", "extract", "--cert", p(&c), "--config", p(&x), "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("confirmed: true"));

    // all heads: every frame is oriented
    let heads = dir.path().join("h.json");
    std::fs::write(&heads, to_json(&Configuration::new(Profile::desk1().components(), Some(Coin::H)))).unwrap();
    let o = run(&["cert", "compat", "--cert", p(&c), "--config", p(&heads), "--budget", "100000"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["cert", "extract", "--cert", p(&c), "--config", p(&heads), "--n", "1"]).status.code(), Some(1));
}

#[test]
fn validate_flags_a_separation_violation() {
    let dir = tempfile::tempdir().unwrap();
    let (c, _) = desk1_files(dir.path());
    let mut cert: Certificate = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    let mut twin = cert.levels[0][0].clone();
    twin.center = Point::new(&twin.center.x + int(100), twin.center.y.clone());
    cert.levels[0].push(twin);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, to_json(&cert)).unwrap();
    let o = run(&["cert", "validate", "--cert", p(&bad), "--profile", "desk1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("center_separation        FAIL"));
}

#[test]
fn glue_run_writes_a_verified_result_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (c, x) = desk1_files(dir.path());
    let region = dir.path().join("e.txt");
    std::fs::write(&region, "# a domino\n0 0\n1,0\n").unwrap();
    let out = dir.path().join("glue");
    let args = [
        "glue",
        "run",
        "--x",
        p(&x),
        "--cx",
        p(&c),
        "--y",
        p(&x),
        "--cy",
        p(&c),
        "--region",
        p(&region),
        "--profile",
        "desk1",
        "--window",
        "30000",
        "--budget",
        "100000",
        "--out",
        p(&out),
        "--svg",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("GLUED\n"));
    let names = ["z.json", "c.json", "log.json", "report.json", "manifest.json", "glue.svg"];
    let first: Vec<Vec<u8>> = names.iter().map(|n| std::fs::read(out.join(n)).unwrap()).collect();
    assert_eq!(run(&args).status.code(), Some(0));
    for (n, bytes) in names.iter().zip(&first) {
        assert_eq!(&std::fs::read(out.join(n)).unwrap(), bytes, "{n} differs");
    }
    let report: serde_json::Value = serde_json::from_slice(&first[3]).unwrap();
    assert_eq!(report["rejected"], 0);
    let log = String::from_utf8_lossy(&first[2]);
    assert!(log.contains("\"event\": \"relocate\""));
    let svg = String::from_utf8_lossy(&first[5]);
    assert!(svg.contains("class=\"ey\"") && svg.contains("class=\"gap\"") && svg.contains("class=\"relocation\""));

    // a region off the window is refused with the partial output on disk
    std::fs::write(&region, "90000 0\n").unwrap();
    let o = run(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(out.join("error.json").exists());
}

fn family(dir: &Path) -> std::path::PathBuf {
    let f = dir.join("fam.json");
    std::fs::write(
        &f,
        r#"{"dims":[{"w":"10","h":"1"}],
            "diamonds":[{"level":1,"x":"0","y":"0","w":"10","h":"1"},{"level":1,"x":"400","y":"3","w":"10","h":"1"}]}"#,
    )
    .unwrap();
    f
}

#[test]
fn geometry_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = family(dir.path());
    let svg = dir.path().join("h.svg");
    let o = run(&["hull", "build", "--file", p(&f), "--svg", p(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("2 elements from 2 diamonds"));
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("class=\"hull\"").count(), 2);

    assert!(stdout(&run(&["safe", "query", "--file", p(&f), "--point", "0,1/2"])).ends_with("UNSAFE\n"));
    assert!(stdout(&run(&["safe", "query", "--file", p(&f), "--point", "0,3/4"])).ends_with(" SAFE\n"));

    let o = run(&["--json", "safe", "path", "--file", p(&f), "--point", "-6,0", "--extent", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["path"]["points"][0]["x"], "-26");
    assert_eq!(run(&["safe", "path", "--file", p(&f), "--point", "0,0", "--extent", "20"]).status.code(), Some(1));

    let o = run(&["geom", "check", "--file", p(&f), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o), stdout(&run(&["geom", "check", "--file", p(&f), "--seed", "7"])));

    // two diamonds closer than the sparsity factor allows
    let dense = dir.path().join("dense.json");
    std::fs::write(
        &dense,
        r#"{"dims":[{"w":"10","h":"1"}],
            "diamonds":[{"level":1,"x":"0","y":"0","w":"10","h":"1"},{"level":1,"x":"30","y":"0","w":"10","h":"1"}]}"#,
    )
    .unwrap();
    assert_eq!(run(&["geom", "check", "--file", p(&dense)]).status.code(), Some(1));
}

#[test]
fn pattern_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pc");
    let o = run(&["pattern", "construct", "--depth", "2", "--budget", "1000000", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let x2 = out.join("stage2/x.txt");
    let o = run(&["pattern", "acceptable", "--file", p(&x2), "--profile", "1,11:9,33", "--level", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["pattern", "check", "--file", p(&x2), "--n", "11"]);
    assert_eq!(o.status.code(), Some(0));

    // a constant pattern is periodic and fails acceptability
    let flat = dir.path().join("flat.txt");
    std::fs::write(&flat, Pattern::filled(0, 8, 9, 9, 2, 0).to_text()).unwrap();
    assert_eq!(run(&["pattern", "check", "--file", p(&flat), "--n", "1"]).status.code(), Some(1));
    assert_eq!(
        run(&["pattern", "acceptable", "--file", p(&flat), "--profile", "1:9", "--level", "1"]).status.code(),
        Some(1)
    );

    // the bound as written stops at stage two
    let o = run(&[
        "pattern",
        "construct",
        "--depth",
        "2",
        "--budget",
        "1000000",
        "--current-level-bound",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn svg_of_one_diamond_is_one_filled_path() {
    let d = DiamondSpec { level: 1, center: Point::new(int(0), int(0)), w: int(10), h: int(1) };
    let hull = build_hull(std::slice::from_ref(&d), &[LevelDims::new(int(10), int(1))]);
    let mut scene = hull_scene(&hull, &[]);
    let text = svg_string(&scene).unwrap();
    assert_eq!(text.matches("<path ").count(), 1);
    assert!(text.contains("<path class=\"hull\" d=\"M"));
    // bounds [-5, 5] x [-1/2, 1/2], 5% of the width as margin
    assert!(text.contains("viewBox=\"-5.5 -1 11 2\""));
    scene.outline("diamond", d.vertices());
    assert_eq!(svg_string(&scene).unwrap().matches("<path ").count(), 2);
}

#[test]
fn frame_scene_has_circle_boxes_and_witness_dots() {
    let p = Profile::desk1();
    let c = build_dense_certificate(&p, &Window::square(int(30_000))).unwrap();
    let one = Certificate { levels: vec![vec![c.levels[0][0].clone()]] };
    let text = svg_string(&certificate_scene(&one, &p, None)).unwrap();
    assert_eq!(text.matches("class=\"frame\"").count(), 1);
    assert_eq!(text.matches("class=\"box\"").count(), 2);
    assert_eq!(text.matches("class=\"witness\"").count(), 2);
}

#[test]
fn empty_scene_and_unwritable_path() {
    assert!(matches!(svg_string(&SvgScene::new("nothing")), Err(SvgError::Empty)));
    let mut s = SvgScene::new("dot");
    s.point("witness", Point::new(frac(1, 3), int(2)));
    assert!(svg_string(&s).unwrap().contains("cx=\"0.333333333333\""));
    let r = render_svg(&s, Path::new("/nonexistent-dir/x.svg"));
    assert!(matches!(r, Err(SvgError::Io { .. })));
}

fn arb_q() -> impl Strategy<Value = aperiodic::rational::Q> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| frac(n, d))
}

fn arb_point() -> impl Strategy<Value = Point> {
    (arb_q(), arb_q()).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_round_trip(q in arb_q()) {
        prop_assert_eq!(parse_q(&fmt_q(&q)).unwrap(), q);
    }

    #[test]
    fn windows_round_trip(a in arb_q(), b in arb_q(), w in 0i64..1000, h in 0i64..1000) {
        let win = Window::new(a.clone(), b.clone(), a + int(w), b + int(h));
        prop_assert_eq!(window(&window_text(&win)).unwrap(), win);
    }

    #[test]
    fn regions_round_trip(sites in prop::collection::vec((-1000i64..1000, -1000i64..1000), 0..40)) {
        let sites: Vec<Site> = sites.into_iter().map(|(x, y)| Site::new(x, y)).collect();
        prop_assert_eq!(parse_region(&region_text(&sites)).unwrap(), sites);
    }

    #[test]
    fn configurations_round_trip(
        entries in prop::collection::btree_map((-50i64..50, -50i64..50, 0usize..4), any::<bool>(), 0..40),
        fill in prop::option::of(any::<bool>()),
    ) {
        let coin = |b: bool| if b { Coin::H } else { Coin::T };
        let mut x = Configuration::new(4, fill.map(coin));
        for ((a, b, comp), v) in entries {
            x.assign(Site::new(a, b), comp, coin(v)).unwrap();
        }
        let back: Configuration = serde_json::from_str(&to_json(&x)).unwrap();
        prop_assert_eq!(back.assignments(), x.assignments());
        prop_assert_eq!(back.fill, x.fill);
    }

    #[test]
    fn families_round_trip(centers in prop::collection::vec(arb_point(), 0..10), w in 1i64..100, h in 1i64..100) {
        let f = FamilyFile {
            dims: vec![LevelDims::new(int(w), int(h))],
            diamonds: centers.into_iter().map(|c| DiamondSpec { level: 1, center: c, w: int(w), h: int(h) }).collect(),
            rects: vec![],
        };
        let back: FamilyFile = serde_json::from_str(&to_json(&f)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn patterns_round_trip(rows in prop::collection::vec(prop::collection::vec(0u32..3, 5), 1..6)) {
        let pat = Pattern::from_rows(0, rows.len() as i64 - 1, 3, &rows).unwrap();
        prop_assert_eq!(Pattern::from_text(&pat.to_text()).unwrap(), pat);
    }

    #[test]
    fn certificates_round_trip(dx in -500i64..500, dy in -500i64..500) {
        let p = Profile::desk1();
        let win = Window::new(int(dx), int(dy), int(dx + 20_000), int(dy + 20_000));
        let c = build_dense_certificate(&p, &win).unwrap();
        let back: Certificate = serde_json::from_str(&to_json(&c)).unwrap();
        prop_assert_eq!(&back, &c);
        let x = choose_compatible_config(&c, &p, 100_000).unwrap();
        let xb: Configuration = serde_json::from_str(&to_json(&x)).unwrap();
        prop_assert_eq!(xb.assignments(), x.assignments());
    }

    #[test]
    fn svg_bytes_are_deterministic(pts in prop::collection::vec(arb_point(), 1..8)) {
        let mut s = SvgScene::new("points");
        s.polyline("path", pts.clone());
        for q in pts {
            s.point("witness", q);
        }
        prop_assert_eq!(svg_string(&s).unwrap(), svg_string(&s.clone()).unwrap());
    }
}
