use crate::io::{self, InputError, RunManifest};
use crate::scenes::{certificate_scene, glue_scene, hull_scene, path_scene};
use crate::svg::{render_svg, SvgError, SvgScene};
use crate::{
    CertCmd, Cli, Command, GameCmd, GameRules, GeomCmd, GlueCmd, HullCmd, PatternCmd, SafeCmd, CHECK_FAILED, OK,
};
use aperiodic::certificate::{
    aperiodicity_extract, build_dense_certificate, choose_compatible_config, compatible, validate_certificate,
    Certificate, Configuration, Profile, ValidationReport, Window,
};
use aperiodic::game::{greedy_cascade, initial_ckn, orientable, threshold_table, Rules, SearchResult};
use aperiodic::geometry::{
    build_hull, check_hull, check_hypotheses, check_rect_hypotheses, hull_path, verify_path, DiamondSpec, FamilyFile,
    Hull, LevelDims, Point, SafeSet,
};
use aperiodic::gluing::{glue, LogEntry};
use aperiodic::patterns::{
    aperiodic_pair, aperiodic_pair_in, construct_example, is_acceptable, params_of, AcceptabilityParams,
    ConstructError, ConstructOptions, LinedSequence, Pattern, RBound, Stage,
};
use aperiodic::rational::{fmt_q, fmt_sig, int, QStr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Svg(#[from] SvgError),
    #[error("{0} needs --out")]
    NoOut(&'static str),
    #[error("{0}")]
    Invalid(String),
}

/// A finished command: its exit code and both report forms.
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

fn done(ok: bool, text: String, json: Value) -> Outcome {
    Outcome { code: if ok { OK } else { CHECK_FAILED }, text, json }
}

fn rules_of(r: &GameRules) -> Rules {
    Rules { allow_self_moves: !r.no_self_moves }
}

fn out_dir<'a>(cli: &'a Cli, cmd: &'static str) -> Result<&'a Path, CliError> {
    let dir = cli.out.as_deref().ok_or(CliError::NoOut(cmd))?;
    std::fs::create_dir_all(dir).map_err(|source| InputError::Write { path: dir.display().to_string(), source })?;
    Ok(dir)
}

fn site_text(s: &aperiodic::patterns::Site) -> String {
    format!("({}, {})", s.x, s.y)
}

fn point_text(p: &Point) -> String {
    format!("({}, {})", fmt_q(&p.x), fmt_q(&p.y))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Game(c) => game(c),
        Command::Pattern(c) => pattern(cli, c),
        Command::Hull(c) => hull(c),
        Command::Safe(c) => safe(c),
        Command::Geom(c) => geom(cli, c),
        Command::Cert(c) => cert(cli, c),
        Command::Glue(c) => glue_cmd(cli, c),
    }
}

fn game(c: &GameCmd) -> Result<Outcome, CliError> {
    match c {
        GameCmd::Solve { buckets, coins, rules } => {
            if *buckets == 0 || rules.budget == 0 {
                return Err(CliError::Invalid("--buckets and --budget must be positive".into()));
            }
            let s = initial_ckn(*buckets, *coins);
            let res = orientable(&s, rules.budget, rules_of(rules));
            let mut text = format!("{}\n", res.label());
            match &res {
                SearchResult::Orientable(moves) => {
                    let m: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
                    let _ = writeln!(text, "witness ({} moves): {}", moves.len(), m.join(" "));
                }
                SearchResult::Unorientable { states } | SearchResult::BudgetExceeded { states } => {
                    let _ = writeln!(text, "states expanded: {states}");
                }
            }
            let json = json!({"buckets": buckets, "coins": coins, "rules": rules_of(rules), "result": res});
            Ok(done(!matches!(res, SearchResult::BudgetExceeded { .. }), text, json))
        }
        GameCmd::Greedy { buckets, coins } => {
            if *buckets == 0 {
                return Err(CliError::Invalid("--buckets must be positive".into()));
            }
            let g = greedy_cascade(*buckets, *coins);
            let mut text =
                format!("{} moves, {}\n", g.moves.len(), if g.success { "oriented" } else { "not oriented" });
            for (i, (h, t)) in g.final_state.pairs().iter().enumerate() {
                let _ = writeln!(text, "bucket {}: {h} heads, {t} tails", i + 1);
            }
            Ok(done(true, text, serde_json::to_value(&g).expect("serializable")))
        }
        GameCmd::Table { kmax, nmax, rules } => {
            if *kmax == 0 || *nmax == 0 || rules.budget == 0 {
                return Err(CliError::Invalid("--kmax, --nmax and --budget must be positive".into()));
            }
            let t = threshold_table(*kmax, *nmax, rules.budget, rules_of(rules));
            let ok = t.rows.iter().all(|r| r.contradictions.is_empty() && r.budget_exceeded.is_empty());
            Ok(done(ok, t.render(), serde_json::to_value(&t).expect("serializable")))
        }
    }
}

fn read_pattern(path: &Path) -> Result<Pattern, CliError> {
    let text = io::read_text(path)?;
    Pattern::from_text(&text)
        .map_err(|e| InputError::Parse { path: path.display().to_string(), detail: e.to_string() }.into())
}

fn stage_summary(s: &Stage, params: &AcceptabilityParams) -> Value {
    let x_ok = is_acceptable(&s.x, params, s.k).ok().flatten().is_none();
    let y_ok = is_acceptable(&s.y, params, s.k).ok().flatten().is_none();
    json!({"k": s.k, "n": s.n, "r": s.r, "g": s.g, "b": s.order_key().1, "candidates": s.candidates,
           "x_acceptable": x_ok, "y_acceptable": y_ok})
}

fn pattern(cli: &Cli, c: &PatternCmd) -> Result<Outcome, CliError> {
    match c {
        PatternCmd::Check { file, n } => {
            if *n == 0 {
                return Err(CliError::Invalid("--n must be positive".into()));
            }
            let p = read_pattern(file)?;
            let pair = aperiodic_pair(&p, *n);
            let text = match &pair {
                Some((u, v)) => format!("{n}-aperiodic pair: {} {}\n", site_text(u), site_text(v)),
                None => format!("no {n}-aperiodic pair\n"),
            };
            let json = json!({"n": n, "pair": pair.map(|(u, v)| [[u.x, u.y], [v.x, v.y]])});
            Ok(done(pair.is_some(), text, json))
        }
        PatternCmd::Acceptable { file, profile, level } => {
            let p = read_pattern(file)?;
            let params = io::acceptability(profile)?;
            let v = is_acceptable(&p, &params, *level).map_err(|e| CliError::Invalid(e.to_string()))?;
            let text = match &v {
                None => format!("acceptable up to level {level}\n"),
                Some(v) => format!(
                    "not acceptable: the r_{0} window at row {1}, column {2} has no n_{0}-aperiodic pair\n",
                    v.level, v.offset.0, v.offset.1
                ),
            };
            Ok(done(v.is_none(), text, json!({"level": level, "violation": v})))
        }
        PatternCmd::Construct { depth, budget, prefix, current_level_bound } => {
            if *depth == 0 {
                return Err(CliError::Invalid("--depth must be positive".into()));
            }
            let dir = out_dir(cli, "pattern construct")?;
            let mut z = LinedSequence::thue_morse(*prefix);
            let opts = ConstructOptions {
                r_bound: if *current_level_bound { RBound::CurrentLevel } else { RBound::NextLevel },
            };
            let (stages, error) = match construct_example(*depth, &mut z, *budget, opts) {
                Ok(s) => (s, None),
                Err(e) => {
                    let msg = e.to_string();
                    match e {
                        ConstructError::Budget { partial, .. }
                        | ConstructError::EvenModulus { partial, .. }
                        | ConstructError::Exhausted { partial, .. } => (partial, Some(msg)),
                        ConstructError::Pattern(_) => (Vec::new(), Some(msg)),
                    }
                }
            };
            let params = params_of(&stages);
            for s in &stages {
                let sub = dir.join(format!("stage{}", s.k));
                io::write_text(&sub.join("x.txt"), &s.x.to_text())?;
                io::write_text(&sub.join("b.txt"), &s.b.to_text())?;
                io::write_text(&sub.join("y.txt"), &s.y.to_text())?;
            }
            let summary: Vec<Value> = stages.iter().map(|s| stage_summary(s, &params)).collect();
            let json = json!({"depth": depth, "stages": summary, "error": error});
            io::write_json(&dir.join("stages.json"), &json)?;
            manifest(cli, "pattern construct", vec![], None, None, Some(*budget))?.write()?;
            let mut text = String::new();
            for s in &stages {
                let _ =
                    writeln!(text, "stage {}: n = {}, r = {}, g = {}, {} candidates", s.k, s.n, s.r, s.g, s.candidates);
            }
            if let Some(e) = &error {
                let _ = writeln!(text, "stopped: {e}");
            }
            Ok(done(error.is_none(), text, json))
        }
    }
}

fn manifest(
    cli: &Cli,
    subcommand: &str,
    inputs: Vec<PathBuf>,
    profile: Option<String>,
    window: Option<&Window>,
    budget: Option<u64>,
) -> Result<RunManifest, CliError> {
    Ok(RunManifest {
        subcommand: subcommand.into(),
        inputs,
        profile,
        window: window.map(io::window_text),
        budget,
        seed: cli.seed,
        out: cli.out.clone().ok_or(CliError::NoOut("manifest"))?,
    })
}

/// A family file as a hull: the diamonds as given, or for a rectangle
/// family the hull of the doubled rectangles' diamonds.
struct Obstacles {
    family: FamilyFile,
    diamonds: Vec<DiamondSpec>,
    dims: Vec<LevelDims>,
    hull: Hull,
}

fn obstacles(path: &Path) -> Result<Obstacles, CliError> {
    let family: FamilyFile = io::read_json(path)?;
    if family.dims.is_empty() {
        return Err(InputError::Parse { path: path.display().to_string(), detail: "no level dimensions".into() }.into());
    }
    if !family.diamonds.is_empty() && !family.rects.is_empty() {
        return Err(InputError::Parse {
            path: path.display().to_string(),
            detail: "a family holds diamonds or rectangles, not both".into(),
        }
        .into());
    }
    let bad_level = family
        .diamonds
        .iter()
        .map(|d| d.level)
        .chain(family.rects.iter().map(|r| r.level))
        .find(|&l| l == 0 || l > family.dims.len());
    if let Some(l) = bad_level {
        return Err(InputError::Parse {
            path: path.display().to_string(),
            detail: format!("level {l} has no dimensions"),
        }
        .into());
    }
    if family.rects.is_empty() {
        let hull = build_hull(&family.diamonds, &family.dims);
        Ok(Obstacles { diamonds: family.diamonds.clone(), dims: family.dims.clone(), hull, family })
    } else {
        let s = SafeSet::new(&family.rects, &family.dims);
        Ok(Obstacles { diamonds: s.diamonds, dims: s.diamond_dims, hull: s.hull, family })
    }
}

fn svg_out(scene: &SvgScene, path: &Option<PathBuf>) -> Result<(), CliError> {
    if let Some(p) = path {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .map_err(|source| InputError::Write { path: dir.display().to_string(), source })?;
        }
        render_svg(scene, p)?;
    }
    Ok(())
}

fn hull(c: &HullCmd) -> Result<Outcome, CliError> {
    let HullCmd::Build { file, svg } = c;
    let o = obstacles(file)?;
    let rep = check_hull(&o.hull, &o.dims);
    let mut text = format!("{} elements from {} diamonds\n", o.hull.elements.len(), o.diamonds.len());
    for (i, e) in o.hull.elements.iter().enumerate() {
        let _ = writeln!(text, "element {i}: seed level {}, diamonds {:?}", e.seed_level, e.provenance);
    }
    let _ = writeln!(text, "hull properties: {}", if rep.ok() { "hold" } else { "FAIL" });
    svg_out(&hull_scene(&o.hull, &o.diamonds), svg)?;
    let json = json!({
        "elements": o.hull.elements,
        "wide_merges": rep.wide_merges,
        "oversized": rep.oversized,
        "overlapping": rep.overlapping,
        "max_run": QStr(rep.max_run.clone()),
        "run_bound": QStr(rep.run_bound.clone()),
        "ok": rep.ok(),
    });
    Ok(done(rep.ok(), text, json))
}

fn safe(c: &SafeCmd) -> Result<Outcome, CliError> {
    match c {
        SafeCmd::Query { file, point } => {
            let o = obstacles(file)?;
            let safe = !o.hull.contains(point);
            let text = format!("{} {}\n", point_text(point), if safe { "SAFE" } else { "UNSAFE" });
            Ok(done(true, text, json!({"point": point, "safe": safe})))
        }
        SafeCmd::Path { file, point, extent, svg } => {
            if extent <= &int(0) {
                return Err(CliError::Invalid("--extent must be positive".into()));
            }
            let o = obstacles(file)?;
            match hull_path(&o.hull, &o.dims, point, extent) {
                Ok(path) => {
                    let verified = verify_path(&o.hull, &o.dims, point, &path);
                    let mut text = format!(
                        "{} breakpoints, clearance {}, {}\n",
                        path.points.len(),
                        fmt_q(&path.clearance),
                        if verified { "verified" } else { "NOT verified" }
                    );
                    for p in &path.points {
                        let _ = writeln!(text, "{} {}", fmt_q(&p.x), fmt_q(&p.y));
                    }
                    svg_out(&path_scene(&o.hull, &o.diamonds, point, &path), svg)?;
                    Ok(done(verified, text, json!({"point": point, "path": path, "verified": verified})))
                }
                Err(e) => {
                    Ok(done(false, format!("no safe path: {e}\n"), json!({"point": point, "error": e.to_string()})))
                }
            }
        }
    }
}

fn geom(cli: &Cli, c: &GeomCmd) -> Result<Outcome, CliError> {
    let GeomCmd::Check { file, samples } = c;
    let o = obstacles(file)?;
    let hyp = if o.family.rects.is_empty() {
        check_hypotheses(&o.family.diamonds, &o.family.dims)
    } else {
        check_rect_hypotheses(&o.family.rects, &o.family.dims)
    };
    let rep = check_hull(&o.hull, &o.dims);

    // Seeded probes: random points in the hull's bounding box, widened by
    // one top-level width; every safe one must get a verified path.
    let top = o.dims.last().expect("dims checked");
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let polys: Vec<Point> = o.hull.elements.iter().flat_map(|e| e.region.polygon()).collect();
    let mut probes = Vec::new();
    if let Some(b) = aperiodic::geometry::BBox::of(&polys) {
        let lo = (&b.min.x - &top.w, &b.min.y - &top.h);
        let hi = (&b.max.x + &top.w, &b.max.y + &top.h);
        for _ in 0..*samples {
            let t: (i64, i64) = (rng.gen_range(0..=1 << 20), rng.gen_range(0..=1 << 20));
            let scale = aperiodic::rational::frac(1, 1 << 20);
            let p =
                Point::new(&lo.0 + (&hi.0 - &lo.0) * int(t.0) * &scale, &lo.1 + (&hi.1 - &lo.1) * int(t.1) * &scale);
            if o.hull.contains(&p) {
                continue;
            }
            let ok = hull_path(&o.hull, &o.dims, &p, &top.w).is_ok_and(|path| verify_path(&o.hull, &o.dims, &p, &path));
            probes.push((p, ok));
        }
    }
    let failed: Vec<&Point> = probes.iter().filter(|(_, ok)| !ok).map(|(p, _)| p).collect();
    let ok = hyp.ok() && rep.ok() && failed.is_empty();
    let mut text = String::new();
    let _ = writeln!(text, "hypotheses: {}", if hyp.ok() { "hold" } else { "FAIL" });
    if !hyp.ok() {
        let _ = writeln!(
            text,
            "  dims match {}, sparse {:?}, growth {:?}, slopes {:?}",
            hyp.dims_match, hyp.sparse, hyp.growth, hyp.slopes
        );
    }
    let _ = writeln!(text, "hull properties: {}", if rep.ok() { "hold" } else { "FAIL" });
    let _ = writeln!(
        text,
        "longest covered vertical run {} against {}",
        fmt_sig(&rep.max_run, 6),
        fmt_sig(&rep.run_bound, 6)
    );
    let _ = writeln!(text, "safe probes: {} of {} verified", probes.len() - failed.len(), probes.len());
    let json = json!({
        "hypotheses": hyp,
        "hull_ok": rep.ok(),
        "max_run": QStr(rep.max_run.clone()),
        "run_bound": QStr(rep.run_bound.clone()),
        "probes": probes.len(),
        "failed_probes": failed,
        "ok": ok,
    });
    Ok(done(ok, text, json))
}

/// The first built-in executable profile whose radii match every frame.
fn infer_profile(c: &Certificate) -> Result<Profile, CliError> {
    ["desk1", "desk2", "desk-k2", "wide1"]
        .into_iter()
        .filter_map(Profile::named)
        .find(|p| {
            c.levels.len() <= p.levels.len()
                && c.levels.iter().enumerate().all(|(i, fs)| fs.iter().all(|f| f.r == p.r(i + 1)))
        })
        .ok_or_else(|| CliError::Invalid("no built-in profile matches the certificate; pass --profile".into()))
}

fn profile_for(c: &Certificate, name: &Option<String>) -> Result<Profile, CliError> {
    match name {
        Some(n) => Ok(io::profile(n)?),
        None => infer_profile(c),
    }
}

fn validation_text(v: &ValidationReport) -> String {
    let mut text = String::new();
    for ch in &v.checks {
        let _ = write!(text, "{:<24} {}", ch.name, if ch.ok { "ok" } else { "FAIL" });
        if let Some(ce) = &ch.counterexample {
            let _ = write!(text, ": {ce}");
        }
        text.push('\n');
    }
    for d in &v.density {
        let _ =
            write!(text, "density level {:<10} {} ({} frames)", d.level, if d.ok { "ok" } else { "FAIL" }, d.frames);
        if let Some(g) = &d.first_gap {
            let _ = write!(text, ", uncovered near {}", point_text(g));
        }
        text.push('\n');
    }
    text
}

fn cert(cli: &Cli, c: &CertCmd) -> Result<Outcome, CliError> {
    match c {
        CertCmd::Validate { cert, profile, window } => {
            let p = io::profile(profile)?;
            let c: Certificate = io::read_json(cert)?;
            let v = validate_certificate(&c, &p, window.as_ref());
            let ok = v.ok() && v.dense();
            Ok(done(ok, validation_text(&v), serde_json::to_value(&v).expect("serializable")))
        }
        CertCmd::Build { profile, window, svg } => {
            let p = io::profile(profile)?;
            let path = cli.out.as_ref().ok_or(CliError::NoOut("cert build"))?;
            match build_dense_certificate(&p, window) {
                Ok(c) => {
                    io::write_json(path, &c)?;
                    svg_out(&certificate_scene(&c, &p, Some(window)), svg)?;
                    let counts: Vec<usize> = c.levels.iter().map(|l| l.len()).collect();
                    let text = format!("wrote {} with frames per level {counts:?}\n", path.display());
                    Ok(done(true, text, json!({"out": path, "frames": counts})))
                }
                Err(e) => Ok(done(false, format!("build failed: {e}\n"), json!({"error": e.to_string()}))),
            }
        }
        CertCmd::Config { cert, profile, budget } => {
            let c: Certificate = io::read_json(cert)?;
            let p = profile_for(&c, profile)?;
            let path = cli.out.as_ref().ok_or(CliError::NoOut("cert config"))?;
            match choose_compatible_config(&c, &p, *budget) {
                Ok(x) => {
                    io::write_json(path, &x)?;
                    let text = format!("wrote {} with {} assignments\n", path.display(), x.assignments().len());
                    Ok(done(true, text, json!({"out": path, "assignments": x.assignments().len()})))
                }
                Err(e) => {
                    Ok(done(false, format!("no compatible configuration: {e}\n"), json!({"error": e.to_string()})))
                }
            }
        }
        CertCmd::Compat { cert, config, budget, profile } => {
            let c: Certificate = io::read_json(cert)?;
            let x: Configuration = io::read_json(config)?;
            let p = profile_for(&c, profile)?;
            match compatible(&x, &c, &p, *budget) {
                Ok(rep) => {
                    let mut text = String::new();
                    for f in &rep.frames {
                        let _ = writeln!(text, "{}: {}", f.frame, f.result.label());
                    }
                    let _ = writeln!(text, "{}", if rep.compatible() { "COMPATIBLE" } else { "NOT COMPATIBLE" });
                    Ok(done(rep.compatible(), text, serde_json::to_value(&rep).expect("serializable")))
                }
                Err(e) => Ok(done(false, format!("NOT COMPATIBLE: {e}\n"), json!({"error": e.to_string()}))),
            }
        }
        CertCmd::Extract { cert, config, n, profile } => {
            let c: Certificate = io::read_json(cert)?;
            let x: Configuration = io::read_json(config)?;
            let p = profile_for(&c, profile)?;
            match aperiodicity_extract(&x, &c, &p, *n) {
                Ok((u, v)) => {
                    let cells = [u, v].map(|s| (s, symbol_id(&x.symbol(s))));
                    let confirmed = aperiodic_pair_in(cells, *n as u64).is_some();
                    let text = format!("pair {} {} (confirmed: {confirmed})\n", site_text(&u), site_text(&v));
                    Ok(done(confirmed, text, json!({"n": n, "pair": [[u.x, u.y], [v.x, v.y]], "confirmed": confirmed})))
                }
                Err(e) => Ok(done(false, format!("no pair: {e}\n"), json!({"n": n, "error": e.to_string()}))),
            }
        }
    }
}

/// A symbol as one integer: three states per component.
fn symbol_id(sym: &[Option<aperiodic::game::Coin>]) -> u32 {
    sym.iter().fold(0u32, |acc, c| {
        let d = match c {
            None => 0,
            Some(aperiodic::game::Coin::H) => 1,
            Some(aperiodic::game::Coin::T) => 2,
        };
        acc.wrapping_mul(3).wrapping_add(d)
    })
}

fn glue_cmd(cli: &Cli, c: &GlueCmd) -> Result<Outcome, CliError> {
    let GlueCmd::Run { x, cx, y, cy, region, profile, window, budget, svg } = c;
    let dir = out_dir(cli, "glue run")?.to_path_buf();
    let p = io::profile(profile)?;
    let (xv, yv): (Configuration, Configuration) = (io::read_json(x)?, io::read_json(y)?);
    let (cxv, cyv): (Certificate, Certificate) = (io::read_json(cx)?, io::read_json(cy)?);
    let e_y = io::read_region(region)?;
    let inputs = vec![x.clone(), cx.clone(), y.clone(), cy.clone(), region.clone()];
    manifest(cli, "glue run", inputs, Some(profile.clone()), Some(window), Some(*budget as u64))?.write()?;
    match glue(&xv, &cxv, &yv, &cyv, &e_y, &p, window, *budget) {
        Ok(out) => {
            io::write_json(&dir.join("z.json"), &out.z)?;
            io::write_json(&dir.join("c.json"), &out.c)?;
            io::write_json(&dir.join("log.json"), &out.log)?;
            io::write_json(&dir.join("report.json"), &out.report)?;
            if *svg {
                render_svg(&glue_scene(&out.setup, &out.c, &p, &out.log, window), &dir.join("glue.svg"))?;
            }
            let count = |f: fn(&LogEntry) -> bool| out.log.iter().filter(|e| f(e)).count();
            let mut text = format!(
                "n0 = {}, {} frames, {} admitted, {} relocated witnesses, {} writes, {} skipped, {} shifted\n",
                out.report.n0,
                out.report.frames,
                count(|e| matches!(e, LogEntry::Admit { .. })),
                count(|e| matches!(e, LogEntry::Relocate { .. })),
                out.report.writes,
                out.report.skipped,
                count(|e| matches!(e, LogEntry::Shift { .. })),
            );
            let failures = out.report.failures();
            for f in &failures {
                let _ = writeln!(text, "FAIL {f}");
            }
            let _ = writeln!(text, "{}", if out.report.ok() { "GLUED" } else { "GLUE NOT VERIFIED" });
            Ok(done(out.report.ok(), text, serde_json::to_value(&out.report).expect("serializable")))
        }
        Err(f) => {
            if let Some(s) = &f.state {
                io::write_json(&dir.join("z.json"), &s.z)?;
                io::write_json(&dir.join("c.json"), &s.c)?;
                io::write_json(&dir.join("log.json"), &s.log)?;
            }
            let json = json!({"error": f.error.to_string()});
            io::write_json(&dir.join("error.json"), &json)?;
            Ok(done(false, format!("glue failed: {}\n", f.error), json))
        }
    }
}
