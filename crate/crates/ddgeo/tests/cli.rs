use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn ddgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddgeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_writes_record_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("fig2.problem");
    std::fs::copy(data("examples/figure2_no_aux.problem"), &prob).unwrap();
    let o = ddgeo(&[
        "solve",
        "--problem",
        p(&prob),
        "--proposer",
        "enum",
        "--beam",
        "4",
        "--depth",
        "2",
        "--timeout",
        "60",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(line.lines().count(), 1);
    assert!(line.starts_with("solved\tmillis="), "{line}");
    assert!(line.contains("\taux=1"), "{line}");
    let rec = dir.path().join("fig2.problem.record");
    let c = ddgeo(&["check", p(&rec)]);
    assert!(c.status.success(), "{}", stderr(&c));
    assert_eq!(stdout(&c), "ok\trecords=1\n");
}

#[test]
fn solve_without_proposer_is_unsolved() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.record");
    let o = ddgeo(&[
        "solve",
        "--problem",
        p(&data("examples/figure2_no_aux.problem")),
        "--proposer",
        "none",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("unsolved\t"));
    assert!(!out.exists());
}

#[test]
fn solve_with_exec_proposer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.record");
    let cmd = "exec:cat >/dev/null; printf '0.9\\th : coll a d h, perp a d h e\\n'";
    let o = ddgeo(&[
        "solve",
        "--problem",
        p(&data("examples/figure2_no_aux.problem")),
        "--proposer",
        cmd,
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("solved\t"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("<aux>\nx00 h : coll a d h"), "{text}");
}

#[test]
fn stats_lines_per_rule_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddgeo(&[
        "--stats",
        "solve",
        "--problem",
        p(&data("classical/midline.txt")),
        "--proposer",
        "none",
        "--out",
        p(&dir.path().join("r")),
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    let stats: Vec<&str> = s.lines().filter(|l| l.starts_with("stats\t")).collect();
    assert!(!stats.is_empty());
    for l in &stats {
        let f: Vec<&str> = l.split('\t').collect();
        assert_eq!(f.len(), 7, "{l}");
        assert!(
            f[1].starts_with("round=") && f[2].starts_with("rule=") && f[6].starts_with("micros=")
        );
    }
    assert!(s.lines().last().unwrap().starts_with("solved\t"));
}

#[test]
fn generate_shards_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ds");
    let o = ddgeo(&[
        "generate",
        "--n",
        "6",
        "--seed",
        "1",
        "--shard-size",
        "10",
        "--filter-report",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let filter: Vec<&str> = s.lines().filter(|l| l.starts_with("filter\t")).collect();
    assert_eq!(filter.len(), 9);
    assert!(filter.iter().any(|l| l.starts_with("filter\tkeep\t")));
    let summary = s.lines().last().unwrap();
    assert!(summary.starts_with("generated\tseeds=6\t"), "{summary}");
    let manifest = std::fs::read_to_string(out.join("manifest.tsv")).unwrap();
    let n = manifest.lines().count();
    assert!(n > 10, "want more than one shard, got {n} records");
    for (i, line) in manifest.lines().enumerate() {
        let f: Vec<&str> = line.split('\t').collect();
        assert_eq!(f.len(), 4);
        assert_eq!(f[0], format!("shard-{:05}.txt#{}", i / 10, i % 10));
        f[2].parse::<usize>().unwrap();
        f[3].parse::<usize>().unwrap();
    }
    let first = std::fs::read_to_string(out.join("shard-00000.txt")).unwrap();
    assert_eq!(first.matches("\n\n<problem>").count(), 9);
    for i in 0..n.div_ceil(10) {
        let c = ddgeo(&["check", p(&out.join(format!("shard-{i:05}.txt")))]);
        assert!(c.status.success(), "{}", stderr(&c));
    }
}

#[test]
fn check_reports_the_failing_step() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("examples/figure2.record")).unwrap();
    let bad = dir.path().join("bad.record");
    std::fs::write(&bad, text.replace("[018] r53 [017]", "[018] r34 [017]")).unwrap();
    let o = ddgeo(&["check", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(
        e.starts_with("error kind=replay_failed message=record 0: step [018]"),
        "{e}"
    );
}

#[test]
fn errors_are_one_machine_readable_line() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::write(&empty, "").unwrap();
    let garbled = dir.path().join("garbled.problem");
    std::fs::write(&garbled, "a b : ; c : frob a b c ? coll a b c").unwrap();
    let midline = data("classical/midline.txt");
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["check", p(&empty)], "parse"),
        (vec!["check", "/nonexistent/x"], "io"),
        (vec!["solve", "--problem", p(&garbled)], "parse"),
        (
            vec!["solve", "--problem", p(&midline), "--proposer", "magic"],
            "config",
        ),
        (vec!["--tol", "0.5", "check", p(&empty)], "config"),
    ];
    for (args, kind) in cases {
        let o = ddgeo(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e = stderr(&o);
        assert_eq!(e.lines().count(), 1, "{e}");
        assert!(
            e.starts_with(&format!("error kind={kind} message=")),
            "{args:?}: {e}"
        );
    }
}

#[test]
fn bench_match_on_small_figures() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tri.txt"),
        "a b c = triangle a b c\nm = midpoint m a b\nn = midpoint n a c\n",
    )
    .unwrap();
    let o = ddgeo(&["bench-match", p(dir.path()), "--rounds", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.starts_with("figure "));
    assert!(s
        .lines()
        .any(|l| l.split_whitespace().take(2).eq(["tri", "5"])));
    assert!(s.lines().last().unwrap().starts_with("hardware "));
}

#[test]
fn figure_dump_is_seeded() {
    let f = data("examples/figure2.script");
    let a = ddgeo(&["--seed", "5", "figure-dump", p(&f)]);
    let b = ddgeo(&["--seed", "5", "figure-dump", p(&f)]);
    let c = ddgeo(&["--seed", "6", "figure-dump", p(&f)]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    assert_eq!(stdout(&a).lines().count(), 8);
}

#[test]
fn custom_rule_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("one.rules");
    std::fs::write(
        &rules,
        "only : cong O A O B, cong O B O C, cong O C O D => cyclic A B C D\n",
    )
    .unwrap();
    let prob = dir.path().join("p.problem");
    std::fs::write(
        &prob,
        "a b c : ; o : cong o a o b, cong o b o c ; d : cong o d o a ? cyclic a b c d",
    )
    .unwrap();
    let o = ddgeo(&[
        "--rules",
        p(&rules),
        "solve",
        "--problem",
        p(&prob),
        "--proposer",
        "none",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("solved\t"));
    let rec = std::fs::read_to_string(dir.path().join("p.problem.record")).unwrap();
    assert!(rec.contains(" only "), "{rec}");
}

#[test]
fn solve_directory_on_the_pool() {
    let dir = tempfile::tempdir().unwrap();
    let probs = dir.path().join("probs");
    std::fs::create_dir(&probs).unwrap();
    for n in ["midline", "thales", "worked_example"] {
        std::fs::copy(
            data(&format!("classical/{n}.txt")),
            probs.join(format!("{n}.txt")),
        )
        .unwrap();
    }
    let out = dir.path().join("out");
    let o = ddgeo(&[
        "--threads",
        "2",
        "solve",
        "--problem",
        p(&probs),
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("midline.txt\tsolved\t"));
    assert!(lines[1].starts_with("thales.txt\tsolved\t"));
    assert!(lines[2].starts_with("worked_example.txt\tsolved\t"));
    assert!(lines[2].contains("\taux=1"));
    for n in ["midline", "thales", "worked_example"] {
        assert!(out.join(format!("{n}.txt.record")).exists());
    }
}

#[test]
fn filter_report_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ds");
    let o = ddgeo(&[
        "generate",
        "--n",
        "3",
        "--seed",
        "4",
        "--filter-report",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = std::fs::read_to_string(out.join("filter_report.tsv")).unwrap();
    let rows: Vec<&str> = t.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("seed\ttrivial_self\t"));
    assert!(rows[1].starts_with("4\t") && rows[3].starts_with("6\t"));
    let keep: u64 = rows[1..]
        .iter()
        .map(|r| r.rsplit('\t').next().unwrap().parse::<u64>().unwrap())
        .sum();
    let manifest = std::fs::read_to_string(out.join("manifest.tsv")).unwrap();
    assert_eq!(keep as usize, manifest.lines().count());
}

#[test]
fn bench_structured_report() {
    let dir = tempfile::tempdir().unwrap();
    let figs = dir.path().join("figs");
    std::fs::create_dir(&figs).unwrap();
    std::fs::write(figs.join("one.txt"), "a b c = triangle a b c\n").unwrap();
    std::fs::write(figs.join("two.txt"), "a b c d = square a b c d\n").unwrap();
    let rep = dir.path().join("rep.tsv");
    let o = ddgeo(&[
        "--threads",
        "2",
        "bench-match",
        p(&figs),
        "--structured",
        p(&rep),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = std::fs::read_to_string(&rep).unwrap();
    let rows: Vec<&str> = t.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("one\t3\t") && rows[1].ends_with("\ttrue"));
    assert!(rows[2].starts_with("two\t4\t"));
}
