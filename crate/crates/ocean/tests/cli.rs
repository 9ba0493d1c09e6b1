use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ocean(args: &[&str]) -> Output {
    ocean_with_env(args, &[])
}

fn ocean_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ocean"));
    cmd.args(args).env_remove("OCEAN_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run ocean")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Toy {
    dir: TempDir,
    state: String,
}

impl Toy {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let state = dir.path().join("toy.ocn").display().to_string();
        let out = ocean(&[
            "prep",
            "--pvalues",
            &fixture("toy_pvalues.tsv"),
            "--alpha",
            "0.01",
            "--out",
            &state,
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let summary = String::from_utf8(out.stdout).unwrap();
        assert!(
            summary.starts_with("p=6 q=7 m=42 h=34 cap=43 alpha=0.01"),
            "{summary}"
        );
        Toy { dir, state }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn tdp(&self, extra: &[&str]) -> Output {
        let rows = fixture("toy_rows.gmt");
        let cols = fixture("toy_cols.gmt");
        let mut args = vec![
            "tdp",
            "--state",
            &self.state,
            "--row-sets",
            &rows,
            "--col-sets",
            &cols,
        ];
        args.extend_from_slice(extra);
        ocean(&args)
    }
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn single_pair_over_whole_toy_matrix() {
    let toy = Toy::new();
    let text = stdout(&toy.tdp(&["--row-set", "all_rows", "--col-set", "all_cols"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let f: Vec<&str> = lines[1].split('\t').collect();
    assert_eq!(&f[..6], ["all_rows", "all_cols", "6", "7", "8/42", "3/6"]);
    assert_eq!(f[9], "true");
}

#[test]
fn zero_iterations_reports_shortcut_brackets() {
    let toy = Toy::new();
    let text = stdout(&toy.tdp(&[
        "--row-set",
        "all_rows",
        "--col-set",
        "all_cols",
        "--max-iter",
        "0",
    ]));
    let f: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(f[11], "0");
    for (lower, upper, exact) in [(5, 6, 9), (7, 8, 10)] {
        assert_eq!(f[exact] == "true", f[lower] == f[upper], "{f:?}");
    }
}

#[test]
fn explicit_id_lists() {
    let toy = Toy::new();
    let text = stdout(&ocean(&[
        "tdp",
        "--state",
        &toy.state,
        "--row-ids",
        "V1,V4,nope",
        "--col-ids",
        "W2,W7",
    ]));
    let f: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&f[..4], ["<ids>", "<ids>", "2", "2"]);
}

#[test]
fn scan_is_sorted_and_thread_count_independent() {
    let toy = Toy::new();
    let one = stdout(&ocean_with_env(
        &[
            "tdp",
            "--state",
            &toy.state,
            "--row-sets",
            &fixture("toy_rows.gmt"),
            "--col-sets",
            &fixture("toy_cols.gmt"),
        ],
        &[("OCEAN_THREADS", "1")],
    ));
    let many = stdout(&toy.tdp(&[]));
    assert_eq!(one, many);
    let names: Vec<String> = many
        .lines()
        .skip(1)
        .map(|l| l.split('\t').take(2).collect::<Vec<_>>().join("|"))
        .collect();
    assert_eq!(
        names,
        [
            "all_rows|all_cols",
            "all_rows|left",
            "first_half|all_cols",
            "first_half|left",
            "second_half|all_cols",
            "second_half|left"
        ]
    );
}

#[test]
fn json_lines_mirror_tsv() {
    let toy = Toy::new();
    let tsv = stdout(&toy.tdp(&[]));
    let json = stdout(&toy.tdp(&["--format", "json"]));
    let a = ocean::read_results(tsv.as_bytes(), "tsv").unwrap();
    let b = ocean::read_results(json.as_bytes(), "json").unwrap();
    assert_eq!(a, b);
    assert_eq!(json.lines().count(), 6);
}

#[test]
fn heatmap_from_json_results() {
    let toy = Toy::new();
    let results = toy.path("r.jsonl");
    let out = toy.tdp(&["--format", "json", "--out", results.to_str().unwrap()]);
    assert!(out.status.success());
    let svg_path = toy.path("pair.svg");
    let out = ocean(&[
        "heatmap",
        "--results",
        results.to_str().unwrap(),
        "--metric",
        "pair",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let ratios: Vec<&str> = doc
        .descendants()
        .filter_map(|n| n.attribute("data-ratio"))
        .collect();
    assert_eq!(ratios.len(), 6);
    assert!(ratios.contains(&"8/42"));
}

#[test]
fn exit_codes() {
    let toy = Toy::new();
    let code = |out: Output| out.status.code();
    assert_eq!(
        code(ocean(&[
            "prep",
            "--pvalues",
            &fixture("toy_pvalues.tsv"),
            "--alpha",
            "1.5",
            "--out",
            "x"
        ])),
        Some(1)
    );
    assert_eq!(code(ocean(&["tdp"])), Some(1));
    assert_eq!(code(toy.tdp(&["--row-set", "missing"])), Some(1));
    assert_eq!(
        code(ocean(&[
            "heatmap",
            "--results",
            "r",
            "--metric",
            "rows",
            "--out",
            "x.svg"
        ])),
        Some(1)
    );

    let bad = toy.path("bad.tsv");
    std::fs::write(&bad, "f\tc1\tc2\nr1\t0.5\t1.2\n").unwrap();
    let out = ocean(&[
        "prep",
        "--pvalues",
        bad.to_str().unwrap(),
        "--out",
        toy.path("b.ocn").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside [0, 1]"));

    let truncated = toy.path("cut.ocn");
    let bytes = std::fs::read(&toy.state).unwrap();
    std::fs::write(&truncated, &bytes[..bytes.len() / 2]).unwrap();
    let out = ocean(&[
        "tdp",
        "--state",
        truncated.to_str().unwrap(),
        "--row-ids",
        "V1",
        "--col-ids",
        "W1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));

    let out = ocean(&[
        "tdp",
        "--state",
        toy.path("absent.ocn").to_str().unwrap(),
        "--row-ids",
        "V1",
        "--col-ids",
        "W1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(
        code(ocean_with_env(&["selftest"], &[("OCEAN_THREADS", "zero")])),
        Some(1)
    );
}

#[test]
fn selftest_reports_corrupt_state() {
    let toy = Toy::new();
    let cut = toy.path("cut.ocn");
    let bytes = std::fs::read(&toy.state).unwrap();
    std::fs::write(&cut, &bytes[..40]).unwrap();
    let out = ocean(&["selftest", "--quick", "--state", cut.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(
        report.contains("FAIL state file") && report.contains("checksum"),
        "{report}"
    );
    assert!(report.contains("PASS worked example"));

    let ok = ocean(&["selftest", "--quick", "--state", &toy.state]);
    assert!(ok.status.success());
}

#[test]
fn prep_from_omics_tables() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("ge.tsv");
    let b = dir.path().join("cn.csv");
    std::fs::write(
        &a,
        "sample\tg1\tg2\ns1\t1\t0.5\ns2\t2\t0.1\ns3\t3\t0.9\ns4\t4\t0.3\ns5\t5\t0.2\n",
    )
    .unwrap();
    // Features in rows, samples in a different order.
    std::fs::write(&b, "feature,s5,s4,s3,s2,s1\nb1,10,8,6,4,2\nb2,1,0,1,0,1\n").unwrap();
    let state = dir.path().join("s.ocn");
    let out = ocean(&[
        "prep",
        "--omic-a",
        a.to_str().unwrap(),
        "--omic-b",
        b.to_str().unwrap(),
        "--out",
        state.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "orientation differs between files without the flag"
    );

    std::fs::write(
        &b,
        "sample,b1,b2\ns5,10,1\ns4,8,0\ns3,6,1\ns2,4,0\ns1,2,1\n",
    )
    .unwrap();
    let out = ocean(&[
        "prep",
        "--omic-a",
        a.to_str().unwrap(),
        "--omic-b",
        b.to_str().unwrap(),
        "--out",
        state.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let st = ocean::statefile::load(&state).unwrap();
    assert_eq!(st.row_ids(), ["g1", "g2"]);
    assert_eq!(st.col_ids(), ["b1", "b2"]);
    // g1 and b1 are perfectly correlated: p = 0, category 1.
    assert_eq!(st.categories().get(0, 0), 1);
}

#[test]
fn full_selftest_with_seed() {
    let out = ocean(&["selftest", "--full", "--seed", "7"]);
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{report}");
    assert!(report.contains("PASS null simulation"), "{report}");
}
