use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn golden(name: &str) -> String {
    fs::read_to_string(data("golden").join(name)).unwrap()
}

fn mpobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpobs"))
        .args(args)
        .output()
        .unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn star_matches_golden() {
    let o = mpobs(&["star", &path("refnet_a.mat")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("refnet_star.txt"));
    let o = mpobs(&["star", &path("refnet_a.mat"), "--format", "json"]);
    assert_eq!(stdout(&o), golden("refnet_star.json"));
}

#[test]
fn star_of_eps_is_identity() {
    let dir = std::env::temp_dir().join(format!("mpobs-eps-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let f = dir.join("eps.mat");
    fs::write(&f, "[eps]\n").unwrap();
    let o = mpobs(&["star", f.to_str().unwrap()]);
    assert_eq!(stdout(&o), "[0g0]\n");
    fs::write(&f, "[4g1,oops]\n").unwrap();
    assert_eq!(mpobs(&["star", f.to_str().unwrap()]).status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn transfer_and_check_match_golden() {
    let o = mpobs(&["transfer", &path("refnet.teg")]);
    assert_eq!(stdout(&o), golden("refnet_transfer.txt"));
    let o = mpobs(&["check", &path("refnet.teg")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("refnet_check.txt"));
}

#[test]
fn observe_matches_golden() {
    let o = mpobs(&["observe", &path("refnet.teg")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("refnet_observe.txt"));
    let o = mpobs(&["observe", &path("refnet.teg"), "--format", "json"]);
    assert_eq!(stdout(&o), golden("refnet_observe.json"));
    // exactness is not guaranteed for this output matrix
    assert_eq!(
        mpobs(&["observe", &path("refnet.teg"), "--require-exact"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn observe_exit_codes() {
    let dir = std::env::temp_dir().join(format!("mpobs-obs-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let text = fs::read_to_string(data("refnet.teg")).unwrap();
    let dropped: String = text
        .lines()
        .filter(|l| !l.contains("x3 -> y2"))
        .map(|l| if l.starts_with("output") { "output y1".to_string() } else { l.to_string() } + "\n")
        .collect();
    let f = dir.join("no_y2.teg");
    fs::write(&f, dropped).unwrap();
    let o = mpobs(&["observe", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("prop3_precondition = false"));
    assert_eq!(
        mpobs(&["observe", "/nonexistent/file.teg"]).status.code(),
        Some(2)
    );
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simulate_matches_golden() {
    let o = mpobs(&[
        "simulate",
        &path("refnet.teg"),
        "--u",
        &path("refnet_u_zero.tab"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("refnet_simulate_zero.txt"));
    let args = [
        "simulate",
        &path("refnet.teg"),
        "--u",
        &path("refnet_u_zero.tab"),
        "--w",
        &path("refnet_w_delay.tab"),
    ];
    let mut args = args.to_vec();
    args.extend(["--format", "json"]);
    let o = mpobs(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("refnet_simulate_delay.json"));
}

#[test]
fn simulate_rejects_horizon_mismatch() {
    let dir = std::env::temp_dir().join(format!("mpobs-sim-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let w = dir.join("w.tab");
    fs::write(&w, "k w1 w2 w3\n0 eps eps eps\n").unwrap();
    let o = mpobs(&[
        "simulate",
        &path("refnet.teg"),
        "--u",
        &path("refnet_u_zero.tab"),
        "--w",
        w.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = mpobs(&[
        "simulate",
        &path("refnet.teg"),
        "--u",
        &path("refnet_u_zero.tab"),
        "--horizon",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_flag_writes_file_and_runs_are_repeatable() {
    let dir = std::env::temp_dir().join(format!("mpobs-out-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let out = dir.join("lx.json");
    let o = mpobs(&[
        "observe",
        &path("refnet.teg"),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        golden("refnet_observe.json")
    );
    let a = stdout(&mpobs(&[
        "transfer",
        &path("refnet.teg"),
        "--format",
        "json",
    ]));
    let b = stdout(&mpobs(&[
        "transfer",
        &path("refnet.teg"),
        "--format",
        "json",
    ]));
    assert_eq!(a, b);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mpobs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mpobs(&["star"]).status.code(), Some(2));
    assert_eq!(mpobs(&["--help"]).status.code(), Some(0));
}
