use std::path::Path;
use std::process::{Command, Output};

fn sqt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqt"))
        .args(args)
        .output()
        .expect("spawn sqt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn small_train(out: &Path) -> Output {
    sqt(&[
        "train",
        "--env",
        "point-mass",
        "--algo",
        "sqt",
        "--alpha",
        "0.2",
        "--n-networks",
        "3",
        "--operator",
        "wminmax",
        "--lambda",
        "0.75",
        "--seeds",
        "0..1",
        "--steps",
        "1500",
        "--hidden",
        "16,16",
        "--batch-size",
        "16",
        "--eval-interval",
        "500",
        "--eval-episodes",
        "2",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn bias_writes_one_row_per_seed() {
    let o = sqt(&["bias", "--mdp", "max-bias", "--algo", "q", "--seeds", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,algo,deviation,suboptimal_flag"));
    assert_eq!(lines.count(), 100);
}

#[test]
fn bias_summary_flags_directions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bias.csv");
    let o = sqt(&[
        "bias",
        "--mdp",
        "max-bias",
        "--algo",
        "q,double_q",
        "--seeds",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = stdout(&o);
    let line = |name: &str| {
        summary
            .lines()
            .find(|l| l.starts_with(&format!("{name}:")))
            .unwrap_or_else(|| panic!("no line for {name} in {summary}"))
            .to_string()
    };
    assert!(line("q").ends_with("over-biased"));
    assert!(!line("double_q").ends_with("over-biased"));
    let rows = std::fs::read_to_string(&out).unwrap();
    assert_eq!(rows.lines().count(), 201);
}

#[test]
fn unknown_algo_is_a_usage_error() {
    let o = sqt(&["bias", "--mdp", "max-bias", "--algo", "unknown"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("unknown"));
    assert!(err.contains("Usage:"));

    let o = sqt(&[
        "train",
        "--env",
        "point-mass",
        "--algo",
        "ppo",
        "--out",
        "x.csv",
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage:"));
}

#[test]
fn missing_subcommand_fails() {
    let o = sqt(&[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage:"));
}

#[test]
fn train_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let oa = small_train(&a);
    assert!(oa.status.success(), "{}", stderr(&oa));
    assert!(small_train(&b).status.success());
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.summary.csv")).unwrap(),
        std::fs::read(dir.path().join("b.summary.csv")).unwrap()
    );
    let text = String::from_utf8(text).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("seed,step,eval_return,mean_penalty,critic_loss")
    );
    // 2 seeds x 3 evaluations
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn train_reads_config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("run.csv");
    std::fs::write(
        &cfg,
        "env = pendulum\nalgo = td3\nsteps = 400\nhidden = 8,8\nbatch_size = 8\nwarmup_steps = 100\neval_interval = 200\neval_episodes = 1\nseeds = 5\n",
    )
    .unwrap();
    let o = sqt(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("5,200,"));
}

#[test]
fn train_without_output_fails() {
    let o = sqt(&["train", "--env", "point-mass", "--steps", "10"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("output"));
}

#[test]
fn compare_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("sqt.csv");
    let b = dir.path().join("td7.csv");
    std::fs::write(
        &a,
        "env,algo,seed,max_snapshot\nHumanoid-v2,sqt,0,8144.7\nWalker2d-v2,sqt,0,7121.8\nAnt-v2,sqt,0,8906.2\n",
    )
    .unwrap();
    std::fs::write(
        &b,
        "env,algo,seed,max_snapshot\nHumanoid-v2,td7,0,6783.7\nWalker2d-v2,td7,0,6058.9\nAnt-v2,td7,0,8300.6\n",
    )
    .unwrap();
    let o = sqt(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    for want in ["+20.1%", "+17.5%", "+7.3%", "+44.9%"] {
        assert!(table.contains(want), "{want} missing from\n{table}");
    }
}

#[test]
fn compare_rejects_wrong_schema() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    std::fs::write(&a, "x,y\n1,2\n").unwrap();
    let o = sqt(&["compare", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("format error"));
}
