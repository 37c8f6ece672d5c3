//! End-to-end CLI checks: registry listing, CSV emission, determinism of
//! the data table, exit codes on bad input.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emqsim"))
}

#[test]
fn list_prints_the_registry() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["fig2", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6", "fig7", "tablea", "thermal"] {
        assert!(text.contains(name), "missing {name} in: {text}");
    }
}

#[test]
fn run_fig6_writes_deterministic_csv() {
    let dir = std::env::temp_dir().join(format!("emqsim-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.txt");
    std::fs::write(&cfg, "sweep.u_over_omega = 0.01, 0.03, 0.05\n").unwrap();

    let mut contents = Vec::new();
    for pass in ["a", "b"] {
        let out_dir = dir.join(pass);
        let st = bin()
            .args(["run", "fig6", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(st.status.success(), "stderr: {}", String::from_utf8_lossy(&st.stderr));
        contents.push(std::fs::read_to_string(out_dir.join("fig6.csv")).unwrap());
    }
    // identical except the trailing wall-clock line
    let strip = |s: &str| {
        s.lines().filter(|l| !l.starts_with("# wallclock_s")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(&contents[0]), strip(&contents[1]));
    assert!(contents[0].contains("u_over_omega,delta_diag_over_omega,delta_quartic_over_omega"));
    assert!(contents[0].lines().last().unwrap().starts_with("# wallclock_s"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_experiment_exits_one() {
    let out = bin().args(["run", "fig99"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fig5b"), "registry not listed: {err}");
}

#[test]
fn malformed_config_exits_one_with_position() {
    let dir = std::env::temp_dir().join(format!("emqsim-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.txt");
    std::fs::write(&cfg, "system.g_mhz = pear\n").unwrap();
    let out = bin().args(["run", "fig2", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "no position in: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn negative_rate_is_rejected() {
    let dir = std::env::temp_dir().join(format!("emqsim-cli-neg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("neg.txt");
    std::fs::write(&cfg, "system.gamma_tr_hz = -1\n").unwrap();
    let out = bin().args(["run", "fig2", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
