use std::path::PathBuf;
use std::process::Command;

const SOURCE: &str = r#"
#include <stdio.h>
#include "hyperctl.h"

int main(void) {
    HcModel *m = NULL;
    if (hc_model_gas(1.0, 2.0, &m) != HC_STATUS_OK) return 10;
    double ul[2] = {1.0, 0.0}, ur[2] = {0.95, 0.02}, sigma[2];
    if (hc_riemann_solve(m, ul, ur, 2, sigma) != HC_STATUS_OK) return 11;
    double breaks[1] = {0.5}, values[4] = {1.0, 0.0, 0.95, 0.02};
    HcSimulation *s = NULL;
    if (hc_sim_new(m, 0.0, 1.0, 1, breaks, values, 0.01, &s) != HC_STATUS_OK) return 12;
    hc_model_free(m);
    if (hc_sim_advance(s, 0.2) != HC_STATUS_OK) return 13;
    printf("%.6f %.6f %zu\n", sigma[0], sigma[1], hc_sim_front_count(s));
    hc_sim_free(s);
    HcStatus bad = hc_model_gas(1.0, 0.5, &m);
    char msg[256];
    hc_last_error(msg, sizeof msg);
    return bad == HC_STATUS_OK || msg[0] == 0 ? 14 : 0;
}
"#;

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = target_dir().join("libhyperctl_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, SOURCE).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let st = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let parts: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(parts.len(), 3);
    assert_ne!(parts[2], "0");
}
