//! Compiles a small C program against the generated header and the static
//! library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "holoaut.h"

int main(void) {
    double rot[8] = {0, 0, -1, 0, 1, 0, 0, 0};
    HaMatrix *m = NULL;
    if (ha_matrix_new(rot, &m) != HA_STATUS_OK) return 10;
    double re = 0, im = 0;
    if (ha_mobius_apply(m, 0.0, 2.0, &re, &im) != HA_STATUS_OK) return 11;
    if (re != 0.0 || im != 0.5) return 12;
    if (ha_mobius_apply(m, 0.0, 0.0, &re, &im) != HA_STATUS_POLE) return 13;
    if (ha_last_error_message() == NULL) return 14;
    ha_matrix_free(m);

    char *json = NULL;
    int code = -1;
    if (ha_run("[\"verify-free\", \"--trials\", \"5\"]", &json, &code) != HA_STATUS_OK) return 15;
    if (code != 0 || json == NULL) return 16;
    ha_string_free(json);
    printf("ok\n");
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // CARGO_TARGET_TMPDIR is <target>/tmp; the library sits in <target>/<profile>
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).parent().expect("target dir").to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib_dir = target_dir().join(profile);
    let lib = lib_dir.join("libholoaut_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let work = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_header");
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    let exe = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
