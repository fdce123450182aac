use std::path::PathBuf;
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest_dir().join("include/ilim.h")).unwrap();
    for name in [
        "ilim_grid_new",
        "ilim_grid_free",
        "ilim_flat_corrector",
        "ilim_layer_height",
        "ilim_run_new",
        "ilim_run_criteria",
        "ilim_sweep_run",
        "ilim_last_error_message",
        "typedef struct IlimGrid IlimGrid",
        "ILIM_STATUS_BUFFER_TOO_SMALL = 3",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "ilim.h"

int main(void) {
    IlimGrid *g = NULL;
    if (ilim_grid_new(8, 17, 6.283185307179586, 1.0, 0.0, &g) != ILIM_STATUS_OK) return 1;
    size_t nx = 0, ny = 0;
    ilim_grid_size(g, &nx, &ny);
    if (nx != 8 || ny != 17) return 2;
    double h = 0.0;
    int clamped = 0;
    if (ilim_layer_height(1e-3, 1.0, "constant:0.01", 10.0, &h, &clamped) != ILIM_STATUS_OK) return 3;
    if (fabs(h - 1e-4 * log(1000.0)) > 1e-15) return 4;
    if (ilim_grid_new(0, 17, 1.0, 1.0, 0.0, &g) != ILIM_STATUS_INVALID_ARGUMENT) return 5;
    if (ilim_last_error_message() == NULL) return 6;
    ilim_grid_free(g);
    printf("ok %s\n", ilim_version());
    return 0;
}
"#;

/// Compiles a C client against the generated header and the static library.
#[test]
fn c_client_links_and_runs() {
    let target = manifest_dir().join("../../target/debug");
    let lib = target.join("libilim_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is required");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
