//! Compile and run a small C program against include/welded.h and the
//! static library, proving the header matches the ABI.

use std::path::PathBuf;
use std::process::Command;

fn target_debug_dir() -> PathBuf {
    // test binary sits in target/<profile>/deps
    let mut dir = std::env::current_exe().expect("test binary path");
    dir.pop(); // strip binary name
    if dir.ends_with("deps") {
        dir.pop();
    }
    dir
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "welded.h"

int main(void) {
    WeldedGraph *g = 0;
    if (welded_graph_build(3, 7, &g) != WELDED_OK) return 1;
    if (welded_graph_validate(g) != WELDED_OK) return 2;
    uint64_t count = 0;
    if (welded_graph_vertex_count(g, &count) != WELDED_OK || count != 30) return 3;

    WeldedOracle *o = 0;
    if (welded_oracle_new(g, 1, 42, &o) != WELDED_OK) return 4;
    uint32_t missing = 9;
    if (welded_oracle_missing_color(o, &missing) != WELDED_OK || missing > 2) return 5;
    uint64_t ent = 0, child = 0, back = 0, noedge = 0;
    welded_graph_entrance_label(g, &ent);
    welded_graph_noedge_label(g, &noedge);
    uint32_t live = (missing + 1) % 3;
    if (welded_oracle_query(o, live, ent, &child) != WELDED_OK) return 6;
    if (child == noedge) return 7;
    if (welded_oracle_query(o, live, child, &back) != WELDED_OK || back != ent) return 8;
    uint64_t meter = 0;
    welded_oracle_meter(o, &meter);
    if (meter != 4) return 9;

    double p = -1.0;
    if (welded_column_walk(4, 5.0, 0.01, &p) != WELDED_OK) return 10;
    if (!(p >= 0.0 && p <= 1.0)) return 11;

    welded_oracle_free(o);
    welded_graph_free(g);
    printf("ok %s\n", welded_version());
    return 0;
}
"#;

#[test]
fn c_program_links_against_header_and_staticlib() {
    if Command::new("gcc").arg("--version").output().is_err() {
        eprintln!("skipping: gcc not available");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Make sure the staticlib artifact exists (tests only build the rlib).
    let build = Command::new(env!("CARGO"))
        .args(["build", "-p", "welded-ffi", "--offline"])
        .current_dir(manifest.parent().unwrap().parent().unwrap())
        .status()
        .expect("cargo build");
    assert!(build.success(), "building the staticlib failed");

    let debug = target_debug_dir();
    let staticlib = debug.join("libwelded_ffi.a");
    assert!(staticlib.exists(), "missing {}", staticlib.display());

    let work = std::env::temp_dir().join(format!("welded-c-abi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let source = work.join("smoke.c");
    std::fs::write(&source, C_PROGRAM).unwrap();
    let binary = work.join("smoke");

    let compile = Command::new("gcc")
        .arg(&source)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("gcc runs");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("smoke test runs");
    assert!(
        run.status.success(),
        "smoke test exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    std::fs::remove_dir_all(&work).ok();
}
