//! Builds a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "jamsec.h"

int main(void) {
    JamsecScenario *s = jamsec_scenario_new_default();
    JamsecDerived d;
    if (jamsec_derived(s, &d) != JAMSEC_STATUS_OK) return 10;
    if (fabs(d.rho_j - 2.56e-7) > 1e-18) return 11;

    if (jamsec_scenario_set(s, "jammer_antennas", "1") != JAMSEC_STATUS_OK) return 12;
    JamsecOptimum o;
    if (jamsec_optimize(s, &o) != JAMSEC_STATUS_OK) return 13;
    if (o.region != JAMSEC_REGION_D1) return 14;

    if (jamsec_scenario_set(s, "bogus", "1") != JAMSEC_STATUS_INVALID_ARGUMENT) return 15;
    if (jamsec_last_error() == NULL) return 16;

    JamsecThroughput t;
    if (jamsec_throughput(s, 10.0, 1.0, &t) != JAMSEC_STATUS_OK) return 17;
    printf("%.6f %.6f %s\n", o.pi, t.p_so, jamsec_version());
    jamsec_scenario_free(s);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<this test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libjamsec_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("main.c");
    let bin = work.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();

    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());

    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = stdout.split_whitespace().collect();
    assert_eq!(fields[0], "0.012593");
    assert_eq!(fields[1], "0.010000");
}
