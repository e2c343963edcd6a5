use std::path::Path;
use std::process::Command;

const PROGRAM: &str = r#"
#include "lampwalk.h"
int main(void) {
    LwKernel *k = NULL;
    double rho = 0.0, err = 0.0;
    if (lw_kernel_new("biased:0.7", &k) != LW_STATUS_OK) return 1;
    LwStatus s = lw_spectral_radius(k, 400, &rho, &err);
    lw_kernel_free(k);
    return s == LW_STATUS_OK ? 0 : 2;
}
"#;

#[test]
fn header_compiles_as_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("lampwalk.h").exists());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let Ok(out) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
