use std::path::PathBuf;
use std::process::Command;

/// Compiles a C program against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libktower_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = target.join("ktower_c_smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler runs");
    assert!(status.success());

    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert_eq!(
        stdout,
        "{\"case\":\"case_a\"} {\"k\":2,\"blocks\":[[0,0],[0,2],[1,1]]}\n"
    );
}
