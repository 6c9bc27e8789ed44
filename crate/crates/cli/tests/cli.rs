use std::process::Command;

fn treestep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treestep"))
}

const SMALL: &[&str] = &[
    "--nt", "4", "--nu", "4", "--snr", "0:5:10", "--channels", "8", "--vectors", "4", "--seed", "3",
];

#[test]
fn sweep_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ber.csv");
    let status = treestep()
        .arg("sweep")
        .args(SMALL)
        .args(["--precoders", "zf,rzf,treestep", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());

    let records = treestep::harness::read_csv(&path).unwrap();
    assert_eq!(records.len(), 9);
    assert_eq!(records[0].precoder.as_str(), "zf");
    assert_eq!(records[8].precoder.as_str(), "treestep");
    assert_eq!(records[8].snr_db, 10.0);
    for r in &records {
        assert_eq!(r.bits_total, 8 * 4 * 4 * 2);
    }
}

#[test]
fn stdout_formats() {
    let run = |format: &str| {
        let out = treestep()
            .arg("sweep")
            .args(SMALL)
            .args(["--precoders", "fse_mod,treestep", "--format", format])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };

    let csv = run("csv");
    assert!(csv.starts_with("precoder,snr_db,nt,nu,mod_order,L,V,K,"));
    assert_eq!(csv.lines().count(), 7);

    let json: serde_json::Value = serde_json::from_str(&run("json")).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 6);

    let plot = run("plotdat");
    assert_eq!(plot.split("\n\n").count(), 2);
    assert!(plot.starts_with("# fse_mod nt=4 nu=4 mod=4 L=2 V=1 K=0 C_f=9"));
}

#[test]
fn same_seed_same_bytes_across_workers() {
    let run = |workers: &str| {
        treestep()
            .arg("sweep")
            .args(SMALL)
            .args(["--precoders", "rzf,fse,treestep", "--early-abort", "off", "--workers", workers])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn param_study_grid() {
    let out = treestep()
        .arg("param-study")
        .args(SMALL)
        .args(["--grid", "1,1,0;2,1,0;1,1,2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    // first SNR only; C_f = (K+1)(2V+1)^L
    assert!(rows[0].starts_with("treestep,0.0,4,4,4,1,1,0,"));
    assert!(rows[1].ends_with(",9"));
    assert!(rows[2].ends_with(",9"));
}

#[test]
fn verify_passes() {
    let out = treestep().args(["verify", "--seed", "11"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("14/14 checks passed"));
}

#[test]
fn bad_arguments_fail() {
    for args in [
        vec!["sweep", "--precoders", "mmse"],
        vec!["sweep", "--snr", "10:1:0"],
        vec!["sweep", "--format", "xml"],
        vec!["sweep", "--mod", "8"],
        vec!["sweep", "--nu", "8", "--nt", "4"],
        vec!["param-study", "--grid", "1,1"],
        vec!["sweep", "--early-abort", "soon"],
    ] {
        let out = treestep().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
    let out = treestep().args(["sweep", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = treestep().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
