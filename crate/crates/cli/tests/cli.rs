use std::path::Path;
use std::process::{Command, Output};

fn blockmap(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockmap"))
        .args(args)
        .env("BLOCKMAP_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn quad_polynomials_through_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&blockmap(dir.path(), &["coeffs", "--model", "quad", "--what", "mu", "--n", "4"]));
    // m_4 = 2u(3 + 18u + 56u^2 + 112u^3)
    let expected = "n,k,coeff\n0,0,1\n1,0,0\n1,1,2\n2,0,0\n2,1,1\n2,2,8\n3,0,0\n3,1,2\n3,2,12\n3,3,40\n\
                    4,0,0\n4,1,6\n4,2,36\n4,3,112\n4,4,224\n";
    assert_eq!(out, expected);
}

#[test]
fn meander_components_of_order_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&blockmap(dir.path(), &["coeffs", "--model", "meander", "--what", "components", "--n", "2"]));
    assert_eq!(out, "n,k,coeff\n2,1,2\n2,2,2\n");
}

#[test]
fn quad_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&blockmap(dir.path(), &["coeffs", "--model", "quad", "--what", "blocks", "--n", "3"]));
    assert_eq!(out, "n,coeff\n1,2\n2,1\n3,2\n");
    let v = json(&blockmap(dir.path(), &["coeffs", "--model", "quad", "--what", "blocks", "--n", "3", "--format", "json"]));
    assert_eq!(v["rows"][2][1], "2");
    assert_eq!(v["source"], "closed-form");
}

#[test]
fn quad_critical_report_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&blockmap(dir.path(), &["critical", "--model", "quad"]));
    assert_eq!(v["values"]["u_cr"]["exact"], "9/5");
    assert_eq!(v["values"]["g_c_at_u_cr"]["exact"], "25/432");
    assert_eq!(v["exponents"]["gamma_s_prime_exact"], "1/3");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    for (_, val) in v["values"].as_object().unwrap() {
        assert!(val["source"].is_string());
    }
}

#[test]
fn cubic_critical_values() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&blockmap(dir.path(), &["critical", "--model", "cubic"]));
    let u = v["values"]["u_cr"]["value"].as_f64().unwrap();
    let g = v["values"]["g_c_at_u_cr"]["value"].as_f64().unwrap();
    assert!((u - 3.02217).abs() < 1e-5, "{u}");
    assert!((g - 0.034288).abs() < 1e-6, "{g}");
}

#[test]
fn bicubic_without_file_explains_itself() {
    let dir = tempfile::tempdir().unwrap();
    let o = blockmap(dir.path(), &["critical", "--model", "bicubic"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--file"), "{err}");
}

#[test]
fn quad_sweep_shows_the_three_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&blockmap(dir.path(), &["estimate", "--model", "quad", "--u", "1", "--u", "9/5", "--u", "4"]));
    let est: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((est[0] - 2.5).abs() < 1e-3, "{est:?}");
    assert!((est[1] - 5.0 / 3.0).abs() < 0.02, "{est:?}");
    assert!((est[2] - 1.5).abs() < 0.01, "{est:?}");
}

#[test]
fn log_corrected_estimates_at_ucr() {
    let dir = tempfile::tempdir().unwrap();
    let cubic = stdout(&blockmap(dir.path(), &["estimate", "--model", "cubic", "--at-ucr", "--eta", "0.5"]));
    let v: f64 = cubic.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 1.5).abs() < 0.02, "{v}");
    let open = stdout(&blockmap(dir.path(), &["estimate", "--model", "open-path", "--at-ucr", "--eta", "0.25"]));
    let v: f64 = open.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 1.25).abs() < 0.02, "{v}");
}

#[test]
fn profile_with_crosscheck_and_fisher() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let report = dir.path().join("p.json");
    let o = blockmap(
        dir.path(),
        &["profile", "--crosscheck", "--fisher", "--out", csv.to_str().unwrap(), "--report", report.to_str().unwrap()],
    );
    stdout(&o);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,phi,rho,phi_contour"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
    assert!(rows.iter().all(|r| (r[3] - r[1]).abs() < 1e-8));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let delta = v["fisher"]["delta"].as_f64().unwrap();
    assert!((delta - 1.2).abs() <= 0.06, "{delta}");
}

#[test]
fn csv_floats_carry_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&blockmap(dir.path(), &["profile", "--r-min", "1", "--r-max", "2", "--points", "2"]));
    let field = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().to_string();
    let mantissa = field.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{field}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| blockmap(dir.path(), args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["coeffs", "--model", "hexagon", "--what", "mu", "--n", "3"]), Some(1));
    assert_eq!(code(&["coeffs", "--model", "cubic", "--what", "counts", "--n", "13", "--source", "brute-force"]), Some(1));
    assert_eq!(code(&["estimate", "--model", "quad", "--sweep", "2:1:0.1"]), Some(1));
    assert_eq!(code(&["estimate", "--model", "quad", "--sweep", "1:2:0"]), Some(1));
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1\n1 3\n").unwrap();
    assert_eq!(
        code(&["coeffs", "--model", "bicubic", "--what", "counts", "--n", "1", "--file", bad.to_str().unwrap()]),
        Some(2)
    );
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        code(&["critical", "--model", "bicubic", "--file", missing.to_str().unwrap()]),
        Some(2)
    );
    // the tail window beyond r = 14 underflows double precision
    assert_eq!(code(&["profile", "--points", "2", "--fisher", "--fisher-window", "16:24"]), Some(3));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec!["critical", "--model", "meander"],
        vec!["estimate", "--model", "quad", "--sweep", "1:3:0.5"],
        vec!["coeffs", "--model", "cubic", "--what", "two-point", "--n", "8", "--format", "json"],
    ];
    for args in runs {
        assert_eq!(blockmap(dir.path(), &args).stdout, blockmap(dir.path(), &args).stdout, "{args:?}");
    }
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        stdout(&blockmap(dir.path(), &["estimate", "--model", "cubic", "--at-ucr", "--eta", "0.5", "--report", p]));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn cached_tables_match_recomputed_ones() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = ["coeffs", "--model", "cubic", "--what", "mu", "--n", "9", "--source", "brute-force"];
    let fresh = stdout(&blockmap(&cache, &args));
    let files = cache_files(&cache);
    assert_eq!(files.len(), 1);
    let stored = std::fs::read(&files[0]).unwrap();
    let warm = stdout(&blockmap(&cache, &args));
    assert_eq!(fresh, warm);
    assert_eq!(std::fs::read(&files[0]).unwrap(), stored);
    let uncached = Command::new(env!("CARGO_BIN_EXE_blockmap")).args(["--no-cache"]).args(args).output().unwrap();
    assert_eq!(stdout(&uncached), fresh);

    // a tampered entry fails its checksum and is recomputed
    let text = String::from_utf8(stored.clone()).unwrap().replace("\n9 ", "\n9 1");
    assert_ne!(text.as_bytes(), &stored[..]);
    std::fs::write(&files[0], text).unwrap();
    assert_eq!(stdout(&blockmap(&cache, &args)), fresh);
    assert_eq!(std::fs::read(&files[0]).unwrap(), stored);

    // the closed-form route agrees with the brute-force table
    let closed = ["coeffs", "--model", "cubic", "--what", "mu", "--n", "9"];
    assert_eq!(stdout(&blockmap(&cache, &closed)), fresh);
}
