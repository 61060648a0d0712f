use std::path::Path;

use hermitex::spaces::{classify, Order};
use hermitex::tensor::tensor;
use hermitex::{Complex, Expansion, MultiIndex};
use hermitex_cli::cli::run_with;
use hermitex_cli::ExpansionFile;
use proptest::prelude::*;

struct Ran {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_capped(args: &[&str], cap: Option<usize>) -> Ran {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(std::iter::once("hermitex").chain(args.iter().copied()), cap, &mut out, &mut err);
    Ran { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn run(args: &[&str]) -> Ran {
    run_capped(args, None)
}

fn value<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{report}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn analyze_hermite_gives_single_unit_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h3.hexp");
    let r = run(&["analyze", "hermite:3", "-N", "8", "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let f = ExpansionFile::read(&out).unwrap().expansion;
    assert_eq!(f, Expansion::basis(&[3].into()).with_degree(8));
    assert!(dir.path().join("h3.csv").exists());
}

#[test]
fn analyze_gaussian_parity_and_decay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.hexp");
    let r = run(&["analyze", "gaussian:1", "-N", "40", "--out", p(&out)]);
    assert_eq!(r.code, 0);
    let f = ExpansionFile::read(&out).unwrap().expansion;
    for (alpha, c) in f.iter() {
        if alpha.order() % 2 == 1 {
            assert!(c.norm() < 1e-12, "{alpha}: {c}");
        }
    }
    // the decay CSV alone determines the fit
    let csv = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let maxima: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(maxima.len(), 41);
    let rebuilt = Expansion::from_fn(1, 40, |a| Complex::new(maxima[a.order()], 0.0));
    match classify(&rebuilt, f64::MIN_POSITIVE).best_order {
        Order::Real(s) => assert!((0.45..=0.55).contains(&s), "{s}"),
        other => panic!("{other}"),
    }
    assert_eq!(value(&r.stdout, "best_order"), "0.5");
}

#[test]
fn analyze_without_out_prints_expansion() {
    let r = run(&["analyze", "hermite:1,1", "-N", "2"]);
    assert_eq!(r.code, 0);
    let f = ExpansionFile::parse(&r.stdout).unwrap().expansion;
    assert_eq!(f.get(&[1, 1].into()), Complex::new(1.0, 0.0));
}

#[test]
fn fubini_on_hermite_functions() {
    let r = run(&["fubini", "hermite:1", "hermite:2", "hermite:1,2"]);
    assert_eq!(r.code, 0);
    assert_eq!(value(&r.stdout, "max_residual"), "0.0000000000000000e0");
    assert_eq!(value(&r.stdout, "direct.re"), "1.0000000000000000e0");
    assert_eq!(value(&r.stdout, "status"), "pass");
}

#[test]
fn fubini_reports_mismatched_dims() {
    let r = run(&["fubini", "hermite:1", "hermite:2", "hermite:1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("E_DIM_MISMATCH"), "{}", r.stderr);
}

#[test]
fn stft_zero_window_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let r = run(&["stft-check", "hermite:0", "zero", "--out", p(&out)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("E_ZERO_WINDOW"));
    let report = std::fs::read_to_string(&out).unwrap();
    assert_eq!(value(&report, "error_code"), "E_ZERO_WINDOW");
    assert_eq!(value(&report, "status"), "error");
}

#[test]
fn stft_routes_agree_and_csv_has_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stft.txt");
    let r = run(&["stft-check", "hermite:1", "hermite:1", "--grid", "8", "--out", p(&out)]);
    assert_eq!(r.code, 0);
    let csv = std::fs::read_to_string(dir.path().join("stft.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 64);
    assert!(csv.starts_with("x,xi,direct_re,direct_im,route_re,route_im\n"));
}

#[test]
fn bargmann_check_passes_and_fails_on_tolerance() {
    let r = run(&["bargmann-check", "hermite:1", "--x0", "-2", "--xi0", "2"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let strict = run(&["bargmann-check", "hermite:1", "--x0", "-2", "--xi0", "2", "--tol", "1e-30"]);
    assert_eq!(strict.code, 2);
    assert_eq!(value(&strict.stdout, "status"), "fail");
}

#[test]
fn bargmann_check_wrong_shift_length() {
    let r = run(&["bargmann-check", "hermite:1,0", "--x0", "1"]);
    assert_eq!(r.code, 1);
}

#[test]
fn conv_rate_on_gaussians_has_no_measurable_rate() {
    // Riemann sums of Gaussians converge faster than any power of ε, so
    // every residual of the default ladder sits at rounding level.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.txt");
    let r = run(&["conv-rate", "hermite:0", "hermite:0", "--out", p(&out)]);
    assert_eq!(r.code, 2);
    let report = std::fs::read_to_string(&out).unwrap();
    assert_eq!(value(&report, "error_code"), "E_DEGENERATE_FIT");
    let csv = std::fs::read_to_string(dir.path().join("conv.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let residual: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(residual < 1e-12, "{line}");
    }
}

#[test]
fn conv_rate_fits_a_rate_for_non_smooth_input() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("tri.dat");
    // triangle on [-1, 1]: the residuals stay above the noise floor and decay algebraically
    std::fs::write(&table, "-1 0\n0 1\n1 0\n").unwrap();
    let spec = format!("table:{}", p(&table));
    let r = run(&["conv-rate", &spec, "rational:cauchy", "--ladder", "0.3,0.2,0.15,0.1", "--radius", "60", "--extent", "2", "--step", "0.37"]);
    let slope: f64 = value(&r.stdout, "slope").parse().unwrap();
    assert!(slope > 0.5, "{}", r.stdout);
    assert_ne!(value(&r.stdout, "status"), "error");
}

#[test]
fn conv_rate_ladder_validation() {
    let r = run(&["conv-rate", "hermite:0", "hermite:0", "--ladder", "0.1,0.2,0.05,0.025"]);
    assert_eq!(r.code, 1);
    let r = run(&["conv-rate", "hermite:0", "hermite:0", "--ladder", "0.2,0.1,0.05"]);
    assert_eq!(r.code, 1);
}

#[test]
fn tensor_writes_product_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, out) = (dir.path().join("a.hexp"), dir.path().join("b.hexp"), dir.path().join("ab.hexp"));
    let fa = hermitex_cli::function_spec::random_expansion(1, 1, 3);
    let fb = hermitex_cli::function_spec::random_expansion(2, 2, 2);
    ExpansionFile::new(fa.clone()).write(&a).unwrap();
    ExpansionFile::new(fb.clone()).write(&b).unwrap();
    let r = run(&["tensor", p(&a), p(&b), "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(ExpansionFile::read(&out).unwrap().expansion, tensor(&fa, &fb).unwrap());
    assert_eq!(value(&r.stdout, "block_dims"), "1,2");
}

#[test]
fn classify_reports_order() {
    let r = run(&["classify", "gaussian:1"]);
    assert_eq!(r.code, 0);
    assert_eq!(value(&r.stdout, "class"), "function_class");
    let r = run(&["classify", "hermite:4"]);
    assert_eq!(value(&r.stdout, "class"), "finite_expansion");
}

#[test]
fn seminorm_of_gaussian() {
    let r = run(&["seminorm", "gaussian:1", "-N", "32", "--alpha-max", "2", "--beta-max", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: f64 = value(&r.stdout, "value").parse().unwrap();
    assert!((v - 1.0).abs() < 1e-6, "{v}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).code, 1);
    assert_eq!(run(&["analyze"]).code, 1);
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["analyze", "sinc:1"]).code, 1);
    assert!(run(&["analyze", "sinc:1"]).stderr.contains("E_UNKNOWN_FUNCTION_SPEC"));
    assert_eq!(run(&["analyze", "hermite:1", "--tol", "0"]).code, 1);
    assert_eq!(run(&["analyze", "hermite:1", "--seed", "zz"]).code, 1);
    assert_eq!(run(&["analyze", "hermite:1", "--quad-nodes", "0"]).code, 1);
    assert_eq!(run(&["classify", "/nonexistent/x.hexp"]).code, 1);
}

#[test]
fn help_and_version_exit_zero() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("conv-rate"));
    assert_eq!(run(&["--version"]).code, 0);
}

#[test]
fn degree_cap_is_enforced() {
    let r = run_capped(&["analyze", "gaussian:1", "-N", "11"], Some(10));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("E_DEGREE_CAP"));
    assert_eq!(run_capped(&["analyze", "gaussian:1", "-N", "10"], Some(10)).code, 0);
    assert_eq!(run_capped(&["tensor", "hermite:6", "hermite:6"], Some(10)).code, 1);
}

#[test]
fn degree_cap_from_environment() {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_hermitex"))
        .args(["analyze", "hermite:2", "-N", "30"])
        .env(hermitex_cli::MAX_DEGREE_ENV, "20")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_hermitex"))
        .args(["analyze", "hermite:2", "-N", "3"])
        .env(hermitex_cli::MAX_DEGREE_ENV, "many")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn seed_is_recorded_and_changes_random_inputs() {
    let a = run(&["fubini", "random:1,3", "random:1,3", "random:2,6", "--seed", "1"]);
    let b = run(&["fubini", "random:1,3", "random:1,3", "random:2,6", "--seed", "2"]);
    assert_eq!(value(&a.stdout, "seed"), "1");
    assert_ne!(value(&a.stdout, "direct.re"), value(&b.stdout, "direct.re"));
    let default = run(&["fubini", "random:1,3", "random:1,3", "random:2,6"]);
    assert_eq!(value(&default.stdout, "seed"), "24301");
}

#[test]
fn reports_repeat_byte_for_byte() {
    let args = ["classify", "random:2,12", "--seed", "0x5EED"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn file_round_trip_is_bit_exact(dim in 1usize..=3, degree in 0usize..=6, seed in any::<u64>(), values in prop::collection::vec(finite(), 2)) {
        let mut f = hermitex_cli::function_spec::random_expansion(seed, dim, degree);
        f.set(&MultiIndex::zero(dim), Complex::new(values[0], values[1]));
        let back = ExpansionFile::parse(&ExpansionFile::new(f.clone()).to_text()).unwrap().expansion;
        prop_assert_eq!(back.dim(), dim);
        prop_assert_eq!(back.degree(), degree);
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn record_order_does_not_matter(seed in any::<u64>(), degree in 0usize..=5) {
        let f = hermitex_cli::function_spec::random_expansion(seed, 2, degree);
        let text = ExpansionFile::new(f.clone()).to_text();
        let mut lines: Vec<&str> = text.lines().collect();
        lines[1..].reverse();
        let back = ExpansionFile::parse(&lines.join("\n")).unwrap().expansion;
        prop_assert_eq!(back, f);
    }
}
