use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;

use divergent_core::{euler_exact, EulerMethod};

fn divergent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divergent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn truncate_writes_csv_table() {
    let o = divergent(&["truncate", "--x", "0.1", "--k-max", "20", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("k,partial_sum_re,partial_sum_im,bound,actual_error,remainder_integral")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert!(r[4] <= r[3] + 1e-10, "error above bound in row {r:?}");
    }
}

#[test]
fn borel_sum_json_matches_exact_solution() {
    let o = divergent(&["borel-sum", "--x", "0.1", "--theta", "0", "--order", "24"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = Complex64::new(v["value"][0].as_f64().unwrap(), v["value"][1].as_f64().unwrap());
    let exact = euler_exact(Complex64::new(0.1, 0.0), EulerMethod::Laplace, 1e-13)
        .unwrap()
        .value;
    assert!((value - exact).norm() < 1e-8, "{value} vs {exact}");
    assert_eq!(v["pade_order"], serde_json::json!([12, 12]));
}

#[test]
fn resonant_unfolding_is_a_runtime_error() {
    let o = divergent(&["unfold", "--eps", "0.0625", "--g", "x"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("resonance") && err.contains("= 2"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn unfolding_reports_connection_coefficient() {
    let o = divergent(&["unfold", "--eps", "0.04", "--g", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c2 = Complex64::new(v["C2"][0].as_f64().unwrap(), v["C2"][1].as_f64().unwrap());
    assert!(c2.norm() > 1.0 && v["fit_residual"].as_f64().unwrap() < 1e-8);

    // the forcing that makes the solution analytic at both points
    let o = divergent(&["unfold", "--eps", "0.04", "--g", "x + x^2 - eps", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap())
        .collect();
    assert!(row[3] < 1e-8, "|C2| = {}", row[3]);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["sweep", "--eps", "0.03,0.04,0.05", "--g", "x"][..],
        &["axioms", "--format", "json"][..],
        &["euler-table", "--steps", "4", "--format", "json"][..],
    ] {
        let (a, b) = (divergent(args), divergent(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn axiom_report_records_its_seed() {
    let o = divergent(&["axioms", "--format", "json", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn invalid_arguments_exit_with_two() {
    for args in [
        &["truncate", "--x", "0.1", "--bogus"][..],
        &["truncate", "--x", "2"][..],
        &["unfold", "--eps", "-1"][..],
        &["unfold", "--eps", "0.04", "--g", "sin(x)"][..],
        &["borel-sum", "--x", "0.1", "--tol", "0"][..],
        &["sweep", "--eps-min", "0.2", "--eps-max", "0.1"][..],
        &["borel-sum", "--x", "0.1", "--g", "x - eps"][..],
    ] {
        let o = divergent(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn stokes_reports_singularity_and_jump() {
    let o = divergent(&["stokes", "--order", "20", "--jump-x", "-0.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["singularities"].as_array().unwrap().len(), 1);
    let jump = v["jump"]["value"][1].as_f64().unwrap().abs();
    let expected = 2.0 * std::f64::consts::PI * (-10f64).exp();
    assert!((jump - expected).abs() < 1e-5 * expected);
}

#[test]
fn series_file_and_output_file() {
    let dir = std::env::temp_dir().join(format!("divergent-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = dir.join("g.json");
    std::fs::write(&g, r#"{"offset": 0, "re": [0, 1], "im": [0, 0], "label": "x"}"#).unwrap();
    let out = dir.join("sum.json");
    let o = divergent(&[
        "borel-sum",
        "--x",
        "0.2",
        "--g-file",
        g.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // g = x is the Euler equation itself
    let exact = euler_exact(Complex64::new(0.2, 0.0), EulerMethod::Laplace, 1e-13)
        .unwrap()
        .value;
    assert!((v["value"][0].as_f64().unwrap() - exact.re).abs() < 1e-8);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn help_describes_equations() {
    for (cmd, formula) in [
        ("unfold", "(x^2 - eps) y' + y = g(x)"),
        ("truncate", "k! x^(k+1)"),
        ("borel-sum", "x^2 y' + y = x"),
        ("euler-table", "int_0^inf e^(-zeta/x)/(1+zeta) dzeta"),
    ] {
        let o = divergent(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(formula), "{cmd}");
    }
}
