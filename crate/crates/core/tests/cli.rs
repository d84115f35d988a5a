use limacon::cli::run;
use serde_json::Value;

fn invoke(args: &str) -> (i32, String, String) {
    let argv = std::iter::once("limacon").chain(args.split_whitespace());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn admissible_example() {
    let (code, out, _) = invoke("admissible --p 2 --N 4");
    assert_eq!(code, 0);
    assert_eq!(json(&out)["admissible"], Value::Bool(true));
}

#[test]
fn admissible_rejection_exits_2() {
    let (code, out, _) = invoke("admissible --p 3 --N 4");
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["admissible"], Value::Bool(false));
    assert_eq!(v["violated_conditions"][0], "P_PLUS_1_DIV_N");
}

#[test]
fn coeffs_example() {
    let (code, out, _) = invoke("coeffs --N 6 --p 2 --tail 0");
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["kappa"]["1"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!((v["kappa"]["2"].as_f64().unwrap() + 1.0 / 6.0).abs() < 1e-12);
    assert!((v["det_Mt"].as_f64().unwrap() + 6.0).abs() < 1e-12);
    assert_eq!(v["residual"].as_array().unwrap().len(), 2);
}

#[test]
fn coeffs_negative_p_and_tail() {
    let (code, out, _) = invoke("coeffs --N 8 --p -3 --tail -0.5,0.25");
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["kappa"]["3"].as_f64().unwrap(), -0.5);
    assert_eq!(v["kappa"]["4"].as_f64().unwrap(), 0.25);
}

#[test]
fn inadmissible_writes_decision_to_stderr() {
    let (code, out, err) = invoke("coeffs --N 6 --p 7");
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(json(&err)["violated_conditions"][0], "P_MINUS_1_DIV_N");

    let (code, _, err) = invoke("verify --N 3 --p 2");
    assert_eq!(code, 2);
    let violated = json(&err)["violated_conditions"].clone();
    assert!(violated
        .as_array()
        .unwrap()
        .contains(&Value::from("N_TOO_SMALL")));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(invoke("coeffs --N 6").0, 1);
    assert_eq!(invoke("nonsense").0, 1);
    assert_eq!(invoke("coeffs --N 8 --p 3 --tail 1").0, 1);
    assert_eq!(invoke("simulate --N 4 --p 2 --dt -1").0, 1);
    assert_eq!(invoke("simulate --N 4 --p 2 --a 0").0, 1);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = invoke("--help");
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn verify_example() {
    let (code, out, _) = invoke("verify --N 4 --p 2 --a 1.2 --b 1 --dt 0.0007669903939428206");
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], Value::Bool(true), "{c}");
    }
    assert!(v["constants"]["drift"].is_object());
}

#[test]
fn verify_failure_exits_3() {
    let (code, out, _) = invoke("verify --N 4 --p 2 --steps 64 --dt 0.1");
    assert_eq!(code, 3);
    assert_eq!(json(&out)["pass"], Value::Bool(false));
}

#[test]
fn collide_example() {
    let (code, out, _) = invoke("collide --N 6 --p 2 --a 1 --b 1");
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["collides"], Value::Bool(true));
    let w = &v["witnesses"][0];
    assert_eq!(w["bodies"][0], 2);
    assert_eq!(w["bodies"][1], 4);
}

#[test]
fn collide_ignores_admissibility() {
    let (code, out, _) = invoke("collide --N 6 --p 7 --a 1 --b 1");
    assert_eq!(code, 0);
    assert!(json(&out)["collides"].is_boolean());
}

#[test]
fn simulate_csv_layout() {
    let (code, out, _) = invoke("simulate --N 4 --p 2 --steps 3");
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,body,x,y,vx,vy");
    assert_eq!(lines.len(), 1 + 4 * 4);
    let mut last = (f64::NEG_INFINITY, 0usize);
    for row in &lines[1..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 6);
        let key = (f[0].parse::<f64>().unwrap(), f[1].parse::<usize>().unwrap());
        assert!(key.0 > last.0 || (key.0 == last.0 && key.1 > last.1));
        last = key;
    }
}

#[test]
fn simulate_engines_agree() {
    let parse = |s: &str| -> Vec<f64> {
        s.lines()
            .skip(1)
            .flat_map(|l| {
                l.split(',')
                    .skip(2)
                    .map(|x| x.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let base = "simulate --N 5 --p 3 --steps 16 --dt 0.005";
    let a = parse(&invoke(&format!("{base} --engine analytic")).1);
    let r = parse(&invoke(&format!("{base} --engine rk4")).1);
    let s = parse(&invoke(&format!("{base} --engine spectral")).1);
    for i in 0..a.len() {
        assert!((a[i] - r[i]).abs() < 1e-6);
        assert!((a[i] - s[i]).abs() < 1e-9);
    }
}

#[test]
fn simulate_json_and_out_file() {
    let path = std::env::temp_dir().join(format!("limacon-sim-{}.json", std::process::id()));
    let cmd = format!(
        "simulate --N 4 --p 2 --steps 2 --format json --out {}",
        path.display()
    );
    let (code, out, _) = invoke(&cmd);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v = json(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn restricted_commands() {
    let (code, out, _) = invoke("restricted --N 6 --p 3");
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["kappa_o"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!((v["kappa_e"].as_f64().unwrap() + 7.0 / 6.0).abs() < 1e-12);
    let (code, _, err) = invoke("restricted --N 6 --p 2");
    assert_eq!(code, 2);
    assert_eq!(json(&err)["violated_conditions"][0], "RESTRICTED_PARITY");
}

#[test]
fn constants_report() {
    let (code, out, _) = invoke("constants --N 4 --p 2 --a 1.2 --b 1");
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["I"].as_f64().unwrap() - 9.76).abs() < 1e-10);
    assert!((v["c"].as_f64().unwrap() - 13.76).abs() < 1e-10);
    assert!((v["K"].as_f64().unwrap() - 10.88).abs() < 1e-10);
    assert!((v["V"].as_f64().unwrap() - 10.88).abs() < 1e-10);
    assert_eq!(v["g"].as_array().unwrap().len(), 2);
    assert!(v["drift"].is_object());
}

#[test]
fn scan_matches_blockset() {
    let (code, out, _) = invoke("scan --p 6 --max-N 20");
    assert_eq!(code, 0);
    let got: Vec<u64> = json(&out)["admissible_N"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    let block = limacon::divisor_blockset(6).unwrap();
    let want: Vec<u64> = (4..=20).filter(|n| !block.contains(n)).collect();
    assert_eq!(got, want);
    assert_eq!(invoke("scan --p 1 --max-N 20").0, 2);
}

#[test]
fn output_is_deterministic() {
    for cmd in [
        "coeffs --N 9 --p 4 --tail 0.1,-0.2",
        "verify --N 5 --p 2 --steps 512 --dt 0.0122718463030851",
        "collide --N 9 --p 4 --a 1 --b 1",
        "simulate --N 4 --p 3 --steps 20",
        "constants --N 6 --p 2",
    ] {
        assert_eq!(invoke(cmd), invoke(cmd), "{cmd}");
    }
}
