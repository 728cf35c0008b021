//! Acceptance suite: nine criteria, one `PASS`/`FAIL` line each. Exits
//! nonzero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cutcover::flow::{gap_report, verify_flow};
use cutcover::format::InstanceFile;
use cutcover::generate::{random_ecap, random_proper, random_seymour, SizeBounds};
use cutcover::gw::{gw_parity_audit, gw_solve};
use cutcover::harness::{property_harness, Fault, HarnessConfig, HarnessReport};
use cutcover::oracle::{feasibility_bruteforce, multigraph_isomorphic};
use cutcover::planar::{check_multicut, SeymourInstance};
use cutcover::requirements::{minimal_violated, ViolatedSetMethod, DEFAULT_ENUMERATION_CAP};
use cutcover::wgmv::{theorem1_certificate_check, wgmv_half_solve, wgmv_solve};
use cutcover::{EdgeId, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEED: u64 = 1;

type Verdict = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn within(elapsed: Duration, limit: Duration, summary: String) -> Verdict {
    if elapsed <= limit {
        Ok(format!("{summary} in {:.1?}", elapsed))
    } else {
        Err(format!("{summary} but took {:.1?} (limit {limit:?})", elapsed))
    }
}

fn gw_half_integrality() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..500 {
        let (g, f) = random_proper(&mut rng, SizeBounds::SMALL);
        let out = gw_solve(&g, &f).map_err(|e| format!("instance {i}: {e}"))?;
        let duals = &out.growth.duals;
        if let Some((s, y)) = duals.iter().find(|(_, y)| !y.is_half_integral()) {
            return Err(format!("instance {i}: y{s} = {y}"));
        }
        if let Some((e, load)) = duals.overloaded_edges(&g).first() {
            return Err(format!("instance {i}: {e} carries {load}"));
        }
        let dual = duals.objective(&f).unwrap();
        let cost = g.total_cost(&out.solution);
        if Rational::from_integer(cost) > Rational::from_integer(2) * dual {
            return Err(format!("instance {i}: cost {cost} against dual {dual}"));
        }
        if !gw_parity_audit(&out.growth).passed() {
            return Err(format!("instance {i}: parity audit"));
        }
    }
    within(start.elapsed(), Duration::from_secs(30), "500 proper instances".into())
}

fn counterexample_regression() -> Verdict {
    let start = Instant::now();
    let text = std::fs::read_to_string(data("counterexample.json")).map_err(|e| e.to_string())?;
    let (g, f) = InstanceFile::parse(&text).and_then(|x| x.to_cover()).map_err(|e| e.to_string())?;
    let run = wgmv_solve(&g, &f, None).map_err(|e| e.to_string())?;
    let values: Vec<Rational> = run.duals.iter().map(|(_, y)| y).collect();
    let has = |n, d| values.contains(&Rational::new(n, d));
    if !(has(1, 4) && has(3, 4)) {
        return Err(format!("dual values {values:?}"));
    }
    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    within(start.elapsed(), Duration::from_secs(1), format!("plain duals {}", shown.join(", ")))
}

fn half_integral_certificates() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..500 {
        let (g, f) = random_ecap(&mut rng, SizeBounds::SMALL);
        let cert = wgmv_half_solve(&g, &f, None).map_err(|e| format!("instance {i}: {e}"))?;
        let check = theorem1_certificate_check(&g, &f, &cert).map_err(|e| format!("instance {i}: {e}"))?;
        for name in ["half-integral", "dual-feasible", "laminar", "two-approximation", "feasible"] {
            let c = check.clause(name).ok_or(format!("clause {name} missing"))?;
            if !c.passed {
                return Err(format!("instance {i}: {name}: {}", c.detail));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(120), "500 augmentation instances, all four clauses".into())
}

fn harness_properties(report: &HarnessReport, names: &[&str]) -> Verdict {
    let mut runs = 0;
    for name in names {
        let p = report.property(name).ok_or(format!("property {name} missing"))?;
        if p.instances_run == 0 {
            return Err(format!("{name} never ran"));
        }
        if p.failures > 0 {
            let detail = p.witnesses.first().map_or(String::new(), |w| w.detail.clone());
            return Err(format!("{name}: {} failures ({detail})", p.failures));
        }
        runs += p.instances_run;
    }
    Ok(format!("{} properties, {runs} checks", names.len()))
}

fn per_solver(props: &[&str], solvers: &[&str]) -> Vec<String> {
    solvers.iter().flat_map(|s| props.iter().map(move |p| format!("{s}.{p}"))).collect()
}

fn oracle_gap(report: &HarnessReport) -> Verdict {
    let names = per_solver(&["opt-two-approx", "weak-duality"], &["gw", "wgmv", "wgmv-half"]);
    harness_properties(report, &names.iter().map(String::as_str).collect::<Vec<_>>())
}

fn structural_audits(report: &HarnessReport) -> Verdict {
    let names = per_solver(&["forest", "alpha-partition", "labels", "critical-alpha", "degree-bound"], &["wgmv", "wgmv-half"]);
    harness_properties(report, &names.iter().map(String::as_str).collect::<Vec<_>>())
}

fn parity_uniformity(report: &HarnessReport) -> Verdict {
    harness_properties(report, &["wgmv-half.parity-uniformity"])
}

fn seymour_instances() -> Vec<SeymourInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..200).map(|_| random_seymour(&mut rng, SizeBounds::PLANAR)).collect()
}

fn planar_pipeline(instances: &[SeymourInstance]) -> Verdict {
    let start = Instant::now();
    let mut nontrivial = 0;
    for (i, inst) in instances.iter().enumerate() {
        let r = gap_report(inst).map_err(|e| format!("instance {i}: {e}"))?;
        let flow = verify_flow(inst, &r.flow);
        if !flow.passed() || !flow.half_integral {
            return Err(format!("instance {i}: flow {:?}", flow.clauses));
        }
        check_multicut(inst, &r.multicut).map_err(|e| format!("instance {i}: {e}"))?;
        let c = Rational::from_integer(inst.capacity(&r.multicut));
        let f = flow.total;
        if f != r.certificate.duals.total() {
            return Err(format!("instance {i}: flow {f} but dual sum {}", r.dual_sum));
        }
        if !(f <= c && c <= Rational::from_integer(2) * f) {
            return Err(format!("instance {i}: C = {c}, F = {f}"));
        }
        nontrivial += usize::from(f.is_positive());
    }
    within(start.elapsed(), Duration::from_secs(120), format!("200 instances ({nontrivial} with positive flow)"))
}

fn dualization(instances: &[SeymourInstance]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut covers, mut isomorphic) = (0, 0);
    for (i, inst) in instances.iter().enumerate() {
        let r = gap_report(inst).map_err(|e| format!("instance {i}: {e}"))?;
        let g = &r.dual_graph;
        for _ in 0..20 {
            let p = rng.gen_range(0.3..1.0);
            let cover: Vec<EdgeId> = g.edge_ids().filter(|_| rng.gen_bool(p)).collect();
            let feasible = if g.vertex_count() <= DEFAULT_ENUMERATION_CAP {
                feasibility_bruteforce(g, &r.dual_oracle, &cover).map_err(|e| e.to_string())?.is_none()
            } else {
                minimal_violated(&r.dual_oracle, g, &cover, ViolatedSetMethod::EcapStructural)
                    .map_err(|e| e.to_string())?
                    .is_empty()
            };
            if !feasible {
                continue;
            }
            let primal: Vec<EdgeId> = cover.iter().map(|d| r.correspondence.supply_of_dual[d.0]).collect();
            check_multicut(inst, &primal).map_err(|e| format!("instance {i}, cover {cover:?}: {e}"))?;
            covers += 1;
        }
        if let Ok(d) = inst.dual_instance() {
            let dd = d.dual_instance().map_err(|e| format!("instance {i}: {e}"))?;
            if !multigraph_isomorphic(&dd, inst) {
                return Err(format!("instance {i}: double dual not isomorphic"));
            }
            isomorphic += 1;
        }
    }
    if isomorphic == 0 {
        return Err("no bridgeless instance to double-dualize".into());
    }
    Ok(format!("{covers} feasible covers mapped to multicuts, {isomorphic} double duals isomorphic"))
}

fn tampered(cert: &Value) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    let obj = cert.as_object().unwrap();
    for (key, v) in obj {
        let replacement = match key.as_str() {
            "format_version" => Value::from(99),
            "kind" => Value::from("certificat"),
            "algorithm" => Value::from("wgmv"),
            "method" => Value::from("brute-force"),
            "picked_edges" => {
                let mut a = v.as_array().unwrap().clone();
                a.pop();
                Value::from(a)
            }
            "duals" | "reductions" => {
                let mut a = v.as_array().unwrap().clone();
                a.remove(0);
                Value::from(a)
            }
            "cost" => Value::from(v.as_i64().unwrap() + 1),
            "dual_value" | "ratio" => Value::from("1/3"),
            "half_integral" => Value::from(!v.as_bool().unwrap()),
            other => panic!("untested certificate field {other}"),
        };
        let mut c = cert.clone();
        c[key] = replacement;
        out.push((key.clone(), c));
    }
    for i in 0..obj["duals"].as_array().unwrap().len() {
        let mut c = cert.clone();
        c["duals"][i]["value"] = Value::from("1/4");
        out.push((format!("duals[{i}].value"), c));
        let mut c = cert.clone();
        c["duals"][i]["set"] = Value::from(vec![0, 1, 2, 3, 4]);
        out.push((format!("duals[{i}].set"), c));
    }
    for i in 0..obj["reductions"].as_array().unwrap().len() {
        let mut c = cert.clone();
        c["reductions"][i]["edge"] = Value::from(0);
        c["reductions"][i]["set"] = Value::from(vec![0]);
        out.push((format!("reductions[{i}]"), c));
    }
    out
}

fn fault_sensitivity(faulty: &HarnessReport) -> Verdict {
    let half = faulty.property("wgmv-half.half-integral").ok_or("property missing")?;
    if half.failures == 0 {
        return Err("skipping reductions left every dual half-integral".into());
    }
    let bin = env!("CARGO_BIN_EXE_cutcover");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cert_path = dir.path().join("cert.json");
    let instance = data("counterexample.json");
    let status = Command::new(bin)
        .args(["solve", "--algorithm", "wgmv-half"])
        .arg(&instance)
        .arg("-o")
        .arg(&cert_path)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err("solve failed".into());
    }
    let verify = |path: &Path| Command::new(bin).arg("verify").arg(path).arg(&instance).output().unwrap();
    if !verify(&cert_path).status.success() {
        return Err("untampered certificate rejected".into());
    }
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    let cases = tampered(&cert);
    for (field, c) in &cases {
        let path = dir.path().join("tampered.json");
        std::fs::write(&path, serde_json::to_string_pretty(c).unwrap()).unwrap();
        if verify(&path).status.success() {
            return Err(format!("tampering {field} still verifies"));
        }
    }
    Ok(format!(
        "{} of {} augmentation runs non-half-integral without reductions; {} tampered certificates rejected",
        half.failures,
        half.instances_run,
        cases.len()
    ))
}

fn main() {
    let harness = property_harness(HarnessConfig::new(SEED, 500));
    let mut config = HarnessConfig::new(SEED, 500);
    config.fault = Fault::SkipReductions;
    config.shrink = false;
    let faulty = property_harness(config);
    let seymour = seymour_instances();

    let results: Vec<(&str, Verdict)> = vec![
        ("GW half-integrality", gw_half_integrality()),
        ("counterexample regression", counterexample_regression()),
        ("half-integral certificates", half_integral_certificates()),
        ("oracle optimality gap", oracle_gap(&harness)),
        ("structural audits", structural_audits(&harness)),
        ("parity uniformity", parity_uniformity(&harness)),
        ("planar multicut/multiflow pipeline", planar_pipeline(&seymour)),
        ("dualization correctness", dualization(&seymour)),
        ("fault sensitivity", fault_sensitivity(&faulty)),
    ];
    let mut failed = 0;
    for (i, (name, verdict)) in results.iter().enumerate() {
        match verdict {
            Ok(msg) => println!("criterion {} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg}", i + 1);
            }
        }
    }
    if !harness.passed() {
        println!("harness: failing properties {:?}", harness.failing());
    }
    if failed > 0 || !harness.passed() {
        std::process::exit(1);
    }
}
