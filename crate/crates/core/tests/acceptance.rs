//! One line per acceptance criterion; run with `-- --nocapture` to see them.

use std::time::{Duration, Instant};

use rdlab::cli;
use rdlab::paperchecks::{find, run_check, CheckReport, RunConfig, Status};
use rdlab::rdengine::{Engine, TABLE_CHARS, TABLE_GROUPS};
use serde_json::Value;

fn run(id: &str) -> CheckReport {
    run_check(find(id).unwrap_or_else(|| panic!("{id} registered")), &RunConfig::default())
}

struct Criterion {
    failures: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { failures: Vec::new() }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.failures.push(what.into());
        }
    }

    fn status(&mut self, r: &CheckReport, want: Status) {
        self.require(r.status == want, format!("{} is {:?}, wanted {:?}: {}", r.id, r.status, want, r.stats));
    }
}

fn criterion_1(c: &mut Criterion) {
    for id in ["prop3.1a.sympl-invariance", "prop3.1b.unit-invariance"] {
        let r = run(id);
        c.status(&r, Status::Pass);
        let sets = r.stats["sets"].as_array().cloned().unwrap_or_default();
        c.require(sets.len() == 4, format!("{id}: {} parameter sets", sets.len()));
        c.require(sets.iter().all(|s| s["words"] == 100), format!("{id}: 100 words per set"));
    }
    let pairs: Vec<(u64, u64)> = run("prop3.1a.sympl-invariance").stats["sets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["m"].as_u64().unwrap(), s["q"].as_u64().unwrap()))
        .collect();
    c.require(pairs == [(1, 2), (1, 3), (2, 2), (2, 3)], format!("symplectic sets {pairs:?}"));
    for id in ["prop3.1a.sympl-invariance.control", "prop3.1b.unit-invariance.control"] {
        let r = run(id);
        c.status(&r, Status::Pass);
        c.require(r.stats["raw_status"] == "fail", format!("{id} raw status"));
        let delta = r.witness["delta"].as_str().unwrap_or("");
        c.require(!delta.is_empty() && delta != "0", format!("{id}: nonzero delta witness"));
    }
}

fn criterion_2(c: &mut Criterion) {
    for id in ["prop3.1a.sympl-smooth", "prop3.1b.unit-smooth"] {
        let r = run(id);
        c.status(&r, Status::Pass);
        for res in r.stats["results"].as_array().cloned().unwrap_or_default() {
            c.require(res["closed_form_partials"] == true, format!("{id}: closed forms {res}"));
            let levels = res["levels"].as_array().cloned().unwrap_or_default();
            c.require(levels.len() == 2, format!("{id}: F_q and F_q^2 covered"));
            c.require(levels.iter().all(|l| l["singular_points"] == 0), format!("{id}: singular points {res}"));
        }
    }
    c.status(&run("prop3.1.smooth.control"), Status::Pass);
}

fn criterion_3(c: &mut Criterion) {
    let r = run("prop3.1b.min-vanish");
    c.status(&r, Status::Pass);
    for res in r.stats["results"].as_array().cloned().unwrap_or_default() {
        c.require(res["degree"] == 5, format!("min vanishing degree {res}"));
        for row in res["ranks"].as_array().cloned().unwrap_or_default() {
            if row["degree"].as_u64().unwrap() <= 4 {
                c.require(row["rank"] == row["monomials"], format!("nontrivial kernel at {row}"));
            }
        }
    }
}

fn criterion_4(c: &mut Criterion) {
    let r = run("lem5.1d.shift-identities");
    c.status(&r, Status::Pass);
    c.require(r.params["n"].as_array().map(|a| a.len()) == Some(14), "n = 3..=16");
    let r = run("rem5.2.cone-condition");
    c.status(&r, Status::Pass);
    c.require(r.params["max_n"] == 64, "n <= 64");
    let r = run("lem5.1d.cone-closure");
    c.status(&r, Status::Pass);
    c.require(r.params["sets"] == serde_json::json!([[7, 7], [8, 2]]), "closure sets");
    let r = run("lem5.1d.cone-closure.control");
    c.status(&r, Status::Pass);
    c.require(r.witness.get("failing_s").is_some(), "control counterexample witness");
}

fn criterion_5(c: &mut Criterion) {
    let r = run("lem5.1a.y123-points");
    c.status(&r, Status::Pass);
    c.require(r.stats["candidates"] == 137257, format!("candidates {}", r.stats["candidates"]));
    c.require(r.stats["vertex_on_y123"] == true, "vertex on Y123");

    let r = run("lem5.1ab.y123-degree-dim");
    c.status(&r, Status::Evidence);
    let y = r.stats["y123_dimension_estimate"].as_f64().unwrap_or(f64::NAN);
    let z = r.stats["z123_dimension_estimate"].as_f64().unwrap_or(f64::NAN);
    c.require((y - 3.0).abs() <= 0.5, format!("dim Y123 estimate {y}"));
    c.require((z - 2.0).abs() <= 0.5, format!("dim Z123 estimate {z}"));
    for s in r.stats["slices"].as_array().cloned().unwrap_or_default() {
        c.require(s["max_proper"].as_u64().is_some_and(|m| m <= 6), format!("slice counts {s}"));
        let trials: u64 = s["histogram"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
        c.require(trials >= 50, format!("{trials} trials"));
    }

    for id in ["lem5.1c.generic-freeness", "prop6.1b.z123-free"] {
        let r = run(id);
        c.status(&r, Status::Evidence);
        c.require(!r.witness.is_null(), format!("{id}: witness point"));
    }
}

fn criterion_6(c: &mut Criterion) {
    for id in ["cor2.2.a6-psl2-9", "thm1.3.weyl-e6", "thm1.3.sp4-3", "thm1.3.su4-2", "grp.classical-orders"] {
        c.status(&run(id), Status::Pass);
    }
    let r = run("grp.central-product");
    c.status(&r, Status::Pass);
    let specs = r.stats["facts"].as_array().map(|f| f.iter().filter(|x| x.get("got").is_some()).count());
    c.require(specs.unwrap_or(0) >= 3, "at least three central products");
}

fn criterion_7(c: &mut Criterion) {
    let mut engine = Engine::default_base();
    engine.derive();
    let table = engine.table(&TABLE_GROUPS, &TABLE_CHARS).expect("table");
    let want = [[2, 2, 1, 2, 2], [3, 3, 2, 2, 2], [4, 3, 4, 4, 4], [3, 2, 2, 2, 3]];
    for (row, w) in table.cells.iter().zip(want) {
        c.require(row.as_slice() == w, format!("row {row:?}, wanted {w:?}"));
    }
    c.require(engine.replay().is_ok(), "replay");
    for g in TABLE_GROUPS {
        for p in TABLE_CHARS {
            c.require(engine.explain(g, p).is_ok(), format!("trace for {g} at {p}"));
        }
    }
    c.status(&run("intro.bound-table"), Status::Pass);
}

fn verify_all_bytes() -> Vec<u8> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(["rdlab", "verify-all", "--seed", "42"], &mut out, &mut err);
    assert_eq!(code, cli::EXIT_OK, "{}", String::from_utf8_lossy(&err));
    out
}

fn criterion_8(c: &mut Criterion) {
    let a = verify_all_bytes();
    let b = verify_all_bytes();
    c.require(a == b, "verify-all output differs between runs");
    let records = a.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count();
    c.require(records >= 20, format!("{records} records"));
    for line in a.split(|&b| b == b'\n').filter(|l| !l.is_empty()) {
        let v: Value = serde_json::from_slice(line).expect("json line");
        c.require(v["status"] != "fail", format!("{} failed", v["id"]));
    }
}

#[test]
fn acceptance() {
    type Check = fn(&mut Criterion);
    let criteria: [(&str, Check, Duration); 8] = [
        ("invariance", criterion_1, Duration::from_secs(30)),
        ("smoothness", criterion_2, Duration::from_secs(60)),
        ("minimal vanishing degree", criterion_3, Duration::from_secs(60)),
        ("cone identities and closure", criterion_4, Duration::from_secs(120)),
        ("Y123 and Z123", criterion_5, Duration::from_secs(480)),
        ("group facts", criterion_6, Duration::from_secs(180)),
        ("bound table", criterion_7, Duration::from_secs(1)),
        ("determinism", criterion_8, Duration::from_secs(1200)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let mut c = Criterion::new();
        let start = Instant::now();
        check(&mut c);
        let elapsed = start.elapsed();
        c.require(elapsed <= limit, format!("took {elapsed:?}, limit {limit:?}"));
        let verdict = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict}  {name}  ({} ms)", i + 1, elapsed.as_millis());
        for f in &c.failures {
            println!("    {f}");
        }
        if !c.failures.is_empty() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
