use std::path::PathBuf;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn model() -> String {
    fixture("web_service.dsut")
}

fn reqs() -> String {
    fixture("web_service.req.dsut")
}

fn dsut(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dsut").chain(args.iter().copied());
    let code = dsut_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Writes `text` to a fresh temporary file and returns its path.
fn temp_file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("dsut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_fixture_reports_info_only() {
    let r = dsut(&["validate", &model(), &reqs()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    assert!(!r.stderr.is_empty());
    for line in r.stderr.lines() {
        assert!(line.starts_with("INFO "), "{line}");
        let mut parts = line.split(' ');
        parts.next();
        parts.next();
        assert!(parts.next().unwrap().starts_with("layer="), "{line}");
    }
    assert!(r.stderr.contains("PHANTOM_RISK layer=3 [web_server, 1]"));
}

#[test]
fn bad_layer_is_a_parse_error_with_position() {
    let f = temp_file(
        "bad_layer.dsut",
        "\n  object_(layer(9), component_(a,1), type_([]), parameters_([])).\n",
    );
    let r = dsut(&["validate", &f]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad_layer.dsut:2:"), "{}", r.stderr);
}

#[test]
fn syntax_error_exits_two() {
    let f = temp_file(
        "syntax.dsut",
        "object_(layer(1), component_(a,1) type_([]), parameters_([])).",
    );
    let r = dsut(&["generate", &f, &reqs()]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
}

#[test]
fn missing_projections_exit_three() {
    let text: String = std::fs::read_to_string(model())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("map_(layer(3)"))
        .map(|l| format!("{l}\n"))
        .collect();
    let f = temp_file("no_layer3_maps.dsut", &text);
    let r = dsut(&["validate", &f, &reqs()]);
    assert_eq!(r.code, 3);
    let errors: Vec<&str> = r.stderr.lines().filter(|l| l.starts_with("ERROR ")).collect();
    assert_eq!(errors.len(), 14, "{}", r.stderr);
    assert!(errors
        .iter()
        .all(|l| l.starts_with("ERROR NO_PROJECTION layer=3")));

    let g = dsut(&["generate", &f, &reqs()]);
    assert_eq!(g.code, 3);
    assert!(g.stdout.is_empty());
}

#[test]
fn build_errors_exit_three() {
    let f = temp_file(
        "dup.dsut",
        "object_(layer(1), component_(a,1), type_(x), parameters_([])).\nobject_(layer(1), component_(a,1), type_(x), parameters_([])).\n",
    );
    let r = dsut(&["validate", &f]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("declared twice"), "{}", r.stderr);
}

#[test]
fn generate_without_end_user_requirement_exits_three() {
    let r = dsut(&["generate", &model()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("NO_TOP_LEVEL_REQUIREMENT"));
}

#[test]
fn io_and_usage_errors_exit_one() {
    assert_eq!(dsut(&["validate", "/definitely/not/here.dsut"]).code, 1);
    assert_eq!(
        dsut(&["generate", &model(), &reqs(), "--max-path-len", "1"]).code,
        1
    );
    assert_eq!(
        dsut(&["generate", &model(), &reqs(), "--max-paths-per-pair", "0"]).code,
        1
    );
    assert_eq!(dsut(&["estimate", &model(), "--redundancy", "0"]).code, 1);
    assert_eq!(dsut(&["frobnicate"]).code, 1);
    assert_eq!(dsut(&[]).code, 1);
}

#[test]
fn help_and_version_exit_zero() {
    let h = dsut(&["--help"]);
    assert_eq!(h.code, 0);
    assert!(h.stdout.contains("generate"));
    let g = dsut(&["generate", "--help"]);
    assert!(g.stdout.contains("--no-physical-edge-coverage"));
    assert_eq!(dsut(&["--version"]).code, 0);
}

#[test]
fn table_rows_follow_layer_order() {
    let r = dsut(&["generate", &model(), &reqs()]);
    assert_eq!(r.code, 0);
    let rows: Vec<Vec<&str>> = r
        .stdout
        .lines()
        .filter(|l| !l.starts_with(' '))
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(
        rows[0],
        ["Layer", "Individual", "components", "Distributed", "aspect"]
    );
    assert_eq!(rows[1], ["Functional", "2", "1"]);
    assert_eq!(rows[2], ["System", "14", "15"]);
    assert_eq!(rows[3], ["Logical", "6", "7"]);
    assert_eq!(rows[4], ["Physical", "7", "6"]);
    assert_eq!(rows[5], ["Total", "29", "29", "(T", "=", "58)"]);
    assert!(r.stdout.contains("[provider, 1] <-> [subscriber, 1]"));
    assert!(r.stdout.contains("[dns_server, _] <-> [ss, _]  (6)"));
    assert!(r.stdout.contains("Firefox 29.0.1"));
    // Diagnostics stay off standard output.
    assert!(!r.stdout.contains("INFO"));
}

#[test]
fn json_has_fixed_key_order() {
    let r = dsut(&["generate", &model(), &reqs(), "--format", "json"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.ends_with("}\n"));
    let top = ["\"layers\"", "\"totals\"", "\"config\"", "\"tool_version\""];
    let pos: Vec<usize> = top.iter().map(|k| r.stdout.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    // Parsed maps sort their keys, so check order on the text.
    let first = &r.stdout[r.stdout.find("\"layer\"").unwrap()..];
    let order = [
        "\"layer\"",
        "\"component_templates\"",
        "\"distributed_templates\"",
        "\"trivially_satisfied\"",
        "\"diagnostics\"",
    ];
    let at: Vec<usize> = order.iter().map(|k| first.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(doc["totals"]["total"], 58);
    assert_eq!(doc["config"]["max_path_len"], 16);
    assert_eq!(doc["config"]["max_paths_per_pair"], 64);
    let t = &doc["layers"][0]["distributed_templates"][0];
    assert_eq!(t["origin"][0], "direct:R4.1");
    assert!(t["id"].as_str().unwrap().starts_with("p4-"));
    assert_eq!(
        doc["layers"][2]["trivially_satisfied"].as_array().unwrap().len(),
        4
    );
}

#[test]
fn sequential_and_parallel_print_the_same() {
    let a = dsut(&["generate", &model(), &reqs(), "--format", "json"]);
    let b = dsut(&["generate", &model(), &reqs(), "--format", "json", "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn physical_paths_when_edge_coverage_is_off() {
    let r = dsut(&[
        "generate",
        &model(),
        &reqs(),
        "--format",
        "json",
        "--no-physical-edge-coverage",
    ]);
    assert_eq!(r.code, 0);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let phys = doc["layers"][3]["distributed_templates"].as_array().unwrap();
    assert!(phys.iter().all(|t| t["kind"] == "path"));
    assert_eq!(doc["config"]["physical_edge_coverage"], false);
}

#[test]
fn minimal_mode_keeps_one_path_per_conjunct() {
    let r = dsut(&[
        "generate",
        &model(),
        &reqs(),
        "--format",
        "json",
        "--mode",
        "minimal",
    ]);
    assert_eq!(r.code, 0);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    // 7 ss conjuncts, 2 web clients.
    assert_eq!(
        doc["layers"][1]["distributed_templates"]
            .as_array()
            .unwrap()
            .len(),
        9
    );
}

#[test]
fn tight_limits_warn_but_succeed() {
    let r = dsut(&["generate", &model(), &reqs(), "--max-paths-per-pair", "1"]);
    assert_eq!(r.code, 0);
    assert!(
        r.stderr.contains("WARNING PATHS_TRUNCATED layer=3"),
        "{}",
        r.stderr
    );
}

#[test]
fn violation_report_is_printed_before_exit_four() {
    let text = std::fs::read_to_string(model()).unwrap().replace(
        "connection_(layer(3), component_(web_server,1), component_(sql_server,1), parameters_([])).\n",
        "",
    );
    let f = temp_file("cut.dsut", &text);
    let r = dsut(&["generate", &f, &reqs()]);
    assert_eq!(r.code, 4);
    assert!(r.stdout.contains("Total"));
    assert!(r
        .stderr
        .contains("ERROR CRITERION2_VIOLATION layer=3 [sql_server, 1] I3.1"));
}

#[test]
fn declared_requirement_violation() {
    // ss 7 cut off from its forwarder: it reaches no dns server.
    let text = std::fs::read_to_string(model()).unwrap().replace(
        "connection_(layer(3), component_(ss,7), component_(ss,5), parameters_([])).\n",
        "",
    );
    let f = temp_file("ss7.dsut", &text);
    let r = dsut(&["generate", &f, &reqs()]);
    assert_eq!(r.code, 4);
    assert!(
        r.stderr
            .contains("ERROR CRITERION1_VIOLATION layer=3 [ss, 7] R3.1"),
        "{}",
        r.stderr
    );
}

#[test]
fn estimate_modes() {
    let simple = dsut(&["estimate", &model(), &reqs(), "--worst-case"]);
    assert_eq!(simple.code, 0);
    assert!(
        simple.stdout.lines().last().unwrap().ends_with(" 157"),
        "{}",
        simple.stdout
    );
    let complex = dsut(&["estimate", &model(), &reqs(), "--worst-case", "--mode", "complex"]);
    assert!(complex.stdout.lines().last().unwrap().ends_with(" 285"));
    let r1 = dsut(&[
        "estimate",
        &model(),
        &reqs(),
        "--mode",
        "complex",
        "--redundancy",
        "1",
    ]);
    let plain = dsut(&["estimate", &model(), &reqs(), "--mode", "simple"]);
    assert_eq!(r1.stdout, plain.stdout);
    assert!(!plain.stderr.contains("BOUND_EXCEEDED"));
}

#[test]
fn estimate_without_requirements_is_worst_case() {
    let a = dsut(&["estimate", &model(), "--format", "json"]);
    let doc: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(doc["worst_case"], true);
    assert_eq!(doc["total_bound"], 157);
}

#[test]
fn estimate_uses_communicating_sets() {
    let r = dsut(&["estimate", &model(), &reqs(), "--format", "json"]);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let g: Vec<u64> = doc["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["communicating"].as_u64().unwrap())
        .collect();
    // Functional: both; system: all but proxy and web_server; logical: all
    // hosts but the vlan; physical: servers and workstations.
    assert_eq!(g, vec![2, 12, 5, 5]);
}
