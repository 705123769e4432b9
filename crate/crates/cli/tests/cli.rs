//! End-to-end checks of the `symlift` binary: exit codes, file outputs, and
//! reproducibility of reports.

use std::fs;
use std::process::Command;

fn symlift() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symlift"))
}

fn run_ok(args: &[&str]) {
    let out = symlift().args(args).output().expect("spawn symlift");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn exit_code(args: &[&str]) -> i32 {
    symlift()
        .args(args)
        .output()
        .expect("spawn symlift")
        .status
        .code()
        .unwrap_or(-1)
}

#[test]
fn generate_then_exact_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    let report = dir.path().join("r.json");
    let census = dir.path().join("c.jsonl");
    run_ok(&[
        "generate",
        "pigeonhole",
        "--pigeons",
        "3",
        "--holes",
        "2",
        "--out",
        model.to_str().unwrap(),
    ]);
    run_ok(&[
        "exact",
        "--model",
        model.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--census",
        census.to_str().unwrap(),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["results"]["orbit_count"], 13);
    assert_eq!(report["results"]["aut_order"], "12");
    assert_eq!(report["results"]["prob_evidence"], 1.0);
    assert_eq!(report["results"]["state_count"], "64");
    assert!(report["timings"].is_object());
    let census_lines = fs::read_to_string(&census).unwrap();
    assert_eq!(census_lines.lines().count(), 13);
}

#[test]
fn exact_reports_are_byte_identical_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    run_ok(&[
        "generate",
        "pairwise",
        "--n",
        "4",
        "--pair-table",
        "0.5,0,0.5",
        "--out",
        model.to_str().unwrap(),
    ]);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let report = dir.path().join(format!("r{i}.json"));
        let census = dir.path().join(format!("c{i}.jsonl"));
        run_ok(&[
            "exact",
            "--model",
            model.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
            "--census",
            census.to_str().unwrap(),
            "--no-timings",
        ]);
        outputs.push((fs::read(&report).unwrap(), fs::read(&census).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sample_runs_are_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    run_ok(&[
        "generate",
        "pigeonhole",
        "--pigeons",
        "2",
        "--holes",
        "2",
        "--out",
        model.to_str().unwrap(),
    ]);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let samples = dir.path().join(format!("s{i}.csv"));
        let report = dir.path().join(format!("r{i}.json"));
        run_ok(&[
            "sample",
            "--model",
            model.to_str().unwrap(),
            "--kind",
            "orbit-jump",
            "--seed",
            "31337",
            "--iterations",
            "60",
            "--burnside-steps",
            "2",
            "--samples",
            samples.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
            "--no-timings",
        ]);
        outputs.push((fs::read(&samples).unwrap(), fs::read(&report).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("bad.model");
    fs::write(&model, "vars 2\nclause hard 1 1\n").unwrap();
    let code = exit_code(&[
        "exact",
        "--model",
        model.to_str().unwrap(),
        "--report",
        dir.path().join("r.json").to_str().unwrap(),
        "--census",
        dir.path().join("c.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn infeasible_models_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("contradiction.model");
    fs::write(&model, "vars 1\nclause hard 1\nclause hard -1\n").unwrap();
    let code = exit_code(&[
        "exact",
        "--model",
        model.to_str().unwrap(),
        "--report",
        dir.path().join("r.json").to_str().unwrap(),
        "--census",
        dir.path().join("c.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn kernel_caps_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("big.model");
    run_ok(&[
        "generate",
        "pigeonhole",
        "--pigeons",
        "8",
        "--holes",
        "2",
        "--out",
        model.to_str().unwrap(),
    ]);
    // 16 variables exceeds the dense-kernel cap.
    let code = exit_code(&[
        "tveval",
        "--model",
        model.to_str().unwrap(),
        "--steps",
        "10",
        "--out",
        dir.path().join("tv.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 4);
}

#[test]
fn bench_writes_brute_column_below_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    run_ok(&[
        "bench",
        "pigeonhole",
        "--holes",
        "2",
        "--min",
        "2",
        "--max",
        "4",
        "--step",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "size,vars,orbits,certificate_calls,lifted_seconds,brute_seconds,logz_rel_err"
    );
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        // Small sizes fit the oracle: the error column is populated and tiny.
        let err: f64 = cols[6].parse().unwrap();
        assert!(err < 1e-9);
    }
}

#[test]
fn tveval_emits_five_columns_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    run_ok(&[
        "generate",
        "pigeonhole",
        "--pigeons",
        "3",
        "--holes",
        "2",
        "--out",
        model.to_str().unwrap(),
    ]);
    let out = dir.path().join("tv.csv");
    run_ok(&[
        "tveval",
        "--model",
        model.to_str().unwrap(),
        "--steps",
        "12",
        "--burnside-steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "t,tv_orbit_jump,tv_lifted,tv_gibbs,upper_bound");
    assert_eq!(data.len(), 1 + 13);
    // The bound column follows ((N-1)/N)^t with N = 13 orbits.
    let row1: Vec<&str> = data[2].split(',').collect();
    let ub: f64 = row1[4].parse().unwrap();
    assert!((ub - 12.0 / 13.0).abs() < 1e-12);
}

/// Round-trip property: serialize(parse(serialize(m))) is stable and
/// parsing reproduces the model.
mod roundtrip {
    use proptest::collection::vec;
    use proptest::prelude::{any, prop, Just, ProptestConfig, Strategy};
    use proptest::{prop_assert_eq, prop_oneof, proptest};
    use symlift_cli::format::{parse_model, serialize_model};

    use symlift::model::{
        ClauseWeight, CmpOp, EvidencePredicate, Literal, Model, SymFactor, VarId, WeightedClause,
    };

    fn finite_weight() -> impl Strategy<Value = f64> {
        any::<f64>().prop_filter("finite", |w| w.is_finite())
    }

    fn arb_model() -> impl Strategy<Value = Model> {
        (2usize..6).prop_flat_map(|n| {
            let clause = (
                prop_oneof![finite_weight().prop_map(ClauseWeight::Soft), Just(ClauseWeight::Hard)],
                prop::sample::subsequence((0..n as u32).collect::<Vec<u32>>(), 1..=n.min(3)),
                vec(any::<bool>(), n),
            )
                .prop_map(|(weight, vars, signs)| WeightedClause {
                    weight,
                    literals: vars
                        .into_iter()
                        .enumerate()
                        .map(|(i, v)| Literal {
                            var: VarId(v),
                            positive: signs[i % signs.len()],
                        })
                        .collect(),
                });
            let factor = prop::sample::subsequence((0..n as u32).collect::<Vec<u32>>(), 1..=n.min(2))
                .prop_flat_map(|vars| {
                    let k = vars.len();
                    (Just(vars), vec(finite_weight(), k + 1))
                })
                .prop_map(|(vars, table)| SymFactor {
                    scope: vars.into_iter().map(VarId).collect(),
                    count_table: table,
                });
            let evidence = prop_oneof![
                Just(EvidencePredicate::True),
                (
                    prop::sample::subsequence((0..n as u32).collect::<Vec<u32>>(), 1..=n),
                    prop_oneof![Just(CmpOp::Eq), Just(CmpOp::Le), Just(CmpOp::Ge)],
                )
                    .prop_flat_map(|(vars, cmp)| {
                        let len = vars.len();
                        (Just(vars), Just(cmp), 0..=len)
                    })
                    .prop_map(|(vars, cmp, bound)| EvidencePredicate::Cardinality {
                        subset: vars.into_iter().map(VarId).collect(),
                        cmp,
                        bound,
                    })
            ];
            (vec(clause, 0..4), vec(factor, 0..3), evidence).prop_map(
                move |(clauses, factors, evidence)| {
                    Model::new(n, clauses, factors, evidence).expect("generated model is valid")
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn parse_serialize_round_trip(model in arb_model()) {
            let text = serialize_model(&model);
            let parsed = parse_model(&text).expect("serialized model parses");
            prop_assert_eq!(&parsed, &model);
            prop_assert_eq!(serialize_model(&parsed), text);
        }
    }
}
