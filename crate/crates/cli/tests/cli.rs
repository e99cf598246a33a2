use std::io::Write;
use std::process::{Command as Process, Stdio};

use clap::Parser;
use dicenote::{RandomSource, SeededSource};
use dicenote_cli::{run, Cli, CliConfig, Command, Format, EXIT_LIMIT, EXIT_OK, EXIT_USER_ERROR};
use serde_json::Value as Json;

const CORPUS: &str = include_str!("../../../corpus/golden.txt");

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_config(config: &CliConfig, stdin: &str) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(config, &mut stdin.as_bytes(), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn config(args: &[&str]) -> CliConfig {
    let argv = std::iter::once("dicenote").chain(args.iter().copied());
    CliConfig::new(Cli::try_parse_from(argv).unwrap(), None).unwrap()
}

fn cli(args: &[&str]) -> Output {
    run_config(&config(args), "")
}

/// First seed whose generator draws `indices` for dice of `sides` sides.
fn seed_drawing(sides: u64, indices: &[u64]) -> u64 {
    (0..u64::MAX)
        .find(|&seed| {
            let mut rng = SeededSource::new(seed);
            indices.iter().all(|&i| rng.next_index(sides).unwrap() == i)
        })
        .unwrap()
}

fn corpus() -> impl Iterator<Item = &'static str> {
    CORPUS.lines()
}

#[test]
fn seed_that_draws_four_and_thirteen_gives_fifteen() {
    let seed = seed_drawing(20, &[3, 12]).to_string();
    let out = cli(&["roll", "2d20kh+2", "--seed", &seed]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "15\n");
}

#[test]
fn groups_print_comma_separated() {
    let seed = seed_drawing(6, &[1, 5]).to_string();
    assert_eq!(cli(&["roll", "d6;d6", "--seed", &seed]).stdout, "2,6\n");
}

#[test]
fn negative_sides_is_a_user_error() {
    let out = cli(&["roll", "d-6"]);
    assert_eq!(out.code, EXIT_USER_ERROR);
    assert!(out.stderr.contains("NEGATIVE_SIDES"), "{}", out.stderr);
    assert!(out.stderr.contains("  d-6\n  ^^^\n"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn empty_expression_is_a_user_error() {
    let out = cli(&["roll", ""]);
    assert_eq!(out.code, EXIT_USER_ERROR);
    assert!(out.stderr.contains("EMPTY_EXPRESSION"));
}

#[test]
fn limits_exit_with_three() {
    assert_eq!(cli(&["roll", "100000000d6"]).code, EXIT_LIMIT);
    let mut c = config(&["verify", "5d6"]);
    c.limits.max_outcomes = 1000;
    let out = run_config(&c, "");
    assert_eq!(out.code, EXIT_LIMIT);
    assert!(out.stderr.contains("STATE_SPACE_TOO_LARGE"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    for format in ["text", "json"] {
        for expr in corpus() {
            let args = ["--format", format, "--seed", "77", "roll", expr];
            let a = cli(&args);
            let b = cli(&args);
            assert_eq!(a.stdout, b.stdout, "{expr}");
            assert_eq!(a.stderr, b.stderr, "{expr}");
            assert_eq!(a.code, b.code, "{expr}");
        }
    }
}

#[test]
fn json_output_matches_the_schema() {
    let schema: Json = serde_json::from_str(dicenote::report::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let mut errors = 0;
    for (i, expr) in corpus().enumerate() {
        let seed = i.to_string();
        let out = cli(&["--format", "json", "--seed", &seed, "roll", expr]);
        let doc: Json = serde_json::from_str(out.stdout.trim()).unwrap_or_else(|e| {
            panic!("{expr}: {e}: {:?}", out.stdout)
        });
        let problems: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(problems.is_empty(), "{expr}: {problems:?}");
        if doc.get("error").is_some() {
            errors += 1;
            assert_ne!(out.code, EXIT_OK, "{expr}");
        } else {
            assert_eq!(out.code, EXIT_OK, "{expr}");
        }
    }
    // the corpus deliberately includes malformed input
    assert!(errors > 5);
}

#[test]
fn schema_rejects_foreign_documents() {
    let schema: Json = serde_json::from_str(dicenote::report::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    assert!(!validator.is_valid(&serde_json::json!({ "groups": [1] })));
    assert!(!validator.is_valid(&serde_json::json!({ "error": { "code": "x" } })));
}

#[test]
fn repl_keeps_macros_and_survives_errors() {
    let c = config(&["repl", "--seed", "4"]);
    let out = run_config(&c, "#FIVE = 5\n@FIVE+1\n\nd-6\n@FIVE;@FIVE\nquit\n@FIVE\n");
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "6\n5,5\n");
    assert!(out.stderr.contains("NEGATIVE_SIDES"));

    let mut c = config(&["repl"]);
    c.interactive = true;
    assert_eq!(run_config(&c, "1\n").stdout, "> 1\n> ");
}

#[test]
fn macro_file_preloads_definitions() {
    let dir = std::env::temp_dir().join(format!("dicenote-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.dice");
    std::fs::write(&good, "#TEN = 10\n\n#PAIR = (1;2)\n").unwrap();
    let path = good.to_str().unwrap();
    assert_eq!(cli(&["--macros", path, "roll", "@TEN+@PAIR"]).stdout, "11,2\n");

    let bad = dir.join("bad.dice");
    std::fs::write(&bad, "#OK = 1\n2d6\n").unwrap();
    let out = cli(&["--macros", bad.to_str().unwrap(), "roll", "1"]);
    assert_eq!(out.code, EXIT_USER_ERROR);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);

    let missing = cli(&["--macros", dir.join("nope").to_str().unwrap(), "roll", "1"]);
    assert_eq!(missing.code, EXIT_USER_ERROR);
}

#[test]
fn chain_limit_comes_from_the_environment_value() {
    let parsed = |args: &[&str]| Cli::try_parse_from(std::iter::once("dicenote").chain(args.iter().copied())).unwrap();
    let c = CliConfig::new(parsed(&["roll", "1d1!"]), Some("3")).unwrap();
    assert_eq!(c.limits.chain, 3);
    let out = run_config(&c, "");
    assert_eq!(out.stdout, "4\n");
    assert!(out.stderr.contains("limit of 3"));
    assert!(CliConfig::new(parsed(&["roll", "1"]), Some("many")).is_err());
}

#[test]
fn verify_reports_the_exact_distribution() {
    let out = cli(&["verify", "2d6kh", "--samples", "20000", "--seed", "1"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("6\t11/36\n"), "{}", out.stdout);
    assert!(out.stdout.contains("total probability 1\n"));
    assert!(out.stdout.ends_with("PASS\n"));

    let out = cli(&["--format", "json", "verify", "d6+d6", "--samples", "20000"]);
    let doc: Json = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["support"], 11);
    assert_eq!(doc["paths"], 36);
    assert_eq!(doc["normalized"], true);
}

#[test]
fn bench_prints_the_ladder() {
    let out = cli(&["bench", "--trials", "1"]);
    assert_eq!(out.code, EXIT_OK);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "expression,mean_ns,p99_ns");
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, dicenote::perf::NDN_LADDER);
    assert!(out.stderr.contains("log-log slope"));
}

#[test]
fn argument_shapes() {
    let c = config(&["--format", "json", "roll", "d6", "--seed", "9"]);
    assert_eq!(c.format, Format::Json);
    assert_eq!(c.seed, Some(9));
    assert_eq!(c.command, Command::Roll { expression: "d6".into() });
    assert!(Cli::try_parse_from(["dicenote"]).is_err());
    assert!(Cli::try_parse_from(["dicenote", "roll"]).is_err());
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_dicenote"))
}

#[test]
fn binary_exit_codes() {
    let status = |args: &[&str]| binary().args(args).output().unwrap();
    let ok = status(&["roll", "1d1", "--seed", "1"]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(ok.stdout, b"1\n");
    assert_eq!(status(&["roll", "d-6"]).status.code(), Some(EXIT_USER_ERROR));
    assert_eq!(status(&["roll", ""]).status.code(), Some(EXIT_USER_ERROR));
    assert_eq!(status(&["frobnicate"]).status.code(), Some(EXIT_USER_ERROR));
    assert_eq!(status(&["roll", "1d6", "--seed", "x"]).status.code(), Some(EXIT_USER_ERROR));

    let env = binary()
        .args(["roll", "1d1!"])
        .env("DICE_LIMIT_L", "2")
        .output()
        .unwrap();
    assert_eq!(env.stdout, b"3\n");
}

#[test]
fn binary_repl_reads_piped_input_without_prompt() {
    let mut child = binary()
        .args(["repl", "--seed", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"#A = 3\n@A*2\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(out.stdout, b"6\n");
}

#[test]
fn leading_minus_is_an_expression() {
    let seed = seed_drawing(6, &[4]).to_string();
    assert_eq!(cli(&["roll", "-1d6", "--seed", &seed]).stdout, "-5\n");
    assert_eq!(cli(&["--seed", &seed, "roll", "-1d6"]).stdout, "-5\n");
}
