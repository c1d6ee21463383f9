//! Corpus reports compared byte-for-byte with tests/golden. Set UPDATE_GOLDEN=1 to rewrite them.
//! `mode-scatter` is left out: its floats depend on the platform libm.

use std::path::{Path, PathBuf};

use phgscat::io::{run_command, Command, RunConfig, CORPUS};

const COMMANDS: [Command; 5] = [
    Command::Expand,
    Command::Residues,
    Command::EinsteinLog,
    Command::Perturb,
    Command::NormalForm,
];

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn render(metric: &str, command: Command) -> String {
    let mut cfg = RunConfig::new(command);
    cfg.metric = Some(manifest().join("corpus").join(format!("{metric}.json")));
    let (status, rep) = run_command(&cfg);
    let body = match rep {
        Ok(r) => format!("{}\n{}", r.to_json_string(), r.to_text()),
        Err(e) => format!("error: {e}\n"),
    };
    format!("exit {}\n{body}", status.code())
}

fn compare(path: &Path, actual: &str) -> Result<(), String> {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        Err(format!("{} differs from line {}", path.display(), line + 1))
    }
}

#[test]
fn corpus_reports_match_golden_files() {
    let dir = manifest().join("tests").join("golden");
    std::fs::create_dir_all(&dir).unwrap();
    let mut failures = Vec::new();
    for (name, _) in CORPUS {
        for command in COMMANDS {
            let path = dir.join(format!("{name}.{command}.txt"));
            if let Err(e) = compare(&path, &render(name, command)) {
                failures.push(e);
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn expected_exit_codes_on_corpus() {
    let dir = manifest().join("tests").join("golden");
    let code = |name: &str, c: Command| -> String {
        let text = std::fs::read_to_string(dir.join(format!("{name}.{c}.txt"))).unwrap_or_else(|_| render(name, c));
        text.lines().next().unwrap().to_string()
    };
    assert_eq!(code("flat-n2", Command::Expand), "exit 0");
    assert_eq!(code("quadratic-n2", Command::Perturb), "exit 0");
    // perturb needs a correction; log-carrying metrics fall outside the Einstein class
    assert_eq!(code("flat-n1", Command::Perturb), "exit 2");
    assert_eq!(code("log-k1m1-n2", Command::EinsteinLog), "exit 2");
}
