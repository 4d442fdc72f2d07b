//! Black-box tests of the `jetgh` binary: reproducibility of emitted
//! bytes, exit-code classification, and configuration-file handling.

use std::process::{Command, Output};

fn jetgh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetgh"))
        .args(args)
        .output()
        .expect("spawn jetgh")
}

fn jetgh_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetgh"))
        .args(args)
        .env(key, value)
        .output()
        .expect("spawn jetgh")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let args = [
        "dgh", "circle{r=1}", "circle{r=1.4}", "--order", "1", "--seed", "7", "--base", "32",
        "--top", "4", "--restarts", "3",
    ];
    let first = jetgh(&args);
    let second = jetgh(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn tables_are_byte_identical_modulo_runtime_column() {
    let args = [
        "equivalence", "--radii", "1.5,1.25", "--order", "1", "--seed", "3", "--base", "24",
        "--top", "4", "--restarts", "1", "--grid", "64",
    ];
    let strip_runtime = |raw: &[u8]| -> Vec<String> {
        String::from_utf8(raw.to_vec())
            .unwrap()
            .lines()
            .map(|line| {
                if line.starts_with('#') || line.starts_with("i,") {
                    return line.to_string();
                }
                let mut cols: Vec<&str> = line.split(',').collect();
                cols.pop(); // runtime_ms varies run to run
                cols.join(",")
            })
            .collect()
    };
    let first = jetgh(&args);
    let second = jetgh(&args);
    assert!(first.status.success());
    assert_eq!(strip_runtime(&first.stdout), strip_runtime(&second.stdout));
}

#[test]
fn csv_outputs_carry_header_and_config_comment() {
    let out = jetgh(&["ftable", "--r1", "1", "--r2", "2", "--rt", "0.5..2", "--steps", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# jetgh ftable"));
    assert!(comment.contains("r1=1") && comment.contains("steps=4"));
    assert_eq!(lines.next().unwrap(), "r_tilde,f_value");
    assert_eq!(lines.count(), 4);
}

#[test]
fn lift_emits_one_row_per_sample() {
    let out = jetgh(&[
        "lift", "circle{r=1}", "--order", "1", "--seed", "2", "--base", "8", "--top", "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# jetgh lift family=circle{r=1}"));
    let header: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(header.len(), 4); // order-1 lift of a plane curve
    assert_eq!(lines.len(), 2 + 8 * 2);
    for row in &lines[2..] {
        for cell in row.split(',') {
            cell.parse::<f64>().expect("numeric cell");
        }
    }
}

#[test]
fn malformed_family_specs_exit_with_config_code() {
    let out = jetgh(&["hausdorff", "blob{r=1}", "circle{r=1}", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("blob"), "{}", stderr(&out));

    let out = jetgh(&["hausdorff", "circle{radius=1}", "circle{r=1}", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("radius"), "{}", stderr(&out));

    let out = jetgh(&["dgh", "circle{r=1}", "circle{r=2}", "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("seed"), "{}", stderr(&out));
}

#[test]
fn mismatched_ambient_metrics_exit_with_config_code() {
    let out = jetgh(&[
        "hausdorff",
        "hyp_sphere{n=1,r=1,rt=1}",
        "hyp_sphere{n=1,r=2,rt=3}",
        "--order", "0", "--seed", "1", "--base", "64",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn impossible_constructions_exit_with_construction_code() {
    // parameters pass spec validation, but no wave count within the
    // search bound reaches the requested length at this amplitude
    let out = jetgh(&[
        "lift", "wavy{r1=1,r2=20,eps=0.00001}", "--order", "0", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("wave count"), "{}", stderr(&out));
}

#[test]
fn unwritable_output_paths_exit_with_io_code() {
    let out = jetgh(&[
        "ftable", "--r1", "1", "--r2", "2", "--rt", "1", "--steps", "1", "--out",
        "/nonexistent-dir/table.csv",
    ]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn config_files_supply_flags_and_flags_win() {
    let dir = std::env::temp_dir().join("jetgh-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(
        &path,
        "# sample run\nfamily-a = circle{r=1}\nfamily-b = circle{r=1.2}\norder = 0\nseed = 4\nbase = 64\n",
    )
    .unwrap();
    let path_str = path.to_str().unwrap();

    let from_file = jetgh(&["hausdorff", "--config", path_str]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    let from_flags = jetgh(&[
        "hausdorff", "circle{r=1}", "circle{r=1.2}", "--order", "0", "--seed", "4", "--base",
        "64",
    ]);
    assert_eq!(from_file.stdout, from_flags.stdout);

    // a command-line flag overrides the file's value
    let overridden = jetgh(&["hausdorff", "--config", path_str, "--base", "32"]);
    assert!(overridden.status.success());
    assert!(String::from_utf8_lossy(&overridden.stdout).contains("\"points_a\": 32"));
}

#[test]
fn config_file_diagnostics_name_key_and_line() {
    let dir = std::env::temp_dir().join("jetgh-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.conf");
    std::fs::write(
        &path,
        "family-a = circle{r=1}\nfamily-b = circle{r=1}\nbogus-key = 7\nseed = 1\n",
    )
    .unwrap();
    let out = jetgh(&["hausdorff", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("bogus-key") && msg.contains(":3:"), "{msg}");

    let path = dir.join("unparsable.conf");
    std::fs::write(&path, "family-a = circle{r=1}\nfamily-b = circle{r=1}\nseed = x\n").unwrap();
    let out = jetgh(&["hausdorff", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("seed") && msg.contains(":3:"), "{msg}");
}

#[test]
fn thread_override_is_validated_and_honored() {
    let out = jetgh_env(
        &["ftable", "--r1", "1", "--r2", "2", "--rt", "1", "--steps", "1"],
        "JETGH_THREADS",
        "0",
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let ok = jetgh_env(
        &["dgh", "circle{r=1}", "circle{r=1.2}", "--order", "1", "--seed", "2", "--base",
          "16", "--top", "2", "--restarts", "2"],
        "JETGH_THREADS",
        "2",
    );
    assert!(ok.status.success(), "{}", stderr(&ok));
}
