use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stegonet::image::{read_pgm, write_pgm};
use stegonet::GrayImage;
use tempfile::TempDir;

fn stegonet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stegonet"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn write_cover(dir: &Path, name: &str, w: usize, h: usize, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let img = GrayImage::new(w, h, (0..w * h).map(|_| rng.gen()).collect()).unwrap();
    let path = dir.join(name);
    fs::write(&path, write_pgm(&img)).unwrap();
    path
}

fn write_message(dir: &Path, name: &str, len: usize, seed: u64) -> (PathBuf, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text: String = (0..len)
        .map(|_| if rng.gen::<bool>() { '1' } else { '0' })
        .collect();
    let path = dir.join(name);
    fs::write(&path, &text).unwrap();
    (path, text)
}

fn round_trip(scheme: &str, w: usize, h: usize, bits: usize) {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_cover(dir, "cover.pgm", w, h, 1);
    let (_, msg) = write_message(dir, "msg.txt", bits, 2);
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "cover.pgm",
            "--message",
            "msg.txt",
            "--scheme",
            scheme,
            "--out",
            "stego.pgm",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("stego.pgm.meta").exists());

    let out = stegonet(
        dir,
        &["extract", "--stego", "stego.pgm", "--out", "got.txt"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(dir.join("got.txt")).unwrap().trim(), msg);

    let cover = read_pgm(&fs::read(dir.join("cover.pgm")).unwrap()).unwrap();
    let stego = read_pgm(&fs::read(dir.join("stego.pgm")).unwrap()).unwrap();
    assert!(cover
        .pixels()
        .iter()
        .zip(stego.pixels())
        .all(|(a, b)| a.abs_diff(*b) <= 1));
}

#[test]
fn lsb_round_trip() {
    round_trip("lsb", 64, 48, 3000);
}

#[test]
fn matrix2_round_trip_on_512() {
    round_trip("matrix:2", 512, 512, 1000);
}

#[test]
fn matrix3_round_trip() {
    round_trip("matrix:3", 70, 30, 900);
}

#[test]
fn sidecar_contents() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_cover(dir, "c.pgm", 16, 16, 3);
    write_message(dir, "m.txt", 20, 4);
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            "matrix:3",
            "--out",
            "s.pgm",
            "--sidecar",
            "s.txt",
        ],
    );
    assert_eq!(code(&out), 0);
    let meta = fs::read_to_string(dir.join("s.txt")).unwrap();
    for line in ["scheme=matrix", "k=3", "msg_bits=20"] {
        assert!(meta.lines().any(|l| l == line), "{meta}");
    }
}

#[test]
fn zero_length_message_leaves_cover_unchanged() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_cover(dir, "c.pgm", 20, 10, 5);
    fs::write(dir.join("empty.txt"), "").unwrap();
    for scheme in ["lsb", "matrix:2"] {
        let out = stegonet(
            dir,
            &[
                "embed",
                "--cover",
                "c.pgm",
                "--message",
                "empty.txt",
                "--scheme",
                scheme,
                "--out",
                "s.pgm",
            ],
        );
        assert_eq!(code(&out), 0);
        assert_eq!(
            fs::read(dir.join("s.pgm")).unwrap(),
            fs::read(dir.join("c.pgm")).unwrap()
        );
    }
}

#[test]
fn capacity_exceeded_is_failure() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_cover(dir, "c.pgm", 4, 4, 6);
    write_message(dir, "m.txt", 11, 7);
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            "matrix:2",
            "--out",
            "s.pgm",
        ],
    );
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("11") && err.contains("10"), "{err}");
    assert!(!dir.join("s.pgm").exists());
}

#[test]
fn corrupted_sidecar_is_failure_without_output() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_cover(dir, "c.pgm", 16, 16, 8);
    write_message(dir, "m.txt", 100, 9);
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            "lsb",
            "--out",
            "s.pgm",
        ],
    );
    assert_eq!(code(&out), 0);
    let meta = fs::read_to_string(dir.join("s.pgm.meta")).unwrap();
    fs::write(
        dir.join("s.pgm.meta"),
        meta.replace("msg_bits=100", "msg_bits=1000"),
    )
    .unwrap();

    let first = stegonet(dir, &["extract", "--stego", "s.pgm", "--out", "got.txt"]);
    let second = stegonet(dir, &["extract", "--stego", "s.pgm", "--out", "got.txt"]);
    assert_eq!(code(&first), 1);
    assert_eq!(first.stderr, second.stderr);
    assert!(!dir.join("got.txt").exists());

    fs::write(dir.join("s.pgm.meta"), "scheme=lsb\nn1=1\nmsg_bits=ten\n").unwrap();
    let out = stegonet(dir, &["extract", "--stego", "s.pgm", "--out", "got.txt"]);
    assert_eq!(code(&out), 1);
    assert!(!dir.join("got.txt").exists());
}

#[test]
fn stats_output() {
    let tmp = TempDir::new().unwrap();
    let out = stegonet(tmp.path(), &["stats", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for line in ["rate=0.666667", "distortion=0.25", "efficiency=2.666667"] {
        assert!(text.lines().any(|l| l == line), "{text}");
    }
    let text = stdout(&stegonet(tmp.path(), &["stats", "--k", "3"]));
    for line in ["rate=0.428571", "distortion=0.125", "efficiency=3.428571"] {
        assert!(text.lines().any(|l| l == line), "{text}");
    }
}

#[test]
fn eval_fixture_is_exact() {
    let tmp = TempDir::new().unwrap();
    let model = fixture("perfect_lsb.fnn");
    let out = stegonet(
        tmp.path(),
        &[
            "eval",
            "--model",
            model.to_str().unwrap(),
            "--task",
            "lsb:1",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(
        stdout(&out).lines().any(|l| l == "bember=0"),
        "{}",
        stdout(&out)
    );

    // Arity mismatch.
    let out = stegonet(
        tmp.path(),
        &[
            "eval",
            "--model",
            model.to_str().unwrap(),
            "--task",
            "lsb:3",
        ],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let cases: &[&[&str]] = &[
        &[],
        &["frobnicate"],
        &["train", "--preset", "bogus"],
        &["train", "--task", "lsb:1", "--arch", "2b-x"],
        &["train", "--task", "nope"],
        &["train", "--preset", "fig2", "--task", "lsb:1"],
        &["stats"],
        &["stats", "--k", "0"],
        &["embed", "--cover", "c.pgm"],
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            "rot13",
            "--out",
            "s.pgm",
        ],
        &[
            "eval",
            "--model",
            "x.fnn",
            "--task",
            "lsb:1",
            "--threshold",
            "2",
        ],
    ];
    write_cover(dir, "c.pgm", 4, 4, 1);
    write_message(dir, "m.txt", 4, 1);
    for args in cases {
        let out = stegonet(dir, args);
        assert_eq!(
            code(&out),
            2,
            "{:?}: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert!(!dir.join("model.fnn").exists());
}

#[test]
fn missing_files_exit_1() {
    let tmp = TempDir::new().unwrap();
    let out = stegonet(
        tmp.path(),
        &["eval", "--model", "absent.fnn", "--task", "lsb:1"],
    );
    assert_eq!(code(&out), 1);
    let out = stegonet(
        tmp.path(),
        &["extract", "--stego", "absent.pgm", "--out", "m.txt"],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn fig2_preset_writes_trace() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let out = stegonet(dir, &["train", "--preset", "fig2", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,w1,w2,w3"));
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    for (w, target) in last.iter().zip([0.0, 1.0, 0.0]) {
        assert!((w - target).abs() <= 0.02, "{last:?}");
    }
    assert!(dir.join("trace-2.csv").exists());
    assert!(dir.join("model.fnn").exists());
    assert!(fs::read_to_string(dir.join("report.txt"))
        .unwrap()
        .contains("[equivalence]"));
}

#[test]
fn train_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        let out = stegonet(dir, &["train", "--preset", "appendixA", "--seed", "1"]);
        assert_eq!(code(&out), 0);
        assert!(fs::read_to_string(dir.join("report.txt"))
            .unwrap()
            .contains("bember=0"));
    }
    assert_eq!(
        fs::read(a.path().join("model.fnn")).unwrap(),
        fs::read(b.path().join("model.fnn")).unwrap()
    );
    let strip = |p: &Path| {
        let text = fs::read_to_string(p.join("report.txt")).unwrap();
        text[..text.find("[timing]").unwrap()].to_string()
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn explicit_training_failure_exits_1_with_report() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    // A linear network cannot learn the XOR inside matrix coding.
    let out = stegonet(
        dir,
        &[
            "train",
            "--task",
            "matrix-c",
            "--arch",
            "5-12-3b",
            "--epochs",
            "3",
            "--samples",
            "200",
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(fs::read_to_string(dir.join("report.txt"))
        .unwrap()
        .contains("verdict=fail"));
}

#[test]
fn model_scheme_matches_classical_lsb() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write_cover(dir, "c.pgm", 30, 20, 11);
    write_message(dir, "m.txt", 500, 12);
    let model = fixture("perfect_lsb.fnn");
    let scheme = format!("model:{}", model.display());
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            &scheme,
            "--out",
            "n.pgm",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            "lsb",
            "--out",
            "l.pgm",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read(dir.join("n.pgm")).unwrap(),
        fs::read(dir.join("l.pgm")).unwrap()
    );

    let out = stegonet(dir, &["extract", "--stego", "n.pgm", "--out", "got.txt"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read_to_string(dir.join("got.txt")).unwrap().trim(),
        fs::read_to_string(dir.join("m.txt")).unwrap()
    );

    // Arity that fits no embedding task.
    fs::write(
        dir.join("odd.fnn"),
        "fnn v1\nlayers 3 1\nactivations linear\nbias 0\nw 1 1 1 0.0\nw 1 2 1 0.0\nw 1 3 1 0.0\n",
    )
    .unwrap();
    let out = stegonet(
        dir,
        &[
            "embed",
            "--cover",
            "c.pgm",
            "--message",
            "m.txt",
            "--scheme",
            "model:odd.fnn",
            "--out",
            "x.pgm",
        ],
    );
    assert_eq!(code(&out), 1);
}
