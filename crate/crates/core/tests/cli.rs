use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mv2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mv2"))
        .args(args)
        .output()
        .expect("spawn mv2")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn encode_main_file_bytes() {
    let dir = TempDir::new().unwrap();
    let (input, output) = (path(&dir, "main.bin"), path(&dir, "main.mv2"));
    fs::write(&input, (0..=255u8).collect::<Vec<_>>()).unwrap();

    let v = json(&mv2(&["encode", "--json", &input, &output]));
    assert_eq!(v["input_pits"], 2048);
    assert_eq!(v["remainder"], 1794);
    assert_eq!(v["rounds"][0]["flag_len"], 510);
    assert_eq!(v["remainder_ratio"], "897/1024");
    assert_eq!(v["total_ratio"], "9/8");

    let v = json(&mv2(&["encode", "--json", "-c", "2", &input, &output]));
    assert_eq!(v["remainder"], 1540);
    assert_eq!(v["rounds"][0]["flag_msb"], 256);
    assert_eq!(v["rounds"][0]["flag_len"], 508);

    let v = json(&mv2(&["encode", "--json", "-c", "3", &input, &output]));
    assert_eq!(v["remainder"], 1554);
    assert_eq!(v["rounds"][0]["flag_len"], 750);
}

#[test]
fn encode_decode_round_trip() {
    let dir = TempDir::new().unwrap();
    let data: Vec<u8> = (0..5000u32).map(|i| (i * 7919 % 251) as u8).collect();
    let input = path(&dir, "in.bin");
    fs::write(&input, &data).unwrap();
    for clone in ["1", "2", "3"] {
        let (packed, back) = (path(&dir, "c.mv2"), path(&dir, "out.bin"));
        let o = mv2(&["encode", "-c", clone, "-m", "3", "-n", "6", &input, &packed]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("container bytes"));
        let o = mv2(&["decode", &packed, &back]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(fs::read(&back).unwrap(), data, "clone {clone}");
    }
}

#[test]
fn digits_input() {
    let dir = TempDir::new().unwrap();
    let data: Vec<u8> = (0..1000u32).map(|i| (i * i % 5) as u8).collect();
    let (input, packed, back) = (path(&dir, "d"), path(&dir, "d.mv2"), path(&dir, "d.out"));
    fs::write(&input, &data).unwrap();
    let args = [
        "encode",
        "-p",
        "5",
        "-n",
        "4",
        "-c",
        "3",
        "--input-format",
        "digits",
    ];
    let o = mv2(&[&args[..], &[&input, &packed]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(mv2(&["decode", &packed, &back]).status.success());
    assert_eq!(fs::read(&back).unwrap(), data);

    fs::write(&input, [0u8, 1, 7]).unwrap();
    let o = mv2(&[&args[..], &[&input, &packed]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid digit"), "{}", stderr(&o));
}

#[test]
fn empty_file() {
    let dir = TempDir::new().unwrap();
    let (input, packed, back) = (path(&dir, "e"), path(&dir, "e.mv2"), path(&dir, "e.out"));
    fs::write(&input, b"").unwrap();
    let v = json(&mv2(&["encode", "--json", &input, &packed]));
    assert_eq!(v["input_pits"], 0);
    assert!(mv2(&["decode", &packed, &back]).status.success());
    assert!(fs::read(&back).unwrap().is_empty());
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "x");
    fs::write(&input, b"abc").unwrap();
    let out = path(&dir, "y");

    let o = mv2(&["encode", "-c", "2", "-n", "1", &input, &out]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!Path::new(&out).exists());

    assert_eq!(
        mv2(&["encode", "-p", "1", &input, &out]).status.code(),
        Some(1)
    );
    assert_eq!(
        mv2(&["encode", "-c", "4", &input, &out]).status.code(),
        Some(1)
    );
    assert_eq!(
        mv2(&["encode", "-m", "0", &input, &out]).status.code(),
        Some(1)
    );
    assert_eq!(mv2(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mv2(&["analytics", "-p", "1"]).status.code(), Some(1));
    assert_eq!(mv2(&["--help"]).status.code(), Some(0));
}

#[test]
fn damaged_containers_exit_two() {
    let dir = TempDir::new().unwrap();
    let (input, packed, back) = (path(&dir, "x"), path(&dir, "x.mv2"), path(&dir, "x.out"));
    fs::write(&input, b"some bytes to recode").unwrap();
    assert!(mv2(&["encode", &input, &packed]).status.success());
    let blob = fs::read(&packed).unwrap();

    fs::write(&packed, &blob[..blob.len() - 7]).unwrap();
    let o = mv2(&["decode", &packed, &back]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("truncated"), "{}", stderr(&o));

    let mut flipped = blob.clone();
    flipped[blob.len() - 6] ^= 4;
    fs::write(&packed, &flipped).unwrap();
    let o = mv2(&["decode", &packed, &back]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));

    fs::write(&packed, b"not a container at all").unwrap();
    let o = mv2(&["decode", &packed, &back]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new(&back).exists());

    let o = mv2(&["decode", &path(&dir, "missing"), &back]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_errata_and_ranking() {
    let o = mv2(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("paper_erratum"));
    assert!(text.lines().last().unwrap().starts_with("ranking: clone 2"));

    let v = json(&mv2(&["verify", "--json"]));
    let entries = v["entries"].as_array().unwrap();
    let find = |q: &str| entries.iter().find(|e| e["quantity"] == q).unwrap().clone();
    let k2 = find("clone2.ratio");
    assert_eq!(k2["paper"], "384/512");
    assert_eq!(k2["formula"], "385/512");
    assert_eq!(k2["measured"], "385/512");
    assert_eq!(k2["verdict"], "paper_erratum");
    assert_eq!(find("clone1.flag_len")["verdict"], "match");
    assert_eq!(find("clone1.growth.m10")["verdict"], "model_only");
    let errata = entries
        .iter()
        .filter(|e| e["verdict"] == "paper_erratum")
        .count();
    assert_eq!(errata, 2);
    let ranking: Vec<u64> = v["ranking"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["clone"].as_u64().unwrap())
        .collect();
    assert_eq!(ranking, [2, 3, 1]);
}

#[test]
fn verify_other_shapes() {
    let v = json(&mv2(&["verify", "-p", "3", "-n", "2", "--json"]));
    assert!(v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["verdict"] != "mismatch"));

    let v = json(&mv2(&["verify", "-p", "5", "-n", "3", "-c", "3", "--json"]));
    let entries = v["entries"].as_array().unwrap();
    assert!(entries
        .iter()
        .all(|e| e["quantity"].as_str().unwrap().starts_with("clone3.")));
}

#[test]
fn analytics_output() {
    let o = mv2(&["analytics"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("897/1024"));
    assert!(text.contains("m=10:1.7398"));

    let v = json(&mv2(&["analytics", "--json"]));
    assert_eq!(v["k2"]["exact"], "385/512");
    assert_eq!(v["k3"]["exact"], "777/1024");
    assert_eq!(v["flag_len_clone2_paper"], "1020");
}

#[test]
fn codebook_listing() {
    let o = mv2(&["codebook", "-p", "2", "-n", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("1:2 2:4 3:2"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0], ["0", "1", "0"]);
    assert_eq!(rows[5], ["5", "2", "11"]);
    assert_eq!(rows[7], ["7", "3", "001"]);
}
