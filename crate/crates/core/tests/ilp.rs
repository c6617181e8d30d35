mod support;

use std::collections::BTreeSet;
use std::path::PathBuf;

use ehs::oracle::export_ilp;
use ehs::Instance;
use rand::Rng;
use support::{random_instance_with, rng, Shape};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

const GOLDEN: [&str; 3] = ["single_cell", "tightness", "two_channels"];

fn golden_cases() -> Vec<(&'static str, Instance)> {
    GOLDEN
        .iter()
        .map(|&name| {
            let path = golden_dir().join(format!("{name}.json"));
            let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            (name, Instance::from_json(&text).unwrap())
        })
        .collect()
}

/// Set `EHS_BLESS=1` to rewrite the golden files from the current export.
#[test]
fn exports_match_golden_files() {
    let bless = std::env::var_os("EHS_BLESS").is_some();
    for (name, inst) in golden_cases() {
        let path = golden_dir().join(format!("{name}.lp"));
        let text = export_ilp(&inst);
        if bless {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, golden, "{name}");
    }
}

fn variables(text: &str) -> BTreeSet<String> {
    text.lines()
        .filter(|l| !l.starts_with('\\'))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ':'))
        .filter(|tok| (tok.starts_with("x_") || tok.starts_with("z_")) && tok[2..].split('_').all(|p| p.parse::<usize>().is_ok()))
        .map(str::to_owned)
        .collect()
}

#[test]
fn variable_count_formula() {
    let mut r = rng(51);
    for _ in 0..60 {
        let (b, c) = (r.random_range(1..=3), r.random_range(1..=3));
        let shape = Shape {
            max_users: 4,
            max_bs: b,
            max_channels: c,
            max_slots: 4,
            max_arrival: 2,
            p_unservable: 0.2,
        };
        let inst = random_instance_with(&mut r, shape, b, c);
        let vars = variables(&export_ilp(&inst));
        let expected = inst.num_users() * b * c * inst.num_slots() + b * inst.num_slots();
        assert_eq!(vars.len(), expected);
    }
}

#[test]
fn degenerate_export_has_two_variables() {
    let inst = Instance::single(1, vec![1], &[(1, 1)]).unwrap();
    let text = export_ilp(&inst);
    assert_eq!(variables(&text).len(), 2);
    assert!(text.contains(" obj: 1 x_1_1_1_1\n"));
}

#[test]
fn objective_weights_are_reciprocal_requirements() {
    let inst = Instance::single(3, vec![3, 0, 0], &[(3, 3), (2, 3)]).unwrap();
    let text = export_ilp(&inst);
    let objective: String = text
        .split("Subject To")
        .next()
        .unwrap()
        .lines()
        .skip_while(|l| !l.starts_with(" obj:"))
        .collect::<Vec<_>>()
        .join(" ");
    let third = 1.0f64 / 3.0;
    assert!(objective.contains(&format!("{third} x_1_1_1_1")));
    assert!(objective.contains("+ 0.5 x_2_1_1_3"));
}

#[test]
fn lines_fit_in_eighty_columns() {
    let mut r = rng(52);
    for _ in 0..20 {
        let shape = Shape {
            max_users: 6,
            max_bs: 3,
            max_channels: 2,
            max_slots: 5,
            max_arrival: 2,
            p_unservable: 0.1,
        };
        let inst = random_instance_with(&mut r, shape, 3, 2);
        let text = export_ilp(&inst);
        assert!(text.lines().all(|l| l.len() <= 80 || l.starts_with('\\')));
        assert!(text.ends_with("End\n"));
    }
}
