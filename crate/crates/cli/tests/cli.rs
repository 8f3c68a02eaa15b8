use std::process::{Command, Output};

fn gl2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl2"))
        .args(args)
        .output()
        .expect("gl2 runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn genus_of_a_named_group() {
    let o = gl2(&["genus", "--label", "15.15.1.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "genus=1 index=15 level=15\n");
}

#[test]
fn single_invariants_of_products() {
    assert_eq!(stdout(&gl2(&["index", "--label", "8.2.0.1*13.14.0.1"])), "index=28\n");
    assert_eq!(stdout(&gl2(&["level", "--label", "24.6.1.2"])), "level=24\n");
    assert_eq!(
        stdout(&gl2(&["admissible", "--label", "16.24.1.5"])),
        "admissible=true\n"
    );
}

#[test]
fn product_prints_its_name() {
    let o = gl2(&["product", "--left", "3.3.0.1", "--right", "5.5.0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("15.15.1.1 level=15 index=15 genus=1 admissible=true modulus=15 gens="));
}

#[test]
fn classify_three_five_has_one_curious_line() {
    let o = gl2(&["classify", "--primes", "3,5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let curious: Vec<&str> = out
        .lines()
        .filter(|l| l.split_whitespace().nth(1) == Some("CURIOUS"))
        .collect();
    assert_eq!(curious.len(), 1);
    assert!(curious[0].starts_with("15.15.1.1 CURIOUS"));
    assert!(out.ends_with("curious 1: 15.15.1.1\n"));
}

#[test]
fn classify_output_does_not_depend_on_jobs() {
    let one = gl2(&["--jobs", "1", "classify", "--primes", "2,3"]);
    let four = gl2(&["--jobs", "4", "classify", "--primes", "2,3"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn check_labels_passes_on_shipped_data() {
    let o = gl2(&["check-labels"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out
        .lines()
        .filter(|l| l.contains("status="))
        .all(|l| l.contains("status=PASS")));
    assert!(out.ends_with(" 0 failed\n"));
}

#[test]
fn verify_isogenies_passes_and_a_corrupted_fact_fails() {
    let o = gl2(&["verify-isogenies"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS 832.f1 -[(2,0)]-> 832.f2: (1,3) expected (-2,0) found (-2,0)"));

    let facts = gl2kit::registry::SHIPPED_FACTS.replace(
        "isogeny 832.f1 (2,0) 832.f2 (1,3) -2,0",
        "isogeny 832.f1 (2,0) 832.f2 (1,3) 2,0",
    );
    assert_ne!(facts, gl2kit::registry::SHIPPED_FACTS);
    let path = std::env::temp_dir().join(format!("gl2-facts-{}.txt", std::process::id()));
    std::fs::write(&path, facts).unwrap();
    let o = gl2(&["--witnesses", path.to_str().unwrap(), "verify-isogenies"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL 832.f1"));
}

#[test]
fn subgroups_and_twists() {
    let o = gl2(&["subgroups", "--label", "3.4.0.1", "--index", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("3 subgroups of index 2 in 3.4.0.1\n"));

    let o = gl2(&["subgroups", "--label", "3.4.0.1", "--index", "2", "--admissible"]);
    assert!(stdout(&o).starts_with("0 subgroups"));

    let o = gl2(&["twists", "--label", "3.4.0.1"]);
    let out = stdout(&o);
    assert!(out.starts_with("3 twists of 3.4.0.1\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("minus_id=false")).count(), 2);
}

#[test]
fn conjugacy_queries() {
    assert_eq!(
        stdout(&gl2(&["conjugate", "--a", "8.6.0.4", "--b", "8.6.0.4"])),
        "conjugate by [1,0,0,1]\n"
    );
    let o = gl2(&["conjugate", "--a", "8.6.0.5", "--b", "8.6.0.4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "not conjugate\n");
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    assert_eq!(gl2(&[]).status.code(), Some(2));
    assert_eq!(gl2(&["genus"]).status.code(), Some(2));
    assert_eq!(
        gl2(&["subgroups", "--label", "3.4.0.1", "--index", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(gl2(&["genus", "--label", "99.1.0.1"]).status.code(), Some(2));
    assert_eq!(gl2(&["classify", "--primes", "17"]).status.code(), Some(2));
    assert_eq!(
        gl2(&["--groups", "/nonexistent/groups.txt", "genus", "--label", "15.15.1.1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_registry_reports_the_line() {
    let path = std::env::temp_dir().join(format!("gl2-curves-{}.txt", std::process::id()));
    std::fs::write(&path, "# curves\n11.a1 [0,-1,1,-10,-20] rank=zero torsion=5 gens=\n").unwrap();
    let o = gl2(&["--curves", path.to_str().unwrap(), "check-labels"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains(":2:"));
}
