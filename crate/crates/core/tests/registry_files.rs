use std::path::{Path, PathBuf};

use gl2kit::{load_registries, Registries, RegistryError};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gl2kit-registry-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn files_on_disk_match_the_shipped_registries() {
    let disk = load_registries(&data("groups.txt"), &data("curves.txt"), &data("facts.txt")).unwrap();
    let shipped = Registries::shipped().unwrap();
    assert_eq!(disk.groups.len(), shipped.groups.len());
    assert_eq!(disk.curves.len(), shipped.curves.len());
    assert_eq!(disk.names, shipped.names);
    assert_eq!(disk.xh, shipped.xh);
    assert_eq!(disk.witnesses, shipped.witnesses);
    assert_eq!(disk.isogenies, shipped.isogenies);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_registries(&data("absent.txt"), &data("curves.txt"), &data("facts.txt")).unwrap_err();
    assert!(matches!(err, RegistryError::Io(..)));
}

#[test]
fn genus_zero_generators_under_a_genus_one_label_fail_validation() {
    let groups = scratch(
        "groups-bad.txt",
        "# borel mod 15 under a genus-one label\n15.15.1.1 15 [1,1,0,1];[2,0,0,1];[1,0,0,2];[7,0,0,1];[1,0,0,7]\n",
    );
    let curves = scratch("curves-empty.txt", "");
    let facts = scratch("facts-empty.txt", "");
    match load_registries(&groups, &curves, &facts).unwrap_err() {
        RegistryError::Validation(failures) => assert!(failures.iter().any(|f| f.contains("15.15.1.1"))),
        e => panic!("expected a validation error, got {e}"),
    }
}

#[test]
fn bad_curve_line_reports_its_line_number() {
    let groups = scratch("groups-ok.txt", "");
    let curves = scratch(
        "curves-bad.txt",
        "# header\n\n11.a1 [0,-1,1,-10] rank=0 torsion=5 gens=\n",
    );
    let facts = scratch("facts-ok.txt", "");
    match load_registries(&groups, &curves, &facts).unwrap_err() {
        RegistryError::Parse { line, .. } => assert_eq!(line, 3),
        e => panic!("expected a parse error, got {e}"),
    }
}
