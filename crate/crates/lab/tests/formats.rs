use nambu_core::dynamics::DiagnosticsTable;
use nambu_core::matrix::{random_density, random_hermitian};
use nambu_lab::descriptor::{load_functional, FunctionalDescriptor};
use nambu_lab::matrix_json::{load_density, load_matrix, read_matrix, save_matrix, to_json_string};
use nambu_lab::trajectory_csv::{format_float, write_table};
use nambu_lab::IoError;

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn matrix_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let m = random_density(3, 2, 5).unwrap().as_matrix().clone();
    let path = dir.path().join("rho.json");
    save_matrix(&path, &m).unwrap();
    let back = read_matrix(&path).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(m[(i, j)].re.to_bits(), back[(i, j)].re.to_bits());
            assert_eq!(m[(i, j)].im.to_bits(), back[(i, j)].im.to_bits());
        }
    }
    assert_eq!(to_json_string(&m), to_json_string(&back));
}

#[test]
fn non_square_matrix_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "m.json",
        r#"{"dim": 2, "re": [[1, 0, 0], [0, 1, 0]], "im": [[0, 0, 0], [0, 0, 0]]}"#,
    );
    assert!(matches!(read_matrix(&path), Err(IoError::Schema { .. })));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "m.json",
        r#"{"dim": 1, "re": [[1]], "im": [[0]], "extra": 1}"#,
    );
    assert!(read_matrix(&path).is_err());
}

#[test]
fn non_hermitian_matrix_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "h.json",
        r#"{"dim": 2, "re": [[1, 2], [0, 1]], "im": [[0, 0], [0, 0]]}"#,
    );
    let err = load_matrix(&path).unwrap_err();
    assert!(matches!(err, IoError::Invalid { .. }), "{err}");
}

#[test]
fn negative_trace_density_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "rho.json", r#"{"dim": 1, "re": [[-1]], "im": [[0]]}"#);
    let err = load_density(&path).unwrap_err().to_string();
    assert!(err.contains("PSD"), "{err}");
}

#[test]
fn identity_loads_as_density() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "id.json",
        r#"{"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}"#,
    );
    let rho = load_density(&path).unwrap();
    assert_eq!(rho.trace_real(), 2.0);
}

#[test]
fn malformed_json_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "bad.json", "{ not json");
    assert!(matches!(read_matrix(&path), Err(IoError::Json { .. })));
    assert!(matches!(
        read_matrix(&dir.path().join("missing.json")),
        Err(IoError::Io { .. })
    ));
}

#[test]
fn descriptors_parse_and_build() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"kind": "renyi_a", "alpha": 3}"#,
            FunctionalDescriptor::RenyiA { alpha: 3.0 },
        ),
        (
            r#"{"kind": "renyi_b", "alpha": 1.5}"#,
            FunctionalDescriptor::RenyiB { alpha: 1.5 },
        ),
        (
            r#"{"kind": "casimir", "n": 2}"#,
            FunctionalDescriptor::Casimir { n: 2 },
        ),
        (
            r#"{"kind": "casimir_function", "phi": "c2_half"}"#,
            FunctionalDescriptor::CasimirFunction {
                phi: "c2_half".into(),
            },
        ),
    ];
    for (i, (body, expected)) in cases.into_iter().enumerate() {
        let desc = load_functional(&write(&dir, &format!("f{i}.json"), body)).unwrap();
        assert_eq!(desc, expected);
        assert!(desc.build().is_ok());
        assert_eq!(desc.dim(), None);
    }
    let linear = format!(
        r#"{{"kind": "linear", "matrix": {}}}"#,
        to_json_string(random_hermitian(3, 1).as_matrix())
    );
    let desc = load_functional(&write(&dir, "lin.json", &linear)).unwrap();
    assert_eq!(desc.dim(), Some(3));
    assert!(desc.build().is_ok());
}

#[test]
fn invalid_descriptors_fail_to_build() {
    let dir = tempfile::tempdir().unwrap();
    let bad_alpha =
        load_functional(&write(&dir, "a.json", r#"{"kind": "renyi_a", "alpha": 1}"#)).unwrap();
    assert!(bad_alpha.build().is_err());
    let bad_phi = load_functional(&write(
        &dir,
        "p.json",
        r#"{"kind": "casimir_function", "phi": "nope"}"#,
    ))
    .unwrap();
    assert!(bad_phi.build().is_err());
    assert!(load_functional(&write(&dir, "k.json", r#"{"kind": "entropy"}"#)).is_err());
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    for x in [std::f64::consts::PI, -1.0 / 3.0, 6.02e23, 1e-300] {
        let s = format_float(x);
        assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    }
}

#[test]
fn csv_table_layout() {
    let table = DiagnosticsTable {
        header: vec!["t".into(), "C1".into()],
        rows: vec![vec![0.0, 1.0], vec![0.5, 0.25]],
    };
    let mut out = Vec::new();
    write_table(&mut out, &table).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(
        lines,
        [
            "t,C1",
            "0.0000000000000000e0,1.0000000000000000e0",
            "5.0000000000000000e-1,2.5000000000000000e-1"
        ]
    );
}
