//! End-to-end exercises of the command-line interface: exit codes, file
//! outputs, determinism and the data-directory override.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symharm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn symharm")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symharm-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["info"]).status.code(), Some(2)); // missing --group
    assert_eq!(run(&["info", "--group", "Q"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--in", "x", "--grid", "nonsense", "--out", "y"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--group", "I"]).status.code(), Some(2)); // missing --lmax
}

#[test]
fn data_failures_exit_with_1() {
    // A well-formed invocation against a missing input file is not a usage
    // error.
    let out = run(&["eval", "--in", "/nonexistent/block.coef", "--grid", "8x8", "--out", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("FAILURE"), "stdout: {text}");
}

#[test]
fn info_reports_live_group_data() {
    let out = run(&["info", "--group", "I"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N_g 60"));
    assert!(text.contains("N_rep 5"));
    assert!(text.contains("dims 1,3,3,4,5"));
    assert!(text.contains("potentially_real 1,2,3,4,5"));

    let out = run(&["info", "--group", "T"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N_g 12"));
    assert!(text.contains("dims 1,1,1,3"));
    assert!(text.contains("potentially_real 1,4"));
    assert!(text.contains("essentially complex"));
}

#[test]
fn verify_is_deterministic_and_exits_zero() {
    let a = run(&["verify", "--group", "O", "--lmax", "6", "--seed", "7"]);
    let b = run(&["verify", "--group", "O", "--lmax", "6", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "verify output must be byte-identical across runs");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("CHECK quadrature_gram"));
    assert!(text.trim_end().ends_with("RESULT PASS"));
}

#[test]
fn basis_eval_mesh_round_trip() {
    let dir = temp_dir("roundtrip");
    // Write the icosahedral degree-6 blocks (the invariant lives at p = 1).
    let out = run(&["basis", "--group", "I", "--l", "6", "--p", "1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let block_path = dir.join("i_l6_p1_n1_real.coef");
    assert!(block_path.exists());

    // Saved file reloads bit-exactly through the library.
    let block = symharm::io::load_block(&block_path).unwrap();
    assert_eq!(block.p, 1);
    assert_eq!(block.l, 6);

    // eval: header plus one line per grid point.
    let csv_path = dir.join("eval.csv");
    let out = run(&[
        "eval",
        "--in",
        block_path.to_str().unwrap(),
        "--grid",
        "9x8",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "theta,phi,f_1");
    assert_eq!(lines.len(), 1 + 9 * 8);
    assert!(!csv.contains('\r'));

    // mesh: a watertight OBJ whose extrema sit on the 5-fold axes.
    let obj_path = dir.join("surface.obj");
    let out = run(&[
        "mesh",
        "--in",
        block_path.to_str().unwrap(),
        "--j",
        "1",
        "--out",
        obj_path.to_str().unwrap(),
        "--grid",
        "64x128",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let obj = std::fs::read_to_string(&obj_path).unwrap();
    check_watertight(&obj);

    let _ = std::fs::remove_dir_all(&dir);
}

fn check_watertight(obj: &str) {
    let mut edges: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut faces = 0;
    for line in obj.lines() {
        if let Some(rest) = line.strip_prefix("f ") {
            faces += 1;
            let idx: Vec<usize> = rest.split_whitespace().map(|t| t.parse().unwrap()).collect();
            assert_eq!(idx.len(), 3, "faces must be triangles");
            for k in 0..3 {
                let (a, b) = (idx[k], idx[(k + 1) % 3]);
                assert_ne!(a, b, "degenerate edge in face");
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
    }
    assert!(faces > 0);
    for (edge, count) in edges {
        assert_eq!(count, 2, "edge {edge:?} is shared by {count} faces, not 2");
    }
}

/// The degree-6 icosahedral invariant has its extrema of one kind exactly on
/// the twelve vertex directions (the 5-fold axes).
#[test]
fn mesh_extrema_of_the_degree_six_invariant_are_icosahedral() {
    use symharm::basis::assemble_basis;
    use symharm::io::{local_extrema, radius_grid, MeshSpec};
    use symharm::system::SymmetrySystem;

    let sys = SymmetrySystem::load(symharm::GroupName::Icosahedral).unwrap();
    let set = assemble_basis(&sys, 6).unwrap();
    let block = set
        .real_blocks
        .iter()
        .find(|b| b.p == 1 && b.n == 1)
        .expect("degree-6 invariant block");
    let spec = MeshSpec::for_block(block, 0, 64, 128).unwrap();
    let grid = radius_grid(block, 0, &spec).unwrap();
    let (maxima, minima) = local_extrema(&grid);

    // Twelve five-fold directions: both ends of the six 5-fold axes.
    let mut five_fold_dirs: Vec<[f64; 3]> = Vec::new();
    for e in &sys.group.elements {
        if sys.group.element_order(e.index) == 5 {
            let (axis, _) = e.axis_angle;
            for sign in [1.0, -1.0] {
                let dir = [sign * axis[0], sign * axis[1], sign * axis[2]];
                if !five_fold_dirs
                    .iter()
                    .any(|d| (d[0] - dir[0]).abs() + (d[1] - dir[1]).abs() + (d[2] - dir[2]).abs() < 1e-6)
                {
                    five_fold_dirs.push(dir);
                }
            }
        }
    }
    assert_eq!(five_fold_dirs.len(), 12);

    let grid_dir = |i: usize, j: usize| -> [f64; 3] {
        let theta = std::f64::consts::PI * i as f64 / 63.0;
        let phi = 2.0 * std::f64::consts::PI * j as f64 / 128.0;
        [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
    };
    let aligned = |points: &[(usize, usize)]| -> bool {
        points.iter().all(|&(i, j)| {
            let d = grid_dir(i, j);
            five_fold_dirs
                .iter()
                .any(|v| (d[0] * v[0] + d[1] * v[1] + d[2] * v[2]) > (5.0f64).to_radians().cos())
        })
    };
    // One extremum class has exactly the 12 vertex directions; which class
    // depends on the (non-unique) overall sign of the block.
    let vertex_class = if maxima.len() == 12 { &maxima } else { &minima };
    assert_eq!(vertex_class.len(), 12, "maxima {} minima {}", maxima.len(), minima.len());
    assert!(aligned(vertex_class), "extrema stray from the 5-fold axes");
}

#[test]
fn realify_writes_similarity_and_real_irrep_tables() {
    let dir = temp_dir("realify");
    let out = run(&["realify", "--group", "O", "--p", "3", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let s_file = symharm::io::load_coefficient_file(&dir.join("o_p3_similarity.coef")).unwrap();
    assert_eq!(s_file.kind, symharm::io::TableKind::Similarity);
    assert!(s_file.matrix.unitarity_defect() < 1e-10);

    let g_file = symharm::io::load_coefficient_file(&dir.join("o_p3_real_irrep.coef")).unwrap();
    assert_eq!(g_file.kind, symharm::io::TableKind::RealIrrep);
    // 24 stacked 2x2 orthogonal matrices, all real.
    assert_eq!(g_file.matrix.rows(), 24 * 2);
    assert_eq!(g_file.matrix.cols(), 2);
    assert!(g_file.matrix.max_imag() == 0.0);
    for g in 0..24 {
        let mut m = symharm::mat::RMat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, g_file.matrix.get(2 * g + i, j).re);
            }
        }
        assert!(m.orthogonality_defect() < 1e-10);
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn data_dir_override_is_honored() {
    // A broken override directory must fail loudly...
    let dir = temp_dir("override");
    std::fs::write(dir.join("group_i.txt"), "schema 1\ngroup I\norder 60\ngenerators 0\nend\n")
        .unwrap();
    let out = bin()
        .args(["info", "--group", "I"])
        .env("SYMHARM_DATA_DIR", dir.to_str().unwrap())
        .output()
        .unwrap();
    assert!(!out.status.success());

    // ...while a faithful copy of the bundled data behaves identically.
    let baseline = run(&["info", "--group", "I"]);
    for name in ["group_i.txt", "irreps_i.txt"] {
        let bundled = std::fs::read(
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/data").join(name),
        )
        .unwrap();
        std::fs::write(dir.join(name), bundled).unwrap();
    }
    let overridden = bin()
        .args(["info", "--group", "I"])
        .env("SYMHARM_DATA_DIR", dir.to_str().unwrap())
        .output()
        .unwrap();
    assert!(overridden.status.success());
    assert_eq!(baseline.stdout, overridden.stdout);
    let _ = std::fs::remove_dir_all(&dir);
}
