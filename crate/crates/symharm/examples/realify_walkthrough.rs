//! Walks through the realification of one irrep step by step: the group
//! average Z over the exchange probe, its normalization to a symmetric
//! unitary C, the eigendecomposition of the real representation B, and the
//! resulting similarity S with all of its residuals.

use num_complex::Complex64;
use symharm::group::GroupName;
use symharm::irreps::Realness;
use symharm::mat::CMat;
use symharm::realify::{
    compute_z, jacobi_eigh, normalize_c, real_representation, realify_irrep,
};
use symharm::SymmetrySystem;

fn print_cmat(label: &str, m: &CMat) {
    println!("{label} =");
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols())
            .map(|j| {
                let v = m.get(i, j);
                format!("{:+.4}{:+.4}i", v.re, v.im)
            })
            .collect();
        println!("    [{}]", cells.join("  "));
    }
}

fn main() {
    // The 5-dimensional icosahedral irrep is the largest case the pipeline
    // ever meets.
    let sys = SymmetrySystem::load(GroupName::Icosahedral).expect("bundled data");
    let irrep = &sys.irreps[4];
    assert_eq!(irrep.realness, Realness::PotentiallyReal);
    println!("realifying {} p={} ({}), dimension {}", irrep.group, irrep.p, irrep.label, irrep.dim);

    let probe = CMat::exchange(irrep.dim);
    let z = compute_z(irrep, &sys.group, &probe);
    println!("\n|Z - exchange|_max = {:.3e} (the exchange probe reproduces itself)", z.max_abs_diff(&probe));

    let (c, c_z) = normalize_c(&z).expect("Z is isotropic");
    println!("c_Z = {c_z:.12}");
    print_cmat("C", c.matrix());

    let b = real_representation(&c);
    let (eigenvalues, _) = jacobi_eigh(&b).expect("eigendecomposition");
    println!("\nspectrum of the real representation B: {:?}", eigenvalues.iter().map(|v| (v * 1e12).round() / 1e12).collect::<Vec<_>>());

    let r = realify_irrep(irrep, &sys.group).expect("realification");
    print_cmat("\nS", &r.s);
    println!("\nS unitarity defect        = {:.3e}", r.s.unitarity_defect());
    println!("S Sᵀ vs C defect          = {:.3e}", r.s.mul(&r.s.transpose()).max_abs_diff(c.matrix()));
    let mut orth: f64 = 0.0;
    let mut character: f64 = 0.0;
    for g in 0..sys.group.order() {
        orth = orth.max(r.gamma_r[g].orthogonality_defect());
        let tr: f64 = (0..irrep.dim).map(|i| r.gamma_r[g].get(i, i)).sum();
        character = character.max((irrep.matrix(g).trace() - Complex64::new(tr, 0.0)).norm());
    }
    println!("realified orthogonality   = {orth:.3e}");
    println!("character preservation    = {character:.3e}");
    println!("\nGamma_r at the first 5-fold element:");
    for i in 0..irrep.dim {
        let cells: Vec<String> = (0..irrep.dim).map(|j| format!("{:+.6}", r.gamma_r[1].get(i, j))).collect();
        println!("    [{}]", cells.join("  "));
    }
}
