//! Assembles symmetry-adapted bases and shows what comes out: per-irrep
//! block counts against the character oracle, completeness of the stacked
//! coefficient matrix, and a sample evaluation.

use symharm::basis::{assemble_basis, evaluate_basis};
use symharm::group::GroupName;
use symharm::harmonics::SphericalAngles;
use symharm::irreps::multiplicity_on_sphere;
use symharm::SymmetrySystem;

fn main() {
    for name in GroupName::all() {
        let sys = SymmetrySystem::load(name).expect("bundled data");
        println!("group {name}");
        for l in [0usize, 2, 6, 10, 15] {
            let set = assemble_basis(&sys, l).expect("assembly");
            let counts: Vec<String> = set
                .counts
                .iter()
                .map(|&(p, n)| {
                    let oracle = multiplicity_on_sphere(&sys.irreps[p - 1], &sys.group, l);
                    assert_eq!(n, oracle);
                    format!("p{p}:{n}")
                })
                .collect();
            let stacked = set.stacked_real();
            println!(
                "  l={l:>2}: {} of {} functions [{}], stacked {}x{}, orthogonality defect {:.2e}",
                set.total_functions(),
                2 * l + 1,
                counts.join(" "),
                stacked.rows(),
                stacked.cols(),
                stacked.orthogonality_defect()
            );
        }
        println!();
    }

    // Evaluate the degree-6 icosahedral invariant along a path from the pole
    // (a 5-fold axis) to the equator.
    let sys = SymmetrySystem::load(GroupName::Icosahedral).unwrap();
    let set = assemble_basis(&sys, 6).unwrap();
    let invariant = set.real_blocks.iter().find(|b| b.p == 1).unwrap();
    println!("degree-6 icosahedral invariant along phi = 0:");
    for k in 0..=6 {
        let theta = std::f64::consts::PI / 2.0 * k as f64 / 6.0;
        let v = evaluate_basis(invariant, SphericalAngles::new(theta, 0.0)).unwrap()[0];
        println!("  theta = {theta:.3}: F = {v:+.6}");
    }
}
