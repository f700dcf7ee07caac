//! Reconciles the icosahedral rotation matrices with the bundled
//! 3-dimensional irrep p = 2: finds the relabeling that matches the
//! multiplication tables and the unitary similarity S with
//! `Gamma(g) = Sᴴ R_{gamma(g)} S`, then cross-checks that p = 2 and p = 3
//! are genuinely inequivalent as representations.

use symharm::group::GroupName;
use symharm::irreps::{find_intertwiner, reconcile_orderings, IntertwinerOutcome};
use symharm::mat::CMat;
use symharm::SymmetrySystem;

fn main() {
    let sys = SymmetrySystem::load(GroupName::Icosahedral).expect("bundled data");
    let rotations: Vec<CMat> =
        sys.group.elements.iter().map(|e| e.rotation.to_rmat().to_complex()).collect();

    let target = &sys.irreps[1];
    let result = reconcile_orderings(&rotations, target, &sys.group).expect("reconciliation");
    let moved = result.permutation.iter().enumerate().filter(|&(i, &g)| i != g).count();
    println!("relabeling found; {moved} of 60 indices move (0 means the orderings already agree)");
    println!("similarity S with Gamma_2(g) = Sᴴ R_gamma(g) S:");
    for i in 0..3 {
        let cells: Vec<String> = (0..3)
            .map(|j| {
                let v = result.similarity.get(i, j);
                format!("{:+.6}{:+.6}i", v.re, v.im)
            })
            .collect();
        println!("    [{}]", cells.join("  "));
    }
    let mut worst: f64 = 0.0;
    for g in 0..sys.group.order() {
        let lhs = result
            .similarity
            .hermitian()
            .mul(&rotations[result.permutation[g]])
            .mul(&result.similarity);
        worst = worst.max(lhs.max_abs_diff(target.matrix(g)));
    }
    println!("similarity residual over all 60 elements: {worst:.3e}");

    match find_intertwiner(&sys.irreps[1].matrices, &sys.irreps[2].matrices).unwrap() {
        IntertwinerOutcome::Inequivalent => {
            println!("p=2 vs p=3: inequivalent, as their characters already show")
        }
        IntertwinerOutcome::Equivalent(_) => unreachable!("distinct irreps cannot intertwine"),
    }
}
