//! Prints, for each group, the character table over the conjugacy classes,
//! the Frobenius-Schur classification, and the multiplicities of each irrep
//! inside the first few spherical-harmonic degrees.

use symharm::group::GroupName;
use symharm::irreps::multiplicity_on_sphere;
use symharm::SymmetrySystem;

fn main() {
    for name in GroupName::all() {
        let sys = SymmetrySystem::load(name).expect("bundled data");
        println!("group {name}");
        print!("{:>10}", "class size");
        for class in &sys.group.classes {
            print!("{:>10}", class.len());
        }
        println!();
        for irrep in &sys.irreps {
            let chi = irrep.character();
            print!("{:>4} ({:>2}) |", irrep.label, irrep.realness.to_string().chars().next().unwrap_or('?'));
            for class in &sys.group.classes {
                let v = chi[class[0]];
                if v.im.abs() < 1e-12 {
                    print!("{:>10.4}", v.re);
                } else {
                    print!("{:>10}", format!("{:.2}{:+.2}i", v.re, v.im));
                }
            }
            println!();
        }
        println!("multiplicities N_p;l for l = 0..12:");
        for irrep in &sys.irreps {
            let row: Vec<String> = (0..=12)
                .map(|l| multiplicity_on_sphere(irrep, &sys.group, l).to_string())
                .collect();
            println!("  p={} ({:>2}): {}", irrep.p, irrep.label, row.join(" "));
        }
        println!();
    }
}
