//! Exports artifacts for external tools: coefficient tables for each
//! octahedral degree-6 block, a CSV tabulation and an OBJ surface per
//! function. Everything lands under `export_out/`.

use std::path::PathBuf;

use symharm::basis::assemble_basis;
use symharm::group::GroupName;
use symharm::io::{eval_csv, obj_from_radius_grid, radius_grid, save_block, MeshSpec};
use symharm::SymmetrySystem;

fn main() {
    let out = PathBuf::from("export_out");
    std::fs::create_dir_all(&out).expect("create export_out");
    let sys = SymmetrySystem::load(GroupName::Octahedral).expect("bundled data");
    let l = 6;
    let set = assemble_basis(&sys, l).expect("assembly");
    for block in &set.real_blocks {
        let stem = format!("o_l{l}_p{}_n{}", block.p, block.n);
        let coef = out.join(format!("{stem}.coef"));
        save_block(&coef, block).expect("save block");

        let csv = eval_csv(block, 31, 64).expect("evaluate");
        std::fs::write(out.join(format!("{stem}.csv")), csv).expect("write csv");

        // One surface per vector component.
        for j in 0..block.dim() {
            let spec = MeshSpec::for_block(block, j, 64, 128).expect("mesh spec");
            let grid = radius_grid(block, j, &spec).expect("radius grid");
            let obj = obj_from_radius_grid(&grid, &spec);
            std::fs::write(out.join(format!("{stem}_j{}.obj", j + 1)), obj).expect("write obj");
        }
        println!("exported {stem} (dim {})", block.dim());
    }
    println!("wrote {}", out.display());
}
