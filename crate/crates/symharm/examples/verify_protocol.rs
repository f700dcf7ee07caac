//! Runs the numerical verification protocol for every group and prints the
//! per-check reports (the same output the `verify` subcommand produces).

use symharm::group::GroupName;
use symharm::protocol::run_verification;
use symharm::SymmetrySystem;

fn main() {
    let lmax = std::env::args()
        .nth(1)
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(8);
    for name in GroupName::all() {
        let sys = SymmetrySystem::load(name).expect("bundled data");
        let report = run_verification(&sys, lmax, 0, 30).expect("protocol run");
        print!("{}", report.render());
        assert!(report.all_pass());
        println!();
    }
}
