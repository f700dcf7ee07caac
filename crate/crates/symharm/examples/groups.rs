//! Builds the three rotation groups and prints their structure: order,
//! conjugacy classes by rotation angle, and a round-trip check of the Euler
//! and axis-angle decompositions.

use symharm::group::GroupName;
use symharm::FiniteRotationGroup;

fn main() {
    for name in GroupName::all() {
        let group = FiniteRotationGroup::build(name).expect("bundled group data");
        println!("group {name}: order {}", group.order());
        for (i, class) in group.classes.iter().enumerate() {
            let (axis, theta) = group.elements[class[0]].axis_angle;
            println!(
                "  class {i}: size {:2}, angle {:.6} rad, representative axis ({:+.4}, {:+.4}, {:+.4})",
                class.len(),
                theta,
                axis[0],
                axis[1],
                axis[2]
            );
        }
        let mut worst: f64 = 0.0;
        for e in &group.elements {
            let (a, b, c) = e.euler_zyz;
            let rebuilt = symharm::group::from_euler_zyz(a, b, c);
            worst = worst.max(rebuilt.max_abs_diff(&e.rotation));
            let (axis, theta) = e.axis_angle;
            let rebuilt = symharm::RotationMatrix::about_axis(axis, theta);
            worst = worst.max(rebuilt.max_abs_diff(&e.rotation));
        }
        println!("  decomposition round-trip worst error {worst:.3e}");
        println!();
    }
}
