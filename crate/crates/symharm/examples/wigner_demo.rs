//! Demonstrates the Wigner machinery: the defining rotational property that
//! pins the convention, the product rule in the row-vector orientation, and
//! the sparse transforms to the real-harmonic basis.

use num_complex::Complex64;
use symharm::group::GroupName;
use symharm::harmonics::{
    check_d, hat_d, real_sph_harm_vector, sph_harm_vector, ul_matrix, wigner_d_matrix,
    SphericalAngles,
};
use symharm::rng::SplitMix64;
use symharm::FiniteRotationGroup;

fn main() {
    let group = FiniteRotationGroup::build(GroupName::Icosahedral).expect("bundled data");
    let mut rng = SplitMix64::new(2024);
    let l = 6;

    let mut defining: f64 = 0.0;
    let mut pointwise_real: f64 = 0.0;
    for e in &group.elements {
        let d = wigner_d_matrix(l, &e.rotation).unwrap().d;
        let cd = check_d(l, &e.rotation).unwrap();
        for _ in 0..5 {
            let (theta, phi) = rng.next_direction();
            let a = SphericalAngles::new(theta, phi);
            let x = a.to_unit_vector();
            let rx = SphericalAngles::from_vector(e.rotation.inverse().apply(x));
            let y = sph_harm_vector(l, a).unwrap();
            let y_rot = sph_harm_vector(l, rx).unwrap();
            for m in 0..(2 * l + 1) {
                let mut acc = Complex64::new(0.0, 0.0);
                for mp in 0..(2 * l + 1) {
                    acc += d.get(m, mp) * y[mp];
                }
                defining = defining.max((acc - y_rot[m]).norm());
            }
            let cy = real_sph_harm_vector(l, a).unwrap();
            let cy_rot = real_sph_harm_vector(l, rx).unwrap();
            for m in 0..(2 * l + 1) {
                let acc: f64 = (0..(2 * l + 1)).map(|mp| cd.get(m, mp) * cy[mp]).sum();
                pointwise_real = pointwise_real.max((acc - cy_rot[m]).abs());
            }
        }
    }
    println!("defining property  Y_l(R^-1 x) = D_l(R) Y_l(x):      worst {defining:.3e}");
    println!("real counterpart   cY_l(R^-1 x) = cD_l(R) cY_l(x):   worst {pointwise_real:.3e}");

    let mut product: f64 = 0.0;
    for _ in 0..200 {
        let g = (rng.next_u64() % group.order() as u64) as usize;
        let h = (rng.next_u64() % group.order() as u64) as usize;
        let dg = wigner_d_matrix(l, &group.elements[g].rotation).unwrap().d;
        let dh = wigner_d_matrix(l, &group.elements[h].rotation).unwrap().d;
        let dgh = wigner_d_matrix(l, &group.elements[group.mul(g, h)].rotation).unwrap().d;
        product = product.max(dh.mul(&dg).max_abs_diff(&dgh));
    }
    println!("product rule       D(R_g R_h) = D(R_h) D(R_g):       worst {product:.3e}");

    // Sparsity of U_l and the branchwise transforms.
    let ul = ul_matrix(l);
    let nnz = (0..(2 * l + 1))
        .map(|i| (0..(2 * l + 1)).filter(|&j| ul.u.get(i, j).norm() > 0.0).count())
        .sum::<usize>();
    println!(
        "U_{l} has {nnz} nonzero entries out of {} (at most two per row/column)",
        (2 * l + 1) * (2 * l + 1)
    );
    let r = &group.elements[7].rotation;
    let dense = ul.u.hermitian().mul(&wigner_d_matrix(l, r).unwrap().d);
    let sparse = hat_d(l, r).unwrap();
    println!("branchwise hatD vs dense product:                    worst {:.3e}", sparse.max_abs_diff(&dense));
}
