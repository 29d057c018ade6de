//! For n = p = 7 the variety Y123 is a cone with vertex (1 : ... : 1); its
//! base Z123 is cut out by x_7 = 0. Prints binomial conditions, closure,
//! and stabilizers of points over F_7.

use rdlab::gf::{Elem, Gf};
use rdlab::paperchecks::{all_permutations, cone_closure, cone_condition, stabilizer_order, y123_system, z_representative};
use rdlab::projgeom::{points_reduced, DEFAULT_POINT_BUDGET};
use std::collections::BTreeMap;

fn main() {
    for (n, p) in [(7, 7), (8, 2), (6, 5), (9, 3)] {
        println!("n={n} p={p}: C(n,1..3) = 0 mod p: {}", cone_condition(n, p));
    }
    let f = Gf::prime(7).expect("F_7");
    let closure = cone_closure(7, &f, DEFAULT_POINT_BUDGET).expect("closure");
    println!("affine cone points: {}, counterexample: {:?}", closure.cone_points, closure.counterexample);

    let pts = points_reduced(&y123_system(7, &f).expect("Y123"), DEFAULT_POINT_BUDGET).expect("points");
    let perms = all_permutations(7);
    let mut hist = BTreeMap::new();
    for pt in &pts {
        *hist.entry(stabilizer_order(pt.coords(), &perms, &f)).or_insert(0) += 1;
    }
    println!("stabilizer orders over F_7: {hist:?}");
    let y = pts.iter().find(|p| p.coords() != [Elem::ONE; 7]).expect("a non-vertex point");
    println!("{:?} lies over {:?} in Z123", y.coords(), z_representative(y.coords(), &f));
}
