//! Counting F_q-points of Y123 = {s1 = s2 = s3 = 0} in P^6 and of random
//! linear slices.

use rdlab::gf::Gf;
use rdlab::paperchecks::y123_system;
use rdlab::projgeom::{count_points_reduced, for_each_projective, slice_point_count, DEFAULT_POINT_BUDGET};

fn main() {
    let f = Gf::prime(7).expect("F_7");
    let sys = y123_system(7, &f).expect("Y123");
    let all = for_each_projective(7, &f, DEFAULT_POINT_BUDGET, |_| {}).expect("P^6(F_7)");
    let on_y = count_points_reduced(&sys, DEFAULT_POINT_BUDGET).expect("count");
    println!("P^6(F_7) has {all} points, {on_y} of which lie on Y123");

    let stats = slice_point_count(&sys, 3, 20, 42, None, DEFAULT_POINT_BUDGET).expect("slices");
    println!("20 random P^3 slices: counts {:?}, Bezout ceiling {}", stats.histogram, stats.ceiling);
}
