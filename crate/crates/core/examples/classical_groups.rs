//! Orders of small symplectic and unitary groups by Schreier-Sims, against
//! the closed formulas, and the projective image of SL2(9).

use rdlab::grouplab::{projective_image, sp_order, special_unitary_group, su_order, symplectic_group};

fn main() {
    for (m, q) in [(1, 3), (2, 2), (2, 3)] {
        let g = symplectic_group(m, q).expect("Sp");
        println!("|Sp{}({q})| = {} (formula {})", 2 * m, g.order().expect("order"), sp_order(m as u32, q));
    }
    for (n, q) in [(3, 2), (4, 2)] {
        let g = special_unitary_group(n, q, false).expect("SU");
        println!("|SU{n}({q})| = {} (formula {})", g.order().expect("order"), su_order(n as u32, q));
    }
    let img = projective_image(&symplectic_group(1, 9).expect("SL2(9)"), 10_000).expect("image");
    println!(
        "PSL2(9): order {}, acting on {} points, 2-transitive: {}",
        img.group.order(),
        img.group.degree(),
        img.group.is_two_transitive()
    );
}
