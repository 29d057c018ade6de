//! The Sp- and U-invariant hypersurfaces: invariance under generators and
//! random words, and smoothness over the first two levels of the tower.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rdlab::grouplab::{special_unitary_group, symplectic_group};
use rdlab::mvpoly::{hermitian_norm_poly, symplectic_form_poly};
use rdlab::paperchecks::{smoothness, FormFamily};
use rdlab::projgeom::DEFAULT_POINT_BUDGET;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let sp = symplectic_group(2, 3).expect("Sp4(3)");
    let f = symplectic_form_poly(2, sp.field());
    println!("f = {}", f.render());
    let g = sp.random_word(12, &mut rng);
    let delta = f.linear_substitute(&g).expect("substitution").sub(&f);
    println!("f(gx) - f(x) = 0 for a random g in Sp4(3): {}", delta.is_zero());

    let u = special_unitary_group(3, 2, true).expect("U3(2)");
    let h = hermitian_norm_poly(3, 2, u.field());
    println!("h = {}", h.render());
    let g = u.random_word(12, &mut rng);
    let delta = h.linear_substitute(&g).expect("substitution").sub(&h);
    println!("h(gx) - h(x) = 0 for a random g in U3(2): {}", delta.is_zero());

    for (kind, n, q) in [(FormFamily::Symplectic, 4, 3), (FormFamily::Hermitian, 3, 2)] {
        let (ok, detail) = smoothness(kind, n, q, 2, DEFAULT_POINT_BUDGET).expect("smoothness");
        println!("{kind:?} n={n} q={q} smooth: {ok}  {}", detail["levels"]);
    }
}
