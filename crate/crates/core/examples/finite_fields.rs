//! Arithmetic in F_49 = F_7[t]/(m(t)): Frobenius, conjugation and norms.

use rdlab::gf::Gf;

fn main() {
    let f = Gf::quadratic_extension(7, 1).expect("F_49");
    println!("F_{} with modulus {:?}", f.size(), f.modulus());
    let g = f.generator();
    println!("generator {:?} has order {}", f.coefficients(g), f.size() - 1);
    for a in f.nonzero_elements().filter(|&a| !f.is_prime_subfield_element(a)).take(5) {
        let c = f.conj(a).expect("quadratic extension");
        let n = f.norm(a).expect("quadratic extension");
        println!(
            "a = {:?}  a^7 = {:?}  N(a) = {:?}  in F_7: {}",
            f.coefficients(a),
            f.coefficients(c),
            f.coefficients(n),
            f.is_prime_subfield_element(n)
        );
    }
    let tower = f.extension(3, 1 << 20).expect("F_7^6");
    println!("degree-3 extension has {} elements", tower.size());
}
