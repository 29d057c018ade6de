//! W(E6) from its root system; the derived subgroup has index 2 and is
//! simple of order 25920.

use rdlab::grouplab::{derived_subgroup, is_simple, weyl_e6, DEFAULT_ORDER_BUDGET};

fn main() {
    let (w, roots) = weyl_e6().expect("W(E6)");
    println!("{} roots, |W(E6)| = {}", roots.len(), w.order());
    let d = derived_subgroup(&w);
    println!("|W(E6)'| = {}, simple: {}", d.order(), is_simple(&d, DEFAULT_ORDER_BUDGET).expect("simplicity"));
}
