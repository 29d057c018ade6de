//! Derives the resolvent-degree bound table from the embedded fact base
//! and prints two derivation trees.

use rdlab::rdengine::{Engine, TABLE_CHARS, TABLE_GROUPS};

fn main() {
    let mut engine = Engine::default_base();
    let rounds = engine.derive();
    println!("fixpoint after {rounds} rounds\n");
    print!("{}", engine.table(&TABLE_GROUPS, &TABLE_CHARS).expect("table").render());
    for (g, p) in [("S7", 3), ("S8", 2)] {
        println!("\n{}", engine.explain(g, p).expect("trace").render());
    }
    if let Some(eq) = engine.equality("S7", "S6", 5) {
        println!("rd_5(S7) = rd_5(S6): {} steps forward, {} back", eq.forward.len(), eq.backward.len());
    }
}
