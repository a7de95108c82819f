//! Walks through the combinatorics behind admissible media: the 64
//! rotator configurations of a hexagon fall into 13 symmetry classes,
//! 7 of which are admissible under the shipped table, and the chance
//! that an independent medium decorates a hexagon admissibly is a
//! polynomial in the right-rotator probability.
//!
//!     cargo run --release --example admissible_census

use honeygas::admissibility::{
    admissible_polynomial, admissible_probability, ClassTable, HexConfig, CLASS_COUNT,
};

fn main() {
    let table = ClassTable::shipped_default();

    println!("symmetry classes of hexagon rotator configurations:");
    println!("  {:<8} {:>5} {:>6}  status", "class", "orbit", "rights");
    let mut admissible_classes = 0;
    let mut admissible_configs = 0;
    for entry in table.classes() {
        let status = if entry.admissible {
            admissible_classes += 1;
            admissible_configs += entry.orbit_size;
            "admissible"
        } else {
            "excluded"
        };
        println!(
            "  {:<8} {:>5} {:>6}  {status}",
            entry.representative.to_string(),
            entry.orbit_size,
            entry.representative.right_count()
        );
    }
    println!(
        "  {admissible_classes} of {CLASS_COUNT} classes, {admissible_configs} of {} configurations",
        HexConfig::COUNT
    );

    println!();
    let coeffs = admissible_polynomial(&table);
    println!("admissibility probability of one hexagon, as a polynomial in p:");
    print!("  P(p) = {}", coeffs[0]);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        if c != 0 {
            print!(" {} {}*p^{k}", if c < 0 { "-" } else { "+" }, c.abs());
        }
    }
    println!();

    println!();
    println!("  p      P(p)");
    for p in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
        println!("  {p:<5} {:.6}", admissible_probability(p, &table));
    }
    println!();
    println!("P is symmetric under exchanging left and right rotators,");
    println!("equals 1 at the uniform media, and dips to P(1/2) = 0.34375.");

    println!();
    println!("the variant table swaps the two-right and four-right choices");
    let variant = ClassTable::shipped_variant();
    println!(
        "and leaves the polynomial unchanged: P(1/2) = {}",
        admissible_probability(0.5, &variant)
    );
}
