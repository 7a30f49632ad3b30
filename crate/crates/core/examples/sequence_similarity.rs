//! Compares preceding-intent sequences with Levenshtein, Jaro and
//! Jaro-Winkler. Sequences are most recent first.

use intentspace::seqmetric::{jaro, levenshtein, IntentRegistry, Winkler};

fn main() {
    let mut reg = IntentRegistry::new();
    let mut seq = |labels: &[&str]| labels.iter().map(|l| reg.intern(l)).collect::<Vec<_>>();
    let recent = seq(&["Commutes to Office", "Read News", "Check Mail"]);
    let stored = [
        ("same order", seq(&["Commutes to Office", "Read News", "Check Mail"])),
        ("other branch", seq(&["Commutes to Office", "Attend Calls", "Check Mail"])),
        ("swapped", seq(&["Read News", "Commutes to Office", "Check Mail"])),
        ("older only", seq(&["Check Mail"])),
        ("empty", Vec::new()),
    ];
    let w = Winkler::default();
    println!("{:14} {:>5} {:>7} {:>7}", "stored", "lev", "jaro", "jw");
    for (name, s) in &stored {
        println!(
            "{name:14} {:>5} {:>7.4} {:>7.4}",
            levenshtein(&recent, s),
            jaro(&recent, s),
            w.similarity(&recent, s)
        );
    }
    println!("\nJW(MARTHA, MARHTA) = {:.4}", w.similarity(b"MARTHA", b"MARHTA"));
}
