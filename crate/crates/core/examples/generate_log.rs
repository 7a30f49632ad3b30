//! Generates each canned scenario and prints the first rows of its log.

use intentspace::cli::log::write_log;
use intentspace::synthgen::{generate, Scenario};

fn main() -> intentspace::Result<()> {
    for s in Scenario::ALL {
        let (spec, drifts) = s.spec();
        let events = generate(&spec, &drifts)?;
        println!("# {} ({} events over {} days)", s.name(), events.len(), spec.duration_days);
        write_log(std::io::stdout(), &events[..5])?;
        println!();
    }
    Ok(())
}
