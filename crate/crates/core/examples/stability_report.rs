//! All four analyses on one converter, side by side.

use cmc_fsi::config::presets;
use cmc_fsi::report::run_report;

fn main() {
    for cfg in [presets::example1(true), presets::example2(0.52), presets::example3(true)] {
        println!("{}", run_report(&cfg).to_text());
    }
}
