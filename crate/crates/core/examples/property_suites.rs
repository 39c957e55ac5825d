//! Runs the seeded property suites used by `qet check`.

use qet::suite::{run_suite, SuiteName};

fn main() -> qet::Result<()> {
    for name in [SuiteName::Transition, SuiteName::Gksl] {
        let report = run_suite(name, 42, Some(10))?;
        for line in report.lines() {
            println!("{line}");
        }
    }
    Ok(())
}
