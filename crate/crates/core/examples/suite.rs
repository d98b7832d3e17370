// Seeded randomized battery over every invariant, summarized as worst-case checks.

use projgeom::suite;

fn main() -> projgeom::Result<()> {
    let report = suite::run(3, 11, 10)?;
    for (c, failed) in report.checks.iter().zip(&report.failures) {
        println!("{:<36} {:>10.3e} {:>10.3e} {:>5} {failed}", c.name, c.value, c.tolerance, c.pass);
    }
    println!("{} cases, {} evaluations, all pass: {}", report.cases, report.evaluations, report.all_pass());
    Ok(())
}
