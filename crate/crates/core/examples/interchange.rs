// JSON matrix documents and the result document printed by the command line tool.

use projgeom::check::Check;
use projgeom::io::{parse_document, print_matrix, sha256_hex, Output, ResultDocument};
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    let mut rng = sample::rng(8);
    let m = sample::complex(&mut rng, 2, 1.0);
    let text = print_matrix(&m, Some("random"));
    println!("{text}");

    let (back, label) = parse_document(text.as_bytes())?;
    println!("label {:?}, bit-exact round trip: {}", label, back == m);

    match parse_document(b"{\"n\": 2, \"data\": [[1, 0]]}") {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("rejected: {e}"),
    }

    let mut doc = ResultDocument::new("demo");
    doc.output("matrix", Output::Matrix(back));
    doc.output("trace", Output::Scalar(m.trace().re));
    doc.checks.push(Check::at_most("roundtrip", 0.0, 0.0));
    println!("{}", doc.to_json());
    println!("sha256 of the input text: {}", sha256_hex(text.as_bytes()));
    Ok(())
}
