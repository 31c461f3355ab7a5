//! Solves an instance, writes the certificate, then re-checks it as an
//! independent solution file.

use nearstable::certificate::{sha256_hex, shm_certificate, verify_certificate};
use nearstable::fixtures::triangle;
use nearstable::io::{instance_to_json, parse_instance, parse_solution, to_canonical_string};
use nearstable::model::Instance;
use nearstable::shm::solve_shm;

fn main() -> nearstable::Result<()> {
    let text = to_canonical_string(&instance_to_json(&Instance::Shm(triangle()), None));
    let (inst, _) = parse_instance(&text)?;
    let Instance::Shm(shm) = &inst else {
        unreachable!()
    };

    let sol = solve_shm(shm)?;
    let cert = shm_certificate(shm, sha256_hex(text.as_bytes()), &sol, false);
    let cert_text = to_canonical_string(&cert.to_json());
    print!("{cert_text}");

    let solution = parse_solution(&cert_text, &inst)?;
    let check = verify_certificate(
        &inst,
        &solution,
        vec![
            ("instance".into(), sha256_hex(text.as_bytes())),
            ("solution".into(), sha256_hex(cert_text.as_bytes())),
        ],
    );
    println!("{}", check.summary());
    assert!(check.passed);
    Ok(())
}
