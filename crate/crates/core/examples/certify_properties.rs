// Runs every certifier on the n = 9 instance and prints the JSON
// certificates, as the `certify` subcommand would.

use sparselab::counterexample::construct;
use sparselab::report::{certify, CertifyParams, Property};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = construct(1.0)?;
    let runs = [
        (
            Property::Rn,
            CertifyParams {
                t: Some(3),
                c: Some(2.0),
                ..Default::default()
            },
        ),
        (
            Property::RnUniform,
            CertifyParams {
                t: Some(3),
                c: Some(2.0),
                ..Default::default()
            },
        ),
        (
            Property::Re,
            CertifyParams {
                t: Some(3),
                samples: 2000,
                ..Default::default()
            },
        ),
        (
            Property::Rip,
            CertifyParams {
                t: Some(1),
                ..Default::default()
            },
        ),
        (Property::Spark, CertifyParams::default()),
        (
            Property::UniqueSparsest,
            CertifyParams {
                s: Some(3),
                y: Some(inst.y.clone()),
                ..Default::default()
            },
        ),
    ];
    for (property, params) in runs {
        let cert = certify(&inst.x, property, &params)?;
        println!("{}", serde_json::to_string(&cert)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
