// Dump a contribution map and reweight it later without the original field.
use ecurve::cli::{reweight_dump, run_contrib_dump, run_curve, ContributionDump, RunConfig};
use ecurve::descriptors::{builtin_weights, Connectivity, Descriptor};
use ecurve::{Dimension, Distribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::generate(&[30, 20], Distribution::Uniform, 5);
    let mut json = Vec::new();
    run_contrib_dump(&cfg, &mut json)?;
    let dump: ContributionDump = serde_json::from_slice(&json)?;
    println!(
        "dump: {} bytes, {} types",
        json.len(),
        dump.contributions.len()
    );

    let ec = reweight_dump(
        &dump,
        &builtin_weights(Descriptor::Ec, Connectivity::C8, Dimension::Two)?,
    )?;
    let mut csv = Vec::new();
    run_curve(&cfg, &mut csv)?;
    let from_cli: Vec<String> = String::from_utf8(csv)?
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    let reweighted: Vec<String> = (0..ec.len()).map(|c| ec.format_value(c)).collect();
    assert_eq!(reweighted, from_cli);
    println!(
        "reweighted EC matches the curve command at all {} levels",
        ec.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("contribution_dump");
}
