// Every binary 2x2x2 neighborhood and the type it is stored as.
use ecurve::contrib3d::{classify_mask, ContributionType3D, PairClassCounts};

pub fn run_example() -> Result<[usize; 21], Box<dyn std::error::Error>> {
    let mut tally = [0usize; 21];
    for mask in 1u16..256 {
        let kind = classify_mask(mask as u8)?.expect("non-empty masks are stored");
        tally[kind.index()] += 1;
    }
    println!("type,active,face,edge,vertex,masks");
    for kind in ContributionType3D::ALL {
        let PairClassCounts { face, edge, vertex } = kind.pair_classes();
        println!(
            "{},{},{face},{edge},{vertex},{}",
            kind.name(),
            kind.active_cells(),
            tally[kind.index()]
        );
    }
    assert_eq!(tally.iter().sum::<usize>(), 255);
    Ok(tally)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("classify_neighborhoods");
}
