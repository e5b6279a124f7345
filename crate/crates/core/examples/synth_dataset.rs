//! Writes a small synthetic dataset directory and summarizes it.
//!
//! Usage: `cargo run --example synth_dataset [out_dir]`

use std::path::PathBuf;

use pupguard::dataset::Label;
use pupguard::synthgen::{darkness_centroid, gen_dataset, GenSpec};

fn main() -> pupguard::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pupguard-synth"));
    let spec = GenSpec::new(41, 53, 10, 2);
    let ds = gen_dataset(&spec, &out)?;
    println!(
        "{}: {} pairs ({} legit, {} attack)",
        out.display(),
        ds.len(),
        ds.count_label(Label::Legitimate),
        ds.count_label(Label::Attack)
    );
    for pair in ds.iter().step_by(20) {
        let (cx, cy) = darkness_centroid(&pair.second);
        println!(
            "{} {} {:?} interval {:.3}s, second press mean {:.1}, centroid ({cx:.1}, {cy:.1})",
            pair.pair_id,
            pair.subject_id,
            pair.label,
            pair.interval()?,
            pair.second.mean_intensity()
        );
    }
    Ok(())
}
