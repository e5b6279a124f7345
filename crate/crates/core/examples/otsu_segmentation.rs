//! Otsu threshold and background masking of a synthetic press.
//!
//! Usage: `cargo run --example otsu_segmentation [out_dir]`

use std::path::PathBuf;

use pupguard::preprocess::{binarize, otsu_threshold, segment, Polarity};
use pupguard::synthgen::{gen_fingerprint_image, Press, SubjectProfile};

fn main() -> pupguard::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let profile = SubjectProfile::from_population(3, 0);
    let img = gen_fingerprint_image(&profile, &Press::default(), 9);
    let stats = otsu_threshold(&img)?;
    println!(
        "threshold k* = {}, between-class variance {:.1}, global mean {:.1}",
        stats.best_k, stats.best_variance, stats.global_mean
    );

    let curve = stats.variance_curve();
    for k in (0..255).step_by(32) {
        let bar = "#".repeat((40.0 * curve[k] / stats.best_variance.max(1e-12)) as usize);
        println!("k={k:>3} {bar}");
    }

    let masked = segment(&img, &stats, Polarity::DarkForeground).image;
    let bw = binarize(&img, &stats, Polarity::DarkForeground).image;
    let background = masked.pixels().iter().filter(|&&p| p == 255).count();
    println!("{background} of {} pixels masked to white", masked.pixels().len());

    img.write_pgm(&out.join("press.pgm"))?;
    masked.write_pgm(&out.join("press_segmented.pgm"))?;
    bw.write_pgm(&out.join("press_binary.pgm"))?;
    println!("images written to {}", out.display());
    Ok(())
}
