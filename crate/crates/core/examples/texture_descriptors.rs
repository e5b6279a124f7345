//! LBP and HOG descriptors of a normal and a coerced press.

use pupguard::features::{hog_descriptor, lbp_grid_histogram, lbp_histogram, HogParams};
use pupguard::preprocess::Prepro1;
use pupguard::synthgen::{gen_fingerprint_image, Press, SubjectProfile};

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn main() -> pupguard::Result<()> {
    let profile = SubjectProfile::from_population(0, 0);
    let prep = Prepro1::default();
    let normal = prep.apply(&gen_fingerprint_image(&profile, &Press::default(), 1));
    let again = prep.apply(&gen_fingerprint_image(
        &profile,
        &Press {
            pressure: 1.05,
            rotation_deg: 4.0,
            ..Press::default()
        },
        2,
    ));
    let coerced = prep.apply(&gen_fingerprint_image(
        &profile,
        &Press {
            pressure: 1.4,
            center_offset: (20.0, 0.0),
            rotation_deg: 25.0,
            smear_px: 6,
            smear_angle_deg: 30.0,
            finger: 0,
        },
        3,
    ));

    let lbp: Vec<_> = [&normal, &again, &coerced]
        .iter()
        .map(|img| lbp_histogram(img))
        .collect::<Result<_, _>>()?;
    println!("LBP: {} bins", lbp[0].len());
    println!("  normal vs normal  L1 {:.4}", l1(lbp[0].values(), lbp[1].values()));
    println!("  normal vs coerced L1 {:.4}", l1(lbp[0].values(), lbp[2].values()));
    println!("  4x4 regional LBP: {} values", lbp_grid_histogram(&normal, 4)?.len());

    let params = HogParams::default();
    let hog: Vec<_> = [&normal, &again, &coerced]
        .iter()
        .map(|img| hog_descriptor(img, &params))
        .collect::<Result<_, _>>()?;
    println!("HOG: {} values", hog[0].len());
    println!("  normal vs normal  L1 {:.2}", l1(hog[0].values(), hog[1].values()));
    println!("  normal vs coerced L1 {:.2}", l1(hog[0].values(), hog[2].values()));
    Ok(())
}
