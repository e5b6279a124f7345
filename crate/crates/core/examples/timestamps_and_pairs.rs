//! Parses capture timestamps and computes press intervals.

use pupguard::dataset::{parse_timestamp, press_interval, GrayImage, Label, PressPair};

fn main() -> pupguard::Result<()> {
    let t1 = parse_timestamp("20240301090000.250000")?;
    let t2 = parse_timestamp("20240301090001.750000")?;
    println!("{t1} -> {} us since 1970", t1.micros_since_epoch());
    println!("interval {} us", t2 - t1);

    let blank = GrayImage::filled(160, 160, 255);
    let pair = PressPair {
        pair_id: "demo".into(),
        subject_id: "s000".into(),
        first_id: "demo_1".into(),
        second_id: "demo_2".into(),
        first: blank.clone(),
        second: blank,
        t1,
        t2,
        label: Label::Legitimate,
    };
    println!("press interval {:.6} s", press_interval(&pair)?);

    for bad in ["20240230120000.000000", "20240301126000.000000", "2024030112000.000000"] {
        match parse_timestamp(bad) {
            Ok(t) => println!("{bad}: unexpectedly parsed as {t}"),
            Err(e) => println!("{bad}: {e}"),
        }
    }
    let reversed = PressPair { t1: t2, t2: t1, ..pair };
    println!("reversed pair: {}", press_interval(&reversed).unwrap_err());
    Ok(())
}
