//! Fits the three one-class detectors on a 2-D Gaussian cloud and scores
//! probes at growing distance.

use pupguard::classify::{ClassifierKind, ClassifierParams, NoveltyModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> pupguard::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..300)
        .map(|_| vec![StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)])
        .collect();
    let params = ClassifierParams::default();
    let probes = [[0.0, 0.0], [1.5, 0.0], [3.0, 0.0], [6.0, 0.0]];

    for kind in ClassifierKind::ALL {
        let model = NoveltyModel::fit(kind, &x, &params)?;
        let inside = x.iter().filter(|p| model.verdict("", p).map(|v| v.is_normal()).unwrap_or(false)).count();
        println!("{}: {inside}/300 training points judged normal", kind.name());
        for p in &probes {
            let v = model.verdict("probe", p)?;
            println!("  ({:>3.1}, {:>3.1}) score {:>8.4} margin {:>8.4} {:?}", p[0], p[1], v.score, v.margin, v.prediction);
        }
    }

    if let NoveltyModel::Ocsvm(m) = NoveltyModel::fit(ClassifierKind::Ocsvm, &x, &params)? {
        println!(
            "ocsvm: {} support vectors, rho {:.4}, gamma {:.4}, {} SMO steps",
            m.support_vectors.len(),
            m.rho,
            m.gamma,
            m.iterations
        );
    }
    Ok(())
}
