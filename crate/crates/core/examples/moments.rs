//! Moments of a small particle-size distribution, its mixture with a second
//! one, and the invariance of standardized moments under unit changes.
//!
//! cargo run --example moments

use moment_bounds::{affine_transform, mixture, summarize, DiscreteDistribution};

fn main() -> moment_bounds::Result<()> {
    // diameters in micrometres
    let coarse = DiscreteDistribution::new(vec![10.0, 20.0, 35.0], vec![0.2, 0.5, 0.3])?
        .with_label("coarse");
    let fine =
        DiscreteDistribution::new(vec![2.0, 5.0, 8.0], vec![0.3, 0.4, 0.3])?.with_label("fine");

    for d in [&coarse, &fine] {
        let s = summarize(d, 6)?;
        println!(
            "{:>7}: mean {:8.4}  sd {:8.4}  cov {:.4}  skew {:+.4}  kurt {:.4}  D5 {:+.4}  D6 {:.4}",
            d.label().unwrap_or("-"),
            s.mean,
            s.std_dev,
            s.cov.unwrap_or(f64::NAN),
            s.skewness().unwrap(),
            s.kurtosis().unwrap(),
            s.standardized(5).unwrap(),
            s.standardized(6).unwrap(),
        );
    }

    let blend = mixture(&[(coarse.clone(), 0.25), (fine.clone(), 0.75)])?;
    let s = summarize(&blend, 4)?;
    println!(
        "  blend: {} points, mean {:.4}, skew {:+.4}, kurt {:.4}",
        blend.len(),
        s.mean,
        s.skewness().unwrap(),
        s.kurtosis().unwrap()
    );

    // millimetres, shifted: skewness and kurtosis do not move
    let mm = affine_transform(&coarse, 1e-3, 0.5)?;
    let (a, b) = (summarize(&coarse, 4)?, summarize(&mm, 4)?);
    println!(
        "units:  skew {:+.12} vs {:+.12}, kurt {:.12} vs {:.12}",
        a.skewness().unwrap(),
        b.skewness().unwrap(),
        a.kurtosis().unwrap(),
        b.kurtosis().unwrap()
    );

    println!(
        "\n{}",
        serde_json::to_string_pretty(&summarize(&fine, 4)?).unwrap()
    );
    Ok(())
}
