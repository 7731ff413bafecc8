//! Writes a five-point distribution as a mixture of two-point pieces with
//! the same mean, then mixes the pieces back together.
//!
//! cargo run --example decompose

use moment_bounds::{decompose, recompose, summarize, DiscreteDistribution, Piece};

fn main() -> moment_bounds::Result<()> {
    let dist = DiscreteDistribution::new(
        vec![0.5, 1.0, 2.0, 4.0, 7.0],
        vec![0.15, 0.3, 0.3, 0.15, 0.1],
    )?;
    println!("mean {:.6}", dist.mean());

    let mix = decompose(&dist)?;
    for c in &mix.components {
        match c.piece {
            Piece::TwoPoint(s) => println!(
                "  weight {:.6}: {:.4} @ {:.6}, {:.4} @ {:.6}  (mean {:.12})",
                c.weight,
                s.a_minus(),
                1.0 - s.q(),
                s.a_plus(),
                s.q(),
                s.mean()
            ),
            Piece::Point(x) => println!("  weight {:.6}: point mass at {x}", c.weight),
        }
    }
    println!("total weight {:.15}", mix.total_weight());

    let back = recompose(&mix)?;
    let worst = dist
        .probabilities()
        .iter()
        .zip(back.probabilities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("recomposed probabilities differ by at most {worst:.2e}");

    let (a, b) = (summarize(&dist, 4)?, summarize(&back, 4)?);
    println!(
        "kurtosis {:.12} -> {:.12}",
        a.kurtosis().unwrap(),
        b.kurtosis().unwrap()
    );
    Ok(())
}
