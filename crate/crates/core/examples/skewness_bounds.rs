//! How far skewness and kurtosis can go once the support is bounded.
//!
//! Prints the limits for a positive quantity (x >= 0) with mean 1 at a few
//! coefficients of variation, then for the support [0, 5].
//!
//! cargo run --example skewness_bounds

use moment_bounds::bounds::format_limit;
use moment_bounds::{limits, pearson_floor, BoundInput, SupportBounds};

fn main() -> moment_bounds::Result<()> {
    let positive = SupportBounds::below(0.0)?;
    println!("x >= 0, mean 1");
    println!(
        "{:>5} {:>10} {:>10} {:>12}",
        "cov", "min D3", "min D4", "status"
    );
    for cov in [0.2, 0.4, 0.7, 1.0, 1.5] {
        let input = BoundInput::new(1.0, cov, positive)?;
        let d3 = limits(3, &input)?;
        let d4 = limits(4, &input)?;
        println!(
            "{cov:>5.2} {:>10.5} {:>10.5} {:>12}",
            d3.lower,
            d4.lower,
            d4.status.as_str()
        );
    }

    let boxed = SupportBounds::between(0.0, 5.0)?;
    println!("\n0 <= x <= 5, mean 1");
    println!(
        "{:>5} {:>2} {:>12} {:>12} {:>12}",
        "cov", "n", "lower", "upper", "status"
    );
    for cov in [0.5, 1.0, 1.5, 2.0] {
        let input = BoundInput::new(1.0, cov, boxed)?;
        for n in 3..=6 {
            let r = limits(n, &input)?;
            println!(
                "{cov:>5.2} {n:>2} {:>12} {:>12} {:>12}",
                short(r.lower),
                short(r.upper),
                r.status.as_str()
            );
        }
    }

    // past the feasibility edge the spread itself is impossible
    if let Err(e) = BoundInput::new(1.0, 2.5, boxed) {
        println!("\ncov 2.5 on [0, 5]: {e}");
    }
    println!(
        "kurtosis floor implied by skewness 1.5: {}",
        pearson_floor(1.5)
    );
    Ok(())
}

fn short(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5}")
    } else {
        format_limit(x)
    }
}
