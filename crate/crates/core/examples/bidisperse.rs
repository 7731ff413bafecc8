//! The two-point family: build one from a size ratio, read back its
//! coefficient of variation and skewness, invert that pair, and find the
//! members with a prescribed kurtosis.
//!
//! cargo run --example bidisperse

use moment_bounds::{
    construct_with_moment, cov_skew_of, dn_of_q, invert_skew, make_bidisperse, summarize,
};

fn main() -> moment_bounds::Result<()> {
    let spec = make_bidisperse(1.5, 3.0, 0.25)?;
    let (cov, skew) = cov_skew_of(&spec)?;
    println!(
        "eta 3, q 0.25, mean 1.5 -> values ({}, {}), cov {cov:.9}, skew {skew:.9}",
        spec.a_minus(),
        spec.a_plus()
    );

    let back = invert_skew(1.5, cov, skew)?;
    println!(
        "inverted: ({:.12}, {:.12}) with q {:.12}",
        back.a_minus(),
        back.a_plus(),
        back.q()
    );

    println!("\nstandardized moments over q (they depend on q alone):");
    println!("{:>6} {:>10} {:>10} {:>10}", "q", "D3", "D4", "D5");
    for q in [0.05, 0.2, 0.5, 0.8, 0.95] {
        println!(
            "{q:>6.2} {:>10.5} {:>10.5} {:>10.5}",
            dn_of_q(3, q)?,
            dn_of_q(4, q)?,
            dn_of_q(5, q)?
        );
    }

    println!("\ntwo-point distributions with mean 1, cov 0.5 and kurtosis 4:");
    for s in construct_with_moment(4, 1.0, 0.5, 4.0)? {
        let d = s.to_distribution();
        let m = summarize(&d, 4)?;
        println!(
            "  values {:?} probabilities {:?} -> D4 {:.12}",
            d.values(),
            d.probabilities(),
            m.kurtosis().unwrap()
        );
    }

    match construct_with_moment(4, 1.0, 0.5, 0.8) {
        Ok(_) => unreachable!("kurtosis below one is impossible"),
        Err(e) => println!("kurtosis 0.8: {e}"),
    }
    Ok(())
}
