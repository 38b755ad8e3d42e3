//! Fits the Gaussian naive Bayes classifier to two feature batches, scores a few
//! vectors, then blends in a drifted batch.
//!
//!     cargo run --example naive_bayes_update

use adaptive_ct::model::{classify, update_params, ClassifierParams};

pub fn run_example() -> adaptive_ct::Result<()> {
    let pos = vec![vec![10.0, 2.0], vec![12.0, 3.0], vec![11.0, 2.5]];
    let neg = vec![vec![0.0, 5.0], vec![-1.0, 6.0], vec![1.0, 4.0]];
    let mut params = ClassifierParams::from_batches(&pos, &neg)?;
    for v in [[11.0, 2.5], [0.0, 5.0], [5.5, 3.75]] {
        println!("score {v:?} = {:.3}", classify(&v, &params));
    }

    // The positive class drifts; lambda = 0.85 keeps most of the old model.
    let drifted = vec![vec![14.0, 2.0], vec![15.0, 2.5], vec![16.0, 3.0]];
    for round in 1..=5 {
        params = update_params(&params, &drifted, &neg, 0.85)?;
        println!(
            "round {round}: positive mu {:.3?} sigma {:.3?}",
            params.positive.mu, params.positive.sigma
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
