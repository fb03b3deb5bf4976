// Boosting and the Lasso side by side on a random Gaussian design with a
// planted 2-sparse vector, written as the two CSV files of `compare`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sparselab::report::{cmd_compare, compare};
use sparselab::DenseMatrix;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (n, p) = (20, 40);
    let data: Vec<f64> = (0..n * p)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let x = DenseMatrix::new(n, p, data)?;
    let mut beta = vec![0.0; p];
    beta[3] = 2.0;
    beta[17] = -1.5;
    let y = x.mul_vec(&beta)?;

    let result = compare(&x, &y, Some(&beta), 0.5, 500, 1e-6)?;
    let last = result.boosting.last().ok_or("empty trajectory")?;
    let lasso = result.lasso.last().ok_or("empty path")?;
    println!(
        "boosting: k = {}, residual {:.3e}, dist_l1 {:.3e}",
        last.k,
        last.resid_l2,
        last.dist_l1.unwrap_or(f64::NAN)
    );
    println!(
        "lasso:    lambda = {:.3e}, dist_l1 {:.3e}",
        lasso.lambda,
        lasso.dist_l1_to_truth.unwrap_or(f64::NAN)
    );

    let dir = tempfile::tempdir()?;
    cmd_compare(&x, &y, Some(&beta), 0.5, 500, 1e-6, dir.path())?;
    for entry in std::fs::read_dir(dir.path())? {
        let path = entry?.path();
        let lines = std::fs::read_to_string(&path)?.lines().count();
        println!(
            "wrote {} ({lines} lines)",
            path.file_name().unwrap_or_default().to_string_lossy()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
