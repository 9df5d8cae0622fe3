use super::{IdxImages, SvmDataset};
use crate::error::{Error, Result};

/// Images taken per digit.
pub const MNIST_PER_CLASS: usize = 100;

const POSITIVE_DIGIT: u8 = 4;
const NEGATIVE_DIGIT: u8 = 7;

/// Maximum over each non-overlapping 2×2 block of a row-major image.
/// Odd trailing rows or columns are dropped.
pub fn max_pool_2x2(pixels: &[u8], rows: usize, cols: usize) -> Vec<u8> {
    let (pr, pc) = (rows / 2, cols / 2);
    let mut out = Vec::with_capacity(pr * pc);
    for r in 0..pr {
        for c in 0..pc {
            let at = |dr: usize, dc: usize| pixels[(2 * r + dr) * cols + 2 * c + dc];
            out.push(at(0, 0).max(at(0, 1)).max(at(1, 0)).max(at(1, 1)));
        }
    }
    out
}

/// The first 100 fours (+1) and the first 100 sevens (−1) in file order,
/// each max-pooled to 14×14, scaled to `[0, 1]` and flattened row-major.
pub fn prepare_mnist(images: &IdxImages, labels: &[u8]) -> Result<SvmDataset> {
    if images.count != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: images.count,
            actual: labels.len(),
        });
    }
    if images.rows != 28 || images.cols != 28 {
        return Err(Error::invalid(format!(
            "expected 28×28 images, got {}×{}",
            images.rows, images.cols
        )));
    }
    let (mut pos, mut neg) = (0, 0);
    let mut rows = Vec::with_capacity(2 * MNIST_PER_CLASS);
    let mut y = Vec::with_capacity(2 * MNIST_PER_CLASS);
    for (i, &digit) in labels.iter().enumerate() {
        let label = match digit {
            POSITIVE_DIGIT if pos < MNIST_PER_CLASS => {
                pos += 1;
                1
            }
            NEGATIVE_DIGIT if neg < MNIST_PER_CLASS => {
                neg += 1;
                -1
            }
            _ => continue,
        };
        let pooled = max_pool_2x2(images.image(i), images.rows, images.cols);
        rows.push(pooled.into_iter().map(|p| f64::from(p) / 255.0).collect());
        y.push(label);
        if pos == MNIST_PER_CLASS && neg == MNIST_PER_CLASS {
            break;
        }
    }
    if pos < MNIST_PER_CLASS || neg < MNIST_PER_CLASS {
        return Err(Error::invalid(format!(
            "need {MNIST_PER_CLASS} images each of digits {POSITIVE_DIGIT} and {NEGATIVE_DIGIT}, found {pos} and {neg}"
        )));
    }
    SvmDataset::new(
        "mnist",
        rows,
        y,
        "mnist: first 100 of digit 4 (+1) and 7 (-1); 2x2 max-pool to 14x14; scaled by 1/255",
    )
}
