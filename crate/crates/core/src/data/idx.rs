//! IDX containers as used by the MNIST distribution: a big-endian magic
//! number whose last byte is the dimension count, one big-endian `u32` per
//! dimension, then unsigned bytes.

use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Clone, Debug, PartialEq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

fn header(bytes: &[u8], words: usize) -> Result<Vec<u32>> {
    if bytes.len() < 4 * words {
        return Err(Error::invalid(format!(
            "IDX header truncated: {} bytes, need {}",
            bytes.len(),
            4 * words
        )));
    }
    Ok(bytes[..4 * words]
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

pub fn read_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let h = header(bytes, 4)?;
    if h[0] != IMAGES_MAGIC {
        return Err(Error::invalid(format!(
            "bad IDX image magic {:#010x}, expected {IMAGES_MAGIC:#010x}",
            h[0]
        )));
    }
    let (count, rows, cols) = (h[1] as usize, h[2] as usize, h[3] as usize);
    let body = &bytes[16..];
    if body.len() != count * rows * cols {
        return Err(Error::invalid(format!(
            "IDX image body has {} bytes, header promises {count}×{rows}×{cols}",
            body.len()
        )));
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: body.to_vec(),
    })
}

pub fn read_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let h = header(bytes, 2)?;
    if h[0] != LABELS_MAGIC {
        return Err(Error::invalid(format!(
            "bad IDX label magic {:#010x}, expected {LABELS_MAGIC:#010x}",
            h[0]
        )));
    }
    let body = &bytes[8..];
    if body.len() != h[1] as usize {
        return Err(Error::invalid(format!(
            "IDX label body has {} bytes, header promises {}",
            body.len(),
            h[1]
        )));
    }
    Ok(body.to_vec())
}

#[cfg(test)]
pub(crate) fn encode_images(images: &[Vec<u8>], rows: usize, cols: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for w in [IMAGES_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&w.to_be_bytes());
    }
    images.iter().for_each(|im| out.extend_from_slice(im));
    out
}

#[cfg(test)]
pub(crate) fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let imgs = vec![vec![1u8, 2, 3, 4, 5, 6], vec![7u8; 6]];
        let parsed = read_idx_images(&encode_images(&imgs, 2, 3)).unwrap();
        assert_eq!((parsed.count, parsed.rows, parsed.cols), (2, 2, 3));
        assert_eq!(parsed.image(1), &[7u8; 6]);
        assert_eq!(read_idx_labels(&encode_labels(&[4, 7, 1])).unwrap(), vec![4, 7, 1]);
    }

    #[test]
    fn malformed_headers() {
        assert!(read_idx_images(&[0, 0, 8, 3]).is_err());
        let mut wrong_magic = encode_images(&[vec![0; 4]], 2, 2);
        wrong_magic[3] = 0x01;
        assert!(read_idx_images(&wrong_magic).is_err());
        let mut truncated = encode_images(&[vec![0; 4]], 2, 2);
        truncated.pop();
        assert!(read_idx_images(&truncated).is_err());
        assert!(read_idx_labels(&encode_images(&[vec![0; 4]], 2, 2)).is_err());
        let mut short_labels = encode_labels(&[1, 2]);
        short_labels.pop();
        assert!(read_idx_labels(&short_labels).is_err());
    }
}
