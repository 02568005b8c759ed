//! RGB rasters, binary PPM (P6) I/O and region histograms.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::features::color::rgb_to_hsv;
use crate::features::{Histogram, HistogramLayout};
use crate::model::OrientedRect;

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<[u8; 3]>,
}

impl Raster {
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Raster {
        Raster {
            width,
            height,
            pixels: vec![color; (width as usize) * (height as usize)],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, color: [u8; 3]) {
        if x < self.width && y < self.height {
            self.pixels[y as usize * self.width as usize + x as usize] = color;
        }
    }

    pub fn write_ppm(&self, w: &mut dyn Write) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        for px in &self.pixels {
            w.write_all(px)?;
        }
        Ok(())
    }

    pub fn read_ppm(r: &mut dyn BufRead) -> Result<Raster> {
        let mut header = Vec::new();
        // Three whitespace-separated tokens after the magic, then one byte
        // of whitespace, then raw pixel data.
        let mut tokens = Vec::new();
        let mut byte = [0u8; 1];
        let mut cur = String::new();
        let mut in_comment = false;
        while tokens.len() < 4 {
            std::io::Read::read_exact(r, &mut byte)
                .map_err(|_| Error::Parse("truncated PPM header".into()))?;
            let c = byte[0] as char;
            header.push(byte[0]);
            if in_comment {
                if c == '\n' {
                    in_comment = false;
                }
                continue;
            }
            if c == '#' {
                in_comment = true;
            } else if c.is_whitespace() {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(c);
            }
        }
        if tokens[0] != "P6" {
            return Err(Error::Parse(format!("expected P6 magic, got {}", tokens[0])));
        }
        let width: u32 = tokens[1].parse().map_err(|_| Error::Parse("bad width".into()))?;
        let height: u32 = tokens[2].parse().map_err(|_| Error::Parse("bad height".into()))?;
        let maxval: u32 = tokens[3].parse().map_err(|_| Error::Parse("bad maxval".into()))?;
        if maxval != 255 {
            return Err(Error::Parse(format!("only 8-bit PPM supported, maxval {maxval}")));
        }
        let n = width as usize * height as usize;
        let mut buf = vec![0u8; n * 3];
        std::io::Read::read_exact(r, &mut buf)
            .map_err(|_| Error::Parse("truncated PPM pixel data".into()))?;
        let pixels = buf.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(Raster { width, height, pixels })
    }
}

/// Joint HSV histogram over the pixels whose centers lie inside `region`
/// (and, when given, whose mask bit is set). L1-normalized; an empty pixel
/// set yields the all-zero histogram. Errors when the region lies fully
/// outside the image.
pub fn hsv_histogram(
    img: &Raster,
    region: &OrientedRect,
    mask: Option<&dyn Fn(u32, u32) -> bool>,
    layout: HistogramLayout,
) -> Result<Histogram> {
    let bb = region.aabb();
    if bb.max[0] < 0.0
        || bb.max[1] < 0.0
        || bb.min[0] > img.width as f64
        || bb.min[1] > img.height as f64
    {
        return Err(Error::EmptyRegion);
    }
    let x0 = bb.min[0].floor().max(0.0) as u32;
    let y0 = bb.min[1].floor().max(0.0) as u32;
    let x1 = (bb.max[0].ceil() as i64).clamp(0, img.width as i64) as u32;
    let y1 = (bb.max[1].ceil() as i64).clamp(0, img.height as i64) as u32;

    let mut bins = vec![0.0f64; layout.total_bins()];
    let mut count = 0usize;
    for y in y0..y1 {
        for x in x0..x1 {
            let center = [x as f64 + 0.5, y as f64 + 0.5];
            if !region.contains(center) {
                continue;
            }
            if let Some(m) = mask {
                if !m(x, y) {
                    continue;
                }
            }
            let [r, g, b] = img.get(x, y);
            let (h, s, v) = rgb_to_hsv(r, g, b);
            bins[layout.bin_index(h, s, v)] += 1.0;
            count += 1;
        }
    }
    if count > 0 {
        let inv = 1.0 / count as f64;
        for b in &mut bins {
            *b *= inv;
        }
    }
    Ok(Histogram { bins })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_round_trip() {
        let mut img = Raster::filled(3, 2, [10, 20, 30]);
        img.set(2, 1, [1, 2, 3]);
        let mut buf = Vec::new();
        img.write_ppm(&mut buf).unwrap();
        let back = Raster::read_ppm(&mut buf.as_slice()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn uniform_red_crop_is_one_hot() {
        let img = Raster::filled(20, 20, [255, 0, 0]);
        let region = OrientedRect::new([10.0, 10.0], 8.0, 8.0, 0.0);
        let h = hsv_histogram(&img, &region, None, HistogramLayout::default()).unwrap();
        let nonzero: Vec<_> = h.bins.iter().filter(|&&b| b > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((h.sum() - 1.0).abs() < 1e-12);
        assert!(!h.is_empty());
    }

    #[test]
    fn half_red_half_green_splits_mass() {
        let mut img = Raster::filled(10, 10, [255, 0, 0]);
        for y in 0..10 {
            for x in 5..10 {
                img.set(x, y, [0, 255, 0]);
            }
        }
        let region = OrientedRect::new([5.0, 5.0], 10.0, 10.0, 0.0);
        let h = hsv_histogram(&img, &region, None, HistogramLayout::default()).unwrap();
        let mut nonzero: Vec<f64> = h.bins.iter().copied().filter(|&b| b > 0.0).collect();
        nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(nonzero, vec![0.5, 0.5]);
    }

    #[test]
    fn fully_outside_region_errors_and_empty_mask_flags_empty() {
        let img = Raster::filled(10, 10, [0, 0, 255]);
        let outside = OrientedRect::new([100.0, 100.0], 4.0, 4.0, 0.0);
        assert!(matches!(
            hsv_histogram(&img, &outside, None, HistogramLayout::default()),
            Err(Error::EmptyRegion)
        ));
        let region = OrientedRect::new([5.0, 5.0], 4.0, 4.0, 0.0);
        let none = |_x: u32, _y: u32| false;
        let h = hsv_histogram(&img, &region, Some(&none), HistogramLayout::default()).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn histogram_independent_of_pixel_iteration_order() {
        // The histogram is a set aggregate; rotating the region by a half
        // turn visits the same pixel set and must give the same result.
        let mut img = Raster::filled(16, 16, [0, 0, 0]);
        for y in 0..16 {
            for x in 0..16 {
                img.set(x, y, [(x * 16) as u8, (y * 16) as u8, 128]);
            }
        }
        let a = OrientedRect::new([8.0, 8.0], 10.0, 6.0, 0.0);
        let b = OrientedRect::new([8.0, 8.0], 10.0, 6.0, std::f64::consts::PI);
        let ha = hsv_histogram(&img, &a, None, HistogramLayout::default()).unwrap();
        let hb = hsv_histogram(&img, &b, None, HistogramLayout::default()).unwrap();
        for (x, y) in ha.bins.iter().zip(hb.bins.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
