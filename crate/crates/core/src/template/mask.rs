//! Foreground bitmasks with PBM (P1/P4) I/O.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::OrientedRect;

/// A per-pixel foreground bitmask aligned with an image.
#[derive(Debug, Clone, PartialEq)]
pub struct ForegroundMask {
    pub width: u32,
    pub height: u32,
    bits: Vec<bool>,
}

impl ForegroundMask {
    pub fn filled(width: u32, height: u32, value: bool) -> ForegroundMask {
        ForegroundMask {
            width,
            height,
            bits: vec![value; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        if x >= self.width || y >= self.height {
            return false;
        }
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        if x < self.width && y < self.height {
            self.bits[y as usize * self.width as usize + x as usize] = value;
        }
    }

    /// Mark every pixel whose center lies inside the rectangle.
    pub fn paint_rect(&mut self, rect: &OrientedRect) {
        let bb = rect.aabb();
        let x0 = bb.min[0].floor().max(0.0) as u32;
        let y0 = bb.min[1].floor().max(0.0) as u32;
        let x1 = (bb.max[0].ceil() as i64).clamp(0, self.width as i64) as u32;
        let y1 = (bb.max[1].ceil() as i64).clamp(0, self.height as i64) as u32;
        for y in y0..y1 {
            for x in x0..x1 {
                if rect.contains([x as f64 + 0.5, y as f64 + 0.5]) {
                    self.set(x, y, true);
                }
            }
        }
    }

    /// Fraction of the rectangle's covered pixels (centers inside the rect)
    /// that are foreground. Pixels outside the image count as background.
    /// A rectangle covering no pixel yields 0.
    pub fn coverage(&self, rect: &OrientedRect) -> f64 {
        let bb = rect.aabb();
        let x0 = bb.min[0].floor() as i64;
        let y0 = bb.min[1].floor() as i64;
        let x1 = bb.max[0].ceil() as i64;
        let y1 = bb.max[1].ceil() as i64;
        let mut total = 0u64;
        let mut fg = 0u64;
        for y in y0..y1 {
            for x in x0..x1 {
                let center = [x as f64 + 0.5, y as f64 + 0.5];
                if !rect.contains(center) {
                    continue;
                }
                total += 1;
                if x >= 0 && y >= 0 && self.get(x as u32, y as u32) {
                    fg += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            fg as f64 / total as f64
        }
    }

    /// Binary PBM (P4). Convention: 1-bits are foreground.
    pub fn write_pbm(&self, w: &mut dyn Write) -> Result<()> {
        write!(w, "P4\n{} {}\n", self.width, self.height)?;
        let row_bytes = (self.width as usize + 7) / 8;
        let mut row = vec![0u8; row_bytes];
        for y in 0..self.height {
            row.iter_mut().for_each(|b| *b = 0);
            for x in 0..self.width {
                if self.get(x, y) {
                    row[x as usize / 8] |= 0x80 >> (x % 8);
                }
            }
            w.write_all(&row)?;
        }
        Ok(())
    }

    pub fn read_pbm(r: &mut dyn BufRead) -> Result<ForegroundMask> {
        let mut tokens = Vec::new();
        let mut byte = [0u8; 1];
        let mut cur = String::new();
        let mut in_comment = false;
        while tokens.len() < 3 {
            std::io::Read::read_exact(r, &mut byte)
                .map_err(|_| Error::Parse("truncated PBM header".into()))?;
            let c = byte[0] as char;
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
        let width: u32 = tokens[1].parse().map_err(|_| Error::Parse("bad PBM width".into()))?;
        let height: u32 = tokens[2].parse().map_err(|_| Error::Parse("bad PBM height".into()))?;
        let mut mask = ForegroundMask::filled(width, height, false);
        match tokens[0].as_str() {
            "P4" => {
                let row_bytes = (width as usize + 7) / 8;
                let mut row = vec![0u8; row_bytes];
                for y in 0..height {
                    std::io::Read::read_exact(r, &mut row)
                        .map_err(|_| Error::Parse("truncated PBM data".into()))?;
                    for x in 0..width {
                        let bit = row[x as usize / 8] & (0x80 >> (x % 8));
                        mask.set(x, y, bit != 0);
                    }
                }
            }
            "P1" => {
                let mut data = String::new();
                r.read_to_string(&mut data)?;
                let mut vals = data.split_whitespace();
                for y in 0..height {
                    for x in 0..width {
                        let v = vals
                            .next()
                            .ok_or_else(|| Error::Parse("truncated P1 data".into()))?;
                        mask.set(x, y, v == "1");
                    }
                }
            }
            other => return Err(Error::Parse(format!("expected P1/P4 magic, got {other}"))),
        }
        Ok(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbm_round_trip() {
        let mut m = ForegroundMask::filled(10, 4, false);
        m.set(0, 0, true);
        m.set(9, 3, true);
        m.set(4, 2, true);
        let mut buf = Vec::new();
        m.write_pbm(&mut buf).unwrap();
        let back = ForegroundMask::read_pbm(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn p1_parsing() {
        let text = b"P1\n3 2\n1 0 1\n0 1 0\n";
        let m = ForegroundMask::read_pbm(&mut text.as_slice()).unwrap();
        assert!(m.get(0, 0) && m.get(2, 0) && m.get(1, 1));
        assert!(!m.get(1, 0) && !m.get(0, 1));
    }

    #[test]
    fn coverage_half_inside() {
        // 20x20 mask, left half foreground; a rect centered on the split line.
        let mut m = ForegroundMask::filled(20, 20, false);
        for y in 0..20 {
            for x in 0..10 {
                m.set(x, y, true);
            }
        }
        let rect = OrientedRect::new([10.0, 10.0], 8.0, 8.0, 0.0);
        let c = m.coverage(&rect);
        assert!((c - 0.5).abs() < 1e-12, "coverage = {c}");
    }

    #[test]
    fn coverage_outside_image_counts_as_background() {
        let m = ForegroundMask::filled(10, 10, true);
        let rect = OrientedRect::new([0.0, 5.0], 10.0, 4.0, 0.0);
        let c = m.coverage(&rect);
        assert!((c - 0.5).abs() < 1e-12, "coverage = {c}");
    }
}
