//! RGB to HSV conversion (hexcone model).

/// Convert 8-bit RGB to HSV with h in [0, 360), s and v in [0, 1].
/// Hue is defined as 0 when saturation is 0.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let rf = r as f64 / 255.0;
    let gf = g as f64 / 255.0;
    let bf = b as f64 / 255.0;
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;

    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta <= 0.0 {
        0.0
    } else if max == rf {
        60.0 * (((gf - bf) / delta).rem_euclid(6.0))
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    (h.rem_euclid(360.0), s, v)
}

/// Inverse conversion for rendering; h in [0, 360), s and v in [0, 1].
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = (h.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hsv_rgb_round_trip_on_saturated_colors() {
        for hb in 0..12 {
            let h = hb as f64 * 30.0;
            let rgb = hsv_to_rgb(h, 1.0, 1.0);
            let (h2, s2, v2) = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
            assert!((h2 - h).abs() < 1.5, "h {h} -> {h2}");
            assert!(s2 > 0.98 && v2 > 0.98);
        }
    }

    #[test]
    fn pure_red() {
        let (h, s, v) = rgb_to_hsv(255, 0, 0);
        assert_eq!((h, s, v), (0.0, 1.0, 1.0));
    }

    #[test]
    fn gray_has_zero_saturation_and_hue() {
        let (h, s, v) = rgb_to_hsv(128, 128, 128);
        assert_eq!(h, 0.0);
        assert_eq!(s, 0.0);
        assert!((v - 128.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn sky_blue_hand_computed() {
        // max = b, h = 60 * (4 + (r - g)/delta) = 60 * (4 - 128/255) = 209.88...
        let (h, s, v) = rgb_to_hsv(0, 128, 255);
        assert!((h - 209.88235294117646).abs() < 1e-9, "h = {h}");
        assert_eq!(s, 1.0);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn primaries_and_secondaries() {
        assert_eq!(rgb_to_hsv(0, 255, 0).0, 120.0);
        assert_eq!(rgb_to_hsv(0, 0, 255).0, 240.0);
        assert_eq!(rgb_to_hsv(255, 255, 0).0, 60.0);
        assert_eq!(rgb_to_hsv(255, 0, 255).0, 300.0);
    }
}
