//! On-disk formats for images and sinograms: flat CSV of reals with a
//! one-line header (`n` for images, `views,bins` for sinograms) and 8-bit
//! binary PGM for visualization after min-max normalization.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::tomo::{Image, Sinogram};
use crate::{Error, Result};

/// Shortest round-trip decimal representation.
fn fmt(v: f64) -> String {
    format!("{v:?}")
}

pub fn image_to_csv(img: &Image) -> String {
    let mut out = String::with_capacity(12 * img.data.len());
    out.push_str(&img.n.to_string());
    out.push('\n');
    for row in img.data.chunks(img.n) {
        let line: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn image_from_csv(text: &str) -> Result<Image> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty image file".into()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad image header '{header}'")))?;
    let mut data = Vec::with_capacity(n * n);
    for line in lines {
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad image value '{tok}'")))?;
            data.push(v);
        }
    }
    Image::from_vec(n, data)
}

pub fn sinogram_to_csv(y: &Sinogram) -> String {
    let mut out = String::with_capacity(12 * y.data.len());
    out.push_str(&format!("{},{}\n", y.views, y.bins));
    for row in y.data.chunks(y.bins) {
        let line: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn sinogram_from_csv(text: &str) -> Result<Sinogram> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sinogram file".into()))?;
    let parts: Vec<&str> = header.split(',').map(|s| s.trim()).collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("bad sinogram header '{header}'")));
    }
    let views: usize = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad view count '{}'", parts[0])))?;
    let bins: usize = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad bin count '{}'", parts[1])))?;
    let mut data = Vec::with_capacity(views * bins);
    for line in lines {
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad sinogram value '{tok}'")))?;
            data.push(v);
        }
    }
    Sinogram::from_vec(views, bins, data)
}

pub fn write_image_csv(img: &Image, path: &Path) -> Result<()> {
    fs::write(path, image_to_csv(img))?;
    Ok(())
}

pub fn read_image_csv(path: &Path) -> Result<Image> {
    image_from_csv(&fs::read_to_string(path)?)
}

pub fn write_sinogram_csv(y: &Sinogram, path: &Path) -> Result<()> {
    fs::write(path, sinogram_to_csv(y))?;
    Ok(())
}

pub fn read_sinogram_csv(path: &Path) -> Result<Sinogram> {
    sinogram_from_csv(&fs::read_to_string(path)?)
}

/// 8-bit binary PGM (P5) after min-max normalization.
pub fn write_image_pgm(img: &Image, path: &Path) -> Result<()> {
    let (lo, hi) = img.min_max();
    let span = hi - lo;
    let mut bytes = Vec::with_capacity(img.data.len() + 32);
    bytes.extend_from_slice(format!("P5\n{} {}\n255\n", img.n, img.n).as_bytes());
    for &v in &img.data {
        let g = if span > 0.0 {
            ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        bytes.push(g);
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}
