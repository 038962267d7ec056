//! Ground-truth activity phantoms: superpositions of ellipsoidal sources with
//! Fermi-profile edges, randomized phantom sampling for training data, and
//! the fixed evaluation presets (A, B, Shepp-Logan).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::tomo::Image;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Radial edge profile of a source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// Soft Fermi edge: amplitude · (exp((r−R)/(d·R)) + 1)⁻¹.
    Fermi { diffusion: f64 },
    /// Piecewise-constant ellipse: amplitude inside r < R, zero outside.
    Uniform,
}

/// One ellipsoidal source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub name: String,
    pub amplitude: f64,
    pub center: (f64, f64),
    pub semi_axes: (f64, f64),
    pub orientation: f64,
    pub profile: Profile,
}

impl SourceSpec {
    fn validate(&self) -> Result<()> {
        let (u, v) = self.semi_axes;
        if !(u > 0.0 && v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "source '{}' semi-axes must be positive",
                self.name
            )));
        }
        if let Profile::Fermi { diffusion } = self.profile {
            if !(diffusion > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "source '{}' diffusion must be positive",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Contribution of this source at physical point (x, y).
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        let r = dx.hypot(dy);
        let theta = dy.atan2(dx);
        let radius = geometric_radius(self, theta);
        match self.profile {
            Profile::Fermi { diffusion } => {
                self.amplitude / (((r - radius) / (diffusion * radius)).exp() + 1.0)
            }
            Profile::Uniform => {
                if r < radius {
                    self.amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// True when pixel-center (x, y) lies strictly inside the ellipse.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        let r = dx.hypot(dy);
        r < geometric_radius(self, dy.atan2(dx))
    }
}

/// Ellipse radius along direction θ: R = uv / √(u²cos²(θ−φ) + v²sin²(θ−φ)).
pub fn geometric_radius(src: &SourceSpec, theta: f64) -> f64 {
    let (u, v) = src.semi_axes;
    let (sin_d, cos_d) = (theta - src.orientation).sin_cos();
    u * v / (u * u * cos_d * cos_d + v * v * sin_d * sin_d).sqrt()
}

/// Full phantom description: uniform background plus a list of sources.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub background: f64,
    pub n: usize,
    pub sources: Vec<SourceSpec>,
}

/// Boolean pixel mask on an n×n grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub n: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn mean_over(&self, img: &Image) -> f64 {
        let count = self.count();
        if count == 0 {
            return f64::NAN;
        }
        let sum: f64 = self
            .data
            .iter()
            .zip(&img.data)
            .filter(|(&m, _)| m)
            .map(|(_, &v)| v)
            .sum();
        sum / count as f64
    }

    /// Population standard deviation over the masked pixels.
    pub fn std_over(&self, img: &Image) -> f64 {
        let count = self.count();
        if count == 0 {
            return f64::NAN;
        }
        let mean = self.mean_over(img);
        let ss: f64 = self
            .data
            .iter()
            .zip(&img.data)
            .filter(|(&m, _)| m)
            .map(|(_, &v)| (v - mean) * (v - mean))
            .sum();
        (ss / count as f64).sqrt()
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("phantom n must be >= 1".into()));
        }
        for src in &self.sources {
            src.validate()?;
        }
        Ok(())
    }

    /// ROI mask for source `k`: pixel centers strictly inside the ellipse.
    pub fn roi_mask(&self, k: usize) -> Mask {
        let src = &self.sources[k];
        let n = self.n;
        let data = (0..n * n)
            .map(|i| {
                let (x, y) = Image::pixel_center(n, i / n, i % n);
                src.contains(x, y)
            })
            .collect();
        Mask { n, data }
    }

    pub fn roi_masks(&self) -> Vec<(String, Mask)> {
        (0..self.sources.len())
            .map(|k| (self.sources[k].name.clone(), self.roi_mask(k)))
            .collect()
    }

    /// Pixels farther than a 2-pixel dilation from every source ellipse.
    pub fn background_mask(&self) -> Mask {
        let n = self.n;
        let mut union = vec![false; n * n];
        for k in 0..self.sources.len() {
            for (u, m) in union.iter_mut().zip(self.roi_mask(k).data) {
                *u |= m;
            }
        }
        let radius = 2isize;
        let data = (0..n * n)
            .map(|i| {
                let (r, c) = ((i / n) as isize, (i % n) as isize);
                for dr in -radius..=radius {
                    for dc in -radius..=radius {
                        let (rr, cc) = (r + dr, c + dc);
                        if rr >= 0
                            && rr < n as isize
                            && cc >= 0
                            && cc < n as isize
                            && union[rr as usize * n + cc as usize]
                        {
                            return false;
                        }
                    }
                }
                true
            })
            .collect();
        Mask { n, data }
    }
}

/// Render a phantom and report how many pixels were clamped at zero.
pub fn render_phantom_clamped(spec: &PhantomSpec) -> Result<(Image, usize)> {
    spec.validate()?;
    let n = spec.n;
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (x, y) = Image::pixel_center(n, i / n, i % n);
            let mut v = spec.background;
            for src in &spec.sources {
                v += src.value_at(x, y);
            }
            v
        })
        .collect();
    let clamped = values.iter().filter(|&&v| v < 0.0).count();
    let data = values.into_iter().map(|v| v.max(0.0)).collect();
    Ok((
        Image {
            n,
            data,
            pixel_size: 1.0,
        },
        clamped,
    ))
}

/// Render a phantom on pixel centers in [−n/2, n/2]², clamped at zero.
pub fn render_phantom(spec: &PhantomSpec) -> Result<Image> {
    render_phantom_clamped(spec).map(|(img, _)| img)
}

/// Closed real interval for randomized parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::Config(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Interval { lo, hi })
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

/// Sampling limits for random training phantoms (everything in pixel units).
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationLimits {
    pub n: usize,
    pub source_count: (usize, usize),
    pub background: Interval,
    pub amplitude: Interval,
    /// Distance of a source center from the image center.
    pub center_radius: Interval,
    pub semi_axes: Interval,
    pub orientation: Interval,
    pub diffusion: Interval,
}

impl RandomizationLimits {
    /// Desk-scale defaults for an n×n grid.
    pub fn desk_default(n: usize) -> Self {
        let half = n as f64 / 2.0;
        RandomizationLimits {
            n,
            source_count: (1, 5),
            background: Interval { lo: 0.05, hi: 0.3 },
            amplitude: Interval { lo: -0.5, hi: 1.0 },
            center_radius: Interval {
                lo: 0.0,
                hi: 0.8 * half,
            },
            semi_axes: Interval {
                lo: 0.05 * n as f64,
                hi: 0.25 * n as f64,
            },
            orientation: Interval { lo: 0.0, hi: PI },
            diffusion: Interval { lo: 0.02, hi: 0.15 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("limits n must be >= 1".into()));
        }
        if self.source_count.0 > self.source_count.1 {
            return Err(Error::Config("source count range is empty".into()));
        }
        for (name, iv) in [
            ("background", self.background),
            ("amplitude", self.amplitude),
            ("center_radius", self.center_radius),
            ("semi_axes", self.semi_axes),
            ("orientation", self.orientation),
            ("diffusion", self.diffusion),
        ] {
            if !(iv.lo <= iv.hi) {
                return Err(Error::Config(format!("{name} interval is empty")));
            }
        }
        if !(self.semi_axes.lo > 0.0) {
            return Err(Error::Config("semi-axes must be positive".into()));
        }
        if !(self.diffusion.lo > 0.0) {
            return Err(Error::Config("diffusion must be positive".into()));
        }
        Ok(())
    }
}

const MAX_CENTER_REDRAWS: usize = 1000;

/// Draw a random phantom uniformly within `limits`, deterministic in `seed`.
///
/// Source centers are re-drawn until the bounding ellipse fits inside the
/// field of view.
pub fn sample_random_phantom(limits: &RandomizationLimits, seed: u64) -> Result<PhantomSpec> {
    limits.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = if limits.source_count.0 == limits.source_count.1 {
        limits.source_count.0
    } else {
        rng.gen_range(limits.source_count.0..=limits.source_count.1)
    };
    let background = limits.background.sample(&mut rng);
    let half = limits.n as f64 / 2.0;
    let mut sources = Vec::with_capacity(k);
    for idx in 0..k {
        let amplitude = limits.amplitude.sample(&mut rng);
        let u = limits.semi_axes.sample(&mut rng);
        let v = limits.semi_axes.sample(&mut rng);
        let orientation = limits.orientation.sample(&mut rng);
        let diffusion = limits.diffusion.sample(&mut rng);
        let margin = u.max(v);
        let mut center = None;
        for _ in 0..MAX_CENTER_REDRAWS {
            let radius = limits.center_radius.sample(&mut rng);
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let (cx, cy) = (radius * angle.cos(), radius * angle.sin());
            if cx.abs() + margin <= half && cy.abs() + margin <= half {
                center = Some((cx, cy));
                break;
            }
        }
        let center = center.ok_or_else(|| {
            Error::InvalidInput(format!(
                "source of extent {margin:.1} px cannot fit a {0}x{0} field of view",
                limits.n
            ))
        })?;
        sources.push(SourceSpec {
            name: format!("source_{idx}"),
            amplitude,
            center,
            semi_axes: (u, v),
            orientation,
            profile: Profile::Fermi { diffusion },
        });
    }
    Ok(PhantomSpec {
        background,
        n: limits.n,
        sources,
    })
}

/// Named evaluation phantoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    A,
    B,
    SheppLogan,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Preset::A),
            "b" => Ok(Preset::B),
            "shepp_logan" | "shepp-logan" | "c" => Ok(Preset::SheppLogan),
            other => Err(Error::Config(format!("unknown phantom preset '{other}'"))),
        }
    }
}

const PHANTOM_A: &str = include_str!("../data/phantom_a.txt");
const PHANTOM_B: &str = include_str!("../data/phantom_b.txt");
const SHEPP_LOGAN: &str = include_str!("../data/shepp_logan.txt");

/// Load one of the versioned preset tables, scaled to an n×n grid.
pub fn preset_phantom(preset: Preset, n: usize) -> Result<PhantomSpec> {
    if n == 0 {
        return Err(Error::InvalidInput("phantom n must be >= 1".into()));
    }
    let text = match preset {
        Preset::A => PHANTOM_A,
        Preset::B => PHANTOM_B,
        Preset::SheppLogan => SHEPP_LOGAN,
    };
    parse_spec_text(text, Some(n))
}

// --- text serialization -----------------------------------------------------

impl PhantomSpec {
    /// Human-readable key/value serialization (pixel units).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("phantom v1\n");
        out.push_str("units pixels\n");
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("background {:?}\n", self.background));
        for s in &self.sources {
            let profile = match s.profile {
                Profile::Fermi { diffusion } => format!("fermi diffusion={diffusion:?}"),
                Profile::Uniform => "uniform".to_string(),
            };
            out.push_str(&format!(
                "source name={} amplitude={:?} cx={:?} cy={:?} u={:?} v={:?} phi={:?} profile={}\n",
                s.name,
                s.amplitude,
                s.center.0,
                s.center.1,
                s.semi_axes.0,
                s.semi_axes.1,
                s.orientation,
                profile
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PhantomSpec> {
        parse_spec_text(text, None)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<PhantomSpec> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Parse the phantom text format. Files in `fraction` units store centers and
/// axes as fractions of n and require `target_n`.
fn parse_spec_text(text: &str, target_n: Option<usize>) -> Result<PhantomSpec> {
    let mut units_fraction = false;
    let mut n: Option<usize> = None;
    let mut background = 0.0;
    let mut sources = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, ' ');
        let key = parts.next().unwrap();
        let rest = parts.next().unwrap_or("").trim();
        match key {
            "phantom" => {
                if rest != "v1" {
                    return Err(Error::Parse(format!("unsupported phantom format '{rest}'")));
                }
            }
            "units" => match rest {
                "pixels" => units_fraction = false,
                "fraction" => units_fraction = true,
                other => return Err(Error::Parse(format!("unknown units '{other}'"))),
            },
            "n" => {
                n = Some(rest.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad n '{rest}'", lineno + 1))
                })?);
            }
            "background" => {
                background = rest.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad background '{rest}'", lineno + 1))
                })?;
            }
            "source" => sources.push(parse_source(rest, lineno + 1)?),
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }

    let n = match (units_fraction, target_n, n) {
        (true, Some(t), _) => t,
        (true, None, _) => {
            return Err(Error::Parse(
                "fraction-unit phantom requires a target grid size".into(),
            ))
        }
        (false, _, Some(stored)) => stored,
        (false, _, None) => return Err(Error::Parse("phantom file missing n".into())),
    };

    if units_fraction {
        let scale = n as f64;
        for s in &mut sources {
            s.center.0 *= scale;
            s.center.1 *= scale;
            s.semi_axes.0 *= scale;
            s.semi_axes.1 *= scale;
        }
    }

    let spec = PhantomSpec {
        background,
        n,
        sources,
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_source(rest: &str, lineno: usize) -> Result<SourceSpec> {
    let mut name = String::new();
    let mut amplitude = None;
    let mut cx = None;
    let mut cy = None;
    let mut u = None;
    let mut v = None;
    let mut phi = 0.0;
    let mut profile_kind = "fermi".to_string();
    let mut diffusion = None;

    for tok in rest.split_whitespace() {
        let (key, value) = tok.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {lineno}: expected key=value, got '{tok}'"))
        })?;
        let parse_f = |v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad number '{v}'")))
        };
        match key {
            "name" => name = value.to_string(),
            "amplitude" => amplitude = Some(parse_f(value)?),
            "cx" => cx = Some(parse_f(value)?),
            "cy" => cy = Some(parse_f(value)?),
            "u" => u = Some(parse_f(value)?),
            "v" => v = Some(parse_f(value)?),
            "phi" => phi = parse_f(value)?,
            "profile" => profile_kind = value.to_string(),
            "diffusion" => diffusion = Some(parse_f(value)?),
            other => {
                return Err(Error::Parse(format!(
                    "line {lineno}: unknown source key '{other}'"
                )))
            }
        }
    }

    let missing = |what: &str| Error::Parse(format!("line {lineno}: source missing {what}"));
    let profile = match profile_kind.as_str() {
        "fermi" => Profile::Fermi {
            diffusion: diffusion.ok_or_else(|| missing("diffusion"))?,
        },
        "uniform" => Profile::Uniform,
        other => {
            return Err(Error::Parse(format!(
                "line {lineno}: unknown profile '{other}'"
            )))
        }
    };
    Ok(SourceSpec {
        name,
        amplitude: amplitude.ok_or_else(|| missing("amplitude"))?,
        center: (
            cx.ok_or_else(|| missing("cx"))?,
            cy.ok_or_else(|| missing("cy"))?,
        ),
        semi_axes: (
            u.ok_or_else(|| missing("u"))?,
            v.ok_or_else(|| missing("v"))?,
        ),
        orientation: phi,
        profile,
    })
}
