use std::fmt;

use super::{DwtError, FilterPair, Image};

/// Sub-band orientation. The first letter is the filter applied along rows,
/// the second the filter applied along columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BandKind {
    LL,
    LH,
    HL,
    HH,
}

impl BandKind {
    /// Detail orientations in canonical order.
    pub const DETAILS: [BandKind; 3] = [BandKind::LH, BandKind::HL, BandKind::HH];

    pub fn name(self) -> &'static str {
        match self {
            BandKind::LL => "LL",
            BandKind::LH => "LH",
            BandKind::HL => "HL",
            BandKind::HH => "HH",
        }
    }
}

impl fmt::Display for BandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One output grid of a decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct Subband {
    kind: BandKind,
    level: u32,
    data: Image,
}

impl Subband {
    pub fn new(kind: BandKind, level: u32, data: Image) -> Self {
        Subband { kind, level, data }
    }

    pub fn kind(&self) -> BandKind {
        self.kind
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn height(&self) -> usize {
        self.data.height()
    }

    pub fn width(&self) -> usize {
        self.data.width()
    }

    pub fn coefficients(&self) -> &[f64] {
        self.data.pixels()
    }

    pub fn as_image(&self) -> &Image {
        &self.data
    }

    /// `LH2`, `LL3`, ...
    pub fn label(&self) -> String {
        format!("{}{}", self.kind, self.level)
    }
}

/// The four grids produced by one analysis step.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelBands {
    pub ll: Image,
    pub lh: Image,
    pub hl: Image,
    pub hh: Image,
}

/// Multi-level decomposition: detail triples for levels `1..=levels` plus the
/// final approximation `LL_levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPyramid {
    filter: FilterPair,
    source_height: usize,
    source_width: usize,
    details: Vec<[Subband; 3]>,
    approximation: Subband,
}

impl SubbandPyramid {
    pub fn levels(&self) -> u32 {
        self.details.len() as u32
    }

    pub fn filter(&self) -> &FilterPair {
        &self.filter
    }

    pub fn source_height(&self) -> usize {
        self.source_height
    }

    pub fn source_width(&self) -> usize {
        self.source_width
    }

    /// `(LH, HL, HH)` at `level` (1-based).
    pub fn details(&self, level: u32) -> Option<&[Subband; 3]> {
        level
            .checked_sub(1)
            .and_then(|idx| self.details.get(idx as usize))
    }

    pub fn approximation(&self) -> &Subband {
        &self.approximation
    }

    /// All bands in canonical order: `LH1, HL1, HH1, LH2, ..., HH_L, LL_L`.
    pub fn bands(&self) -> impl Iterator<Item = &Subband> {
        self.details
            .iter()
            .flat_map(|triple| triple.iter())
            .chain(std::iter::once(&self.approximation))
    }

    pub fn coefficient_count(&self) -> usize {
        self.bands().map(|b| b.coefficients().len()).sum()
    }

    pub fn energy(&self) -> f64 {
        self.bands().map(|b| b.as_image().energy()).sum()
    }
}

#[inline]
fn wrap(index: isize, len: usize) -> usize {
    index.rem_euclid(len as isize) as usize
}

/// One-dimensional analysis with periodic extension:
/// `low[m] = Σ w[i]·x[2m−i]`, `high[m] = Σ h[i]·x[2m−i]`.
fn analyze(input: &[f64], filter: &FilterPair, low: &mut [f64], high: &mut [f64]) {
    let n = input.len();
    for m in 0..n / 2 {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for (i, (w, h)) in filter.lowpass().iter().zip(filter.highpass()).enumerate() {
            let x = input[wrap(2 * m as isize - i as isize, n)];
            lo += w * x;
            hi += h * x;
        }
        low[m] = lo;
        high[m] = hi;
    }
}

/// Adjoint of [`analyze`]; its inverse for orthonormal filters.
fn synthesize(low: &[f64], high: &[f64], filter: &FilterPair, output: &mut [f64]) {
    let n = output.len();
    output.iter_mut().for_each(|x| *x = 0.0);
    for m in 0..n / 2 {
        for (i, (w, h)) in filter.lowpass().iter().zip(filter.highpass()).enumerate() {
            output[wrap(2 * m as isize - i as isize, n)] += w * low[m] + h * high[m];
        }
    }
}

/// Filters every row, then every column of both row outputs.
///
/// `input` plays the role of `LL_j`; the returned bands are level `j+1`.
pub fn decompose_level(input: &Image, filter: &FilterPair) -> Result<LevelBands, DwtError> {
    let (h, w) = (input.height(), input.width());
    if h % 2 != 0 || w % 2 != 0 {
        return Err(DwtError::OddDimension { height: h, width: w });
    }
    let (hh_, hw) = (h / 2, w / 2);

    // Row pass: h x w/2 intermediates.
    let mut row_low = vec![0.0; h * hw];
    let mut row_high = vec![0.0; h * hw];
    for r in 0..h {
        analyze(
            input.row(r),
            filter,
            &mut row_low[r * hw..(r + 1) * hw],
            &mut row_high[r * hw..(r + 1) * hw],
        );
    }

    // Column pass.
    let column_pass = |src: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut low = vec![0.0; hh_ * hw];
        let mut high = vec![0.0; hh_ * hw];
        let mut column = vec![0.0; h];
        let mut lo_col = vec![0.0; hh_];
        let mut hi_col = vec![0.0; hh_];
        for c in 0..hw {
            for (r, slot) in column.iter_mut().enumerate() {
                *slot = src[r * hw + c];
            }
            analyze(&column, filter, &mut lo_col, &mut hi_col);
            for n in 0..hh_ {
                low[n * hw + c] = lo_col[n];
                high[n * hw + c] = hi_col[n];
            }
        }
        (low, high)
    };
    let (ll, lh) = column_pass(&row_low);
    let (hl, hh) = column_pass(&row_high);

    let grid = |data| Image::new(hh_, hw, data).expect("half-size grid");
    Ok(LevelBands {
        ll: grid(ll),
        lh: grid(lh),
        hl: grid(hl),
        hh: grid(hh),
    })
}

/// Inverse of [`decompose_level`] for orthonormal filters.
pub fn reconstruct_level(bands: &LevelBands, filter: &FilterPair) -> Result<Image, DwtError> {
    let (hh_, hw) = (bands.ll.height(), bands.ll.width());
    for (name, band) in [("LH", &bands.lh), ("HL", &bands.hl), ("HH", &bands.hh)] {
        if band.height() != hh_ || band.width() != hw {
            return Err(DwtError::ShapeMismatch(format!(
                "{name} is {}x{}, LL is {hh_}x{hw}",
                band.height(),
                band.width()
            )));
        }
    }
    let (h, w) = (2 * hh_, 2 * hw);

    let column_inverse = |low: &Image, high: &Image| -> Vec<f64> {
        let mut out = vec![0.0; h * hw];
        let mut lo_col = vec![0.0; hh_];
        let mut hi_col = vec![0.0; hh_];
        let mut column = vec![0.0; h];
        for c in 0..hw {
            for n in 0..hh_ {
                lo_col[n] = low.get(n, c);
                hi_col[n] = high.get(n, c);
            }
            synthesize(&lo_col, &hi_col, filter, &mut column);
            for (r, v) in column.iter().enumerate() {
                out[r * hw + c] = *v;
            }
        }
        out
    };
    let row_low = column_inverse(&bands.ll, &bands.lh);
    let row_high = column_inverse(&bands.hl, &bands.hh);

    let mut pixels = vec![0.0; h * w];
    for r in 0..h {
        synthesize(
            &row_low[r * hw..(r + 1) * hw],
            &row_high[r * hw..(r + 1) * hw],
            filter,
            &mut pixels[r * w..(r + 1) * w],
        );
    }
    Image::new(h, w, pixels)
}

/// Decomposes `image` to `levels` levels, recursing on the approximation only.
pub fn decompose(image: &Image, levels: u32, filter: &FilterPair) -> Result<SubbandPyramid, DwtError> {
    if levels == 0 {
        return Err(DwtError::ZeroLevels);
    }
    let (h, w) = (image.height(), image.width());
    let dyadic = levels < usize::BITS && {
        let block = 1usize << levels;
        h % block == 0 && w % block == 0
    };
    if !dyadic {
        return Err(DwtError::NonDyadic {
            height: h,
            width: w,
            levels,
        });
    }

    let mut details = Vec::with_capacity(levels as usize);
    let mut current = image.clone();
    for level in 1..=levels {
        let bands = decompose_level(&current, filter)?;
        details.push([
            Subband::new(BandKind::LH, level, bands.lh),
            Subband::new(BandKind::HL, level, bands.hl),
            Subband::new(BandKind::HH, level, bands.hh),
        ]);
        current = bands.ll;
    }
    Ok(SubbandPyramid {
        filter: filter.clone(),
        source_height: h,
        source_width: w,
        details,
        approximation: Subband::new(BandKind::LL, levels, current),
    })
}

/// Inverts [`decompose`].
pub fn reconstruct(pyramid: &SubbandPyramid) -> Image {
    let mut current = pyramid.approximation.data.clone();
    for triple in pyramid.details.iter().rev() {
        let [lh, hl, hh] = triple;
        let bands = LevelBands {
            ll: current,
            lh: lh.data.clone(),
            hl: hl.data.clone(),
            hh: hh.data.clone(),
        };
        current = reconstruct_level(&bands, &pyramid.filter)
            .expect("pyramid built by decompose has consistent shapes");
    }
    current
}
