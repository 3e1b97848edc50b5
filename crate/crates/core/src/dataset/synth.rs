//! Synthetic stand-in for cropped PCB defect images.
//!
//! True-like images put two to four hard-edged, high-contrast shapes (disks,
//! rectangles, streaks) on a quiet background. Pseudo-like images are smooth
//! low-contrast gradients with soft smudges and fine-grain noise. Pixels are
//! integers in `0..=255`, so the images survive a PGM round trip unchanged.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{write_pgm, DatasetError, LabeledSample};
use crate::dwt::Image;
use crate::Label;

fn file_name(label: Label, index: usize) -> String {
    format!("{label}_{index:03}.pgm")
}

fn background(rng: &mut ChaCha8Rng, size: usize, amplitude: f64) -> impl Fn(usize, usize) -> f64 {
    let base = rng.random_range(90.0..150.0);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let (dx, dy) = (angle.cos(), angle.sin());
    let span = size as f64;
    move |r, c| {
        let t = (c as f64 - span / 2.0) * dx + (r as f64 - span / 2.0) * dy;
        base + amplitude * t / span
    }
}

fn true_like(rng: &mut ChaCha8Rng, size: usize) -> Image {
    let amplitude = rng.random_range(0.0..15.0);
    let bg = background(rng, size, amplitude);
    let noise = Normal::new(0.0, 1.0).expect("valid sd");
    let mut pixels: Vec<f64> = (0..size * size)
        .map(|i| bg(i / size, i % size) + noise.sample(rng))
        .collect();

    let s = size as f64;
    let defects = rng.random_range(2..=4);
    for _ in 0..defects {
        let value = if rng.random_bool(0.5) {
            rng.random_range(215.0..250.0)
        } else {
            rng.random_range(5.0..40.0)
        };
        let (cy, cx) = (
            rng.random_range(0.15 * s..0.85 * s),
            rng.random_range(0.15 * s..0.85 * s),
        );
        let inside: Box<dyn Fn(f64, f64) -> bool> = match rng.random_range(0..3) {
            0 => {
                let radius = rng.random_range(0.05 * s..0.13 * s);
                Box::new(move |y, x| (y - cy).powi(2) + (x - cx).powi(2) <= radius * radius)
            }
            1 => {
                let (hh, hw) = (
                    rng.random_range(0.03 * s..0.1 * s),
                    rng.random_range(0.03 * s..0.1 * s),
                );
                Box::new(move |y, x| (y - cy).abs() <= hh && (x - cx).abs() <= hw)
            }
            _ => {
                let angle = rng.random_range(0.0..std::f64::consts::PI);
                let (dy, dx) = (angle.sin(), angle.cos());
                let half_len = rng.random_range(0.12 * s..0.3 * s);
                let half_width = rng.random_range(1.0..2.5);
                Box::new(move |y, x| {
                    let along = (y - cy) * dy + (x - cx) * dx;
                    let across = -(y - cy) * dx + (x - cx) * dy;
                    along.abs() <= half_len && across.abs() <= half_width
                })
            }
        };
        for (i, p) in pixels.iter_mut().enumerate() {
            if inside((i / size) as f64, (i % size) as f64) {
                *p = value;
            }
        }
    }
    finish(size, pixels)
}

fn pseudo_like(rng: &mut ChaCha8Rng, size: usize) -> Image {
    let amplitude = rng.random_range(10.0..30.0);
    let bg = background(rng, size, amplitude);
    let s = size as f64;
    let smudges: Vec<(f64, f64, f64, f64)> = (0..rng.random_range(1..=2))
        .map(|_| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (
                rng.random_range(0.0..s),
                rng.random_range(0.0..s),
                rng.random_range(0.1 * s..0.22 * s),
                sign * rng.random_range(10.0..25.0),
            )
        })
        .collect();
    let noise = Normal::new(0.0, rng.random_range(5.0..9.0)).expect("valid sd");
    let pixels = (0..size * size)
        .map(|i| {
            let (y, x) = ((i / size) as f64, (i % size) as f64);
            let soft: f64 = smudges
                .iter()
                .map(|&(cy, cx, width, amp)| {
                    amp * (-((y - cy).powi(2) + (x - cx).powi(2)) / (2.0 * width * width)).exp()
                })
                .sum();
            bg(i / size, i % size) + soft + noise.sample(rng)
        })
        .collect();
    finish(size, pixels)
}

fn finish(size: usize, pixels: Vec<f64>) -> Image {
    let pixels = pixels.into_iter().map(|p| p.round().clamp(0.0, 255.0)).collect();
    Image::new(size, size, pixels).expect("square image")
}

/// Generates `n_per_class` true-like then `n_per_class` pseudo-like
/// `size`×`size` images. Identical arguments give identical pixels.
pub fn synth_generate(n_per_class: usize, size: usize, seed: u64) -> Vec<LabeledSample> {
    assert!(size >= 8, "synthetic images must be at least 8x8");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(2 * n_per_class);
    for label in Label::ALL {
        for index in 0..n_per_class {
            let image = match label {
                Label::TrueDefect => true_like(&mut rng, size),
                Label::PseudoDefect => pseudo_like(&mut rng, size),
            };
            samples.push(LabeledSample {
                image,
                label,
                source_id: format!("{label}/{}", file_name(label, index)),
            });
        }
    }
    samples
}

/// Writes samples as `root/<label>/<label>_NNN.pgm`, numbering each class from 0.
pub fn write_dataset(samples: &[LabeledSample], root: impl AsRef<Path>) -> Result<(), DatasetError> {
    let root = root.as_ref();
    for label in Label::ALL {
        let dir = root.join(label.as_str());
        fs::create_dir_all(&dir).map_err(|e| DatasetError::io(&dir, e))?;
        for (index, sample) in samples.iter().filter(|s| s.label == label).enumerate() {
            write_pgm(&sample.image, dir.join(file_name(label, index)))?;
        }
    }
    Ok(())
}
