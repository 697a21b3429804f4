//! Fixed-size PNG rendering of density and stress fields.

mod jet;

pub use jet::JET;

use thiserror::Error;

use crate::fea::Mesh;
use crate::scalar::Scalar;

pub const IMAGE_SIZE: usize = 300;
const WHITE: [u8; 3] = [255, 255, 255];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("field is empty")]
    Empty,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("png encoding failed: {0}")]
    Encode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Density,
    Stress,
}

/// Colors one planar cell per `(ix, iy)`; 3D fields are reduced by taking the
/// maximum along depth.
fn project<T: Scalar>(mesh: &Mesh, values: &[T]) -> Vec<f64> {
    let (nx, ny, nz) = (mesh.nx(), mesh.ny(), mesh.nz());
    let mut out = vec![f64::NEG_INFINITY; nx * ny];
    for iz in 0..nz {
        for iy in 0..ny {
            for ix in 0..nx {
                let v = values[mesh.element_index(ix, iy, iz)].as_f64();
                let slot = &mut out[iy * nx + ix];
                *slot = slot.max(v);
            }
        }
    }
    out
}

fn rasterize(mesh: &Mesh, colors: &[[u8; 3]]) -> Vec<u8> {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let size = IMAGE_SIZE as f64;
    let scale = (size / nx as f64).min(size / ny as f64);
    let (w, h) = (nx as f64 * scale, ny as f64 * scale);
    let (ox, oy) = ((size - w) / 2.0, (size - h) / 2.0);
    let mut pixels = Vec::with_capacity(IMAGE_SIZE * IMAGE_SIZE * 3);
    for py in 0..IMAGE_SIZE {
        for px in 0..IMAGE_SIZE {
            let fx = (px as f64 + 0.5 - ox) / scale;
            let fy = (py as f64 + 0.5 - oy) / scale;
            let color = if fx >= 0.0 && fy >= 0.0 && fx < nx as f64 && fy < ny as f64 {
                let ix = fx as usize;
                let iy = ny - 1 - fy as usize;
                colors[iy * nx + ix]
            } else {
                WHITE
            };
            pixels.extend_from_slice(&color);
        }
    }
    pixels
}

fn encode(pixels: &[u8]) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, IMAGE_SIZE as u32, IMAGE_SIZE as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        enc.set_filter(png::Filter::Sub);
        let mut writer = enc.write_header().map_err(|e| RenderError::Encode(e.to_string()))?;
        writer.write_image_data(pixels).map_err(|e| RenderError::Encode(e.to_string()))?;
        writer.finish().map_err(|e| RenderError::Encode(e.to_string()))?;
    }
    Ok(out)
}

fn check<T>(mesh: &Mesh, values: &[T]) -> Result<(), RenderError> {
    if values.is_empty() {
        return Err(RenderError::Empty);
    }
    if values.len() != mesh.n_elements() {
        return Err(RenderError::LengthMismatch { expected: mesh.n_elements(), got: values.len() });
    }
    Ok(())
}

/// Grayscale density image, 1 rendered black and 0 white.
pub fn render_density_png<T: Scalar>(mesh: &Mesh, densities: &[T]) -> Result<Vec<u8>, RenderError> {
    check(mesh, densities)?;
    let colors: Vec<[u8; 3]> = project(mesh, densities)
        .into_iter()
        .map(|rho| {
            let g = (255.0 * (1.0 - rho.clamp(0.0, 1.0))).round() as u8;
            [g, g, g]
        })
        .collect();
    encode(&rasterize(mesh, &colors))
}

/// Stress normalization: maximum over elements with density above 0.5,
/// falling back to the global maximum. `None` when every value is zero.
pub fn stress_scale<T: Scalar>(stress: &[T], densities: &[T]) -> Option<f64> {
    let solid =
        stress.iter().zip(densities).filter(|(_, &r)| r > T::lit(0.5)).map(|(s, _)| s.as_f64()).fold(0.0, f64::max);
    let scale = if solid > 0.0 { solid } else { stress.iter().map(|s| s.as_f64()).fold(0.0, f64::max) };
    (scale > 0.0).then_some(scale)
}

/// Jet-colored von Mises image normalized by [`stress_scale`].
pub fn render_stress_png<T: Scalar>(mesh: &Mesh, stress: &[T], densities: &[T]) -> Result<Vec<u8>, RenderError> {
    check(mesh, stress)?;
    check(mesh, densities)?;
    let scale = stress_scale(stress, densities);
    let colors: Vec<[u8; 3]> = project(mesh, stress)
        .into_iter()
        .map(|s| match scale {
            Some(scale) => JET[((s / scale).clamp(0.0, 1.0) * 255.0).round() as usize],
            None => JET[0],
        })
        .collect();
    encode(&rasterize(mesh, &colors))
}

pub fn render_field_png<T: Scalar>(
    kind: FieldKind,
    mesh: &Mesh,
    densities: &[T],
    stress: &[T],
) -> Result<Vec<u8>, RenderError> {
    match kind {
        FieldKind::Density => render_density_png(mesh, densities),
        FieldKind::Stress => render_stress_png(mesh, stress, densities),
    }
}
