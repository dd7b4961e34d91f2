use std::fs;
use std::io::Write;
use std::path::Path;

use image::{ImageBuffer, ImageFormat, Luma, Rgb};

use super::DatasetError;
use crate::ops::Image;
use crate::scene::MaskMap;

fn io_err(path: &Path, e: impl std::fmt::Display) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    }
}

pub fn encode_rgb_png(img: &Image) -> Result<Vec<u8>, DatasetError> {
    let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_raw(img.width() as u32, img.height() as u32, img.to_rgb8()).ok_or_else(
            || DatasetError::Io {
                path: "<memory>".into(),
                detail: "raster size".into(),
            },
        )?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| io_err(Path::new("<memory>"), e))?;
    Ok(out.into_inner())
}

/// Label rasters use 8-bit gray when every label fits, 16-bit otherwise.
pub fn encode_mask_png(mask: &MaskMap) -> Result<Vec<u8>, DatasetError> {
    let (w, h) = (mask.width() as u32, mask.height() as u32);
    let mut out = std::io::Cursor::new(Vec::new());
    let res = if mask.labels().iter().all(|&l| l <= 255) {
        let raw: Vec<u8> = mask.labels().iter().map(|&l| l as u8).collect();
        ImageBuffer::<Luma<u8>, _>::from_raw(w, h, raw)
            .map(|b| b.write_to(&mut out, ImageFormat::Png))
    } else {
        ImageBuffer::<Luma<u16>, _>::from_raw(w, h, mask.labels().to_vec())
            .map(|b| b.write_to(&mut out, ImageFormat::Png))
    };
    match res {
        Some(Ok(())) => Ok(out.into_inner()),
        Some(Err(e)) => Err(io_err(Path::new("<memory>"), e)),
        None => Err(DatasetError::Io {
            path: "<memory>".into(),
            detail: "mask size".into(),
        }),
    }
}

pub fn read_rgb_png(path: &Path) -> Result<Image, DatasetError> {
    let img = image::open(path).map_err(|e| io_err(path, e))?.to_rgb8();
    let (w, h) = img.dimensions();
    Image::from_rgb8(w as usize, h as usize, img.as_raw()).map_err(|e| io_err(path, e))
}

pub fn read_mask_png(path: &Path) -> Result<MaskMap, DatasetError> {
    let dynimg = image::open(path).map_err(|e| io_err(path, e))?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    let labels: Vec<u16> = match dynimg {
        image::DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(u16::from).collect(),
        image::DynamicImage::ImageLuma16(b) => b.into_raw(),
        other => {
            return Err(io_err(
                path,
                format!(
                    "expected an 8- or 16-bit gray label image, found {:?}",
                    other.color()
                ),
            ))
        }
    };
    Ok(MaskMap::new(w, h, labels))
}

/// Write bytes to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Write to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, DatasetError> {
    fs::read(path).map_err(|e| io_err(path, e))
}
