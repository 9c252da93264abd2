use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;

use super::{read_matrix_csv, read_pgm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameFile {
    /// Integer index parsed from the file name (last run of digits in the stem).
    pub index: u64,
    pub path: PathBuf,
}

/// Ordered listing of the frame files in a directory.
///
/// Listing is cheap; frames are loaded one at a time by [`FrameDir::frames`],
/// which checks that every frame has the dimensions of the first.
#[derive(Debug, Clone)]
pub struct FrameDir {
    files: Vec<FrameFile>,
}

impl FrameDir {
    pub fn files(&self) -> &[FrameFile] {
        &self.files
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Frames in ascending index order.
    pub fn frames(&self) -> impl Iterator<Item = Result<ImageMatrix>> + '_ {
        let mut dims = None;
        self.files.iter().map(move |f| {
            let m = read_frame(&f.path)?;
            match dims {
                None => dims = Some(m.dims()),
                Some(d) if d != m.dims() => {
                    return Err(Error::in_file(
                        &f.path,
                        Error::DimensionMismatch {
                            expected: d,
                            actual: m.dims(),
                        },
                    ))
                }
                Some(_) => {}
            }
            Ok(m)
        })
    }

    pub fn load_all(&self) -> Result<Vec<ImageMatrix>> {
        self.frames().collect()
    }
}

fn trailing_index(stem: &str) -> Option<u64> {
    let end = stem.rfind(|c: char| c.is_ascii_digit())? + 1;
    let start = stem[..end]
        .rfind(|c: char| !c.is_ascii_digit())
        .map_or(0, |k| k + 1);
    stem[start..end].parse().ok()
}

/// Reads one frame, choosing the decoder by extension (`.pgm` or `.csv`).
pub fn read_frame(path: &Path) -> Result<ImageMatrix> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("pgm") => read_pgm(path),
        Some("csv") => read_matrix_csv(path),
        _ => Err(Error::FrameDir(format!(
            "{}: unsupported frame format (expected .pgm or .csv)",
            path.display()
        ))),
    }
}

/// Lists files in `dir` whose names match `pattern` (shell glob such as
/// `frame_*.pgm`), ordered by the integer index in each name.
///
/// Gaps in the numbering are fine. A matched name without digits, or two
/// files with the same index, is an error.
pub fn read_frame_dir(dir: impl AsRef<Path>, pattern: &str) -> Result<FrameDir> {
    let dir = dir.as_ref();
    let pat = glob::Pattern::new(pattern).map_err(|e| Error::FrameDir(format!("bad pattern `{pattern}`: {e}")))?;
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if !pat.matches(name) || !entry.path().is_file() {
            continue;
        }
        let path = entry.path();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        let index = trailing_index(stem)
            .ok_or_else(|| Error::FrameDir(format!("{}: no frame index in file name", path.display())))?;
        files.push(FrameFile { index, path });
    }
    if files.is_empty() {
        return Err(Error::FrameDir(format!(
            "no files in {} match `{pattern}`",
            dir.display()
        )));
    }
    files.sort_by(|a, b| a.index.cmp(&b.index).then_with(|| a.path.cmp(&b.path)));
    if let Some(w) = files.windows(2).find(|w| w[0].index == w[1].index) {
        return Err(Error::FrameDir(format!(
            "{} and {} share frame index {}",
            w[0].path.display(),
            w[1].path.display(),
            w[0].index
        )));
    }
    Ok(FrameDir { files })
}
