//! On-disk corpus layout: `<out>/queue/` and `<out>/failures/` hold one
//! parameter file per entry, named `id_NNNNNN_<result>.bdvf`, with the
//! concrete input next to it as `id_NNNNNN_<result>.input`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::choice_source::SplitParameterSequence;
use crate::harness::ValidityResult;
use crate::params_file::{self, ParamsFileError};

pub const QUEUE_DIR: &str = "queue";
pub const FAILURES_DIR: &str = "failures";
pub const PARAMS_EXT: &str = "bdvf";
pub const INPUT_EXT: &str = "input";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: ParamsFileError },
}

impl CorpusError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn path(&self) -> &Path {
        match self {
            CorpusError::Io { path, .. } | CorpusError::Format { path, .. } => path,
        }
    }
}

pub fn entry_stem(id: u64, result: ValidityResult) -> String {
    format!("id_{id:06}_{result}")
}

/// The result class recorded in an entry's file name, if any.
pub fn recorded_result(path: &Path) -> Option<ValidityResult> {
    let stem = path.file_stem()?.to_str()?;
    stem.rsplit('_').next()?.parse().ok()
}

/// Writes `<dir>/<stem>.bdvf` and `<dir>/<stem>.input`, returning the
/// parameter file path.
pub fn write_entry(
    dir: &Path,
    stem: &str,
    params: &SplitParameterSequence,
    concrete: &[u8],
) -> Result<PathBuf, CorpusError> {
    let path = dir.join(format!("{stem}.{PARAMS_EXT}"));
    let bytes = params_file::encode(params).map_err(|source| CorpusError::Format {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, bytes).map_err(|e| CorpusError::io(&path, e))?;
    let input_path = dir.join(format!("{stem}.{INPUT_EXT}"));
    fs::write(&input_path, concrete).map_err(|e| CorpusError::io(&input_path, e))?;
    Ok(path)
}

pub fn read_entry(path: &Path) -> Result<SplitParameterSequence, CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    params_file::decode(&bytes).map_err(|source| CorpusError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Parameter files under `path`: the file itself, or every `.bdvf` file
/// directly inside the directory and inside its `queue/` and `failures/`
/// subdirectories, sorted by path.
pub fn list_params_files(path: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let meta = fs::metadata(path).map_err(|e| CorpusError::io(path, e))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    let mut dirs = vec![path.to_path_buf()];
    for sub in [QUEUE_DIR, FAILURES_DIR] {
        let d = path.join(sub);
        if d.is_dir() {
            dirs.push(d);
        }
    }
    for dir in dirs {
        for entry in fs::read_dir(&dir).map_err(|e| CorpusError::io(&dir, e))? {
            let p = entry.map_err(|e| CorpusError::io(&dir, e))?.path();
            if p.is_file() && p.extension().is_some_and(|e| e == PARAMS_EXT) {
                files.push(p);
            }
        }
    }
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_carry_the_result() {
        assert_eq!(entry_stem(7, ValidityResult::Failure), "id_000007_failure");
        assert_eq!(
            recorded_result(Path::new("x/queue/id_000012_valid.bdvf")),
            Some(ValidityResult::Valid)
        );
        assert_eq!(recorded_result(Path::new("seed.bdvf")), None);
    }

    #[test]
    fn write_list_read() {
        let dir = tempfile::tempdir().unwrap();
        let q = dir.path().join(QUEUE_DIR);
        fs::create_dir(&q).unwrap();
        let params = SplitParameterSequence::new(vec![1, 0], vec![3, 0, 0, 0]);
        let written = write_entry(&q, &entry_stem(0, ValidityResult::Invalid), &params, b"3").unwrap();
        fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let files = list_params_files(dir.path()).unwrap();
        assert_eq!(files, vec![written.clone()]);
        assert_eq!(read_entry(&written).unwrap(), params);
        assert_eq!(list_params_files(&written).unwrap(), vec![written]);
        assert!(list_params_files(&dir.path().join("missing")).is_err());
    }
}
