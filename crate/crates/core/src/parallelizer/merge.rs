//! Error-file merging: the parent's postprocessing step after all child
//! instances finish.

use std::path::Path;

use crate::error::Result;
use crate::language::errfile::{normalize, read_err_file};
use crate::language::rewrite::Insertion;
use crate::language::ErrorRecord;

/// Set-union of the input error files, sorted ascending by (line, col,
/// code) with duplicates removed. Idempotent and order-independent.
pub fn merge_errors(err_files: &[impl AsRef<Path>]) -> Result<Vec<ErrorRecord>> {
    let mut all = Vec::new();
    for path in err_files {
        all.extend(read_err_file(path.as_ref())?);
    }
    Ok(normalize(all))
}

/// Maps a worker-local error position back to original-source coordinates:
/// each `@` insertion on a line shifts the columns after it right by one.
pub fn canonicalize_positions(records: &mut [ErrorRecord], insertions: &[Insertion]) {
    for r in records {
        let shift = insertions
            .iter()
            .filter(|ins| ins.line == r.line && r.col > ins.col)
            .count() as u32;
        r.col -= shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::errfile::write_err_file;

    #[test]
    fn dedup_across_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.err");
        let b = dir.path().join("b.err");
        write_err_file(&[ErrorRecord::new(3, 1, 4)], &a).unwrap();
        write_err_file(&[ErrorRecord::new(3, 1, 4)], &b).unwrap();
        let merged = merge_errors(&[&a, &b]).unwrap();
        assert_eq!(merged, vec![ErrorRecord::new(3, 1, 4)]);
    }

    #[test]
    fn empty_inputs_merge_empty() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.err");
        let b = dir.path().join("b.err");
        write_err_file(&[], &a).unwrap();
        write_err_file(&[], &b).unwrap();
        assert!(merge_errors(&[&a, &b]).unwrap().is_empty());
    }

    #[test]
    fn random_splits_reassemble() {
        let dir = tempfile::tempdir().unwrap();
        let records: Vec<ErrorRecord> = (1..=20)
            .map(|i| ErrorRecord::new(i, (i * 7) % 11 + 1, if i % 3 == 0 { 4 } else { 30 }))
            .collect();
        // Split across 3 files by residue, including overlaps.
        for k in 0..3u32 {
            let part: Vec<ErrorRecord> =
                records.iter().copied().filter(|r| r.line % 3 == k || r.line % 5 == 0).collect();
            write_err_file(&part, &dir.path().join(format!("{k}.err"))).unwrap();
        }
        let paths: Vec<_> = (0..3).map(|k| dir.path().join(format!("{k}.err"))).collect();
        let merged = merge_errors(&paths).unwrap();
        assert_eq!(merged, normalize(records));
    }

    #[test]
    fn position_canonicalization_shifts_back() {
        let mut records = vec![
            ErrorRecord::new(7, 1, 1),
            ErrorRecord::new(7, 9, 1),
            ErrorRecord::new(8, 9, 1),
        ];
        canonicalize_positions(&mut records, &[Insertion { line: 7, col: 3 }]);
        assert_eq!(
            records,
            vec![
                ErrorRecord::new(7, 1, 1),
                ErrorRecord::new(7, 8, 1),
                ErrorRecord::new(8, 9, 1),
            ]
        );
    }
}
