//! Dataset output: records in shard files separated by blank lines, and
//! a tab-separated manifest with one line per record.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ddgeo_core::generator::RecordMeta;
use ddgeo_core::lang::{serialize_record, Record};

pub const DEFAULT_SHARD_SIZE: usize = 10_000;
pub const MANIFEST: &str = "manifest.tsv";

pub fn shard_name(i: usize) -> String {
    format!("shard-{i:05}.txt")
}

pub struct ShardWriter {
    dir: PathBuf,
    shard_size: usize,
    shard: Option<BufWriter<File>>,
    shard_index: usize,
    in_shard: usize,
    manifest: BufWriter<File>,
    written: usize,
}

impl ShardWriter {
    pub fn create(dir: &Path, shard_size: usize) -> io::Result<ShardWriter> {
        std::fs::create_dir_all(dir)?;
        let manifest = BufWriter::new(File::create(dir.join(MANIFEST))?);
        Ok(ShardWriter {
            dir: dir.to_path_buf(),
            shard_size: shard_size.max(1),
            shard: None,
            shard_index: 0,
            in_shard: 0,
            manifest,
            written: 0,
        })
    }

    /// Appends a record; the manifest line is
    /// `shard-NNNNN.txt#index TAB goal TAB aux TAB proof_len`.
    pub fn write(&mut self, rec: &Record) -> io::Result<()> {
        let text = serialize_record(rec)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        if self.in_shard == self.shard_size {
            self.finish_shard()?;
            self.shard_index += 1;
            self.in_shard = 0;
        }
        if self.shard.is_none() {
            self.shard = Some(BufWriter::new(File::create(
                self.dir.join(shard_name(self.shard_index)),
            )?));
        }
        let w = self.shard.as_mut().expect("open shard");
        if self.in_shard > 0 {
            w.write_all(b"\n")?;
        }
        w.write_all(text.as_bytes())?;
        let m = RecordMeta::of(rec);
        writeln!(
            self.manifest,
            "{}#{}\t{}\t{}\t{}",
            shard_name(self.shard_index),
            self.in_shard,
            m.goal.name(),
            m.aux,
            m.proof_len
        )?;
        self.in_shard += 1;
        self.written += 1;
        Ok(())
    }

    fn finish_shard(&mut self) -> io::Result<()> {
        if let Some(mut w) = self.shard.take() {
            w.flush()?;
        }
        Ok(())
    }

    /// Flushes everything; returns the number of records and shards.
    pub fn finish(mut self) -> io::Result<(usize, usize)> {
        self.finish_shard()?;
        self.manifest.flush()?;
        let shards = if self.written == 0 {
            0
        } else {
            self.shard_index + 1
        };
        Ok((self.written, shards))
    }
}
