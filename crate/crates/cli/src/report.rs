//! Report emission. CSV reports start with comment lines carrying the
//! artifact version, a timestamp (the one line that varies between runs),
//! the seed and the parameter profile; re-running the same config
//! reproduces everything below the timestamp byte for byte. JSON reports
//! carry the same metadata as fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub struct ReportMeta {
    pub seed: u64,
    pub profile: String,
}

impl ReportMeta {
    pub fn new(seed: u64, profile: &str) -> Self {
        ReportMeta { seed, profile: profile.to_string() }
    }
}

enum Target {
    Stdout,
    File(BufWriter<File>),
}

impl Target {
    fn write_line(&mut self, line: &str) -> std::io::Result<()> {
        match self {
            Target::Stdout => {
                println!("{line}");
                Ok(())
            }
            Target::File(f) => writeln!(f, "{line}"),
        }
    }
}

pub struct OutputSink {
    target: Target,
    json: bool,
    json_rows: Vec<serde_json::Value>,
    meta_seed: u64,
    meta_profile: String,
}

impl OutputSink {
    pub fn create(
        out: &Option<String>,
        format: &str,
        meta: &ReportMeta,
    ) -> anyhow::Result<OutputSink> {
        let json = match format {
            "json" => true,
            "csv" => false,
            other => anyhow::bail!("unknown format {other:?} (expected csv or json)"),
        };
        let mut target = match out {
            Some(path) => Target::File(BufWriter::new(File::create(path)?)),
            None => Target::Stdout,
        };
        if !json {
            let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            target.write_line(&format!("# extractorlab v{}", extractorlab::VERSION))?;
            target.write_line(&format!("# generated-at-unix {stamp}"))?;
            target.write_line(&format!("# seed {} profile {}", meta.seed, meta.profile))?;
        }
        Ok(OutputSink {
            target,
            json,
            json_rows: Vec::new(),
            meta_seed: meta.seed,
            meta_profile: meta.profile.clone(),
        })
    }

    pub fn csv_header(&mut self, header: &str) -> anyhow::Result<()> {
        if !self.json {
            self.target.write_line(header)?;
        }
        Ok(())
    }

    pub fn row<T: Serialize>(&mut self, csv: &str, value: &T) -> anyhow::Result<()> {
        if self.json {
            self.json_rows.push(serde_json::to_value(value)?);
        } else {
            self.target.write_line(csv)?;
        }
        Ok(())
    }

    /// A non-tabular annotation line ("# ..." in CSV, skipped in JSON).
    pub fn note(&mut self, text: &str) -> anyhow::Result<()> {
        if !self.json {
            self.target.write_line(&format!("# {text}"))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        if self.json {
            let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            let doc = serde_json::json!({
                "version": extractorlab::VERSION,
                "generated_at_unix": stamp,
                "seed": self.meta_seed,
                "profile": self.meta_profile,
                "rows": self.json_rows,
            });
            self.target.write_line(&serde_json::to_string_pretty(&doc)?)?;
        }
        if let Target::File(f) = &mut self.target {
            f.flush()?;
        }
        Ok(())
    }
}
