//! Loads a JSON configuration, runs it and exports the trace in both formats.
//!
//! ```bash
//! cargo run --example config_run -- crates/core/configs/p4_ma_tr.json
//! ```

use std::path::PathBuf;

use modadapt::config::load_config;
use modadapt::report::{export_trace, ExportFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/p4_ma_tr.json"));
    let out_dir = std::env::temp_dir().join("modadapt-config-run");
    std::fs::create_dir_all(&out_dir)?;

    for (i, config) in load_config(&path)?.into_iter().enumerate() {
        let trace = config.execute()?;
        let last = trace.final_record().expect("trace has a terminal record");
        println!(
            "{} / {}: {} after {} iterations, u* = {:?}, |grad| = {:.2e}",
            trace.problem,
            trace.algorithm,
            trace.termination,
            trace.iterations(),
            last.reference,
            last.grad_norm
        );
        for (format, ext) in [(ExportFormat::Csv, "csv"), (ExportFormat::Json, "json")] {
            let file = out_dir.join(format!("trace-{i}.{ext}"));
            export_trace(&trace, format, &file)?;
            println!("  wrote {}", file.display());
        }
    }
    Ok(())
}
