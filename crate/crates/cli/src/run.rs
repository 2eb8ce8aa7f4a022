//! Executes a [`Plan`] and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use basinforge::render::{render_basins, render_iterations, Palette, RenderOptions};
use basinforge::study::{metric_table, run_case, summary_text, write_report_csv, Case, Metric, RunOutput, StudyRow};
use basinforge::Method;
use rayon::prelude::*;

use crate::config::Plan;

/// Filename stem of one pair, e.g. `02_halley_unity3`.
fn stem(method: Method, case: &Case) -> String {
    let case: String = case.label.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    format!("{:02}_{}_{case}", method.index(), method.name())
}

fn pair_files(plan: &Plan, method: Method, case: &Case) -> Vec<PathBuf> {
    let s = stem(method, case);
    let mut files = Vec::new();
    if plan.emit.images {
        files.push(plan.out.join(format!("{s}_basins.ppm")));
        files.push(plan.out.join(format!("{s}_iterations.ppm")));
    }
    if plan.emit.hist {
        files.push(plan.out.join(format!("{s}_hist.csv")));
    }
    files
}

fn report_files(plan: &Plan) -> Vec<PathBuf> {
    if !plan.emit.report {
        return Vec::new();
    }
    let mut files = vec![plan.out.join("report.csv"), plan.out.join("summary.txt")];
    files.extend(
        Metric::ALL
            .iter()
            .map(|m| plan.out.join(format!("{}.csv", m.file_stem()))),
    );
    files
}

/// Writes a group of files; on the first failure every file of the group
/// written so far is removed again.
struct Batch {
    written: Vec<PathBuf>,
}

impl Batch {
    fn new() -> Self {
        Self { written: Vec::new() }
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        match fs::write(path, bytes) {
            Ok(()) => {
                self.written.push(path.to_path_buf());
                Ok(())
            }
            Err(e) => {
                self.abandon();
                let _ = fs::remove_file(path);
                Err(e).with_context(|| format!("writing {}", path.display()))
            }
        }
    }

    fn abandon(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

fn write_pair(plan: &Plan, out: &RunOutput, case: &Case) -> Result<()> {
    let s = stem(out.record.method, case);
    let mut batch = Batch::new();
    let result = (|| {
        if plan.emit.images {
            let palette = Palette::for_roots(case.roots.len());
            let basins = render_basins(&out.grid, &palette, RenderOptions::default())?;
            batch.write(&plan.out.join(format!("{s}_basins.ppm")), &basins)?;
            batch.write(
                &plan.out.join(format!("{s}_iterations.ppm")),
                &render_iterations(&out.grid),
            )?;
        }
        if plan.emit.hist {
            let mut csv = Vec::new();
            out.histogram.write_csv(&mut csv)?;
            batch.write(&plan.out.join(format!("{s}_hist.csv")), &csv)?;
        }
        Ok(())
    })();
    if result.is_err() {
        batch.abandon();
    }
    result
}

fn run_pair(plan: &Plan, method: Method, case: &Case) -> StudyRow {
    let result = run_case(method, case, &plan.study)
        .map_err(anyhow::Error::from)
        .and_then(|out| write_pair(plan, &out, case).map(|()| out.record));
    match &result {
        Ok(r) => eprintln!(
            "{:>2} {:<22} {:<8} N* {:>3}  S_b {:.4}  {:.1}s",
            method.index(),
            method.title(),
            case.label,
            r.n_star().map_or("-".into(), |n| n.to_string()),
            r.entropy.s_b,
            r.wall_seconds
        ),
        Err(e) => eprintln!(
            "{:>2} {:<22} {:<8} failed: {e:#}",
            method.index(),
            method.title(),
            case.label
        ),
    }
    StudyRow {
        method,
        case: case.label.clone(),
        result: result.map_err(|e| format!("{e:#}")),
    }
}

fn write_reports(plan: &Plan, rows: &[StudyRow]) -> Result<()> {
    let mut batch = Batch::new();
    let result = (|| {
        let mut csv = Vec::new();
        write_report_csv(rows, &mut csv)?;
        batch.write(&plan.out.join("report.csv"), &csv)?;
        batch.write(
            &plan.out.join("summary.txt"),
            summary_text(rows, &plan.study).as_bytes(),
        )?;
        for m in Metric::ALL {
            batch.write(
                &plan.out.join(format!("{}.csv", m.file_stem())),
                metric_table(rows, m).as_bytes(),
            )?;
        }
        Ok(())
    })();
    if result.is_err() {
        batch.abandon();
    }
    result
}

/// Runs every (method, polynomial) pair in manifest order. Pair failures are
/// recorded in the report; the returned count says how many there were.
pub fn execute(plan: &Plan) -> Result<usize> {
    fs::create_dir_all(&plan.out).with_context(|| format!("creating {}", plan.out.display()))?;
    let pairs: Vec<(Method, &Case)> = plan
        .cases
        .iter()
        .flat_map(|c| plan.methods.iter().map(move |&m| (m, c)))
        .collect();
    if !plan.overwrite {
        let mut all: Vec<PathBuf> = pairs.iter().flat_map(|&(m, c)| pair_files(plan, m, c)).collect();
        all.extend(report_files(plan));
        if let Some(existing) = all.iter().find(|p| p.exists()) {
            bail!("{} already exists (pass --overwrite to replace it)", existing.display());
        }
    }
    let rows: Vec<StudyRow> = if plan.parallel_pairs {
        pairs.par_iter().map(|&(m, c)| run_pair(plan, m, c)).collect()
    } else {
        pairs.iter().map(|&(m, c)| run_pair(plan, m, c)).collect()
    };
    if plan.emit.report {
        write_reports(plan, &rows)?;
    }
    print!("{}", summary_text(&rows, &plan.study));
    Ok(rows.iter().filter(|r| r.result.is_err()).count())
}
