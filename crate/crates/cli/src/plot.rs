use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kernred::funcrep::io::fmt17;
use kernred::level::IntervalDecomposition;
use kernred::{Error, Result, SampledFunction, StepFunction};

/// Columns t, f*, R f*, G f on the shared grid of the curves.
pub fn plot_tsv(fstar: &StepFunction, r: &SampledFunction, g: &SampledFunction) -> Result<String> {
    if r.grid() != g.grid() {
        return Err(Error::InvalidArgument("curves must share a grid".into()));
    }
    let mut s = String::from("t\tfstar\tR_fstar\tG_f\n");
    for ((&t, rv), gv) in r.grid().points().iter().zip(r.values()).zip(g.values()) {
        let _ = writeln!(s, "{}\t{}\t{}\t{}", fmt17(t), fmt17(fstar.eval(t)?), fmt17(*rv), fmt17(*gv));
    }
    Ok(s)
}

/// `curves.tsv` → `curves.intervals.tsv`.
pub fn companion_path(plot: &Path) -> PathBuf {
    let stem = plot.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
    plot.with_file_name(format!("{stem}.intervals.tsv"))
}

/// Writes the curve TSV and its companion interval TSV; returns the companion path.
pub fn emit_plot_data(
    fstar: &StepFunction,
    r: &SampledFunction,
    g: &SampledFunction,
    dec: &IntervalDecomposition,
    path: &Path,
) -> Result<PathBuf> {
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    std::fs::write(path, plot_tsv(fstar, r, g)?).map_err(|e| io(path, e))?;
    let companion = companion_path(path);
    std::fs::write(&companion, dec.to_tsv()).map_err(|e| io(&companion, e))?;
    Ok(companion)
}
