//! Static SVG charts written next to the tables when `--plot` is set.
//! A chart that cannot be drawn or written only logs a warning.

use citemetrics_core::distributions::{CohortCurve, InflationSeries, ShareHistogram, SHARE_BUCKETS};
use plotters::prelude::*;

use crate::RunConfig;

const SIZE: (u32, u32) = (720, 440);
const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

type PlotResult = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn emit(config: &RunConfig, name: &str, chart: PlotResult) {
    let path = config.out.join(name);
    match chart {
        Ok(svg) => {
            if let Err(e) = std::fs::write(&path, svg) {
                log::warn!("cannot write plot {}: {e}", path.display());
            }
        }
        Err(e) => log::warn!("plot {} skipped: {e}", path.display()),
    }
}

/// Bars of the fraction of journals per five-point share bucket.
pub fn share_histogram(histogram: &ShareHistogram) -> PlotResult {
    if histogram.n_journals == 0 {
        return Err("no journal has a citation distribution".into());
    }
    let top = (0..SHARE_BUCKETS).map(|i| histogram.fraction(i)).fold(0.0, f64::max) * 1.1;
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption("Share of papers cited at least the JIF", ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(56)
            .build_cartesian_2d(0f64..100f64, 0f64..top)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc("papers at or above JIF (%)")
            .y_desc("fraction of journals")
            .draw()
            .map_err(err)?;
        chart
            .draw_series((0..SHARE_BUCKETS).map(|i| {
                let (lo, hi) = ShareHistogram::bucket_bounds(i);
                Rectangle::new([(lo as f64, 0.0), (hi as f64, histogram.fraction(i))], PALETTE[0].filled())
            }))
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(svg)
}

/// Cumulative share of citations by years since publication, one line per
/// discipline.
pub fn cohort(curves: &[CohortCurve]) -> PlotResult {
    let longest = curves.iter().map(|c| c.cumulative_fraction.len()).max().unwrap_or(0);
    if longest < 2 {
        return Err("no cohort spans two or more years".into());
    }
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption("Cumulative citations to a publication cohort", ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(56)
            .build_cartesian_2d(0f64..(longest - 1) as f64, 0f64..1.05f64)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc("years since publication")
            .y_desc("cumulative fraction")
            .draw()
            .map_err(err)?;
        for (k, curve) in curves.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let points = curve.cumulative_fraction.iter().enumerate().map(|(x, &y)| (x as f64, y));
            chart
                .draw_series(LineSeries::new(points, color.stroke_width(2)))
                .map_err(err)?
                .label(curve.label.clone())
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 16, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .position(SeriesLabelPosition::LowerRight)
            .draw()
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(svg)
}

/// Mean JIF per snapshot year.
pub fn inflation(series: &InflationSeries) -> PlotResult {
    let points: Vec<(f64, f64)> = series.points.iter().map(|p| (p.year as f64, p.mean_jif)).collect();
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Err("no snapshots".into());
    };
    let top = points.iter().map(|p| p.1).fold(0.0, f64::max) * 1.15 + 1e-9;
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption("Mean JIF by census year", ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(56)
            .build_cartesian_2d(first.0..last.0.max(first.0 + 1.0), 0f64..top)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc("census year")
            .y_desc("mean JIF")
            .x_label_formatter(&|y| format!("{y:.0}"))
            .draw()
            .map_err(err)?;
        chart
            .draw_series(LineSeries::new(points.iter().copied(), PALETTE[0].stroke_width(2)))
            .map_err(err)?;
        chart
            .draw_series(points.iter().map(|&p| Circle::new(p, 4, PALETTE[0].filled())))
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(svg)
}
