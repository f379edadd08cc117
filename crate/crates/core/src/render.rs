//! Static Gantt charts of a plan: one row per worker, time running over a
//! whole number of periods starting at the week boundary.

use std::fmt::Write as _;

use crate::assignment::PeriodicAssignment;
use crate::model::{Instance, TaskId, WorkerId};

const ASCII_COLUMNS_PER_WEEK: i64 = 48;
const SVG_WEEK_WIDTH: f64 = 480.0;
const SVG_ROW_HEIGHT: f64 = 28.0;
const SVG_LEFT: f64 = 40.0;
const SVG_TOP: f64 = 24.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bar {
    pub worker: WorkerId,
    pub task: TaskId,
    pub week: u32,
    pub start: i64,
    pub end: i64,
}

/// Occurrences visible in `[0, weeks * L)`, clipped to it. Occurrence `r`
/// covers `[s + (r - 1)L, e + (r - 1)L)`.
pub fn bars(instance: &Instance, plan: &PeriodicAssignment, weeks: u32) -> Vec<Bar> {
    let l = instance.units_per_week();
    let horizon = i64::from(weeks) * l;
    let mut out = Vec::new();
    for task in &instance.tasks {
        for week in 1..=weeks + 1 {
            let (s, e) = task.shifted(i64::from(week) - 1, l);
            let (start, end) = (s.max(0), e.min(horizon));
            if start < end {
                out.push(Bar {
                    worker: plan.worker(task.id, week),
                    task: task.id,
                    week,
                    start,
                    end,
                });
            }
        }
    }
    out.sort_by_key(|b| (b.worker, b.start, b.task));
    out
}

fn task_glyph(task: TaskId) -> char {
    char::from_digit(task % 36, 36).expect("digit in base 36")
}

pub fn render_ascii(instance: &Instance, plan: &PeriodicAssignment, periods: u32) -> String {
    let weeks = plan.period() * periods.max(1);
    let l = instance.units_per_week();
    let columns = ASCII_COLUMNS_PER_WEEK * i64::from(weeks);
    let bars = bars(instance, plan, weeks);
    let mut out = String::new();
    let _ = write!(out, "{:>4} ", "");
    for w in 0..weeks {
        let label = format!("|week {}", w + 1);
        let _ = write!(out, "{label:<width$}", width = ASCII_COLUMNS_PER_WEEK as usize);
    }
    out.push_str("|\n");
    for worker in 1..=instance.workers {
        let mut row = vec!['.'; columns as usize];
        for bar in bars.iter().filter(|b| b.worker == worker) {
            for (col, cell) in row.iter_mut().enumerate() {
                // Cell midpoint in grid units, times 2 * ASCII_COLUMNS_PER_WEEK.
                let mid = (2 * col as i64 + 1) * l;
                let scale = 2 * ASCII_COLUMNS_PER_WEEK;
                if bar.start * scale <= mid && mid < bar.end * scale {
                    *cell = task_glyph(bar.task);
                }
            }
        }
        let _ = writeln!(
            out,
            "{:>4} {}",
            format!("w{worker}"),
            row.into_iter().collect::<String>()
        );
    }
    out
}

fn task_color(task: TaskId) -> String {
    let hue = (u64::from(task) * 137) % 360;
    format!("hsl({hue},60%,60%)")
}

pub fn render_svg(instance: &Instance, plan: &PeriodicAssignment, periods: u32) -> String {
    let weeks = plan.period() * periods.max(1);
    let l = instance.units_per_week() as f64;
    let width = SVG_LEFT + SVG_WEEK_WIDTH * f64::from(weeks) + 10.0;
    let height = SVG_TOP + SVG_ROW_HEIGHT * f64::from(instance.workers) + 10.0;
    let x = |t: i64| SVG_LEFT + t as f64 / l * SVG_WEEK_WIDTH;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="11">"##
    );
    for w in 0..=weeks {
        let wx = SVG_LEFT + SVG_WEEK_WIDTH * f64::from(w);
        let _ = writeln!(
            out,
            r##"<line x1="{wx}" y1="{}" x2="{wx}" y2="{}" stroke="#999"/>"##,
            SVG_TOP - 6.0,
            height - 10.0
        );
        if w < weeks {
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{}">week {}</text>"##,
                wx + 4.0,
                SVG_TOP - 10.0,
                w + 1
            );
        }
    }
    for worker in 1..=instance.workers {
        let y = SVG_TOP + SVG_ROW_HEIGHT * f64::from(worker - 1);
        let _ = writeln!(
            out,
            r##"<text x="4" y="{}">w{worker}</text>"##,
            y + SVG_ROW_HEIGHT / 2.0 + 4.0
        );
    }
    for bar in bars(instance, plan, weeks) {
        let y = SVG_TOP + SVG_ROW_HEIGHT * f64::from(bar.worker - 1) + 3.0;
        let (x0, x1) = (x(bar.start), x(bar.end));
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.2}" y="{y}" width="{:.2}" height="{}" fill="{}" stroke="#333"/>"##,
            x1 - x0,
            SVG_ROW_HEIGHT - 6.0,
            task_color(bar.task)
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.2}" y="{}">t{}</text>"##,
            x0 + 3.0,
            y + SVG_ROW_HEIGHT / 2.0 + 1.0,
            bar.task
        );
    }
    out.push_str("</svg>\n");
    out
}
