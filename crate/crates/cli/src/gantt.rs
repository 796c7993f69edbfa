//! Gantt rendering: one row per resource, a box per allocation at its crisp
//! times. The SVG variant adds whisker lines under each box spanning the
//! fuzzy start and finish supports, so residual vagueness stays visible.

use std::fmt::Write as _;

use fjs_core::{Instance, Schedule};

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948", "#9c755f",
];

fn nice_tick(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.abs().max(1e-9).log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    step * mag
}

pub fn svg(instance: &Instance, schedule: &Schedule) -> String {
    let makespan = schedule.makespan().max(1.0);
    let label_w = 70.0;
    let plot_w = 860.0;
    let scale = plot_w / makespan;
    let row_h = 40.0;
    let top = 28.0;
    let height = top + row_h * instance.resources.len() as f64 + 16.0;
    let width = label_w + plot_w + 24.0;

    let job_index = |job_id: &fjs_core::JobId| {
        instance
            .jobs
            .iter()
            .position(|j| &j.id == job_id)
            .unwrap_or(0)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"##
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // time axis
    let tick = nice_tick(makespan);
    let mut t = 0.0;
    while t <= makespan + 1e-9 {
        let x = label_w + t * scale;
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            height - 14.0
        );
        let _ = writeln!(
            out,
            r##"<text x="{x:.2}" y="16" font-size="10" text-anchor="middle" fill="#444">{t:.1}</text>"##
        );
        t += tick;
    }

    for (row, resource) in instance.resources.iter().enumerate() {
        let y = top + row as f64 * row_h;
        let _ = writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end" fill="#222">{}</text>"##,
            label_w - 8.0,
            y + 17.0,
            resource.id
        );
        let mut allocs: Vec<_> = schedule.allocations_on(&resource.id).collect();
        allocs.sort_by(|a, b| a.crisp_start.total_cmp(&b.crisp_start));
        for alloc in allocs {
            let x = label_w + alloc.crisp_start * scale;
            let w = ((alloc.crisp_finish - alloc.crisp_start) * scale).max(1.0);
            let color = instance
                .activity(&alloc.activity_id)
                .map(|a| PALETTE[job_index(&a.job_id) % PALETTE.len()])
                .unwrap_or("#999999");
            let _ = writeln!(
                out,
                r##"<rect x="{x:.2}" y="{:.2}" width="{w:.2}" height="20" fill="{color}" stroke="#333" stroke-width="0.5"><title>{} [{:.2}, {:.2})</title></rect>"##,
                y + 4.0,
                alloc.activity_id,
                alloc.crisp_start,
                alloc.crisp_finish
            );
            if w > 26.0 {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" font-size="9" fill="white">{}</text>"#,
                    x + 3.0,
                    y + 18.0,
                    alloc.activity_id
                );
            }
            // support whiskers: where the fuzzy start/finish could fall
            let (sa, sb) = (alloc.fuzzy_start.a(), alloc.fuzzy_start.b());
            if sb > sa {
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#1b6ca8" stroke-width="2"/>"##,
                    label_w + sa * scale,
                    y + 28.0,
                    label_w + sb * scale,
                    y + 28.0
                );
            }
            let (fa, fb) = (alloc.fuzzy_finish.a(), alloc.fuzzy_finish.b());
            if fb > fa {
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#a85e1b" stroke-width="2"/>"##,
                    label_w + fa * scale,
                    y + 32.0,
                    label_w + fb * scale,
                    y + 32.0
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn text(instance: &Instance, schedule: &Schedule) -> String {
    let makespan = schedule.makespan();
    let width = 72usize;
    let scale = if makespan > 0.0 { width as f64 / makespan } else { 0.0 };
    let label_w = instance
        .resources
        .iter()
        .map(|r| r.id.as_str().len())
        .max()
        .unwrap_or(2)
        .max(2);

    let mut out = String::new();
    let _ = writeln!(out, "{:label_w$} 0{:>w$.1}", "", makespan, w = width);
    for resource in &instance.resources {
        let mut row = vec![b'.'; width];
        let mut allocs: Vec<_> = schedule.allocations_on(&resource.id).collect();
        allocs.sort_by(|a, b| a.crisp_start.total_cmp(&b.crisp_start));
        for alloc in allocs {
            let i0 = (alloc.crisp_start * scale).floor() as usize;
            let i1 = ((alloc.crisp_finish * scale).ceil() as usize).clamp(i0 + 1, width);
            let id = alloc.activity_id.as_str().as_bytes();
            for (offset, slot) in (i0..i1).enumerate() {
                row[slot] = if offset < id.len() { id[offset] } else { b'=' };
            }
        }
        let _ = writeln!(
            out,
            "{:label_w$}|{}|",
            resource.id,
            String::from_utf8_lossy(&row)
        );
    }
    out
}
