//! Human-readable table rendering. Machine consumers should use
//! `--format structured`, which emits the canonical JSON form; tables are
//! for eyes only and excluded from golden comparisons.

/// Render rows as a fixed-width text table.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(cell.len());
            }
        }
    }
    let mut out = String::new();
    let render_row = |cells: &[String], widths: &[usize]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if i + 1 < cells.len() {
                for _ in cell.len()..widths[i] {
                    line.push(' ');
                }
            }
        }
        line.push('\n');
        line
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    out.push_str(&render_row(&header_cells, &widths));
    let mut divider: Vec<String> = Vec::new();
    for width in &widths {
        divider.push("-".repeat(*width));
    }
    out.push_str(&render_row(&divider, &widths));
    for row in rows {
        out.push_str(&render_row(row, &widths));
    }
    out
}
