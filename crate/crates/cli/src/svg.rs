//! Minimal deterministic SVG emitters: word clouds, horizontal bar charts
//! for explanations/profiles, and confusion-matrix heatmaps. No timestamps
//! or random layout, so re-runs produce identical bytes.

use std::fmt::Write;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(width: usize, height: usize) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n"
    )
}

/// Word cloud as a size-scaled vertical list; weight in (0, 1] scales the
/// font size.
pub fn wordcloud(entries: &[(String, f64)], title: &str) -> String {
    let row_height = 44usize;
    let height = 50 + entries.len() * row_height;
    let mut out = header(560, height.max(80));
    writeln!(
        out,
        "  <text x=\"10\" y=\"24\" font-size=\"16\" font-weight=\"bold\">{}</text>",
        escape(title)
    )
    .unwrap();
    for (i, (word, weight)) in entries.iter().enumerate() {
        let size = 10.0 + 26.0 * weight;
        let y = 50 + i * row_height + row_height / 2;
        let shade = (40.0 + 160.0 * (1.0 - weight)) as u8;
        writeln!(
            out,
            "  <text x=\"16\" y=\"{y}\" font-size=\"{size:.1}\" fill=\"rgb({shade},{shade},200)\">{}</text>",
            escape(word)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Horizontal bar chart of signed word weights: positive bars extend right
/// (toward the class), negative bars left.
pub fn barchart(entries: &[(String, f64)], title: &str) -> String {
    let row_height = 26usize;
    let width = 640usize;
    let center = 320.0;
    let height = 60 + entries.len() * row_height;
    let max_abs = entries
        .iter()
        .map(|(_, v)| v.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    let scale = 260.0 / max_abs;

    let mut out = header(width, height.max(90));
    writeln!(
        out,
        "  <text x=\"10\" y=\"24\" font-size=\"15\" font-weight=\"bold\">{}</text>",
        escape(title)
    )
    .unwrap();
    writeln!(
        out,
        "  <line x1=\"{center}\" y1=\"40\" x2=\"{center}\" y2=\"{}\" stroke=\"#888\"/>",
        height - 16
    )
    .unwrap();
    for (i, (word, value)) in entries.iter().enumerate() {
        let y = 46 + i * row_height;
        let bar_width = value.abs() * scale;
        let (x, color) = if *value >= 0.0 {
            (center, "#2c7fb8")
        } else {
            (center - bar_width, "#d95f0e")
        };
        writeln!(
            out,
            "  <rect x=\"{x:.2}\" y=\"{y}\" width=\"{bar_width:.2}\" height=\"16\" fill=\"{color}\"/>"
        )
        .unwrap();
        let label_x = if *value >= 0.0 {
            center - 8.0
        } else {
            center + 8.0
        };
        let anchor = if *value >= 0.0 { "end" } else { "start" };
        writeln!(
            out,
            "  <text x=\"{label_x:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"{anchor}\">{} ({:+.4})</text>",
            y + 12,
            escape(word),
            value
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Confusion-matrix heatmap over row percentages, with cell annotations.
pub fn heatmap(pct: &[Vec<f64>], class_names: &[String], title: &str) -> String {
    let cell = 64usize;
    let left = 110usize;
    let top = 70usize;
    let k = class_names.len();
    let width = left + k * cell + 20;
    let height = top + k * cell + 20;

    let mut out = header(width, height);
    writeln!(
        out,
        "  <text x=\"10\" y=\"24\" font-size=\"15\" font-weight=\"bold\">{}</text>",
        escape(title)
    )
    .unwrap();
    for (c, name) in class_names.iter().enumerate() {
        let x = left + c * cell + cell / 2;
        writeln!(
            out,
            "  <text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            top - 10,
            escape(name)
        )
        .unwrap();
    }
    for (r, name) in class_names.iter().enumerate() {
        let y = top + r * cell + cell / 2;
        writeln!(
            out,
            "  <text x=\"{}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            left - 8,
            escape(name)
        )
        .unwrap();
        for c in 0..k {
            let value = pct[r][c];
            let x = left + c * cell;
            let y = top + r * cell;
            let opacity = value / 100.0;
            writeln!(
                out,
                "  <rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"#2c7fb8\" \
                 fill-opacity=\"{opacity:.3}\" stroke=\"#ccc\"/>"
            )
            .unwrap();
            let tx = x + cell / 2;
            let ty = y + cell / 2 + 4;
            let fill = if value > 55.0 { "#fff" } else { "#222" };
            writeln!(
                out,
                "  <text x=\"{tx}\" y=\"{ty}\" font-size=\"12\" text-anchor=\"middle\" fill=\"{fill}\">{value:.1}</text>"
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outputs_are_deterministic_and_well_formed() {
        let entries = vec![("car".to_string(), 1.0), ("vote".to_string(), 0.5)];
        let a = wordcloud(&entries, "human");
        let b = wordcloud(&entries, "human");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));

        let bars = barchart(&[("w".to_string(), -0.2), ("v".to_string(), 0.4)], "t");
        assert!(bars.contains("rect"));

        let names = vec!["a".to_string(), "b".to_string()];
        let hm = heatmap(&[vec![100.0, 0.0], vec![12.5, 87.5]], &names, "cm");
        assert!(hm.contains("87.5"));
    }

    #[test]
    fn escapes_markup_in_words() {
        let entries = vec![("<b>".to_string(), 1.0)];
        let svg = wordcloud(&entries, "x & y");
        assert!(svg.contains("&lt;b&gt;"));
        assert!(svg.contains("x &amp; y"));
    }
}
