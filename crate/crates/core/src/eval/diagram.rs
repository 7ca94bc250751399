//! Critical-difference diagrams as SVG and as plain text.
//!
//! The rank axis runs from k on the left to 1 on the right, so the best
//! column sits rightmost.

use std::fmt::Write as _;

use super::cd::CdResult;
use super::ranks::RankTable;

const WIDTH: f64 = 900.0;
const MARGIN: f64 = 190.0;
const AXIS_Y: f64 = 90.0;
const ROW: f64 = 22.0;

/// `(label, average rank)` pairs, best first. Both renderings read this.
pub fn diagram_entries(ranks: &RankTable) -> Vec<(String, f64)> {
    ranks
        .order()
        .into_iter()
        .map(|i| (ranks.columns[i].clone(), ranks.average_rank[i]))
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Axis {
    k: usize,
}

impl Axis {
    fn x(&self, rank: f64) -> f64 {
        let right = WIDTH - MARGIN;
        if self.k <= 1 {
            return right;
        }
        let t = (rank.clamp(1.0, self.k as f64) - 1.0) / (self.k - 1) as f64;
        right - t * (WIDTH - 2.0 * MARGIN)
    }
}

/// Clique bars as rank spans, skipping single-column groups.
pub fn clique_spans(ranks: &RankTable, cd: &CdResult) -> Vec<(f64, f64)> {
    cd.groups
        .iter()
        .filter(|g| g.len() >= 2)
        .map(|g| {
            let rs = g.iter().map(|&i| ranks.average_rank[i]);
            let lo = rs.clone().fold(f64::INFINITY, f64::min);
            let hi = rs.fold(f64::NEG_INFINITY, f64::max);
            (lo.max(1.0), hi.min(ranks.k() as f64))
        })
        .collect()
}

pub fn render_svg(ranks: &RankTable, cd: &CdResult, title: &str) -> String {
    let k = ranks.k();
    let axis = Axis { k };
    let entries = diagram_entries(ranks);
    let spans = clique_spans(ranks, cd);
    let half = entries.len().div_ceil(2);
    let label_rows = half.max(entries.len() - half);
    let bars_y = AXIS_Y + 18.0;
    let labels_y = bars_y + spans.len() as f64 * 8.0 + 20.0;
    let height = labels_y + label_rows as f64 * ROW + 30.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.0}" viewBox="0 0 {WIDTH} {height:.0}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));

    // critical difference scale bar
    let cd_left = axis.x(k as f64);
    let cd_right = axis.x(k as f64 - cd.cd);
    let _ = writeln!(
        s,
        r#"<line class="cd" x1="{cd_left:.2}" y1="40" x2="{cd_right:.2}" y2="40" stroke="black" stroke-width="2"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="34" text-anchor="middle">CD = {:.4}</text>"#,
        (cd_left + cd_right) / 2.0,
        cd.cd
    );

    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{:.2}" y1="{AXIS_Y}" x2="{:.2}" y2="{AXIS_Y}" stroke="black"/>"#,
        axis.x(k as f64),
        axis.x(1.0)
    );
    for r in 1..=k {
        let x = axis.x(r as f64);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{AXIS_Y}" stroke="black"/>"#, AXIS_Y - 6.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{r}</text>"#, AXIS_Y - 10.0);
    }

    for (b, &(lo, hi)) in spans.iter().enumerate() {
        let y = bars_y + b as f64 * 8.0;
        let _ = writeln!(
            s,
            r#"<line class="clique" data-lo="{lo:.4}" data-hi="{hi:.4}" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-width="4"/>"#,
            axis.x(hi) - 3.0,
            axis.x(lo) + 3.0
        );
    }

    // best half hangs to the right, worst half to the left
    for (pos, (label, rank)) in entries.iter().enumerate() {
        let x = axis.x(*rank);
        let (row, anchor, tx) = if pos < half {
            (pos, "start", WIDTH - MARGIN + 20.0)
        } else {
            (entries.len() - 1 - pos, "end", MARGIN - 20.0)
        };
        let y = labels_y + row as f64 * ROW;
        let _ = writeln!(
            s,
            r#"<polyline points="{x:.2},{AXIS_Y} {x:.2},{y:.2} {tx:.2},{y:.2}" fill="none" stroke="gray"/>"#
        );
        let lx = if anchor == "start" { tx + 4.0 } else { tx - 4.0 };
        let _ = writeln!(
            s,
            r#"<text class="label" data-rank="{rank:.4}" x="{lx:.2}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
            y + 4.0,
            escape(label)
        );
        let rx = if anchor == "start" { x + 4.0 } else { x - 4.0 };
        let _ = writeln!(
            s,
            r#"<text x="{rx:.2}" y="{:.2}" text-anchor="{anchor}" font-size="10" fill="gray">{rank:.4}</text>"#,
            y - 3.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_text(ranks: &RankTable, cd: &CdResult, title: &str) -> String {
    let k = ranks.k();
    let entries = diagram_entries(ranks);
    let width = entries.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(
        s,
        "critical difference {:.4} (alpha={}, q={:.4}, k={k}, N={})",
        cd.cd,
        cd.alpha,
        cd.q_alpha,
        ranks.n()
    );

    // ruler: one column per 1/8 rank, rank k at the left
    let cols = (k - 1) * 8 + 1;
    let col = |rank: f64| ((k as f64 - rank.clamp(1.0, k as f64)) * 8.0).round() as usize;
    let mut ticks = vec![' '; cols];
    let mut ruler = vec!['-'; cols];
    for r in 1..=k {
        ruler[col(r as f64)] = '|';
        if r < 10 {
            ticks[col(r as f64)] = char::from_digit(r as u32, 10).unwrap_or('?');
        }
    }
    let _ = writeln!(s, "  {}", ticks.into_iter().collect::<String>());
    let _ = writeln!(s, "  {}", ruler.into_iter().collect::<String>());
    for (label, rank) in &entries {
        let mut line = vec![' '; cols];
        line[col(*rank)] = '*';
        let _ = writeln!(s, "  {}  {rank:.4}  {label:<width$}", line.into_iter().collect::<String>());
    }
    let spans = clique_spans(ranks, cd);
    if !spans.is_empty() {
        let _ = writeln!(s, "cliques:");
    }
    for g in cd.groups.iter().filter(|g| g.len() >= 2) {
        let names: Vec<&str> = g.iter().map(|&i| ranks.columns[i].as_str()).collect();
        let rs: Vec<f64> = g.iter().map(|&i| ranks.average_rank[i]).collect();
        let mut bar = vec![' '; cols];
        let (lo, hi) = (rs[0], rs[rs.len() - 1]);
        for c in bar.iter_mut().take(col(lo) + 1).skip(col(hi)) {
            *c = '=';
        }
        let _ = writeln!(
            s,
            "  {}  [{lo:.4}, {hi:.4}] {}",
            bar.into_iter().collect::<String>(),
            names.join(", ")
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::cd::group_cliques;
    use crate::eval::ranks::{average_ranks, AccuracyTable};

    fn ranks(cols: &[&str], rows: Vec<Vec<f64>>) -> RankTable {
        let t = AccuracyTable::new(
            (0..rows.len()).map(|i| format!("d{i}")).collect(),
            cols.iter().map(|c| c.to_string()).collect(),
            rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
        )
        .unwrap();
        average_ranks(&t).unwrap()
    }

    fn cd_for(r: &RankTable, cd: f64) -> CdResult {
        CdResult {
            cd,
            q_alpha: 1.96,
            alpha: 0.05,
            groups: group_cliques(&r.average_rank, cd),
        }
    }

    fn svg_labels(svg: &str) -> Vec<(String, String)> {
        svg.lines()
            .filter(|l| l.contains(r#"class="label""#))
            .map(|l| {
                let rank = l.split("data-rank=\"").nth(1).unwrap().split('"').next().unwrap();
                let label = l.split('>').nth(1).unwrap().split('<').next().unwrap();
                (label.to_string(), rank.to_string())
            })
            .collect()
    }

    #[test]
    fn two_columns_one_bar() {
        let r = ranks(&["a", "b"], vec![vec![0.9, 0.8], vec![0.7, 0.8]]);
        let cd = cd_for(&r, 2.0);
        assert_eq!(clique_spans(&r, &cd), vec![(1.5, 1.5)]);
        let svg = render_svg(&r, &cd, "t");
        assert_eq!(svg.matches(r#"class="clique""#).count(), 1);
    }

    #[test]
    fn bars_stay_on_axis() {
        let r = ranks(
            &["a", "b", "c", "d"],
            vec![vec![0.9, 0.8, 0.7, 0.6], vec![0.8, 0.9, 0.6, 0.7], vec![0.9, 0.7, 0.8, 0.6]],
        );
        for cd in [0.5, 1.5, 10.0] {
            for (lo, hi) in clique_spans(&r, &cd_for(&r, cd)) {
                assert!(lo >= 1.0 && hi <= 4.0 && lo <= hi);
            }
        }
    }

    #[test]
    fn text_and_svg_agree() {
        let r = ranks(
            &["x<y", "beta", "gamma"],
            vec![vec![0.9, 0.8, 0.7], vec![0.6, 0.8, 0.7]],
        );
        let cd = cd_for(&r, 1.0);
        let svg = render_svg(&r, &cd, "title");
        let text = render_text(&r, &cd, "title");
        let from_svg = svg_labels(&svg);
        let expected: Vec<(String, String)> = diagram_entries(&r)
            .into_iter()
            .map(|(l, v)| (escape(&l), format!("{v:.4}")))
            .collect();
        assert_eq!(from_svg, expected);
        for (label, rank) in diagram_entries(&r) {
            assert!(text.lines().any(|l| l.contains(&format!("{rank:.4}  {label}"))), "{text}");
        }
    }

    #[test]
    fn best_rank_is_rightmost() {
        let axis = Axis { k: 5 };
        assert!(axis.x(1.0) > axis.x(2.0));
        assert!(axis.x(5.0) < axis.x(4.9));
    }
}
