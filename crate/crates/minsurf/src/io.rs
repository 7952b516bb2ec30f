//! Text formats: CSV height grids, OBJ meshes and `name = value` reports.

use std::fmt::{Display, Write as _};

use crate::error::{Error, Result};
use crate::geometry::{make_quad, GraphFrame, QuadConfig};
use crate::grid::HeightGrid;
use crate::schwarz::SchwarzPatch;

fn sci(x: f64) -> String {
    // 17 significant digits round-trip every f64
    format!("{x:.16e}")
}

/// Header `N du dv config r d`, then N+1 rows of N+1 heights. Grids that do
/// not remember a boundary are written with config `none` and r, d equal to
/// the base extents.
pub fn grid_to_csv(g: &HeightGrid) -> String {
    let n = g.n();
    let (label, r, d) = match g.quad() {
        Some(q) => (q.config.to_string(), q.r, q.d),
        None => (
            "none".to_string(),
            g.frame().extents[0],
            g.frame().extents[1],
        ),
    };
    let mut out = String::with_capacity((n + 1) * (n + 1) * 24 + 80);
    writeln!(
        out,
        "{n} {} {} {label} {} {}",
        sci(g.du()),
        sci(g.dv()),
        sci(r),
        sci(d)
    )
    .unwrap();
    for i in 0..=n {
        let row: Vec<String> = (0..=n).map(|j| sci(g.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn input<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Input {
        line,
        msg: msg.into(),
    })
}

fn parse_num(line: usize, field: &str, what: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => input(
            line,
            format!("{what}: cannot parse '{field}' as a finite number"),
        ),
    }
}

pub fn grid_from_csv(text: &str) -> Result<HeightGrid> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((hline, header)) = lines.next() else {
        return input(1, "empty file");
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 {
        return input(
            hline,
            format!(
                "header needs 6 fields `N du dv config r d`, found {}",
                fields.len()
            ),
        );
    }
    let n: usize = match fields[0].parse() {
        Ok(n) if n >= 1 => n,
        _ => {
            return input(
                hline,
                format!("N: '{}' is not a positive integer", fields[0]),
            )
        }
    };
    let du = parse_num(hline, fields[1], "du")?;
    let dv = parse_num(hline, fields[2], "dv")?;
    let r = parse_num(hline, fields[4], "r")?;
    let d = parse_num(hline, fields[5], "d")?;
    let (frame, quad) = match fields[3] {
        "none" => (GraphFrame::xy(r, d), None),
        label => {
            let config: QuadConfig = label
                .parse()
                .or_else(|_| input(hline, format!("unknown config '{label}'")))?;
            let q = make_quad(config, r, d).or_else(|e| input(hline, e.to_string()))?;
            (q.frame(), Some(q))
        }
    };
    let mut g = HeightGrid::zeros(n, frame).or_else(|e| input(hline, e.to_string()))?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    if !close(du, g.du()) || !close(dv, g.dv()) {
        return input(
            hline,
            format!(
                "spacing {du}×{dv} does not match extents / N = {}×{}",
                g.du(),
                g.dv()
            ),
        );
    }
    if let Some(q) = quad {
        g.set_quad(q);
    }
    for i in 0..=n {
        let Some((ln, row)) = lines.next() else {
            return input(
                text.lines().count() + 1,
                format!("expected {} height rows, found {i}", n + 1),
            );
        };
        let values: Vec<&str> = row.split_whitespace().collect();
        if values.len() != n + 1 {
            return input(
                ln,
                format!("expected {} heights, found {}", n + 1, values.len()),
            );
        }
        for (j, v) in values.iter().enumerate() {
            let h = parse_num(ln, v, "height")?;
            g.set(i, j, h);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return input(ln, "unexpected data after the last height row");
    }
    Ok(g)
}

/// World-space triangle mesh of a grid. Vertices are row-major; each cell
/// is split along the diagonal (i, j−1)–(i−1, j) used by the triangulation
/// estimator.
pub fn grid_to_obj(g: &HeightGrid) -> String {
    let n = g.n();
    let mut out = String::new();
    writeln!(out, "# height grid N={n}").unwrap();
    for i in 0..=n {
        for j in 0..=n {
            let p = g.world_point(i, j);
            writeln!(out, "v {} {} {}", sci(p.x), sci(p.y), sci(p.z)).unwrap();
        }
    }
    let v = |i: usize, j: usize| i * (n + 1) + j + 1;
    for i in 1..=n {
        for j in 1..=n {
            writeln!(out, "f {} {} {}", v(i, j), v(i, j - 1), v(i - 1, j)).unwrap();
            writeln!(out, "f {} {} {}", v(i - 1, j - 1), v(i - 1, j), v(i, j - 1)).unwrap();
        }
    }
    out
}

/// Triangle mesh of one or more Schwarz pieces, one OBJ group per piece.
pub fn patches_to_obj(patches: &[SchwarzPatch]) -> String {
    let mut out = String::new();
    let mut base = 1;
    for p in patches {
        writeln!(out, "g {}", p.piece).unwrap();
        for q in &p.points {
            writeln!(out, "v {} {} {}", sci(q.x), sci(q.y), sci(q.z)).unwrap();
        }
        let v = |a: usize, k: usize| base + p.index(a, k);
        for a in 0..p.n_alpha - 1 {
            for k in 0..p.n_r - 1 {
                writeln!(out, "f {} {} {}", v(a, k), v(a, k + 1), v(a + 1, k + 1)).unwrap();
                // every ray starts at the centre, so skip the sliver there
                if k > 0 {
                    writeln!(out, "f {} {} {}", v(a, k), v(a + 1, k + 1), v(a + 1, k)).unwrap();
                }
            }
        }
        base += p.points.len();
    }
    out
}

/// Rows `piece rhat alpha x y z` for every node of every piece.
pub fn patches_to_csv(patches: &[SchwarzPatch]) -> String {
    let mut out = String::from("piece rhat alpha x y z\n");
    for p in patches {
        for (q, (rhat, alpha)) in p.points.iter().zip(&p.params) {
            writeln!(
                out,
                "{} {} {} {} {} {}",
                p.piece,
                sci(*rhat),
                sci(*alpha),
                sci(q.x),
                sci(q.y),
                sci(q.z)
            )
            .unwrap();
        }
    }
    out
}

/// Ordered `name = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: impl Display) -> &mut Self {
        self.entries.push((name.into(), value.to_string()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Parses text produced by `Display`; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Report::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('=') {
                Some((name, value)) if !name.trim().is_empty() => {
                    r.push(name.trim(), value.trim());
                }
                _ => return input(k + 1, format!("expected `name = value`, found '{line}'")),
            }
        }
        Ok(r)
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area::area_triangulation;
    use crate::geometry::bilinear_height_grid;
    use crate::geometry::Point3;
    use proptest::prelude::*;

    #[test]
    fn csv_header_and_shape() {
        let q = make_quad(QuadConfig::Ruled2, 2.0, 1.0).unwrap();
        let g = bilinear_height_grid(&q, 4).unwrap();
        let text = grid_to_csv(&g);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("4 5.0000000000000000e-1 2.5000000000000000e-1 ruled2 "));
        assert_eq!(lines[1].split(' ').count(), 5);
        let back = grid_from_csv(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn malformed_csv_reports_line() {
        let q = make_quad(QuadConfig::Ruled1, 1.0, 1.0).unwrap();
        let text = grid_to_csv(&bilinear_height_grid(&q, 3).unwrap());
        let broken = text.replacen("e-1", "e-1x", 3);
        match grid_from_csv(&broken) {
            Err(Error::Input { line, .. }) => assert!(line >= 1),
            other => panic!("{other:?}"),
        }
        let short: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(matches!(grid_from_csv(&short), Err(Error::Input { .. })));
        let bad_row = text.replacen('\n', "\n1 2\n", 1);
        assert!(matches!(
            grid_from_csv(&bad_row),
            Err(Error::Input { line: 2, .. })
        ));
        assert!(matches!(
            grid_from_csv(""),
            Err(Error::Input { line: 1, .. })
        ));
        assert!(matches!(
            grid_from_csv("3 1 1 ruled9 1 1\n"),
            Err(Error::Input { line: 1, .. })
        ));
    }

    #[test]
    fn obj_area_equals_triangulation() {
        let q = make_quad(QuadConfig::Ruled2, 1.0, 1.0).unwrap();
        let g = bilinear_height_grid(&q, 6).unwrap();
        let obj = grid_to_obj(&g);
        let verts: Vec<Point3> = obj
            .lines()
            .filter_map(|l| l.strip_prefix("v "))
            .map(|l| {
                let c: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
                Point3::new(c[0], c[1], c[2])
            })
            .collect();
        assert_eq!(verts.len(), 49);
        let mut area = 0.0;
        let mut faces = 0;
        for l in obj.lines().filter_map(|l| l.strip_prefix("f ")) {
            let idx: Vec<usize> = l
                .split(' ')
                .map(|x| x.parse::<usize>().unwrap() - 1)
                .collect();
            let (a, b, c) = (verts[idx[0]], verts[idx[1]], verts[idx[2]]);
            area += 0.5 * (b - a).cross(c - a).norm();
            faces += 1;
        }
        assert_eq!(faces, 72);
        // the split shares its first triangle with the estimator; the second
        // triangle differs, so only the total is compared loosely
        assert!((area - area_triangulation(&g)).abs() < 5e-3);
    }

    #[test]
    fn report_round_trip() {
        let mut r = Report::new();
        r.push("status", "Converged")
            .push("area", 1.25)
            .push("iterations", 17);
        let text = r.to_string();
        assert_eq!(text, "status = Converged\narea = 1.25\niterations = 17\n");
        assert_eq!(Report::parse(&text).unwrap(), r);
        assert!(matches!(
            Report::parse("ok = 1\nbroken\n"),
            Err(Error::Input { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            n in 1usize..7,
            lx in 0.1f64..10.0,
            ly in 0.1f64..10.0,
            seed in any::<u64>(),
        ) {
            let frame = GraphFrame::xy(lx, ly);
            let g = HeightGrid::from_fn(n, frame, |s, t| {
                ((s * 12.9898 + t * 78.233 + seed as f64 * 1e-9).sin() * 43758.5453).fract() * 1e3
            })
            .unwrap();
            let back = grid_from_csv(&grid_to_csv(&g)).unwrap();
            for (a, b) in back.heights().iter().zip(g.heights()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
