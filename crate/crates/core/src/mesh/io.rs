//! Plain-text mesh format:
//!
//! ```text
//! vertices <n> triangles <m>
//! x y            (n lines)
//! v0 v1 v2 tag   (m lines)
//! ```
//!
//! Edges and the dual mesh are always rebuilt on load.

use std::io::{BufRead, Write};

use super::{Point2, TriMesh};
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &TriMesh, mut w: W) -> std::io::Result<()> {
    writeln!(w, "vertices {} triangles {}", mesh.points().len(), mesh.triangles().len())?;
    for p in mesh.points() {
        writeln!(w, "{} {}", p.x, p.y)?;
    }
    for t in mesh.triangles() {
        let [a, b, c] = t.vertices;
        writeln!(w, "{a} {b} {c} {}", t.region)?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(r: R) -> Result<TriMesh> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(s))) => Ok((n, s)),
            Some((n, Err(e))) => Err(Error::Parse { line: n, message: e.to_string() }),
            None => Err(Error::Parse { line: 0, message: format!("unexpected end of input, expected {what}") }),
        }
    };

    let (ln, header) = next("header")?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    let (nv, nt) = match tok.as_slice() {
        ["vertices", nv, "triangles", nt] => (parse::<usize>(nv, ln)?, parse::<usize>(nt, ln)?),
        _ => {
            return Err(Error::Parse {
                line: ln,
                message: "expected `vertices <n> triangles <m>`".into(),
            })
        }
    };

    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, s) = next("vertex line")?;
        let f: Vec<&str> = s.split_whitespace().collect();
        if f.len() != 2 {
            return Err(Error::Parse { line: ln, message: "expected `x y`".into() });
        }
        points.push(Point2::new(parse(f[0], ln)?, parse(f[1], ln)?));
    }
    let mut cells = Vec::with_capacity(nt);
    let mut regions = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, s) = next("triangle line")?;
        let f: Vec<&str> = s.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::Parse { line: ln, message: "expected `v0 v1 v2 region_tag`".into() });
        }
        cells.push([parse(f[0], ln)?, parse(f[1], ln)?, parse(f[2], ln)?]);
        regions.push(parse(f[3], ln)?);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln, message: "trailing content".into() });
    }
    TriMesh::new(points, cells, regions)
}

fn parse<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{s}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_unit_square_mesh, Diagonal};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn text_round_trip(n in 1usize..9, flip in any::<bool>(), tag in 0u32..5) {
            let diagonal = if flip { Diagonal::UpperLeftToLowerRight } else { Diagonal::LowerLeftToUpperRight };
            let m = build_unit_square_mesh(n, diagonal).unwrap();
            let m = m.with_regions((0..m.triangles().len() as u32).map(|t| t % (tag + 1)).collect()).unwrap();
            let mut buf = Vec::new();
            write_mesh(&m, &mut buf).unwrap();
            let back = read_mesh(buf.as_slice()).unwrap();
            prop_assert_eq!(back.points(), m.points());
            prop_assert_eq!(back.triangles(), m.triangles());
            prop_assert_eq!(back.edges(), m.edges());
        }
    }

    #[test]
    fn header_errors_reported() {
        let err = read_mesh("nodes 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read_mesh("vertices 3 triangles 1\n0 0\n1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
