//! Text serialization of instances.
//!
//! ```text
//! %cbm 1
//! <n> <m> <epsilon> <seed>
//! sigma
//! <n space-separated ±1 labels>
//! <i> <j> <w>          (m lines, 0-based, i < j, w ∈ {-1, 1})
//! # alpha=<target average degree>
//! ```
//!
//! Lines starting with `#` are comments. The trailing `# alpha=` annotation is
//! the only comment the reader interprets; without it the target degree is taken
//! to be the realized one, `2m/n`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CbmInstance, CbmParams, Edge, Spin};
use crate::error::{Error, Result};

pub const FORMAT_MAGIC: &str = "%cbm 1";
const ALPHA_ANNOTATION: &str = "# alpha=";

/// Serialize an instance. `{}` on `f64` prints the shortest string that parses
/// back to the same bits, so the output round-trips exactly.
pub fn render_instance(instance: &CbmInstance) -> String {
    let p = &instance.params;
    let mut out = String::with_capacity(16 * (instance.m() + 1) + 3 * instance.n() + 64);
    let _ = writeln!(out, "{FORMAT_MAGIC}");
    let _ = writeln!(out, "{} {} {} {}", p.n, instance.m(), p.epsilon, p.seed);
    out.push_str("sigma\n");
    for (k, s) in instance.sigma.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(if *s > 0 { "1" } else { "-1" });
    }
    out.push('\n');
    for e in &instance.edges {
        let _ = writeln!(out, "{} {} {}", e.i, e.j, e.w);
    }
    let _ = writeln!(out, "{ALPHA_ANNOTATION}{}", p.alpha);
    out
}

pub fn write_instance(instance: &CbmInstance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_instance(instance))?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<CbmInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_instance(&text, path)
}

/// Parse the text format; `origin` only labels error messages.
pub fn parse_instance(text: &str, origin: impl AsRef<Path>) -> Result<CbmInstance> {
    let origin = origin.as_ref().to_path_buf();
    let mut alpha_note = None;
    let mut lines = text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.trim();
        if let Some(v) = line.strip_prefix(ALPHA_ANNOTATION) {
            alpha_note = Some((k + 1, v.trim().to_owned()));
        }
        (!line.is_empty() && !line.starts_with('#')).then_some((k + 1, line))
    });
    let err = |line: usize, msg: String| Error::Format { path: origin.clone(), line, msg };

    let (ln, magic) = lines.next().ok_or_else(|| err(0, "empty file".into()))?;
    if magic != FORMAT_MAGIC {
        return Err(err(ln, format!("expected `{FORMAT_MAGIC}`, found `{magic}`")));
    }

    let (ln, header) = lines.next().ok_or_else(|| err(ln, "missing `n m epsilon seed` header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(err(ln, format!("header needs 4 fields `n m epsilon seed`, found {}", fields.len())));
    }
    let n: usize = parse_field(fields[0], "n").map_err(|m| err(ln, m))?;
    let m: usize = parse_field(fields[1], "m").map_err(|m| err(ln, m))?;
    let epsilon: f64 = parse_field(fields[2], "epsilon").map_err(|m| err(ln, m))?;
    let seed: u64 = parse_field(fields[3], "seed").map_err(|m| err(ln, m))?;
    if n == 0 {
        return Err(err(ln, "n must be at least 1".into()));
    }
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(err(ln, format!("epsilon {epsilon} outside [0, 0.5]")));
    }

    let (ln, kw) = lines.next().ok_or_else(|| err(ln, "missing `sigma` line".into()))?;
    if kw != "sigma" {
        return Err(err(ln, format!("expected `sigma`, found `{kw}`")));
    }
    let (ln, labels) = lines.next().ok_or_else(|| err(ln, "missing label line".into()))?;
    let sigma = labels
        .split_whitespace()
        .map(|tok| parse_spin(tok, "label").map_err(|m| err(ln, m)))
        .collect::<Result<Vec<Spin>>>()?;
    if sigma.len() != n {
        return Err(err(ln, format!("expected {n} labels, found {}", sigma.len())));
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    let mut last = ln;
    for (ln, line) in lines.by_ref() {
        last = ln;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(ln, format!("edge line needs `i j w`, found `{line}`")));
        }
        let i: u32 = parse_field(f[0], "i").map_err(|m| err(ln, m))?;
        let j: u32 = parse_field(f[1], "j").map_err(|m| err(ln, m))?;
        let w = parse_spin(f[2], "weight").map_err(|m| err(ln, m))?;
        if i as usize >= n || j as usize >= n {
            return Err(err(ln, format!("node index out of range [0, {n})")));
        }
        if i >= j {
            return Err(err(ln, format!("edge ({i}, {j}) must have i < j")));
        }
        if !seen.insert((i, j)) {
            return Err(err(ln, format!("duplicate edge ({i}, {j})")));
        }
        edges.push(Edge { i, j, w });
        if edges.len() > m {
            return Err(err(ln, format!("more than the declared {m} edges")));
        }
    }
    drop(lines);
    if edges.len() != m {
        return Err(err(last, format!("declared {m} edges, found {}", edges.len())));
    }

    let alpha = match alpha_note {
        Some((ln, v)) => parse_field::<f64>(&v, "alpha").map_err(|m| err(ln, m))?,
        None => 2.0 * m as f64 / n as f64,
    };
    let params = CbmParams { n, alpha, epsilon, seed };
    CbmInstance::from_parts(params, sigma, edges).map_err(|e| err(0, e.to_string()))
}

fn parse_field<T: std::str::FromStr>(tok: &str, what: &str) -> std::result::Result<T, String> {
    tok.parse().map_err(|_| format!("cannot parse {what} from `{tok}`"))
}

fn parse_spin(tok: &str, what: &str) -> std::result::Result<Spin, String> {
    match tok {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("{what} `{tok}` is not ±1")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate;

    fn triangle() -> CbmInstance {
        let params = CbmParams::new(3, 2.0, 0.125, 9).unwrap();
        CbmInstance::from_parts(
            params,
            vec![1, -1, 1],
            vec![Edge { i: 0, j: 1, w: -1 }, Edge { i: 1, j: 2, w: -1 }, Edge { i: 0, j: 2, w: 1 }],
        )
        .unwrap()
    }

    fn parse(text: &str) -> Result<CbmInstance> {
        parse_instance(text, "test.cbm")
    }

    #[test]
    fn triangle_layout_and_roundtrip() {
        let t = triangle();
        let text = render_instance(&t);
        assert_eq!(text, "%cbm 1\n3 3 0.125 9\nsigma\n1 -1 1\n0 1 -1\n1 2 -1\n0 2 1\n# alpha=2\n");
        assert_eq!(parse(&text).unwrap(), t);
    }

    #[test]
    fn empty_edge_instance_roundtrips() {
        let params = CbmParams::new(5, 0.5, 0.3, 1).unwrap();
        let inst = CbmInstance::from_parts(params, vec![1, 1, -1, 1, -1], vec![]).unwrap();
        assert_eq!(parse(&render_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn generated_instance_roundtrips_through_a_file() {
        let params = CbmParams::new(1000, 7.3, 0.1 + 0.2, 123).unwrap();
        let inst = generate(&params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.cbm");
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.params.epsilon.to_bits(), inst.params.epsilon.to_bits());
        assert_eq!(fs::read_to_string(&path).unwrap(), render_instance(&generate(&params).unwrap()));
    }

    #[test]
    fn comments_and_missing_alpha() {
        let text = "# produced elsewhere\n%cbm 1\n# header next\n4 2 0.25 0\nsigma\n1 1 -1 -1\n0 1 1\n# mid\n2 3 1\n";
        let inst = parse(text).unwrap();
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.params.alpha, 1.0);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let bad = [
            ("", "empty file"),
            ("%cbm 2\n", "expected `%cbm 1`"),
            ("%cbm 1\n3 1 0.2\n", "4 fields"),
            ("%cbm 1\n3 1 0.7 0\nsigma\n1 1 1\n0 1 1\n", "outside"),
            ("%cbm 1\n3 1 0.2 0\nlabels\n", "expected `sigma`"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 1\n", "expected 3 labels"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 0 1\n", "not ±1"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 1 1\n0 3 1\n", "out of range"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 1 1\n0 1 2\n", "not ±1"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 1 1\n1 0 1\n", "i < j"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 1 1\n1 1 1\n", "i < j"),
            ("%cbm 1\n3 2 0.2 0\nsigma\n1 1 1\n0 1 1\n0 1 -1\n", "duplicate"),
            ("%cbm 1\n3 2 0.2 0\nsigma\n1 1 1\n0 1 1\n", "declared 2 edges"),
            ("%cbm 1\n3 1 0.2 0\nsigma\n1 1 1\n0 1 1\n1 2 1\n", "more than"),
        ];
        for (text, needle) in bad {
            let msg = parse(text).expect_err(text).to_string();
            assert!(msg.contains(needle), "{text:?}: {msg}");
        }
    }
}
