use std::io::{BufRead, Write};

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::forest::{ForestModel, ForestParams, TreeNode};

pub const FOREST_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "shapekit-forest";

/// Free-form `key value` annotations stored alongside a forest.
pub type ModelMeta = Vec<(String, String)>;

/// Writes a forest as text: a version line, the parameters, `meta`
/// annotations, the class table one name per line, then each tree in
/// pre-order with one node per line (`S feature threshold` or
/// `L count...`). Thresholds use the shortest decimal form that parses back
/// to the same value.
pub fn write_forest<T: Scalar, W: Write>(
    mut out: W,
    model: &ForestModel<T>,
    meta: &[(String, String)],
) -> Result<()> {
    writeln!(out, "{MAGIC} {FOREST_FORMAT_VERSION}")?;
    writeln!(out, "trees {}", model.params.num_trees)?;
    writeln!(out, "mtry {}", model.params.mtry)?;
    writeln!(out, "seed {}", model.params.seed)?;
    writeln!(out, "dims {}", model.dims)?;
    writeln!(out, "meta {}", meta.len())?;
    for (k, v) in meta {
        if k.is_empty() || k.contains([' ', '\n']) || v.contains('\n') {
            return Err(ShapeError::InvalidParams(format!(
                "meta entry {k:?} cannot be stored"
            )));
        }
        writeln!(out, "{k} {v}")?;
    }
    writeln!(out, "classes {}", model.class_names.len())?;
    for name in &model.class_names {
        if name.contains('\n') || name.is_empty() {
            return Err(ShapeError::InvalidParams(format!(
                "class name {name:?} cannot be stored"
            )));
        }
        writeln!(out, "{name}")?;
    }
    for tree in &model.trees {
        writeln!(out, "tree")?;
        write_node(&mut out, tree)?;
    }
    writeln!(out, "end")?;
    out.flush()?;
    Ok(())
}

fn write_node<T: Scalar, W: Write>(out: &mut W, node: &TreeNode<T>) -> Result<()> {
    match node {
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            writeln!(out, "S {feature} {:e}", threshold.as_f64())?;
            write_node(out, left)?;
            write_node(out, right)
        }
        TreeNode::Leaf { counts } => {
            write!(out, "L")?;
            for c in counts {
                write!(out, " {c}")?;
            }
            writeln!(out)?;
            Ok(())
        }
    }
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    no: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String> {
        self.no += 1;
        match self.inner.next() {
            Some(line) => Ok(line?),
            None => Err(self.err("unexpected end of model")),
        }
    }

    fn err(&self, what: &str) -> ShapeError {
        ShapeError::Parse(format!("model line {}: {what}", self.no))
    }

    fn field<V: std::str::FromStr>(&mut self, key: &str) -> Result<V> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| self.err(&format!("expected `{key} <value>`")))
    }
}

/// Parses a forest written by [`write_forest`] together with its
/// annotations. Reading stops right after the closing `end` line.
pub fn read_forest<T: Scalar, R: BufRead>(input: R) -> Result<(ForestModel<T>, ModelMeta)> {
    let mut lines = Lines {
        inner: input.lines(),
        no: 0,
    };
    let version: u32 = lines.field(MAGIC)?;
    if version != FOREST_FORMAT_VERSION {
        return Err(lines.err(&format!("unsupported format version {version}")));
    }
    let num_trees: usize = lines.field("trees")?;
    let mtry: usize = lines.field("mtry")?;
    let seed: u64 = lines.field("seed")?;
    let dims: usize = lines.field("dims")?;
    let meta_len: usize = lines.field("meta")?;
    let mut meta = Vec::with_capacity(meta_len);
    for _ in 0..meta_len {
        let line = lines.next()?;
        let (k, v) = line
            .split_once(' ')
            .ok_or_else(|| lines.err("expected `key value`"))?;
        meta.push((k.to_string(), v.to_string()));
    }
    let num_classes: usize = lines.field("classes")?;
    let class_names = (0..num_classes)
        .map(|_| lines.next())
        .collect::<Result<Vec<_>>>()?;
    let mut trees = Vec::with_capacity(num_trees);
    for _ in 0..num_trees {
        if lines.next()? != "tree" {
            return Err(lines.err("expected `tree`"));
        }
        trees.push(read_node(&mut lines, dims, num_classes)?);
    }
    if lines.next()? != "end" {
        return Err(lines.err("expected `end`"));
    }
    let model = ForestModel {
        trees,
        params: ForestParams {
            num_trees,
            mtry,
            seed,
        },
        dims,
        class_names,
    };
    Ok((model, meta))
}

fn read_node<T: Scalar, R: BufRead>(
    lines: &mut Lines<R>,
    dims: usize,
    num_classes: usize,
) -> Result<TreeNode<T>> {
    let line = lines.next()?;
    let mut parts = line.split(' ');
    match parts.next() {
        Some("S") => {
            let feature: usize = parts
                .next()
                .and_then(|v| v.parse().ok())
                .filter(|&f| f < dims)
                .ok_or_else(|| lines.err("bad split feature"))?;
            let threshold = parts
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .and_then(T::from_f64)
                .ok_or_else(|| lines.err("bad split threshold"))?;
            let left = Box::new(read_node(lines, dims, num_classes)?);
            let right = Box::new(read_node(lines, dims, num_classes)?);
            Ok(TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            })
        }
        Some("L") => {
            let counts = parts
                .map(|v| v.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| lines.err("bad leaf count"))?;
            if counts.len() != num_classes || counts.iter().sum::<u32>() == 0 {
                return Err(lines.err("leaf histogram does not match the class table"));
            }
            Ok(TreeNode::Leaf { counts })
        }
        _ => Err(lines.err("expected a node")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{train_forest, LabeledSet};

    fn model() -> ForestModel<f64> {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i as f64 * 0.37).sin(), i as f64 / 7.0])
            .collect();
        let names: Vec<&str> = (0..30).map(|i| ["a", "b", "c"][i % 3]).collect();
        let data = LabeledSet::from_names(rows, &names).unwrap();
        train_forest(
            &data,
            ForestParams {
                num_trees: 4,
                mtry: 1,
                seed: 9,
            },
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let m = model();
        let mut buf = Vec::new();
        let meta = vec![
            ("kind".to_string(), "GFD".to_string()),
            ("note".to_string(), "two words".to_string()),
        ];
        write_forest(&mut buf, &m, &meta).unwrap();
        let (back, meta_back) = read_forest::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        assert_eq!(meta_back, meta);
        let mut again = Vec::new();
        write_forest(&mut again, &back, &meta_back).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_truncated_and_foreign_input() {
        let mut buf = Vec::new();
        write_forest(&mut buf, &model(), &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() / 2];
        assert!(read_forest::<f64, _>(cut.as_bytes()).is_err());
        assert!(read_forest::<f64, _>("shapekit-forest 2\n".as_bytes()).is_err());
        assert!(read_forest::<f64, _>("hello\n".as_bytes()).is_err());
    }
}
