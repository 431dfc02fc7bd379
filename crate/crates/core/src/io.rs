//! Text formats: complex literals, Matrix Market files, and the serde
//! representation of complex numbers used in JSON documents.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::ParseError;
use crate::matops::{ComplexMatrix, C64};

/// Largest dimension accepted from a file.
pub const MAX_DIM: usize = 1000;

/// Parses `3`, `-2.5e-1`, `i`, `-i`, `2i`, `1+2i`, `1.5-i`, `(1, 2)`.
pub fn parse_complex(text: &str) -> Result<C64, ParseError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || ParseError::Complex(format!("cannot parse {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner.split_once(',').ok_or_else(bad)?;
        return finite(C64::new(real(re).ok_or_else(bad)?, real(im).ok_or_else(bad)?), text);
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return finite(C64::new(real(&s).ok_or_else(bad)?, 0.0), text);
    };
    // Split at the last sign that is not an exponent sign or the leading one.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k]).ok_or_else(bad)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other).ok_or_else(bad)?,
    };
    finite(C64::new(re, im), text)
}

fn real(s: &str) -> Option<f64> {
    let lower = s.to_ascii_lowercase();
    if lower.contains("inf") || lower.contains("nan") {
        return None;
    }
    s.parse::<f64>().ok()
}

fn finite(z: C64, text: &str) -> Result<C64, ParseError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(ParseError::Complex(format!("non-finite value {text:?}")))
    }
}

/// Formats with 17 significant digits, `re+imi`.
pub fn format_complex(z: C64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn mm_err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::MatrixMarket {
        line,
        msg: msg.into(),
    }
}

/// Reads a square Matrix Market matrix (array or coordinate layout).
pub fn read_matrix_market(text: &str) -> Result<ComplexMatrix, ParseError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or_else(|| mm_err(1, "empty input"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(mm_err(1, "expected '%%MatrixMarket matrix <layout> <field> <symmetry>'"));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(mm_err(1, format!("unknown layout {other:?}"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" if layout == Layout::Coordinate => Field::Pattern,
        other => return Err(mm_err(1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" if field == Field::Complex => Symmetry::Hermitian,
        other => return Err(mm_err(1, format!("unsupported symmetry {other:?}"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data.next().ok_or_else(|| mm_err(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| mm_err(size_line, format!("bad size {t:?}"))))
        .collect::<Result<_, _>>()?;
    let expect_dims = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != expect_dims {
        return Err(mm_err(size_line, "wrong number of size fields"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(mm_err(size_line, format!("matrix is {rows}x{cols}, expected square")));
    }
    let n = rows;
    if n == 0 || n > MAX_DIM {
        return Err(mm_err(size_line, format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    let mut m = DMatrix::<C64>::zeros(n, n);

    let value = |line: usize, parts: &[&str]| -> Result<C64, ParseError> {
        let num = |t: &str| -> Result<f64, ParseError> {
            let v = real(t).ok_or_else(|| mm_err(line, format!("bad number {t:?}")))?;
            if field == Field::Integer && t.contains(['.', 'e', 'E']) {
                return Err(mm_err(line, format!("non-integer value {t:?}")));
            }
            Ok(v)
        };
        match (field, parts.len()) {
            (Field::Pattern, 0) => Ok(C64::new(1.0, 0.0)),
            (Field::Real | Field::Integer, 1) => Ok(C64::new(num(parts[0])?, 0.0)),
            (Field::Complex, 2) => Ok(C64::new(num(parts[0])?, num(parts[1])?)),
            _ => Err(mm_err(line, "wrong number of value fields")),
        }
    };
    let mut place = |line: usize, i: usize, j: usize, v: C64| -> Result<(), ParseError> {
        if symmetry != Symmetry::General && i < j {
            return Err(mm_err(line, "entry above the diagonal in a symmetric layout"));
        }
        if symmetry == Symmetry::SkewSymmetric && i == j && v != C64::new(0.0, 0.0) {
            return Err(mm_err(line, "nonzero diagonal in a skew-symmetric matrix"));
        }
        if symmetry == Symmetry::Hermitian && i == j && v.im != 0.0 {
            return Err(mm_err(line, "complex diagonal in a hermitian matrix"));
        }
        m[(i, j)] += v;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] += v,
                Symmetry::SkewSymmetric => m[(j, i)] -= v,
                Symmetry::Hermitian => m[(j, i)] += v.conj(),
            }
        }
        Ok(())
    };

    match layout {
        Layout::Array => {
            // Column-major; symmetric layouts list only the lower triangle.
            let mut slots = Vec::new();
            for j in 0..n {
                let first = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::SkewSymmetric => j + 1,
                    _ => j,
                };
                for i in first..n {
                    slots.push((i, j));
                }
            }
            let mut k = 0;
            for (line, text) in data {
                let parts: Vec<&str> = text.split_whitespace().collect();
                let Some(&(i, j)) = slots.get(k) else {
                    return Err(mm_err(line, "more entries than the size line allows"));
                };
                let v = value(line, &parts)?;
                place(line, i, j, v)?;
                k += 1;
            }
            if k != slots.len() {
                return Err(mm_err(size_line, format!("expected {} entries, found {k}", slots.len())));
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut k = 0;
            for (line, text) in data {
                let parts: Vec<&str> = text.split_whitespace().collect();
                if parts.len() < 2 {
                    return Err(mm_err(line, "missing row/column index"));
                }
                if k == nnz {
                    return Err(mm_err(line, "more entries than declared"));
                }
                let index = |t: &str| -> Result<usize, ParseError> {
                    match t.parse::<usize>() {
                        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                        _ => Err(mm_err(line, format!("index {t:?} outside 1..={n}"))),
                    }
                };
                let (i, j) = (index(parts[0])?, index(parts[1])?);
                let v = value(line, &parts[2..])?;
                place(line, i, j, v)?;
                k += 1;
            }
            if k != nnz {
                return Err(mm_err(size_line, format!("expected {nnz} entries, found {k}")));
            }
        }
    }
    ComplexMatrix::new(m).map_err(|e| mm_err(size_line, e.to_string()))
}

/// Writes `a` as a dense complex general Matrix Market array.
pub fn write_matrix_market(a: &ComplexMatrix, comment: &str) -> String {
    let n = a.dim();
    let mut out = String::from("%%MatrixMarket matrix array complex general\n");
    for line in comment.lines() {
        let _ = writeln!(out, "% {line}");
    }
    let _ = writeln!(out, "{n} {n}");
    for j in 0..n {
        for i in 0..n {
            let v = a[(i, j)];
            let _ = writeln!(out, "{:.16e} {:.16e}", v.re, v.im);
        }
    }
    out
}

/// Serde adapter: complex numbers as `[re, im]`, also accepting a bare
/// number or a literal string such as `"3.5-2i"` on input.
pub mod complex_serde {
    use serde::de::{self, Deserializer, SeqAccess, Visitor};
    use serde::ser::{SerializeTuple, Serializer};

    use super::{parse_complex, C64};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&z.re)?;
        t.serialize_element(&z.im)?;
        t.end()
    }

    struct ComplexVisitor;

    impl<'de> Visitor<'de> for ComplexVisitor {
        type Value = C64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number, a [re, im] pair, or a complex literal string")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<C64, E> {
            Ok(C64::new(v, 0.0))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<C64, E> {
            Ok(C64::new(v as f64, 0.0))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<C64, E> {
            Ok(C64::new(v as f64, 0.0))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<C64, E> {
            parse_complex(v).map_err(E::custom)
        }

        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<C64, A::Error> {
            let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
            let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
            if seq.next_element::<f64>()?.is_some() {
                return Err(de::Error::invalid_length(3, &self));
            }
            Ok(C64::new(re, im))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        d.deserialize_any(ComplexVisitor)
    }

    /// The same representation for `Vec<C64>`.
    pub mod vec {
        use serde::de::Deserializer;
        use serde::ser::{SerializeSeq, Serializer};
        use serde::Deserialize;

        use super::C64;

        #[derive(serde::Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] C64);

        pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for z in v {
                seq.serialize_element(&Wrap(*z))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
            Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }
}
