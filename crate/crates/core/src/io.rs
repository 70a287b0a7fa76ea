//! JSON and CSV plumbing shared by the library and the command-line tool.
//!
//! Every float is written with 17 significant digits so that reports
//! round-trip exactly. `+inf` values of potentials are written as the string
//! `"inf"`.

use std::collections::BTreeMap;
use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::closed_form::ClosedForm;
use crate::cost::{add_separable_shift, CostSpec, PairwiseCost};
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::point::{MarginalPoint, ProductPoint};

/// Formats a float with 17 significant digits; non-finite values as
/// `inf`, `-inf`, `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty printer that writes every `f64` in 17-digit scientific form.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17 significant digits per float and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

/// `f64` in `(-inf, +inf]` with `+inf` encoded as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(ExtReal(v)),
            Raw::Text(t) if t == "inf" || t == "+inf" => Ok(ExtReal(f64::INFINITY)),
            _ => Err(serde::de::Error::custom("expected a finite number or \"inf\"")),
        }
    }
}

/// Serde adapter for `Vec<f64>` fields holding extended reals.
pub mod ext_real_vec {
    use super::ExtReal;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&x| ExtReal(x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<ExtReal>::deserialize(d)?.into_iter().map(|e| e.0).collect())
    }
}

/// Serde adapter for a single extended-real `f64` field.
pub mod ext_real {
    use super::ExtReal;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        ExtReal(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(ExtReal::deserialize(d)?.0)
    }
}

/// On-disk form of a [`GammaSet`].
#[derive(Debug, Serialize, Deserialize)]
pub struct GammaFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub dims: Vec<usize>,
    pub points: Vec<Vec<Vec<f64>>>,
}

impl GammaFile {
    pub fn from_gamma(g: &GammaSet) -> Self {
        Self {
            n: g.n_marginals(),
            dims: g.dims().to_vec(),
            points: g
                .points()
                .iter()
                .map(|p| p.parts().iter().map(|x| x.coords().to_vec()).collect())
                .collect(),
        }
    }

    pub fn into_gamma(self) -> Result<GammaSet> {
        if self.dims.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.dims.len(),
            });
        }
        let points = self
            .points
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(MarginalPoint::try_new)
                    .collect::<Result<Vec<_>>>()
                    .map(ProductPoint::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let g = GammaSet::new(points)?;
        if g.dims() != self.dims.as_slice() {
            return Err(Error::Invalid(format!(
                "declared dims {:?} do not match point dims {:?}",
                self.dims,
                g.dims()
            )));
        }
        Ok(g)
    }
}

pub fn parse_gamma(s: &str) -> Result<GammaSet> {
    from_json::<GammaFile>(s)?.into_gamma()
}

pub fn gamma_to_json(g: &GammaSet) -> Result<String> {
    to_json(&GammaFile::from_gamma(g))
}

/// On-disk form of a [`CostSpec`]. Pair keys are 1-based `"i,j"` strings;
/// `dims` may be omitted and supplied by the data file instead.
#[derive(Debug, Serialize, Deserialize)]
pub struct CostFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub pairs: BTreeMap<String, PairwiseCost>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<ClosedForm>>,
}

fn parse_pair_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("pair key must look like \"1,2\", got {key:?}"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad());
    }
    Ok((i - 1, j - 1))
}

impl CostFile {
    pub fn from_spec(spec: &CostSpec) -> Self {
        Self {
            dims: Some(spec.dims().to_vec()),
            pairs: spec
                .pairs()
                .map(|(i, j, c)| (format!("{},{}", i + 1, j + 1), c.clone()))
                .collect(),
            shift: spec.shift().map(|h| h.to_vec()),
        }
    }

    /// Builds the spec, taking dimensions from the file or else from `dims`.
    pub fn into_spec(self, dims: Option<&[usize]>) -> Result<CostSpec> {
        let dims = match (self.dims, dims) {
            (Some(own), Some(other)) if own.as_slice() != other => {
                return Err(Error::Invalid(format!(
                    "cost dims {own:?} do not match data dims {other:?}"
                )))
            }
            (Some(own), _) => own,
            (None, Some(other)) => other.to_vec(),
            (None, None) => return Err(Error::Invalid("cost file needs dims".into())),
        };
        let mut pairwise = BTreeMap::new();
        for (key, c) in self.pairs {
            if pairwise.insert(parse_pair_key(&key)?, c).is_some() {
                return Err(Error::Invalid(format!("duplicate pair key {key:?}")));
            }
        }
        let spec = CostSpec::new(dims, pairwise)?;
        match self.shift {
            Some(h) => add_separable_shift(&spec, h),
            None => Ok(spec),
        }
    }
}

pub fn parse_cost(s: &str, dims: Option<&[usize]>) -> Result<CostSpec> {
    from_json::<CostFile>(s)?.into_spec(dims)
}

pub fn cost_to_json(spec: &CostSpec) -> Result<String> {
    to_json(&CostFile::from_spec(spec))
}

/// On-disk form of a two-marginal pair list: `{"pairs": [[[x], [y]], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct PairsFile {
    pub pairs: Vec<(MarginalPoint, MarginalPoint)>,
}

/// CSV with a header row; every value via [`fmt_f64`].
pub fn to_csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
