use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Radial profile of a potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Samples `(r_k, V_k)` joined by linear interpolation, constant below the
    /// first sample.
    Linear { r: Vec<f64>, v: Vec<f64> },
    /// `V = v_k` on `(r_{k-1}, r_k]` with `r_{-1} = 0`.
    Piecewise { r: Vec<f64>, v: Vec<f64> },
}

/// Bounded radial potential with compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    support_radius: f64,
    bound: f64,
    profile: Profile,
}

impl PotentialSpec {
    pub fn new(support_radius: f64, bound: f64, profile: Profile) -> Result<Self> {
        if !(support_radius > 0.0) || !support_radius.is_finite() {
            return Err(Error::Data(format!("support radius must be positive, got {support_radius}")));
        }
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::Data(format!("bound must be non-negative, got {bound}")));
        }
        let (r, v) = match &profile {
            Profile::Linear { r, v } | Profile::Piecewise { r, v } => (r, v),
        };
        if r.is_empty() || r.len() != v.len() {
            return Err(Error::Data("table needs matching, non-empty r and value columns".into()));
        }
        if !(r[0] >= 0.0) {
            return Err(Error::Data(format!("radii must be non-negative, got {}", r[0])));
        }
        for w in r.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Data(format!("radii must be strictly increasing ({} then {})", w[0], w[1])));
            }
        }
        for (&ri, &vi) in r.iter().zip(v) {
            if !vi.is_finite() {
                return Err(Error::Data(format!("non-finite value at r={ri}")));
            }
            if vi.abs() > bound * (1.0 + 1e-12) {
                return Err(Error::Data(format!("|V({ri})| = {} exceeds bound {bound}", vi.abs())));
            }
            if ri > support_radius && vi != 0.0 {
                return Err(Error::Data(format!("nonzero value at r={ri} beyond support {support_radius}")));
            }
        }
        Ok(Self { support_radius, bound, profile })
    }

    /// `V ≡ 0`.
    pub fn zero() -> Self {
        Self {
            support_radius: 1.0,
            bound: 0.0,
            profile: Profile::Piecewise { r: vec![1.0], v: vec![0.0] },
        }
    }

    /// Constant `depth` on `r <= radius`, zero outside.
    pub fn well(radius: f64, depth: f64) -> Result<Self> {
        Self::new(radius, depth.abs(), Profile::Piecewise { r: vec![radius], v: vec![depth] })
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Linear { v, .. } | Profile::Piecewise { v, .. } => v.iter().all(|&x| x == 0.0),
        }
    }

    /// `V(r)`.
    pub fn value(&self, r: f64) -> f64 {
        if r > self.support_radius || r < 0.0 {
            return 0.0;
        }
        match &self.profile {
            Profile::Piecewise { r: edges, v } => match edges.iter().position(|&e| r <= e) {
                Some(k) => v[k],
                None => 0.0,
            },
            Profile::Linear { r: rs, v } => {
                if r <= rs[0] {
                    return v[0];
                }
                let k = rs.partition_point(|&x| x < r);
                if k == rs.len() {
                    return v[k - 1];
                }
                let t = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
                v[k - 1] + t * (v[k] - v[k - 1])
            }
        }
    }

    /// Radii where `V` or its derivative may jump, inside `(0, support]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let rs = match &self.profile {
            Profile::Linear { r, .. } | Profile::Piecewise { r, .. } => r,
        };
        let mut out: Vec<f64> = rs
            .iter()
            .copied()
            .filter(|&x| x > 0.0 && x < self.support_radius)
            .collect();
        out.push(self.support_radius);
        out
    }

    /// The same profile multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let profile = match &self.profile {
            Profile::Linear { r, v } => Profile::Linear { r: r.clone(), v: v.iter().map(|x| x * factor).collect() },
            Profile::Piecewise { r, v } => {
                Profile::Piecewise { r: r.clone(), v: v.iter().map(|x| x * factor).collect() }
            }
        };
        Self::new(self.support_radius, self.bound * factor.abs(), profile)
    }

    /// Parse the plain-text table format:
    ///
    /// ```text
    /// # support_radius=1.0 bound=1.0 [kind=linear|piecewise]
    /// 0.0 -1.0
    /// 1.0 -1.0
    /// ```
    ///
    /// Blank lines and further `#` lines are ignored. For `kind=piecewise`
    /// each line gives the value on the interval ending at its radius.
    pub fn parse(text: &str) -> Result<Self> {
        let mut support = None;
        let mut bound = None;
        let mut piecewise = false;
        let mut header_seen = false;
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if header_seen {
                    continue;
                }
                header_seen = true;
                for tok in rest.split_whitespace() {
                    let Some((key, val)) = tok.split_once('=') else {
                        return Err(Error::Parse { line: line_no, msg: format!("expected key=value, got '{tok}'") });
                    };
                    let num = || {
                        val.parse::<f64>()
                            .map_err(|e| Error::Parse { line: line_no, msg: format!("{key}: {e}") })
                    };
                    match key {
                        "support_radius" => support = Some(num()?),
                        "bound" => bound = Some(num()?),
                        "kind" => {
                            piecewise = match val {
                                "linear" => false,
                                "piecewise" => true,
                                _ => {
                                    return Err(Error::Parse { line: line_no, msg: format!("unknown kind '{val}'") })
                                }
                            }
                        }
                        _ => return Err(Error::Parse { line: line_no, msg: format!("unknown header key '{key}'") }),
                    }
                }
                continue;
            }
            if !header_seen {
                return Err(Error::Parse { line: line_no, msg: "missing '# support_radius=.. bound=..' header".into() });
            }
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse { line: line_no, msg: "expected two columns 'r value'".into() });
            };
            let a: f64 = a.parse().map_err(|e| Error::Parse { line: line_no, msg: format!("r: {e}") })?;
            let b: f64 = b.parse().map_err(|e| Error::Parse { line: line_no, msg: format!("value: {e}") })?;
            if let Some(&last) = r.last() {
                if !(a > last) {
                    return Err(Error::Parse { line: line_no, msg: format!("r must increase strictly ({last} then {a})") });
                }
            }
            r.push(a);
            v.push(b);
        }
        let support = support.ok_or(Error::Parse { line: 1, msg: "header lacks support_radius".into() })?;
        let bound = bound.ok_or(Error::Parse { line: 1, msg: "header lacks bound".into() })?;
        let profile = if piecewise { Profile::Piecewise { r, v } } else { Profile::Linear { r, v } };
        Self::new(support, bound, profile)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serialise in the format accepted by [`PotentialSpec::parse`], with
    /// round-trip precision.
    pub fn to_text(&self) -> String {
        let (kind, r, v) = match &self.profile {
            Profile::Linear { r, v } => ("linear", r, v),
            Profile::Piecewise { r, v } => ("piecewise", r, v),
        };
        let mut s = format!(
            "# support_radius={:.17e} bound={:.17e} kind={kind}\n",
            self.support_radius, self.bound
        );
        for (a, b) in r.iter().zip(v) {
            let _ = writeln!(s, "{a:.17e} {b:.17e}");
        }
        s
    }
}
