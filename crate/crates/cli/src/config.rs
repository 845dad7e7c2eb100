//! Line-oriented config files: `[section]` headers, `key = value` lines,
//! `#` comments.
//!
//! ```text
//! [model]
//! parity = odd
//! roots = -1:2:+, 3:1:-      # value:multiplicity:sign
//! mu = 1, 1/2                # one group per multiple root, groups split by ';'
//! xi = 2                     # one per simple root, in order
//! nu = 1
//! domain = 0, 3              # upper end may be `inf`
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use siflow_core::appendix::NovichkovParams;
use siflow_core::global::{GlobalExampleSpec, GlobalFamily};
use siflow_core::model::{Domain, ModelError, ModelSpec, Parity, RootSpec};
use siflow_core::radical::Sign;
use siflow_core::Rational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Domain { line: usize, source: ModelError },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
struct Section {
    header_line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str, section: &str) -> Result<Entry, ConfigError> {
        self.take(key)
            .ok_or_else(|| err(self.header_line, format!("[{section}] is missing `{key}`")))
    }

    fn finish(self, section: &str, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.entries.iter().min_by_key(|(_, e)| e.line) {
            None => Ok(()),
            Some((k, e)) => Err(err(
                e.line,
                format!(
                    "unknown key `{k}` in [{section}] (expected one of {})",
                    allowed.join(", ")
                ),
            )),
        }
    }
}

const SECTIONS: [&str; 5] = ["model", "verify", "integrate", "classify", "novichkov"];

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            if out.contains_key(name) {
                return Err(err(line, format!("section [{name}] appears twice")));
            }
            out.insert(
                name.to_string(),
                Section {
                    header_line: line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name.to_string());
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| err(line, "expected `key = value`"))?;
        let section = current
            .as_ref()
            .ok_or_else(|| err(line, "key outside any section"))?;
        let key = k.trim().to_string();
        let slot = out.get_mut(section).expect("section was inserted");
        if slot.entries.contains_key(&key) {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
        slot.entries.insert(
            key,
            Entry {
                value: v.trim().to_string(),
                line,
            },
        );
    }
    Ok(out)
}

/// Integers, fractions `p/q` and plain decimals, all exact.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().ok()?;
        let d: num_bigint::BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        let n: num_bigint::BigInt = digits.parse().ok()?;
        let d = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        let r = Rational::new(n, d);
        return Some(if neg { -r } else { r });
    }
    s.parse::<num_bigint::BigInt>()
        .ok()
        .map(Rational::from_integer)
}

fn rational_at(s: &str, line: usize) -> Result<Rational, ConfigError> {
    parse_rational(s).ok_or_else(|| err(line, format!("`{s}` is not a rational number")))
}

fn rational_list(e: &Entry) -> Result<Vec<Rational>, ConfigError> {
    e.value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| rational_at(s, e.line))
        .collect()
}

fn f64_at(e: &Entry) -> Result<f64, ConfigError> {
    e.value
        .parse::<f64>()
        .map_err(|_| err(e.line, format!("`{}` is not a number", e.value)))
}

fn usize_at(e: &Entry) -> Result<usize, ConfigError> {
    e.value.parse::<usize>().map_err(|_| {
        err(
            e.line,
            format!("`{}` is not a nonnegative integer", e.value),
        )
    })
}

fn parse_sign(s: &str) -> Option<Sign> {
    match s.trim() {
        "+" | "+1" | "1" => Some(Sign::Plus),
        "-" | "-1" => Some(Sign::Minus),
        _ => None,
    }
}

/// One `value:multiplicity:sign` triple.
fn parse_triple(s: &str, line: usize) -> Result<(Rational, u32, Sign), ConfigError> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(err(
            line,
            format!("root `{}` must be value:multiplicity:sign", s.trim()),
        ));
    }
    let value = rational_at(parts[0], line)?;
    let mult: u32 = parts[1].parse().ok().filter(|m| *m > 0).ok_or_else(|| {
        err(
            line,
            format!("multiplicity `{}` must be a positive integer", parts[1]),
        )
    })?;
    let sign = parse_sign(parts[2])
        .ok_or_else(|| err(line, format!("sign `{}` must be + or -", parts[2])))?;
    Ok((value, mult, sign))
}

#[derive(Debug, Clone)]
pub struct VerifySection {
    pub profile: bool,
    pub recurrences: bool,
    pub brackets: bool,
    pub points: usize,
    pub tolerance: Option<f64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            profile: true,
            recurrences: true,
            brackets: true,
            points: 20,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntegrateSection {
    pub a: f64,
    pub y: f64,
    pub pa: f64,
    pub py: f64,
    pub t: f64,
    pub h: f64,
    pub every: usize,
    /// Fail when the worst drift of `H`, `S1`, `S2` exceeds this.
    pub tolerance: Option<f64>,
    pub line: usize,
}

#[derive(Debug, Default)]
pub struct Config {
    pub model: Option<ModelSpec>,
    pub verify: VerifySection,
    pub integrate: Option<IntegrateSection>,
    pub classify: Option<GlobalExampleSpec>,
    pub novichkov: Option<NovichkovParams>,
}

pub fn load(path: &str) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_string(),
        source,
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let mut sections = split_sections(text)?;
    let mut cfg = Config::default();
    if let Some(s) = sections.remove("model") {
        cfg.model = Some(parse_model(s)?);
    }
    if let Some(s) = sections.remove("verify") {
        cfg.verify = parse_verify(s)?;
    }
    if let Some(s) = sections.remove("integrate") {
        cfg.integrate = Some(parse_integrate(s)?);
    }
    if let Some(s) = sections.remove("classify") {
        cfg.classify = Some(parse_classify(s)?);
    }
    if let Some(s) = sections.remove("novichkov") {
        cfg.novichkov = Some(parse_novichkov(s)?);
    }
    Ok(cfg)
}

const MODEL_KEYS: [&str; 7] = ["parity", "n", "roots", "mu", "xi", "nu", "domain"];

fn parse_model(mut s: Section) -> Result<ModelSpec, ConfigError> {
    let header = s.header_line;
    let parity_e = s.require("parity", "model")?;
    let parity = match parity_e.value.as_str() {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        other => {
            return Err(err(
                parity_e.line,
                format!("parity `{other}` must be even or odd"),
            ))
        }
    };
    let roots_e = s.require("roots", "model")?;
    let triples: Vec<(Rational, u32, Sign)> = roots_e
        .value
        .split(',')
        .map(|t| parse_triple(t, roots_e.line))
        .collect::<Result<_, _>>()?;
    if triples.is_empty() {
        return Err(err(roots_e.line, "no roots given"));
    }

    let simple_count = triples.iter().filter(|t| t.1 == 1).count();
    let xi = match s.take("xi") {
        Some(e) => {
            let v = rational_list(&e)?;
            if v.len() != simple_count {
                return Err(err(
                    e.line,
                    format!(
                        "expected {simple_count} xi values (one per simple root), got {}",
                        v.len()
                    ),
                ));
            }
            (v, e.line)
        }
        None if simple_count == 0 => (Vec::new(), header),
        None => return Err(err(header, "[model] is missing `xi` for the simple roots")),
    };
    let multiple: Vec<u32> = triples.iter().filter(|t| t.1 > 1).map(|t| t.1).collect();
    let mu: Vec<Vec<Rational>> = match s.take("mu") {
        Some(e) => {
            let groups: Vec<Vec<Rational>> = e
                .value
                .split(';')
                .map(|g| {
                    g.split(',')
                        .filter(|x| !x.trim().is_empty())
                        .map(|x| rational_at(x, e.line))
                        .collect()
                })
                .collect::<Result<_, _>>()?;
            if groups.len() != multiple.len() {
                return Err(err(
                    e.line,
                    format!(
                        "expected {} mu groups (one per multiple root), got {}",
                        multiple.len(),
                        groups.len()
                    ),
                ));
            }
            for (g, m) in groups.iter().zip(&multiple) {
                if g.len() != *m as usize {
                    return Err(err(
                        e.line,
                        format!(
                            "a root of multiplicity {m} needs {m} mu values, got {}",
                            g.len()
                        ),
                    ));
                }
            }
            groups
        }
        None if multiple.is_empty() => Vec::new(),
        None => {
            return Err(err(
                header,
                "[model] is missing `mu` for the multiple roots",
            ))
        }
    };

    let (mut xi_it, mut mu_it) = (xi.0.into_iter(), mu.into_iter());
    let roots: Vec<RootSpec> = triples
        .iter()
        .map(|(value, m, sign)| {
            let params = if *m == 1 {
                vec![xi_it.next().expect("counted")]
            } else {
                mu_it.next().expect("counted")
            };
            RootSpec {
                value: value.clone(),
                multiplicity: *m,
                sign: *sign,
                params,
            }
        })
        .collect();

    let nu = match s.take("nu") {
        Some(e) => rational_at(&e.value, e.line)?,
        None if parity == Parity::Even => Rational::zero(),
        None => Rational::one(),
    };

    if let Some(e) = s.take("n") {
        let n = usize_at(&e)?;
        let total: u32 = triples.iter().map(|t| t.1).sum();
        if n != total as usize {
            return Err(err(
                e.line,
                format!("n = {n} but the multiplicities sum to {total}"),
            ));
        }
    }

    let (domain, domain_line) = match s.take("domain") {
        Some(e) => {
            let (lo, hi) = e
                .value
                .split_once(',')
                .ok_or_else(|| err(e.line, "domain must be `lo, hi`"))?;
            let lo = rational_at(lo, e.line)?;
            let hi = match hi.trim() {
                "inf" | "+inf" => None,
                h => Some(rational_at(h, e.line)?),
            };
            (Domain::new(lo, hi), e.line)
        }
        None => (default_domain(&triples), header),
    };
    s.finish("model", &MODEL_KEYS)?;
    ModelSpec::new(parity, roots, nu, domain).map_err(|source| match source {
        ModelError::NegativeDomain(_)
        | ModelError::EmptyDomain { .. }
        | ModelError::SignInconsistent { .. } => ConfigError::Domain {
            line: domain_line,
            source,
        },
        other => err(header, other.to_string()),
    })
}

/// Largest interval compatible with the signs: above every `+` root, below every `−` root.
fn default_domain(triples: &[(Rational, u32, Sign)]) -> Domain {
    let lo = triples
        .iter()
        .filter(|t| t.2 == Sign::Plus)
        .map(|t| t.0.clone())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let hi = triples
        .iter()
        .filter(|t| t.2 == Sign::Minus)
        .map(|t| t.0.clone())
        .min();
    Domain::new(lo, hi)
}

fn parse_verify(mut s: Section) -> Result<VerifySection, ConfigError> {
    let mut v = VerifySection::default();
    if let Some(e) = s.take("checks") {
        v.profile = false;
        v.recurrences = false;
        v.brackets = false;
        for c in e.value.split(',').map(str::trim) {
            match c {
                "profile" => v.profile = true,
                "recurrences" => v.recurrences = true,
                "brackets" => v.brackets = true,
                other => {
                    return Err(err(
                        e.line,
                        format!("unknown check `{other}` (profile, recurrences, brackets)"),
                    ))
                }
            }
        }
    }
    if let Some(e) = s.take("points") {
        v.points = usize_at(&e)?;
    }
    if let Some(e) = s.take("tolerance") {
        v.tolerance = Some(f64_at(&e)?);
    }
    s.finish("verify", &["checks", "points", "tolerance"])?;
    Ok(v)
}

fn parse_integrate(mut s: Section) -> Result<IntegrateSection, ConfigError> {
    let line = s.header_line;
    let a = f64_at(&s.require("a", "integrate")?)?;
    let mut get =
        |k: &str, d: f64| -> Result<f64, ConfigError> { s.take(k).map_or(Ok(d), |e| f64_at(&e)) };
    let (y, pa, py, t, h) = (
        get("y", 0.0)?,
        get("pa", 0.0)?,
        get("py", 0.0)?,
        get("t", 10.0)?,
        get("h", 1e-3)?,
    );
    let every = s.take("every").map_or(Ok(10), |e| usize_at(&e))?;
    let tolerance = s.take("tolerance").map(|e| f64_at(&e)).transpose()?;
    s.finish(
        "integrate",
        &["a", "y", "pa", "py", "t", "h", "every", "tolerance"],
    )?;
    Ok(IntegrateSection {
        a,
        y,
        pa,
        py,
        t,
        h,
        every,
        tolerance,
        line,
    })
}

fn parse_classify(mut s: Section) -> Result<GlobalExampleSpec, ConfigError> {
    let fe = s.require("family", "classify")?;
    let family = GlobalFamily::from_name(&fe.value).ok_or_else(|| {
        let names: Vec<&str> = GlobalFamily::ALL.iter().map(|f| f.name()).collect();
        err(
            fe.line,
            format!(
                "unknown family `{}` (one of {})",
                fe.value,
                names.join(", ")
            ),
        )
    })?;
    let mu = rational_list(&s.require("mu", "classify")?)?;
    let mut spec = GlobalExampleSpec::single_root(family, mu);
    if let Some(e) = s.take("nu") {
        spec.nu = rational_list(&e)?;
    }
    if let Some(e) = s.take("band") {
        let v = rational_list(&e)?;
        if v.len() != 2 {
            return Err(err(e.line, "band must be `a1, a2`"));
        }
        spec.band = Some((v[0].clone(), v[1].clone()));
    }
    if let Some(e) = s.take("simple") {
        for pair in e.value.split(',').filter(|p| !p.trim().is_empty()) {
            let (a, xi) = pair.split_once(':').ok_or_else(|| {
                err(
                    e.line,
                    format!("simple root `{}` must be a:xi", pair.trim()),
                )
            })?;
            spec.simple
                .push((rational_at(a, e.line)?, rational_at(xi, e.line)?));
        }
    }
    s.finish("classify", &["family", "mu", "nu", "band", "simple"])?;
    Ok(spec)
}

fn parse_novichkov(mut s: Section) -> Result<NovichkovParams, ConfigError> {
    let be = s.require("branch", "novichkov")?;
    let mut rat = |k: &str| -> Result<Rational, ConfigError> {
        let e = s.require(k, "novichkov")?;
        rational_at(&e.value, e.line)
    };
    let mut p = match be.value.as_str() {
        "distinct" => NovichkovParams::distinct(rat("a1")?, rat("a2")?, rat("xi1")?, rat("xi2")?),
        "multiple" => NovichkovParams::multiple(rat("a1")?, rat("mu1")?, rat("mu2")?),
        other => {
            return Err(err(
                be.line,
                format!("branch `{other}` must be distinct or multiple"),
            ))
        }
    };
    if let Some(e) = s.take("b1") {
        p.b1 = rational_at(&e.value, e.line)?;
    }
    if let Some(e) = s.take("t0") {
        p.t0 = rational_at(&e.value, e.line)?;
    }
    s.finish(
        "novichkov",
        &["branch", "a1", "a2", "xi1", "xi2", "mu1", "mu2", "b1", "t0"],
    )?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(
            parse_rational("-3/6"),
            Some(Rational::new((-1).into(), 2.into()))
        );
        assert_eq!(
            parse_rational("0.25"),
            Some(Rational::new(1.into(), 4.into()))
        );
        assert_eq!(
            parse_rational("-1.5"),
            Some(Rational::new((-3).into(), 2.into()))
        );
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn model_section() {
        let cfg =
            parse("[model]\nparity = odd\nroots = -1:2:+, 3:1:-\nmu = 1, 1/2\nxi = 2\nnu = 3\n")
                .unwrap();
        let m = cfg.model.unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.domain.lo, Rational::zero());
        assert_eq!(m.domain.hi, Some(Rational::from_integer(3.into())));
    }

    #[test]
    fn missing_sign_reports_line() {
        let e = parse("# comment\n[model]\nparity = even\nroots = 1:2\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 4, .. }), "{e}");
    }

    #[test]
    fn sign_against_domain_is_a_domain_error() {
        let e =
            parse("[model]\nparity = even\nroots = 2:1:+\nxi = 1\ndomain = 0, 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::Domain { line: 5, .. }), "{e}");
    }

    #[test]
    fn unknown_keys_and_sections() {
        assert!(matches!(
            parse("[model]\nparity = even\nfoo = 1\n").unwrap_err(),
            ConfigError::Parse { .. }
        ));
        assert!(matches!(
            parse("[plot]\n").unwrap_err(),
            ConfigError::Parse { line: 1, .. }
        ));
    }
}
