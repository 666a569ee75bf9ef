//! Experiment configuration files (TOML).

use serde::{Deserialize, Serialize};

use semiadv::format::parse_elem;
use semiadv::{make_field, Adversary, CodeSpec, Fe, Family, Field};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub code: CodeConfig,
    #[serde(default)]
    pub decoder: DecoderConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub seed: u64,
    /// Output path or prefix; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gssb: Option<GssbConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ballcheck: Option<BallcheckConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    /// Characteristic of the field.
    pub p: u64,
    /// Extension degree.
    #[serde(default = "one_u32")]
    pub m: u32,
    #[serde(default = "one")]
    pub s: usize,
    /// Folding generator (FRS); elements use the `a:b:c` residue syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    /// Decoding parameter `L` for FRS and MULT.
    #[serde(default = "one")]
    pub l: usize,
    /// Decoding radius; defaults to the channel's `e`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<usize>,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { l: 1, e: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub e0: usize,
    #[serde(default)]
    pub e: usize,
    #[serde(default = "default_adversary")]
    pub adversary: Adversary,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { e0: 0, e: 0, adversary: Adversary::RandomReplace }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    /// Defaults to the channel's adversary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<Adversary>,
    pub grid: GridConfig,
}

/// Either an explicit list of `(e0, e)` pairs or ranges for both coordinates
/// (pairs with `e0 > e` are skipped).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<RangeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<RangeConfig>,
}

/// Inclusive range `start, start + step, .. <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub start: usize,
    pub end: usize,
    #[serde(default = "one")]
    pub step: usize,
}

impl RangeConfig {
    fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step.max(1)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    #[serde(default = "five")]
    pub repetitions: usize,
    /// `false` forces the quadratic kernels everywhere.
    #[serde(default = "yes")]
    pub fast_paths: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GssbConfig {
    pub l: usize,
    pub e0: usize,
    pub e: usize,
    #[serde(default = "ten")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallcheckConfig {
    #[serde(default = "thousand")]
    pub trials: usize,
}

impl Default for BallcheckConfig {
    fn default() -> Self {
        BallcheckConfig { trials: thousand() }
    }
}

fn one() -> usize {
    1
}
fn one_u32() -> u32 {
    1
}
fn five() -> usize {
    5
}
fn ten() -> usize {
    10
}
fn thousand() -> usize {
    1000
}
fn yes() -> bool {
    true
}
fn default_adversary() -> Adversary {
    Adversary::RandomReplace
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn field(&self) -> Result<Field, CliError> {
        make_field(self.code.p, self.code.m).map_err(|e| CliError::Usage(format!("field: {e}")))
    }

    pub fn code_spec(&self) -> Result<CodeSpec, CliError> {
        let f = self.field()?;
        let elem = |s: &str| parse_elem(&f, s).map_err(|e| CliError::Parse(format!("config element {s:?}: {e}")));
        let gamma: Option<Fe> = self.code.gamma.as_deref().map(elem).transpose()?;
        let alphas: Option<Vec<Fe>> = match &self.code.alphas {
            Some(list) => Some(list.iter().map(|s| elem(s)).collect::<Result<_, _>>()?),
            None => None,
        };
        let c = &self.code;
        CodeSpec::new(c.family, c.n, c.k, &f, c.s, gamma, alphas).map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Radius the decoder is asked for.
    pub fn decode_radius(&self) -> usize {
        self.decoder.e.unwrap_or(self.channel.e)
    }
}

impl ExperimentConfig {
    /// Grid points in file order; every point satisfies `e0 <= e <= n`.
    pub fn points(&self, n: usize) -> Result<Vec<(usize, usize)>, CliError> {
        let mut pts: Vec<(usize, usize)> = Vec::new();
        if let Some(list) = &self.grid.points {
            pts.extend(list.iter().map(|p| (p[0], p[1])));
        }
        match (&self.grid.e0, &self.grid.e) {
            (Some(r0), Some(r)) => {
                for e in r.values() {
                    pts.extend(r0.values().into_iter().filter(|&e0| e0 <= e).map(|e0| (e0, e)));
                }
            }
            (None, None) => {}
            _ => return Err(CliError::Usage("grid ranges need both e0 and e".into())),
        }
        if pts.is_empty() {
            return Err(CliError::Usage("experiment grid is empty".into()));
        }
        if let Some(&(e0, e)) = pts.iter().find(|&&(e0, e)| e0 > e || e > n) {
            return Err(CliError::Usage(format!("grid point (e0={e0}, e={e}) violates e0 <= e <= n = {n}")));
        }
        Ok(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 7
output = "out/irs"

[code]
family = "IRS"
n = 64
k = 16
p = 65537
s = 4

[channel]
e0 = 10
e = 38
adversary = "singleComponent"

[experiment]
trials = 200
grid = { points = [[10, 38], [24, 24]], e0 = { start = 0, end = 4, step = 2 }, e = { start = 0, end = 2 } }

[bench]
sizes = [1024, 2048]
"#;

    #[test]
    fn round_trips_losslessly() {
        let cfg = Config::parse(SAMPLE).unwrap();
        assert_eq!(Config::parse(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(cfg.channel.adversary, Adversary::SingleComponent);
        assert_eq!(cfg.bench.as_ref().unwrap().repetitions, 5);
        let pts = cfg.experiment.as_ref().unwrap().points(64).unwrap();
        assert_eq!(pts, vec![(10, 38), (24, 24), (0, 0), (0, 1), (0, 2), (2, 2)]);
        assert_eq!(cfg.code_spec().unwrap().n(), 64);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_points() {
        assert!(matches!(Config::parse("[code]\nfamily='RS'\nn=4\nk=2\np=7\nbogus=1\n"), Err(CliError::Parse(_))));
        let cfg = Config::parse(SAMPLE).unwrap();
        let mut exp = cfg.experiment.unwrap();
        exp.grid.points = Some(vec![[5, 3]]);
        assert!(matches!(exp.points(64), Err(CliError::Usage(_))));
    }
}
