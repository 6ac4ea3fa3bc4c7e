//! Model ids and `key=value` parameters.

use std::collections::BTreeMap;

use priorpost::models::{expand_latent, gaussian_chain, BetaBernoulli, ConstantLikelihood, FlatGaussian, GaussianGaussian};
use priorpost::Model;

pub const MODEL_IDS: &[&str] = &["gaussian-gaussian", "beta-bernoulli", "flat-gaussian", "constant", "gaussian-chain"];

pub fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("parameter {pair:?} is not key=value"))?;
        if out.insert(k.trim().to_owned(), v.trim().to_owned()).is_some() {
            return Err(format!("parameter {k:?} given twice"));
        }
    }
    Ok(out)
}

struct Params {
    model: String,
    values: BTreeMap<String, String>,
    used: BTreeMap<String, f64>,
}

impl Params {
    fn real(&mut self, key: &str, default: Option<f64>) -> Result<f64, String> {
        let v = match self.values.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| format!("{}: parameter {key}={v:?} is not a number", self.model))?,
            None => default.ok_or_else(|| format!("{}: parameter {key} is required", self.model))?,
        };
        self.used.insert(key.to_owned(), v);
        Ok(v)
    }

    fn count(&mut self, key: &str, default: Option<u64>) -> Result<u64, String> {
        let v = match self.values.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| format!("{}: parameter {key}={v:?} is not a non-negative integer", self.model))?,
            None => default.ok_or_else(|| format!("{}: parameter {key} is required", self.model))?,
        };
        self.used.insert(key.to_owned(), v as f64);
        Ok(v)
    }

    fn finish(self) -> Result<BTreeMap<String, f64>, String> {
        match self.values.keys().next() {
            Some(k) => Err(format!("{}: unknown parameter {k:?}", self.model)),
            None => Ok(self.used),
        }
    }
}

/// A model with every parameter actually used, defaults included, for the run manifest.
pub type Built = (Box<dyn Model>, BTreeMap<String, f64>);

pub fn build(id: &str, mut values: BTreeMap<String, String>, x: Option<f64>) -> Result<Built, String> {
    let x_key = match id {
        "gaussian-gaussian" | "flat-gaussian" => "xbar",
        "gaussian-chain" => "x",
        _ if x.is_some() => return Err(format!("--x does not apply to model {id}")),
        _ => "",
    };
    if let Some(x) = x {
        if values.insert(x_key.to_owned(), x.to_string()).is_some() {
            return Err(format!("both --x and -p {x_key}= given"));
        }
    }
    let mut p = Params {
        model: id.to_owned(),
        values,
        used: BTreeMap::new(),
    };
    let model: Box<dyn Model> = match id {
        "gaussian-gaussian" => {
            let prior_mean = p.real("prior_mean", Some(0.0))?;
            let prior_sd = p.real("prior_sd", Some(1.0))?;
            let obs_sd = p.real("obs_sd", Some(1.0))?;
            let xbar = p.real("xbar", Some(1.0))?;
            let t = p.count("t", Some(1))?;
            Box::new(GaussianGaussian::new(prior_mean, prior_sd, obs_sd, t, xbar).map_err(|e| e.to_string())?)
        }
        "flat-gaussian" => {
            let lo = p.real("lo", Some(-5.0))?;
            let hi = p.real("hi", Some(5.0))?;
            let obs_sd = p.real("obs_sd", Some(1.0))?;
            let xbar = p.real("xbar", Some(1.0))?;
            let t = p.count("t", Some(1))?;
            Box::new(FlatGaussian::new(lo, hi, obs_sd, t, xbar).map_err(|e| e.to_string())?)
        }
        "beta-bernoulli" => {
            let alpha = p.real("alpha", Some(1.0))?;
            let beta = p.real("beta", Some(1.0))?;
            let s = p.count("successes", None)?;
            let n = p.count("trials", None)?;
            Box::new(BetaBernoulli::new(alpha, beta, s, n).map_err(|e| e.to_string())?)
        }
        "constant" => {
            let prior_mean = p.real("prior_mean", Some(0.0))?;
            let prior_sd = p.real("prior_sd", Some(1.0))?;
            let log_value = p.real("log_value", Some(0.0))?;
            Box::new(ConstantLikelihood::new(prior_mean, prior_sd, log_value).map_err(|e| e.to_string())?)
        }
        "gaussian-chain" => {
            let x = p.real("x", Some(1.0))?;
            Box::new(expand_latent(gaussian_chain(x).map_err(|e| e.to_string())?))
        }
        other => return Err(format!("unknown model {other:?}; expected one of {}", MODEL_IDS.join(", "))),
    };
    Ok((model, p.finish()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_aliases() {
        let (m, used) = build("gaussian-gaussian", BTreeMap::new(), Some(2.0)).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(used["xbar"], 2.0);
        assert_eq!(used["t"], 1.0);
        let (m, _) = build("gaussian-chain", BTreeMap::new(), None).unwrap();
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build("nope", BTreeMap::new(), None).is_err());
        assert!(build("beta-bernoulli", BTreeMap::new(), None).is_err());
        assert!(build("constant", BTreeMap::new(), Some(1.0)).is_err());
        let extra = parse_params(&["bogus=1".into()]).unwrap();
        assert!(build("constant", extra, None).is_err());
        assert!(parse_params(&["novalue".into()]).is_err());
        let dup = parse_params(&["xbar=1".into()]).unwrap();
        assert!(build("gaussian-gaussian", dup, Some(1.0)).is_err());
    }
}
