use std::path::Path;

use cdpp::experiments::{converge_gamma as run_gamma, converge_thm1 as run_thm1, ConvergeReport, GammaTarget};
use cdpp::christoffel::deformed_kernel;
use cdpp::kernels::{
    deformed_bessel_kernel, gamma_deformed_kernel, gamma_kernel, zmeas_deformed_kernel, GammaDeformParams, HalfInt,
    ZParams,
};
use cdpp::oracle::{brute_plancherel_corr, brute_zmeasure_corr, ope_correlation_brute, OpeSampler, ZDeform, MAX_BRUTE_N};
use cdpp::verify::{binomial_z_scores, Suite, Verifier, VERIFY_BITS};
use cdpp::{KernelHandle, PrecisionContext, XReal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{cfg_err, Config, GammaTargetCfg, KernelKind};
use crate::output::{num, opt, sink, write_csv, write_ndjson};
use crate::{Cli, Failure, Format};

const DEFAULT_BITS: usize = 256;
/// Slack on the [0,1] bound for kernel diagonals.
const DIAG_SLACK: f64 = 1e-12;

fn setup(cli: &Cli, config: Option<&Path>) -> Result<(Config, PrecisionContext), Failure> {
    let cfg = Config::load(config)?;
    let bits = cli.bits.or(cfg.bits).unwrap_or(DEFAULT_BITS);
    Ok((cfg, PrecisionContext::new(bits)?))
}

fn out_path<'a>(cli: &'a Cli, cfg: &'a Config) -> Option<&'a Path> {
    cli.out.as_deref().or(cfg.out.as_deref().map(Path::new))
}

#[derive(Serialize)]
struct EvalRow {
    x: f64,
    y: f64,
    k: String,
}

/// Builds the kernel named in the config.
fn kernel(cfg: &Config, ctx: &PrecisionContext) -> Result<KernelHandle, Failure> {
    let p = ctx.bits();
    let us = cfg.u_points(p);
    Ok(match Config::need(cfg.kernel, "kernel")? {
        KernelKind::Bessel => deformed_bessel_kernel(&cfg.real(Config::need(cfg.alpha, "alpha")?, p), &us, ctx)?,
        KernelKind::Charlier | KernelKind::Meixner => deformed_kernel(&cfg.ensemble(p)?, ctx)?,
        KernelKind::Zmeasure => zmeas_deformed_kernel(&cfg.zparams(p)?, &us, ctx)?,
        KernelKind::Gamma => {
            let zp = gamma_zparams(cfg, p)?;
            match us.as_slice() {
                [] => gamma_kernel(&zp, ctx)?,
                [u] => gamma_deformed_kernel(&GammaDeformParams::new(zp, u.clone())?, ctx)?,
                _ => return Err(cfg_err("the Gamma kernel takes at most one deformation point")),
            }
        }
    })
}

/// Gamma-kernel parameters do not involve ξ; a placeholder keeps ZParams valid.
fn gamma_zparams(cfg: &Config, p: usize) -> Result<ZParams, Failure> {
    let mut c = cfg.clone();
    c.xi = Some(cfg.xi.unwrap_or(0.5));
    c.zparams(p)
}

pub fn eval(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let (cfg, ctx) = setup(cli, Some(config))?;
    let p = ctx.bits();
    let k = kernel(&cfg, &ctx)?;
    let grid = cfg.grid()?;
    let digits = ctx.decimal_digits();
    let mut vals = Vec::with_capacity(grid.len());
    for &(x, y) in &grid {
        vals.push(k.eval_f64(x, y, p)?);
    }
    let rows: Vec<EvalRow> = grid
        .iter()
        .zip(&vals)
        .map(|(&(x, y), v)| EvalRow { x, y, k: v.to_sci(digits) })
        .collect();
    let w = sink(out_path(cli, &cfg))?;
    match cli.format {
        Format::Csv => {
            let r: Vec<Vec<String>> = rows.iter().map(|r| vec![num(r.x), num(r.y), r.k.clone()]).collect();
            write_csv(w, "eval", &["x", "y", "K"], &r)?;
        }
        Format::Ndjson => write_ndjson(w, &rows)?,
    }
    let mut bad = Vec::new();
    for (i, &(x, y)) in grid.iter().enumerate() {
        let v = vals[i].to_f64();
        if x == y && !(-DIAG_SLACK..=1.0 + DIAG_SLACK).contains(&v) {
            bad.push(format!("K({x},{x}) = {v} outside [0,1]"));
        }
        if let Some(j) = grid.iter().position(|&(a, b)| a == y && b == x) {
            let d = (&vals[i] - &vals[j]).abs();
            if d > vals[i].abs().max(&XReal::one(p)) * ctx.tol_rel() {
                bad.push(format!("K({x},{y}) != K({y},{x})"));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(bad.join("; ")))
    }
}

fn write_report(cli: &Cli, cfg: &Config, cmd: &str, param: &str, rep: &ConvergeReport) -> Result<(), Failure> {
    let w = sink(out_path(cli, cfg))?;
    match cli.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rep
                .rows
                .iter()
                .map(|r| vec![num(r.param), num(r.x), num(r.y), num(r.finite), num(r.limit), num(r.error), opt(r.ratio)])
                .collect();
            write_csv(w, cmd, &[param, "x", "y", "finite", "limit", "error", "ratio"], &rows)?;
        }
        Format::Ndjson => write_ndjson(w, &rep.rows)?,
    }
    for s in &rep.pairs {
        eprintln!(
            "({}, {}): monotone={} ratios={:?} slope={:.4}",
            s.x, s.y, s.monotone, s.ratios, s.slope
        );
    }
    let bad: Vec<String> = rep
        .pairs
        .iter()
        .filter(|s| !s.monotone)
        .map(|s| format!("error not monotone at ({}, {})", s.x, s.y))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(bad.join("; ")))
    }
}

pub fn converge_thm1(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let (cfg, ctx) = setup(cli, Some(config))?;
    let p = ctx.bits();
    let alpha = cfg.real(Config::need(cfg.alpha, "alpha")?, p);
    let ns = cfg.n_list.clone().ok_or_else(|| cfg_err("missing field `n_list`"))?;
    let grid: Vec<(i64, i64)> = cfg
        .grid()?
        .into_iter()
        .map(|(x, y)| {
            if x.fract() != 0.0 || y.fract() != 0.0 {
                return Err(cfg_err(format!("converge-thm1 grid points must be integers, got ({x}, {y})")));
            }
            Ok((x as i64, y as i64))
        })
        .collect::<Result<_, _>>()?;
    let rep = run_thm1(&alpha, &cfg.u_points(p), &ns, &grid, &ctx)?;
    write_report(cli, &cfg, "converge-thm1", "N", &rep)
}

pub fn converge_gamma(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let (cfg, ctx) = setup(cli, Some(config))?;
    let p = ctx.bits();
    let zp = gamma_zparams(&cfg, p)?;
    let xis: Vec<XReal> = cfg
        .xi_list
        .as_ref()
        .ok_or_else(|| cfg_err("missing field `xi_list`"))?
        .iter()
        .map(|s| XReal::parse(s, p))
        .collect::<Result<_, _>>()?;
    let us = cfg.u_points(p);
    if us.len() > 1 {
        return Err(cfg_err("converge-gamma takes at most one deformation point"));
    }
    let target = match cfg.target.unwrap_or_default() {
        GammaTargetCfg::Limit => GammaTarget::Limit,
        GammaTargetCfg::Scaled => GammaTarget::ScaledFourH,
    };
    let rep = run_gamma(&zp, us.first(), &xis, &cfg.grid()?, target, &ctx)?;
    write_report(cli, &cfg, "converge-gamma", "xi", &rep)
}

pub fn verify(cli: &Cli, suite: Option<&str>, config: Option<&Path>) -> Result<(), Failure> {
    let cfg = Config::load(config)?;
    let name = suite.map(str::to_owned).or(cfg.suite.clone()).unwrap_or_else(|| "all".into());
    let suite = Suite::parse(&name)?;
    let bits = cli.bits.or(cfg.bits).unwrap_or(VERIFY_BITS);
    let checks = Verifier::new(bits, cli.fuzz_bits)?.run(suite)?;
    write_ndjson(sink(out_path(cli, &cfg))?, &checks)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    eprintln!("{} checks, {} failed", checks.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failed.join("; ")))
    }
}

#[derive(Serialize)]
struct SampleLine {
    index: usize,
    points: Vec<u64>,
}

pub fn sample(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let (cfg, ctx) = setup(cli, Some(config))?;
    let spec = cfg.ensemble(ctx.bits())?;
    let truncation = cfg.truncation.unwrap_or_else(|| spec.support_cutoff(64));
    let samples = cfg.samples.unwrap_or(1);
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let s = OpeSampler::new(&spec, truncation, &ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::with_capacity(samples);
    let diag = s.diagonal();
    let mut counts = vec![0usize; diag.len()];
    for index in 0..samples {
        let points = s.sample(&mut rng)?;
        for &x in &points {
            counts[x as usize] += 1;
        }
        lines.push(SampleLine { index, points });
    }
    write_ndjson(sink(out_path(cli, &cfg))?, &lines)?;
    if let Some(h) = &cfg.hist {
        let z = binomial_z_scores(&counts, &diag, samples);
        let rows: Vec<Vec<String>> = (0..diag.len())
            .map(|x| {
                let zs = z.get(&x).map(|v| num(*v)).unwrap_or_default();
                vec![x.to_string(), counts[x].to_string(), num(diag[x] * samples as f64), zs]
            })
            .collect();
        write_csv(sink(Some(Path::new(h)))?, "sample-histogram", &["x", "count", "expected", "z"], &rows)?;
    }
    Ok(())
}

pub fn oracle_compare(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let (cfg, ctx) = setup(cli, Some(config))?;
    let p = ctx.bits();
    let sets = cfg.sets.clone().ok_or_else(|| cfg_err("missing field `sets`"))?;
    let k = kernel(&cfg, &ctx)?;
    let kind = Config::need(cfg.kernel, "kernel")?;
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for set in &sets {
        let pts: Vec<XReal> = set.iter().map(|&x| cfg.real(x, p)).collect();
        let det = k.correlation(&pts)?;
        let (brute, bound) = match kind {
            KernelKind::Bessel => {
                if !cfg.u.is_empty() {
                    return Err(cfg_err("the Plancherel oracle is undeformed; drop `u`"));
                }
                let ints = integer_points(set)?;
                let e = brute_plancherel_corr(&k_alpha(&cfg, p)?, &ints, Config::need(cfg.cutoff, "cutoff")?)?;
                (e.value, e.tail.to_f64() + 1e-8)
            }
            KernelKind::Charlier | KernelKind::Meixner => {
                let spec = cfg.ensemble(p)?;
                if spec.n > MAX_BRUTE_N {
                    return Err(cfg_err(format!("brute-force ensemble sums need n <= {MAX_BRUTE_N}")));
                }
                let ints: Vec<u64> = integer_points(set)?
                    .into_iter()
                    .map(|x| u64::try_from(x).map_err(|_| cfg_err("ensemble points must be >= 0")))
                    .collect::<Result<_, _>>()?;
                let cutoff = cfg.cutoff.map_or_else(|| spec.support_cutoff(p), |c| c as u64);
                let b = ope_correlation_brute(&spec, &ints, cutoff, p)?;
                let tol = b.abs().to_f64() * 1e-12;
                (b, tol)
            }
            KernelKind::Zmeasure => {
                let zp = cfg.zparams(p)?;
                let hs: Vec<HalfInt> = set.iter().map(|&x| HalfInt::from_f64(x)).collect::<Result<_, _>>()?;
                let us = cfg.u_points(p);
                let d = (!us.is_empty()).then_some(ZDeform::Regularized(&us));
                let e = brute_zmeasure_corr(&zp, &hs, Config::need(cfg.cutoff, "cutoff")?, d)?;
                (e.value, e.tail.to_f64() + 1e-8)
            }
            KernelKind::Gamma => return Err(cfg_err("no brute-force oracle for the Gamma kernel")),
        };
        let diff = (&det - &brute).abs().to_f64();
        let label = set.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
        if diff > bound {
            bad.push(format!("{{{label}}}: |diff| = {diff:e} > {bound:e}"));
        }
        rows.push(vec![
            label,
            brute.to_sci(ctx.decimal_digits()),
            det.to_sci(ctx.decimal_digits()),
            num(diff),
            num(bound),
        ]);
    }
    write_csv(sink(out_path(cli, &cfg))?, "oracle-compare", &["points", "brute", "kernel", "abs_diff", "bound"], &rows)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(bad.join("; ")))
    }
}

fn k_alpha(cfg: &Config, p: usize) -> Result<XReal, Failure> {
    Ok(cfg.real(Config::need(cfg.alpha, "alpha")?, p))
}

fn integer_points(set: &[f64]) -> Result<Vec<i64>, Failure> {
    set.iter()
        .map(|&x| {
            if x.fract() == 0.0 {
                Ok(x as i64)
            } else {
                Err(cfg_err(format!("{x} is not an integer point")))
            }
        })
        .collect()
}
