use std::io::Write;

use midscale::gtransform::{
    estimate_hellinger_sq, estimate_kl_bound, fk_unnormalized, map_chains, sample_symmetric_t_spectra,
    sqrt_construction_sample, GApprox, HellingerTarget, McmcConfig,
};
use midscale::partitions::{rational_string, rational_to_f64, zonal_table, RationalFunction};
use midscale::symmat::{
    esd_ks_distance, ks_distance, normalize_wishart, sample_goe_with, sample_wishart_with, semicircle_cdf,
    split_batches, MCEstimate, RngSeed, SeededRng, Spectrum, SymmetricMatrix,
};
use midscale::tmoments::{
    catalan, moment_tr_even, moment_tr_squared, normalized_l2_error_sq, MomentKind, MomentResult,
};
use midscale::Error;
use num::{BigInt, BigRational};
use rayon::prelude::*;

use crate::output::{Cell, RowWriter};
use crate::{CliError, Command, Context, EsdDist, McmcArgs, SampleDist, TargetArg};

const IID_CHUNK: usize = 4096;
const BATCHES_PER_CHAIN: usize = 10;

/// Claimed leading forms of the normalized L² error for k = 1..4.
pub const TABLE1_CLAIMS: [&str; 4] = ["2/p^2", "5/p^2 + 2/m + p^2/m^2", "24/p^2", "97/p^2 + 50/m + 25*p^2/m^2"];

pub const MOMENTS_COLUMNS: &[&str] =
    &["kind", "k", "exact", "numerator", "denominator_factors", "validity", "n", "p", "valid", "exact_value", "decimal"];
pub const TABLE1_COLUMNS: &[&str] =
    &["k", "n", "p", "exact_l2", "decimal", "claimed", "claimed_decimal", "ratio", "in_band"];
pub const CATALAN_COLUMNS: &[&str] = &["k", "n", "p", "normalized", "catalan", "rel_error", "within_tol"];
pub const SAMPLE_COLUMNS: &[&str] = &["draw", "tr1", "tr2", "tr3", "tr4"];
pub const SAMPLE_SUMMARY_COLUMNS: &[&str] = &["statistic", "mc_mean", "mc_stderr", "exact", "z_score", "n_samples"];
pub const ESD_COLUMNS: &[&str] = &["draw", "ks_distance"];
pub const HELLINGER_COLUMNS: &[&str] =
    &["n", "p", "K", "target", "classifier", "h2_mean", "h2_stderr", "n_samples"];
pub const KL_COLUMNS: &[&str] = &[
    "n",
    "p",
    "K",
    "bound_mean",
    "bound_stderr",
    "l1_mean",
    "l1_stderr",
    "mean_re",
    "mean_re_stderr",
    "mean_abs_im",
    "mean_abs_im_stderr",
    "h2_mean",
    "h2_stderr",
    "n_samples",
];
pub const FK_COLUMNS: &[&str] = &["n", "p", "K", "x", "f_mean", "f_stderr", "ratio_to_zero", "ratio_stderr", "n_z"];
pub const SWEEP_COLUMNS: &[&str] = &[
    "n",
    "p",
    "K",
    "gamma",
    "classifier",
    "h2_mean",
    "h2_stderr",
    "l2_k2_exact",
    "l2_k2_claimed",
    "term_5_over_p2",
    "term_2_over_m",
    "term_p2_over_m2",
    "status",
];
pub const ZONAL_COLUMNS: &[&str] = &["weight", "matrix", "row", "col", "value"];

pub fn dispatch(ctx: &Context, cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Moments { k, squared, eval } => moments(ctx, *k, *squared, eval, out),
        Command::Table1 { probe } => table1(ctx, probe, out),
        Command::CatalanCheck { n, p, kmax } => catalan_check(ctx, *n, *p, *kmax, out),
        Command::Sample { dist, n, p, nu, draws, summary, mcmc } => {
            sample(ctx, *dist, *n, *p, *nu, *draws, *summary, mcmc, out)
        }
        Command::Esd { dist, n, p, draws, mcmc } => esd(ctx, *dist, *n, *p, *draws, mcmc, out),
        Command::Hellinger { n, p, k, samples, target, mcmc } => {
            hellinger(ctx, *n, *p, *k, *samples, *target, mcmc, out)
        }
        Command::KlBound { n, p, k, samples, mcmc } => kl_bound(ctx, *n, *p, *k, *samples, mcmc, out),
        Command::FkDensity { n, p, k, x, n_z } => fk_density(ctx, *n, *p, *k, x, *n_z, out),
        Command::Sweep { k, gamma, n, samples, mcmc } => sweep(ctx, *k, *gamma, n, *samples, mcmc, out),
        Command::ZonalDump { w } => zonal_dump(ctx, *w, out),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require(v: Option<usize>, name: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| usage(format!("--{} is required here", name)))
}

fn check_np(n: i64, p: i64) -> Result<(), CliError> {
    if n < 1 || p < 1 {
        return Err(usage(format!("need positive n and p, got ({}, {})", n, p)));
    }
    Ok(())
}

fn eval_decimal(f: &RationalFunction, n: i64, p: i64) -> Result<f64, CliError> {
    Ok(rational_to_f64(&f.eval_i64(n, p)?))
}

/// Iid draws in fixed chunks, one derived stream per chunk, collected in
/// order so the result does not depend on the worker count.
fn iid<T, F>(count: usize, seed: RngSeed, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(&mut SeededRng) -> midscale::Result<T> + Sync,
{
    let n_chunks = count.div_ceil(IID_CHUNK);
    let chunks: midscale::Result<Vec<Vec<T>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let len = IID_CHUNK.min(count - c * IID_CHUNK);
            let mut rng = seed.with_stream(seed.stream.wrapping_add(c as u64)).rng();
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

fn moments(ctx: &Context, k: u32, squared: bool, eval: &[(i64, i64)], out: &mut dyn Write) -> Result<(), CliError> {
    let r: MomentResult = if squared { moment_tr_squared(k)? } else { moment_tr_even(k)? };
    let rec = r.record();
    let points = if eval.is_empty() { ctx.defaults.moments.eval.clone() } else { eval.to_vec() };
    let kind = match r.kind {
        MomentKind::Even => "even",
        MomentKind::Squared => "squared",
    };
    let mut w = RowWriter::new(MOMENTS_COLUMNS, ctx.format, out)?;
    for (n, p) in points {
        check_np(n, p)?;
        let v = r.exact.eval_i64(n, p)?;
        w.row(vec![
            kind.into(),
            k.into(),
            rec.exact.display.clone().into(),
            rec.exact.numerator.clone().into(),
            Cell::json_of(&rec.exact.denominator_factors),
            rec.validity.clone().into(),
            n.into(),
            p.into(),
            r.is_valid_at(n, p).into(),
            rational_string(&v).into(),
            rational_to_f64(&v).into(),
        ])?;
    }
    w.finish()
}

fn table1(ctx: &Context, probe: &[(i64, i64)], out: &mut dyn Write) -> Result<(), CliError> {
    let d = &ctx.defaults.table1;
    let probes = if probe.is_empty() { d.probes.clone() } else { probe.to_vec() };
    let mut w = RowWriter::new(TABLE1_COLUMNS, ctx.format, out)?;
    for k in 1..=4u32 {
        let exact = normalized_l2_error_sq(k)?;
        let claim = midscale::tmoments::claimed_l2_leading(k)?;
        for &(n, p) in &probes {
            check_np(n, p)?;
            let e = exact.eval_i64(n, p)?;
            let ed = rational_to_f64(&e);
            let cd = eval_decimal(&claim, n, p)?;
            let ratio = ed / cd;
            w.row(vec![
                k.into(),
                n.into(),
                p.into(),
                rational_string(&e).into(),
                ed.into(),
                TABLE1_CLAIMS[k as usize - 1].into(),
                cd.into(),
                ratio.into(),
                (d.band.0..=d.band.1).contains(&ratio).into(),
            ])?;
        }
    }
    w.finish()
}

fn catalan_check(
    ctx: &Context,
    n: Option<i64>,
    p: Option<i64>,
    kmax: Option<u32>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let d = &ctx.defaults.catalan;
    let (n, p, kmax) = (n.unwrap_or(d.n), p.unwrap_or(d.p), kmax.unwrap_or(d.kmax));
    check_np(n, p)?;
    let (nb, pb) = (BigInt::from(n), BigInt::from(p));
    let mut w = RowWriter::new(CATALAN_COLUMNS, ctx.format, out)?;
    for k in 1..=kmax {
        let e = moment_tr_even(k)?.exact_at(&nb, &pb)?;
        let scale = BigRational::new(BigInt::from(16).pow(k), pb.pow(k + 1));
        let v = rational_to_f64(&(e * scale));
        let c = catalan(k)? as f64;
        let rel = (v / c - 1.0).abs();
        w.row(vec![k.into(), n.into(), p.into(), v.into(), (c as i64).into(), rel.into(), (rel < d.rel_tol).into()])?;
    }
    w.finish()
}

fn power_sums(eigs: &[f64]) -> [f64; 4] {
    let mut s = [0.0; 4];
    for &x in eigs {
        let mut v = 1.0;
        for t in s.iter_mut() {
            v *= x;
            *t += v;
        }
    }
    s
}

fn traces_of(m: &SymmetricMatrix) -> midscale::Result<[f64; 4]> {
    Ok(power_sums(m.eigenvalues()?.values()))
}

/// Keeps the first `total` states in chain order, dropping emptied chains.
fn truncate_chains<T>(chains: Vec<Vec<T>>, total: usize) -> Vec<Vec<T>> {
    let mut left = total;
    chains
        .into_iter()
        .filter_map(|mut c| {
            c.truncate(left);
            left -= c.len();
            (!c.is_empty()).then_some(c)
        })
        .collect()
}

type Stat = (&'static str, fn(&[f64; 4]) -> f64, Option<f64>);

fn exact_or_none(r: midscale::Result<MomentResult>, n: i64, p: i64) -> Option<f64> {
    r.ok().and_then(|m| m.decimal(n, p).ok())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    ctx: &Context,
    dist: SampleDist,
    n: Option<usize>,
    p: usize,
    nu: Option<usize>,
    draws: Option<usize>,
    summary: bool,
    mcmc: &McmcArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if p == 0 {
        return Err(usage("--p must be positive"));
    }
    let draws = draws.unwrap_or(ctx.defaults.sample.draws);
    if draws < 2 {
        return Err(usage("--draws must be at least 2"));
    }
    let seed = ctx.rng_seed();
    let pf = p as f64;
    let ip = p as i64;
    let (chains, stats): (Vec<Vec<[f64; 4]>>, Vec<Stat>) = match dist {
        SampleDist::T => {
            let n = require(n, "n")?;
            let base = McmcConfig { kernel: ctx.defaults.sample.kernel, ..ctx.mcmc_base() };
            let cfg = mcmc.resolve(base);
            let per = draws.div_ceil(cfg.n_chains.max(1));
            let chains = map_chains(n, p, &cfg, per, |c| Ok(power_sums(&c.spectrum()?)))?;
            let ni = n as i64;
            let stats: Vec<Stat> = vec![
                ("tr T", |t| t[0], Some(0.0)),
                ("tr T^2", |t| t[1], exact_or_none(moment_tr_even(1), ni, ip)),
                ("(tr T^2)^2", |t| t[1] * t[1], exact_or_none(moment_tr_squared(2), ni, ip)),
                ("tr T^4", |t| t[3], exact_or_none(moment_tr_even(2), ni, ip)),
            ];
            (truncate_chains(chains, draws), stats)
        }
        SampleDist::Goe => {
            let v = iid(draws, seed, |r| traces_of(&sample_goe_with(p, r)?))?;
            let stats: Vec<Stat> = vec![
                ("tr Z", |t| t[0], Some(0.0)),
                ("tr Z^2", |t| t[1], Some(pf * (pf + 1.0))),
                ("(tr Z)^2", |t| t[0] * t[0], Some(2.0 * pf)),
            ];
            (vec![v], stats)
        }
        SampleDist::Wishart => {
            let n = require(n, "n")?;
            let v = iid(draws, seed, |r| traces_of(&sample_wishart_with(n, p, r)?))?;
            let nf = n as f64;
            let stats: Vec<Stat> = vec![
                ("tr Y", |t| t[0], Some(pf)),
                ("tr Y^2", |t| t[1], Some(pf * (nf + pf + 1.0) / nf)),
            ];
            (vec![v], stats)
        }
        SampleDist::Nwishart => {
            let n = require(n, "n")?;
            let v = iid(draws, seed, |r| traces_of(&normalize_wishart(&sample_wishart_with(n, p, r)?, n)))?;
            let stats: Vec<Stat> = vec![("tr X", |t| t[0], Some(0.0)), ("tr X^2", |t| t[1], Some(pf * (pf + 1.0)))];
            (vec![v], stats)
        }
        SampleDist::SqrtConstruction => {
            let nu = require(nu, "nu")?;
            let v = iid(draws, seed, |r| traces_of(&sqrt_construction_sample(nu, p, r)?))?;
            let n2 = 2 * nu as i64;
            let stats: Vec<Stat> = vec![
                ("tr X^2", |t| t[1], exact_or_none(moment_tr_even(1), n2, ip).map(|e| 16.0 * e)),
                ("(tr X^2)^2", |t| t[1] * t[1], exact_or_none(moment_tr_squared(2), n2, ip).map(|e| 256.0 * e)),
            ];
            (vec![v], stats)
        }
    };

    if !summary {
        let mut w = RowWriter::new(SAMPLE_COLUMNS, ctx.format, out)?;
        for (i, t) in chains.iter().flatten().enumerate() {
            w.row(vec![i.into(), t[0].into(), t[1].into(), t[2].into(), t[3].into()])?;
        }
        return w.finish();
    }

    let mut w = RowWriter::new(SAMPLE_SUMMARY_COLUMNS, ctx.format, out)?;
    for (name, f, exact) in stats {
        let est = if dist == SampleDist::T {
            let batches: Vec<Vec<f64>> = chains
                .iter()
                .flat_map(|c| split_batches(&c.iter().map(f).collect::<Vec<_>>(), BATCHES_PER_CHAIN))
                .collect();
            MCEstimate::from_batches(&batches)?
        } else {
            MCEstimate::from_samples(&chains[0].iter().map(f).collect::<Vec<_>>())?
        };
        let (ex, z) = match exact {
            Some(e) => (Cell::Float(e), Cell::Float((est.mean - e) / est.stderr)),
            None => (Cell::Empty, Cell::Empty),
        };
        w.row(vec![name.into(), est.mean.into(), est.stderr.into(), ex, z, est.n_samples.into()])?;
    }
    w.finish()
}

fn esd(
    ctx: &Context,
    dist: EsdDist,
    n: Option<usize>,
    p: usize,
    draws: Option<usize>,
    mcmc: &McmcArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if p == 0 {
        return Err(usage("--p must be positive"));
    }
    let d = &ctx.defaults.esd;
    let draws = draws.unwrap_or(d.draws);
    if draws == 0 {
        return Err(usage("--draws must be positive"));
    }
    let root_p = (p as f64).sqrt();
    let spectra: Vec<Vec<f64>> = match dist {
        EsdDist::T => {
            let n = require(n, "n")?;
            let base = McmcConfig { n_chains: d.chains, burn_in: d.burn_in, thin: d.thin, ..ctx.mcmc_base() };
            let cfg = mcmc.resolve(base);
            let per = draws.div_ceil(cfg.n_chains.max(1));
            let chains = sample_symmetric_t_spectra(n, p, &cfg, per)?;
            truncate_chains(chains, draws)
                .into_iter()
                .flatten()
                .map(|s| s.iter().map(|x| 4.0 * x / root_p).collect())
                .collect()
        }
        EsdDist::Goe => iid(draws, ctx.rng_seed(), |r| {
            Ok(sample_goe_with(p, r)?.eigenvalues()?.scaled(1.0 / root_p).values().to_vec())
        })?,
        EsdDist::Nwishart => {
            let n = require(n, "n")?;
            iid(draws, ctx.rng_seed(), |r| {
                let x = normalize_wishart(&sample_wishart_with(n, p, r)?, n);
                Ok(x.eigenvalues()?.scaled(1.0 / root_p).values().to_vec())
            })?
        }
    };
    let mut w = RowWriter::new(ESD_COLUMNS, ctx.format, out)?;
    for (i, s) in spectra.iter().enumerate() {
        w.row(vec![i.into(), esd_ks_distance(&Spectrum::from_values(s.clone())).into()])?;
    }
    let pooled: Vec<f64> = spectra.into_iter().flatten().collect();
    w.row(vec!["pooled".into(), ks_distance(&pooled, semicircle_cdf).into()])?;
    w.finish()
}

fn target_name(t: TargetArg) -> &'static str {
    match t {
        TargetArg::Psik => "psik",
        TargetArg::Psigoe => "psigoe",
    }
}

#[allow(clippy::too_many_arguments)]
fn hellinger(
    ctx: &Context,
    n: usize,
    p: usize,
    k: usize,
    samples: Option<usize>,
    target: TargetArg,
    mcmc: &McmcArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let g = GApprox::new(n, p, k)?;
    let cfg = mcmc.resolve(ctx.mcmc_base());
    let samples = samples.unwrap_or(ctx.defaults.hellinger.samples);
    let est = estimate_hellinger_sq(&g, target.into(), samples, &cfg)?;
    let mut w = RowWriter::new(HELLINGER_COLUMNS, ctx.format, out)?;
    w.row(vec![
        n.into(),
        p.into(),
        k.into(),
        target_name(target).into(),
        g.classifier().into(),
        est.mean.into(),
        est.stderr.into(),
        est.n_samples.into(),
    ])?;
    w.finish()
}

#[allow(clippy::too_many_arguments)]
fn kl_bound(
    ctx: &Context,
    n: usize,
    p: usize,
    k: usize,
    samples: Option<usize>,
    mcmc: &McmcArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let g = GApprox::new(n, p, k)?;
    let cfg = mcmc.resolve(ctx.mcmc_base());
    let samples = samples.unwrap_or(ctx.defaults.kl_bound.samples);
    let kl = estimate_kl_bound(&g, samples, &cfg)?;
    let h = estimate_hellinger_sq(&g, HellingerTarget::PsiK, samples, &cfg)?;
    let mut w = RowWriter::new(KL_COLUMNS, ctx.format, out)?;
    w.row(vec![
        n.into(),
        p.into(),
        k.into(),
        kl.bound.mean.into(),
        kl.bound.stderr.into(),
        kl.l1_norm.mean.into(),
        kl.l1_norm.stderr.into(),
        kl.mean_re.mean.into(),
        kl.mean_re.stderr.into(),
        kl.mean_abs_im.mean.into(),
        kl.mean_abs_im.stderr.into(),
        h.mean.into(),
        h.stderr.into(),
        kl.bound.n_samples.into(),
    ])?;
    w.finish()
}

fn fk_density(
    ctx: &Context,
    n: usize,
    p: usize,
    k: usize,
    xs: &[f64],
    n_z: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let g = GApprox::new(n, p, k)?;
    let n_z = n_z.unwrap_or(ctx.defaults.fk_density.n_z);
    let xs = if xs.is_empty() { vec![0.5] } else { xs.to_vec() };
    let seed = ctx.rng_seed();
    let at = |x: f64| fk_unnormalized(&SymmetricMatrix::identity(p).scale(x), &g, n_z, seed);
    let f0 = at(0.0)?;
    let mut w = RowWriter::new(FK_COLUMNS, ctx.format, out)?;
    for x in xs {
        let fx = if x == 0.0 { f0 } else { at(x)? };
        let ratio = fx.mean / f0.mean;
        let rse = ratio.abs() * ((fx.stderr / fx.mean).powi(2) + (f0.stderr / f0.mean).powi(2)).sqrt();
        w.row(vec![
            n.into(),
            p.into(),
            k.into(),
            x.into(),
            fx.mean.into(),
            fx.stderr.into(),
            ratio.into(),
            rse.into(),
            n_z.into(),
        ])?;
    }
    w.finish()
}

fn sweep(
    ctx: &Context,
    k: usize,
    gamma: Option<f64>,
    grid: &[usize],
    samples: Option<usize>,
    mcmc: &McmcArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let d = &ctx.defaults.sweep;
    if k > 2 {
        return Err(CliError::Core(Error::CapacityExceeded(format!("sweep supports K <= 2, got {}", k))));
    }
    let gamma = gamma.unwrap_or(d.gamma);
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(usage(format!("gamma must lie in (0, 1), got {}", gamma)));
    }
    let grid = if grid.is_empty() { d.n_grid.clone() } else { grid.to_vec() };
    let samples = samples.unwrap_or(d.samples);
    let cfg = mcmc.resolve(ctx.mcmc_base());
    let l2 = normalized_l2_error_sq(2)?;
    let mut w = RowWriter::new(SWEEP_COLUMNS, ctx.format, out)?;
    for n in grid {
        let p = ((n as f64).powf(gamma).round() as usize).max(1);
        let g = GApprox::new(n, p, k)?;
        let (pf, mf) = (p as f64, (n - p - 1) as f64);
        let terms = [5.0 / (pf * pf), 2.0 / mf, pf * pf / (mf * mf)];
        let exact = eval_decimal(&l2, n as i64, p as i64)?;
        let (hm, hs, status) = match estimate_hellinger_sq(&g, HellingerTarget::PsiK, samples, &cfg) {
            Ok(e) => (Cell::Float(e.mean), Cell::Float(e.stderr), "ok".to_string()),
            Err(Error::Mcmc(msg)) => (Cell::Empty, Cell::Empty, format!("mcmc-failure: {}", msg)),
            Err(e) => return Err(e.into()),
        };
        w.row(vec![
            n.into(),
            p.into(),
            k.into(),
            gamma.into(),
            g.classifier().into(),
            hm,
            hs,
            exact.into(),
            terms.iter().sum::<f64>().into(),
            terms[0].into(),
            terms[1].into(),
            terms[2].into(),
            status.into(),
        ])?;
    }
    w.finish()
}

fn zonal_dump(ctx: &Context, weight: u32, out: &mut dyn Write) -> Result<(), CliError> {
    let t = zonal_table(weight)?;
    if ctx.format == crate::Format::Json {
        writeln!(out, "{}", serde_json::to_string(&t.dump()).expect("serializable dump"))?;
        return Ok(out.flush()?);
    }
    let mut w = RowWriter::new(ZONAL_COLUMNS, ctx.format, out)?;
    let parts = t.partitions();
    for (name, m) in [("from_powersum", t.from_powersum()), ("to_powersum", t.to_powersum())] {
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                w.row(vec![
                    weight.into(),
                    name.into(),
                    parts[i].to_string().into(),
                    parts[j].to_string().into(),
                    rational_string(v).into(),
                ])?;
            }
        }
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use midscale::partitions::{parse_fraction, PolyFraction};
    use midscale::tmoments::claimed_l2_leading;

    #[test]
    fn claim_strings_match_library_forms() {
        for (i, s) in TABLE1_CLAIMS.iter().enumerate() {
            let parsed = parse_fraction(s).unwrap();
            let lib = PolyFraction::from_function(&claimed_l2_leading(i as u32 + 1).unwrap());
            assert!(parsed.cross_eq(&lib), "k={}", i + 1);
        }
    }

    #[test]
    fn power_sums_of_diagonal() {
        assert_eq!(power_sums(&[1.0, 2.0]), [3.0, 5.0, 9.0, 17.0]);
    }

    #[test]
    fn truncation_keeps_chain_order() {
        let c = truncate_chains(vec![vec![1, 2, 3], vec![4, 5, 6]], 4);
        assert_eq!(c, vec![vec![1, 2, 3], vec![4]]);
        assert_eq!(truncate_chains(vec![vec![1], vec![2]], 1), vec![vec![1]]);
    }
}
