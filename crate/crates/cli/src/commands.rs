use std::fmt::Write as _;
use std::path::Path;

use polarrate::bdmc::{self, Channel, ChannelParams};
use polarrate::polarcode::{
    bec_z_spectrum_capped, construct_capped, construct_for_union_bound_capped, encode,
    sc_decode_bec, simulate_bler, BlerReport, CodeSpec,
};
use polarrate::scaling::{
    bootstrap_diagnostic, channel_form_capped, converse_curve, direct_curve, gnuplot_script,
    rows_to_csv, BootstrapConfig, CurveReport, Mode, ScalingConfig,
};
use polarrate::stats::trial_rng;
use polarrate::zprocess::{exact_distribution_capped, path_for_word};
use polarrate::{BranchWord, ChannelSpec, ErasureSymbol, RuleKind};
use rand::Rng;
use serde_json::json;

use crate::args::{CodeArgs, Command, ModeArg, PolarizeView, ScalingArgs};
use crate::CliError;

type Out = Result<String, CliError>;

pub fn run(cmd: &Command, out: Option<&Path>) -> Out {
    match cmd {
        Command::ChannelInfo { channel } => channel_info(channel),
        Command::Transform {
            channel,
            merge,
            merge_tol,
            max_outputs,
        } => transform(channel, *merge, *merge_tol, *max_outputs),
        Command::Spectrum { eps, n, stages } => spectrum(*eps, *n, stages.max_stages),
        Command::Construct {
            eps,
            n,
            rate,
            union_bound,
            stages,
        } => {
            let spec = match (rate, union_bound) {
                (Some(r), _) => construct_capped(*eps, *n, *r, stages.max_stages)?,
                (None, Some(b)) => {
                    construct_for_union_bound_capped(*eps, *n, *b, stages.max_stages)?
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "one of --rate or --union-bound is required".into(),
                    ))
                }
            };
            Ok(line(spec.to_json()))
        }
        Command::CodecDemo { code, seed } => codec_demo(code, *seed),
        Command::Simulate { code, trials, seed } => simulate(code, *trials, *seed),
        Command::Polarize {
            channel,
            n,
            view,
            rule,
            paths,
            seed,
            merge_tol,
            max_outputs,
            max_enum_n,
            stages,
        } => match view {
            PolarizeView::Table => {
                polarize_table(channel, *n, *merge_tol, *max_outputs, stages.max_stages)
            }
            PolarizeView::Distribution => {
                let z0 = start_value(channel)?;
                Ok(exact_distribution_capped(z0, *n, (*rule).into(), *max_enum_n)?.to_csv())
            }
            PolarizeView::Paths => polarize_paths(channel, *n, (*rule).into(), *paths, *seed),
        },
        Command::ScalingDirect(a) => scaling(a, Direction::Direct, out),
        Command::ScalingConverse(a) => scaling(a, Direction::Converse, out),
        Command::Bootstrap {
            n,
            beta,
            z0,
            trials,
            seed,
        } => {
            let cfg = BootstrapConfig::new(*n, *beta)?.with_z0(*z0);
            let report = bootstrap_diagnostic(&cfg, *trials, *seed)?;
            Ok(line(
                serde_json::to_string(&report).expect("report serializes"),
            ))
        }
    }
}

fn line(mut s: String) -> String {
    s.push('\n');
    s
}

fn params_json(p: ChannelParams) -> serde_json::Value {
    json!({"I": p.capacity, "Z": p.bhattacharyya})
}

fn channel_info(spec: &ChannelSpec) -> Out {
    let ch = spec.channel()?;
    Ok(line(params_json(ch.params()).to_string()))
}

fn channel_json(ch: &Channel) -> serde_json::Value {
    let p = ch.params();
    json!({"I": p.capacity, "Z": p.bhattacharyya, "outputs": ch.outputs()})
}

fn transform(spec: &ChannelSpec, merge: bool, tol: f64, max_outputs: usize) -> Out {
    let ch = spec.channel()?;
    let pair = if merge {
        bdmc::polar_transform_merged(&ch, tol, max_outputs)?
    } else {
        bdmc::polar_transform_capped(&ch, max_outputs)?
    };
    let v = json!({
        "channel": params_json(ch.params()),
        "minus": channel_json(&pair.minus),
        "plus": channel_json(&pair.plus),
    });
    Ok(line(v.to_string()))
}

fn spectrum(eps: f64, n: u32, max_stages: u32) -> Out {
    let z = bec_z_spectrum_capped(eps, n, max_stages)?;
    let mut s = String::from("index,z\n");
    for (i, v) in z.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    Ok(s)
}

fn build_code(code: &CodeArgs) -> Result<CodeSpec, CliError> {
    let design = code.design_eps.unwrap_or(code.eps);
    Ok(construct_capped(
        design,
        code.n,
        code.rate,
        code.stages.max_stages,
    )?)
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| char::from(b'0' + b)).collect()
}

fn codec_demo(code: &CodeArgs, seed: u64) -> Out {
    if !(0.0..=1.0).contains(&code.eps) {
        return Err(CliError::Usage(format!(
            "--eps {} is not in [0,1]",
            code.eps
        )));
    }
    let spec = build_code(code)?;
    let mut rng = trial_rng(seed, 0);
    let message: Vec<u8> = (0..spec.message_len())
        .map(|_| rng.random_range(0..2))
        .collect();
    let codeword = encode(&spec, &message)?;
    let received: Vec<ErasureSymbol> = codeword
        .iter()
        .map(|&b| {
            if rng.random_bool(code.eps) {
                ErasureSymbol::Erased
            } else {
                ErasureSymbol::from_bit(b)
            }
        })
        .collect();
    let shown: String = received
        .iter()
        .map(|s| match s {
            ErasureSymbol::Zero => '0',
            ErasureSymbol::One => '1',
            ErasureSymbol::Erased => '?',
        })
        .collect();
    let (decoded, failed_at) = match sc_decode_bec(&spec, &received)? {
        Ok(m) => (Some(bit_string(&m)), None),
        Err(f) => (None, Some(f.index)),
    };
    let v = json!({
        "seed": seed,
        "n": spec.n(),
        "eps": code.eps,
        "rate": spec.rate(),
        "info_set": spec.info_set(),
        "message": bit_string(&message),
        "codeword": bit_string(&codeword),
        "received": shown,
        "erasures": received.iter().filter(|s| **s == ErasureSymbol::Erased).count(),
        "decoded": decoded,
        "success": decoded.as_deref() == Some(bit_string(&message).as_str()),
        "failed_at": failed_at,
    });
    Ok(line(v.to_string()))
}

fn simulate(code: &CodeArgs, trials: u64, seed: u64) -> Out {
    let spec = build_code(code)?;
    let report = simulate_bler(&spec, code.eps, trials, seed)?;
    let mut s = format!(
        "# seed={seed} eps={} n={} rate={} union_bound={}\n",
        code.eps,
        code.n,
        spec.rate(),
        spec.union_bound()
    );
    s.push_str(BlerReport::CSV_HEADER);
    s.push('\n');
    s.push_str(&report.csv_row());
    s.push('\n');
    Ok(s)
}

fn start_value(spec: &ChannelSpec) -> Result<f64, CliError> {
    Ok(spec.channel()?.params().bhattacharyya)
}

fn polarize_table(
    spec: &ChannelSpec,
    n: u32,
    tol: f64,
    max_outputs: usize,
    max_stages: u32,
) -> Out {
    let mut s = String::from("index,word,I,Z\n");
    let word = |i: usize| -> String {
        BranchWord::from_index(i as u64, n)
            .bits()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    };
    if let Some(eps) = spec.erasure_probability() {
        for (i, z) in bec_z_spectrum_capped(eps, n, max_stages)?
            .iter()
            .enumerate()
        {
            let _ = writeln!(s, "{i},{},{},{z}", word(i), 1.0 - z);
        }
    } else {
        let ch = spec.channel()?;
        for (i, c) in bdmc::synthesized_channels(&ch, n, tol, max_outputs)?
            .iter()
            .enumerate()
        {
            let p = c.params();
            let _ = writeln!(s, "{i},{},{},{}", word(i), p.capacity, p.bhattacharyya);
        }
    }
    Ok(s)
}

fn polarize_paths(spec: &ChannelSpec, n: u32, rule: RuleKind, paths: u64, seed: u64) -> Out {
    let z0 = start_value(spec)?;
    let mut s = format!("# seed={seed} z0={z0} rule={rule}\npath,step,bit,z,log2_z\n");
    for k in 0..paths {
        let mut rng = trial_rng(seed, k);
        let word = BranchWord::random(&mut rng, n);
        let states = path_for_word(z0, &word, rule)?;
        for (i, st) in states.iter().enumerate() {
            let bit = if i == 0 {
                String::new()
            } else {
                (word.bits()[i - 1] as u8).to_string()
            };
            let _ = writeln!(s, "{k},{i},{bit},{},{}", st.value(), st.log2_z());
        }
    }
    Ok(s)
}

#[derive(Clone, Copy)]
enum Direction {
    Direct,
    Converse,
}

fn scaling(a: &ScalingArgs, dir: Direction, out: Option<&Path>) -> Out {
    if a.gnuplot && out.is_none() {
        return Err(CliError::Usage(
            "--gnuplot needs --out to name the CSV".into(),
        ));
    }
    let (csv, title, header_lines) = match &a.channel {
        Some(spec) => {
            if let Direction::Converse = dir {
                return Err(CliError::Usage(
                    "--channel is only supported by scaling-direct".into(),
                ));
            }
            let mut rows = Vec::new();
            for &beta in &a.beta {
                let report = channel_form_capped(spec, beta, &a.n, a.max_enum_n)?;
                for st in report.stages.iter().filter(|st| !st.iz_inequalities_hold) {
                    eprintln!("note: I/Z inequalities fail at n={}", st.n);
                }
                rows.extend(report.rows);
            }
            (
                rows_to_csv(&rows),
                format!("P(Z_n <= 2^-N^beta), {spec}"),
                1,
            )
        }
        None => {
            let mode = match a.mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::MonteCarlo => Mode::MonteCarlo,
            };
            let rule: RuleKind = a.rule.into();
            let mut cfg = ScalingConfig::new(a.z0, a.beta.clone(), a.n.clone(), mode)
                .with_rule(rule)
                .with_trials(a.trials, a.seed);
            cfg.max_enum_n = a.max_enum_n;
            cfg.validate()?;
            let report: CurveReport = match dir {
                Direction::Direct => direct_curve(&cfg)?,
                Direction::Converse => converse_curve(&cfg)?,
            };
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            let (mut csv, mut skip) = (String::new(), 1);
            if mode == Mode::MonteCarlo {
                let _ = writeln!(csv, "# seed={} trials={}", a.seed, a.trials);
                skip += 1;
            }
            csv.push_str(&report.to_csv());
            let what = match dir {
                Direction::Direct => "P(Z_n <= 2^-2^(beta n))",
                Direction::Converse => "P(Z_n >= 2^-2^(beta n))",
            };
            (csv, format!("{what}, {rule}, z0={}", a.z0), skip)
        }
    };
    if a.gnuplot {
        let path = out.expect("checked above");
        let script = gnuplot_script(&path.display().to_string(), &title, &a.beta, header_lines);
        std::fs::write(path.with_extension("gp"), script)?;
    }
    Ok(csv)
}
