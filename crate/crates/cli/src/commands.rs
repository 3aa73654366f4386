// SPDX-License-Identifier: Apache-2.0

use qudit_teleport::bloch::qubit_deviation;
use qudit_teleport::montecarlo::{
    deterioration_experiment, mc_estimate_fd, perturb_protocol, DeteriorationRow, MCConfig, NoiseModel,
};
use qudit_teleport::qlinalg::rng::{stream, Purpose};
use qudit_teleport::stabilizer::{
    realtime_stabilization, recover_experiment, recovery_gammas, trace_csv_records, DEConfig, TRACE_CSV_HEADER,
};
use qudit_teleport::teleport::{average_fidelity, Channel, Protocol};

use crate::args::{
    parse_grid, DeArgs, DeteriorateArgs, ProtocolArgs, RecoverArgs, ReplayArgs, StabilizeArgs, DESK_TRIALS,
    FULL_TRIALS,
};
use crate::output::{emit, CliError, Table};

fn de_config(de: &DeArgs, seed: u64) -> Result<DEConfig, CliError> {
    let cfg = DEConfig {
        n_pop: de.npop,
        weight: de.weight,
        crossover: de.crossover,
        iterations: de.iters,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn de_config_line(table: &mut Table, cfg: &DEConfig) {
    table
        .config("npop", cfg.n_pop)
        .config("weight", cfg.weight)
        .config("crossover", cfg.crossover)
        .config("iters", cfg.iterations);
}

pub fn deteriorate(a: &DeteriorateArgs) -> Result<(), CliError> {
    let ch = Channel::new(a.channel.d, a.channel.gamma().unwrap_or(1.0))?;
    let grid = match (&a.eta_grid, a.eta) {
        (Some(spec), _) => parse_grid(spec).map_err(CliError::Config)?,
        (None, Some(eta)) => vec![eta],
        (None, None) => return Err(CliError::Config("deteriorate needs --eta-grid or --eta".into())),
    };
    let trials = a.trials.unwrap_or(if a.paper_scale { FULL_TRIALS } else { DESK_TRIALS });
    let cfg = MCConfig::new(a.mc_samples, a.seed)?;
    let rows = deterioration_experiment(&ch, &grid, trials, &cfg)?;

    let mut table = Table::new(DeteriorationRow::CSV_HEADER, "deteriorate");
    table.extend(rows.iter().map(DeteriorationRow::csv_record));
    let grid_text: Vec<String> = grid.iter().map(f64::to_string).collect();
    table
        .config("d", ch.dim_d())
        .config("gamma", ch.gamma())
        .config("eta_grid", grid_text.join(";"))
        .config("trials", trials)
        .config("mc_samples", a.mc_samples)
        .config("seed", a.seed);
    emit(&table.render(), a.output.out.as_deref())
}

pub fn recover(a: &RecoverArgs) -> Result<(), CliError> {
    let gammas = match a.channel.gamma() {
        Some(g) => vec![g],
        None => recovery_gammas().to_vec(),
    };
    let channels = gammas
        .iter()
        .map(|&g| Channel::new(a.channel.d, g))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = de_config(&a.de, a.seed)?;
    let repeats = if a.paper_scale { FULL_TRIALS } else { a.repeats };
    let series = recover_experiment(&channels, &cfg, repeats)?;

    let mut table = Table::new(TRACE_CSV_HEADER, "recover");
    for s in &series {
        for (run_id, trace) in s.runs.iter().enumerate() {
            table.extend(trace_csv_records(run_id, trace, s.gamma, a.seed));
        }
    }
    let gamma_text: Vec<String> = gammas.iter().map(f64::to_string).collect();
    table.config("d", a.channel.d).config("gamma", gamma_text.join(";"));
    de_config_line(&mut table, &cfg);
    table.config("repeats", repeats).config("seed", a.seed);
    emit(&table.render(), a.output.out.as_deref())
}

pub fn stabilize(a: &StabilizeArgs) -> Result<(), CliError> {
    if ![10, 50].contains(&a.shock_period) {
        return Err(CliError::Config(format!(
            "--shock-period must be 10 or 50, got {}",
            a.shock_period
        )));
    }
    let ch = Channel::new(a.channel.d, a.channel.gamma().unwrap_or(1.0))?;
    let noise = NoiseModel::new(a.eta)?;
    let mut cfg = de_config(&a.de, a.seed)?;
    cfg.iterations = a.shock_period * a.cycles;
    let traces = realtime_stabilization(&ch, &cfg, a.shock_period, &noise, a.cycles, a.repeats)?;

    let mut table = Table::new(TRACE_CSV_HEADER, "stabilize");
    for (run_id, trace) in traces.iter().enumerate() {
        table.extend(trace_csv_records(run_id, trace, ch.gamma(), a.seed));
    }
    table.config("d", ch.dim_d()).config("gamma", ch.gamma());
    de_config_line(&mut table, &cfg);
    table
        .config("shock_period", a.shock_period)
        .config("eta", a.eta)
        .config("cycles", a.cycles)
        .config("repeats", a.repeats)
        .config("seed", a.seed);
    emit(&table.render(), a.output.out.as_deref())
}

pub fn replay(a: &ReplayArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.protocol)?;
    let proto = Protocol::from_text(&text)?;
    let gamma = a.gamma.or(a.gamma_name.map(|g| g.value())).unwrap_or(1.0);
    let ch = Channel::new(proto.dim_d(), gamma)?;
    let f = average_fidelity(&proto, &ch)?;
    let d = if proto.dim_d() == 2 {
        qubit_deviation(&proto, &ch)?.d.to_string()
    } else {
        String::new()
    };
    let mc = mc_estimate_fd(&proto, &ch, &MCConfig::new(a.mc_samples, a.seed)?)?;

    let mut table = Table::new("method,F,D,stderr_F,stderr_D,samples", "replay");
    table.push(format!("analytic,{f},{d},0,0,0"));
    table.push(format!(
        "monte_carlo,{},{},{},{},{}",
        mc.f, mc.d, mc.stderr_f, mc.stderr_d, mc.samples
    ));
    table
        .config("protocol", a.protocol.display())
        .config("d", proto.dim_d())
        .config("gamma", gamma)
        .config("mc_samples", a.mc_samples)
        .config("seed", a.seed);
    emit(&table.render(), a.output.out.as_deref())
}

pub fn protocol(a: &ProtocolArgs) -> Result<(), CliError> {
    let noise = NoiseModel::new(a.eta)?;
    let optimal = Protocol::optimal(a.d)?;
    let proto = perturb_protocol(&optimal, &noise, &mut stream(a.seed, Purpose::General, 0))?;
    let text = format!(
        "# config command=protocol d={} eta={} seed={}\n{}",
        a.d,
        a.eta,
        a.seed,
        proto.to_text()
    );
    emit(&text, a.output.out.as_deref())
}
