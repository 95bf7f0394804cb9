use std::fs;
use std::path::{Path, PathBuf};

use microcavity::config::Config;
use microcavity::fiber::{derive, design_to_cavity, FiberCavityDesign};
use microcavity::homodyne::{homodyne_report, HomodyneReport};
use microcavity::motion::spatial_averages;
use microcavity::params::{cooperativity, AtomParams, CavityParams, DriveParams};
use microcavity::resonant::{intensity_contrast, output_photons, saturation_pump, ResonantReport};
use microcavity::simulation::{run_ensemble, run_ensemble_with_records, SimConfig};
use microcavity::steady_state::{empty_cavity_state, solve_stationary, stationary_photon_roots};
use microcavity::units::{mhz, to_mhz};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{emit, sha256_hex, to_json, Cell, Meta, Table, VERSION};
use crate::scan::{ScanSpec, ScanVar};
use crate::{DesignArgs, Failure, SimulateArgs};

struct Loaded {
    config: Config,
    atom: AtomParams,
    cavity: CavityParams,
    drive: DriveParams,
    meta: Meta,
}

fn load(path: &Path, command: &str, seed: u64) -> Result<Loaded, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let config = Config::load(path)?;
    Ok(Loaded {
        atom: config.atom()?,
        cavity: config.cavity()?,
        drive: config.drive()?,
        config,
        meta: Meta {
            command: command.to_string(),
            version: VERSION,
            config_sha256: sha256_hex(&bytes),
            seed,
        },
    })
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    emit(path, text).map_err(|e| Failure::config(format!("cannot write output: {e}")))
}

/// Prints the one-line summary where it does not mix with data on stdout.
fn summary(to_file: bool, line: String) {
    if to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

/// Four decades of pump around `centre`, 200 points.
fn default_pump_scan(centre_per_s: f64, fallback_per_s: f64) -> ScanSpec {
    let c = if centre_per_s.is_finite() && centre_per_s > 0.0 { centre_per_s } else { fallback_per_s };
    let c = c * 1e-6;
    ScanSpec::log_j_in(c / 100.0, c * 100.0, 200)
}

fn allow(spec: &ScanSpec, vars: &[ScanVar]) -> Result<(), Failure> {
    if vars.contains(&spec.var) {
        Ok(())
    } else {
        Err(Failure::config(format!("this command cannot scan `{}`", spec.var.column())))
    }
}

#[derive(Serialize)]
struct SteadyRecord {
    #[serde(flatten)]
    meta: Meta,
    n_photons: f64,
    roots: Vec<f64>,
    branch_count: usize,
    ill_conditioned: bool,
    alpha: [f64; 2],
    rho11: f64,
    saturation: f64,
    cooperativity: f64,
    gamma_eff_mhz: f64,
    light_shift_mhz: f64,
    n_photons_empty: f64,
    n_out_empty: f64,
    n_out_atom: f64,
    contrast_snr: f64,
    m_scattered: f64,
}

pub fn steady(config: &Path, out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let l = load(config, "steady", seed)?;
    let (a, c, d) = (&l.atom, &l.cavity, &l.drive);
    let roots = stationary_photon_roots(a, c, d, c.g_max)?;
    let s = solve_stationary(a, c, d, c.g_max)?;
    let empty = empty_cavity_state(c, d);
    let r = intensity_contrast(a, c, d)?;
    let rec = SteadyRecord {
        meta: l.meta,
        n_photons: s.n_photons,
        roots: roots.roots,
        branch_count: s.branch_count,
        ill_conditioned: s.ill_conditioned,
        alpha: [s.alpha.re, s.alpha.im],
        rho11: s.rho11,
        saturation: s.saturation,
        cooperativity: cooperativity(a, c),
        gamma_eff_mhz: to_mhz(s.gamma_eff),
        light_shift_mhz: to_mhz(s.light_shift),
        n_photons_empty: empty.n_photons,
        n_out_empty: output_photons(&empty, c, d),
        n_out_atom: output_photons(&s, c, d),
        contrast_snr: r.snr,
        m_scattered: r.m_scattered,
    };
    write(out, &to_json(&rec))?;
    summary(
        out.is_some(),
        format!(
            "steady: N = {:.6e} ({} branch(es)), rho11 = {:.4e}, S = {:.4}, M = {:.4}",
            rec.n_photons, rec.branch_count, rec.rho11, rec.contrast_snr, rec.m_scattered
        ),
    );
    Ok(())
}

/// Evaluates `f` on every grid value in parallel, keeping grid order.
fn sweep<T: Send>(
    spec: &ScanSpec,
    l: &Loaded,
    f: impl Fn(&AtomParams, &CavityParams, &DriveParams) -> microcavity::Result<T> + Sync,
) -> Result<Vec<(f64, DriveParams, T)>, Failure> {
    let rows = spec
        .values()
        .into_par_iter()
        .map(|v| {
            let (a, c, d) = spec.apply(v, &l.atom, &l.cavity, &l.drive);
            f(&a, &c, &d).map(|t| (v, d, t))
        })
        .collect::<microcavity::Result<Vec<_>>>()?;
    Ok(rows)
}

fn columns<'a>(spec: &ScanSpec, rest: &[&'a str]) -> Vec<&'a str> {
    let mut cols = vec![ScanVar::JIn.column()];
    if spec.var != ScanVar::JIn {
        cols.insert(0, spec.var.column());
    }
    cols.extend_from_slice(rest);
    cols
}

fn lead(spec: &ScanSpec, value: f64, d: &DriveParams) -> Vec<Cell> {
    let mut cells = vec![Cell::F(d.j_in * 1e-6)];
    if spec.var != ScanVar::JIn {
        cells.insert(0, Cell::F(value));
    }
    cells
}

pub fn scan_pump(config: &Path, scan: Option<ScanSpec>, out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let l = load(config, "scan-pump", seed)?;
    let centre = saturation_pump(&l.atom, &l.cavity) * (1.0 + cooperativity(&l.atom, &l.cavity));
    let spec = scan.unwrap_or_else(|| default_pump_scan(centre, l.drive.j_in));
    allow(&spec, &[ScanVar::JIn, ScanVar::KappaT, ScanVar::KappaLoss, ScanVar::DeltaA])?;
    let rows = sweep(&spec, &l, intensity_contrast)?;
    let mut t = Table::new(
        &l.meta,
        &columns(
            &spec,
            &["N_out_empty [photons]", "N_out_atom [photons]", "S [dimensionless]", "M [photons]", "saturation [dimensionless]"],
        ),
    );
    t.note("scan", spec);
    t.note("tau_us", l.drive.tau * 1e6);
    for (v, d, r) in &rows {
        let ResonantReport { n_out_empty, n_out_atom, snr, m_scattered, saturation } = *r;
        let mut cells = lead(&spec, *v, d);
        cells.extend([Cell::F(n_out_empty), Cell::F(n_out_atom), Cell::F(snr), Cell::F(m_scattered), Cell::F(saturation)]);
        t.row(&cells);
    }
    write(out, &t.render())?;
    let best = rows.iter().max_by(|a, b| a.2.snr.total_cmp(&b.2.snr)).expect("at least two rows");
    summary(
        out.is_some(),
        format!(
            "scan-pump: {} rows, max S = {:.4} at j_in = {:.4e}/us (M = {:.4})",
            rows.len(),
            best.2.snr,
            best.1.j_in * 1e-6,
            best.2.m_scattered
        ),
    );
    Ok(())
}

pub fn homodyne_scan(config: &Path, scan: Option<ScanSpec>, out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let l = load(config, "homodyne-scan", seed)?;
    let detuned = 1.0 + (l.atom.delta_a / l.atom.gamma).powi(2);
    let spec = scan.unwrap_or_else(|| default_pump_scan(saturation_pump(&l.atom, &l.cavity) * detuned, l.drive.j_in));
    allow(&spec, &[ScanVar::JIn, ScanVar::KappaT, ScanVar::KappaLoss, ScanVar::DeltaA])?;
    let rows = sweep(&spec, &l, homodyne_report)?;
    let mut t = Table::new(
        &l.meta,
        &columns(
            &spec,
            &[
                "phi [rad]",
                "S_hom [dimensionless]",
                "M [photons]",
                "N_out [photons]",
                "N_out_empty [photons]",
                "saturation [dimensionless]",
                "small_angle_valid [bool]",
            ],
        ),
    );
    t.note("scan", spec);
    t.note("tau_us", l.drive.tau * 1e6);
    for (v, d, h) in &rows {
        let HomodyneReport { phase_shift, snr, n_out, n_out_empty, m_scattered, saturation, small_angle_valid } = *h;
        let mut cells = lead(&spec, *v, d);
        cells.extend([
            Cell::F(phase_shift),
            Cell::F(snr),
            Cell::F(m_scattered),
            Cell::F(n_out),
            Cell::F(n_out_empty),
            Cell::F(saturation),
            Cell::B(small_angle_valid),
        ]);
        t.row(&cells);
    }
    write(out, &t.render())?;
    let best = rows.iter().max_by(|a, b| a.2.snr.total_cmp(&b.2.snr)).expect("at least two rows");
    summary(
        out.is_some(),
        format!(
            "homodyne-scan: {} rows, max S_hom = {:.4} at j_in = {:.4e}/us (phi = {:.4} rad, M = {:.4})",
            rows.len(),
            best.2.snr,
            best.1.j_in * 1e-6,
            best.2.phase_shift,
            best.2.m_scattered
        ),
    );
    Ok(())
}

pub fn motion_averages(config: &Path, scan: Option<ScanSpec>, out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let l = load(config, "motion-averages", seed)?;
    let spec = scan.unwrap_or_else(|| default_pump_scan(saturation_pump(&l.atom, &l.cavity), l.drive.j_in));
    allow(&spec, &[ScanVar::JIn, ScanVar::KappaT, ScanVar::KappaLoss])?;
    let rows = sweep(&spec, &l, |a, c, d| Ok(spatial_averages(a, c, d)))?;
    let mut t = Table::new(
        &l.meta,
        &columns(
            &spec,
            &[
                "S_bar [dimensionless]",
                "M_bar [photons]",
                "delta_p [hbar k]",
                "delta_z [nm]",
                "saturation [dimensionless]",
                "weak_saturation_violated [bool]",
            ],
        ),
    );
    t.note("scan", spec);
    t.note("tau_us", l.drive.tau * 1e6);
    let mut violated = 0;
    for (v, d, m) in &rows {
        violated += m.weak_saturation_violated as usize;
        let mut cells = lead(&spec, *v, d);
        cells.extend([
            Cell::F(m.s_bar),
            Cell::F(m.m_bar),
            Cell::F(m.delta_p),
            Cell::F(m.delta_z * 1e9),
            Cell::F(m.saturation),
            Cell::B(m.weak_saturation_violated),
        ]);
        t.row(&cells);
    }
    write(out, &t.render())?;
    summary(
        out.is_some(),
        format!("motion-averages: {} rows, {violated} beyond weak saturation", rows.len()),
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    #[serde(flatten)]
    meta: Meta,
    efficiency: f64,
    dark_rate_per_s: f64,
    dark_rate_ci_per_s: [f64; 2],
    dark_events: usize,
    dark_time_s: f64,
    mean_m: f64,
    m_std_err: f64,
    n_atoms: usize,
    threshold: u32,
    window_us: f64,
    stride_us: f64,
    include_recoil: bool,
    quasi_static_violations: usize,
    config: Config,
}

fn sim_config(l: &Loaded, args: &SimulateArgs, seed: u64) -> SimConfig {
    let mut cfg = l.config.sim_config();
    cfg.seed = seed;
    if let Some(n) = args.atoms {
        cfg.n_atoms = n;
    }
    if let Some(th) = args.threshold {
        cfg.threshold = th;
    }
    if let Some(w) = args.window_us {
        cfg.window = w * 1e-6;
        let explicit_stride = l.config.simulation.as_ref().and_then(|s| s.stride_us).is_some();
        if !explicit_stride {
            cfg.stride = cfg.window / 2.0;
        }
    }
    if args.no_recoil {
        cfg.include_recoil = false;
    }
    cfg
}

pub fn simulate(args: &SimulateArgs, seed: u64) -> Result<(), Failure> {
    let l = load(&args.config, "simulate", seed)?;
    let cfg = sim_config(&l, args, seed);
    let guide = l.config.guide();
    if let Some(spec) = &args.scan {
        allow(spec, &[ScanVar::Threshold])?;
    }
    fs::create_dir_all(&args.out).map_err(|e| Failure::config(format!("{}: {e}", args.out.display())))?;
    let (report, records) = run_ensemble_with_records(&l.atom, &l.cavity, &l.drive, &guide, &cfg)?;

    let every = args.trajectory_every.max(1);
    let mut traj = Table::new(&l.meta, &["trajectory [index]", "t [us]", "x [um]", "y [um]", "z [um]", "N [photons]"]);
    traj.note("decimation", every);
    let mut clicks = Table::new(&l.meta, &["trajectory [index]", "t [us]"]);
    let mut windows = Table::new(&l.meta, &["trajectory [index]", "t_end [us]", "count [clicks]"]);
    windows.note("window_us", cfg.window * 1e6);
    windows.note("stride_us", cfg.stride * 1e6);
    for (i, rec) in records.iter().enumerate() {
        for k in (0..rec.times.len()).step_by(every) {
            let p = rec.positions[k];
            traj.row(&[
                Cell::I(i as i64),
                Cell::F(rec.times[k] * 1e6),
                Cell::F(p[0] * 1e6),
                Cell::F(p[1] * 1e6),
                Cell::F(p[2] * 1e6),
                Cell::F(rec.n_photons[k]),
            ]);
        }
        for &t in &rec.click_times {
            clicks.row(&[Cell::I(i as i64), Cell::F(t * 1e6)]);
        }
        for (&t, &c) in rec.windowed.times.iter().zip(&rec.windowed.counts) {
            windows.row(&[Cell::I(i as i64), Cell::F(t * 1e6), Cell::I(c as i64)]);
        }
    }
    let out = |name: &str| -> PathBuf { args.out.join(name) };
    write(Some(&out("trajectories.csv")), &traj.render())?;
    write(Some(&out("clicks.csv")), &clicks.render())?;
    write(Some(&out("windows.csv")), &windows.render())?;

    if let Some(spec) = &args.scan {
        let mut t = Table::new(
            &l.meta,
            &["threshold [counts]", "efficiency [fraction]", "dark_rate [1/s]", "dark_rate_lo [1/s]", "dark_rate_hi [1/s]", "mean_M [photons]"],
        );
        t.note("scan", spec);
        for th in spec.values() {
            let r = run_ensemble(&l.atom, &l.cavity, &l.drive, &guide, &SimConfig { threshold: th as u32, ..cfg })?;
            t.row(&[
                Cell::I(th as i64),
                Cell::F(r.efficiency),
                Cell::F(r.dark_rate),
                Cell::F(r.dark_rate_ci[0]),
                Cell::F(r.dark_rate_ci[1]),
                Cell::F(r.mean_m),
            ]);
        }
        write(Some(&out("threshold_scan.csv")), &t.render())?;
    }

    let json = SimulateReport {
        meta: l.meta,
        efficiency: report.efficiency,
        dark_rate_per_s: report.dark_rate,
        dark_rate_ci_per_s: report.dark_rate_ci,
        dark_events: report.dark_events,
        dark_time_s: report.dark_time,
        mean_m: report.mean_m,
        m_std_err: report.m_std_err,
        n_atoms: report.n_atoms,
        threshold: report.threshold,
        window_us: cfg.window * 1e6,
        stride_us: cfg.stride * 1e6,
        include_recoil: report.include_recoil,
        quasi_static_violations: report.quasi_static_violations,
        config: l.config,
    };
    write(Some(&out("report.json")), &to_json(&json))?;
    println!(
        "simulate: {} atoms, efficiency {:.3}, dark rate {:.0}/s [{:.0}, {:.0}], mean M {:.2} -> {}",
        json.n_atoms,
        json.efficiency,
        json.dark_rate_per_s,
        json.dark_rate_ci_per_s[0],
        json.dark_rate_ci_per_s[1],
        json.mean_m,
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct BridgedCavity {
    g_mhz: f64,
    kappa_t_mhz: f64,
    kappa_loss_mhz: f64,
    delta_c_mhz: f64,
    waist_um: f64,
    length_mm: f64,
    asymmetric_input: bool,
}

#[derive(Serialize)]
struct DesignRecord {
    #[serde(flatten)]
    meta: Meta,
    design: FiberCavityDesign,
    v_number: f64,
    waist_um: f64,
    rayleigh_um: f64,
    gap_um: f64,
    mode_index: Option<i64>,
    q_modulus: f64,
    q_phase_rad: f64,
    kappa_gap_mhz: f64,
    kappa_t_mhz: f64,
    g_mhz: f64,
    gap_amplitude_ratio: f64,
    cavity: BridgedCavity,
}

pub fn design_cavity(args: &DesignArgs, seed: u64) -> Result<(), Failure> {
    let a = args.core_um * 0.5e-6;
    let lambda = args.lambda_nm * 1e-9;
    let mut design = match (args.length_mm, args.length_half_waves) {
        (_, Some(hw)) => FiberCavityDesign::from_half_waves(hw, a, args.n_core, args.n_clad, lambda, args.transmission),
        (Some(l), None) => FiberCavityDesign {
            fiber_length: l * 1e-3,
            ..FiberCavityDesign::from_half_waves(1.0, a, args.n_core, args.n_clad, lambda, args.transmission)
        },
        (None, None) => return Err(Failure::config("one of --length-mm or --length-half-waves is required")),
    };
    design.validate()?;
    design = match (args.mode_index, args.gap_um) {
        (_, Some(gap)) => design.with_half_gap(gap * 0.5e-6),
        (Some(m), None) => design.with_mode_index(m),
        (None, None) => return Err(Failure::config("one of --mode-index or --gap-um is required")),
    };
    if design.half_gap < 0.0 {
        return Err(Failure::config(format!(
            "mode index {} has no non-negative gap for this fiber length",
            args.mode_index.unwrap_or_default()
        )));
    }
    // The atom only enters through its wavelength.
    let atom = AtomParams { wavelength: lambda, ..AtomParams::rubidium() };
    let d = derive(&design, &atom)?;
    let c = design_to_cavity(&design, &atom, mhz(args.extra_loss_mhz))?;
    let meta = Meta {
        command: "design-cavity".into(),
        version: VERSION,
        config_sha256: sha256_hex(serde_json::to_string(&design).expect("serializable").as_bytes()),
        seed,
    };
    let rec = DesignRecord {
        meta,
        design,
        v_number: d.v_number,
        waist_um: d.waist * 1e6,
        rayleigh_um: d.rayleigh * 1e6,
        gap_um: 2.0 * design.half_gap * 1e6,
        mode_index: d.mode_index,
        q_modulus: d.q_modulus,
        q_phase_rad: d.q_phase,
        kappa_gap_mhz: to_mhz(d.kappa_gap),
        kappa_t_mhz: to_mhz(d.kappa_t),
        g_mhz: to_mhz(d.g_max),
        gap_amplitude_ratio: d.gap_amplitude_ratio,
        cavity: BridgedCavity {
            g_mhz: to_mhz(c.g_max),
            kappa_t_mhz: to_mhz(c.kappa_t),
            kappa_loss_mhz: to_mhz(c.kappa_loss),
            delta_c_mhz: to_mhz(c.delta_c),
            waist_um: c.waist * 1e6,
            length_mm: c.length * 1e3,
            asymmetric_input: c.asymmetric_input,
        },
    };
    write(args.out.as_deref(), &to_json(&rec))?;
    summary(
        args.out.is_some(),
        format!(
            "design-cavity: gap {:.4} um, w0 {:.3} um, kappa_gap {:.3} MHz, kappa_T {:.3} MHz, g {:.3} MHz (x 2pi)",
            rec.gap_um, rec.waist_um, rec.kappa_gap_mhz, rec.kappa_t_mhz, rec.g_mhz
        ),
    );
    Ok(())
}
