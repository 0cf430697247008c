use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use anyhow::{bail, Context, Result};
use canosc::entire::{
    diagonal_transfer_matrix, h2_membership_integral, order_bound_check, type_fit, FitParams, HadamardFamily, C64,
};
use canosc::pruefer::integrate;
use canosc::spectra::{
    classify_profile, classify_semibounded, classify_wholeline, count_bounded, ess_spectrum_bounds, halfline_count,
    locate_eigenvalues, m_endpoints, m_halfline_real, zero_eigenvalue_check, Classification, Count, CountResult,
    HalflineParams, SpectraError, SpectralWindow, TailModel, Witness,
};
use canosc::transforms::{
    canonical_to_diagonal, geometric_grid, molchanov_classic, molchanov_new, schrodinger_to_canonical,
    DiagonalOptions, SchrodingerProblem, TransformError,
};
use canosc::{Execution, PhiProfile, Tail};

use crate::config::{invalid, load_potential, load_system, SystemConfig};
use crate::output::{float, write_csv, Document};
use crate::{Boundary, Cli, Command, Global};

pub struct Outcome {
    pub document: Document,
    pub inconclusive: bool,
}

impl From<Document> for Outcome {
    fn from(document: Document) -> Self {
        Self {
            document,
            inconclusive: false,
        }
    }
}

fn exec(g: &Global) -> Execution {
    if g.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn angle(g: &Global, a: f64) -> f64 {
    if g.degrees {
        a.to_radians()
    } else {
        a
    }
}

fn csv(g: &Global, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    match &g.csv {
        Some(path) => write_csv(path, header, rows),
        None => Ok(()),
    }
}

fn phi_csv(g: &Global, phi: &PhiProfile) -> Result<()> {
    csv(g, &["x", "phi"], phi.breakpoints().into_iter().map(|(x, p)| vec![x, p]))
}

fn echo_system(doc: &mut Document, path: &Path, c: &SystemConfig) {
    doc.input("config", path.display().to_string())
        .input("segments", c.hamiltonian.segments().len())
        .input("length", c.hamiltonian.length());
    if let Tail::SingularHalfLine(g) = c.hamiltonian.tail() {
        doc.input("tail_gamma", g);
    }
    if let Some(v) = c.phi_infinity {
        doc.input("phi_infinity", v);
    }
    doc.input("integration_tol", c.tolerances.integration)
        .input("rank_one_tol", c.tolerances.rank_one)
        .input("rescale_trace", c.normalization.rescale_trace);
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(format!("--{name} must be positive, got {x}")))
    }
}

struct Resolved {
    l: f64,
    beta: f64,
    window: SpectralWindow,
    tol: f64,
}

fn resolve(g: &Global, c: &SystemConfig, b: &Boundary) -> Result<Resolved> {
    let h = &c.hamiltonian;
    let l = b.l.unwrap_or(h.length());
    if !(l > 0.0 && l <= h.length()) {
        bail!(invalid(format!("--L {l} outside (0, {}]", h.length())));
    }
    let beta = match (b.beta, h.tail()) {
        (Some(v), _) => angle(g, v),
        (None, Tail::SingularHalfLine(gamma)) => (gamma + FRAC_PI_2).rem_euclid(PI),
        (None, Tail::None) => bail!(invalid("--beta is required for a system without a tail")),
    };
    let window = SpectralWindow::half_open(b.window[0], b.window[1]).map_err(|e| invalid(e.to_string()))?;
    let tol = positive("tol", b.tol.unwrap_or(c.tolerances.integration))?;
    Ok(Resolved { l, beta, window, tol })
}

fn count_fields(doc: &mut Document, r: &CountResult) {
    match r.count {
        Count::Finite(n) => doc.result("count", n),
        Count::Divergent => doc.result("count", "divergent"),
    };
    doc.result("l_used", r.l_used)
        .result("theta_s", r.theta_s)
        .result("theta_t", r.theta_t)
        .cert("certified", r.certified)
        .cert("err_bound", r.err_bound);
    if !r.trace.is_empty() {
        doc.result("trace", r.trace.clone());
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate(s) => {
            let c = load_system(&s.config, g.degrees)?;
            let mut doc = Document::new("validate");
            echo_system(&mut doc, &s.config, &c);
            doc.result("valid", true)
                .result("piecewise_constant", c.hamiltonian.is_piecewise_constant())
                .result("rank_one", c.phi().is_ok());
            Ok(doc.into())
        }
        Command::Theta { system, t, theta0, l, tol } => {
            let c = load_system(&system.config, g.degrees)?;
            let h = &c.hamiltonian;
            let l = l.unwrap_or(h.length());
            if !(l > 0.0 && l <= h.length()) {
                bail!(invalid(format!("--L {l} outside (0, {}]", h.length())));
            }
            let tol = positive("tol", tol.unwrap_or(c.tolerances.integration))?;
            let theta0 = angle(g, *theta0);
            let tr = integrate(h, *t, theta0, l, tol)?;
            let mut doc = Document::new("theta");
            echo_system(&mut doc, &system.config, &c);
            doc.input("t", *t).input("theta0", theta0).input("L", l).input("tol", tol);
            doc.result("theta", tr.final_theta())
                .result("samples", tr.samples.len())
                .cert("err_bound", tr.err_bound);
            csv(g, &["x", "theta"], tr.samples.iter().map(|&(x, th)| vec![x, th]))?;
            Ok(doc.into())
        }
        Command::Count { system, boundary, halfline, schedule, threshold } => {
            let c = load_system(&system.config, g.degrees)?;
            let h = &c.hamiltonian;
            let mut doc = Document::new("count");
            echo_system(&mut doc, &system.config, &c);
            if *halfline {
                let (s, t) = (boundary.window[0], boundary.window[1]);
                let sched = schedule
                    .clone()
                    .unwrap_or_else(|| (1..=8).map(|k| h.length() * k as f64 / 8.0).collect());
                let tol = positive("tol", boundary.tol.unwrap_or(c.tolerances.integration))?;
                doc.input("window", vec![s, t])
                    .input("schedule", sched.clone())
                    .input("threshold", *threshold)
                    .input("tol", tol);
                let params = HalflineParams {
                    schedule: sched,
                    tol,
                    divergence_threshold: *threshold,
                };
                return match halfline_count(h, s, t, &params) {
                    Ok(r) => {
                        count_fields(&mut doc, &r);
                        csv(g, &["L", "F"], r.trace.iter().map(|&(l, f)| vec![l, f]))?;
                        Ok(doc.into())
                    }
                    Err(SpectraError::Inconclusive { trace }) => {
                        doc.result("count", "inconclusive")
                            .result("trace", trace.clone())
                            .cert("certified", false)
                            .warn("F(L) did not stabilize along the schedule");
                        csv(g, &["L", "F"], trace.iter().map(|&(l, f)| vec![l, f]))?;
                        Ok(Outcome {
                            document: doc,
                            inconclusive: true,
                        })
                    }
                    Err(e @ (SpectraError::BadParameter(_) | SpectraError::Window(_))) => Err(invalid(e.to_string())),
                    Err(e) => Err(e.into()),
                };
            }
            let r = resolve(g, &c, boundary)?;
            doc.input("L", r.l)
                .input("beta", r.beta)
                .input("window", vec![r.window.s, r.window.t])
                .input("tol", r.tol);
            let res = count_bounded(h, r.l, r.beta, &r.window, r.tol)?;
            count_fields(&mut doc, &res);
            Ok(Outcome {
                inconclusive: !res.certified,
                document: doc,
            })
        }
        Command::Locate { system, boundary } => {
            let c = load_system(&system.config, g.degrees)?;
            let r = resolve(g, &c, boundary)?;
            let ev = locate_eigenvalues(&c.hamiltonian, r.l, r.beta, &r.window, r.tol, exec(g))?;
            let mut doc = Document::new("locate");
            echo_system(&mut doc, &system.config, &c);
            doc.input("L", r.l)
                .input("beta", r.beta)
                .input("window", vec![r.window.s, r.window.t])
                .input("tol", r.tol);
            doc.result("count", ev.len()).result("eigenvalues", ev.clone());
            csv(g, &["index", "lambda"], ev.iter().enumerate().map(|(i, &x)| vec![i as f64, x]))?;
            Ok(doc.into())
        }
        Command::Classify(s) => {
            let c = load_system(&s.config, g.degrees)?;
            let class = match c.phi_infinity {
                Some(_) => match c.phi() {
                    Ok(phi) => classify_profile(&phi),
                    Err(_) => classify_semibounded(&c.hamiltonian, c.tolerances.rank_one)?,
                },
                None => classify_semibounded(&c.hamiltonian, c.tolerances.rank_one)?,
            };
            let mut doc = Document::new("classify");
            echo_system(&mut doc, &s.config, &c);
            doc.result("classification", class.label());
            match &class {
                Classification::InCPlus(phi) | Classification::NegEigsAtMost { phi, .. } => {
                    if let Classification::NegEigsAtMost { n, .. } = class {
                        doc.result("max_negative_eigenvalues", n);
                    }
                    doc.result("phi_start", phi.start())
                        .result("phi_infinity", phi.phi_infinity())
                        .result("total_drop", phi.total_drop());
                    phi_csv(g, phi)?;
                }
                Classification::NotSemibounded(Witness::Determinant { segment, det }) => {
                    doc.result("witness", "determinant")
                        .result("segment", *segment)
                        .result("det", *det);
                }
                Classification::NotSemibounded(Witness::Increasing { a, b }) => {
                    doc.result("witness", "increasing")
                        .result("from", vec![a.0, a.1])
                        .result("to", vec![b.0, b.1]);
                }
            }
            Ok(doc.into())
        }
        Command::Wholeline { left, right } => {
            let (lc, rc) = (load_system(left, g.degrees)?, load_system(right, g.degrees)?);
            let w = classify_wholeline(&lc.phi()?, &rc.phi()?)?;
            let mut doc = Document::new("wholeline");
            doc.input("left", left.display().to_string())
                .input("right", right.display().to_string());
            doc.result("total_drop", w.total_drop).result("semibounded", w.semibounded);
            Ok(doc.into())
        }
        Command::EssBounds { system, tail_fraction } => {
            let c = load_system(&system.config, g.degrees)?;
            if !(*tail_fraction > 0.0 && *tail_fraction < 1.0) {
                bail!(invalid("--tail-fraction must lie in (0, 1)"));
            }
            let phi = c.phi()?;
            let b = ess_spectrum_bounds(&phi, *tail_fraction)?;
            let mut doc = Document::new("ess-bounds");
            echo_system(&mut doc, &system.config, &c);
            doc.input("tail_fraction", *tail_fraction);
            doc.result("a", b.a)
                .result("b", b.b)
                .result("lower", b.lower)
                .result("upper", b.upper)
                .result("tail_window", vec![b.tail_window.0, b.tail_window.1])
                .result("sup_g", b.sup_g)
                .result("inf_g", b.inf_g)
                .result("log_slope", b.log_slope)
                .result("verdict", format!("{:?}", b.verdict))
                .warn_all(&b.warnings);
            phi_csv(g, &phi)?;
            Ok(doc.into())
        }
        Command::MEndpoints { system, at } => {
            let c = load_system(&system.config, g.degrees)?;
            let phi = c.phi()?;
            let (m_inf, m_zero) = m_endpoints(&phi);
            let mut doc = Document::new("m-endpoints");
            echo_system(&mut doc, &system.config, &c);
            doc.result("m_minus_infinity", m_inf).result("m_zero", m_zero);
            if let Some(points) = at {
                doc.input("at", points.clone());
                let mut values = Vec::with_capacity(points.len());
                for &t in points {
                    if !(t < 0.0) {
                        bail!(invalid(format!("--at values must be negative, got {t}")));
                    }
                    let h = &c.hamiltonian;
                    values.push((t, m_halfline_real(h, t, h.length(), c.tolerances.integration)?));
                }
                doc.result("m_values", values);
            }
            phi_csv(g, &phi)?;
            Ok(doc.into())
        }
        Command::ZeroEig { system, tail, c: cc, p } => {
            let c = load_system(&system.config, g.degrees)?;
            let model = match (tail.as_str(), cc, p) {
                ("fitted", _, _) => TailModel::Fitted,
                ("flat", _, _) => TailModel::Flat,
                ("power", Some(c), Some(p)) => TailModel::PowerLaw { c: *c, p: *p },
                ("power", _, _) => bail!(invalid("--tail power needs --c and --p")),
                (other, _, _) => bail!(invalid(format!("unknown tail model {other:?}"))),
            };
            let phi = c.phi()?;
            let r = zero_eigenvalue_check(&phi, model);
            let mut doc = Document::new("zero-eig");
            echo_system(&mut doc, &system.config, &c);
            doc.input("tail_model", tail.as_str());
            doc.result("eigenvalue_at_zero", r.eigenvalue_at_zero)
                .result("body_integral", r.body_integral)
                .result("tail_integral", r.tail_integral);
            if let Some(e) = r.exponent {
                doc.result("exponent", e);
            }
            phi_csv(g, &phi)?;
            Ok(doc.into())
        }
        Command::ToDiagonal { system, delta, cells_per_ramp } => {
            let c = load_system(&system.config, g.degrees)?;
            let opts = DiagonalOptions {
                delta: positive("delta", *delta)?,
                cells_per_ramp: (*cells_per_ramp).max(1),
            };
            let d = canonical_to_diagonal(&c.phi()?, &opts).map_err(transform_error)?;
            let mut doc = Document::new("to-diagonal");
            echo_system(&mut doc, &system.config, &c);
            doc.input("delta", opts.delta).input("cells_per_ramp", opts.cells_per_ramp);
            doc.result("rotation", d.rotation)
                .result("t0", d.t0)
                .result("total_length", d.total_length())
                .result("w_mass", d.w_mass())
                .result("t_range", d.t_range())
                .result("type", d.debranges_type())
                .result("segments", d.segments.iter().map(|s| (s.delta_t, s.h)).collect::<Vec<_>>())
                .warn_all(&d.notes);
            let mut at = 0.0;
            csv(
                g,
                &["T", "h"],
                d.segments.iter().map(|s| {
                    let row = vec![at, s.h];
                    at += s.delta_t;
                    row
                }),
            )?;
            Ok(doc.into())
        }
        Command::Type { system, fit } => {
            let c = load_system(&system.config, g.degrees)?;
            let d = canonical_to_diagonal(&c.phi()?, &DiagonalOptions::default()).map_err(transform_error)?;
            let tau = d.debranges_type();
            let mut doc = Document::new("type");
            echo_system(&mut doc, &system.config, &c);
            doc.result("type", tau).result("diagonal_length", d.total_length()).warn_all(&d.notes);
            if let Some(r) = fit {
                let (r0, r1) = (positive("fit", r[0])?, positive("fit", r[1])?);
                if r1 <= r0 {
                    bail!(invalid("--fit needs R_MIN < R_MAX"));
                }
                doc.input("fit", vec![r0, r1]);
                let f = type_fit(|z| Ok(diagonal_transfer_matrix(&d, z).log_norm()), FRAC_PI_2, r0, r1, 32, exec(g))?;
                doc.result("fitted_slope", f.slope).result("fit_residual", f.residual);
                if tau > 0.0 {
                    doc.result("relative_gap", (f.slope - tau).abs() / tau);
                }
                csv(g, &["r", "log_norm"], f.samples.iter().map(|&(r, v)| vec![r, v]))?;
            }
            Ok(doc.into())
        }
        Command::Order { system, l, r_min, r_max, radii, phases, tol } => {
            let c = load_system(&system.config, g.degrees)?;
            let h = &c.hamiltonian;
            let l = l.unwrap_or(h.length());
            let params = FitParams {
                r_min: *r_min,
                r_max: *r_max,
                n_radii: *radii,
                n_phases: *phases,
            };
            let rep = order_bound_check(h, l, &params, positive("tol", *tol)?, exec(g)).map_err(|e| match e {
                canosc::entire::EntireError::BadParameter(m) => invalid(m),
                canosc::entire::EntireError::LengthOutOfRange { .. } => invalid(e.to_string()),
                e => e.into(),
            })?;
            let mut doc = Document::new("order");
            echo_system(&mut doc, &system.config, &c);
            doc.input("L", l)
                .input("r_range", vec![*r_min, *r_max])
                .input("radii", *radii)
                .input("phases", *phases)
                .input("tol", *tol);
            doc.result("order", rep.fit.order)
                .result("residual", rep.fit.residual)
                .result("type_along_ray", rep.fit.type_along_ray)
                .result("fit_range", vec![rep.fit.fit_range.0, rep.fit.fit_range.1])
                .result("in_c_plus", rep.in_c_plus)
                .result("has_ramp", rep.has_ramp)
                .cert("upper_bound_holds", rep.upper_ok)
                .cert("max_det_defect", rep.max_det_defect)
                .cert("bound_holds", rep.holds());
            if let Some(lo) = rep.lower_ok {
                doc.cert("lower_bound_holds", lo);
            }
            csv(g, &["r", "log_max"], rep.fit.log_max.iter().map(|&(r, m)| vec![r, m]))?;
            Ok(doc.into())
        }
        Command::SchrodingerImport { potential, e0, emit_config } => {
            let pot = load_potential(potential)?;
            let problem = SchrodingerProblem { potential: pot, e0: *e0 };
            let imp = schrodinger_to_canonical(&problem).map_err(transform_error)?;
            let mut doc = Document::new("schrodinger-import");
            doc.input("potential", potential.display().to_string()).input("e0", *e0);
            let (x_first, x_last) = (imp.phi[0], *imp.phi.last().unwrap());
            doc.result("canonical_length", imp.hamiltonian.length())
                .result("phi_start", x_first.1)
                .result("phi_end", x_last.1)
                .result("samples", imp.phi.len())
                .warn_all(&imp.warnings);
            if let Some(path) = emit_config {
                let samples: Vec<String> = imp
                    .x_map
                    .iter()
                    .zip(&imp.phi)
                    .map(|(&(_, big_x), &(_, p))| format!("[{}, {}]", float(big_x - imp.x_map[0].1), float(p)))
                    .collect();
                let text = format!("[[segments]]\nkind = \"table\"\nsamples = [\n  {}\n]\n", samples.join(",\n  "));
                std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
                doc.result("config_written", path.display().to_string());
            }
            csv(
                g,
                &["x", "X", "phi"],
                imp.x_map.iter().zip(&imp.phi).map(|(&(x, big_x), &(_, p))| vec![x, big_x, p]),
            )?;
            Ok(doc.into())
        }
        Command::Molchanov { potential, e0, grid, classic } => {
            let pot = load_potential(potential)?;
            let n = grid[2];
            if !(n >= 2.0 && n.fract() == 0.0) || !(grid[0] > 0.0 && grid[1] > grid[0]) {
                bail!(invalid("--grid needs 0 < A < B and an integer N >= 2"));
            }
            let xs = geometric_grid(grid[0], grid[1], n as usize);
            let mut doc = Document::new("molchanov");
            doc.input("potential", potential.display().to_string())
                .input("grid", grid.clone());
            if let Some(d_list) = classic {
                doc.input("windows", d_list.clone());
                let t = molchanov_classic(&pot, d_list, &xs, exec(g)).map_err(transform_error)?;
                for (d, row) in t.d_list.iter().zip(&t.rows) {
                    doc.result(&format!("window_{}", row_key(*d)), row.clone());
                }
                doc.result("x", t.x_grid.clone()).result("verdict", format!("{:?}", t.verdict));
                let mut header = vec!["x".to_string()];
                header.extend(t.d_list.iter().map(|d| format!("d={d}")));
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                csv(
                    g,
                    &header,
                    t.x_grid.iter().enumerate().map(|(i, &x)| {
                        let mut row = vec![x];
                        row.extend(t.rows.iter().map(|r| r[i]));
                        row
                    }),
                )?;
            } else {
                doc.input("e0", *e0);
                let problem = SchrodingerProblem { potential: pot, e0: *e0 };
                let m = molchanov_new(&problem, &xs).map_err(transform_error)?;
                doc.result("g", m.g.clone())
                    .result("q_not_l2", m.q_not_l2)
                    .result("verdict", format!("{:?}", m.verdict));
                csv(g, &["x", "G"], m.g.iter().map(|&(x, v)| vec![x, v]))?;
            }
            Ok(doc.into())
        }
        Command::Hadamard { alpha, z, terms, tol, h2 } => {
            if !(*alpha > 1.0) {
                bail!(invalid("--alpha must exceed 1"));
            }
            let z = C64::new(z[0], z[1]);
            let fam = match terms {
                Some(n) => HadamardFamily::new(*alpha, *n)?,
                None => HadamardFamily::new(*alpha, canosc::entire::choose_terms(z.norm(), *alpha, positive("tol", *tol)?))?,
            };
            let (a, cc) = (fam.a(z), fam.c(z));
            let mut doc = Document::new("hadamard");
            doc.input("alpha", *alpha).input("z", vec![z.re, z.im]);
            doc.result("n_terms", fam.n_terms)
                .result("a", vec![a.re, a.im])
                .result("c", vec![cc.re, cc.im])
                .result("log_abs_a", fam.log_a(z).re)
                .result("log_abs_c", fam.log_c(z).re)
                .cert("tail_bound", fam.tail_bound(z.norm()));
            if let Some(r) = h2 {
                let r = positive("h2", *r)?;
                let rep = h2_membership_integral(*alpha, fam.n_terms, r)?;
                doc.input("h2_radius", r);
                doc.result("h2_value", rep.value)
                    .result("h2_value_doubled", rep.value_doubled)
                    .result("h2_rel_change", rep.rel_change)
                    .result("h2_monotone", rep.monotone)
                    .result("h2_verdict", format!("{:?}", rep.verdict))
                    .cert("h2_quadrature_error", rep.quadrature_error);
                csv(g, &["R", "integral"], rep.trend.iter().map(|&(r, v)| vec![r, v]))?;
            }
            Ok(doc.into())
        }
    }
}

fn row_key(d: f64) -> String {
    d.to_string().replace(['.', '-'], "_")
}

fn transform_error(e: TransformError) -> anyhow::Error {
    match e {
        TransformError::BadPotential(_)
        | TransformError::BadGrid
        | TransformError::AssumptionViolated(_)
        | TransformError::SplitRequired { .. }
        | TransformError::NotMonotone { .. } => invalid(e.to_string()),
        e => e.into(),
    }
}
