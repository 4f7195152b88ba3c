use std::collections::BTreeMap;
use std::path::Path;

use qspectra::eigen::{eig, hermitian_eigenvalues, smallest_singular_value};
use qspectra::feshbach::{
    effective_hamiltonian, inverse_structure_residual, selfconsistent_all, selfconsistent_energies, CouplingVariant,
    FixedPointSet, SelfConsistentOptions,
};
use qspectra::hamiltonian::pairs;
use qspectra::models::{
    four_block_model, pt_well, random_model, symmetry_residuals, two_level, two_level_family, ContourSpec, TwoLevelSpec,
};
use qspectra::spectra::{
    analyze, classified_spectrum, exceptional_point_with, reality_scan, ClassCounts, FamilySpec, SpectralClass,
};
use qspectra::{
    canonicalize, enumerate_patterns, pseudo_hermiticity_residual, validate_pattern, Coloring, ComplexMatrix,
    PartitionedHamiltonian, Sign, SignPattern, C64,
};
use serde_json::{json, Value};

use crate::document::{parse_document, write_document, ModelDocument, SignStyle};
use crate::format::{self, complex_g6, data, g6};
use crate::{Cli, Command, FamilyArgs, FamilyModel, Failure, Format, ModelKind, Report, Variant};

const GREEK: [&str; 6] = ["α", "β", "γ", "μ", "ν", "ρ"];

pub(crate) fn execute(cli: &Cli) -> Result<Report, Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::Patterns { n } => patterns(*n, fmt),
        Command::Canon { input } => canon(input, fmt),
        Command::Spectrum { input, tol } => spectrum(input, *tol, fmt),
        Command::Feshbach { input, rho, variant } => feshbach(input, *rho, *variant, fmt),
        Command::Selfconsistent { input, level, tol, max_iter, variant } => {
            let opts = SelfConsistentOptions { tol: *tol, max_iter: *max_iter, variant: variant.into(), ..Default::default() };
            selfconsistent(input, *level, &opts, fmt)
        }
        Command::Scan { family: fam, from, to, steps, tol } => scan(&family(fam)?, *from, *to, *steps, *tol, fmt),
        Command::Ep { family: fam, bracket, tol, reality_tol } => ep(&family(fam)?, bracket, *tol, *reality_tol, fmt),
        Command::Model { kind } => model(kind, fmt),
        Command::Check { input, tol } => check(input, *tol, fmt),
    }
}

impl From<&Variant> for CouplingVariant {
    fn from(v: &Variant) -> Self {
        match v {
            Variant::Canonical => CouplingVariant::Canonical,
            Variant::Hermitian => CouplingVariant::HermitianControl,
        }
    }
}

fn load(path: &Path) -> Result<(ModelDocument, PartitionedHamiltonian, Coloring), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse_document(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let (ph, coloring) = doc.to_model().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((doc, ph, coloring))
}

fn parse_sign(s: &str) -> Result<Sign, Failure> {
    s.trim().parse::<Sign>().map_err(|e| Failure::input(format!("invalid sign {s:?}: {e}")))
}

fn parse_signs(s: &str) -> Result<Vec<Sign>, Failure> {
    s.split(',').map(parse_sign).collect()
}

fn parse_dims(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|d| d.trim().parse::<usize>().map_err(|_| Failure::input(format!("invalid dimension {d:?} in {s:?}"))))
        .collect()
}

fn family(args: &FamilyArgs) -> Result<FamilySpec, Failure> {
    match (&args.model, &args.input) {
        (Some(FamilyModel::TwoLevel), None) => Ok(two_level_family(args.f, args.g, parse_sign(&args.sign)?)?),
        (None, Some(path)) => {
            let (_, ph, _) = load(path)?;
            Ok(FamilySpec::new(ph, "t"))
        }
        _ => Err(Failure::input("give either --model two-level or --input FILE")),
    }
}

fn class_label(c: &SpectralClass) -> &'static str {
    c.label()
}

fn pair_labels(n: usize, greek: bool) -> Vec<String> {
    pairs(n)
        .enumerate()
        .map(|(k, (i, j))| if greek && n <= 4 { GREEK[k].to_string() } else { format!("s{i}_{j}") })
        .collect()
}

fn patterns(n: usize, fmt: Format) -> Result<Report, Failure> {
    let list = enumerate_patterns(n)?;
    let sign_str = |s: &Sign| s.as_char().to_string();
    let text = match fmt {
        Format::Table | Format::Csv => {
            let labels = pair_labels(n, fmt == Format::Table);
            let mut headers: Vec<&str> = vec!["#"];
            headers.extend(labels.iter().map(String::as_str));
            headers.extend(["coloring", "plus", "minus"]);
            let rows: Vec<Vec<String>> = list
                .iter()
                .enumerate()
                .map(|(k, (p, c))| {
                    let mut row = vec![(k + 1).to_string()];
                    row.extend(p.signs().iter().map(sign_str));
                    row.push(c.eps().iter().map(|s| s.as_char()).collect());
                    row.push(c.m_partitions().to_string());
                    row.push(c.n_partitions().to_string());
                    row
                })
                .collect();
            if fmt == Format::Table {
                format::table(&headers, &rows)
            } else {
                headers[0] = "index";
                format::csv(&headers, &rows)
            }
        }
        Format::Json => {
            let rows: Vec<Value> = list
                .iter()
                .map(|(p, c)| {
                    json!({
                        "pattern": p.to_string(),
                        "signs": p.signs().iter().map(|s| s.value() as i64).collect::<Vec<_>>(),
                        "coloring": c.eps().iter().map(|s| s.value() as i64).collect::<Vec<_>>(),
                        "plus": c.m_partitions(),
                        "minus": c.n_partitions(),
                    })
                })
                .collect();
            format::json(&json!({ "n": n, "pairs": pairs(n).map(|(i, j)| format!("{i},{j}")).collect::<Vec<_>>(), "patterns": rows }))
        }
    };
    Ok(Report::data(text))
}

fn canon(input: &Path, fmt: Format) -> Result<Report, Failure> {
    let (_, ph, _) = load(input)?;
    let cf = canonicalize(&ph)?;
    let signature: Vec<i64> = cf.metric.signature().iter().map(|s| s.value() as i64).collect();
    let text = match fmt {
        Format::Table => {
            let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            format!(
                "partition order: {}\npermutation: {}\nm = {}, n = {}\nmetric: {}\n\n{}",
                join(&cf.partition_order),
                join(&cf.permutation),
                cf.m,
                cf.n,
                cf.metric.signature().iter().map(|s| s.as_char().to_string()).collect::<Vec<_>>().join(" "),
                format::matrix_table(&cf.matrix)
            )
        }
        Format::Csv => format::matrix_csv(&cf.matrix),
        Format::Json => format::json(&json!({
            "partition_order": cf.partition_order,
            "permutation": cf.permutation,
            "m": cf.m,
            "n": cf.n,
            "metric": signature,
            "matrix": format::matrix_json(&cf.matrix),
        })),
    };
    Ok(Report::data(text))
}

fn spectrum(input: &Path, tol: f64, fmt: Format) -> Result<Report, Failure> {
    let (_, ph, coloring) = load(input)?;
    let q = coloring.metric(ph.partition())?;
    let rep = analyze(&ph.assemble(), &q, tol)?;
    let n = rep.eigenvalues.len();
    let counts = rep.counts();
    let partner = |c: &SpectralClass| match c {
        SpectralClass::Pair { partner } => Some(*partner),
        _ => None,
    };
    let text = match fmt {
        Format::Table | Format::Csv => {
            let table = fmt == Format::Table;
            let num = |x: f64| if table { g6(x) } else { data(x) };
            let rows: Vec<Vec<String>> = (0..n)
                .map(|k| {
                    vec![
                        k.to_string(),
                        num(rep.eigenvalues[k].re),
                        num(rep.eigenvalues[k].im),
                        class_label(&rep.classes[k]).to_string(),
                        partner(&rep.classes[k]).map_or(String::new(), |p| p.to_string()),
                        num(rep.pseudo_norms[k]),
                        rep.self_orthogonal[k].to_string(),
                        rep.left_residuals[k].map_or(String::new(), num),
                    ]
                })
                .collect();
            let headers = ["index", "re", "im", "class", "partner", "pseudo_norm", "self_orthogonal", "left_residual"];
            if table {
                format!(
                    "{}\nreal: {} of {} ({}%), pairs: {}, unpaired: {}\n",
                    format::table(&headers, &rows),
                    counts.real,
                    n,
                    g6(100.0 * counts.real as f64 / n as f64),
                    counts.pairs,
                    counts.unpaired
                )
            } else {
                format::csv(&headers, &rows)
            }
        }
        Format::Json => {
            let rows: Vec<Value> = (0..n)
                .map(|k| {
                    json!({
                        "re": rep.eigenvalues[k].re,
                        "im": rep.eigenvalues[k].im,
                        "class": class_label(&rep.classes[k]),
                        "partner": partner(&rep.classes[k]),
                        "pseudo_norm": rep.pseudo_norms[k],
                        "qform": [rep.qforms[k].re, rep.qforms[k].im],
                        "bilinear_qform": [rep.bilinear_qforms[k].re, rep.bilinear_qforms[k].im],
                        "self_orthogonal": rep.self_orthogonal[k],
                        "left_residual": rep.left_residuals[k],
                    })
                })
                .collect();
            format::json(&json!({
                "dimension": n,
                "real": counts.real,
                "pairs": counts.pairs,
                "unpaired": counts.unpaired,
                "eigenvalues": rows,
            }))
        }
    };
    Ok(Report::data(text))
}

fn feshbach(input: &Path, rho: f64, variant: Variant, fmt: Format) -> Result<Report, Failure> {
    let (_, ph, _) = load(input)?;
    let cf = canonicalize(&ph)?;
    let h = effective_hamiltonian(&cf, rho, (&variant).into())?;
    let levels = hermitian_eigenvalues(h.as_matrix());
    let text = match fmt {
        Format::Table => format!(
            "rho = {}, m = {}, n = {}\n\n{}\nlevels: {}\n",
            g6(rho),
            cf.m,
            cf.n,
            format::matrix_table(&h),
            levels.iter().map(|&e| g6(e)).collect::<Vec<_>>().join(" ")
        ),
        Format::Csv => format::matrix_csv(&h),
        Format::Json => format::json(&json!({
            "rho": rho,
            "matrix": format::matrix_json(&h),
            "levels": levels,
        })),
    };
    Ok(Report::data(text))
}

fn selfconsistent(input: &Path, level: Option<usize>, opts: &SelfConsistentOptions, fmt: Format) -> Result<Report, Failure> {
    let (_, ph, _) = load(input)?;
    let cf = canonicalize(&ph)?;
    let sets: Vec<FixedPointSet> = match level {
        Some(l) => vec![selfconsistent_energies(&cf, l, opts)?],
        None => selfconsistent_all(&cf, opts)?,
    };
    let decoupled = sets.first().map(|s| s.decoupled_poles.clone()).unwrap_or_default();
    let text = match fmt {
        Format::Table | Format::Csv => {
            let table = fmt == Format::Table;
            let num = |x: f64| if table { g6(x) } else { data(x) };
            let rows: Vec<Vec<String>> = sets
                .iter()
                .flat_map(|s| s.roots.iter())
                .map(|r| {
                    vec![
                        r.level.to_string(),
                        num(r.energy),
                        num(r.residual),
                        r.iterations.to_string(),
                        num(r.bracket.0),
                        num(r.bracket.1),
                    ]
                })
                .collect();
            let headers = ["level", "energy", "residual", "iterations", "lo", "hi"];
            if table {
                let mut s = format::table(&headers, &rows);
                if !decoupled.is_empty() {
                    s += &format!("decoupled: {}\n", decoupled.iter().map(|&e| g6(e)).collect::<Vec<_>>().join(" "));
                }
                s
            } else {
                format::csv(&headers, &rows)
            }
        }
        Format::Json => {
            let levels: Vec<Value> = sets
                .iter()
                .map(|s| {
                    json!({
                        "level": s.level,
                        "roots": s.roots.iter().map(|r| json!({
                            "energy": r.energy,
                            "residual": r.residual,
                            "iterations": r.iterations,
                            "bracket": [r.bracket.0, r.bracket.1],
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            format::json(&json!({ "levels": levels, "decoupled": decoupled }))
        }
    };
    Ok(Report::data(text))
}

fn scan(fam: &FamilySpec, from: f64, to: f64, steps: usize, tol: f64, fmt: Format) -> Result<Report, Failure> {
    let points = reality_scan(fam, from, to, steps, tol)?;
    let text = match fmt {
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .flat_map(|p| {
                    p.eigenvalues.iter().zip(&p.classes).enumerate().map(move |(k, (z, c))| {
                        vec![data(p.parameter), k.to_string(), data(z.re), data(z.im), class_label(c).to_string()]
                    })
                })
                .collect();
            format::csv(&["parameter", "index", "re", "im", "class"], &rows)
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| {
                    vec![
                        g6(p.parameter),
                        p.counts.real.to_string(),
                        p.counts.pairs.to_string(),
                        p.counts.unpaired.to_string(),
                    ]
                })
                .collect();
            format::table(&[fam.parameter.as_str(), "real", "pairs", "unpaired"], &rows)
        }
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .map(|p| {
                    json!({
                        "parameter": p.parameter,
                        "real": p.counts.real,
                        "pairs": p.counts.pairs,
                        "unpaired": p.counts.unpaired,
                        "eigenvalues": p.eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                        "classes": p.classes.iter().map(class_label).collect::<Vec<_>>(),
                    })
                })
                .collect();
            format::json(&json!({ "parameter": fam.parameter, "points": rows }))
        }
    };
    Ok(Report::data(text))
}

fn parse_bracket(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::input(format!("--bracket expects `lo,hi`, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn ep(fam: &FamilySpec, bracket: &str, tol: f64, reality_tol: f64, fmt: Format) -> Result<Report, Failure> {
    let (lo, hi) = parse_bracket(bracket)?;
    let found = exceptional_point_with(fam, lo, hi, tol, reality_tol)?;
    let text = match fmt {
        Format::Table => format!("{:.6}\n", found.value),
        Format::Csv => format::csv(
            &["value", "lo", "hi", "non_monotone"],
            &[vec![data(found.value), data(found.bracket.0), data(found.bracket.1), found.non_monotone.to_string()]],
        ),
        Format::Json => format::json(&json!({
            "value": found.value,
            "bracket": [found.bracket.0, found.bracket.1],
            "non_monotone": found.non_monotone,
        })),
    };
    let mut report = Report::data(text);
    if found.non_monotone {
        report.warnings.push(format!("reality changes more than once on [{lo}, {hi}]; reporting the first crossing"));
    }
    Ok(report)
}

fn model(kind: &ModelKind, fmt: Format) -> Result<Report, Failure> {
    match kind {
        ModelKind::TwoLevel { f, g, a, sign } => {
            let (ph, _) = two_level(TwoLevelSpec { f: *f, g: *g, a: *a, sign: parse_sign(sign)? })?;
            Ok(Report::data(write_document(&ModelDocument::from_model(&ph, SignStyle::Coloring))))
        }
        ModelKind::Random { dims, coloring, pattern, seed, scale } => {
            let dims = parse_dims(dims)?;
            let (c, style) = match (coloring, pattern) {
                (Some(c), None) => (Coloring::new(parse_signs(c)?)?, SignStyle::Coloring),
                (None, Some(p)) => {
                    let signs = parse_signs(p)?;
                    (validate_pattern(&SignPattern::new(dims.len(), signs)?)?, SignStyle::Signs)
                }
                (None, None) => (Coloring::all_plus(dims.len())?, SignStyle::Coloring),
                (Some(_), Some(_)) => return Err(Failure::input("give either --coloring or --pattern")),
            };
            if !(*scale >= 0.0) {
                return Err(Failure::input(format!("--scale must be non-negative, got {scale}")));
            }
            let ph = random_model(&dims, &c, *scale, *seed)?;
            Ok(Report::data(write_document(&ModelDocument::from_model(&ph, style))))
        }
        ModelKind::PtWell { coupling_g, eps0, grid, tol, levels } => {
            pt_well_report(ContourSpec { g: *coupling_g, eps0: *eps0, n: *grid }, *tol, *levels, fmt)
        }
        ModelKind::FourBlock { coupling_g, grid, pattern, keep, scale, seed } => {
            let fb = four_block(*coupling_g, *grid, pattern, *keep, *scale, *seed)?;
            Ok(Report::data(write_document(&ModelDocument::from_model(&fb, SignStyle::Signs))))
        }
    }
}

/// The four-sector model of the undeformed well with seeded couplings of
/// magnitude `scale` on every pair.
pub(crate) fn four_block(g: f64, grid: usize, pattern: &str, keep: usize, scale: f64, seed: u64) -> Result<PartitionedHamiltonian, Failure> {
    let pattern = SignPattern::new(4, parse_signs(pattern)?)?;
    let coloring = validate_pattern(&pattern)?;
    if !(scale >= 0.0) {
        return Err(Failure::input(format!("--scale must be non-negative, got {scale}")));
    }
    let base = pt_well(ContourSpec { g, eps0: 0.0, n: grid })?;
    let source = random_model(&[keep; 4], &coloring, scale, seed)?;
    let couplings: BTreeMap<(usize, usize), ComplexMatrix> =
        pairs(4).map(|(i, j)| ((i, j), source.coupling(i, j).clone())).collect();
    Ok(four_block_model(&base, &couplings, &pattern, keep)?.hamiltonian)
}

fn pt_well_report(spec: ContourSpec, tol: f64, levels: usize, fmt: Format) -> Result<Report, Failure> {
    let m = pt_well(spec)?;
    let (r_comm, rt_comm) = symmetry_residuals(&m)?;
    let (ev, classes) = classified_spectrum(&m.h, tol)?;
    let counts = ClassCounts::of(&classes);
    let text = match fmt {
        Format::Table => {
            let rows: Vec<Vec<String>> = ev
                .iter()
                .zip(&classes)
                .take(levels)
                .enumerate()
                .map(|(k, (z, c))| vec![k.to_string(), complex_g6(*z), class_label(c).to_string()])
                .collect();
            format!(
                "N = {}, g = {}, eps0 = {}, scale = {}\n[H,R] residual: {}\nRT residual: {}\nreal: {} of {}, pairs: {}, unpaired: {}\n\n{}",
                spec.n,
                g6(spec.g),
                g6(spec.eps0),
                g6(m.scale()),
                g6(r_comm),
                g6(rt_comm),
                counts.real,
                ev.len(),
                counts.pairs,
                counts.unpaired,
                format::table(&["index", "eigenvalue", "class"], &rows)
            )
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = ev
                .iter()
                .zip(&classes)
                .enumerate()
                .map(|(k, (z, c))| vec![k.to_string(), data(z.re), data(z.im), class_label(c).to_string()])
                .collect();
            format::csv(&["index", "re", "im", "class"], &rows)
        }
        Format::Json => format::json(&json!({
            "n": spec.n,
            "g": spec.g,
            "eps0": spec.eps0,
            "scale": m.scale(),
            "r_comm": r_comm,
            "rt_comm": rt_comm,
            "real": counts.real,
            "pairs": counts.pairs,
            "unpaired": counts.unpaired,
            "eigenvalues": ev.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "classes": classes.iter().map(class_label).collect::<Vec<_>>(),
        })),
    };
    Ok(Report::data(text))
}

struct CheckRow {
    name: &'static str,
    value: Option<f64>,
    bound: String,
    status: &'static str,
}

fn check(input: &Path, tol: f64, fmt: Format) -> Result<Report, Failure> {
    if !(tol > 0.0) {
        return Err(Failure::input(format!("--tol must be positive, got {tol}")));
    }
    let (_, ph, coloring) = load(input)?;
    let m = ph.assemble();
    let scale = m.scale();
    let q = coloring.metric(ph.partition())?;
    let mut rows = Vec::new();
    let mut push = |name, value: Option<f64>, bound: String, ok: Option<bool>| {
        let status = match ok {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "skip",
        };
        rows.push(CheckRow { name, value, bound, status });
    };

    let r = pseudo_hermiticity_residual(&m, &q)?;
    push("pseudo_hermiticity", Some(r), "= 0".into(), Some(r == 0.0));

    let cf = canonicalize(&ph)?;
    let r = pseudo_hermiticity_residual(&cf.matrix, &cf.metric)?;
    push("canonical_pseudo_hermiticity", Some(r), "= 0".into(), Some(r == 0.0));

    let dec = eig(&m)?;
    let eig_res = dec
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let v = dec.vector(k);
            (m.as_matrix() * &v - &v * l).norm()
        })
        .fold(0.0, f64::max);
    let bound = 1e-9 * scale;
    push("eigen_residual", Some(eig_res), format!("<= {}", g6(bound)), Some(eig_res <= bound));

    let (_, classes) = classified_spectrum(&m, tol)?;
    let unpaired = ClassCounts::of(&classes).unpaired as f64;
    push("conjugation_closure", Some(unpaired), "= 0 unpaired".into(), Some(unpaired == 0.0));

    let rep = analyze(&m, &q, tol)?;
    let left = rep.left_residuals.iter().flatten().copied().fold(0.0, f64::max);
    push("left_residual", Some(left), format!("<= {}", g6(tol * scale)), Some(left <= tol * scale));

    let mut ortho = 0.0f64;
    for (a, &i) in rep.real_indices.iter().enumerate() {
        for (b, &j) in rep.real_indices.iter().enumerate() {
            if a != b && (rep.eigenvalues[i].re - rep.eigenvalues[j].re).abs() > 1e-6 * scale {
                ortho = ortho.max(rep.gram[(a, b)].norm());
            }
        }
    }
    push("q_orthogonality", Some(ortho), format!("<= {}", g6(tol)), Some(ortho <= tol));

    match inverse_structure_residual(&m, &q) {
        Ok(r) => push("inverse_structure", Some(r), "<= 1e-10".into(), Some(r <= 1e-10)),
        Err(qspectra::Error::Conditioning { .. }) => push("inverse_structure", None, "singular".into(), None),
        Err(e) => return Err(e.into()),
    }

    if cf.m > 0 && cf.n > 0 {
        let mut worst: Option<f64> = None;
        for (z, c) in rep.eigenvalues.iter().zip(&rep.classes) {
            if *c != SpectralClass::Real {
                continue;
            }
            match effective_hamiltonian(&cf, z.re, CouplingVariant::Canonical) {
                Ok(h) => {
                    let shifted = ComplexMatrix::from_fn(cf.m, cf.m, |i, j| {
                        h[(i, j)] - if i == j { C64::new(z.re, 0.0) } else { C64::new(0.0, 0.0) }
                    })?;
                    let s = smallest_singular_value(shifted.as_matrix());
                    worst = Some(worst.map_or(s, |w: f64| w.max(s)));
                }
                Err(qspectra::Error::Pole { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let bound = tol * scale;
        match worst {
            Some(s) => push("feshbach_singularity", Some(s), format!("<= {}", g6(bound)), Some(s <= bound)),
            None => push("feshbach_singularity", None, "no real eigenvalue".into(), None),
        }
    } else {
        push("feshbach_singularity", None, "no eliminated space".into(), None);
    }

    let failed = rows.iter().any(|r| r.status == "fail");
    let text = match fmt {
        Format::Table | Format::Csv => {
            let table = fmt == Format::Table;
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.to_string(),
                        r.value.map_or(String::new(), |v| if table { g6(v) } else { data(v) }),
                        r.bound.clone(),
                        r.status.to_string(),
                    ]
                })
                .collect();
            let headers = ["check", "value", "bound", "status"];
            if table {
                format::table(&headers, &cells)
            } else {
                format::csv(&headers, &cells)
            }
        }
        Format::Json => format::json(&Value::Array(
            rows.iter()
                .map(|r| json!({ "check": r.name, "value": r.value, "bound": r.bound, "status": r.status }))
                .collect(),
        )),
    };
    Ok(Report { data: text, warnings: Vec::new(), failed })
}
