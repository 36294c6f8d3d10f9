use std::fmt::Write as _;
use std::path::Path;

use mlradon_core::exponents::b_of_p;
use mlradon_core::flows::{
    ball_volume, doubling_ratio, fmt9, necessity_witness, necessity_witness_for_b, phi_chart, sample_ball,
    verify_chart_lemmas, volume_vs_lambda, BallSpec, ChartReport, ChartTolerances, FlowConfig, Resolution,
    VolumeConfig, WitnessTable,
};
use mlradon_core::polytope::build_polytope;
use mlradon_core::symalg::{parse_rational, CompiledField, CompiledMap};
use mlradon_core::{classify, BigRational, Catalog, Error, ExponentTuple, LambdaVector, NewtonPolytope, WordTuple};
use num::{ToPrimitive, Zero};

use crate::args::{Command, SampleArgs, SpecArgs};
use crate::spec::{builtin, parse_spec, ProblemSpec};
use crate::{verify, CliError};

type Res<T> = Result<T, CliError>;

/// Loads a problem from a file, falling back to a bundled name.
pub fn load_spec(name: &str) -> Res<ProblemSpec> {
    let path = Path::new(name);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        let mut spec = parse_spec(&text)?;
        spec.name = name.to_string();
        return Ok(spec);
    }
    builtin(name).ok_or_else(|| CliError::Io {
        path: path.into(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled spec"),
    })
}

fn apply_overrides(mut spec: ProblemSpec, a: &SpecArgs) -> Res<ProblemSpec> {
    if let Some(seed) = a.seed {
        spec.options.seed = seed;
    }
    if let Some(eps) = &a.eps {
        let e = parse_rational(eps)?;
        if !(e > BigRational::zero()) {
            return Err(Error::Precondition("eps must be positive".into()).into());
        }
        spec.options.eps = e;
    }
    if let Some(cap) = a.cap {
        if cap == 0 {
            return Err(Error::Precondition("cap must be at least 1".into()).into());
        }
        spec.options.max_word_len = cap;
    }
    Ok(spec)
}

fn parse_number(s: &str) -> Res<f64> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    parse_rational(t)?.to_f64().ok_or_else(|| Error::parse(format!("`{t}` is not a number")).into())
}

fn parse_list(s: &str) -> Res<Vec<f64>> {
    s.split(',').map(parse_number).collect()
}

/// One value is repeated `k` times; otherwise exactly `k` values.
fn parse_delta(s: &str, k: usize) -> Res<Vec<f64>> {
    let v = parse_list(s)?;
    let v = if v.len() == 1 { vec![v[0]; k] } else { v };
    if v.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: v.len() }.into());
    }
    if v.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::Precondition("radii must be positive".into()).into());
    }
    Ok(v)
}

fn parse_delta_list(s: &str, k: usize) -> Res<Vec<Vec<f64>>> {
    if s.contains(';') {
        s.split(';').map(|t| parse_delta(t, k)).collect()
    } else {
        parse_list(s)?.into_iter().map(|x| parse_delta(&x.to_string(), k)).collect()
    }
}

fn fmt_rats(v: &[BigRational]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

fn fmt_floats(v: &[f64]) -> String {
    let s: Vec<String> = v.iter().map(|&x| fmt9(x)).collect();
    format!("({})", s.join(","))
}

/// Everything a command needs about the problem.
struct Context {
    spec: ProblemSpec,
    cfg: FlowConfig,
    origin: Vec<BigRational>,
}

impl Context {
    fn new(a: &SpecArgs) -> Res<Self> {
        let spec = apply_overrides(load_spec(&a.spec)?, a)?;
        let cfg = FlowConfig::with_seed(spec.options.seed);
        let origin = vec![BigRational::zero(); spec.n];
        Ok(Context { spec, cfg, origin })
    }

    fn catalog(&self) -> Res<Catalog> {
        let o = &self.spec.options;
        Ok(Catalog::truncated(self.spec.fields.clone(), o.max_word_len, &o.eps, &self.origin)?)
    }

    fn tuples(&self, c: &Catalog) -> Res<Vec<WordTuple>> {
        Ok(c.enumerate_tuples(&self.origin)?)
    }

    fn polytope(&self, c: &Catalog) -> Res<NewtonPolytope> {
        Ok(build_polytope(c, &self.origin)?)
    }

    fn compiled(&self) -> Vec<CompiledField> {
        self.spec.fields.iter().map(|f| f.compile()).collect()
    }

    fn maps(&self) -> Res<Vec<CompiledMap>> {
        match &self.spec.maps {
            Some(m) => Ok(m.iter().map(|m| m.compile()).collect()),
            None => Err(Error::Precondition("this command needs a spec given by maps".into()).into()),
        }
    }

    fn header(&self, command: &str, extra: &str) -> String {
        let o = &self.spec.options;
        let mut h = String::new();
        let _ = writeln!(h, "mlradon {command}");
        let _ = writeln!(h, "spec {} n={} k={} mode={}", self.spec.name, self.spec.n, self.spec.k, self.spec.mode);
        let _ = writeln!(
            h,
            "options eps={} cap={} K={} seed={} steps_per_unit={} max_time={}{}",
            o.eps, o.max_word_len, o.k_scale, o.seed, self.cfg.steps_per_unit, self.cfg.max_time, extra
        );
        h
    }
}

fn sampling_extra(s: &SampleArgs, n: usize) -> String {
    let seg = s.segments.unwrap_or(3 * n);
    format!(" samples={} segments={} cells={}", s.samples, seg, s.cells)
}

fn volume_config(s: &SampleArgs) -> VolumeConfig {
    VolumeConfig { samples: s.samples, segments: s.segments, resolution: Resolution::Adaptive(s.cells) }
}

fn write_csv(path: Option<&Path>, text: &str) -> Res<()> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source })?;
    }
    Ok(())
}

/// Runs one command and returns its report.
pub fn run(command: &Command) -> Res<String> {
    match command {
        Command::Brackets(a) => brackets(a),
        Command::Hormander(a) => hormander(a),
        Command::Polytope(a) => polytope(a),
        Command::Classify { spec, p } => classify_cmd(spec, p),
        Command::Ball { spec, delta, samples, segments, h } => ball(spec, delta, *samples, *segments, *h),
        Command::VolumeScan { spec, delta_list, sampling } => volume_scan(spec, delta_list, sampling),
        Command::Doubling { spec, delta, sampling } => doubling(spec, delta, sampling),
        Command::Chart { spec, k_scale, delta, samples, boxes } => chart(spec, k_scale.as_deref(), delta, *samples, *boxes),
        Command::Witness { spec, p, b, delta0_list, sampling } => {
            witness(spec, p.as_deref(), b.as_deref(), delta0_list, sampling)
        }
        Command::Verify { seed } => {
            let report = verify::run_suite(*seed);
            let text = report.render();
            if report.passed() {
                Ok(text)
            } else {
                Err(CliError::VerifyFailed(text))
            }
        }
    }
}

fn brackets(a: &SpecArgs) -> Res<String> {
    let ctx = Context::new(a)?;
    let c = ctx.catalog()?;
    let mut out = ctx.header("brackets", "");
    let cap = c.caps().per_letter.map_or("none".to_string(), |v| v.to_string());
    let _ = writeln!(out, "words {} per_letter_cap={}", c.words().len(), cap);
    for w in c.words() {
        let f = c.word_field(w)?;
        let _ = writeln!(out, "{}\tdeg={}\t{}", w, w.degree(c.arity())?, f);
    }
    Ok(out)
}

fn hormander(a: &SpecArgs) -> Res<String> {
    let ctx = Context::new(a)?;
    let c = ctx.catalog()?;
    let r = c.hormander_check(&ctx.origin)?;
    let mut out = ctx.header("hormander", "");
    let _ = writeln!(out, "spans {}", r.spans);
    let _ = writeln!(out, "rank {} of {}", r.rank, r.dimension);
    let ws: Vec<String> = r.witness.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "{} {}", if r.spans { "witness" } else { "independent" }, ws.join(" "));
    Ok(out)
}

fn polytope(a: &SpecArgs) -> Res<String> {
    let ctx = Context::new(a)?;
    let c = ctx.catalog()?;
    let p = ctx.polytope(&c)?;
    let mut out = ctx.header("polytope", "");
    if p.is_empty() {
        let _ = writeln!(out, "polytope empty (Hormander fails)");
        return Ok(out);
    }
    let _ = writeln!(out, "generators {}", p);
    let vs: Vec<String> = p.vertices()?.iter().map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect();
    let _ = writeln!(out, "vertices {}", vs.join(" "));
    let _ = writeln!(out, "serialized");
    out.push_str(&p.to_text());
    write_csv(a.csv.as_deref(), &p.to_text())?;
    Ok(out)
}

fn classify_cmd(a: &SpecArgs, p: &str) -> Res<String> {
    let ctx = Context::new(a)?;
    let c = ctx.catalog()?;
    let poly = ctx.polytope(&c)?;
    let p: ExponentTuple = p.parse()?;
    let cl = classify(&p, &poly)?;
    let mut out = ctx.header("classify", "");
    let _ = writeln!(out, "p {}", p);
    let _ = writeln!(out, "polytope {}", poly);
    let _ = writeln!(out, "verdict {}", cl.verdict);
    if let Some(b) = &cl.b {
        let _ = writeln!(out, "b {}", fmt_rats(b));
    }
    if let Some(m) = &cl.margin {
        let _ = writeln!(out, "margin {}", m);
    }
    if let Some(cert) = &cl.certificate {
        let _ = writeln!(out, "certificate {}", cert);
    }
    Ok(out)
}

fn ball(a: &SpecArgs, delta: &str, samples: usize, segments: Option<usize>, h: Option<f64>) -> Res<String> {
    let ctx = Context::new(a)?;
    let delta = parse_delta(delta, ctx.spec.k)?;
    let h = h.unwrap_or_else(|| delta.iter().cloned().fold(f64::INFINITY, f64::min) / 32.0);
    let mut bs = BallSpec::new(vec![0.0; ctx.spec.n], delta.clone()).with_samples(samples);
    if let Some(s) = segments {
        bs = bs.with_segments(s);
    }
    let cloud = sample_ball(&ctx.compiled(), &bs, &ctx.cfg)?;
    let vol = ball_volume(&cloud, h)?;
    let mut out = ctx.header("ball", &format!(" samples={} segments={} h={}", samples, bs.segments, fmt9(h)));
    let _ = writeln!(out, "delta {}", fmt_floats(&delta));
    let eps = bs.nondegeneracy_exponent().map_or("n/a".to_string(), fmt9);
    let _ = writeln!(out, "nondegeneracy_exponent {}", eps);
    let _ = writeln!(out, "volume {}", fmt9(vol));
    let bb: Vec<String> = cloud.bounding_box().iter().map(|(lo, hi)| format!("[{},{}]", fmt9(*lo), fmt9(*hi))).collect();
    let _ = writeln!(out, "bounding_box {}", bb.join(" "));
    write_csv(a.csv.as_deref(), &format!("volume,h\n{},{}\n", fmt9(vol), fmt9(h)))?;
    Ok(out)
}

fn volume_scan(a: &SpecArgs, list: &str, s: &SampleArgs) -> Res<String> {
    let ctx = Context::new(a)?;
    let deltas = parse_delta_list(list, ctx.spec.k)?;
    let c = ctx.catalog()?;
    let tuples = ctx.tuples(&c)?;
    let table = volume_vs_lambda(&ctx.compiled(), &tuples, &vec![0.0; ctx.spec.n], &deltas, &volume_config(s), &ctx.cfg)?;
    let mut out = ctx.header("volume-scan", &sampling_extra(s, ctx.spec.n));
    out.push_str(&table.to_csv());
    let _ = writeln!(out, "slope {}", fmt9(table.slope));
    let _ = writeln!(out, "ratio_range [{},{}]", fmt9(table.ratio_range.0), fmt9(table.ratio_range.1));
    let _ = writeln!(out, "loglog");
    out.push_str(&table.loglog_text());
    write_csv(a.csv.as_deref(), &table.to_csv())?;
    Ok(out)
}

fn doubling(a: &SpecArgs, delta: &str, s: &SampleArgs) -> Res<String> {
    let ctx = Context::new(a)?;
    let delta = parse_delta(delta, ctx.spec.k)?;
    let r = doubling_ratio(&ctx.compiled(), &vec![0.0; ctx.spec.n], &delta, &volume_config(s), &ctx.cfg)?;
    let mut out = ctx.header("doubling", &sampling_extra(s, ctx.spec.n));
    let _ = writeln!(out, "delta {}", fmt_floats(&delta));
    let _ = writeln!(out, "doubling_ratio {}", fmt9(r));
    write_csv(a.csv.as_deref(), &format!("doubling_ratio\n{}\n", fmt9(r)))?;
    Ok(out)
}

pub(crate) fn chart_reports(
    spec: &ProblemSpec,
    cfg: &FlowConfig,
    delta: &[f64],
    ks: &[f64],
    samples: usize,
    boxes: usize,
) -> Res<Vec<(String, ChartReport)>> {
    let origin = vec![BigRational::zero(); spec.n];
    let o = &spec.options;
    let c = Catalog::truncated(spec.fields.clone(), o.max_word_len, &o.eps, &origin)?;
    let tuples = c.enumerate_tuples(&origin)?;
    let x0 = vec![0.0; spec.n];
    let mut out = Vec::new();
    for &k in ks {
        let lv = LambdaVector::compute(&tuples, &x0, delta, k)?;
        let data = phi_chart(&c, &x0, delta, k, lv.selected(), 1.0, samples, cfg)?;
        let r = verify_chart_lemmas(&data, &tuples, boxes, &ChartTolerances::default())?;
        out.push((lv.selected().label(), r));
    }
    Ok(out)
}

pub(crate) fn render_chart(label: &str, r: &ChartReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "K {} tuple {} samples {}", r.k_scale, label, r.samples);
    let _ = writeln!(s, "  Y(0) deviation {} {}", fmt9(r.y_at_zero), if r.y_at_zero_ok { "ok" } else { "FAIL" });
    let _ = writeln!(s, "  Y deviation max {} constant {}", fmt9(r.y_deviation), fmt9(r.y_constant));
    let _ = writeln!(s, "  |det Y| [{},{}] {}", fmt9(r.det_min), fmt9(r.det_max), if r.det_ok { "ok" } else { "FAIL" });
    let _ = writeln!(
        s,
        "  Lambda ratio [{},{}] {}",
        fmt9(r.lambda_ratio.0),
        fmt9(r.lambda_ratio.1),
        if r.lambda_ok { "ok" } else { "FAIL" }
    );
    let _ = writeln!(
        s,
        "  volume ratio [{},{}] {}",
        fmt9(r.volume_ratio.0),
        fmt9(r.volume_ratio.1),
        if r.volume_ok { "ok" } else { "FAIL" }
    );
    s
}

fn chart(a: &SpecArgs, ks: Option<&str>, delta: &str, samples: usize, boxes: usize) -> Res<String> {
    let ctx = Context::new(a)?;
    let ks = match ks {
        Some(s) => parse_list(s)?,
        None => vec![ctx.spec.options.k_scale],
    };
    let delta = parse_delta(delta, ctx.spec.k)?;
    let reports = chart_reports(&ctx.spec, &ctx.cfg, &delta, &ks, samples, boxes)?;
    let mut out = ctx.header("chart", &format!(" delta={} samples={} boxes={}", fmt_floats(&delta), samples, boxes));
    let mut csv = String::from("K,y_at_zero,y_deviation,y_constant,det_min,det_max,lambda_min,lambda_max,volume_min,volume_max\n");
    for (label, r) in &reports {
        out.push_str(&render_chart(label, r));
        let cols = [
            r.k_scale,
            r.y_at_zero,
            r.y_deviation,
            r.y_constant,
            r.det_min,
            r.det_max,
            r.lambda_ratio.0,
            r.lambda_ratio.1,
            r.volume_ratio.0,
            r.volume_ratio.1,
        ];
        csv += &(cols.iter().map(|&v| fmt9(v)).collect::<Vec<_>>().join(",") + "\n");
    }
    write_csv(a.csv.as_deref(), &csv)?;
    Ok(out)
}

fn render_witness(out: &mut String, t: &WitnessTable) {
    let _ = writeln!(out, "a {}", fmt_floats(&t.a));
    let _ = writeln!(out, "b {}", fmt_floats(&t.b));
    out.push_str(&t.to_csv());
    let _ = writeln!(out, "increasing {}", t.is_increasing());
    let _ = writeln!(out, "min_step_growth {}", fmt9(t.min_step_growth()));
    let _ = writeln!(out, "cumulative_growth {}", fmt9(t.cumulative_growth()));
}

fn witness(a: &SpecArgs, p: Option<&str>, b: Option<&str>, list: &str, s: &SampleArgs) -> Res<String> {
    let ctx = Context::new(a)?;
    let c = ctx.catalog()?;
    let poly = ctx.polytope(&c)?;
    let d0 = parse_list(list)?;
    let fields = ctx.compiled();
    let maps = ctx.maps()?;
    let vcfg = volume_config(s);
    let (sep, table, label) = match (p, b) {
        (Some(p), _) => {
            let p: ExponentTuple = p.parse()?;
            let b = b_of_p(&p)?;
            let (sep, t) = necessity_witness(&fields, &maps, &poly, &p, &d0, &vcfg, &ctx.cfg)?;
            (sep, t, format!("p {} b {}", p, fmt_rats(&b)))
        }
        (None, Some(b)) => {
            let b: Vec<BigRational> = b.split(',').map(|x| parse_rational(x.trim())).collect::<Result<_, _>>()?;
            let (sep, t) = necessity_witness_for_b(&fields, &maps, &poly, &b, &d0, &vcfg, &ctx.cfg)?;
            (sep, t, format!("b {}", fmt_rats(&b)))
        }
        (None, None) => return Err(Error::Precondition("witness needs --p or --b".into()).into()),
    };
    let mut out = ctx.header("witness", &sampling_extra(s, ctx.spec.n));
    let _ = writeln!(out, "{label}");
    let _ = writeln!(out, "separating functional {} margin {}", fmt_rats(&sep.a), sep.margin);
    render_witness(&mut out, &table);
    write_csv(a.csv.as_deref(), &table.to_csv())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_args(args: &[&str]) -> Res<String> {
        let mut full = vec!["mlradon"];
        full.extend_from_slice(args);
        run(&crate::Cli::parse_from(full).command)
    }

    #[test]
    fn classify_loomis_whitney_space() {
        let out = run_args(&["classify", "lw3", "--p", "2,2,2"]).unwrap();
        assert!(out.contains("verdict ENDPOINT_UNKNOWN"), "{out}");
        assert!(out.contains("b (1,1,1)"), "{out}");
        let out = run_args(&["classify", "lw3", "--p", "5/2,5/2,5/2"]).unwrap();
        assert!(out.contains("verdict STRONG_TYPE") && out.contains("b (2,2,2)"), "{out}");
    }

    #[test]
    fn polytope_prints_generators_and_round_trips() {
        let out = run_args(&["polytope", "tao-wright"]).unwrap();
        assert!(out.contains("(1,2)") && out.contains("(2,1)"), "{out}");
        let text = out.split("serialized\n").nth(1).unwrap();
        let back = NewtonPolytope::from_text(text).unwrap();
        assert_eq!(back.minimal_generators(), &[vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn headers_carry_defaults() {
        let out = run_args(&["hormander", "heisenberg"]).unwrap();
        assert!(out.starts_with("mlradon hormander\nspec heisenberg n=3 k=2 mode=maps\noptions eps=1/4 cap=3 K=8 seed=0"), "{out}");
        assert!(out.contains("spans true"));
    }

    #[test]
    fn errors_map_to_classes() {
        assert_eq!(run_args(&["classify", "lw2", "--p", "2,x"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_args(&["classify", "lw2", "--p", "2,2,2"]).unwrap_err().exit_code(), 3);
        assert_eq!(run_args(&["polytope", "/nonexistent/spec"]).unwrap_err().exit_code(), 5);
        assert_eq!(run_args(&["witness", "lw2", "--p", "3/2,3/2"]).unwrap_err().exit_code(), 3);
        assert_eq!(run_args(&["ball", "lw2", "--delta", "0.1,-1"]).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn delta_lists() {
        assert_eq!(parse_delta_list("0.2,0.1", 2).unwrap(), vec![vec![0.2, 0.2], vec![0.1, 0.1]]);
        assert_eq!(parse_delta_list("0.2,0.1;0.1,0.05", 2).unwrap(), vec![vec![0.2, 0.1], vec![0.1, 0.05]]);
        assert_eq!(parse_list("1/8,0.5").unwrap(), vec![0.125, 0.5]);
        assert!(parse_delta("0.1,0.2,0.3", 2).is_err());
    }

    #[test]
    fn witness_with_b_on_the_plane() {
        let out = run_args(&["witness", "lw2", "--b", "1/2,1/2", "--samples", "20000"]).unwrap();
        assert!(out.contains("increasing true"), "{out}");
    }
}
