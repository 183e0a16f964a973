//! Acceptance run: one PASS/FAIL line per criterion, with detail lines
//! indented below. Exits non-zero on any failure that is not a documented
//! known deviation (see README).

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use qmark_cli::suites::{self, run_suite, SuiteReport};
use qmark_cli::RunConfig;
use qmark_core::poly::CPoly;
use qmark_core::sporadic::{catalog, quarter_partition, run_pipeline, search_target, sixth_partition};
use qmark_core::Complex64;

/// Failures tolerated by the exit code: the characteristic orbits of the
/// sixth catalog are {4, 12}, not {4, 4, 8} (two listed sublists are not
/// invariant and join into one orbit of 12).
const KNOWN_DEVIATIONS: [&str; 1] = ["9:sixth-orbit-sizes"];

const VERIFY_ALL_BUDGET: Duration = Duration::from_secs(600);

struct Part {
    id: String,
    ok: bool,
    detail: String,
}

struct Criterion {
    number: u32,
    title: &'static str,
    parts: Vec<Part>,
}

impl Criterion {
    fn new(number: u32, title: &'static str) -> Self {
        Criterion {
            number,
            title,
            parts: Vec::new(),
        }
    }

    fn part(&mut self, id: &str, ok: bool, detail: impl Into<String>) {
        self.parts.push(Part {
            id: format!("{}:{id}", self.number),
            ok,
            detail: detail.into(),
        });
    }

    fn suite(&mut self, report: Result<SuiteReport, String>, pinned: &[(&str, f64, f64)]) {
        for &(name, actual, expect) in pinned {
            self.part(&format!("tol-{name}"), actual == expect, format!("pinned {name} = {expect:e} (code: {actual:e})"));
        }
        match report {
            Ok(r) => {
                let mut detail = format!(
                    "suite {}: {} checks, max residual {:.3e}, worst residual/limit {:.3}",
                    r.suite, r.n_checks, r.max_residual, r.worst_ratio
                );
                for c in &r.controls {
                    detail.push_str(&format!("; control '{}' = {:.3e} (needs >= {:e})", c.label, c.residual, c.limit));
                }
                for f in r.failures.iter().take(3) {
                    detail.push_str(&format!("; FAILED {} = {:.3e} vs {:.3e}", f.label, f.residual, f.limit));
                }
                self.part(&r.suite, r.pass, detail);
            }
            Err(e) => self.part("suite", false, e),
        }
    }

    fn ok(&self) -> bool {
        self.parts.iter().all(|p| p.ok)
    }

    fn print(&self) {
        let status = if self.ok() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {}", self.number, self.title);
        for p in &self.parts {
            println!("    [{}] {}: {}", if p.ok { "ok" } else { "FAIL" }, p.id, p.detail);
        }
    }
}

fn suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport, String> {
    run_suite(name, cfg).map_err(|e| e.to_string())
}

fn sizes(orbits: &[qmark_core::sporadic::OrbitBasis]) -> Vec<usize> {
    let mut s: Vec<usize> = orbits.iter().map(|o| o.orbit_size).collect();
    s.sort();
    s
}

fn criterion9(cfg: &RunConfig) -> Criterion {
    let mut c = Criterion::new(9, "theta-constant pipeline");
    match quarter_partition() {
        Ok(q) => {
            let got = sizes(&q);
            c.part("quarter-orbit-sizes", got == [1, 3, 6], format!("quarter catalog orbit sizes {got:?}, expected [1, 3, 6]"));
        }
        Err(e) => c.part("quarter-orbit-sizes", false, e.to_string()),
    }
    match sixth_partition() {
        Ok(q) => {
            let got = sizes(&q);
            c.part(
                "sixth-orbit-sizes",
                got == [4, 4, 8],
                format!(
                    "sixth catalog orbit sizes {got:?}, expected [4, 4, 8]; the listed sublists of sizes 4 and 8 \
                     are not invariant (fit residual check) and close into one orbit of 12"
                ),
            );
        }
        Err(e) => c.part("sixth-orbit-sizes", false, e.to_string()),
    }
    match catalog("gamma2-classic").and_then(|b| run_pipeline(&b.functions(), cfg.seed as usize)) {
        Ok(r) => {
            let expect = CPoly::from_real(&[0.0, 3.0, -3.0]);
            let gap = (0..r.poly.coeffs().len().max(3))
                .map(|i| {
                    let a = r.poly.coeffs().get(i).copied().unwrap_or_default();
                    let b = expect.coeffs().get(i).copied().unwrap_or_default();
                    (a - b).norm()
                })
                .fold(0.0, f64::max);
            let coeffs: Vec<String> = r.poly.coeffs().iter().map(|z| format!("{z:.9}")).collect();
            c.part("p22", gap < 1e-7, format!("P coefficients [{}], max gap to 3k(1-k) {gap:.2e} (tol 1e-7)", coeffs.join(", ")));
            let inside: Vec<Complex64> = r.roots_in_d.iter().map(|x| x.value).collect();
            let ok = inside.len() == 1 && inside[0].norm() < 1e-9;
            let shown: Vec<String> = inside.iter().map(|z| format!("{z:.2e}")).collect();
            c.part("p22-roots", ok, format!("roots in D [{}], expected {{0}}", shown.join(", ")));
        }
        Err(e) => c.part("p22", false, e.to_string()),
    }
    c.suite(suite("sporadic", cfg), &[("kernel lyg", suites::KERNEL_LYG_TOL, 1e-6)]);
    // exploratory: reported, never a failure
    match search_target(Complex64::new(0.5, 0.5), cfg.seed as usize) {
        Ok(s) => c.part(
            "search-1/2+i/2 (exploratory)",
            true,
            format!("searched {} bases; found in {:?}", s.entries.len(), s.found_in),
        ),
        Err(e) => c.part("search-1/2+i/2 (exploratory)", true, format!("search did not run: {e}")),
    }
    c
}

fn qmark(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_qmark"))
        .args(args)
        .output()
        .expect("qmark binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion10() -> Criterion {
    let mut c = Criterion::new(10, "determinism and end-to-end verification");
    let runs: [&[&str]; 4] = [
        &["plot", "finite:-1/7,4/7,4/7", "--grid", "512"],
        &["sporadic", "quarter-orbit", "--pairs", "--seed", "3"],
        &["geval", "--kappa", "0.5", "--z", "2i", "--method", "both", "--depth", "16"],
        &["verify", "prop5", "--seed", "7"],
    ];
    for args in runs {
        let (a, code_a) = qmark(args);
        let (b, code_b) = qmark(args);
        let ok = a == b && code_a == 0 && code_b == 0 && !a.is_empty();
        c.part(&format!("repeat `{}`", args.join(" ")), ok, format!("{} bytes, exit codes {code_a}/{code_b}", a.len()));
    }
    let start = Instant::now();
    let (out, code) = qmark(&["verify", "--all"]);
    let took = start.elapsed();
    let pass = String::from_utf8_lossy(&out).contains("\"pass\": true\n}");
    c.part(
        "verify-all",
        code == 0 && pass && took < VERIFY_ALL_BUDGET,
        format!("`qmark verify --all` exit {code} in {:.1} s (budget {} s)", took.as_secs_f64(), VERIFY_ALL_BUDGET.as_secs()),
    );
    c
}

fn main() {
    let cfg = RunConfig::default();
    let mut all = Vec::new();

    let mut c = Criterion::new(1, "question-mark identities");
    c.suite(
        suite("qmark-fe", &cfg),
        &[("functional equations", suites::QMARK_FE_TOL, 1e-12), ("spot values", suites::QMARK_SPOT_TOL, 1e-14)],
    );
    all.push(c);

    let mut c = Criterion::new(2, "self-similarity within the contraction bound");
    c.suite(suite("selfsim", &cfg), &[]);
    all.push(c);

    let mut c = Criterion::new(3, "closed form vs iteration");
    c.suite(suite("closed-form", &cfg), &[]);
    all.push(c);

    let mut c = Criterion::new(4, "period function");
    c.suite(suite("g-methods", &cfg), &[]);
    c.suite(suite("centr", &cfg), &[("centr", suites::CENTR_TOL, 1e-5)]);
    c.suite(suite("dyadic", &cfg), &[("dyadic", suites::DYADIC_TOL, 1e-5)]);
    c.part("depth", cfg.depth == 24, format!("series depth {}", cfg.depth));
    all.push(c);

    let mut c = Criterion::new(5, "Eisenstein series");
    c.suite(
        suite("quasimodular", &cfg),
        &[("quasi-modularity", suites::QUASIMODULAR_TOL, 1e-9), ("three-term", suites::G2_CENTR_TOL, 1e-8)],
    );
    all.push(c);

    let mut c = Criterion::new(6, "mean-modular forms");
    c.suite(suite("lyg", &cfg), &[("lyg", suites::LYG_TOL, 1e-5)]);
    c.suite(
        suite("extract", &cfg),
        &[("extraction", suites::EXTRACT_TOL, 1e-8), ("control", suites::CONTROL_MARGIN, 1e-2)],
    );
    c.suite(suite("perein", &cfg), &[("perein", suites::PEREIN_TOL, 1e-7)]);
    all.push(c);

    let mut c = Criterion::new(7, "four identities for full-modular forms");
    c.suite(suite("prop4", &cfg), &[("prop4", suites::PROP4_TOL, 1e-8)]);
    all.push(c);

    let mut c = Criterion::new(8, "theta transformation rules");
    c.suite(
        suite("prop5", &cfg),
        &[
            ("rules", suites::PROP5_TOL, 1e-8),
            ("jacobi", suites::JACOBI_TOL, 1e-10),
            ("odd", suites::ODD_THETA_TOL, 1e-12),
        ],
    );
    all.push(c);

    all.push(criterion9(&cfg));
    all.push(criterion10());

    let mut unexpected = BTreeSet::new();
    for c in &all {
        c.print();
        for p in c.parts.iter().filter(|p| !p.ok) {
            if !KNOWN_DEVIATIONS.contains(&p.id.as_str()) {
                unexpected.insert(p.id.clone());
            }
        }
    }
    let failed = all.iter().filter(|c| !c.ok()).count();
    println!("{} of {} criteria pass", all.len() - failed, all.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
    if failed > 0 {
        println!("remaining failures are documented known deviations: {KNOWN_DEVIATIONS:?}");
    }
}
