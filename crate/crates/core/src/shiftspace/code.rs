//! Block codes in window form: A(x) ∈ f(X) iff X ∩ (x + M) = x + T for
//! some T in the pattern family.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{is_admissible, relevant_primes, Pattern};
use crate::error::{Error, Result};
use crate::linmaps::ZLinearMap;
use crate::rings::lattice::crt_pair;
use crate::rings::{ideal_power, AlgebraicInt, EtaleAlgebra, Lattice, Modulus};
use crate::sieve::SieveSpec;

/// A block code: linear part A, window M and pattern family 𝒯.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCode {
    pub map: ZLinearMap,
    pub window: Vec<AlgebraicInt<i64>>,
    pub patterns: Vec<BTreeSet<AlgebraicInt<i64>>>,
}

impl WindowCode {
    pub fn new(
        map: ZLinearMap,
        window: impl IntoIterator<Item = AlgebraicInt<i64>>,
        patterns: Vec<BTreeSet<AlgebraicInt<i64>>>,
    ) -> Result<Self> {
        let window: BTreeSet<_> = window.into_iter().collect();
        if window.len() > 64 {
            return Err(Error::BudgetExceeded(
                "windows hold at most 64 points".into(),
            ));
        }
        for w in &window {
            map.source.check(w)?;
        }
        if patterns.is_empty() {
            return Err(Error::InvalidArgument("pattern family is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for t in &patterns {
            if t.is_empty() {
                return Err(Error::InvalidArgument("patterns must be nonempty".into()));
            }
            if !t.is_subset(&window) {
                return Err(Error::InvalidArgument("pattern leaves the window".into()));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::InvalidArgument("pattern listed twice".into()));
            }
        }
        Ok(WindowCode {
            map,
            window: window.into_iter().collect(),
            patterns,
        })
    }

    /// Codes over ℚ with A = id from integer lists.
    pub fn rational(window: &[i64], patterns: &[&[i64]]) -> Result<Self> {
        let q = EtaleAlgebra::rational();
        let pt = |v: &i64| AlgebraicInt::from_i64s(&[*v]);
        Self::new(
            ZLinearMap::identity(&q),
            window.iter().map(pt),
            patterns
                .iter()
                .map(|t| t.iter().map(pt).collect())
                .collect(),
        )
    }

    pub fn source(&self) -> &EtaleAlgebra {
        &self.map.source
    }

    fn mask_of(&self, t: &BTreeSet<AlgebraicInt<i64>>) -> u64 {
        t.iter()
            .map(|p| 1u64 << self.window.binary_search(p).expect("pattern inside window"))
            .fold(0, |a, b| a | b)
    }

    /// Per coordinate, the smallest and largest window offset.
    fn extent(&self) -> (Vec<i64>, Vec<i64>) {
        let n = self.source().degree();
        let mut lo = vec![0; n];
        let mut hi = vec![0; n];
        for (i, (l, h)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            *l = self.window.iter().map(|w| w.coords[i]).min().unwrap_or(0);
            *h = self.window.iter().map(|w| w.coords[i]).max().unwrap_or(0);
        }
        (lo, hi)
    }

    /// Lemma normal form check: every pattern admissible for the source sieve.
    pub fn check_patterns(&self, s: &SieveSpec<i64>) -> Result<()> {
        for t in &self.patterns {
            let p = Pattern::new(self.source(), t.iter().cloned())?;
            if !is_admissible(s, &p)?.admissible {
                return Err(Error::InvalidArgument(format!(
                    "pattern {p} is not admissible"
                )));
            }
        }
        Ok(())
    }
}

/// Closed coordinate box ∏ [lo_i, hi_i].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoxRegion {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidArgument(
                "box corners differ in dimension".into(),
            ));
        }
        Ok(BoxRegion { lo, hi })
    }

    /// `a..b` for one coordinate, `a,c..b,d` for two.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("region `{s}` is not of the form lo..hi"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let nums = |t: &str| {
            t.split(',')
                .map(|v| v.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
        };
        Self::new(nums(a)?, nums(b)?)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .all(|((v, l), h)| l <= v && v <= h)
    }

    pub fn translate(&self, g: &[i64]) -> Self {
        BoxRegion {
            lo: self.lo.iter().zip(g).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(g).map(|(a, b)| a + b).collect(),
        }
    }

    /// Points x with x + [wlo, whi] inside the box.
    fn shrink(&self, wlo: &[i64], whi: &[i64]) -> Self {
        BoxRegion {
            lo: self.lo.iter().zip(wlo).map(|(a, w)| a - w).collect(),
            hi: self.hi.iter().zip(whi).map(|(a, w)| a - w).collect(),
        }
    }

    fn covers(&self, o: &BoxRegion) -> bool {
        (0..self.lo.len())
            .all(|i| o.lo[i] > o.hi[i] || (self.lo[i] <= o.lo[i] && o.hi[i] <= self.hi[i]))
    }
}

impl std::fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let j = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}..{}", j(&self.lo), j(&self.hi))
    }
}

/// f(X) restricted to `region`. With `known = None` the pattern is the whole
/// configuration; otherwise X is only known inside `known`, and every x in
/// the region must see its full window there. A missing region means
/// everything (or everything evaluable, when `known` is given).
pub fn apply_block_code(
    code: &WindowCode,
    x: &Pattern<i64>,
    known: Option<&BoxRegion>,
    region: Option<&BoxRegion>,
) -> Result<Pattern<i64>> {
    if &x.algebra != code.source() {
        return Err(Error::ComponentMismatch(
            "pattern and code use different algebras".into(),
        ));
    }
    let (wlo, whi) = code.extent();
    let region = match (known, region) {
        (Some(k), r) => {
            if x.points.iter().any(|p| !k.contains(&p.coords)) {
                return Err(Error::InvalidArgument(
                    "pattern point outside the known region".into(),
                ));
            }
            let inner = k.shrink(&wlo, &whi);
            match r {
                Some(r) if !inner.covers(r) => {
                    return Err(Error::RegionTooSmall(format!(
                        "region {r} needs its window inside {k}; the largest such region is {inner}"
                    )))
                }
                Some(r) => Some(r.clone()),
                None => Some(inner),
            }
        }
        (None, r) => r.cloned(),
    };
    let masks: HashSet<u64> = code.patterns.iter().map(|t| code.mask_of(t)).collect();
    let mut cand = BTreeSet::new();
    for t in &code.patterns {
        for tp in t {
            for y in &x.points {
                let c = y.sub(tp);
                if region.as_ref().is_none_or(|r| r.contains(&c.coords)) {
                    cand.insert(c);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for c in cand {
        let seen = code
            .window
            .iter()
            .enumerate()
            .filter(|(_, w)| x.points.contains(&c.add(w)))
            .fold(0u64, |a, (i, _)| a | 1 << i);
        if masks.contains(&seen) {
            out.insert(code.map.apply(&c));
        }
    }
    Pattern::new(&code.map.target, out)
}

/// Random admissible pattern by CRT placement: blocks x_i + T_i with x_i
/// avoiding −T_i + R_𝔭 at every prime where the blocks could cover a class,
/// and the blocks pairwise `gap` apart in max-norm.
pub fn random_admissible<R: Rng>(
    s: &SieveSpec<i64>,
    pool: &[BTreeSet<AlgebraicInt<i64>>],
    blocks: usize,
    gap: i64,
    rng: &mut R,
) -> Result<Pattern<i64>> {
    let alg = &s.algebra;
    if pool.is_empty() {
        return Err(Error::InvalidArgument("empty pattern pool".into()));
    }
    let chosen: Vec<&BTreeSet<AlgebraicInt<i64>>> = (0..blocks)
        .map(|_| &pool[rng.gen_range(0..pool.len())])
        .collect();
    let total: usize = chosen.iter().map(|t| t.len()).sum();
    let (primes, _) = relevant_primes(s, total)?;
    let n = alg.degree();
    let mut starts: Vec<Vec<i64>> = Vec::new();
    let mut out = BTreeSet::new();
    for t in &chosen {
        // per component CRT over the relevant primes, in i128
        let mut base = vec![0i128; n];
        let mut steps = vec![vec![0i128; n]; n];
        for c in 0..alg.num_components() {
            let r = alg.range(c);
            let mut xc = vec![0i128; r.len()];
            let mut l = Lattice::<i128>::identity(r.len());
            for q in primes.iter().filter(|q| q.component == c) {
                let ls = s.local_set(q)?;
                if ls.is_empty() {
                    continue;
                }
                let m: Modulus<i128> = ideal_power(q, ls.exponent())?;
                let bad: BTreeSet<Vec<i128>> = t
                    .iter()
                    .flat_map(|tp| {
                        let tc: Vec<i128> = alg
                            .component_coords(tp, c)
                            .iter()
                            .map(|&v| v as i128)
                            .collect();
                        ls.classes
                            .iter()
                            .map(|cl| {
                                let v: Vec<i128> =
                                    cl.iter().zip(&tc).map(|(a, b)| *a as i128 - b).collect();
                                m.lattice.reduce(&v)
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
                let good: Vec<Vec<i128>> = m
                    .residues()
                    .into_iter()
                    .filter(|v| !bad.contains(v))
                    .collect();
                if good.is_empty() {
                    return Err(Error::PreconditionFailed(format!(
                        "a pool pattern is not admissible at {q}"
                    )));
                }
                let pick = &good[rng.gen_range(0..good.len())];
                let (y, inter) = crt_pair(&xc, &l, pick, &m.lattice)?;
                xc = y;
                l = inter;
            }
            for (j, i) in r.clone().enumerate() {
                base[i] = xc[j];
                for (jj, ii) in r.clone().enumerate() {
                    steps[i][ii] = l.rows()[j][jj];
                }
            }
        }
        let mut placed = None;
        for _ in 0..1000 {
            let mut v = base.clone();
            for row in &steps {
                let k = rng.gen_range(-40i128..=40);
                for (a, b) in v.iter_mut().zip(row) {
                    *a += k * b;
                }
            }
            let v: Vec<i64> = v
                .iter()
                .map(|a| i64::try_from(*a).map_err(|_| Error::Overflow(a.to_string())))
                .collect::<Result<_>>()?;
            let far = starts
                .iter()
                .all(|o| o.iter().zip(&v).any(|(a, b)| (a - b).abs() > gap));
            if far {
                placed = Some(v);
                break;
            }
        }
        let v =
            placed.ok_or_else(|| Error::NoWitness("could not space the blocks apart".into()))?;
        let g = AlgebraicInt::new(v.clone());
        for tp in t.iter() {
            out.insert(tp.add(&g));
        }
        starts.push(v);
    }
    Pattern::new(alg, out)
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    /// Also check f(f(X)) = X.
    pub involution: bool,
    /// A block code g claimed to give preimages: f(g(Y)) = Y with g(Y)
    /// admissible for R, for random Y admissible for S.
    pub preimage: Option<WindowCode>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 100,
            seed: 1,
            involution: false,
            preimage: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwinerFailure {
    pub trial: usize,
    pub x: Vec<String>,
    pub g: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwinerReport {
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<IntertwinerFailure>,
}

impl IntertwinerReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn bounding_box(x: &Pattern<i64>, pad: i64) -> BoxRegion {
    let n = x.algebra.degree();
    let mut lo = vec![0; n];
    let mut hi = vec![0; n];
    for i in 0..n {
        lo[i] = x.points.iter().map(|p| p.coords[i]).min().unwrap_or(0) - pad;
        hi[i] = x.points.iter().map(|p| p.coords[i]).max().unwrap_or(0) + pad;
    }
    BoxRegion { lo, hi }
}

fn code_pool(code: &WindowCode) -> Vec<BTreeSet<AlgebraicInt<i64>>> {
    let mut pool = code.patterns.clone();
    let zero: BTreeSet<_> = [code.source().zero()].into_iter().collect();
    if !pool.contains(&zero) {
        pool.push(zero);
    }
    pool
}

/// Randomized check that the code intertwines translations and maps
/// R-admissible sets to S-admissible sets.
pub fn verify_intertwiner(
    code: &WindowCode,
    r: &SieveSpec<i64>,
    s: &SieveSpec<i64>,
    cfg: &VerifyConfig,
) -> Result<IntertwinerReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pool: Vec<_> = code_pool(code)
        .into_iter()
        .filter(|t| {
            Pattern::new(code.source(), t.iter().cloned())
                .and_then(|p| is_admissible(r, &p))
                .map(|a| a.admissible)
                .unwrap_or(false)
        })
        .collect();
    let (wlo, whi) = code.extent();
    let diam = wlo.iter().zip(&whi).map(|(a, b)| b - a).max().unwrap_or(0);
    let n = code.source().degree();
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let blocks = rng.gen_range(1..=4);
        let x = random_admissible(r, &pool, blocks, 2 * diam + 2, &mut rng)?;
        let g = AlgebraicInt::new((0..n).map(|_| rng.gen_range(-20..=20)).collect());
        let fail = |reason: String| IntertwinerFailure {
            trial,
            x: x.to_strings(),
            g: code.source().format_element(&g),
            reason,
        };
        if !is_admissible(r, &x)?.admissible {
            failures.push(fail("generated pattern is not admissible".into()));
            continue;
        }
        let known = bounding_box(&x, diam + 2);
        let fx = apply_block_code(code, &x, Some(&known), None)?;
        let fgx = apply_block_code(
            code,
            &x.translate(&g),
            Some(&known.translate(&g.coords)),
            None,
        )?;
        if fgx != fx.translate(&code.map.apply(&g)) {
            failures.push(fail("f(g + X) differs from A(g) + f(X)".into()));
            continue;
        }
        let whole = apply_block_code(code, &x, None, None)?;
        let adm = is_admissible(s, &whole)?;
        if !adm.admissible {
            failures.push(fail(format!(
                "f(X) = {whole} is not admissible at {}",
                adm.violation.expect("violation")
            )));
            continue;
        }
        if cfg.involution && apply_block_code(code, &whole, None, None)? != x {
            failures.push(fail("f(f(X)) differs from X".into()));
            continue;
        }
        if let Some(pre) = &cfg.preimage {
            let pool_s: Vec<_> = code_pool(pre)
                .into_iter()
                .filter(|t| {
                    Pattern::new(&pre.map.source, t.iter().cloned())
                        .and_then(|p| is_admissible(s, &p))
                        .map(|a| a.admissible)
                        .unwrap_or(false)
                })
                .collect();
            let y = random_admissible(s, &pool_s, blocks, 2 * diam + 4, &mut rng)?;
            let px = apply_block_code(pre, &y, None, None)?;
            if !is_admissible(r, &px)?.admissible {
                failures.push(fail(format!("preimage {px} of {y} is not admissible")));
                continue;
            }
            if apply_block_code(code, &px, None, None)? != y {
                failures.push(fail(format!("f maps the preimage of {y} elsewhere")));
                continue;
            }
        }
    }
    Ok(IntertwinerReport {
        trials: cfg.trials,
        passed: cfg.trials - failures.len(),
        failures,
    })
}

/// Code file: `algebra`, optional `map` (row-major), `window`, then one
/// `pattern` line per member of 𝒯. `#` starts a comment.
pub fn parse_code(text: &str) -> Result<WindowCode> {
    let mut alg = None;
    let mut entries: Option<Vec<i64>> = None;
    let mut window = None;
    let mut patterns = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let need = || {
            alg.clone()
                .ok_or_else(|| Error::Parse("`algebra` must come first".into()))
        };
        match key {
            "algebra" => alg = Some(EtaleAlgebra::parse(rest)?),
            "map" => {
                entries = Some(
                    rest.split([',', ' '])
                        .filter(|t| !t.is_empty())
                        .map(|t| {
                            t.parse::<i64>()
                                .map_err(|_| Error::Parse(format!("bad map entry `{t}`")))
                        })
                        .collect::<Result<_>>()?,
                )
            }
            "window" => window = Some(Pattern::<i64>::parse(&need()?, rest)?),
            "pattern" => patterns.push(Pattern::<i64>::parse(&need()?, rest)?.points),
            other => return Err(Error::Parse(format!("unknown code line `{other}`"))),
        }
    }
    let alg = alg.ok_or_else(|| Error::Parse("missing `algebra` line".into()))?;
    let map = match entries {
        Some(e) => ZLinearMap::from_row_major(alg.clone(), alg.clone(), &e)?,
        None => ZLinearMap::identity(&alg),
    };
    let window = window.ok_or_else(|| Error::Parse("missing `window` line".into()))?;
    WindowCode::new(map, window.points, patterns)
}

pub fn format_code(code: &WindowCode) -> String {
    let alg = code.source();
    let pts = |v: &mut dyn Iterator<Item = &AlgebraicInt<i64>>| {
        v.map(|p| alg.format_element(p))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = format!("algebra {alg}\n");
    let entries: Vec<String> = code
        .map
        .matrix
        .iter()
        .flatten()
        .map(|v| v.to_string())
        .collect();
    out.push_str(&format!("map {}\n", entries.join(" ")));
    out.push_str(&format!("window {}\n", pts(&mut code.window.iter())));
    for t in &code.patterns {
        out.push_str(&format!("pattern {}\n", pts(&mut t.iter())));
    }
    out
}
