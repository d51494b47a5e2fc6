//! Molecular Hamiltonians: FCIDUMP ingestion, the 1D Hubbard model, sweep
//! manifests and the qubit image.
//!
//! Spatial orbital `k` becomes spin orbitals `2k` (α) and `2k + 1` (β), and
//! spin orbital `p` is qubit `p`.
//!
//! # FCIDUMP grammar
//!
//! ```text
//! &FCI NORB=2,NELEC=2,MS2=0,
//!  ORBSYM=1,1,
//!  ISYM=1,
//! &END
//!   0.6757101548  1  1  1  1
//!  -1.2524635735  1  1  0  0
//!   0.7137539936  0  0  0  0
//! ```
//!
//! The namelist runs from `&FCI` to `&END`, `$END` or `/` and may span
//! lines; `NORB` and `NELEC` are required. Each following line is
//! `value i j k l` with 1-based indices: all four nonzero is the chemists'
//! integral `(ij|kl)`, `k = l = 0` is `h_ij`, all zero is the core energy and
//! `i > 0, j = k = l = 0` (orbital energies) is ignored. Values may use a
//! Fortran `D` exponent. Missing permutations are filled in from the 8-fold
//! symmetry of real integrals.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{jordan_wigner, FermionTerm, QubitOperator};

/// Tolerance for deciding that two listings of the same integral agree.
const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Second-quantized Hamiltonian over spin orbitals:
/// `Σ h_pq c_p†c_q + ½ Σ (pq|rs) c_p†c_r†c_s c_q + e_nuc`.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularHamiltonian {
    n: usize,
    n_electrons: usize,
    one_body: DMatrix<f64>,
    /// Row-major `n⁴` array of chemists' integrals `(pq|rs)`.
    two_body: Vec<f64>,
    nuclear_repulsion: f64,
}

impl MolecularHamiltonian {
    pub fn new(
        n_electrons: usize,
        one_body: DMatrix<f64>,
        two_body: Vec<f64>,
        nuclear_repulsion: f64,
    ) -> Result<Self> {
        let n = one_body.nrows();
        if !one_body.is_square() {
            return Err(Error::Validation("one-body matrix must be square".into()));
        }
        if two_body.len() != n.pow(4) {
            return Err(Error::Validation(format!(
                "two-body array has {} entries, expected {}",
                two_body.len(),
                n.pow(4)
            )));
        }
        if n_electrons > n {
            return Err(Error::Validation(format!(
                "{n_electrons} electrons do not fit in {n} spin orbitals"
            )));
        }
        let asym = (&one_body - one_body.transpose()).amax();
        if asym > DUPLICATE_TOLERANCE {
            return Err(Error::Validation(format!("one-body matrix not symmetric (off by {asym})")));
        }
        Ok(Self {
            n,
            n_electrons,
            one_body,
            two_body,
            nuclear_repulsion,
        })
    }

    /// Expands spatial integrals (`eri` row-major `norb⁴`, chemists') to
    /// interleaved spin orbitals.
    pub fn from_spatial(
        n_electrons: usize,
        h: &DMatrix<f64>,
        eri: &[f64],
        nuclear_repulsion: f64,
    ) -> Result<Self> {
        let norb = h.nrows();
        if eri.len() != norb.pow(4) {
            return Err(Error::Validation(format!(
                "spatial two-body array has {} entries, expected {}",
                eri.len(),
                norb.pow(4)
            )));
        }
        let n = 2 * norb;
        let one_body = DMatrix::from_fn(n, n, |p, q| {
            if p % 2 == q % 2 {
                h[(p / 2, q / 2)]
            } else {
                0.0
            }
        });
        let mut two_body = vec![0.0; n.pow(4)];
        for p in 0..n {
            for q in (p % 2..n).step_by(2) {
                for r in 0..n {
                    for s in (r % 2..n).step_by(2) {
                        let (a, b, c, d) = (p / 2, q / 2, r / 2, s / 2);
                        two_body[((p * n + q) * n + r) * n + s] =
                            eri[((a * norb + b) * norb + c) * norb + d];
                    }
                }
            }
        }
        Self::new(n_electrons, one_body, two_body, nuclear_repulsion)
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        self.nuclear_repulsion
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[(p, q)]
    }

    pub fn one_body_matrix(&self) -> &DMatrix<f64> {
        &self.one_body
    }

    /// Chemists' integral `(pq|rs)` over spin orbitals.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.two_body[((p * n + q) * n + r) * n + s]
    }

    /// Jordan-Wigner image; the identity coefficient carries `e_nuc`.
    pub fn to_qubit_operator(&self) -> QubitOperator {
        let n = self.n;
        let mut op = QubitOperator::identity(Complex64::new(self.nuclear_repulsion, 0.0));
        for p in 0..n {
            for q in 0..n {
                let h = self.one_body(p, q);
                if h != 0.0 {
                    op.add_operator(&jordan_wigner(&FermionTerm::one_body(p, q)), Complex64::new(h, 0.0));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.two_body(p, q, r, s);
                        if v == 0.0 || p == r || q == s {
                            continue;
                        }
                        // c_p† c_r† c_s c_q
                        let term = FermionTerm::two_body(p, r, q, s);
                        op.add_operator(&jordan_wigner(&term), Complex64::new(0.5 * v, 0.0));
                    }
                }
            }
        }
        op
    }
}

/// Open-chain 1D Hubbard model with hopping `t` and on-site repulsion `u`.
pub fn hubbard(sites: usize, t: f64, u: f64, n_electrons: usize) -> Result<MolecularHamiltonian> {
    if sites < 2 {
        return Err(Error::Domain(format!("Hubbard chain needs at least 2 sites, got {sites}")));
    }
    let h = DMatrix::from_fn(sites, sites, |i, j| if i.abs_diff(j) == 1 { -t } else { 0.0 });
    let mut eri = vec![0.0; sites.pow(4)];
    for i in 0..sites {
        eri[((i * sites + i) * sites + i) * sites + i] = u;
    }
    MolecularHamiltonian::from_spatial(n_electrons, &h, &eri, 0.0)
}

/// Parsed contents of an FCIDUMP file in spatial orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct Fcidump {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub orbsym: Vec<i64>,
    pub isym: i64,
    pub core_energy: f64,
    /// Symmetric `norb × norb` one-electron integrals.
    pub h: DMatrix<f64>,
    /// Row-major `norb⁴` chemists' integrals, symmetry-completed.
    pub eri: Vec<f64>,
}

fn eri_orbit(i: usize, j: usize, k: usize, l: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (i, j, k, l),
        (j, i, k, l),
        (i, j, l, k),
        (j, i, l, k),
        (k, l, i, j),
        (l, k, i, j),
        (k, l, j, i),
        (l, k, j, i),
    ]
}

fn parse_value(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "e").parse().ok()
}

fn parse_int(value: &str, key: &str, line: usize) -> Result<i64> {
    value.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{key}: expected an integer, got {value:?}"),
    })
}

impl Fcidump {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        // Header namelist: collect everything up to the terminator.
        let mut header = String::new();
        let mut header_line = 1;
        let mut started = false;
        let mut body_start = None;
        for (ln, line) in lines.by_ref() {
            let trimmed = line.trim();
            if !started {
                if trimmed.is_empty() {
                    continue;
                }
                let upper = trimmed.to_ascii_uppercase();
                if !upper.starts_with("&FCI") {
                    return Err(Error::Parse {
                        line: ln,
                        message: "expected `&FCI` header".into(),
                    });
                }
                started = true;
                header_line = ln;
                let rest = &trimmed[4..];
                if let Some(end) = namelist_end(rest) {
                    header.push_str(&rest[..end]);
                    body_start = Some(ln);
                    break;
                }
                header.push_str(rest);
                header.push(',');
                continue;
            }
            if let Some(end) = namelist_end(trimmed) {
                header.push_str(&trimmed[..end]);
                body_start = Some(ln);
                break;
            }
            header.push_str(trimmed);
            header.push(',');
        }
        if body_start.is_none() {
            return Err(Error::Parse {
                line: header_line,
                message: "unterminated `&FCI` namelist".into(),
            });
        }

        let mut norb = None;
        let mut nelec = None;
        let mut ms2 = 0;
        let mut isym = 1;
        let mut orbsym = Vec::new();
        let mut key: Option<String> = None;
        for field in header.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let value = if let Some((k, v)) = field.split_once('=') {
                key = Some(k.trim().to_ascii_uppercase());
                v.trim()
            } else {
                // continuation of a list-valued key such as ORBSYM
                field
            };
            if value.is_empty() {
                continue;
            }
            match key.as_deref() {
                Some("NORB") => norb = Some(parse_int(value, "NORB", header_line)?),
                Some("NELEC") => nelec = Some(parse_int(value, "NELEC", header_line)?),
                Some("MS2") => ms2 = parse_int(value, "MS2", header_line)?,
                Some("ISYM") => isym = parse_int(value, "ISYM", header_line)?,
                Some("ORBSYM") => orbsym.push(parse_int(value, "ORBSYM", header_line)?),
                Some(_) => {}
                None => {
                    return Err(Error::Parse {
                        line: header_line,
                        message: format!("header field {field:?} has no key"),
                    })
                }
            }
        }
        let norb = norb.ok_or_else(|| Error::Parse {
            line: header_line,
            message: "header lacks NORB".into(),
        })?;
        let nelec = nelec.ok_or_else(|| Error::Parse {
            line: header_line,
            message: "header lacks NELEC".into(),
        })?;
        if norb <= 0 {
            return Err(Error::Validation(format!("NORB must be positive, got {norb}")));
        }
        if nelec < 0 || nelec > 2 * norb {
            return Err(Error::Validation(format!("NELEC {nelec} incompatible with NORB {norb}")));
        }
        let norb = norb as usize;
        if !orbsym.is_empty() && orbsym.len() != norb {
            return Err(Error::Validation(format!(
                "ORBSYM lists {} orbitals but NORB is {norb}",
                orbsym.len()
            )));
        }

        let mut h = DMatrix::zeros(norb, norb);
        let mut eri = vec![0.0; norb.pow(4)];
        let mut core_energy = 0.0;
        let mut seen: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
        let mut core_seen: Option<f64> = None;
        for (ln, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            if tokens.len() != 5 {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("expected `value i j k l`, got {} fields", tokens.len()),
                });
            }
            let value = parse_value(tokens[0]).ok_or_else(|| Error::Parse {
                line: ln,
                message: format!("bad value {:?}", tokens[0]),
            })?;
            let mut idx = [0usize; 4];
            for (slot, tok) in idx.iter_mut().zip(&tokens[1..]) {
                *slot = tok.parse().map_err(|_| Error::Parse {
                    line: ln,
                    message: format!("bad index {tok:?}"),
                })?;
                if *slot > norb {
                    return Err(Error::Validation(format!(
                        "line {ln}: index {slot} exceeds NORB {norb}"
                    )));
                }
            }
            let [i, j, k, l] = idx;
            let check = |prev: Option<f64>| -> Result<()> {
                match prev {
                    Some(p) if (p - value).abs() > DUPLICATE_TOLERANCE => Err(Error::Validation(format!(
                        "line {ln}: value {value} conflicts with earlier {p} for the same integral"
                    ))),
                    _ => Ok(()),
                }
            };
            match (i, j, k, l) {
                (0, 0, 0, 0) => {
                    check(core_seen)?;
                    core_seen = Some(value);
                    core_energy = value;
                }
                (_, 0, 0, 0) => {}
                (i, j, 0, 0) if i > 0 && j > 0 => {
                    let key = (i.max(j), i.min(j), 0, 0);
                    check(seen.get(&key).copied())?;
                    seen.insert(key, value);
                    h[(i - 1, j - 1)] = value;
                    h[(j - 1, i - 1)] = value;
                }
                (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => {
                    let key = canonical_eri(i, j, k, l);
                    check(seen.get(&key).copied())?;
                    seen.insert(key, value);
                    for (a, b, c, d) in eri_orbit(i - 1, j - 1, k - 1, l - 1) {
                        eri[((a * norb + b) * norb + c) * norb + d] = value;
                    }
                }
                _ => {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("unsupported index pattern {i} {j} {k} {l}"),
                    })
                }
            }
        }

        Ok(Self {
            norb,
            nelec: nelec as usize,
            ms2,
            orbsym,
            isym,
            core_energy,
            h,
            eri,
        })
    }

    /// Emits the canonical representatives (`i ≥ j`, `k ≥ l`, `ij ≥ kl`) of
    /// every nonzero integral, in the same grammar [`Fcidump::parse`] reads.
    pub fn to_text(&self) -> String {
        let n = self.norb;
        let mut out = String::new();
        let orbsym = if self.orbsym.is_empty() {
            vec![1; n]
        } else {
            self.orbsym.clone()
        };
        let syms: Vec<String> = orbsym.iter().map(|s| s.to_string()).collect();
        writeln!(out, "&FCI NORB={},NELEC={},MS2={},", n, self.nelec, self.ms2).unwrap();
        writeln!(out, " ORBSYM={},", syms.join(",")).unwrap();
        writeln!(out, " ISYM={},", self.isym).unwrap();
        writeln!(out, "&END").unwrap();
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                            continue;
                        }
                        let v = self.eri[((i * n + j) * n + k) * n + l];
                        if v != 0.0 {
                            writeln!(out, "{v:e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1).unwrap();
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = self.h[(i, j)];
                if v != 0.0 {
                    writeln!(out, "{v:e} {} {} 0 0", i + 1, j + 1).unwrap();
                }
            }
        }
        writeln!(out, "{:e} 0 0 0 0", self.core_energy).unwrap();
        out
    }

    pub fn to_hamiltonian(&self) -> Result<MolecularHamiltonian> {
        MolecularHamiltonian::from_spatial(self.nelec, &self.h, &self.eri, self.core_energy)
    }
}

fn canonical_eri(i: usize, j: usize, k: usize, l: usize) -> (usize, usize, usize, usize) {
    let a = (i.max(j), i.min(j));
    let b = (k.max(l), k.min(l));
    let (x, y) = if a >= b { (a, b) } else { (b, a) };
    (x.0, x.1, y.0, y.1)
}

fn namelist_end(s: &str) -> Option<usize> {
    let upper = s.to_ascii_uppercase();
    [upper.find("&END"), upper.find("$END"), upper.find('/')]
        .into_iter()
        .flatten()
        .min()
}

pub fn parse_fcidump(text: &str) -> Result<MolecularHamiltonian> {
    Fcidump::parse(text)?.to_hamiltonian()
}

pub fn read_fcidump(path: &Path) -> Result<MolecularHamiltonian> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fcidump(&text)
}

/// Hubbard parameters as they appear in a manifest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardSpec {
    pub sites: usize,
    pub t: f64,
    pub u: f64,
    pub electrons: usize,
}

/// One manifest entry: exactly one of `fcidump` (path relative to the
/// manifest) or `hubbard`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fcidump: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hubbard: Option<HubbardSpec>,
}

/// A sweep manifest, TOML (`[[geometry]]` tables) or JSON
/// (`{"geometry": [...]}`), chosen by file extension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub geometry: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryPoint {
    pub label: String,
    pub hamiltonian: MolecularHamiltonian,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let manifest: Manifest = if is_json {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if self.geometry.is_empty() {
            return Err(Error::Validation("manifest lists no geometries".into()));
        }
        let mut labels = BTreeSet::new();
        for g in &self.geometry {
            if !labels.insert(g.label.as_str()) {
                return Err(Error::Validation(format!("duplicate geometry label {:?}", g.label)));
            }
            if g.fcidump.is_some() == g.hubbard.is_some() {
                return Err(Error::Validation(format!(
                    "geometry {:?} needs exactly one of `fcidump` or `hubbard`",
                    g.label
                )));
            }
        }
        Ok(())
    }

    /// Builds every Hamiltonian, resolving paths against `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<Vec<GeometryPoint>> {
        self.validate()?;
        self.geometry
            .iter()
            .map(|g| {
                let hamiltonian = match (&g.fcidump, &g.hubbard) {
                    (Some(p), None) => read_fcidump(&base_dir.join(p)).map_err(|e| match e {
                        Error::Parse { line, message } => Error::Parse {
                            line,
                            message: format!("{}: {message}", p.display()),
                        },
                        Error::Validation(m) => Error::Validation(format!("{}: {m}", p.display())),
                        other => other,
                    })?,
                    (None, Some(s)) => hubbard(s.sites, s.t, s.u, s.electrons)?,
                    _ => unreachable!("validated above"),
                };
                Ok(GeometryPoint {
                    label: g.label.clone(),
                    hamiltonian,
                })
            })
            .collect()
    }
}

/// Reads a manifest and loads every geometry it lists.
pub fn load_sweep(path: &Path) -> Result<Vec<GeometryPoint>> {
    let manifest = Manifest::read(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    manifest.load(base)
}
