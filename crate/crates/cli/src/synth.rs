//! Deterministic synthetic corpora for tests and benchmarks.
//!
//! Records are drawn from a seeded generator, so a given configuration
//! always yields the same corpus. Countries get their own field profiles
//! and AI records lean towards a configurable set of fields, which gives
//! the metrics non-trivial structure to recover.

use std::collections::BTreeMap;
use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use techspace::corpus::{FieldConcordance, FieldId, KeywordSet, PatentRecord, FIELD_COUNT};

const WORDS: &[&str] = &[
    "apparatus",
    "method",
    "device",
    "system",
    "assembly",
    "circuit",
    "valve",
    "sensor",
    "housing",
    "module",
    "composition",
    "process",
    "signal",
    "vehicle",
    "engine",
    "display",
    "antenna",
    "polymer",
    "coating",
    "bearing",
    "controller",
    "battery",
    "fibre",
    "lens",
    "pump",
    "membrane",
    "catalyst",
    "frame",
    "cable",
    "terminal",
    "substrate",
    "protein",
    "compound",
    "imaging",
    "storage",
    "channel",
    "laser",
    "heating",
    "cooling",
    "packaging",
    "measuring",
    "mounting",
    "wireless",
    "optical",
    "thermal",
    "fluid",
    "improved",
    "portable",
    "modular",
    "efficient",
    "layered",
    "flexible",
    "rotary",
    "compact",
];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub records: usize,
    pub seed: u64,
    /// Probability that a record is an AI record, before the time trend.
    pub ai_share: f64,
    pub years: (i32, i32),
    /// Country codes with sampling weights.
    pub countries: Vec<(String, f64)>,
    /// Fields AI records draw from preferentially.
    pub ai_fields: Vec<String>,
    /// Probability that an AI record's first field comes from `ai_fields`.
    pub ai_focus: f64,
    /// Share of records carrying an IPC symbol outside the concordance.
    pub unmapped_share: f64,
    pub max_codes: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let countries = [
            ("US", 24.0),
            ("JP", 22.0),
            ("CN", 18.0),
            ("KR", 9.0),
            ("DE", 8.0),
            ("FR", 4.0),
            ("GB", 4.0),
            ("IT", 2.0),
            ("NL", 2.0),
            ("CH", 2.0),
            ("SE", 1.5),
            ("CA", 1.5),
            ("IN", 1.0),
            ("TW", 1.0),
        ];
        SynthConfig {
            records: 1000,
            seed: 7,
            ai_share: 0.12,
            years: (1974, 2018),
            countries: countries.iter().map(|&(c, w)| (c.to_string(), w)).collect(),
            ai_fields: [
                "Computer technology",
                "IT methods for management",
                "Measurement",
                "Control",
                "Digital communication",
                "Basic communication processes",
                "Analysis of biological materials",
            ]
            .map(String::from)
            .to_vec(),
            ai_focus: 0.8,
            unmapped_share: 0.02,
            max_codes: 4,
        }
    }
}

/// Sample IPC symbols per field, taken from a concordance.
fn symbol_pools(conc: &FieldConcordance) -> Vec<Vec<String>> {
    let mut pools = vec![Vec::new(); FIELD_COUNT];
    for (prefix, field) in conc.entries() {
        let symbol = if prefix.ends_with('/') {
            format!("{prefix}00")
        } else if prefix.len() == 4 {
            // Skip main groups claimed by a longer prefix.
            match (1..100)
                .map(|g| format!("{prefix}{g}/00"))
                .find(|s| conc.lookup(s) == Some(field))
            {
                Some(s) => s,
                None => continue,
            }
        } else {
            continue;
        };
        pools[field.0 as usize].push(symbol);
    }
    pools
}

pub struct Generator {
    cfg: SynthConfig,
    rng: ChaCha8Rng,
    pools: Vec<Vec<String>>,
    patterns: Vec<String>,
    country_index: WeightedIndex<f64>,
    /// Per-country field preference.
    profiles: Vec<WeightedIndex<f64>>,
    ai_fields: Vec<usize>,
    next: usize,
}

impl Generator {
    pub fn new(cfg: SynthConfig) -> Self {
        let conc = FieldConcordance::default();
        let pools = symbol_pools(&conc);
        assert!(pools.iter().all(|p| !p.is_empty()), "every field needs a sample symbol");
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let country_index = WeightedIndex::new(cfg.countries.iter().map(|(_, w)| *w)).expect("country weights");
        let profiles = cfg
            .countries
            .iter()
            .map(|_| {
                let w: Vec<f64> = (0..FIELD_COUNT).map(|_| rng.gen_range(0.2..3.0)).collect();
                WeightedIndex::new(w).expect("positive weights")
            })
            .collect();
        let ai_fields = cfg
            .ai_fields
            .iter()
            .map(|f| FieldId::from_name(f).unwrap_or_else(|| panic!("unknown field {f}")).0 as usize)
            .collect();
        let patterns = KeywordSet::default()
            .rules()
            .iter()
            .map(|r| r.pattern.clone())
            .collect();
        Generator {
            cfg,
            rng,
            pools,
            patterns,
            country_index,
            profiles,
            ai_fields,
            next: 0,
        }
    }

    fn words(&mut self, n: usize) -> Vec<&'static str> {
        (0..n).map(|_| WORDS[self.rng.gen_range(0..WORDS.len())]).collect()
    }

    fn record(&mut self) -> PatentRecord {
        let (y0, y1) = self.cfg.years;
        let year = self.rng.gen_range(y0..=y1);
        let trend = 0.3 + 1.4 * f64::from(year - y0) / f64::from((y1 - y0).max(1));
        let ai = self.rng.gen_bool((self.cfg.ai_share * trend).clamp(0.0, 1.0));

        let n_countries = match self.rng.gen_range(0..100) {
            0 => 0,
            1..=80 => 1,
            81..=96 => 2,
            _ => 3,
        };
        let picks: Vec<usize> = (0..n_countries)
            .map(|_| self.country_index.sample(&mut self.rng))
            .collect();
        let mut countries: Vec<String> = picks.iter().map(|&i| self.cfg.countries[i].0.clone()).collect();
        countries.sort();
        countries.dedup();

        let n_codes = self.rng.gen_range(1..=self.cfg.max_codes.max(1));
        let lead = picks.first().copied().unwrap_or(0);
        let mut codes = Vec::with_capacity(n_codes + 1);
        for k in 0..n_codes {
            let field = if ai && k == 0 && self.rng.gen_bool(self.cfg.ai_focus) {
                self.ai_fields[self.rng.gen_range(0..self.ai_fields.len())]
            } else {
                self.profiles[lead].sample(&mut self.rng)
            };
            let pool = &self.pools[field];
            codes.push(pool[self.rng.gen_range(0..pool.len())].clone());
        }
        if self.rng.gen_bool(self.cfg.unmapped_share) {
            codes.push("Z99Z1/00".to_string());
        }
        codes.sort();
        codes.dedup();

        let mut title = self.words(4).join(" ");
        if ai {
            let p = &self.patterns[self.rng.gen_range(0..self.patterns.len())];
            let suffix = ["ing", "", "s"][self.rng.gen_range(0..3)];
            title = format!("{title} using {}{suffix}", p.to_lowercase());
        }
        let n = self.rng.gen_range(12..30);
        let abstract_text = self.words(n).join(" ");

        self.next += 1;
        PatentRecord {
            id: format!("S{:07}", self.next),
            year,
            title,
            abstract_text,
            countries,
            ipc_codes: codes,
        }
    }
}

impl Iterator for Generator {
    type Item = PatentRecord;

    fn next(&mut self) -> Option<PatentRecord> {
        (self.next < self.cfg.records).then(|| self.record())
    }
}

pub fn generate(cfg: SynthConfig) -> Vec<PatentRecord> {
    Generator::new(cfg).collect()
}

/// Streams a synthetic corpus to `out` in the standard input layout.
pub fn write_synthetic<W: Write>(cfg: SynthConfig, out: W) -> techspace::Result<()> {
    let gen = Generator::new(cfg);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "year", "title", "abstract", "countries", "ipc"])?;
    for r in gen {
        w.write_record([
            r.id.as_str(),
            &r.year.to_string(),
            &r.title,
            &r.abstract_text,
            &r.countries.join("|"),
            &r.ipc_codes.join("|"),
        ])?;
    }
    w.flush().map_err(|e| techspace::Error::io("<synthetic>", e))
}

/// Field counts by record, for quick inspection of a generated corpus.
pub fn field_histogram(records: &[PatentRecord]) -> BTreeMap<&'static str, usize> {
    let conc = FieldConcordance::default();
    let mut h = BTreeMap::new();
    for r in records {
        for f in conc.map_codes(r.ipc_codes.iter().map(String::as_str)).fields {
            *h.entry(f.name()).or_insert(0) += 1;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use techspace::corpus::write_corpus;

    #[test]
    fn deterministic_for_a_seed() {
        let a = generate(SynthConfig {
            records: 200,
            ..Default::default()
        });
        let b = generate(SynthConfig {
            records: 200,
            ..Default::default()
        });
        let c = generate(SynthConfig {
            records: 200,
            seed: 8,
            ..Default::default()
        });
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn every_field_has_symbols() {
        let pools = symbol_pools(&FieldConcordance::default());
        let conc = FieldConcordance::default();
        for (f, pool) in pools.iter().enumerate() {
            for s in pool {
                assert_eq!(conc.lookup(s).map(|x| x.0 as usize), Some(f), "{s}");
            }
        }
    }

    #[test]
    fn covers_every_field() {
        let h = field_histogram(&generate(SynthConfig {
            records: 2000,
            ..Default::default()
        }));
        assert_eq!(h.len(), FIELD_COUNT);
    }

    #[test]
    fn stream_matches_collected() {
        let cfg = SynthConfig {
            records: 50,
            ..Default::default()
        };
        let mut streamed = Vec::new();
        write_synthetic(cfg.clone(), &mut streamed).unwrap();
        let mut direct = Vec::new();
        write_corpus(&generate(cfg), &mut direct).unwrap();
        assert_eq!(streamed, direct);
    }
}
