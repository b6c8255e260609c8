use std::fs;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use dldef::decide::{self, Decision, Route};
use dldef::mosaic::{JointVerdict, MosaicOptions, Witness};
use dldef::oracles::{self, random_instance, Search, SearchBudget, StopReason};
use dldef::satcheck::model_of_with;
use dldef::semantics::{is_bisimulation, largest_bisimulation, Interpretation};
use dldef::syntax::{
    check_dialect, validate_concept, validate_ontology, Concept, Dialect, Ontology, Signature,
};
use dldef::Error;

use crate::input::{self, Loaded};
use crate::report::{RunReport, EXIT_BUDGET, EXIT_INPUT};
use crate::{Cli, Command, Common, Definability, Limits, RouteArg, TwoSided};

enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

impl From<&str> for Failure {
    fn from(s: &str) -> Self {
        Failure::Input(s.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Sat { .. } => "sat",
        Command::Entails { .. } => "entails",
        Command::Bisim { .. } => "bisim",
        Command::InterpolantExists(_) => "interpolant-exists",
        Command::DefinitionExists(_) => "definition-exists",
        Command::ReferringExists { .. } => "referring-exists",
        Command::NonprojectiveExists { .. } => "nonprojective-exists",
        Command::Implicit(_) => "implicit",
        Command::OracleJoint { .. } => "oracle-joint",
        Command::OracleEnumdef { .. } => "oracle-enumdef",
    }
}

/// Runs one subcommand and returns its report; never panics on bad input.
pub fn run(cli: &Cli) -> RunReport {
    let mut report = RunReport::new(command_name(&cli.command));
    let mut ctx = Ctx {
        common: &cli.common,
        report: &mut report,
    };
    let result = ctx.execute(&cli.command).and_then(|()| ctx.write_witness());
    match result {
        Ok(()) => {}
        Err(Failure::Input(msg)) => report.fail(EXIT_INPUT, msg),
        Err(Failure::Budget(msg)) => report.fail(EXIT_BUDGET, msg),
    }
    report
}

struct Ctx<'a> {
    common: &'a Common,
    report: &'a mut RunReport,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn stop_reason(r: StopReason) -> &'static str {
    match r {
        StopReason::Bounds => "bounds",
        StopReason::Candidates => "candidates",
        StopReason::WallClock => "wall-clock",
    }
}

fn witness_bundle(w: &Witness, sigma: &Signature, d: Dialect) -> Value {
    let mut v = to_value(w);
    v["signature"] = json!(sigma.to_string());
    v["dialect"] = json!(d.to_string());
    v
}

fn model_bundle(m: &Interpretation, x: usize) -> Value {
    json!({ "model": to_value(&m.to_json()), "element": m.domain[x] })
}

impl Ctx<'_> {
    fn options(&mut self) -> MosaicOptions {
        let mut o = MosaicOptions::default();
        if let Some(n) = self.common.budget_types {
            o.atom_limit = 63 - n.max(1).leading_zeros() as usize;
        }
        o.order_seed = self.common.order_seed;
        if let Some(n) = self.common.budget_mosaics {
            o.budget = n;
        }
        self.report
            .budget
            .insert("atom_limit".into(), o.atom_limit as u64);
        self.report
            .budget
            .insert("mosaic_budget".into(), o.budget as u64);
        o
    }

    fn dialect(&mut self, declared: &[Option<Dialect>]) -> Result<Dialect, Failure> {
        let d = input::dialect(
            self.common.dialect.as_deref(),
            self.common.universal,
            declared,
        )?;
        self.report.dialect = Some(d.to_string());
        Ok(d)
    }

    fn load(&mut self, key: &str, spec: &str) -> Result<Loaded, Failure> {
        let l = input::ontology(spec)?;
        self.report.input(key, spec);
        Ok(l)
    }

    fn concept(&mut self, key: &str, text: &str) -> Result<Concept, Failure> {
        let c = input::concept(text)?;
        self.report.input(key, c.to_string());
        Ok(c)
    }

    fn sigma(&mut self, text: &str) -> Result<Signature, Failure> {
        input::signature(text).map_err(Failure::Input)
    }

    fn seeded(&mut self, d: Dialect) -> Result<oracles::Instance, Failure> {
        let seed = self
            .common
            .seed
            .ok_or("an ontology or --seed is required")?;
        let i = random_instance(seed, d);
        self.report.input("seed", seed.to_string());
        self.report.input("ontology", i.ontology.to_string());
        self.report.input("concept", i.concept.to_string());
        Ok(i)
    }

    fn write_witness(&mut self) -> Outcome {
        if let (Some(path), Some(w)) = (&self.common.witness, &self.report.witness) {
            let text = serde_json::to_string_pretty(w).expect("witness serializes");
            fs::write(path, text + "\n")
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        Ok(())
    }

    fn decision(&mut self, d: Decision) {
        self.report.signature = Some(d.signature.to_string());
        let mut details = json!({ "kind": to_value(&d.kind), "route": to_value(&d.route) });
        if let Some(v) = &d.joint {
            self.joint(v, &mut details);
        }
        if let Some(r) = &d.reduction {
            details["reduction"] = to_value(r);
        }
        self.report.details = details;
        self.report.set_verdict(d.answer);
    }

    fn joint(&mut self, v: &JointVerdict, details: &mut Value) {
        let mut j = to_value(v);
        if let Value::Object(m) = &mut j {
            m.remove("witness");
            m.remove("signature");
            m.remove("dialect");
        }
        details["joint"] = j;
        let s = &v.stats;
        for (k, x) in [
            ("closure", s.closure),
            ("atoms", s.atoms),
            ("realizable_1", s.realizable[0]),
            ("realizable_2", s.realizable[1]),
            ("class_pairs", s.class_pairs),
            ("universes", s.universes),
            ("largest_universe", s.largest_universe),
        ] {
            self.report.budget.insert(k.into(), x as u64);
        }
        if let Some(w) = &v.witness {
            self.report.witness = Some(witness_bundle(w, &v.signature, v.dialect));
        }
    }

    fn execute(&mut self, cmd: &Command) -> Outcome {
        match cmd {
            Command::Parse {
                onto,
                concept,
                model,
            } => self.parse(onto, concept.as_deref(), model.as_deref()),
            Command::Sat { onto, concept } => {
                let o = input::optional_ontology(onto.as_deref())?;
                if let Some(s) = onto {
                    self.report.input("onto", s.as_str());
                }
                let d = self.dialect(&[o.declared])?;
                let c = self.concept("concept", concept)?;
                let opts = self.options();
                match model_of_with(&c, &o.ontology, d, opts.atom_limit)? {
                    Some((m, x)) => {
                        self.report.details = json!({ "model_size": m.len() });
                        self.report.witness = Some(model_bundle(&m, x));
                        self.report.set_verdict(true);
                    }
                    None => self.report.set_verdict(false),
                }
                Ok(())
            }
            Command::Entails { onto, lhs, rhs } => {
                let o = input::optional_ontology(onto.as_deref())?;
                if let Some(s) = onto {
                    self.report.input("onto", s.as_str());
                }
                let d = self.dialect(&[o.declared])?;
                let (l, r) = (self.concept("lhs", lhs)?, self.concept("rhs", rhs)?);
                let opts = self.options();
                check_dialect(d, &[&o.ontology], &[&l, &r])?;
                match model_of_with(&l.clone().and(r.negate()), &o.ontology, d, opts.atom_limit)? {
                    Some((m, x)) => {
                        self.report.details = json!({ "countermodel_size": m.len() });
                        self.report.witness = Some(model_bundle(&m, x));
                        self.report.set_verdict(false);
                    }
                    None => self.report.set_verdict(true),
                }
                Ok(())
            }
            Command::Bisim {
                m1,
                m2,
                bundle,
                sigma,
                d1,
                d2,
                o1,
                o2,
            } => self.bisim(
                m1.as_deref(),
                m2.as_deref(),
                bundle.as_deref(),
                sigma.as_deref(),
                [d1, d2],
                [o1, o2],
            ),
            Command::InterpolantExists(s) => {
                let (o1, c1, o2, c2, d) = self.two_sided(s, false)?;
                let opts = self.options();
                let r = decide::interpolant_exists(&o1, &c1, &o2, &c2, d, &opts)?;
                self.decision(r);
                Ok(())
            }
            Command::DefinitionExists(def) => {
                let (o, c, sigma, d) = self.definability(def)?;
                let opts = self.options();
                let r = decide::definition_exists(&o, &c, &sigma, d, &opts)?;
                self.decision(r);
                Ok(())
            }
            Command::ReferringExists {
                onto,
                individual,
                sigma,
            } => {
                let l = self.load("onto", onto)?;
                let d = self.dialect(&[l.declared])?;
                self.report.input("individual", individual.as_str());
                let sigma = match sigma {
                    Some(s) => Some(self.sigma(s)?),
                    None => None,
                };
                let opts = self.options();
                let r = decide::referring_expression_exists(
                    &l.ontology,
                    individual,
                    sigma.as_ref(),
                    d,
                    &opts,
                )?;
                self.decision(r);
                Ok(())
            }
            Command::NonprojectiveExists { onto, name, route } => {
                let l = self.load("onto", onto)?;
                let d = self.dialect(&[l.declared])?;
                self.report.input("name", name.as_str());
                let route = match route {
                    RouteArg::Auto => Route::Auto,
                    RouteArg::Mosaic => Route::Mosaic,
                    RouteArg::Implicit => Route::Implicit,
                    RouteArg::Reduction => Route::Reduction,
                };
                let opts = self.options();
                let r =
                    decide::nonprojective_definition_exists(&l.ontology, name, d, route, &opts)?;
                self.decision(r);
                Ok(())
            }
            Command::Implicit(def) => {
                let (o, c, sigma, d) = self.definability(def)?;
                let opts = self.options();
                let v = decide::implicitly_definable(&o, &c, &sigma, d, &opts)?;
                self.report.signature = Some(sigma.to_string());
                self.report.set_verdict(v);
                Ok(())
            }
            Command::OracleJoint {
                sides,
                sigma,
                max_domain,
                limits,
            } => {
                let seeded = sides.o1.is_none() && sides.c1.is_none() && self.common.seed.is_some();
                let (o1, c1, o2, c2, d) = self.two_sided(sides, seeded)?;
                let sigma = match (sigma, seeded) {
                    (Some(s), _) => self.sigma(s)?,
                    (None, true) => self.seeded(d)?.sigma,
                    (None, false) => Signature::of(&o1, &c1).intersection(&Signature::of(&o2, &c2)),
                };
                let budget = self.budget(limits, *max_domain, 2, 6);
                let s = oracles::bounded_joint_consistency(&o1, &c1, &o2, &c2, &sigma, d, &budget)?;
                self.report.signature = Some(sigma.to_string());
                self.search(s, |ctx, w| {
                    ctx.report.witness = Some(witness_bundle(w, &sigma, d));
                    json!({ "sizes": [w.i1.len(), w.i2.len()] })
                })
            }
            Command::OracleEnumdef {
                def,
                depth,
                max_size,
                limits,
            } => {
                let (o, c, sigma, d) = self.definability(def)?;
                let budget = self.budget(limits, 3, *depth, *max_size);
                let s = oracles::enumerate_definitions(&o, &c, &sigma, d, &budget)?;
                self.report.signature = Some(sigma.to_string());
                self.search(s, |_, c| json!({ "definition": c.to_string() }))
            }
        }
    }

    fn budget(
        &mut self,
        l: &Limits,
        max_domain: usize,
        max_depth: usize,
        max_size: usize,
    ) -> SearchBudget {
        self.report
            .budget
            .insert("max_candidates".into(), l.max_candidates);
        SearchBudget {
            max_domain,
            max_depth,
            max_size,
            max_candidates: l.max_candidates,
            wall_clock: Duration::from_secs(l.time_limit),
        }
    }

    fn search<T>(&mut self, s: Search<T>, found: impl FnOnce(&mut Self, &T) -> Value) -> Outcome {
        match s {
            Search::Found { result, candidates } => {
                self.report.budget.insert("candidates".into(), candidates);
                let mut details = found(self, &result);
                details["outcome"] = json!("found");
                self.report.details = details;
                self.report.set_verdict(true);
                Ok(())
            }
            Search::Exhausted(e) => {
                self.report.budget.insert("candidates".into(), e.candidates);
                self.report.details = json!({
                    "outcome": "exhausted",
                    "reason": stop_reason(e.reason),
                    "complete_to": e.complete_to,
                });
                if e.reason == StopReason::Bounds {
                    self.report.set_verdict(false);
                    Ok(())
                } else {
                    Err(Failure::Budget(format!(
                        "search stopped by its {} limit",
                        stop_reason(e.reason)
                    )))
                }
            }
        }
    }

    fn two_sided(
        &mut self,
        s: &TwoSided,
        seeded: bool,
    ) -> Result<(Ontology, Concept, Ontology, Concept, Dialect), Failure> {
        if seeded {
            let d = self.dialect(&[])?;
            let i = self.seeded(d)?;
            let neg = i.concept.negate();
            return Ok((i.ontology.clone(), i.concept, i.ontology, neg, d));
        }
        let l1 = match &s.o1 {
            Some(p) => self.load("o1", p)?,
            None => input::optional_ontology(None)?,
        };
        let l2 = match &s.o2 {
            Some(p) => self.load("o2", p)?,
            None => input::optional_ontology(None)?,
        };
        let d = self.dialect(&[l1.declared, l2.declared])?;
        let c1 = self.concept("c1", s.c1.as_deref().ok_or("--c1 is required")?)?;
        let c2 = self.concept("c2", s.c2.as_deref().ok_or("--c2 is required")?)?;
        Ok((l1.ontology, c1, l2.ontology, c2, d))
    }

    fn definability(
        &mut self,
        def: &Definability,
    ) -> Result<(Ontology, Concept, Signature, Dialect), Failure> {
        if def.onto.is_none() && def.concept.is_none() {
            let d = self.dialect(&[])?;
            let i = self.seeded(d)?;
            let sigma = match &def.sigma {
                Some(s) => self.sigma(s)?,
                None => i.sigma,
            };
            return Ok((i.ontology, i.concept, sigma, d));
        }
        let l = match &def.onto {
            Some(p) => self.load("onto", p)?,
            None => input::optional_ontology(None)?,
        };
        let d = self.dialect(&[l.declared])?;
        let c = self.concept(
            "concept",
            def.concept.as_deref().ok_or("--concept is required")?,
        )?;
        let sigma = self.sigma(def.sigma.as_deref().ok_or("--sigma is required")?)?;
        Ok((l.ontology, c, sigma, d))
    }

    fn parse(
        &mut self,
        onto: &str,
        concept: Option<&str>,
        model: Option<&std::path::Path>,
    ) -> Outcome {
        let l = self.load("onto", onto)?;
        let o = &l.ontology;
        let mut details = json!({
            "ontology": o.to_string(),
            "concept_inclusions": o.cis.len(),
            "role_inclusions": o.ris.len(),
            "signature": Signature::of_ontology(o).to_string(),
        });
        if let Some(d) = l.declared {
            details["declared_dialect"] = json!(d.to_string());
        }
        let c = match concept {
            Some(t) => Some(self.concept("concept", t)?),
            None => None,
        };
        let mut ok = true;
        if self.common.dialect.is_some() || l.declared.is_some() {
            let d = self.dialect(&[l.declared])?;
            let mut v = validate_ontology(o, d);
            if let Some(c) = &c {
                v.extend(validate_concept(c, d));
            }
            ok &= v.is_empty();
            details["violations"] = json!(v);
        }
        if let Some(path) = model {
            let m = input::interpretation(path)?;
            self.report.input("model", path.display().to_string());
            let (is_model, violated) = m.is_model(o)?;
            ok &= is_model;
            details["is_model"] = json!(is_model);
            details["violated"] = json!(violated.iter().map(|a| a.to_string()).collect::<Vec<_>>());
            if let Some(c) = &c {
                details["extension"] = json!(m.eval_names(c)?);
            }
        }
        self.report.details = details;
        self.report.set_verdict(ok);
        Ok(())
    }

    fn bisim(
        &mut self,
        m1: Option<&std::path::Path>,
        m2: Option<&std::path::Path>,
        bundle: Option<&std::path::Path>,
        sigma: Option<&str>,
        points: [&Option<String>; 2],
        ontos: [&Option<String>; 2],
    ) -> Outcome {
        let mut given: Option<Vec<(String, String)>> = None;
        let mut names = [points[0].clone(), points[1].clone()];
        let (i1, i2, bundle_sigma, bundle_dialect) = match bundle {
            Some(p) => {
                self.report.input("bundle", p.display().to_string());
                let text = fs::read_to_string(p)
                    .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                let v: Value =
                    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
                let model = |k: &str| -> Result<Interpretation, Failure> {
                    let j = serde_json::from_value(v[k].clone())
                        .map_err(|e| format!("bundle field {k}: {e}"))?;
                    Ok(Interpretation::from_json(&j)?)
                };
                let (i1, i2) = (model("model1")?, model("model2")?);
                for (k, slot) in ["d1", "d2"].iter().zip(names.iter_mut()) {
                    if slot.is_none() {
                        *slot = v[*k].as_str().map(String::from);
                    }
                }
                given = serde_json::from_value(v["relation"].clone()).ok();
                let s = v["signature"].as_str().map(String::from);
                let d = v["dialect"]
                    .as_str()
                    .map(|t| t.parse::<Dialect>())
                    .transpose()?;
                (i1, i2, s, d)
            }
            None => {
                let (p1, p2) = (m1.ok_or("--m1 is required")?, m2.ok_or("--m2 is required")?);
                self.report.input("m1", p1.display().to_string());
                self.report.input("m2", p2.display().to_string());
                (
                    input::interpretation(p1)?,
                    input::interpretation(p2)?,
                    None,
                    None,
                )
            }
        };
        let sigma = match sigma.map(String::from).or(bundle_sigma) {
            Some(s) => self.sigma(&s)?,
            None => return Err(Failure::Input("--sigma is required".into())),
        };
        self.report.signature = Some(sigma.to_string());
        let d = if self.common.dialect.is_some() {
            self.dialect(&[])?
        } else {
            self.dialect(&[bundle_dialect])?
        };
        let z = largest_bisimulation(&i1, &i2, &sigma, d);
        let pairs: Vec<(&str, &str)> = z
            .pairs
            .iter()
            .map(|&(x, y)| (i1.domain[x].as_str(), i2.domain[y].as_str()))
            .collect();
        let mut details = json!({ "largest": pairs });
        let mut ok = !z.pairs.is_empty();
        if let Some(rel) = given {
            let idx = |m: &Interpretation, n: &str| {
                m.element(n).ok_or_else(|| format!("unknown element {n:?}"))
            };
            let mut set = std::collections::BTreeSet::new();
            for (x, y) in &rel {
                set.insert((idx(&i1, x)?, idx(&i2, y)?));
            }
            let valid = is_bisimulation(&i1, &i2, &set, &sigma, d);
            let inside = set.is_subset(&z.pairs);
            details["relation_is_bisimulation"] = json!(valid);
            details["relation_in_largest"] = json!(inside);
            ok &= valid && inside;
        }
        if let [Some(a), Some(b)] = &names {
            let x = i1
                .element(a)
                .ok_or_else(|| format!("unknown element {a:?} in the first model"))?;
            let y = i2
                .element(b)
                .ok_or_else(|| format!("unknown element {b:?} in the second model"))?;
            self.report.input("d1", a.as_str());
            self.report.input("d2", b.as_str());
            let linked = z.contains(x, y);
            details["points_bisimilar"] = json!(linked);
            ok = linked
                && details
                    .get("relation_is_bisimulation")
                    .is_none_or(|v| v == true);
        }
        for (k, (spec, m)) in ["o1", "o2"].iter().zip(ontos.iter().zip([&i1, &i2])) {
            if let Some(spec) = spec {
                let l = self.load(k, spec)?;
                let (is_model, _) = m.is_model(&l.ontology)?;
                details[format!("{k}_model")] = json!(is_model);
                ok &= is_model;
            }
        }
        self.report.details = details;
        self.report.set_verdict(ok);
        Ok(())
    }
}
