use std::collections::BTreeSet;
use std::path::Path;

use divpop_core::*;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::corpus;
use crate::report::{write_file, CliError, Exit, Finding, Inputs};

type Res = Result<Finding, CliError>;

fn load_game(inputs: &mut Inputs, path: &Path) -> Result<Game, CliError> {
    Ok(parse_game(&inputs.read(path)?)?)
}

fn load_outcome(inputs: &mut Inputs, g: &Game, path: &Path) -> Result<Outcome, CliError> {
    let o: Outcome = parse_json(&inputs.read(path)?)?;
    validate_outcome(g, &o)?;
    Ok(o)
}

fn load_x3c(inputs: &mut Inputs, path: &Path) -> Result<X3CInstance, CliError> {
    let inst: X3CInstance = parse_json(&inputs.read(path)?)?;
    inst.validate()?;
    Ok(inst)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("results serialize") + "\n"
}

fn rooms_text(o: &Outcome) -> String {
    o.rooms
        .iter()
        .map(|r| format!("{{{}}}", r.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn check_popular(inputs: &mut Inputs, game: &Path, outcome: &Path, search: &Search, strict: bool) -> Res {
    let g = load_game(inputs, game)?;
    let o = load_outcome(inputs, &g, outcome)?;
    let v = if strict {
        is_strictly_popular(&g, &o, search)?
    } else {
        is_popular(&g, &o, search)?
    };
    let mut summary = vec![match (v.status, v.margin) {
        (Status::Popular, Some(m)) => format!("popular (best challenger margin {m})"),
        (Status::StrictlyPopular, Some(m)) => format!("strictly popular (best challenger margin {m})"),
        (Status::StrictlyPopular, None) => "strictly popular (no other outcome exists)".into(),
        (s, m) => format!("{s:?}: a challenger reaches margin {}", m.unwrap_or_default()),
    }];
    if let Some(w) = &v.witness {
        summary.push(format!("witness: {}", rooms_text(w)));
    }
    let exit = if v.is_affirmative() { Exit::Affirmative } else { Exit::Negative };
    Ok(Finding::new(to_value(&v), exit, summary))
}

pub fn find(inputs: &mut Inputs, game: &Path, search: &Search) -> Res {
    let g = load_game(inputs, game)?;
    Ok(match find_popular(&g, search)? {
        Some(o) => Finding::new(
            json!({ "outcome": o }),
            Exit::Affirmative,
            vec![format!("popular outcome: {}", rooms_text(&o))],
        ),
        None => Finding::new(
            json!({ "outcome": null }),
            Exit::Negative,
            vec!["no popular outcome".into()],
        ),
    })
}

pub fn solve_s2(inputs: &mut Inputs, game: &Path) -> Res {
    let g = load_game(inputs, game)?;
    let m = max_weight_matching(&g)?;
    let o = divpop_core::solve_s2(&g)?;
    let happy = happy_count(&g, &o)?;
    Ok(Finding::new(
        json!({ "outcome": o, "matching": m, "happy": happy }),
        Exit::Affirmative,
        vec![
            format!("popular outcome: {}", rooms_text(&o)),
            format!("{happy} of {} agents happy", g.num_agents()),
        ],
    ))
}

pub fn mixed(inputs: &mut Inputs, game: &Path, mode: EnumerationMode, cap: u64, out: Option<&Path>) -> Res {
    let g = load_game(inputs, game)?;
    let p = solve_mixed(&g, mode, cap)?;
    let (challenger, worst) = divpop_core::verify_mixed(&g, &p, cap)?;
    if let Some(path) = out {
        write_file(path, &pretty(&p))?;
    }
    let mut summary = vec![format!(
        "mixed popular outcome over {} outcomes (worst margin {})",
        p.support.len(),
        ratio_string(&worst)
    )];
    for (o, w) in &p.support {
        summary.push(format!("  {}  {}", ratio_string(w), rooms_text(o)));
    }
    Ok(Finding::new(
        json!({
            "mixed": p,
            "worst_margin": ratio_string(&worst),
            "worst_challenger": challenger,
        }),
        Exit::Affirmative,
        summary,
    ))
}

pub fn verify_mixed(inputs: &mut Inputs, game: &Path, mixed: &Path, cap: u64) -> Res {
    let g = load_game(inputs, game)?;
    let p: MixedOutcome = parse_json(&inputs.read(mixed)?)?;
    p.validate(&g)?;
    let (challenger, worst) = divpop_core::verify_mixed(&g, &p, cap)?;
    let popular = !worst.is_negative();
    let summary = vec![
        format!(
            "{} (worst margin {})",
            if popular { "mixed popular" } else { "not mixed popular" },
            ratio_string(&worst)
        ),
        format!("strongest challenger: {}", rooms_text(&challenger)),
    ];
    Ok(Finding::new(
        json!({
            "popular": popular,
            "worst_margin": ratio_string(&worst),
            "worst_challenger": challenger,
        }),
        if popular { Exit::Affirmative } else { Exit::Negative },
        summary,
    ))
}

fn deep_checks(b: &ReductionBundle, cover: Option<&[usize]>, cap: u64) -> Result<Value, CliError> {
    let mono = monolithic_outcome(b);
    let levels = level_sets(&b.game, &mono)?;
    let signature = Search::signature().with_cap(cap);
    Ok(match b.variant {
        Variant::Strict => {
            let all = all_approve_outcomes(b, cap)?;
            let v = is_strictly_popular(&b.game, &mono, &signature)?;
            json!({
                "all_approve_orbits": all.len(),
                "monolithic_verdict": v,
            })
        }
        Variant::Mixed => {
            let challenger = match cover {
                Some(c) => {
                    let reduced = reduced_outcome(b, c, None)?;
                    Some(popularity_margin(&b.game, &reduced, &mono, None)?)
                }
                None => None,
            };
            json!({
                "monolithic_disapprove": levels.disapprove,
                "monolithic_verdict": is_popular(&b.game, &mono, &signature)?,
                "reduced_over_monolithic": challenger,
            })
        }
        Variant::Popularity => {
            let rotation = match cover {
                Some(c) => {
                    let reduced = reduced_outcome(b, c, None)?;
                    let rotated = reduced_rotation(b, &reduced, None)?;
                    Some(popularity_margin(&b.game, &rotated, &reduced, None)?)
                }
                None => None,
            };
            json!({
                "monolithic_neutral": levels.neutral,
                "monolithic_disapprove": levels.disapprove,
                "monolithic_verdict": is_popular(&b.game, &mono, &signature)?,
                "choice": default_choice(b),
                "rotation_over_reduced": rotation,
            })
        }
    })
}

pub fn reduce(inputs: &mut Inputs, variant: Variant, x3c: &Path, out: Option<&Path>, deep: bool, cap: u64) -> Res {
    let inst = load_x3c(inputs, x3c)?;
    let b = ReductionBundle::build(variant, &inst)?;
    let cover = x3c_solve(&inst)?;
    let mono = monolithic_outcome(&b);
    let reduced = cover
        .as_deref()
        .map(|c| reduced_outcome(&b, c, None))
        .transpose()?;
    let mut files = Vec::new();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let mut put = |name: &str, text: String| -> Result<(), CliError> {
            let path = dir.join(name);
            write_file(&path, &text)?;
            files.push(path.display().to_string());
            Ok(())
        };
        put("game.json", game_to_json(&b.game) + "\n")?;
        put("groups.json", pretty(&b.sidecar()))?;
        put("monolithic.json", pretty(&mono))?;
        if let Some(r) = &reduced {
            put("reduced.json", pretty(r))?;
        }
    }
    let groups: serde_json::Map<String, Value> = b
        .groups
        .iter()
        .map(|(k, v)| (k.clone(), json!(v.len())))
        .collect();
    let mut result = json!({
        "variant": variant,
        "s": b.game.s,
        "red": b.game.red.len(),
        "blue": b.game.blue.len(),
        "rooms": b.game.num_rooms(),
        "groups": groups,
        "cover": cover,
        "files": files,
    });
    let mut summary = vec![format!(
        "{variant} reduction: s = {}, {} red, {} blue, {} rooms",
        b.game.s,
        b.game.red.len(),
        b.game.blue.len(),
        b.game.num_rooms()
    )];
    summary.push(match &cover {
        Some(c) => format!("exact cover {c:?}"),
        None => "no exact cover".into(),
    });
    if deep {
        let checks = deep_checks(&b, cover.as_deref(), cap)?;
        summary.push(format!("checks: {checks}"));
        result["checks"] = checks;
    }
    for f in &files {
        summary.push(format!("wrote {f}"));
    }
    Ok(Finding::new(result, Exit::Affirmative, summary))
}

pub fn solve_x3c(inputs: &mut Inputs, x3c: &Path, all: bool) -> Res {
    let inst = load_x3c(inputs, x3c)?;
    let cover = divpop_core::x3c_solve(&inst)?;
    let mut result = json!({ "cover": cover });
    if all {
        result["all"] = json!(x3c_all_solutions(&inst)?);
    }
    let (exit, line) = match &cover {
        Some(c) => (Exit::Affirmative, format!("exact cover {c:?}")),
        None => (Exit::Negative, "no exact cover".to_string()),
    };
    Ok(Finding::new(result, exit, vec![line]))
}

pub fn counterexample(verify: bool, out: Option<&Path>) -> Res {
    let g = counterexample_game();
    if let Some(path) = out {
        write_file(path, &(game_to_json(&g) + "\n"))?;
    }
    if !verify {
        return Ok(Finding::new(
            json!({ "game": g }),
            Exit::Affirmative,
            vec!["nine agents, room size 3".into()],
        ));
    }
    let outcomes = enumerate_outcomes(&g, EnumerationMode::Labeled, DEFAULT_CAP)?;
    let mut refutations = Vec::with_capacity(outcomes.len());
    let mut lemma_holds = true;
    for o in &outcomes {
        let v = is_popular(&g, o, &Search::bruteforce())?;
        let (Some(w), Some(m)) = (&v.witness, v.margin) else {
            return Err(CliError::Core(Error::Internal(format!(
                "outcome {} was not refuted",
                rooms_text(o)
            ))));
        };
        if popularity_margin(&g, w, o, None)?.margin != m || m <= 0 {
            return Err(CliError::Core(Error::Internal("witness does not win".into())));
        }
        let l = level_sets(&g, o)?;
        lemma_holds &= l.neutral.len() + l.disapprove.len() >= 2 && !l.disapprove.is_empty();
        refutations.push(json!({ "outcome": o, "witness": w, "margin": m }));
    }
    if !lemma_holds {
        return Err(CliError::Core(Error::Internal(
            "an outcome has fewer than two agents outside their approved fractions".into(),
        )));
    }
    Ok(Finding::new(
        json!({
            "outcomes": outcomes.len(),
            "popular": 0,
            "level_bounds_hold": lemma_holds,
            "refutations": refutations,
        }),
        Exit::Negative,
        vec![
            format!("no popular outcome: all {} outcomes refuted", outcomes.len()),
            "every outcome leaves at least two agents outside their approved fractions".into(),
        ],
    ))
}

pub fn enumerate(inputs: &mut Inputs, game: &Path, mode: EnumerationMode, cap: u64, signatures: bool) -> Res {
    let g = load_game(inputs, game)?;
    let labeled = labeled_count(g.num_agents(), g.s).map(|c| c.to_string());
    if signatures {
        let sigs = enumerate_signatures(&g);
        return Ok(Finding::new(
            json!({ "labeled_count": labeled, "count": sigs.len(), "signatures": sigs }),
            Exit::Affirmative,
            vec![format!("{} signatures", sigs.len())],
        ));
    }
    let outcomes = enumerate_outcomes(&g, mode, cap)?;
    let mut summary = vec![format!("{} outcomes ({mode:?})", outcomes.len())];
    summary.extend(outcomes.iter().map(rooms_text));
    Ok(Finding::new(
        json!({
            "mode": mode,
            "labeled_count": labeled,
            "count": outcomes.len(),
            "outcomes": outcomes,
        }),
        Exit::Affirmative,
        summary,
    ))
}

pub fn schema(name: Option<&str>) -> Res {
    let all = schemas();
    let result = match name {
        None => all,
        Some(n) => all
            .get(n)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("unknown schema `{n}`")))?,
    };
    let text = serde_json::to_string_pretty(&result).expect("schemas serialize");
    Ok(Finding::new(result, Exit::Affirmative, vec![text]))
}

pub fn selftest(seed: u64, games: usize) -> Res {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    let mut sizes = BTreeSet::new();
    for case in 0..games {
        let s = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=8 / s);
        let g = corpus::random_game(&mut rng, s, k);
        let o = corpus::random_outcome(&mut rng, &g);
        sizes.insert(g.num_agents());
        let brute = best_challenger(&g, &o, &Search::bruteforce())?.margin;
        let sig = best_challenger(&g, &o, &Search::signature())?.margin;
        if brute != sig {
            mismatches.push(json!({ "case": case, "bruteforce": brute, "signature": sig }));
        }
        let strict_b = is_strictly_popular(&g, &o, &Search::bruteforce())?.status;
        let strict_s = is_strictly_popular(&g, &o, &Search::signature())?.status;
        if strict_b != strict_s {
            mismatches.push(json!({ "case": case, "strict": [strict_b, strict_s] }));
        }
        if s == 2 {
            let solved = divpop_core::solve_s2(&g)?;
            if is_popular(&g, &solved, &Search::bruteforce())?.status != Status::Popular {
                mismatches.push(json!({ "case": case, "solve_s2": "not popular" }));
            }
        }
    }
    let exit = if mismatches.is_empty() { Exit::Affirmative } else { Exit::Failure };
    Ok(Finding::new(
        json!({
            "seed": seed,
            "games": games,
            "agent_counts": sizes,
            "mismatches": mismatches,
        }),
        exit,
        vec![format!(
            "seed {seed}: {games} games, {} mismatches",
            mismatches.len()
        )],
    ))
}
