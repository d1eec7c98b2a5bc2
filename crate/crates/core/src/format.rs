//! JSON file formats.
//!
//! Games are read in any of three preference encodings and always written
//! back as rank vectors, so a parsed-then-written game is a fixed point.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{validate_game, Agent, Color, Game, PreferenceOrder};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    s: usize,
    red: Vec<AgentSpec>,
    blue: Vec<AgentSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentSpec {
    id: String,
    prefs: PrefSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum PrefSpec {
    Ranks { ranks: Vec<u32> },
    Dichotomous { approve: Vec<usize> },
    Trichotomous { approve: Vec<usize>, neutral: Vec<usize> },
}

fn to_agent(s: usize, color: Color, spec: AgentSpec) -> Result<Agent> {
    let prefs = match spec.prefs {
        PrefSpec::Ranks { ranks } => {
            if ranks.len() != s + 1 {
                return Err(Error::RankLength {
                    agent: spec.id,
                    expected: s + 1,
                    found: ranks.len(),
                });
            }
            PreferenceOrder::from_ranks(ranks)?
        }
        PrefSpec::Dichotomous { approve } => PreferenceOrder::dichotomous(s, &approve)?,
        PrefSpec::Trichotomous { approve, neutral } => {
            PreferenceOrder::trichotomous(s, &approve, &neutral)?
        }
    };
    Ok(Agent::new(spec.id, color, prefs))
}

impl TryFrom<GameFile> for Game {
    type Error = Error;

    fn try_from(file: GameFile) -> Result<Game> {
        if file.s == 0 {
            return Err(Error::ZeroRoomSize);
        }
        let s = file.s;
        let red = file
            .red
            .into_iter()
            .map(|a| to_agent(s, Color::Red, a))
            .collect::<Result<_>>()?;
        let blue = file
            .blue
            .into_iter()
            .map(|a| to_agent(s, Color::Blue, a))
            .collect::<Result<_>>()?;
        let g = Game { s, red, blue };
        validate_game(&g)?;
        Ok(g)
    }
}

impl From<&Game> for GameFile {
    fn from(g: &Game) -> Self {
        let spec = |a: &Agent| AgentSpec {
            id: a.id.clone(),
            prefs: PrefSpec::Ranks {
                ranks: a.prefs.ranks().to_vec(),
            },
        };
        GameFile {
            s: g.s,
            red: g.red.iter().map(spec).collect(),
            blue: g.blue.iter().map(spec).collect(),
        }
    }
}

impl Serialize for Game {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GameFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Game {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = GameFile::deserialize(deserializer)?;
        Game::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Parses a game, keeping validation errors distinct from syntax errors.
pub fn parse_game(text: &str) -> Result<Game> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Game::try_from(file)
}

/// Canonical pretty-printed encoding of a game.
pub fn game_to_json(g: &Game) -> String {
    serde_json::to_string_pretty(g).expect("games always serialize")
}

/// Parses any of the other JSON documents, mapping syntax errors.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// JSON Schemas of every file format, keyed by document name.
pub fn schemas() -> Value {
    let ids = json!({"type": "array", "items": {"type": "string"}});
    let outcome = json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "Outcome",
        "type": "object",
        "additionalProperties": false,
        "required": ["rooms"],
        "properties": {"rooms": {"type": "array", "items": ids}}
    });
    let numerators = json!({"type": "array", "items": {"type": "integer", "minimum": 0}});
    let agent = json!({
        "type": "object",
        "additionalProperties": false,
        "required": ["id", "prefs"],
        "properties": {
            "id": {"type": "string"},
            "prefs": {"oneOf": [
                {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["type", "ranks"],
                    "properties": {"type": {"const": "ranks"}, "ranks": numerators}
                },
                {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["type", "approve"],
                    "properties": {"type": {"const": "dichotomous"}, "approve": numerators}
                },
                {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["type", "approve", "neutral"],
                    "properties": {
                        "type": {"const": "trichotomous"},
                        "approve": numerators,
                        "neutral": numerators
                    }
                }
            ]}
        }
    });
    json!({
        "game": {
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "title": "Game",
            "type": "object",
            "additionalProperties": false,
            "required": ["s", "red", "blue"],
            "properties": {
                "s": {"type": "integer", "minimum": 1},
                "red": {"type": "array", "items": agent},
                "blue": {"type": "array", "items": agent}
            }
        },
        "outcome": outcome,
        "mixed": {
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "title": "MixedOutcome",
            "type": "object",
            "additionalProperties": false,
            "required": ["support"],
            "properties": {"support": {"type": "array", "items": {
                "type": "object",
                "additionalProperties": false,
                "required": ["outcome", "prob"],
                "properties": {
                    "outcome": {"$ref": "#/outcome"},
                    "prob": {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"}
                }
            }}}
        },
        "verdict": {
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "title": "PopularityVerdict",
            "type": "object",
            "required": ["status", "margin", "witness"],
            "properties": {
                "status": {"enum": ["popular", "not_popular", "strictly_popular", "not_strictly_popular"]},
                "margin": {"type": ["integer", "null"]},
                "witness": {"oneOf": [{"$ref": "#/outcome"}, {"type": "null"}]}
            }
        },
        "x3c": {
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "title": "X3CInstance",
            "type": "object",
            "additionalProperties": false,
            "required": ["m", "sets"],
            "properties": {
                "m": {"type": "integer", "minimum": 3},
                "sets": {"type": "array", "items": {
                    "type": "array", "minItems": 3, "maxItems": 3,
                    "items": {"type": "integer", "minimum": 1}
                }}
            }
        },
        "bundle": {
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "title": "BundleSidecar",
            "type": "object",
            "additionalProperties": false,
            "required": ["groups", "variant"],
            "properties": {
                "groups": {"type": "object", "additionalProperties": ids},
                "variant": {"enum": ["strict", "mixed", "popularity"]}
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dichotomous_blue_spec() {
        let g = parse_game(
            r#"{"s":2,"red":[{"id":"r","prefs":{"type":"ranks","ranks":[0,0,1]}}],
                "blue":[{"id":"b","prefs":{"type":"dichotomous","approve":[1]}}]}"#,
        )
        .unwrap();
        assert_eq!(g.blue[0].prefs.ranks(), &[1, 0, 1]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"s":1,"red":[],"blue":[],"extra":0}"#;
        assert!(matches!(parse_game(text), Err(Error::Parse(_))));
        let text = r#"{"s":1,"red":[{"id":"r","prefs":{"type":"dichotomous","approve":[1],"x":1}}],"blue":[]}"#;
        assert!(matches!(parse_game(text), Err(Error::Parse(_))));
    }

    #[test]
    fn validation_errors_surface() {
        let text = r#"{"s":2,"red":[{"id":"r","prefs":{"type":"dichotomous","approve":[1]}}],
            "blue":[{"id":"b","prefs":{"type":"dichotomous","approve":[1]}},
                    {"id":"c","prefs":{"type":"dichotomous","approve":[1]}}]}"#;
        assert_eq!(parse_game(text).unwrap_err().code(), "divisibility");
        let text = r#"{"s":2,"red":[{"id":"r","prefs":{"type":"ranks","ranks":[0,1]}}],
            "blue":[{"id":"b","prefs":{"type":"dichotomous","approve":[1]}}]}"#;
        assert_eq!(parse_game(text).unwrap_err().code(), "rank-length");
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"s":2,"red":[{"id":"r","prefs":{"type":"trichotomous","approve":[1],"neutral":[2]}}],
            "blue":[{"id":"b","prefs":{"type":"dichotomous","approve":[0]}}]}"#;
        let once = game_to_json(&parse_game(text).unwrap());
        let twice = game_to_json(&parse_game(&once).unwrap());
        assert_eq!(once, twice);
    }
}
