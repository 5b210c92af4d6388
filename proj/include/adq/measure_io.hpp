#pragma once

#include <string>

#include "adq/measure.hpp"

namespace adq {

// JSON measure documents:
//   {"kind": "uniform_box", "dim": q, "lo": [...], "hi": [...]}
//   {"kind": "ifs", "dim": q, "maps": [{"ratio": r, "rotation": [[...], ...],
//    "translation": [...]}, ...], "probs": [...]}
//   {"kind": "discrete", "dim": q, "atoms": [[...], ...], "weights": [...]}
//   {"kind": "conditional", "dim": q, "base": {...}, "region": {...},
//    "similitude": {...}, "norm": "euclidean"}
// Regions: {"type": "ball", "center": [...], "radius": r},
//   {"type": "enlarged", "base": {...}, "delta": d},
//   {"type": "difference", "a": {...}, "b": {...}},
//   {"type": "union" | "intersection", "parts": [...]}.
// Doubles are written with enough digits to round-trip exactly.
std::string measure_to_json(const Measure& measure);
Measure measure_from_json(const std::string& text);

// Builtin name (uniform1d, uniform_square, cantor, cantor_weighted,
// cantor_dust), inline JSON, or a path to a JSON file.
Measure resolve_measure(const std::string& source);

}  // namespace adq
