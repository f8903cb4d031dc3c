#pragma once

#include <optional>
#include <string>

#include "tsvolterra/dynamic_bridge.hpp"
#include "tsvolterra/first_kind.hpp"
#include "tsvolterra/second_kind.hpp"

namespace tsvolterra {

// One parsed problem file (JSON, schema_version 1). `kind` says which payload
// is set; convolution problems arrive with their kernel already expanded into
// `second` through the shift table.
struct LoadedProblem {
  enum class Kind { Second, First, Nonlinear, System, Ivp, Convolution };

  Kind kind = Kind::Second;
  TimeScalePtr scale;
  SolverOptions options;
  std::optional<ProblemSpec> second;
  std::optional<FirstKindProblem> first;
  std::optional<NonlinearProblem> nonlinear;
  std::optional<SystemProblem> system;
  std::optional<LinearIVP> ivp;
  std::string source_path;
};

const char* kind_name(LoadedProblem::Kind k);

// Throw Error with SchemaError (malformed JSON with its byte offset, unknown
// or missing fields, bad values) or whatever expression parsing and problem
// construction raise. Unknown fields are rejected at every nesting level.
LoadedProblem load_problem_file(const std::string& path);
LoadedProblem load_problem_text(const std::string& text, const std::string& origin = "<memory>");

}  // namespace tsvolterra
