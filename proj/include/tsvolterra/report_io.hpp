#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsvolterra/problem_file.hpp"
#include "tsvolterra/second_kind.hpp"

namespace tsvolterra {

// shortest round-trip decimal form (std::to_chars)
std::string format_double(double v);

// Dispatch one solve of a loaded problem with the given method. Kinds with a
// single algorithm (first, system, ivp) accept Method::Direct only.
SolveReport solve_loaded(const LoadedProblem& p, Method method);

// CSV with header "t,phi,residual" and '\n' endings; systems produce one
// block per component introduced by a "# component i" line. Reports whose
// solution lives on a restricted scale emit exactly those rows.
std::string report_to_csv(const SolveReport& rep);

// Gamma table dump, header "t,s,gamma", rows over the lower triangle.
std::string resolvent_to_csv(const KernelTable& gamma);

// Full JSON report for one or more method runs of the same problem; key
// order and float formatting are stable so identical inputs give identical
// bytes. Reports after the first carry their max deviation from the first.
std::string report_to_json(const LoadedProblem& problem, const std::vector<SolveReport>& reports);

struct VerifyOutcome {
  bool ok = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  double worst_point = 0.0;
  std::size_t rows = 0;
};

// Check an externally supplied candidate solution (CSV rows "t,value" with an
// optional header and an ignored trailing column) against the problem's
// equation. The candidate grid must match the verification domain point for
// point; mismatches throw GridMismatch. System problems are not verifiable
// this way and throw SchemaError.
VerifyOutcome verify_candidate(const LoadedProblem& problem, const std::string& csv_text);

}  // namespace tsvolterra
