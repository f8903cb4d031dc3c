#include "tsvolterra/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsvolterra/dynamic_bridge.hpp"
#include "tsvolterra/first_kind.hpp"

namespace tsvolterra {

using ojson = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SolveReport solve_loaded(const LoadedProblem& p, Method method) {
  switch (p.kind) {
    case LoadedProblem::Kind::Second:
    case LoadedProblem::Kind::Convolution: {
      const ProblemSpec& spec = *p.second;
      switch (method) {
        case Method::Direct: return solve_direct(spec);
        case Method::Neumann: return neumann_solve(spec, spec.options.max_terms);
        case Method::Picard: return picard_solve(spec);
        case Method::Resolvent: return solve_resolvent(spec);
      }
      break;
    }
    case LoadedProblem::Kind::First:
      if (method != Method::Direct)
        throw Error(Errc::SchemaError, "first-kind problems solve with method 'direct' only");
      return solve_first_kind(*p.first);
    case LoadedProblem::Kind::Nonlinear:
      if (method == Method::Direct) return solve_nonlinear(*p.nonlinear, NonlinearMethod::Direct);
      if (method == Method::Picard) return solve_nonlinear(*p.nonlinear, NonlinearMethod::Picard);
      throw Error(Errc::SchemaError, "nonlinear problems solve with 'direct' or 'picard' only");
    case LoadedProblem::Kind::System:
      if (method != Method::Direct)
        throw Error(Errc::SchemaError, "systems solve with method 'direct' only");
      return solve_system_direct(*p.system);
    case LoadedProblem::Kind::Ivp: {
      if (method != Method::Direct)
        throw Error(Errc::SchemaError, "ivp problems solve with method 'direct' only");
      const LinearIVP& ivp = *p.ivp;
      SolveReport rep = solve_direct(ivp_to_volterra(ivp));
      rep.method = "direct (ivp)";
      for (const DerivativeGrid& g : taylor_reconstruct(ivp, rep.phi())) {
        TimeScalePtr sub = share(p.scale->restrict_range(g.lo, g.hi));
        rep.auxiliary.push_back(
            NamedGrid{"y_delta_" + std::to_string(g.order), g.lo, GridFunction(sub, g.values)});
      }
      return rep;
    }
  }
  throw Error(Errc::BadArgument, "unhandled problem kind");
}

std::string report_to_csv(const SolveReport& rep) {
  std::string out = "t,phi,residual\n";
  for (std::size_t c = 0; c < rep.solution.size(); ++c) {
    if (rep.solution.size() > 1) out += "# component " + std::to_string(c) + "\n";
    const GridFunction& g = rep.solution[c];
    const std::vector<double>& res = rep.residuals[c];
    for (std::size_t i = 0; i < g.size(); ++i) {
      out += format_double(g.scale()[i]);
      out += ',';
      out += format_double(g[i]);
      out += ',';
      out += format_double(i < res.size() ? res[i] : 0.0);
      out += '\n';
    }
  }
  return out;
}

std::string resolvent_to_csv(const KernelTable& gamma) {
  std::string out = "t,s,gamma\n";
  const TimeScale& ts = gamma.scale();
  for (std::size_t i = 0; i < gamma.points(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      out += format_double(ts[i]);
      out += ',';
      out += format_double(ts[j]);
      out += ',';
      out += format_double(gamma.at(i, j));
      out += '\n';
    }
  return out;
}

namespace {

ojson number_array(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(x);
  return a;
}

ojson points_of(const GridFunction& g) {
  ojson a = ojson::array();
  for (std::size_t i = 0; i < g.size(); ++i) a.push_back(g.scale()[i]);
  return a;
}

double max_solution_delta(const SolveReport& a, const SolveReport& b) {
  double worst = 0.0;
  std::size_t rows = std::min(a.solution.size(), b.solution.size());
  for (std::size_t c = 0; c < rows; ++c) {
    std::size_t n = std::min(a.solution[c].size(), b.solution[c].size());
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::fabs(a.solution[c][i] - b.solution[c][i]));
  }
  return worst;
}

}  // namespace

std::string report_to_json(const LoadedProblem& problem, const std::vector<SolveReport>& reports) {
  ojson root;
  root["schema_version"] = 1;
  ojson prob;
  prob["source"] = problem.source_path;
  prob["kind"] = kind_name(problem.kind);
  prob["timescale"] = problem.scale->describe();
  prob["points"] = problem.scale->size();
  root["problem"] = std::move(prob);

  ojson reps = ojson::array();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const SolveReport& rep = reports[k];
    ojson r;
    r["method"] = rep.method;
    r["terms_or_iterations"] = rep.terms_or_iterations;
    r["max_residual"] = rep.max_residual;
    r["residual_limit"] = rep.residual_limit;
    r["truncated"] = rep.truncated;
    r["tail_bound"] = rep.tail_bound;
    if (rep.guaranteed_until) r["guaranteed_until"] = *rep.guaranteed_until;
    r["left_domain"] = rep.left_domain;
    if (rep.first_exit_point) r["first_exit_point"] = *rep.first_exit_point;
    if (k > 0) r["max_delta_vs_first"] = max_solution_delta(reports[0], rep);

    ojson checks = ojson::array();
    for (const CheckRecord& c : rep.checks) {
      ojson cj;
      cj["name"] = c.name;
      cj["value"] = c.value;
      cj["limit"] = c.limit;
      cj["ok"] = c.ok;
      checks.push_back(std::move(cj));
    }
    r["checks"] = std::move(checks);

    ojson comps = ojson::array();
    for (std::size_t c = 0; c < rep.solution.size(); ++c) {
      ojson comp;
      comp["t"] = points_of(rep.solution[c]);
      comp["phi"] = number_array(rep.solution[c].values());
      comp["residual"] = number_array(rep.residuals[c]);
      comps.push_back(std::move(comp));
    }
    r["components"] = std::move(comps);

    if (!rep.auxiliary.empty()) {
      ojson aux = ojson::array();
      for (const NamedGrid& g : rep.auxiliary) {
        ojson gj;
        gj["name"] = g.name;
        gj["first_index"] = g.first_index;
        gj["t"] = points_of(g.values);
        gj["values"] = number_array(g.values.values());
        aux.push_back(std::move(gj));
      }
      r["auxiliary"] = std::move(aux);
    }
    reps.push_back(std::move(r));
  }
  root["reports"] = std::move(reps);
  return root.dump(2) + "\n";
}

namespace {

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_field(std::string_view f, double& out) {
  f = trimmed(f);
  if (f.empty()) return false;
  auto res = std::from_chars(f.data(), f.data() + f.size(), out);
  return res.ec == std::errc() && res.ptr == f.data() + f.size();
}

struct CandidateRows {
  std::vector<double> t;
  std::vector<double> value;
};

CandidateRows parse_candidate_csv(const std::string& text) {
  CandidateRows out;
  bool header_allowed = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    line = trimmed(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    double tv = 0.0;
    double vv = 0.0;
    bool numeric = fields.size() >= 2 && fields.size() <= 3 && parse_field(fields[0], tv) &&
                   parse_field(fields[1], vv);
    if (!numeric) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw Error(Errc::SchemaError,
                  "candidate CSV row is not of the form t,value[,extra]: '" + std::string(line) +
                      "'");
    }
    header_allowed = false;
    out.t.push_back(tv);
    out.value.push_back(vv);
  }
  return out;
}

void match_grid(const TimeScale& expected, std::size_t expect_rows, const CandidateRows& rows) {
  if (rows.t.size() != expect_rows)
    throw Error(Errc::GridMismatch, "candidate has " + std::to_string(rows.t.size()) +
                                        " rows, expected " + std::to_string(expect_rows));
  for (std::size_t i = 0; i < expect_rows; ++i) {
    auto idx = expected.try_index(rows.t[i]);
    if (!idx || *idx != i)
      throw Error(Errc::GridMismatch,
                  "candidate row " + std::to_string(i + 1) + " has t=" + format_double(rows.t[i]) +
                      ", expected " + format_double(expected[i]));
  }
}

VerifyOutcome outcome_from(const TimeScale& where, const std::vector<double>& residuals,
                           double tol, std::size_t rows) {
  VerifyOutcome v;
  v.tolerance = tol;
  v.rows = rows;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i)
    if (residuals[i] > residuals[worst]) worst = i;
  v.max_residual = residuals.empty() ? 0.0 : residuals[worst];
  v.worst_point = residuals.empty() ? where.a() : where[worst];
  v.ok = v.max_residual <= tol;
  return v;
}

}  // namespace

VerifyOutcome verify_candidate(const LoadedProblem& problem, const std::string& csv_text) {
  CandidateRows rows = parse_candidate_csv(csv_text);
  double tol = problem.options.tolerance;

  switch (problem.kind) {
    case LoadedProblem::Kind::Second:
    case LoadedProblem::Kind::Convolution: {
      const ProblemSpec& spec = *problem.second;
      match_grid(*spec.scale, spec.scale->size(), rows);
      return outcome_from(*spec.scale, second_kind_residuals(spec, rows.value), tol,
                          rows.t.size());
    }
    case LoadedProblem::Kind::First: {
      const FirstKindProblem& fk = *problem.first;
      const TimeScale& full = *fk.scale;
      TimeScale kappa = full.restrict_range(0, full.size() - 2);
      match_grid(kappa, kappa.size(), rows);
      return outcome_from(full, first_kind_residuals(fk, rows.value), tol, rows.t.size());
    }
    case LoadedProblem::Kind::Nonlinear: {
      const NonlinearProblem& np = *problem.nonlinear;
      match_grid(*np.scale, np.scale->size(), rows);
      return outcome_from(*np.scale, nonlinear_residuals(np, rows.value), tol, rows.t.size());
    }
    case LoadedProblem::Kind::Ivp: {
      ProblemSpec spec = ivp_to_volterra(*problem.ivp);
      match_grid(*spec.scale, spec.scale->size(), rows);
      return outcome_from(*spec.scale, second_kind_residuals(spec, rows.value), tol,
                          rows.t.size());
    }
    case LoadedProblem::Kind::System:
      throw Error(Errc::SchemaError, "verify does not support system problems");
  }
  throw Error(Errc::BadArgument, "unhandled problem kind");
}

}  // namespace tsvolterra
