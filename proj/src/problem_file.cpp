#include "tsvolterra/problem_file.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsvolterra/convolution.hpp"

namespace tsvolterra {
namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& msg) { throw Error(Errc::SchemaError, msg); }

void check_object(const json& v, const std::string& where) {
  if (!v.is_object()) schema_fail(where + " must be an object");
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) schema_fail("unknown field '" + it.key() + "' in " + where);
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(where + " is missing required field '" + key + "'");
  return *it;
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number()) schema_fail(where + "." + key + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    schema_fail(what + " must be a nonnegative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) schema_fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

expr::Expr parse_expr_field(const std::string& text, const std::string& label) {
  try {
    return expr::parse(text);
  } catch (const Error& e) {
    std::string msg = label + ": " + e.raw_message();
    if (e.offset()) throw Error(e.code(), msg, *e.offset());
    throw Error(e.code(), msg);
  }
}

expr::Expr get_expr(const json& obj, const char* key, const std::string& where) {
  return parse_expr_field(get_string(obj, key, where), where + "." + key);
}

ScaleSpec parse_scale_spec(const json& v, const std::string& where) {
  check_object(v, where);
  std::string type = get_string(v, "type", where);
  if (type == "explicit") {
    check_keys(v, {"type", "points"}, where);
    const json& pts = member(v, "points", where);
    if (!pts.is_array()) schema_fail(where + ".points must be an array of numbers");
    std::vector<double> p;
    for (const auto& e : pts) {
      if (!e.is_number()) schema_fail(where + ".points must contain numbers only");
      p.push_back(e.get<double>());
    }
    return ScaleSpec::explicit_points(std::move(p));
  }
  if (type == "uniform") {
    check_keys(v, {"type", "start", "stop", "step"}, where);
    return ScaleSpec::uniform(get_number(v, "start", where), get_number(v, "stop", where),
                              get_number(v, "step", where));
  }
  if (type == "qscale") {
    check_keys(v, {"type", "q", "start", "count"}, where);
    std::size_t count = get_count(member(v, "count", where), where + ".count");
    return ScaleSpec::qscale(get_number(v, "q", where), get_number(v, "start", where), count);
  }
  if (type == "union") {
    check_keys(v, {"type", "parts"}, where);
    const json& parts = member(v, "parts", where);
    if (!parts.is_array() || parts.empty()) schema_fail(where + ".parts must be a nonempty array");
    std::vector<ScaleSpec> ps;
    std::size_t i = 0;
    for (const auto& e : parts) {
      ps.push_back(parse_scale_spec(e, where + ".parts[" + std::to_string(i) + "]"));
      ++i;
    }
    return ScaleSpec::scale_union(std::move(ps));
  }
  schema_fail(where + ".type must be one of explicit|uniform|qscale|union");
}

SolverOptions parse_solver(const json& root) {
  SolverOptions opts;
  auto it = root.find("solver");
  if (it == root.end()) return opts;
  const json& s = *it;
  check_object(s, "solver");
  check_keys(s, {"method", "tol", "max_terms", "max_iter", "picard_initial"}, "solver");
  if (auto m = s.find("method"); m != s.end()) {
    if (!m->is_string()) schema_fail("solver.method must be a string");
    auto parsed = method_by_name(m->get<std::string>());
    if (!parsed) schema_fail("solver.method must be one of direct|neumann|picard|resolvent");
    opts.method = *parsed;
  }
  if (auto t = s.find("tol"); t != s.end()) {
    if (!t->is_number()) schema_fail("solver.tol must be a number");
    opts.tolerance = t->get<double>();
    if (!(opts.tolerance > 0.0)) schema_fail("solver.tol must be positive");
  }
  if (auto mt = s.find("max_terms"); mt != s.end())
    opts.max_terms = get_count(*mt, "solver.max_terms");
  if (auto mi = s.find("max_iter"); mi != s.end())
    opts.max_iterations = get_count(*mi, "solver.max_iter");
  if (auto pi = s.find("picard_initial"); pi != s.end()) {
    if (!pi->is_string()) schema_fail("solver.picard_initial must be an expression string");
    opts.picard_initial = parse_expr_field(pi->get<std::string>(), "solver.picard_initial");
  }
  return opts;
}

std::vector<std::string> with_common(std::vector<std::string> extra) {
  extra.insert(extra.end(), {"schema_version", "kind", "timescale", "solver"});
  return extra;
}

}  // namespace

const char* kind_name(LoadedProblem::Kind k) {
  switch (k) {
    case LoadedProblem::Kind::Second: return "second";
    case LoadedProblem::Kind::First: return "first";
    case LoadedProblem::Kind::Nonlinear: return "nonlinear";
    case LoadedProblem::Kind::System: return "system";
    case LoadedProblem::Kind::Ivp: return "ivp";
    case LoadedProblem::Kind::Convolution: return "convolution";
  }
  return "?";
}

LoadedProblem load_problem_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& pe) {
    throw Error(Errc::SchemaError, std::string("malformed JSON: ") + pe.what(),
                pe.byte == 0 ? 1 : pe.byte);
  }
  check_object(root, "problem file");

  const json& sv = member(root, "schema_version", "problem file");
  if (!sv.is_number_integer() || sv.get<long long>() != 1)
    schema_fail("schema_version must be the integer 1");

  std::string kind = get_string(root, "kind", "problem file");

  LoadedProblem out;
  out.source_path = origin;
  out.scale = build_time_scale(parse_scale_spec(member(root, "timescale", "problem file"), "timescale"));
  out.options = parse_solver(root);

  if (kind == "second") {
    out.kind = LoadedProblem::Kind::Second;
    check_keys(root, with_common({"lambda", "kernel", "forcing"}), "problem file");
    out.second = ProblemSpec::from_exprs(out.scale, get_number(root, "lambda", "problem file"),
                                         get_expr(root, "kernel", "problem file"),
                                         get_expr(root, "forcing", "problem file"), out.options);
  } else if (kind == "first") {
    out.kind = LoadedProblem::Kind::First;
    check_keys(root, with_common({"kernel", "forcing"}), "problem file");
    if (out.options.method != Method::Direct)
      schema_fail("first-kind problems solve directly; omit solver.method or use 'direct'");
    out.first = FirstKindProblem::from_exprs(out.scale, get_expr(root, "kernel", "problem file"),
                                             get_expr(root, "forcing", "problem file"),
                                             out.options.tolerance);
  } else if (kind == "nonlinear") {
    out.kind = LoadedProblem::Kind::Nonlinear;
    check_keys(root,
               with_common({"lambda", "integrand", "forcing", "lipschitz_L", "bound_M",
                            "domain_alpha"}),
               "problem file");
    if (out.options.method != Method::Direct && out.options.method != Method::Picard)
      schema_fail("nonlinear problems support solver.method 'direct' or 'picard' only");
    double lip = get_number(root, "lipschitz_L", "problem file");
    double bnd = get_number(root, "bound_M", "problem file");
    double alpha = get_number(root, "domain_alpha", "problem file");
    if (lip < 0.0) schema_fail("lipschitz_L must be nonnegative");
    if (!(bnd > 0.0)) schema_fail("bound_M must be positive");
    if (!(alpha > 0.0)) schema_fail("domain_alpha must be positive");
    NonlinearProblem np = NonlinearProblem::create(
        out.scale, get_number(root, "lambda", "problem file"),
        get_expr(root, "integrand", "problem file"), get_expr(root, "forcing", "problem file"),
        lip, bnd, alpha);
    np.tolerance = out.options.tolerance;
    np.max_iterations = out.options.max_iterations;
    np.picard_initial = out.options.picard_initial;
    out.nonlinear = std::move(np);
  } else if (kind == "system") {
    out.kind = LoadedProblem::Kind::System;
    check_keys(root, with_common({"lambda", "kernels", "forcings"}), "problem file");
    if (out.options.method != Method::Direct)
      schema_fail("systems solve directly; omit solver.method or use 'direct'");
    const json& fj = member(root, "forcings", "problem file");
    if (!fj.is_array() || fj.empty()) schema_fail("forcings must be a nonempty array of strings");
    std::size_t m = fj.size();
    const json& kj = member(root, "kernels", "problem file");
    if (!kj.is_array() || kj.size() != m)
      schema_fail("kernels must be an array of " + std::to_string(m) + " rows");
    std::vector<std::vector<expr::Expr>> kex(m);
    std::vector<expr::Expr> fex;
    for (std::size_t r = 0; r < m; ++r) {
      const json& row = kj[r];
      if (!row.is_array() || row.size() != m)
        schema_fail("kernels[" + std::to_string(r) + "] must be an array of " +
                    std::to_string(m) + " expression strings");
      for (std::size_t c = 0; c < m; ++c) {
        if (!row[c].is_string())
          schema_fail("kernels[" + std::to_string(r) + "][" + std::to_string(c) +
                      "] must be an expression string");
        kex[r].push_back(parse_expr_field(row[c].get<std::string>(),
                                          "kernels[" + std::to_string(r) + "][" +
                                              std::to_string(c) + "]"));
      }
      if (!fj[r].is_string())
        schema_fail("forcings[" + std::to_string(r) + "] must be an expression string");
      fex.push_back(
          parse_expr_field(fj[r].get<std::string>(), "forcings[" + std::to_string(r) + "]"));
    }
    out.system = SystemProblem::from_exprs(out.scale, get_number(root, "lambda", "problem file"),
                                           kex, fex);
  } else if (kind == "ivp") {
    out.kind = LoadedProblem::Kind::Ivp;
    check_keys(root, with_common({"order", "p", "q", "y0", "convention", "s"}), "problem file");
    if (out.options.method != Method::Direct)
      schema_fail("ivp problems solve directly; omit solver.method or use 'direct'");
    std::size_t order = get_count(member(root, "order", "problem file"), "order");
    if (order == 0) schema_fail("order must be a positive integer");
    const json& pj = member(root, "p", "problem file");
    if (!pj.is_array() || pj.size() != order)
      schema_fail("p must be an array of " + std::to_string(order) + " expression strings");
    std::vector<expr::Expr> coeffs;
    for (std::size_t i = 0; i < order; ++i) {
      if (!pj[i].is_string())
        schema_fail("p[" + std::to_string(i) + "] must be an expression string");
      coeffs.push_back(
          parse_expr_field(pj[i].get<std::string>(), "p[" + std::to_string(i) + "]"));
    }
    const json& yj = member(root, "y0", "problem file");
    if (!yj.is_array() || yj.size() != order)
      schema_fail("y0 must be an array of " + std::to_string(order) + " numbers");
    std::vector<double> y0;
    for (const auto& e : yj) {
      if (!e.is_number()) schema_fail("y0 must contain numbers only");
      y0.push_back(e.get<double>());
    }
    LinearIVP::Convention conv = LinearIVP::Convention::AtS;
    if (auto c = root.find("convention"); c != root.end()) {
      std::string cs = get_string(root, "convention", "problem file");
      if (cs == "at_s")
        conv = LinearIVP::Convention::AtS;
      else if (cs == "at_sigma_s")
        conv = LinearIVP::Convention::AtSigmaS;
      else
        schema_fail("convention must be 'at_s' or 'at_sigma_s'");
    }
    double s_val = out.scale->a();
    if (root.find("s") != root.end()) s_val = get_number(root, "s", "problem file");
    out.ivp = LinearIVP::create(out.scale, order, std::move(coeffs),
                                get_expr(root, "q", "problem file"), s_val, std::move(y0), conv);
  } else if (kind == "convolution") {
    out.kind = LoadedProblem::Kind::Convolution;
    check_keys(root, with_common({"lambda", "kernel", "forcing"}), "problem file");
    out.second = convolution_problem(out.scale, get_number(root, "lambda", "problem file"),
                                     get_expr(root, "kernel", "problem file"),
                                     get_expr(root, "forcing", "problem file"), out.options);
  } else {
    schema_fail("kind must be one of second|first|nonlinear|system|ivp|convolution");
  }
  return out;
}

LoadedProblem load_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SchemaError, "cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  LoadedProblem p = load_problem_text(buf.str(), path);
  return p;
}

}  // namespace tsvolterra
