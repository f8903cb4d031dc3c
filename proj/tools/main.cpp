#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tsvolterra/errors.hpp"
#include "tsvolterra/problem_file.hpp"
#include "tsvolterra/report_io.hpp"
#include "tsvolterra/second_kind.hpp"
#include "tsvolterra/selftest.hpp"

namespace {

using namespace tsvolterra;

// exit 2: the input was malformed (parse/schema/validation); exit 3: the
// problem was well-formed but the solver could not produce a result
int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::SyntaxError:
    case Errc::UnknownFunction:
    case Errc::BadArity:
    case Errc::UnboundVariable:
    case Errc::SchemaError:
    case Errc::EmptyScale:
    case Errc::NonMonotone:
    case Errc::InvalidProblem:
    case Errc::GridMismatch:
    case Errc::BadArgument:
    case Errc::NotAPoint:
    case Errc::OrderTooHigh:
      return 2;
    default:
      return 3;
  }
}

struct SolveFlags {
  std::vector<std::string> methods;
  double tol = 1e-10;
  std::size_t max_terms = 0;
  std::size_t max_iter = 0;
  bool tol_set = false;
  bool max_terms_set = false;
  bool max_iter_set = false;
};

void apply_overrides(LoadedProblem& lp, const SolveFlags& fl) {
  auto apply = [&](SolverOptions& o) {
    if (fl.tol_set) o.tolerance = fl.tol;
    if (fl.max_terms_set) o.max_terms = fl.max_terms;
    if (fl.max_iter_set) o.max_iterations = fl.max_iter;
  };
  apply(lp.options);
  if (lp.second) apply(lp.second->options);
  if (lp.first && fl.tol_set) lp.first->tolerance = fl.tol;
  if (lp.nonlinear) {
    if (fl.tol_set) lp.nonlinear->tolerance = fl.tol;
    if (fl.max_iter_set) lp.nonlinear->max_iterations = fl.max_iter;
  }
}

std::string strip_json_suffix(const std::string& path) {
  const std::string suffix = ".json";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return path.substr(0, path.size() - suffix.size());
  return path;
}

// default report prefix; keeps the solve from overwriting its own input file
std::string report_prefix_for(const std::string& path) {
  return strip_json_suffix(path) + "_report";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::BadArgument, "cannot write output file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::BadArgument, "write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SchemaError, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FileOutcome {
  int code = 0;
  std::string out;
  std::string err;
};

FileOutcome run_solve_one(const std::string& path, const SolveFlags& fl,
                          const std::string& out_override) {
  FileOutcome fo;
  try {
    LoadedProblem lp = load_problem_file(path);
    apply_overrides(lp, fl);

    std::vector<Method> methods;
    if (fl.methods.empty()) {
      methods.push_back(lp.options.method);
    } else {
      for (const std::string& name : fl.methods) {
        auto m = method_by_name(name);
        if (!m) throw Error(Errc::BadArgument, "unknown method: " + name);
        methods.push_back(*m);
      }
    }

    std::vector<SolveReport> reports;
    reports.reserve(methods.size());
    for (Method m : methods) reports.push_back(solve_loaded(lp, m));

    std::string prefix = out_override.empty() ? report_prefix_for(path) : out_override;
    write_file(prefix + ".csv", report_to_csv(reports.front()));
    write_file(prefix + ".json", report_to_json(lp, reports));

    bool within = true;
    for (const SolveReport& r : reports) {
      fo.out += path + ": " + r.method + " max_residual=" + format_double(r.max_residual) +
                " limit=" + format_double(r.residual_limit) +
                " steps=" + std::to_string(r.terms_or_iterations) + "\n";
      if (r.max_residual > r.residual_limit) within = false;
    }
    fo.out += "wrote " + prefix + ".csv and " + prefix + ".json\n";
    fo.code = within ? 0 : 1;
    if (!within) fo.err += path + ": residual exceeds tolerance\n";
  } catch (const Error& e) {
    fo.code = exit_code_for(e);
    fo.err += path + ": " + e.what() + "\n";
  } catch (const std::exception& e) {
    fo.code = 3;
    fo.err += path + ": " + std::string(e.what()) + "\n";
  }
  return fo;
}

int do_solve(const std::vector<std::string>& files, const SolveFlags& fl,
             const std::string& out_override, std::size_t jobs) {
  if (!out_override.empty() && files.size() > 1) {
    std::cerr << "--out needs a single input file (got " << files.size() << ")\n";
    return 2;
  }
  std::vector<FileOutcome> outcomes(files.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= files.size()) break;
      outcomes[i] = run_solve_one(files[i], fl, out_override);
    }
  };
  std::size_t n_threads = jobs == 0 ? 1 : std::min(jobs, files.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  int code = 0;
  for (const FileOutcome& fo : outcomes) {
    std::cout << fo.out;
    std::cerr << fo.err;
    code = std::max(code, fo.code);
  }
  return code;
}

int do_verify(const std::string& problem_path, const std::string& candidate_path,
              const SolveFlags& fl) {
  LoadedProblem lp = load_problem_file(problem_path);
  apply_overrides(lp, fl);
  std::string csv = read_file(candidate_path);
  VerifyOutcome v = verify_candidate(lp, csv);
  std::cout << (v.ok ? "PASS" : "FAIL") << ": max residual " << format_double(v.max_residual)
            << " at t=" << format_double(v.worst_point) << " (tolerance "
            << format_double(v.tolerance) << ", " << v.rows << " rows)\n";
  return v.ok ? 0 : 1;
}

int do_resolvent(const std::string& path, const std::string& out_override) {
  LoadedProblem lp = load_problem_file(path);
  if (lp.kind != LoadedProblem::Kind::Second && lp.kind != LoadedProblem::Kind::Convolution)
    throw Error(Errc::SchemaError,
                std::string("resolvent dump requires a second-kind problem, got kind '") +
                    kind_name(lp.kind) + "'");
  ResolventTable r = resolvent(*lp.second);
  std::string prefix = out_override.empty() ? strip_json_suffix(path) : out_override;
  std::string target = prefix + "_gamma.csv";
  write_file(target, resolvent_to_csv(r.gamma));
  std::cout << "wrote " << target << " (series depth " << r.depth << ")\n";
  return 0;
}

int do_selftest() {
  bool all = true;
  for (const auto& r : selftest::run_all()) {
    std::printf("item %2d %s  %s (%s)\n", r.number, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "selftest: all items passed" : "selftest: FAILED");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volterra integral equations on isolated time scales"};
  app.require_subcommand(1);

  SolveFlags fl;
  std::vector<std::string> files;
  std::string out_override;
  std::size_t jobs = 1;

  CLI::App* solve = app.add_subcommand("solve", "solve problem files, write CSV and JSON reports");
  solve->add_option("files", files, "problem file(s) in JSON form")->required();
  solve->add_option("--method", fl.methods,
                    "solution method, repeatable: direct|neumann|picard|resolvent");
  CLI::Option* tol_opt = solve->add_option("--tol", fl.tol, "residual tolerance (default 1e-10)");
  CLI::Option* terms_opt =
      solve->add_option("--max-terms", fl.max_terms, "series term cap (0 = run to termination)");
  CLI::Option* iter_opt =
      solve->add_option("--max-iter", fl.max_iter, "iteration cap (0 = structural cap)");
  solve->add_option("--out", out_override, "output path prefix (single input only)");
  solve->add_option("--jobs", jobs, "solve multiple files concurrently");

  std::string verify_problem, verify_candidate_path;
  CLI::App* verify = app.add_subcommand("verify", "check a candidate solution CSV against a problem");
  verify->add_option("problem", verify_problem, "problem file")->required();
  verify->add_option("candidate", verify_candidate_path, "candidate CSV (t,phi rows)")->required();
  CLI::Option* vtol_opt = verify->add_option("--tol", fl.tol, "residual tolerance (default 1e-10)");

  std::string resolvent_file;
  CLI::App* resolvent_cmd =
      app.add_subcommand("resolvent", "dump the resolvent kernel table as CSV");
  resolvent_cmd->add_option("file", resolvent_file, "problem file")->required();
  resolvent_cmd->add_option("--out", out_override, "output path prefix");

  app.add_subcommand("selftest", "run the built-in verification suite");

  CLI11_PARSE(app, argc, argv);

  fl.tol_set = tol_opt->count() > 0 || vtol_opt->count() > 0;
  fl.max_terms_set = terms_opt->count() > 0;
  fl.max_iter_set = iter_opt->count() > 0;

  try {
    if (solve->parsed()) return do_solve(files, fl, out_override, jobs);
    if (verify->parsed()) return do_verify(verify_problem, verify_candidate_path, fl);
    if (resolvent_cmd->parsed()) return do_resolvent(resolvent_file, out_override);
    return do_selftest();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
