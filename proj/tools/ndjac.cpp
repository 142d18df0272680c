#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndjac/charts.hpp"
#include "ndjac/decomp.hpp"
#include "ndjac/io.hpp"
#include "ndjac/measures.hpp"
#include "ndjac/random.hpp"
#include "ndjac/verify.hpp"

using json = nlohmann::json;
using namespace ndjac;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kInconclusive = 3;

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

// Rows of flat objects as csv or an aligned table.
std::string tabulate(const std::vector<json>& rows, const std::string& format) {
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    for (auto it = r.begin(); it != r.end(); ++it) {
      if (seen.insert(it.key()).second) cols.push_back(it.key());
    }
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> line;
    for (const auto& c : cols) line.push_back(r.contains(c) ? cell(r[c]) : "");
    cells.push_back(std::move(line));
  }
  std::ostringstream out;
  if (format == "csv") {
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (const auto& line : cells) {
      for (std::size_t k = 0; k < line.size(); ++k) {
        std::string v = line[k];
        if (v.find(',') != std::string::npos || v.find('"') != std::string::npos) {
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          v = q + "\"";
        }
        out << (k ? "," : "") << v;
      }
      out << '\n';
    }
    return out.str();
  }
  std::vector<std::size_t> width(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    width[k] = cols[k].size();
    for (const auto& line : cells) width[k] = std::max(width[k], line[k].size());
  }
  out << "# table layout is for reading only and may change; use --format json in scripts\n";
  for (std::size_t k = 0; k < cols.size(); ++k) out << std::left << std::setw(int(width[k] + 2)) << cols[k];
  out << '\n';
  for (const auto& line : cells) {
    for (std::size_t k = 0; k < line.size(); ++k) out << std::left << std::setw(int(width[k] + 2)) << line[k];
    out << '\n';
  }
  return out.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << text;
}

std::string render_report(const Report& r, const std::string& format) {
  if (format == "json") return r.to_json().dump(2) + "\n";
  std::vector<json> rows;
  for (const auto& rec : r.records) {
    json flat = rec;
    flat["engine"] = r.engine;
    rows.push_back(flat);
  }
  return tabulate(rows, format);
}

std::string render_suite(const json& suite, const std::string& format) {
  if (format == "json") return suite.dump(2) + "\n";
  std::vector<json> rows;
  for (const auto& rep : suite["reports"]) {
    const json& t = rep["task"];
    json row = {{"theorem", t["theorem"]}, {"engine", t["engine"]}, {"beta", t["beta"]}, {"m", t["m"]},
                {"n", t["n"]},             {"q", t["q"]},           {"pass", rep["pass"]}};
    if (rep.contains("constant_estimate")) row["constant"] = rep["constant_estimate"];
    if (rep.contains("error")) row["error"] = rep["error"];
    rows.push_back(row);
  }
  return tabulate(rows, format);
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

struct Options {
  std::string task, engine, b_source = "random", b_matrix, out, format = "json", preset = "desk", kind;
  bool demo = false;
  int beta = 1;
  std::size_t m = 2, n = 1, q = 1, trials = 20000, points = 20, functions = 0, jobs = 1;
  double step = 1e-5, rtol = 1e-5, ztol = 3.0, cv_tol = 0.02, lambda_lo = 1.0, lambda_hi = 2.0, a = 0.0;
  std::optional<double> gap, det_b, det_t1, det_l1, det_s11;
  std::uint64_t seed = 0;
  std::vector<double> lambda, d, delta, t;
};

void add_shape(CLI::App* app, Options& o) {
  app->add_option("--beta", o.beta, "real dimension of the algebra (1, 2, 4; 8 for scalars only)");
  app->add_option("--m", o.m, "columns (or size of a square matrix)");
  app->add_option("--n", o.n, "rows (or rank for the congruence theorems)");
  app->add_option("--q", o.q, "rank");
}

void add_output(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "write to this file instead of stdout");
  app->add_option("--format", o.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
}

TaskSpec task_from(const Options& o) {
  TaskSpec t;
  t.theorem = factor_kind_from_string(o.task);
  if (!o.engine.empty()) t.engine = engine_from_string(o.engine);
  t.demo = o.demo;
  t.beta = o.beta;
  t.m = o.m;
  t.n = o.n;
  t.q = o.q;
  t.b_source = b_source_from_string(o.b_source);
  if (!o.b_matrix.empty()) {
    t.b_matrix = read_matrix_file(o.b_matrix);
    t.b_source = BSource::File;
  }
  t.trials = o.trials;
  t.points = o.points;
  t.functions = o.functions;
  t.step = o.step;
  t.lambda_lo = o.lambda_lo;
  t.lambda_hi = o.lambda_hi;
  t.gap = o.gap;
  t.rtol = o.rtol;
  t.ztol = o.ztol;
  t.cv_tol = o.cv_tol;
  t.seed = o.seed;
  return t;
}

int cmd_factor(const Options& o) {
  if (o.kind == "tau") {
    std::cout << "value: " << number(tau(o.beta, int(o.q))) << '\n';
    return kPass;
  }
  FactorInput in;
  in.beta = o.beta;
  in.m = int(o.m);
  in.n = int(o.n);
  in.q = int(o.q);
  in.lambda = o.lambda;
  in.d = o.d;
  in.delta = o.delta;
  in.t_diag = o.t;
  in.det_b = o.det_b;
  in.det_t1 = o.det_t1;
  in.det_l1 = o.det_l1;
  in.det_s11 = o.det_s11;
  const double lg = factor_log(factor_kind_from_string(o.kind), in);
  std::cout << "value: " << number(std::exp(lg)) << "\nlog: " << number(lg) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobians of matrix factorisations over R, C and H: evaluation and numerical verification"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "run one verification task");
  verify->add_option("--task", o.task, "theorem id, e.g. mp-herm, uhlig-svd, sd")->required();
  verify->add_option("--engine", o.engine, "chart, mc-equality or mc-ratio (default: first admissible)");
  verify->add_flag("--demo", o.demo, "uhlig-svd on the chart engine, reported side by side");
  add_shape(verify, o);
  verify->add_option("--trials", o.trials, "Monte Carlo trials");
  verify->add_option("--points", o.points, "chart evaluation points");
  verify->add_option("--functions", o.functions, "number of test functions (default 3 equality, 5 ratio)");
  verify->add_option("--step", o.step, "finite-difference step");
  verify->add_option("--rtol", o.rtol, "relative tolerance on log factors");
  verify->add_option("--ztol", o.ztol, "z-score tolerance");
  verify->add_option("--cv-tol", o.cv_tol, "coefficient-of-variation tolerance");
  verify->add_option("--lambda-lo", o.lambda_lo, "lower edge of the spectrum box");
  verify->add_option("--lambda-hi", o.lambda_hi, "upper edge of the spectrum box");
  verify->add_option("--gap", o.gap, "minimum spectral gap (default 1e-3 of the box width)");
  verify->add_option("--seed", o.seed, "random seed");
  verify->add_option("--b-matrix", o.b_matrix, "matrix file holding B");
  verify->add_option("--b-source", o.b_source, "random, identity or file")
      ->check(CLI::IsMember({"random", "identity", "file"}));
  verify->add_option("--jobs", o.jobs, "worker threads");
  add_output(verify, o);

  auto* verify_all_cmd = app.add_subcommand("verify-all", "run an acceptance grid");
  verify_all_cmd->add_option("--preset", o.preset, "grid name")->check(CLI::IsMember({"desk"}));
  verify_all_cmd->add_option("--seed", o.seed, "random seed");
  verify_all_cmd->add_option("--jobs", o.jobs, "worker threads");
  add_output(verify_all_cmd, o);

  auto* factor = app.add_subcommand("factor", "evaluate a closed-form factor");
  factor->add_option("--kind", o.kind, "factor name, or tau")->required();
  add_shape(factor, o);
  factor->add_option("--lambda", o.lambda, "eigenvalues, decreasing")->delimiter(',');
  factor->add_option("--d", o.d, "singular values, decreasing")->delimiter(',');
  factor->add_option("--delta", o.delta, "eigenvalues of X, decreasing")->delimiter(',');
  factor->add_option("--t", o.t, "diagonal of T")->delimiter(',');
  factor->add_option("--det-b", o.det_b, "|B|");
  factor->add_option("--det-t1", o.det_t1, "|T1* T1|");
  factor->add_option("--det-l1", o.det_l1, "|L1* L1|");
  factor->add_option("--det-s11", o.det_s11, "|S11|");

  auto* gamma = app.add_subcommand("gamma", "multivariate gamma function");
  gamma->add_option("--m", o.m)->required();
  gamma->add_option("--beta", o.beta)->required();
  gamma->add_option("--a", o.a)->required();

  auto* volume = app.add_subcommand("volume", "Stiefel manifold volume");
  volume->add_option("--m", o.m)->required();
  volume->add_option("--n", o.n)->required();
  volume->add_option("--beta", o.beta)->required();

  auto* sample = app.add_subcommand("sample", "draw a random matrix and write it as a matrix file");
  sample->require_subcommand(1);
  auto* s_stiefel = sample->add_subcommand("stiefel", "uniform n x q matrix with orthonormal columns");
  auto* s_psd = sample->add_subcommand("psd", "rank-q m x m PSD matrix from the spectral measure");
  auto* s_rect = sample->add_subcommand("rect", "rank-q n x m matrix from the SVD measure");
  for (auto* s : {s_stiefel, s_psd, s_rect}) {
    add_shape(s, o);
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--out", o.out, "output file (default stdout)");
  }
  for (auto* s : {s_psd, s_rect}) {
    s->add_option("--lambda-lo", o.lambda_lo);
    s->add_option("--lambda-hi", o.lambda_hi);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (verify->parsed()) {
      const Report r = run_task(task_from(o), o.jobs);
      emit(render_report(r, o.format), o.out);
      return r.pass ? kPass : kFail;
    }
    if (verify_all_cmd->parsed()) {
      const SuiteResult s = verify_all(o.preset, o.seed, o.jobs);
      emit(render_suite(s.json, o.format), o.out);
      return s.pass ? kPass : kFail;
    }
    if (factor->parsed()) return cmd_factor(o);
    if (gamma->parsed()) {
      const double lg = mv_gamma_log(int(o.m), o.beta, o.a);
      std::cout << "value: " << number(std::exp(lg)) << "\nlog: " << number(lg) << '\n';
      return kPass;
    }
    if (volume->parsed()) {
      const double lg = stiefel_volume_log(int(o.m), int(o.n), o.beta);
      std::cout << "value: " << number(std::exp(lg)) << "\nlog: " << number(lg) << '\n';
      return kPass;
    }
    if (sample->parsed()) {
      if (o.beta == 8) throw Error(Errc::UnsupportedAlgebra, "octonion results conjectural: no matrix sampling for beta = 8");
      const Algebra kind = algebra_from_beta(o.beta);
      Rng rng = substream(o.seed, stable_hash("cli-sample"), 0);
      Mat out;
      if (s_stiefel->parsed()) {
        out = sample_stiefel_uniform(o.n, o.q, kind, rng);
      } else {
        const SpectrumBox box{o.lambda_lo, o.lambda_hi, 1e-3 * (o.lambda_hi - o.lambda_lo)};
        const auto space = s_psd->parsed() ? FactorizedSpace::Sd : FactorizedSpace::Svd;
        for (;;) {
          FactorizedDraw d = sample_factorized(space, o.n, o.m, o.q, kind, box, rng);
          if (d.accepted) {
            out = std::move(d.matrix);
            break;
          }
        }
      }
      const std::string text = matrix_to_json(out).dump(2) + "\n";
      emit(text, o.out);
      return kPass;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::InconclusiveStatistics ? kInconclusive : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
