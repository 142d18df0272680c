#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndjac/charts.hpp"
#include "ndjac/linalg.hpp"
#include "ndjac/measures.hpp"

namespace ndjac {

inline constexpr const char* kVersion = "0.1.0";

enum class Engine { Chart, McEquality, McRatio };
enum class BSource { Random, File, Identity };

std::string_view to_string(Engine e) noexcept;
Engine engine_from_string(std::string_view name);
std::string_view to_string(BSource s) noexcept;
BSource b_source_from_string(std::string_view name);

/// One verification job. The theorem is named by the factor it checks.
/// Roles of the sizes: X is n x m of rank q (SVD, QR, W, CHOL_X, MP_RECT);
/// S is m x m of rank q (SD, CHOL, MP_HERM); for the congruence theorems
/// X, Y are m x m of rank n and q is ignored.
struct TaskSpec {
  FactorKind theorem = FactorKind::MpHerm;
  std::optional<Engine> engine;  // default: first admissible engine
  bool demo = false;             // UHLIG_SVD on the chart engine, side-by-side report
  int beta = 1;
  std::size_t m = 2, n = 1, q = 1;
  BSource b_source = BSource::Random;
  std::optional<Mat> b_matrix;  // required for BSource::File
  std::size_t trials = 20000;
  std::size_t points = 20;
  std::size_t functions = 0;  // 0: 3 for equality, 5 for ratio
  double step = 1e-5;
  double lambda_lo = 1.0;
  double lambda_hi = 2.0;
  std::optional<double> gap;  // default 1e-3 (hi - lo)
  double rtol = 1e-5;
  double atol = 1e-7;
  double ztol = 3.0;
  double cv_tol = 0.02;
  std::uint64_t seed = 0;
};

struct Report {
  nlohmann::json task;
  std::string engine;
  nlohmann::json records = nlohmann::json::array();
  bool pass = false;
  std::optional<double> constant_estimate;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
  std::string version = kVersion;

  nlohmann::json to_json() const;
};

/// Engines that may run a theorem, in order of preference.
std::vector<Engine> admissible_engines(FactorKind theorem);
/// Fills defaults and validates sizes, algebra and the engine pairing.
/// Throws Errc::Registry or Errc::Configuration.
TaskSpec resolve(const TaskSpec& task);
/// Canonical echo of a resolved task; its hash names the random streams.
nlohmann::json task_echo(const TaskSpec& task);

/// The B of the congruence theorems: seeded Gaussian (resampled until
/// sdet(B) > 0.1 s^m, s = |B|_F / sqrt(m)), the identity, or the file matrix.
Mat congruence_matrix(const TaskSpec& task);

/// log |det| of the square Jacobian of `map` at x by central differences.
/// Throws Errc::InternalConsistency when the Jacobian is not square and
/// Errc::Conditioning when it is singular.
double chart_jacobian_logdet(const std::function<std::vector<double>(std::span<const double>)>& map,
                             std::span<const double> x, double step);

struct TestFunction {
  Mat center;
  double sigma = 1.0;
  double operator()(const Mat& x) const;
};

/// Gaussian bumps centred on reference samples, widths in [0.5, 2] times
/// the sample dispersion.
std::vector<TestFunction> make_test_functions(std::uint64_t seed, std::size_t count, std::span<const Mat> refs);

/// Runs `body(i)` for i in [0, count) on up to `jobs` threads. The first
/// exception by index is rethrown.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

Report run_chart_task(const TaskSpec& task, std::size_t jobs = 1);
Report run_mc_equality_task(const TaskSpec& task, std::size_t jobs = 1);
Report run_mc_ratio_task(const TaskSpec& task, std::size_t jobs = 1);
Report run_discrepancy_demo(const TaskSpec& task);
/// Dispatch on the resolved engine.
Report run_task(const TaskSpec& task, std::size_t jobs = 1);

/// Chart-engine evaluation of one congruence X = B* Y B at a given Y of
/// rank n, with greedy pivots on both sides.
struct CongruencePoint {
  double chart_logdet = 0.0;
  double uhlig_qr_log = 0.0;
  double uhlig_svd_log = 0.0;
  double alt_svd_log = 0.0;  // |B|^{beta n} |G1* B* H1|^{beta(m-n-1)+2}
};
CongruencePoint evaluate_congruence(const Mat& b, const Mat& y, std::size_t n, double step = 1e-5);

struct SuiteResult {
  nlohmann::json json;  // {"preset", "seed", "reports", "pass"}
  bool pass = false;
};
/// The desk-scale acceptance grid.
std::vector<TaskSpec> desk_tasks(std::uint64_t seed);
SuiteResult verify_all(const std::string& preset, std::uint64_t seed, std::size_t jobs = 1);

}  // namespace ndjac
