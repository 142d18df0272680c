#include "ndjac/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "ndjac/decomp.hpp"
#include "ndjac/io.hpp"
#include "ndjac/random.hpp"

namespace ndjac {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kBlock = 1024;
constexpr std::size_t kReferenceCount = 64;
constexpr double kInconclusive = 0.2;

bool is_congruence(FactorKind k) {
  return k == FactorKind::UhligSvd || k == FactorKind::UhligQr || k == FactorKind::UhligMp ||
         k == FactorKind::CongruenceNs;
}

void configure(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::Configuration, what);
}

std::int64_t elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

SpectrumBox task_box(const TaskSpec& t) { return {t.lambda_lo, t.lambda_hi, *t.gap}; }

bool in_box(std::span<const double> desc, const SpectrumBox& box) {
  for (std::size_t i = 0; i < desc.size(); ++i) {
    if (!(desc[i] >= box.lo && desc[i] <= box.hi)) return false;
    if (i > 0 && desc[i - 1] - desc[i] < box.gap) return false;
  }
  return true;
}

std::vector<double> leading(std::vector<double> v, std::size_t k) {
  v.resize(std::min(k, v.size()));
  return v;
}

// 1 / v, kept descending
std::vector<double> reciprocal(std::span<const double> v) {
  std::vector<double> out(v.rbegin(), v.rend());
  for (double& x : out) x = 1.0 / x;
  return out;
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + conj_transpose(a)); }

Mat congruence(const Mat& b, const Mat& y) { return hermitian_part(matmul(conj_transpose(b), matmul(y, b))); }

double min_relative_gap(std::span<const double> desc) {
  if (desc.empty()) return std::numeric_limits<double>::infinity();
  double g = desc.back() / desc.front();
  for (std::size_t i = 1; i < desc.size(); ++i) g = std::min(g, (desc[i - 1] - desc[i]) / desc.front());
  return g;
}

struct Stream {
  TaskSpec task;
  Algebra kind;
  json echo;
  std::uint64_t id;
};

Stream open_stream(const TaskSpec& in) {
  Stream s;
  s.task = resolve(in);
  s.kind = algebra_from_beta(s.task.beta);
  s.echo = task_echo(s.task);
  s.id = stable_hash(s.echo.dump());
  return s;
}

Report start_report(const Stream& s, std::string engine) {
  Report r;
  r.task = s.echo;
  r.engine = std::move(engine);
  r.seed = s.task.seed;
  return r;
}

// Sums and sums of squares of per-trial value vectors, reduced block by block
// in block order so the result does not depend on the number of workers.
struct Moments {
  std::vector<double> sum, sumsq;
  std::size_t count = 0;

  double mean(std::size_t k) const { return sum[k] / static_cast<double>(count); }
  double stderr_of(std::size_t k) const {
    const double n = static_cast<double>(count);
    const double m = mean(k);
    const double var = std::max(0.0, (sumsq[k] / n - m * m) * n / (n - 1.0));
    return std::sqrt(var / n);
  }
};

Moments accumulate(std::size_t trials, std::size_t width, std::size_t jobs,
                   const std::function<void(std::size_t, std::vector<double>&)>& trial) {
  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<Moments> partial(blocks);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    Moments& p = partial[b];
    p.sum.assign(width, 0.0);
    p.sumsq.assign(width, 0.0);
    std::vector<double> v(width);
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      std::fill(v.begin(), v.end(), 0.0);
      trial(i, v);
      for (std::size_t k = 0; k < width; ++k) {
        p.sum[k] += v[k];
        p.sumsq[k] += v[k] * v[k];
      }
      ++p.count;
    }
  });
  Moments total;
  total.sum.assign(width, 0.0);
  total.sumsq.assign(width, 0.0);
  for (const Moments& p : partial) {
    for (std::size_t k = 0; k < width; ++k) {
      total.sum[k] += p.sum[k];
      total.sumsq[k] += p.sumsq[k];
    }
    total.count += p.count;
  }
  return total;
}

// A weighted draw: an integral over a measure is the mean of weight * f(matrix).
struct Weighted {
  double weight = 0.0;
  Mat matrix;
};
using Sampler = std::function<Weighted(Rng&)>;

std::vector<Mat> reference_samples(const Stream& s, const Sampler& sampler) {
  std::vector<Mat> refs;
  const std::uint64_t stream = s.id ^ stable_hash("reference-samples");
  for (std::size_t j = 0; j < 64 * kReferenceCount && refs.size() < kReferenceCount; ++j) {
    Rng rng = substream(s.task.seed, stream, j);
    Weighted w = sampler(rng);
    if (w.weight > 0.0) refs.push_back(std::move(w.matrix));
  }
  configure(!refs.empty(), "no accepted reference samples; check the spectrum box");
  return refs;
}

void check_conclusive(double mean, double se, const char* side, std::size_t k) {
  if (!(std::abs(mean) > 0.0) || se / std::abs(mean) > kInconclusive) {
    throw Error(Errc::InconclusiveStatistics, std::string(side) + " estimate for test function " + std::to_string(k) +
                                                  " has relative standard error above 20%; raise --trials");
  }
}

// ---------------------------------------------------------------- chart engine

json chart_record(std::size_t index, double analytic, double numeric, const TaskSpec& t,
                  std::span<const double> spectrum) {
  const double err = std::abs(numeric - analytic);
  const double rel = analytic != 0.0 ? err / std::abs(analytic) : err;
  json r = {{"index", index},
            {"analytic_log", analytic},
            {"numeric_log", numeric},
            {"abs_error", err},
            {"rel_error", rel},
            {"pass", err <= std::max(t.rtol * std::abs(analytic), t.atol)}};
  if (min_relative_gap(spectrum) < 10.0 * SpectralOptions{}.gap_tol) r["warning"] = "near-degenerate spectrum";
  return r;
}

FactorizedDraw accepted_draw(FactorizedSpace space, std::size_t n, std::size_t m, std::size_t q, Algebra kind,
                             const SpectrumBox& box, Rng& rng) {
  for (;;) {
    FactorizedDraw d = sample_factorized(space, n, m, q, kind, box, rng);
    if (d.accepted) return d;
  }
}

json chart_point(const Stream& s, const Mat& b, std::size_t index) {
  const TaskSpec& t = s.task;
  Rng rng = substream(t.seed, s.id, index);
  const SpectrumBox box = task_box(t);
  switch (t.theorem) {
    case FactorKind::MpHerm: {
      const FactorizedDraw d = accepted_draw(FactorizedSpace::Sd, 0, t.m, t.q, s.kind, box, rng);
      const auto perm = choose_pivot_psd(d.matrix, t.q);
      const PsdChartPoint p = extract_psd(d.matrix, t.q, perm);
      const double numeric = chart_jacobian_logdet(
          [&](std::span<const double> c) {
            const Mat v = hermitian_part(pinv(complete_psd(with_coords(p, c)), t.q));
            return chart_coords(extract_psd(v, t.q, perm));
          },
          chart_coords(p), t.step);
      FactorInput in{.beta = t.beta, .m = int(t.m), .q = int(t.q), .lambda = d.spectrum};
      return chart_record(index, transform_factor_log(FactorKind::MpHerm, in), numeric, t, d.spectrum);
    }
    case FactorKind::MpRect: {
      const FactorizedDraw d = accepted_draw(FactorizedSpace::Svd, t.n, t.m, t.q, s.kind, box, rng);
      const Pivot piv = choose_pivot(d.matrix, t.q);
      const Pivot out_piv{piv.cols, piv.rows};
      const RectChartPoint p = extract_rect(d.matrix, t.q, piv);
      const double numeric = chart_jacobian_logdet(
          [&](std::span<const double> c) {
            return chart_coords(extract_rect(pinv(complete_rect(with_coords(p, c)), t.q), t.q, out_piv));
          },
          chart_coords(p), t.step);
      FactorInput in{.beta = t.beta, .m = int(t.m), .n = int(t.n), .q = int(t.q), .d = d.spectrum};
      return chart_record(index, transform_factor_log(FactorKind::MpRect, in), numeric, t, d.spectrum);
    }
    case FactorKind::Chol: {
      Mat tm(s.kind, t.q, t.m);
      std::vector<double> diag(t.q);
      for (std::size_t i = 0; i < t.q; ++i) {
        diag[i] = uniform(rng, t.lambda_lo, t.lambda_hi);
        tm.entry(i, i)[0] = diag[i];
        for (std::size_t j = i + 1; j < t.m; ++j) {
          for (double& v : tm.entry(i, j)) v = uniform(rng, -t.lambda_hi, t.lambda_hi);
        }
      }
      const auto ident = Pivot::identity(t.m, t.m).rows;
      const double numeric = chart_jacobian_logdet(
          [&](std::span<const double> c) {
            const Mat tc = staircase_from_coords(s.kind, t.q, t.m, c);
            return chart_coords(extract_psd(hermitian_part(matmul(conj_transpose(tc), tc)), t.q, ident));
          },
          staircase_coords(tm), t.step);
      FactorInput in{.beta = t.beta, .m = int(t.m), .q = int(t.q), .t_diag = diag};
      return chart_record(index, decomposition_density_log(FactorKind::Chol, in), numeric, t, {});
    }
    case FactorKind::UhligQr:
    case FactorKind::CongruenceNs: {
      const FactorizedDraw d = accepted_draw(FactorizedSpace::Sd, 0, t.m, t.n, s.kind, box, rng);
      const CongruencePoint c = evaluate_congruence(b, d.matrix, t.n, t.step);
      double analytic = c.uhlig_qr_log;
      if (t.theorem == FactorKind::CongruenceNs) {
        FactorInput in{.beta = t.beta, .m = int(t.m), .det_b = sdet(b)};
        analytic = transform_factor_log(FactorKind::CongruenceNs, in);
      }
      return chart_record(index, analytic, c.chart_logdet, t, d.spectrum);
    }
    default:
      throw Error(Errc::Registry, "no chart map for " + std::string(to_string(t.theorem)));
  }
}

// ------------------------------------------------------------ MC equality

struct EqualityModel {
  Sampler lhs;
  Sampler rhs;
};

EqualityModel equality_model(const Stream& s, const Mat& b) {
  const TaskSpec& t = s.task;
  const Algebra kind = s.kind;
  const SpectrumBox box = task_box(t);
  const int bt = t.beta;
  EqualityModel model;
  switch (t.theorem) {
    case FactorKind::W: {
      const SpectrumBox lbox{std::sqrt(box.lo), std::sqrt(box.hi), 0.0};
      model.lhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Svd, t.n, t.m, t.q, kind, lbox, rng);
        std::vector<double> lam = d.spectrum;
        for (double& x : lam) x *= x;
        return Weighted{in_box(lam, box) ? std::exp(d.log_weight + d.log_constant) : 0.0, std::move(d.matrix)};
      };
      model.rhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.q, kind, box, rng);
        const Mat v1 = sample_stiefel_uniform(t.n, t.q, kind, rng);
        if (!d.accepted) return Weighted{};
        std::vector<double> root = d.spectrum;
        for (double& x : root) x = std::sqrt(x);
        FactorInput in{.beta = bt, .m = int(t.m), .n = int(t.n), .q = int(t.q), .lambda = d.spectrum};
        const double lw = d.log_weight + d.log_constant + coupling_factor_log(FactorKind::W, in) +
                          stiefel_volume_log(int(t.q), int(t.n), bt);
        return Weighted{std::exp(lw), matmul(scale_columns(v1, root), conj_transpose(d.right))};
      };
      break;
    }
    case FactorKind::UhligSvd:
    case FactorKind::UhligMp: {
      const bool mp = t.theorem == FactorKind::UhligMp;
      const Mat bstar = conj_transpose(b);
      const Mat binv = inverse(b);
      const Mat binv_star = conj_transpose(binv);
      const double det_b = sdet(b);
      const FactorKind kindf = t.theorem;
      // The range of an image point is B* times a uniform subspace, so frames
      // are drawn from the matching angular Gaussian. Given the frame W, the
      // nonzero eigenvalues of Y (or Y^+) are those of M K*K with K = B^-* W,
      // which bounds the eigenvalues of M to a box depending on K only.
      // For unitary B the angular Gaussian is uniform; the plain factorised
      // draw then coincides with the RHS draw and the control is exact.
      const bool unitary = max_abs_diff(matmul(bstar, b), Mat::identity(kind, t.m)) < 1e-14;
      model.lhs = [=](Rng& rng) {
        if (unitary) {
          const SpectrumBox ubox = mp ? SpectrumBox{1.0 / box.hi, 1.0 / box.lo, 0.0} : SpectrumBox{box.lo, box.hi, 0.0};
          FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.n, kind, ubox, rng);
          const auto mu = leading(hermitian_eigenvalues(congruence(binv, d.matrix)), t.n);
          const bool inside = in_box(mp ? reciprocal(mu) : mu, box);
          return Weighted{inside ? std::exp(d.log_weight + d.log_constant) : 0.0, std::move(d.matrix)};
        }
        const FrameDraw f = sample_stiefel_acg(bstar, t.n, rng);
        const auto kv = singular_values(matmul(binv_star, f.frame));
        const double kmax2 = kv.front() * kv.front(), kmin2 = kv.back() * kv.back();
        const SpectrumBox mbox = mp ? SpectrumBox{1.0 / (box.hi * kmax2), 1.0 / (box.lo * kmin2), 0.0}
                                    : SpectrumBox{box.lo / kmax2, box.hi / kmin2, 0.0};
        FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.n, kind, mbox, rng);
        Mat x = hermitian_part(matmul(scale_columns(f.frame, d.spectrum), conj_transpose(f.frame)));
        const auto mu = leading(hermitian_eigenvalues(congruence(binv, x)), t.n);
        const auto lam = mp ? reciprocal(mu) : mu;
        const bool inside = std::all_of(mu.begin(), mu.end(), [](double v) { return v > 0.0; }) && in_box(lam, box);
        return Weighted{inside ? std::exp(d.log_weight + d.log_constant - f.log_density) : 0.0, std::move(x)};
      };
      model.rhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.n, kind, box, rng);
        if (!d.accepted) return Weighted{};
        Mat target = d.matrix;
        if (mp) {
          std::vector<double> inv_l(d.spectrum);
          for (double& x : inv_l) x = 1.0 / x;
          target = hermitian_part(matmul(scale_columns(d.right, inv_l), conj_transpose(d.right)));
        }
        Mat x = congruence(b, target);
        FactorInput in{.beta = bt, .m = int(t.m), .n = int(t.n), .q = int(t.n)};
        in.delta = leading(hermitian_eigenvalues(x), t.n);
        in.lambda = d.spectrum;
        in.det_b = det_b;
        const double lw = d.log_weight + d.log_constant + transform_factor_log(kindf, in);
        return Weighted{std::exp(lw), std::move(x)};
      };
      break;
    }
    case FactorKind::MpHerm: {
      const SpectrumBox lbox{1.0 / box.hi, 1.0 / box.lo, 0.0};
      model.lhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.q, kind, lbox, rng);
        const bool inside = in_box(reciprocal(d.spectrum), box);
        return Weighted{inside ? std::exp(d.log_weight + d.log_constant) : 0.0, std::move(d.matrix)};
      };
      model.rhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.q, kind, box, rng);
        if (!d.accepted) return Weighted{};
        std::vector<double> inv_l(d.spectrum);
        for (double& x : inv_l) x = 1.0 / x;
        FactorInput in{.beta = bt, .m = int(t.m), .q = int(t.q), .lambda = d.spectrum};
        const double lw = d.log_weight + d.log_constant + transform_factor_log(FactorKind::MpHerm, in);
        return Weighted{std::exp(lw), hermitian_part(matmul(scale_columns(d.right, inv_l), conj_transpose(d.right)))};
      };
      break;
    }
    case FactorKind::MpRect: {
      const SpectrumBox lbox{1.0 / box.hi, 1.0 / box.lo, 0.0};
      model.lhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Svd, t.m, t.n, t.q, kind, lbox, rng);
        const bool inside = in_box(reciprocal(d.spectrum), box);
        return Weighted{inside ? std::exp(d.log_weight + d.log_constant) : 0.0, std::move(d.matrix)};
      };
      model.rhs = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Svd, t.n, t.m, t.q, kind, box, rng);
        if (!d.accepted) return Weighted{};
        std::vector<double> inv_d(d.spectrum);
        for (double& x : inv_d) x = 1.0 / x;
        FactorInput in{.beta = bt, .m = int(t.m), .n = int(t.n), .q = int(t.q), .d = d.spectrum};
        const double lw = d.log_weight + d.log_constant + transform_factor_log(FactorKind::MpRect, in);
        return Weighted{std::exp(lw), matmul(scale_columns(d.right, inv_d), conj_transpose(d.left))};
      };
      break;
    }
    default:
      throw Error(Errc::Registry, "no equality model for " + std::string(to_string(t.theorem)));
  }
  return model;
}

// --------------------------------------------------------------- MC ratio

struct RatioModel {
  Sampler hausdorff;
  Sampler factorized;
};

// Ordered choices of q leading indices out of n, each completed with the
// remaining indices in increasing order.
std::vector<std::vector<std::size_t>> leading_orders(std::size_t n, std::size_t q) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> lead;
  std::vector<bool> used(n, false);
  std::function<void()> rec = [&] {
    if (lead.size() == q) {
      std::vector<std::size_t> perm = lead;
      for (std::size_t i = 0; i < n; ++i) {
        if (!used[i]) perm.push_back(i);
      }
      out.push_back(std::move(perm));
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      lead.push_back(i);
      rec();
      lead.pop_back();
      used[i] = false;
    }
  };
  rec();
  return out;
}

bool same_lead(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t q) {
  return std::equal(a.begin(), a.begin() + std::ptrdiff_t(q), b.begin());
}

bool owns(const Mat& x, const RectChartPoint& p) {
  const Pivot piv = choose_pivot(x, p.q);
  return same_lead(piv.rows, p.pivot.rows, p.q) && same_lead(piv.cols, p.pivot.cols, p.q);
}

bool owns(const Mat& x, const PsdChartPoint& p) { return same_lead(choose_pivot_psd(x, p.q), p.perm, p.q); }

// Uniform box in chart coordinates, weighted by the Hausdorff density. With
// several charts a stratum is drawn uniformly and a point counts only if the
// greedy pivot of its completion selects that chart, so the charts tile the
// manifold and the density stays bounded.
template <class Point>
Sampler chart_box_sampler(std::vector<Point> charts, std::vector<double> lo, std::vector<double> hi, double step,
                          std::function<Mat(const Point&)> complete, std::function<bool(const Mat&)> inside) {
  double log_vol = std::log(double(charts.size()));
  for (std::size_t k = 0; k < lo.size(); ++k) log_vol += std::log(hi[k] - lo[k]);
  return [=](Rng& rng) {
    const auto k = std::min(charts.size() - 1, std::size_t(uniform(rng, 0.0, double(charts.size()))));
    std::vector<double> c(lo.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = uniform(rng, lo[i], hi[i]);
    const Point p = with_coords(charts[k], c);
    Mat x;
    try {
      x = complete(p);
    } catch (const Error& e) {
      if (e.code() != Errc::SingularChart && e.code() != Errc::NotPsd) throw;
      return Weighted{};
    }
    if (!inside(x)) return Weighted{};
    if (charts.size() > 1 && !owns(x, p)) return Weighted{};
    return Weighted{std::exp(log_hausdorff_density(p, step) + log_vol), std::move(x)};
  };
}

std::vector<RectChartPoint> rect_charts(Algebra kind, std::size_t n, std::size_t m, std::size_t q) {
  const RectChartPoint base{kind, n, m, q, Pivot::identity(n, m), Mat(kind, q, q), Mat(kind, q, m - q),
                            Mat(kind, n - q, q)};
  if (q == std::min(n, m)) return {base};
  std::vector<RectChartPoint> out;
  for (const auto& rows : leading_orders(n, q)) {
    for (const auto& cols : leading_orders(m, q)) {
      RectChartPoint p = base;
      p.pivot = Pivot{rows, cols};
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<PsdChartPoint> psd_charts(Algebra kind, std::size_t m, std::size_t q) {
  const PsdChartPoint base{kind, m, q, Pivot::identity(m, m).rows, Mat(kind, q, q), Mat(kind, q, m - q)};
  if (q == m) return {base};
  std::vector<PsdChartPoint> out;
  for (const auto& perm : leading_orders(m, q)) {
    PsdChartPoint p = base;
    p.perm = perm;
    out.push_back(std::move(p));
  }
  return out;
}


// Staircase box: diagonal coordinates in [dlo, dhi], the rest in [-off, off].
void staircase_box(std::size_t q, std::size_t m, int beta, double dlo, double dhi, double off, std::vector<double>& lo,
                   std::vector<double>& hi) {
  lo.clear();
  hi.clear();
  for (std::size_t i = 0; i < q; ++i) {
    lo.push_back(dlo);
    hi.push_back(dhi);
    for (std::size_t j = i + 1; j < m; ++j) {
      for (int k = 0; k < beta; ++k) {
        lo.push_back(-off);
        hi.push_back(off);
      }
    }
  }
}

bool staircase_inside(const Mat& tm, double dlo, double dhi, double off) {
  for (std::size_t i = 0; i < tm.rows(); ++i) {
    const double d = tm.entry(i, i)[0];
    if (!(d >= dlo && d <= dhi)) return false;
    for (std::size_t j = i + 1; j < tm.cols(); ++j) {
      for (double v : tm.entry(i, j)) {
        if (std::abs(v) > off) return false;
      }
    }
  }
  return true;
}

bool positive_definite(const Mat& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(real_embed(s));
  return llt.info() == Eigen::Success;
}

RatioModel ratio_model(const Stream& s) {
  const TaskSpec& t = s.task;
  const Algebra kind = s.kind;
  const SpectrumBox box = task_box(t);
  const int bt = t.beta;
  RatioModel model;
  switch (t.theorem) {
    case FactorKind::Svd: {
      const std::size_t dim = rect_chart_dim(t.n, t.m, t.q, bt);
      model.hausdorff = chart_box_sampler<RectChartPoint>(
          rect_charts(kind, t.n, t.m, t.q), std::vector<double>(dim, -box.hi), std::vector<double>(dim, box.hi), t.step, complete_rect,
          [=](const Mat& x) { return in_box(leading(singular_values(x), t.q), box); });
      model.factorized = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Svd, t.n, t.m, t.q, kind, box, rng);
        return Weighted{d.accepted ? std::exp(d.log_weight + d.log_constant) : 0.0, std::move(d.matrix)};
      };
      break;
    }
    case FactorKind::Sd: {
      std::vector<double> lo, hi;
      staircase_box(t.q, t.m, bt, 0.0, box.hi, box.hi, lo, hi);
      model.hausdorff = chart_box_sampler<PsdChartPoint>(
          psd_charts(kind, t.m, t.q), lo, hi, t.step, complete_psd,
          [=](const Mat& x) { return in_box(leading(hermitian_eigenvalues(x), t.q), box); });
      model.factorized = [=](Rng& rng) {
        FactorizedDraw d = sample_factorized(FactorizedSpace::Sd, 0, t.m, t.q, kind, box, rng);
        return Weighted{d.accepted ? std::exp(d.log_weight + d.log_constant) : 0.0, std::move(d.matrix)};
      };
      break;
    }
    case FactorKind::Qr: {
      // X = H1 T with diag(T) in [lo, hi] and the other coefficients of T in [-hi, hi].
      const double reach = box.hi * std::sqrt(1.0 + bt * (double(t.m) - 1.0));
      const std::size_t dim = rect_chart_dim(t.n, t.m, t.q, bt);
      model.hausdorff = chart_box_sampler<RectChartPoint>(
          rect_charts(kind, t.n, t.m, t.q), std::vector<double>(dim, -reach), std::vector<double>(dim, reach), t.step,
          complete_rect, [=](const Mat& x) {
            try {
              return staircase_inside(qr_positive(x, t.q).t, box.lo, box.hi, box.hi);
            } catch (const Error& e) {
              if (e.code() != Errc::PivotRequired) throw;
              return false;
            }
          });
      std::vector<double> lo, hi;
      staircase_box(t.q, t.m, bt, box.lo, box.hi, box.hi, lo, hi);
      double log_vol = 0.0;
      for (std::size_t k = 0; k < lo.size(); ++k) log_vol += std::log(hi[k] - lo[k]);
      const double log_frames = stiefel_volume_log(int(t.q), int(t.n), bt);
      model.factorized = [=](Rng& rng) {
        std::vector<double> c(lo.size());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = uniform(rng, lo[k], hi[k]);
        const Mat tm = staircase_from_coords(kind, t.q, t.m, c);
        const Mat h1 = sample_stiefel_uniform(t.n, t.q, kind, rng);
        FactorInput in{.beta = bt, .m = int(t.m), .n = int(t.n), .q = int(t.q)};
        for (std::size_t i = 0; i < t.q; ++i) in.t_diag.push_back(tm.entry(i, i)[0]);
        const double lw = decomposition_density_log(FactorKind::Qr, in) + log_vol + log_frames;
        return Weighted{std::exp(lw), matmul(h1, tm)};
      };
      break;
    }
    case FactorKind::CholX: {
      // S = X* X with diag(S) in [lo, hi]; off-diagonal coefficients of S in [-hi, hi].
      const double reach = std::sqrt(box.hi);
      const std::size_t dim = rect_chart_dim(t.n, t.m, t.q, bt);
      model.hausdorff = chart_box_sampler<RectChartPoint>(
          rect_charts(kind, t.n, t.m, t.q), std::vector<double>(dim, -reach), std::vector<double>(dim, reach), t.step,
          complete_rect, [=](const Mat& x) {
            return staircase_inside(matmul(conj_transpose(x), x), box.lo, box.hi, box.hi);
          });
      PsdChartPoint shape{kind, t.m, t.m, Pivot::identity(t.m, t.m).rows, Mat(kind, t.m, t.m), Mat(kind, t.m, 0)};
      std::vector<double> lo, hi;
      staircase_box(t.m, t.m, bt, box.lo, box.hi, box.hi, lo, hi);
      double log_vol = 0.0;
      for (std::size_t k = 0; k < lo.size(); ++k) log_vol += std::log(hi[k] - lo[k]);
      const double log_frames = stiefel_volume_log(int(t.q), int(t.n), bt);
      model.factorized = [=](Rng& rng) {
        std::vector<double> c(lo.size());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = uniform(rng, lo[k], hi[k]);
        const Mat h1 = sample_stiefel_uniform(t.n, t.q, kind, rng);
        const PsdChartPoint p = with_coords(shape, c);
        if (!positive_definite(p.s11)) return Weighted{};
        const Mat tm = cholesky_rank_q(p.s11, t.q);
        FactorInput in{.beta = bt, .m = int(t.m), .n = int(t.n), .q = int(t.q), .det_s11 = sdet(p.s11)};
        const double lw = coupling_factor_log(FactorKind::CholX, in) + log_vol + log_frames;
        return Weighted{std::exp(lw), matmul(h1, tm)};
      };
      break;
    }
    default:
      throw Error(Errc::Registry, "no ratio model for " + std::string(to_string(t.theorem)));
  }
  return model;
}

}  // namespace

// ------------------------------------------------------------------ public

std::string_view to_string(Engine e) noexcept {
  switch (e) {
    case Engine::Chart: return "chart";
    case Engine::McEquality: return "mc-equality";
    case Engine::McRatio: return "mc-ratio";
  }
  return "unknown";
}

Engine engine_from_string(std::string_view name) {
  for (auto e : {Engine::Chart, Engine::McEquality, Engine::McRatio}) {
    if (to_string(e) == name) return e;
  }
  throw Error(Errc::InvalidInput, "unknown engine '" + std::string(name) + "'");
}

std::string_view to_string(BSource s) noexcept {
  switch (s) {
    case BSource::Random: return "random";
    case BSource::File: return "file";
    case BSource::Identity: return "identity";
  }
  return "unknown";
}

BSource b_source_from_string(std::string_view name) {
  for (auto s : {BSource::Random, BSource::File, BSource::Identity}) {
    if (to_string(s) == name) return s;
  }
  throw Error(Errc::InvalidInput, "unknown B source '" + std::string(name) + "'");
}

json Report::to_json() const {
  json j = {{"task", task},  {"engine", engine}, {"records", records}, {"pass", pass},
            {"seed", seed},  {"runtime_ms", runtime_ms}, {"version", version}};
  j["constant_estimate"] = constant_estimate ? json(*constant_estimate) : json(nullptr);
  return j;
}

std::vector<Engine> admissible_engines(FactorKind theorem) {
  switch (theorem) {
    case FactorKind::Svd:
    case FactorKind::Sd:
    case FactorKind::Qr:
    case FactorKind::CholX:
      return {Engine::McRatio};
    case FactorKind::W:
    case FactorKind::UhligSvd:
    case FactorKind::UhligMp:
      return {Engine::McEquality};
    case FactorKind::MpHerm:
    case FactorKind::MpRect:
      return {Engine::Chart, Engine::McEquality};
    case FactorKind::Chol:
    case FactorKind::UhligQr:
    case FactorKind::CongruenceNs:
      return {Engine::Chart};
  }
  return {};
}

TaskSpec resolve(const TaskSpec& in) {
  TaskSpec t = in;
  if (t.beta == 8) {
    throw Error(Errc::Registry, "octonion results conjectural: beta = 8 is not verified for any decomposition task");
  }
  if (t.beta != 1 && t.beta != 2 && t.beta != 4) throw Error(Errc::Registry, "beta must be 1, 2 or 4");
  const auto adm = admissible_engines(t.theorem);
  const std::string name(to_string(t.theorem));
  if (t.demo) {
    if (t.theorem != FactorKind::UhligSvd) throw Error(Errc::Registry, "demo mode exists only for uhlig-svd");
    if (t.engine && *t.engine != Engine::Chart) throw Error(Errc::Registry, "demo mode runs on the chart engine");
    t.engine = Engine::Chart;
  } else if (!t.engine) {
    t.engine = adm.front();
  } else if (std::find(adm.begin(), adm.end(), *t.engine) == adm.end()) {
    std::string list;
    for (auto e : adm) list += (list.empty() ? "" : ", ") + std::string(to_string(e));
    throw Error(Errc::Registry,
                name + " is not admissible on engine " + std::string(to_string(*t.engine)) + " (admissible: " + list + ")");
  }

  configure(t.lambda_lo > 0.0 && t.lambda_hi > t.lambda_lo, "need 0 < lambda-lo < lambda-hi");
  if (!t.gap) t.gap = 1e-3 * (t.lambda_hi - t.lambda_lo);
  configure(*t.gap >= 0.0, "gap must be non-negative");
  configure(t.step > 0.0 && t.step < 1e-1, "step must lie in (0, 0.1)");
  configure(t.rtol > 0.0 && t.atol >= 0.0 && t.ztol > 0.0 && t.cv_tol > 0.0, "tolerances must be positive");

  if (is_congruence(t.theorem)) {
    if (t.theorem == FactorKind::CongruenceNs) t.n = t.m;
    configure(t.n >= 1 && t.n <= t.m, name + ": need 1 <= n <= m");
    t.q = t.n;
  } else if (t.theorem == FactorKind::Sd || t.theorem == FactorKind::Chol || t.theorem == FactorKind::MpHerm) {
    configure(t.q >= 1 && t.q <= t.m, name + ": need 1 <= q <= m");
    t.n = 0;
  } else {
    configure(t.q >= 1 && t.q <= std::min(t.n, t.m), name + ": need 1 <= q <= min(n, m)");
  }
  if (t.theorem == FactorKind::Qr || t.theorem == FactorKind::CholX) {
    configure(t.q == t.m, name + ": ratio constancy holds only for q = m");
  }

  if (is_congruence(t.theorem)) {
    if (t.b_source == BSource::File) {
      configure(t.b_matrix.has_value(), "b-source file needs --b-matrix");
      configure(t.b_matrix->rows() == t.m && t.b_matrix->cols() == t.m, "B must be m x m");
      configure(t.b_matrix->beta() == t.beta, "B must be over the task algebra");
    }
  } else {
    t.b_source = BSource::Identity;
    t.b_matrix.reset();
  }

  switch (*t.engine) {
    case Engine::Chart:
      configure(t.points >= 1, "points must be at least 1");
      t.trials = 0;
      t.functions = 0;
      break;
    case Engine::McEquality:
      if (t.functions == 0) t.functions = 3;
      configure(t.trials >= 10000, "trials must be at least 1e4");
      configure(t.functions >= 2, "equality checks need at least 2 test functions");
      t.points = 0;
      break;
    case Engine::McRatio:
      if (t.functions == 0) t.functions = 5;
      configure(t.trials >= 10000, "trials must be at least 1e4");
      configure(t.functions >= 5, "ratio checks need at least 5 test functions");
      t.points = 0;
      break;
  }
  if (t.demo) t.points = 1;
  return t;
}

json task_echo(const TaskSpec& t) {
  json j = {{"theorem", std::string(to_string(t.theorem))},
            {"engine", t.engine ? std::string(to_string(*t.engine)) : std::string()},
            {"demo", t.demo},
            {"beta", t.beta},
            {"m", t.m},
            {"n", t.n},
            {"q", t.q},
            {"b_source", std::string(to_string(t.b_source))},
            {"trials", t.trials},
            {"points", t.points},
            {"functions", t.functions},
            {"step", t.step},
            {"lambda_lo", t.lambda_lo},
            {"lambda_hi", t.lambda_hi},
            {"gap", t.gap ? json(*t.gap) : json(nullptr)},
            {"rtol", t.rtol},
            {"atol", t.atol},
            {"ztol", t.ztol},
            {"cv_tol", t.cv_tol},
            {"seed", t.seed}};
  if (t.b_matrix) j["b_matrix"] = matrix_to_json(*t.b_matrix);
  return j;
}

Mat congruence_matrix(const TaskSpec& t) {
  const Algebra kind = algebra_from_beta(t.beta);
  switch (t.b_source) {
    case BSource::Identity:
      return Mat::identity(kind, t.m);
    case BSource::File: {
      if (!t.b_matrix) throw Error(Errc::Configuration, "b-source file needs a matrix");
      if (!(sdet(*t.b_matrix) > 0.0)) throw Error(Errc::InvalidInput, "B must be nonsingular");
      return *t.b_matrix;
    }
    case BSource::Random: {
      Rng rng = substream(t.seed, stable_hash("congruence-matrix"), t.m * 16 + static_cast<std::size_t>(t.beta));
      for (;;) {
        Mat b = gaussian_matrix(kind, t.m, t.m, rng);
        const double s = b.frobenius_norm() / std::sqrt(double(t.m));
        if (sdet(b) > 0.1 * std::pow(s, double(t.m))) return b;
      }
    }
  }
  throw Error(Errc::Configuration, "unknown B source");
}

double chart_jacobian_logdet(const std::function<std::vector<double>(std::span<const double>)>& map,
                             std::span<const double> x, double step) {
  if (x.empty()) return 0.0;
  std::vector<double> work(x.begin(), x.end());
  Eigen::MatrixXd jac;
  for (std::size_t c = 0; c < work.size(); ++c) {
    const double h = std::max(step, step * std::abs(x[c]));
    work[c] = x[c] + h;
    const auto plus = map(work);
    work[c] = x[c] - h;
    const auto minus = map(work);
    work[c] = x[c];
    if (plus.size() != x.size() || minus.size() != x.size()) {
      throw Error(Errc::InternalConsistency, "chart Jacobian is not square: " + std::to_string(plus.size()) + " x " +
                                                 std::to_string(x.size()));
    }
    if (c == 0) jac.resize(Eigen::Index(x.size()), Eigen::Index(x.size()));
    for (std::size_t r = 0; r < plus.size(); ++r) jac(Eigen::Index(r), Eigen::Index(c)) = (plus[r] - minus[r]) / (2.0 * h);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  const Eigen::MatrixXd& u = lu.matrixLU();
  double big = 0.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k) big = std::max(big, std::abs(u(k, k)));
  double s = 0.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    const double v = std::abs(u(k, k));
    if (!(v > 1e-13 * big)) throw Error(Errc::Conditioning, "chart Jacobian is singular");
    s += std::log(v);
  }
  return s;
}

double TestFunction::operator()(const Mat& x) const {
  require_same_kind(x, center, "test function");
  if (x.rows() != center.rows() || x.cols() != center.cols()) throw Error(Errc::ShapeMismatch, "test function shape");
  auto a = x.data();
  auto c = center.data();
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - c[k]) * (a[k] - c[k]);
  return std::exp(-s / (2.0 * sigma * sigma));
}

std::vector<TestFunction> make_test_functions(std::uint64_t seed, std::size_t count, std::span<const Mat> refs) {
  if (count < 1) throw Error(Errc::InvalidInput, "need at least one test function");
  if (refs.empty()) throw Error(Errc::InvalidInput, "need at least one reference sample");
  const std::size_t len = refs.front().data().size();
  std::vector<double> mean(len, 0.0);
  for (const Mat& r : refs) {
    if (r.data().size() != len) throw Error(Errc::ShapeMismatch, "reference samples differ in shape");
    for (std::size_t k = 0; k < len; ++k) mean[k] += r.data()[k] / double(refs.size());
  }
  double spread = 0.0;
  for (const Mat& r : refs) {
    for (std::size_t k = 0; k < len; ++k) spread += (r.data()[k] - mean[k]) * (r.data()[k] - mean[k]);
  }
  spread = std::sqrt(spread / double(refs.size()));
  if (!(spread > 0.0)) spread = 1.0;

  Rng rng = substream(seed, stable_hash("test-functions"), count);
  std::uniform_int_distribution<std::size_t> pick(0, refs.size() - 1);
  std::vector<TestFunction> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t idx = pick(rng);
    out.push_back({refs[idx], uniform(rng, 0.5, 2.0) * spread});
  }
  return out;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{count};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || i > first_failure.load()) return;
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        std::size_t cur = first_failure.load();
        while (i < cur && !first_failure.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min(jobs, count);
  for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_failure.load() < count) std::rethrow_exception(errors[first_failure.load()]);
}

CongruencePoint evaluate_congruence(const Mat& b, const Mat& y, std::size_t n, double step) {
  require_same_kind(b, y, "evaluate_congruence");
  const std::size_t m = y.rows();
  const int bt = y.beta();
  const auto perm_in = choose_pivot_psd(y, n);
  const PsdChartPoint p = extract_psd(y, n, perm_in);
  const Mat x = congruence(b, y);
  const auto perm_out = choose_pivot_psd(x, n);

  CongruencePoint out;
  out.chart_logdet = chart_jacobian_logdet(
      [&](std::span<const double> c) {
        return chart_coords(extract_psd(congruence(b, complete_psd(with_coords(p, c))), n, perm_out));
      },
      chart_coords(p), step);

  const double det_b = sdet(b);
  FactorInput qr{.beta = bt, .m = int(m), .n = int(n), .q = int(n)};
  qr.det_b = det_b;
  qr.det_t1 = sdet(permute(x, perm_out, perm_out).block(0, 0, n, n));
  qr.det_l1 = sdet(p.s11);
  out.uhlig_qr_log = transform_factor_log(FactorKind::UhligQr, qr);

  const EigParts ey = eig_hermitian(y, n);
  const EigParts ex = eig_hermitian(x, n);
  FactorInput sv{.beta = bt, .m = int(m), .n = int(n), .q = int(n), .lambda = ey.lambda, .delta = ex.lambda};
  sv.det_b = det_b;
  out.uhlig_svd_log = transform_factor_log(FactorKind::UhligSvd, sv);
  const Mat core = matmul(conj_transpose(ex.w1), matmul(conj_transpose(b), ey.w1));
  out.alt_svd_log = bt * double(n) * std::log(det_b) + (bt * (double(m) - double(n) - 1.0) + 2.0) * log_sdet(core);
  return out;
}

Report run_chart_task(const TaskSpec& task, std::size_t jobs) {
  const auto t0 = Clock::now();
  const Stream s = open_stream(task);
  if (*s.task.engine != Engine::Chart) throw Error(Errc::Registry, "task is not a chart task");
  if (s.task.demo) return run_discrepancy_demo(task);
  const Mat b = is_congruence(s.task.theorem) ? congruence_matrix(s.task) : Mat();
  std::vector<json> recs(s.task.points);
  parallel_for(s.task.points, jobs, [&](std::size_t i) { recs[i] = chart_point(s, b, i); });
  Report r = start_report(s, "chart");
  r.pass = true;
  for (auto& rec : recs) {
    r.pass = r.pass && rec["pass"].get<bool>();
    r.records.push_back(std::move(rec));
  }
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

Report run_mc_equality_task(const TaskSpec& task, std::size_t jobs) {
  const auto t0 = Clock::now();
  const Stream s = open_stream(task);
  if (*s.task.engine != Engine::McEquality) throw Error(Errc::Registry, "task is not an equality task");
  const TaskSpec& t = s.task;
  const Mat b = is_congruence(t.theorem) ? congruence_matrix(t) : Mat();
  const EqualityModel model = equality_model(s, b);
  const auto refs = reference_samples(s, model.rhs);
  const auto fs = make_test_functions(t.seed ^ s.id, t.functions, refs);
  const std::size_t kf = fs.size();

  // per trial: L_k, R_k, L_k - R_k; both sides share the trial's substream
  const Moments mom = accumulate(t.trials, 3 * kf, jobs, [&](std::size_t i, std::vector<double>& v) {
    Rng rl = substream(t.seed, s.id, i);
    const Weighted l = model.lhs(rl);
    Rng rr = substream(t.seed, s.id, i);
    const Weighted r = model.rhs(rr);
    for (std::size_t k = 0; k < kf; ++k) {
      v[k] = l.weight > 0.0 ? l.weight * fs[k](l.matrix) : 0.0;
      v[kf + k] = r.weight > 0.0 ? r.weight * fs[k](r.matrix) : 0.0;
      v[2 * kf + k] = v[k] - v[kf + k];
    }
  });

  Report rep = start_report(s, "mc-equality");
  rep.pass = true;
  for (std::size_t k = 0; k < kf; ++k) {
    const double lm = mom.mean(k), rm = mom.mean(kf + k);
    const double lse = mom.stderr_of(k), rse = mom.stderr_of(kf + k);
    check_conclusive(lm, lse, "lhs", k);
    check_conclusive(rm, rse, "rhs", k);
    const double dm = mom.mean(2 * kf + k);
    const double dse = std::max(mom.stderr_of(2 * kf + k), 1e-9 * (std::abs(lm) + std::abs(rm)));
    const double z = dm == 0.0 ? 0.0 : dm / dse;
    const bool ok = std::abs(z) <= t.ztol;
    rep.pass = rep.pass && ok;
    rep.records.push_back({{"function", k},
                           {"lhs", lm},
                           {"lhs_stderr", lse},
                           {"rhs", rm},
                           {"rhs_stderr", rse},
                           {"diff_stderr", dse},
                           {"z", z},
                           {"rel_stderr", std::max(lse / std::abs(lm), rse / std::abs(rm))},
                           {"pass", ok}});
  }
  rep.runtime_ms = elapsed_ms(t0);
  return rep;
}

Report run_mc_ratio_task(const TaskSpec& task, std::size_t jobs) {
  const auto t0 = Clock::now();
  const Stream s = open_stream(task);
  if (*s.task.engine != Engine::McRatio) throw Error(Errc::Registry, "task is not a ratio task");
  const TaskSpec& t = s.task;
  const RatioModel model = ratio_model(s);
  const auto refs = reference_samples(s, model.factorized);
  const auto fs = make_test_functions(t.seed ^ s.id, t.functions, refs);
  const std::size_t kf = fs.size();
  const std::uint64_t sh = s.id ^ stable_hash("hausdorff-side");
  const std::uint64_t sf = s.id ^ stable_hash("factorized-side");

  const Moments mom = accumulate(t.trials, 2 * kf, jobs, [&](std::size_t i, std::vector<double>& v) {
    Rng rh = substream(t.seed, sh, i);
    const Weighted h = model.hausdorff(rh);
    Rng rf = substream(t.seed, sf, i);
    const Weighted f = model.factorized(rf);
    for (std::size_t k = 0; k < kf; ++k) {
      v[k] = h.weight > 0.0 ? h.weight * fs[k](h.matrix) : 0.0;
      v[kf + k] = f.weight > 0.0 ? f.weight * fs[k](f.matrix) : 0.0;
    }
  });

  Report rep = start_report(s, "mc-ratio");
  std::vector<double> ratios;
  for (std::size_t k = 0; k < kf; ++k) {
    const double hm = mom.mean(k), fm = mom.mean(kf + k);
    const double hse = mom.stderr_of(k), fse = mom.stderr_of(kf + k);
    check_conclusive(hm, hse, "hausdorff", k);
    check_conclusive(fm, fse, "factorized", k);
    const double ratio = hm / fm;
    ratios.push_back(ratio);
    rep.records.push_back({{"function", k},
                           {"hausdorff", hm},
                           {"hausdorff_stderr", hse},
                           {"factorized", fm},
                           {"factorized_stderr", fse},
                           {"ratio", ratio},
                           {"ratio_stderr", std::abs(ratio) * std::hypot(hse / hm, fse / fm)}});
  }
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / double(kf);
  double var = 0.0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  var /= double(kf - 1);
  const double cv = std::sqrt(var) / std::abs(mean);
  rep.pass = cv <= t.cv_tol;
  rep.constant_estimate = mean;
  rep.records.push_back({{"summary", true}, {"cv", cv}, {"constant", mean}, {"pass", rep.pass}});
  rep.runtime_ms = elapsed_ms(t0);
  return rep;
}

Report run_discrepancy_demo(const TaskSpec& task) {
  const auto t0 = Clock::now();
  TaskSpec in = task;
  in.demo = true;
  const Stream s = open_stream(in);
  const TaskSpec& t = s.task;
  const Mat b = congruence_matrix(t);
  // Y = diag(n, n-1, ..., 1, 0, ..., 0): rank n with a simple spectrum
  Mat y(s.kind, t.m, t.m);
  for (std::size_t i = 0; i < t.n; ++i) y.entry(i, i)[0] = double(t.n - i);
  const CongruencePoint c = evaluate_congruence(b, y, t.n, t.step);
  const double tol = 1e-6;
  const bool qr_match = std::abs(std::exp(c.chart_logdet) - std::exp(c.uhlig_qr_log)) <= tol * std::exp(c.uhlig_qr_log);
  const bool svd_match =
      std::abs(std::exp(c.chart_logdet) - std::exp(c.uhlig_svd_log)) <= tol * std::exp(c.uhlig_svd_log);
  const bool expect_mismatch = t.n < t.m;
  Report r = start_report(s, "chart-demo");
  r.records.push_back(
      {{"chart_det", std::exp(c.chart_logdet)},
       {"chart_logdet", c.chart_logdet},
       {"uhlig_qr_factor", std::exp(c.uhlig_qr_log)},
       {"uhlig_svd_factor", std::exp(c.uhlig_svd_log)},
       {"uhlig_svd_alt_factor", std::exp(c.alt_svd_log)},
       {"chart_matches_qr", qr_match},
       {"chart_matches_svd", svd_match},
       {"expected_mismatch", expect_mismatch},
       {"note", expect_mismatch
                    ? "entry charts carry frame-dependent density; uhlig-svd holds for spectral measures, uhlig-qr in charts"
                    : "nonsingular case: both factors reduce to the congruence factor"}});
  r.pass = qr_match && (expect_mismatch || svd_match);
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

Report run_task(const TaskSpec& task, std::size_t jobs) {
  const TaskSpec t = resolve(task);
  if (t.demo) return run_discrepancy_demo(t);
  switch (*t.engine) {
    case Engine::Chart: return run_chart_task(t, jobs);
    case Engine::McEquality: return run_mc_equality_task(t, jobs);
    case Engine::McRatio: return run_mc_ratio_task(t, jobs);
  }
  throw Error(Errc::Registry, "unknown engine");
}

std::vector<TaskSpec> desk_tasks(std::uint64_t seed) {
  std::vector<TaskSpec> out;
  auto add = [&](TaskSpec t) {
    t.seed = seed;
    out.push_back(std::move(t));
  };
  for (int b : {1, 2, 4}) {
    for (auto [m, q] : {std::pair{2, 1}, {3, 2}, {4, 2}}) {
      add({.theorem = FactorKind::MpHerm, .engine = Engine::Chart, .beta = b, .m = size_t(m), .q = size_t(q)});
    }
    for (auto [n, m, q] : {std::tuple{2, 2, 1}, {3, 2, 1}, {3, 3, 2}}) {
      add({.theorem = FactorKind::MpRect, .engine = Engine::Chart, .beta = b, .m = size_t(m), .n = size_t(n),
           .q = size_t(q)});
    }
    for (auto [m, q] : {std::pair{2, 1}, {3, 2}, {4, 2}}) {
      add({.theorem = FactorKind::Chol, .beta = b, .m = size_t(m), .q = size_t(q)});
    }
    for (auto [m, n] : {std::pair{2, 1}, {3, 2}, {3, 1}}) {
      add({.theorem = FactorKind::UhligQr, .beta = b, .m = size_t(m), .n = size_t(n)});
    }
    for (int m : {2, 3}) add({.theorem = FactorKind::CongruenceNs, .beta = b, .m = size_t(m)});
  }
  for (int b : {1, 2}) {
    for (auto [n, m, q] : {std::tuple{3, 2, 1}, {3, 3, 2}}) {
      add({.theorem = FactorKind::W, .beta = b, .m = size_t(m), .n = size_t(n), .q = size_t(q), .trials = 200000});
    }
    for (auto th : {FactorKind::UhligSvd, FactorKind::UhligMp}) {
      for (auto [m, n] : {std::pair{2, 1}, {3, 2}, {3, 1}}) {
        // rank 2 at beta = 2 has heavy LHS weights; it runs separately with more trials
        if (b == 2 && n == 2) continue;
        add({.theorem = th, .beta = b, .m = size_t(m), .n = size_t(n), .trials = 200000});
      }
    }
    add({.theorem = FactorKind::MpHerm, .engine = Engine::McEquality, .beta = b, .m = 2, .q = 1, .trials = 100000});
    add({.theorem = FactorKind::MpRect, .engine = Engine::McEquality, .beta = b, .m = 2, .n = 3, .q = 1,
         .trials = 100000});
  }
  for (auto th : {FactorKind::UhligSvd, FactorKind::UhligMp}) add({.theorem = th, .beta = 2, .m = 3, .n = 2, .trials = 1000000});
  add({.theorem = FactorKind::UhligSvd, .beta = 1, .m = 2, .n = 1, .b_source = BSource::Identity, .trials = 100000});
  add({.theorem = FactorKind::Sd, .beta = 1, .m = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::Sd, .beta = 2, .m = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::Svd, .beta = 1, .m = 1, .n = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::Svd, .beta = 1, .m = 2, .n = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::Svd, .beta = 2, .m = 1, .n = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::Qr, .beta = 1, .m = 1, .n = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::Qr, .beta = 1, .m = 2, .n = 3, .q = 2, .trials = 200000});
  add({.theorem = FactorKind::CholX, .beta = 1, .m = 1, .n = 2, .q = 1, .trials = 200000});
  add({.theorem = FactorKind::CholX, .beta = 2, .m = 1, .n = 2, .q = 1, .trials = 200000});
  TaskSpec demo{.theorem = FactorKind::UhligSvd, .demo = true, .beta = 1, .m = 2, .n = 1, .b_source = BSource::File};
  Mat b(Algebra::Real, 2, 2);
  b.entry(0, 0)[0] = 1.0;
  b.entry(0, 1)[0] = 1.0;
  b.entry(1, 1)[0] = 1.0;
  demo.b_matrix = b;
  add(demo);
  return out;
}

SuiteResult verify_all(const std::string& preset, std::uint64_t seed, std::size_t jobs) {
  if (preset != "desk") throw Error(Errc::Configuration, "unknown preset '" + preset + "' (available: desk)");
  SuiteResult res;
  res.pass = true;
  json reports = json::array();
  for (const TaskSpec& t : desk_tasks(seed)) {
    try {
      const Report r = run_task(t, jobs);
      res.pass = res.pass && r.pass;
      reports.push_back(r.to_json());
    } catch (const Error& e) {
      res.pass = false;
      reports.push_back({{"task", task_echo(t)},
                         {"error", std::string(to_string(e.code()))},
                         {"message", e.what()},
                         {"pass", false}});
    }
  }
  res.json = {{"preset", preset}, {"seed", seed}, {"reports", std::move(reports)}, {"pass", res.pass},
              {"version", kVersion}};
  return res;
}

}  // namespace ndjac
