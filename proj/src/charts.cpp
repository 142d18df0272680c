#include "ndjac/charts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "ndjac/decomp.hpp"
#include "ndjac/measures.hpp"

namespace ndjac {
namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

bool is_permutation_of(std::span<const std::size_t> p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto i : p) {
    if (i >= n || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

// X11^{-1} X12 through the real embedding, rejecting ill-conditioned X11.
Eigen::MatrixXd solve_leading(const Mat& x11, const Eigen::MatrixXd& rhs) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(real_embed(x11));
  const Eigen::MatrixXd& u = lu.matrixLU();
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    hi = std::max(hi, std::abs(u(k, k)));
    lo = std::min(lo, std::abs(u(k, k)));
  }
  if (u.rows() > 0 && !(lo > 1e-13 * hi)) throw Error(Errc::SingularChart, "leading chart block is singular");
  return lu.solve(rhs);
}

void require_chart_kind(Algebra kind) { require_associative(kind, "matrix charts"); }

}  // namespace

Pivot Pivot::identity(std::size_t n, std::size_t m) { return Pivot{iota(n), iota(m)}; }

std::size_t rect_chart_dim(std::size_t n, std::size_t m, std::size_t q, int beta) {
  return (n * q + m * q - q * q) * static_cast<std::size_t>(beta);
}

std::size_t psd_chart_dim(std::size_t m, std::size_t q, int beta) { return staircase_dim(q, m, beta); }

std::size_t staircase_dim(std::size_t q, std::size_t m, int beta) {
  const auto b = static_cast<std::size_t>(beta);
  return b * m * q - b * q * (q + 1) / 2 + q;
}

Mat complete_rect(const RectChartPoint& p) {
  require_chart_kind(p.kind);
  const std::size_t n = p.n, m = p.m, q = p.q;
  Mat xp(p.kind, n, m);
  xp.set_block(0, 0, p.x11);
  xp.set_block(0, q, p.x12);
  xp.set_block(q, 0, p.x21);
  if (q < n && q < m) {
    const Eigen::MatrixXd z = solve_leading(p.x11, real_embed(p.x12));
    xp.set_block(q, q, matmul(p.x21, fold_embedding(p.kind, z)));
  } else if (q > 0 && q == std::min(n, m)) {
    solve_leading(p.x11, Eigen::MatrixXd(static_cast<Eigen::Index>(q) * p.x11.beta(), 0));
  }
  return unpermute(xp, p.pivot.rows, p.pivot.cols);
}

Mat complete_psd(const PsdChartPoint& p) {
  require_chart_kind(p.kind);
  const std::size_t m = p.m, q = p.q;
  Mat sp(p.kind, m, m);
  sp.set_block(0, 0, p.s11);
  if (q > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(real_embed(p.s11));
    if (llt.info() != Eigen::Success) throw Error(Errc::NotPsd, "S11 is not positive definite");
    const Eigen::MatrixXd& l = llt.matrixL();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index k = 0; k < l.rows(); ++k) {
      lo = std::min(lo, l(k, k));
      hi = std::max(hi, l(k, k));
    }
    if (!(lo > 1e-7 * hi)) throw Error(Errc::NotPsd, "S11 is numerically singular");
    if (q < m) {
      const Mat s21 = conj_transpose(p.s12);
      sp.set_block(0, q, p.s12);
      sp.set_block(q, 0, s21);
      const Mat z = fold_embedding(p.kind, llt.solve(real_embed(p.s12)));
      Mat s22 = matmul(s21, z);
      s22 = 0.5 * (s22 + conj_transpose(s22));
      sp.set_block(q, q, s22);
    }
  }
  return unpermute(sp, p.perm, p.perm);
}

RectChartPoint extract_rect(const Mat& a, std::size_t q, const Pivot& pivot) {
  require_chart_kind(a.kind());
  const std::size_t n = a.rows(), m = a.cols();
  if (q > std::min(n, m)) throw Error(Errc::InvalidInput, "extract_rect: q exceeds min(n, m)");
  if (!is_permutation_of(pivot.rows, n) || !is_permutation_of(pivot.cols, m)) {
    throw Error(Errc::InvalidInput, "extract_rect: pivot is not a permutation of the right size");
  }
  const Mat ap = permute(a, pivot.rows, pivot.cols);
  RectChartPoint p{a.kind(), n, m, q, pivot, ap.block(0, 0, q, q), ap.block(0, q, q, m - q), ap.block(q, 0, n - q, q)};
  if (q > 0) solve_leading(p.x11, Eigen::MatrixXd(static_cast<Eigen::Index>(q) * a.beta(), 0));
  return p;
}

PsdChartPoint extract_psd(const Mat& s, std::size_t q, std::span<const std::size_t> perm) {
  require_chart_kind(s.kind());
  if (s.rows() != s.cols()) throw Error(Errc::ShapeMismatch, "extract_psd needs a square matrix");
  const std::size_t m = s.rows();
  if (q > m) throw Error(Errc::InvalidInput, "extract_psd: q exceeds m");
  if (!is_permutation_of(perm, m)) throw Error(Errc::InvalidInput, "extract_psd: bad permutation");
  const Mat sp = permute(s, perm, perm);
  PsdChartPoint p{s.kind(), m, q, std::vector<std::size_t>(perm.begin(), perm.end()), sp.block(0, 0, q, q),
                  sp.block(0, q, q, m - q)};
  // the chart stores a Hermitian S11 with real diagonal
  p.s11 = 0.5 * (p.s11 + conj_transpose(p.s11));
  if (q > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(real_embed(p.s11));
    if (llt.info() != Eigen::Success) throw Error(Errc::NotPsd, "pivoted S11 is not positive definite");
  }
  return p;
}

Pivot choose_pivot(const Mat& a, std::size_t q) {
  require_chart_kind(a.kind());
  const std::size_t n = a.rows(), m = a.cols();
  if (q > std::min(n, m)) throw Error(Errc::InvalidInput, "choose_pivot: q exceeds min(n, m)");
  Pivot piv = Pivot::identity(n, m);
  Mat work = a;
  const double scale = a.frobenius_norm();
  for (std::size_t k = 0; k < q; ++k) {
    std::size_t bi = k, bj = k;
    double best = -1.0;
    for (std::size_t i = k; i < n; ++i) {
      for (std::size_t j = k; j < m; ++j) {
        const double v = norm(work(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (best <= 1e-12 * scale || best == 0.0) throw Error(Errc::InvalidInput, "choose_pivot: rank is below q");
    if (bi != k) {
      std::swap(piv.rows[k], piv.rows[bi]);
      for (std::size_t j = 0; j < m; ++j) {
        const Scalar t = work(k, j);
        work.set(k, j, work(bi, j));
        work.set(bi, j, t);
      }
    }
    if (bj != k) {
      std::swap(piv.cols[k], piv.cols[bj]);
      for (std::size_t i = 0; i < n; ++i) {
        const Scalar t = work(i, k);
        work.set(i, k, work(i, bj));
        work.set(i, bj, t);
      }
    }
    const Scalar pivot_inv = inv(work(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const Scalar l = work(i, k) * pivot_inv;
      for (std::size_t j = k; j < m; ++j) work.set(i, j, work(i, j) - l * work(k, j));
    }
  }
  return piv;
}

std::vector<std::size_t> choose_pivot_psd(const Mat& s, std::size_t q) {
  require_chart_kind(s.kind());
  if (s.rows() != s.cols()) throw Error(Errc::ShapeMismatch, "choose_pivot_psd needs a square matrix");
  const std::size_t m = s.rows();
  if (q > m) throw Error(Errc::InvalidInput, "choose_pivot_psd: q exceeds m");
  std::vector<std::size_t> perm = iota(m);
  Mat work = s;
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(s(i, i).re()));
  for (std::size_t k = 0; k < q; ++k) {
    std::size_t bi = k;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = k; i < m; ++i) {
      const double v = work(i, i).re();
      if (v > best) {
        best = v;
        bi = i;
      }
    }
    if (best <= 1e-12 * scale || best <= 0.0) throw Error(Errc::InvalidInput, "choose_pivot_psd: rank is below q");
    if (bi != k) {
      std::swap(perm[k], perm[bi]);
      work = permute(work, [&] {
        auto p = iota(m);
        std::swap(p[k], p[bi]);
        return p;
      }(), [&] {
        auto p = iota(m);
        std::swap(p[k], p[bi]);
        return p;
      }());
    }
    const Scalar pivot_inv = inv(work(k, k));
    for (std::size_t i = k + 1; i < m; ++i) {
      const Scalar l = work(i, k) * pivot_inv;
      for (std::size_t j = k; j < m; ++j) work.set(i, j, work(i, j) - l * work(k, j));
    }
  }
  return perm;
}

std::vector<double> staircase_coords(const Mat& upper) {
  std::vector<double> out;
  out.reserve(staircase_dim(upper.rows(), upper.cols(), upper.beta()));
  for (std::size_t i = 0; i < upper.rows(); ++i) {
    out.push_back(upper.entry(i, i)[0]);
    for (std::size_t j = i + 1; j < upper.cols(); ++j) {
      for (double v : upper.entry(i, j)) out.push_back(v);
    }
  }
  return out;
}

Mat staircase_from_coords(Algebra kind, std::size_t q, std::size_t m, std::span<const double> coords) {
  if (coords.size() != staircase_dim(q, m, beta(kind))) throw Error(Errc::ShapeMismatch, "staircase coordinate count");
  Mat out(kind, q, m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < q; ++i) {
    out.entry(i, i)[0] = coords[k++];
    for (std::size_t j = i + 1; j < m; ++j) {
      for (double& v : out.entry(i, j)) v = coords[k++];
    }
  }
  return out;
}

std::vector<double> chart_coords(const RectChartPoint& p) {
  std::vector<double> out;
  for (const Mat* b : {&p.x11, &p.x12, &p.x21}) out.insert(out.end(), b->data().begin(), b->data().end());
  return out;
}

std::vector<double> chart_coords(const PsdChartPoint& p) {
  Mat upper(p.kind, p.q, p.m);
  upper.set_block(0, 0, p.s11);
  upper.set_block(0, p.q, p.s12);
  return staircase_coords(upper);
}

RectChartPoint with_coords(const RectChartPoint& shape, std::span<const double> coords) {
  if (coords.size() != rect_chart_dim(shape.n, shape.m, shape.q, beta(shape.kind))) {
    throw Error(Errc::ShapeMismatch, "rectangular chart coordinate count");
  }
  RectChartPoint p = shape;
  std::size_t k = 0;
  for (Mat* b : {&p.x11, &p.x12, &p.x21}) {
    for (double& v : b->data()) v = coords[k++];
  }
  return p;
}

PsdChartPoint with_coords(const PsdChartPoint& shape, std::span<const double> coords) {
  const Mat upper = staircase_from_coords(shape.kind, shape.q, shape.m, coords);
  PsdChartPoint p = shape;
  Mat s11 = upper.block(0, 0, shape.q, shape.q);
  Mat lower = conj_transpose(s11);
  for (std::size_t i = 0; i < shape.q; ++i) {
    for (double& v : lower.entry(i, i)) v = 0.0;
  }
  p.s11 = s11 + lower;
  p.s12 = upper.block(0, shape.q, shape.q, shape.m - shape.q);
  return p;
}

Eigen::MatrixXd chart_tangent(const std::function<Mat(std::span<const double>)>& embed, std::span<const double> x,
                              double step) {
  std::vector<double> work(x.begin(), x.end());
  Eigen::MatrixXd g;
  for (std::size_t c = 0; c < work.size(); ++c) {
    const double h = std::max(step, step * std::abs(x[c]));
    work[c] = x[c] + h;
    const Mat plus = embed(work);
    work[c] = x[c] - h;
    const Mat minus = embed(work);
    work[c] = x[c];
    auto dp = plus.data();
    auto dm = minus.data();
    if (c == 0) g.resize(static_cast<Eigen::Index>(dp.size()), static_cast<Eigen::Index>(work.size()));
    for (std::size_t r = 0; r < dp.size(); ++r) {
      g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (dp[r] - dm[r]) / (2.0 * h);
    }
  }
  return g;
}

double log_gram_volume(const Eigen::MatrixXd& g) {
  if (g.cols() == 0) return 0.0;
  const Eigen::MatrixXd gram = g.transpose() * g;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(Errc::Conditioning, "Gram matrix of the chart is singular");
  const Eigen::MatrixXd& l = llt.matrixL();
  double s = 0.0;
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    if (!(l(k, k) > 0.0)) throw Error(Errc::Conditioning, "Gram matrix of the chart is singular");
    s += std::log(l(k, k));
  }
  return s;
}

double log_hausdorff_density(const RectChartPoint& p, double step) {
  const auto x = chart_coords(p);
  return log_gram_volume(chart_tangent([&](std::span<const double> c) { return complete_rect(with_coords(p, c)); }, x, step));
}

double log_hausdorff_density(const PsdChartPoint& p, double step) {
  const auto x = chart_coords(p);
  return log_gram_volume(chart_tangent([&](std::span<const double> c) { return complete_psd(with_coords(p, c)); }, x, step));
}

double hausdorff_density(const RectChartPoint& p, double step) { return std::exp(log_hausdorff_density(p, step)); }
double hausdorff_density(const PsdChartPoint& p, double step) { return std::exp(log_hausdorff_density(p, step)); }

Mat sample_stiefel_uniform(std::size_t n, std::size_t q, Algebra kind, Rng& rng) {
  require_associative(kind, "sample_stiefel_uniform");
  if (q > n) throw Error(Errc::InvalidInput, "sample_stiefel_uniform: q exceeds n");
  for (;;) {
    const Mat g = gaussian_matrix(kind, n, q, rng);
    try {
      return qr_positive(g, q).h1;
    } catch (const Error& e) {
      if (e.code() != Errc::PivotRequired) throw;
    }
  }
}

double stiefel_acg_log_density(const Mat& c, const Mat& frame) {
  const Algebra kind = c.kind();
  const double bt = beta(kind);
  const double n = static_cast<double>(c.rows());
  const double q = static_cast<double>(frame.cols());
  const Mat sigma = matmul(c, conj_transpose(c));
  const Mat inner = matmul(matmul(conj_transpose(frame), inverse(sigma)), frame);
  return -0.5 * bt * q * std::log(sdet(sigma)) - 0.5 * bt * n * std::log(sdet(inner));
}

FrameDraw sample_stiefel_acg(const Mat& c, std::size_t q, Rng& rng) {
  require_associative(c.kind(), "sample_stiefel_acg");
  if (c.rows() != c.cols()) throw Error(Errc::ShapeMismatch, "sample_stiefel_acg: c must be square");
  if (q > c.rows()) throw Error(Errc::InvalidInput, "sample_stiefel_acg: q exceeds n");
  for (;;) {
    const Mat g = matmul(c, gaussian_matrix(c.kind(), c.rows(), q, rng));
    try {
      // a Haar rotation inside the subspace makes the frame right-invariant
      FrameDraw d{matmul(qr_positive(g, q).h1, sample_stiefel_uniform(q, q, c.kind(), rng)), 0.0};
      d.log_density = stiefel_acg_log_density(c, d.frame);
      return d;
    } catch (const Error& e) {
      if (e.code() != Errc::PivotRequired) throw;
    }
  }
}

double gap_acceptance_probability(std::size_t q, const SpectrumBox& box) {
  const double width = box.hi - box.lo;
  if (q <= 1) return 1.0;
  const double free = 1.0 - (static_cast<double>(q) - 1.0) * box.gap / width;
  return free <= 0.0 ? 0.0 : std::pow(free, static_cast<double>(q));
}

void check_box_feasible(std::size_t q, const SpectrumBox& box) {
  if (!(box.lo > 0.0) || !(box.hi > box.lo) || !(box.gap >= 0.0)) {
    throw Error(Errc::Configuration, "spectrum box needs 0 < lo < hi and gap >= 0");
  }
  if (gap_acceptance_probability(q, box) < 0.01) {
    throw Error(Errc::Configuration, "spectrum box rejects more than 99% of draws; widen it or lower the gap");
  }
}

FactorizedDraw sample_factorized(FactorizedSpace space, std::size_t n, std::size_t m, std::size_t q, Algebra kind,
                                 const SpectrumBox& box, Rng& rng) {
  require_associative(kind, "sample_factorized");
  check_box_feasible(q, box);
  const int bt = beta(kind);
  FactorizedDraw draw;
  draw.spectrum.resize(q);
  for (double& v : draw.spectrum) v = uniform(rng, box.lo, box.hi);
  std::sort(draw.spectrum.begin(), draw.spectrum.end(), std::greater<>());
  draw.accepted = true;
  for (std::size_t i = 0; i + 1 < q; ++i) {
    if (draw.spectrum[i] - draw.spectrum[i + 1] < box.gap) draw.accepted = false;
  }
  draw.log_constant = static_cast<double>(q) * std::log(box.hi - box.lo) - std::lgamma(static_cast<double>(q) + 1.0);

  FactorInput in;
  in.beta = bt;
  in.q = static_cast<int>(q);
  if (space == FactorizedSpace::Svd) {
    if (q > std::min(n, m)) throw Error(Errc::InvalidInput, "sample_factorized: q exceeds min(n, m)");
    draw.left = sample_stiefel_uniform(n, q, kind, rng);
    draw.right = sample_stiefel_uniform(m, q, kind, rng);
    draw.log_constant += stiefel_volume_log(static_cast<int>(q), static_cast<int>(n), bt) +
                         stiefel_volume_log(static_cast<int>(q), static_cast<int>(m), bt);
    in.n = static_cast<int>(n);
    in.m = static_cast<int>(m);
    in.d = draw.spectrum;
    draw.matrix = matmul(scale_columns(draw.left, draw.spectrum), conj_transpose(draw.right));
    if (draw.accepted) draw.log_weight = decomposition_density_log(FactorKind::Svd, in);
  } else {
    if (q > m) throw Error(Errc::InvalidInput, "sample_factorized: q exceeds m");
    draw.right = sample_stiefel_uniform(m, q, kind, rng);
    draw.log_constant += stiefel_volume_log(static_cast<int>(q), static_cast<int>(m), bt);
    in.m = static_cast<int>(m);
    in.lambda = draw.spectrum;
    Mat s = matmul(scale_columns(draw.right, draw.spectrum), conj_transpose(draw.right));
    draw.matrix = 0.5 * (s + conj_transpose(s));
    if (draw.accepted) draw.log_weight = decomposition_density_log(FactorKind::Sd, in);
  }
  return draw;
}

}  // namespace ndjac
