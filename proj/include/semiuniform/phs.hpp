#pragma once

/**
 * @file phs.hpp
 * @brief One-dimensional port-Hamiltonian systems
 *
 *     A u = P1 (H u)' + P0 H u  on [a, b],   W [(Hu)(b); (Hu)(a)] = 0,
 *
 * with piecewise-constant H. The fundamental matrix solves
 * v' = -P1^{-1} (i t H^{-1} + P0) v, v(a) = I, and is an ordered product of
 * matrix exponentials; the boundary matrix is T_t = W [Phi_t(b); I].
 * Resolvent problems (i t + A) u = f are solved through the variation of
 * constants formula with composite 8-point Gauss-Legendre quadrature.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <json.hpp>

#include "contfrac.hpp"
#include "parallel.hpp"

namespace semiuniform {

using MatR = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using cplx = std::complex<double>;

struct PHSystem {
  int d = 0;
  MatR P0, P1;
  std::vector<double> breaks;  // a = x_0 < x_1 < ... < x_K = b
  std::vector<MatR> H;  // H on [x_k, x_{k+1}]
  MatR W;  // d x 2d
  std::string name;

  double a() const { return breaks.front(); }
  double b() const { return breaks.back(); }
  double length() const { return b() - a(); }
  std::size_t pieces() const { return H.size(); }
  std::size_t piece_of(double x) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    std::size_t k = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
    return std::min(k, H.size() - 1);
  }
};

namespace detail {

inline double opnorm(const MatC& A) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(A);
  return svd.singularValues()(0);
}
inline double opnorm(const MatR& A) { return opnorm(MatC(A.cast<cplx>())); }

inline double sigma_min(const MatC& A) {
  Eigen::JacobiSVD<MatC> svd(A);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace detail

/// All violated invariants, one Error per matrix and property.
inline std::vector<Error> validation_errors(const PHSystem& s) {
  std::vector<Error> out;
  auto add = [&](ErrorKind k, const std::string& m) { out.emplace_back(k, m); };
  const int d = s.d;
  if (d < 1) {
    add(ErrorKind::DimensionMismatch, "d must be >= 1");
    return out;
  }
  auto dims = [&](const MatR& M, int r, int c, const char* name) {
    if (M.rows() != r || M.cols() != c) {
      add(ErrorKind::DimensionMismatch, std::string(name) + " must be " + std::to_string(r) + "x" + std::to_string(c));
      return false;
    }
    return true;
  };
  const double sym_tol = 1e-12;
  if (dims(s.P0, d, d, "P0")) {
    double skew = (s.P0 + s.P0.transpose()).cwiseAbs().maxCoeff();
    if (skew > sym_tol * std::max(1.0, s.P0.cwiseAbs().maxCoeff()))
      add(ErrorKind::SkewnessViolation, "P0 is not skew-symmetric (|P0 + P0^T| = " + std::to_string(skew) + ")");
  }
  if (dims(s.P1, d, d, "P1")) {
    double asym = (s.P1 - s.P1.transpose()).cwiseAbs().maxCoeff();
    if (asym > sym_tol * std::max(1.0, s.P1.cwiseAbs().maxCoeff())) {
      add(ErrorKind::SymmetryViolation, "P1 is not symmetric");
    } else {
      Eigen::SelfAdjointEigenSolver<MatR> es(s.P1);
      double mn = es.eigenvalues().cwiseAbs().minCoeff(), mx = es.eigenvalues().cwiseAbs().maxCoeff();
      if (!(mn > 1e-12 * std::max(mx, 1e-300))) add(ErrorKind::RankViolation, "P1 is not invertible");
    }
  }
  if (s.breaks.size() < 2 || s.H.size() + 1 != s.breaks.size()) {
    add(ErrorKind::DimensionMismatch, "H needs K pieces and K+1 breaks");
  } else {
    for (std::size_t k = 1; k < s.breaks.size(); ++k)
      if (!(s.breaks[k] > s.breaks[k - 1])) add(ErrorKind::InvalidArgument, "H breaks must increase");
    for (std::size_t k = 0; k < s.H.size(); ++k) {
      std::string nm = "H[" + std::to_string(k) + "]";
      if (!dims(s.H[k], d, d, nm.c_str())) continue;
      double asym = (s.H[k] - s.H[k].transpose()).cwiseAbs().maxCoeff();
      if (asym > sym_tol * std::max(1.0, s.H[k].cwiseAbs().maxCoeff())) {
        add(ErrorKind::SymmetryViolation, nm + " is not symmetric");
        continue;
      }
      Eigen::SelfAdjointEigenSolver<MatR> es(s.H[k]);
      if (!(es.eigenvalues().minCoeff() > 0) || !std::isfinite(es.eigenvalues().maxCoeff()))
        add(ErrorKind::DefinitenessViolation, nm + " is not positive definite");
    }
  }
  if (dims(s.W, d, 2 * d, "W")) {
    Eigen::JacobiSVD<MatR> svd(s.W);
    const auto& sv = svd.singularValues();
    if (!(sv(d - 1) > 1e-10 * sv(0))) add(ErrorKind::RankViolation, "W does not have full rank d");
  }
  return out;
}

inline const PHSystem& validate(const PHSystem& s) {
  auto errs = validation_errors(s);
  if (errs.empty()) return s;
  std::string msg;
  for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + std::string(e.what());
  throw Error(errs.front().kind(), std::to_string(errs.size()) + " violation(s): " + msg);
}

/// W^+ = W^T (W W^T)^{-1}.
inline MatR moore_penrose(const MatR& W) {
  require(W.rows() <= W.cols(), ErrorKind::DimensionMismatch, "moore_penrose expects a wide matrix");
  Eigen::JacobiSVD<MatR> svd(W);
  const auto& sv = svd.singularValues();
  require(sv.size() > 0 && sv(sv.size() - 1) > 1e-10 * sv(0), ErrorKind::RankDeficient, "W is rank deficient");
  MatR G = W * W.transpose();
  return W.transpose() * G.ldlt().solve(MatR::Identity(W.rows(), W.rows()));
}

/// The universal example with H = diag(1, alpha)^{-1} on [0, 1]: d = 2,
/// P0 = 0, P1 = I, W = [M I] with M = 1/2 [[1,1],[1,1]].
inline PHSystem universal_system(double alpha) {
  require(alpha > 0 && std::isfinite(alpha), ErrorKind::InvalidArgument, "alpha must be positive");
  PHSystem s;
  s.d = 2;
  s.P0 = MatR::Zero(2, 2);
  s.P1 = MatR::Identity(2, 2);
  s.breaks = {0.0, 1.0};
  MatR H = MatR::Zero(2, 2);
  H(0, 0) = 1.0;
  H(1, 1) = 1.0 / alpha;
  s.H = {H};
  s.W = MatR::Zero(2, 4);
  s.W.block(0, 0, 2, 2).setConstant(0.5);
  s.W.block(0, 2, 2, 2).setIdentity();
  s.name = "universal(alpha=" + std::to_string(alpha) + ")";
  return s;
}

class FundamentalMatrix {
 public:
  FundamentalMatrix(const PHSystem& s, double t, std::size_t samples_per_piece = 16) : t_(t), breaks_(s.breaks) {
    const int d = s.d;
    const MatC P1inv = s.P1.inverse().cast<cplx>();
    const MatC I = MatC::Identity(d, d);
    left_.push_back(I);
    left_inv_.push_back(I);
    for (std::size_t k = 0; k < s.pieces(); ++k) {
      MatC Hinv = s.H[k].inverse().cast<cplx>();
      MatC G = -P1inv * (cplx(0, t) * Hinv + s.P0.cast<cplx>());
      gen_.push_back(G);
      const double len = breaks_[k + 1] - breaks_[k];
      MatC E = (G * len).exp();
      MatC Einv = (-G * len).exp();
      require(E.allFinite() && Einv.allFinite(), ErrorKind::ExpOverflow,
              "matrix exponential overflows on piece " + std::to_string(k));
      left_.push_back(E * left_.back());
      left_inv_.push_back(left_inv_.back() * Einv);
      require(left_.back().allFinite() && left_inv_.back().allFinite(), ErrorKind::ExpOverflow,
              "fundamental matrix overflows at x = " + std::to_string(breaks_[k + 1]));
      // Fast path for interior points: G = V diag(l) V^{-1}.
      Eigen::ComplexEigenSolver<MatC> es(G);
      Fast f;
      f.V = es.eigenvectors();
      f.l = es.eigenvalues();
      Eigen::JacobiSVD<MatC> svd(f.V);
      const auto& sv = svd.singularValues();
      f.ok = sv(sv.size() - 1) > 1e-8 * sv(0);
      if (f.ok) f.Vinv = f.V.inverse();
      fast_.push_back(std::move(f));
    }
    B_ = 0;
    for (std::size_t k = 0; k < s.pieces(); ++k) {
      const double x0 = breaks_[k], x1 = breaks_[k + 1];
      for (std::size_t j = 0; j <= samples_per_piece; ++j) {
        double x = x0 + (x1 - x0) * static_cast<double>(j) / static_cast<double>(samples_per_piece);
        B_ = std::max(B_, detail::opnorm(at(x)));
      }
    }
  }

  double t() const { return t_; }
  /// sup over sampled x of ||Phi_t(x)||.
  double B() const { return B_; }
  const MatC& at_b() const { return left_.back(); }
  const MatC& generator(std::size_t k) const { return gen_[k]; }
  std::size_t pieces() const { return gen_.size(); }

  /// exp(G_k h)
  MatC piece_exp(std::size_t k, double h) const {
    const Fast& f = fast_[k];
    if (f.ok) {
      VecC e = (f.l * h).array().exp();
      return f.V * e.asDiagonal() * f.Vinv;
    }
    return (gen_[k] * h).exp();
  }

  MatC at(double x) const {
    std::size_t k = piece(x);
    if (x == breaks_[k]) return left_[k];
    return piece_exp(k, x - breaks_[k]) * left_[k];
  }
  MatC inv_at(double x) const {
    std::size_t k = piece(x);
    if (x == breaks_[k]) return left_inv_[k];
    return left_inv_[k] * piece_exp(k, -(x - breaks_[k]));
  }

 private:
  struct Fast {
    MatC V, Vinv;
    VecC l;
    bool ok = false;
  };
  std::size_t piece(double x) const {
    require(x >= breaks_.front() - 1e-15 && x <= breaks_.back() + 1e-15, ErrorKind::OutOfRange,
            "x outside [a, b]");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t k = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return std::min(k, gen_.size() - 1);
  }

  double t_;
  std::vector<double> breaks_;
  std::vector<MatC> gen_, left_, left_inv_;
  std::vector<Fast> fast_;
  double B_ = 0;
};

inline FundamentalMatrix fundamental_matrix(const PHSystem& s, double t) {
  validate(s);
  return FundamentalMatrix(s, t);
}

/// T_t = W [Phi_t(b); I].
inline MatC boundary_matrix(const PHSystem& s, const FundamentalMatrix& fm) {
  const int d = s.d;
  MatC stacked(2 * d, d);
  stacked.topRows(d) = fm.at_b();
  stacked.bottomRows(d) = MatC::Identity(d, d);
  return s.W.cast<cplx>() * stacked;
}

inline MatC boundary_matrix(const PHSystem& s, double t) { return boundary_matrix(s, fundamental_matrix(s, t)); }

struct StabilityRow {
  double t = 0;
  double det_abs = 0;
  double sigma_min = 0;
  double inv_norm = 0;  // inf when sigma_min == 0
  double B = 0;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double resolution = 0;  // largest grid gap
  double B = 0;  // max over the grid
  double min_sigma = INFINITY, min_det = INFINITY;
  double t_at_min = 0;  // after local refinement
  bool refined = false;
  bool invertible_on_grid = true;
  std::string verdict;  // about the grid only
};

struct ScanOptions {
  double singular_tol = 1e-10;  // sigma_min below this counts as singular
  bool refine = true;  // golden-section search around grid minima of sigma_min
  unsigned jobs = 1;
};

/// Invertibility metrics of T_t over a grid. Local minima of sigma_min are
/// refined between neighbouring grid points, so a singularity between
/// nodes is still flagged.
inline StabilityReport stability_scan(const PHSystem& s, std::vector<double> grid, const ScanOptions& opt = {}) {
  validate(s);
  require(!grid.empty(), ErrorKind::InvalidArgument, "empty t grid");
  std::sort(grid.begin(), grid.end());
  StabilityReport rep;
  rep.rows.resize(grid.size());
  parallel_for(grid.size(), opt.jobs, [&](std::size_t i) {
    FundamentalMatrix fm(s, grid[i], 4);
    MatC T = boundary_matrix(s, fm);
    StabilityRow& r = rep.rows[i];
    r.t = grid[i];
    r.det_abs = std::abs(T.determinant());
    r.sigma_min = detail::sigma_min(T);
    r.inv_norm = r.sigma_min > 0 ? 1.0 / r.sigma_min : INFINITY;
    r.B = fm.B();
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = rep.rows[i];
    if (i > 0) rep.resolution = std::max(rep.resolution, grid[i] - grid[i - 1]);
    rep.B = std::max(rep.B, r.B);
    rep.min_det = std::min(rep.min_det, r.det_abs);
    if (r.sigma_min < rep.min_sigma) {
      rep.min_sigma = r.sigma_min;
      rep.t_at_min = r.t;
    }
  }
  auto smin = [&](double t) { return detail::sigma_min(boundary_matrix(s, FundamentalMatrix(s, t, 1))); };
  if (opt.refine && grid.size() >= 3) {
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const auto& r = rep.rows;
      if (!(r[i].sigma_min <= r[i - 1].sigma_min && r[i].sigma_min <= r[i + 1].sigma_min)) continue;
      double lo = grid[i - 1], hi = grid[i + 1];
      const double g = (std::sqrt(5.0) - 1) / 2;
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = smin(x1), f2 = smin(x2);
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = smin(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = smin(x2);
        }
      }
      double tm = f1 < f2 ? x1 : x2, fm = std::min(f1, f2);
      if (fm < rep.min_sigma) {
        rep.min_sigma = fm;
        rep.t_at_min = tm;
        rep.min_det = std::min(rep.min_det, std::abs(boundary_matrix(s, tm).determinant()));
        rep.refined = true;
      }
    }
  }
  rep.invertible_on_grid = rep.min_sigma > opt.singular_tol;
  char buf[160];
  if (rep.invertible_on_grid) {
    std::snprintf(buf, sizeof buf, "invertible on grid (min sigma_min %.3e at t=%.6g)", rep.min_sigma, rep.t_at_min);
  } else {
    std::snprintf(buf, sizeof buf, "grid singularity (sigma_min %.3e at t=%.12g)", rep.min_sigma, rep.t_at_min);
  }
  rep.verdict = buf;
  return rep;
}

namespace detail {

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGLx[8] = {-0.9602898564975362316835609, -0.7966664774136267395915539, -0.5255324099163289858177390,
                            -0.1834346424956498049394761, 0.1834346424956498049394761,  0.5255324099163289858177390,
                            0.7966664774136267395915539,  0.9602898564975362316835609};
constexpr double kGLw[8] = {0.1012285362903762591525314, 0.2223810344533744705443560, 0.3137066458778872873379622,
                            0.3626837833783619829651504, 0.3626837833783619829651504, 0.3137066458778872873379622,
                            0.2223810344533744705443560, 0.1012285362903762591525314};

struct Panel {
  double x0, x1;
  std::size_t piece;
};

// `nodes` total (8 per panel) split over pieces by length, at least one panel each.
inline std::vector<Panel> make_panels(const PHSystem& s, std::size_t nodes) {
  std::size_t panels = std::max<std::size_t>(nodes / 8, s.pieces());
  std::vector<Panel> out;
  std::size_t used = 0;
  for (std::size_t k = 0; k < s.pieces(); ++k) {
    double x0 = s.breaks[k], x1 = s.breaks[k + 1];
    std::size_t n = k + 1 == s.pieces()
                        ? std::max<std::size_t>(1, panels - used)
                        : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(panels * (x1 - x0) / s.length())));
    used += n;
    for (std::size_t j = 0; j < n; ++j) {
      out.push_back({x0 + (x1 - x0) * static_cast<double>(j) / static_cast<double>(n),
                     j + 1 == n ? x1 : x0 + (x1 - x0) * static_cast<double>(j + 1) / static_cast<double>(n), k});
    }
  }
  return out;
}

}  // namespace detail

using VectorField = std::function<VecC(double)>;

/// Solution of (i t + A) u = f in the form w = H u,
/// w(x) = Phi(x) (w(a) + int_a^x Phi(s)^{-1} P1^{-1} f(s) ds).
class ResolventField {
 public:
  ResolventField(const PHSystem& s, const FundamentalMatrix& fm, VectorField f, std::size_t nodes, double sing_tol)
      : s_(&s), fm_(&fm), f_(std::move(f)), P1inv_(s.P1.inverse().cast<cplx>()) {
    panels_ = detail::make_panels(s, nodes);
    nodes_ = panels_.size() * 8;
    const int d = s.d;
    cum_.assign(panels_.size() + 1, VecC::Zero(d));
    for (std::size_t p = 0; p < panels_.size(); ++p) cum_[p + 1] = cum_[p] + panel_integral(panels_[p], panels_[p].x1);
    MatC T = boundary_matrix(s, fm);
    Eigen::JacobiSVD<MatC> svd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    require(sv(d - 1) > sing_tol * sv(0), ErrorKind::SingularBoundaryMatrix,
            "T_t is numerically singular at t = " + std::to_string(fm.t()));
    MatC W1 = s.W.leftCols(d).cast<cplx>();
    VecC rhs = -(W1 * (fm.at_b() * cum_.back()));
    wa_ = svd.solve(rhs);
  }

  const VecC& wa() const { return wa_; }
  std::size_t nodes() const { return nodes_; }
  const std::vector<detail::Panel>& panels() const { return panels_; }

  /// int_a^x Phi^{-1} P1^{-1} f
  VecC integral(double x) const {
    auto it = std::upper_bound(panels_.begin(), panels_.end(), x, [](double v, const detail::Panel& p) { return v < p.x1; });
    std::size_t p = it == panels_.end() ? panels_.size() - 1 : static_cast<std::size_t>(it - panels_.begin());
    if (x >= panels_[p].x1) return cum_[p + 1];
    return cum_[p] + panel_integral(panels_[p], x);
  }

  VecC w(double x) const { return fm_->at(x) * (wa_ + integral(x)); }
  VecC wb() const { return fm_->at_b() * (wa_ + cum_.back()); }
  VecC u(double x) const { return s_->H[s_->piece_of(x)].cast<cplx>().ldlt().solve(w(x)); }

  template <class G>
  void for_each_node(G&& g) const {
    for (const auto& pn : panels_) {
      const double c = 0.5 * (pn.x0 + pn.x1), r = 0.5 * (pn.x1 - pn.x0);
      for (int i = 0; i < 8; ++i) g(c + r * detail::kGLx[i], r * detail::kGLw[i], pn.piece);
    }
  }

 private:
  VecC panel_integral(const detail::Panel& pn, double x1) const {
    const double c = 0.5 * (pn.x0 + x1), r = 0.5 * (x1 - pn.x0);
    VecC acc = VecC::Zero(s_->d);
    if (r <= 0) return acc;
    for (int i = 0; i < 8; ++i) {
      double x = c + r * detail::kGLx[i];
      acc += (r * detail::kGLw[i]) * (fm_->inv_at(x) * (P1inv_ * f_(x)));
    }
    return acc;
  }

  const PHSystem* s_;
  const FundamentalMatrix* fm_;
  VectorField f_;
  MatC P1inv_;
  std::vector<detail::Panel> panels_;
  std::size_t nodes_ = 0;
  std::vector<VecC> cum_;
  VecC wa_;
};

struct ResolventLevel {
  std::size_t nodes = 0;
  double boundary_residual = 0;
  double ode_residual = 0;
};

struct ResolventResult {
  double t = 0;
  VecC wa;  // (Hu)(a)
  std::size_t nodes = 0;
  double boundary_residual = 0;  // |W [(Hu)(b); (Hu)(a)]|
  double ode_residual = 0;  // max over checkpoints, 8th-order central differences
  std::vector<ResolventLevel> history;  // every node count tried
};

struct ResolventOptions {
  std::size_t nodes = 4096;
  double tol = 1e-8;
  std::size_t max_nodes = std::size_t(1) << 16;
  std::size_t checkpoints_per_piece = 7;
  double singular_tol = 1e-10;
};

namespace detail {

inline ResolventLevel residuals(const PHSystem& s, const FundamentalMatrix& fm, const ResolventField& rf,
                                const VectorField& f, std::size_t checkpoints) {
  const int d = s.d;
  ResolventLevel lv;
  lv.nodes = rf.nodes();
  VecC stacked(2 * d);
  stacked.head(d) = rf.wb();
  stacked.tail(d) = rf.wa();
  lv.boundary_residual = (s.W.cast<cplx>() * stacked).norm();
  static constexpr double c8[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  const MatC P1inv = s.P1.inverse().cast<cplx>();
  for (std::size_t k = 0; k < s.pieces(); ++k) {
    const double x0 = s.breaks[k], x1 = s.breaks[k + 1], len = x1 - x0;
    const double rate = std::max(1.0, fm.generator(k).cwiseAbs().rowwise().sum().maxCoeff());
    const double h = std::min(0.1 / rate, len / 20);
    for (std::size_t j = 1; j <= checkpoints; ++j) {
      double x = x0 + 4 * h + (len - 8 * h) * static_cast<double>(j) / static_cast<double>(checkpoints + 1);
      VecC dw = VecC::Zero(d);
      for (int m = 0; m < 4; ++m) dw += c8[m] * (rf.w(x + (m + 1) * h) - rf.w(x - (m + 1) * h));
      dw /= h;
      VecC rhs = fm.generator(k) * rf.w(x) + P1inv * f(x);
      lv.ode_residual = std::max(lv.ode_residual, (dw - rhs).norm());
    }
  }
  return lv;
}

}  // namespace detail

/// Solves (i t + A) u = f; doubles the node count while either residual
/// exceeds tol, up to max_nodes (then QuadratureTooCoarse).
inline ResolventResult resolvent_solve(const PHSystem& s, double t, const VectorField& f,
                                       const ResolventOptions& opt = {}) {
  validate(s);
  FundamentalMatrix fm(s, t);
  ResolventResult res;
  res.t = t;
  for (std::size_t n = opt.nodes;; n *= 2) {
    ResolventField rf(s, fm, f, n, opt.singular_tol);
    ResolventLevel lv = detail::residuals(s, fm, rf, f, opt.checkpoints_per_piece);
    res.history.push_back(lv);
    res.wa = rf.wa();
    res.nodes = lv.nodes;
    res.boundary_residual = lv.boundary_residual;
    res.ode_residual = lv.ode_residual;
    if (lv.boundary_residual <= opt.tol && lv.ode_residual <= opt.tol) return res;
    require(2 * n <= opt.max_nodes, ErrorKind::QuadratureTooCoarse,
            "residuals above tolerance at " + std::to_string(lv.nodes) + " nodes");
  }
}

/// Residuals at node counts start, 2 start, ..., up to `last`, no early exit.
inline std::vector<ResolventLevel> resolvent_convergence(const PHSystem& s, double t, const VectorField& f,
                                                         std::size_t start, std::size_t last,
                                                         const ResolventOptions& opt = {}) {
  validate(s);
  FundamentalMatrix fm(s, t);
  std::vector<ResolventLevel> out;
  for (std::size_t n = start; n <= last; n *= 2) {
    ResolventField rf(s, fm, f, n, opt.singular_tol);
    out.push_back(detail::residuals(s, fm, rf, f, opt.checkpoints_per_piece));
  }
  return out;
}

struct Probe {
  std::string name;
  VectorField f;
};

/// ||u||_H / ||f||_H for one probe, with ||v||_H^2 = int <H v, v>.
inline double probe_ratio(const PHSystem& s, const FundamentalMatrix& fm, const VectorField& f, std::size_t nodes,
                          double sing_tol = 1e-10) {
  ResolventField rf(s, fm, f, nodes, sing_tol);
  double num = 0, den = 0;
  std::vector<MatC> Hc, Hinv;
  for (const auto& H : s.H) {
    Hc.push_back(H.cast<cplx>());
    Hinv.push_back(H.inverse().cast<cplx>());
  }
  rf.for_each_node([&](double x, double w, std::size_t k) {
    VecC wx = rf.w(x);
    VecC fx = f(x);
    num += w * std::real(wx.dot(Hinv[k] * wx));
    den += w * std::real(fx.dot(Hc[k] * fx));
  });
  require(den > 0, ErrorKind::InvalidArgument, "probe has zero norm");
  return std::sqrt(num / den);
}

/// Fixed probes: e_j exp(2 pi i k (x-a)/L) for |k| <= 2, and a probe built
/// from T_t so that the boundary term meets the smallest singular direction.
inline std::vector<Probe> default_probes(const PHSystem& s, const FundamentalMatrix& fm) {
  std::vector<Probe> out;
  const int d = s.d;
  const double a = s.a(), L = s.length();
  for (int j = 0; j < d; ++j) {
    for (int k = -2; k <= 2; ++k) {
      out.push_back({"e" + std::to_string(j) + "_k" + std::to_string(k), [=](double x) {
                       VecC v = VecC::Zero(d);
                       v(j) = std::polar(1.0, 2 * M_PI * k * (x - a) / L);
                       return v;
                     }});
    }
  }
  MatC T = boundary_matrix(s, fm);
  Eigen::JacobiSVD<MatC> svd(T, Eigen::ComputeFullU);
  VecC umin = svd.matrixU().col(d - 1);
  MatC W1Phi = s.W.leftCols(d).cast<cplx>() * fm.at_b();
  VecC e = W1Phi.completeOrthogonalDecomposition().solve(umin);
  if (e.norm() > 0) {
    e /= e.norm();
    const MatC P1 = s.P1.cast<cplx>();
    const FundamentalMatrix* F = &fm;
    out.push_back({"resonant", [=](double x) { return VecC(P1 * (F->at(x) * e)); }});
  }
  return out;
}

/// Largest singular value of the Nystrom discretization of R(it, -A) in the
/// H-weighted norms. An estimate (not a bound) that converges as nodes grow.
inline double resolvent_norm_estimate(const PHSystem& s, const FundamentalMatrix& fm, std::size_t nodes = 4096,
                                      int iterations = 300) {
  const int d = s.d;
  auto panels = detail::make_panels(s, nodes);
  const std::size_t n = panels.size() * 8;
  std::vector<MatC> L(n), R(n);
  std::vector<double> sw(n);
  std::vector<MatC> Hm12(s.pieces());
  for (std::size_t k = 0; k < s.pieces(); ++k) {
    Eigen::SelfAdjointEigenSolver<MatR> es(s.H[k]);
    Hm12[k] = es.operatorInverseSqrt().cast<cplx>();
  }
  const MatC P1inv = s.P1.inverse().cast<cplx>();
  std::size_t idx = 0;
  for (const auto& pn : panels) {
    const double c = 0.5 * (pn.x0 + pn.x1), r = 0.5 * (pn.x1 - pn.x0);
    for (int i = 0; i < 8; ++i, ++idx) {
      double x = c + r * detail::kGLx[i];
      sw[idx] = std::sqrt(r * detail::kGLw[i]);
      L[idx] = Hm12[pn.piece] * fm.at(x);
      R[idx] = fm.inv_at(x) * P1inv * Hm12[pn.piece];
    }
  }
  MatC T = boundary_matrix(s, fm);
  MatC C = -T.fullPivLu().solve(s.W.leftCols(d).cast<cplx>() * fm.at_b());
  auto apply = [&](const std::vector<VecC>& v) {
    std::vector<VecC> y(n);
    VecC total = VecC::Zero(d), run = VecC::Zero(d);
    std::vector<VecC> Rv(n);
    for (std::size_t j = 0; j < n; ++j) {
      Rv[j] = sw[j] * (R[j] * v[j]);
      total += Rv[j];
    }
    VecC Ct = C * total;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = sw[i] * (L[i] * (Ct + run + 0.5 * Rv[i]));
      run += Rv[i];
    }
    return y;
  };
  auto apply_adj = [&](const std::vector<VecC>& y) {
    std::vector<VecC> z(n);
    VecC total = VecC::Zero(d), run = VecC::Zero(d);
    std::vector<VecC> Ly(n);
    for (std::size_t i = 0; i < n; ++i) {
      Ly[i] = sw[i] * (L[i].adjoint() * y[i]);
      total += Ly[i];
    }
    VecC Ct = C.adjoint() * total;
    for (std::size_t j = n; j-- > 0;) {
      z[j] = sw[j] * (R[j].adjoint() * (Ct + run + 0.5 * Ly[j]));
      run += Ly[j];
    }
    return z;
  };
  auto norm = [](const std::vector<VecC>& v) {
    double acc = 0;
    for (const auto& x : v) acc += x.squaredNorm();
    return std::sqrt(acc);
  };
  std::vector<VecC> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    v[j] = VecC::Ones(d) + VecC::Constant(d, cplx(0.1 * std::sin(double(j)), 0.05 * double(j % 7)));
  }
  double nv = norm(v);
  for (auto& x : v) x /= nv;
  double sigma = 0;
  for (int it = 0; it < iterations; ++it) {
    auto z = apply_adj(apply(v));
    double nz = norm(z);
    if (nz == 0) return 0;
    double next = std::sqrt(nz);
    for (auto& x : z) x /= nz;
    v.swap(z);
    bool done = it > 10 && std::fabs(next - sigma) <= 1e-12 * next;
    sigma = next;
    if (done) break;
  }
  return sigma;
}

struct CharRow {
  double t = 0;
  double inv_norm_T = 0;
  double B_t = 0;
  double R_lower = 0;  // probe maximum
  std::string best_probe;
  std::optional<double> R_upper_est;  // discretized estimate, not a bound
  bool lower_ok = false;  // R_lower <= Ctilde (||T^-1|| + 1)
  std::optional<bool> upper_ok;  // ||T^-1|| <= C (R_upper_est + 1)
};

struct CharConstants {
  double B = 0, normW = 0, normWp = 0, normP1 = 0, normP1inv = 0, normH = 0, normS = 0;
  std::string S_note = "||S|| = sup_x ||H(x)^{-1/2}|| = max_k lambda_min(H_k)^{-1/2} (u -> H^{-1}u from L2 to the H-weighted space)";
  double Ctilde = 0, C = 0;
  bool b_growing = false;
  std::optional<double> structural_B;  // uniform bound when P0 = 0
  std::vector<std::string> warnings;
  std::vector<CharRow> rows;
  bool ok() const {
    for (const auto& r : rows)
      if (!r.lower_ok || (r.upper_ok && !*r.upper_ok)) return false;
    return true;
  }
};

/// Condition (B) evidence: B_t over the second half of the grid exceeding
/// 1.5 x the first half counts as growth.
inline bool b_growth_flag(const std::vector<double>& Bs) {
  if (Bs.size() < 4) return false;
  const std::size_t h = Bs.size() / 2;
  double first = *std::max_element(Bs.begin(), Bs.begin() + static_cast<long>(h));
  double second = *std::max_element(Bs.begin() + static_cast<long>(h), Bs.end());
  return second > 1.5 * first;
}

struct CharOptions {
  std::size_t probe_nodes = 2048;
  bool upper_estimate = false;
  std::size_t estimate_nodes = 4096;
  unsigned jobs = 1;
};

/// C~ = L B^2 ||S|| ||P1|| ||P1^-1||^2 max{B ||W||, L^{1/2}},
/// C = (L^{-3/2} ||P1||^2 ||P1^-1||^2 B^3 (1 + B) + 1) ||W^+|| max{L^{1/2} ||H||_inf ||P1||, 1},
/// with L = b - a, and the checkable side of the characterisation per t.
inline CharConstants char_constants(const PHSystem& s, const std::vector<double>& ts, const CharOptions& opt = {}) {
  validate(s);
  require(!ts.empty(), ErrorKind::InvalidArgument, "empty t grid");
  CharConstants cc;
  const double L = s.length();
  cc.normW = detail::opnorm(s.W);
  cc.normWp = detail::opnorm(moore_penrose(s.W));
  cc.normP1 = detail::opnorm(s.P1);
  cc.normP1inv = detail::opnorm(MatR(s.P1.inverse()));
  for (const auto& H : s.H) {
    cc.normH = std::max(cc.normH, detail::opnorm(H));
    Eigen::SelfAdjointEigenSolver<MatR> es(H);
    cc.normS = std::max(cc.normS, 1.0 / std::sqrt(es.eigenvalues().minCoeff()));
  }
  if (s.P0.cwiseAbs().maxCoeff() == 0) {
    double sb = 1;
    for (const auto& H : s.H) {
      Eigen::SelfAdjointEigenSolver<MatR> es(H);
      sb *= std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
    }
    cc.structural_B = sb;
  }
  cc.rows.resize(ts.size());
  parallel_for(ts.size(), opt.jobs, [&](std::size_t i) {
    FundamentalMatrix fm(s, ts[i]);
    CharRow& r = cc.rows[i];
    r.t = ts[i];
    r.B_t = fm.B();
    MatC T = boundary_matrix(s, fm);
    r.inv_norm_T = 1.0 / detail::sigma_min(T);
    for (const auto& p : default_probes(s, fm)) {
      double q = probe_ratio(s, fm, p.f, opt.probe_nodes);
      if (q > r.R_lower) {
        r.R_lower = q;
        r.best_probe = p.name;
      }
    }
    if (opt.upper_estimate) r.R_upper_est = resolvent_norm_estimate(s, fm, opt.estimate_nodes);
  });
  std::vector<double> Bs;
  for (const auto& r : cc.rows) {
    cc.B = std::max(cc.B, r.B_t);
    Bs.push_back(r.B_t);
  }
  cc.b_growing = b_growth_flag(Bs);
  if (cc.b_growing) cc.warnings.push_back("B_t grows over the grid: condition (B) evidence fails; constants are grid values");
  const double B = cc.B;
  cc.Ctilde = L * B * B * cc.normS * cc.normP1 * cc.normP1inv * cc.normP1inv * std::max(B * cc.normW, std::sqrt(L));
  cc.C = (std::pow(L, -1.5) * cc.normP1 * cc.normP1 * cc.normP1inv * cc.normP1inv * B * B * B * (1 + B) + 1) *
         cc.normWp * std::max(std::sqrt(L) * cc.normH * cc.normP1, 1.0);
  for (auto& r : cc.rows) {
    r.lower_ok = r.R_lower <= cc.Ctilde * (r.inv_norm_T + 1);
    if (r.R_upper_est) r.upper_ok = r.inv_norm_T <= cc.C * (*r.R_upper_est + 1);
  }
  if (!opt.upper_estimate) cc.warnings.push_back("no resolvent upper estimate; ||T^-1|| <= C(||R|| + 1) not checked");
  return cc;
}

// JSON config: {"d":2,"P0":[[...]],"P1":[[...]],"H":{"breaks":[...],"pieces":[[[...]]]},
// "W":[[...]],"interval":[a,b]}; numbers may be decimal strings.
namespace detail {

inline double json_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  require(j.is_string(), ErrorKind::ParseError, "matrix entries must be numbers or decimal strings");
  std::string str = j.get<std::string>();
  if (str.find_first_of("eE") != std::string::npos) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == str.size() && std::isfinite(v), ErrorKind::ParseError, "bad number '" + str + "'");
    return v;
  }
  bool neg = !str.empty() && (str[0] == '-' || str[0] == '+');
  Rational q = detail::parse_decimal(neg ? str.substr(1) : str);
  if (str[0] == '-') q = -q;
  // mpq_get_d truncates; round to nearest through MPFR instead
  detail::Mpfr m(53);
  mpfr_set_q(m.get(), q.get_mpq_t(), MPFR_RNDN);
  return mpfr_get_d(m.get(), MPFR_RNDN);
}

inline MatR json_matrix(const nlohmann::json& j, const char* name) {
  require(j.is_array() && !j.empty() && j[0].is_array(), ErrorKind::ParseError,
          std::string(name) + " must be a row-major array of rows");
  const auto r = static_cast<Eigen::Index>(j.size()), c = static_cast<Eigen::Index>(j[0].size());
  MatR M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    require(j[i].is_array() && static_cast<Eigen::Index>(j[i].size()) == c, ErrorKind::ParseError,
            std::string(name) + " has ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) M(i, k) = json_number(j[i][k]);
  }
  return M;
}

inline nlohmann::json matrix_json(const MatR& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", M(i, k));
      row.push_back(std::string(buf));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

inline PHSystem phs_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::ParseError, "PHS config must be an object");
  PHSystem s;
  try {
    s.d = j.at("d").get<int>();
    s.P0 = detail::json_matrix(j.at("P0"), "P0");
    s.P1 = detail::json_matrix(j.at("P1"), "P1");
    const auto& H = j.at("H");
    for (const auto& b : H.at("breaks")) s.breaks.push_back(detail::json_number(b));
    for (const auto& p : H.at("pieces")) s.H.push_back(detail::json_matrix(p, "H piece"));
    s.W = detail::json_matrix(j.at("W"), "W");
    if (j.contains("interval")) {
      const auto& iv = j.at("interval");
      require(iv.is_array() && iv.size() == 2, ErrorKind::ParseError, "interval must be [a, b]");
      double a = detail::json_number(iv[0]), b = detail::json_number(iv[1]);
      require(!s.breaks.empty() && s.breaks.front() == a && s.breaks.back() == b, ErrorKind::ParseError,
              "interval must match the first and last H breaks");
    }
    s.name = j.value("name", std::string("config"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("PHS config: ") + e.what());
  }
  return s;
}

inline nlohmann::json to_json(const PHSystem& s) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& H : s.H) pieces.push_back(detail::matrix_json(H));
  nlohmann::json breaks = nlohmann::json::array();
  for (double b : s.breaks) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", b);
    breaks.push_back(std::string(buf));
  }
  return {{"name", s.name},
          {"d", s.d},
          {"P0", detail::matrix_json(s.P0)},
          {"P1", detail::matrix_json(s.P1)},
          {"H", {{"breaks", breaks}, {"pieces", pieces}}},
          {"W", detail::matrix_json(s.W)},
          {"interval", {breaks.front(), breaks.back()}}};
}

}  // namespace semiuniform
