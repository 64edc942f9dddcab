#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gocf/stats/hdfe.hpp"

namespace gocf::stats {

struct FeProblem {
  std::vector<double> y;
  std::vector<std::string> names;         // one per regressor column
  std::vector<std::vector<double>> x;     // columns, each of length n
  std::vector<FactorDim> absorb;          // empty: intercept only
  std::vector<std::string> cluster;       // one id per row
};

struct FeOptions {
  double tolerance = 1e-10;
  int max_sweeps = 10000;
  // Drop regressors that are collinear (after absorption) instead of failing.
  bool drop_collinear = false;
  // Relative residual variance below which a column counts as collinear.
  double collinear_tol = 1e-9;
};

struct RegressionResult {
  std::vector<std::string> names;  // kept regressors, input order
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;  // clustered (CR1)
  Eigen::VectorXd se;
  std::vector<std::string> omitted;
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;
  std::size_t dof_k = 0;  // regressors + absorbed rank used in (N-1)/(N-K)
  std::vector<std::string> absorbed_dims;
  DemeanReport convergence;

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    return std::nullopt;
  }
  double estimate(const std::string& name) const { return coef(static_cast<Eigen::Index>(index_of(name).value())); }
  double std_error(const std::string& name) const { return se(static_cast<Eigen::Index>(index_of(name).value())); }
  std::pair<double, double> ci95(const std::string& name) const {
    const double b = estimate(name), s = std_error(name);
    return {b - 1.96 * s, b + 1.96 * s};
  }
};

class CollinearityError : public std::runtime_error {
 public:
  CollinearityError(const std::vector<std::string>& cols)
      : std::runtime_error(message(cols)), columns_(cols) {}
  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  static std::string message(const std::vector<std::string>& cols) {
    std::string s = "collinear regressors after absorbing fixed effects:";
    for (const auto& c : cols) s += " " + c;
    return s;
  }
  std::vector<std::string> columns_;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// OLS of y on x with the `absorb` dimensions partialled out, and a
// cluster-robust sandwich covariance with the CR1 factor
// G/(G-1) * (N-1)/(N-K), K = kept regressors + rank of absorbed indicators.
inline RegressionResult fe_regression(const FeProblem& p, const FeOptions& opt = {}) {
  const std::size_t n = p.y.size();
  if (p.x.size() != p.names.size()) throw std::invalid_argument("fe_regression: names/columns mismatch");
  for (const auto& c : p.x)
    if (c.size() != n) throw std::invalid_argument("fe_regression: column length mismatch");
  if (p.cluster.size() != n) throw std::invalid_argument("fe_regression: cluster length mismatch");
  if (n == 0) throw EstimationError("fe_regression: no observations");

  std::vector<std::uint32_t> cluster_code(n);
  std::size_t n_clusters = 0;
  {
    std::unordered_map<std::string, std::uint32_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = ids.emplace(p.cluster[i], static_cast<std::uint32_t>(ids.size()));
      cluster_code[i] = it->second;
    }
    n_clusters = ids.size();
  }
  if (n_clusters < 2) throw EstimationError("fe_regression: need at least 2 clusters, got " + std::to_string(n_clusters));

  std::vector<FactorDim> dims = p.absorb;
  if (dims.empty()) dims.push_back(FactorDim{"(intercept)", std::vector<std::uint32_t>(n, 0), 1});

  const Eigen::Index k_all = static_cast<Eigen::Index>(p.x.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), k_all + 1);
  for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), 0) = p.y[i];
  Eigen::VectorXd raw_ss(k_all);
  for (Eigen::Index j = 0; j < k_all; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m(static_cast<Eigen::Index>(i), j + 1) = p.x[j][i];
      ss += p.x[j][i] * p.x[j][i];
    }
    raw_ss(j) = ss;
  }

  RegressionResult r;
  r.convergence = demean_columns(m, dims, opt.tolerance, opt.max_sweeps);
  if (!r.convergence.converged)
    throw ConvergenceError("fixed-effect demeaning did not converge in " + std::to_string(opt.max_sweeps) +
                           " sweeps (last change " + std::to_string(r.convergence.final_change) + ")");
  for (const auto& d : p.absorb) r.absorbed_dims.push_back(d.name);

  const Eigen::VectorXd y = m.col(0);
  const Eigen::MatrixXd x_all = m.rightCols(k_all);
  const Eigen::MatrixXd gram_all = x_all.transpose() * x_all;

  // Greedy column selection by incremental Cholesky: keep column j iff its
  // residual after projection on the kept columns is non-negligible.
  std::vector<Eigen::Index> keep;
  Eigen::MatrixXd l;  // lower Cholesky factor of the kept Gram block
  for (Eigen::Index j = 0; j < k_all; ++j) {
    const double gjj = gram_all(j, j);
    double resid = gjj;
    Eigen::VectorXd w;
    if (!keep.empty()) {
      Eigen::VectorXd g(static_cast<Eigen::Index>(keep.size()));
      for (std::size_t a = 0; a < keep.size(); ++a) g(static_cast<Eigen::Index>(a)) = gram_all(keep[a], j);
      w = l.triangularView<Eigen::Lower>().solve(g);
      resid = gjj - w.squaredNorm();
    }
    const double ref = raw_ss(j) > 0 ? raw_ss(j) : 1.0;
    if (!(resid > opt.collinear_tol * ref) || gjj <= 0.0) {
      r.omitted.push_back(p.names[j]);
      continue;
    }
    const Eigen::Index s = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd nl = Eigen::MatrixXd::Zero(s + 1, s + 1);
    if (s > 0) {
      nl.topLeftCorner(s, s) = l;
      nl.block(s, 0, 1, s) = w.transpose();
    }
    nl(s, s) = std::sqrt(resid);
    l = std::move(nl);
    keep.push_back(j);
  }
  if (!r.omitted.empty() && !opt.drop_collinear) throw CollinearityError(r.omitted);

  const Eigen::Index k = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), k);
  for (Eigen::Index a = 0; a < k; ++a) {
    x.col(a) = x_all.col(keep[a]);
    r.names.push_back(p.names[keep[a]]);
  }
  r.n_obs = n;
  r.n_clusters = n_clusters;
  r.dof_k = static_cast<std::size_t>(k) + absorbed_rank(dims);
  if (r.dof_k >= n) throw EstimationError("fe_regression: no residual degrees of freedom");

  if (k == 0) {
    r.coef.resize(0);
    r.cov.resize(0, 0);
    r.se.resize(0);
    return r;
  }

  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) gram(a, b) = gram_all(keep[a], keep[b]);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  r.coef = llt.solve(x.transpose() * y);
  const Eigen::VectorXd e = y - x * r.coef;

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(n_clusters));
  for (std::size_t i = 0; i < n; ++i)
    scores.col(cluster_code[i]) += x.row(static_cast<Eigen::Index>(i)).transpose() * e(static_cast<Eigen::Index>(i));
  const Eigen::MatrixXd meat = scores * scores.transpose();
  const Eigen::MatrixXd bread = llt.solve(Eigen::MatrixXd::Identity(k, k));
  const double g = static_cast<double>(n_clusters), nn = static_cast<double>(n),
               kk = static_cast<double>(r.dof_k);
  const double c = g / (g - 1.0) * (nn - 1.0) / (nn - kk);
  Eigen::MatrixXd v = c * bread * meat * bread;
  r.cov = 0.5 * (v + v.transpose());
  r.se = r.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return r;
}

// Two-sided normal p-value and the conventional stars.
inline double normal_p_value(double t) { return std::erfc(std::abs(t) / std::sqrt(2.0)); }

inline std::string stars(double estimate, double se) {
  if (!(se > 0.0)) return "";
  const double p = normal_p_value(estimate / se);
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace gocf::stats
