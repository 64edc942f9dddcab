#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gocf::stats {

// A categorical dimension recoded to dense levels 0..levels-1, in order of
// first appearance.
struct FactorDim {
  std::string name;
  std::vector<std::uint32_t> codes;
  std::uint32_t levels = 0;

  template <class Key>
  static FactorDim encode(std::string name, const std::vector<Key>& raw) {
    FactorDim d;
    d.name = std::move(name);
    d.codes.reserve(raw.size());
    std::unordered_map<Key, std::uint32_t> seen;
    for (const auto& k : raw) {
      auto [it, inserted] = seen.emplace(k, d.levels);
      if (inserted) ++d.levels;
      d.codes.push_back(it->second);
    }
    return d;
  }

  std::vector<std::uint32_t> counts() const {
    std::vector<std::uint32_t> c(levels, 0);
    for (auto code : codes) ++c[code];
    return c;
  }
};

struct DemeanReport {
  int iterations = 0;
  double final_change = 0.0;
  bool converged = false;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Projects every column of `m` onto the orthogonal complement of the span of
// the dimension indicators by alternating projections (successive group
// demeaning). Stops once a full sweep moves no entry by more than
// tol * max(1, max |entry of the input|).
inline DemeanReport demean_columns(Eigen::MatrixXd& m, const std::vector<FactorDim>& dims, double tol,
                                   int max_sweeps) {
  DemeanReport rep;
  if (dims.empty() || m.cols() == 0) {
    rep.converged = true;
    return rep;
  }
  const Eigen::Index n = m.rows();
  std::vector<std::vector<double>> inv_counts;
  for (const auto& d : dims) {
    if (static_cast<Eigen::Index>(d.codes.size()) != n) throw std::invalid_argument("fixed effect length mismatch");
    auto c = d.counts();
    std::vector<double> inv(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) inv[i] = c[i] ? 1.0 / c[i] : 0.0;
    inv_counts.push_back(std::move(inv));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  std::vector<double> sums;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t di = 0; di < dims.size(); ++di) {
      const auto& codes = dims[di].codes;
      const auto& inv = inv_counts[di];
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        sums.assign(inv.size(), 0.0);
        double* col = m.col(j).data();
        for (Eigen::Index i = 0; i < n; ++i) sums[codes[i]] += col[i];
        for (std::size_t g = 0; g < sums.size(); ++g) {
          sums[g] *= inv[g];
          change = std::max(change, std::abs(sums[g]));
        }
        for (Eigen::Index i = 0; i < n; ++i) col[i] -= sums[codes[i]];
      }
    }
    rep.iterations = sweep;
    rep.final_change = change / scale;
    // One dimension is exact after a single sweep.
    if (dims.size() == 1 || rep.final_change <= tol) {
      rep.converged = true;
      return rep;
    }
  }
  return rep;
}

// Rank of the indicator span of `dims` (with an implicit intercept): exact
// for the first two dimensions via connected components of their bipartite
// level graph; each further dimension adds levels - 1.
inline std::size_t absorbed_rank(const std::vector<FactorDim>& dims) {
  if (dims.empty()) return 0;
  std::size_t rank = dims[0].levels;
  if (dims.size() >= 2) {
    const auto& a = dims[0];
    const auto& b = dims[1];
    std::vector<std::uint32_t> parent(a.levels + b.levels);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t i = 0; i < a.codes.size(); ++i) {
      auto ra = find(a.codes[i]), rb = find(a.levels + b.codes[i]);
      if (ra != rb) parent[ra] = rb;
    }
    std::size_t components = 0;
    for (std::uint32_t x = 0; x < parent.size(); ++x) components += find(x) == x;
    rank += b.levels - components;
  }
  for (std::size_t d = 2; d < dims.size(); ++d) rank += dims[d].levels - 1;
  return rank;
}

}  // namespace gocf::stats
