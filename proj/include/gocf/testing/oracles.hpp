#pragma once

// Reference implementations used only by the test suite and `gocf verify`.
// They are deliberately naive and share no code with the modules they check
// beyond the plain value types (Point, Move, Color).

#include <Eigen/Dense>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gocf/core/types.hpp"

namespace gocf::oracle {

// ---------------------------------------------------------------- rules

struct SlowBoard {
  std::array<char, kNumPoints> cell{};  // 0 empty, 'B', 'W'
  friend bool operator==(const SlowBoard&, const SlowBoard&) = default;

  int count(char c) const { return static_cast<int>(std::count(cell.begin(), cell.end(), c)); }
};

inline char letter(Color c) { return c == Color::Black ? 'B' : 'W'; }

inline std::vector<int> adjacent(int idx) {
  std::vector<int> out;
  const int c = idx % kBoardSize, r = idx / kBoardSize;
  if (c > 0) out.push_back(idx - 1);
  if (c < kBoardSize - 1) out.push_back(idx + 1);
  if (r > 0) out.push_back(idx - kBoardSize);
  if (r < kBoardSize - 1) out.push_back(idx + kBoardSize);
  return out;
}

// Flood fill of the group at idx; returns (stones, liberty count).
inline std::pair<std::vector<int>, int> group_of(const SlowBoard& b, int idx) {
  const char col = b.cell[idx];
  std::vector<int> stack = {idx}, stones;
  std::set<int> seen = {idx}, libs;
  while (!stack.empty()) {
    int p = stack.back();
    stack.pop_back();
    stones.push_back(p);
    for (int n : adjacent(p)) {
      if (b.cell[n] == 0) libs.insert(n);
      else if (b.cell[n] == col && seen.insert(n).second) stack.push_back(n);
    }
  }
  return {stones, static_cast<int>(libs.size())};
}

// Plays one stone; nullopt if occupied or suicide. Ko is judged by the
// caller from position history.
inline std::optional<SlowBoard> slow_play(const SlowBoard& b, Color who, Point p) {
  if (p.is_pass()) return b;
  if (b.cell[p.index()] != 0) return std::nullopt;
  SlowBoard n = b;
  n.cell[p.index()] = letter(who);
  const char them = letter(opponent(who));
  for (int a : adjacent(p.index())) {
    if (n.cell[a] != them) continue;
    auto [stones, libs] = group_of(n, a);
    if (libs == 0)
      for (int s : stones) n.cell[s] = 0;
  }
  if (group_of(n, p.index()).second == 0) return std::nullopt;
  return n;
}

enum class SlowError { None, Occupied, Suicide, Ko, WrongColor };

struct SlowReplay {
  SlowBoard board;
  std::optional<int> first_bad;  // 1-based move ordinal
  SlowError error = SlowError::None;
};

// Replays moves from the given setup. A move is a ko violation when it
// recreates the position that stood before the opponent's last move.
inline SlowReplay slow_replay(const std::vector<std::pair<Color, Point>>& setup, const std::vector<Move>& moves) {
  SlowReplay r;
  for (auto [c, p] : setup) r.board.cell[p.index()] = letter(c);
  std::optional<SlowBoard> two_ago, one_ago = r.board;
  std::optional<Color> expect;
  if (!moves.empty()) expect = setup.empty() ? Color::Black : moves.front().color;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const Move& m = moves[i];
    if (m.color != *expect) {
      r.first_bad = static_cast<int>(i + 1);
      r.error = SlowError::WrongColor;
      return r;
    }
    if (!m.point.is_pass() && r.board.cell[m.point.index()] != 0) {
      r.first_bad = static_cast<int>(i + 1);
      r.error = SlowError::Occupied;
      return r;
    }
    auto next = slow_play(r.board, m.color, m.point);
    if (!next) {
      r.first_bad = static_cast<int>(i + 1);
      r.error = SlowError::Suicide;
      return r;
    }
    if (!m.point.is_pass() && two_ago && *next == *two_ago) {
      r.first_bad = static_cast<int>(i + 1);
      r.error = SlowError::Ko;
      return r;
    }
    two_ago = one_ago;
    one_ago = *next;
    r.board = *next;
    expect = opponent(m.color);
  }
  return r;
}

// Every point (plus pass) that slow_replay accepts as the next move.
inline std::set<int> slow_legal_moves(const std::vector<Move>& history, Color to_move) {
  std::set<int> out;
  std::vector<Move> moves = history;
  moves.push_back({static_cast<int>(moves.size() + 1), to_move, Point::pass()});
  for (int idx = 0; idx <= kNumPoints; ++idx) {
    moves.back().point = idx == kNumPoints ? Point::pass() : Point::from_index(idx);
    if (!slow_replay({}, moves).first_bad) out.insert(idx);
  }
  return out;
}

// ---------------------------------------------------------------- novelty

struct SeqGame {
  std::vector<Move> moves;
};

// O(n^2 * max_move): game i's novel move is the smallest k such that no
// earlier game (by position in the list) shares its first k moves.
inline std::vector<std::optional<int>> pairwise_novelty(const std::vector<SeqGame>& games, int max_move) {
  std::vector<std::optional<int>> out(games.size());
  for (std::size_t i = 0; i < games.size(); ++i) {
    const auto& g = games[i].moves;
    const int len = std::min<int>(static_cast<int>(g.size()), max_move);
    for (int k = 1; k <= len; ++k) {
      bool seen = false;
      for (std::size_t j = 0; j < i && !seen; ++j) {
        const auto& h = games[j].moves;
        if (static_cast<int>(h.size()) < k) continue;
        bool same = true;
        for (int t = 0; t < k && same; ++t)
          same = h[t].color == g[t].color && h[t].point == g[t].point;
        seen = same;
      }
      if (!seen) {
        out[i] = k;
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- stats

inline double naive_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline std::map<std::pair<std::string, int>, double> naive_cell_medians(
    const std::vector<std::tuple<std::string, int, double>>& rows) {
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  for (const auto& [p, t, v] : rows) cells[{p, t}].push_back(v);
  std::map<std::pair<std::string, int>, double> out;
  for (auto& [k, v] : cells) out[k] = naive_median(v);
  return out;
}

struct DummyOlsResult {
  Eigen::VectorXd coef;  // regressors of interest
  Eigen::VectorXd se;    // CR1, K = rank of the full design
  Eigen::Index rank = 0;
};

// OLS with every fixed-effect level materialised as a dummy column next to
// an intercept, solved by pseudo-inverse, and a hand-written CR1 sandwich.
inline DummyOlsResult explicit_dummy_ols(const std::vector<double>& y, const std::vector<std::vector<double>>& x,
                                         const std::vector<std::vector<int>>& factors,
                                         const std::vector<int>& cluster) {
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index kx = static_cast<Eigen::Index>(x.size());
  std::vector<std::map<int, Eigen::Index>> level_col(factors.size());
  Eigen::Index cols = kx + 1;
  for (std::size_t f = 0; f < factors.size(); ++f)
    for (int v : factors[f])
      if (!level_col[f].contains(v)) level_col[f][v] = cols++;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, cols);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Y(i) = y[i];
    for (Eigen::Index j = 0; j < kx; ++j) X(i, j) = x[j][i];
    X(i, kx) = 1.0;
    for (std::size_t f = 0; f < factors.size(); ++f) X(i, level_col[f][factors[f][i]]) = 1.0;
  }
  const Eigen::MatrixXd XtX = X.transpose() * X;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(XtX);
  cod.setThreshold(1e-10);
  const Eigen::MatrixXd P = cod.pseudoInverse();
  const Eigen::VectorXd b = P * (X.transpose() * Y);
  const Eigen::VectorXd e = Y - X * b;

  std::map<int, Eigen::VectorXd> score;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = score.try_emplace(cluster[i], Eigen::VectorXd::Zero(cols));
    it->second += X.row(i).transpose() * e(i);
  }
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(cols, cols);
  for (const auto& [g, s] : score) meat += s * s.transpose();
  const double G = static_cast<double>(score.size()), N = static_cast<double>(n);
  const Eigen::Index rank = cod.rank();
  const double K = static_cast<double>(rank);
  const Eigen::MatrixXd V = (G / (G - 1.0)) * ((N - 1.0) / (N - K)) * P * meat * P;

  DummyOlsResult r;
  r.rank = rank;
  r.coef = b.head(kx);
  r.se.resize(kx);
  for (Eigen::Index j = 0; j < kx; ++j) r.se(j) = std::sqrt(std::max(0.0, V(j, j)));
  return r;
}

// ---------------------------------------------------------------- archives

// Minimal stored (uncompressed) zip writer for building test fixtures.
inline std::string make_stored_zip(const std::vector<std::pair<std::string, std::string>>& files) {
  auto u16 = [](std::string& s, unsigned v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
  };
  auto u32 = [&](std::string& s, unsigned long v) {
    u16(s, static_cast<unsigned>(v & 0xFFFF));
    u16(s, static_cast<unsigned>((v >> 16) & 0xFFFF));
  };
  std::string body, central;
  for (const auto& [name, data] : files) {
    const unsigned long crc = crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    const unsigned long offset = body.size();
    body += "PK\x03\x04";
    u16(body, 20), u16(body, 0), u16(body, 0), u16(body, 0), u16(body, 0);
    u32(body, crc), u32(body, data.size()), u32(body, data.size());
    u16(body, static_cast<unsigned>(name.size())), u16(body, 0);
    body += name + data;
    central += "PK\x01\x02";
    u16(central, 20), u16(central, 20), u16(central, 0), u16(central, 0), u16(central, 0), u16(central, 0);
    u32(central, crc), u32(central, data.size()), u32(central, data.size());
    u16(central, static_cast<unsigned>(name.size())), u16(central, 0), u16(central, 0), u16(central, 0), u16(central, 0);
    u32(central, 0), u32(central, offset);
    central += name;
  }
  std::string out = body + central;
  out += "PK\x05\x06";
  u16(out, 0), u16(out, 0), u16(out, static_cast<unsigned>(files.size())), u16(out, static_cast<unsigned>(files.size()));
  u32(out, central.size()), u32(out, body.size()), u16(out, 0);
  return out;
}

}  // namespace gocf::oracle
