#pragma once

// Executable form of the carrier-matrix machinery: the per-column strategy
// weights q, the gamma x K matrix A(x) with its Hadamard factorization
// A = R o P, the equilibrium identity A(x*) u = 0, rank verification, and a
// brute-force L-matrix test over all diagonal sign matrices.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "reggames/game.hpp"
#include "reggames/linalg.hpp"

namespace reggames {

class SignPatternMatrix {
 public:
  SignPatternMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * cols, 0) {}

  static SignPatternMatrix sign_of(const Mat& m) {
    SignPatternMatrix s(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        s.at(r, c) = m(r, c) > 0.0 ? 1 : (m(r, c) < 0.0 ? -1 : 0);
    return s;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  std::int8_t& at(int r, int c) { return entries_[static_cast<size_t>(r) * cols_ + c]; }
  std::int8_t at(int r, int c) const { return entries_[static_cast<size_t>(r) * cols_ + c]; }

  void set(int r, int c, int v) {
    if (v < -1 || v > 1) throw std::invalid_argument("SignPatternMatrix: entry not in {-1,0,1}");
    at(r, c) = static_cast<std::int8_t>(v);
  }

 private:
  int rows_, cols_;
  std::vector<std::int8_t> entries_;
};

// Ordering of the joint strategies that lists every all-carrier action
// combination first (K~ columns, slot odometer with the last player varying
// fastest), followed by the remaining joint strategies in storage order.
struct CarrierOrdering {
  std::vector<int> to_joint;            // position tau -> joint index in storage order
  std::vector<std::vector<int>> alpha;  // tau < K~ : per-player carrier slot (0-based)
  int combo_count = 0;                  // K~
};

inline CarrierOrdering carrier_first_ordering(const GameSize& size, const Carrier& carrier) {
  if (carrier.players() != size.players())
    throw std::invalid_argument("carrier_first_ordering: player count mismatch");
  CarrierOrdering ord;
  ord.combo_count = carrier.combo_count();
  std::vector<bool> used(size.joint_count(), false);
  std::vector<int> slots(size.players(), 0);
  while (true) {
    std::vector<int> pure(size.players());
    for (int i = 0; i < size.players(); ++i) pure[i] = carrier.support(i)[slots[i]];
    const int joint = size.joint_index(pure);
    ord.to_joint.push_back(joint);
    ord.alpha.push_back(slots);
    used[joint] = true;
    int lane = size.players() - 1;
    while (lane >= 0) {
      if (++slots[lane] < carrier.support_size(lane)) break;
      slots[lane] = 0;
      --lane;
    }
    if (lane < 0) break;
  }
  for (int joint = 0; joint < size.joint_count(); ++joint)
    if (!used[joint]) ord.to_joint.push_back(joint);
  return ord;
}

// Probability the (mixed) strategy assigns to the action `player` uses in the
// tau-th joint strategy of the ordering.
inline double q_eval(const GameSize& size, const CarrierOrdering& ordering, int tau, int player,
                     const ReducedStrategy& x_i) {
  if (tau < 0 || tau >= static_cast<int>(ordering.to_joint.size()))
    throw std::out_of_range("q_eval: column index");
  const int action = size.action_of(ordering.to_joint[tau], player);
  return to_simplex(x_i).weight(action);
}

// Pure-strategy form: 1 when the argument matches the action played in the
// tau-th joint strategy, 0 otherwise.
inline double q_eval(const GameSize& size, const CarrierOrdering& ordering, int tau, int player,
                     int pure_action) {
  if (tau < 0 || tau >= static_cast<int>(ordering.to_joint.size()))
    throw std::out_of_range("q_eval: column index");
  if (pure_action < 0 || pure_action >= size.actions(player))
    throw std::out_of_range("q_eval: action index");
  return size.action_of(ordering.to_joint[tau], player) == pure_action ? 1.0 : 0.0;
}

struct CarrierMatrixBundle {
  Mat a;               // gamma x K
  SignPatternMatrix r;  // gamma x K, entries in {-1,0,1}
  Mat p;               // gamma x K, nonnegative
  Carrier carrier;
  CarrierOrdering ordering;
  std::vector<std::pair<int, int>> row_to_player_slot;  // s -> (player, carrier slot 1..gamma_i-1)
  std::vector<std::vector<int>> row_index;              // [player][slot-1] -> s

  CarrierMatrixBundle() : r(0, 0) {}
};

// Builds A(x) = R o P(x) for a strategy whose carrier is contained in the
// given carrier set. Row s corresponds to the deviation of player i from its
// reference carrier action to its (k+1)-th carrier action; column tau to the
// tau-th joint strategy under the carrier-first ordering.
inline CarrierMatrixBundle build_bundle(const GameSize& size, const Profile& x,
                                        const Carrier& carrier) {
  if (!x.matches(size)) throw std::invalid_argument("build_bundle: profile size mismatch");
  if (!carrier.contains(carrier_of(x)))
    throw std::invalid_argument("build_bundle: carrier of x not contained in carrier set");
  CarrierMatrixBundle b;
  b.carrier = carrier;
  b.ordering = carrier_first_ordering(size, carrier);
  const int gamma = carrier.free_dim();
  const int K = size.joint_count();
  b.a = Mat(gamma, K);
  b.p = Mat(gamma, K);
  b.r = SignPatternMatrix(gamma, K);
  b.row_index.assign(size.players(), {});
  std::vector<SimplexStrategy> sigma = x.simplexes();
  int s = 0;
  for (int i = 0; i < size.players(); ++i) {
    for (int k = 1; k < carrier.support_size(i); ++k, ++s) {
      b.row_to_player_slot.emplace_back(i, k);
      b.row_index[i].push_back(s);
      const int dev_action = carrier.support(i)[k];
      const int ref_action = carrier.support(i)[0];
      for (int tau = 0; tau < K; ++tau) {
        const int joint = b.ordering.to_joint[tau];
        const int own = size.action_of(joint, i);
        const int rv = (own == dev_action ? 1 : 0) - (own == ref_action ? 1 : 0);
        double pv = 1.0;
        for (int j = 0; j < size.players(); ++j) {
          if (j == i) continue;
          pv *= sigma[j].weight(size.action_of(joint, j));
        }
        b.r.at(s, tau) = static_cast<std::int8_t>(rv);
        b.p(s, tau) = pv;
        b.a(s, tau) = rv * pv;
      }
    }
  }
  return b;
}

// Row s of A(x) times the utility vector reproduces the restricted gradient
// component of the corresponding deviation; at equilibria A(x*) u = 0.
inline std::vector<double> apply_to_utilities(const CarrierMatrixBundle& b,
                                              const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != b.a.cols())
    throw std::invalid_argument("apply_to_utilities: utility length");
  std::vector<double> permuted(u.size());
  for (size_t tau = 0; tau < permuted.size(); ++tau) permuted[tau] = u[b.ordering.to_joint[tau]];
  return b.a.apply(permuted);
}

inline std::pair<bool, double> full_row_rank(const Mat& a, double tol_rel = kSingularTolRel) {
  if (a.rows() < 1) throw std::invalid_argument("full_row_rank: empty matrix");
  if (a.rows() > a.cols()) return {false, 0.0};
  std::vector<double> s = singular_values(a.transposed());
  const double smax = s.front();
  if (smax == 0.0) return {false, 0.0};
  const double ratio = s[a.rows() - 1] / smax;
  return {ratio > tol_rel, ratio};
}

constexpr int kLMatrixRowCap = 12;  // 3^12 diagonal sign matrices is the brute-force budget

// Characterization test: L is an L-matrix iff for every nonzero diagonal sign
// matrix D, some column of D*L is nonzero with all nonzero entries sharing one
// sign. Returns the first failing D (in ternary counter order) or nullopt.
inline std::optional<std::vector<std::int8_t>> l_matrix_failure_witness(
    const SignPatternMatrix& l) {
  const int m = l.rows(), n = l.cols();
  if (m > kLMatrixRowCap)
    throw std::length_error("is_l_matrix: row count exceeds brute-force cap of 12");
  if (m == 0 || n < m) return std::vector<std::int8_t>();  // vacuous failure
  std::vector<std::int8_t> d(m, -1);
  while (true) {
    bool all_zero = true;
    for (std::int8_t v : d) all_zero = all_zero && v == 0;
    if (!all_zero) {
      bool found_column = false;
      for (int c = 0; c < n && !found_column; ++c) {
        int sign_seen = 0;
        bool uniform = true;
        for (int r = 0; r < m; ++r) {
          const int v = d[r] * l.at(r, c);
          if (v == 0) continue;
          if (sign_seen == 0)
            sign_seen = v;
          else if (v != sign_seen)
            uniform = false;
        }
        found_column = uniform && sign_seen != 0;
      }
      if (!found_column) return d;
    }
    int lane = m - 1;
    while (lane >= 0) {
      if (d[lane] < 1) {
        ++d[lane];
        break;
      }
      d[lane] = -1;
      --lane;
    }
    if (lane < 0) break;
  }
  return std::nullopt;
}

inline bool is_l_matrix(const SignPatternMatrix& l) {
  return !l_matrix_failure_witness(l).has_value();
}

// The sign pattern R_1 o sgn(P_1(x)) restricted to the first K~ columns must
// be an L-matrix for every x with carrier contained in the carrier set.
inline bool verify_l_property(const GameSize& size, const Profile& x, const Carrier& carrier) {
  const CarrierMatrixBundle b = build_bundle(size, x, carrier);
  const int gamma = carrier.free_dim();
  if (gamma > kLMatrixRowCap)
    throw std::length_error("verify_l_property: free dimension exceeds brute-force cap of 12");
  SignPatternMatrix l(gamma, b.ordering.combo_count);
  for (int s = 0; s < gamma; ++s)
    for (int tau = 0; tau < b.ordering.combo_count; ++tau)
      l.at(s, tau) = static_cast<std::int8_t>(b.r.at(s, tau) * (b.p(s, tau) > 0.0 ? 1 : 0));
  return is_l_matrix(l);
}

}  // namespace reggames
