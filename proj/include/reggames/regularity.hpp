#pragma once

// Regularity certification of equilibria. Three routes are implemented and
// cross-checked:
//   (a) the Jacobian of the reduced-coordinate map F~ in X-space,
//   (b) the augmented Jacobian over the full simplex coordinates, with one
//       affine row per player,
//   (c) for potential games, the first/second-order degeneracy conditions on
//       the potential (gradient at excluded actions, Hessian on the carrier
//       face).
// Singularity is judged by the relative ratio sigma_min / sigma_max.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reggames/equilibrium.hpp"
#include "reggames/game.hpp"
#include "reggames/linalg.hpp"
#include "reggames/potential.hpp"

namespace reggames {

enum class RegularityVerdict {
  regular,
  first_order_degenerate,
  second_order_degenerate,
  not_equilibrium,
};

inline const char* to_string(RegularityVerdict v) {
  switch (v) {
    case RegularityVerdict::regular: return "regular";
    case RegularityVerdict::first_order_degenerate: return "first_order_degenerate";
    case RegularityVerdict::second_order_degenerate: return "second_order_degenerate";
    case RegularityVerdict::not_equilibrium: return "not_equilibrium";
  }
  return "unknown";
}

struct GradientWitness {
  int player;
  int action;       // excluded (non-carrier) action
  double gradient;  // U(action, x_{-i}) - U(ref_i, x_{-i})
};

struct RegularityCertificate {
  RegularityVerdict verdict = RegularityVerdict::not_equilibrium;
  Carrier carrier;
  Carrier extended_carrier;
  std::vector<GradientWitness> gradient_witnesses;
  double hessian_min_singular = 0.0;  // ratio; +inf for a pure carrier, NaN without potential
  double x_jacobian_min_singular = 0.0;
  double delta_jacobian_min_singular = 0.0;
  std::vector<int> reference_actions;
  double max_regret = 0.0;
  double tolerance = kIndifferenceTol;
  double singular_threshold = kSingularTolRel;
  bool borderline = false;       // some test landed inside the 10x guard band
  bool potential_based = false;  // first/second-order conditions were applicable
};

namespace detail {

// F~ components and their analytic Jacobians, with per-row coefficient
// vectors (player i's row block uses coeffs_for(i): own payoffs in general
// games, the shared potential in identical-payoff form).
struct FTildeContext {
  const GameSize& size;
  std::vector<SimplexStrategy> sigma;
  std::vector<std::vector<int>> orders;  // per player: reference-first action order
};

inline FTildeContext make_context(const GameSize& size, const Profile& x,
                                  const std::vector<int>& refs) {
  if (static_cast<int>(refs.size()) != size.players())
    throw std::invalid_argument("reference action list length");
  const Carrier carr = carrier_of(x);
  FTildeContext ctx{size, x.simplexes(), {}};
  ctx.orders.resize(size.players());
  for (int i = 0; i < size.players(); ++i) {
    const auto& sup = carr.support(i);
    if (std::find(sup.begin(), sup.end(), refs[i]) == sup.end())
      throw std::invalid_argument("reference action outside carrier");
    ctx.orders[i] = ref_first_order(size.actions(i), refs[i]);
  }
  return ctx;
}

}  // namespace detail

// F~ in X-space: component (i,k) equals sigma_i(ref) * sigma_i(a_k) *
// [U_i(a_k, x_{-i}) - U_i(ref, x_{-i})], rows ordered per player with the
// reference action first. Vanishes componentwise at equilibria.
inline std::vector<double> f_tilde_x(const Game& game, const Profile& x,
                                     const std::vector<int>& refs) {
  detail::FTildeContext ctx = detail::make_context(game.size(), x, refs);
  std::vector<double> out;
  for (int i = 0; i < game.size().players(); ++i) {
    const auto& o = ctx.orders[i];
    const double t1 = ctx.sigma[i].weight(o[0]);
    const double base = detail::pinned_value(game.size(), game.payoffs(i), ctx.sigma, {{i, o[0]}});
    for (int k = 1; k < game.size().actions(i); ++k) {
      const double g =
          detail::pinned_value(game.size(), game.payoffs(i), ctx.sigma, {{i, o[k]}}) - base;
      out.push_back(t1 * ctx.sigma[i].weight(o[k]) * g);
    }
  }
  return out;
}

inline std::vector<double> f_tilde_x(const GameSize& size, const std::vector<double>& potential,
                                     const Profile& x, const std::vector<int>& refs) {
  return f_tilde_x(associated_identical_game(potential, size), x, refs);
}

// Analytic Jacobian of f_tilde_x over the reduced coordinates (same
// reference-first ordering for rows and columns).
inline Mat jacobian_x(const Game& game, const Profile& x, const std::vector<int>& refs) {
  const GameSize& size = game.size();
  detail::FTildeContext ctx = detail::make_context(size, x, refs);
  int dim = 0;
  for (int i = 0; i < size.players(); ++i) dim += size.actions(i) - 1;
  Mat jac(dim, dim);
  int row = 0;
  for (int i = 0; i < size.players(); ++i) {
    const auto& oi = ctx.orders[i];
    const double t1 = ctx.sigma[i].weight(oi[0]);
    const std::vector<double>& coeffs = game.payoffs(i);
    const double base = detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[0]}});
    for (int k = 1; k < size.actions(i); ++k, ++row) {
      const double xk = ctx.sigma[i].weight(oi[k]);
      const double g = detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[k]}}) - base;
      int col = 0;
      for (int j = 0; j < size.players(); ++j) {
        const auto& oj = ctx.orders[j];
        for (int l = 1; l < size.actions(j); ++l, ++col) {
          if (j == i) {
            jac(row, col) = ((l == k ? t1 : 0.0) - xk) * g;
          } else {
            const double d4 =
                detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[k]}, {j, oj[l]}}) -
                detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[k]}, {j, oj[0]}}) -
                detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[0]}, {j, oj[l]}}) +
                detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[0]}, {j, oj[0]}});
            jac(row, col) = t1 * xk * d4;
          }
        }
      }
    }
  }
  return jac;
}

inline Mat jacobian_x(const GameSize& size, const std::vector<double>& potential, const Profile& x,
                      const std::vector<int>& refs) {
  return jacobian_x(associated_identical_game(potential, size), x, refs);
}

// Jacobian over the full simplex coordinates of the augmented system that
// prepends, per player, the affine row sum(sigma_i) - 1. Side sum(K_i); its
// invertibility matches jacobian_x at equilibria.
inline Mat jacobian_delta(const Game& game, const Profile& x, const std::vector<int>& refs) {
  const GameSize& size = game.size();
  detail::FTildeContext ctx = detail::make_context(size, x, refs);
  int dim = 0;
  for (int i = 0; i < size.players(); ++i) dim += size.actions(i);
  std::vector<int> offset(size.players(), 0);
  for (int i = 1; i < size.players(); ++i) offset[i] = offset[i - 1] + size.actions(i - 1);
  Mat jac(dim, dim);
  int row = 0;
  for (int i = 0; i < size.players(); ++i) {
    const auto& oi = ctx.orders[i];
    const std::vector<double>& coeffs = game.payoffs(i);
    // affine row: ones across player i's own columns
    for (int m = 0; m < size.actions(i); ++m) jac(row, offset[i] + m) = 1.0;
    ++row;
    const double s_ref = ctx.sigma[i].weight(oi[0]);
    const double base = detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[0]}});
    for (int k = 1; k < size.actions(i); ++k, ++row) {
      const double s_k = ctx.sigma[i].weight(oi[k]);
      const double g = detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[k]}}) - base;
      jac(row, offset[i] + 0) = s_k * g;
      jac(row, offset[i] + k) = s_ref * g;
      for (int j = 0; j < size.players(); ++j) {
        if (j == i) continue;
        const auto& oj = ctx.orders[j];
        for (int m = 0; m < size.actions(j); ++m) {
          const double dg =
              detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[k]}, {j, oj[m]}}) -
              detail::pinned_value(size, coeffs, ctx.sigma, {{i, oi[0]}, {j, oj[m]}});
          jac(row, offset[j] + m) = s_ref * s_k * dg;
        }
      }
    }
  }
  return jac;
}

inline Mat jacobian_delta(const GameSize& size, const std::vector<double>& potential,
                          const Profile& x, const std::vector<int>& refs) {
  return jacobian_delta(associated_identical_game(potential, size), x, refs);
}

struct FirstOrderResult {
  bool degenerate = false;
  std::vector<GradientWitness> witnesses;  // every excluded action, with its gradient
};

// First-order (quasi-strong) test. Runs both the gradient form (some excluded
// action has gradient within tol of zero) and the best-response-set form
// (pure best responses equal the carrier); the two must agree outside the
// guard band around tol.
inline FirstOrderResult first_order_check(const GameSize& size,
                                          const std::vector<double>& potential, const Profile& x,
                                          double tol = kIndifferenceTol) {
  const Carrier carr = carrier_of(x);
  const Game assoc = associated_identical_game(potential, size);
  FirstOrderResult out;
  bool near_band = false;
  for (int i = 0; i < size.players(); ++i) {
    const auto& sup = carr.support(i);
    const int ref = max_weight_action(x.simplex(i), sup);
    const double base = unilateral_value(assoc, i, ref, x);
    for (int a = 0; a < size.actions(i); ++a) {
      if (std::find(sup.begin(), sup.end(), a) != sup.end()) continue;
      const double g = unilateral_value(assoc, i, a, x) - base;
      out.witnesses.push_back({i, a, g});
      if (std::fabs(g) <= tol) out.degenerate = true;
      if (std::fabs(g) > tol / 10.0 && std::fabs(g) < tol * 10.0) near_band = true;
    }
  }
  bool quasi_strong = true;
  for (int i = 0; i < size.players(); ++i) {
    const BestResponseSet br = best_response_pure_set(assoc, i, x, tol);
    if (br.actions != carr.support(i)) quasi_strong = false;
    for (int a : carr.support(i)) {
      const double gap = br.value - unilateral_value(assoc, i, a, x);
      if (gap > tol / 10.0 && gap < tol * 10.0) near_band = true;
    }
  }
  if (quasi_strong == out.degenerate && !near_band)
    throw std::runtime_error(
        "first_order_check: gradient and best-response tests disagree outside the guard band");
  return out;
}

// Carrier plus every excluded action whose gradient component vanishes
// within tol.
inline Carrier extended_carrier(const GameSize& size, const std::vector<double>& potential,
                                const Profile& x, double tol = kIndifferenceTol) {
  const Carrier carr = carrier_of(x);
  FirstOrderResult fo = first_order_check(size, potential, x, tol);
  std::vector<std::vector<int>> supports = carr.supports();
  for (const auto& w : fo.witnesses)
    if (std::fabs(w.gradient) <= tol) supports[w.player].push_back(w.action);
  return Carrier(std::move(supports));
}

struct SecondOrderResult {
  bool degenerate = false;
  double min_singular = 0.0;  // sigma_min / sigma_max; +inf for a pure carrier
};

inline SecondOrderResult second_order_check(const GameSize& size,
                                            const std::vector<double>& potential, const Profile& x,
                                            double tol_rel = kSingularTolRel) {
  const Carrier carr = carrier_of(x);
  SecondOrderResult out;
  if (carr.free_dim() == 0) {
    out.min_singular = std::numeric_limits<double>::infinity();
    return out;  // vacuously non-degenerate
  }
  const Mat h = restricted_hessian(size, potential, x, carr);
  out.min_singular = min_singular_ratio(h);
  out.degenerate = out.min_singular < tol_rel;
  return out;
}

namespace detail {

inline bool in_guard_band(double value, double threshold) {
  return value > threshold / 10.0 && value < threshold * 10.0;
}

}  // namespace detail

// Full certification pipeline. Potential games (identical payoffs detected
// directly, otherwise via weighted-potential recovery) are judged by the
// first/second-order conditions on the potential, cross-checked against both
// direct Jacobian tests; games without potential structure are judged by the
// direct Jacobians alone, with the quasi-strong test splitting the degenerate
// label.
inline RegularityCertificate certify(const Game& game, const Profile& x,
                                     double tol = kIndifferenceTol) {
  RegularityCertificate cert;
  cert.tolerance = tol;
  cert.max_regret = verify_equilibrium(game, x);
  cert.carrier = carrier_of(x);
  cert.extended_carrier = cert.carrier;
  if (cert.max_regret > tol) {
    cert.verdict = RegularityVerdict::not_equilibrium;
    return cert;
  }
  const GameSize& size = game.size();

  std::optional<std::vector<double>> potential;
  if (game.identical_payoffs()) {
    potential = game.payoffs(0);
  } else if (auto dec = weighted_potential_of(game)) {
    potential = std::move(dec->potential);
  }
  cert.potential_based = potential.has_value();
  cert.reference_actions = default_reference_actions(x, cert.carrier);

  cert.x_jacobian_min_singular = min_singular_ratio(jacobian_x(game, x, cert.reference_actions));
  cert.delta_jacobian_min_singular =
      min_singular_ratio(jacobian_delta(game, x, cert.reference_actions));
  const bool jx_regular = cert.x_jacobian_min_singular >= cert.singular_threshold;
  const bool jd_regular = cert.delta_jacobian_min_singular >= cert.singular_threshold;

  bool witness_band = false;
  if (cert.potential_based) {
    const FirstOrderResult first = first_order_check(size, *potential, x, tol);
    const SecondOrderResult second = second_order_check(size, *potential, x, cert.singular_threshold);
    cert.gradient_witnesses = first.witnesses;
    cert.hessian_min_singular = second.min_singular;
    {
      std::vector<std::vector<int>> supports = cert.carrier.supports();
      for (const auto& w : first.witnesses)
        if (std::fabs(w.gradient) <= tol) supports[w.player].push_back(w.action);
      cert.extended_carrier = Carrier(std::move(supports));
    }
    if (first.degenerate)
      cert.verdict = RegularityVerdict::first_order_degenerate;
    else if (second.degenerate)
      cert.verdict = RegularityVerdict::second_order_degenerate;
    else
      cert.verdict = RegularityVerdict::regular;

    for (const auto& w : first.witnesses)
      witness_band = witness_band || detail::in_guard_band(std::fabs(w.gradient), tol);
    cert.borderline = witness_band ||
                      detail::in_guard_band(cert.x_jacobian_min_singular, cert.singular_threshold) ||
                      detail::in_guard_band(cert.delta_jacobian_min_singular, cert.singular_threshold) ||
                      (std::isfinite(cert.hessian_min_singular) &&
                       detail::in_guard_band(cert.hessian_min_singular, cert.singular_threshold));
    const bool conditions_regular = cert.verdict == RegularityVerdict::regular;
    if (!cert.borderline && !(conditions_regular == jx_regular && jx_regular == jd_regular))
      throw std::runtime_error("certify: Jacobian and degeneracy tests disagree outside the guard band");
  } else {
    // no potential structure: the direct Jacobian decides; the quasi-strong
    // test (per-player own payoffs) distinguishes the degenerate labels
    cert.hessian_min_singular = std::numeric_limits<double>::quiet_NaN();
    bool quasi_strong = true;
    for (int i = 0; i < size.players(); ++i) {
      const auto& sup = cert.carrier.support(i);
      const int ref = max_weight_action(x.simplex(i), sup);
      const double base = unilateral_value(game, i, ref, x);
      for (int a = 0; a < size.actions(i); ++a) {
        if (std::find(sup.begin(), sup.end(), a) != sup.end()) continue;
        const double g = unilateral_value(game, i, a, x) - base;
        cert.gradient_witnesses.push_back({i, a, g});
        if (std::fabs(g) <= tol) quasi_strong = false;
        witness_band = witness_band || detail::in_guard_band(std::fabs(g), tol);
      }
    }
    {
      std::vector<std::vector<int>> supports = cert.carrier.supports();
      for (const auto& w : cert.gradient_witnesses)
        if (std::fabs(w.gradient) <= tol) supports[w.player].push_back(w.action);
      cert.extended_carrier = Carrier(std::move(supports));
    }
    cert.borderline = witness_band ||
                      detail::in_guard_band(cert.x_jacobian_min_singular, cert.singular_threshold) ||
                      detail::in_guard_band(cert.delta_jacobian_min_singular, cert.singular_threshold);
    if (!cert.borderline && jx_regular != jd_regular)
      throw std::runtime_error("certify: X and simplex Jacobian tests disagree outside the guard band");
    if (jx_regular)
      cert.verdict = RegularityVerdict::regular;
    else if (!quasi_strong)
      cert.verdict = RegularityVerdict::first_order_degenerate;
    else
      cert.verdict = RegularityVerdict::second_order_degenerate;
  }
  return cert;
}

}  // namespace reggames
