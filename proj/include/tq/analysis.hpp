#ifndef TQ_ANALYSIS_HPP
#define TQ_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "tq/core.hpp"
#include "tq/entropy.hpp"
#include "tq/huffman.hpp"
#include "tq/optimal_search.hpp"
#include "tq/yes_constraint.hpp"

namespace tq {

/// Margin separating a strict "<" from "<=" in floating point.
inline constexpr double kStrictMargin = 1e-12;

////////////////////////////////////////////////////////////////////////
// Four-object bar bet: unary {1,2,3,4} versus balanced {2,2,3,3}

struct BarBetResult {
  double q1;  // unary tree
  double q2;  // balanced tree
  double gap;  // p1 - p4
  bool huffman_balanced;
};

inline BarBetResult bar_bet(const Distribution& dist4) {
  if (dist4.size() != 4)
    throw Error(ErrorCode::WrongArity,
                "bar bet needs exactly 4 objects, got " + std::to_string(dist4.size()));
  const auto p = dist4.sorted_probs();
  BarBetResult r;
  r.q1 = 1.0 + p[1] + 2.0 * p[2] + 3.0 * p[3];
  r.q2 = 2.0 + p[2] + p[3];
  r.gap = p[0] - p[3];
  r.huffman_balanced = depth_multiset(build_huffman(dist4)) == std::vector<int>{2, 2, 2, 2};
  return r;
}

/// (1/3 - eps, 1/3 - eps, 1/3 - eps, 3 eps); sorted and positive for eps in (0, 1/12).
inline Distribution max_gap_family(double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 12.0))
    throw Error(ErrorCode::DomainError, "epsilon must lie in (0, 1/12)");
  const double a = 1.0 / 3.0 - eps;
  return Distribution::from_probs({a, a, a, 3.0 * eps});
}

struct GapRow {
  double epsilon;
  double gap;
  double q1;
  double q2;
  bool huffman_balanced;
};

inline std::vector<GapRow> max_gap_sweep(std::span<const double> epsilons) {
  std::vector<GapRow> rows;
  rows.reserve(epsilons.size());
  for (double eps : epsilons) {
    const auto r = bar_bet(max_gap_family(eps));
    rows.push_back(GapRow{eps, r.gap, r.q1, r.q2, r.huffman_balanced});
  }
  return rows;
}

/// Intercept at eps = 0 of the least-squares line through (epsilon, gap).
inline double extrapolate_gap_limit(std::span<const GapRow> rows) {
  if (rows.size() < 2)
    throw Error(ErrorCode::TooFewObjects, "need at least two sweep points to extrapolate");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    sx += r.epsilon;
    sy += r.gap;
    sxx += r.epsilon * r.epsilon;
    sxy += r.epsilon * r.gap;
  }
  const double m = static_cast<double>(rows.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return (sy - slope * sx) / m;
}

////////////////////////////////////////////////////////////////////////
// Entropy-bound report

struct BoundCheck {
  std::string name;
  std::string relation;  // e.g. "H <= L_H"
  double lhs;
  double rhs;
  bool holds;
};

struct AnalysisReport {
  std::size_t n = 0;
  double p1 = 0;
  double entropy_bits = 0;
  double l_huffman = 0;
  double l_augmented = 0;
  double l_augmented_relabeled = 0;
  double l_yes = 0;
  std::optional<double> l_hat;  // present when p1 >= 0.4
  double sigma = 0;
  double gallager_rhs = 0;
  DepthProfile optimal_profile;
  std::vector<BoundCheck> bounds;
  std::vector<std::string> notes;

  bool all_hold() const {
    for (const auto& b : bounds)
      if (!b.holds) return false;
    return true;
  }

  const BoundCheck* find(std::string_view name) const {
    for (const auto& b : bounds)
      if (b.name == name) return &b;
    return nullptr;
  }
};

namespace detail {

inline BoundCheck le(std::string name, std::string rel, double lhs, double rhs, double tol) {
  return BoundCheck{std::move(name), std::move(rel), lhs, rhs, lhs <= rhs + tol};
}

inline BoundCheck lt(std::string name, std::string rel, double lhs, double rhs) {
  return BoundCheck{std::move(name), std::move(rel), lhs, rhs, rhs - lhs > kStrictMargin};
}

}  // namespace detail

/**
   Computes H, L_H, L_aug, L_yes (and L-hat when p1 >= 0.4) and checks the
   chain H <= L_H < L_yes < H + 1 together with the half-bit augmentation
   bound, Gallager's redundancy bound and the induction-tree identities.
 */
inline AnalysisReport analyze(const Distribution& dist) {
  if (dist.size() < 2)
    throw Error(ErrorCode::TooFewObjects,
                "bound verification needs n >= 2 (with one object H = 0 and the single "
                "question makes L_yes = H + 1)");
  check_limit(dist.size());

  using detail::le;
  using detail::lt;
  AnalysisReport r;
  r.n = dist.size();
  r.p1 = dist.sorted_probs().front();
  r.entropy_bits = entropy(dist);

  const auto huffman = build_huffman(dist);
  r.l_huffman = average_depth(huffman, dist);
  const auto aug = augment(huffman, dist);
  r.l_augmented = average_depth(aug.tree, dist);
  r.l_augmented_relabeled = average_depth(relabel_optimally(aug.tree, dist), dist);
  const auto opt = optimal_yes_tree(dist);
  r.l_yes = opt.l_yes;
  r.optimal_profile = opt.profile;
  r.sigma = gallager_sigma();
  r.gallager_rhs = gallager_rhs(dist);

  const double h = r.entropy_bits;
  r.bounds.push_back(le("entropy_le_huffman", "H <= L_H", h, r.l_huffman, kProbTolerance));
  r.bounds.push_back(lt("huffman_lt_yes", "L_H < L_yes", r.l_huffman, r.l_yes));
  r.bounds.push_back(lt("yes_lt_entropy_plus_one", "L_yes < H + 1", r.l_yes, h + 1.0));
  r.bounds.push_back(lt("entropy_lt_yes", "H < L_yes", h, r.l_yes));
  r.bounds.push_back(le("half_bit", "L_aug <= L_H + 1/2", r.l_augmented, r.l_huffman + 0.5,
                        kProbTolerance));
  r.bounds.push_back(le("gallager", "L_H - H <= p1 + sigma", r.l_huffman - h, r.gallager_rhs,
                        kProbTolerance));
  r.bounds.push_back(le("yes_le_augmented", "L_yes <= L_aug", r.l_yes, r.l_augmented,
                        kProbTolerance));

  if (std::abs(r.l_huffman - h) <= kProbTolerance)
    r.notes.push_back("dyadic distribution: H = L_H");

  if (r.p1 < 0.4) {
    r.notes.push_back("p1 < 0.4: upper bound follows from Gallager plus the half-bit lemma");
    r.bounds.push_back(
        lt("huffman_half_lt_entropy_plus_one", "L_H + 1/2 < H + 1", r.l_huffman + 0.5, h + 1.0));
  } else {
    r.notes.push_back("p1 >= 0.4: upper bound follows from the induction tree");
    const auto hat = build_hat_tree(dist);
    // Both sides are evaluated on trees, independently of the closed forms.
    const double l_hat_tree = average_depth(hat.tree, dist);
    const double l_t2 = average_depth(hat.subtree.tree, hat.split.conditional);
    const double h_p1 = binary_entropy(r.p1);
    const double h_x2 = entropy(hat.split.conditional);
    r.l_hat = l_hat_tree;
    r.bounds.push_back(le("hat_recursion", "L_hat = 1 + (1 - p1) L(T2)",
                          std::abs(l_hat_tree - (1.0 + (1.0 - r.p1) * l_t2)), 0.0,
                          kStrictMargin));
    r.bounds.push_back(le("hat_identity", "L_hat - H = 1 - H(p1) + (1 - p1)(L(T2) - H(X2))",
                          std::abs((l_hat_tree - h) - (1.0 - h_p1 + (1.0 - r.p1) * (l_t2 - h_x2))),
                          0.0, kProbTolerance));
    r.bounds.push_back(le("hat_bound", "L_hat - H <= 2 - (H(p1) + p1)", l_hat_tree - h,
                          2.0 - (h_p1 + r.p1), kProbTolerance));
    r.bounds.push_back(le("yes_le_hat", "L_yes <= L_hat", r.l_yes, l_hat_tree, kProbTolerance));
  }
  return r;
}

}  // namespace tq

#endif  // TQ_ANALYSIS_HPP
