#ifndef TQ_ENTROPY_HPP
#define TQ_ENTROPY_HPP

#include <cmath>
#include <vector>

#include "tq/core.hpp"

namespace tq {

// All logarithms are base 2, with 0 * log 0 taken as 0.

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

/// Shannon entropy in bits.
inline double entropy(const Distribution& dist) {
  double h = 0.0;
  for (double p : dist.probs()) h -= plogp(p);
  return h;
}

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::DomainError, "binary entropy needs p in [0, 1]");
  return -plogp(p) - plogp(1.0 - p);
}

/// The most probable object split off from the normalized remainder.
struct GroupingSplit {
  double p1;
  std::size_t top_object;  // index of p1's object in the source distribution
  Distribution conditional;
  std::vector<std::size_t> conditional_objects;  // source index of each conditional entry
};

/**
   Splits X into the event "X is the most probable object" and the
   remainder X2 = (p2, ..., pn) / (1 - p1), so that
   H(X) = H(p1) + (1 - p1) H(X2). Works on the sorted view of `dist`,
   so the remainder is itself in descending order.
 */
inline GroupingSplit grouping_decompose(const Distribution& dist) {
  if (dist.size() < 2)
    throw Error(ErrorCode::TooFewObjects, "grouping split needs at least two objects");
  const auto order = dist.sorted_order();
  const double p1 = dist.prob(order[0]);
  const double rest = 1.0 - p1;
  if (!(rest > 0.0)) throw Error(ErrorCode::DegenerateP1, "p1 = 1 leaves no remainder");

  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<std::size_t> objects;
  for (std::size_t k = 1; k < order.size(); ++k) {
    labels.push_back(dist.label(order[k]));
    probs.push_back(dist.prob(order[k]) / rest);
    objects.push_back(order[k]);
  }
  return GroupingSplit{p1, order[0], validate_distribution(std::move(labels), std::move(probs)),
                       std::move(objects)};
}

}  // namespace tq

#endif  // TQ_ENTROPY_HPP
