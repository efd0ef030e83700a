#ifndef TQ_HUFFMAN_HPP
#define TQ_HUFFMAN_HPP

#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>
#include <vector>

#include "tq/core.hpp"

namespace tq {

/// Gallager's redundancy constant 1 - log2(e) + log2(log2(e)), about 0.0861.
inline double gallager_sigma() {
  const double log2e = std::log2(std::exp(1.0));
  return 1.0 - log2e + std::log2(log2e);
}

/// Gallager's upper bound on Huffman redundancy: p1 + sigma.
inline double gallager_rhs(const Distribution& dist) {
  double p1 = 0.0;
  for (double p : dist.probs()) p1 = std::max(p1, p);
  return p1 + gallager_sigma();
}

/**
   Classical Huffman tree.

   Ties between equal weights go to the node created first: leaves in
   object-index order, then merged nodes in merge order. The first node
   popped in a merge becomes the zero-child. For n = 1 the tree is a
   lone root leaf at depth 0.
 */
inline CodeTree build_huffman(const Distribution& dist) {
  struct Entry {
    double weight;
    std::uint64_t created;
    std::size_t slot;
  };
  auto later = [](const Entry& a, const Entry& b) {
    return std::tie(a.weight, a.created) > std::tie(b.weight, b.created);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> queue(later);
  std::vector<CodeTree> pool;
  pool.reserve(2 * dist.size());

  std::uint64_t counter = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    pool.push_back(CodeTree::leaf(i));
    queue.push(Entry{dist.prob(i), counter++, pool.size() - 1});
  }
  while (queue.size() > 1) {
    const Entry a = queue.top();
    queue.pop();
    const Entry b = queue.top();
    queue.pop();
    pool.push_back(CodeTree::internal(pool[a.slot], pool[b.slot]));
    queue.push(Entry{a.weight + b.weight, counter++, pool.size() - 1});
  }
  return pool[queue.top().slot];
}

}  // namespace tq

#endif  // TQ_HUFFMAN_HPP
