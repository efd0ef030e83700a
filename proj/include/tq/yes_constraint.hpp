#ifndef TQ_YES_CONSTRAINT_HPP
#define TQ_YES_CONSTRAINT_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include "tq/core.hpp"

namespace tq {

struct AugmentResult {
  CodeTree tree;
  double added_cost;    // total probability of extended leaves
  std::size_t swaps;    // sibling interchanges
  std::vector<std::size_t> extended;  // objects that received an appended branch
};

namespace detail {

struct Augmenter {
  const CodeTree& src;
  const Distribution& dist;
  std::size_t swaps = 0;
  double added = 0.0;
  std::vector<std::size_t> extended;

  CodeTree leaf_on(std::size_t object, bool via_one) {
    auto leaf = CodeTree::leaf(object);
    if (via_one) return leaf;
    extended.push_back(object);
    added += dist.prob(object);
    return CodeTree::internal(std::nullopt, std::move(leaf));
  }

  CodeTree child(CodeTree::NodeId id, bool via_one) {
    const auto& n = src.node(id);
    if (n.is_leaf()) return leaf_on(*n.object, via_one);
    return visit(id);
  }

  CodeTree visit(CodeTree::NodeId id) {
    const auto& n = src.node(id);
    CodeTree::NodeId zero = *n.zero;
    CodeTree::NodeId one = *n.one;
    const auto& z = src.node(zero);
    const auto& o = src.node(one);
    if (z.is_leaf() && o.is_leaf()) {
      // The cheaper sibling takes the appended branch.
      if (dist.prob(*z.object) > dist.prob(*o.object)) {
        std::swap(zero, one);
        ++swaps;
      }
    } else if (z.is_leaf()) {
      std::swap(zero, one);
      ++swaps;
    }
    auto zero_tree = child(zero, false);
    auto one_tree = child(one, true);
    return CodeTree::internal(std::move(zero_tree), std::move(one_tree));
  }
};

}  // namespace detail

/**
   Turns a full binary tree into a yes-tree.

   Siblings are interchanged so that, at every node with two leaf children,
   the less probable leaf sits on the 0 side, and at every node with exactly
   one leaf child the leaf sits on the 1 side. Every leaf still entered by a
   0-edge then gets an appended unary node whose 1-edge leads to it. At most
   one leaf per sibling pair is extended, and it carries no more than half of
   the pair's mass, so the average depth grows by at most 1/2 for n >= 2.

   A lone root leaf (n = 1) is given the single question "1"; that costs a
   full extra question and is outside the half-bit guarantee.
 */
inline AugmentResult augment(const CodeTree& tree, const Distribution& dist) {
  if (!is_full_binary(tree))
    throw Error(ErrorCode::NotFullBinary, "augment expects a tree without unary nodes");
  tree.validate(dist.size());

  detail::Augmenter a{tree, dist};
  const auto& root = tree.node(tree.root());
  CodeTree out = root.is_leaf()
                     ? CodeTree::internal(std::nullopt, CodeTree::leaf(*root.object))
                     : a.visit(tree.root());
  if (root.is_leaf()) {
    a.added = dist.prob(*root.object);
    a.extended.push_back(*root.object);
  }
  return AugmentResult{std::move(out), a.added, a.swaps, std::move(a.extended)};
}

/**
   Reassigns objects to the same leaf positions so that the most probable
   object gets the shallowest leaf. Leaves of equal depth are filled in
   preorder and objects of equal probability in index order, which makes
   the operation idempotent.
 */
inline CodeTree relabel_optimally(const CodeTree& tree, const Distribution& dist) {
  tree.validate(dist.size());
  auto leaves = tree.leaves();
  std::vector<std::size_t> slots(leaves.size());
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  std::stable_sort(slots.begin(), slots.end(),
                   [&](auto a, auto b) { return leaves[a].depth < leaves[b].depth; });
  const auto order = dist.sorted_order();

  // mapping[old object] = new object
  std::vector<std::size_t> mapping(dist.size());
  for (std::size_t k = 0; k < slots.size(); ++k) mapping[leaves[slots[k]].object] = order[k];
  return tree.relabeled(mapping);
}

}  // namespace tq

#endif  // TQ_YES_CONSTRAINT_HPP
