#ifndef TQ_OPTIMAL_SEARCH_HPP
#define TQ_OPTIMAL_SEARCH_HPP

#include <algorithm>
#include <bitset>
#include <compare>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tq/core.hpp"
#include "tq/entropy.hpp"

namespace tq {

inline constexpr std::size_t kDefaultMaxObjects = 12;

/// Largest n the exact search accepts; `TQ_MAX_N` overrides the default of 12.
inline std::size_t max_objects() {
  if (const char* env = std::getenv("TQ_MAX_N")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxObjects;
}

inline void check_limit(std::size_t n) {
  const auto limit = max_objects();
  if (n > limit)
    throw Error(ErrorCode::LimitExceeded, "n = " + std::to_string(n) +
                                              " exceeds the exact-search limit of " +
                                              std::to_string(limit) + " (set TQ_MAX_N to raise it)");
}

/// Sorted multiset of leaf depths of a yes-tree shape.
struct DepthProfile {
  std::vector<int> depths;

  DepthProfile() = default;
  explicit DepthProfile(std::vector<int> d) : depths(std::move(d)) {
    std::sort(depths.begin(), depths.end());
  }

  std::size_t size() const noexcept { return depths.size(); }

  /// Sum of p_i * d_i with the largest probability on the smallest depth.
  double cost(std::span<const double> sorted_probs) const {
    double c = 0.0;
    for (std::size_t i = 0; i < depths.size(); ++i) c += sorted_probs[i] * depths[i];
    return c;
  }

  /// Element-wise <= and not equal.
  bool dominates(const DepthProfile& other) const {
    if (depths == other.depths || depths.size() != other.depths.size()) return false;
    for (std::size_t i = 0; i < depths.size(); ++i)
      if (depths[i] > other.depths[i]) return false;
    return true;
  }

  friend auto operator<=>(const DepthProfile&, const DepthProfile&) = default;
};

inline std::string to_string(const DepthProfile& p) {
  std::string s = "{";
  for (std::size_t i = 0; i < p.depths.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p.depths[i]);
  }
  return s + "}";
}

struct ProfileCatalog {
  std::size_t n = 0;
  std::vector<DepthProfile> profiles;  // ascending lexicographic order
  bool pareto_only = false;
};

namespace detail {

// How a profile splits at the root: `zero_count` objects below the 0-edge,
// the rest below the 1-edge. A one-side of a single object is a bare leaf.
struct Witness {
  std::size_t zero_count = 0;
  DepthProfile zero;
  DepthProfile one;
};

struct CatalogData {
  std::size_t n;
  bool pareto;
  std::map<DepthProfile, Witness> witnesses;
  std::vector<DepthProfile> ordered;
};

inline DepthProfile shifted(const DepthProfile& p) {
  DepthProfile out = p;
  for (int& d : out.depths) ++d;
  return out;
}

inline DepthProfile merged(const DepthProfile& a, const DepthProfile& b) {
  DepthProfile out;
  out.depths.resize(a.size() + b.size());
  std::merge(a.depths.begin(), a.depths.end(), b.depths.begin(), b.depths.end(),
             out.depths.begin());
  return out;
}

inline std::vector<DepthProfile> pareto_front(std::vector<DepthProfile> profiles) {
  std::vector<DepthProfile> keep;
  for (const auto& p : profiles) {
    bool dominated = std::any_of(profiles.begin(), profiles.end(),
                                 [&](const DepthProfile& q) { return q.dominates(p); });
    if (!dominated) keep.push_back(p);
  }
  return keep;
}

class CatalogCache {
 public:
  static CatalogCache& instance() {
    static CatalogCache cache;
    return cache;
  }

  std::shared_ptr<const CatalogData> get(std::size_t n, bool pareto) {
    std::lock_guard lock(mutex_);
    return get_locked(n, pareto);
  }

 private:
  std::shared_ptr<const CatalogData> get_locked(std::size_t n, bool pareto) {
    const auto key = std::make_pair(n, pareto);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    auto data = std::make_shared<CatalogData>();
    data->n = n;
    data->pareto = pareto;
    if (n == 1) {
      data->witnesses.emplace(DepthProfile({1}), Witness{0, {}, {}});
    } else {
      for (std::size_t k = 1; k < n; ++k) {
        const auto zeros = get_locked(k, pareto);
        const std::size_t rest = n - k;
        std::vector<DepthProfile> ones;
        std::shared_ptr<const CatalogData> one_cat;
        if (rest == 1) {
          ones.push_back(DepthProfile({0}));  // bare leaf, shifted to depth 1 below
        } else {
          one_cat = get_locked(rest, pareto);
          ones = one_cat->ordered;
        }
        for (const auto& z : zeros->ordered) {
          for (const auto& o : ones) {
            auto p = merged(shifted(z), shifted(o));
            Witness w{k, z, rest == 1 ? DepthProfile{} : o};
            data->witnesses.emplace(std::move(p), std::move(w));
          }
        }
      }
    }
    std::vector<DepthProfile> all;
    for (const auto& [p, w] : data->witnesses) all.push_back(p);
    if (pareto) {
      all = pareto_front(std::move(all));
      std::map<DepthProfile, Witness> kept;
      for (const auto& p : all) kept.emplace(p, data->witnesses.at(p));
      data->witnesses = std::move(kept);
    }
    data->ordered = std::move(all);
    memo_.emplace(key, data);
    return data;
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, bool>, std::shared_ptr<const CatalogData>> memo_;
};

// Shape only; leaf objects are placeholders renumbered by the caller.
inline CodeTree build_shape(const CatalogData& cat, const DepthProfile& profile) {
  const auto& w = cat.witnesses.at(profile);
  if (cat.n == 1) return CodeTree::internal(std::nullopt, CodeTree::leaf(0));
  const auto zero_cat = CatalogCache::instance().get(w.zero_count, cat.pareto);
  auto zero = build_shape(*zero_cat, w.zero);
  const std::size_t rest = cat.n - w.zero_count;
  if (rest == 1) return CodeTree::internal(std::move(zero), CodeTree::leaf(0));
  const auto one_cat = CatalogCache::instance().get(rest, cat.pareto);
  return CodeTree::internal(std::move(zero), build_shape(*one_cat, w.one));
}

// Numbers leaves 0..n-1 by (depth, preorder).
inline CodeTree number_by_depth(const CodeTree& shape) {
  auto leaves = shape.leaves();
  std::vector<std::size_t> slots(leaves.size());
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  std::stable_sort(slots.begin(), slots.end(),
                   [&](auto a, auto b) { return leaves[a].depth < leaves[b].depth; });
  // Placeholder objects are all 0, so rebuild via node ids.
  std::vector<std::size_t> rank(shape.node_count(), 0);
  for (std::size_t k = 0; k < slots.size(); ++k) rank[leaves[slots[k]].node] = k;

  struct Rebuild {
    const CodeTree& t;
    const std::vector<std::size_t>& rank;
    CodeTree operator()(CodeTree::NodeId id) const {
      const auto& n = t.node(id);
      if (n.is_leaf()) return CodeTree::leaf(rank[id]);
      std::optional<CodeTree> z, o;
      if (n.zero) z = (*this)(*n.zero);
      if (n.one) o = (*this)(*n.one);
      return CodeTree::internal(std::move(z), std::move(o));
    }
  };
  return Rebuild{shape, rank}(shape.root());
}

}  // namespace detail

/**
   Depth profiles of all contraction-minimal yes-trees with n leaves.

   A minimal yes-tree never has a unary node on a 1-edge or above an
   internal node, so its root splits the objects into k >= 1 below the
   0-edge (a minimal subtree, which for k = 1 is a unary node over a leaf)
   and n - k below the 1-edge (a bare leaf when n - k = 1, else a minimal
   subtree):

     Y(1) = {{1}}
     Y(n) = { (A+1) u (B+1) : A in Y(k), B in Y(n-k) or B = {0}, 1 <= k < n }

   With `pareto_only`, profiles element-wise dominated by another profile
   are dropped at every level; they can never be strictly cheaper.
 */
inline ProfileCatalog enumerate_profiles(std::size_t n, bool pareto_only = false) {
  if (n == 0) throw Error(ErrorCode::EmptyInput, "need at least one object");
  check_limit(n);
  auto data = detail::CatalogCache::instance().get(n, pareto_only);
  return ProfileCatalog{n, data->ordered, pareto_only};
}

/// A yes-tree with exactly these leaf depths; leaves are numbered 0..n-1 by depth.
inline CodeTree build_tree_from_profile(const DepthProfile& profile) {
  const auto n = profile.size();
  if (n == 0) throw Error(ErrorCode::UnrealizableProfile, "empty profile");
  check_limit(n);
  auto data = detail::CatalogCache::instance().get(n, false);
  if (!data->witnesses.count(profile))
    throw Error(ErrorCode::UnrealizableProfile,
                "no minimal yes-tree has depth profile " + to_string(profile));
  return detail::number_by_depth(detail::build_shape(*data, profile));
}

struct OptimalResult {
  CodeTree tree;  // objects placed most-probable-shallowest
  double l_yes;
  DepthProfile profile;
};

struct SearchOptions {
  bool pareto = true;
};

/**
   Minimum-average-depth yes-tree. Every catalog profile is priced with the
   sorted assignment; ties (within 1e-12) go to the lexicographically
   smallest profile.
 */
inline OptimalResult optimal_yes_tree(const Distribution& dist, SearchOptions opts = {}) {
  const auto n = dist.size();
  check_limit(n);
  const auto data = detail::CatalogCache::instance().get(n, opts.pareto);
  const auto sorted = dist.sorted_probs();

  const DepthProfile* best = nullptr;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& p : data->ordered) {  // lexicographic order, so first wins ties
    const double c = p.cost(sorted);
    if (c < best_cost - 1e-12) {
      best = &p;
      best_cost = c;
    }
  }
  auto numbered = detail::number_by_depth(detail::build_shape(*data, *best));
  const auto order = dist.sorted_order();
  auto tree = numbered.relabeled(order);
  const double l = average_depth(tree, dist);
  return OptimalResult{std::move(tree), l, *best};
}

/**
   Independent check on optimal_yes_tree(): enumerates every prefix-free set
   of n distinct codewords that end in 1 and have length <= max_len, and
   returns the cheapest sorted assignment. Any yes-tree can be contracted
   until no depth exceeds n (the unary chain is the deepest minimal shape),
   so max_len = n suffices.
 */
inline double oracle_optimal(const Distribution& dist, std::size_t max_len = 0) {
  constexpr std::size_t kMaxOracleN = 6;
  const std::size_t n = dist.size();
  if (max_len == 0) max_len = n;
  if (n > kMaxOracleN || max_len > kMaxOracleN)
    throw Error(ErrorCode::LimitExceeded, "oracle is limited to n, max_len <= 6");

  // Heap-indexed trie: node i has children 2i+1 (bit 0) and 2i+2 (bit 1).
  using Mask = std::bitset<128>;
  struct Word {
    std::size_t len;
    std::size_t node;
    Mask conflicts;  // itself, its ancestors and its descendants
  };
  std::vector<Word> words;
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
      if ((bits & 1) == 0) continue;  // last bit must be 1
      std::size_t node = 0;
      std::vector<std::size_t> path;
      for (std::size_t k = len; k-- > 0;) {
        node = 2 * node + 1 + ((bits >> k) & 1);
        path.push_back(node);
      }
      Mask m;
      for (auto a : path) m.set(a);
      std::vector<std::size_t> frontier{node};
      while (!frontier.empty()) {
        auto v = frontier.back();
        frontier.pop_back();
        m.set(v);
        if (2 * v + 2 < 128) {
          frontier.push_back(2 * v + 1);
          frontier.push_back(2 * v + 2);
        }
      }
      words.push_back(Word{len, node, m});
    }
  }

  struct Memo {
    std::mutex mutex;
    std::map<std::pair<std::size_t, std::size_t>, std::set<std::vector<int>>> sets;
  };
  static Memo memo;

  std::set<std::vector<int>> lengths;
  {
    std::lock_guard lock(memo.mutex);
    auto key = std::make_pair(n, max_len);
    if (auto it = memo.sets.find(key); it != memo.sets.end()) {
      lengths = it->second;
    } else {
      std::vector<int> chosen;
      auto rec = [&](auto&& self, std::size_t start, const Mask& blocked) -> void {
        if (chosen.size() == n) {
          auto s = chosen;
          std::sort(s.begin(), s.end());
          lengths.insert(std::move(s));
          return;
        }
        for (std::size_t i = start; i < words.size(); ++i) {
          // A word clashes with a chosen one iff it lies on that word's root
          // path or inside its subtree.
          if (blocked.test(words[i].node)) continue;
          chosen.push_back(static_cast<int>(words[i].len));
          self(self, i + 1, blocked | words[i].conflicts);
          chosen.pop_back();
        }
      };
      rec(rec, 0, Mask{});
      memo.sets.emplace(key, lengths);
    }
  }

  const auto sorted = dist.sorted_probs();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : lengths) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += sorted[i] * l[i];
    best = std::min(best, c);
  }
  return best;
}

struct HatTree {
  CodeTree tree;
  double l_hat;      // 1 + (1 - p1) * L(T2)
  double l_subtree;  // L(T2) under the conditional distribution
  GroupingSplit split;
  OptimalResult subtree;
};

/**
   Best yes-tree among those where the most probable object is asked first:
   codeword "1" for it, and an optimal yes-tree for the normalized remainder
   under the 0-edge.
 */
inline HatTree build_hat_tree(const Distribution& dist) {
  if (dist.size() < 2)
    throw Error(ErrorCode::TooFewObjects, "hat tree needs at least two objects");
  auto split = grouping_decompose(dist);
  auto sub = optimal_yes_tree(split.conditional);
  auto zero = sub.tree.relabeled(split.conditional_objects);
  auto tree = CodeTree::internal(std::move(zero), CodeTree::leaf(split.top_object));
  const double l_hat = 1.0 + (1.0 - split.p1) * sub.l_yes;
  const double l_sub = sub.l_yes;
  return HatTree{std::move(tree), l_hat, l_sub, std::move(split), std::move(sub)};
}

}  // namespace tq

#endif  // TQ_OPTIMAL_SEARCH_HPP
