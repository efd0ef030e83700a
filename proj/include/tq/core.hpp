#ifndef TQ_CORE_HPP
#define TQ_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tq {

/// Tolerance used for every probability equality check.
inline constexpr double kProbTolerance = 1e-9;

enum class ErrorCode {
  EmptyInput,
  NonPositiveProb,
  SumNotOne,
  DuplicateLabel,
  EmptyLabel,
  DimensionMismatch,
  InvalidTree,
  DomainError,
  TooFewObjects,
  DegenerateP1,
  NotFullBinary,
  LimitExceeded,
  UnrealizableProfile,
  WrongArity,
  SessionFinished,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveProb: return "NonPositiveProb";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EmptyLabel: return "EmptyLabel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidTree: return "InvalidTree";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::TooFewObjects: return "TooFewObjects";
    case ErrorCode::DegenerateP1: return "DegenerateP1";
    case ErrorCode::NotFullBinary: return "NotFullBinary";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::UnrealizableProfile: return "UnrealizableProfile";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::SessionFinished: return "SessionFinished";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

////////////////////////////////////////////////////////////////////////
// Distribution

/**
   A labeled probability vector over n objects.

   Only constructible through validate_distribution() (or the from_probs()
   helper, which validates too), so every instance satisfies: n >= 1, all
   probabilities positive, sum within kProbTolerance of 1, labels non-empty
   and distinct.
 */
class Distribution {
 public:
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double prob(std::size_t i) const { return probs_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  /// Object indices ordered by descending probability; ties keep index order.
  std::vector<std::size_t> sorted_order() const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [this](auto a, auto b) {
      return probs_[a] > probs_[b];
    });
    return order;
  }

  /// Probabilities in descending order (p1 >= p2 >= ... >= pn).
  std::vector<double> sorted_probs() const {
    std::vector<double> out;
    out.reserve(size());
    for (auto i : sorted_order()) out.push_back(probs_[i]);
    return out;
  }

  /// Copy of this distribution with objects reordered by descending probability.
  Distribution sorted() const {
    Distribution d;
    for (auto i : sorted_order()) {
      d.labels_.push_back(labels_[i]);
      d.probs_.push_back(probs_[i]);
    }
    return d;
  }

  bool is_sorted_descending() const {
    return std::is_sorted(probs_.begin(), probs_.end(), std::greater<>{});
  }

  /// Distribution with labels "x1".."xn".
  static Distribution from_probs(std::vector<double> probs);

  friend Distribution validate_distribution(std::vector<std::string> labels,
                                            std::vector<double> probs);

 private:
  Distribution() = default;

  std::vector<std::string> labels_;
  std::vector<double> probs_;
};

/// Validates without renormalizing. See normalize_probs() for the opt-in rescale.
inline Distribution validate_distribution(std::vector<std::string> labels,
                                          std::vector<double> probs) {
  if (probs.empty() || labels.empty())
    throw Error(ErrorCode::EmptyInput, "distribution has no objects");
  if (labels.size() != probs.size())
    throw Error(ErrorCode::DimensionMismatch,
                "got " + std::to_string(labels.size()) + " labels but " +
                    std::to_string(probs.size()) + " probabilities");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw Error(ErrorCode::EmptyLabel, "labels must be non-empty");
    if (!seen.insert(l).second)
      throw Error(ErrorCode::DuplicateLabel, "duplicate label '" + l + "'");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0) || !std::isfinite(probs[i]))
      throw Error(ErrorCode::NonPositiveProb,
                  "probability of '" + labels[i] + "' must be positive");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum << ", expected 1";
    throw Error(ErrorCode::SumNotOne, os.str());
  }
  Distribution d;
  d.labels_ = std::move(labels);
  d.probs_ = std::move(probs);
  return d;
}

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i + 1));
  return labels;
}

inline Distribution Distribution::from_probs(std::vector<double> probs) {
  auto labels = default_labels(probs.size());
  return validate_distribution(std::move(labels), std::move(probs));
}

/// Rescales to unit sum. Non-positive entries are left alone so validation still rejects them.
inline std::vector<double> normalize_probs(std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (sum > 0.0)
    for (double& p : probs) p /= sum;
  return probs;
}

////////////////////////////////////////////////////////////////////////
// CodeTree

/**
   Binary questioning tree. Edges to the zero-child carry bit 0 ("no"),
   edges to the one-child carry bit 1 ("yes"). Leaves hold object indices.

   Stored as a flat node array; the value is immutable once built and cheap
   to copy for the tree sizes involved here.
 */
class CodeTree {
 public:
  using NodeId = std::size_t;

  struct Node {
    std::optional<std::size_t> object;  // set iff leaf
    std::optional<NodeId> zero;
    std::optional<NodeId> one;

    bool is_leaf() const noexcept { return object.has_value(); }
    int child_count() const noexcept { return int(zero.has_value()) + int(one.has_value()); }
  };

  struct LeafInfo {
    NodeId node;
    std::size_t object;
    std::size_t depth;
    std::string codeword;
  };

  static CodeTree leaf(std::size_t object) {
    CodeTree t;
    t.nodes_.push_back(Node{object, std::nullopt, std::nullopt});
    t.root_ = 0;
    return t;
  }

  static CodeTree internal(std::optional<CodeTree> zero, std::optional<CodeTree> one) {
    if (!zero && !one)
      throw Error(ErrorCode::InvalidTree, "internal node needs at least one child");
    CodeTree t;
    Node n;
    if (zero) n.zero = t.graft(*zero);
    if (one) n.one = t.graft(*one);
    t.nodes_.push_back(n);
    t.root_ = t.nodes_.size() - 1;
    return t;
  }

  NodeId root() const noexcept { return root_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
  }

  /// Leaves in preorder (zero side before one side).
  std::vector<LeafInfo> leaves() const {
    std::vector<LeafInfo> out;
    std::string path;
    collect(root_, path, out);
    return out;
  }

  /// Subtree rooted at `id` as a standalone tree.
  CodeTree subtree(NodeId id) const {
    const Node& n = node(id);
    if (n.is_leaf()) return leaf(*n.object);
    std::optional<CodeTree> z, o;
    if (n.zero) z = subtree(*n.zero);
    if (n.one) o = subtree(*n.one);
    return internal(std::move(z), std::move(o));
  }

  /// Objects under node `id`, in preorder.
  std::vector<std::size_t> objects_under(NodeId id) const {
    std::vector<std::size_t> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      const Node& n = node(stack.back());
      stack.pop_back();
      if (n.is_leaf()) {
        out.push_back(*n.object);
        continue;
      }
      if (n.one) stack.push_back(*n.one);
      if (n.zero) stack.push_back(*n.zero);
    }
    return out;
  }

  /// Same shape, object at each leaf replaced by mapping[object].
  CodeTree relabeled(std::span<const std::size_t> mapping) const {
    CodeTree t = *this;
    for (auto& n : t.nodes_)
      if (n.is_leaf()) n.object = mapping[*n.object];
    return t;
  }

  /// Throws InvalidTree unless the leaf objects are a permutation of 0..n-1.
  void validate(std::size_t n) const {
    std::vector<bool> seen(n, false);
    std::size_t leaves = 0;
    for (const auto& node : nodes_) {
      if (!node.is_leaf()) {
        if (node.child_count() == 0)
          throw Error(ErrorCode::InvalidTree, "internal node without children");
        continue;
      }
      ++leaves;
      if (*node.object >= n || seen[*node.object])
        throw Error(ErrorCode::InvalidTree, "leaf objects are not a permutation");
      seen[*node.object] = true;
    }
    if (leaves != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "tree has " + std::to_string(leaves) + " leaves, expected " + std::to_string(n));
  }

  friend bool operator==(const CodeTree& a, const CodeTree& b) {
    return same_shape(a, a.root_, b, b.root_);
  }

 private:
  CodeTree() = default;

  NodeId graft(const CodeTree& other) {
    const std::size_t offset = nodes_.size();
    for (Node n : other.nodes_) {
      if (n.zero) *n.zero += offset;
      if (n.one) *n.one += offset;
      nodes_.push_back(n);
    }
    return other.root_ + offset;
  }

  void collect(NodeId id, std::string& path, std::vector<LeafInfo>& out) const {
    const Node& n = nodes_[id];
    if (n.is_leaf()) {
      out.push_back(LeafInfo{id, *n.object, path.size(), path});
      return;
    }
    if (n.zero) {
      path.push_back('0');
      collect(*n.zero, path, out);
      path.pop_back();
    }
    if (n.one) {
      path.push_back('1');
      collect(*n.one, path, out);
      path.pop_back();
    }
  }

  static bool same_shape(const CodeTree& a, NodeId ia, const CodeTree& b, NodeId ib) {
    const Node& x = a.nodes_[ia];
    const Node& y = b.nodes_[ib];
    if (x.object != y.object) return false;
    if (x.zero.has_value() != y.zero.has_value() || x.one.has_value() != y.one.has_value())
      return false;
    if (x.zero && !same_shape(a, *x.zero, b, *y.zero)) return false;
    if (x.one && !same_shape(a, *x.one, b, *y.one)) return false;
    return true;
  }

  std::vector<Node> nodes_;
  NodeId root_ = 0;
};

/// Codeword of every object, indexed by object.
inline std::vector<std::string> codewords(const CodeTree& tree) {
  auto leaves = tree.leaves();
  std::vector<std::string> out(leaves.size());
  for (auto& l : leaves) out.at(l.object) = std::move(l.codeword);
  return out;
}

/// Leaf depth (question count) of every object, indexed by object.
inline std::vector<std::size_t> object_depths(const CodeTree& tree) {
  auto leaves = tree.leaves();
  std::vector<std::size_t> out(leaves.size());
  for (const auto& l : leaves) out.at(l.object) = l.depth;
  return out;
}

/// Sorted multiset of leaf depths.
inline std::vector<int> depth_multiset(const CodeTree& tree) {
  std::vector<int> out;
  for (const auto& l : tree.leaves()) out.push_back(static_cast<int>(l.depth));
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff every leaf is entered through a 1-edge. A lone root leaf has no edge and fails.
inline bool is_yes_tree(const CodeTree& tree) {
  for (const auto& l : tree.leaves())
    if (l.codeword.empty() || l.codeword.back() != '1') return false;
  return true;
}

/// True iff every internal node has two children.
inline bool is_full_binary(const CodeTree& tree) {
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    const auto& n = tree.node(i);
    if (!n.is_leaf() && n.child_count() != 2) return false;
  }
  return true;
}

inline bool is_prefix_free(std::span<const std::string> words) {
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < words.size(); ++j)
      if (i != j && words[j].size() >= words[i].size() &&
          words[j].compare(0, words[i].size(), words[i]) == 0)
        return false;
  return true;
}

/// Expected number of questions: sum of p_i * depth_i.
inline double average_depth(const CodeTree& tree, const Distribution& dist) {
  const auto leaves = tree.leaves();
  if (leaves.size() != dist.size())
    throw Error(ErrorCode::DimensionMismatch,
                "tree has " + std::to_string(leaves.size()) + " leaves but distribution has " +
                    std::to_string(dist.size()) + " objects");
  double sum = 0.0;
  for (const auto& l : leaves) {
    if (l.object >= dist.size())
      throw Error(ErrorCode::DimensionMismatch, "leaf object index out of range");
    sum += dist.prob(l.object) * static_cast<double>(l.depth);
  }
  return sum;
}

namespace detail {

inline CodeTree prune_from(const CodeTree& t, CodeTree::NodeId id) {
  const auto& n = t.node(id);
  if (n.is_leaf()) return CodeTree::leaf(*n.object);
  if (n.child_count() == 1) return prune_from(t, n.zero ? *n.zero : *n.one);
  return CodeTree::internal(prune_from(t, *n.zero), prune_from(t, *n.one));
}

}  // namespace detail

/// Contracts every unary node into its only child; the result is full binary.
inline CodeTree prune_appended(const CodeTree& tree) {
  return detail::prune_from(tree, tree.root());
}

////////////////////////////////////////////////////////////////////////
// Graphviz export

namespace detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/**
   Graphviz DOT rendering. Edges are labeled "0"/"1"; the edge below a
   unary node (an appended branch) is dashed. Leaf labels come from `dist`
   when given, otherwise the object index.
 */
inline std::string to_dot(const CodeTree& tree, const Distribution* dist = nullptr,
                          std::string_view name = "tree") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  os << "  node [shape=circle, label=\"\"];\n";
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    const auto& n = tree.node(i);
    if (!n.is_leaf()) continue;
    std::string label = dist ? dist->label(*n.object) : std::to_string(*n.object);
    os << "  n" << i << " [shape=box, label=\"" << detail::dot_escape(label) << "\"];\n";
  }
  std::vector<CodeTree::NodeId> stack{tree.root()};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const auto& n = tree.node(id);
    if (n.is_leaf()) continue;
    const bool unary = n.child_count() == 1;
    auto edge = [&](CodeTree::NodeId child, char bit) {
      os << "  n" << id << " -> n" << child << " [label=\"" << bit << "\"";
      if (unary) os << ", style=dashed";
      os << "];\n";
    };
    if (n.zero) edge(*n.zero, '0');
    if (n.one) edge(*n.one, '1');
    if (n.one) stack.push_back(*n.one);
    if (n.zero) stack.push_back(*n.zero);
  }
  os << "}\n";
  return os.str();
}

}  // namespace tq

#endif  // TQ_CORE_HPP
