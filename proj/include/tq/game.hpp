#ifndef TQ_GAME_HPP
#define TQ_GAME_HPP

#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tq/core.hpp"
#include "tq/entropy.hpp"
#include "tq/optimal_search.hpp"

namespace tq {

enum class Reply { Yes, No };

inline std::string_view to_string(Reply r) { return r == Reply::Yes ? "yes" : "no"; }

struct Active {};
struct Won {
  std::size_t object;
  std::string label;
  std::size_t question_count;
};
struct Inconsistent {};

using GameState = std::variant<Active, Won, Inconsistent>;

struct Question {
  std::string text;
  std::vector<std::string> candidates;  // every label under the 1-edge
};

struct TranscriptEntry {
  Question question;
  Reply answer;
};

inline constexpr std::size_t kQuestionLabelLimit = 5;

/// 128 random bits as 32 lowercase hex digits.
template <class Rng>
std::string make_session_id(Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> bits;
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(bits(rng)),
                static_cast<unsigned long long>(bits(rng)));
  return buf;
}

inline std::string make_session_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  return make_session_id(rng);
}

/**
   A Twenty Questions game over a yes-tree. Sessions are values: answer()
   returns the next session and leaves the input untouched.
 */
class GameSession {
 public:
  GameSession(std::string id, CodeTree tree, Distribution dist)
      : id_(std::move(id)), tree_(std::move(tree)), dist_(std::move(dist)), current_(tree_.root()) {
    tree_.validate(dist_.size());
    if (!is_yes_tree(tree_))
      throw Error(ErrorCode::InvalidTree, "games are played on yes-trees only");
  }

  const std::string& id() const noexcept { return id_; }
  const CodeTree& tree() const noexcept { return tree_; }
  const Distribution& dist() const noexcept { return dist_; }
  CodeTree::NodeId current() const noexcept { return current_; }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }
  const GameState& state() const noexcept { return state_; }

  bool active() const noexcept { return std::holds_alternative<Active>(state_); }
  bool won() const noexcept { return std::holds_alternative<Won>(state_); }
  bool inconsistent() const noexcept { return std::holds_alternative<Inconsistent>(state_); }

  std::size_t question_count() const noexcept { return transcript_.size(); }

  /// Question at the current node; empty once the game is over.
  std::optional<Question> question() const {
    if (!active()) return std::nullopt;
    return question_at(current_);
  }

  friend GameSession answer(const GameSession& session, Reply reply);

 private:
  Question question_at(CodeTree::NodeId id) const {
    const auto& n = tree_.node(id);
    Question q;
    if (!n.one) {
      q.text = "Is your object one of {}?";
      return q;
    }
    const auto& yes = tree_.node(*n.one);
    auto objects = tree_.objects_under(*n.one);
    std::sort(objects.begin(), objects.end());
    for (auto obj : objects) q.candidates.push_back(dist_.label(obj));
    if (yes.is_leaf()) {
      q.text = "Is it " + q.candidates.front() + "?";
      return q;
    }
    q.text = "Is your object one of {";
    for (std::size_t i = 0; i < q.candidates.size() && i < kQuestionLabelLimit; ++i) {
      if (i) q.text += ", ";
      q.text += q.candidates[i];
    }
    if (q.candidates.size() > kQuestionLabelLimit) q.text += ", …";
    q.text += "}?";
    return q;
  }

  std::string id_;
  CodeTree tree_;
  Distribution dist_;
  CodeTree::NodeId current_;
  std::vector<TranscriptEntry> transcript_;
  GameState state_ = Active{};
};

/// New game on the optimal yes-tree for `dist`.
inline GameSession start_session(const Distribution& dist, std::string id = make_session_id()) {
  return GameSession(std::move(id), optimal_yes_tree(dist).tree, dist);
}

/**
   Advances the walk: yes follows the 1-edge, no the 0-edge. Reaching a
   leaf wins; answering against a missing branch (no at a unary node)
   makes the session Inconsistent.
 */
inline GameSession answer(const GameSession& session, Reply reply) {
  if (!session.active())
    throw Error(ErrorCode::SessionFinished, "session " + session.id_ + " is finished");
  GameSession next = session;
  const auto& n = next.tree_.node(next.current_);
  next.transcript_.push_back(TranscriptEntry{next.question_at(next.current_), reply});
  const auto child = reply == Reply::Yes ? n.one : n.zero;
  if (!child) {
    next.state_ = Inconsistent{};
    return next;
  }
  next.current_ = *child;
  const auto& c = next.tree_.node(*child);
  if (c.is_leaf())
    next.state_ = Won{*c.object, next.dist_.label(*c.object), next.transcript_.size()};
  return next;
}

struct ExpectedQuestions {
  double l_yes;
  std::optional<double> entropy;  // with H + 1, absent for n = 1
  std::optional<double> upper;
};

inline ExpectedQuestions expected_questions(const GameSession& session) {
  ExpectedQuestions e{average_depth(session.tree(), session.dist()), std::nullopt, std::nullopt};
  if (session.dist().size() >= 2) {
    e.entropy = entropy(session.dist());
    e.upper = *e.entropy + 1.0;
  }
  return e;
}

}  // namespace tq

#endif  // TQ_GAME_HPP
