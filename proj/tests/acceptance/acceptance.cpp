// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tq/analysis.hpp"
#include "tq/game.hpp"
#include "tq/huffman.hpp"
#include "tq/io.hpp"
#include "tq/optimal_search.hpp"
#include "tq/yes_constraint.hpp"

namespace {

using namespace tq;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(const char* name, double budget_secs, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_secs > 0 && secs >= budget_secs)
    o.require(false, "runtime " + std::to_string(secs) + " s over budget");
  if (!o.pass) ++failures;
  std::printf("%s  %-22s %8.3f s%s%s\n", o.pass ? "PASS" : "FAIL", name, secs,
              o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Dirichlet(1) corpus, 1000 per n in 2..10, one fixed seed.
const std::vector<Distribution>& corpus() {
  static const std::vector<Distribution> dists = [] {
    std::mt19937_64 rng(20240501);
    std::vector<Distribution> out;
    for (std::size_t n = 2; n <= 10; ++n)
      for (int i = 0; i < 1000; ++i) out.push_back(random_distribution(n, rng));
    return out;
  }();
  return dists;
}

Outcome bar_bet_reproduction() {
  Outcome o;
  const auto d = barbet_distribution();
  const auto b = bar_bet(d);
  o.require(std::abs(b.q1 - 2.3) <= 1e-12, "Q1 = " + fmt(b.q1));
  o.require(std::abs(b.q2 - 2.4) <= 1e-12, "Q2 = " + fmt(b.q2));
  o.require(std::abs((b.q2 - b.q1) - 0.1) <= 1e-12, "Q2 - Q1 = " + fmt(b.q2 - b.q1));
  o.require(std::abs(b.gap - 0.1) <= 1e-12, "p1 - p4 = " + fmt(b.gap));
  o.require(b.huffman_balanced, "Huffman tree is not balanced");
  const auto opt = optimal_yes_tree(d);
  o.require(opt.profile.depths == std::vector<int>{1, 2, 3, 4},
            "optimal profile " + to_string(opt.profile));
  o.require(std::abs(opt.l_yes - 2.3) <= 1e-12, "L_yes = " + fmt(opt.l_yes));
  o.require(is_yes_tree(opt.tree), "optimal tree is not a yes-tree");
  return o;
}

Outcome gap_identity() {
  Outcome o;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000 && o.pass; ++i) {
    const auto d = random_distribution(4, rng).sorted();
    const auto p = d.sorted_probs();
    const auto q1 = average_depth(build_tree_from_profile(DepthProfile{{1, 2, 3, 4}}), d);
    const auto q2 = 2.0 + p[2] + p[3];
    const double lhs = q2 - q1, rhs = p[0] - p[3];
    o.require(std::abs(lhs - rhs) <= 1e-12, "sample " + std::to_string(i) + ": " + fmt(lhs) +
                                                " vs " + fmt(rhs));
    const bool uniform = std::abs(p[0] - p[3]) <= 1e-12;
    o.require((std::abs(lhs) <= 1e-12) == uniform, "equality without uniformity at " +
                                                       std::to_string(i));
  }
  const auto u = bar_bet(Distribution::from_probs({0.25, 0.25, 0.25, 0.25}));
  o.require(std::abs(u.q2 - u.q1) <= 1e-12, "uniform gap " + fmt(u.q2 - u.q1));
  return o;
}

Outcome max_gap_limit() {
  Outcome o;
  const std::vector<double> eps{0.08, 0.05, 0.01, 0.001};
  const auto rows = max_gap_sweep(eps);
  for (const auto& r : rows) {
    const double expect = 1.0 / 3.0 - 4.0 * r.epsilon;
    o.require(std::abs((r.q2 - r.q1) - expect) <= 1e-12,
              "eps " + fmt(r.epsilon) + ": Q2 - Q1 = " + fmt(r.q2 - r.q1));
    o.require(std::abs(r.gap - expect) <= 1e-12, "eps " + fmt(r.epsilon) + ": gap " + fmt(r.gap));
    o.require(r.huffman_balanced, "Huffman unbalanced at eps " + fmt(r.epsilon));
  }
  const double limit = extrapolate_gap_limit(rows);
  o.require(std::abs(limit - 1.0 / 3.0) <= 1e-3, "extrapolated limit " + fmt(limit));
  return o;
}

Outcome theorem_corpus() {
  Outcome o;
  for (const auto& d : corpus()) {
    if (!o.pass) break;
    const double h = entropy(d);
    const double lh = average_depth(build_huffman(d), d);
    const double ly = optimal_yes_tree(d).l_yes;
    const std::string at = "n=" + std::to_string(d.size()) + " H=" + fmt(h) + " L_H=" + fmt(lh) +
                           " L_yes=" + fmt(ly);
    o.require(h <= lh + 1e-12, "H > L_H: " + at);
    o.require(ly - lh > kStrictMargin, "L_H < L_yes fails: " + at);
    o.require(h + 1.0 - ly > kStrictMargin, "L_yes < H + 1 fails: " + at);
  }
  return o;
}

Outcome augment_property() {
  Outcome o;
  for (const auto& d : corpus()) {
    if (!o.pass) break;
    const auto huff = build_huffman(d);
    const auto aug = augment(huff, d);
    const double lh = average_depth(huff, d);
    const double la = average_depth(aug.tree, d);
    const double ly = optimal_yes_tree(d).l_yes;
    const std::string at = "n=" + std::to_string(d.size()) + " L_H=" + fmt(lh) + " L_aug=" +
                           fmt(la) + " L_yes=" + fmt(ly);
    o.require(is_yes_tree(aug.tree), "augmented tree is not a yes-tree: " + at);
    o.require(la - lh <= 0.5 + 1e-9, "increase over 1/2: " + at);
    o.require(ly <= la + 1e-12, "L_yes > L_aug: " + at);
  }
  return o;
}

Outcome gallager_property() {
  Outcome o;
  const double sigma = gallager_sigma();
  const double direct = 1.0 - std::log2(std::exp(1.0)) + std::log2(std::log2(std::exp(1.0)));
  o.require(std::abs(sigma - direct) <= 1e-15, "sigma " + fmt(sigma));
  o.require(std::abs(sigma - 0.086) < 5e-4, "sigma " + fmt(sigma));
  for (const auto& d : corpus()) {
    if (!o.pass) break;
    const double redundancy = average_depth(build_huffman(d), d) - entropy(d);
    const double p1 = d.sorted_probs()[0];
    o.require(redundancy <= p1 + sigma + 1e-9,
              "n=" + std::to_string(d.size()) + " redundancy " + fmt(redundancy) + " p1 " + fmt(p1));
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  for (int i = 0; i < 500 && o.pass; ++i) {
    const auto d = random_distribution(size(rng), rng);
    const double fast = optimal_yes_tree(d).l_yes;
    const double slow = oracle_optimal(d);
    o.require(std::abs(fast - slow) <= 1e-9, "sample " + std::to_string(i) + " n=" +
                                                 std::to_string(d.size()) + ": " + fmt(fast) +
                                                 " vs oracle " + fmt(slow));
  }
  return o;
}

/// p1 uniform on [0.4, 0.95], remainder Dirichlet(1) scaled to 1 - p1;
/// redrawn until p1 is the largest mass.
Distribution skewed_distribution(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> top(0.4, 0.95);
  for (;;) {
    const double p1 = top(rng);
    auto rest = sample_dirichlet(n - 1, rng);
    bool ok = true;
    std::vector<double> probs{p1};
    for (double r : rest) {
      probs.push_back(r * (1.0 - p1));
      ok = ok && probs.back() <= p1;
    }
    if (ok) return Distribution::from_probs(normalize_probs(std::move(probs)));
  }
}

Outcome hat_tree_identity() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  for (int i = 0; i < 200 && o.pass; ++i) {
    const auto d = skewed_distribution(size(rng), rng);
    const auto hat = build_hat_tree(d);
    const double p1 = d.sorted_probs()[0];
    o.require(p1 >= 0.4, "p1 below 0.4");
    const double l_hat = average_depth(hat.tree, d);
    const double l_t2 = average_depth(hat.subtree.tree, hat.split.conditional);
    const double h = entropy(d);
    const double h2 = entropy(hat.split.conditional);
    const std::string at = "sample " + std::to_string(i) + " n=" + std::to_string(d.size());
    o.require(is_yes_tree(hat.tree), "hat tree not a yes-tree: " + at);
    o.require(std::abs(l_hat - (1.0 + (1.0 - p1) * l_t2)) <= 1e-12,
              "recursion: " + at + " " + fmt(l_hat) + " vs " + fmt(1.0 + (1.0 - p1) * l_t2));
    o.require(std::abs((l_hat - h) - (1.0 - binary_entropy(p1) + (1.0 - p1) * (l_t2 - h2))) <= 1e-9,
              "redundancy identity: " + at);
    o.require(l_hat - h <= 2.0 - (binary_entropy(p1) + p1) + 1e-9, "bound: " + at);
    o.require(optimal_yes_tree(d).l_yes <= l_hat + 1e-12, "L_yes > L_hat: " + at);
  }
  return o;
}

/// Answers truthfully for `object` until the game ends.
GameSession honest_play(GameSession s, std::size_t object) {
  while (s.active()) {
    const auto& n = s.tree().node(s.current());
    bool yes = false;
    if (n.one) {
      const auto under = s.tree().objects_under(*n.one);
      yes = std::find(under.begin(), under.end(), object) != under.end();
    }
    s = answer(s, yes ? Reply::Yes : Reply::No);
  }
  return s;
}

Outcome game_soundness() {
  Outcome o;
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<std::size_t> size(1, 10);
  std::vector<GameSession> sessions;
  for (int i = 0; i < 100 && o.pass; ++i) {
    const auto d = random_distribution(size(rng), rng);
    const auto s = start_session(d, "acceptance");
    const auto depths = object_depths(s.tree());
    for (std::size_t obj = 0; obj < d.size(); ++obj) {
      const auto end = honest_play(s, obj);
      const auto* w = std::get_if<Won>(&end.state());
      o.require(w && w->object == obj, "object not found, sample " + std::to_string(i));
      o.require(end.question_count() == static_cast<std::size_t>(depths[obj]),
                "question count differs from depth, sample " + std::to_string(i));
      o.require(!end.transcript().empty() && end.transcript().back().answer == Reply::Yes,
                "final answer not yes, sample " + std::to_string(i));
    }
    if (i < 5) sessions.push_back(s);
  }
  sessions.push_back(start_session(barbet_distribution(), "acceptance"));

  constexpr int kPlays = 100000;
  for (const auto& s : sessions) {
    if (!o.pass) break;
    const auto& d = s.dist();
    const auto depths = object_depths(s.tree());
    const double l_yes = average_depth(s.tree(), d);
    double var = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) var += d.prob(i) * std::pow(depths[i] - l_yes, 2);
    std::discrete_distribution<std::size_t> pick(d.probs().begin(), d.probs().end());
    double total = 0.0;
    for (int k = 0; k < kPlays; ++k) total += honest_play(s, pick(rng)).question_count();
    const double mean = total / kPlays;
    const double tol = 3.0 * std::sqrt(var) / std::sqrt(double(kPlays));
    o.require(std::abs(mean - l_yes) <= tol + 1e-12, "n=" + std::to_string(d.size()) + " mean " +
                                                         fmt(mean) + " vs L_yes " + fmt(l_yes));
  }
  return o;
}

}  // namespace

int main() {
  criterion("bar_bet", 1.0, bar_bet_reproduction);
  criterion("gap_identity", 5.0, gap_identity);
  criterion("max_gap_limit", 0, max_gap_limit);
  criterion("theorem_corpus", 120.0, theorem_corpus);
  criterion("augment_half_bit", 0, augment_property);
  criterion("huffman_redundancy", 0, gallager_property);
  criterion("oracle_equivalence", 60.0, oracle_equivalence);
  criterion("hat_tree_identity", 0, hat_tree_identity);
  criterion("game_soundness", 0, game_soundness);
  std::printf("%s: %d failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
