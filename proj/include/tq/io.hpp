#ifndef TQ_IO_HPP
#define TQ_IO_HPP

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tq/analysis.hpp"
#include "tq/core.hpp"
#include "tq/game.hpp"

namespace tq {

using json = nlohmann::json;

////////////////////////////////////////////////////////////////////////
// Distribution files: {"labels": [...], "probs": [...]}

/// Parses and validates; `normalize` rescales probs to unit sum first.
inline Distribution distribution_from_json(const json& j, bool normalize = false) {
  if (!j.is_object() || !j.contains("probs") || !j["probs"].is_array())
    throw Error(ErrorCode::EmptyInput, "expected an object with a \"probs\" array");
  std::vector<double> probs;
  for (const auto& p : j["probs"]) {
    if (!p.is_number()) throw Error(ErrorCode::NonPositiveProb, "probabilities must be numbers");
    probs.push_back(p.get<double>());
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array())
      throw Error(ErrorCode::EmptyLabel, "\"labels\" must be an array of strings");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw Error(ErrorCode::EmptyLabel, "labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  } else {
    labels = default_labels(probs.size());
  }
  if (normalize) probs = normalize_probs(std::move(probs));
  return validate_distribution(std::move(labels), std::move(probs));
}

inline json to_json(const Distribution& d) {
  return json{{"labels", d.labels()},
              {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

/// The four-object example (0.3, 0.3, 0.2, 0.2).
inline Distribution barbet_distribution() {
  return validate_distribution({"x1", "x2", "x3", "x4"}, {0.3, 0.3, 0.2, 0.2});
}

inline std::optional<Distribution> preset(std::string_view name) {
  if (name == "barbet") return barbet_distribution();
  return std::nullopt;
}

////////////////////////////////////////////////////////////////////////
// Reports

inline json to_json(const AnalysisReport& r) {
  json bounds = json::array();
  json holds = json::object();
  for (const auto& b : r.bounds) {
    bounds.push_back({{"name", b.name}, {"relation", b.relation}, {"lhs", b.lhs},
                      {"rhs", b.rhs}, {"holds", b.holds}});
    holds[b.name] = b.holds;
  }
  json j{{"n", r.n},
         {"p1", r.p1},
         {"entropy_bits", r.entropy_bits},
         {"entropy", r.entropy_bits},
         {"l_huffman", r.l_huffman},
         {"l_augmented", r.l_augmented},
         {"l_augmented_relabeled", r.l_augmented_relabeled},
         {"l_yes", r.l_yes},
         {"l_hat", r.l_hat ? json(*r.l_hat) : json(nullptr)},
         {"sigma", r.sigma},
         {"gallager_rhs", r.gallager_rhs},
         {"optimal_profile", r.optimal_profile.depths},
         {"bounds_hold", holds},
         {"all_hold", r.all_hold()},
         {"bounds", bounds},
         {"notes", r.notes}};
  return j;
}

inline std::string to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "objects            " << r.n << "\n";
  os << "p1                 " << r.p1 << "\n";
  os << "H(X)               " << r.entropy_bits << "\n";
  os << "L_H   (Huffman)    " << r.l_huffman << "\n";
  os << "L_aug (augmented)  " << r.l_augmented << "\n";
  os << "L_aug (relabeled)  " << r.l_augmented_relabeled << "\n";
  os << "L_yes (optimal)    " << r.l_yes << "  profile " << to_string(r.optimal_profile) << "\n";
  if (r.l_hat) os << "L_hat (p1 first)   " << *r.l_hat << "\n";
  os << "p1 + sigma         " << r.gallager_rhs << "\n";
  os << "bounds:\n";
  for (const auto& b : r.bounds)
    os << "  [" << (b.holds ? "ok" : "FAIL") << "] " << b.relation << "  (" << b.lhs << " vs "
       << b.rhs << ")\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

inline std::string sweep_csv(std::span<const GapRow> rows) {
  std::ostringstream os;
  os.precision(12);
  os << "epsilon,gap,q1,q2,huffman_balanced\n";
  for (const auto& r : rows)
    os << r.epsilon << "," << r.gap << "," << r.q1 << "," << r.q2 << ","
       << (r.huffman_balanced ? "true" : "false") << "\n";
  return os.str();
}

////////////////////////////////////////////////////////////////////////
// Game sessions

inline json to_json(const Question& q) {
  return json{{"text", q.text}, {"candidates", q.candidates}};
}

/// Session state as served by the HTTP API. Field order is stable.
inline json to_json(const GameSession& s) {
  json transcript = json::array();
  for (const auto& t : s.transcript())
    transcript.push_back({{"question", t.question.text},
                          {"candidates", t.question.candidates},
                          {"answer", std::string(to_string(t.answer))}});
  const auto e = expected_questions(s);
  json j;
  j["id"] = s.id();
  j["state"] = s.active() ? "active" : s.won() ? "won" : "inconsistent";
  if (auto q = s.question()) {
    j["question"] = q->text;
    j["question_number"] = s.question_count() + 1;
  }
  j["question_count"] = s.question_count();
  j["transcript"] = std::move(transcript);
  j["expected_questions"] = e.l_yes;
  j["entropy"] = e.entropy ? json(*e.entropy) : json(nullptr);
  j["entropy_plus_one"] = e.upper ? json(*e.upper) : json(nullptr);
  if (const auto* w = std::get_if<Won>(&s.state())) {
    j["won_object"] = w->label;
    j["final_answer"] = "yes";
  }
  return j;
}

////////////////////////////////////////////////////////////////////////
// Random corpora

/// Dirichlet(1, ..., 1): normalized unit exponentials.
template <class Rng>
std::vector<double> sample_dirichlet(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    do x = exp1(rng);
    while (x <= 0.0);
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return v;
}

template <class Rng>
Distribution random_distribution(std::size_t n, Rng& rng) {
  return Distribution::from_probs(sample_dirichlet(n, rng));
}

}  // namespace tq

#endif  // TQ_IO_HPP
