#ifndef TQ_CLI_HPP
#define TQ_CLI_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tq/analysis.hpp"
#include "tq/game.hpp"
#include "tq/io.hpp"
#include "tq/server.hpp"

namespace tq::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kAssertionFailure = 2 };

namespace detail {

struct InputNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Distribution load(const std::string& path, bool normalize) {
  if (!std::filesystem::exists(path)) throw InputNotFound("input not found: " + path);
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::EmptyInput, path + ": " + e.what());
  }
  return distribution_from_json(j, normalize);
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline json tree_json(const CodeTree& tree, const Distribution& dist) {
  const auto words = codewords(tree);
  json rows = json::array();
  for (std::size_t i = 0; i < dist.size(); ++i)
    rows.push_back({{"label", dist.label(i)},
                    {"prob", dist.prob(i)},
                    {"codeword", words[i]},
                    {"depth", words[i].size()}});
  return json{{"codewords", rows},
              {"average_depth", average_depth(tree, dist)},
              {"yes_tree", is_yes_tree(tree)}};
}

inline std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw Error(ErrorCode::DomainError, "cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct BoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_bounds(const AnalysisReport& r, const Distribution& dist) {
  if (r.all_hold()) return;
  std::string failed;
  for (const auto& b : r.bounds)
    if (!b.holds) failed += (failed.empty() ? "" : "; ") + b.relation;
  throw BoundViolation("bound violated (" + failed + ") for distribution " + to_json(dist).dump());
}

}  // namespace detail

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

/**
   Runs one `tq` subcommand. Exit codes: 0 success, 1 validation error,
   2 when an entropy/lemma inequality fails (the counterexample is printed).
 */
inline int run(std::vector<std::string> args, Streams io) {
  CLI::App app{"Twenty Questions toolkit: prefix codes whose codewords all end in 1", "tq"};
  app.require_subcommand(1);

  bool normalize = false;
  std::string input, dot_path, format = "text", sweep_list, dist_path, static_dir, host = "127.0.0.1";
  bool relabel = false;
  int port = 8080;
  std::size_t random_count = 1000, objects = 4, threads = 0;
  std::uint64_t seed = 1;

  auto* analyze_cmd = app.add_subcommand("analyze", "entropy bounds report for a distribution");
  analyze_cmd->add_option("dist", input, "distribution JSON file")->required();
  analyze_cmd->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  analyze_cmd->add_flag("--normalize", normalize, "rescale probabilities to sum to 1");

  auto* huffman_cmd = app.add_subcommand("huffman", "Huffman codewords");
  huffman_cmd->add_option("dist", input)->required();
  huffman_cmd->add_option("--dot", dot_path, "write Graphviz DOT here");
  huffman_cmd->add_flag("--normalize", normalize);

  auto* optimal_cmd = app.add_subcommand("optimal", "optimal tree whose codewords all end in 1");
  optimal_cmd->add_option("dist", input)->required();
  optimal_cmd->add_option("--dot", dot_path);
  optimal_cmd->add_flag("--normalize", normalize);

  auto* augment_cmd = app.add_subcommand("augment", "Huffman tree with appended 1-branches");
  augment_cmd->add_option("dist", input)->required();
  augment_cmd->add_flag("--relabel", relabel, "then move probable objects to shallow leaves");
  augment_cmd->add_option("--dot", dot_path);
  augment_cmd->add_flag("--normalize", normalize);

  auto* barbet_cmd = app.add_subcommand("barbet", "unary versus balanced four-object trees");
  barbet_cmd->add_option("--sweep", sweep_list, "epsilons for (1/3-e, 1/3-e, 1/3-e, 3e)");
  barbet_cmd->add_option("--dist", dist_path, "four-object distribution (default 0.3,0.3,0.2,0.2)");

  auto* play_cmd = app.add_subcommand("play", "play Twenty Questions in the terminal");
  play_cmd->add_option("dist", input)->required();
  play_cmd->add_flag("--normalize", normalize);

  auto* serve_cmd = app.add_subcommand("serve", "HTTP JSON API and web UI");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--dist", dist_path, "default distribution for new sessions");
  serve_cmd->add_option("--static", static_dir, "directory served at /");

  auto* sweep_cmd = app.add_subcommand("sweep", "verify the bounds on random distributions");
  sweep_cmd->add_option("--random", random_count, "number of distributions")->required();
  sweep_cmd->add_option("--n", objects, "objects per distribution")->required();
  sweep_cmd->add_option("--seed", seed);
  sweep_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, io.out, io.err);
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (*analyze_cmd) {
      const auto dist = detail::load(input, normalize);
      const auto report = analyze(dist);
      if (format == "json") io.out << to_json(report).dump(2) << "\n";
      else io.out << to_text(report);
      detail::require_bounds(report, dist);
    } else if (*huffman_cmd) {
      const auto dist = detail::load(input, normalize);
      const auto tree = build_huffman(dist);
      auto j = detail::tree_json(tree, dist);
      j["gallager_rhs"] = gallager_rhs(dist);
      j["entropy"] = entropy(dist);
      io.out << j.dump(2) << "\n";
      if (!dot_path.empty()) detail::write_file(dot_path, to_dot(tree, &dist, "huffman"));
    } else if (*optimal_cmd) {
      const auto dist = detail::load(input, normalize);
      const auto opt = optimal_yes_tree(dist);
      auto j = detail::tree_json(opt.tree, dist);
      j["profile"] = opt.profile.depths;
      j["l_yes"] = opt.l_yes;
      io.out << j.dump(2) << "\n";
      if (!dot_path.empty()) detail::write_file(dot_path, to_dot(opt.tree, &dist, "optimal"));
    } else if (*augment_cmd) {
      const auto dist = detail::load(input, normalize);
      const auto huff = build_huffman(dist);
      const auto aug = augment(huff, dist);
      const auto tree = relabel ? relabel_optimally(aug.tree, dist) : aug.tree;
      auto j = detail::tree_json(tree, dist);
      j["l_huffman"] = average_depth(huff, dist);
      j["added_cost"] = aug.added_cost;
      j["swaps"] = aug.swaps;
      j["relabeled"] = relabel;
      io.out << j.dump(2) << "\n";
      if (!dot_path.empty()) detail::write_file(dot_path, to_dot(tree, &dist, "augmented"));
    } else if (*barbet_cmd) {
      if (!sweep_list.empty()) {
        const auto eps = detail::parse_list(sweep_list);
        io.out << sweep_csv(max_gap_sweep(eps));
      } else {
        const auto dist = dist_path.empty() ? barbet_distribution() : detail::load(dist_path, false);
        const auto r = bar_bet(dist);
        const auto opt = optimal_yes_tree(dist);
        io.out << json{{"q1_unary", r.q1},
                       {"q2_balanced", r.q2},
                       {"gap", r.gap},
                       {"huffman_balanced", r.huffman_balanced},
                       {"optimal_profile", opt.profile.depths},
                       {"l_yes", opt.l_yes}}
                      .dump(2)
               << "\n";
      }
    } else if (*play_cmd) {
      const auto dist = detail::load(input, normalize);
      auto session = start_session(dist);
      const auto e = expected_questions(session);
      io.out << "Think of one of: ";
      for (std::size_t i = 0; i < dist.size(); ++i) io.out << (i ? ", " : "") << dist.label(i);
      io.out << "\nExpected questions: " << e.l_yes;
      if (e.entropy) io.out << "  (H = " << *e.entropy << ", H + 1 = " << *e.upper << ")";
      io.out << "\n";
      while (session.active()) {
        io.out << "Q" << session.question_count() + 1 << ": " << session.question()->text
               << " [y/n] " << std::flush;
        std::string line;
        if (!std::getline(io.in, line)) {
          io.err << "error: input ended before the game finished\n";
          return kValidationError;
        }
        std::transform(line.begin(), line.end(), line.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (line == "y" || line == "yes") session = answer(session, Reply::Yes);
        else if (line == "n" || line == "no") session = answer(session, Reply::No);
        else io.out << "Please answer y or n.\n";
      }
      if (const auto* w = std::get_if<Won>(&session.state()))
        io.out << w->label << " in " << w->question_count
               << " questions, final answer: Yes!\n";
      else
        io.out << "Inconsistent answers: that question could only be answered yes.\n";
    } else if (*serve_cmd) {
      ServerConfig config;
      if (!dist_path.empty()) config.default_dist = detail::load(dist_path, false);
      config.static_dir = static_dir;
      config.session_ttl = session_ttl_from_env();
      ApiServer server(std::move(config));
      io.err << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        io.err << "error: cannot listen on " << host << ":" << port << "\n";
        return kValidationError;
      }
    } else if (*sweep_cmd) {
      if (objects < 2) throw Error(ErrorCode::TooFewObjects, "sweep needs --n >= 2");
      check_limit(objects);
      std::mt19937_64 rng(seed);
      std::vector<Distribution> corpus;
      corpus.reserve(random_count);
      for (std::size_t i = 0; i < random_count; ++i) corpus.push_back(random_distribution(objects, rng));

      std::vector<std::optional<AnalysisReport>> reports(corpus.size());
      const std::size_t workers =
          std::max<std::size_t>(1, threads ? threads : std::thread::hardware_concurrency());
      {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
          pool.emplace_back([&, w] {
            for (std::size_t i = w; i < corpus.size(); i += workers) reports[i] = analyze(corpus[i]);
          });
      }
      io.out.precision(12);
      io.out << "index,n,entropy,l_huffman,l_augmented,l_yes,all_hold\n";
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& r = *reports[i];
        io.out << i << "," << r.n << "," << r.entropy_bits << "," << r.l_huffman << ","
               << r.l_augmented << "," << r.l_yes << "," << (r.all_hold() ? "true" : "false")
               << "\n";
      }
      for (std::size_t i = 0; i < corpus.size(); ++i) detail::require_bounds(*reports[i], corpus[i]);
    }
  } catch (const detail::InputNotFound& e) {
    io.err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const Error& e) {
    io.err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kValidationError;
  } catch (const detail::BoundViolation& e) {
    io.err << "error: " << e.what() << "\n";
    return kAssertionFailure;
  } catch (const std::exception& e) {
    io.err << "error: internal: " << e.what() << "\n";
    return kAssertionFailure;
  }
  return kOk;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), Streams{std::cin, std::cout, std::cerr});
}

}  // namespace tq::cli

#endif  // TQ_CLI_HPP
