// Prints the four-object comparison and the optimal trees for a few inputs.
#include <cstdio>

#include "tq/analysis.hpp"
#include "tq/io.hpp"

int main() {
  const auto dist = tq::barbet_distribution();
  const auto r = tq::bar_bet(dist);
  std::printf("unary %.3f  balanced %.3f  gap %.3f  huffman balanced: %s\n", r.q1, r.q2, r.gap,
              r.huffman_balanced ? "yes" : "no");

  for (const auto& probs : {std::vector<double>{0.3, 0.3, 0.2, 0.2},
                            std::vector<double>{0.5, 0.25, 0.25},
                            std::vector<double>{0.9, 0.1}}) {
    const auto d = tq::Distribution::from_probs(probs);
    const auto report = tq::analyze(d);
    std::printf("H %.4f  L_H %.4f  L_yes %.4f  H+1 %.4f  profile %s\n", report.entropy_bits,
                report.l_huffman, report.l_yes, report.entropy_bits + 1,
                tq::to_string(report.optimal_profile).c_str());
  }
}
