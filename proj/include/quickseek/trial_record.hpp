#pragma once

#include <cstdint>

namespace quickseek {

enum class Strategy { Single, LowComplexity, Optimal, MultiStage };

// Outcome of one simulated search.
struct TrialRecord {
  Strategy strategy = Strategy::Single;
  std::uint64_t tau0 = 0;      // scanning samples (total samples for Single)
  std::uint64_t tau1 = 0;      // refinement samples (0 for Single)
  std::uint64_t n_switches = 0;  // sequences/groups visited, >= 1
  bool claim_correct = false;
  bool truncated = false;
  std::uint64_t seed = 0;

  std::uint64_t total() const { return tau0 + tau1; }
};

constexpr std::uint64_t kDefaultSampleCap = 10'000'000;

const char* strategy_name(Strategy s);

}  // namespace quickseek
