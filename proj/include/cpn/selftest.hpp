#pragma once

#include <cstdint>
#include <random>

#include "cpn/textio.hpp"

// Randomized property suites, reachable both from the test binaries and from
// the hidden `cpn selftest` subcommand. Everything is seeded and
// deterministic; the reference token game below is written directly from the
// firing definition and shares no code with the engine.
namespace cpn::selftest {

inline constexpr std::uint64_t kDefaultSeed = 0x43504e5f53454c46ull;

struct SuiteReport {
  std::string name;
  long long cases = 0;
  long long failures = 0;
  std::vector<std::string> samples;  // first few failure descriptions

  bool ok() const { return failures == 0; }
};

// Small random net within the documented bounds: <= 6 positions,
// <= 6 transitions, multiplicities <= 2, markings <= 9.
PetriNet random_net(std::mt19937_64& rng);

std::vector<CreativeRule> random_rules(std::mt19937_64& rng, const PetriNet& net, int category);

// parse_net ∘ render_canonical restores the net; re-rendering is a fixpoint
// (rules included).
SuiteReport roundtrip_dsl(long long iterations, std::uint64_t seed = kDefaultSeed);

// rebuild ∘ defuse (full and partial) restores the net.
SuiteReport roundtrip_defusion(long long iterations, std::uint64_t seed = kDefaultSeed);

// Token accounting across creative phases: free phases preserve the total,
// resource-intensive phases satisfy total' = total - cost + init, release
// phases move tokens without creating any.
SuiteReport conservation(long long iterations, std::uint64_t seed = kDefaultSeed);

// One Greedy non-creative step against the reference token game: exhaustive
// over the small structure family, randomized over the <= 4 position /
// <= 3 transition domain with markings <= 5 and v=1, d=0.
SuiteReport firing_oracle(long long random_iterations, std::uint64_t seed = kDefaultSeed);

std::vector<SuiteReport> run_all(long long iterations, std::uint64_t seed = kDefaultSeed);

}  // namespace cpn::selftest
