#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "zasyn/model.hpp"
#include "zasyn/za_dfa.hpp"

namespace zasyn {

struct BlockingError : std::runtime_error {
  BlockingError(std::string msg, History h)
      : std::runtime_error(std::move(msg)), history(std::move(h)) {}
  History history;
};

struct Trace {
  std::vector<StateId> states;        // k + 1 entries
  std::vector<ObsId> observations;    // k entries, observations[i] made at states[i]
  std::vector<ActionId> actions;      // k entries
};

/// Resolves permissive choices; receives the history so far and the enabled
/// set (non-empty, ascending). Default picks uniformly at random.
using ActionPicker =
    std::function<ActionId(const History&, const std::vector<ActionId>&, std::mt19937_64&)>;

/// One regulated episode: sample z(i) from O(s(i), .), pick an enabled
/// a(i), advance the DFA and the transition kernel, for i = 0..k-1.
/// Throws BlockingError if no action is enabled before the horizon ends.
Trace simulate(const Pomdp& model, const ZaDfa& dfa, int k, std::uint64_t seed,
               const ActionPicker& picker = {});

/// Uniform double in [0, 1) derived from the generator; used everywhere in
/// place of std::uniform_real_distribution so runs are bit-reproducible.
double canonical_unit(std::mt19937_64& rng);

/// Samples an index from a probability row (cumulative scan).
int sample_index(const std::vector<double>& weights, std::mt19937_64& rng);

}  // namespace zasyn
