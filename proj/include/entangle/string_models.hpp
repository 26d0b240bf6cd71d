#pragma once

// Breakable-string models of contextual correlations.
//
// Measurements A and B pull on the observer's end of a string and read the
// collected length (long means longer than L/2); A' and B' read the string's
// color without pulling. Variants:
//
//   v1             one white string
//   v1_pre_broken  one white string, already cut at a uniform point
//   v2             one string, white with probability p_w
//   v3             like v2, but A and B report the length-color parity:
//                  long-white or short-black is +
//   v4             two strings with independent colors; each observer picks
//                  string 1 with probability p_1, then measures as in v3
//
// Each variant comes with a closed-form table and a mechanism-level sampler.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entangle/prob_core.hpp"
#include "entangle/rng.hpp"

namespace entangle {

enum class Variant { v1, v1_pre_broken, v2, v3, v4 };
enum class Color { white, black };

std::string_view variant_name(Variant v);
/// Accepts "v1", "v1-prebroken" (or "v1_pre_broken", "prebroken"), "v2", "v3", "v4".
Variant parse_variant(std::string_view name);

class StringModelConfig {
 public:
  /// p_w is ignored (forced to 1) for v1 and v1_pre_broken; p_1 is used by v4
  /// only. Throws std::domain_error on probabilities outside [0, 1] and
  /// std::invalid_argument on a non-positive or non-finite length.
  explicit StringModelConfig(Variant variant, double p_w = 1.0, double p_1 = 0.5, double length = 1.0);

  Variant variant() const { return variant_; }
  /// Effective white probability: always 1 for the white-string variants.
  double p_w() const { return p_w_.value(); }
  double p_b() const { return 1.0 - p_w_.value(); }
  double p_1() const { return p_1_.value(); }
  double p_2() const { return 1.0 - p_1_.value(); }
  double length() const { return length_; }
  std::size_t string_count() const { return variant_ == Variant::v4 ? 2 : 1; }

 private:
  Variant variant_;
  Probability p_w_;
  Probability p_1_;
  double length_;
};

/// All latent randomness of one trial, drawn before the measurement is
/// resolved. Fields a variant does not use are ignored.
struct TrialDraws {
  std::array<Color, 2> colors{Color::white, Color::white};
  /// 0 = string 1, 1 = string 2 (v4 only).
  int alice_string = 0;
  int bob_string = 0;
  /// Alice's share L_A / L of each string, used when that string breaks
  /// (jointly pulled, or pre-cut in v1_pre_broken).
  std::array<double, 2> break_points{0.5, 0.5};
};

struct StringTrace {
  Color color = Color::white;
  bool pulled_by_alice = false;
  bool pulled_by_bob = false;
  /// L_A / L. Present iff someone pulled the string (or it was pre-cut):
  /// 1 when Alice pulled alone, 0 when Bob pulled alone.
  std::optional<double> break_fraction;
  /// True iff the break point came from a random draw.
  bool break_drawn = false;
  std::optional<double> alice_length;  // L_A
  std::optional<double> bob_length;    // L_B = L - L_A
};

struct MicroTrace {
  Setting setting;
  double length = 1.0;
  std::vector<StringTrace> strings;
  std::optional<std::array<int, 2>> selections;  // (alice, bob), v4 only
  bool pre_broken = false;
};

struct TrialResult {
  OutcomePair outcome;
  MicroTrace trace;
};

/// Closed-form joint probabilities of each variant.
ExperimentTable analytic_table(const StringModelConfig& config);

/// Draws the latent variables for one trial in a fixed order: colors of
/// every string, the two v4 selections, then one break point per string.
TrialDraws draw_latents(const StringModelConfig& config, Stream& stream);

/// Deterministically applies the measurement procedure of `setting` to the
/// given latent draws. A break point of exactly 1/2 counts as long for Alice.
TrialResult resolve_trial(const StringModelConfig& config, Setting setting, const TrialDraws& draws);

TrialResult sample_trial(const StringModelConfig& config, Setting setting, Stream& stream);

using SettingCounts = std::array<std::array<unsigned long long, 4>, 4>;

struct EstimateResult {
  ExperimentTable table;
  SettingCounts counts;  // counts[setting.index()][outcome.index()]
  unsigned long long trials_per_setting;
};

/// Runs `trials_per_setting` trials of each setting; trial t of setting s
/// uses Stream::derived(master_seed, s, t). The result does not depend on
/// `workers`. Throws std::invalid_argument if trials_per_setting == 0.
EstimateResult estimate_table(const StringModelConfig& config, unsigned long long trials_per_setting,
                              std::uint64_t master_seed, unsigned workers = 1);

/// Replays trial `trial_index` of `setting` exactly as estimate_table runs
/// it, with the full trace.
TrialResult trace_trial(const StringModelConfig& config, Setting setting, std::uint64_t master_seed,
                        unsigned long long trial_index);

// ---------------------------------------------------------------------------
// Local hidden-variable baseline: outcomes are fixed by lambda before the
// choice of setting (correlations already present before measurement).

struct LhvStrategy {
  std::vector<double> weights;                  // distribution over lambda
  std::vector<std::array<Outcome, 2>> alice;    // alice[lambda][0 = A, 1 = A']
  std::vector<std::array<Outcome, 2>> bob;      // bob[lambda][0 = B, 1 = B']

  /// Throws std::invalid_argument on empty or inconsistent sizes, negative
  /// weights or weights not summing to 1.
  void validate() const;
};

/// Exact enumeration over lambda.
ExperimentTable lhv_baseline_table(const LhvStrategy& strategy);

/// Samples lambda per trial from the weights; trial t of setting s uses
/// Stream::derived(master_seed, s, t).
EstimateResult lhv_sampled_table(const LhvStrategy& strategy, unsigned long long trials_per_setting,
                                 std::uint64_t master_seed);

/// The pre-cut white string as an LHV strategy: lambda = 0 when the cut
/// leaves Alice the long fragment, lambda = 1 otherwise, each with weight 1/2.
LhvStrategy pre_broken_string_strategy();

/// Uniformly random deterministic outcome functions over `size` lambda
/// values with normalized uniform(0,1) weights.
LhvStrategy random_lhv_strategy(std::size_t size, Stream& stream);

}  // namespace entangle
