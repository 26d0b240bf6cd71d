#include "entangle/string_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "entangle/parallel.hpp"

namespace entangle {

namespace {

bool is_white_string_variant(Variant v) { return v == Variant::v1 || v == Variant::v1_pre_broken; }
bool uses_parity(Variant v) { return v == Variant::v3 || v == Variant::v4; }

struct Resolution {
  OutcomePair outcome;
  int alice_string;
  int bob_string;
  double alice_share;  // Alice's L_A / L on her string
  double bob_share;    // Bob's L_B / L on his string
};

Resolution resolve(const StringModelConfig& config, Setting setting, const TrialDraws& draws) {
  const Variant v = config.variant();
  const bool alice_pulls = setting.alice == AliceSetting::a;
  const bool bob_pulls = setting.bob == BobSetting::b;
  const int sa = v == Variant::v4 ? draws.alice_string : 0;
  const int sb = v == Variant::v4 ? draws.bob_string : 0;

  // Fragment shares. A string pulled from one end only is collected whole.
  double alice_share = 1.0;
  double bob_share = 1.0;
  if (v == Variant::v1_pre_broken) {
    alice_share = draws.break_points[0];
    bob_share = 1.0 - draws.break_points[0];
  } else if (alice_pulls && bob_pulls && sa == sb) {
    alice_share = draws.break_points[static_cast<std::size_t>(sa)];
    bob_share = 1.0 - alice_share;
  }
  // Break exactly at 1/2: Alice long, Bob short.
  const bool alice_long = alice_share >= 0.5;
  const bool bob_long = bob_share > 0.5;

  auto color_of = [&](int s) {
    return is_white_string_variant(v) ? Color::white : draws.colors[static_cast<std::size_t>(s)];
  };
  const bool alice_white = color_of(sa) == Color::white;
  const bool bob_white = color_of(sb) == Color::white;

  auto length_outcome = [&](bool is_long, bool white) {
    const bool plus = uses_parity(v) ? (is_long == white) : is_long;
    return plus ? Outcome::plus : Outcome::minus;
  };
  auto color_outcome = [](bool white) { return white ? Outcome::plus : Outcome::minus; };

  const Outcome alice = alice_pulls ? length_outcome(alice_long, alice_white) : color_outcome(alice_white);
  const Outcome bob = bob_pulls ? length_outcome(bob_long, bob_white) : color_outcome(bob_white);
  return {{alice, bob}, sa, sb, alice_share, bob_share};
}

// Normalized uniform(0,1) weights in draw order.
std::vector<double> random_weights(std::size_t size, Stream& stream) {
  std::vector<double> w(size);
  for (auto& x : w) x = stream.uniform();
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(size);
  }
  for (auto& x : w) x /= total;
  return w;
}

std::size_t sample_index(const std::vector<double>& weights, Stream& stream) {
  const double u = stream.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  return weights.size() - 1;
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::v1: return "v1";
    case Variant::v1_pre_broken: return "v1-prebroken";
    case Variant::v2: return "v2";
    case Variant::v3: return "v3";
    case Variant::v4: return "v4";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "v1") return Variant::v1;
  if (name == "v1-prebroken" || name == "v1_pre_broken" || name == "prebroken") return Variant::v1_pre_broken;
  if (name == "v2") return Variant::v2;
  if (name == "v3") return Variant::v3;
  if (name == "v4") return Variant::v4;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected v1, v1-prebroken, v2, v3, v4)");
}

StringModelConfig::StringModelConfig(Variant variant, double p_w, double p_1, double length)
    : variant_(variant),
      p_w_(is_white_string_variant(variant) ? 1.0 : p_w),
      p_1_(p_1),
      length_(length) {
  // Validate the caller's p_w even when it is overridden.
  Probability checked_pw(p_w);
  (void)checked_pw;
  if (!(std::isfinite(length) && length > 0.0)) throw std::invalid_argument("string length must be positive");
}

ExperimentTable analytic_table(const StringModelConfig& config) {
  const double pw = config.p_w();
  const double pb = config.p_b();
  switch (config.variant()) {
    case Variant::v1:
      return {{0.0, 0.5, 0.5, 0.0}, {1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}};
    case Variant::v1_pre_broken:
      return {{0.0, 0.5, 0.5, 0.0}, {0.5, 0.0, 0.5, 0.0}, {0.5, 0.5, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}};
    case Variant::v2:
      return {{0.0, 0.5, 0.5, 0.0}, {pw, pb, 0.0, 0.0}, {pw, 0.0, pb, 0.0}, {pw, 0.0, 0.0, pb}};
    case Variant::v3:
      return {{0.0, 0.5, 0.5, 0.0}, {pw, 0.0, 0.0, pb}, {pw, 0.0, 0.0, pb}, {pw, 0.0, 0.0, pb}};
    case Variant::v4: {
      const double q = config.p_1() * config.p_2();
      const double anti = 0.5 + q * (2.0 * pw * pb - 1.0);
      const JointDistribution ab(2.0 * q * pw * pw, anti, anti, 2.0 * q * pb * pb);
      const double cross = 2.0 * q * pw * pb;
      const JointDistribution rest(pw * (1.0 - 2.0 * q * pb), cross, cross, pb * (1.0 - 2.0 * q * pw));
      return {ab, rest, rest, rest};
    }
  }
  throw std::logic_error("unhandled variant");
}

TrialDraws draw_latents(const StringModelConfig& config, Stream& stream) {
  TrialDraws d;
  const std::size_t n = config.string_count();
  if (!is_white_string_variant(config.variant())) {
    for (std::size_t s = 0; s < n; ++s) d.colors[s] = stream.bernoulli(config.p_w()) ? Color::white : Color::black;
  }
  if (config.variant() == Variant::v4) {
    d.alice_string = stream.bernoulli(config.p_1()) ? 0 : 1;
    d.bob_string = stream.bernoulli(config.p_1()) ? 0 : 1;
  }
  for (std::size_t s = 0; s < n; ++s) d.break_points[s] = stream.uniform();
  return d;
}

TrialResult resolve_trial(const StringModelConfig& config, Setting setting, const TrialDraws& draws) {
  const Resolution r = resolve(config, setting, draws);
  const Variant v = config.variant();
  const double L = config.length();

  TrialResult result{r.outcome, {}};
  MicroTrace& trace = result.trace;
  trace.setting = setting;
  trace.length = L;
  trace.pre_broken = v == Variant::v1_pre_broken;
  if (v == Variant::v4) trace.selections = std::array<int, 2>{r.alice_string, r.bob_string};

  const bool alice_pulls = setting.alice == AliceSetting::a;
  const bool bob_pulls = setting.bob == BobSetting::b;
  for (int s = 0; s < static_cast<int>(config.string_count()); ++s) {
    StringTrace st;
    st.color = is_white_string_variant(v) ? Color::white : draws.colors[static_cast<std::size_t>(s)];
    st.pulled_by_alice = alice_pulls && r.alice_string == s;
    st.pulled_by_bob = bob_pulls && r.bob_string == s;
    if (trace.pre_broken) {
      st.break_fraction = draws.break_points[0];
      st.break_drawn = true;
      st.alice_length = *st.break_fraction * L;
      st.bob_length = L - *st.alice_length;
    } else if (st.pulled_by_alice && st.pulled_by_bob) {
      st.break_fraction = draws.break_points[static_cast<std::size_t>(s)];
      st.break_drawn = true;
      st.alice_length = *st.break_fraction * L;
      st.bob_length = L - *st.alice_length;
    } else if (st.pulled_by_alice) {
      st.break_fraction = 1.0;
      st.alice_length = L;
    } else if (st.pulled_by_bob) {
      st.break_fraction = 0.0;
      st.bob_length = L;
    }
    trace.strings.push_back(st);
  }
  return result;
}

TrialResult sample_trial(const StringModelConfig& config, Setting setting, Stream& stream) {
  return resolve_trial(config, setting, draw_latents(config, stream));
}

TrialResult trace_trial(const StringModelConfig& config, Setting setting, std::uint64_t master_seed,
                        unsigned long long trial_index) {
  Stream stream = Stream::derived(master_seed, setting.index(), trial_index);
  return sample_trial(config, setting, stream);
}

EstimateResult estimate_table(const StringModelConfig& config, unsigned long long trials_per_setting,
                              std::uint64_t master_seed, unsigned workers) {
  if (trials_per_setting == 0) throw std::invalid_argument("trials per setting must be at least 1");

  SettingCounts counts{};
  for (const Setting setting : kAllSettings) {
    const std::size_t si = setting.index();
    std::vector<std::array<unsigned long long, 4>> partial(std::max(1u, workers), {0, 0, 0, 0});
    for_each_block(trials_per_setting, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
      auto& local = partial[block];
      for (std::size_t t = begin; t < end; ++t) {
        Stream stream = Stream::derived(master_seed, si, t);
        const TrialDraws d = draw_latents(config, stream);
        ++local[resolve(config, setting, d).outcome.index()];
      }
    });
    for (const auto& p : partial)
      for (std::size_t c = 0; c < 4; ++c) counts[si][c] += p[c];
  }

  return {ExperimentTable(JointDistribution::from_counts(counts[0]), JointDistribution::from_counts(counts[1]),
                          JointDistribution::from_counts(counts[2]), JointDistribution::from_counts(counts[3])),
          counts, trials_per_setting};
}

void LhvStrategy::validate() const {
  if (weights.empty()) throw std::invalid_argument("LHV strategy needs at least one lambda value");
  if (alice.size() != weights.size() || bob.size() != weights.size())
    throw std::invalid_argument("LHV strategy outcome tables do not match the lambda space");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("LHV weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) throw std::invalid_argument("LHV weights must sum to 1");
}

ExperimentTable lhv_baseline_table(const LhvStrategy& strategy) {
  strategy.validate();
  std::array<std::array<double, 4>, 4> cells{};
  for (std::size_t lambda = 0; lambda < strategy.weights.size(); ++lambda) {
    for (const Setting s : kAllSettings) {
      const Outcome a = strategy.alice[lambda][s.alice == AliceSetting::a ? 0 : 1];
      const Outcome b = strategy.bob[lambda][s.bob == BobSetting::b ? 0 : 1];
      cells[s.index()][OutcomePair{a, b}.index()] += strategy.weights[lambda];
    }
  }
  auto row = [&](std::size_t i) { return JointDistribution(cells[i][0], cells[i][1], cells[i][2], cells[i][3]); };
  return {row(0), row(1), row(2), row(3)};
}

EstimateResult lhv_sampled_table(const LhvStrategy& strategy, unsigned long long trials_per_setting,
                                 std::uint64_t master_seed) {
  strategy.validate();
  if (trials_per_setting == 0) throw std::invalid_argument("trials per setting must be at least 1");
  SettingCounts counts{};
  for (const Setting s : kAllSettings) {
    for (unsigned long long t = 0; t < trials_per_setting; ++t) {
      Stream stream = Stream::derived(master_seed, s.index(), t);
      const std::size_t lambda = sample_index(strategy.weights, stream);
      const Outcome a = strategy.alice[lambda][s.alice == AliceSetting::a ? 0 : 1];
      const Outcome b = strategy.bob[lambda][s.bob == BobSetting::b ? 0 : 1];
      ++counts[s.index()][OutcomePair{a, b}.index()];
    }
  }
  return {ExperimentTable(JointDistribution::from_counts(counts[0]), JointDistribution::from_counts(counts[1]),
                          JointDistribution::from_counts(counts[2]), JointDistribution::from_counts(counts[3])),
          counts, trials_per_setting};
}

LhvStrategy pre_broken_string_strategy() {
  using enum Outcome;
  // Columns: (length, color). Both fragments are white; the long one is Alice's for lambda = 0.
  return {{0.5, 0.5}, {{plus, plus}, {minus, plus}}, {{minus, plus}, {plus, plus}}};
}

LhvStrategy random_lhv_strategy(std::size_t size, Stream& stream) {
  if (size == 0) throw std::invalid_argument("LHV strategy needs at least one lambda value");
  LhvStrategy s;
  s.weights = random_weights(size, stream);
  auto pick = [&] { return stream.bernoulli(0.5) ? Outcome::plus : Outcome::minus; };
  s.alice.resize(size);
  s.bob.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    s.alice[i] = {pick(), pick()};
    s.bob[i] = {pick(), pick()};
  }
  return s;
}

}  // namespace entangle
