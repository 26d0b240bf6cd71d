#pragma once

// Joint-outcome distributions of the two-setting / two-outcome Bell scenario,
// their correlation functions, the four CHSH combinations and the
// no-signaling (marginal law) residuals.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace entangle {

/// Normalization tolerance for exact (closed-form) joint distributions.
inline constexpr double kNormalizationTolerance = 1e-12;

enum class Outcome { plus, minus };
enum class AliceSetting { a, a_prime };
enum class BobSetting { b, b_prime };
enum class Side { alice, bob };

constexpr char outcome_symbol(Outcome o) { return o == Outcome::plus ? '+' : '-'; }
constexpr int outcome_value(Outcome o) { return o == Outcome::plus ? 1 : -1; }

/// One of the four joint measurements AB, AB', A'B, A'B'.
struct Setting {
  AliceSetting alice = AliceSetting::a;
  BobSetting bob = BobSetting::b;

  /// Row index in table order: AB=0, AB'=1, A'B=2, A'B'=3.
  constexpr std::size_t index() const {
    return (alice == AliceSetting::a ? 0u : 2u) + (bob == BobSetting::b ? 0u : 1u);
  }
  static constexpr Setting from_index(std::size_t i) {
    return {i < 2 ? AliceSetting::a : AliceSetting::a_prime,
            i % 2 == 0 ? BobSetting::b : BobSetting::b_prime};
  }
  std::string_view label() const;

  friend constexpr bool operator==(Setting, Setting) = default;
};

inline constexpr std::array<Setting, 4> kAllSettings = {
    Setting::from_index(0), Setting::from_index(1), Setting::from_index(2), Setting::from_index(3)};

struct OutcomePair {
  Outcome alice = Outcome::plus;
  Outcome bob = Outcome::plus;

  /// Cell index in table order: ++=0, +-=1, -+=2, --=3.
  constexpr std::size_t index() const {
    return (alice == Outcome::plus ? 0u : 2u) + (bob == Outcome::plus ? 0u : 1u);
  }
  static constexpr OutcomePair from_index(std::size_t i) {
    return {i < 2 ? Outcome::plus : Outcome::minus, i % 2 == 0 ? Outcome::plus : Outcome::minus};
  }
  std::string label() const;

  friend constexpr bool operator==(OutcomePair, OutcomePair) = default;
};

/// A real number in [0, 1]; throws std::domain_error otherwise.
class Probability {
 public:
  Probability() = default;
  explicit Probability(double value);

  double value() const { return value_; }
  Probability complement() const { return Probability(1.0 - value_); }

 private:
  double value_ = 0.0;
};

/// Probabilities of the ++, +-, -+, -- outcomes of one joint measurement.
class JointDistribution {
 public:
  JointDistribution(double p_pp, double p_pm, double p_mp, double p_mm);

  /// Relative frequencies; the total must be positive.
  static JointDistribution from_counts(const std::array<unsigned long long, 4>& counts);

  double pp() const { return cells_[0]; }
  double pm() const { return cells_[1]; }
  double mp() const { return cells_[2]; }
  double mm() const { return cells_[3]; }
  double at(OutcomePair o) const { return cells_[o.index()]; }
  const std::array<double, 4>& cells() const { return cells_; }

  /// P(alice = o) and P(bob = o) of this joint measurement.
  double alice_marginal(Outcome o) const;
  double bob_marginal(Outcome o) const;

 private:
  std::array<double, 4> cells_;
};

/// Rows for AB, AB', A'B, A'B'.
class ExperimentTable {
 public:
  ExperimentTable(JointDistribution ab, JointDistribution ab_prime, JointDistribution a_prime_b,
                  JointDistribution a_prime_b_prime)
      : rows_{ab, ab_prime, a_prime_b, a_prime_b_prime} {}
  explicit ExperimentTable(const std::array<JointDistribution, 4>& rows) : rows_(rows) {}

  const JointDistribution& row(Setting s) const { return rows_[s.index()]; }
  const JointDistribution& ab() const { return rows_[0]; }
  const JointDistribution& ab_prime() const { return rows_[1]; }
  const JointDistribution& a_prime_b() const { return rows_[2]; }
  const JointDistribution& a_prime_b_prime() const { return rows_[3]; }
  const std::array<JointDistribution, 4>& rows() const { return rows_; }

  /// Largest entrywise |this - other|.
  double max_abs_deviation(const ExperimentTable& other) const;

 private:
  std::array<JointDistribution, 4> rows_;
};

struct ChshQuantities {
  double a_chsh = 0.0;
  double b_chsh = 0.0;
  double c_chsh = 0.0;
  double d_chsh = 0.0;

  std::array<double, 4> values() const { return {a_chsh, b_chsh, c_chsh, d_chsh}; }
  double max_abs() const;
};

/// E = (P++ + P--) - (P+- + P-+).
double correlation(const JointDistribution& dist);

/// A = -E_AB + E_AB' + E_A'B + E_A'B', and B, C, D move the minus sign to
/// E_AB', E_A'B and E_A'B' respectively (only one term negated each time).
ChshQuantities chsh(const ExperimentTable& table);

struct BellVerdict {
  char quantity;  // 'A', 'B', 'C' or 'D'
  double value;
  bool violated;  // |value| > bound
  double margin;  // |value| - bound
};

struct BellReport {
  double bound;
  std::array<BellVerdict, 4> verdicts;

  bool any_violated() const;
};

/// Non-strict test |q| <= bound for each quantity. Throws
/// std::invalid_argument for bound <= 0.
BellReport check_bell_bounds(const ChshQuantities& q, double bound = 2.0);

/// One no-signaling comparison: the marginal of `side` for its measurement
/// `own_setting` (0 = unprimed, 1 = primed) and outcome, under the partner's
/// unprimed setting minus under the partner's primed setting.
struct MarginalResidual {
  Side side;
  int own_setting;
  Outcome outcome;
  double with_unprimed_partner;
  double with_primed_partner;
  double residual;

  std::string label() const;  // e.g. "P_B(A=+) - P_B'(A=+)"
};

struct MarginalReport {
  std::vector<MarginalResidual> residuals;  // always 8 entries
  double max_abs_residual = 0.0;
  double tolerance = 0.0;

  bool violated() const { return max_abs_residual > tolerance; }
};

/// Throws std::invalid_argument for negative tolerance.
MarginalReport marginals(const ExperimentTable& table, double tolerance);

}  // namespace entangle
