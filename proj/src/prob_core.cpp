#include "entangle/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace entangle {

std::string_view Setting::label() const {
  static constexpr std::array<std::string_view, 4> kLabels = {"AB", "AB'", "A'B", "A'B'"};
  return kLabels[index()];
}

std::string OutcomePair::label() const {
  return {outcome_symbol(alice), outcome_symbol(bob)};
}

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << "probability out of [0, 1]: " << value;
    throw std::domain_error(msg.str());
  }
}

JointDistribution::JointDistribution(double p_pp, double p_pm, double p_mp, double p_mm)
    : cells_{Probability(p_pp).value(), Probability(p_pm).value(), Probability(p_mp).value(),
             Probability(p_mm).value()} {
  const double total = p_pp + p_pm + p_mp + p_mm;
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "joint distribution does not sum to 1 (sum = " << total << ")";
    throw std::domain_error(msg.str());
  }
}

JointDistribution JointDistribution::from_counts(const std::array<unsigned long long, 4>& counts) {
  const unsigned long long total = counts[0] + counts[1] + counts[2] + counts[3];
  if (total == 0) throw std::invalid_argument("joint distribution from zero counts");
  const auto n = static_cast<double>(total);
  return {static_cast<double>(counts[0]) / n, static_cast<double>(counts[1]) / n,
          static_cast<double>(counts[2]) / n, static_cast<double>(counts[3]) / n};
}

double JointDistribution::alice_marginal(Outcome o) const {
  return o == Outcome::plus ? cells_[0] + cells_[1] : cells_[2] + cells_[3];
}

double JointDistribution::bob_marginal(Outcome o) const {
  return o == Outcome::plus ? cells_[0] + cells_[2] : cells_[1] + cells_[3];
}

double ExperimentTable::max_abs_deviation(const ExperimentTable& other) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(rows_[r].cells()[c] - other.rows_[r].cells()[c]));
  return worst;
}

double ChshQuantities::max_abs() const {
  return std::max({std::abs(a_chsh), std::abs(b_chsh), std::abs(c_chsh), std::abs(d_chsh)});
}

double correlation(const JointDistribution& dist) {
  return (dist.pp() + dist.mm()) - (dist.pm() + dist.mp());
}

ChshQuantities chsh(const ExperimentTable& table) {
  const double e_ab = correlation(table.ab());
  const double e_abp = correlation(table.ab_prime());
  const double e_apb = correlation(table.a_prime_b());
  const double e_apbp = correlation(table.a_prime_b_prime());
  return {
      -e_ab + e_abp + e_apb + e_apbp,
      e_ab - e_abp + e_apb + e_apbp,
      e_ab + e_abp - e_apb + e_apbp,
      e_ab + e_abp + e_apb - e_apbp,
  };
}

bool BellReport::any_violated() const {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const BellVerdict& v) { return v.violated; });
}

BellReport check_bell_bounds(const ChshQuantities& q, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("Bell bound must be positive");
  BellReport report{bound, {}};
  const auto values = q.values();
  for (std::size_t i = 0; i < 4; ++i) {
    const double magnitude = std::abs(values[i]);
    report.verdicts[i] = {static_cast<char>('A' + i), values[i], magnitude > bound, magnitude - bound};
  }
  return report;
}

std::string MarginalResidual::label() const {
  const char own = side == Side::alice ? 'A' : 'B';
  const char partner = side == Side::alice ? 'B' : 'A';
  const std::string own_name = std::string(1, own) + (own_setting == 0 ? "" : "'");
  const std::string sign(1, outcome_symbol(outcome));
  return "P_" + std::string(1, partner) + "(" + own_name + "=" + sign + ") - P_" + std::string(1, partner) + "'(" +
         own_name + "=" + sign + ")";
}

MarginalReport marginals(const ExperimentTable& table, double tolerance) {
  if (!(tolerance >= 0.0)) throw std::invalid_argument("marginal tolerance must be non-negative");
  MarginalReport report;
  report.tolerance = tolerance;
  report.residuals.reserve(8);

  for (int own = 0; own < 2; ++own) {
    const AliceSetting alice = own == 0 ? AliceSetting::a : AliceSetting::a_prime;
    for (Outcome o : {Outcome::plus, Outcome::minus}) {
      const double with_b = table.row({alice, BobSetting::b}).alice_marginal(o);
      const double with_bp = table.row({alice, BobSetting::b_prime}).alice_marginal(o);
      report.residuals.push_back({Side::alice, own, o, with_b, with_bp, with_b - with_bp});
    }
  }
  for (int own = 0; own < 2; ++own) {
    const BobSetting bob = own == 0 ? BobSetting::b : BobSetting::b_prime;
    for (Outcome o : {Outcome::plus, Outcome::minus}) {
      const double with_a = table.row({AliceSetting::a, bob}).bob_marginal(o);
      const double with_ap = table.row({AliceSetting::a_prime, bob}).bob_marginal(o);
      report.residuals.push_back({Side::bob, own, o, with_a, with_ap, with_a - with_ap});
    }
  }
  for (const auto& r : report.residuals) report.max_abs_residual = std::max(report.max_abs_residual, std::abs(r.residual));
  return report;
}

}  // namespace entangle
