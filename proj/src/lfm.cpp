#include "recpol/lfm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace recpol {

MistakeStats::MistakeStats(std::map<std::string, MistakeRow> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("MistakeStats: empty support");
  StableSum total;
  for (const auto& [x, row] : rows_) {
    if (!(row.p >= 0.0) || !(row.h >= 0.0 && row.h <= 1.0)) {
      throw std::invalid_argument("MistakeStats: p or h outside range at x='" + x + "'");
    }
    for (const auto& m : {row.m_nothire, row.m_hire}) {
      if (m && !(*m >= 0.0 && *m <= 1.0)) {
        throw std::invalid_argument("MistakeStats: mistake rate outside [0,1]");
      }
    }
    total.add(row.p);
    support_.push_back(x);
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("MistakeStats: p_x does not sum to 1");
  }
}

const MistakeRow& MistakeStats::at(const std::string& x) const {
  auto it = rows_.find(x);
  if (it == rows_.end()) {
    throw std::invalid_argument("MistakeStats: unknown x='" + x + "'");
  }
  return it->second;
}

MistakeStats mistake_stats(const BaselineJoint& base) {
  struct Cell {
    double hire = 0.0, nothire = 0.0, hire_bad = 0.0, nothire_good = 0.0;
  };
  std::map<std::string, Cell> cells;
  for (const auto& [atom, w] : base.pmf().entries()) {
    Cell& c = cells[atom.x];
    if (atom.d0 == Decision::Hire) {
      c.hire += w;
      if (atom.y == Outcome::Bad) c.hire_bad += w;
    } else {
      c.nothire += w;
      if (atom.y == Outcome::Good) c.nothire_good += w;
    }
  }
  std::map<std::string, MistakeRow> rows;
  for (const auto& x : base.x_support()) {
    const Cell& c = cells[x];
    MistakeRow row;
    row.p = base.p_x(x);
    row.h = c.hire / row.p;
    if (c.hire > 0.0) row.m_hire = c.hire_bad / c.hire;
    if (c.nothire > 0.0) row.m_nothire = c.nothire_good / c.nothire;
    rows[x] = row;
  }
  return MistakeStats(std::move(rows));
}

std::optional<double> lfm_gain(const MistakeRow& row, const LossSpec& spec,
                               double kappa, Recommendation r) {
  if (r == Recommendation::NotHire) {
    if (!row.m_hire) return std::nullopt;
    return ((spec.c_type1 + kappa * spec.c_type2) * (*row.m_hire) - spec.c_type1) *
           row.h;
  }
  if (r == Recommendation::Hire) {
    if (!row.m_nothire) return std::nullopt;
    return ((kappa * spec.c_type1 + spec.c_type2) * (*row.m_nothire) - spec.c_type2) *
           (1.0 - row.h);
  }
  return 0.0;
}

Policy lfm_policy(const MistakeStats& stats, const LossSpec& spec, double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("lfm_policy: kappa must be >= 0");
  std::map<std::string, Recommendation> m;
  for (const auto& x : stats.support()) {
    const MistakeRow& row = stats.at(x);
    const auto gain_n = lfm_gain(row, spec, kappa, Recommendation::NotHire);
    const auto gain_h = lfm_gain(row, spec, kappa, Recommendation::Hire);
    const bool cond_n = gain_n && *gain_n >= 0.0;
    const bool cond_h = gain_h && *gain_h >= 0.0;
    if (cond_n && cond_h) {
      m[x] = *gain_n >= *gain_h ? Recommendation::NotHire : Recommendation::Hire;
    } else if (cond_n) {
      m[x] = Recommendation::NotHire;
    } else if (cond_h) {
      m[x] = Recommendation::Hire;
    } else {
      m[x] = Recommendation::None;
    }
  }
  return Policy(std::move(m));
}

Policy mistakes_rule(const MistakeStats& stats, const LossSpec& spec) {
  return lfm_policy(stats, spec, 1.0);
}

namespace {

// Smallest kappa activating the NotHire condition: m_hire >= c1/(c1 + k c2).
std::optional<double> activation_kappa_nothire(const MistakeRow& row,
                                               const LossSpec& spec) {
  if (!row.m_hire || *row.m_hire <= 0.0) return std::nullopt;
  return spec.c_type1 * (1.0 - *row.m_hire) / (spec.c_type2 * (*row.m_hire));
}

std::optional<double> activation_kappa_hire(const MistakeRow& row,
                                            const LossSpec& spec) {
  if (!row.m_nothire || *row.m_nothire <= 0.0) return std::nullopt;
  return spec.c_type2 * (1.0 - *row.m_nothire) / (spec.c_type1 * (*row.m_nothire));
}

}  // namespace

KappaThresholds kappa_thresholds(const MistakeStats& stats, const LossSpec& spec,
                                 const std::string& x) {
  const MistakeRow& row = stats.at(x);
  KappaThresholds out;
  out.nothire_from = activation_kappa_nothire(row, spec);
  out.hire_from = activation_kappa_hire(row, spec);
  if (!out.nothire_from || !out.hire_from) return out;

  // Inside the dual-condition region both gains grow linearly in kappa;
  // the recommendation flips where their difference changes sign.
  const double entry = std::max(*out.nothire_from, *out.hire_from);
  const auto diff_at = [&](double kappa) {
    const auto gn = lfm_gain(row, spec, kappa, Recommendation::NotHire);
    const auto gh = lfm_gain(row, spec, kappa, Recommendation::Hire);
    return *gn - *gh;
  };
  const double slope = spec.c_type2 * (*row.m_hire) * row.h -
                       spec.c_type1 * (*row.m_nothire) * (1.0 - row.h);
  const double at_entry = diff_at(entry);
  if (at_entry == 0.0) return out;  // degenerate: both activate together
  if ((at_entry < 0.0 && slope > 0.0) || (at_entry > 0.0 && slope < 0.0)) {
    out.crossover = entry - at_entry / slope;
  }
  return out;
}

std::vector<KappaBand> kappa_bands(const MistakeStats& stats, const LossSpec& spec,
                                   const std::string& x) {
  const KappaThresholds t = kappa_thresholds(stats, spec, x);
  std::vector<double> points;
  for (const auto& p : {t.nothire_from, t.hire_from, t.crossover}) {
    if (p && *p > 0.0) points.push_back(*p);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const auto rec_at = [&](double kappa) { return lfm_policy(stats, spec, kappa).at(x); };

  std::vector<KappaBand> bands;
  double lo = 0.0;
  for (std::size_t i = 0; i <= points.size(); ++i) {
    const std::optional<double> hi =
        i < points.size() ? std::optional<double>(points[i]) : std::nullopt;
    const Recommendation rec = rec_at(lo);
    if (!bands.empty() && bands.back().rec == rec) {
      bands.back().hi = hi;  // merge: the candidate point was not a change point
    } else {
      bands.push_back(KappaBand{lo, hi, rec});
    }
    if (hi) lo = *hi;
  }
  return bands;
}

double worst_case_excess(const Policy& policy, const MistakeStats& stats,
                         const LossSpec& spec,
                         const ComplianceAssumptions& assumptions) {
  if (policy.support() != stats.support()) {
    throw std::invalid_argument("worst_case_excess: support mismatch");
  }
  const double kappa = assumptions.kappa;
  if (kappa == 0.0) {
    // Limit of the bound: only certain-mistake cells stay finite.
    double total = 0.0;
    for (const auto& x : stats.support()) {
      const MistakeRow& row = stats.at(x);
      const Recommendation r = policy.at(x);
      if (r == Recommendation::None) continue;
      if (r == Recommendation::NotHire) {
        if (row.h == 0.0) continue;
        if (row.m_hire && *row.m_hire == 1.0) {
          total += -assumptions.epsilon * spec.c_type2 * row.h * row.p;
        } else {
          return std::numeric_limits<double>::infinity();
        }
      } else {
        if (row.h == 1.0) continue;
        if (row.m_nothire && *row.m_nothire == 1.0) {
          total += -assumptions.epsilon * spec.c_type1 * (1.0 - row.h) * row.p;
        } else {
          return std::numeric_limits<double>::infinity();
        }
      }
    }
    return total;
  }

  // Plain left-to-right sum so that picking the per-x minimum term always
  // minimizes the total, exactly, in floating point.
  double total = 0.0;
  for (const auto& x : stats.support()) {
    const MistakeRow& row = stats.at(x);
    const auto gain = lfm_gain(row, spec, kappa, policy.at(x));
    // An undefined conditional means the recommended-against branch has
    // zero mass, so the recommendation moves nobody.
    total += row.p * (gain ? -*gain : 0.0);
  }
  return (assumptions.epsilon / kappa) * total;
}

OracleResult minimax_grid_oracle(const BaselineJoint& base, const LossSpec& spec,
                                 const ComplianceAssumptions& assumptions,
                                 double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw std::invalid_argument("minimax_grid_oracle: grid_step must be in (0, 0.5]");
  }
  const MistakeStats stats = mistake_stats(base);
  if (stats.support().size() > 4) {
    throw std::invalid_argument("minimax_grid_oracle: support exceeds oracle cap of 4");
  }

  std::vector<double> grid;
  const int steps = static_cast<int>(std::floor(1.0 / grid_step));
  for (int i = 0; i < steps; ++i) grid.push_back(i * grid_step);
  grid.push_back(1.0);

  // Adversary value of recommending r at x, maximized over the compliance
  // pair on the grid. Only compliers whose baseline decision opposes r move.
  const auto cell_max = [&](const std::string& x, Recommendation r) {
    const MistakeRow& row = stats.at(x);
    double mass, mistake, fix_cost, new_cost;
    if (r == Recommendation::NotHire) {
      mass = row.p * row.h;
      if (mass <= 0.0 || !row.m_hire) return 0.0;
      mistake = *row.m_hire;
      fix_cost = spec.c_type2;
      new_cost = spec.c_type1;
    } else {
      mass = row.p * (1.0 - row.h);
      if (mass <= 0.0 || !row.m_nothire) return 0.0;
      mistake = *row.m_nothire;
      fix_cost = spec.c_type1;
      new_cost = spec.c_type2;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const double q1 : grid) {
      if (q1 < assumptions.epsilon) continue;
      for (const double q0 : grid) {
        if (q1 < assumptions.kappa * q0) continue;
        const double v =
            mass * (new_cost * (1.0 - mistake) * q0 - fix_cost * mistake * q1);
        best = std::max(best, v);
      }
    }
    return best;
  };

  std::map<std::string, std::array<double, 2>> cells;  // [NotHire, Hire]
  for (const auto& x : stats.support()) {
    cells[x] = {cell_max(x, Recommendation::NotHire), cell_max(x, Recommendation::Hire)};
  }

  OracleResult result;
  result.support = stats.support();
  const PolicyEnumeration all(stats.support(), 4);
  result.per_policy.resize(all.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Policy p = all.at(i);
    double v = 0.0;
    for (const auto& x : stats.support()) {
      const Recommendation r = p.at(x);
      if (r == Recommendation::NotHire) v += cells[x][0];
      if (r == Recommendation::Hire) v += cells[x][1];
    }
    result.per_policy[i] = v;
    best = std::min(best, v);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (result.per_policy[i] <= best + OracleResult::kTieTolerance) {
      result.argmin.push_back(all.at(i));
    }
  }
  result.value = best;
  return result;
}

std::optional<double> assumption2_bound_check(const Policy& policy,
                                              const PopulationDistribution& pop,
                                              const AgentModel& model,
                                              const AgentModel& baseline_model,
                                              const LossSpec& spec) {
  if (policy.support() != pop.x_support()) {
    throw std::invalid_argument("assumption2_bound_check: support mismatch");
  }
  StableSum numerator, mass;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    const Recommendation r = policy.at(atom.x);
    const double event_mass =
        r == Recommendation::None ? 1.0 : 1.0 - model.comply_prob(atom.u, r);
    if (event_mass <= 0.0) continue;
    const double active =
        expected_decision_loss(model, atom.u, Recommendation::None, atom.y, spec);
    const double baseline = expected_decision_loss(baseline_model, atom.u,
                                                   Recommendation::None, atom.y, spec);
    numerator.add(w * event_mass * (active - baseline));
    mass.add(w * event_mass);
  }
  if (!(mass.value() > 0.0)) return std::nullopt;
  return numerator.value() / mass.value();
}

}  // namespace recpol
