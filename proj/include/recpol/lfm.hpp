#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recpol/agents.hpp"
#include "recpol/core.hpp"
#include "recpol/distributions.hpp"
#include "recpol/policy.hpp"

namespace recpol {

/// Per-x statistics of unassisted decisions. m_hire is the mistake rate
/// among baseline hires (bad worker hired), m_nothire among baseline
/// rejections (good worker passed over). A conditional is absent when its
/// conditioning event has zero mass.
struct MistakeRow {
  double p = 0.0;                    // Pr(X = x)
  double h = 0.0;                    // Pr(D0 = Hire | x)
  std::optional<double> m_nothire;   // E[mistake | D0 = NotHire, x]
  std::optional<double> m_hire;      // E[mistake | D0 = Hire, x]
};

class MistakeStats {
 public:
  explicit MistakeStats(std::map<std::string, MistakeRow> rows);

  const MistakeRow& at(const std::string& x) const;
  const std::vector<std::string>& support() const { return support_; }
  const std::map<std::string, MistakeRow>& rows() const { return rows_; }

 private:
  std::map<std::string, MistakeRow> rows_;
  std::vector<std::string> support_;
};

MistakeStats mistake_stats(const BaselineJoint& base);

/// Assumed link between compliance and baseline mistakes: compliance given
/// a mistake is at least kappa times compliance given none, and at least
/// epsilon outright.
struct ComplianceAssumptions {
  double kappa;
  double epsilon;

  ComplianceAssumptions(double k, double e) : kappa(k), epsilon(e) {
    if (!(k >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon must be in (0,1]");
  }
};

/// Guaranteed loss reduction from recommending r at x, scaled by the
/// conditioning mass: nonnegative exactly when the mistake rate clears the
/// kappa threshold. Absent when the needed conditional is undefined.
std::optional<double> lfm_gain(const MistakeRow& row, const LossSpec& spec,
                               double kappa, Recommendation r);

/// Mistake-threshold recommendation rule. Per x: recommend against a
/// baseline decision whose conditional mistake rate clears its threshold;
/// withhold when neither side does; pick the larger gain when both do
/// (exact gain ties resolve to NotHire). Undefined conditionals never
/// activate a side.
Policy lfm_policy(const MistakeStats& stats, const LossSpec& spec, double kappa);

/// The kappa = 1 special case.
Policy mistakes_rule(const MistakeStats& stats, const LossSpec& spec);

/// Band-start points of kappa -> lfm_policy(x):
///   nothire_from: smallest kappa at which the NotHire condition holds,
///   hire_from:    likewise for Hire,
///   crossover:    the kappa in the dual-condition region where the gain
///                 ordering flips (absent when it never flips).
struct KappaThresholds {
  std::optional<double> nothire_from;
  std::optional<double> hire_from;
  std::optional<double> crossover;
};

KappaThresholds kappa_thresholds(const MistakeStats& stats, const LossSpec& spec,
                                 const std::string& x);

/// Maximal intervals of constancy of kappa -> lfm_policy(x) over [0, inf),
/// left-closed, derived from the analytic change points.
struct KappaBand {
  double lo = 0.0;
  std::optional<double> hi;  // absent = unbounded
  Recommendation rec = Recommendation::None;
};

std::vector<KappaBand> kappa_bands(const MistakeStats& stats, const LossSpec& spec,
                                   const std::string& x);

/// Tight bound on E[l(Y,D)] - E[l(Y,D0)] under the compliance assumptions:
///   (eps/kappa) * sum_x p_x [ 1(f=N) (c1 - (c1 + k c2) m_hire) h
///                           + 1(f=H) (c2 - (k c1 + c2) m_nothire) (1-h) ].
/// At kappa = 0 the conservative limit is returned: certain-mistake cells
/// contribute their finite limit, any other recommended cell diverges.
double worst_case_excess(const Policy& policy, const MistakeStats& stats,
                         const LossSpec& spec, const ComplianceAssumptions& assumptions);

struct OracleResult {
  std::vector<Policy> argmin;       // ties within kTieTolerance of the best
  double value = 0.0;               // minimax expected excess loss
  std::vector<double> per_policy;   // adversary maximum per enumerated policy
  std::vector<std::string> support;
  static constexpr double kTieTolerance = 1e-9;
};

/// Independent check of the analytic bound: for every policy, a grid
/// adversary picks per-(x, opposite-baseline-decision) compliance
/// probabilities q1 = Pr(Comply | mistake) and q0 = Pr(Comply | no mistake)
/// subject to q1 >= epsilon and q1 >= kappa q0, maximizing expected excess
/// loss; active decisions are pinned at their worst case (no drift).
/// Support is capped at 4.
OracleResult minimax_grid_oracle(const BaselineJoint& base, const LossSpec& spec,
                                 const ComplianceAssumptions& assumptions,
                                 double grid_step);

/// E[l(Y, D_active) - l(Y, D0) | Ignore or R = none]; nonpositive certifies
/// the active-decisions-no-worse assumption for this model/policy pair.
/// Absent when the conditioning event has zero mass.
std::optional<double> assumption2_bound_check(const Policy& policy,
                                              const PopulationDistribution& pop,
                                              const AgentModel& model,
                                              const AgentModel& baseline_model,
                                              const LossSpec& spec);

}  // namespace recpol
