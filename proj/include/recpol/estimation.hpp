#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "recpol/core.hpp"
#include "recpol/lfm.hpp"
#include "recpol/policy.hpp"

namespace recpol {

/// One unassisted decision with its revealed outcome.
struct DecisionRecord {
  std::string subject_id;
  std::string x;
  std::string u;  // may be empty
  Outcome y;
  Decision d0;
};

/// Finite log of unassisted decisions over a declared characteristic
/// support. Every record's x must belong to the support.
class DecisionLog {
 public:
  DecisionLog(std::vector<DecisionRecord> records, std::vector<std::string> support);

  /// Support inferred from the records themselves.
  static DecisionLog from_records(std::vector<DecisionRecord> records);

  const std::vector<DecisionRecord>& records() const { return records_; }
  const std::vector<std::string>& support() const { return support_; }

 private:
  std::vector<DecisionRecord> records_;
  std::vector<std::string> support_;
};

/// CSV schema: header `subject_id,x,u,y,d0`, y in {G,B}, d0 in {N,H}, u
/// optionally empty. Unknown tokens are rejected with the row number.
DecisionLog parse_decision_log_csv(std::istream& in,
                                   std::optional<std::vector<std::string>> support =
                                       std::nullopt);
DecisionLog parse_decision_log_csv_file(const std::string& path,
                                        std::optional<std::vector<std::string>> support =
                                            std::nullopt);

/// Empirical mistake statistics with additive smoothing on each
/// conditional: (count + s) / (total + 2s). Zero smoothing keeps raw
/// frequencies and flags empty conditionals as undefined.
MistakeStats fit_mistake_stats(const DecisionLog& log, double smoothing);

/// Plug-in recommendation rule: per-x argmax of the estimated gains
/// against the zero gain of withholding. Coincides with lfm_policy on
/// every input.
Policy plugin_policy(const MistakeStats& stats, const LossSpec& spec, double kappa);

/// Candidate set for empirical risk minimization.
struct PolicyClass {
  enum class Kind { AllMaps, ExplicitList };
  Kind kind = Kind::AllMaps;
  std::vector<Policy> members;  // ExplicitList only

  static PolicyClass all_maps() { return PolicyClass{Kind::AllMaps, {}}; }
  static PolicyClass explicit_list(std::vector<Policy> policies);
};

struct ErmResult {
  std::vector<Policy> argmin;  // ties within kTieTolerance
  double objective = 0.0;      // minimized sample mean
  static constexpr double kTieTolerance = 1e-9;
};

/// Sample-mean worst-case-improvement objective of a policy on the log:
///   1(f(x)=H) (c2 1(d0=N) - (k c1 + c2) M_I)
/// + 1(f(x)=N) (c1 1(d0=H) - (c1 + k c2) M_II)
/// where M_I = 1(y=G, d0=N) and M_II = 1(y=B, d0=H). Negative values
/// certify a guaranteed improvement over the unassisted baseline.
double erm_objective(const DecisionLog& log, const Policy& policy, const LossSpec& spec,
                     double kappa);

/// Cost-weighted classification: minimize erm_objective over the class.
/// AllMaps decomposes per x; ties multiply across x, capped at the policy
/// enumeration limit.
ErmResult cost_weighted_erm(const DecisionLog& log, const PolicyClass& cls,
                            const LossSpec& spec, double kappa);

}  // namespace recpol
