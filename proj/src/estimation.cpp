#include "recpol/estimation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace recpol {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
  throw std::runtime_error("row " + std::to_string(row) + ": " + what);
}

}  // namespace

DecisionLog::DecisionLog(std::vector<DecisionRecord> records,
                         std::vector<std::string> support)
    : records_(std::move(records)), support_(std::move(support)) {
  if (records_.empty()) throw std::invalid_argument("DecisionLog: empty log");
  if (support_.empty()) throw std::invalid_argument("DecisionLog: empty support");
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
  const std::set<std::string> known(support_.begin(), support_.end());
  for (const auto& r : records_) {
    if (!known.count(r.x)) {
      throw std::invalid_argument("DecisionLog: x='" + r.x +
                                  "' outside declared support");
    }
  }
}

DecisionLog DecisionLog::from_records(std::vector<DecisionRecord> records) {
  if (records.empty()) throw std::invalid_argument("DecisionLog: empty log");
  std::vector<std::string> support;
  for (const auto& r : records) support.push_back(r.x);
  return DecisionLog(std::move(records), std::move(support));
}

DecisionLog parse_decision_log_csv(std::istream& in,
                                   std::optional<std::vector<std::string>> support) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("row 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv_row(line) != std::vector<std::string>{"subject_id", "x", "u", "y", "d0"}) {
    row_error(1, "expected header 'subject_id,x,u,y,d0'");
  }
  std::vector<DecisionRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 5) row_error(row, "expected 5 fields");
    DecisionRecord rec;
    rec.subject_id = fields[0];
    rec.x = fields[1];
    rec.u = fields[2];
    try {
      rec.y = outcome_from_token(fields[3]);
      rec.d0 = decision_from_token(fields[4]);
    } catch (const std::invalid_argument& e) {
      row_error(row, e.what());
    }
    if (rec.x.empty()) row_error(row, "missing x");
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw std::runtime_error("log has no records");
  if (support) return DecisionLog(std::move(records), std::move(*support));
  return DecisionLog::from_records(std::move(records));
}

DecisionLog parse_decision_log_csv_file(const std::string& path,
                                        std::optional<std::vector<std::string>> support) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_decision_log_csv(in, std::move(support));
}

MistakeStats fit_mistake_stats(const DecisionLog& log, double smoothing) {
  if (!(smoothing >= 0.0)) {
    throw std::invalid_argument("fit_mistake_stats: smoothing must be >= 0");
  }
  struct Counts {
    double n = 0, hire = 0, hire_bad = 0, nothire_good = 0;
  };
  std::map<std::string, Counts> counts;
  for (const auto& x : log.support()) counts[x] = Counts{};
  for (const auto& r : log.records()) {
    Counts& c = counts[r.x];
    c.n += 1;
    if (r.d0 == Decision::Hire) {
      c.hire += 1;
      if (r.y == Outcome::Bad) c.hire_bad += 1;
    } else if (r.y == Outcome::Good) {
      c.nothire_good += 1;
    }
  }
  const double total = static_cast<double>(log.records().size());
  std::map<std::string, MistakeRow> rows;
  for (const auto& [x, c] : counts) {
    MistakeRow row;
    row.p = c.n / total;
    const double nothire = c.n - c.hire;
    row.h = c.n > 0 ? (c.hire + smoothing) / (c.n + 2 * smoothing)
                    : (smoothing > 0 ? 0.5 : 0.0);
    if (c.hire > 0 || smoothing > 0) {
      row.m_hire = (c.hire_bad + smoothing) / (c.hire + 2 * smoothing);
    }
    if (nothire > 0 || smoothing > 0) {
      row.m_nothire = (c.nothire_good + smoothing) / (nothire + 2 * smoothing);
    }
    rows[x] = row;
  }
  return MistakeStats(std::move(rows));
}

Policy plugin_policy(const MistakeStats& stats, const LossSpec& spec, double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("plugin_policy: kappa must be >= 0");
  std::map<std::string, Recommendation> m;
  for (const auto& x : stats.support()) {
    const MistakeRow& row = stats.at(x);
    // argmax over the three estimated gains, withholding scoring zero.
    // A defined directional gain wins ties against zero (its activation
    // inequality is weak); NotHire wins a directional tie.
    const auto gain_n = lfm_gain(row, spec, kappa, Recommendation::NotHire);
    const auto gain_h = lfm_gain(row, spec, kappa, Recommendation::Hire);
    Recommendation best = Recommendation::None;
    double best_gain = 0.0;
    if (gain_h && *gain_h >= best_gain) {
      best = Recommendation::Hire;
      best_gain = *gain_h;
    }
    if (gain_n && *gain_n >= best_gain) {
      best = Recommendation::NotHire;
      best_gain = *gain_n;
    }
    m[x] = best;
  }
  return Policy(std::move(m));
}

PolicyClass PolicyClass::explicit_list(std::vector<Policy> policies) {
  if (policies.empty()) {
    throw std::invalid_argument("PolicyClass: explicit list must be non-empty");
  }
  return PolicyClass{Kind::ExplicitList, std::move(policies)};
}

namespace {

// Per-record objective contribution of recommending r at the record's x.
double record_term(const DecisionRecord& rec, Recommendation r, const LossSpec& spec,
                   double kappa) {
  if (r == Recommendation::Hire) {
    const bool mistake_fixed = rec.y == Outcome::Good && rec.d0 == Decision::NotHire;
    return spec.c_type2 * (rec.d0 == Decision::NotHire ? 1.0 : 0.0) -
           (kappa * spec.c_type1 + spec.c_type2) * (mistake_fixed ? 1.0 : 0.0);
  }
  if (r == Recommendation::NotHire) {
    const bool mistake_fixed = rec.y == Outcome::Bad && rec.d0 == Decision::Hire;
    return spec.c_type1 * (rec.d0 == Decision::Hire ? 1.0 : 0.0) -
           (spec.c_type1 + kappa * spec.c_type2) * (mistake_fixed ? 1.0 : 0.0);
  }
  return 0.0;
}

}  // namespace

double erm_objective(const DecisionLog& log, const Policy& policy, const LossSpec& spec,
                     double kappa) {
  if (policy.support() != log.support()) {
    throw std::invalid_argument("erm_objective: support mismatch");
  }
  StableSum acc;
  for (const auto& rec : log.records()) {
    acc.add(record_term(rec, policy.at(rec.x), spec, kappa));
  }
  return acc.value() / static_cast<double>(log.records().size());
}

ErmResult cost_weighted_erm(const DecisionLog& log, const PolicyClass& cls,
                            const LossSpec& spec, double kappa) {
  ErmResult result;
  if (cls.kind == PolicyClass::Kind::ExplicitList) {
    if (cls.members.empty()) throw std::invalid_argument("cost_weighted_erm: empty class");
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> values;
    for (const auto& p : cls.members) {
      values.push_back(erm_objective(log, p, spec, kappa));
      best = std::min(best, values.back());
    }
    for (std::size_t i = 0; i < cls.members.size(); ++i) {
      if (values[i] <= best + ErmResult::kTieTolerance) {
        result.argmin.push_back(cls.members[i]);
      }
    }
    result.objective = best;
    return result;
  }

  // AllMaps: the objective separates per x, so minimize each column.
  std::map<std::string, std::array<double, 3>> sums;
  for (const auto& x : log.support()) sums[x] = {0.0, 0.0, 0.0};
  for (const auto& rec : log.records()) {
    auto& row = sums[rec.x];
    row[0] += record_term(rec, Recommendation::NotHire, spec, kappa);
    row[1] += 0.0;
    row[2] += record_term(rec, Recommendation::Hire, spec, kappa);
  }
  constexpr std::array<Recommendation, 3> recs = {
      Recommendation::NotHire, Recommendation::None, Recommendation::Hire};
  std::vector<std::vector<Recommendation>> options;
  double best = 0.0;
  for (const auto& x : log.support()) {
    const auto& row = sums[x];
    const double lo = std::min({row[0], row[1], row[2]});
    std::vector<Recommendation> opts;
    for (std::size_t k = 0; k < 3; ++k) {
      if (row[k] <= lo + ErmResult::kTieTolerance * static_cast<double>(log.records().size())) {
        opts.push_back(recs[k]);
      }
    }
    options.push_back(std::move(opts));
    best += lo;
  }

  std::size_t combos = 1;
  for (const auto& o : options) {
    combos *= o.size();
    if (combos > 531441) {  // 3^12, the enumeration cap
      throw std::runtime_error("cost_weighted_erm: argmin tie set exceeds enumeration cap");
    }
  }
  for (std::size_t i = 0; i < combos; ++i) {
    std::map<std::string, Recommendation> m;
    std::size_t rest = i;
    for (std::size_t k = 0; k < options.size(); ++k) {
      m[log.support()[k]] = options[k][rest % options[k].size()];
      rest /= options[k].size();
    }
    result.argmin.push_back(Policy(std::move(m)));
  }
  result.objective = best / static_cast<double>(log.records().size());
  return result;
}

}  // namespace recpol
