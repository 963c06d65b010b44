#include "recpol/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "recpol/rng.hpp"

namespace recpol {

namespace {

constexpr std::uint64_t kSubjectStreamTag = 0x5B1EC7;
constexpr std::uint64_t kBootstrapStreamTag = 0xB0075;

struct TypeCounts {
  int total = 0;
  int good = 0;
  // per-role splits used by the treatment gates
  int eng = 0, eng_good = 0;
  int sales = 0, sales_good = 0;
  int comm = 0, comm_good = 0;
};

std::map<std::string, TypeCounts> count_by_type(const PopulationSpec& spec) {
  std::map<std::string, TypeCounts> out;
  for (const auto& t : kPersonalityTypes) out[t] = TypeCounts{};
  for (const auto& row : spec.rows) {
    auto it = out.find(row.type);
    if (it == out.end()) continue;  // validated elsewhere
    TypeCounts& c = it->second;
    const int good = row.ability == Outcome::Good ? row.count : 0;
    c.total += row.count;
    c.good += good;
    if (row.role == "Engineering") {
      c.eng += row.count;
      c.eng_good += good;
    } else if (row.role == "Sales") {
      c.sales += row.count;
      c.sales_good += good;
    } else if (row.role == "Communications") {
      c.comm += row.count;
      c.comm_good += good;
    }
  }
  return out;
}

bool at_least_half_good(int good, int total) { return 2 * good >= total; }
bool at_least_half_bad(int good, int total) { return 2 * (total - good) >= total; }

/// Single decision of the role-rational agent: hire iff at least half of
/// the role's applicants are good (equal stakes on both error types).
std::map<std::string, bool> role_rational_hire(const PopulationSpec& spec) {
  std::map<std::string, int> total, good;
  for (const auto& row : spec.rows) {
    total[row.role] += row.count;
    if (row.ability == Outcome::Good) good[row.role] += row.count;
  }
  std::map<std::string, bool> out;
  for (const auto& [role, n] : total) out[role] = at_least_half_good(good[role], n);
  return out;
}

Policy policy_from_tokens(const std::vector<std::string>& tokens) {
  std::map<std::string, Recommendation> m;
  for (std::size_t i = 0; i < kPersonalityTypes.size(); ++i) {
    m[kPersonalityTypes[i]] = recommendation_from_token(tokens[i]);
  }
  return Policy(std::move(m));
}

}  // namespace

PopulationSpec default_population() {
  // Every personality type holds 2 Engineering, 2 Sales and 1 Communications
  // applicant; ability varies so that each constraint binds.
  PopulationSpec spec;
  const auto add = [&spec](const std::string& role, const std::string& type,
                           Outcome ability, int count) {
    spec.rows.push_back(PopulationRow{role, type, ability, count});
  };
  for (const auto& type : kPersonalityTypes) add("Engineering", type, Outcome::Good, 2);
  add("Sales", "A", Outcome::Bad, 2);
  add("Sales", "B", Outcome::Good, 2);
  add("Sales", "C", Outcome::Good, 2);
  add("Sales", "D", Outcome::Good, 2);
  add("Sales", "E", Outcome::Bad, 2);
  add("Communications", "A", Outcome::Bad, 1);
  add("Communications", "B", Outcome::Bad, 1);
  add("Communications", "C", Outcome::Bad, 1);
  add("Communications", "D", Outcome::Good, 1);
  add("Communications", "E", Outcome::Good, 1);
  return spec;
}

PopulationDistribution population_distribution(const PopulationSpec& spec) {
  std::map<PopAtom, double> weights;
  int total = 0;
  for (const auto& row : spec.rows) total += row.count;
  if (total <= 0) throw std::invalid_argument("population_distribution: empty spec");
  for (const auto& row : spec.rows) {
    if (row.count < 0) throw std::invalid_argument("population_distribution: negative count");
    if (row.count == 0) continue;
    weights[PopAtom{row.type, row.role, row.ability}] +=
        static_cast<double>(row.count) / total;
  }
  std::vector<FinitePmf<PopAtom>::Entry> entries(weights.begin(), weights.end());
  return PopulationDistribution(FinitePmf<PopAtom>(std::move(entries)));
}

TreatmentPolicies table3_policies() {
  return TreatmentPolicies{
      policy_from_tokens({"none", "none", "none", "none", "none"}),
      policy_from_tokens({"N", "H", "H", "H", "H"}),
      policy_from_tokens({"N", "H", "H", "H", "N"}),
      policy_from_tokens({"N", "none", "none", "H", "H"}),
      policy_from_tokens({"N", "none", "none", "H", "N"}),
  };
}

TreatmentPolicies derive_treatments(const PopulationSpec& spec) {
  const auto counts = count_by_type(spec);
  std::map<std::string, Recommendation> predictive, complementary, triage, ct;
  for (const auto& type : kPersonalityTypes) {
    const TypeCounts& c = counts.at(type);

    const bool pred_hire = at_least_half_good(c.good, c.total);
    predictive[type] = pred_hire ? Recommendation::Hire : Recommendation::NotHire;

    const bool compl_hire =
        at_least_half_good(c.sales_good + c.comm_good, c.sales + c.comm);
    complementary[type] = compl_hire ? Recommendation::Hire : Recommendation::NotHire;

    // Safety gates: a hire recommendation goes out only if the
    // Communications applicants of the type look good; a not-hire only if
    // the complementary sub-population looks bad.
    if (pred_hire) {
      triage[type] = at_least_half_good(c.comm_good, c.comm) ? Recommendation::Hire
                                                             : Recommendation::None;
    } else {
      triage[type] = at_least_half_bad(c.eng_good + c.sales_good, c.eng + c.sales)
                         ? Recommendation::NotHire
                         : Recommendation::None;
    }
    if (compl_hire) {
      ct[type] = at_least_half_good(c.comm_good, c.comm) ? Recommendation::Hire
                                                         : Recommendation::None;
    } else {
      ct[type] = at_least_half_bad(c.sales_good, c.sales) ? Recommendation::NotHire
                                                          : Recommendation::None;
    }
  }
  return TreatmentPolicies{
      Policy::all_none(kPersonalityTypes), Policy(std::move(predictive)),
      Policy(std::move(complementary)), Policy(std::move(triage)),
      Policy(std::move(ct))};
}

std::vector<std::string> validate_population(const PopulationSpec& spec) {
  std::vector<std::string> violations;
  const std::set<std::string> roles(kRoles.begin(), kRoles.end());
  const std::set<std::string> types(kPersonalityTypes.begin(), kPersonalityTypes.end());

  int total = 0;
  bool structure_ok = true;
  for (const auto& row : spec.rows) {
    if (!roles.count(row.role)) {
      violations.push_back("unknown role '" + row.role + "'");
      structure_ok = false;
    }
    if (!types.count(row.type)) {
      violations.push_back("unknown personality type '" + row.type + "'");
      structure_ok = false;
    }
    if (row.count < 0) {
      violations.push_back("negative count");
      structure_ok = false;
    }
    total += row.count;
  }
  if (total != 25) violations.push_back("total count != 25");
  if (!structure_ok) return violations;

  const auto counts = count_by_type(spec);
  for (const auto& type : kPersonalityTypes) {
    if (counts.at(type).total != 5) {
      violations.push_back("personality type " + type + " does not total 5");
    }
  }

  int eng = 0, eng_good = 0, sales = 0, sales_good = 0, comm = 0, comm_good = 0;
  for (const auto& [type, c] : counts) {
    eng += c.eng;
    eng_good += c.eng_good;
    sales += c.sales;
    sales_good += c.sales_good;
    comm += c.comm;
    comm_good += c.comm_good;
  }
  for (const auto& role : kRoles) {
    const int n = role == "Engineering" ? eng : role == "Sales" ? sales : comm;
    if (n == 0) violations.push_back("role " + role + " empty");
  }
  if (eng_good != eng) violations.push_back("Engineering not all Good");
  if (sales > 0 && 5 * sales_good != 3 * sales) {
    violations.push_back("Sales not 60% Good");
  }
  if (comm > 0 && 5 * comm_good != 2 * comm) {
    violations.push_back("Communications not 40% Good");
  }
  if (total != 25) return violations;  // accuracy checks assume 25 applicants

  // Rational agent with the role signal only.
  const auto hire_by_role = role_rational_hire(spec);
  int role_correct = 0;
  for (const auto& row : spec.rows) {
    const bool hire = hire_by_role.at(row.role);
    const bool correct = hire == (row.ability == Outcome::Good);
    if (correct) role_correct += row.count;
  }
  if (role_correct != 19) violations.push_back("role-only rational accuracy != 19/25");

  // Rational agent with the personality type only (the predictive rule).
  int type_correct = 0;
  for (const auto& [type, c] : counts) {
    type_correct += at_least_half_good(c.good, c.total) ? c.good : c.total - c.good;
  }
  if (type_correct != 19) violations.push_back("type-only rational accuracy != 19/25");

  const TreatmentPolicies derived = derive_treatments(spec);
  const TreatmentPolicies expected = table3_policies();
  const auto check = [&](const Policy& got, const Policy& want, const char* name) {
    if (!(got == want)) {
      violations.push_back(std::string("derived ") + name + " policy differs from Table 3");
    }
  };
  check(derived.predictive, expected.predictive, "Predictive");
  check(derived.complementary, expected.complementary, "Complementary");
  check(derived.triage, expected.triage, "Triage");
  check(derived.complementary_triage, expected.complementary_triage,
        "Complementary Triage");

  // A rational selective complier assisted by Complementary Triage should
  // make exactly one error: passing over the good type-E Communications
  // applicant.
  int errors = 0;
  int expected_error_count = 0;
  for (const auto& row : spec.rows) {
    if (row.count == 0) continue;
    const Recommendation r = derived.complementary_triage.at(row.type);
    bool hire;
    if (row.role == "Engineering" || r == Recommendation::None) {
      hire = hire_by_role.at(row.role);
    } else {
      hire = r == Recommendation::Hire;
    }
    const bool correct = hire == (row.ability == Outcome::Good);
    if (!correct) {
      errors += row.count;
      if (row.role == "Communications" && row.type == "E" &&
          row.ability == Outcome::Good && !hire) {
        expected_error_count += row.count;
      }
    }
  }
  if (errors != 1 || expected_error_count != 1) {
    violations.push_back(
        "rational selective complier under Complementary Triage does not make "
        "exactly one error (the good type-E Communications applicant)");
  }

  return violations;
}

std::vector<Table4Cell> table4_matrix(const PopulationSpec& spec,
                                      const LossSpec& spec_loss) {
  const auto violations = validate_population(spec);
  if (!violations.empty()) {
    throw std::invalid_argument("table4_matrix: population fails validation: " +
                                violations.front());
  }
  const PopulationDistribution pop = population_distribution(spec);
  const TreatmentPolicies named = table3_policies();

  const auto active_random = random_active(0.5);
  const auto active_soph = sophisticated_active(pop, spec_loss);
  const std::set<std::string> ignored = {"Engineering"};

  std::vector<Table4Cell> cells;
  const auto add_cell = [&](const std::string& compliance, const std::string& active,
                            const AgentModel& model, const Policy& named_policy) {
    Table4Cell cell(named_policy);
    cell.compliance = compliance;
    cell.active = active;
    cell.result = brute_force_optimal(pop, model, spec_loss);
    cell.named_in_argmin =
        std::find(cell.result.optimal.begin(), cell.result.optimal.end(),
                  named_policy) != cell.result.optimal.end();
    cells.push_back(std::move(cell));
  };

  add_cell("perfect", "random", perfect_compliance_model(active_random),
           named.predictive);
  add_cell("selective", "random",
           selective_compliance_model(ignored, active_random, pop.u_support()),
           named.complementary);
  add_cell("perfect", "sophisticated", perfect_compliance_model(active_soph),
           named.triage);
  add_cell("selective", "sophisticated",
           selective_compliance_model(ignored, active_soph, pop.u_support()),
           named.complementary_triage);
  return cells;
}

BaselineJoint table6_baseline() {
  struct Row {
    const char* x;
    double h, m_nothire, m_hire;
  };
  // Columns A..E: hire rate, mistake rate among rejections, among hires.
  const Row rows[] = {
      {"A", 0.67, 0.06, 0.43}, {"B", 0.68, 0.52, 0.07}, {"C", 0.65, 0.58, 0.08},
      {"D", 0.68, 1.00, 0.00}, {"E", 0.67, 0.53, 0.36},
  };
  std::vector<FinitePmf<BaselineAtom>::Entry> entries;
  for (const Row& r : rows) {
    const double p = 0.20;
    entries.push_back({BaselineAtom{r.x, Decision::Hire, Outcome::Bad},
                       p * r.h * r.m_hire});
    entries.push_back({BaselineAtom{r.x, Decision::Hire, Outcome::Good},
                       p * r.h * (1.0 - r.m_hire)});
    entries.push_back({BaselineAtom{r.x, Decision::NotHire, Outcome::Good},
                       p * (1.0 - r.h) * r.m_nothire});
    entries.push_back({BaselineAtom{r.x, Decision::NotHire, Outcome::Bad},
                       p * (1.0 - r.h) * (1.0 - r.m_nothire)});
  }
  return BaselineJoint(FinitePmf<BaselineAtom>(std::move(entries)));
}

std::string type_e_crossover_note() {
  return "type E hire->not-hire crossover: computed kappa 4.128 from the control-arm "
         "mistake rates; the published chart places the switch at 5.128, which equals "
         "1 + kappa at the computed crossing";
}

const std::map<std::string, double>& table5_reference_optimal_pct() {
  static const std::map<std::string, double> ref = {
      {"control", 69.5},
      {"predictive", 76.2},
      {"complementary", 81.6},
      {"triage", 78.8},
      {"complementary-triage", 80.1},
  };
  return ref;
}

namespace {

struct SubjectCounts {
  double n = 0, optimal = 0, hire = 0, rec = 0, dev = 0;
};

double pct(double part, double whole) { return whole > 0 ? 100.0 * part / whole : 0.0; }

}  // namespace

SimulationSummary summarize_records(const std::vector<AssistedRecord>& records,
                                    std::uint64_t seed, int bootstrap_resamples) {
  if (records.empty()) throw std::invalid_argument("summarize_records: empty log");
  std::map<std::string, SubjectCounts> by_subject;
  for (const auto& rec : records) {
    SubjectCounts& c = by_subject[rec.subject_id];
    c.n += 1;
    if (rec.d == optimal_decision(rec.y)) c.optimal += 1;
    if (rec.d == Decision::Hire) c.hire += 1;
    if (rec.r != Recommendation::None) {
      c.rec += 1;
      if (rec.d != recommended_decision(rec.r)) c.dev += 1;
    }
  }
  std::vector<SubjectCounts> subjects;
  subjects.reserve(by_subject.size());
  for (const auto& [_, c] : by_subject) subjects.push_back(c);

  SimulationSummary out;
  out.subjects = subjects.size();
  out.decisions = records.size();
  double n = 0, optimal = 0, hire = 0, rec = 0, dev = 0;
  for (const auto& c : subjects) {
    n += c.n;
    optimal += c.optimal;
    hire += c.hire;
    rec += c.rec;
    dev += c.dev;
  }
  out.optimal_pct = pct(optimal, n);
  out.hire_pct = pct(hire, n);
  const bool has_recs = rec > 0;
  if (has_recs) out.deviated_pct = pct(dev, rec);

  // Subject-clustered bootstrap.
  Rng rng = Rng::derive(seed, kBootstrapStreamTag);
  const std::size_t s = subjects.size();
  std::vector<double> opt_b, hire_b, dev_b;
  opt_b.reserve(bootstrap_resamples);
  hire_b.reserve(bootstrap_resamples);
  for (int b = 0; b < bootstrap_resamples; ++b) {
    double bn = 0, bopt = 0, bhire = 0, brec = 0, bdev = 0;
    for (std::size_t i = 0; i < s; ++i) {
      const SubjectCounts& c = subjects[rng.below(s)];
      bn += c.n;
      bopt += c.optimal;
      bhire += c.hire;
      brec += c.rec;
      bdev += c.dev;
    }
    opt_b.push_back(pct(bopt, bn));
    hire_b.push_back(pct(bhire, bn));
    if (has_recs) dev_b.push_back(brec > 0 ? pct(bdev, brec) : 0.0);
  }
  const auto stddev = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  out.optimal_se = stddev(opt_b);
  out.hire_se = stddev(hire_b);
  if (has_recs) out.deviated_se = stddev(dev_b);
  return out;
}

SimulationResult simulate_experiment(const PopulationSpec& spec, const Policy& policy,
                                     const AgentModel& model, int n_subjects,
                                     std::uint64_t seed,
                                     const std::string& treatment_label) {
  if (n_subjects < 1) throw std::invalid_argument("simulate_experiment: n_subjects >= 1");
  struct Applicant {
    std::string type, role;
    Outcome ability;
  };
  std::vector<Applicant> applicants;
  for (const auto& row : spec.rows) {
    for (int i = 0; i < row.count; ++i) {
      applicants.push_back(Applicant{row.type, row.role, row.ability});
    }
  }
  std::sort(applicants.begin(), applicants.end(), [](const auto& a, const auto& b) {
    return std::tie(a.type, a.role, a.ability) < std::tie(b.type, b.role, b.ability);
  });

  SimulationResult result;
  result.log.reserve(static_cast<std::size_t>(n_subjects) * applicants.size());
  for (int s = 0; s < n_subjects; ++s) {
    Rng rng = Rng::derive(seed, kSubjectStreamTag, static_cast<std::uint64_t>(s));
    std::vector<std::size_t> order(applicants.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }
    std::string digits = std::to_string(s);
    const std::string sid =
        "s" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
    for (const std::size_t idx : order) {
      const Applicant& a = applicants[idx];
      AssistedRecord rec;
      rec.subject_id = sid;
      rec.treatment = treatment_label;
      rec.x = a.type;
      rec.u = a.role;
      rec.r = policy.at(a.type);
      rec.y = a.ability;
      rec.d = realize_decision(model, a.role, rec.r, rng);
      result.log.push_back(std::move(rec));
    }
  }
  result.summary = summarize_records(result.log, seed);
  return result;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

std::vector<AssistedRecord> parse_assisted_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("row 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line);
  const std::vector<std::string> required = {"subject_id", "treatment", "x",
                                             "u",          "r",         "y",
                                             "d"};
  if (header.size() < required.size() ||
      !std::equal(required.begin(), required.end(), header.begin())) {
    throw std::runtime_error(
        "row 1: expected header 'subject_id,treatment,x,u,r,y,d[,...]'");
  }
  std::vector<AssistedRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " fields");
    }
    AssistedRecord rec;
    rec.subject_id = fields[0];
    rec.treatment = fields[1];
    rec.x = fields[2];
    rec.u = fields[3];
    try {
      rec.r = recommendation_from_token(fields[4]);
      rec.y = outcome_from_token(fields[5]);
      rec.d = decision_from_token(fields[6]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("row " + std::to_string(row) + ": " + e.what());
    }
    for (std::size_t k = required.size(); k < header.size(); ++k) {
      rec.extra[header[k]] = fields[k];
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw std::runtime_error("log has no records");
  return records;
}

std::vector<AssistedRecord> parse_assisted_log_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_assisted_log_csv(in);
}

void write_assisted_log_csv(std::ostream& out,
                            const std::vector<AssistedRecord>& records) {
  std::vector<std::string> extra_cols;
  if (!records.empty()) {
    for (const auto& [k, _] : records.front().extra) extra_cols.push_back(k);
  }
  out << "subject_id,treatment,x,u,r,y,d";
  for (const auto& k : extra_cols) out << ',' << k;
  out << '\n';
  for (const auto& rec : records) {
    out << rec.subject_id << ',' << rec.treatment << ',' << rec.x << ',' << rec.u << ','
        << to_token(rec.r) << ',' << to_token(rec.y) << ',' << to_token(rec.d);
    for (const auto& k : extra_cols) {
      auto it = rec.extra.find(k);
      out << ',' << (it == rec.extra.end() ? "" : it->second);
    }
    out << '\n';
  }
}

std::vector<TreatmentSummary> summarize_assisted_log(
    const std::vector<AssistedRecord>& records, std::uint64_t seed,
    const std::optional<std::pair<std::string, std::string>>& filter,
    int bootstrap_resamples) {
  std::map<std::string, std::vector<AssistedRecord>> by_treatment;
  for (const auto& rec : records) {
    if (filter) {
      auto it = rec.extra.find(filter->first);
      if (it == rec.extra.end() || it->second != filter->second) continue;
    }
    by_treatment[rec.treatment].push_back(rec);
  }
  std::vector<TreatmentSummary> out;
  for (const auto& [treatment, recs] : by_treatment) {
    out.push_back(TreatmentSummary{
        treatment, summarize_records(recs, seed, bootstrap_resamples)});
  }
  return out;
}

}  // namespace recpol
