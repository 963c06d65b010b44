#include "recpol/policy.hpp"

#include <array>
#include <cmath>
#include <future>
#include <stdexcept>

namespace recpol {

namespace {

constexpr std::array<Recommendation, 3> kLexOrder = {
    Recommendation::NotHire, Recommendation::None, Recommendation::Hire};

void require_same_support(const std::vector<std::string>& policy_support,
                          const std::vector<std::string>& x_support) {
  if (policy_support != x_support) {
    throw std::invalid_argument("policy support does not match population x-support");
  }
}

}  // namespace

Policy::Policy(std::map<std::string, Recommendation> mapping)
    : mapping_(std::move(mapping)) {
  if (mapping_.empty()) throw std::invalid_argument("Policy: empty support");
}

std::vector<std::string> Policy::support() const {
  std::vector<std::string> out;
  out.reserve(mapping_.size());
  for (const auto& [x, _] : mapping_) out.push_back(x);
  return out;
}

Recommendation Policy::at(const std::string& x) const {
  auto it = mapping_.find(x);
  if (it == mapping_.end()) {
    throw std::invalid_argument("Policy: x='" + x + "' outside support");
  }
  return it->second;
}

std::string Policy::id() const {
  std::string out;
  for (const auto& [x, r] : mapping_) {
    if (!out.empty()) out += ',';
    out += to_token(r);
  }
  return out;
}

Policy Policy::constant(const std::vector<std::string>& support, Recommendation r) {
  std::map<std::string, Recommendation> m;
  for (const auto& x : support) m[x] = r;
  return Policy(std::move(m));
}

PolicyEnumeration::PolicyEnumeration(std::vector<std::string> support,
                                     std::size_t support_cap)
    : support_(std::move(support)) {
  if (support_.empty()) throw std::invalid_argument("PolicyEnumeration: empty support");
  if (support_.size() > support_cap) {
    throw std::invalid_argument("PolicyEnumeration: support exceeds cap of " +
                                std::to_string(support_cap));
  }
  count_ = 1;
  for (std::size_t i = 0; i < support_.size(); ++i) count_ *= 3;
}

Policy PolicyEnumeration::at(std::size_t index) const {
  if (index >= count_) throw std::out_of_range("PolicyEnumeration: index");
  std::map<std::string, Recommendation> m;
  std::size_t rest = index;
  for (auto it = support_.rbegin(); it != support_.rend(); ++it) {
    m[*it] = kLexOrder[rest % 3];
    rest /= 3;
  }
  return Policy(std::move(m));
}

double evaluate_policy_exact(const Policy& policy, const PopulationDistribution& pop,
                             const AgentModel& model, const LossSpec& spec) {
  require_same_support(policy.support(), pop.x_support());
  StableSum acc;
  for (const auto& [atom, w] : pop.pmf().entries()) {
    acc.add(w * expected_decision_loss(model, atom.u, policy.at(atom.x), atom.y, spec));
  }
  return acc.value();
}

Policy optimal_decision_policy(const PopulationDistribution& pop,
                               const LossSpec& spec) {
  std::map<std::string, Recommendation> m;
  for (const auto& x : pop.x_support()) {
    const double good = pop.prob_good_given_x(x);
    m[x] = spec.c_type2 * (1.0 - good) <= spec.c_type1 * good ? Recommendation::Hire
                                                              : Recommendation::NotHire;
  }
  return Policy(std::move(m));
}

Policy optimal_triage_policy(const BaselineJoint& base, const LossSpec& spec) {
  // Per-x masses of outcomes and of baseline mistakes.
  struct Cell {
    double good = 0.0, bad = 0.0, miss_good = 0.0, hire_bad = 0.0;
  };
  std::map<std::string, Cell> cells;
  for (const auto& [atom, w] : base.pmf().entries()) {
    Cell& c = cells[atom.x];
    if (atom.y == Outcome::Good) {
      c.good += w;
      if (atom.d0 == Decision::NotHire) c.miss_good += w;
    } else {
      c.bad += w;
      if (atom.d0 == Decision::Hire) c.hire_bad += w;
    }
  }
  std::map<std::string, Recommendation> m;
  for (const auto& x : base.x_support()) {
    const Cell& c = cells[x];
    const double px = base.p_x(x);
    const double cost_n = spec.c_type1 * (c.good / px);
    const double cost_h = spec.c_type2 * (c.bad / px);
    const double cost_none =
        spec.c_type1 * (c.miss_good / px) + spec.c_type2 * (c.hire_bad / px);
    const bool n_ok = cost_n <= cost_none;
    const bool h_ok = cost_h <= cost_none;
    if (n_ok && h_ok) {
      m[x] = cost_n <= cost_h ? Recommendation::NotHire : Recommendation::Hire;
    } else if (n_ok) {
      m[x] = Recommendation::NotHire;
    } else if (h_ok) {
      m[x] = Recommendation::Hire;
    } else {
      m[x] = Recommendation::None;
    }
  }
  return Policy(std::move(m));
}

std::map<std::string, std::array<double, 3>> policy_loss_table(
    const PopulationDistribution& pop, const AgentModel& model,
    const LossSpec& spec) {
  std::map<std::string, std::array<double, 3>> table;
  for (const auto& x : pop.x_support()) table[x] = {0.0, 0.0, 0.0};
  for (const auto& [atom, w] : pop.pmf().entries()) {
    auto& row = table[atom.x];
    for (std::size_t k = 0; k < kLexOrder.size(); ++k) {
      row[k] += w * expected_decision_loss(model, atom.u, kLexOrder[k], atom.y, spec);
    }
  }
  return table;
}

namespace {

double table_value(const std::map<std::string, std::array<double, 3>>& table,
                   const Policy& policy) {
  double total = 0.0;  // plain sum: keeps pointwise domination monotone
  for (const auto& [x, row] : table) {
    const Recommendation r = policy.at(x);
    total += row[r == Recommendation::NotHire ? 0 : r == Recommendation::None ? 1 : 2];
  }
  return total;
}

struct ChunkResult {
  double best = 0.0;
  std::vector<std::size_t> ties;
};

}  // namespace

BruteForceResult brute_force_optimal(const PopulationDistribution& pop,
                                     const AgentModel& model, const LossSpec& spec,
                                     const std::vector<Policy>* candidates,
                                     unsigned threads) {
  const auto table = policy_loss_table(pop, model, spec);

  const auto value_of = [&](const Policy& p) {
    require_same_support(p.support(), pop.x_support());
    return table_value(table, p);
  };

  BruteForceResult result;
  if (candidates != nullptr) {
    if (candidates->empty()) {
      throw std::invalid_argument("brute_force_optimal: empty candidate set");
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> values;
    values.reserve(candidates->size());
    for (const auto& p : *candidates) {
      values.push_back(value_of(p));
      best = std::min(best, values.back());
    }
    for (std::size_t i = 0; i < candidates->size(); ++i) {
      if (values[i] <= best + BruteForceResult::kTieTolerance) {
        result.optimal.push_back((*candidates)[i]);
      }
    }
    result.value = best;
    return result;
  }

  const PolicyEnumeration all(pop.x_support());
  const std::size_t n = all.size();
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, 16));

  auto scan = [&](std::size_t lo, std::size_t hi) {
    ChunkResult chunk;
    chunk.best = std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = table_value(table, all.at(i));
      if (v < chunk.best - BruteForceResult::kTieTolerance) {
        chunk.best = v;
        chunk.ties.assign(1, i);
      } else if (v <= chunk.best + BruteForceResult::kTieTolerance) {
        chunk.best = std::min(chunk.best, v);
        chunk.ties.push_back(i);
      }
    }
    return chunk;
  };

  std::vector<ChunkResult> chunks;
  if (workers == 1 || n < 4096) {
    chunks.push_back(scan(0, n));
  } else {
    std::vector<std::future<ChunkResult>> futures;
    const std::size_t step = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min<std::size_t>(w * step, n);
      const std::size_t hi = std::min<std::size_t>(lo + step, n);
      if (lo < hi) {
        futures.push_back(
            std::async(std::launch::async, [&scan, lo, hi] { return scan(lo, hi); }));
      }
    }
    for (auto& f : futures) chunks.push_back(f.get());
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : chunks) best = std::min(best, c.best);
  std::vector<std::size_t> ties;
  for (const auto& c : chunks) {
    for (std::size_t i : c.ties) {
      if (table_value(table, all.at(i)) <= best + BruteForceResult::kTieTolerance) {
        ties.push_back(i);
      }
    }
  }
  std::sort(ties.begin(), ties.end());
  for (std::size_t i : ties) result.optimal.push_back(all.at(i));
  result.value = best;
  return result;
}

}  // namespace recpol
