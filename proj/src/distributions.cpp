#include "recpol/distributions.hpp"

#include <stdexcept>

namespace recpol {

namespace {

template <typename Map>
double lookup(const Map& m, const std::string& key, const char* what) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw std::invalid_argument(std::string(what) + ": unknown value '" + key + "'");
  }
  return it->second;
}

}  // namespace

PopulationDistribution::PopulationDistribution(FinitePmf<PopAtom> pmf)
    : pmf_(std::move(pmf)) {
  std::map<std::string, double> good_x, good_u, pu;
  for (const auto& [atom, w] : pmf_.entries()) {
    px_[atom.x] += w;
    pu[atom.u] += w;
    if (atom.y == Outcome::Good) {
      good_x[atom.x] += w;
      good_u[atom.u] += w;
    }
  }
  for (const auto& [x, p] : px_) {
    if (!(p > 0.0)) {
      throw std::invalid_argument("PopulationDistribution: zero mass at x='" + x + "'");
    }
    x_support_.push_back(x);
    good_given_x_[x] = good_x[x] / p;
  }
  for (const auto& [u, p] : pu) {
    if (!(p > 0.0)) {
      throw std::invalid_argument("PopulationDistribution: zero mass at u='" + u + "'");
    }
    u_support_.push_back(u);
    good_given_u_[u] = good_u[u] / p;
  }
}

double PopulationDistribution::p_x(const std::string& x) const {
  return lookup(px_, x, "p_x");
}

double PopulationDistribution::prob_good_given_x(const std::string& x) const {
  return lookup(good_given_x_, x, "prob_good_given_x");
}

double PopulationDistribution::prob_good_given_u(const std::string& u) const {
  return lookup(good_given_u_, u, "prob_good_given_u");
}

BaselineJoint::BaselineJoint(FinitePmf<BaselineAtom> pmf) : pmf_(std::move(pmf)) {
  for (const auto& [atom, w] : pmf_.entries()) px_[atom.x] += w;
  for (const auto& [x, p] : px_) {
    if (!(p > 0.0)) {
      throw std::invalid_argument("BaselineJoint: zero mass at x='" + x + "'");
    }
    x_support_.push_back(x);
  }
}

double BaselineJoint::p_x(const std::string& x) const { return lookup(px_, x, "p_x"); }

double BaselineJoint::baseline_loss(const LossSpec& spec) const {
  return pmf_.expectation(
      [&](const BaselineAtom& a) { return loss(spec, a.y, a.d0); });
}

}  // namespace recpol
