#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "recpol/core.hpp"
#include "recpol/pmf.hpp"

namespace recpol {

/// Joint atom over (characteristic, private signal, outcome).
struct PopAtom {
  std::string x;
  std::string u;
  Outcome y;
  auto operator<=>(const PopAtom&) const = default;
};

/// Joint atom over (characteristic, unassisted decision, outcome).
struct BaselineAtom {
  std::string x;
  Decision d0;
  Outcome y;
  auto operator<=>(const BaselineAtom&) const = default;
};

/// Exact joint law of (X, U, Y). Every x must carry positive mass.
class PopulationDistribution {
 public:
  explicit PopulationDistribution(FinitePmf<PopAtom> pmf);

  const FinitePmf<PopAtom>& pmf() const { return pmf_; }
  const std::vector<std::string>& x_support() const { return x_support_; }
  const std::vector<std::string>& u_support() const { return u_support_; }

  double p_x(const std::string& x) const;
  double prob_good_given_x(const std::string& x) const;
  double prob_good_given_u(const std::string& u) const;

 private:
  FinitePmf<PopAtom> pmf_;
  std::vector<std::string> x_support_;
  std::vector<std::string> u_support_;
  std::map<std::string, double> px_;
  std::map<std::string, double> good_given_x_;
  std::map<std::string, double> good_given_u_;
};

/// Exact joint law of (X, D0, Y) observed in unassisted decision data.
class BaselineJoint {
 public:
  explicit BaselineJoint(FinitePmf<BaselineAtom> pmf);

  const FinitePmf<BaselineAtom>& pmf() const { return pmf_; }
  const std::vector<std::string>& x_support() const { return x_support_; }
  double p_x(const std::string& x) const;

  /// Expected unassisted loss E[l(Y, D0)].
  double baseline_loss(const LossSpec& spec) const;

 private:
  FinitePmf<BaselineAtom> pmf_;
  std::vector<std::string> x_support_;
  std::map<std::string, double> px_;
};

}  // namespace recpol
