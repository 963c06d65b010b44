#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace recpol {

/// Compensated (Neumaier) accumulator. Used everywhere an expectation is
/// summed so results do not depend on atom insertion order.
class StableSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Exact finite discrete distribution over atoms of type `Atom`.
/// Atoms are stored sorted and must be distinct; weights are nonnegative
/// and normalized to 1 within 1e-12.
template <typename Atom>
class FinitePmf {
 public:
  using Entry = std::pair<Atom, double>;

  static constexpr double kNormTolerance = 1e-12;

  explicit FinitePmf(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
      throw std::invalid_argument("FinitePmf: empty support");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    StableSum total;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const double w = entries_[i].second;
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("FinitePmf: weights must be finite and >= 0");
      }
      if (i > 0 && !(entries_[i - 1].first < entries_[i].first)) {
        throw std::invalid_argument("FinitePmf: duplicate atom");
      }
      total.add(w);
    }
    if (std::abs(total.value() - 1.0) > kNormTolerance) {
      throw std::invalid_argument("FinitePmf: weights do not sum to 1");
    }
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  template <typename Fn>
  double expectation(Fn&& fn) const {
    StableSum acc;
    for (const Entry& e : entries_) acc.add(e.second * fn(e.first));
    return acc.value();
  }

  /// Probability of the event described by `pred`.
  template <typename Pred>
  double mass_where(Pred&& pred) const {
    StableSum acc;
    for (const Entry& e : entries_) {
      if (pred(e.first)) acc.add(e.second);
    }
    return acc.value();
  }

 private:
  std::vector<Entry> entries_;
};

}  // namespace recpol
