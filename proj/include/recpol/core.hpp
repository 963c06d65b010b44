#pragma once

#include <stdexcept>
#include <string>

namespace recpol {

/// Worker ability revealed after the decision.
enum class Outcome { Bad, Good };

/// Binary treatment choice, ordered NotHire before Hire.
enum class Decision { NotHire, Hire };

/// Signal sent to the decision-maker; None withholds any recommendation.
enum class Recommendation { NotHire, None, Hire };

/// Asymmetric misclassification costs. c_type1 prices a false reject
/// (good worker not hired), c_type2 a false accept (bad worker hired).
struct LossSpec {
  double c_type1;
  double c_type2;

  LossSpec(double type1, double type2) : c_type1(type1), c_type2(type2) {
    if (!(type1 > 0.0) || !(type2 > 0.0)) {
      throw std::invalid_argument("LossSpec: costs must be positive");
    }
  }

  static LossSpec unit() { return LossSpec(1.0, 1.0); }
};

inline double loss(const LossSpec& spec, Outcome y, Decision d) {
  if (y == Outcome::Good && d == Decision::NotHire) return spec.c_type1;
  if (y == Outcome::Bad && d == Decision::Hire) return spec.c_type2;
  return 0.0;
}

/// The zero-loss decision for a known outcome.
inline Decision optimal_decision(Outcome y) {
  return y == Outcome::Good ? Decision::Hire : Decision::NotHire;
}

/// Decision a directional recommendation asks for. None carries no decision.
inline Decision recommended_decision(Recommendation r) {
  switch (r) {
    case Recommendation::NotHire: return Decision::NotHire;
    case Recommendation::Hire: return Decision::Hire;
    default: throw std::invalid_argument("recommended_decision: no decision for None");
  }
}

inline double loss(const LossSpec& spec, Outcome y, Recommendation r) {
  return loss(spec, y, recommended_decision(r));
}

// Wire tokens shared by CSV, JSON and the CLI.
inline std::string to_token(Outcome y) { return y == Outcome::Good ? "G" : "B"; }
inline std::string to_token(Decision d) { return d == Decision::Hire ? "H" : "N"; }
inline std::string to_token(Recommendation r) {
  switch (r) {
    case Recommendation::NotHire: return "N";
    case Recommendation::None: return "none";
    default: return "H";
  }
}

inline Outcome outcome_from_token(const std::string& s) {
  if (s == "G") return Outcome::Good;
  if (s == "B") return Outcome::Bad;
  throw std::invalid_argument("unknown outcome token '" + s + "'");
}

inline Decision decision_from_token(const std::string& s) {
  if (s == "N") return Decision::NotHire;
  if (s == "H") return Decision::Hire;
  throw std::invalid_argument("unknown decision token '" + s + "'");
}

inline Recommendation recommendation_from_token(const std::string& s) {
  if (s == "N") return Recommendation::NotHire;
  if (s == "none") return Recommendation::None;
  if (s == "H") return Recommendation::Hire;
  throw std::invalid_argument("unknown recommendation token '" + s + "'");
}

}  // namespace recpol
