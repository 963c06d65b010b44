#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "recpol/acceptance.hpp"
#include "recpol/decomposition.hpp"
#include "recpol/estimation.hpp"
#include "recpol/experiment.hpp"
#include "recpol/lfm.hpp"
#include "recpol/policy.hpp"
#include "recpol/serialization.hpp"

namespace {

using recpol::Json;

/// Thrown when inputs are well-formed but fail a domain validation; maps to
/// exit code 2 (plain errors exit 1).
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

recpol::LossSpec parse_costs(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw std::runtime_error("--costs expects 'c1,c2'");
  }
  return recpol::LossSpec(std::stod(text.substr(0, comma)),
                          std::stod(text.substr(comma + 1)));
}

recpol::PopulationSpec load_population(const std::string& arg) {
  if (arg == "default") return recpol::default_population();
  return recpol::population_from_json(recpol::read_json_file(arg));
}

recpol::BaselineJoint load_baseline(const std::string& arg) {
  if (arg == "table6") return recpol::table6_baseline();
  return recpol::baseline_from_json(recpol::read_json_file(arg));
}

recpol::Policy load_policy(const std::string& arg) {
  const auto named = [&]() -> std::optional<recpol::Policy> {
    const auto t = recpol::table3_policies();
    if (arg == "control") return t.control;
    if (arg == "predictive") return t.predictive;
    if (arg == "complementary") return t.complementary;
    if (arg == "triage") return t.triage;
    if (arg == "complementary-triage") return t.complementary_triage;
    return std::nullopt;
  }();
  if (named) return *named;
  if (!arg.empty() && arg.front() == '{') {
    return recpol::policy_from_json(Json::parse(arg));
  }
  return recpol::policy_from_json(recpol::read_json_file(arg));
}

recpol::AgentModel load_model(const std::string& arg,
                              const recpol::PopulationDistribution& pop,
                              const recpol::LossSpec& spec) {
  Json j;
  if (!arg.empty() && arg.front() == '{') {
    j = Json::parse(arg);
  } else {
    j = recpol::read_json_file(arg);
  }
  return recpol::model_from_json(j, pop, spec);
}

std::vector<recpol::Policy> load_policy_list(const std::string& path) {
  const Json j = recpol::read_json_file(path);
  if (!j.is_array()) throw std::runtime_error("policy list must be a JSON array");
  std::vector<recpol::Policy> out;
  for (const auto& item : j) out.push_back(recpol::policy_from_json(item));
  if (out.empty()) throw std::runtime_error("policy list is empty");
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) recpol::write_text_file(out_path, text);
}

std::size_t policy_index(const recpol::Policy& p,
                         const std::vector<std::string>& support) {
  std::size_t idx = 0;
  for (const auto& x : support) {
    const auto r = p.at(x);
    idx = idx * 3 + (r == recpol::Recommendation::NotHire
                         ? 0
                         : r == recpol::Recommendation::None ? 1 : 2);
  }
  return idx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design and verification of recommendation policies for binary "
               "treatment decisions"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::string costs_text = "1,1";
  std::uint64_t seed = 1u;
  unsigned threads = 1;
  std::string out_path;
  app.add_option("--costs", costs_text, "error costs as 'c1,c2'")->capture_default_str();
  app.add_option("--seed", seed, "master seed; all randomness derives from it")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker cap for enumeration-heavy commands")
      ->capture_default_str();
  app.add_option("--out", out_path, "also write the primary output to this file");
  app.set_config("--config", "", "read options from a TOML/INI file");

  // ---- eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "expected loss and TE/RE decomposition");
  {
    static std::string pop_arg = "default", policy_arg, model_arg, baseline_arg;
    eval->add_option("--population", pop_arg, "'default' or a population JSON file");
    eval->add_option("--policy", policy_arg,
                     "named policy, inline JSON, or a policy JSON file")
        ->required();
    eval->add_option("--model", model_arg, "agent model JSON (inline or file)")
        ->required();
    eval->add_option("--baseline-model", baseline_arg,
                     "unassisted-decision model; defaults to --model");
    eval->callback([&] {
      action = [&]() {
        const auto spec = parse_costs(costs_text);
        const auto pop = recpol::population_distribution(load_population(pop_arg));
        const auto policy = load_policy(policy_arg);
        const auto model = load_model(model_arg, pop, spec);
        const auto baseline =
            baseline_arg.empty() ? model : load_model(baseline_arg, pop, spec);
        const auto report = recpol::decompose(policy, pop, model, baseline, spec);
        const auto split =
            recpol::compliance_response_effect(policy, pop, model, baseline, spec);
        const auto drift =
            recpol::assumption2_bound_check(policy, pop, model, baseline, spec);
        Json j = recpol::decomposition_to_json(report);
        j["re_ignore"] = split.re_ignore;
        j["re_active_shift"] = split.re_active_shift;
        j["active_vs_baseline"] = drift ? Json(*drift) : Json(nullptr);
        j["policy"] = recpol::policy_to_json(policy);
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- decompose -----------------------------------------------------------
  auto* decompose = app.add_subcommand(
      "decompose", "TE/RE table for a candidate set with Pareto flags (CSV)");
  {
    static std::string pop_arg = "default", model_arg, baseline_arg, policies_arg;
    decompose->add_option("--population", pop_arg, "'default' or JSON file");
    decompose->add_option("--model", model_arg, "agent model JSON")->required();
    decompose->add_option("--baseline-model", baseline_arg, "defaults to --model");
    decompose->add_option("--policies", policies_arg,
                          "JSON array of candidate policies; default all maps");
    decompose->callback([&] {
      action = [&]() {
        const auto spec = parse_costs(costs_text);
        const auto pop = recpol::population_distribution(load_population(pop_arg));
        const auto model = load_model(model_arg, pop, spec);
        const auto baseline =
            baseline_arg.empty() ? model : load_model(baseline_arg, pop, spec);
        std::vector<recpol::Policy> candidates;
        if (!policies_arg.empty()) {
          candidates = load_policy_list(policies_arg);
        } else {
          const recpol::PolicyEnumeration all(pop.x_support());
          for (std::size_t i = 0; i < all.size(); ++i) candidates.push_back(all.at(i));
        }
        std::vector<recpol::ParetoEntry> entries(candidates.size(),
                                                 {candidates.front(), 0.0, 0.0});
        const auto fill = [&](std::size_t lo, std::size_t hi) {
          for (std::size_t i = lo; i < hi; ++i) {
            const auto report =
                recpol::decompose(candidates[i], pop, model, baseline, spec);
            entries[i] = {candidates[i], report.te, report.re};
          }
        };
        const unsigned workers =
            std::max(1u, std::min<unsigned>(threads, 16));
        if (workers == 1 || candidates.size() < 256) {
          fill(0, candidates.size());
        } else {
          std::vector<std::future<void>> futures;
          const std::size_t step = (candidates.size() + workers - 1) / workers;
          for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = std::min(candidates.size(), w * step);
            const std::size_t hi = std::min(candidates.size(), lo + step);
            if (lo < hi) {
              futures.push_back(
                  std::async(std::launch::async, [&fill, lo, hi] { fill(lo, hi); }));
            }
          }
          for (auto& f : futures) f.get();
        }
        const auto front = recpol::pareto_front(entries);
        const auto on_front = [&](const recpol::Policy& p) {
          for (const auto& e : front) {
            if (e.policy == p) return true;
          }
          return false;
        };
        std::ostringstream csv;
        csv << "policy_id,te,re,total,on_front\n";
        for (const auto& e : entries) {
          csv << e.policy.id() << ',' << e.te << ',' << e.re << ',' << e.te + e.re
              << ',' << (on_front(e.policy) ? 1 : 0) << '\n';
        }
        emit(csv.str(), out_path);
        return 0;
      };
    });
  }

  // ---- lfm -----------------------------------------------------------------
  auto* lfm_cmd = app.add_subcommand("lfm", "mistake-threshold minimax policy");
  {
    static std::string baseline_arg = "table6";
    static double kappa = 1.0;
    lfm_cmd->add_option("--baseline", baseline_arg, "'table6' or baseline JSON file");
    lfm_cmd->add_option("--kappa", kappa, "compliance-incidence ratio (>= 0)")
        ->capture_default_str();
    lfm_cmd->callback([&] {
      action = [&]() {
        const auto spec = parse_costs(costs_text);
        const auto stats = recpol::mistake_stats(load_baseline(baseline_arg));
        const auto policy = recpol::lfm_policy(stats, spec, kappa);
        Json j{{"kappa", kappa}, {"policy", recpol::policy_to_json(policy)}};
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- sweep ---------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "recommendation bands over a kappa range (CSV)");
  {
    static std::string baseline_arg = "table6";
    static double kappa_min = 0.0, kappa_max = 10.0;
    sweep->add_option("--baseline", baseline_arg, "'table6' or baseline JSON file");
    sweep->add_option("--kappa-min", kappa_min, "")->capture_default_str();
    sweep->add_option("--kappa-max", kappa_max, "")->capture_default_str();
    sweep->callback([&] {
      action = [&]() {
        if (!(kappa_min >= 0.0) || !(kappa_max > kappa_min)) {
          throw ValidationFailure("sweep: need 0 <= kappa-min < kappa-max");
        }
        const auto spec = parse_costs(costs_text);
        const auto stats = recpol::mistake_stats(load_baseline(baseline_arg));
        std::ostringstream csv;
        if (baseline_arg == "table6") {
          csv << "# note: " << recpol::type_e_crossover_note() << "\n";
        }
        csv << "x,band_start_kappa,band_end_kappa,recommendation\n";
        for (const auto& x : stats.support()) {
          for (const auto& band : recpol::kappa_bands(stats, spec, x)) {
            const double lo = std::max(band.lo, kappa_min);
            const double hi = band.hi ? std::min(*band.hi, kappa_max) : kappa_max;
            if (lo >= hi) continue;
            csv << x << ',' << lo << ',' << hi << ',' << recpol::to_token(band.rec)
                << '\n';
          }
        }
        emit(csv.str(), out_path);
        return 0;
      };
    });
  }

  // ---- oracle ---------------------------------------------------------------
  auto* oracle = app.add_subcommand(
      "oracle", "grid-adversary minimax check over all policies");
  {
    static std::string baseline_arg = "table6", policies_arg;
    static double kappa = 1.0, epsilon = 1.0, grid_step = 0.05;
    oracle->add_option("--baseline", baseline_arg, "'table6' or baseline JSON file");
    oracle->add_option("--kappa", kappa, "")->capture_default_str();
    oracle->add_option("--epsilon", epsilon, "compliance floor in (0,1]")
        ->capture_default_str();
    oracle->add_option("--grid-step", grid_step, "")->capture_default_str();
    oracle->add_option("--policies", policies_arg,
                       "restrict to a JSON array of policies (the "
                       "mistake-threshold policy is always added)");
    oracle->callback([&] {
      action = [&]() {
        const auto spec = parse_costs(costs_text);
        const auto base = load_baseline(baseline_arg);
        const recpol::ComplianceAssumptions assumptions(kappa, epsilon);
        const auto result =
            recpol::minimax_grid_oracle(base, spec, assumptions, grid_step);
        Json j{{"kappa", kappa},
               {"epsilon", epsilon},
               {"grid_step", grid_step}};
        if (policies_arg.empty()) {
          Json argmin = Json::array();
          for (const auto& p : result.argmin) argmin.push_back(recpol::policy_to_json(p));
          j["value"] = result.value;
          j["argmin"] = argmin;
        } else {
          auto list = load_policy_list(policies_arg);
          const auto threshold_policy =
              recpol::lfm_policy(recpol::mistake_stats(base), spec, kappa);
          if (std::find(list.begin(), list.end(), threshold_policy) == list.end()) {
            std::cerr << "warning: policy list excludes the mistake-threshold "
                         "policy; adding it\n";
            list.push_back(threshold_policy);
          }
          double best = std::numeric_limits<double>::infinity();
          std::vector<double> values;
          for (const auto& p : list) {
            values.push_back(result.per_policy[policy_index(p, result.support)]);
            best = std::min(best, values.back());
          }
          Json rows = Json::array();
          Json argmin = Json::array();
          for (std::size_t i = 0; i < list.size(); ++i) {
            rows.push_back(Json{{"policy", recpol::policy_to_json(list[i])},
                                {"worst_case", values[i]}});
            if (values[i] <= best + recpol::OracleResult::kTieTolerance) {
              argmin.push_back(recpol::policy_to_json(list[i]));
            }
          }
          j["value"] = best;
          j["argmin"] = argmin;
          j["policies"] = rows;
        }
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- fit -----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "mistake statistics and plug-in policy "
                                        "from an unassisted decision log");
  {
    static std::string log_arg, support_arg;
    static double smoothing = 0.0, kappa = 1.0;
    fit->add_option("--log", log_arg, "decision log CSV (subject_id,x,u,y,d0)")
        ->required();
    fit->add_option("--support", support_arg, "comma-separated x support");
    fit->add_option("--smoothing", smoothing, "additive smoothing for conditionals")
        ->capture_default_str();
    fit->add_option("--kappa", kappa, "")->capture_default_str();
    fit->callback([&] {
      action = [&]() {
        std::optional<std::vector<std::string>> support;
        if (!support_arg.empty()) {
          std::vector<std::string> xs;
          std::stringstream ss(support_arg);
          std::string item;
          while (std::getline(ss, item, ',')) xs.push_back(item);
          support = xs;
        }
        const auto spec = parse_costs(costs_text);
        const auto log = recpol::parse_decision_log_csv_file(log_arg, support);
        const auto stats = recpol::fit_mistake_stats(log, smoothing);
        const auto policy = recpol::plugin_policy(stats, spec, kappa);
        Json j{{"kappa", kappa},
               {"smoothing", smoothing},
               {"stats", recpol::stats_to_json(stats)},
               {"policy", recpol::policy_to_json(policy)}};
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- erm -----------------------------------------------------------------
  auto* erm = app.add_subcommand(
      "erm", "cost-weighted empirical risk minimization over a policy class");
  {
    static std::string log_arg, policies_arg;
    static double kappa = 1.0;
    erm->add_option("--log", log_arg, "decision log CSV")->required();
    erm->add_option("--policies", policies_arg,
                    "JSON array restricting the class; default all maps");
    erm->add_option("--kappa", kappa, "")->capture_default_str();
    erm->callback([&] {
      action = [&]() {
        const auto spec = parse_costs(costs_text);
        const auto log = recpol::parse_decision_log_csv_file(log_arg);
        const auto cls = policies_arg.empty()
                             ? recpol::PolicyClass::all_maps()
                             : recpol::PolicyClass::explicit_list(
                                   load_policy_list(policies_arg));
        const auto result = recpol::cost_weighted_erm(log, cls, spec, kappa);
        constexpr std::size_t kMaxListed = 200;
        Json argmin = Json::array();
        for (std::size_t i = 0; i < result.argmin.size() && i < kMaxListed; ++i) {
          argmin.push_back(recpol::policy_to_json(result.argmin[i]));
        }
        Json j{{"kappa", kappa},
               {"objective", result.objective},
               {"argmin_count", result.argmin.size()},
               {"argmin", argmin}};
        if (result.argmin.size() > kMaxListed) j["argmin_truncated"] = true;
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "synthetic run of the hiring game");
  {
    static std::string pop_arg = "default", policy_arg, model_arg, out_log,
                       treatment = "custom";
    static int subjects = 100;
    simulate->add_option("--population", pop_arg, "'default' or JSON file");
    simulate->add_option("--policy", policy_arg, "named policy, JSON, or file")
        ->required();
    simulate->add_option("--model", model_arg, "agent model JSON")->required();
    simulate->add_option("--subjects", subjects, "")->capture_default_str();
    simulate->add_option("--treatment", treatment, "label written to the log")
        ->capture_default_str();
    simulate->add_option("--out-log", out_log, "write the decision log CSV here");
    simulate->callback([&] {
      action = [&]() {
        const auto spec = parse_costs(costs_text);
        const auto population = load_population(pop_arg);
        const auto pop = recpol::population_distribution(population);
        const auto policy = load_policy(policy_arg);
        const auto model = load_model(model_arg, pop, spec);
        const auto result = recpol::simulate_experiment(population, policy, model,
                                                        subjects, seed, treatment);
        if (!out_log.empty()) {
          std::ostringstream csv;
          recpol::write_assisted_log_csv(csv, result.log);
          recpol::write_text_file(out_log, csv.str());
        }
        Json j{{"treatment", treatment},
               {"seed", seed},
               {"summary", recpol::summary_to_json(result.summary)}};
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- summarize -------------------------------------------------------------
  auto* summarize = app.add_subcommand(
      "summarize", "per-treatment summary of an assisted decision log");
  {
    static std::string log_arg, filter_arg;
    summarize->add_option("--log", log_arg, "assisted log CSV")->required();
    summarize->add_option("--filter", filter_arg,
                          "'column=value' filter on an extra column");
    summarize->callback([&] {
      action = [&]() {
        const auto records = recpol::parse_assisted_log_csv_file(log_arg);
        std::optional<std::pair<std::string, std::string>> filter;
        if (!filter_arg.empty()) {
          const auto eq = filter_arg.find('=');
          if (eq == std::string::npos) {
            throw std::runtime_error("--filter expects 'column=value'");
          }
          filter = {filter_arg.substr(0, eq), filter_arg.substr(eq + 1)};
        }
        const auto summaries = recpol::summarize_assisted_log(records, seed, filter);
        const auto& reference = recpol::table5_reference_optimal_pct();
        Json rows = Json::array();
        for (const auto& ts : summaries) {
          Json row{{"treatment", ts.treatment},
                   {"summary", recpol::summary_to_json(ts.summary)}};
          auto it = reference.find(ts.treatment);
          row["reference_optimal_pct"] =
              it != reference.end() ? Json(it->second) : Json(nullptr);
          rows.push_back(row);
        }
        Json j{{"seed", seed}, {"treatments", rows}};
        emit(j.dump(2) + "\n", out_path);
        return 0;
      };
    });
  }

  // ---- population ------------------------------------------------------------
  auto* population = app.add_subcommand("population", "population utilities");
  population->require_subcommand(1);
  auto* validate = population->add_subcommand("validate", "check design constraints");
  {
    static std::string pop_arg = "default";
    validate->add_option("--population", pop_arg, "'default' or JSON file");
    validate->callback([&] {
      action = [&]() {
        const auto violations = recpol::validate_population(load_population(pop_arg));
        Json j{{"violations", violations}};
        emit(j.dump(2) + "\n", out_path);
        if (!violations.empty()) {
          std::cerr << "invalid: population violates " << violations.size()
                    << " constraint(s)\n";
          return 2;
        }
        return 0;
      };
    });
  }

  // ---- replicate ---------------------------------------------------------------
  auto* replicate = app.add_subcommand(
      "replicate", "run the verification suite and write a deterministic report");
  {
    replicate->callback([&] {
      action = [&]() {
        const auto results = recpol::run_acceptance_criteria(seed);
        bool all_pass = true;
        for (const auto& r : results) {
          std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name
                    << " (" << r.seconds << "s)\n";
          all_pass = all_pass && r.pass;
        }
        emit(recpol::acceptance_report_json(seed, results), out_path);
        return all_pass ? 0 : 2;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "usage: " << e.what() << "\n";
    return 1;
  }

  try {
    return action();
  } catch (const ValidationFailure& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
