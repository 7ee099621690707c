#include "qaixi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qaixi/errors.hpp"

namespace qaixi {

using nlohmann::json;

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json json_num(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
}

void require_seed(const ExperimentConfig& cfg) {
  if (!cfg.has_seed) {
    throw ConfigError("a seed is required; none is drawn from the clock");
  }
}

size_t find_model(const std::vector<ModelPtr>& models, const std::string& name) {
  for (size_t q = 0; q < models.size(); ++q) {
    if (models[q]->name() == name) return q;
  }
  std::string known;
  for (const auto& m : models) {
    if (!known.empty()) known += ", ";
    known += m->name();
  }
  throw ConfigError("truth model '" + name + "' not in class (have: " + known +
                    ")");
}

std::vector<double> column_mean(const std::vector<std::vector<double>>& rows) {
  std::vector<double> mean(rows.front().size(), 0.0);
  for (const auto& row : rows) {
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
  }
  for (double& m : mean) m /= double(rows.size());
  return mean;
}

std::vector<double> column_se(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& mean) {
  std::vector<double> se(mean.size(), 0.0);
  if (rows.size() < 2) return se;
  for (const auto& row : rows) {
    for (size_t i = 0; i < mean.size(); ++i) {
      double d = row[i] - mean[i];
      se[i] += d * d;
    }
  }
  for (double& s : se) {
    s = std::sqrt(s / double(rows.size() - 1) / double(rows.size()));
  }
  return se;
}

// Least-squares slope of ln y on ln t over t in [t_min, y.size()].
double loglog_slope(const std::vector<double>& y, int t_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    int t = static_cast<int>(i) + 1;
    if (t < t_min || !(y[i] > 0.0)) continue;
    double lx = std::log(double(t)), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

// ---------------------------------------------------------------------------

ConvergenceReport cmd_converge(const ExperimentConfig& cfg) {
  require_seed(cfg);
  if (cfg.episodes < 1 || cfg.cycles < 1) {
    throw ConfigError("converge: episodes and cycles must be >= 1");
  }
  std::vector<ModelPtr> models = cfg.class_dir.empty()
                                     ? builtin_converge_class()
                                     : load_class_directory(cfg.class_dir);
  std::string truth_name =
      cfg.truth_name.empty() ? kBuiltinConvergeTruth : cfg.truth_name;
  size_t truth_idx = find_model(models, truth_name);
  const EnvironmentModel& truth = *models[truth_idx];

  PlanningConfig plan(cfg.horizon, cfg.discount);
  GapStatistics gap = gap_statistics(models, truth_idx);

  const int T = cfg.cycles;
  std::vector<std::vector<double>> div_rows, td_rows;
  div_rows.reserve(cfg.episodes);

  std::ostringstream traj;
  traj << "episode,t";
  for (const auto& m : models) traj << ",w_" << m->name();
  traj << ",divergence,trace_distance,bound_over_t\n";

  double d0_sum = 0.0;
  for (int e = 0; e < cfg.episodes; ++e) {
    EpisodeResult res =
        run_episode(truth, make_agent(mixture_init(models)), plan, T,
                    derive_seed(cfg.seed, static_cast<std::uint64_t>(e)),
                    cfg.policy);
    d0_sum += res.steps[0].divergence;
    std::vector<double> div(T), td(T);
    for (int t = 1; t <= T; ++t) {
      const StepRecord& s = res.steps[t];
      div[t - 1] = s.divergence;
      td[t - 1] = s.trace_distance;
      traj << e << "," << t;
      for (double w : s.weights) traj << "," << fmt_double(w);
      traj << "," << fmt_double(s.divergence) << ","
           << fmt_double(s.trace_distance) << ","
           << fmt_double(gap.mdl_bound / t) << "\n";
    }
    div_rows.push_back(std::move(div));
    td_rows.push_back(std::move(td));
  }

  ConvergenceReport report;
  report.episodes = cfg.episodes;
  report.cycles = T;
  report.gap = gap;
  report.d0_mean = d0_sum / cfg.episodes;
  report.mean_divergence = column_mean(div_rows);
  report.se_divergence = column_se(div_rows, report.mean_divergence);
  report.mean_trace_distance = column_mean(td_rows);
  report.se_trace_distance = column_se(td_rows, report.mean_trace_distance);
  report.bound_curve.resize(T);
  for (int t = 1; t <= T; ++t) report.bound_curve[t - 1] = gap.mdl_bound / t;
  for (int t = 1; t <= T; ++t) {
    if (report.mean_divergence[t - 1] >
        report.bound_curve[t - 1] + 2.0 * report.se_divergence[t - 1]) {
      ++report.bound_violations;
    }
  }
  report.loglog_slope = loglog_slope(report.mean_trace_distance, 10);

  if (!cfg.out_path.empty()) {
    std::filesystem::create_directories(cfg.out_path);
    write_text_file(cfg.out_path + "/trajectories.csv", traj.str());

    std::ostringstream summary;
    summary << "t,mean_divergence,se_divergence,mean_trace_distance,"
               "se_trace_distance,bound_over_t\n";
    for (int t = 1; t <= T; ++t) {
      summary << t << "," << fmt_double(report.mean_divergence[t - 1]) << ","
              << fmt_double(report.se_divergence[t - 1]) << ","
              << fmt_double(report.mean_trace_distance[t - 1]) << ","
              << fmt_double(report.se_trace_distance[t - 1]) << ","
              << fmt_double(report.bound_curve[t - 1]) << "\n";
    }
    write_text_file(cfg.out_path + "/summary.csv", summary.str());

    json doc;
    doc["experiment"] = "converge";
    doc["truth"] = truth.name();
    doc["episodes"] = cfg.episodes;
    doc["cycles"] = T;
    doc["seed"] = cfg.seed;
    doc["policy"] = cfg.policy == PolicyKind::Qaixi ? "qaixi" : "random";
    doc["gap"] = {{"g", json_num(gap.g)},
                  {"mdl_bound", json_num(gap.mdl_bound)},
                  {"dilution_bound", json_num(gap.dilution_bound)}};
    doc["d0_mean"] = json_num(report.d0_mean);
    doc["bound_violations"] = report.bound_violations;
    doc["loglog_slope"] = json_num(report.loglog_slope);
    json names = json::array();
    for (const auto& m : models) names.push_back(m->name());
    doc["models"] = names;
    write_text_file(cfg.out_path + "/report.json", doc.dump(2) + "\n");
  }
  return report;
}

// ---------------------------------------------------------------------------

ChshReport cmd_chsh(const ExperimentConfig& cfg) {
  require_seed(cfg);
  if (cfg.episodes < 1 || cfg.cycles < 1) {
    throw ConfigError("chsh: episodes and cycles must be >= 1");
  }
  std::vector<ModelPtr> models = cfg.class_dir.empty()
                                     ? builtin_chsh_class()
                                     : load_class_directory(cfg.class_dir);
  std::string truth_name =
      cfg.truth_name.empty() ? kBuiltinChshTruth : cfg.truth_name;
  size_t truth_idx = find_model(models, truth_name);
  const EnvironmentModel& truth = *models[truth_idx];
  PlanningConfig plan(cfg.horizon, cfg.discount);

  const int T = cfg.cycles;
  const size_t num_models = models.size();
  std::vector<std::vector<double>> weight_sums(
      num_models, std::vector<double>(T, 0.0));
  std::vector<double> reward_mean(T, 0.0);
  double total_reward = 0.0;

  for (int e = 0; e < cfg.episodes; ++e) {
    EpisodeResult res =
        run_episode(truth, make_agent(mixture_init(models)), plan, T,
                    derive_seed(cfg.seed, static_cast<std::uint64_t>(e)),
                    cfg.policy);
    total_reward += res.total_reward;
    for (int t = 1; t <= T; ++t) {
      reward_mean[t - 1] += res.steps[t].reward;
      for (size_t q = 0; q < num_models; ++q) {
        weight_sums[q][t - 1] += res.steps[t].weights[q];
      }
    }
  }
  for (auto& row : weight_sums) {
    for (double& w : row) w /= cfg.episodes;
  }
  for (double& r : reward_mean) r /= cfg.episodes;

  ChshReport report;
  report.episodes = cfg.episodes;
  report.rounds = T;
  report.mean_reward = total_reward / (double(cfg.episodes) * T);
  report.exact_win_probability = chsh_exact_win_probability(truth);
  report.best_lhv_win_rate = chsh_lhv_brute_force().best_win_rate;
  for (const auto& m : models) report.hypothesis_names.push_back(m->name());
  for (size_t q = 0; q < num_models; ++q) {
    report.final_weights.push_back(weight_sums[q][T - 1]);
  }
  report.truth_weight_trajectory = weight_sums[truth_idx];
  for (int t = 1; t <= T; ++t) {
    if (weight_sums[truth_idx][t - 1] >= 0.99) {
      report.first_round_weight_above_99 = t;
      break;
    }
  }

  if (!cfg.out_path.empty()) {
    std::filesystem::create_directories(cfg.out_path);
    std::ostringstream rounds;
    rounds << "round,mean_reward";
    for (const auto& m : models) rounds << ",w_" << m->name();
    rounds << "\n";
    for (int t = 1; t <= T; ++t) {
      rounds << t << "," << fmt_double(reward_mean[t - 1]);
      for (size_t q = 0; q < num_models; ++q) {
        rounds << "," << fmt_double(weight_sums[q][t - 1]);
      }
      rounds << "\n";
    }
    write_text_file(cfg.out_path + "/rounds.csv", rounds.str());

    json doc;
    doc["experiment"] = "chsh";
    doc["truth"] = truth.name();
    doc["episodes"] = cfg.episodes;
    doc["rounds"] = T;
    doc["seed"] = cfg.seed;
    doc["mean_reward"] = json_num(report.mean_reward);
    doc["exact_win_probability"] = json_num(report.exact_win_probability);
    doc["best_lhv_win_rate"] = json_num(report.best_lhv_win_rate);
    doc["first_round_weight_above_99"] = report.first_round_weight_above_99;
    json weights;
    for (size_t q = 0; q < num_models; ++q) {
      weights[report.hypothesis_names[q]] = json_num(report.final_weights[q]);
    }
    doc["final_weights"] = weights;
    write_text_file(cfg.out_path + "/report.json", doc.dump(2) + "\n");
  }
  return report;
}

// ---------------------------------------------------------------------------

KsSet ks_set_from_json_string(const std::string& text) {
  json doc = json::parse(text);
  const int d = doc.at("dim").get<int>();
  KsSet set;
  for (const json& row : doc.at("vectors")) {
    if (static_cast<int>(row.size()) != d) {
      throw std::invalid_argument("ks set: vector length != dim");
    }
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = row[i].get<double>();
    v.normalize();
    Eigen::MatrixXd p = v * v.transpose();
    set.projectors.push_back(p.cast<Complex>());
  }
  for (const json& ctx : doc.at("contexts")) {
    std::vector<int> indices;
    for (const json& i : ctx) indices.push_back(i.get<int>());
    set.contexts.push_back(std::move(indices));
  }
  return set;
}

KsSet load_ks_set_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open projector-set file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ks_set_from_json_string(buffer.str());
  } catch (const std::exception& e) {
    throw ConfigError("failed to parse " + path + ": " + e.what());
  }
}

KsReport cmd_ks(const ExperimentConfig& cfg) {
  require_seed(cfg);
  KsSet set = cfg.class_dir.empty() ? ks_eighteen_vector_set()
                                    : load_ks_set_file(cfg.class_dir);
  // Environment construction re-checks orthogonality and completeness.
  EnvironmentModel env = make_ks_env("ks-env", set, 0);

  KsReport report;
  report.num_projectors = static_cast<int>(set.projectors.size());
  report.num_contexts = static_cast<int>(set.contexts.size());
  const int d = static_cast<int>(set.projectors.front().rows());
  for (const auto& context : set.contexts) {
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (int idx : context) sum += set.projectors[idx];
    report.max_context_residual =
        std::max(report.max_context_residual,
                 max_abs(sum - ComplexMatrix::Identity(d, d)));
  }

  KsColouringResult colouring = ks_uncolourability_check(set);
  report.colourable = colouring.colourable;
  report.valid_assignments = colouring.valid_assignments;

  // Context-dependence demo: find two contexts sharing a projector, plus a
  // probe context, and compare the probe's distribution after measuring
  // either first context (unconditioned on the first outcome).
  int shared = -1, ctx_a = -1, ctx_b = -1;
  for (size_t a = 0; a < set.contexts.size() && shared < 0; ++a) {
    for (size_t b = a + 1; b < set.contexts.size() && shared < 0; ++b) {
      for (int ia : set.contexts[a]) {
        if (std::count(set.contexts[b].begin(), set.contexts[b].end(), ia)) {
          shared = ia;
          ctx_a = static_cast<int>(a);
          ctx_b = static_cast<int>(b);
          break;
        }
      }
    }
  }
  if (shared >= 0) {
    int probe = -1;
    for (size_t c = 0; c < set.contexts.size(); ++c) {
      if (static_cast<int>(c) != ctx_a && static_cast<int>(c) != ctx_b) {
        probe = static_cast<int>(c);
        break;
      }
    }
    if (probe >= 0) {
      // Fixed generic preparation; any state off the measured bases works.
      Eigen::VectorXd psi(d);
      for (int i = 0; i < d; ++i) psi(i) = double(i + 1);
      psi.normalize();
      ComplexMatrix rho = (psi * psi.transpose()).cast<Complex>();

      auto decohere = [&](int ctx) {
        ComplexMatrix out = ComplexMatrix::Zero(d, d);
        for (int idx : set.contexts[ctx]) {
          out += set.projectors[idx] * rho * set.projectors[idx];
        }
        return DensityOperator(out);
      };
      const Instrument& probe_instr =
          env.action("ctx" + std::to_string(probe)).instrument();
      report.probe_after_a = instrument_distribution(probe_instr, decohere(ctx_a));
      report.probe_after_b = instrument_distribution(probe_instr, decohere(ctx_b));
      for (size_t k = 0; k < report.probe_after_a.size(); ++k) {
        report.max_probe_difference =
            std::max(report.max_probe_difference,
                     std::abs(report.probe_after_a[k] - report.probe_after_b[k]));
      }
      report.shared_projector = "v" + std::to_string(shared);
      report.first_context_a = "ctx" + std::to_string(ctx_a);
      report.first_context_b = "ctx" + std::to_string(ctx_b);
      report.probe_context = "ctx" + std::to_string(probe);
    }
  }

  // Short sampled trajectory (random context per cycle).
  {
    std::vector<ModelPtr> single{std::make_shared<EnvironmentModel>(env)};
    PlanningConfig plan(1, 0.0);
    int cycles = std::min(cfg.cycles, 16);
    EpisodeResult res = run_episode(env, make_agent(mixture_init(single)), plan,
                                    cycles, cfg.seed, PolicyKind::Random);
    report.demo_history = std::move(res.history);
  }

  if (!cfg.out_path.empty()) {
    std::filesystem::create_directories(cfg.out_path);
    json doc;
    doc["experiment"] = "ks";
    doc["projectors"] = report.num_projectors;
    doc["contexts"] = report.num_contexts;
    doc["max_context_residual"] = json_num(report.max_context_residual);
    doc["colourable"] = report.colourable;
    doc["valid_assignments"] = report.valid_assignments;
    doc["shared_projector"] = report.shared_projector;
    doc["first_context_a"] = report.first_context_a;
    doc["first_context_b"] = report.first_context_b;
    doc["probe_context"] = report.probe_context;
    doc["probe_after_a"] = report.probe_after_a;
    doc["probe_after_b"] = report.probe_after_b;
    doc["max_probe_difference"] = json_num(report.max_probe_difference);
    json demo = json::array();
    for (const auto& c : report.demo_history.cycles) {
      json entry;
      entry["action"] = c.action;
      entry["context"] = c.context;
      entry["outcome"] = c.outcome ? json(*c.outcome) : json(nullptr);
      entry["reward"] = c.reward;
      demo.push_back(entry);
    }
    doc["demo_trajectory"] = demo;
    write_text_file(cfg.out_path + "/report.json", doc.dump(2) + "\n");
  }
  return report;
}

// ---------------------------------------------------------------------------

ValueReport cmd_value(const ExperimentConfig& cfg) {
  std::vector<ModelPtr> models = cfg.class_dir.empty()
                                     ? builtin_commuting_class()
                                     : load_class_directory(cfg.class_dir);
  MixtureState mix = mixture_init(std::move(models));
  PlanningConfig plan(cfg.horizon, cfg.discount);
  ValueReport report;
  report.value = planning_value(mix, plan, plan.horizon);
  report.action = qaixi_policy(mix, plan);
  if (!cfg.out_path.empty()) {
    json doc;
    doc["experiment"] = "value";
    doc["value"] = json_num(report.value);
    doc["action"] = report.action;
    doc["horizon"] = plan.horizon;
    doc["discount"] = plan.discount;
    write_text_file(cfg.out_path, doc.dump(2) + "\n");
  }
  return report;
}

RunReport cmd_run(const ExperimentConfig& cfg) {
  require_seed(cfg);
  if (cfg.cycles < 0) throw ConfigError("run: negative cycle count");
  std::vector<ModelPtr> models = cfg.class_dir.empty()
                                     ? builtin_commuting_class()
                                     : load_class_directory(cfg.class_dir);
  std::string truth_name =
      cfg.truth_name.empty() ? models.front()->name() : cfg.truth_name;
  size_t truth_idx = find_model(models, truth_name);
  const EnvironmentModel& truth = *models[truth_idx];
  PlanningConfig plan(cfg.horizon, cfg.discount);

  RunReport report;
  report.truth = truth.name();
  report.episode = run_episode(truth, make_agent(mixture_init(models)), plan,
                               cfg.cycles, cfg.seed, cfg.policy);

  if (!cfg.out_path.empty()) {
    json doc;
    doc["experiment"] = "run";
    doc["truth"] = report.truth;
    doc["seed"] = cfg.seed;
    doc["cycles"] = cfg.cycles;
    doc["policy"] = cfg.policy == PolicyKind::Qaixi ? "qaixi" : "random";
    doc["total_reward"] = json_num(report.episode.total_reward);
    json history = json::array();
    int t = 1;
    for (const auto& c : report.episode.history.cycles) {
      json entry;
      entry["t"] = t++;
      entry["action"] = c.action;
      entry["context"] = c.context;
      entry["outcome"] = c.outcome ? json(*c.outcome) : json(nullptr);
      entry["reward"] = c.reward;
      history.push_back(entry);
    }
    doc["history"] = history;
    json weights;
    const StepRecord& last = report.episode.steps.back();
    for (size_t q = 0; q < models.size(); ++q) {
      weights[models[q]->name()] = json_num(last.weights[q]);
    }
    doc["final_weights"] = weights;
    write_text_file(cfg.out_path, doc.dump(2) + "\n");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Built-in classes

std::vector<ModelPtr> builtin_converge_class() {
  struct CoinSpec {
    const char* name;
    double p;
    int bits;
  };
  // Competitors sit at staggered distances from the truth so that their
  // posterior resolution times spread across the measurement window.
  constexpr CoinSpec coins[] = {{"coin-a", 0.20, 1},
                                {"coin-b", 0.50, 2},
                                {"coin-c", 0.65, 2},
                                {"coin-d", 0.55, 2}};
  std::vector<ModelPtr> models;
  for (const auto& c : coins) {
    models.push_back(std::make_shared<EnvironmentModel>(make_classical_env(
        c.name,
        {{"measure", OutcomeDistribution{{"0", c.p}, {"1", 1.0 - c.p}}}},
        {{"measure", {{"0", 1.0}, {"1", 0.0}}}}, c.bits)));
  }
  return models;
}

std::vector<ModelPtr> builtin_chsh_class() {
  std::vector<ModelPtr> models;
  models.push_back(std::make_shared<EnvironmentModel>(
      make_chsh_env(kBuiltinChshTruth, chsh_optimal_angles(BellState::PsiMinus),
                    BellState::PsiMinus, 4)));
  models.push_back(std::make_shared<EnvironmentModel>(
      make_chsh_lhv_uniform("lhv-uniform", 1)));
  models.push_back(std::make_shared<EnvironmentModel>(
      make_chsh_lhv_deterministic("lhv-det", {1, 1, 1, 1}, 2)));
  return models;
}

std::vector<ModelPtr> builtin_commuting_class() {
  std::map<std::string, std::map<std::string, double>> rewards{
      {"a", {{"0", 1.0}, {"1", 0.0}}}, {"b", {{"0", 0.2}, {"1", 0.7}}}};
  std::vector<ModelPtr> models;
  models.push_back(std::make_shared<EnvironmentModel>(make_classical_env(
      "bandit-x",
      {{"a", OutcomeDistribution{{"0", 0.8}, {"1", 0.2}}},
       {"b", OutcomeDistribution{{"0", 0.3}, {"1", 0.7}}}},
      rewards, 1)));
  models.push_back(std::make_shared<EnvironmentModel>(make_classical_env(
      "bandit-y",
      {{"a", OutcomeDistribution{{"0", 0.4}, {"1", 0.6}}},
       {"b", OutcomeDistribution{{"0", 0.6}, {"1", 0.4}}}},
      rewards, 2)));
  return models;
}

void write_builtin_classes(const std::string& dir) {
  auto write_class = [&](const std::string& sub,
                         const std::vector<ModelPtr>& models) {
    std::filesystem::create_directories(dir + "/" + sub);
    for (const auto& m : models) {
      save_environment_file(*m, dir + "/" + sub + "/" + m->name() + ".json");
    }
  };
  write_class("converge-coins", builtin_converge_class());
  write_class("chsh", builtin_chsh_class());
  write_class("commuting", builtin_commuting_class());
}

}  // namespace qaixi
