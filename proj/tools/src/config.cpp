#include "poscomp/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "poscomp/errors.hpp"

namespace poscomp::cli {

using nlohmann::json;

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Strict view of one JSON object: every key must be consumed before
// finish(), otherwise it is reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join_path(path_, key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(path(key), "missing required field");
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key), "expected a finite number");
    return d;
  }
  double number(const std::string& key, double def) { return has(key) ? number(key) : def; }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int def) { return has(key) ? integer(key) : def; }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(path(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) {
    return has(key) ? string(key) : def;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    return has(key) ? numbers(key) : def;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a module-level validate() and rewrites its error with the path.
template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

// ---- parsing -------------------------------------------------------------

FamilyParams parse_family(const json& j, const std::string& path, const std::string& id) {
  ObjectReader r(j, path);
  FamilyParams f;
  f.id = r.string("id", id);
  f.gamma = r.number("gamma");
  f.p = r.number("p");
  const auto mode = r.string("rationality", "bounded");
  if (mode == "bounded") {
    f.rationality = Rationality::Bounded;
  } else if (mode == "rational") {
    f.rationality = Rationality::Rational;
  } else {
    throw ConfigError(r.path("rationality"), "expected 'bounded' or 'rational'");
  }
  r.finish();
  checked(path, [&] { f.validate(); });
  return f;
}

Rationality parse_rationality(const std::string& s, const std::string& path) {
  if (s == "bounded") return Rationality::Bounded;
  if (s == "rational") return Rationality::Rational;
  throw ConfigError(path, "expected 'bounded' or 'rational'");
}

Distribution parse_distribution(const json& j, const std::string& path) {
  if (j.is_number()) return ExplicitDist{{j.get<double>()}};
  ObjectReader r(j, path);
  const auto kind = r.string("dist");
  Distribution d;
  if (kind == "uniform") {
    d = UniformDist{r.number("lo"), r.number("hi")};
  } else if (kind == "normal") {
    NormalDist n;
    n.mean = r.number("mean");
    n.sd = r.number("sd");
    n.min = r.number("min", n.min);
    d = n;
  } else if (kind == "lognormal") {
    d = LogNormalDist{r.number("mu"), r.number("sigma")};
  } else if (kind == "explicit") {
    d = ExplicitDist{r.numbers("values")};
  } else {
    throw ConfigError(r.path("dist"), "expected uniform, normal, lognormal or explicit");
  }
  r.finish();
  return d;
}

PopulationSpec parse_population(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PopulationSpec p;
  p.n = r.integer("n");
  p.gamma_dist = parse_distribution(r.raw("gamma"), r.path("gamma"));
  if (r.has("p")) p.p_dist = parse_distribution(r.raw("p"), r.path("p"));
  p.rationality = parse_rationality(r.string("rationality", "bounded"), r.path("rationality"));
  p.seed = r.u64("seed", 0);
  r.finish();
  checked(path, [&] { p.validate(); });
  return p;
}

ThresholdSpec parse_threshold(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto mode = r.string("mode");
  ThresholdSpec t = ThresholdSpec::mean_plus_k_sigma(0.0);
  if (mode == "fixed") {
    t = ThresholdSpec::fixed(r.number("s_cut"));
  } else if (mode == "mean_plus_k_sigma") {
    t = ThresholdSpec::mean_plus_k_sigma(r.number("k"));
  } else {
    throw ConfigError(r.path("mode"), "expected 'fixed' or 'mean_plus_k_sigma'");
  }
  r.finish();
  return t;
}

SimConfig parse_sim(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SimConfig s;
  if (r.has("threshold")) s.threshold = parse_threshold(r.raw("threshold"), r.path("threshold"));
  s.initial_effort = r.number("initial_effort", s.initial_effort);
  s.initial_efforts = r.numbers("initial_efforts", {});
  s.rounds_max = r.integer("rounds_max", s.rounds_max);
  s.divergence_cap = r.number("divergence_cap", s.divergence_cap);
  s.quit_payoff = r.number("quit_payoff", s.quit_payoff);
  s.t_hard_cap = r.number("t_hard_cap", s.t_hard_cap);
  s.quitters_in_pool = r.boolean("quitters_in_pool", s.quitters_in_pool);
  r.finish();
  checked(path, [&] { s.validate(); });
  return s;
}

WageModel parse_wages(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  WageModel w;
  w.w_high = r.number("w_high", w.w_high);
  w.w_low = r.number("w_low", w.w_low);
  w.beta = r.number("beta", w.beta);
  r.finish();
  checked(path, [&] { w.validate(); });
  return w;
}

GameConfig parse_game(const json& j) {
  const std::string path = "game";
  ObjectReader r(j, path);
  GameConfig g;
  g.setup.fam1 = parse_family(r.raw("family1"), r.path("family1"), "family1");
  g.setup.fam2 = parse_family(r.raw("family2"), r.path("family2"), "family2");
  g.setup.t_obey = r.number("t_obey");
  g.setup.t_hard_cap = r.number("t_hard_cap", g.setup.t_hard_cap);
  g.rounds = r.integer("rounds", g.rounds);
  const auto scheme = r.string("update", "simultaneous");
  if (scheme == "simultaneous") {
    g.scheme = UpdateScheme::Simultaneous;
  } else if (scheme == "alternating") {
    g.scheme = UpdateScheme::Alternating;
  } else {
    throw ConfigError(r.path("update"), "expected 'simultaneous' or 'alternating'");
  }
  if (r.has("reference_profile")) {
    const auto v = r.numbers("reference_profile");
    if (v.size() != 2) throw ConfigError(r.path("reference_profile"), "expected [t1, t2]");
    g.reference_profile = std::make_pair(v[0], v[1]);
  }
  r.finish();
  checked(path, [&] { g.setup.validate(); });
  if (g.rounds < 1) throw ConfigError(r.path("rounds"), "must be >= 1");
  return g;
}

void check_grid(ObjectReader& r, double t_max, double step) {
  if (!(t_max > 0.0)) throw ConfigError(r.path("t_max"), "must be > 0");
  if (!(step > 0.0) || step > t_max) throw ConfigError(r.path("step"), "must lie in (0, t_max]");
  if (t_max / step > 1e6) throw ConfigError(r.path("step"), "grid larger than 1e6 points");
}

Figure1Config parse_figure1(const json& j) {
  ObjectReader r(j, "figure1");
  Figure1Config f;
  f.gamma = r.number("gamma", f.gamma);
  f.p = r.number("p", f.p);
  f.s_cuts = r.numbers("s_cut", f.s_cuts);
  f.t_max = r.number("t_max", f.t_max);
  f.step = r.number("step", f.step);
  r.finish();
  if (!(f.gamma > 0.0)) throw ConfigError(r.path("gamma"), "must be > 0");
  if (!(f.p > 0.0)) throw ConfigError(r.path("p"), "must be > 0");
  if (f.s_cuts.empty()) throw ConfigError(r.path("s_cut"), "needs at least one value");
  check_grid(r, f.t_max, f.step);
  return f;
}

Figure2Config parse_figure2(const json& j) {
  ObjectReader r(j, "figure2");
  Figure2Config f;
  f.gamma = r.number("gamma", f.gamma);
  f.mean_gamma = r.number("mean_gamma", f.mean_gamma);
  f.p = r.number("p", f.p);
  f.k = r.number("k", f.k);
  f.mean_t = r.number("mean_t", f.mean_t);
  f.sigmas = r.numbers("sigma", f.sigmas);
  f.t_max = r.number("t_max", f.t_max);
  f.step = r.number("step", f.step);
  r.finish();
  if (!(f.gamma > 0.0)) throw ConfigError(r.path("gamma"), "must be > 0");
  if (!(f.p > 0.0)) throw ConfigError(r.path("p"), "must be > 0");
  if (!(f.mean_gamma > 0.0)) throw ConfigError(r.path("mean_gamma"), "must be > 0");
  if (!(f.mean_t >= 0.0)) throw ConfigError(r.path("mean_t"), "must be >= 0");
  if (f.sigmas.empty()) throw ConfigError(r.path("sigma"), "needs at least one value");
  for (double s : f.sigmas) {
    if (!(s >= 0.0)) throw ConfigError(r.path("sigma"), "values must be >= 0");
  }
  check_grid(r, f.t_max, f.step);
  return f;
}

SimulateConfig parse_simulate(const json& j) {
  ObjectReader r(j, "simulate");
  SimulateConfig s;
  s.population = parse_population(r.raw("population"), r.path("population"));
  if (r.has("sim")) s.sim = parse_sim(r.raw("sim"), r.path("sim"));
  r.finish();
  return s;
}

PolicyScenario parse_scenario(const json& j, const std::string& path,
                              const std::optional<PopulationSpec>& pop,
                              const SimConfig& sim) {
  ObjectReader r(j, path);
  PolicyScenario sc;
  sc.name = r.string("name");
  const auto kind = r.string("kind");
  if (r.has("population")) {
    sc.base_pop = parse_population(r.raw("population"), r.path("population"));
  } else if (pop) {
    sc.base_pop = *pop;
  } else {
    throw ConfigError(r.path("population"), "missing required field (no policy-level default)");
  }
  sc.sim = r.has("sim") ? parse_sim(r.raw("sim"), r.path("sim")) : sim;

  if (kind == "cee") {
    sc.kind = CeeBaseline{};
  } else if (kind == "diversion") {
    Diversion d;
    d.keep_fraction = r.number("keep_fraction", d.keep_fraction);
    d.subsidy = r.number("subsidy", d.subsidy);
    d.rank_after_first_round = r.boolean("rank_after_first_round", d.rank_after_first_round);
    sc.kind = d;
  } else if (kind == "beta_reduction") {
    BetaReduction b;
    if (r.has("wages")) b.wages = parse_wages(r.raw("wages"), r.path("wages"));
    b.beta_target = r.number("beta_target", b.beta_target);
    b.s_cut = r.number("s_cut", b.s_cut);
    b.wage_p = r.number("wage_p", b.wage_p);
    sc.kind = b;
  } else if (kind == "exam_redesign") {
    ExamRedesign e;
    e.aptitude_weight = r.number("aptitude_weight", e.aptitude_weight);
    sc.kind = e;
  } else {
    throw ConfigError(r.path("kind"), "expected cee, diversion, beta_reduction or exam_redesign");
  }
  r.finish();
  checked(path, [&] { sc.validate(); });
  return sc;
}

PolicyConfig parse_policy(const json& j) {
  ObjectReader r(j, "policy");
  std::optional<PopulationSpec> pop;
  if (r.has("population")) pop = parse_population(r.raw("population"), r.path("population"));
  SimConfig sim;
  if (r.has("sim")) sim = parse_sim(r.raw("sim"), r.path("sim"));
  const json& list = r.raw("scenarios");
  if (!list.is_array() || list.empty()) {
    throw ConfigError(r.path("scenarios"), "expected a non-empty array");
  }
  PolicyConfig p;
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto path = r.path("scenarios") + "[" + std::to_string(i) + "]";
    p.scenarios.push_back(parse_scenario(list[i], path, pop, sim));
    if (!names.insert(p.scenarios.back().name).second) {
      throw ConfigError(path + ".name", "duplicate scenario name");
    }
  }
  r.finish();
  return p;
}

OutputOptions parse_output(const json& j) {
  ObjectReader r(j, "output");
  OutputOptions o;
  o.dir = r.string("dir", o.dir);
  if (r.has("formats")) {
    const json& v = r.raw("formats");
    if (!v.is_array()) throw ConfigError(r.path("formats"), "expected an array");
    o.formats.clear();
    for (const auto& f : v) {
      if (!f.is_string()) throw ConfigError(r.path("formats"), "expected strings");
      const auto s = f.get<std::string>();
      if (s != "csv" && s != "jsonl" && s != "md") {
        throw ConfigError(r.path("formats"), "unknown format '" + s + "'");
      }
      o.formats.push_back(s);
    }
  }
  o.workers = r.integer("workers", o.workers);
  if (o.workers < 1) throw ConfigError(r.path("workers"), "must be >= 1");
  r.finish();
  return o;
}

// ---- serialization -------------------------------------------------------

json family_json(const FamilyParams& f) {
  return {{"id", f.id}, {"gamma", f.gamma}, {"p", f.p}, {"rationality", to_string(f.rationality)}};
}

json distribution_json(const Distribution& d) {
  return std::visit(
      [](const auto& dist) -> json {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          return {{"dist", "uniform"}, {"lo", dist.lo}, {"hi", dist.hi}};
        } else if constexpr (std::is_same_v<T, NormalDist>) {
          return {{"dist", "normal"}, {"mean", dist.mean}, {"sd", dist.sd}, {"min", dist.min}};
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          return {{"dist", "lognormal"}, {"mu", dist.mu}, {"sigma", dist.sigma}};
        } else {
          return {{"dist", "explicit"}, {"values", dist.values}};
        }
      },
      d);
}

json population_json(const PopulationSpec& p) {
  return {{"n", p.n},
          {"gamma", distribution_json(p.gamma_dist)},
          {"p", distribution_json(p.p_dist)},
          {"rationality", to_string(p.rationality)},
          {"seed", p.seed}};
}

json threshold_json(const ThresholdSpec& t) {
  if (const auto* f = std::get_if<FixedThreshold>(&t.mode())) {
    return {{"mode", "fixed"}, {"s_cut", f->s_cut}};
  }
  return {{"mode", "mean_plus_k_sigma"}, {"k", std::get<MeanPlusKSigma>(t.mode()).k}};
}

json sim_json(const SimConfig& s) {
  return {{"threshold", threshold_json(s.threshold)},
          {"initial_effort", s.initial_effort},
          {"initial_efforts", s.initial_efforts},
          {"rounds_max", s.rounds_max},
          {"divergence_cap", s.divergence_cap},
          {"quit_payoff", s.quit_payoff},
          {"t_hard_cap", s.t_hard_cap},
          {"quitters_in_pool", s.quitters_in_pool}};
}

json scenario_json(const PolicyScenario& sc) {
  json j = {{"name", sc.name}, {"population", population_json(sc.base_pop)}, {"sim", sim_json(sc.sim)}};
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CeeBaseline>) {
          j["kind"] = "cee";
        } else if constexpr (std::is_same_v<T, Diversion>) {
          j["kind"] = "diversion";
          j["keep_fraction"] = k.keep_fraction;
          j["subsidy"] = k.subsidy;
          j["rank_after_first_round"] = k.rank_after_first_round;
        } else if constexpr (std::is_same_v<T, BetaReduction>) {
          j["kind"] = "beta_reduction";
          j["wages"] = {{"w_high", k.wages.w_high}, {"w_low", k.wages.w_low}, {"beta", k.wages.beta}};
          j["beta_target"] = k.beta_target;
          j["s_cut"] = k.s_cut;
          j["wage_p"] = k.wage_p;
        } else {
          j["kind"] = "exam_redesign";
          j["aptitude_weight"] = k.aptitude_weight;
        }
      },
      sc.kind);
  return j;
}

json game_json(const GameConfig& g) {
  json j = {{"family1", family_json(g.setup.fam1)},
            {"family2", family_json(g.setup.fam2)},
            {"t_obey", g.setup.t_obey},
            {"t_hard_cap", g.setup.t_hard_cap},
            {"rounds", g.rounds},
            {"update", to_string(g.scheme)}};
  if (g.reference_profile) {
    j["reference_profile"] = {g.reference_profile->first, g.reference_profile->second};
  }
  return j;
}

json figure1_json(const Figure1Config& f) {
  return {{"gamma", f.gamma}, {"p", f.p}, {"s_cut", f.s_cuts}, {"t_max", f.t_max}, {"step", f.step}};
}

json figure2_json(const Figure2Config& f) {
  return {{"gamma", f.gamma}, {"mean_gamma", f.mean_gamma}, {"p", f.p},       {"k", f.k},
          {"mean_t", f.mean_t}, {"sigma", f.sigmas},       {"t_max", f.t_max}, {"step", f.step}};
}

GameConfig default_game() {
  GameConfig g;
  g.setup.fam1 = FamilyParams{"family1", 5.0, 0.5, Rationality::Bounded};
  g.setup.fam2 = FamilyParams{"family2", 4.0, 0.5, Rationality::Bounded};
  g.setup.t_obey = 2.0;
  return g;
}

SimulateConfig default_simulate() {
  SimulateConfig s;
  s.population.n = 100;
  s.population.gamma_dist = UniformDist{2.5, 3.5};
  s.population.p_dist = ExplicitDist{{0.5}};
  s.population.seed = 42;
  s.sim.rounds_max = 10;
  return s;
}

PolicyConfig default_policy() {
  PolicyConfig p;
  PopulationSpec pop;
  pop.n = 100;
  pop.gamma_dist = NormalDist{3.0, 1.0, 0.5};
  pop.p_dist = ExplicitDist{{0.5}};
  pop.seed = 42;
  SimConfig sim;
  sim.threshold = ThresholdSpec::mean_plus_k_sigma(1.645);
  sim.rounds_max = 5;
  p.scenarios.push_back({"cee", CeeBaseline{}, pop, sim});
  p.scenarios.push_back({"diversion_50", Diversion{0.5, 0.0, false}, pop, sim});
  p.scenarios.push_back({"exam_a2", ExamRedesign{2.0}, pop, sim});
  PopulationSpec two;
  two.n = 2;
  two.gamma_dist = ExplicitDist{{2.0, 3.75}};
  two.seed = 42;
  BetaReduction b;
  b.wages = WageModel{2000.0, 1000.0, 10.0};
  b.beta_target = 1.0;
  b.s_cut = 12.0;
  b.wage_p = 250.0;
  p.scenarios.push_back({"beta_10_to_1", b, two, sim});
  return p;
}

}  // namespace

RunConfig parse_config(const json& j) {
  ObjectReader r(j, "");
  RunConfig cfg;
  if (r.has("output")) cfg.output = parse_output(r.raw("output"));
  if (r.has("game")) cfg.game = parse_game(r.raw("game"));
  if (r.has("figure1")) cfg.figure1 = parse_figure1(r.raw("figure1"));
  if (r.has("figure2")) cfg.figure2 = parse_figure2(r.raw("figure2"));
  if (r.has("simulate")) cfg.simulate = parse_simulate(r.raw("simulate"));
  if (r.has("policy")) cfg.policy = parse_policy(r.raw("policy"));
  r.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["output"] = {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}, {"workers", cfg.output.workers}};
  if (cfg.game) j["game"] = game_json(*cfg.game);
  if (cfg.figure1) j["figure1"] = figure1_json(*cfg.figure1);
  if (cfg.figure2) j["figure2"] = figure2_json(*cfg.figure2);
  if (cfg.simulate) {
    j["simulate"] = {{"population", population_json(cfg.simulate->population)},
                     {"sim", sim_json(cfg.simulate->sim)}};
  }
  if (cfg.policy) {
    json list = json::array();
    for (const auto& sc : cfg.policy->scenarios) list.push_back(scenario_json(sc));
    j["policy"] = {{"scenarios", list}};
  }
  return j;
}

json defaults_json(const std::string& command) {
  RunConfig cfg;
  const bool all = command == "all";
  if (all || command == "game") cfg.game = default_game();
  if (all || command == "figure1") cfg.figure1 = Figure1Config{};
  if (all || command == "figure2") cfg.figure2 = Figure2Config{};
  if (all || command == "simulate") cfg.simulate = default_simulate();
  if (all || command == "policy") cfg.policy = default_policy();
  if (!all && command != "game" && command != "figure1" && command != "figure2" &&
      command != "simulate" && command != "policy") {
    throw ConfigError(command, "unknown command");
  }
  return to_json(cfg);
}

void override_seed(RunConfig& cfg, std::uint64_t seed) {
  if (cfg.simulate) cfg.simulate->population.seed = seed;
  if (cfg.policy) {
    for (auto& sc : cfg.policy->scenarios) sc.base_pop.seed = seed;
  }
}

}  // namespace poscomp::cli
