#include "poscomp/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "poscomp/errors.hpp"
#include "poscomp/population.hpp"
#include "poscomp/signaling.hpp"

namespace poscomp::cli {

using nlohmann::json;

namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

// Published (rounded) values for the two reference parameterizations of
// the obey/disobey game, keyed by cell [a1][a2].
struct PublishedGame {
  std::array<std::array<std::pair<std::string, std::string>, 2>, 2> cells;
  std::string note;
};

std::optional<PublishedGame> published_game(const TwoFamilySetup& s) {
  if (!near(s.fam1.p, 0.5) || !near(s.fam2.p, 0.5) || !near(s.t_obey, 2.0) ||
      !near(s.fam1.gamma, 5.0)) {
    return std::nullopt;
  }
  if (near(s.fam2.gamma, 4.0)) {
    PublishedGame g;
    g.cells[0][0] = {"0.1", "-1"};
    g.cells[1][0] = {"0.21", "-1"};
    g.cells[0][1] = {"-1", "-0.36"};
    g.cells[1][1] = {"log 5 - (4t2+6)/10", "log 4 - (5t1+4)/8"};
    return g;
  }
  if (near(s.fam2.gamma, 5.0)) {
    PublishedGame g;
    g.cells[0][0] = {"-0.3", "-0.3"};
    g.cells[1][0] = {"0.01", "-1"};
    g.cells[0][1] = {"-1", "0.01"};
    g.cells[1][1] = {"log 4 - (5t2+6)/10", "log 4 - (5t1+6)/10"};
    g.note =
        "published both-disobey entries print 'log 4'; the first-order condition gives "
        "ln(gamma/(2P)) = ln(5) for gamma = 5, P = 0.5, which is what this table uses";
    return g;
  }
  return std::nullopt;
}

std::string pair_text(double a, double b) { return "(" + util4(a) + ", " + util4(b) + ")"; }

std::string action_label(Action a) { return a == Action::Obey ? "Obey" : "Disobey"; }

// t grid over [0, t_max] with fixed step; both endpoints exact.
std::vector<double> effort_grid(double t_max, double step) {
  std::vector<double> ts;
  const auto n = static_cast<long long>(std::ceil(t_max / step - 1e-9));
  for (long long k = 0; k < n; ++k) ts.push_back(static_cast<double>(k) * step);
  ts.push_back(t_max);
  return ts;
}

json round_json(const RoundRecord& r) {
  return {{"round", r.round},
          {"s_cut", r.s_cut},
          {"s_cut_faced", r.s_cut_faced},
          {"sigma_s", r.sigma_s},
          {"mean_t", r.mean_t},
          {"welfare_total", r.welfare_total},
          {"welfare_mean", r.welfare_mean},
          {"n_active", r.n_active},
          {"n_exhausted", r.n_exhausted},
          {"efforts", r.efforts},
          {"scores", r.scores},
          {"utilities", r.utilities}};
}

json report_json(const PolicyReport& r) {
  json j = {{"name", r.name},
            {"kind", r.kind},
            {"units", r.units},
            {"status", r.status},
            {"welfare_total", r.welfare_total},
            {"welfare_mean", r.welfare_mean},
            {"welfare_mean_competitors", r.welfare_mean_competitors},
            {"s_cut_final", r.s_cut_final},
            {"sigma_s_final", r.sigma_s_final},
            {"mean_effort", r.mean_effort},
            {"equity",
             {{"participation_share", r.equity.participation_share},
              {"utility_gini", r.equity.utility_gini},
              {"excluded_utility_gap", r.equity.excluded_utility_gap}}}};
  if (r.baseline_mean_effort) j["baseline_mean_effort"] = *r.baseline_mean_effort;
  if (r.mean_effort_reduction) j["mean_effort_reduction"] = *r.mean_effort_reduction;
  return j;
}

std::vector<std::string> report_cells(const PolicyReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? hours3(*v) : std::string(); };
  return {r.name,
          r.kind,
          r.units,
          r.status,
          util4(r.welfare_total),
          util4(r.welfare_mean),
          util4(r.welfare_mean_competitors),
          hours3(r.s_cut_final),
          hours3(r.sigma_s_final),
          hours3(r.mean_effort),
          util4(r.equity.participation_share),
          util4(r.equity.utility_gini),
          util4(r.equity.excluded_utility_gap),
          opt(r.baseline_mean_effort),
          opt(r.mean_effort_reduction)};
}

const std::vector<std::string> kReportHeader{
    "name",         "kind",          "units",
    "status",       "welfare_total", "welfare_mean",
    "welfare_mean_competitors",      "s_cut_final",
    "sigma_s_final", "mean_effort",  "participation_share",
    "utility_gini", "excluded_utility_gap", "baseline_mean_effort",
    "mean_effort_reduction"};

void add_signaling_files(FileSet& files, const PolicyScenario& sc) {
  const auto& b = std::get<BetaReduction>(sc.kind);
  const auto families = sample_population(sc.base_pop);

  std::vector<double> grid = default_beta_grid();
  grid.push_back(b.wages.beta);
  grid.push_back(b.beta_target);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  CsvWriter sens({"beta", "participation_rate", "mean_payoff"});
  for (const auto& row : beta_sensitivity(families, b.wages, b.s_cut, b.wage_p, grid)) {
    sens.row({fixed(row.beta, 3), util4(row.participation_rate), fixed(row.mean_payoff, 2)});
  }
  files[sc.name + "_beta_sensitivity.csv"] = sens.str();

  // Per-family cost against the two wage outcomes.
  WageModel after = b.wages;
  after.beta = b.beta_target;
  const auto biased = participation_decisions(families, b.wages, b.s_cut, b.wage_p, true);
  const auto rational = participation_decisions(families, after, b.s_cut, b.wage_p, false);
  CsvWriter fam({"family", "gamma", "t_needed", "cost", "study_payoff", "quit_payoff",
                 "rational_choice", "biased_choice"});
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto& r = rational[i];
    const double study = b.wages.w_high - r.cost;
    fam.row({families[i].id, fixed(families[i].gamma, 4),
             hours3(signaling_time_to_threshold(families[i], b.s_cut)), fixed(r.cost, 2),
             fixed(study, 2), fixed(b.wages.w_low, 2), to_string(r.choice),
             to_string(biased[i].choice)});
  }
  files[sc.name + "_signaling_families.csv"] = fam.str();
}

}  // namespace

CommandResult cmd_game(const GameConfig& cfg) {
  const ObeyDisobeyGame game = build_obey_disobey_game(cfg.setup);
  const DominanceReport dom = analyze_dominance(game, cfg.reference_profile);
  const FirstBest fb = first_best_finite(game);
  const auto published = published_game(cfg.setup);
  const auto trace = best_response_dynamics(
      cfg.setup, {cfg.setup.t_obey, cfg.setup.t_obey}, cfg.rounds, cfg.scheme);

  CommandResult res;
  CsvWriter table({"family1", "family2", "kind", "t1", "t2", "u1", "u2", "escalation_rate",
                   "u1_form", "u2_form", "published_u1", "published_u2"});
  std::vector<json> table_rows;
  for (int a2 = 0; a2 < 2; ++a2) {
    for (int a1 = 0; a1 < 2; ++a1) {
      const auto act1 = static_cast<Action>(a1);
      const auto act2 = static_cast<Action>(a2);
      const auto& pub = published ? published->cells[a1][a2] : std::pair<std::string, std::string>{};
      json j = {{"family1", to_string(act1)}, {"family2", to_string(act2)}};
      if (const auto* f = std::get_if<FiniteCell>(&game.at(act1, act2))) {
        table.row({to_string(act1), to_string(act2), "finite", hours3(f->t1), hours3(f->t2),
                   util4(f->u1), util4(f->u2), "", "", "", pub.first, pub.second});
        j.update({{"kind", "finite"}, {"t1", f->t1}, {"t2", f->t2}, {"u1", f->u1}, {"u2", f->u2}});
      } else {
        const auto& d = std::get<DivergentCell>(game.at(act1, act2));
        table.row({to_string(act1), to_string(act2), "divergent", "", "", "", "",
                   hours3(d.escalation_rate), d.u1_of_t2.render(), d.u2_of_t1.render(),
                   pub.first, pub.second});
        j.update({{"kind", "divergent"},
                  {"escalation_rate", d.escalation_rate},
                  {"delta", d.delta},
                  {"u1_form", d.u1_of_t2.render()},
                  {"u2_form", d.u2_of_t1.render()}});
      }
      table_rows.push_back(std::move(j));
    }
  }
  res.files["game_table.csv"] = table.str();
  res.files["game_table.jsonl"] = jsonl(table_rows);

  // Layout: columns are family 1's action, rows family 2's; entries (u1, u2).
  MarkdownTable md({"", "Family 1 Obey", "Family 1 Disobey"});
  for (int a2 = 0; a2 < 2; ++a2) {
    std::vector<std::string> row{"Family 2 " + action_label(static_cast<Action>(a2))};
    for (int a1 = 0; a1 < 2; ++a1) {
      const auto& cell = game.cells[a1][a2];
      if (const auto* f = std::get_if<FiniteCell>(&cell)) {
        row.push_back(pair_text(f->u1, f->u2));
      } else {
        const auto& d = std::get<DivergentCell>(cell);
        row.push_back("divergent (" + d.u1_of_t2.render() + ", " + d.u2_of_t1.render() +
                      "); +" + hours3(d.escalation_rate) + " h per round trip");
      }
    }
    md.row(row);
  }
  std::string md_text = md.str();
  md_text += "\nFirst best (finite cells): (" + action_label(fb.a1) + ", " + action_label(fb.a2) +
             "), welfare " + util4(fb.welfare) + "\n";
  if (published && !published->note.empty()) md_text += "\nNote: " + published->note + "\n";
  res.files["game_table.md"] = md_text;

  CsvWriter dom_csv({"family", "opponent_action", "u_obey", "u_disobey", "disobey_improves"});
  for (int f = 0; f < 2; ++f) {
    for (int o = 0; o < 2; ++o) {
      const auto& g = dom.gains[f][o];
      dom_csv.row({std::to_string(f + 1), to_string(g.opponent), util4(g.u_obey),
                   util4(g.u_disobey), g.strictly_improves ? "true" : "false"});
    }
  }
  res.files["dominance.csv"] = dom_csv.str();

  auto cell_list = [](const std::vector<std::pair<Action, Action>>& v) {
    json arr = json::array();
    for (const auto& [a1, a2] : v) arr.push_back({to_string(a1), to_string(a2)});
    return arr;
  };
  json summary = {
      {"reference_profile", {dom.reference_profile.first, dom.reference_profile.second}},
      {"disobey_dominant", {dom.disobey_dominant[0], dom.disobey_dominant[1]}},
      {"pure_nash_finite", cell_list(dom.pure_nash)},
      {"divergent_cells", cell_list(dom.divergent_cells)},
      {"divergent_nash_candidates", cell_list(dom.divergent_candidates)},
      {"first_best", {{"family1", to_string(fb.a1)}, {"family2", to_string(fb.a2)}, {"welfare", fb.welfare}}},
      {"dynamics_stop", to_string(trace.stop)},
      {"divergence_gap", divergence_gap(cfg.setup)}};
  if (!dom.divergent_candidates.empty()) summary["equilibrium"] = "no finite equilibrium";
  if (published && !published->note.empty()) summary["note"] = published->note;
  res.files["game_summary.json"] = summary.dump(2) + "\n";

  CsvWriter tr({"round", "t1", "t2"});
  std::vector<json> tr_rows;
  for (std::size_t i = 0; i < trace.profiles.size(); ++i) {
    const auto [t1, t2] = trace.profiles[i];
    tr.row({std::to_string(i), hours3(t1), hours3(t2)});
    tr_rows.push_back({{"round", i}, {"t1", t1}, {"t2", t2}});
  }
  res.files["br_trace.csv"] = tr.str();
  res.files["br_trace.jsonl"] = jsonl(tr_rows);

  res.message = md_text;
  return res;
}

CommandResult cmd_figure1(const Figure1Config& cfg) {
  const FamilyParams fam{"focal", cfg.gamma, cfg.p, Rationality::Bounded};
  const double cap = std::max(kDefaultHardCap, cfg.t_max);
  const bool reference = near(cfg.gamma, 3.0) && near(cfg.p, 0.5);

  CommandResult res;
  CsvWriter curves({"s_cut", "t", "utility"});
  CsvWriter optima({"s_cut", "t_star", "u_star", "t_star_numeric", "published_t_star",
                    "published_u_star"});
  MarkdownTable md({"S_cut", "t*", "u*"});
  std::vector<json> curve_rows, optima_rows;
  for (double s_cut : cfg.s_cuts) {
    for (double t : effort_grid(cfg.t_max, cfg.step)) {
      const double u = utility(fam, Effort(t, cap), s_cut).utility;
      curves.row({hours3(s_cut), hours3(t), util4(u)});
      curve_rows.push_back({{"s_cut", s_cut}, {"t", t}, {"utility", u}});
    }
    const double t_star = best_response_population(fam, s_cut, cap);
    const double u_star = utility(fam, Effort(t_star, cap), s_cut).utility;
    const double t_num = best_response_numeric_oracle(
        [&](double t) { return utility(fam, Effort(t, cap), s_cut).utility; }, cap);
    std::string pub_t, pub_u;
    if (reference && near(s_cut, 0.0)) pub_t = "1.33", pub_u = "1.13";
    if (reference && near(s_cut, 3.0)) pub_t = "2.33", pub_u = "0.64";
    optima.row({hours3(s_cut), hours3(t_star), util4(u_star), hours3(t_num), pub_t, pub_u});
    md.row({hours3(s_cut), hours3(t_star), util4(u_star)});
    optima_rows.push_back({{"s_cut", s_cut}, {"t_star", t_star}, {"u_star", u_star}, {"t_star_numeric", t_num}});
  }
  res.files["figure1_curves.csv"] = curves.str();
  res.files["figure1_curves.jsonl"] = jsonl(curve_rows);
  res.files["figure1_optima.csv"] = optima.str();
  res.files["figure1_optima.jsonl"] = jsonl(optima_rows);
  res.files["figure1_optima.md"] = md.str();
  res.message = md.str();
  return res;
}

CommandResult cmd_figure2(const Figure2Config& cfg) {
  const FamilyParams fam{"focal", cfg.gamma, cfg.p, Rationality::Bounded};
  const double cap = std::max(kDefaultHardCap, cfg.t_max);
  const double mean_score = cfg.mean_gamma * cfg.mean_t;
  const bool reference = near(mean_score, 6.0) && near(cfg.k, 1.645);

  CommandResult res;
  CsvWriter thresholds({"sigma", "mean_score", "k", "s_cut", "t_star", "u_star", "published_s_cut"});
  CsvWriter curves({"sigma", "s_cut", "t", "utility"});
  MarkdownTable md({"sigma_S", "S_cut", "t*", "u*"});
  std::vector<json> th_rows, curve_rows;
  for (double sigma : cfg.sigmas) {
    const double s_cut = threshold_from_moments(mean_score, sigma, cfg.k);
    const double t_star = best_response_population(fam, s_cut, cap);
    const double u_star = utility(fam, Effort(t_star, cap), s_cut).utility;
    std::string pub;
    if (reference && near(sigma, 1.0)) pub = "7.64";
    if (reference && near(sigma, 3.0)) pub = "10.94";
    thresholds.row({hours3(sigma), hours3(mean_score), fixed(cfg.k, 3), hours3(s_cut),
                    hours3(t_star), util4(u_star), pub});
    md.row({hours3(sigma), hours3(s_cut), hours3(t_star), util4(u_star)});
    th_rows.push_back({{"sigma", sigma}, {"mean_score", mean_score}, {"k", cfg.k},
                       {"s_cut", s_cut}, {"t_star", t_star}, {"u_star", u_star}});
    for (double t : effort_grid(cfg.t_max, cfg.step)) {
      const double u = utility(fam, Effort(t, cap), s_cut).utility;
      curves.row({hours3(sigma), hours3(s_cut), hours3(t), util4(u)});
      curve_rows.push_back({{"sigma", sigma}, {"s_cut", s_cut}, {"t", t}, {"utility", u}});
    }
  }
  res.files["figure2_thresholds.csv"] = thresholds.str();
  res.files["figure2_thresholds.jsonl"] = jsonl(th_rows);
  res.files["figure2_thresholds.md"] = md.str();
  res.files["figure2_curves.csv"] = curves.str();
  res.files["figure2_curves.jsonl"] = jsonl(curve_rows);
  res.message = md.str();
  return res;
}

CommandResult cmd_simulate(const SimulateConfig& cfg) {
  const SimTrace trace = simulate_feedback(cfg.population, cfg.sim);
  const WelfareSummary summary = welfare_report(trace);

  CommandResult res;
  std::vector<json> lines;
  CsvWriter rounds({"round", "s_cut", "s_cut_faced", "sigma_s", "mean_t", "welfare_total",
                    "welfare_mean", "n_active", "n_exhausted"});
  CsvWriter fams({"round", "family", "gamma", "p", "active", "effort", "score", "utility"});
  for (const auto& r : trace.rounds) {
    lines.push_back(round_json(r));
    rounds.row({std::to_string(r.round), hours3(r.s_cut), hours3(r.s_cut_faced), hours3(r.sigma_s),
                hours3(r.mean_t), util4(r.welfare_total), util4(r.welfare_mean),
                std::to_string(r.n_active), std::to_string(r.n_exhausted)});
    for (std::size_t i = 0; i < trace.families.size(); ++i) {
      const auto& f = trace.families[i];
      fams.row({std::to_string(r.round), f.id, fixed(f.gamma, 4), fixed(f.p, 4),
                r.active[i] ? "true" : "false", hours3(r.efforts[i]), hours3(r.scores[i]),
                util4(r.utilities[i])});
    }
  }
  res.files["trace.jsonl"] = jsonl(lines);
  res.files["trace.csv"] = rounds.str();
  res.files["trace_families.csv"] = fams.str();

  json s = {{"status", to_string(summary.status)},
            {"rounds_recorded", trace.rounds.size()},
            {"total_utility", summary.total_utility},
            {"mean_utility", summary.mean_utility},
            {"mean_effort", summary.mean_effort},
            {"exhausted_fraction", summary.exhausted_fraction},
            {"quit_fraction", summary.quit_fraction},
            {"s_cut_path", summary.s_cut_path}};
  res.files["summary.json"] = s.dump(2) + "\n";
  res.exit_code = summary.status == SimStatus::EmptyPopulation ? kExitDegenerate : kExitOk;
  res.message = std::string("status: ") + to_string(summary.status) + ", rounds: " +
                std::to_string(trace.rounds.size() - 1) + ", final S_cut: " +
                hours3(summary.s_cut_path.back()) + ", mean utility: " + util4(summary.mean_utility);
  return res;
}

CommandResult cmd_policy(const PolicyConfig& cfg, int workers) {
  const std::size_t n = cfg.scenarios.size();
  struct Outcome {
    std::vector<PolicyReport> reports;
    std::string error;
  };
  std::vector<Outcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i].reports = run_scenario(cfg.scenarios[i]);
      } catch (const DegeneratePool& e) {
        outcomes[i].error = std::string("degenerate_pool: ") + e.what();
      } catch (const Error& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::clamp<int>(workers, 1, 64));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::min(n_workers, n); ++w) pool.emplace_back(work);
    work();
  }

  CommandResult res;
  std::vector<PolicyReport> reports;
  json errors = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (!outcomes[i].error.empty()) {
      errors.push_back({{"scenario", cfg.scenarios[i].name}, {"error", outcomes[i].error}});
      res.exit_code = kExitDegenerate;
      continue;
    }
    for (auto& r : outcomes[i].reports) reports.push_back(std::move(r));
    if (std::holds_alternative<BetaReduction>(cfg.scenarios[i].kind)) {
      add_signaling_files(res.files, cfg.scenarios[i]);
    }
  }

  CsvWriter csv(kReportHeader);
  MarkdownTable md(kReportHeader);
  std::vector<json> lines;
  for (const auto& r : reports) {
    csv.row(report_cells(r));
    md.row(report_cells(r));
    lines.push_back(report_json(r));
  }
  res.files["policy_reports.csv"] = csv.str();
  res.files["policy_reports.md"] = md.str();
  res.files["policy_reports.jsonl"] = jsonl(lines);

  json summary = {{"reports", reports.size()}, {"errors", errors}};
  if (reports.size() >= 2) {
    const TradeoffTable table = compare_policies(reports);
    CsvWriter t({"a", "b", "a_dominates", "b_dominates", "dilemma", "welfare_leader"});
    MarkdownTable tm({"a", "b", "a dominates", "b dominates", "welfare/equity dilemma"});
    auto b2s = [](bool b) { return std::string(b ? "true" : "false"); };
    json dilemmas = json::array();
    for (const auto& c : table.comparisons) {
      t.row({c.a, c.b, b2s(c.a_dominates), b2s(c.b_dominates), b2s(c.dilemma), c.welfare_leader});
      tm.row({c.a, c.b, b2s(c.a_dominates), b2s(c.b_dominates),
              c.dilemma ? "yes (" + c.welfare_leader + " has higher welfare)" : "no"});
      if (c.dilemma) dilemmas.push_back({c.a, c.b});
    }
    res.files["tradeoff.csv"] = t.str();
    res.files["tradeoff.md"] = tm.str();
    summary["dilemmas"] = dilemmas;
  }
  res.files["policy_summary.json"] = summary.dump(2) + "\n";
  res.message = md.str();
  for (const auto& e : errors) res.message += "error: " + e["scenario"].get<std::string>() + ": " + e["error"].get<std::string>() + "\n";
  return res;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg) {
  auto missing = [&] { return ConfigError(name, "missing section"); };
  CommandResult res;
  if (name == "game") {
    if (!cfg.game) throw missing();
    res = cmd_game(*cfg.game);
  } else if (name == "figure1") {
    if (!cfg.figure1) throw missing();
    res = cmd_figure1(*cfg.figure1);
  } else if (name == "figure2") {
    if (!cfg.figure2) throw missing();
    res = cmd_figure2(*cfg.figure2);
  } else if (name == "simulate") {
    if (!cfg.simulate) throw missing();
    res = cmd_simulate(*cfg.simulate);
  } else if (name == "policy") {
    if (!cfg.policy) throw missing();
    res = cmd_policy(*cfg.policy, cfg.output.workers);
  } else {
    throw ConfigError(name, "unknown command");
  }
  res.files = filter_formats(res.files, cfg.output.formats);
  res.files["config.json"] = to_json(cfg).dump(2) + "\n";
  return res;
}

}  // namespace poscomp::cli
