#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "penlog/penlog.hpp"

namespace {

using namespace penlog;

struct CollectionChoice {
  bool irregular = false;
  std::optional<std::size_t> max_dim;
  std::size_t min_cell = 1;
};

std::size_t parse_count(const std::string& token, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v == 0)
    throw UsageError(what + " must be a positive integer, got '" + token + "'");
  return v;
}

// "regular" | "regular:<maxD>" | "irregular" | "irregular:<maxD>" | "irregular:<maxD>:<minCell>"
CollectionChoice parse_collection(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(':', start)) != std::string::npos; start = pos + 1)
    parts.push_back(text.substr(start, pos - start));
  parts.push_back(text.substr(start));
  CollectionChoice c;
  if (parts[0] == "irregular") {
    c.irregular = true;
    if (parts.size() > 3) throw UsageError("bad collection '" + text + "'");
  } else if (parts[0] != "regular" || parts.size() > 2) {
    throw UsageError("bad collection '" + text + "', expected regular or irregular:<maxD>:<minCell>");
  }
  if (parts.size() >= 2) c.max_dim = parse_count(parts[1], "maxD");
  if (parts.size() == 3) c.min_cell = parse_count(parts[2], "minCell");
  return c;
}

struct FittedCollection {
  std::vector<ModelScore> scores;
  std::vector<json> models;
};

FittedCollection fit_collection(const BinarySample& sample, const CollectionChoice& choice) {
  FittedCollection out;
  if (choice.irregular) {
    const std::size_t max_dim = choice.max_dim.value_or(MaxDimRule::n_over_log_n().max_dim(sample.n()));
    const auto path = best_irregular_path(sample, max_dim, choice.min_cell);
    if (path.empty()) throw InfeasibleDimension("no feasible irregular partition");
    for (std::size_t k = 0; k < path.size(); ++k) {
      out.scores.push_back({k, path[k].model.dimension(), path[k].contrast});
      out.models.push_back(to_json(path[k]));
    }
    return out;
  }
  const auto rule = choice.max_dim ? MaxDimRule::fixed(*choice.max_dim) : MaxDimRule::n_over_log_n();
  const auto models = regular_collection(sample.n(), rule);
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto fit = fit_regressogram(sample, models[k]);
    out.scores.push_back({k, fit.dimension(), fit.contrast});
    out.models.push_back(to_json(fit));
  }
  return out;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    write_file_atomic(out_path, content);
}

std::string fits_csv(const FittedCollection& fc) {
  std::string out = "model_id,dimension,contrast\n";
  for (const auto& s : fc.scores)
    out += std::to_string(s.id) + "," + std::to_string(s.dimension) + "," + format_double(s.contrast) + "\n";
  return out;
}

std::vector<std::size_t> parse_sizes(const std::vector<std::string>& tokens) {
  std::vector<std::size_t> out;
  for (const auto& t : tokens) out.push_back(parse_count(t, "--n"));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penlog: penalised model selection for nonparametric logistic regression"};
  app.require_subcommand(1);

  std::string input, out_path, collection = "regular", penalty = "shape:auto", format = "json";
  std::string truth, plot_path;
  std::vector<std::string> sizes{"100"};
  std::vector<std::string> penalties{"aic", "bic", "lin:auto", "shape:auto"};
  std::size_t reps = 200, threads = 0, grid_points = 200;
  std::uint64_t seed = 0;

  auto add_data_opts = [&](CLI::App* sub, bool with_penalty) {
    sub->add_option("--input", input, "CSV file with header x,y")->required();
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--collection", collection, "regular[:maxD] | irregular[:maxD[:minCell]]");
    sub->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    if (with_penalty) sub->add_option("--penalty", penalty, "aic | bic | lin:<c> | shape:<mu> | ...");
    sub->add_option("--grid-points", grid_points, "kappa grid size for calibration");
  };

  auto* fit = app.add_subcommand("fit", "fit every model of a collection");
  add_data_opts(fit, false);
  auto* sel = app.add_subcommand("select", "penalised choice among the fitted models");
  add_data_opts(sel, true);
  auto* cal = app.add_subcommand("calibrate", "dimension-jump calibration of a penalty constant");
  add_data_opts(cal, true);

  auto* sim = app.add_subcommand("simulate", "oracle-ratio benchmark on a synthetic truth");
  sim->add_option("--truth", truth, "Mod1 | Mod2 | Mod3 | Mod4")->required();
  sim->add_option("--n", sizes, "sample sizes, comma separated")->delimiter(',');
  sim->add_option("--reps", reps, "replications per sample size");
  sim->add_option("--seed", seed, "base seed");
  sim->add_option("--penalties", penalties, "penalty specs, comma separated")->delimiter(',');
  sim->add_option("--threads", threads, "worker threads (default PENLOG_THREADS or all cores)");
  sim->add_option("--grid-points", grid_points, "kappa grid size for calibration");
  sim->add_option("--out", out_path, "report path (default stdout)");
  sim->add_option("--format", format, "json | csv | svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  sim->add_option("--plot", plot_path, "also write a C* against n chart (SVG plus CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto grid = KappaGrid::automatic(grid_points);
    if (*sim) {
      Scenario sc;
      sc.truth = make_truth(parse_truth(truth));
      sc.replications = reps;
      sc.seed = seed;
      sc.threads = threads;
      sc.grid = grid;
      for (const auto& p : penalties) sc.penalties.push_back(PenaltySpec::parse(p));
      const auto report = run_study(sc, parse_sizes(sizes));
      if (format == "svg") {
        if (out_path.empty()) throw UsageError("--format svg needs --out");
        emit_plot(cstar_series(report), out_path);
      } else {
        emit(format == "csv" ? benchmark_csv(report) : to_json(report).dump(2) + "\n", out_path);
      }
      if (!plot_path.empty()) emit_plot(cstar_series(report), plot_path);
      return 0;
    }

    const auto choice = parse_collection(collection);
    const auto sample = ingest_csv(input);
    const auto fc = fit_collection(sample, choice);

    if (*fit) {
      emit(format == "csv" ? fits_csv(fc) : json{{"n", sample.n()}, {"fits", fc.models}}.dump(2) + "\n", out_path);
    } else if (*sel) {
      const auto res = select_calibrated(fc.scores, PenaltySpec::parse(penalty), sample.n(), grid);
      if (format == "csv") {
        emit(criterion_csv(res.path), out_path);
      } else {
        json j{{"n", sample.n()},
               {"penalty", res.penalty.to_string()},
               {"criterion_path", to_json(res.path)},
               {"selected", fc.models[res.path.selected().model_id]}};
        if (res.calibration) j["calibration"] = to_json(*res.calibration);
        emit(j.dump(2) + "\n", out_path);
      }
    } else if (*cal) {
      auto spec = PenaltySpec::parse(penalty);
      if (!spec.has_scale()) throw UsageError("penalty " + spec.to_string() + " has no constant to calibrate");
      spec.scale.reset();
      const auto res = dimension_jump(fc.scores, spec, grid, sample.n());
      if (format == "csv")
        emit(calibration_csv(res), out_path);
      else
        emit(json{{"n", sample.n()}, {"penalty", spec.to_string()}, {"calibration", to_json(res)}}.dump(2) + "\n",
             out_path);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "penlog: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "penlog: " << e.what() << "\n";
    return 2;
  }
}
