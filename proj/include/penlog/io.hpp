#pragma once

// File formats: "x,y" sample CSV in, SVG line charts and serialised
// results out.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "penlog/core_model.hpp"
#include "penlog/dictionary.hpp"
#include "penlog/regressogram.hpp"
#include "penlog/selection.hpp"
#include "penlog/simulation.hpp"

namespace penlog {

/// Header "x,y", then one row per observation, x in [0,1], y in {0,1}.
/// Rows are sorted by x (stable). Throws ParseError, DomainError,
/// EmptyFile, IoError.
BinarySample ingest_csv(const std::filesystem::path& path);
BinarySample parse_csv(std::string_view text, const std::string& source = "<memory>");

/// Writes to a sibling temporary then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Standalone SVG line chart, one <path> per series, axes "n" and "C*".
std::string render_svg(const std::vector<PlotSeries>& series);

/// SVG at `path` plus the plotted data at `path` with extension .csv.
/// Throws UsageError for empty/ragged input, IoError on write failure.
void emit_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path);

/// C* against n, one series per penalty.
std::vector<PlotSeries> cstar_series(const BenchmarkReport& report);

/// %.17g; non-finite values as "inf", "-inf", "nan".
std::string format_double(double v);

using nlohmann::json;

// Non-finite doubles become the strings "inf", "-inf" or "nan".
json to_json(double v);
json to_json(const PartitionModel& model);
json to_json(const RegressogramFit& fit);
json to_json(const IrregularFit& fit);
json to_json(const DictionaryFit& fit);
json to_json(const CriterionPath& path);
json to_json(const CalibrationResult& cal);
json to_json(const BenchmarkReport& report);

/// "kappa,selected_dim" rows.
std::string calibration_csv(const CalibrationResult& cal);
/// "model_id,dimension,contrast,penalty,criterion,chosen" rows.
std::string criterion_csv(const CriterionPath& path);
/// Long format: model_id,penalty,n,replication_batch,c_star,se.
std::string benchmark_csv(const BenchmarkReport& report);

}  // namespace penlog
