#include "penlog/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "penlog/error.hpp"

namespace penlog {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_real(std::string_view token, double& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  json out = json::object();
  for (const auto& [dim, count] : h) out[std::to_string(dim)] = count;
  return out;
}

json doubles(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(to_json(x));
  return out;
}

void validate_series(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw UsageError("nothing to plot: empty series list");
  for (const auto& s : series) {
    if (s.xs.size() != s.ys.size()) throw UsageError("series '" + s.label + "' has ragged xs/ys");
    if (s.xs.empty()) throw UsageError("series '" + s.label + "' is empty");
  }
}

}  // namespace

BinarySample parse_csv(std::string_view text, const std::string& source) {
  std::vector<double> xs;
  std::vector<std::uint8_t> ys;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    const std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (!header_seen) {
      const auto comma = line.find(',');
      if (comma == std::string_view::npos || trim(line.substr(0, comma)) != "x" ||
          trim(line.substr(comma + 1)) != "y")
        throw ParseError(line_no, "expected header \"x,y\"");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line_no, "expected two comma-separated fields");
    double x = 0.0;
    double y = 0.0;
    if (!parse_real(trim(line.substr(0, comma)), x)) throw ParseError(line_no, "x is not a number");
    if (!parse_real(trim(line.substr(comma + 1)), y)) throw ParseError(line_no, "y is not a number");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError(line_no, "x outside [0,1]");
    if (y != 0.0 && y != 1.0) throw DomainError(line_no, "y not in {0,1}");
    xs.push_back(x);
    ys.push_back(y == 1.0 ? 1 : 0);
  }
  if (!header_seen) throw EmptyFile(source);
  if (xs.empty()) throw EmptyFile(source);
  return BinarySample::from_unsorted(std::move(xs), std::move(ys));
}

BinarySample ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string render_svg(const std::vector<PlotSeries>& series) {
  validate_series(series);
  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 180, top = 20, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double xmin = series[0].xs[0], xmax = xmin, ymin = series[0].ys[0], ymax = ymin;
  for (const auto& s : series) {
    for (double x : s.xs) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    for (double y : s.ys) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  if (xmax == xmin) xmin -= 1.0, xmax += 1.0;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  // Axes and ticks.
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(xv) << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(xv) << "\" y=\"" << top + plot_h + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << short_number(xv) << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << left << "\" y2=\"" << py(yv)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << short_number(yv) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">n</text>\n"
      << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">C*</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % std::size(palette)];
    std::vector<std::size_t> order(s.xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.xs[a] < s.xs[b]; });
    svg << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" d=\"";
    for (std::size_t i = 0; i < order.size(); ++i)
      svg << (i == 0 ? "M" : " L") << px(s.xs[order[i]]) << ' ' << py(s.ys[order[i]]);
    svg << "\"/>\n";
    for (std::size_t i : order)
      svg << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 20 + 20.0 * static_cast<double>(k);
    svg << "<line x1=\"" << width - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << width - right + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << xml_escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path) {
  const std::string svg = render_svg(series);
  std::string csv = "series,x,y\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i)
      csv += csv_field(s.label) + "," + format_double(s.xs[i]) + "," + format_double(s.ys[i]) + "\n";
  write_file_atomic(path, svg);
  auto data_path = path;
  data_path.replace_extension(".csv");
  write_file_atomic(data_path, csv);
}

std::vector<PlotSeries> cstar_series(const BenchmarkReport& report) {
  std::vector<PlotSeries> out;
  for (const auto& e : report.entries) {
    auto it = std::find_if(out.begin(), out.end(), [&](const PlotSeries& s) { return s.label == e.penalty; });
    if (it == out.end()) {
      out.push_back({e.penalty, {}, {}});
      it = out.end() - 1;
    }
    it->xs.push_back(static_cast<double>(e.n));
    it->ys.push_back(e.c_star);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json to_json(const PartitionModel& model) {
  return json{{"kind", model.kind() == PartitionModel::Kind::regular ? "regular" : "irregular"},
              {"dimension", model.dimension()},
              {"edges", doubles(model.edges())}};
}

json to_json(const RegressogramFit& fit) {
  std::vector<std::size_t> sizes;
  for (std::size_t k = 0; k < fit.dimension(); ++k) sizes.push_back(fit.cell_size(k));
  return json{{"model", to_json(fit.model)},
              {"cell_sizes", sizes},
              {"cell_probs", doubles(fit.cell_probs)},
              {"cell_logits", doubles(fit.cell_logits)},
              {"contrast", to_json(fit.contrast)},
              {"degenerate_cells", fit.degenerate_cells},
              {"empty_cells", fit.empty_cells}};
}

json to_json(const IrregularFit& fit) {
  return json{{"model", to_json(fit.model)}, {"breakpoints", fit.breakpoints}, {"contrast", to_json(fit.contrast)}};
}

json to_json(const DictionaryFit& fit) {
  return json{{"coefficients", doubles(fit.coefficients)},
              {"logits", doubles(fit.logit.values)},
              {"probs", doubles(fit.logit.probs)},
              {"contrast", to_json(fit.contrast)},
              {"kkt_residual", to_json(fit.kkt_residual)},
              {"on_boundary", fit.on_boundary},
              {"iterations", fit.iterations}};
}

json to_json(const CriterionPath& path) {
  json entries = json::array();
  for (const auto& e : path.entries)
    entries.push_back(json{{"model_id", e.model_id},
                           {"dimension", e.dimension},
                           {"contrast", to_json(e.contrast)},
                           {"penalty", to_json(e.penalty)},
                           {"criterion", to_json(e.criterion)}});
  return json{{"entries", entries}, {"chosen", path.chosen}};
}

json to_json(const CalibrationResult& cal) {
  return json{{"kappa_grid", doubles(cal.kappa_grid)},
              {"selected_dims", cal.selected_dims},
              {"kappa_min", to_json(cal.kappa_min)},
              {"kappa_hat", to_json(cal.kappa_hat)},
              {"jump_size", cal.jump_size},
              {"jump_index", cal.jump_index}};
}

json to_json(const BenchmarkReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back(json{{"truth", e.truth},
                           {"penalty", e.penalty},
                           {"n", e.n},
                           {"replications", e.replications},
                           {"c_star", to_json(e.c_star)},
                           {"c_star_se", to_json(e.c_star_se)},
                           {"numerator_mean", to_json(e.numerator_mean)},
                           {"numerator_se", to_json(e.numerator_se)},
                           {"denominator_mean", to_json(e.denominator_mean)},
                           {"denominator_se", to_json(e.denominator_se)},
                           {"selected_dim_histogram", histogram_json(e.selected_dim_histogram)},
                           {"oracle_dim_histogram", histogram_json(e.oracle_dim_histogram)}});
  return json{{"entries", entries}};
}

std::string calibration_csv(const CalibrationResult& cal) {
  std::string out = "kappa,selected_dim\n";
  for (std::size_t j = 0; j < cal.kappa_grid.size(); ++j)
    out += format_double(cal.kappa_grid[j]) + "," + std::to_string(cal.selected_dims[j]) + "\n";
  return out;
}

std::string criterion_csv(const CriterionPath& path) {
  std::string out = "model_id,dimension,contrast,penalty,criterion,chosen\n";
  for (std::size_t k = 0; k < path.entries.size(); ++k) {
    const auto& e = path.entries[k];
    out += std::to_string(e.model_id) + "," + std::to_string(e.dimension) + "," + format_double(e.contrast) + "," +
           format_double(e.penalty) + "," + format_double(e.criterion) + "," + (k == path.chosen ? "1" : "0") + "\n";
  }
  return out;
}

std::string benchmark_csv(const BenchmarkReport& report) {
  std::string out = "model_id,penalty,n,replication_batch,c_star,se\n";
  for (const auto& e : report.entries)
    out += csv_field(e.truth) + "," + csv_field(e.penalty) + "," + std::to_string(e.n) + ",0-" +
           std::to_string(e.replications - 1) + "," + format_double(e.c_star) + "," + format_double(e.c_star_se) + "\n";
  return out;
}

}  // namespace penlog
