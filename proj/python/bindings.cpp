#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "penlog/penlog.hpp"

namespace py = pybind11;
using namespace penlog;

namespace {

py::object to_python(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: {
      const auto s = j.get<std::string>();
      if (s == "inf") return py::float_(std::numeric_limits<double>::infinity());
      if (s == "-inf") return py::float_(-std::numeric_limits<double>::infinity());
      if (s == "nan") return py::float_(std::numeric_limits<double>::quiet_NaN());
      return py::str(s);
    }
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
    default: return py::none();
  }
}

BinarySample make_sample(std::vector<double> xs, std::vector<int> ys) {
  if (xs.size() != ys.size()) throw LengthMismatch(xs.size(), ys.size());
  std::vector<std::uint8_t> labels(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] != 0 && ys[i] != 1) throw DataError("labels must be 0 or 1");
    labels[i] = static_cast<std::uint8_t>(ys[i]);
  }
  return BinarySample::from_unsorted(std::move(xs), std::move(labels));
}

std::vector<ModelScore> make_scores(const std::vector<std::size_t>& dims, const std::vector<double>& contrasts) {
  if (dims.size() != contrasts.size()) throw LengthMismatch(dims.size(), contrasts.size());
  std::vector<ModelScore> out;
  for (std::size_t k = 0; k < dims.size(); ++k) out.push_back({k, dims[k], contrasts[k]});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "penlog C++ core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  m.def("contrast",
        [](std::vector<double> xs, std::vector<int> ys, std::vector<double> logits) {
          return contrast(make_sample(std::move(xs), std::move(ys)), logits);
        },
        py::arg("xs"), py::arg("ys"), py::arg("logits"));
  m.def("kl_divergence", [](std::vector<double> p0, std::vector<double> p) { return kl_divergence(p0, p); });
  m.def("hellinger_sq", [](std::vector<double> p0, std::vector<double> p) { return hellinger_sq(p0, p); });

  m.def("fit_regressogram",
        [](std::vector<double> xs, std::vector<int> ys, std::size_t dim) {
          return to_python(to_json(fit_regressogram(make_sample(std::move(xs), std::move(ys)),
                                                    PartitionModel::regular(dim))));
        },
        py::arg("xs"), py::arg("ys"), py::arg("dim"));
  m.def("best_irregular_partition",
        [](std::vector<double> xs, std::vector<int> ys, std::size_t dim, std::size_t min_cell) {
          return to_python(
              to_json(best_irregular_partition(make_sample(std::move(xs), std::move(ys)), dim, min_cell)));
        },
        py::arg("xs"), py::arg("ys"), py::arg("dim"), py::arg("min_cell") = 1);
  m.def("fit_mle_indicators",
        [](std::vector<double> xs, std::vector<int> ys, std::size_t dim, double c0) {
          const auto s = make_sample(std::move(xs), std::move(ys));
          const auto dict = Dictionary::indicators(PartitionModel::regular(dim));
          std::vector<std::size_t> idx(dict.size());
          for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
          FitConfig cfg;
          cfg.c0_bound = c0;
          return to_python(to_json(fit_mle(orthonormalize(dict, idx, s), s, cfg)));
        },
        py::arg("xs"), py::arg("ys"), py::arg("dim"), py::arg("c0") = 10.0,
        "Box-constrained MLE over the indicator dictionary of a regular partition.");

  m.def("evaluate_penalty",
        [](const std::string& spec, std::size_t dim, std::size_t n) {
          return evaluate(PenaltySpec::parse(spec), dim, n);
        },
        py::arg("spec"), py::arg("dim"), py::arg("n"));
  m.def("sigma_diagnostic",
        [](std::optional<double> constant, std::size_t n, bool irregular) {
          const auto scheme = constant ? WeightScheme::constant(*constant) : WeightScheme::dimension_dependent();
          return sigma_diagnostic(scheme, n, irregular ? CollectionKind::irregular : CollectionKind::regular);
        },
        py::arg("constant"), py::arg("n"), py::arg("irregular") = false,
        "constant=None selects L_D = 2 + log(n/D).");

  m.def("select",
        [](std::vector<std::size_t> dims, std::vector<double> contrasts, const std::string& spec, std::size_t n) {
          const auto res = select_calibrated(make_scores(dims, contrasts), PenaltySpec::parse(spec), n);
          json j{{"penalty", res.penalty.to_string()},
                 {"criterion_path", to_json(res.path)},
                 {"chosen", res.path.chosen},
                 {"dimension", res.path.selected().dimension}};
          if (res.calibration) j["calibration"] = to_json(*res.calibration);
          return to_python(j);
        },
        py::arg("dims"), py::arg("contrasts"), py::arg("penalty"), py::arg("n"));
  m.def("dimension_jump",
        [](std::vector<std::size_t> dims, std::vector<double> contrasts, const std::string& shape,
           std::size_t n) {
          auto spec = PenaltySpec::parse(shape);
          spec.scale.reset();
          return to_python(to_json(dimension_jump(make_scores(dims, contrasts), spec, KappaGrid::automatic(), n)));
        },
        py::arg("dims"), py::arg("contrasts"), py::arg("shape") = "shape:auto", py::arg("n"));

  m.def("truth_eval", [](const std::string& name, double x) { return truth_eval(name, x); });
  m.def("generate",
        [](const std::string& truth, std::size_t n, std::uint64_t seed, std::uint64_t rep) {
          const auto s = generate(make_truth(parse_truth(truth)), n, seed, rep);
          std::vector<int> ys(s.ys().begin(), s.ys().end());
          return py::make_tuple(std::vector<double>(s.xs().begin(), s.xs().end()), ys);
        },
        py::arg("truth"), py::arg("n"), py::arg("seed"), py::arg("replication") = 0);
  m.def("run_benchmark",
        [](const std::string& truth, std::vector<std::size_t> sizes, std::size_t reps, std::uint64_t seed,
           std::vector<std::string> penalties, std::size_t threads) {
          Scenario sc;
          sc.truth = make_truth(parse_truth(truth));
          sc.replications = reps;
          sc.seed = seed;
          sc.threads = threads;
          for (const auto& p : penalties) sc.penalties.push_back(PenaltySpec::parse(p));
          BenchmarkReport report;
          {
            py::gil_scoped_release release;
            report = run_study(sc, sizes);
          }
          return to_python(to_json(report));
        },
        py::arg("truth"), py::arg("sizes"), py::arg("reps") = 200, py::arg("seed") = 0,
        py::arg("penalties") = std::vector<std::string>{"aic", "bic", "lin:auto", "shape:auto"},
        py::arg("threads") = 0);
}
