#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pglee/clustering.hpp"
#include "pglee/encoder.hpp"
#include "pglee/error.hpp"
#include "pglee/pipeline.hpp"
#include "pglee/promptgen.hpp"

namespace py = pybind11;
using namespace pglee;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Eigen::VectorXd> rows_of(const RowMatrix& m) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
  return out;
}

RowMatrix stack(const std::vector<Eigen::VectorXd>& v) {
  RowMatrix m(static_cast<Eigen::Index>(v.size()), v.empty() ? 0 : v[0].size());
  for (std::size_t i = 0; i < v.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
  return m;
}

Sentence make_sentence(const std::string& text) {
  Sentence s;
  s.sent_id = "py";
  s.text = text;
  s.tokens = tokenize(text);
  return s;
}

py::list events_to_py(const std::vector<CandidateEvent>& events) {
  py::list out;
  for (const auto& e : events) {
    py::list args;
    for (const auto& a : e.arguments) args.append(a.text);
    py::dict d;
    d["trigger"] = e.trigger_text;
    d["trigger_span"] = e.trigger_span ? py::object(py::make_tuple(e.trigger_span->start, e.trigger_span->end)) : py::none();
    d["arguments"] = args;
    out.append(d);
  }
  return out;
}

std::vector<CandidateEvent> events_from_py(const std::vector<std::pair<std::string, std::vector<std::string>>>& in) {
  std::vector<CandidateEvent> out;
  for (const auto& [trigger, args] : in) {
    CandidateEvent e{trigger, std::nullopt, {}};
    for (const auto& a : args) e.arguments.push_back({a, std::nullopt});
    out.push_back(std::move(e));
  }
  return out;
}

int run_command(const std::string& name, const std::string& config, const std::vector<std::string>& overrides) {
  std::ostringstream log;
  int rc = 0;
  try {
    const PipelineConfig c = load_config(config, overrides);
    if (name == "extract") {
      rc = cmd_extract(c, log);
    } else if (name == "induce") {
      rc = cmd_induce(c, log);
    } else if (name == "sweep") {
      rc = cmd_sweep(c, log);
    } else if (name == "eval") {
      rc = cmd_eval(c, log);
    } else {
      throw py::value_error("unknown command: " + name);
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    rc = e.exit_code();
  }
  if (!log.str().empty()) py::print(log.str(), py::arg("end") = "", py::arg("file") = py::module_::import("sys").attr("stderr"));
  return rc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Event schema induction core";

  py::register_exception<Error>(m, "PgleeError", PyExc_RuntimeError);

  m.def("tokenize", [](const std::string& text) {
    std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
    for (const auto& t : tokenize(text)) out.emplace_back(t.text, t.start, t.end);
    return out;
  }, py::arg("text"));

  m.def("build_prompt", [](const std::string& text, std::vector<std::string> verbs, std::vector<std::string> nouns,
                           const std::vector<std::string>& gazetteer) {
    const Lexicon lex({verbs.begin(), verbs.end()}, {nouns.begin(), nouns.end()}, gazetteer);
    return build_prompt(make_sentence(text), lex).prompt_text;
  }, py::arg("text"), py::arg("verbs"), py::arg("nouns"), py::arg("gazetteer"));

  m.def("generate_rule_based", [](const std::string& text, std::vector<std::string> verbs,
                                  std::vector<std::string> nouns, const std::vector<std::string>& gazetteer) {
    const Lexicon lex({verbs.begin(), verbs.end()}, {nouns.begin(), nouns.end()}, gazetteer);
    return events_to_py(generate_rule_based(make_sentence(text), lex));
  }, py::arg("text"), py::arg("verbs"), py::arg("nouns"), py::arg("gazetteer"));

  m.def("serialize_candidates", [](const std::vector<std::pair<std::string, std::vector<std::string>>>& events) {
    return serialize_candidates(events_from_py(events));
  }, py::arg("events"), "events: list of (trigger, [arguments]) pairs");

  m.def("parse_candidates", [](const std::string& y, const std::string& sentence) {
    const auto r = parse_candidates(y, make_sentence(sentence));
    return py::make_tuple(events_to_py(r.events), r.diagnostics.skipped);
  }, py::arg("y"), py::arg("sentence") = "");

  m.def("normalize_attention", [](const std::vector<double>& scores, double slope) {
    return normalize_attention(scores, slope);
  }, py::arg("scores"), py::arg("slope") = 0.2);

  m.def("minibatch_kmeans", [](const RowMatrix& points, std::size_t k, std::size_t iterations, std::size_t batch,
                               std::uint64_t seed) {
    const auto pts = rows_of(points);
    const ClusterModel model = minibatch_kmeans(pts, {k, iterations, batch, seed});
    py::dict d;
    d["centroids"] = stack(model.centroids);
    d["assignments"] = model.assignments;
    d["counts"] = model.counts;
    d["inertia_trace"] = model.inertia_trace;
    return d;
  }, py::arg("points"), py::arg("k"), py::arg("iterations") = 10, py::arg("batch") = 256, py::arg("seed") = 0);

  m.def("membership_prob", [](const Eigen::VectorXd& point, const RowMatrix& centroids) {
    ClusterModel model;
    model.centroids = rows_of(centroids);
    model.k = model.centroids.size();
    return membership_prob(point, model);
  }, py::arg("point"), py::arg("centroids"));

  m.def("silhouette", [](const RowMatrix& points, const std::vector<std::size_t>& assignments) {
    return silhouette(rows_of(points), assignments);
  }, py::arg("points"), py::arg("assignments"));

  m.def("sweep_k", [](const RowMatrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed) {
    const SweepResult s = sweep_k(rows_of(points), k_min, k_max, seed);
    return py::make_tuple(s.best_k, s.candidates);
  }, py::arg("points"), py::arg("k_min"), py::arg("k_max"), py::arg("seed") = 0);

  m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
        "Runs extract/induce/sweep/eval and returns the process exit code.");
}
