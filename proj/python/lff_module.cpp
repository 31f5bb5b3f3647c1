#include "lff/corpus.hpp"
#include "lff/diagnose.hpp"
#include "lff/engine.hpp"
#include "lff/serialize.hpp"
#include "lff/service.hpp"
#include "lff/usage.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace lff;

// Results cross the boundary as JSON text; the Python side decodes them.
namespace {

SolveOptions parseOptions(const std::string &optionsJson) {
  try {
    return options_from_json(optionsJson.empty() ? Json() : Json::parse(optionsJson));
  } catch (const Json::exception &e) {
    throw std::invalid_argument(std::string("malformed options: ") + e.what());
  }
}

std::string checkText(const std::string &text) {
  py::gil_scoped_release release;
  SolveOptions o;
  o.mode = Mode::Check;
  return to_json(run(text, o)).dump();
}

std::string solveText(const std::string &text, const std::string &optionsJson) {
  auto o = parseOptions(optionsJson);
  py::gil_scoped_release release;
  o.mode = Mode::Solve;
  return to_json(run(text, o)).dump();
}

std::string diagnoseText(const std::string &text, const std::string &kind,
                         const std::string &optionsJson) {
  DiagnoseMode mode;
  if (kind == "mus")
    mode = DiagnoseMode::Mus;
  else if (kind == "approx")
    mode = DiagnoseMode::Approx;
  else if (kind == "clauses")
    mode = DiagnoseMode::Clauses;
  else
    throw std::invalid_argument("kind must be one of mus, approx, clauses");
  auto o = parseOptions(optionsJson);
  py::gil_scoped_release release;
  return to_json(diagnose(text, mode, o)).dump();
}

std::filesystem::path corpusDir(const std::string &dir) {
  return dir.empty() ? default_corpus_dir() : std::filesystem::path(dir);
}

std::string puzzles(const std::string &dir, const std::string &level) {
  std::optional<Level> l;
  if (!level.empty() && !(l = parse_level(level)))
    throw std::invalid_argument("unknown level " + level);
  Json out = Json::array();
  for (const auto &p : list_puzzles(load_corpus(corpusDir(dir)), l))
    out.push_back(puzzle_summary(p));
  return out.dump();
}

std::string puzzle(const std::string &dir, const std::string &id) {
  for (const auto &p : load_corpus(corpusDir(dir)))
    if (p.id == id)
      return to_json(p).dump();
  throw py::key_error("no such puzzle: " + id);
}

std::string verifyCorpus(const std::string &dir, double deadline) {
  const auto all = load_corpus(corpusDir(dir));
  std::vector<VerifyResult> rs;
  {
    py::gil_scoped_release release;
    rs = verify_all(all, deadline);
  }
  Json out = Json::array();
  for (const auto &r : rs)
    out.push_back({{"id", r.id}, {"pass", r.pass}, {"models", r.models},
                   {"seconds", r.seconds}, {"detail", r.detail}});
  return out.dump();
}

} // namespace

PYBIND11_MODULE(_lff, m) {
  m.doc() = "Finite model finding for many-sorted first-order logic";
  py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("check", &checkText, py::arg("text"));
  m.def("solve", &solveText, py::arg("text"), py::arg("options_json") = "");
  m.def("diagnose", &diagnoseText, py::arg("text"), py::arg("kind") = "mus",
        py::arg("options_json") = "");
  m.def("puzzles", &puzzles, py::arg("dir") = "", py::arg("level") = "");
  m.def("puzzle", &puzzle, py::arg("dir"), py::arg("id"));
  m.def("verify_corpus", &verifyCorpus, py::arg("dir") = "", py::arg("deadline") = 5.0);
  m.def("default_corpus_dir", [] { return default_corpus_dir().string(); });
  m.def("by_day_csv", [](const std::string &log) { return by_day_csv(read_usage_log(log)); },
        py::arg("log"));
  m.def("intervals_csv",
        [](const std::string &log, const std::string &session) {
          return intervals_csv(read_usage_log(log), session);
        },
        py::arg("log"), py::arg("session"));

  py::class_<Service>(m, "Service")
      .def(py::init([](int port, const std::string &host, const std::string &logPath,
                       std::optional<std::string> dataDir, int pool, double maxDeadline) {
             ServiceConfig c;
             c.port = port;
             c.host = host;
             c.logPath = logPath;
             if (dataDir)
               c.dataDir = *dataDir;
             c.poolSize = pool;
             c.maxDeadlineSecs = maxDeadline;
             return std::make_unique<Service>(c);
           }),
           py::arg("port") = 0, py::arg("host") = "127.0.0.1",
           py::arg("log_path") = "usage.jsonl", py::arg("data_dir") = py::none(),
           py::arg("pool") = 0, py::arg("max_deadline") = 30.0)
      .def("start", &Service::start, py::call_guard<py::gil_scoped_release>())
      .def("stop", &Service::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("port", &Service::port);
}
