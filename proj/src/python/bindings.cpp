// Thin pybind11 layer. Structured values cross the boundary as canonical JSON text;
// the Python package decodes them.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "artism/api.hpp"
#include "artism/cli.hpp"
#include "artism/error.hpp"
#include "artism/gateway.hpp"
#include "artism/ismism.hpp"
#include "artism/orchestrator.hpp"

namespace py = pybind11;
using namespace artism;

namespace {

SimulationConfig config_from(const std::optional<std::string>& config_path, std::optional<std::uint64_t> seed,
                             const std::map<std::string, std::string>& overrides) {
    auto cfg = config_path ? load_config(*config_path) : default_config(cli::data_dir());
    if (seed) cfg.global_seed = *seed;
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

/// Owns a Service (and through it the Simulation) so Python sees one object.
class PySimulation {
public:
    PySimulation(const std::optional<std::string>& config_path, std::optional<std::uint64_t> seed,
                 const std::map<std::string, std::string>& overrides, bool debug) {
        auto cfg = config_from(config_path, seed, overrides);
        service_ = std::make_unique<api::Service>(Simulation::create(cfg, make_gateway(cfg)), api::Options{debug});
    }

    void step(std::int64_t n) {
        const auto r = service_->handle("POST", "/api/v1/simulation/step", {}, Json{{"n", n}}.dump());
        if (r.status != 200) throw Error(ErrorCode::InvalidArgument, r.body.dump());
    }

    std::int64_t tick() const {
        std::int64_t t = 0;
        service_->with_simulation([&](const Simulation& s) { t = s.world().tick; });
        return t;
    }

    std::string log_hash() const {
        std::string h;
        service_->with_simulation([&](const Simulation& s) { h = s.log().hash_hex(); });
        return h;
    }

    std::vector<std::string> event_lines() const {
        std::vector<std::string> out;
        service_->with_simulation([&](const Simulation& s) {
            for (const auto& e : s.log().entries()) out.push_back(canonical_line(e));
        });
        return out;
    }

    std::string snapshot_text() const {
        std::string out;
        service_->with_simulation([&](const Simulation& s) { out = snapshot(s.world()); });
        return out;
    }

    py::tuple request(const std::string& method, const std::string& path, const std::map<std::string, std::string>& query,
                      const std::string& body) {
        api::Response r;
        {
            py::gil_scoped_release release;
            r = service_->handle(method, path, query, body);
        }
        return py::make_tuple(r.status, r.body.dump());
    }

    void persist(const std::string& dir) const { service_->persist(dir); }

private:
    std::unique_ptr<api::Service> service_;
};

}  // namespace

PYBIND11_MODULE(_artism, m) {
    m.doc() = "Artism simulator core";

    static py::exception<Error> artism_error(m, "ArtismError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            artism_error(e.what());
        }
    });

    m.def("data_dir", [] { return cli::data_dir().string(); });

    m.def(
        "cli_main",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::main(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));

    m.def(
        "mock_complete",
        [](const std::string& template_id, const std::map<std::string, std::string>& bindings, std::uint64_t seed) {
            auto gw = gateway::Gateway::mock();
            gateway::CompletionRequest req{template_id, {}, seed};
            for (const auto& [k, v] : bindings) req.bindings[k] = v;
            return gw->complete(req).text;
        },
        py::arg("template_id"), py::arg("bindings"), py::arg("seed") = 0);

    m.def(
        "recombine",
        [](const std::vector<std::string>& labels, std::size_t r, std::optional<std::uint64_t> seed, std::size_t m) {
            std::vector<ismism::ConceptUnit> units;
            for (std::size_t i = 0; i < labels.size(); ++i) units.push_back({"u-" + std::to_string(i), labels[i], "", ""});
            const auto strategy = seed ? ismism::RecombineStrategy::sample(*seed, m) : ismism::RecombineStrategy::exhaustive();
            std::vector<std::vector<std::string>> out;
            for (const auto& combo : ismism::recombine(units, r, strategy)) {
                out.emplace_back();
                for (const auto& u : combo) out.back().push_back(u.label);
            }
            return out;
        },
        py::arg("labels"), py::arg("r"), py::arg("seed") = py::none(), py::arg("m") = 0);

    py::class_<PySimulation>(m, "Simulation")
        .def(py::init<const std::optional<std::string>&, std::optional<std::uint64_t>,
                      const std::map<std::string, std::string>&, bool>(),
             py::arg("config") = py::none(), py::arg("seed") = py::none(),
             py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("debug") = false)
        .def("step", &PySimulation::step, py::arg("n") = 1, py::call_guard<py::gil_scoped_release>())
        .def_property_readonly("tick", &PySimulation::tick)
        .def_property_readonly("log_hash", &PySimulation::log_hash)
        .def("event_lines", &PySimulation::event_lines)
        .def("snapshot_text", &PySimulation::snapshot_text)
        .def("request", &PySimulation::request, py::arg("method"), py::arg("path"),
             py::arg("query") = std::map<std::string, std::string>{}, py::arg("body") = "")
        .def("persist", &PySimulation::persist, py::arg("dir"));
}
