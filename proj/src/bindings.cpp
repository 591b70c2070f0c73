#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tshuffle/coupled.hpp"
#include "tshuffle/harness.hpp"
#include "tshuffle/rng.hpp"
#include "tshuffle/shuffle_chain.hpp"
#include "tshuffle/small_cases.hpp"
#include "tshuffle/superfast.hpp"

namespace py = pybind11;
using namespace tshuffle;

namespace {

RunRecord run_one(int n, double eps, double kappa, std::uint64_t seed,
                  const std::string& strategy) {
    CouplingConfig cfg;
    cfg.n = n;
    cfg.epsilon = eps;
    cfg.kappa = kappa;
    cfg.seed = seed;
    cfg.strategy = parse_strategy(strategy);
    cfg.validate();
    Rng rng(seed);
    if (cfg.strategy == Strategy::superfast) return superfast_full(cfg, rng);
    CoupledDecks state = init(cfg, rng);
    return cfg.strategy == Strategy::qp_baseline ? couple_qp_baseline(state, cfg, rng)
                                                 : couple_two_phase(state, cfg, rng);
}

std::string scaling_csv(const std::string& strategy, const std::vector<int>& n_grid, int reps,
                        double eps, double kappa, std::uint64_t seed) {
    ExperimentPlan plan;
    plan.strategy = parse_strategy(strategy);
    plan.n_grid = n_grid;
    plan.reps = reps;
    plan.epsilon = eps;
    plan.kappa = kappa;
    plan.master_seed = seed;
    plan.validate();
    std::ostringstream os;
    write_scaling_csv(run_scaling(plan), os);
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled random-transposition shuffles: exact small cases and "
              "coupling-time experiments";

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("n", &RunRecord::n)
        .def_readonly("epsilon", &RunRecord::epsilon)
        .def_readonly("kappa", &RunRecord::kappa)
        .def_readonly("seed", &RunRecord::seed)
        .def_readonly("coupling_time", &RunRecord::coupling_time)
        .def_readonly("last_cancellation_time", &RunRecord::last_cancellation_time)
        .def_readonly("events_total", &RunRecord::events_total)
        .def_readonly("maps_created", &RunRecord::maps_created)
        .def_readonly("maps_expired", &RunRecord::maps_expired)
        .def_readonly("maps_non_reusable", &RunRecord::maps_non_reusable)
        .def_readonly("max_live_maps", &RunRecord::max_live_maps)
        .def_readonly("capacity_exceeded", &RunRecord::capacity_exceeded)
        .def("serialize", &RunRecord::serialize)
        .def("__repr__", [](const RunRecord& r) {
            std::ostringstream os;
            os << "RunRecord(n=" << r.n << ", coupling_time=" << r.coupling_time << ")";
            return os.str();
        });

    m.def("couple", &run_one, py::arg("n"), py::arg("eps") = 0.2, py::arg("kappa") = 0.5,
          py::arg("seed") = 0, py::arg("strategy") = "superfast",
          "Run one coupled shuffle to coalescence and return its record.");

    m.def("scaling_csv", &scaling_csv, py::arg("strategy"), py::arg("n_grid"), py::arg("reps"),
          py::arg("eps") = 0.2, py::arg("kappa") = 0.5, py::arg("seed") = 0,
          "Run a grid study and return the result as CSV text.");

    m.def(
        "s3_tv", [](int m) { return rat_to_string(s3_tv(m)); }, py::arg("m"),
        "Exact 3-card total variation after m steps, as a 'p/q' string.");

    m.def("s3_square_check", &s3_square_check,
          "Exact integer identity check for the 3-card transition matrix.");

    m.def(
        "mixing_time", [](int n, double threshold) { return mixing_time(n, threshold); },
        py::arg("n"), py::arg("threshold") = 0.25,
        "Smallest step count at which the exact TV drops below the threshold.");
}
