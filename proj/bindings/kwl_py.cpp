#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kwl/analysis.hpp"
#include "kwl/config.hpp"
#include "kwl/pipeline.hpp"
#include "kwl/solver.hpp"
#include "kwl/spectrum.hpp"
#include "kwl/sweep.hpp"

namespace py = pybind11;
using namespace kwl;

PYBIND11_MODULE(_kwl, m) {
  m.doc() = "Steep potential well laboratory: discrete operators, well spectra and "
            "minimax solvers for the nonlocal Kirchhoff problem.";

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double, int>(), py::arg("dim"), py::arg("halfwidth"),
           py::arg("points_per_axis"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("halfwidth", &Grid::halfwidth)
      .def_property_readonly("points_per_axis", &Grid::points_per_axis)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("node_count", &Grid::node_count)
      .def("coordinate", &Grid::coordinate);

  py::class_<PotentialWell>(m, "PotentialWell")
      .def(py::init<int, double, double, double, double, double, double>(), py::arg("dim"),
           py::arg("well_halfwidth"), py::arg("ramp_width"), py::arg("cap"),
           py::arg("tail_floor"), py::arg("offset"), py::arg("coupling"))
      .def_property_readonly("dim", &PotentialWell::dim)
      .def_property_readonly("well_halfwidth", &PotentialWell::well_halfwidth)
      .def_property_readonly("ramp_width", &PotentialWell::ramp_width)
      .def_property_readonly("cap", &PotentialWell::cap)
      .def_property_readonly("tail_floor", &PotentialWell::tail_floor)
      .def_property_readonly("offset", &PotentialWell::offset)
      .def_property_readonly("coupling", &PotentialWell::coupling)
      .def("with_coupling", &PotentialWell::with_coupling)
      .def("potential",
           [](const PotentialWell& w, double x, double y, double z) {
             return w.potential({x, y, z});
           },
           py::arg("x"), py::arg("y") = 0.0, py::arg("z") = 0.0)
      .def_property_readonly("tail_set_measure", &PotentialWell::tail_set_measure)
      .def_property_readonly("finite_measure_threshold",
                             &PotentialWell::finite_measure_threshold);

  py::class_<ProblemParams>(m, "ProblemParams")
      .def(py::init<double, double>(), py::arg("p"), py::arg("alpha"))
      .def_readonly("p", &ProblemParams::p)
      .def_readonly("alpha", &ProblemParams::alpha);

  py::class_<HypothesisCheck>(m, "HypothesisCheck")
      .def_readonly("name", &HypothesisCheck::name)
      .def_readonly("passed", &HypothesisCheck::passed)
      .def_readonly("detail", &HypothesisCheck::detail);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("passed", &ValidationReport::passed)
      .def_readonly("checks", &ValidationReport::checks)
      .def_readonly("tail_set_measure", &ValidationReport::tail_set_measure)
      .def_readonly("finite_measure_threshold", &ValidationReport::finite_measure_threshold)
      .def("summary", &ValidationReport::summary);

  m.def("validate_well", &validate_well);
  m.def("measure_negative_set", &measure_negative_set);

  py::class_<OperatorSet>(m, "OperatorSet")
      .def_property_readonly("size", &OperatorSet::size)
      .def_readonly("quad_weight", &OperatorSet::quad_weight)
      .def_readonly("mass_plus", &OperatorSet::mass_plus)
      .def_readonly("mass_minus", &OperatorSet::mass_minus)
      .def_property_readonly("stiffness",
                             [](const OperatorSet& ops) { return Eigen::MatrixXd(ops.stiffness); })
      .def("dirichlet_energy", &OperatorSet::dirichlet_energy)
      .def("lambda_norm_sq", &OperatorSet::lambda_norm_sq)
      .def("negative_form", &OperatorSet::negative_form)
      .def("l2_sq", &OperatorSet::l2_sq)
      .def("p_mass", &OperatorSet::p_mass);

  m.def("assemble", &assemble, py::arg("grid"), py::arg("well"));
  m.def("energy", &energy, py::arg("ops"), py::arg("params"), py::arg("u"));
  m.def("gradient", &gradient, py::arg("ops"), py::arg("params"), py::arg("u"));
  m.def("nehari_defect", &nehari_defect, py::arg("ops"), py::arg("params"), py::arg("u"));

  py::class_<EmbeddingConstants>(m, "EmbeddingConstants")
      .def_readonly("sobolev", &EmbeddingConstants::sobolev)
      .def_readonly("sobolev_p", &EmbeddingConstants::sobolev_p)
      .def_readonly("l2_factor", &EmbeddingConstants::l2_factor)
      .def_readonly("lp_factor", &EmbeddingConstants::lp_factor);

  m.def("embedding_constants", &embedding_constants, py::arg("well"), py::arg("coupling"),
        py::arg("sobolev"), py::arg("sobolev_p"));
  m.def("talenti_sobolev_constant", &talenti_sobolev_constant);
  m.def("discrete_tail_embedding_constant", &discrete_tail_embedding_constant);
  m.def("discrete_p_embedding_constant", &discrete_p_embedding_constant, py::arg("ops"),
        py::arg("grid"), py::arg("p"), py::arg("seed"), py::arg("safety") = 0.99);

  py::class_<SpectralLevel>(m, "SpectralLevel")
      .def_readonly("value", &SpectralLevel::value)
      .def_readonly("vectors", &SpectralLevel::vectors)
      .def_readonly("residual", &SpectralLevel::residual)
      .def_property_readonly("multiplicity", &SpectralLevel::multiplicity);

  py::class_<DirichletSpectrum>(m, "DirichletSpectrum")
      .def_readonly("levels", &DirichletSpectrum::levels)
      .def_readonly("plateau_nodes", &DirichletSpectrum::plateau_nodes)
      .def("value", &DirichletSpectrum::value)
      .def_property_readonly("level_count", &DirichletSpectrum::level_count);

  m.def("dirichlet_spectrum", &dirichlet_spectrum, py::arg("grid"), py::arg("well"),
        py::arg("count"));
  m.def("threshold_index", &threshold_index);

  py::class_<WellSpectrum>(m, "WellSpectrum")
      .def_readonly("coupling", &WellSpectrum::coupling)
      .def_readonly("levels", &WellSpectrum::levels)
      .def("value", &WellSpectrum::value)
      .def("minimizer", &WellSpectrum::minimizer)
      .def_property_readonly("level_count", &WellSpectrum::level_count);

  m.def("well_spectrum", &well_spectrum, py::arg("ops"), py::arg("well"), py::arg("m_max"));

  py::class_<FlowRow>(m, "FlowRow")
      .def_readonly("coupling", &FlowRow::coupling)
      .def_readonly("level", &FlowRow::level)
      .def_readonly("value", &FlowRow::value)
      .def_readonly("dirichlet_value", &FlowRow::dirichlet_value)
      .def_readonly("subspace_distance", &FlowRow::subspace_distance);

  m.def("well_spectrum_flow", &well_spectrum_flow, py::arg("grid"), py::arg("well"),
        py::arg("couplings"), py::arg("m_max"), py::arg("threads") = 1);

  py::enum_<SubspaceSide>(m, "SubspaceSide")
      .value("low", SubspaceSide::low)
      .value("high", SubspaceSide::high);

  py::class_<CoercivityCheck>(m, "CoercivityCheck")
      .def_readonly("lhs", &CoercivityCheck::lhs)
      .def_readonly("rhs", &CoercivityCheck::rhs)
      .def_readonly("holds", &CoercivityCheck::holds)
      .def_readonly("vacuous", &CoercivityCheck::vacuous);

  m.def("coercivity_split", &coercivity_split, py::arg("wspec"), py::arg("spectrum"),
        py::arg("ops"), py::arg("u"), py::arg("side"));

  py::class_<LinkingGeometry>(m, "LinkingGeometry")
      .def_readonly("sphere_radius", &LinkingGeometry::sphere_radius)
      .def_readonly("energy_floor", &LinkingGeometry::energy_floor)
      .def_readonly("boundary_radius", &LinkingGeometry::boundary_radius)
      .def_readonly("coupling_cap", &LinkingGeometry::coupling_cap)
      .def_readonly("gamma_threshold", &LinkingGeometry::gamma_threshold)
      .def_readonly("min_p_norm", &LinkingGeometry::min_p_norm);

  m.def("linking_geometry", &linking_geometry, py::arg("consts"), py::arg("spectrum"),
        py::arg("params"), py::arg("coupling_floor"), py::arg("seed") = 1234,
        py::arg("samples") = 10000);
  m.def("ps_bound", &ps_bound, py::arg("alpha"), py::arg("energy_cap"), py::arg("offset"),
        py::arg("tail_measure"), py::arg("sobolev"), py::arg("p"));
  m.def("nontriviality_threshold", &nontriviality_threshold, py::arg("p"), py::arg("sobolev"),
        py::arg("offset"), py::arg("tail_floor"), py::arg("ps_B"));

  py::enum_<SolveMethod>(m, "SolveMethod")
      .value("nehari", SolveMethod::nehari)
      .value("mountain_pass", SolveMethod::mountain_pass)
      .value("linking", SolveMethod::linking)
      .value("limit", SolveMethod::limit);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("tol", &SolverOptions::tol)
      .def_readwrite("max_iters", &SolverOptions::max_iters)
      .def_readwrite("newton_switch", &SolverOptions::newton_switch)
      .def_readwrite("path_points", &SolverOptions::path_points)
      .def_readwrite("boundary_radius", &SolverOptions::boundary_radius)
      .def_readwrite("warm_start", &SolverOptions::warm_start);

  py::class_<SolutionRecord>(m, "SolutionRecord")
      .def_readonly("u", &SolutionRecord::u)
      .def_readonly("alpha", &SolutionRecord::alpha)
      .def_readonly("coupling", &SolutionRecord::coupling)
      .def_readonly("p", &SolutionRecord::p)
      .def_readonly("energy", &SolutionRecord::energy_value)
      .def_readonly("grad_norm", &SolutionRecord::grad_norm)
      .def_readonly("defect", &SolutionRecord::defect)
      .def_readonly("norm_lambda", &SolutionRecord::norm_lambda)
      .def_readonly("mass_outside", &SolutionRecord::mass_outside)
      .def_readonly("iterations", &SolutionRecord::iterations)
      .def_readonly("method", &SolutionRecord::method);

  m.def("nehari_solve", &nehari_solve, py::arg("ops"), py::arg("params"), py::arg("seed"),
        py::arg("options") = SolverOptions{});
  m.def("mountain_pass_solve", &mountain_pass_solve, py::arg("ops"), py::arg("params"),
        py::arg("endpoint"), py::arg("options") = SolverOptions{});
  m.def("linking_solve", &linking_solve, py::arg("ops"), py::arg("params"), py::arg("wspec"),
        py::arg("spectrum"), py::arg("options") = SolverOptions{});
  m.def("limit_problem_solve", &limit_problem_solve, py::arg("grid"), py::arg("well"),
        py::arg("params"), py::arg("options") = SolverOptions{});
  m.def("mass_outside_plateau", &mass_outside_plateau);

  py::class_<ConcentrationRow>(m, "ConcentrationRow")
      .def_readonly("coupling", &ConcentrationRow::coupling)
      .def_readonly("energy", &ConcentrationRow::energy_value)
      .def_readonly("grad_norm", &ConcentrationRow::grad_norm)
      .def_readonly("defect", &ConcentrationRow::defect)
      .def_readonly("mass_outside", &ConcentrationRow::mass_outside)
      .def_readonly("h1_dist_rel", &ConcentrationRow::h1_dist_rel)
      .def_readonly("well_energy", &ConcentrationRow::well_energy)
      .def_readonly("flagged", &ConcentrationRow::flagged);

  py::class_<SweepOptions>(m, "SweepOptions")
      .def(py::init<>())
      .def_readwrite("solver", &SweepOptions::solver)
      .def_readwrite("warm_start", &SweepOptions::warm_start)
      .def_readwrite("guaranteed_coupling", &SweepOptions::guaranteed_coupling);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("limit_record", &SweepResult::limit_record)
      .def_readonly("records", &SweepResult::records);

  m.def("concentration_sweep", &concentration_sweep, py::arg("grid"), py::arg("well"),
        py::arg("params"), py::arg("couplings"), py::arg("options") = SweepOptions{});

  m.def(
      "run_experiment",
      [](const std::string& config_path, const std::string& out_dir, const std::string& stage,
         int threads) {
        const ExperimentConfig config = parse_config_file(config_path);
        RunOptions options;
        options.out_dir = out_dir;
        options.stage = stage;
        options.threads = threads;
        return run_experiment(config, options);
      },
      py::arg("config_path"), py::arg("out_dir") = "", py::arg("stage") = "",
      py::arg("threads") = 0);
}
