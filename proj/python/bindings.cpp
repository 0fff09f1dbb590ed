#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wdistlab/adversarial.hpp"
#include "wdistlab/cli.hpp"
#include "wdistlab/distances.hpp"

namespace py = pybind11;
using namespace wdistlab;

namespace {

EmpiricalMeasure measure(const Matrix& x, const std::optional<Vector>& w) {
  return w ? EmpiricalMeasure(x, *w) : EmpiricalMeasure::uniform(x);
}

}  // namespace

PYBIND11_MODULE(_wdistlab, m) {
  m.doc() = "Distances, divergences and WGAN experiments.";

  m.def(
      "w1",
      [](const Matrix& x, const Matrix& y, std::optional<Vector> wx, std::optional<Vector> wy) {
        const TransportPlan plan = w1_exact(measure(x, wx), measure(y, wy));
        return py::make_tuple(plan.cost, plan.coupling);
      },
      py::arg("x"), py::arg("y"), py::arg("wx") = py::none(), py::arg("wy") = py::none(),
      "Exact W1 between weighted point clouds; returns (cost, coupling).");
  m.def(
      "w1_1d",
      [](const Matrix& x, const Matrix& y, std::optional<Vector> wx, std::optional<Vector> wy) {
        return w1_1d(measure(x, wx), measure(y, wy));
      },
      py::arg("x"), py::arg("y"), py::arg("wx") = py::none(), py::arg("wy") = py::none());
  m.def(
      "mmd2",
      [](const Matrix& x, const Matrix& y, double bandwidth, std::optional<Vector> wx, std::optional<Vector> wy) {
        return mmd_squared(measure(x, wx), measure(y, wy), {KernelKind::kGaussian, bandwidth});
      },
      py::arg("x"), py::arg("y"), py::arg("bandwidth") = 1.0, py::arg("wx") = py::none(), py::arg("wy") = py::none());

  m.def("tv", [](std::vector<double> p, std::vector<double> q) {
    return tv_discrete(DiscreteDistribution(std::move(p)), DiscreteDistribution(std::move(q)));
  });
  m.def("kl", [](std::vector<double> p, std::vector<double> q) {
    return kl_discrete(DiscreteDistribution(std::move(p)), DiscreteDistribution(std::move(q)));
  });
  m.def("js", [](std::vector<double> p, std::vector<double> q) {
    return js_discrete(DiscreteDistribution(std::move(p)), DiscreteDistribution(std::move(q)));
  });

  m.def("parallel_lines", [](double theta) {
    const auto d = parallel_lines_closed_form(theta);
    return py::dict(py::arg("w1") = d.w1, py::arg("js") = d.js, py::arg("kl") = d.kl, py::arg("tv") = d.tv);
  });

  m.def(
      "ebgan_optimal_discriminator",
      [](std::vector<double> p, std::vector<double> q, double margin) {
        return ebgan_optimal_discriminator(DiscreteDistribution(std::move(p)), DiscreteDistribution(std::move(q)),
                                           {margin});
      },
      py::arg("p"), py::arg("q"), py::arg("margin") = 1.0);
  m.def(
      "ebgan_losses",
      [](std::vector<double> d, std::vector<double> p, std::vector<double> q, double margin) {
        const auto l = ebgan_losses(d, DiscreteDistribution(std::move(p)), DiscreteDistribution(std::move(q)), {margin});
        return py::make_tuple(l.discriminator, l.generator);
      },
      py::arg("d"), py::arg("p"), py::arg("q"), py::arg("margin") = 1.0);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"wdistlab"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int rc;
        {
          py::gil_scoped_release release;
          rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
