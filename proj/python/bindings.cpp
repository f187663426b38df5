#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "qspike/checkpoint.hpp"
#include "qspike/data.hpp"
#include "qspike/error.hpp"
#include "qspike/loss.hpp"
#include "qspike/metrics.hpp"
#include "qspike/model.hpp"
#include "qspike/noise.hpp"
#include "qspike/qsim.hpp"
#include "qspike/rnn.hpp"
#include "qspike/train.hpp"
#include "qspike/vqc.hpp"

namespace py = pybind11;
using namespace qspike;

namespace {

using Doubles = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Doubles& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

Doubles to_array(const std::vector<double>& v) {
  Doubles out({static_cast<py::ssize_t>(v.size())}, {static_cast<py::ssize_t>(sizeof(double))});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

noise::Image to_image(const Doubles& a) {
  if (a.size() != noise::kPixels) throw ShapeError("expected 784 pixels");
  noise::Image img;
  std::copy(a.data(), a.data() + noise::kPixels, img.begin());
  return img;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Statevector circuits, spiking layers, noise models and metrics for the qspike classifier.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<IndexError>(m, "IndexError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<StateError>(m, "StateError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  // qsim
  py::class_<qsim::StateVector>(m, "StateVector")
      .def_static("zero", &qsim::StateVector::zero, py::arg("n_qubits"))
      .def_property_readonly("n_qubits", &qsim::StateVector::n_qubits)
      .def_property_readonly("amplitudes",
                             [](const qsim::StateVector& s) {
                               using Amp = std::complex<double>;
                               return py::array_t<Amp>({static_cast<py::ssize_t>(s.dim())},
                                                       {static_cast<py::ssize_t>(sizeof(Amp))}, s.amplitudes().data());
                             })
      .def("hadamard", [](qsim::StateVector& s, int q) -> qsim::StateVector& { s.apply_hadamard(q); return s; },
           py::return_value_policy::reference_internal)
      .def("rx", [](qsim::StateVector& s, int q, double w) -> qsim::StateVector& { s.apply_rx(q, w); return s; },
           py::return_value_policy::reference_internal)
      .def("rz", [](qsim::StateVector& s, int q, double w) -> qsim::StateVector& { s.apply_rz(q, w); return s; },
           py::return_value_policy::reference_internal)
      .def("cnot", [](qsim::StateVector& s, int c, int t) -> qsim::StateVector& { s.apply_cnot(c, t); return s; },
           py::return_value_policy::reference_internal)
      .def("expectation_z", &qsim::StateVector::expectation_z, py::arg("q"))
      .def("norm_squared", &qsim::StateVector::norm_squared);

  // vqc
  m.def(
      "vqc_forward",
      [](const Doubles& omega, const Doubles& theta, int n_layers) {
        vqc::VqcParams p{static_cast<int>(omega.size()), n_layers, {theta.data(), theta.data() + theta.size()}};
        return to_array(vqc::forward(view(omega), p));
      },
      py::arg("omega"), py::arg("theta"), py::arg("n_layers"),
      "<Z> per qubit after encoding `omega` and applying the variational blocks.");
  m.def(
      "vqc_gradient",
      [](const Doubles& omega, const Doubles& theta, int n_layers, const Doubles& upstream) {
        vqc::VqcParams p{static_cast<int>(omega.size()), n_layers, {theta.data(), theta.data() + theta.size()}};
        const auto g = vqc::parameter_shift_gradient(view(omega), p, view(upstream));
        return py::make_tuple(to_array(g.theta), to_array(g.omega));
      },
      py::arg("omega"), py::arg("theta"), py::arg("n_layers"), py::arg("upstream"),
      "Parameter-shift gradient of sum(upstream * <Z>) as (d_theta, d_omega).");

  // rnn
  m.def(
      "pooled_spike_rate",
      [](const Doubles& x, std::size_t steps, double dt, std::uint64_t seed) {
        rnn::Rng rng(seed);
        return to_array(rnn::pooled_spike_rate(view(x), steps, dt, rng));
      },
      py::arg("potentials"), py::arg("steps") = 16, py::arg("dt") = 1.0, py::arg("seed") = 0);
  m.def("expected_rate", [](const Doubles& x, double dt) { return to_array(rnn::expected_rate(view(x), dt)); },
        py::arg("potentials"), py::arg("dt") = 1.0);

  // noise
  m.def("normalize_noise_spec", [](const std::string& s) { return noise::to_string(noise::parse_noise_spec(s)); },
        py::arg("spec"), "Canonical form of a noise spec such as 'gaussian:sigma=0.3'.");
  m.def(
      "corrupt",
      [](const Doubles& image, const std::string& spec, std::uint64_t seed) {
        noise::Rng rng(seed);
        const auto out = noise::corrupt(to_image(image), noise::parse_noise_spec(spec), rng);
        return to_array({out.begin(), out.end()});
      },
      py::arg("image"), py::arg("spec"), py::arg("seed") = 0);

  // data
  py::class_<data::Dataset>(m, "Dataset")
      .def_readonly("name", &data::Dataset::name)
      .def_readonly("n_classes", &data::Dataset::n_classes)
      .def("__len__", &data::Dataset::size)
      .def_property_readonly("images",
                             [](const data::Dataset& d) {
                               const auto rows = static_cast<py::ssize_t>(d.size());
                               const auto cols = static_cast<py::ssize_t>(d.pixels());
                               Doubles a({rows, cols}, {cols * static_cast<py::ssize_t>(sizeof(double)),
                                                        static_cast<py::ssize_t>(sizeof(double))});
                               std::copy(d.images.begin(), d.images.end(), a.mutable_data());
                               return a;
                             })
      .def_property_readonly("labels", [](const data::Dataset& d) { return py::array_t<int>(
                                                                      {static_cast<py::ssize_t>(d.size())},
                                                                      {static_cast<py::ssize_t>(sizeof(int))}, d.labels.data()); });
  m.def("load_idx", &data::load_idx, py::arg("images_path"), py::arg("labels_path"));
  m.def("filter_classes", [](const data::Dataset& d, const std::vector<int>& keep) { return data::filter_classes(d, keep); },
        py::arg("dataset"), py::arg("keep"));

  // model
  py::class_<model::RqnnModel>(m, "Model")
      .def_property_readonly("head", [](const model::RqnnModel& mm) { return std::string(model::to_string(mm.config.head)); })
      .def_property_readonly("n_qubits", [](const model::RqnnModel& mm) { return mm.config.n_qubits; })
      .def_property_readonly("n_classes", [](const model::RqnnModel& mm) { return mm.config.n_classes; })
      .def_property_readonly("input_size", [](const model::RqnnModel& mm) { return mm.config.input; })
      .def_property_readonly("parameter_count", [](const model::RqnnModel& mm) { return mm.params.count(); })
      .def(
          "probabilities",
          [](const model::RqnnModel& mm, const Doubles& image, const std::string& mode, std::uint64_t seed) {
            model::Rng rng(seed);
            return to_array(model::forward(mm, view(image), rng, model::parse_mode(mode)).probs);
          },
          py::arg("image"), py::arg("mode") = "expected", py::arg("seed") = 0)
      .def(
          "predict",
          [](const model::RqnnModel& mm, const Doubles& images) {
            return model::predict_batch(mm, view(images));
          },
          py::arg("images"), "Class index per row of a (N, pixels) array.");
  m.def(
      "create_model",
      [](std::size_t input, int n_qubits, int n_layers, int n_classes, const std::string& head, std::uint64_t seed) {
        model::ModelConfig cfg;
        cfg.input = input;
        cfg.n_qubits = n_qubits;
        cfg.n_layers = n_layers;
        cfg.n_classes = n_classes;
        cfg.head = model::parse_head(head);
        model::Rng rng(seed);
        return model::RqnnModel::create(cfg, rng);
      },
      py::arg("input") = 784, py::arg("n_qubits") = 6, py::arg("n_layers") = 2, py::arg("n_classes") = 4,
      py::arg("head") = "quantum", py::arg("seed") = 0);
  m.def("load_checkpoint", [](const std::filesystem::path& p) { return checkpoint::load_checkpoint(p).model; },
        py::arg("path"));
  m.def(
      "save_checkpoint",
      [](const model::RqnnModel& mm, const std::filesystem::path& p, std::uint64_t seed) {
        checkpoint::save_checkpoint(mm, train::AdamState::for_model(mm), seed, p);
      },
      py::arg("model"), py::arg("path"), py::arg("seed") = 0);

  // loss and metrics
  m.def("cross_entropy", [](const Doubles& probs, int target) { return train::cross_entropy(view(probs), target); },
        py::arg("probs"), py::arg("target"));
  m.def(
      "metric_bundle",
      [](const std::vector<int>& preds, const std::vector<int>& truth, int n_classes, bool micro) {
        const auto b = metrics::bundle(metrics::confusion(preds, truth, n_classes),
                                       micro ? metrics::Averaging::micro : metrics::Averaging::macro);
        return py::dict(py::arg("acc") = b.acc, py::arg("dsc") = b.dsc, py::arg("ppv") = b.ppv, py::arg("ss") = b.ss);
      },
      py::arg("predictions"), py::arg("labels"), py::arg("n_classes"), py::arg("micro") = false);
  m.def(
      "wilcoxon",
      [](const Doubles& x, const Doubles& y) {
        const auto r = metrics::wilcoxon(view(x), view(y));
        return py::dict(py::arg("w") = r.w_statistic, py::arg("p") = r.p_value, py::arg("n") = r.n_effective,
                        py::arg("exact") = r.method == metrics::WilcoxonMethod::exact);
      },
      py::arg("x"), py::arg("y"), "Two-sided paired signed-rank test.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"qspike"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line driver in-process; returns (exit_code, stdout, stderr).");

#ifdef QSPIKE_VERSION
  m.attr("__version__") = QSPIKE_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
