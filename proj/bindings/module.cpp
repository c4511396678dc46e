#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csdas/classification.hpp"
#include "csdas/features.hpp"
#include "csdas/filterbank.hpp"
#include "csdas/pipeline.hpp"
#include "csdas/reconstruction.hpp"
#include "csdas/sensing.hpp"
#include "csdas/version.hpp"

namespace py = pybind11;
using namespace csdas;

namespace {

Trace make_trace(const Vec& samples, double sample_rate_hz,
                 const std::string& modality) {
  Trace t;
  t.samples = samples;
  t.sample_rate_hz = sample_rate_hz;
  t.modality = modality == "intensity" ? Modality::intensity : Modality::phase;
  return t;
}

}  // namespace

PYBIND11_MODULE(_csdas, m) {
  m.doc() = "Compressed-domain vibration detection for DAS: core operations";
  m.attr("__version__") = kVersion;

  py::register_exception<ParameterError>(m, "ParameterError",
                                         PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  py::class_<ObservationMatrix>(m, "ObservationMatrix")
      .def_readonly("entries", &ObservationMatrix::entries)
      .def_readonly("mr", &ObservationMatrix::mr)
      .def_readonly("seed", &ObservationMatrix::seed)
      .def_property_readonly("m", &ObservationMatrix::m)
      .def_property_readonly("n", &ObservationMatrix::n)
      .def_property_readonly("id", &ObservationMatrix::id)
      .def_property_readonly("kind", [](const ObservationMatrix& self) {
        return std::string(to_string(self.kind));
      });

  m.def(
      "make_observation_matrix",
      [](Eigen::Index n, double mr, std::uint64_t seed,
         const std::string& kind) {
        return make_observation_matrix(n, mr, seed,
                                       matrix_kind_from_string(kind));
      },
      py::arg("n"), py::arg("mr"), py::arg("seed"),
      py::arg("kind") = "row_orthonormal_gaussian");

  py::class_<CompressedTrace>(m, "CompressedTrace")
      .def_readonly("samples", &CompressedTrace::samples)
      .def_readonly("source_n", &CompressedTrace::source_n)
      .def_readonly("matrix_id", &CompressedTrace::matrix_id);

  m.def(
      "compress",
      [](const ObservationMatrix& matrix, const Vec& x, double sample_rate_hz,
         const std::string& modality) {
        return compress(matrix, make_trace(x, sample_rate_hz, modality));
      },
      py::arg("matrix"), py::arg("x"), py::arg("sample_rate_hz") = 10000.0,
      py::arg("modality") = "phase");

  m.def(
      "dft_coefficients",
      [](const Vec& x, double sample_rate_hz) {
        return dft_coefficients(make_trace(x, sample_rate_hz, "phase"));
      },
      py::arg("x"), py::arg("sample_rate_hz") = 10000.0);

  m.def(
      "sparsity_profile",
      [](const Vec& x, const std::vector<double>& fractions,
         double sample_rate_hz) {
        const auto profile = sparsity_profile(
            make_trace(x, sample_rate_hz, "phase"), fractions);
        std::map<double, Eigen::Index> k(profile.k_at_fraction.begin(),
                                         profile.k_at_fraction.end());
        return py::make_tuple(profile.sorted_magnitudes, k);
      },
      py::arg("x"), py::arg("fractions") = std::vector<double>{0.01},
      py::arg("sample_rate_hz") = 10000.0);

  m.def("design_bandpass", &design_bandpass, py::arg("sample_rate_hz"),
        py::arg("lo_hz"), py::arg("hi_hz"), py::arg("taps"));

  py::class_<FilterBank>(m, "FilterBank")
      .def_readonly("impulse_responses", &FilterBank::impulse_responses)
      .def_readonly("n", &FilterBank::n)
      .def_readonly("sample_rate_hz", &FilterBank::sample_rate_hz)
      .def_property_readonly("band_count", &FilterBank::band_count)
      .def_property_readonly("band_edges", [](const FilterBank& self) {
        std::vector<std::pair<double, double>> edges;
        for (const auto& b : self.bands) edges.emplace_back(b.lo_hz, b.hi_hz);
        return edges;
      });

  m.def("build_filter_bank", &build_filter_bank, py::arg("sample_rate_hz"),
        py::arg("n"), py::arg("n_bands") = 50, py::arg("band_width_hz") = 30.0,
        py::arg("taps") = 1023);

  py::class_<CompressedFilterBank>(m, "CompressedFilterBank")
      .def_readonly("compressed_impulse_responses",
                    &CompressedFilterBank::compressed_impulse_responses)
      .def_readonly("matrix_id", &CompressedFilterBank::matrix_id)
      .def_readonly("m", &CompressedFilterBank::m);

  m.def("circulant_apply", &circulant_apply, py::arg("impulse_response"),
        py::arg("x"));
  m.def("project_filter", &project_filter, py::arg("impulse_response"),
        py::arg("matrix"));
  m.def("project_filter_bank", &project_filter_bank, py::arg("bank"),
        py::arg("matrix"));

  m.def(
      "fbe",
      [](const Vec& x, const FilterBank& bank) {
        return fbe(make_trace(x, bank.sample_rate_hz, "phase"), bank)
            .band_energies;
      },
      py::arg("x"), py::arg("bank"));

  m.def(
      "cfbe",
      [](const CompressedTrace& y, const CompressedFilterBank& cbank) {
        return cfbe(y, cbank).band_energies;
      },
      py::arg("y"), py::arg("cbank"));

  m.def("pearson_correlation", &pearson_correlation, py::arg("a"),
        py::arg("b"));

  m.def(
      "omp_reconstruct",
      [](const CompressedTrace& y, const ObservationMatrix& matrix, int k,
         std::optional<Vec> reference) {
        std::optional<Trace> ref;
        if (reference) ref = make_trace(*reference, 1.0, "phase");
        const auto res =
            omp_reconstruct(y, matrix, k, ref ? &*ref : nullptr);
        py::dict out;
        out["x"] = res.reconstructed.samples;
        out["k"] = res.k_used;
        out["mr"] = res.mr;
        out["wall_time_s"] = res.wall_time_s;
        out["selected_atoms"] = res.selected_atoms;
        if (res.pcc) {
          out["pcc"] = *res.pcc;
        }
        return out;
      },
      py::arg("y"), py::arg("matrix"), py::arg("k"),
      py::arg("reference") = std::nullopt);
}
