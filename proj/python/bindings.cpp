#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "slimecap/bounds.hpp"
#include "slimecap/growthfit.hpp"
#include "slimecap/morphometry.hpp"
#include "slimecap/ness.hpp"
#include "slimecap/oscillators.hpp"
#include "slimecap/pipeline.hpp"

namespace py = pybind11;
using namespace slimecap;

namespace {

std::vector<double> to_vec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

BinaryMask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a, double scale) {
    if (a.ndim() != 2) throw UsageError("mask must be a 2-D array");
    BinaryMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), scale);
    auto r = a.unchecked<2>();
    for (py::ssize_t y = 0; y < a.shape(0); ++y)
        for (py::ssize_t x = 0; x < a.shape(1); ++x)
            if (r(y, x)) m.set(static_cast<int>(x), static_cast<int>(y));
    return m;
}

py::dict fit_dict(const FitResult& r) {
    py::dict d;
    d["model"] = to_string(r.model_kind);
    d["r_squared"] = r.r_squared;
    d["rmse"] = r.rmse;
    if (auto* s = std::get_if<SigmoidParams>(&r.params)) {
        d["params"] = py::make_tuple(s->amplitude, s->rate, s->inflection);
    } else if (auto* b = std::get_if<BiSigmoidParams>(&r.params)) {
        d["params"] = py::make_tuple(b->phase1.amplitude, b->phase1.rate, b->phase1.inflection,
                                     b->phase2.amplitude, b->phase2.rate, b->phase2.inflection);
    } else {
        py::list phases;
        for (const auto& p : std::get<CircFitParams>(r.params).phases)
            phases.append(py::make_tuple(p.drop, p.rate, p.midpoint));
        d["params"] = phases;
    }
    return d;
}

GrowthCurve curve_from(const std::vector<double>& p) {
    if (p.size() == 3) return SigmoidParams{p[0], p[1], p[2]};
    if (p.size() == 6) return BiSigmoidParams{{p[0], p[1], p[2]}, {p[3], p[4], p[5]}};
    throw UsageError("curve parameters must have 3 or 6 entries");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Growth fits, capacity bounds and oscillator ratios";

    static py::exception<Error> base(m, "Error");
    static py::exception<UsageError> usage(m, "UsageError", base.ptr());
    static py::exception<DataError> data(m, "DataError", base.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const UsageError& e) {
            usage(e.what());
        } catch (const DataError& e) {
            data(e.what());
        } catch (const NumericalError& e) {
            numerical(e.what());
        }
    });

    m.def("evaluate", [](const std::vector<double>& p, double t) { return evaluate(curve_from(p), t); },
          py::arg("params"), py::arg("t"));
    m.def("fit_sigmoid", [](py::array_t<double> t, py::array_t<double> y) {
        return fit_dict(fit_sigmoid(to_vec(t), to_vec(y)));
    });
    m.def("fit_bisigmoid", [](py::array_t<double> t, py::array_t<double> y) {
        return fit_dict(fit_bisigmoid(to_vec(t), to_vec(y)));
    });
    m.def("fit_growth", [](py::array_t<double> t, py::array_t<double> y) {
        return fit_dict(fit_growth(to_vec(t), to_vec(y)));
    });
    m.def("fit_circularity", [](py::array_t<double> t, py::array_t<double> y, int phases) {
        return fit_dict(fit_circularity(to_vec(t), to_vec(y), phases));
    }, py::arg("t"), py::arg("y"), py::arg("phases") = 1);

    m.def("detect_ness", [](const std::vector<double>& p) {
        py::list out;
        for (const auto& r : detect_ness(curve_from(p))) {
            py::dict d;
            d["phase"] = r.phase;
            d["t_ness"] = r.t_ness;
            d["t_max_rate"] = r.t_max_rate;
            d["area_fraction"] = r.area_fraction_at_cutoff;
            out.append(d);
        }
        return out;
    });

    m.def("hydro_energy", [](double p) { return hydro_energy(p); });
    m.def("qo_energy", [](double a) { return qo_energy(a); });
    m.def("atp_shape_integral", &atp_shape_integral, py::arg("profile_gain") = 1.472, py::arg("offset") = 0.1);
    m.def("hydro_bound", [](const std::vector<double>& p, double t) { return hydro_bound(curve_from(p), t); });
    m.def("chem_bound", [](const std::vector<double>& a, double t) { return chem_bound(curve_from(a), t); });
    m.def("qo_bound", [](const std::vector<double>& a, double t) { return qo_bound(curve_from(a), t); });
    m.def("ke_bound", [](const std::vector<double>& a, const std::vector<double>& p, double f, double t) {
        return ke_bound_quadrature(curve_from(a), curve_from(p), f, t);
    }, py::arg("area"), py::arg("perimeter"), py::arg("f_avg"), py::arg("t"));

    m.def("boundary_length", [](py::array_t<bool> mask, double scale) { return boundary_length(to_mask(mask, scale)); },
          py::arg("mask"), py::arg("scale") = 1.0);
    m.def("box_count_dimension", [](py::array_t<bool> mask) {
        const auto bm = to_mask(mask, 1.0);
        return box_count_dimension(boundary_pixels(bm), default_box_sizes(bm.width, bm.height)).d_f;
    });

    m.def("mean_ratio_formula", &mean_ratio_formula);
    m.def("three_coupled_ratio", &three_coupled_ratio);
    m.def("isotropic_ratio", [](int g, int dims, std::int64_t cutoff) {
        ModeSpectrum s;
        s.dims = dims;
        s.modes.push_back({1.0, g});
        return mean_ratio_enumerate(s, cutoff);
    }, py::arg("G"), py::arg("dims"), py::arg("cutoff") = 200);
    m.def("t_slime", [](double v) { return slime_scaling(v, 86400.0, 1e-3).t_slime; });

    m.def("synth", [](const std::filesystem::path& out, int n, std::uint64_t seed, double noise) {
        SyntheticSpec s;
        s.n_samples = n;
        s.seed = seed;
        s.noise_sigma_rel = noise;
        return run_synth(s, out);
    }, py::arg("out_dir"), py::arg("n_samples") = 1, py::arg("seed") = 1, py::arg("noise") = 0.0);
    m.def("analyze", [](const std::filesystem::path& input, const std::filesystem::path& out, double t_end) {
        RunConfig cfg;
        cfg.input = input;
        cfg.output_dir = out;
        cfg.t_end_h = t_end;
        const auto s = run_analyze(cfg);
        py::dict d;
        d["samples"] = s.samples;
        d["failed"] = s.failed;
        d["groups"] = s.groups;
        d["warnings"] = s.warnings;
        return d;
    }, py::arg("input"), py::arg("out_dir"), py::arg("t_end") = 24.0);
}
