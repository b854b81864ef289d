#include "barabanov/baranorm.hpp"
#include "barabanov/config.hpp"
#include "barabanov/constructions.hpp"
#include "barabanov/error.hpp"
#include "barabanov/jsr.hpp"
#include "barabanov/report.hpp"
#include "barabanov/runner.hpp"
#include "barabanov/semigroup.hpp"

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace barabanov;

namespace {

// Reports are built once as JSON in C++; Python gets plain dicts.
py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Vec2 vec2(const Vector& v) {
  if (v.size() != 2) throw std::invalid_argument("expected a 2-vector");
  return {v(0), v(1)};
}

SeedNorm seed_from(const py::object& seed) {
  if (py::isinstance<PolygonNorm>(seed)) return SeedNorm::polygon(seed.cast<PolygonNorm>());
  const auto name = seed.cast<std::string>();
  if (name == "euclidean") return SeedNorm::euclidean();
  if (name == "sup") return SeedNorm::sup();
  throw std::invalid_argument("seed must be 'euclidean', 'sup' or a PolygonNorm");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the barabanov package";
  m.attr("__version__") = BARABANOV_VERSION;

  auto base = py::register_exception<Error>(m, "BarabanovError", PyExc_RuntimeError);
  py::register_exception<ReducibleInputError>(m, "ReducibleInputError", base.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
  py::register_exception<NotInPerturbationSetError>(m, "NotInPerturbationSetError", base.ptr());
  py::register_exception<CertificationError>(m, "CertificationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<AngleSpec>(m, "AngleSpec")
      .def_static("rational_pi", &AngleSpec::rational_pi, py::arg("p"), py::arg("q"))
      .def_static("from_radians", &AngleSpec::from_radians, py::arg("radians"),
                  py::arg("declared_irrational") = false)
      .def_property_readonly("is_rational", &AngleSpec::is_rational)
      .def_property_readonly("declared_irrational", &AngleSpec::declared_irrational)
      .def_property_readonly("radians", &AngleSpec::radians)
      .def_property_readonly("p", [](const AngleSpec& a) { return a.rational().p; })
      .def_property_readonly("q", [](const AngleSpec& a) { return a.rational().q; })
      .def("rotation_order", &AngleSpec::rotation_order)
      .def(py::self == py::self)
      .def("__repr__", [](const AngleSpec& a) { return "AngleSpec(" + a.to_string() + ")"; });

  m.def("make_rotation", &make_rotation, py::arg("angle"));

  py::class_<MatrixSet>(m, "MatrixSet")
      .def(py::init<std::vector<Matrix>, std::vector<std::string>>(), py::arg("matrices"),
           py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("dim", &MatrixSet::dim)
      .def("__len__", &MatrixSet::size)
      .def("__getitem__",
           [](const MatrixSet& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           })
      .def_property_readonly("matrices", &MatrixSet::matrices)
      .def_property_readonly("labels", &MatrixSet::labels)
      .def("rotation_angle", &MatrixSet::rotation_angle, py::arg("i"))
      .def("with_rotation_angle", &MatrixSet::with_rotation_angle, py::arg("i"), py::arg("angle"))
      .def("scaled", &MatrixSet::scaled, py::arg("c"))
      .def("conjugated", &MatrixSet::conjugated, py::arg("t"));

  m.def("irreducibility", [](const MatrixSet& s) {
    const auto v = irreducibility(s);
    py::dict d;
    d["status"] = to_string(v.status);
    d["method"] = v.method;
    d["witness"] = v.witness;
    return d;
  });

  m.def("example1", &example1, py::arg("theta"));
  m.def("example2_truncation", &example2_truncation, py::arg("max_n"));
  m.def("projection_family", [](const std::vector<AngleSpec>& a) { return projection_family(a); },
        py::arg("angles"));

  m.def("jsr_bounds",
        [](const MatrixSet& s, std::size_t depth, double prune_ratio) {
          return to_py(to_json(jsr_bounds(s, depth, prune_ratio)));
        },
        py::arg("set"), py::arg("depth"), py::arg("prune_ratio") = 0.999);

  py::class_<PolygonNorm>(m, "PolygonNorm")
      .def(py::init([](const std::vector<Vector>& verts) {
             std::vector<Vec2> v;
             for (const auto& p : verts) v.push_back(vec2(p));
             return PolygonNorm(std::move(v));
           }),
           py::arg("vertices"))
      .def_static("symmetric_hull",
                  [](const std::vector<Vector>& pts) {
                    std::vector<Vec2> v;
                    for (const auto& p : pts) v.push_back(vec2(p));
                    return PolygonNorm::symmetric_hull(v);
                  })
      .def_static("regular", &PolygonNorm::regular, py::arg("n"), py::arg("phase") = 0.0,
                  py::arg("radius") = 1.0)
      .def_static("euclidean", &PolygonNorm::euclidean, py::arg("n") = 720)
      .def_static("square", &PolygonNorm::square)
      .def_static("from_csv", &PolygonNorm::from_csv)
      .def("gauge", [](const PolygonNorm& p, const Vector& v) { return p.gauge(vec2(v)); })
      .def("__call__", [](const PolygonNorm& p, const Vector& v) { return p.gauge(vec2(v)); })
      .def("operator_norm", &PolygonNorm::operator_norm)
      .def("transformed", &PolygonNorm::transformed)
      .def("to_csv", &PolygonNorm::to_csv)
      .def("__len__", &PolygonNorm::size)
      .def_property_readonly("vertices", [](const PolygonNorm& p) {
        Matrix out(static_cast<Eigen::Index>(p.size()), 2);
        for (std::size_t i = 0; i < p.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = p.vertices()[i];
        return out;
      });

  py::class_<GaugeApprox>(m, "GaugeApprox")
      .def(py::init([](const MatrixSet& s, double rho_hat, std::size_t horizon, const py::object& seed) {
             return GaugeApprox(s, rho_hat, horizon, seed_from(seed));
           }),
           py::arg("set"), py::arg("rho_hat"), py::arg("horizon"), py::arg("seed") = "euclidean")
      .def("__call__", [](const GaugeApprox& g, const Vector& v) { return g(v); })
      .def_property_readonly("horizon", &GaugeApprox::horizon)
      .def_property_readonly("rho_hat", &GaugeApprox::rho_hat);

  m.def("polygon_from_gauge", &polygon_from_gauge, py::arg("gauge"), py::arg("grid") = 720);
  m.def("residual",
        [](const MatrixSet& s, double rho, const PolygonNorm& p, std::size_t grid) {
          return to_py(to_json(residual(s, rho, p, grid)));
        },
        py::arg("set"), py::arg("rho_hat"), py::arg("norm"), py::arg("grid") = 720);
  m.def("norm_distance",
        [](const PolygonNorm& a, const PolygonNorm& b, const Vector& v0, std::size_t grid) {
          return norm_distance(a, b, vec2(v0), grid);
        },
        py::arg("a"), py::arg("b"), py::arg("v0"), py::arg("grid") = 720);
  m.def("extremal_sequence",
        [](const MatrixSet& s, const PolygonNorm& p, double rho, const Vector& v, std::size_t steps) {
          const auto t = extremal_sequence(s, p, rho, vec2(v), steps);
          py::dict d;
          d["indices"] = t.indices;
          d["growth"] = t.growth;
          d["n_min"] = t.n_min;
          return d;
        },
        py::arg("set"), py::arg("norm"), py::arg("rho_hat"), py::arg("v"), py::arg("steps"));

  m.def("eigen_frame", [](const Matrix& b) {
    const auto f = eigen_frame(b);
    py::dict d;
    d["eigenvalue"] = f.eigenvalue;
    d["s"] = f.s;
    d["rho"] = f.rho;
    d["angle"] = f.angle;
    return d;
  });
  m.def("perturbation_pair",
        [](const Matrix& b1, const Matrix& b2, const PolygonNorm& companion, std::optional<AngleSpec> angle) {
          return to_py(to_json(perturbation_pair(b1, b2, companion, angle)));
        },
        py::arg("b1"), py::arg("b2"), py::arg("companion"), py::arg("b2_angle") = py::none());
  m.def("kappa_family",
        [](const Matrix& b1, const Matrix& b2, const PolygonNorm& companion, std::optional<AngleSpec> angle,
           const std::vector<double>& kappas) {
          const auto pair = perturbation_pair(b1, b2, companion, angle);
          py::list out;
          for (const auto& k : kappa_family(pair, companion, kappas)) {
            py::dict d;
            d["kappa"] = k.kappa;
            d["polygon"] = k.polygon;
            d["residual"] = k.residual;
            d["margin"] = k.margin;
            out.append(d);
          }
          return out;
        },
        py::arg("b1"), py::arg("b2"), py::arg("companion"), py::arg("b2_angle"), py::arg("kappas"));

  py::class_<SemigroupSample>(m, "SemigroupSample")
      .def("__len__", &SemigroupSample::size)
      .def_readonly("rho_hat", &SemigroupSample::rho_hat)
      .def("to_dict", [](const SemigroupSample& s) { return to_py(to_json(s, true)); });
  m.def("sample_limit_semigroup",
        [](const MatrixSet& s, double rho, std::size_t min_length, std::size_t max_length,
           std::size_t power_length, double keep_threshold, double dedupe_tol) {
          return sample_limit_semigroup(s, rho, {min_length, max_length, power_length, keep_threshold, dedupe_tol});
        },
        py::arg("set"), py::arg("rho_hat"), py::arg("min_length") = 1, py::arg("max_length") = 12,
        py::arg("power_length") = 0, py::arg("keep_threshold") = 0.5, py::arg("dedupe_tol") = 1e-8);
  m.def("transitivity_check",
        [](const SemigroupSample& s, std::size_t pairs, double tol, std::uint64_t seed) {
          return to_py(to_json(transitivity_check(s, pairs, tol, seed), s));
        },
        py::arg("sample"), py::arg("pairs"), py::arg("tol"), py::arg("seed") = 1);
  m.def("detect_rotation_subgroup",
        [](const SemigroupSample& s, double tol) { return to_py(to_json(detect_rotation_subgroup(s, tol))); },
        py::arg("sample"), py::arg("tol") = 1e-9);

  m.def("uniqueness_verdict",
        [](const MatrixSet& s, std::size_t jsr_depth, std::size_t power_length, std::size_t pairs, double tol,
           std::uint64_t seed) {
          UniquenessConfig c;
          c.jsr_depth = jsr_depth;
          c.sample.power_length = power_length;
          c.pairs = pairs;
          c.tol = tol;
          c.seed = seed;
          const auto v = uniqueness_verdict(s, c);
          auto j = to_json(v);
          if (v.family) j["family_labels"] = v.family->labels;
          return to_py(j);
        },
        py::arg("set"), py::arg("jsr_depth") = 6, py::arg("power_length") = 4096, py::arg("pairs") = 200,
        py::arg("tol") = 1e-3, py::arg("seed") = 1);

  m.def("run_config",
        [](const std::string& text, const std::string& out_dir, bool timestamp) {
          auto cfg = parse_config(text);
          cfg.out_dir = out_dir;
          cfg.timestamp = timestamp;
          const auto r = run(cfg);
          return py::make_tuple(to_py(r.report), r.exit_code);
        },
        py::arg("config_json"), py::arg("out_dir"), py::arg("timestamp") = false,
        "Runs a config-v1 document; returns (report, exit_code).");
}
