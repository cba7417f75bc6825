#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xpowx/error.hpp"
#include "xpowx/fhstats.hpp"
#include "xpowx/linforms.hpp"
#include "xpowx/multind.hpp"
#include "xpowx/nset.hpp"
#include "xpowx/psimap.hpp"

namespace py = pybind11;
using namespace xpowx;

namespace {

py::object to_int(const BigInt& v) { return py::int_(py::str(v.str())); }

py::object to_fraction(const Rational& r) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_int(numerator(r)), to_int(denominator(r)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the xpowx C++ library";

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  (void)domain;

  m.def("is_prime", &is_prime);
  m.def("factorize", [](u64 n) {
    std::vector<std::pair<u64, u32>> out;
    for (const auto& f : factorize(n).factors) out.emplace_back(f.prime, f.exponent);
    return out;
  });
  m.def("multiplicative_order", py::overload_cast<u64, u64>(&multiplicative_order), py::arg("a"), py::arg("p"));

  m.def("psi", &psi, py::arg("p"), py::arg("x"));
  m.def("psi_table", &psi_table, py::arg("p"));
  m.def("count_fixed_points", &count_fixed_points, py::arg("p"));
  m.def("collision_count", &collision_count, py::arg("p"));
  m.def("image_size", &image_size, py::arg("p"));
  m.def(
      "scan_primes",
      [](u64 lo, u64 hi, unsigned threads) {
        std::vector<std::tuple<u64, u64, u32>> rows;
        py::gil_scoped_release release;
        for (const auto& r : scan_primes(lo, hi, {}, threads).rows) rows.emplace_back(r.p, r.F, r.omega_pm1);
        return rows;
      },
      py::arg("lo"), py::arg("hi"), py::arg("threads") = 0);
  m.def("lifted_solution_count", &lifted_solution_count, py::arg("p"), py::arg("y"), py::arg("d"));
  m.def("lifted_fixed_total", &lifted_fixed_total, py::arg("p"));

  m.def("exact_Nq", py::overload_cast<u64, u64, u64>(&exact_Nq), py::arg("q"), py::arg("x0") = 1,
        py::arg("budget") = kDefaultBudget);
  m.def(
      "mc_estimate_c",
      [](u64 q, u64 x0, u64 samples, u64 seed, unsigned threads) {
        AvoidanceEstimate e;
        {
          py::gil_scoped_release release;
          e = mc_estimate_c(FormFamily(q), x0, samples, seed, {threads, false});
        }
        py::dict d;
        d["value"] = e.value;
        d["std_error"] = e.std_error;
        d["hits"] = e.hits;
        d["samples"] = e.samples;
        d["seed"] = e.seed;
        d["generator"] = e.generator;
        return d;
      },
      py::arg("q"), py::arg("x0") = 1, py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("threads") = 1);
  m.def(
      "bonferroni_bounds",
      [](u64 q, const std::vector<u64>& family, std::size_t K) {
        const auto b = bonferroni_bounds(FormFamily(q), family, K);
        py::dict d;
        d["lower"] = to_int(b.materialize(b.lower));
        d["upper"] = to_int(b.materialize(b.upper));
        d["exact"] = to_int(b.materialize(b.total));
        return d;
      },
      py::arg("q"), py::arg("family"), py::arg("K"));

  m.def("multiplicative_rank", [](const std::vector<u64>& t) { return multiplicative_rank(t); });
  m.def("find_relation", [](const std::vector<u64>& t) -> std::optional<std::vector<i64>> {
    auto r = find_relation(t);
    if (!r) return std::nullopt;
    return r->alphas;
  });
  m.def("dependent_pair_count", &dependent_pair_count_exact, py::arg("q"));

  m.def(
      "nset_members",
      [](u64 q, double c1, double c2) { return build(params_for(q, c1, c2)).members; }, py::arg("q"),
      py::arg("c1") = kDefaultC1, py::arg("c2") = kDefaultC2);
  m.def(
      "complement_bound", [](u64 q, double c1, double c2) { return theoretical_complement_bound(params_for(q, c1, c2)); },
      py::arg("q"), py::arg("c1") = kDefaultC1, py::arg("c2") = kDefaultC2);

  m.def("moments", [](u64 p) {
    const auto mm = moments(p);
    return py::make_tuple(to_fraction(mm.mu), to_fraction(mm.sigma2));
  });
  m.def("z_score", [](u64 F, u64 p) { return z_score(F, moments(p)); }, py::arg("F"), py::arg("p"));
  m.def("filliben_positions", &filliben_positions, py::arg("n"));
  m.def("normal_quantile", &normal_quantile, py::arg("u"));
  m.def("qq_r2", [](const std::vector<double>& z) { return qq_series(z).r2; });
}
