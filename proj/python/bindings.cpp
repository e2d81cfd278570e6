// Python bindings. Exact rationals cross the boundary as "p/q" strings; the
// artifact is passed around as its canonical JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oel/artifact.hpp"
#include "oel/errors.hpp"
#include "oel/growth.hpp"
#include "oel/remark.hpp"

namespace py = pybind11;
using namespace oel;

namespace {

py::dict check_dict(const Check& c) {
  py::dict d;
  d["name"] = c.name;
  d["stage"] = c.stage;
  d["lhs"] = c.lhs;
  d["rhs"] = c.rhs;
  d["pass"] = c.pass;
  d["kind"] = c.kind == CheckKind::structural ? "structural" : "analytic";
  d["enforced"] = c.enforced;
  return d;
}

py::list check_list(const std::vector<Check>& checks) {
  py::list out;
  for (const auto& c : checks) out.append(check_dict(c));
  return out;
}

RunConfig make_config(const std::string& q, const std::vector<Prime>& prefix, const std::string& primes,
                      const std::string& schedule, int stages, Level min_quotient, Level depth_cap) {
  RunConfig cfg;
  cfg.q = q;
  cfg.prefix = prefix;
  cfg.primes = primes;
  cfg.schedule = schedule;
  cfg.stages = stages;
  cfg.min_quotient = min_quotient;
  cfg.depth_cap = depth_cap;
  return cfg;
}

py::dict construct(const std::string& q, const std::vector<Prime>& prefix, const std::string& primes,
                   const std::string& schedule, int stages, Level min_quotient, Level depth_cap) {
  const auto result = run_construct(make_config(q, prefix, primes, schedule, stages, min_quotient, depth_cap));
  py::dict d;
  d["artifact"] = serialize_artifact(result);
  d["moduli"] = result.state.system().moduli();
  d["a"] = result.state.a_values();
  d["checks"] = check_list(result.checks);
  d["exit_status"] = exit_status(result.checks);
  return d;
}

py::dict verify(const std::string& text) {
  const auto report = verify_artifact(text);
  py::dict d;
  d["all_pass"] = report.all_pass;
  d["checks"] = check_list(report.checks);
  return d;
}

py::list entropy(const std::string& text, int rate_n, int window) {
  auto [cfg, state] = load_artifact(text);
  const auto result = run_from_state(cfg, std::move(state));
  py::list out;
  for (const auto& r : entropy_report(result, {rate_n, window})) {
    py::dict d;
    d["table"] = r.table;
    d["key"] = r.key;
    d["quantity"] = r.quantity;
    d["value"] = r.value;
    d["bound_name"] = r.bound_name;
    d["bound"] = r.bound;
    d["pass"] = r.pass;
    out.append(d);
  }
  return out;
}

py::dict remark_entropy(int n_max) {
  const auto q = entropy_Q(n_max);
  py::list atoms;
  for (const auto& a : q.atoms) {
    py::dict d;
    d["carry"] = a.carry;
    d["j"] = a.j;
    d["value"] = py::make_tuple(a.value.m, a.value.k);
    d["mass"] = to_string(a.mass);
    atoms.append(d);
  }
  py::dict d;
  d["atoms"] = atoms;
  d["partial"] = q.partial;
  d["tail"] = q.tail;
  d["limit"] = q.limit;
  d["coarse_partial"] = q.coarse_partial;
  return d;
}

py::dict growth(const std::string& group, int n, int r, const std::string& omega0) {
  const auto g = GrowthGroup::parse(group);
  const GrowthInstance inst{n, r, omega0.empty() ? std::map<int, GroupElement>{} : parse_omega0(omega0, g)};
  const auto rep = check_bound(inst, g);
  py::dict d;
  d["count"] = rep.count;
  d["omega0"] = rep.omega0;
  d["stated_bound"] = to_string(rep.stated_bound);
  d["proof_bound"] = to_string(rep.proof_bound);
  d["stated_applies"] = rep.stated_applies;
  d["pass"] = rep.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_oel, m) {
  m.doc() = "Orbit equivalence between odometers";
  m.attr("__version__") = tool_version();

  auto base = py::register_exception<Error>(m, "OelError");
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<CapExceededError>(m, "CapExceededError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<ArtifactError>(m, "ArtifactError", base.ptr());

  const RunConfig defaults;
  m.def("construct", &construct, py::arg("q") = defaults.q, py::arg("prefix") = defaults.prefix,
        py::arg("primes") = defaults.primes, py::arg("schedule") = defaults.schedule,
        py::arg("stages") = defaults.stages, py::arg("min_quotient") = defaults.min_quotient,
        py::arg("depth_cap") = defaults.depth_cap,
        "Build a run and return its artifact text, moduli, a_n and checks.");
  m.def("verify", &verify, py::arg("artifact"), "Recompute every check from an artifact.");
  m.def("entropy", &entropy, py::arg("artifact"), py::arg("rate_n") = 8, py::arg("window") = 64,
        "Entropy report rows for an artifact.");
  m.def("remark_entropy", &remark_entropy, py::arg("n_max") = 20,
        "Atoms and entropy of the base-4 cocycle partition.");
  m.def(
      "cocycle_generator",
      [](int carry, int j) {
        const auto z = cocycle_Z_generator(carry, j);
        return py::make_tuple(z.m, z.k);
      },
      py::arg("carry"), py::arg("j"), "Z^2 value of the base-4 generator's cocycle on one atom.");
  m.def("growth", &growth, py::arg("group"), py::arg("n"), py::arg("r"), py::arg("omega0") = "",
        "Count products and compare with the polynomial bound.");
}
