#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "card/beth.h"
#include "card/engine.h"
#include "card/error.h"
#include "card/oracle.h"
#include "card/problem.h"

namespace py = pybind11;
using namespace card;

namespace {

Problem parse(const std::string& text) { return parse_problem(text); }

std::string check(const std::string& text) {
  Problem p = parse(text);
  if (!p.is_sat()) fail(ErrorKind::InvalidArgument, "expected a satisfiability goal");
  return check_sat(p.formula()).sat ? "sat" : "unsat";
}

py::dict interpolate_text(const std::string& text, bool verify) {
  Problem p = parse(text);
  if (!p.is_interp()) fail(ErrorKind::InvalidArgument, "expected assertions named A and B");
  InterpolationOptions opts;
  opts.verify = verify;
  Verdict v = interpolate(p.a(), p.b(), opts);
  py::dict d;
  d["interpolant"] = to_sexpr(*v.interpolant);
  d["verified"] = v.report ? py::cast(v.report->ok()) : py::none();
  return d;
}

py::dict beth(const std::string& text, int max_n, int max_depth) {
  Problem p = parse(text);
  if (!p.is_beth()) fail(ErrorKind::InvalidArgument, "expected a beth-define goal");
  BethQuery q = beth_query(p, max_n, max_depth);
  ImplicitResult r = implicit_define_check(q);
  py::dict d;
  d["implicit"] = r.found;
  d["n"] = r.found ? py::cast(r.n) : py::none();
  py::object terms = py::none();
  if (r.found) {
    try {
      std::vector<std::string> ts;
      for (Term t : explicit_define_extract(q, r.n)) ts.push_back(to_sexpr(t));
      terms = py::cast(ts);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoTermFound) throw;
    }
  }
  d["explicit"] = terms;
  return d;
}

py::dict oracle(const std::string& text, std::int64_t lo, std::int64_t hi, int elems, std::int64_t max_len) {
  Problem p = parse(text);
  if (!p.is_sat()) fail(ErrorKind::InvalidArgument, "expected a satisfiability goal");
  OracleConfig cfg;
  cfg.lo = lo;
  cfg.hi = hi;
  cfg.elems = elems;
  cfg.max_len = max_len;
  OracleResult r = enumerate_and_decide(p.formula(), cfg);
  py::dict d;
  d["outcome"] = r.outcome == OracleOutcome::Sat ? "sat" : "bounded-unsat";
  d["authoritative"] = r.authoritative;
  d["witness"] = r.witness ? py::cast(r.witness->describe(*p.store)) : py::none();
  return d;
}

py::dict bench(int m, const std::string& index_theory) {
  BenchRow r = bench_row(m, index_theory == "TO" ? IndexTheoryKind::TO : IndexTheoryKind::IDL);
  py::dict d;
  d["m"] = r.m;
  d["phi1_atoms"] = r.phi1_atoms;
  d["phi2_atoms_after_step2"] = r.phi2_atoms_after_step2;
  d["base_atoms"] = r.base_atoms;
  d["wall_ms"] = r.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cardinterp, m) {
  m.doc() = "Contiguous arrays with maxdiff: satisfiability, interpolation and definability";

  static py::exception<Error> card_error(m, "CardError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = card_error;
      err.attr("kind") = std::string(to_string(e.kind()));
      card_error(e.what());
    }
  });

  m.def("check", &check, py::arg("text"), "Return 'sat' or 'unsat' for a problem given as text.");
  m.def("interpolate", &interpolate_text, py::arg("text"), py::arg("verify") = true,
        "Interpolant of the A and B assertions, with its verification status.");
  m.def("beth", &beth, py::arg("text"), py::arg("max_n") = 6, py::arg("max_depth") = 2,
        "Implicit definability and an explicit defining tuple when one is found.");
  m.def("oracle", &oracle, py::arg("text"), py::arg("lo") = -2, py::arg("hi") = 4, py::arg("elems") = 3,
        py::arg("max_len") = 3, "Exhaustive bounded model search.");
  m.def("bench", &bench, py::arg("m"), py::arg("index_theory") = "IDL", "One row of the scaling benchmark.");
}
