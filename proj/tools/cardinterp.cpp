#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "card/base_solver.h"
#include "card/beth.h"
#include "card/engine.h"
#include "card/error.h"
#include "card/oracle.h"
#include "card/problem.h"

namespace {

using namespace card;

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitError = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitDisagree = 3;

struct RunConfig {
  std::vector<std::string> files;
  std::string index_theory;  // empty keeps the file's choice
  std::string backend = "internal";
  double timeout = 60.0;
  bool verify = false;
  std::vector<std::int64_t> window{-2, 4};
  int elems = 3;
  std::int64_t max_len = 3;
  int max_n = 6;
  int max_depth = 2;
  unsigned jobs = 1;
  unsigned seed = 1;
  bool trace = false;
  // oracle
  int samples = 0;
  bool flip_engine = false;
  // bench
  int bench_from = 2, bench_to = 8;
};

std::optional<std::string> external_command(const RunConfig& cfg) {
  if (cfg.backend == "internal") return std::nullopt;
  const std::string prefix = "external:";
  if (cfg.backend.rfind(prefix, 0) != 0) fail(ErrorKind::InvalidArgument, "backend must be internal or external:<cmd>");
  std::string cmd = cfg.backend.substr(prefix.size());
  if (const char* env = std::getenv("CARD_INTERP_SOLVER"); env && *env) cmd = env;
  if (cmd.empty()) fail(ErrorKind::InvalidArgument, "external backend requires a command");
  return cmd;
}

bool has_offsets(const Problem& p) {
  bool found = false;
  std::vector<Term> roots;
  if (p.is_sat()) roots = std::get<SatGoal>(p.goal).assertions;
  if (p.is_interp()) roots = {p.a(), p.b()};
  if (p.is_beth()) roots = {std::get<BethGoal>(p.goal).delta};
  post_order(roots, [&](Term t) { found = found || t.op() == Op::Offset; });
  return found;
}

Problem load(const std::string& path, const RunConfig& cfg) {
  Problem p = load_problem(path);
  if (cfg.index_theory.empty()) return p;
  Signature sig = p.store->signature();
  if (cfg.index_theory == "TO") {
    if (has_offsets(p)) fail(ErrorKind::UnsupportedAtom, "succ / pred require IDL");
    sig.index = IndexTheoryKind::TO;
  } else {
    sig.index = IndexTheoryKind::IDL;
  }
  p.store->set_signature(sig);
  return p;
}

void trace(const RunConfig& cfg, const std::string& line) {
  if (cfg.trace) std::cerr << "[trace] " << line << "\n";
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Runs `work` over every file, at most cfg.jobs at a time, printing outputs in
// input order. Returns the exit code of a single file, or 0 / 1 for batches.
template <class Work>
int for_each_file(const RunConfig& cfg, Work work) {
  std::vector<std::string> out(cfg.files.size()), err(cfg.files.size());
  std::vector<int> codes(cfg.files.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < cfg.files.size();) {
      std::ostringstream o, e;
      try {
        codes[k] = work(cfg.files[k], o, e);
      } catch (const Error& ex) {
        e << "error: " << ex.what() << "\n";
        codes[k] = ex.kind() == ErrorKind::UnsupportedFragment ? kExitUnsupported : kExitError;
      } catch (const std::exception& ex) {
        e << "error: " << ex.what() << "\n";
        codes[k] = kExitError;
      }
      out[k] = o.str();
      err[k] = e.str();
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(cfg.files.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool batch = cfg.files.size() > 1;
  int worst = 0;
  for (std::size_t k = 0; k < cfg.files.size(); ++k) {
    if (batch) {
      std::istringstream lines(out[k]);
      for (std::string l; std::getline(lines, l);) std::cout << cfg.files[k] << ": " << l << "\n";
    } else {
      std::cout << out[k];
    }
    std::cerr << err[k];
    if (codes[k] == kExitError || codes[k] == kExitUnsupported || codes[k] == kExitDisagree) worst = codes[k];
  }
  return batch ? (worst ? kExitError : 0) : codes[0];
}

int cmd_check(const RunConfig& cfg) {
  return for_each_file(cfg, [&](const std::string& path, std::ostream& o, std::ostream&) {
    Problem p = load(path, cfg);
    if (!p.is_sat()) fail(ErrorKind::InvalidArgument, "check expects a file without interpolation or beth goals");
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = check_sat(p.formula());
    trace(cfg, path + ": check_sat " + std::to_string(ms_since(t0)) + " ms");
    o << (v.sat ? "sat" : "unsat") << "\n";
    return v.sat ? kExitSat : kExitUnsat;
  });
}

int cmd_interpolate(const RunConfig& cfg) {
  InterpolationOptions opts;
  opts.external_command = external_command(cfg);
  opts.timeout_seconds = cfg.timeout;
  opts.verify = cfg.verify;
  return for_each_file(cfg, [&](const std::string& path, std::ostream& o, std::ostream&) {
    Problem p = load(path, cfg);
    if (!p.is_interp()) fail(ErrorKind::InvalidArgument, "interpolate expects assertions named A and B");
    if (cfg.trace) {
      InterpolationSession s = prepare_interpolation(p.a(), p.b());
      trace(cfg, path + ": N_A=" + std::to_string(s.n_a) + " N_B=" + std::to_string(s.n_b) + " N=" +
                     std::to_string(s.n) + " phi1_atoms=" + std::to_string(s.phi1_atoms) +
                     " base_atoms=" + std::to_string(count_theory_atoms(std::vector<Term>{s.a2, s.b2})));
    }
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = interpolate(p.a(), p.b(), opts);
    trace(cfg, path + ": interpolate " + std::to_string(ms_since(t0)) + " ms");
    o << to_sexpr(*v.interpolant) << "\n";
    if (cfg.verify) o << "(verified " << (v.report && v.report->ok() ? "true" : "false") << ")\n";
    return 0;
  });
}

std::string tuple_sexpr(const std::vector<Term>& ts) {
  std::string s = "(";
  for (std::size_t k = 0; k < ts.size(); ++k) s += (k ? " " : "") + to_sexpr(ts[k]);
  return s + ")";
}

int cmd_beth(const RunConfig& cfg) {
  return for_each_file(cfg, [&](const std::string& path, std::ostream& o, std::ostream&) {
    Problem p = load(path, cfg);
    if (!p.is_beth()) fail(ErrorKind::InvalidArgument, "beth expects a beth-define goal");
    BethQuery q = beth_query(p, cfg.max_n, cfg.max_depth);
    ImplicitResult r = implicit_define_check(q);
    if (!r.found) {
      o << "not implicit up to N=" << cfg.max_n << "\n";
      return 0;
    }
    o << "implicit at N=" << r.n << "; explicit: ";
    try {
      o << tuple_sexpr(explicit_define_extract(q, r.n)) << "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoTermFound) throw;
      o << "none up to depth " << cfg.max_depth << "\n";
    }
    return 0;
  });
}

int cmd_oracle(const RunConfig& cfg) {
  if (cfg.window.size() != 2 || cfg.window[0] > 0 || cfg.window[1] < 0)
    fail(ErrorKind::InvalidArgument, "window must satisfy LO <= 0 <= HI");
  OracleConfig oc;
  oc.lo = cfg.window[0];
  oc.hi = cfg.window[1];
  oc.elems = cfg.elems;
  oc.max_len = cfg.max_len;
  return for_each_file(cfg, [&](const std::string& path, std::ostream& o, std::ostream&) {
    Problem p = load(path, cfg);
    if (!p.is_sat()) fail(ErrorKind::InvalidArgument, "oracle expects a file without interpolation or beth goals");
    Term phi = p.formula();
    OracleResult r = enumerate_and_decide(phi, oc);
    bool engine_sat = check_sat(phi).sat != cfg.flip_engine;
    bool oracle_sat = r.outcome == OracleOutcome::Sat;
    o << "oracle: " << (oracle_sat ? "sat" : "bounded-unsat") << (oracle_sat || r.authoritative ? "" : " (advisory)")
      << "; engine: " << (engine_sat ? "sat" : "unsat") << "; nodes: " << r.nodes << "\n";

    bool disagree = (oracle_sat && !engine_sat) || (!oracle_sat && r.authoritative && engine_sat);
    std::mt19937 rng(cfg.seed);
    for (int k = 0; k < cfg.samples && !disagree; ++k) {
      FunctionalModel m = random_model(phi, oc, rng);
      try {
        if (eval(m, phi) && !engine_sat) {
          disagree = true;
          r.witness = m;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DomainOverflow) throw;
      }
    }
    if (!disagree) return 0;
    o << "disagreement on:\n" << to_sexpr(phi) << "\n";
    if (r.witness) o << "witness:\n" << r.witness->describe(*p.store);
    return kExitDisagree;
  });
}

int cmd_bench(const RunConfig& cfg) {
  if (cfg.bench_from < 1 || cfg.bench_to < cfg.bench_from) fail(ErrorKind::InvalidArgument, "bad m range");
  IndexTheoryKind kind = cfg.index_theory == "TO" ? IndexTheoryKind::TO : IndexTheoryKind::IDL;
  std::cout << "m,phi1_atoms,phi2_atoms_after_step2,base_atoms,wall_ms\n";
  for (int m = cfg.bench_from; m <= cfg.bench_to; ++m) {
    BenchRow r = bench_row(m, kind);
    std::cout << r.m << "," << r.phi1_atoms << "," << r.phi2_atoms_after_step2 << "," << r.base_atoms << ","
              << static_cast<long long>(r.wall_ms + 0.5) << std::endl;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Satisfiability, interpolation and definability for contiguous arrays with maxdiff"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto common = [&](CLI::App* sub, bool files) {
    if (files) sub->add_option("files", cfg.files, "Input problem files")->required()->check(CLI::ExistingFile);
    sub->add_option("--index-theory", cfg.index_theory, "Override the index theory")
        ->check(CLI::IsMember({"TO", "IDL"}));
    sub->add_option("--jobs", cfg.jobs, "Files processed in parallel")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_flag("--trace", cfg.trace, "Print phase statistics to stderr");
  };

  auto* check = app.add_subcommand("check", "Decide satisfiability");
  common(check, true);

  auto* interp = app.add_subcommand("interpolate", "Compute a quantifier-free interpolant");
  common(interp, true);
  interp->add_option("--backend", cfg.backend, "internal | external:<cmd>");
  interp->add_option("--timeout", cfg.timeout, "External backend timeout in seconds")->check(CLI::PositiveNumber);
  interp->add_flag("--verify", cfg.verify, "Re-check the interpolant and report it");

  auto* beth = app.add_subcommand("beth", "Implicit and explicit definability");
  common(beth, true);
  beth->add_option("--max-n", cfg.max_n, "Largest number of copies tried")->check(CLI::Range(2, 64));
  beth->add_option("--max-depth", cfg.max_depth, "Term depth for explicit candidates")->check(CLI::Range(0, 4));

  auto* oracle = app.add_subcommand("oracle", "Brute-force model search cross-checked against the engine");
  common(oracle, true);
  oracle->add_option("--window", cfg.window, "Index window LO HI")->expected(2);
  oracle->add_option("--elems", cfg.elems, "Element domain size")->check(CLI::Range(2, 16));
  oracle->add_option("--max-len", cfg.max_len, "Largest array length")->check(CLI::NonNegativeNumber);
  oracle->add_option("--samples", cfg.samples, "Random models evaluated in addition");
  oracle->add_flag("--flip-engine", cfg.flip_engine, "Negate the engine verdict (harness self-test)")
      ->group("");

  auto* bench = app.add_subcommand("bench", "Reduction size on the scaling family, as CSV");
  common(bench, false);
  bench->add_option("--from", cfg.bench_from, "Smallest m");
  bench->add_option("--to", cfg.bench_to, "Largest m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*check) return cmd_check(cfg);
    if (*interp) {
      external_command(cfg);
      return cmd_interpolate(cfg);
    }
    if (*beth) return cmd_beth(cfg);
    if (*oracle) return cmd_oracle(cfg);
    if (*bench) return cmd_bench(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
