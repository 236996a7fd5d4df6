// SMT-LIB 2 bridge to an external interpolating solver.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>

#include "card/base_solver.h"
#include "card/sexpr.h"

namespace card {

namespace {

std::string smt_term(Term t) {
  TermStore& s = t.store();
  switch (t.op()) {
    case Op::Symbol: return s.symbol(t.symbol()).name;
    case Op::Zero: return "0";
    case Op::Bot: return "bot";
    case Op::El: return "el";
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Offset: {
      std::int64_t k = t.payload();
      if (t[0].op() == Op::Zero) return k < 0 ? "(- " + std::to_string(-k) + ")" : std::to_string(k);
      return k < 0 ? "(- " + smt_term(t[0]) + " " + std::to_string(-k) + ")"
                   : "(+ " + smt_term(t[0]) + " " + std::to_string(k) + ")";
    }
    case Op::Read: return "(select " + smt_term(t[0]) + " " + smt_term(t[1]) + ")";
    case Op::Eq: return "(= " + smt_term(t[0]) + " " + smt_term(t[1]) + ")";
    case Op::Le: return "(<= " + smt_term(t[0]) + " " + smt_term(t[1]) + ")";
    case Op::Not: return "(not " + smt_term(t[0]) + ")";
    case Op::Implies: return "(=> " + smt_term(t[0]) + " " + smt_term(t[1]) + ")";
    case Op::And:
    case Op::Or:
    case Op::Apply: {
      std::string out = "(" + (t.op() == Op::Apply ? s.symbol(t.symbol()).name
                                                   : std::string(t.op() == Op::And ? "and" : "or"));
      for (Term a : t.args()) out += " " + smt_term(a);
      return out + ")";
    }
    default:
      fail(ErrorKind::UnsupportedAtom, "cannot express in SMT-LIB: " + to_sexpr(t));
  }
}

std::string smt_sort(Sort s) {
  switch (s) {
    case Sort::Index: return "Int";
    case Sort::Elem: return "Elem";
    case Sort::Array: return "(Array Int Elem)";
    case Sort::Bool: return "Bool";
  }
  return "?";
}

class SmtReader {
 public:
  explicit SmtReader(TermStore& s) : s_(s) {}

  Term read(const SExpr& e) {
    if (e.is_atom()) return atom(e);
    std::string h = e.head();
    if (h.empty()) fail(ErrorKind::AdapterFailure, "malformed term " + e.str());
    auto arg = [&](std::size_t k) { return read(e.items.at(k)); };
    std::size_t n = e.items.size() - 1;
    if (h == "let") {
      auto saved = lets_;
      for (const SExpr& b : e.items.at(1).items) lets_[b.items.at(0).atom] = read(b.items.at(1));
      Term body = read(e.items.at(2));
      lets_ = std::move(saved);
      return body;
    }
    if (h == "select") return s_.rd(arg(1), arg(2));
    if (h == "not") return s_.neg(arg(1));
    if (h == "and" || h == "or") {
      std::vector<Term> xs;
      for (std::size_t k = 1; k <= n; ++k) xs.push_back(arg(k));
      return h == "and" ? s_.conj(xs) : s_.disj(xs);
    }
    if (h == "=>") return s_.implies(arg(1), arg(2));
    if (h == "=") return s_.eq(arg(1), arg(2));
    if (h == "distinct") return s_.neg(s_.eq(arg(1), arg(2)));
    if (h == "<=") return s_.le(arg(1), arg(2));
    if (h == ">=") return s_.le(arg(2), arg(1));
    if (h == "<") return s_.lt(arg(1), arg(2));
    if (h == ">") return s_.lt(arg(2), arg(1));
    if (h == "+" && n == 2) {
      auto k = number(e.items[2]);
      if (k) return s_.offset(arg(1), *k);
      k = number(e.items[1]);
      if (k) return s_.offset(arg(2), *k);
    }
    if (h == "-" && n == 1) {
      auto k = number(e.items[1]);
      if (k) return s_.numeral(-*k);
    }
    if (h == "-" && n == 2) {
      auto k = number(e.items[2]);
      if (k) return s_.offset(arg(1), -*k);
    }
    auto f = s_.find_symbol(h);
    if (!f) fail(ErrorKind::AdapterFailure, "unknown symbol in solver answer: " + h);
    std::vector<Term> xs;
    for (std::size_t k = 1; k <= n; ++k) xs.push_back(arg(k));
    return s_.apply(*f, xs);
  }

 private:
  std::optional<std::int64_t> number(const SExpr& e) {
    if (e.is_list) {
      if (e.head() == "-" && e.items.size() == 2) {
        auto k = number(e.items[1]);
        if (k) return -*k;
      }
      return std::nullopt;
    }
    if (e.atom.empty()) return std::nullopt;
    std::size_t used = 0;
    try {
      std::int64_t v = std::stoll(e.atom, &used);
      if (used == e.atom.size()) return v;
    } catch (...) {
    }
    return std::nullopt;
  }

  Term atom(const SExpr& e) {
    auto it = lets_.find(e.atom);
    if (it != lets_.end()) return it->second;
    if (auto k = number(e)) return s_.numeral(*k);
    if (e.atom == "true") return s_.top();
    if (e.atom == "false") return s_.bottom_formula();
    if (e.atom == "bot") return s_.bot();
    if (e.atom == "el") return s_.el();
    auto sym = s_.find_symbol(e.atom);
    if (!sym) fail(ErrorKind::AdapterFailure, "unknown symbol in solver answer: " + e.atom);
    return s_.constant(*sym);
  }

  TermStore& s_;
  std::map<std::string, Term> lets_;
};

struct ProcessResult {
  int status = 0;
  std::string out;
};

ProcessResult run_process(const std::string& command, const std::string& input, double timeout_s) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    fail(ErrorKind::AdapterFailure, std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) fail(ErrorKind::AdapterFailure, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  signal(SIGPIPE, SIG_IGN);
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  std::size_t written = 0;
  int to_child = in_pipe[1];
  ProcessResult res;
  bool open_out = true;
  while (open_out) {
    if (to_child >= 0 && written == input.size()) {
      close(to_child);
      to_child = -1;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      kill(pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      if (to_child >= 0) close(to_child);
      close(out_pipe[0]);
      fail(ErrorKind::AdapterFailure, "external solver timed out");
    }
    pollfd fds[2];
    int nfds = 0;
    fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (to_child >= 0) fds[nfds++] = {to_child, POLLOUT, 0};
    int r = poll(fds, static_cast<nfds_t>(nfds), static_cast<int>(std::min<long>(left.count(), 1000)));
    if (r < 0 && errno != EINTR) break;
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = write(to_child, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      else if (w < 0 && errno != EAGAIN) {
        close(to_child);
        to_child = -1;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[4096];
      ssize_t n = read(out_pipe[0], buf, sizeof buf);
      if (n > 0) res.out.append(buf, static_cast<std::size_t>(n));
      else open_out = false;
    }
  }
  if (to_child >= 0) close(to_child);
  close(out_pipe[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  res.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

std::string to_smtlib(Term a, Term b, IndexTheoryKind kind) {
  TermStore& s = a.store();
  std::ostringstream os;
  os << "(set-option :produce-interpolants true)\n";
  os << "(set-logic QF_AUFLIA)\n";
  (void)kind;
  os << "(declare-sort Elem 0)\n(declare-fun bot () Elem)\n(declare-fun el () Elem)\n";
  std::array<Term, 2> ab{a, b};
  for (SymbolId x : symbols_of(ab)) {
    const SymbolInfo& info = s.symbol(x);
    os << "(declare-fun " << info.name << " (";
    for (std::size_t k = 0; k < info.domain.size(); ++k) os << (k ? " " : "") << smt_sort(info.domain[k]);
    os << ") " << smt_sort(info.range) << ")\n";
  }
  os << "(assert (! (and (distinct bot el) " << smt_term(a) << ") :named A))\n";
  os << "(assert (! (and (distinct bot el) " << smt_term(b) << ") :named B))\n";
  os << "(check-sat)\n(get-interpolant A B)\n";
  return os.str();
}

Term parse_smtlib_interpolant(TermStore& store, std::string_view response) {
  std::vector<SExpr> items;
  try {
    items = read_sexprs(response);
  } catch (const Error& e) {
    fail(ErrorKind::AdapterFailure, std::string("unreadable solver answer: ") + e.what());
  }
  if (items.empty() || !items[0].is_atom("unsat"))
    fail(ErrorKind::AdapterFailure, "solver did not answer unsat");
  if (items.size() < 2) fail(ErrorKind::AdapterFailure, "solver returned no interpolant");
  const SExpr* body = &items.back();
  if (body->head() == "interpolants" && body->items.size() == 2) body = &body->items[1];
  return SmtReader(store).read(*body);
}

Term external_interpolate(Term a, Term b, const std::string& command, double timeout_seconds,
                          IndexTheoryKind kind) {
  std::string query = to_smtlib(a, b, kind);
  ProcessResult pr = run_process(command, query, timeout_seconds);
  if (pr.status != 0) fail(ErrorKind::AdapterFailure, "external solver exited with status " + std::to_string(pr.status));
  Term theta = parse_smtlib_interpolant(a.store(), pr.out);
  if (theta.sort() != Sort::Bool) fail(ErrorKind::AdapterFailure, "solver answer is not a formula");
  BaseVerification v = verify_base_interpolant(a, b, theta, kind);
  if (!v.ok()) fail(ErrorKind::UnverifiedInterpolant, "external answer rejected: " + to_sexpr(theta));
  return theta;
}

}  // namespace card
