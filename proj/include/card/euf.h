#pragma once

#include <map>
#include <span>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "card/kernel.h"

namespace card {

// Congruence closure over ground terms. Apply and Read nodes are treated as
// uninterpreted applications, every other node is an opaque constant.
// Predicate atoms are encoded as equalities with `true` / `false`.
class CongruenceClosure {
 public:
  explicit CongruenceClosure(TermStore& store);

  int add(Term t);
  void merge(Term a, Term b, int reason);
  void add_diseq(Term a, Term b, int reason);
  // Asserts a literal (Eq / Not Eq / predicate / negated predicate).
  void assert_literal(Term lit, int reason);

  bool consistent();
  bool equal(Term a, Term b);
  Term find(Term t);
  // Reasons (as passed to merge/add_diseq) explaining a = b; reason -1 is never reported.
  std::vector<int> explain(Term a, Term b);
  // Reasons behind the first violated disequality; empty if consistent.
  std::vector<int> conflict();

  std::vector<Term> terms() const { return terms_; }
  bool contains(Term t) const { return ids_.count(t.id()) > 0; }

 private:
  struct Reason {
    int lit = -1;  // input reason, or -1 for congruence
    int app_a = -1;
    int app_b = -1;
  };
  struct Diseq {
    int a, b, reason;
  };

  int id_of(Term t) const { return ids_.at(t.id()); }
  bool is_app(Term t) const { return t.op() == Op::Apply || t.op() == Op::Read; }
  std::vector<std::int64_t> signature(int app) const;
  void process();
  void make_root(int n);
  int common_ancestor(int a, int b) const;
  void explain_into(int a, int b, std::vector<int>& out, std::vector<std::pair<int, int>>& todo);

  TermStore& s_;
  std::vector<Term> terms_;
  std::unordered_map<TermId, int> ids_;
  std::vector<int> rep_;
  std::vector<std::vector<int>> members_;
  std::vector<std::vector<int>> uses_;
  std::vector<int> pf_parent_;
  std::vector<Reason> pf_reason_;
  std::map<std::vector<std::int64_t>, int> sigs_;
  std::vector<std::tuple<int, int, Reason>> pending_;
  std::vector<Diseq> diseqs_;
};

struct EufResult {
  bool sat = false;
  std::vector<std::size_t> core;  // when unsat: indices into the input
};

bool is_euf_literal(Term lit);

EufResult euf_check_conj(std::span<const Term> literals, bool minimize_core = true);

std::vector<std::pair<Term, Term>> euf_entailed_var_equalities(std::span<const Term> literals,
                                                               std::span<const std::pair<Term, Term>> candidates);

// Interpolant for two jointly inconsistent conjunctions of EUF literals.
Term euf_interpolate_conj(std::span<const Term> a, std::span<const Term> b);

}  // namespace card
