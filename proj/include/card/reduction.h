#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "card/kernel.h"
#include "card/problem.h"

namespace card {

// |a| = length
struct LenAtom {
  Term array, length;
};
// diff_level(a, b) = value
struct DiffAtom {
  Term a, b;
  int level = 1;
  Term value;
};
// result = wr(base, index, value)
struct WriteAtom {
  Term result, base, index, value;
};
// result = Const(index); clamped names max(index, 0)
struct ConstAtom {
  Term result, index, clamped;
};

struct LedgerEntry {
  SymbolId name;
  Term definition;
  Color color;
};

// Fresh constants introduced by the reduction, with the term each one names.
class Ledger {
 public:
  std::optional<Term> lookup(Term definition) const;
  // Existing name for `definition`, or a new fresh constant of its sort.
  Term name(Term definition, Color color, std::string_view prefix, bool* created = nullptr);
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  const LedgerEntry* entry(SymbolId s) const;
  bool is_fresh(SymbolId s) const { return by_name_.count(s) > 0; }
  // Replaces fresh names by their definitions until none remain.
  Term expand(Term t) const;

 private:
  std::vector<LedgerEntry> entries_;
  std::unordered_map<TermId, std::size_t> by_def_;
  std::unordered_map<SymbolId, std::size_t> by_name_;
};

struct SeparatedPair {
  std::vector<LenAtom> lens;
  std::vector<DiffAtom> diffs;
  std::vector<WriteAtom> writes;
  std::vector<ConstAtom> consts;
  std::vector<Term> phi2;
  std::shared_ptr<Ledger> ledger;
  std::set<TermId> euf_arrays;  // arrays passed to or returned by free symbols

  std::optional<Term> length_of(Term array) const;
  void add_phi2(Term f);
  void add(const LenAtom& x);
  void add(const DiffAtom& x);
  void add(const WriteAtom& x);
  void add(const ConstAtom& x);

  std::size_t phi1_size() const { return lens.size() + diffs.size() + writes.size() + consts.size(); }
  // Definitional atoms rendered as formulas, in a fixed order.
  std::vector<Term> phi1_formulas() const;
  // Everything, phi1 rendered, as one list of formulas.
  std::vector<Term> formulas() const;

 private:
  std::set<TermId> phi2_ids_;
  std::set<std::vector<TermId>> phi1_keys_;
};

// Flattens one formula (no coloring; every name is tagged Common).
SeparatedPair flatten(Term phi);

// Flattens an interpolation pair with a shared ledger. Names of common terms
// and their definitions are placed on both sides; `coloring` is extended with
// every fresh constant.
std::pair<SeparatedPair, SeparatedPair> flatten_pair(Term a, Term b, Coloring& coloring);

// All index constants of the pair plus 0, sorted by term id.
std::vector<Term> instantiation_set(const SeparatedPair& sp);

// Adds the ground instances over `inst` of the universal characterisations
// of every definitional atom. Applying it twice adds nothing new.
SeparatedPair zero_instantiate(const SeparatedPair& sp, const std::vector<Term>& inst);

// Names diff_1 .. diff_upto of (a, b) that are still missing.
void diff_chain_complete(SeparatedPair& sp, Term a, Term b, int upto, Color color);

// Number of distinct index constants used as write positions.
std::size_t count_wr_index_constants(const SeparatedPair& sp);

}  // namespace card
