#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "card/kernel.h"

namespace card {

struct SatGoal {
  std::vector<Term> assertions;
};

struct InterpGoal {
  std::vector<Term> a_parts;
  std::vector<Term> b_parts;
};

struct BethGoal {
  std::vector<SymbolId> params;
  std::vector<SymbolId> defined;
  Term delta;
};

struct Problem {
  std::shared_ptr<TermStore> store;
  std::vector<SymbolId> declarations;
  std::variant<SatGoal, InterpGoal, BethGoal> goal;

  TheoryMode mode() const { return store->signature().mode; }
  IndexTheoryKind index_theory() const { return store->signature().index; }
  bool is_sat() const { return std::holds_alternative<SatGoal>(goal); }
  bool is_interp() const { return std::holds_alternative<InterpGoal>(goal); }
  bool is_beth() const { return std::holds_alternative<BethGoal>(goal); }

  Term formula() const;  // conjunction of assertions (sat goal)
  Term a() const;
  Term b() const;
};

Problem parse_problem(std::string_view text);
Problem load_problem(const std::string& path);
std::string print_problem(const Problem& p);

// Parses a single term against the symbols already declared in `store`.
Term parse_term(TermStore& store, std::string_view text);

enum class Color { AStrict, BStrict, Common };
std::string_view to_string(Color c);

class Coloring {
 public:
  std::optional<Color> tag(SymbolId s) const;
  bool is_common(SymbolId s) const { return tag(s) == Color::Common; }
  void extend(SymbolId s, Color c);  // DuplicateSymbol if already tagged
  const std::map<SymbolId, Color>& tags() const { return tags_; }
  std::set<SymbolId> common() const;

  // Color of a term: Common if every symbol is Common, otherwise the strict
  // side it mentions; MixedLiteral if it mentions both strict sides.
  Color color_of(Term t) const;

 private:
  std::map<SymbolId, Color> tags_;
};

Coloring color(Term a, Term b);
Coloring color_extend(const Coloring& c, SymbolId s, Color tag);

}  // namespace card
