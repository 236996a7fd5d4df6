#pragma once

// Random T_I + EUF cubes: index literals over i0..i2 and 0, element
// (dis)equalities over e0, e1, bot, el and reads of two opaque arrays.

#include <random>
#include <string>
#include <vector>

#include "card/kernel.h"

namespace card::testing {

class BaseCubeGen {
 public:
  BaseCubeGen(TermStore& s, std::mt19937& rng) : s_(s), rng_(rng) {
    for (int k = 0; k < 3; ++k) idx_.push_back(sym("i" + std::to_string(k), Sort::Index));
    for (int k = 0; k < 2; ++k) elems_.push_back(sym("e" + std::to_string(k), Sort::Elem));
    for (int k = 0; k < 2; ++k) arrays_.push_back(sym("a" + std::to_string(k), Sort::Array));
  }

  int uni(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Term index() {
    Term b = uni(0, 3) == 0 ? s_.zero() : idx_[static_cast<std::size_t>(uni(0, 2))];
    if (s_.signature().offsets_enabled() && uni(0, 2) == 0) b = s_.offset(b, uni(-1, 1));
    return b;
  }

  Term elem() {
    int r = uni(0, 5);
    if (r == 0) return s_.bot();
    if (r == 1) return s_.el();
    if (r < 4) return elems_[static_cast<std::size_t>(uni(0, 1))];
    return s_.rd(arrays_[static_cast<std::size_t>(uni(0, 1))], index());
  }

  Term literal() {
    Term atom;
    int r = uni(0, 5);
    if (r < 2) atom = s_.le(index(), index());
    else if (r < 3) atom = s_.eq(index(), index());
    else atom = s_.eq(elem(), elem());
    return uni(0, 2) == 0 ? s_.neg(atom) : atom;
  }

  std::vector<Term> cube(int max_len) {
    std::vector<Term> out;
    int n = uni(1, max_len);
    for (int k = 0; k < n; ++k) out.push_back(literal());
    return out;
  }

 private:
  Term sym(const std::string& name, Sort sort) {
    auto f = s_.find_symbol(name);
    return s_.constant(f ? *f : s_.declare(name, {}, sort));
  }

  TermStore& s_;
  std::mt19937& rng_;
  std::vector<Term> idx_, elems_, arrays_;
};

}  // namespace card::testing
