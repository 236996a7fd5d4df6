#pragma once

// Hash-consed term DAG for the array-with-length theory. Formulas are
// terms of sort Bool; everything is interned in a TermStore and referred to
// through lightweight Term handles.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "card/error.h"

namespace card {

enum class Sort : std::uint8_t { Index, Elem, Array, Bool };

enum class IndexTheoryKind : std::uint8_t { TO, IDL };

enum class TheoryMode : std::uint8_t { Card, Cardc };

struct Signature {
  TheoryMode mode = TheoryMode::Card;
  IndexTheoryKind index = IndexTheoryKind::IDL;
  bool const_enabled() const { return mode == TheoryMode::Cardc; }
  bool offsets_enabled() const { return index == IndexTheoryKind::IDL; }
};

enum class Op : std::uint8_t {
  Symbol,      // 0-ary user or fresh constant; payload = symbol id
  Apply,       // free function / predicate application; payload = symbol id
  Zero,
  Bot,
  El,
  True,
  False,
  Offset,      // args[0] + payload, used for succ/pred chains and numerals
  Read,        // rd(a, i)
  Write,       // wr(a, i, e)
  Diff,        // diff(a, b)
  Len,         // |a|
  ConstArray,  // Const(i)
  Max,         // max(i, j)
  Eq,          // equality at any sort; iff at Bool
  Le,
  Not,
  And,
  Or,
  Implies,
  Forall,      // payload = bound index symbol, args[0] = matrix
};

using SymbolId = std::uint32_t;
using TermId = std::uint32_t;

std::string_view to_string(Sort s);
std::string_view to_string(Op op);
std::optional<Sort> parse_sort(std::string_view name);

struct SymbolInfo {
  std::string name;
  std::vector<Sort> domain;
  Sort range = Sort::Index;
  bool fresh = false;
  bool is_constant() const { return domain.empty(); }
};

struct Node {
  Op op = Op::Zero;
  Sort sort = Sort::Index;
  std::int64_t payload = 0;
  std::vector<TermId> args;
};

class TermStore;

class Term {
 public:
  Term() = default;
  Term(TermStore* store, TermId id) : store_(store), id_(id) {}

  bool null() const { return store_ == nullptr; }
  explicit operator bool() const { return store_ != nullptr; }
  TermId id() const { return id_; }
  TermStore& store() const { return *store_; }
  const Node& node() const;
  Op op() const { return node().op; }
  Sort sort() const { return node().sort; }
  std::int64_t payload() const { return node().payload; }
  SymbolId symbol() const { return static_cast<SymbolId>(node().payload); }
  std::size_t arity() const { return node().args.size(); }
  Term operator[](std::size_t k) const { return Term(store_, node().args[k]); }
  std::vector<Term> args() const;

  bool is(Op o) const { return op() == o; }
  bool is_constant() const { return op() == Op::Symbol; }
  bool is_atom() const;  // Bool-sorted leaf of the Boolean structure

  friend bool operator==(const Term& a, const Term& b) {
    return a.id_ == b.id_ && a.store_ == b.store_;
  }
  friend auto operator<=>(const Term& a, const Term& b) { return a.id_ <=> b.id_; }

 private:
  TermStore* store_ = nullptr;
  TermId id_ = 0;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return std::hash<TermId>()(t.id()); }
};

template <typename V>
using TermMap = std::unordered_map<Term, V, TermHash>;

// Append-only chunked storage: elements never move, so readers need no lock.
template <typename T>
class StableVector {
 public:
  static constexpr std::size_t kChunkBits = 12;
  static constexpr std::size_t kChunk = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kMaxChunks = std::size_t{1} << 14;

  StableVector() : chunks_(new std::unique_ptr<T[]>[kMaxChunks]) {}
  std::size_t size() const { return size_; }
  const T& operator[](std::size_t k) const { return chunks_[k >> kChunkBits][k & (kChunk - 1)]; }
  T& operator[](std::size_t k) { return chunks_[k >> kChunkBits][k & (kChunk - 1)]; }
  std::size_t push_back(T value) {
    std::size_t k = size_;
    std::size_t c = k >> kChunkBits;
    if (c >= kMaxChunks) fail(ErrorKind::BudgetExceeded, "term store capacity exhausted");
    if (!chunks_[c]) chunks_[c].reset(new T[kChunk]);
    chunks_[c][k & (kChunk - 1)] = std::move(value);
    size_ = k + 1;
    return k;
  }

 private:
  std::unique_ptr<std::unique_ptr<T[]>[]> chunks_;
  std::size_t size_ = 0;
};

class TermStore {
 public:
  explicit TermStore(Signature sig = {});
  TermStore(const TermStore&) = delete;
  TermStore& operator=(const TermStore&) = delete;

  const Signature& signature() const { return sig_; }
  void set_signature(Signature sig) { sig_ = sig; }

  SymbolId declare(std::string name, std::vector<Sort> domain, Sort range);
  SymbolId fresh_symbol(std::string_view prefix, Sort range);
  std::optional<SymbolId> find_symbol(std::string_view name) const;
  const SymbolInfo& symbol(SymbolId s) const;
  std::size_t symbol_count() const;

  const Node& node(TermId t) const { return nodes_[t]; }
  std::size_t size() const;

  // Generic constructor with rank checking (SortMismatch on violation).
  Term make(Op op, std::span<const Term> args, std::int64_t payload = 0);
  Term rebuild(Term t, std::span<const Term> args);

  Term constant(SymbolId s);
  Term constant(std::string_view name);
  Term fresh(std::string_view prefix, Sort range) { return constant(fresh_symbol(prefix, range)); }
  Term apply(SymbolId f, std::span<const Term> args);
  Term zero();
  Term bot();
  Term el();
  Term top();
  Term bottom_formula();
  Term offset(Term base, std::int64_t k);
  Term succ(Term t) { return offset(t, 1); }
  Term pred(Term t) { return offset(t, -1); }
  Term numeral(std::int64_t k) { return offset(zero(), k); }
  Term rd(Term a, Term i);
  Term wr(Term a, Term i, Term e);
  Term diff(Term a, Term b);
  Term len(Term a);
  Term const_array(Term i);
  Term max(Term i, Term j);
  Term eq(Term s, Term t);
  Term le(Term s, Term t);
  Term lt(Term s, Term t);  // sugar: not (t <= s)
  Term neg(Term f);
  Term conj(std::span<const Term> fs);  // true / f / (and ...)
  Term disj(std::span<const Term> fs);  // false / f / (or ...)
  Term conj(std::initializer_list<Term> fs) { return conj(std::span<const Term>(fs.begin(), fs.size())); }
  Term disj(std::initializer_list<Term> fs) { return disj(std::span<const Term>(fs.begin(), fs.size())); }
  Term implies(Term a, Term b);
  Term iff(Term a, Term b) { return eq(a, b); }
  Term forall(SymbolId bound, Term matrix);

 private:
  struct Key {
    Op op;
    std::int64_t payload;
    std::vector<TermId> args;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  Sort result_sort(Op op, std::span<const Term> args, std::int64_t payload) const;
  Term intern(Op op, Sort sort, std::int64_t payload, std::vector<TermId> args);

  Signature sig_;
  mutable std::mutex mutex_;
  StableVector<Node> nodes_;
  StableVector<SymbolInfo> symbols_;
  std::unordered_map<Key, TermId, KeyHash> index_;
  std::unordered_map<std::string, SymbolId> by_name_;
  std::uint64_t fresh_counter_ = 0;
};

// Splits an index term into base and integer offset (t == base + k).
std::pair<Term, std::int64_t> split_offset(Term t);

// Free symbols (constants, functions, predicates); Forall-bound names excluded.
std::set<SymbolId> symbols_of(Term t);
std::set<SymbolId> symbols_of(std::span<const Term> ts);

// Capture-avoiding replacement of constant symbols by terms of equal sort.
Term substitute(Term t, const std::unordered_map<SymbolId, Term>& mapping);

// diff_k(a, b) via b_1 = b, b_{k+1} = wr(b_k, diff_k, rd(a, diff_k)).
Term expand_iterated_diff(Term a, Term b, int k);

std::size_t dag_size(Term t);
std::size_t dag_size(std::span<const Term> ts);

struct PrintOptions {
  bool numerals = true;  // print 0 + k as k instead of succ/pred chains
};
std::string to_sexpr(Term t, PrintOptions opts = {});

// Visits every node reachable from the roots once, children first.
void post_order(std::span<const Term> roots, const std::function<void(Term)>& visit);

}  // namespace card
