#ifndef UTURN_STATE_HPP
#define UTURN_STATE_HPP

// Bounded value domain, stores, flagged states and expression evaluation:
// the concrete universe over which all oracle checks run. Values are residues
// mod M represented in [-floor(M/2), ceil(M/2)-1]; arithmetic wraps around.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "uturn/errors.hpp"
#include "uturn/lang.hpp"

namespace uturn {

using Value = long long;

enum class Flag { Ok, Er };

/// Total store: values for the universe's variables, in declaration order.
using StoreVals = std::vector<Value>;

/// Finite configuration for the enumeration oracle: modulus and variable set.
/// States are indexed densely: ok states first, then er states, store digits
/// with the first declared variable most significant.
class Universe {
public:
  Universe(long long modulus, std::vector<VarName> vars, std::uint64_t budget = 1u << 22)
      : modulus_(modulus), vars_(std::move(vars)) {
    if (modulus_ < 2) throw PreconditionError("modulus must be at least 2");
    if (vars_.empty()) throw PreconditionError("universe needs at least one variable");
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (count > budget / static_cast<std::uint64_t>(modulus_))
        throw BudgetError("state enumeration of " + std::to_string(vars_.size()) +
                          " variables mod " + std::to_string(modulus_) +
                          " exceeds the configured budget");
      count *= static_cast<std::uint64_t>(modulus_);
    }
    store_count_ = count;
  }

  long long modulus() const { return modulus_; }
  const std::vector<VarName>& vars() const { return vars_; }

  /// Smallest representable value, -floor(M/2).
  Value lo() const { return -(modulus_ / 2); }
  /// Largest representable value, ceil(M/2)-1.
  Value hi() const { return modulus_ - modulus_ / 2 - 1; }

  /// Reduces n into the representative range.
  Value normalize(Value n) const {
    Value m = n % modulus_;
    if (m < lo()) m += modulus_;
    if (m > hi()) m -= modulus_;
    return m;
  }

  bool in_range(Value n) const { return n >= lo() && n <= hi(); }

  std::size_t var_index(const VarName& x) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == x) return i;
    throw PreconditionError("variable '" + x + "' is not in the universe");
  }
  bool has_var(const VarName& x) const {
    return std::find(vars_.begin(), vars_.end(), x) != vars_.end();
  }

  std::uint64_t store_count() const { return store_count_; }
  std::uint64_t state_count() const { return 2 * store_count_; }

  /// Dense store index; the first declared variable is the most significant digit.
  std::uint64_t store_index(const StoreVals& s) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      idx = idx * static_cast<std::uint64_t>(modulus_) + static_cast<std::uint64_t>(s[i] - lo());
    return idx;
  }

  StoreVals store_at(std::uint64_t idx) const {
    StoreVals s(vars_.size());
    for (std::size_t i = vars_.size(); i-- > 0;) {
      s[i] = lo() + static_cast<Value>(idx % static_cast<std::uint64_t>(modulus_));
      idx /= static_cast<std::uint64_t>(modulus_);
    }
    return s;
  }

private:
  long long modulus_;
  std::vector<VarName> vars_;
  std::uint64_t store_count_;
};

struct FlaggedState {
  Flag flag;
  StoreVals store;

  bool operator==(const FlaggedState&) const = default;
};

inline std::uint64_t state_index(const FlaggedState& s, const Universe& u) {
  std::uint64_t base = s.flag == Flag::Ok ? 0 : u.store_count();
  return base + u.store_index(s.store);
}

inline FlaggedState state_at(std::uint64_t idx, const Universe& u) {
  Flag f = idx < u.store_count() ? Flag::Ok : Flag::Er;
  std::uint64_t si = idx % u.store_count();
  return FlaggedState{f, u.store_at(si)};
}

/// Deduplicated set of flagged states, stored as a bitset over state indices.
/// Enumeration order is deterministic: ok states first, then er, stores in
/// lexicographic order of the declared variables.
class StateSet {
public:
  StateSet() = default;
  explicit StateSet(const Universe& u) : size_(u.state_count()), bits_((size_ + 63) / 64, 0) {}

  static StateSet full(const Universe& u) {
    StateSet s(u);
    for (std::uint64_t i = 0; i < s.size_; ++i) s.set(i);
    return s;
  }
  static StateSet all_with_flag(const Universe& u, Flag f) {
    StateSet s(u);
    std::uint64_t base = f == Flag::Ok ? 0 : u.store_count();
    for (std::uint64_t i = 0; i < u.store_count(); ++i) s.set(base + i);
    return s;
  }

  std::uint64_t universe_size() const { return size_; }

  void set(std::uint64_t i) { bits_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void clear(std::uint64_t i) { bits_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::uint64_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }

  void insert(const FlaggedState& s, const Universe& u) { set(state_index(s, u)); }
  bool contains(const FlaggedState& s, const Universe& u) const { return test(state_index(s, u)); }

  bool empty() const {
    for (std::uint64_t w : bits_)
      if (w) return false;
    return true;
  }

  std::uint64_t count() const {
    std::uint64_t n = 0;
    for (std::uint64_t w : bits_) n += static_cast<std::uint64_t>(__builtin_popcountll(w));
    return n;
  }

  StateSet& unite(const StateSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }
  StateSet& intersect(const StateSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
    return *this;
  }
  StateSet& subtract(const StateSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~o.bits_[i];
    return *this;
  }

  bool subset_of(const StateSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] & ~o.bits_[i]) return false;
    return true;
  }

  bool operator==(const StateSet& o) const { return size_ == o.size_ && bits_ == o.bits_; }

  /// Calls f(index) for every member, in deterministic enumeration order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::uint64_t i = 0; i < size_; ++i)
      if (test(i)) f(i);
  }

private:
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> bits_;
};

inline StateSet set_union(StateSet a, const StateSet& b) { return a.unite(b); }
inline StateSet set_intersect(StateSet a, const StateSet& b) { return a.intersect(b); }
inline StateSet set_minus(StateSet a, const StateSet& b) { return a.subtract(b); }

/// Yields every flagged state exactly once, in the deterministic order.
inline std::vector<FlaggedState> enumerate_states(const Universe& u) {
  std::vector<FlaggedState> out;
  out.reserve(u.state_count());
  for (std::uint64_t i = 0; i < u.state_count(); ++i) out.push_back(state_at(i, u));
  return out;
}

// ---------------------------------------------------------------------------
// Expression evaluation. `env` optionally overlays bound-variable values
// (used by Exists); it is consulted before the store.

struct BoundEnv {
  const BoundEnv* outer = nullptr;
  const VarName* name = nullptr;
  Value value = 0;

  const Value* lookup(const VarName& x) const {
    for (const BoundEnv* e = this; e; e = e->outer)
      if (e->name && *e->name == x) return &e->value;
    return nullptr;
  }
};

inline Value eval_aexp(const AExp& a, const StoreVals& sigma, const Universe& u,
                       const BoundEnv* env = nullptr) {
  if (const auto* l = std::get_if<IntLit>(&a.node)) return u.normalize(l->value);
  if (const auto* v = std::get_if<VarRef>(&a.node)) {
    if (env)
      if (const Value* b = env->lookup(v->name)) return *b;
    return sigma[u.var_index(v->name)];
  }
  const auto& b = std::get<BinOp>(a.node);
  Value l = eval_aexp(*b.lhs, sigma, u, env);
  Value r = eval_aexp(*b.rhs, sigma, u, env);
  switch (b.op) {
    case AOp::Add: return u.normalize(l + r);
    case AOp::Sub: return u.normalize(l - r);
    default: return u.normalize(l * r);
  }
}

inline bool eval_bexp(const BExp& b, const StoreVals& sigma, const Universe& u,
                      const BoundEnv* env = nullptr) {
  if (std::holds_alternative<BFalse>(b.node)) return false;
  if (const auto* n = std::get_if<BNot>(&b.node)) return !eval_bexp(*n->arg, sigma, u, env);
  if (const auto* a = std::get_if<BAnd>(&b.node))
    return eval_bexp(*a->lhs, sigma, u, env) && eval_bexp(*a->rhs, sigma, u, env);
  const auto& c = std::get<BCmp>(b.node);
  Value l = eval_aexp(*c.lhs, sigma, u, env);
  Value r = eval_aexp(*c.rhs, sigma, u, env);
  switch (c.op) {
    case CmpOp::Eq: return l == r;
    case CmpOp::Ne: return l != r;
    case CmpOp::Le: return l <= r;
    default: return l < r;
  }
}

inline std::string to_string(const FlaggedState& s, const Universe& u) {
  std::string out = s.flag == Flag::Ok ? "(ok," : "(er,";
  for (std::size_t i = 0; i < u.vars().size(); ++i) {
    out += (i ? "," : "") + u.vars()[i] + ":" + std::to_string(s.store[i]);
  }
  return out + ")";
}

}  // namespace uturn

#endif
