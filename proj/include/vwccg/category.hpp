#pragma once

// Categories of combinatory categorial grammar, viewed as an atomic
// target plus a stack of slash/category arguments. Every distinct
// category is interned exactly once, so equality and hashing are O(1).

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vwccg {

class syntax_error : public std::runtime_error {
 public:
  syntax_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)),
        pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Slash : std::uint8_t { Forward, Backward };

inline char slash_char(Slash s) { return s == Slash::Forward ? '/' : '\\'; }

namespace detail {

inline bool is_atom_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

inline bool is_atom_char(char c) {
  return is_atom_start(c) || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
         c == '+' || c == ';' || c == '-';
}

// Interning table for atom names. Insertion is guarded by a mutex;
// entries are stored in a deque so references stay valid while other
// threads insert.
class AtomPool {
 public:
  static AtomPool& instance() {
    static AtomPool pool;
    return pool;
  }

  std::uint32_t intern(std::string_view name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  const std::string& name(std::uint32_t id) const { return names_[id]; }

 private:
  std::mutex mu_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace detail

// An atomic category name. Non-empty token over [A-Za-z][A-Za-z0-9_.+;-]*.
class Atom {
 public:
  explicit Atom(std::string_view name) {
    if (name.empty() || !detail::is_atom_start(name.front()))
      throw validation_error("illegal atom token: '" + std::string(name) +
                             "'");
    for (char c : name)
      if (!detail::is_atom_char(c))
        throw validation_error("illegal atom token: '" + std::string(name) +
                               "'");
    id_ = detail::AtomPool::instance().intern(name);
  }

  const std::string& name() const {
    return detail::AtomPool::instance().name(id_);
  }
  std::uint32_t id() const { return id_; }

  friend bool operator==(Atom a, Atom b) { return a.id_ == b.id_; }
  friend bool operator!=(Atom a, Atom b) { return a.id_ != b.id_; }
  friend bool operator<(Atom a, Atom b) { return a.id_ < b.id_; }

 private:
  std::uint32_t id_;
};

class Cat;

// One stack element: a slash paired with an argument category.
struct Arg {
  Slash slash;
  std::uint32_t cat_id;  // interned category id; see Cat

  friend bool operator==(const Arg& a, const Arg& b) {
    return a.slash == b.slash && a.cat_id == b.cat_id;
  }
  friend bool operator<(const Arg& a, const Arg& b) {
    return a.cat_id != b.cat_id ? a.cat_id < b.cat_id : a.slash < b.slash;
  }
};

namespace detail {

struct CatNode {
  std::uint32_t target;
  std::vector<Arg> args;
};

struct CatKeyHash {
  std::size_t operator()(const CatNode* n) const {
    std::size_t h = n->target;
    for (const Arg& a : n->args) {
      h ^= (static_cast<std::size_t>(a.cat_id) * 2u +
            static_cast<std::size_t>(a.slash)) +
           0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct CatKeyEq {
  bool operator()(const CatNode* a, const CatNode* b) const {
    return a->target == b->target && a->args == b->args;
  }
};

class CatPool {
 public:
  static CatPool& instance() {
    static CatPool pool;
    return pool;
  }

  std::uint32_t intern(std::uint32_t target, std::vector<Arg> args) {
    CatNode probe{target, std::move(args)};
    std::lock_guard<std::mutex> lock(mu_);
    auto it = index_.find(&probe);
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(std::move(probe));
    index_.emplace(&nodes_.back(), id);
    return id;
  }

  const CatNode& node(std::uint32_t id) const { return nodes_[id]; }

 private:
  std::mutex mu_;
  std::deque<CatNode> nodes_;
  std::unordered_map<const CatNode*, std::uint32_t, CatKeyHash, CatKeyEq>
      index_;
};

}  // namespace detail

// A category value: an interned handle. Immutable and freely copyable.
class Cat {
 public:
  // Default-constructs the atomic category `S`; builders overwrite it.
  Cat() : Cat(Atom("S")) {}
  explicit Cat(Atom target) : Cat(target, {}) {}
  Cat(Atom target, std::vector<Arg> args)
      : id_(detail::CatPool::instance().intern(target.id(), std::move(args))) {
  }

  std::uint32_t id() const { return id_; }
  static Cat from_id(std::uint32_t id) { return Cat(id, 0); }

  Atom target() const { return atom_from_id(node().target); }
  // Arguments bottom-to-top: args()[0] is the bottom of the stack,
  // args().back() the topmost (consumed-first) argument.
  std::span<const Arg> args() const { return node().args; }
  std::size_t arity() const { return node().args.size(); }
  bool atomic() const { return node().args.empty(); }

  Cat arg_cat(std::size_t i) const { return from_id(node().args[i].cat_id); }

  friend bool operator==(Cat a, Cat b) { return a.id_ == b.id_; }
  friend bool operator!=(Cat a, Cat b) { return a.id_ != b.id_; }
  friend bool operator<(Cat a, Cat b) { return a.id_ < b.id_; }

 private:
  Cat(std::uint32_t id, int) : id_(id) {}
  static Atom atom_from_id(std::uint32_t id);
  const detail::CatNode& node() const {
    return detail::CatPool::instance().node(id_);
  }

  std::uint32_t id_;
};

inline Atom Cat::atom_from_id(std::uint32_t id) {
  // The id came out of the pool, so the name is already validated.
  return Atom(detail::AtomPool::instance().name(id));
}

inline std::size_t arity(Cat c) { return c.arity(); }

// Number of atom occurrences: one for the target plus the size of each
// argument. With this measure, size(X) = 1 + sum of argument sizes, so
// the derivation-size bound 1 + alpha * (number of arguments) holds.
inline std::size_t category_size(Cat c) {
  std::size_t n = 1;
  for (const Arg& a : c.args()) n += category_size(Cat::from_id(a.cat_id));
  return n;
}

// Canonical text form: target, then arguments bottom-to-top; complex
// argument categories are parenthesized, redundant parentheses dropped.
inline std::string render_category(Cat c) {
  std::string out = c.target().name();
  for (std::size_t i = 0; i < c.arity(); ++i) {
    const Arg& a = c.args()[i];
    out += slash_char(a.slash);
    Cat sub = Cat::from_id(a.cat_id);
    if (sub.atomic()) {
      out += sub.target().name();
    } else {
      out += '(';
      out += render_category(sub);
      out += ')';
    }
  }
  return out;
}

namespace detail {

class CategoryParser {
 public:
  explicit CategoryParser(std::string_view text) : text_(text) {}

  Cat parse() {
    Cat c = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw syntax_error("unexpected trailing input in category", pos_);
    return c;
  }

 private:
  Cat parse_expr() {
    Cat base = parse_primary();
    std::vector<Arg> args(base.args().begin(), base.args().end());
    Atom target = base.target();
    skip_ws();
    while (pos_ < text_.size() && (text_[pos_] == '/' || text_[pos_] == '\\')) {
      Slash s = text_[pos_] == '/' ? Slash::Forward : Slash::Backward;
      ++pos_;
      Cat arg = parse_primary();
      args.push_back(Arg{s, arg.id()});
      skip_ws();
    }
    return Cat(target, std::move(args));
  }

  Cat parse_primary() {
    skip_ws();
    if (pos_ >= text_.size())
      throw syntax_error("empty argument in category", pos_);
    if (text_[pos_] == '(') {
      std::size_t open = pos_++;
      Cat c = parse_expr();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')')
        throw syntax_error("unbalanced parenthesis", open);
      ++pos_;
      return c;
    }
    if (!is_atom_start(text_[pos_]))
      throw syntax_error(std::string("illegal atom token '") + text_[pos_] +
                             "'",
                         pos_);
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_atom_char(text_[pos_])) ++pos_;
    return Cat(Atom(text_.substr(start, pos_ - start)));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Cat parse_category(std::string_view text) {
  return detail::CategoryParser(text).parse();
}

// Splits off the top d arguments. Returns the remaining category and
// the removed arguments in bottom-to-top order, or nothing when
// arity(c) < d.
inline std::optional<std::pair<Cat, std::vector<Arg>>> split_top(
    Cat c, std::size_t d) {
  if (c.arity() < d) return std::nullopt;
  std::size_t keep = c.arity() - d;
  std::vector<Arg> below(c.args().begin(), c.args().begin() + keep);
  std::vector<Arg> top(c.args().begin() + keep, c.args().end());
  return std::make_pair(Cat(c.target(), std::move(below)), std::move(top));
}

// Appends arguments on top of the stack of c.
inline Cat push_args(Cat c, std::span<const Arg> extra) {
  std::vector<Arg> args(c.args().begin(), c.args().end());
  args.insert(args.end(), extra.begin(), extra.end());
  return Cat(c.target(), std::move(args));
}

}  // namespace vwccg

template <>
struct std::hash<vwccg::Atom> {
  std::size_t operator()(vwccg::Atom a) const { return a.id(); }
};

template <>
struct std::hash<vwccg::Cat> {
  std::size_t operator()(vwccg::Cat c) const { return c.id(); }
};
