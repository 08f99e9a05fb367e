#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dt {

enum class Connective : std::uint8_t { Atom, Not, And, Or, Implies };

/// Immutable propositional formula. Nodes are shared, so copies are cheap and
/// values can be passed between threads freely.
///
/// Each node caches its canonical text (Unicode operators, minimal
/// parentheses). Equality and ordering are defined on that text, which is
/// equivalent to syntactic equality because parse(render(f)) == f.
class Formula {
 public:
  static Formula atom(char name);
  static Formula negation(Formula operand);
  static Formula conjunction(Formula left, Formula right);
  static Formula disjunction(Formula left, Formula right);
  static Formula implication(Formula left, Formula right);
  static Formula binary(Connective op, Formula left, Formula right);

  /// Metavariable leaf used by rule patterns (lowercase letter).
  static Formula variable(char name);

  Connective kind() const noexcept;
  bool is_atom() const noexcept { return kind() == Connective::Atom; }
  bool is_binary() const noexcept;

  /// Atom or metavariable letter. Only valid for leaves.
  char name() const;
  bool is_variable() const noexcept;

  const Formula& operand() const;  // negation
  const Formula& left() const;     // binary
  const Formula& right() const;    // binary

  const std::string& text() const noexcept;
  std::size_t size() const noexcept;  // node count
  std::size_t hash() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses a formula. Accepts Unicode (¬ ∧ ∨ ⇒ →) and ASCII (~ & | ->) operators.
/// Precedence ¬ > ∧ > ∨ > ⇒; ∧ and ∨ associate left, ⇒ associates right.
/// Atoms are single uppercase letters.
Formula parse(std::string_view text);

/// Same grammar with lowercase metavariables instead of atoms.
Formula parse_pattern_text(std::string_view text);

inline const std::string& render(const Formula& f) { return f.text(); }

/// Total order by canonical text (codepoint order).
std::strong_ordering compare(const Formula& a, const Formula& b) noexcept;

/// Every distinct subformula, including f itself, in pre-order.
std::vector<Formula> subformulas(const Formula& f);

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

}  // namespace dt

template <>
struct std::hash<dt::Formula> {
  std::size_t operator()(const dt::Formula& f) const noexcept { return f.hash(); }
};
