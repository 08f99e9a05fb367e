#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dt/formula.hpp"

namespace dt {

/// Metavariable assignment. One formula per metavariable.
using Binding = std::map<char, Formula>;

/// A formula over lowercase metavariables, e.g. `¬(x∧y)`.
class Pattern {
 public:
  explicit Pattern(Formula shape);
  static Pattern parse(std::string_view text);

  const Formula& shape() const noexcept { return shape_; }
  const std::string& text() const noexcept { return shape_.text(); }
  bool is_variable() const noexcept { return shape_.is_variable(); }
  const std::vector<char>& variables() const noexcept { return variables_; }

  bool is_ground(const Binding& b) const;
  bool mentions_any(const Binding& b) const;

  /// Instantiates every metavariable; throws if one is unbound.
  Formula instantiate(const Binding& b) const;

 private:
  Formula shape_;
  std::vector<char> variables_;
};

/// Extends `partial` so that `p` instantiated with the result equals `f`.
std::optional<Binding> match_pattern(const Pattern& p, const Formula& f, Binding partial = {});

enum class RuleKind { Inference, Replacement };

/// One premises ⊢ conclusion schema. Replacement rules contribute one form per
/// rewrite direction; rules such as Simplification have one form per conclusion.
struct RuleForm {
  std::vector<Pattern> premises;
  Pattern conclusion;
  /// Conclusion metavariables absent from every premise (Addition's disjunct).
  std::vector<char> free_variables;
};

class Rule {
 public:
  Rule(std::string name, std::string abbreviation, RuleKind kind);

  const std::string& name() const noexcept { return name_; }
  const std::string& abbreviation() const noexcept { return abbreviation_; }
  RuleKind kind() const noexcept { return kind_; }
  const std::vector<RuleForm>& forms() const noexcept { return forms_; }
  bool introduces_free_variable() const noexcept;
  /// Arity of the first form; all forms of one rule share it.
  std::size_t arity() const noexcept;

  void add_form(RuleForm form);

 private:
  std::string name_;
  std::string abbreviation_;
  RuleKind kind_;
  std::vector<RuleForm> forms_;
};

class RuleCatalog {
 public:
  /// Parses the catalog data format:
  ///   inference   ; Modus Ponens ; MP  ; x, x⇒y ⊢ y
  ///   replacement ; DeMorgan     ; DeM ; ¬(x∧y) ≡ ¬x∨¬y
  /// Lines with a repeated name add forms to the same rule. `#` starts a comment.
  static RuleCatalog parse(std::string_view text);

  /// The compiled-in catalog (core/data/rules.catalog).
  static const RuleCatalog& standard();

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  /// Lookup by full name or abbreviation, case-sensitive.
  const Rule* find(std::string_view name) const noexcept;
  const Rule& at(std::string_view name) const;
  /// Position in catalog order; used for deterministic tie-breaking.
  std::size_t index_of(std::string_view name) const;

 private:
  std::vector<Rule> rules_;
};

/// Justified formulas available to backward refinement, indexed by connective.
class FormulaPool {
 public:
  FormulaPool() = default;
  explicit FormulaPool(std::span<const Formula> formulas);

  void insert(const Formula& f);
  bool contains(const Formula& f) const { return members_.contains(f); }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<Formula>& with_kind(Connective c) const;

 private:
  std::unordered_set<Formula> members_;
  std::vector<Formula> by_kind_[5];
};

struct ForwardResult {
  /// Distinct conclusions in canonical order.
  std::vector<Formula> conclusions;
  /// Conclusions that still need a user-supplied formula for a free metavariable.
  std::vector<Formula> templates;
  bool applicable() const noexcept { return !conclusions.empty() || !templates.empty(); }
};

/// Matches `premises` against each form's premise patterns in the given order.
/// `choice` binds free conclusion metavariables (Addition). Throws
/// std::invalid_argument when no form of the rule has this arity.
ForwardResult apply_forward(const Rule& rule, std::span<const Formula> premises,
                            const Binding& choice = {});

/// One way to refine `target`: the rule's premises instantiated in form order,
/// each either consumed from the justified pool or left as a new subgoal.
struct SubgoalOption {
  std::string rule;
  std::size_t form = 0;
  std::vector<Formula> premises;
  std::vector<bool> consumed;
  Binding binding;

  std::vector<Formula> subgoals() const;
  std::vector<Formula> consumed_formulas() const;
  friend bool operator==(const SubgoalOption&, const SubgoalOption&) = default;
};

/// Enumerates refinements of `target` by `rule`. Free premise metavariables are
/// bound only by matching an anchored premise (one that shares an already-bound
/// metavariable) against pool members; options that would leave a metavariable
/// unbound are not produced. Options equal to the target itself are dropped.
/// Sorted by (subgoal text, consumed text, form).
std::vector<SubgoalOption> apply_backward(const Rule& rule, const Formula& target, const FormulaPool& pool);

/// Backward refinement with a caller-supplied binding. Returns the option of the
/// first form whose conclusion instantiates to `target` with all premises ground.
std::optional<SubgoalOption> refine_with_binding(const Rule& rule, const Formula& target, const Binding& binding,
                                                 const FormulaPool& pool);

/// Form index and binding under which `rule` derives `conclusion` from
/// `premises` (in form order), if any.
std::optional<std::pair<std::size_t, Binding>> match_step(const Rule& rule, std::span<const Formula> premises,
                                                          const Formula& conclusion);

std::string to_string(RuleKind kind);

}  // namespace dt
