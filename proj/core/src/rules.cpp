#include "dt/rules.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dt {

namespace detail {
extern const std::string_view kRuleCatalogText;
}

namespace {

void collect_variables(const Formula& f, std::vector<char>& out) {
  if (f.is_atom()) {
    if (f.is_variable() && std::find(out.begin(), out.end(), f.name()) == out.end()) out.push_back(f.name());
    return;
  }
  if (f.kind() == Connective::Not) {
    collect_variables(f.operand(), out);
    return;
  }
  collect_variables(f.left(), out);
  collect_variables(f.right(), out);
}

bool match_into(const Formula& p, const Formula& f, Binding& b) {
  if (p.is_variable()) {
    auto it = b.find(p.name());
    if (it != b.end()) return it->second == f;
    b.emplace(p.name(), f);
    return true;
  }
  if (p.kind() != f.kind()) return false;
  switch (p.kind()) {
    case Connective::Atom:
      return p.name() == f.name();
    case Connective::Not:
      return match_into(p.operand(), f.operand(), b);
    default:
      return match_into(p.left(), f.left(), b) && match_into(p.right(), f.right(), b);
  }
}

Formula substitute(const Formula& p, const Binding& b) {
  switch (p.kind()) {
    case Connective::Atom: {
      if (!p.is_variable()) return p;
      auto it = b.find(p.name());
      if (it == b.end()) throw std::invalid_argument(std::string("unbound metavariable ") + p.name());
      return it->second;
    }
    case Connective::Not:
      return Formula::negation(substitute(p.operand(), b));
    default:
      return Formula::binary(p.kind(), substitute(p.left(), b), substitute(p.right(), b));
  }
}

/// Substitutes bound metavariables and leaves the rest in place.
Formula partial_substitute(const Formula& p, const Binding& b) {
  switch (p.kind()) {
    case Connective::Atom: {
      if (!p.is_variable()) return p;
      auto it = b.find(p.name());
      return it == b.end() ? p : it->second;
    }
    case Connective::Not:
      return Formula::negation(partial_substitute(p.operand(), b));
    default:
      return Formula::binary(p.kind(), partial_substitute(p.left(), b), partial_substitute(p.right(), b));
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    out.push_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
    if (at == std::string_view::npos) break;
    start = at + sep.size();
  }
  return out;
}

RuleForm make_form(std::vector<Pattern> premises, Pattern conclusion) {
  std::vector<char> premise_vars;
  for (const auto& p : premises)
    for (char v : p.variables())
      if (std::find(premise_vars.begin(), premise_vars.end(), v) == premise_vars.end()) premise_vars.push_back(v);
  RuleForm form{std::move(premises), std::move(conclusion), {}};
  for (char v : form.conclusion.variables())
    if (std::find(premise_vars.begin(), premise_vars.end(), v) == premise_vars.end()) form.free_variables.push_back(v);
  return form;
}

/// Text of a form with metavariables renamed in order of first appearance.
std::string alpha_key(const RuleForm& form) {
  Binding rename;
  char next = 'a';
  std::vector<char> order;
  for (const auto& p : form.premises) collect_variables(p.shape(), order);
  collect_variables(form.conclusion.shape(), order);
  for (char v : order) rename.emplace(v, Formula::variable(next++));
  std::string key;
  for (const auto& p : form.premises) key += substitute(p.shape(), rename).text() + ",";
  return key + "|" + substitute(form.conclusion.shape(), rename).text();
}

}  // namespace

Pattern::Pattern(Formula shape) : shape_(std::move(shape)) { collect_variables(shape_, variables_); }

Pattern Pattern::parse(std::string_view text) { return Pattern(parse_pattern_text(text)); }

bool Pattern::is_ground(const Binding& b) const {
  return std::all_of(variables_.begin(), variables_.end(), [&](char v) { return b.contains(v); });
}

bool Pattern::mentions_any(const Binding& b) const {
  return std::any_of(variables_.begin(), variables_.end(), [&](char v) { return b.contains(v); });
}

Formula Pattern::instantiate(const Binding& b) const { return substitute(shape_, b); }

std::optional<Binding> match_pattern(const Pattern& p, const Formula& f, Binding partial) {
  if (!match_into(p.shape(), f, partial)) return std::nullopt;
  return partial;
}

Rule::Rule(std::string name, std::string abbreviation, RuleKind kind)
    : name_(std::move(name)), abbreviation_(std::move(abbreviation)), kind_(kind) {}

bool Rule::introduces_free_variable() const noexcept {
  return std::any_of(forms_.begin(), forms_.end(), [](const RuleForm& f) { return !f.free_variables.empty(); });
}

std::size_t Rule::arity() const noexcept { return forms_.empty() ? 0 : forms_.front().premises.size(); }

void Rule::add_form(RuleForm form) {
  if (!forms_.empty() && form.premises.size() != arity())
    throw std::invalid_argument("rule '" + name_ + "' mixes arities");
  const std::string key = alpha_key(form);
  for (const auto& existing : forms_)
    if (alpha_key(existing) == key) return;
  forms_.push_back(std::move(form));
}

RuleCatalog RuleCatalog::parse(std::string_view text) {
  RuleCatalog catalog;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto fields = split(line, ";");
    if (fields.size() != 4) throw std::runtime_error("rule catalog line " + std::to_string(line_no) + ": expected 4 fields");
    RuleKind kind;
    if (fields[0] == "inference") {
      kind = RuleKind::Inference;
    } else if (fields[0] == "replacement") {
      kind = RuleKind::Replacement;
    } else {
      throw std::runtime_error("rule catalog line " + std::to_string(line_no) + ": unknown kind '" + fields[0] + "'");
    }

    auto it = std::find_if(catalog.rules_.begin(), catalog.rules_.end(),
                           [&](const Rule& r) { return r.name() == fields[1]; });
    if (it == catalog.rules_.end()) {
      catalog.rules_.emplace_back(fields[1], fields[2], kind);
      it = std::prev(catalog.rules_.end());
    } else if (it->kind() != kind || it->abbreviation() != fields[2]) {
      throw std::runtime_error("rule catalog line " + std::to_string(line_no) + ": inconsistent redefinition");
    }

    try {
      if (kind == RuleKind::Inference) {
        const auto sides = split(fields[3], "⊢");
        if (sides.size() != 2) throw std::runtime_error("expected 'premises ⊢ conclusion'");
        std::vector<Pattern> premises;
        for (const auto& p : split(sides[0], ",")) premises.push_back(Pattern::parse(p));
        it->add_form(make_form(std::move(premises), Pattern::parse(sides[1])));
      } else {
        const auto sides = split(fields[3], "≡");
        if (sides.size() != 2) throw std::runtime_error("expected 'lhs ≡ rhs'");
        Pattern lhs = Pattern::parse(sides[0]);
        Pattern rhs = Pattern::parse(sides[1]);
        it->add_form(make_form({lhs}, rhs));
        it->add_form(make_form({rhs}, lhs));
      }
    } catch (const ParseError& e) {
      throw std::runtime_error("rule catalog line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return catalog;
}

const RuleCatalog& RuleCatalog::standard() {
  static const RuleCatalog catalog = parse(detail::kRuleCatalogText);
  return catalog;
}

const Rule* RuleCatalog::find(std::string_view name) const noexcept {
  for (const auto& r : rules_)
    if (r.name() == name || r.abbreviation() == name) return &r;
  return nullptr;
}

const Rule& RuleCatalog::at(std::string_view name) const {
  if (const Rule* r = find(name)) return *r;
  throw std::out_of_range("unknown rule '" + std::string(name) + "'");
}

std::size_t RuleCatalog::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].name() == name || rules_[i].abbreviation() == name) return i;
  throw std::out_of_range("unknown rule '" + std::string(name) + "'");
}

FormulaPool::FormulaPool(std::span<const Formula> formulas) {
  for (const auto& f : formulas) insert(f);
}

void FormulaPool::insert(const Formula& f) {
  if (members_.insert(f).second) by_kind_[static_cast<int>(f.kind())].push_back(f);
}

const std::vector<Formula>& FormulaPool::with_kind(Connective c) const { return by_kind_[static_cast<int>(c)]; }

ForwardResult apply_forward(const Rule& rule, std::span<const Formula> premises, const Binding& choice) {
  if (premises.size() != rule.arity())
    throw std::invalid_argument("rule '" + rule.name() + "' takes " + std::to_string(rule.arity()) + " premise(s), got " +
                                std::to_string(premises.size()));
  std::set<Formula> conclusions;
  std::set<Formula> templates;
  for (const auto& form : rule.forms()) {
    Binding b;
    bool ok = true;
    for (std::size_t i = 0; i < premises.size() && ok; ++i) ok = match_into(form.premises[i].shape(), premises[i], b);
    if (!ok) continue;
    for (char v : form.free_variables) {
      auto it = choice.find(v);
      if (it != choice.end()) b.emplace(v, it->second);
    }
    if (form.conclusion.is_ground(b)) {
      conclusions.insert(form.conclusion.instantiate(b));
    } else {
      templates.insert(partial_substitute(form.conclusion.shape(), b));
    }
  }
  return {{conclusions.begin(), conclusions.end()}, {templates.begin(), templates.end()}};
}

std::vector<Formula> SubgoalOption::subgoals() const {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < premises.size(); ++i)
    if (!consumed[i]) out.push_back(premises[i]);
  return out;
}

std::vector<Formula> SubgoalOption::consumed_formulas() const {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < premises.size(); ++i)
    if (consumed[i]) out.push_back(premises[i]);
  return out;
}

namespace {

void enumerate_bindings(const RuleForm& form, const FormulaPool& pool, Binding b, std::vector<bool> decided,
                        std::vector<Binding>& out) {
  // Next undecided premise that can be matched against the pool: structured,
  // not yet ground, and anchored by a metavariable that is already bound.
  std::size_t pick = form.premises.size();
  for (std::size_t i = 0; i < form.premises.size(); ++i) {
    if (decided[i]) continue;
    const Pattern& p = form.premises[i];
    if (p.is_variable() || p.is_ground(b) || !p.mentions_any(b)) continue;
    pick = i;
    break;
  }
  if (pick == form.premises.size()) {
    for (const auto& p : form.premises)
      if (!p.is_ground(b)) return;
    out.push_back(std::move(b));
    return;
  }
  decided[pick] = true;
  const Pattern& p = form.premises[pick];
  for (const auto& candidate : pool.with_kind(p.shape().kind())) {
    Binding extended = b;
    if (match_into(p.shape(), candidate, extended)) enumerate_bindings(form, pool, std::move(extended), decided, out);
  }
  enumerate_bindings(form, pool, std::move(b), std::move(decided), out);
}

SubgoalOption make_option(const Rule& rule, std::size_t form_index, const Binding& b, const FormulaPool& pool) {
  const RuleForm& form = rule.forms()[form_index];
  SubgoalOption opt;
  opt.rule = rule.name();
  opt.form = form_index;
  opt.binding = b;
  for (const auto& p : form.premises) {
    Formula f = p.instantiate(b);
    opt.consumed.push_back(pool.contains(f));
    opt.premises.push_back(std::move(f));
  }
  return opt;
}

std::string option_sort_key(const SubgoalOption& o) {
  std::string key;
  for (const auto& s : o.subgoals()) key += s.text() + "\x1f";
  key += "\x1e";
  for (const auto& c : o.consumed_formulas()) key += c.text() + "\x1f";
  return key;
}

}  // namespace

std::vector<SubgoalOption> apply_backward(const Rule& rule, const Formula& target, const FormulaPool& pool) {
  std::vector<SubgoalOption> options;
  for (std::size_t fi = 0; fi < rule.forms().size(); ++fi) {
    const RuleForm& form = rule.forms()[fi];
    Binding b;
    if (!match_into(form.conclusion.shape(), target, b)) continue;
    std::vector<Binding> bindings;
    enumerate_bindings(form, pool, std::move(b), std::vector<bool>(form.premises.size(), false), bindings);
    for (const auto& binding : bindings) {
      SubgoalOption opt = make_option(rule, fi, binding, pool);
      if (std::find(opt.premises.begin(), opt.premises.end(), target) != opt.premises.end()) continue;
      options.push_back(std::move(opt));
    }
  }
  std::vector<std::pair<std::string, SubgoalOption>> keyed;
  keyed.reserve(options.size());
  for (auto& o : options) keyed.emplace_back(option_sort_key(o), std::move(o));
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.form < b.second.form;
  });
  std::vector<SubgoalOption> out;
  for (auto& [key, o] : keyed) {
    // Two forms can produce the same premise list (e.g. both Commutation directions).
    if (!out.empty() && out.back().premises == o.premises) continue;
    out.push_back(std::move(o));
  }
  return out;
}

std::optional<SubgoalOption> refine_with_binding(const Rule& rule, const Formula& target, const Binding& binding,
                                                 const FormulaPool& pool) {
  for (std::size_t fi = 0; fi < rule.forms().size(); ++fi) {
    const RuleForm& form = rule.forms()[fi];
    Binding b = binding;
    if (!match_into(form.conclusion.shape(), target, b)) continue;
    bool ground = std::all_of(form.premises.begin(), form.premises.end(), [&](const Pattern& p) { return p.is_ground(b); });
    if (!ground) continue;
    SubgoalOption opt = make_option(rule, fi, b, pool);
    if (std::find(opt.premises.begin(), opt.premises.end(), target) != opt.premises.end()) continue;
    return opt;
  }
  return std::nullopt;
}

std::optional<std::pair<std::size_t, Binding>> match_step(const Rule& rule, std::span<const Formula> premises,
                                                          const Formula& conclusion) {
  for (std::size_t fi = 0; fi < rule.forms().size(); ++fi) {
    const RuleForm& form = rule.forms()[fi];
    if (form.premises.size() != premises.size()) continue;
    Binding b;
    bool ok = match_into(form.conclusion.shape(), conclusion, b);
    for (std::size_t i = 0; ok && i < premises.size(); ++i) ok = match_into(form.premises[i].shape(), premises[i], b);
    if (ok) return std::make_pair(fi, std::move(b));
  }
  return std::nullopt;
}

std::string to_string(RuleKind kind) { return kind == RuleKind::Inference ? "inference" : "replacement"; }

}  // namespace dt
