#include "dt/formula.hpp"

#include <cctype>
#include <unordered_set>

namespace dt {

struct Formula::Node {
  Connective kind = Connective::Atom;
  char name = 0;
  std::vector<Formula> children;
  std::string text;
  std::size_t size = 1;
  std::size_t hash = 0;
};

namespace {

int precedence(Connective c) {
  switch (c) {
    case Connective::Implies: return 1;
    case Connective::Or: return 2;
    case Connective::And: return 3;
    case Connective::Not: return 4;
    case Connective::Atom: return 5;
  }
  return 0;
}

const char* symbol(Connective c) {
  switch (c) {
    case Connective::Not: return "¬";
    case Connective::And: return "∧";
    case Connective::Or: return "∨";
    case Connective::Implies: return "⇒";
    case Connective::Atom: break;
  }
  return "";
}

void append_child(std::string& out, const Formula& child, bool parens) {
  if (parens) out += '(';
  out += child.text();
  if (parens) out += ')';
}

}  // namespace

Formula Formula::atom(char name) {
  if (name < 'A' || name > 'Z') throw std::invalid_argument("atom names are single uppercase letters");
  auto node = std::make_shared<Node>();
  node->name = name;
  node->text = std::string(1, name);
  node->hash = std::hash<std::string>{}(node->text);
  return Formula(std::move(node));
}

Formula Formula::variable(char name) {
  if (name < 'a' || name > 'z') throw std::invalid_argument("metavariables are single lowercase letters");
  auto node = std::make_shared<Node>();
  node->name = name;
  node->text = std::string(1, name);
  node->hash = std::hash<std::string>{}(node->text);
  return Formula(std::move(node));
}

Formula Formula::negation(Formula operand) {
  auto node = std::make_shared<Node>();
  node->kind = Connective::Not;
  node->text = symbol(Connective::Not);
  append_child(node->text, operand, precedence(operand.kind()) < precedence(Connective::Not));
  node->size = 1 + operand.size();
  node->children.push_back(std::move(operand));
  node->hash = std::hash<std::string>{}(node->text);
  return Formula(std::move(node));
}

Formula Formula::binary(Connective op, Formula left, Formula right) {
  if (op == Connective::Atom || op == Connective::Not) throw std::invalid_argument("not a binary connective");
  auto node = std::make_shared<Node>();
  node->kind = op;
  const int p = precedence(op);
  // ∧ and ∨ associate left, ⇒ associates right.
  const bool left_parens = op == Connective::Implies ? precedence(left.kind()) <= p : precedence(left.kind()) < p;
  const bool right_parens = op == Connective::Implies ? precedence(right.kind()) < p : precedence(right.kind()) <= p;
  append_child(node->text, left, left_parens);
  node->text += symbol(op);
  append_child(node->text, right, right_parens);
  node->size = 1 + left.size() + right.size();
  node->children.push_back(std::move(left));
  node->children.push_back(std::move(right));
  node->hash = std::hash<std::string>{}(node->text);
  return Formula(std::move(node));
}

Formula Formula::conjunction(Formula left, Formula right) {
  return binary(Connective::And, std::move(left), std::move(right));
}
Formula Formula::disjunction(Formula left, Formula right) {
  return binary(Connective::Or, std::move(left), std::move(right));
}
Formula Formula::implication(Formula left, Formula right) {
  return binary(Connective::Implies, std::move(left), std::move(right));
}

Connective Formula::kind() const noexcept { return node_->kind; }

bool Formula::is_binary() const noexcept {
  return node_->kind == Connective::And || node_->kind == Connective::Or || node_->kind == Connective::Implies;
}

char Formula::name() const {
  if (node_->kind != Connective::Atom) throw std::logic_error("name() on a compound formula");
  return node_->name;
}

bool Formula::is_variable() const noexcept {
  return node_->kind == Connective::Atom && node_->name >= 'a' && node_->name <= 'z';
}

const Formula& Formula::operand() const {
  if (node_->kind != Connective::Not) throw std::logic_error("operand() on a non-negation");
  return node_->children[0];
}

const Formula& Formula::left() const {
  if (!is_binary()) throw std::logic_error("left() on a non-binary formula");
  return node_->children[0];
}

const Formula& Formula::right() const {
  if (!is_binary()) throw std::logic_error("right() on a non-binary formula");
  return node_->children[1];
}

const std::string& Formula::text() const noexcept { return node_->text; }
std::size_t Formula::size() const noexcept { return node_->size; }
std::size_t Formula::hash() const noexcept { return node_->hash; }

bool operator==(const Formula& a, const Formula& b) noexcept {
  return a.node_ == b.node_ || (a.node_->hash == b.node_->hash && a.node_->text == b.node_->text);
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  // std::string compares as unsigned char, so UTF-8 byte order is codepoint order.
  const int c = a.node_->text.compare(b.node_->text);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::strong_ordering compare(const Formula& a, const Formula& b) noexcept { return a <=> b; }

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::unordered_set<Formula> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second) continue;
    out.push_back(g);
    if (g.kind() == Connective::Not) {
      stack.push_back(g.operand());
    } else if (g.is_binary()) {
      stack.push_back(g.right());
      stack.push_back(g.left());
    }
  }
  return out;
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

namespace {

enum class Tok { Letter, Not, And, Or, Implies, LParen, RParen, End };

struct Token {
  Tok type;
  char letter = 0;
  std::size_t offset = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view lit) { return s.substr(i, lit.size()) == lit; };
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t at = i;
    if (std::isalpha(c)) {
      out.push_back({Tok::Letter, static_cast<char>(c), at});
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::LParen, 0, at});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, 0, at});
      ++i;
    } else if (c == '~' || c == '!') {
      out.push_back({Tok::Not, 0, at});
      ++i;
    } else if (c == '&') {
      out.push_back({Tok::And, 0, at});
      ++i;
    } else if (c == '|') {
      out.push_back({Tok::Or, 0, at});
      ++i;
    } else if (starts("->")) {
      out.push_back({Tok::Implies, 0, at});
      i += 2;
    } else if (starts("¬")) {
      out.push_back({Tok::Not, 0, at});
      i += std::string_view("¬").size();
    } else if (starts("∧")) {
      out.push_back({Tok::And, 0, at});
      i += std::string_view("∧").size();
    } else if (starts("∨")) {
      out.push_back({Tok::Or, 0, at});
      i += std::string_view("∨").size();
    } else if (starts("⇒")) {
      out.push_back({Tok::Implies, 0, at});
      i += std::string_view("⇒").size();
    } else if (starts("→")) {
      out.push_back({Tok::Implies, 0, at});
      i += std::string_view("→").size();
    } else {
      throw ParseError("unexpected character", at);
    }
  }
  out.push_back({Tok::End, 0, s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, bool pattern) : tokens_(tokenize(text)), pattern_(pattern) {}

  Formula run() {
    if (tokens_.size() == 1) throw ParseError("empty formula", 0);
    Formula f = implication();
    if (peek().type != Tok::End) throw ParseError("unexpected token", peek().offset);
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().type == Tok::Implies) {
      next();
      return Formula::implication(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (peek().type == Tok::Or) {
      next();
      lhs = Formula::disjunction(std::move(lhs), conjunction());
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (peek().type == Tok::And) {
      next();
      lhs = Formula::conjunction(std::move(lhs), unary());
    }
    return lhs;
  }

  Formula unary() {
    const Token& t = next();
    switch (t.type) {
      case Tok::Not:
        return Formula::negation(unary());
      case Tok::LParen: {
        Formula inner = implication();
        if (peek().type != Tok::RParen) throw ParseError("expected ')'", peek().offset);
        next();
        return inner;
      }
      case Tok::Letter:
        if (pattern_) {
          if (t.letter < 'a' || t.letter > 'z') throw ParseError("pattern metavariables are lowercase", t.offset);
          return Formula::variable(t.letter);
        }
        if (t.letter < 'A' || t.letter > 'Z') throw ParseError("atoms are single uppercase letters", t.offset);
        return Formula::atom(t.letter);
      case Tok::End:
        throw ParseError("unexpected end of input", t.offset);
      default:
        throw ParseError("expected a proposition", t.offset);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool pattern_;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text, false).run(); }

Formula parse_pattern_text(std::string_view text) { return Parser(text, true).run(); }

}  // namespace dt
