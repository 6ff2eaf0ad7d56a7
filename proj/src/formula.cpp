#include "folsynth/formula.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace folsynth {

namespace {

Formula make_node(FormulaNode node) {
  return std::make_shared<const FormulaNode>(std::move(node));
}

} // namespace

Formula unary_atom(char pred, char var) {
  FormulaNode n;
  n.kind = FormulaKind::UnaryAtom;
  n.pred = pred;
  n.var1 = var;
  return make_node(std::move(n));
}

Formula binary_atom(char pred, char a, char b) {
  FormulaNode n;
  n.kind = FormulaKind::BinaryAtom;
  n.pred = pred;
  n.var1 = a;
  n.var2 = b;
  return make_node(std::move(n));
}

Formula equality(char a, char b) {
  FormulaNode n;
  n.kind = FormulaKind::Equality;
  n.var1 = a;
  n.var2 = b;
  return make_node(std::move(n));
}

Formula negation(Formula f) {
  FormulaNode n;
  n.kind = FormulaKind::Not;
  n.children.push_back(std::move(f));
  return make_node(std::move(n));
}

Formula conjunction(std::vector<Formula> children) {
  assert(children.size() >= 2);
  FormulaNode n;
  n.kind = FormulaKind::And;
  n.children = std::move(children);
  return make_node(std::move(n));
}

Formula disjunction(std::vector<Formula> children) {
  assert(children.size() >= 2);
  FormulaNode n;
  n.kind = FormulaKind::Or;
  n.children = std::move(children);
  return make_node(std::move(n));
}

Formula quantifier(FormulaKind kind, char bound, Formula body) {
  assert(kind == FormulaKind::Forall || kind == FormulaKind::Exists);
  FormulaNode n;
  n.kind = kind;
  n.var1 = bound;
  n.children.push_back(std::move(body));
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum class Type { LParen, RParen, Symbol } type;
  std::string text;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::Type::LParen, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Type::RParen, ")"});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && text[j] != '(' && text[j] != ')' && text[j] != ' ' &&
             text[j] != '\t' && text[j] != '\n' && text[j] != '\r') {
        ++j;
      }
      out.push_back({Token::Type::Symbol, std::string(text.substr(i, j - i))});
      i = j;
    }
  }
  return out;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula run() {
    if (tokens_.empty()) throw ParseError(ParseErrorKind::Syntax, "empty input");
    // x is in scope from the start; binders may not reuse it.
    std::set<char> scope = {kFreeVar};
    Formula f = expr(scope);
    if (pos_ != tokens_.size()) {
      throw ParseError(ParseErrorKind::Syntax, "trailing tokens after formula");
    }
    std::set<char> free = free_variables(f);
    if (free != std::set<char>{kFreeVar}) {
      throw ParseError(ParseErrorKind::FreeVariable,
                       "free variables must be exactly {x}");
    }
    return f;
  }

private:
  const Token& peek() {
    if (pos_ >= tokens_.size()) {
      throw ParseError(ParseErrorKind::Syntax, "unexpected end of input");
    }
    return tokens_[pos_];
  }

  Token take() {
    Token t = peek();
    ++pos_;
    return t;
  }

  char variable(std::set<char>& scope) {
    Token t = take();
    if (t.type != Token::Type::Symbol) {
      throw ParseError(ParseErrorKind::Syntax, "expected a variable");
    }
    if (t.text.size() != 1 || !is_variable(t.text[0])) {
      throw ParseError(ParseErrorKind::UnknownSymbol, "unknown variable '" + t.text + "'");
    }
    (void)scope;
    return t.text[0];
  }

  Formula expr(std::set<char>& scope) {
    if (peek().type != Token::Type::LParen) {
      throw ParseError(ParseErrorKind::Syntax, "formula must be a parenthesized list");
    }
    take();
    Token head = take();
    if (head.type != Token::Type::Symbol) {
      throw ParseError(ParseErrorKind::Syntax, "expected a head symbol after '('");
    }
    Formula result;
    if (head.text.size() == 1 && is_unary_pred(head.text[0])) {
      char v = variable(scope);
      expect_rparen();
      return unary_atom(head.text[0], v);
    }
    if (head.text.size() == 1 && is_binary_pred(head.text[0])) {
      char a = variable(scope);
      char b = variable(scope);
      expect_rparen();
      return binary_atom(head.text[0], a, b);
    }
    if (head.text == "=") {
      char a = variable(scope);
      char b = variable(scope);
      expect_rparen();
      return equality(a, b);
    }
    if (head.text == "not") {
      Formula f = expr(scope);
      expect_rparen();
      return negation(std::move(f));
    }
    if (head.text == "and" || head.text == "or") {
      std::vector<Formula> kids;
      while (peek().type != Token::Type::RParen) {
        kids.push_back(expr(scope));
      }
      take();
      if (kids.size() < 2) {
        throw ParseError(ParseErrorKind::Arity,
                         "'" + head.text + "' requires 2 or more arguments");
      }
      return head.text == "and" ? conjunction(std::move(kids))
                                : disjunction(std::move(kids));
    }
    if (head.text == "forall" || head.text == "exists") {
      Token vt = take();
      if (vt.type != Token::Type::Symbol || vt.text.size() != 1 ||
          !is_variable(vt.text[0])) {
        throw ParseError(ParseErrorKind::UnknownSymbol,
                         "quantifier binder must be one of x,y,z,w");
      }
      char v = vt.text[0];
      if (scope.count(v)) {
        throw ParseError(ParseErrorKind::Shadowing,
                         std::string("quantifier rebinds in-scope variable '") + v + "'");
      }
      scope.insert(v);
      Formula body = expr(scope);
      scope.erase(v);
      expect_rparen();
      return quantifier(head.text == "forall" ? FormulaKind::Forall : FormulaKind::Exists,
                        v, std::move(body));
    }
    throw ParseError(ParseErrorKind::UnknownSymbol, "unknown head '" + head.text + "'");
  }

  void expect_rparen() {
    Token t = take();
    if (t.type != Token::Type::RParen) {
      if (t.type == Token::Type::Symbol) {
        throw ParseError(ParseErrorKind::Arity, "too many arguments");
      }
      throw ParseError(ParseErrorKind::Syntax, "expected ')'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

} // namespace

Formula parse(std::string_view text) { return Parser(tokenize(text)).run(); }

// ---------------------------------------------------------------------------
// Printing and measures

namespace {

void print_into(const Formula& f, std::string& out) {
  out.push_back('(');
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
      out.push_back(f->pred);
      out.push_back(' ');
      out.push_back(f->var1);
      break;
    case FormulaKind::BinaryAtom:
      out.push_back(f->pred);
      out.push_back(' ');
      out.push_back(f->var1);
      out.push_back(' ');
      out.push_back(f->var2);
      break;
    case FormulaKind::Equality:
      out.append("= ");
      out.push_back(f->var1);
      out.push_back(' ');
      out.push_back(f->var2);
      break;
    case FormulaKind::Not:
      out.append("not ");
      print_into(f->children[0], out);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
      out.append(f->kind == FormulaKind::And ? "and" : "or");
      for (const Formula& c : f->children) {
        out.push_back(' ');
        print_into(c, out);
      }
      break;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out.append(f->kind == FormulaKind::Forall ? "forall " : "exists ");
      out.push_back(f->var1);
      out.push_back(' ');
      print_into(f->children[0], out);
      break;
  }
  out.push_back(')');
}

} // namespace

std::string print(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

int ast_size(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
      return 2;
    case FormulaKind::BinaryAtom:
    case FormulaKind::Equality:
      return 3;
    case FormulaKind::Not:
      return 1 + ast_size(f->children[0]);
    case FormulaKind::And:
    case FormulaKind::Or: {
      int total = 1;
      for (const Formula& c : f->children) total += ast_size(c);
      return total;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return 2 + ast_size(f->children[0]);
  }
  return 0;
}

int quantifier_depth(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
    case FormulaKind::BinaryAtom:
    case FormulaKind::Equality:
      return 0;
    case FormulaKind::Not:
      return quantifier_depth(f->children[0]);
    case FormulaKind::And:
    case FormulaKind::Or: {
      int best = 0;
      for (const Formula& c : f->children) best = std::max(best, quantifier_depth(c));
      return best;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return 1 + quantifier_depth(f->children[0]);
  }
  return 0;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::F: return "F";
    case Family::G: return "G";
    case Family::H: return "H";
    case Family::M: return "M";
    case Family::Z: return "Z";
    case Family::Oth: return "oth";
  }
  return "oth";
}

Family family_from_name(std::string_view name) {
  if (name == "A") return Family::A;
  if (name == "B") return Family::B;
  if (name == "C") return Family::C;
  if (name == "D") return Family::D;
  if (name == "F") return Family::F;
  if (name == "G") return Family::G;
  if (name == "H") return Family::H;
  if (name == "M") return Family::M;
  if (name == "Z") return Family::Z;
  return Family::Oth;
}

// ---------------------------------------------------------------------------
// Family classification
//
// The patterns below are the structural shapes of the family table:
//   A  forall v1 (or (not BIN(x,v1)) (exists v2 BIN'(v1,v2)))
//   B  exists v1 (and U(v1)        (forall v2 <guarded, non-Z consequent>))
//   C  exists v1 (and (not U(v1))  (forall v2 <guarded, non-Z consequent>))
//   D  forall v1 (or (not BIN(x,v1)) (exists v2 (and BIN' U(v2))))
//   F  forall v1 (or (not BIN(x,v1)) (exists v2 (and BIN' (not U(v2)))))
//   G  exists v1 (forall v2 ...)            -- no guard conjunction
//   H  exists v1 [... exists v2 ...]        -- two existentials, no universal
//   M  forall v1 (or (not BIN(x,v1)) (exists v2 (and BIN'(v1,v2) BIN''(x,v2))))
//   Z  exists v1 (and U(v1) (forall v2 (or (not BIN(v1,v2)) (and BIN'(x,v2) U'(v2)))))
// Binary-atom argument orientation is not constrained beyond the variable
// sets named above, so the expansion's reordered variants stay classified.

namespace {

bool is_binary_over(const Formula& f, char a, char b) {
  if (f->kind != FormulaKind::BinaryAtom) return false;
  return (f->var1 == a && f->var2 == b) || (f->var1 == b && f->var2 == a);
}

bool is_binary_mentioning(const Formula& f, char v) {
  return f->kind == FormulaKind::BinaryAtom && (f->var1 == v || f->var2 == v);
}

bool is_positive_unary_on(const Formula& f, char v) {
  return f->kind == FormulaKind::UnaryAtom && f->var1 == v;
}

bool is_negated_unary_on(const Formula& f, char v) {
  return f->kind == FormulaKind::Not && is_positive_unary_on(f->children[0], v);
}

// (or (not <binary over {x,v1}>) <conseq>) -> conseq, or nullptr.
Formula guarded_universal_consequent(const Formula& body, char v1) {
  if (body->kind != FormulaKind::Or || body->children.size() != 2) return nullptr;
  const Formula& guard = body->children[0];
  if (guard->kind != FormulaKind::Not) return nullptr;
  if (!is_binary_over(guard->children[0], kFreeVar, v1)) return nullptr;
  return body->children[1];
}

// A / D / F / M share the forall-guard skeleton and differ by the exists body.
Family classify_forall_guarded(const Formula& f) {
  char v1 = f->var1;
  Formula conseq = guarded_universal_consequent(f->body(), v1);
  if (!conseq) return Family::Oth;
  if (conseq->kind != FormulaKind::Exists) return Family::Oth;
  char v2 = conseq->var1;
  const Formula& inner = conseq->body();
  if (inner->kind == FormulaKind::BinaryAtom && is_binary_mentioning(inner, v2)) {
    return Family::A;
  }
  if (inner->kind == FormulaKind::And && inner->children.size() == 2) {
    const Formula& first = inner->children[0];
    const Formula& second = inner->children[1];
    if (first->kind != FormulaKind::BinaryAtom || !is_binary_mentioning(first, v2)) {
      return Family::Oth;
    }
    if (second->kind == FormulaKind::BinaryAtom && is_binary_mentioning(second, v2) &&
        is_binary_mentioning(second, kFreeVar) && is_binary_mentioning(first, v1)) {
      return Family::M;
    }
    if (is_positive_unary_on(second, v2)) return Family::D;
    if (is_negated_unary_on(second, v2)) return Family::F;
  }
  return Family::Oth;
}

// Z consequent: (and BIN(x,v2) U(v2)) in either conjunct order.
bool is_z_consequent(const Formula& conseq, char v2) {
  if (conseq->kind != FormulaKind::And || conseq->children.size() != 2) return false;
  const Formula& a = conseq->children[0];
  const Formula& b = conseq->children[1];
  auto bin_x = [&](const Formula& g) {
    return g->kind == FormulaKind::BinaryAtom && is_binary_mentioning(g, kFreeVar) &&
           is_binary_mentioning(g, v2);
  };
  return (bin_x(a) && is_positive_unary_on(b, v2)) ||
         (bin_x(b) && is_positive_unary_on(a, v2));
}

bool is_z_shape(const Formula& f) {
  if (f->kind != FormulaKind::Exists) return false;
  char v1 = f->var1;
  const Formula& body = f->body();
  if (body->kind != FormulaKind::And || body->children.size() != 2) return false;
  const Formula& guard = body->children[0];
  const Formula& rest = body->children[1];
  if (!is_positive_unary_on(guard, v1)) return false;
  if (rest->kind != FormulaKind::Forall) return false;
  char v2 = rest->var1;
  const Formula& inner = rest->body();
  if (inner->kind != FormulaKind::Or || inner->children.size() != 2) return false;
  const Formula& ig = inner->children[0];
  if (ig->kind != FormulaKind::Not || !is_binary_mentioning(ig->children[0], v1) ||
      !is_binary_mentioning(ig->children[0], v2)) {
    return false;
  }
  return is_z_consequent(inner->children[1], v2);
}

// B / C: guarded exists-forall. The Z shape is carved out so that it is
// still reachable behind B in the fixed matching order.
Family classify_exists_guarded(const Formula& f) {
  char v1 = f->var1;
  const Formula& body = f->body();
  if (body->kind != FormulaKind::And || body->children.size() != 2) return Family::Oth;
  const Formula& guard = body->children[0];
  const Formula& rest = body->children[1];
  if (rest->kind != FormulaKind::Forall) return Family::Oth;
  if (is_positive_unary_on(guard, v1)) {
    return is_z_shape(f) ? Family::Oth : Family::B;
  }
  if (is_negated_unary_on(guard, v1)) return Family::C;
  return Family::Oth;
}

bool contains_universal(const Formula& f) {
  if (f->kind == FormulaKind::Forall) return true;
  for (const Formula& c : f->children) {
    if (contains_universal(c)) return true;
  }
  return false;
}

int count_existentials(const Formula& f) {
  int n = f->kind == FormulaKind::Exists ? 1 : 0;
  for (const Formula& c : f->children) n += count_existentials(c);
  return n;
}

bool has_nested_exists(const Formula& f) {
  if (f->kind != FormulaKind::Exists) return false;
  const Formula& body = f->body();
  if (body->kind == FormulaKind::Exists) return true;
  if (body->kind == FormulaKind::And || body->kind == FormulaKind::Not) {
    for (const Formula& c : body->children) {
      if (c->kind == FormulaKind::Exists) return true;
    }
  }
  return false;
}

} // namespace

Family classify_family(const Formula& f) {
  // The forall-rooted shapes (A,D,F,M) and the exists-rooted shapes
  // (B,C,G,H,Z) are mutually exclusive by construction, so probing each
  // group once realizes the fixed A,B,C,D,F,G,H,M,Z order.
  if (f->kind == FormulaKind::Forall) {
    return classify_forall_guarded(f);
  }
  if (f->kind == FormulaKind::Exists) {
    Family bc = classify_exists_guarded(f);
    if (bc != Family::Oth) return bc;
    if (f->body()->kind == FormulaKind::Forall) return Family::G;
    if (has_nested_exists(f) && !contains_universal(f) && count_existentials(f) == 2) {
      return Family::H;
    }
    if (is_z_shape(f)) return Family::Z;
  }
  return Family::Oth;
}

bool is_lift_hard(const Formula& f) {
  struct Walker {
    static bool walk(const Formula& g, bool under_forall) {
      if (g->kind == FormulaKind::BinaryAtom) {
        return under_forall && (g->var1 == kFreeVar || g->var2 == kFreeVar);
      }
      bool next = under_forall || g->kind == FormulaKind::Forall;
      for (const Formula& c : g->children) {
        if (walk(c, next)) return true;
      }
      return false;
    }
  };
  return Walker::walk(f, false);
}

std::vector<Formula> proper_subformulas(const Formula& f) {
  std::vector<Formula> out;
  struct Collect {
    static void run(const Formula& g, std::vector<Formula>& acc) {
      for (const Formula& c : g->children) {
        acc.push_back(c);
        run(c, acc);
      }
    }
  };
  Collect::run(f, out);
  return out;
}

namespace {

void free_vars_into(const Formula& f, std::set<char>& bound, std::set<char>& out) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
      if (!bound.count(f->var1)) out.insert(f->var1);
      break;
    case FormulaKind::BinaryAtom:
    case FormulaKind::Equality:
      if (!bound.count(f->var1)) out.insert(f->var1);
      if (!bound.count(f->var2)) out.insert(f->var2);
      break;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
      for (const Formula& c : f->children) free_vars_into(c, bound, out);
      break;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      bool inserted = bound.insert(f->var1).second;
      free_vars_into(f->children[0], bound, out);
      if (inserted) bound.erase(f->var1);
      break;
    }
  }
}

} // namespace

std::set<char> free_variables(const Formula& f) {
  std::set<char> bound, out;
  free_vars_into(f, bound, out);
  return out;
}

bool uses_equality(const Formula& f) {
  if (f->kind == FormulaKind::Equality) return true;
  for (const Formula& c : f->children) {
    if (uses_equality(c)) return true;
  }
  return false;
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->pred != b->pred || a->var1 != b->var1 ||
      a->var2 != b->var2 || a->children.size() != b->children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

} // namespace folsynth
