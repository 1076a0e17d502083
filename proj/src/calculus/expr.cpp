#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "affsym/calculus.hpp"

namespace affsym::calculus {

std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Tan: return "tan";
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

Expr Expr::number(double v) { return Expr(std::make_shared<const Node>(NumberNode{v})); }
Expr Expr::variable(int index, std::string name) {
  return Expr(std::make_shared<const Node>(VariableNode{index, std::move(name)}));
}
Expr Expr::negate(Expr operand) { return Expr(std::make_shared<const Node>(NegateNode{std::move(operand)})); }
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(BinaryNode{op, std::move(lhs), std::move(rhs)}));
}
Expr Expr::power(Expr base, double exponent) {
  return Expr(std::make_shared<const Node>(PowerNode{std::move(base), exponent}));
}
Expr Expr::call(Function f, Expr arg) { return Expr(std::make_shared<const Node>(CallNode{f, std::move(arg)})); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& na = *a.node_;
  const auto& nb = *b.node_;
  if (na.index() != nb.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(nb);
        if constexpr (std::is_same_v<T, NumberNode>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return x.index == y.index && x.name == y.name;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return x.operand == y.operand;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          return x.exponent == y.exponent && x.base == y.base;
        } else {
          return x.function == y.function && x.arg == y.arg;
        }
      },
      na);
}

const ConstantTable& default_constants() {
  static const ConstantTable table{{"pi", std::numbers::pi}};
  return table;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Number:
    case Tok::Ident: return "'" + std::string(t.text) + "'";
    default: return "'" + std::string(t.text) + "'";
  }
}

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      current_ = Token{Tok::End, start, {}};
      return;
    }
    const char c = src_[pos_];
    if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
      lex_number(start);
      return;
    }
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      current_ = Token{Tok::Ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        throw ParseError(start, "expression",
                         "unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(start));
    }
    ++pos_;
    current_ = Token{kind, start, src_.substr(start, 1)};
  }

  void lex_number(std::size_t start) {
    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
      } else {
        throw ParseError(p, "exponent digits", "malformed number exponent at offset " + std::to_string(p));
      }
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double v = 0.0;
    // from_chars rejects a leading '.', strtod does not.
    const std::string owned(text);
    char* end = nullptr;
    v = std::strtod(owned.c_str(), &end);
    if (end != owned.c_str() + owned.size())
      throw ParseError(start, "number", "malformed number at offset " + std::to_string(start));
    current_ = Token{Tok::Number, start, text, v};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_{Tok::End, 0, {}};
};

bool lookup_function(std::string_view name, Function& out) {
  static const std::pair<std::string_view, Function> table[] = {
      {"sin", Function::Sin}, {"cos", Function::Cos}, {"tan", Function::Tan},
      {"exp", Function::Exp}, {"ln", Function::Ln},   {"sqrt", Function::Sqrt},
  };
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> coords, const ConstantTable* constants)
      : lex_(src), coords_(coords), constants_(constants) {}

  Expr parse() {
    Expr e = parse_sum();
    if (lex_.peek().kind != Tok::End) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = lex_.peek();
    throw ParseError(t.offset, expected,
                     "syntax error at offset " + std::to_string(t.offset) + ": expected " + expected +
                         ", found " + describe(t));
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      const Tok k = lex_.peek().kind;
      if (k != Tok::Plus && k != Tok::Minus) return lhs;
      lex_.take();
      Expr rhs = parse_product();
      lhs = Expr::binary(k == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      const Tok k = lex_.peek().kind;
      if (k != Tok::Star && k != Tok::Slash) return lhs;
      lex_.take();
      Expr rhs = parse_unary();
      lhs = Expr::binary(k == Tok::Star ? BinaryOp::Mul : BinaryOp::Div, std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return Expr::negate(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (lex_.peek().kind != Tok::Caret) return base;
    lex_.take();
    return Expr::power(std::move(base), parse_exponent());
  }

  // number ('^' exponent)?, folded right to left; an optional sign is accepted.
  double parse_exponent() {
    double sign = 1.0;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      sign = -1.0;
    }
    if (lex_.peek().kind != Tok::Number) fail("numeric exponent");
    const double v = sign * lex_.take().number;
    if (lex_.peek().kind != Tok::Caret) return v;
    lex_.take();
    return std::pow(v, parse_exponent());
  }

  Expr parse_primary() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Number:
        lex_.take();
        return Expr::number(t.number);
      case Tok::LParen: {
        lex_.take();
        Expr inner = parse_sum();
        if (lex_.peek().kind != Tok::RParen) fail("')'");
        lex_.take();
        return inner;
      }
      case Tok::Ident: {
        lex_.take();
        Function f{};
        if (lex_.peek().kind == Tok::LParen) {
          if (!lookup_function(t.text, f))
            throw ParseError(t.offset, "function name",
                             "unknown function '" + std::string(t.text) + "' at offset " + std::to_string(t.offset));
          lex_.take();
          Expr arg = parse_sum();
          if (lex_.peek().kind != Tok::RParen) fail("')'");
          lex_.take();
          return Expr::call(f, std::move(arg));
        }
        for (std::size_t i = 0; i < coords_.size(); ++i) {
          if (coords_[i] == t.text) return Expr::variable(static_cast<int>(i), std::string(t.text));
        }
        if (constants_) {
          if (auto it = constants_->find(t.text); it != constants_->end()) return Expr::number(it->second);
        }
        if (lookup_function(t.text, f))
          throw ParseError(lex_.peek().offset, "'('",
                           "function '" + std::string(t.text) + "' must be called, expected '(' at offset " +
                               std::to_string(lex_.peek().offset));
        throw UnknownIdentifierError(std::string(t.text), t.offset);
      }
      default:
        fail("number, identifier, '(' or '-'");
    }
  }

  Lexer lex_;
  std::span<const std::string> coords_;
  const ConstantTable* constants_;
};

}  // namespace

Expr parse_expr(std::string_view source, std::span<const std::string> coords, const ConstantTable* constants) {
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError(0, "expression", "empty expression");
  return Parser(source, coords, constants).parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength; higher binds tighter.
int precedence(const Expr& e) {
  const auto& n = e.node();
  if (const auto* b = std::get_if<BinaryNode>(&n))
    return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
  if (std::holds_alternative<NegateNode>(n)) return 3;
  if (std::holds_alternative<PowerNode>(n)) return 4;
  return 5;
}

void format_number(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, end);
}

void print(std::string& out, const Expr& e);

void print_wrapped(std::string& out, const Expr& e, bool wrap) {
  if (wrap) out += '(';
  print(out, e);
  if (wrap) out += ')';
}

void print(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          if (x.value < 0 || std::signbit(x.value)) {
            out += '(';
            format_number(out, x.value);
            out += ')';
          } else {
            format_number(out, x.value);
          }
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          out += '-';
          print_wrapped(out, x.operand, precedence(x.operand) < 3);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const int p = precedence(e);
          print_wrapped(out, x.lhs, precedence(x.lhs) < p);
          switch (x.op) {
            case BinaryOp::Add: out += " + "; break;
            case BinaryOp::Sub: out += " - "; break;
            case BinaryOp::Mul: out += '*'; break;
            case BinaryOp::Div: out += '/'; break;
          }
          // Negation on the right is unambiguous ("a*-b"), anything looser needs parens.
          const int rp = precedence(x.rhs);
          print_wrapped(out, x.rhs, rp <= p && rp != 3);
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          print_wrapped(out, x.base, precedence(x.base) < 5);
          out += '^';
          format_number(out, x.exponent);
        } else {
          out += function_name(x.function);
          out += '(';
          print(out, x.arg);
          out += ')';
        }
      },
      e.node());
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(out, e);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

double pow_checked(double base, double exponent) {
  if (base < 0 && !is_integer(exponent))
    throw DomainError("non-integer power of a negative base");
  if (base == 0 && exponent < 0) throw DomainError("negative power of zero");
  return std::pow(base, exponent);
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> point) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          if (static_cast<std::size_t>(x.index) >= point.size())
            throw Error(ErrorCode::InvalidArgument, "point has too few coordinates for '" + x.name + "'");
          return point[static_cast<std::size_t>(x.index)];
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return -evaluate(x.operand, point);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const double a = evaluate(x.lhs, point);
          const double b = evaluate(x.rhs, point);
          switch (x.op) {
            case BinaryOp::Add: return a + b;
            case BinaryOp::Sub: return a - b;
            case BinaryOp::Mul: return a * b;
            case BinaryOp::Div:
              if (b == 0) throw DomainError("division by zero");
              return a / b;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          return pow_checked(evaluate(x.base, point), x.exponent);
        } else {
          const double a = evaluate(x.arg, point);
          switch (x.function) {
            case Function::Sin: return std::sin(a);
            case Function::Cos: return std::cos(a);
            case Function::Tan:
              if (std::abs(std::cos(a)) < 1e-12) throw DomainError("tan argument at an odd multiple of pi/2");
              return std::tan(a);
            case Function::Exp: return std::exp(a);
            case Function::Ln:
              if (!(a > 0)) throw DomainError("ln of a non-positive argument");
              return std::log(a);
            case Function::Sqrt:
              if (!(a > 0)) throw DomainError("sqrt of a non-positive argument");
              return std::sqrt(a);
          }
          return 0.0;
        }
      },
      e.node());
}

int variable_extent(const Expr& e) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return 0;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return x.index + 1;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return variable_extent(x.operand);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return std::max(variable_extent(x.lhs), variable_extent(x.rhs));
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          return variable_extent(x.base);
        } else {
          return variable_extent(x.arg);
        }
      },
      e.node());
}

Jet eval_jet_on(const Expr& e, std::span<const Jet> coords) {
  if (coords.empty()) throw Error(ErrorCode::InvalidArgument, "eval_jet_on needs at least one coordinate jet");
  const auto& layout = coords.front().layout_ptr();
  return std::visit(
      [&](const auto& x) -> Jet {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return Jet(layout, x.value);
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          if (static_cast<std::size_t>(x.index) >= coords.size())
            throw Error(ErrorCode::InvalidArgument, "point has too few coordinates for '" + x.name + "'");
          return coords[static_cast<std::size_t>(x.index)];
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return -eval_jet_on(x.operand, coords);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          Jet a = eval_jet_on(x.lhs, coords);
          const Jet b = eval_jet_on(x.rhs, coords);
          switch (x.op) {
            case BinaryOp::Add: return a += b;
            case BinaryOp::Sub: return a -= b;
            case BinaryOp::Mul: return a * b;
            case BinaryOp::Div: return a / b;
          }
          return a;
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          return pow(eval_jet_on(x.base, coords), x.exponent);
        } else {
          const Jet a = eval_jet_on(x.arg, coords);
          switch (x.function) {
            case Function::Sin: return sin(a);
            case Function::Cos: return cos(a);
            case Function::Tan: return tan(a);
            case Function::Exp: return exp(a);
            case Function::Ln: return log(a);
            case Function::Sqrt: return sqrt(a);
          }
          return a;
        }
      },
      e.node());
}

Jet eval_jet(const Expr& e, std::span<const double> point, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "jet order must be non-negative");
  if (order > kMaxJetOrder)
    throw Error(ErrorCode::OrderExceeded,
                "jet order " + std::to_string(order) + " exceeds the configured maximum " +
                    std::to_string(kMaxJetOrder));
  if (static_cast<std::size_t>(variable_extent(e)) > point.size())
    throw Error(ErrorCode::InvalidArgument, "point dimension is smaller than the expression's coordinate count");
  const int n = std::max<int>(1, static_cast<int>(point.size()));
  std::vector<Jet> coords;
  coords.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < static_cast<int>(point.size()); ++i)
    coords.push_back(Jet::variable(n, order, i, point[static_cast<std::size_t>(i)]));
  if (coords.empty()) coords.push_back(Jet::constant(1, order, 0.0));
  return eval_jet_on(e, coords);
}

}  // namespace affsym::calculus
