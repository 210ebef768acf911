#include "banach/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

#include "banach/error.hpp"

namespace banach {

namespace {

constexpr std::array<std::string_view, 6> kFunctions{"abs", "conj", "exp", "log", "re", "im"};
constexpr std::array<std::string_view, 3> kConstants{"i", "pi", "e"};
constexpr std::array<std::string_view, 4> kVariables{"x", "y", "z", "theta"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view word) {
  for (auto s : set)
    if (s == word) return true;
  return false;
}

struct Token {
  enum class Kind { Number, Word, Symbol, End };
  Kind kind = Kind::End;
  std::string_view text;
  double number = 0.0;
  std::size_t offset = 0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

[[noreturn]] void syntax_error(std::size_t offset, std::vector<std::string> expected, const std::string& found) {
  fail(ErrorKind::SyntaxError, "unexpected " + found + " at offset " + std::to_string(offset),
       {{"offset", offset}, {"expected", expected}});
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
      continue;
    }
    Token tok;
    tok.offset = pos;
    if (is_digit(c) || (c == '.' && pos + 1 < text.size() && is_digit(text[pos + 1]))) {
      std::size_t end = pos;
      while (end < text.size() && (is_digit(text[end]) || text[end] == '.')) ++end;
      if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
        std::size_t exp = end + 1;
        if (exp < text.size() && (text[exp] == '+' || text[exp] == '-')) ++exp;
        if (exp < text.size() && is_digit(text[exp])) {
          end = exp;
          while (end < text.size() && is_digit(text[end])) ++end;
        }
      }
      tok.kind = Token::Kind::Number;
      tok.text = text.substr(pos, end - pos);
      const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || !std::isfinite(tok.number))
        syntax_error(pos, {"number"}, "malformed number '" + std::string(tok.text) + "'");
      pos = end;
    } else if (is_alpha(c)) {
      std::size_t end = pos;
      while (end < text.size() && (is_alpha(text[end]) || is_digit(text[end]))) ++end;
      tok.kind = Token::Kind::Word;
      tok.text = text.substr(pos, end - pos);
      pos = end;
    } else if (std::string_view("+-*/^()|").find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::Symbol;
      tok.text = text.substr(pos, 1);
      ++pos;
    } else {
      syntax_error(pos, {"number", "identifier", "operator"}, std::string("character '") + c + "'");
    }
    out.push_back(tok);
  }
  Token end;
  end.offset = text.size();
  out.push_back(end);
  return out;
}

std::string describe(const Token& tok) {
  return tok.kind == Token::Kind::End ? std::string("end of input") : "'" + std::string(tok.text) + "'";
}

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

int infix_power(std::string_view op) {
  if (op == "+" || op == "-") return 10;
  if (op == "*" || op == "/") return 20;
  if (op == "^") return 40;
  return 0;
}

constexpr int kUnaryPower = 30;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ExprPtr parse_all() {
    ExprPtr e = parse(0);
    if (peek().kind != Token::Kind::End) syntax_error(peek().offset, {"operator", "end of input"}, describe(peek()));
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  bool at_symbol(std::string_view s) const { return peek().kind == Token::Kind::Symbol && peek().text == s; }

  void expect(std::string_view s) {
    if (!at_symbol(s)) syntax_error(peek().offset, {std::string(s)}, describe(peek()));
    ++pos_;
  }

  ExprPtr parse(int min_power) {
    ExprPtr left = prefix();
    for (;;) {
      const Token& tok = peek();
      if (tok.kind != Token::Kind::Symbol) break;
      const int power = infix_power(tok.text);
      if (power == 0 || power <= min_power) break;
      next();
      // ^ is right-associative
      const int right_power = tok.text == "^" ? power - 1 : power;
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = std::string(tok.text);
      e.offset = tok.offset;
      e.lhs = left;
      e.rhs = parse(right_power);
      left = node(std::move(e));
    }
    return left;
  }

  ExprPtr prefix() {
    static const std::vector<std::string> kOperand{"number", "identifier", "(", "|", "-"};
    const Token tok = next();
    Expr e;
    e.offset = tok.offset;
    switch (tok.kind) {
      case Token::Kind::Number:
        e.kind = Expr::Kind::Number;
        e.number = tok.number;
        return node(std::move(e));
      case Token::Kind::Word: {
        e.name = std::string(tok.text);
        if (contains(kConstants, tok.text)) {
          e.kind = Expr::Kind::Constant;
          return node(std::move(e));
        }
        if (contains(kVariables, tok.text)) {
          e.kind = Expr::Kind::Variable;
          return node(std::move(e));
        }
        if (contains(kFunctions, tok.text)) {
          e.kind = Expr::Kind::Unary;
          expect("(");
          e.lhs = parse(0);
          expect(")");
          return node(std::move(e));
        }
        syntax_error(tok.offset, kOperand, "unknown name '" + e.name + "'");
      }
      case Token::Kind::Symbol:
        if (tok.text == "(") {
          ExprPtr inner = parse(0);
          expect(")");
          return inner;
        }
        if (tok.text == "|") {
          e.kind = Expr::Kind::Unary;
          e.name = "abs";
          e.lhs = parse(0);
          expect("|");
          return node(std::move(e));
        }
        if (tok.text == "-") {
          e.kind = Expr::Kind::Unary;
          e.name = "neg";
          e.lhs = parse(kUnaryPower);
          return node(std::move(e));
        }
        break;
      case Token::Kind::End:
        break;
    }
    syntax_error(tok.offset, kOperand, describe(tok));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// Printing precedence: sums 1, products 2, negation 3, powers 4, atoms 5.
int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::Binary) {
    if (e.name == "+" || e.name == "-") return 1;
    if (e.name == "*" || e.name == "/") return 2;
    return 4;
  }
  if (e.kind == Expr::Kind::Unary && e.name == "neg") return 3;
  return 5;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void render(const Expr& e, std::string& out);

void render_child(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  render(e, out);
  if (parens) out += ')';
}

void render(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Number:
      out += format_number(e.number);
      return;
    case Expr::Kind::Constant:
    case Expr::Kind::Variable:
      out += e.name;
      return;
    case Expr::Kind::Unary:
      if (e.name == "neg") {
        out += '-';
        render_child(*e.lhs, precedence(*e.lhs) < 3, out);
      } else {
        out += e.name;
        render_child(*e.lhs, true, out);
      }
      return;
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      if (p == 4) {
        render_child(*e.lhs, precedence(*e.lhs) <= 4, out);
        out += '^';
        render_child(*e.rhs, precedence(*e.rhs) < 3, out);
        return;
      }
      render_child(*e.lhs, precedence(*e.lhs) < p, out);
      out += ' ';
      out += e.name;
      out += ' ';
      render_child(*e.rhs, precedence(*e.rhs) <= p, out);
      return;
    }
  }
}

[[noreturn]] void domain_error(const Expr& e, const std::string& what) {
  fail(ErrorKind::DomainError, what + " at offset " + std::to_string(e.offset), {{"offset", e.offset}});
}

Scalar integer_power(Scalar base, long k) {
  Scalar result = 1.0;
  const bool invert = k < 0;
  unsigned long m = static_cast<unsigned long>(invert ? -k : k);
  while (m) {
    if (m & 1u) result *= base;
    base *= base;
    m >>= 1u;
  }
  return invert ? 1.0 / result : result;
}

}  // namespace

bool Expr::operator==(const Expr& other) const {
  if (kind != other.kind || name != other.name) return false;
  if (kind == Kind::Number) return number == other.number;
  auto same = [](const ExprPtr& a, const ExprPtr& b) { return (!a && !b) || (a && b && *a == *b); };
  return same(lhs, other.lhs) && same(rhs, other.rhs);
}

ExprPtr parse_expr(std::string_view text) { return Parser(tokenize(text)).parse_all(); }

std::string to_string(const Expr& expr) {
  std::string out;
  render(expr, out);
  return out;
}

Scalar evaluate(const Expr& e, const EvalPoint& p) {
  Scalar v;
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.number;
    case Expr::Kind::Constant:
      if (e.name == "i") return {0.0, 1.0};
      if (e.name == "pi") return std::numbers::pi;
      return std::numbers::e;
    case Expr::Kind::Variable:
      if (e.name == "x") return p.z.real();
      if (e.name == "y") return p.z.imag();
      if (e.name == "z") return p.z;
      return p.theta;
    case Expr::Kind::Unary: {
      const Scalar a = evaluate(*e.lhs, p);
      if (e.name == "neg") v = -a;
      else if (e.name == "abs") v = std::abs(a);
      else if (e.name == "conj") v = std::conj(a);
      else if (e.name == "exp") v = std::exp(a);
      else if (e.name == "re") v = a.real();
      else if (e.name == "im") v = a.imag();
      else {
        if (a == Scalar(0.0)) domain_error(e, "log of zero");
        v = std::log(a);
      }
      break;
    }
    case Expr::Kind::Binary: {
      const Scalar a = evaluate(*e.lhs, p), b = evaluate(*e.rhs, p);
      if (e.name == "+") v = a + b;
      else if (e.name == "-") v = a - b;
      else if (e.name == "*") v = a * b;
      else if (e.name == "/") {
        if (b == Scalar(0.0)) domain_error(e, "division by zero");
        v = a / b;
      } else {
        const double k = std::round(b.real());
        if (b.imag() != 0.0 || std::abs(b.real() - k) > 1e-12 || std::abs(k) > 1e6)
          domain_error(e, "exponent is not an integer");
        if (a == Scalar(0.0) && k < 0) domain_error(e, "zero to a negative power");
        v = integer_power(a, static_cast<long>(k));
      }
      break;
    }
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) domain_error(e, "non-finite value");
  return v;
}

Element evaluate(const Expr& expr, const Instance& owner) {
  std::vector<Scalar> values(owner->size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    EvalPoint p;
    p.z = owner->position(k);
    p.theta = owner->kind() == AlgebraKind::Circle ? owner->angle(k) : std::arg(p.z);
    values[k] = evaluate(expr, p);
    if (owner->is_real()) {
      if (std::abs(values[k].imag()) > 1e-12 * (1.0 + std::abs(values[k].real())))
        fail(ErrorKind::FieldMismatch, "expression is not real-valued on a real instance",
             {{"point", k}, {"imag", values[k].imag()}});
      values[k] = values[k].real();
    }
  }
  return Element(owner, std::move(values));
}

}  // namespace banach
