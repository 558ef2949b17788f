#include "tsg/rhs_expr.hpp"

#include "tsg/error.hpp"
#include "tsg/number_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace tsg {

bool operator==(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.number != b.number || a.name != b.name || a.slot != b.slot ||
      a.args.size() != b.args.size())
    return false;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!(*a.args[k] == *b.args[k]))
      return false;
  return true;
}

bool operator==(const RhsExpr& a, const RhsExpr& b) {
  if (a.vars_ != b.vars_ || a.components_.size() != b.components_.size())
    return false;
  for (std::size_t k = 0; k < a.components_.size(); ++k)
    if (!(*a.components_[k] == *b.components_[k]))
      return false;
  return true;
}

std::vector<std::string> rhs_vars(std::size_t dim) {
  std::vector<std::string> vars{"x", "y"};
  for (std::size_t k = 1; k <= dim; ++k)
    vars.push_back("z" + std::to_string(k));
  return vars;
}

namespace {

struct FunctionInfo {
  std::string_view name;
  std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", 1}, {"cos", 1}, {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"abs", 1}, {"min", 2}, {"max", 2},
};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name)
      return &f;
  return nullptr;
}

ExprPtr make(ExprNode::Kind kind, std::vector<ExprPtr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

// Recursive descent over the grammar
//
//   rhs     = "[" expr { "," expr } "]" | expr
//   expr    = term { ("+" | "-") term }
//   term    = unary { ("*" | "/") unary }
//   unary   = ("-" | "+") unary | power
//   power   = primary [ "^" unary ]
//   primary = number | ident [ "(" expr { "," expr } ")" ] | "(" expr ")"
class Parser {
public:
  Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

  std::vector<ExprPtr> parse_rhs() {
    std::vector<ExprPtr> out;
    skip_ws();
    if (peek() == '[') {
      ++pos_;
      out.push_back(parse_expr());
      while (accept(','))
        out.push_back(parse_expr());
      expect(']');
    } else {
      out.push_back(parse_expr());
    }
    skip_ws();
    if (pos_ != src_.size())
      fail({"operator", "end of input"});
    return out;
  }

private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      fail({std::string(1, c)});
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string msg = "syntax error at offset " + std::to_string(pos_) + ": expected ";
    for (std::size_t k = 0; k < expected.size(); ++k)
      msg += (k ? " or " : "") + ("'" + expected[k] + "'");
    if (pos_ < src_.size())
      msg += ", found '" + std::string(1, src_[pos_]) + "'";
    else
      msg += ", found end of input";
    throw ParseError(pos_, std::move(expected), msg);
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = make(ExprNode::Kind::Add, {lhs, parse_term()});
      else if (accept('-'))
        lhs = make(ExprNode::Kind::Sub, {lhs, parse_term()});
      else
        return lhs;
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = make(ExprNode::Kind::Mul, {lhs, parse_unary()});
      else if (accept('/'))
        lhs = make(ExprNode::Kind::Div, {lhs, parse_unary()});
      else
        return lhs;
    }
  }

  ExprPtr parse_unary() {
    if (accept('-'))
      return make(ExprNode::Kind::Neg, {parse_unary()});
    if (accept('+'))
      return parse_unary();
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^'))
      return make(ExprNode::Kind::Pow, {base, parse_unary()});
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    if (accept('(')) {
      ExprPtr inner = parse_expr();
      expect(')');
      return inner;
    }
    fail({"number", "identifier", "("});
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')
      ++pos_;
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_++;
      if (peek() == '+' || peek() == '-')
        ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        pos_ = save;
      while (std::isdigit(static_cast<unsigned char>(peek())))
        ++pos_;
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{} || end != src_.data() + pos_) {
      pos_ = start;
      fail({"number"});
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Number;
    n->number = value;
    return n;
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
      ++pos_;
    const std::string name(src_.substr(start, pos_ - start));

    skip_ws();
    if (peek() == '(') {
      const FunctionInfo* fn = find_function(name);
      if (!fn)
        throw ParseError(start, {}, "unknown function '" + name + "' at offset " + std::to_string(start));
      ++pos_;
      std::vector<ExprPtr> args{parse_expr()};
      while (args.size() < fn->arity) {
        expect(',');
        args.push_back(parse_expr());
      }
      expect(')');
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Call;
      n->name = name;
      n->args = std::move(args);
      return n;
    }

    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) {
      std::string declared;
      for (const auto& v : vars_)
        declared += (declared.empty() ? "" : ", ") + v;
      throw ParseError(start, {}, "unknown identifier '" + name + "' at offset " + std::to_string(start) +
                                      " (declared: " + declared + ")");
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = name;
    n->slot = std::size_t(it - vars_.begin());
    return n;
  }

  std::string_view src_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

struct Evaluator {
  std::span<const double> values;
  const std::vector<std::string>& vars;

  [[noreturn]] void domain_error(const std::string& what) const {
    std::string msg = what + " with bindings {";
    for (std::size_t k = 0; k < vars.size(); ++k)
      msg += (k ? ", " : "") + vars[k] + "=" + format_double(values[k]);
    throw EvalError(msg + "}");
  }

  double operator()(const ExprNode& n) const {
    using K = ExprNode::Kind;
    switch (n.kind) {
    case K::Number:
      return n.number;
    case K::Variable:
      return values[n.slot];
    case K::Neg:
      return -(*this)(*n.args[0]);
    case K::Add:
      return (*this)(*n.args[0]) + (*this)(*n.args[1]);
    case K::Sub:
      return (*this)(*n.args[0]) - (*this)(*n.args[1]);
    case K::Mul:
      return (*this)(*n.args[0]) * (*this)(*n.args[1]);
    case K::Div: {
      const double num = (*this)(*n.args[0]);
      const double den = (*this)(*n.args[1]);
      if (den == 0.0)
        domain_error("division by zero");
      return num / den;
    }
    case K::Pow: {
      const double r = std::pow((*this)(*n.args[0]), (*this)(*n.args[1]));
      if (std::isnan(r))
        domain_error("power of a negative base with non-integer exponent");
      return r;
    }
    case K::Call:
      return call(n);
    }
    return 0.0;
  }

  double call(const ExprNode& n) const {
    const double a = (*this)(*n.args[0]);
    if (n.name == "sin")
      return std::sin(a);
    if (n.name == "cos")
      return std::cos(a);
    if (n.name == "exp")
      return std::exp(a);
    if (n.name == "abs")
      return std::abs(a);
    if (n.name == "log") {
      if (!(a > 0.0))
        domain_error("log of nonpositive argument " + format_double(a));
      return std::log(a);
    }
    if (n.name == "sqrt") {
      if (a < 0.0)
        domain_error("sqrt of negative argument " + format_double(a));
      return std::sqrt(a);
    }
    const double b = (*this)(*n.args[1]);
    return n.name == "min" ? std::min(a, b) : std::max(a, b);
  }
};

std::string print(const ExprNode& n) {
  using K = ExprNode::Kind;
  const auto bin = [&](const char* op) {
    return "(" + print(*n.args[0]) + " " + op + " " + print(*n.args[1]) + ")";
  };
  switch (n.kind) {
  case K::Number:
    return format_double(n.number);
  case K::Variable:
    return n.name;
  case K::Neg:
    return "(-" + print(*n.args[0]) + ")";
  case K::Add:
    return bin("+");
  case K::Sub:
    return bin("-");
  case K::Mul:
    return bin("*");
  case K::Div:
    return bin("/");
  case K::Pow:
    return bin("^");
  case K::Call: {
    std::string out = n.name + "(";
    for (std::size_t k = 0; k < n.args.size(); ++k)
      out += (k ? ", " : "") + print(*n.args[k]);
    return out + ")";
  }
  }
  return {};
}

void collect_vars(const ExprNode& n, std::set<std::size_t>& slots) {
  if (n.kind == ExprNode::Kind::Variable)
    slots.insert(n.slot);
  for (const auto& a : n.args)
    collect_vars(*a, slots);
}

} // namespace

RhsExpr RhsExpr::parse(std::string_view src, std::vector<std::string> vars) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError(0, {"expression"}, "empty expression");
  RhsExpr e;
  e.vars_ = std::move(vars);
  e.source_ = std::string(src);
  e.components_ = Parser(src, e.vars_).parse_rhs();
  return e;
}

std::vector<std::string> RhsExpr::free_vars() const {
  std::set<std::size_t> slots;
  for (const auto& c : components_)
    collect_vars(*c, slots);
  std::vector<std::string> out;
  for (auto s : slots)
    out.push_back(vars_[s]);
  return out;
}

void RhsExpr::eval(std::span<const double> values, std::span<double> out) const {
  if (values.size() < vars_.size())
    throw EvalError("expected " + std::to_string(vars_.size()) + " variable values, got " +
                    std::to_string(values.size()));
  const Evaluator ev{values, vars_};
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const double v = ev(*components_[c]);
    if (!std::isfinite(v))
      ev.domain_error("non-finite result in component " + std::to_string(c + 1));
    out[c] = v;
  }
}

std::vector<double> RhsExpr::eval(std::span<const double> values) const {
  std::vector<double> out(dim());
  eval(values, out);
  return out;
}

std::vector<double> RhsExpr::eval(const std::map<std::string, double>& bindings) const {
  std::vector<double> values(vars_.size(), 0.0);
  const auto used = free_vars();
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    auto it = bindings.find(vars_[k]);
    if (it != bindings.end())
      values[k] = it->second;
    else if (std::find(used.begin(), used.end(), vars_[k]) != used.end())
      throw EvalError("missing binding for variable '" + vars_[k] + "'");
  }
  return eval(values);
}

std::string RhsExpr::to_string() const {
  if (components_.size() == 1)
    return print(*components_[0]);
  std::string out = "[";
  for (std::size_t k = 0; k < components_.size(); ++k)
    out += (k ? ", " : "") + print(*components_[k]);
  return out + "]";
}

} // namespace tsg
