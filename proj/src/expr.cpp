#include "extenso/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

namespace extenso::expr {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

std::string join(const std::vector<std::string>& items)
{
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            s += ", ";
        s += items[i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

std::string describe(const Token& t)
{
    if (t.kind == Tok::end)
        return "end of input";
    return "'" + std::string(t.text) + "'";
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r'))
            ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size())
            return {Tok::end, start, {}};
        const char c = src_[pos_];
        auto single = [&](Tok k) {
            ++pos_;
            return Token{k, start, src_.substr(start, 1)};
        };
        switch (c) {
        case '+': return single(Tok::plus);
        case '-': return single(Tok::minus);
        case '*': return single(Tok::star);
        case '/': return single(Tok::slash);
        case '^': return single(Tok::caret);
        case '(': return single(Tok::lparen);
        case ')': return single(Tok::rparen);
        default: break;
        }
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1])))
            return lex_number(start);
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_])))
                ++pos_;
            return {Tok::ident, start, src_.substr(start, pos_ - start)};
        }
        throw ParseError(start, {"number", "identifier", "'('", "'-'"}, "'" + std::string(1, c) + "'");
    }

private:
    Token lex_number(std::size_t start)
    {
        while (pos_ < src_.size() && is_digit(src_[pos_]))
            ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_]))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
                ++look;
            if (look < src_.size() && is_digit(src_[look])) {
                pos_ = look;
                while (pos_ < src_.size() && is_digit(src_[pos_]))
                    ++pos_;
            }
        }
        Token t{Tok::number, start, src_.substr(start, pos_ - start)};
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(t.number))
            throw ParseError(start, {"finite number"}, "'" + std::string(t.text) + "'");
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    NodePtr parse_all()
    {
        NodePtr e = parse_expr();
        if (cur_.kind != Tok::end)
            throw ParseError(cur_.offset, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}, describe(cur_));
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    NodePtr parse_expr()
    {
        NodePtr lhs = parse_term();
        while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
            BinaryOp op = cur_.kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
            advance();
            lhs = make({Binary{op, lhs, parse_term()}});
        }
        return lhs;
    }

    NodePtr parse_term()
    {
        NodePtr lhs = parse_unary();
        while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
            BinaryOp op = cur_.kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
            advance();
            lhs = make({Binary{op, lhs, parse_unary()}});
        }
        return lhs;
    }

    NodePtr parse_unary()
    {
        if (cur_.kind == Tok::minus) {
            advance();
            return make({Negate{parse_unary()}});
        }
        return parse_power();
    }

    NodePtr parse_power()
    {
        NodePtr base = parse_atom();
        if (cur_.kind == Tok::caret) {
            advance();
            return make({Binary{BinaryOp::pow, base, parse_unary()}});
        }
        return base;
    }

    NodePtr parse_atom()
    {
        const Token t = cur_;
        switch (t.kind) {
        case Tok::number:
            advance();
            return make({Number{t.number}});
        case Tok::ident: {
            advance();
            if (cur_.kind != Tok::lparen)
                return make({Identifier{std::string(t.text)}});
            Function fn;
            if (t.text == "ln")
                fn = Function::ln;
            else if (t.text == "exp")
                fn = Function::exp;
            else
                throw UnknownFunctionError(t.offset, std::string(t.text));
            advance();
            NodePtr arg = parse_expr();
            expect_rparen();
            return make({Call{fn, arg}});
        }
        case Tok::lparen: {
            advance();
            NodePtr e = parse_expr();
            expect_rparen();
            return e;
        }
        default:
            throw ParseError(t.offset, {"number", "identifier", "'('", "'-'"}, describe(t));
        }
    }

    void expect_rparen()
    {
        if (cur_.kind != Tok::rparen)
            throw ParseError(cur_.offset, {"')'", "'+'", "'-'", "'*'", "'/'", "'^'"}, describe(cur_));
        advance();
    }

    Lexer lexer_;
    Token cur_{Tok::end, 0, {}};
};

// ---------------------------------------------------------------------------
// Printer

enum Prec { p_add = 1, p_mul = 2, p_neg = 3, p_pow = 4, p_atom = 5 };

int precedence(const Node& n)
{
    return std::visit(overloaded{[](const Number&) { return int(p_atom); },
                                 [](const Identifier&) { return int(p_atom); },
                                 [](const Call&) { return int(p_atom); },
                                 [](const Negate&) { return int(p_neg); },
                                 [](const Binary& b) {
                                     switch (b.op) {
                                     case BinaryOp::add:
                                     case BinaryOp::sub: return int(p_add);
                                     case BinaryOp::mul:
                                     case BinaryOp::div: return int(p_mul);
                                     case BinaryOp::pow: return int(p_pow);
                                     }
                                     return int(p_atom);
                                 }},
                      n.v);
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out)
{
    if (parens)
        out += '(';
    print(n, out);
    if (parens)
        out += ')';
}

void print(const Node& n, std::string& out)
{
    std::visit(overloaded{[&](const Number& x) { out += format_number(x.value); },
                          [&](const Identifier& x) { out += x.name; },
                          [&](const Call& c) {
                              out += c.fn == Function::ln ? "ln(" : "exp(";
                              print(*c.arg, out);
                              out += ')';
                          },
                          [&](const Negate& x) {
                              out += '-';
                              print_wrapped(*x.operand, precedence(*x.operand) < p_neg, out);
                          },
                          [&](const Binary& b) {
                              const int lp = precedence(*b.lhs), rp = precedence(*b.rhs);
                              switch (b.op) {
                              case BinaryOp::add:
                              case BinaryOp::sub:
                                  print_wrapped(*b.lhs, lp < p_add, out);
                                  out += b.op == BinaryOp::add ? " + " : " - ";
                                  print_wrapped(*b.rhs, rp <= p_add, out);
                                  break;
                              case BinaryOp::mul:
                              case BinaryOp::div:
                                  print_wrapped(*b.lhs, lp < p_mul, out);
                                  out += b.op == BinaryOp::mul ? '*' : '/';
                                  print_wrapped(*b.rhs, rp <= p_mul, out);
                                  break;
                              case BinaryOp::pow:
                                  print_wrapped(*b.lhs, lp < p_atom, out);
                                  out += '^';
                                  print_wrapped(*b.rhs, rp < p_neg, out);
                                  break;
                              }
                          }},
               n.v);
}

void collect_free(const Node& n, std::set<std::string>& out)
{
    std::visit(overloaded{[](const Number&) {}, [&](const Identifier& x) { out.insert(x.name); },
                          [&](const Call& c) { collect_free(*c.arg, out); },
                          [&](const Negate& x) { collect_free(*x.operand, out); },
                          [&](const Binary& b) {
                              collect_free(*b.lhs, out);
                              collect_free(*b.rhs, out);
                          }},
               n.v);
}

bool equal(const Node& a, const Node& b)
{
    if (a.v.index() != b.v.index())
        return false;
    return std::visit(
        overloaded{[&](const Number& x) { return x.value == std::get<Number>(b.v).value; },
                   [&](const Identifier& x) { return x.name == std::get<Identifier>(b.v).name; },
                   [&](const Call& x) {
                       const auto& y = std::get<Call>(b.v);
                       return x.fn == y.fn && equal(*x.arg, *y.arg);
                   },
                   [&](const Negate& x) { return equal(*x.operand, *std::get<Negate>(b.v).operand); },
                   [&](const Binary& x) {
                       const auto& y = std::get<Binary>(b.v);
                       return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
                   }},
        a.v);
}

// ---------------------------------------------------------------------------
// Compilation to a postfix program

using Op = CompiledExpression::Op;
using Instr = CompiledExpression::Instr;

class Compiler {
public:
    Compiler(std::span<const std::string> vars, const std::map<std::string, double>& constants)
        : constants_(constants)
    {
        for (std::size_t i = 0; i < vars.size(); ++i)
            slots_.emplace(vars[i], int(i));
    }

    void emit(const Node& n, std::vector<Instr>& prog)
    {
        std::visit(overloaded{[&](const Number& x) { prog.push_back({Op::constant, 0, x.value}); },
                              [&](const Identifier& x) {
                                  if (auto it = slots_.find(x.name); it != slots_.end())
                                      prog.push_back({Op::variable, it->second, 0.0});
                                  else if (auto c = constants_.find(x.name); c != constants_.end())
                                      prog.push_back({Op::constant, 0, c->second});
                                  else
                                      throw UnboundIdentifierError(x.name);
                              },
                              [&](const Call& c) {
                                  emit(*c.arg, prog);
                                  prog.push_back({c.fn == Function::ln ? Op::ln : Op::exp});
                              },
                              [&](const Negate& x) {
                                  emit(*x.operand, prog);
                                  prog.push_back({Op::neg});
                              },
                              [&](const Binary& b) {
                                  emit(*b.lhs, prog);
                                  emit(*b.rhs, prog);
                                  static constexpr Op ops[] = {Op::add, Op::sub, Op::mul, Op::div, Op::pow};
                                  prog.push_back({ops[int(b.op)]});
                              }},
                   n.v);
    }

private:
    std::map<std::string, int> slots_;
    const std::map<std::string, double>& constants_;
};

double apply_scalar(Op op, double a, double b)
{
    switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div:
        if (b == 0.0)
            throw DomainError("division by zero");
        return a / b;
    case Op::pow: return checked_pow(a, b);
    default: return 0.0;
    }
}

// Folds maximal variable-free subprograms into constants, so exponents such as
// (c+1) reach the power rule as plain reals.
std::vector<Instr> fold_constants(const std::vector<Instr>& prog)
{
    std::vector<Instr> out;
    std::vector<bool> is_const;
    for (const Instr& in : prog) {
        switch (in.op) {
        case Op::constant:
            out.push_back(in);
            is_const.push_back(true);
            break;
        case Op::variable:
            out.push_back(in);
            is_const.push_back(false);
            break;
        case Op::neg:
        case Op::ln:
        case Op::exp:
            if (is_const.back() && !(in.op == Op::ln && !(out.back().constant > 0.0))) {
                double& v = out.back().constant;
                v = in.op == Op::neg ? -v : in.op == Op::ln ? std::log(v) : std::exp(v);
            } else {
                out.push_back(in);
                is_const.back() = false;
            }
            break;
        default: {
            const bool rhs_const = is_const.back();
            const bool lhs_const = is_const[is_const.size() - 2];
            if (lhs_const && rhs_const) {
                const double b = out.back().constant;
                const double a = out[out.size() - 2].constant;
                try {
                    const double v = apply_scalar(in.op, a, b);
                    out.pop_back();
                    out.back().constant = v;
                    is_const.pop_back();
                    break;
                } catch (const DomainError&) {
                    // left for evaluation time so the error surfaces there
                }
            }
            out.push_back(in);
            is_const.pop_back();
            is_const.back() = false;
            break;
        }
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

Expression::Expression(NodePtr root) : root_(std::move(root)) {}

Expression Expression::number(double value) { return Expression(make({Number{value}})); }
Expression Expression::identifier(std::string name) { return Expression(make({Identifier{std::move(name)}})); }
Expression Expression::negate(const Expression& operand) { return Expression(make({Negate{operand.root_}})); }
Expression Expression::binary(BinaryOp op, const Expression& lhs, const Expression& rhs)
{
    return Expression(make({Binary{op, lhs.root_, rhs.root_}}));
}
Expression Expression::call(Function fn, const Expression& arg) { return Expression(make({Call{fn, arg.root_}})); }

std::string Expression::to_string() const
{
    std::string out;
    print(*root_, out);
    return out;
}

std::set<std::string> Expression::free_vars() const
{
    std::set<std::string> out;
    collect_free(*root_, out);
    return out;
}

bool operator==(const Expression& a, const Expression& b) { return equal(*a.root_, *b.root_); }

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error("syntax error at offset " + std::to_string(offset) + ": found " + found + ", expected one of {" +
            join(expected) + "}"),
      offset_(offset), expected_(std::move(expected))
{
}

UnknownFunctionError::UnknownFunctionError(std::size_t offset, std::string name)
    : Error("unknown function '" + name + "' at offset " + std::to_string(offset) + " (only ln and exp exist)"),
      offset_(offset), name_(std::move(name))
{
}

UnboundIdentifierError::UnboundIdentifierError(std::string name)
    : Error("unbound identifier '" + name + "'"), name_(std::move(name))
{
}

Expression parse(std::string_view source) { return Expression(Parser(source).parse_all()); }

CompiledExpression::CompiledExpression(const Expression& e, std::span<const std::string> variables,
                                       const std::map<std::string, double>& constants)
    : dim_(int(variables.size()))
{
    std::vector<Instr> prog;
    Compiler(variables, constants).emit(e.root(), prog);
    program_ = std::make_shared<const std::vector<Instr>>(fold_constants(prog));
}

double CompiledExpression::value(std::span<const double> point) const
{
    thread_local std::vector<double> stack;
    stack.clear();
    for (const Instr& in : *program_) {
        switch (in.op) {
        case Op::constant: stack.push_back(in.constant); break;
        case Op::variable: stack.push_back(point[in.slot]); break;
        case Op::neg: stack.back() = -stack.back(); break;
        case Op::ln:
            if (!(stack.back() > 0.0))
                throw DomainError("ln of non-positive argument " + std::to_string(stack.back()));
            stack.back() = std::log(stack.back());
            break;
        case Op::exp: stack.back() = std::exp(stack.back()); break;
        default: {
            const double b = stack.back();
            stack.pop_back();
            stack.back() = apply_scalar(in.op, stack.back(), b);
        }
        }
    }
    return stack.back();
}

Jet CompiledExpression::jet(std::span<const double> point, int order) const
{
    std::vector<Jet> stack;
    stack.reserve(8);
    for (const Instr& in : *program_) {
        switch (in.op) {
        case Op::constant: stack.push_back(Jet::constant(dim_, order, in.constant)); break;
        case Op::variable: stack.push_back(Jet::variable(dim_, order, in.slot, point[in.slot])); break;
        case Op::neg: stack.back() = -stack.back(); break;
        case Op::ln: stack.back() = log(stack.back()); break;
        case Op::exp: stack.back() = exp(stack.back()); break;
        default: {
            Jet b = std::move(stack.back());
            stack.pop_back();
            Jet& a = stack.back();
            switch (in.op) {
            case Op::add: a += b; break;
            case Op::sub: a -= b; break;
            case Op::mul: a = a * b; break;
            case Op::div: a = a / b; break;
            case Op::pow: a = pow(a, b); break;
            default: break;
            }
        }
        }
    }
    return std::move(stack.back());
}

Jet eval(const Expression& e, const Binding& b, int order)
{
    const int n = b.dim();
    std::vector<std::string> names(n);
    std::vector<double> point(n);
    std::vector<bool> seen(n, false);
    for (const auto& [name, slot] : b.variables) {
        if (slot.index < 0 || slot.index >= n || seen[slot.index])
            throw Error("binding slots must be distinct indices 0..n-1");
        seen[slot.index] = true;
        names[slot.index] = name;
        point[slot.index] = slot.value;
    }
    return CompiledExpression(e, names, b.constants).jet(point, order);
}

} // namespace extenso::expr
