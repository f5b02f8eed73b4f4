#pragma once

#include "extenso/error.hpp"
#include "extenso/jet.hpp"

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/// Scalar-field expressions: a small recursive-descent parser for
/// fundamental equations and form coefficients, a printer, and a compiled
/// evaluator producing jets.
///
/// Grammar (precedence low to high, `^` right-associative):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := atom ('^' unary)?
///     atom    := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
///
/// so `-x^2` is `-(x^2)` and `a^b^c` is `a^(b^c)`. Only `ln` and `exp` may be
/// applied as functions.
namespace extenso::expr {

enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { ln, exp };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct Identifier {
    std::string name;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Function fn;
    NodePtr arg;
};

struct Node {
    std::variant<Number, Identifier, Negate, Binary, Call> v;
};

/// Immutable expression tree.
class Expression {
public:
    explicit Expression(NodePtr root);

    static Expression number(double value);
    static Expression identifier(std::string name);
    static Expression negate(const Expression& operand);
    static Expression binary(BinaryOp op, const Expression& lhs, const Expression& rhs);
    static Expression call(Function fn, const Expression& arg);

    const Node& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }

    /// Minimal-parenthesis rendering that parses back to the same tree.
    std::string to_string() const;
    /// Every identifier that is not applied as a function.
    std::set<std::string> free_vars() const;

    /// Structural equality (numbers compared exactly).
    friend bool operator==(const Expression& a, const Expression& b);

private:
    NodePtr root_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownFunctionError : public Error {
public:
    UnknownFunctionError(std::size_t offset, std::string name);
    std::size_t offset() const { return offset_; }
    const std::string& name() const { return name_; }

private:
    std::size_t offset_;
    std::string name_;
};

class UnboundIdentifierError : public Error {
public:
    explicit UnboundIdentifierError(std::string name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

Expression parse(std::string_view source);

/// Values for an evaluation: variables occupy coordinate slots 0..dim-1 and
/// carry the point's coordinates, constants are plain reals.
struct Binding {
    struct Slot {
        int index;
        double value;
    };
    std::map<std::string, Slot> variables;
    std::map<std::string, double> constants;

    int dim() const { return int(variables.size()); }
};

/// Expression resolved against variable slots and constant values. Cheap to
/// copy, immutable, evaluable concurrently.
class CompiledExpression {
public:
    CompiledExpression(const Expression& e, std::span<const std::string> variables,
                       const std::map<std::string, double>& constants);

    int dim() const { return dim_; }
    double value(std::span<const double> point) const;
    Jet jet(std::span<const double> point, int order) const;

    enum class Op : unsigned char { constant, variable, neg, add, sub, mul, div, pow, ln, exp };
    struct Instr {
        Op op;
        int slot = 0;
        double constant = 0.0;
    };

private:
    int dim_;
    std::shared_ptr<const std::vector<Instr>> program_;
};

/// Jet of `e` at the point given by the binding, up to `order`.
Jet eval(const Expression& e, const Binding& b, int order);

} // namespace extenso::expr
