#pragma once

#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "natlift/errors.hpp"
#include "natlift/jet.hpp"

namespace natlift {

/// A closed expression in the energy density t, used to describe the
/// coefficient functions a1, a3 and lambda.
///
/// Textual form is a prefix (s-expression) grammar:
///
///     expr := number | t | ( op expr... )
///     op   := + | - | * | / | sqrt | pow | poly
///
/// `+` and `*` are n-ary, `-` is unary or binary, `pow` takes a base
/// expression and a numeric exponent, `poly` takes the coefficient list
/// c0 c1 ... of c0 + c1 t + c2 t^2 + ...
class FamilySpec {
public:
    enum class Kind { constant, variable, polynomial, add, subtract, negate, multiply, divide, sqrt, power };

    FamilySpec() : FamilySpec(constant(0.0)) {}

    static FamilySpec constant(double value) { return FamilySpec(Node{Kind::constant, value, {}, {}}); }
    static FamilySpec variable() { return FamilySpec(Node{Kind::variable, 0.0, {}, {}}); }
    static FamilySpec polynomial(std::vector<double> coefficients) {
        if (coefficients.empty()) throw ConfigError("polynomial needs at least one coefficient");
        return FamilySpec(Node{Kind::polynomial, 0.0, std::move(coefficients), {}});
    }
    static FamilySpec sqrt(FamilySpec arg) { return FamilySpec(Node{Kind::sqrt, 0.0, {}, {std::move(arg)}}); }
    static FamilySpec power(FamilySpec base, double exponent) {
        return FamilySpec(Node{Kind::power, exponent, {}, {std::move(base)}});
    }

    friend FamilySpec operator+(FamilySpec a, FamilySpec b) { return binary(Kind::add, std::move(a), std::move(b)); }
    friend FamilySpec operator-(FamilySpec a, FamilySpec b) {
        return binary(Kind::subtract, std::move(a), std::move(b));
    }
    friend FamilySpec operator*(FamilySpec a, FamilySpec b) {
        return binary(Kind::multiply, std::move(a), std::move(b));
    }
    friend FamilySpec operator/(FamilySpec a, FamilySpec b) { return binary(Kind::divide, std::move(a), std::move(b)); }
    friend FamilySpec operator-(FamilySpec a) { return FamilySpec(Node{Kind::negate, 0.0, {}, {std::move(a)}}); }

    Kind kind() const noexcept { return node_->kind; }

    /// Whether the expression is free of t (its jet has zero derivatives).
    bool is_constant() const {
        switch (node_->kind) {
            case Kind::constant: return true;
            case Kind::variable: return false;
            case Kind::polynomial: {
                for (std::size_t k = 1; k < node_->coefficients.size(); ++k)
                    if (node_->coefficients[k] != 0.0) return false;
                return true;
            }
            default:
                for (const auto& c : node_->children)
                    if (!c.is_constant()) return false;
                return true;
        }
    }

    /// Value and first three t-derivatives at t.
    Jet3 eval(double t) const {
        const Node& n = *node_;
        switch (n.kind) {
            case Kind::constant: return Jet3::constant(n.value);
            case Kind::variable: return Jet3::variable(t);
            case Kind::polynomial: {
                // Horner on jets.
                const Jet3 x = Jet3::variable(t);
                Jet3 acc{n.coefficients.back()};
                for (auto it = n.coefficients.rbegin() + 1; it != n.coefficients.rend(); ++it) acc = acc * x + Jet3{*it};
                return acc;
            }
            case Kind::add: {
                Jet3 acc;
                for (const auto& c : n.children) acc += c.eval(t);
                return acc;
            }
            case Kind::multiply: {
                Jet3 acc{1.0};
                for (const auto& c : n.children) acc *= c.eval(t);
                return acc;
            }
            case Kind::subtract: return n.children[0].eval(t) - n.children[1].eval(t);
            case Kind::negate: return -n.children[0].eval(t);
            case Kind::divide: {
                const Jet3 den = n.children[1].eval(t);
                if (den.v0 == 0.0) throw EvaluationError("division by zero", to_string());
                return n.children[0].eval(t) / den;
            }
            case Kind::sqrt: {
                const Jet3 arg = n.children[0].eval(t);
                if (!(arg.v0 > 0.0)) throw EvaluationError("non-positive radicand", to_string());
                return natlift::sqrt(arg);
            }
            case Kind::power: {
                const Jet3 base = n.children[0].eval(t);
                try {
                    return natlift::pow(base, n.value);
                } catch (const EvaluationError& e) {
                    throw EvaluationError(e.what(), to_string());
                }
            }
        }
        return {};
    }

    /// Prefix form; `parse(s.to_string())` reproduces `s` exactly.
    std::string to_string() const {
        const Node& n = *node_;
        switch (n.kind) {
            case Kind::constant: return format_number(n.value);
            case Kind::variable: return "t";
            case Kind::polynomial: {
                std::string s = "(poly";
                for (double c : n.coefficients) s += " " + format_number(c);
                return s + ")";
            }
            case Kind::power: return "(pow " + n.children[0].to_string() + " " + format_number(n.value) + ")";
            default: break;
        }
        std::string s = "(";
        s += op_name(n.kind);
        for (const auto& c : n.children) s += " " + c.to_string();
        return s + ")";
    }

    static FamilySpec parse(std::string_view text) {
        Parser p{text, 0};
        FamilySpec result = p.expr();
        p.skip_ws();
        if (p.pos != text.size()) p.fail("trailing input");
        return result;
    }

    friend bool operator==(const FamilySpec& a, const FamilySpec& b) { return a.to_string() == b.to_string(); }

private:
    struct Node {
        Kind kind;
        double value;
        std::vector<double> coefficients;
        std::vector<FamilySpec> children;
    };

    explicit FamilySpec(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    static FamilySpec binary(Kind k, FamilySpec a, FamilySpec b) {
        return FamilySpec(Node{k, 0.0, {}, {std::move(a), std::move(b)}});
    }

    static const char* op_name(Kind k) {
        switch (k) {
            case Kind::add: return "+";
            case Kind::subtract:
            case Kind::negate: return "-";
            case Kind::multiply: return "*";
            case Kind::divide: return "/";
            case Kind::sqrt: return "sqrt";
            default: return "?";
        }
    }

    static std::string format_number(double v) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

    struct Parser {
        std::string_view src;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const {
            throw ConfigError("family spec parse error at offset " + std::to_string(pos) + ": " + msg + " in '" +
                              std::string(src) + "'");
        }

        void skip_ws() {
            while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
        }

        std::string_view token() {
            skip_ws();
            const std::size_t start = pos;
            while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) && src[pos] != '(' &&
                   src[pos] != ')')
                ++pos;
            if (start == pos) fail("expected a token");
            return src.substr(start, pos - start);
        }

        double number(std::string_view tok) const {
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                fail("invalid number '" + std::string(tok) + "'");
            return v;
        }

        FamilySpec expr() {
            skip_ws();
            if (pos >= src.size()) fail("unexpected end of input");
            if (src[pos] == ')') fail("unexpected ')'");
            if (src[pos] != '(') {
                const auto tok = token();
                if (tok == "t") return variable();
                return constant(number(tok));
            }
            ++pos;
            const auto op = token();
            std::vector<FamilySpec> args;
            std::vector<std::string_view> raw;
            if (op == "poly" || op == "pow") {
                if (op == "pow") args.push_back(expr());
                for (skip_ws(); pos < src.size() && src[pos] != ')'; skip_ws()) raw.push_back(token());
            } else {
                for (skip_ws(); pos < src.size() && src[pos] != ')'; skip_ws()) args.push_back(expr());
            }
            if (pos >= src.size()) fail("missing ')'");
            ++pos;

            if (op == "poly") {
                std::vector<double> coeffs;
                for (auto tok : raw) coeffs.push_back(number(tok));
                if (coeffs.empty()) fail("poly needs coefficients");
                return polynomial(std::move(coeffs));
            }
            if (op == "pow") {
                if (raw.size() != 1) fail("pow takes a base expression and one numeric exponent");
                return power(std::move(args[0]), number(raw[0]));
            }
            if (op == "+" || op == "*") {
                if (args.size() < 2) fail("'" + std::string(op) + "' needs at least two operands");
                return FamilySpec(Node{op == "+" ? Kind::add : Kind::multiply, 0.0, {}, std::move(args)});
            }
            if (op == "-") {
                if (args.size() == 1) return -std::move(args[0]);
                if (args.size() == 2) return std::move(args[0]) - std::move(args[1]);
                fail("'-' takes one or two operands");
            }
            if (op == "/") {
                if (args.size() != 2) fail("'/' takes two operands");
                return std::move(args[0]) / std::move(args[1]);
            }
            if (op == "sqrt") {
                if (args.size() != 1) fail("sqrt takes one operand");
                return sqrt(std::move(args[0]));
            }
            fail("unknown operator '" + std::string(op) + "'");
        }
    };

    std::shared_ptr<const Node> node_;
};

/// Value and derivatives to order 3 of `spec` at t.
inline Jet3 jet_eval(const FamilySpec& spec, double t) { return spec.eval(t); }

}  // namespace natlift
