#pragma once

// Recursive descent over the expression grammar, shared by the scalar and
// the form parser. Sem supplies the value type and the operations.

#include "crc/expr.hpp"

#include <cctype>
#include <string>

namespace crc::detail {

struct Token {
    enum Kind { num, ident, op, wedge, lparen, rparen, end } kind;
    std::string text;
    size_t offset;
};

inline std::vector<Token> tokenize(const std::string& s)
{
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && s[j] == '.') {
                ++j;
                if (j >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j])))
                    throw ParseError(j, "malformed decimal literal");
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            out.push_back({Token::num, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Token::ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '\\') {
            out.push_back({Token::wedge, "/\\", i});
            i += 2;
            continue;
        }
        if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
            out.push_back({Token::op, std::string(1, c), i});
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Token::lparen, "(", i});
            ++i;
            continue;
        }
        if (c == ')') {
            out.push_back({Token::rparen, ")", i});
            ++i;
            continue;
        }
        throw ParseError(i, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Token::end, "", s.size()});
    return out;
}

inline mpq_class decimal_to_rational(const std::string& t)
{
    auto dot = t.find('.');
    if (dot == std::string::npos) return mpq_class(mpz_class(t, 10));
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    mpz_class den = 1;
    for (size_t k = dot + 1; k < t.size(); ++k) den *= 10;
    mpq_class q(mpz_class(digits, 10), den);
    q.canonicalize();
    return q;
}

template <class Sem>
class Parser {
public:
    using V = typename Sem::Value;

    Parser(const std::string& text, Sem& sem) : toks_(tokenize(text)), sem_(sem) {}

    V parse_all()
    {
        V v = expr();
        if (cur().kind != Token::end) throw ParseError(cur().offset, "unexpected '" + cur().text + "'");
        return v;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    bool is_op(char c) const { return cur().kind == Token::op && cur().text[0] == c; }

    template <class F>
    V guarded(size_t off, F&& f)
    {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const UndeclaredIdentifier&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(off, e.what());
        }
    }

    V expr()
    {
        V v = term();
        while (is_op('+') || is_op('-')) {
            char c = cur().text[0];
            size_t off = cur().offset;
            ++pos_;
            V r = term();
            v = guarded(off, [&] { return c == '+' ? sem_.add(v, r) : sem_.sub(v, r); });
        }
        return v;
    }

    V term()
    {
        V v = unary();
        while (is_op('*') || is_op('/') || cur().kind == Token::wedge) {
            bool wedge = cur().kind == Token::wedge;
            char c = cur().text[0];
            size_t off = cur().offset;
            ++pos_;
            V r = unary();
            v = guarded(off, [&] {
                if (wedge) return sem_.wedge(v, r);
                return c == '*' ? sem_.mul(v, r) : sem_.div(v, r);
            });
        }
        return v;
    }

    V unary()
    {
        if (is_op('-')) {
            ++pos_;
            V v = unary();
            return sem_.neg(v);
        }
        if (is_op('+')) {
            ++pos_;
            return unary();
        }
        return power();
    }

    V power()
    {
        V base = primary();
        if (is_op('^')) {
            size_t off = cur().offset;
            ++pos_;
            size_t eoff = cur().offset;
            V ex = unary();
            auto q = sem_.as_rational(ex);
            if (!q) throw ParseError(eoff, "exponent must be a rational constant");
            return guarded(off, [&] { return sem_.pow(base, *q); });
        }
        return base;
    }

    V primary()
    {
        const Token& t = cur();
        switch (t.kind) {
        case Token::num:
            ++pos_;
            return sem_.number(decimal_to_rational(t.text));
        case Token::ident: {
            ++pos_;
            if (cur().kind == Token::lparen) {
                size_t off = t.offset;
                ++pos_;
                V arg = expr();
                expect_rparen();
                return guarded(off, [&] { return sem_.call(t.text, arg, off); });
            }
            if (t.text == "i") return sem_.imag_unit();
            return sem_.ident(t.text, t.offset);
        }
        case Token::lparen: {
            ++pos_;
            V v = expr();
            expect_rparen();
            return v;
        }
        case Token::end:
            throw ParseError(t.offset, "unexpected end of input");
        default:
            throw ParseError(t.offset, "unexpected '" + t.text + "'");
        }
    }

    void expect_rparen()
    {
        if (cur().kind != Token::rparen) throw ParseError(cur().offset, "expected ')'");
        ++pos_;
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    Sem& sem_;
};

}  // namespace crc::detail
