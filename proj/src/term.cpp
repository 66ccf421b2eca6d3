#include "wb/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace wb {
namespace {

TermPtr make(Term&& t) { return std::make_shared<const Term>(std::move(t)); }

int kind_rank(TermKind k) { return static_cast<int>(k); }

// Width that is known without choosing a digest length. Hash nodes resolve
// only once a suite is fixed, so they stay unknown here.
std::optional<std::size_t> static_length(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Atom:
            return t->byte_len ? std::optional<std::size_t>(t->byte_len) : std::nullopt;
        case TermKind::Xor:
            if (t->parts.empty()) return t->byte_len ? std::optional<std::size_t>(t->byte_len) : std::nullopt;
            return static_length(t->parts.front());
        case TermKind::Cat: {
            std::size_t total = 0;
            for (const auto& p : t->parts) {
                auto l = static_length(p);
                if (!l) return std::nullopt;
                total += *l;
            }
            return total;
        }
        case TermKind::Enc: {
            auto l = static_length(t->parts[1]);
            if (!l) return std::nullopt;
            return *l + kSymTagLen;
        }
        case TermKind::Hash:
            return std::nullopt;
        case TermKind::GroupAdd:
        case TermKind::Exp:
        case TermKind::ScalarOfHash:
            return sizeof(std::uint64_t);
    }
    return std::nullopt;
}

}  // namespace

TermPtr atom(const std::string& name, AtomKind kind, std::size_t byte_len) {
    if (name.empty()) fail("atom-empty-name", "atom requires a name");
    Term t;
    t.kind = TermKind::Atom;
    t.name = name;
    t.atom_kind = kind;
    t.byte_len = byte_len;
    return make(std::move(t));
}

TermPtr xor_of(std::vector<TermPtr> parts) {
    std::vector<TermPtr> flat;
    std::size_t width = 0;
    std::function<void(const TermPtr&)> push = [&](const TermPtr& p) {
        if (!p) fail("null-term", "xor over a null operand");
        if (p->kind == TermKind::Xor) {
            if (p->parts.empty() && width == 0) width = p->byte_len;
            for (const auto& q : p->parts) push(q);
        } else {
            flat.push_back(p);
        }
    };
    for (const auto& p : parts) push(p);
    for (const auto& p : flat) {
        if (width == 0) {
            if (auto l = static_length(p)) width = *l;
        }
    }
    std::sort(flat.begin(), flat.end(), TermLess{});
    // a (+) a cancels: keep operands with odd multiplicity.
    std::vector<TermPtr> kept;
    for (std::size_t i = 0; i < flat.size();) {
        std::size_t j = i;
        while (j < flat.size() && term_eq(flat[i], flat[j])) ++j;
        if ((j - i) % 2 == 1) kept.push_back(flat[i]);
        i = j;
    }
    if (kept.size() == 1) return kept.front();
    Term t;
    t.kind = TermKind::Xor;
    t.parts = std::move(kept);
    t.byte_len = width;  // remembered so an all-cancelled sum still evaluates
    return make(std::move(t));
}

TermPtr hash_of(std::vector<TermPtr> args) {
    if (args.empty()) fail("hash-no-args", "digest requires at least one field");
    for (const auto& a : args)
        if (!a) fail("null-term", "digest over a null field");
    Term t;
    t.kind = TermKind::Hash;
    t.parts = std::move(args);
    return make(std::move(t));
}

TermPtr cat_of(std::vector<TermPtr> parts) {
    std::vector<TermPtr> flat;
    for (const auto& p : parts) {
        if (!p) fail("null-term", "concatenation of a null part");
        if (p->kind == TermKind::Cat)
            flat.insert(flat.end(), p->parts.begin(), p->parts.end());
        else
            flat.push_back(p);
    }
    if (flat.empty()) fail("cat-no-parts", "concatenation requires at least one part");
    if (flat.size() == 1) return flat.front();
    Term t;
    t.kind = TermKind::Cat;
    t.parts = std::move(flat);
    return make(std::move(t));
}

TermPtr enc_of(TermPtr key, TermPtr body) {
    if (!key || !body) fail("null-term", "encryption requires key and body");
    Term t;
    t.kind = TermKind::Enc;
    t.parts = {std::move(key), std::move(body)};
    return make(std::move(t));
}

TermPtr group_sum(std::vector<std::pair<TermPtr, int>> parts) {
    // Net coefficient per distinct operand; nested sums flatten with their
    // signs multiplied through.
    std::map<TermPtr, long long, TermLess> coeff;
    std::function<void(const TermPtr&, int)> push = [&](const TermPtr& p, int sign) {
        if (!p) fail("null-term", "group sum over a null operand");
        if (sign != 1 && sign != -1) fail("group-bad-sign", "group sum signs must be +1 or -1");
        if (p->kind == TermKind::GroupAdd) {
            for (std::size_t i = 0; i < p->parts.size(); ++i) push(p->parts[i], sign * p->signs[i]);
        } else {
            coeff[p] += sign;
        }
    };
    for (const auto& [p, s] : parts) push(p, s);
    Term t;
    t.kind = TermKind::GroupAdd;
    for (const auto& [p, c] : coeff) {
        long long n = c < 0 ? -c : c;
        int sign = c < 0 ? -1 : 1;
        for (long long i = 0; i < n; ++i) {
            t.parts.push_back(p);
            t.signs.push_back(sign);
        }
    }
    if (t.parts.size() == 1 && t.signs[0] == 1) return t.parts.front();
    return make(std::move(t));
}

TermPtr exp_of(TermPtr scalar, TermPtr base) {
    if (!scalar || !base) fail("null-term", "exponentiation requires scalar and base");
    Term t;
    t.kind = TermKind::Exp;
    t.parts = {std::move(scalar), std::move(base)};
    return make(std::move(t));
}

TermPtr soh_of(TermPtr arg) {
    if (!arg) fail("null-term", "scalar folding requires an argument");
    Term t;
    t.kind = TermKind::ScalarOfHash;
    t.parts = {std::move(arg)};
    return make(std::move(t));
}

int term_compare(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return 0;
    if (kind_rank(a->kind) != kind_rank(b->kind))
        return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
    switch (a->kind) {
        case TermKind::Atom:
            return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
        default:
            break;
    }
    if (a->parts.size() != b->parts.size())
        return a->parts.size() < b->parts.size() ? -1 : 1;
    if (a->kind == TermKind::Xor && a->parts.empty()) {
        if (a->byte_len != b->byte_len) return a->byte_len < b->byte_len ? -1 : 1;
    }
    for (std::size_t i = 0; i < a->parts.size(); ++i) {
        if (a->kind == TermKind::GroupAdd && a->signs[i] != b->signs[i])
            return a->signs[i] > b->signs[i] ? -1 : 1;  // '+' orders before '-'
        int c = term_compare(a->parts[i], b->parts[i]);
        if (c != 0) return c;
    }
    return 0;
}

std::string to_string(const TermPtr& t) {
    std::ostringstream os;
    std::function<void(const TermPtr&)> emit = [&](const TermPtr& p) {
        switch (p->kind) {
            case TermKind::Atom:
                os << p->name;
                return;
            case TermKind::Xor:
                if (p->parts.empty()) {
                    os << "ZERO[" << p->byte_len << "]";
                    return;
                }
                os << "(";
                for (std::size_t i = 0; i < p->parts.size(); ++i) {
                    if (i) os << " (+) ";
                    emit(p->parts[i]);
                }
                os << ")";
                return;
            case TermKind::Hash:
            case TermKind::Cat:
            case TermKind::Enc: {
                os << (p->kind == TermKind::Hash ? "H" : p->kind == TermKind::Cat ? "CAT" : "ENC")
                   << "(";
                for (std::size_t i = 0; i < p->parts.size(); ++i) {
                    if (i) os << ", ";
                    emit(p->parts[i]);
                }
                os << ")";
                return;
            }
            case TermKind::GroupAdd:
                if (p->parts.empty()) {
                    os << "GZERO";
                    return;
                }
                os << "GSUM(";
                for (std::size_t i = 0; i < p->parts.size(); ++i) {
                    if (i) os << ", ";
                    os << (p->signs[i] > 0 ? "+" : "-");
                    emit(p->parts[i]);
                }
                os << ")";
                return;
            case TermKind::Exp:
                os << "EXP(";
                emit(p->parts[0]);
                os << ", ";
                emit(p->parts[1]);
                os << ")";
                return;
            case TermKind::ScalarOfHash:
                os << "SOH(";
                emit(p->parts[0]);
                os << ")";
                return;
        }
    };
    emit(t);
    return os.str();
}

std::optional<std::size_t> term_length(const TermPtr& t, std::size_t digest_len) {
    switch (t->kind) {
        case TermKind::Atom:
            return t->byte_len ? std::optional<std::size_t>(t->byte_len) : std::nullopt;
        case TermKind::Hash:
            return digest_len;
        case TermKind::Xor: {
            if (t->parts.empty()) return t->byte_len ? std::optional<std::size_t>(t->byte_len) : std::nullopt;
            for (const auto& p : t->parts)
                if (auto l = term_length(p, digest_len)) return l;
            return std::nullopt;
        }
        case TermKind::Cat: {
            std::size_t total = 0;
            for (const auto& p : t->parts) {
                auto l = term_length(p, digest_len);
                if (!l) return std::nullopt;
                total += *l;
            }
            return total;
        }
        case TermKind::Enc: {
            auto l = term_length(t->parts[1], digest_len);
            if (!l) return std::nullopt;
            return *l + kSymTagLen;
        }
        case TermKind::GroupAdd:
        case TermKind::Exp:
        case TermKind::ScalarOfHash:
            return sizeof(std::uint64_t);
    }
    return std::nullopt;
}

std::size_t term_size(const TermPtr& t) {
    std::size_t n = 1;
    for (const auto& p : t->parts) n += term_size(p);
    return n;
}

void collect_subterms(const TermPtr& t, TermSet& out) {
    if (!out.insert(t).second) return;
    for (const auto& p : t->parts) collect_subterms(p, out);
}

void collect_atoms(const TermPtr& t, std::set<std::string>& out) {
    if (t->kind == TermKind::Atom) {
        out.insert(t->name);
        return;
    }
    for (const auto& p : t->parts) collect_atoms(p, out);
}

bool contains_atom(const TermPtr& t, const std::string& name) {
    if (t->kind == TermKind::Atom) return t->name == name;
    for (const auto& p : t->parts)
        if (contains_atom(p, name)) return true;
    return false;
}

Definitions index_equations(const std::vector<Equation>& eqs) {
    Definitions defs;
    for (const auto& e : eqs) {
        if (!defs.emplace(e.lhs, e.rhs).second)
            fail("equation-duplicate", "atom defined twice: " + e.lhs);
    }
    return defs;
}

namespace {

TermPtr expand_rec(const TermPtr& t, const Definitions& defs, std::set<std::string>& opened,
                   std::map<std::string, TermPtr>& memo) {
    switch (t->kind) {
        case TermKind::Atom: {
            auto d = defs.find(t->name);
            if (d == defs.end()) return t;
            auto m = memo.find(t->name);
            if (m != memo.end()) return m->second;
            if (!opened.insert(t->name).second)
                fail("equation-cycle", "cyclic definition through " + t->name);
            TermPtr r = expand_rec(d->second, defs, opened, memo);
            opened.erase(t->name);
            memo.emplace(t->name, r);
            return r;
        }
        case TermKind::Xor: {
            std::vector<TermPtr> parts;
            parts.reserve(t->parts.size());
            for (const auto& p : t->parts) parts.push_back(expand_rec(p, defs, opened, memo));
            if (t->parts.empty()) return t;
            return xor_of(std::move(parts));
        }
        case TermKind::Hash: {
            std::vector<TermPtr> parts;
            for (const auto& p : t->parts) parts.push_back(expand_rec(p, defs, opened, memo));
            return hash_of(std::move(parts));
        }
        case TermKind::Cat: {
            std::vector<TermPtr> parts;
            for (const auto& p : t->parts) parts.push_back(expand_rec(p, defs, opened, memo));
            return cat_of(std::move(parts));
        }
        case TermKind::Enc:
            return enc_of(expand_rec(t->parts[0], defs, opened, memo),
                          expand_rec(t->parts[1], defs, opened, memo));
        case TermKind::GroupAdd: {
            std::vector<std::pair<TermPtr, int>> parts;
            for (std::size_t i = 0; i < t->parts.size(); ++i)
                parts.emplace_back(expand_rec(t->parts[i], defs, opened, memo), t->signs[i]);
            return group_sum(std::move(parts));
        }
        case TermKind::Exp:
            return exp_of(expand_rec(t->parts[0], defs, opened, memo),
                          expand_rec(t->parts[1], defs, opened, memo));
        case TermKind::ScalarOfHash:
            return soh_of(expand_rec(t->parts[0], defs, opened, memo));
    }
    fail("term-internal", "unreachable term kind");
}

}  // namespace

TermPtr expand(const TermPtr& t, const Definitions& defs) {
    std::set<std::string> opened;
    std::map<std::string, TermPtr> memo;
    return expand_rec(t, defs, opened, memo);
}

Bytes evaluate(const TermPtr& t, const Env& env, const SuiteParams& suite) {
    switch (t->kind) {
        case TermKind::Atom: {
            auto it = env.find(t->name);
            if (it == env.end()) fail("unbound-atom", "no binding for atom " + t->name);
            if (t->byte_len != 0 && it->second.size() != t->byte_len)
                fail("atom-length-mismatch",
                     "atom " + t->name + " declared " + std::to_string(t->byte_len) +
                         " bytes, bound to " + std::to_string(it->second.size()));
            return it->second;
        }
        case TermKind::Xor: {
            if (t->parts.empty()) return Bytes(t->byte_len, 0);
            Bytes acc = evaluate(t->parts[0], env, suite);
            for (std::size_t i = 1; i < t->parts.size(); ++i)
                acc = xor_bytes(acc, evaluate(t->parts[i], env, suite));
            return acc;
        }
        case TermKind::Hash: {
            std::vector<Bytes> fields;
            fields.reserve(t->parts.size());
            for (const auto& p : t->parts) fields.push_back(evaluate(p, env, suite));
            return hash_fields(fields, suite);
        }
        case TermKind::Cat: {
            Bytes out;
            for (const auto& p : t->parts) {
                Bytes piece = evaluate(p, env, suite);
                out.insert(out.end(), piece.begin(), piece.end());
            }
            return out;
        }
        case TermKind::Enc:
            return sym_encrypt(evaluate(t->parts[0], env, suite), evaluate(t->parts[1], env, suite),
                               suite);
        case TermKind::GroupAdd: {
            std::uint64_t acc = 0;
            for (std::size_t i = 0; i < t->parts.size(); ++i) {
                std::uint64_t v = to_scalar(evaluate(t->parts[i], env, suite), suite);
                acc = t->signs[i] > 0 ? add_mod(acc, v, suite) : sub_mod(acc, v, suite);
            }
            return u64_be(acc);
        }
        case TermKind::Exp: {
            std::uint64_t e = to_scalar(evaluate(t->parts[0], env, suite), suite);
            std::uint64_t b = to_scalar(evaluate(t->parts[1], env, suite), suite);
            return u64_be(pow_mod(b, e, suite));
        }
        case TermKind::ScalarOfHash:
            return u64_be(to_scalar(evaluate(t->parts[0], env, suite), suite));
    }
    fail("term-internal", "unreachable term kind");
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------
namespace {

struct Token {
    enum Type { Ident, LParen, RParen, Comma, XorOp, GPlus, GMinus, End } type;
    std::string text;
    std::size_t pos;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '(') {
            if (i + 2 < s.size() && s[i + 1] == '+' && s[i + 2] == ')') {
                out.push_back({Token::XorOp, "(+)", i});
                i += 3;
            } else {
                out.push_back({Token::LParen, "(", i});
                ++i;
            }
            continue;
        }
        if (c == ')') {
            out.push_back({Token::RParen, ")", i});
            ++i;
            continue;
        }
        if (c == ',') {
            out.push_back({Token::Comma, ",", i});
            ++i;
            continue;
        }
        if (c == '.' && i + 1 < s.size() && (s[i + 1] == '+' || s[i + 1] == '-')) {
            out.push_back({s[i + 1] == '+' ? Token::GPlus : Token::GMinus,
                           std::string(".") + s[i + 1], i});
            i += 2;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        fail("term-parse-error",
             "unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(i) +
                 " in: " + s);
    }
    out.push_back({Token::End, "", s.size()});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const std::map<std::string, TermPtr>& atoms,
           const std::string& source)
        : toks_(std::move(toks)), atoms_(atoms), source_(source) {}

    TermPtr run() {
        TermPtr t = parse_xor();
        expect(Token::End, "end of input");
        return t;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    Token take() { return toks_[idx_++]; }

    void expect(Token::Type type, const std::string& what) {
        if (peek().type != type)
            fail("term-parse-error", "expected " + what + " near offset " +
                                         std::to_string(peek().pos) + " in: " + source_);
        take();
    }

    TermPtr parse_xor() {
        std::vector<TermPtr> parts{parse_group()};
        while (peek().type == Token::XorOp) {
            take();
            parts.push_back(parse_group());
        }
        return parts.size() == 1 ? parts.front() : xor_of(std::move(parts));
    }

    TermPtr parse_group() {
        TermPtr first = parse_primary();
        if (peek().type != Token::GPlus && peek().type != Token::GMinus) return first;
        std::vector<std::pair<TermPtr, int>> parts{{first, 1}};
        while (peek().type == Token::GPlus || peek().type == Token::GMinus) {
            int sign = take().type == Token::GPlus ? 1 : -1;
            parts.emplace_back(parse_primary(), sign);
        }
        // Optional "mod p" suffix; every group sum is taken modulo the suite
        // modulus regardless, so this only documents intent.
        if (peek().type == Token::Ident && peek().text == "mod") {
            take();
            if (peek().type != Token::Ident || peek().text != "p")
                fail("term-parse-error", "expected 'p' after 'mod' in: " + source_);
            take();
        }
        return group_sum(std::move(parts));
    }

    TermPtr parse_primary() {
        if (peek().type == Token::LParen) {
            take();
            TermPtr t = parse_xor();
            expect(Token::RParen, "')'");
            return t;
        }
        if (peek().type != Token::Ident)
            fail("term-parse-error", "expected a term near offset " +
                                         std::to_string(peek().pos) + " in: " + source_);
        Token id = take();
        if (peek().type == Token::LParen &&
            (id.text == "H" || id.text == "CAT" || id.text == "ENC" || id.text == "EXP" ||
             id.text == "SOH")) {
            take();
            std::vector<TermPtr> args{parse_xor()};
            while (peek().type == Token::Comma) {
                take();
                args.push_back(parse_xor());
            }
            expect(Token::RParen, "')'");
            if (id.text == "H") return hash_of(std::move(args));
            if (id.text == "CAT") return cat_of(std::move(args));
            if (id.text == "ENC") {
                if (args.size() != 2)
                    fail("term-parse-error", "ENC takes key and body in: " + source_);
                return enc_of(args[0], args[1]);
            }
            if (id.text == "EXP") {
                if (args.size() != 2)
                    fail("term-parse-error", "EXP takes scalar and base in: " + source_);
                return exp_of(args[0], args[1]);
            }
            if (args.size() != 1) fail("term-parse-error", "SOH takes one argument in: " + source_);
            return soh_of(args[0]);
        }
        auto it = atoms_.find(id.text);
        if (it == atoms_.end())
            fail("unknown-atom", "identifier '" + id.text + "' is not a declared atom in: " + source_);
        return it->second;
    }

    std::vector<Token> toks_;
    const std::map<std::string, TermPtr>& atoms_;
    std::string source_;
    std::size_t idx_ = 0;
};

}  // namespace

TermPtr parse_term(const std::string& text, const std::map<std::string, TermPtr>& atoms) {
    return Parser(lex(text), atoms, text).run();
}

}  // namespace wb
