#include "wb/deduce.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace wb {

std::string to_string(CloseStatus s) {
    switch (s) {
        case CloseStatus::Completed: return "completed";
        case CloseStatus::RoundLimit: return "round-limit";
        case CloseStatus::TermLimit: return "term-limit";
    }
    return "unknown";
}

namespace {

// ---------------------------------------------------------------------------
// Saturation engine
// ---------------------------------------------------------------------------
class Engine {
public:
    explicit Engine(const CloseParams& params)
        : P_(params), defs_(index_equations(params.equations)) {}

    ClosureResult run(const std::vector<TermPtr>& facts) {
        seed(facts);
        build_interest(facts);
        bool was_completed = false;
        if (!limit_) {
            for (std::size_t round = 0; round < P_.max_rounds; ++round) {
                bool changed = pass();
                if (limit_) break;
                if (!changed) {
                    was_completed = true;
                    break;
                }
            }
        }
        ClosureResult out;
        out.status = limit_ ? status_
                            : (was_completed ? CloseStatus::Completed : CloseStatus::RoundLimit);
        out.steps = std::move(steps_);
        for (const auto& [t, idx] : index_) {
            (void)idx;
            out.known.insert(t);
        }
        return out;
    }

private:
    bool known(const TermPtr& t) const { return index_.count(t) != 0; }

    bool add(const TermPtr& t, const char* rule, std::vector<TermPtr> premises) {
        if (limit_ || index_.count(t)) return false;
        if (order_.size() >= P_.max_terms) {
            limit_ = true;
            status_ = CloseStatus::TermLimit;
            return false;
        }
        index_.emplace(t, steps_.size());
        steps_.push_back(DerivStep{t, rule, std::move(premises)});
        order_.push_back(t);
        return true;
    }

    void seed(const std::vector<TermPtr>& facts) {
        for (const auto& f : facts) {
            add(f, "fact", {});
            TermPtr fx = expand(f, defs_);
            if (!term_eq(fx, f)) add(fx, "equation-unfold", {f});
        }
    }

    void build_interest(const std::vector<TermPtr>& facts) {
        for (const auto& f : facts) collect_subterms(expand(f, defs_), interest_);
        for (const auto& e : P_.equations) {
            collect_subterms(expand(e.rhs, defs_), interest_);
            interest_.insert(atom(e.lhs, AtomKind::PublicConst, 0));
        }
        for (const auto& t : P_.extra_interest) collect_subterms(expand(t, defs_), interest_);
    }

    bool pass() {
        bool changed = false;
        // order_ grows while we scan it, so newly derived terms are processed
        // within the same round.
        for (std::size_t i = 0; i < order_.size() && !limit_; ++i) {
            TermPtr t = order_[i];
            changed |= scan(t);
            for (std::size_t j = 0; j < i && !limit_; ++j) changed |= try_xor(t, order_[j]);
        }
        if (!limit_) changed |= constructive();
        if (!limit_) changed |= equation_bridges();
        return changed;
    }

    bool scan(const TermPtr& t) {
        bool changed = false;
        switch (t->kind) {
            case TermKind::Enc:
                if (known(t->parts[0]))
                    changed |= add(t->parts[1], "decrypt", {t, t->parts[0]});
                break;
            case TermKind::Cat: {
                bool sliceable = true;
                for (const auto& p : t->parts)
                    if (!term_length(p, P_.digest_len)) sliceable = false;
                if (sliceable)
                    for (const auto& p : t->parts) changed |= add(p, "concat-split", {t});
                break;
            }
            case TermKind::GroupAdd:
                changed |= solve_group(t);
                break;
            default:
                break;
        }
        return changed;
    }

    // A known sum with exactly one unknown 8-byte part yields that part.
    bool solve_group(const TermPtr& g) {
        std::size_t unknown = g->parts.size();
        for (std::size_t i = 0; i < g->parts.size(); ++i) {
            if (known(g->parts[i])) continue;
            if (unknown != g->parts.size()) return false;  // two unknowns
            unknown = i;
        }
        if (unknown == g->parts.size()) return false;  // nothing to solve
        auto len = term_length(g->parts[unknown], P_.digest_len);
        if (!len || *len != sizeof(std::uint64_t)) return false;
        std::vector<TermPtr> premises{g};
        for (std::size_t i = 0; i < g->parts.size(); ++i)
            if (i != unknown) premises.push_back(g->parts[i]);
        return add(g->parts[unknown], "group-solve", std::move(premises));
    }

    bool try_xor(const TermPtr& a, const TermPtr& b) {
        TermPtr u = xor_of({a, b});
        if (index_.count(u)) return false;
        bool admissible = term_size(u) < std::max(term_size(a), term_size(b)) ||
                          interest_.count(u) != 0;
        if (!admissible) return false;
        return add(u, "xor-combine", {a, b});
    }

    // Build digests, ciphertexts and sums of interest from known pieces.
    bool constructive() {
        bool changed = false;
        for (const auto& v : interest_) {
            if (limit_) break;
            if (known(v)) continue;
            switch (v->kind) {
                case TermKind::Hash: {
                    bool ok = true;
                    for (const auto& p : v->parts) ok = ok && known(p);
                    if (ok) changed |= add(v, "hash-apply", v->parts);
                    break;
                }
                case TermKind::ScalarOfHash:
                    if (known(v->parts[0])) changed |= add(v, "hash-apply", {v->parts[0]});
                    break;
                case TermKind::Enc:
                    if (known(v->parts[0]) && known(v->parts[1]))
                        changed |= add(v, "encrypt", {v->parts[0], v->parts[1]});
                    break;
                case TermKind::GroupAdd: {
                    bool ok = true;
                    for (const auto& p : v->parts) ok = ok && known(p);
                    if (ok) changed |= add(v, "group-solve", v->parts);
                    break;
                }
                default:
                    break;
            }
        }
        return changed;
    }

    bool equation_bridges() {
        bool changed = false;
        for (const auto& e : P_.equations) {
            if (limit_) break;
            TermPtr a = atom(e.lhs, AtomKind::PublicConst, 0);
            TermPtr dx = expand(a, defs_);
            bool ka = known(a), kd = known(dx);
            if (ka && !kd)
                changed |= add(dx, "equation-unfold", {a});
            else if (kd && !ka)
                changed |= add(a, "equation-unfold", {dx});
        }
        return changed;
    }

    const CloseParams& P_;
    Definitions defs_;
    std::map<TermPtr, std::size_t, TermLess> index_;
    std::vector<TermPtr> order_;
    std::vector<DerivStep> steps_;
    TermSet interest_;
    bool limit_ = false;
    CloseStatus status_ = CloseStatus::Completed;
};

}  // namespace

ClosureResult close(const std::vector<TermPtr>& facts, const CloseParams& params) {
    return Engine(params).run(facts);
}

DerivationResult derive(const std::vector<TermPtr>& facts, const TermPtr& goal,
                        CloseParams params) {
    params.extra_interest.push_back(goal);
    ClosureResult c = close(facts, params);
    Definitions defs = index_equations(params.equations);

    DerivationResult r;
    r.status = c.status;
    TermPtr target = goal;
    if (!c.contains(target)) target = expand(goal, defs);
    if (!c.contains(target)) return r;
    r.derivable = true;

    std::map<TermPtr, const DerivStep*, TermLess> by_term;
    for (const auto& s : c.steps) by_term.emplace(s.term, &s);
    TermSet visited;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
        if (!visited.insert(t).second) return;
        const DerivStep* s = by_term.at(t);
        for (const auto& p : s->premises) walk(p);
        r.trace.push_back(*s);
    };
    walk(target);
    return r;
}

// ---------------------------------------------------------------------------
// Reference oracle: same rules, naive full-rescan fixpoint, sets only.
// ---------------------------------------------------------------------------
TermSet brute_force_close(const std::vector<TermPtr>& facts, const CloseParams& params) {
    Definitions defs = index_equations(params.equations);

    TermSet interest;
    for (const auto& f : facts) collect_subterms(expand(f, defs), interest);
    for (const auto& e : params.equations) {
        collect_subterms(expand(e.rhs, defs), interest);
        interest.insert(atom(e.lhs, AtomKind::PublicConst, 0));
    }
    for (const auto& t : params.extra_interest) collect_subterms(expand(t, defs), interest);

    TermSet S;
    for (const auto& f : facts) {
        S.insert(f);
        S.insert(expand(f, defs));
    }

    const std::size_t cap = 20000;
    while (true) {
        TermSet found;
        auto propose = [&](const TermPtr& t) {
            if (!S.count(t)) found.insert(t);
        };

        for (auto ia = S.begin(); ia != S.end(); ++ia) {
            for (auto ib = std::next(ia); ib != S.end(); ++ib) {
                TermPtr u = xor_of({*ia, *ib});
                if (S.count(u)) continue;
                if (term_size(u) < std::max(term_size(*ia), term_size(*ib)) || interest.count(u))
                    found.insert(u);
            }
        }

        for (const auto& t : S) {
            if (t->kind == TermKind::Enc && S.count(t->parts[0])) propose(t->parts[1]);
            if (t->kind == TermKind::Cat) {
                bool sliceable = true;
                for (const auto& p : t->parts)
                    if (!term_length(p, params.digest_len)) sliceable = false;
                if (sliceable)
                    for (const auto& p : t->parts) propose(p);
            }
            if (t->kind == TermKind::GroupAdd) {
                std::size_t missing = 0, at = 0;
                for (std::size_t i = 0; i < t->parts.size(); ++i)
                    if (!S.count(t->parts[i])) {
                        ++missing;
                        at = i;
                    }
                if (missing == 1) {
                    auto len = term_length(t->parts[at], params.digest_len);
                    if (len && *len == sizeof(std::uint64_t)) propose(t->parts[at]);
                }
            }
        }

        for (const auto& v : interest) {
            if (S.count(v)) continue;
            bool all = true;
            switch (v->kind) {
                case TermKind::Hash:
                case TermKind::GroupAdd:
                    for (const auto& p : v->parts) all = all && S.count(p);
                    if (all) found.insert(v);
                    break;
                case TermKind::ScalarOfHash:
                    if (S.count(v->parts[0])) found.insert(v);
                    break;
                case TermKind::Enc:
                    if (S.count(v->parts[0]) && S.count(v->parts[1])) found.insert(v);
                    break;
                default:
                    break;
            }
        }

        for (const auto& e : params.equations) {
            TermPtr a = atom(e.lhs, AtomKind::PublicConst, 0);
            TermPtr dx = expand(a, defs);
            if (S.count(a) && !S.count(dx)) found.insert(dx);
            if (S.count(dx) && !S.count(a)) found.insert(a);
        }

        bool changed = false;
        for (const auto& t : found) changed |= S.insert(t).second;
        if (S.size() > cap) fail("brute-force-blowup", "oracle exceeded " + std::to_string(cap));
        if (!changed) return S;
    }
}

// ---------------------------------------------------------------------------
// Concrete replay
// ---------------------------------------------------------------------------
namespace {

const Bytes& premise_value(const ValueMap& vals, const DerivStep& step, std::size_t i) {
    if (i >= step.premises.size())
        fail("replay-bad-step", "rule " + step.rule + " premise " + std::to_string(i) +
                                    " missing for " + to_string(step.term));
    auto it = vals.find(step.premises[i]);
    if (it == vals.end())
        fail("replay-bad-step", "premise not yet valued: " + to_string(step.premises[i]));
    return it->second;
}

Bytes replay_group_solve(const ValueMap& vals, const DerivStep& step, const SuiteParams& suite) {
    bool solving = !step.premises.empty() && step.premises[0]->kind == TermKind::GroupAdd;
    if (solving) {
        const TermPtr& g = step.premises[0];
        std::uint64_t acc = to_scalar(premise_value(vals, step, 0), suite);
        std::size_t next = 1;
        int unknown_sign = 0;
        bool unknown_seen = false;
        for (std::size_t i = 0; i < g->parts.size(); ++i) {
            bool matches = next < step.premises.size() &&
                           term_eq(g->parts[i], step.premises[next]);
            if (matches) {
                std::uint64_t v = to_scalar(premise_value(vals, step, next), suite);
                acc = g->signs[i] > 0 ? sub_mod(acc, v, suite) : add_mod(acc, v, suite);
                ++next;
            } else {
                if (unknown_seen) fail("replay-bad-step", "two unsolved parts in group-solve");
                unknown_seen = true;
                unknown_sign = g->signs[i];
            }
        }
        if (!unknown_seen || next != step.premises.size())
            fail("replay-bad-step", "group-solve premises do not line up");
        std::uint64_t d = unknown_sign > 0 ? acc : sub_mod(0, acc, suite);
        return u64_be(d);
    }
    // Constructive direction: premises are the parts of the sum, in order.
    if (step.term->kind != TermKind::GroupAdd)
        fail("replay-bad-step", "group construction of a non-sum");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < step.term->parts.size(); ++i) {
        std::uint64_t v = to_scalar(premise_value(vals, step, i), suite);
        acc = step.term->signs[i] > 0 ? add_mod(acc, v, suite) : sub_mod(acc, v, suite);
    }
    return u64_be(acc);
}

}  // namespace

Bytes replay_trace(const std::vector<DerivStep>& trace, const ValueMap& fact_values,
                   const SuiteParams& suite) {
    if (trace.empty()) fail("replay-bad-step", "empty trace");
    ValueMap vals = fact_values;
    Bytes last;
    for (const auto& step : trace) {
        Bytes v;
        if (step.rule == "fact") {
            auto it = fact_values.find(step.term);
            if (it == fact_values.end())
                fail("replay-missing-fact", to_string(step.term));
            v = it->second;
        } else if (step.rule == "equation-unfold") {
            v = premise_value(vals, step, 0);
        } else if (step.rule == "xor-combine") {
            v = premise_value(vals, step, 0);
            for (std::size_t i = 1; i < step.premises.size(); ++i)
                v = xor_bytes(v, premise_value(vals, step, i));
        } else if (step.rule == "decrypt") {
            v = sym_decrypt(premise_value(vals, step, 1), premise_value(vals, step, 0), suite);
        } else if (step.rule == "encrypt") {
            v = sym_encrypt(premise_value(vals, step, 0), premise_value(vals, step, 1), suite);
        } else if (step.rule == "hash-apply") {
            if (step.term->kind == TermKind::ScalarOfHash) {
                v = u64_be(to_scalar(premise_value(vals, step, 0), suite));
            } else {
                std::vector<Bytes> fields;
                for (std::size_t i = 0; i < step.premises.size(); ++i)
                    fields.push_back(premise_value(vals, step, i));
                v = hash_fields(fields, suite);
            }
        } else if (step.rule == "concat-split") {
            const TermPtr& cat = step.premises.at(0);
            const Bytes& whole = premise_value(vals, step, 0);
            std::size_t offset = 0;
            bool found = false;
            for (const auto& p : cat->parts) {
                auto len = term_length(p, suite.digest_len);
                if (!len) fail("replay-bad-step", "unsized part in concat-split");
                if (term_eq(p, step.term)) {
                    if (offset + *len > whole.size())
                        fail("replay-bad-step", "concat-split past end of value");
                    v = Bytes(whole.begin() + static_cast<std::ptrdiff_t>(offset),
                              whole.begin() + static_cast<std::ptrdiff_t>(offset + *len));
                    found = true;
                    break;
                }
                offset += *len;
            }
            if (!found) fail("replay-bad-step", "derived part not inside its concatenation");
        } else if (step.rule == "group-solve") {
            v = replay_group_solve(vals, step, suite);
        } else {
            fail("replay-bad-step", "unknown rule " + step.rule);
        }
        vals.insert_or_assign(step.term, v);
        last = v;
    }
    return last;
}

// ---------------------------------------------------------------------------
// Knowledge-base files
// ---------------------------------------------------------------------------
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

AtomKind parse_atom_kind(const std::string& w, const std::string& where) {
    if (w == "public") return AtomKind::PublicConst;
    if (w == "secret") return AtomKind::Secret;
    if (w == "nonce") return AtomKind::FreshNonce;
    fail("kb-parse-error", "unknown atom kind '" + w + "' " + where);
}

}  // namespace

KbFile parse_kb_text(const std::string& text, const std::string& origin) {
    KbFile kb;
    std::vector<std::pair<int, std::string>> lines;
    {
        std::istringstream in(text);
        std::string raw;
        int no = 0;
        while (std::getline(in, raw)) {
            ++no;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            raw = trim(raw);
            if (!raw.empty()) lines.emplace_back(no, raw);
        }
    }
    auto where = [&](int no) { return "at " + origin + ":" + std::to_string(no); };

    // First pass: declared atoms plus implicit atoms for equation names, so
    // later terms can reference either regardless of file order.
    for (const auto& [no, line] : lines) {
        auto words = split_ws(line);
        if (words[0] == "atom") {
            if (words.size() != 4)
                fail("kb-parse-error", "atom takes name, kind, length " + where(no));
            std::size_t len = 0;
            try {
                len = static_cast<std::size_t>(std::stoul(words[3]));
            } catch (const std::exception&) {
                fail("kb-parse-error", "bad atom length '" + words[3] + "' " + where(no));
            }
            AtomKind kind = parse_atom_kind(words[2], where(no));
            if (!kb.atoms.emplace(words[1], atom(words[1], kind, len)).second)
                fail("kb-parse-error", "atom '" + words[1] + "' declared twice " + where(no));
        } else if (words[0] == "eq") {
            if (words.size() < 4 || words[2] != "=")
                fail("kb-parse-error", "eq syntax is: eq <name> = <term> " + where(no));
            kb.atoms.emplace(words[1], atom(words[1], AtomKind::PublicConst, 0));
        }
    }

    for (const auto& [no, line] : lines) {
        auto words = split_ws(line);
        const std::string& head = words[0];
        if (head == "atom") continue;
        std::string rest = trim(line.substr(head.size()));
        if (head == "eq") {
            auto eq_pos = rest.find('=');
            std::string lhs = trim(rest.substr(0, eq_pos));
            std::string rhs = trim(rest.substr(eq_pos + 1));
            kb.params.equations.push_back({lhs, parse_term(rhs, kb.atoms)});
        } else if (head == "fact") {
            kb.facts.push_back(parse_term(rest, kb.atoms));
        } else if (head == "goal") {
            if (kb.goal) fail("kb-parse-error", "second goal " + where(no));
            kb.goal = parse_term(rest, kb.atoms);
        } else if (head == "param") {
            if (words.size() != 3) fail("kb-parse-error", "param takes name and value " + where(no));
            std::size_t v = 0;
            try {
                v = static_cast<std::size_t>(std::stoul(words[2]));
            } catch (const std::exception&) {
                fail("kb-parse-error", "bad param value '" + words[2] + "' " + where(no));
            }
            if (words[1] == "max_rounds")
                kb.params.max_rounds = v;
            else if (words[1] == "max_terms")
                kb.params.max_terms = v;
            else
                fail("kb-parse-error", "unknown param '" + words[1] + "' " + where(no));
        } else {
            fail("kb-parse-error", "unknown directive '" + head + "' " + where(no));
        }
    }

    // Duplicate equation names surface here as a hard error.
    index_equations(kb.params.equations);
    return kb;
}

KbFile load_kb_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("file-not-found", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kb_text(buf.str(), path);
}

}  // namespace wb
