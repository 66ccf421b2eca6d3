// Helpers shared by the unit tests and the acceptance suite.
#pragma once

#include <string>
#include <vector>

#include "wb/bytes.hpp"
#include "wb/deduce.hpp"
#include "wb/term.hpp"

namespace wbtest {

struct RandomKb {
    std::vector<wb::TermPtr> facts;
    wb::TermPtr goal;
    wb::CloseParams params;
};

// Random shallow term over a fixed atom pool. Constructors normalize, so the
// result may collapse (e.g. an xor that cancels).
inline wb::TermPtr random_term(wb::Rng& rng, const std::vector<wb::TermPtr>& pool, int depth) {
    using namespace wb;
    if (depth == 0 || rng.below(3) == 0) return pool[rng.below(pool.size())];
    switch (rng.below(6)) {
        case 0: {
            std::vector<TermPtr> ps;
            std::size_t n = 2 + rng.below(2);
            for (std::size_t i = 0; i < n; ++i) ps.push_back(random_term(rng, pool, depth - 1));
            return xor_of(std::move(ps));
        }
        case 1: {
            std::vector<TermPtr> ps;
            std::size_t n = 1 + rng.below(3);
            for (std::size_t i = 0; i < n; ++i) ps.push_back(random_term(rng, pool, depth - 1));
            return hash_of(std::move(ps));
        }
        case 2: {
            std::vector<TermPtr> ps;
            std::size_t n = 2 + rng.below(2);
            for (std::size_t i = 0; i < n; ++i) ps.push_back(random_term(rng, pool, depth - 1));
            return cat_of(std::move(ps));
        }
        case 3:
            return enc_of(random_term(rng, pool, depth - 1), random_term(rng, pool, depth - 1));
        case 4: {
            std::vector<std::pair<TermPtr, int>> ps;
            std::size_t n = 2 + rng.below(2);
            for (std::size_t i = 0; i < n; ++i)
                ps.emplace_back(random_term(rng, pool, depth - 1), rng.below(2) ? 1 : -1);
            return group_sum(std::move(ps));
        }
        default:
            return soh_of(random_term(rng, pool, depth - 1));
    }
}

// Small random knowledge base: a handful of atoms, a few defined names, random
// facts, one goal. Sized so closures stay small and always terminate.
inline RandomKb random_kb(wb::Rng& rng) {
    using namespace wb;
    RandomKb kb;

    std::vector<TermPtr> pool;
    std::size_t n_atoms = 4 + rng.below(4);
    for (std::size_t i = 0; i < n_atoms; ++i) {
        AtomKind kind = i % 3 == 0   ? AtomKind::PublicConst
                        : i % 3 == 1 ? AtomKind::Secret
                                     : AtomKind::FreshNonce;
        std::size_t len = rng.below(2) ? 8 : 32;
        pool.push_back(atom("a" + std::to_string(i), kind, len));
    }

    std::vector<TermPtr> universe = pool;
    std::size_t n_eq = rng.below(3);
    for (std::size_t e = 0; e < n_eq; ++e) {
        std::string name = "W" + std::to_string(e);
        kb.params.equations.push_back({name, random_term(rng, pool, 2)});
        universe.push_back(atom(name, AtomKind::PublicConst, 0));
    }
    for (int i = 0; i < 6; ++i) universe.push_back(random_term(rng, pool, 2));

    std::size_t n_facts = 3 + rng.below(5);
    for (std::size_t i = 0; i < n_facts; ++i)
        kb.facts.push_back(universe[rng.below(universe.size())]);
    kb.goal = universe[rng.below(universe.size())];
    kb.params.extra_interest.push_back(kb.goal);
    kb.params.max_rounds = 40;
    kb.params.max_terms = 4000;
    return kb;
}

}  // namespace wbtest
