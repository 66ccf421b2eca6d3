// Knowledge-closure engine over the term algebra. Starting from a set of
// observed facts, it saturates under attacker-feasible rules:
//
//   fact            initial knowledge
//   equation-unfold bridge a defined name and its definition (both directions)
//   xor-combine     xor two known values; admitted only when the normal form
//                   strictly shrinks or the result is already "of interest"
//                   (a subterm of the facts, the equations, or the goal)
//   decrypt         open a known ciphertext with its known key
//   encrypt         build a ciphertext of interest from known key and body
//   hash-apply      build a digest / scalar-fold of interest from known args
//   concat-split    slice a known concatenation whose part widths are static
//   group-solve     solve a known modular sum for its single unknown scalar
//                   part, or build a sum of interest from known parts
//
// There is deliberately no rule that inverts a digest, inverts one-way
// exponentiation, or constructs exponentials or concatenations: those are the
// one-way boundaries of the model.
//
// Saturation is bounded by round and term-count limits, and hitting a limit
// is reported as a status distinct from "closure complete, goal absent".
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "wb/term.hpp"

namespace wb {

enum class CloseStatus { Completed, RoundLimit, TermLimit };

std::string to_string(CloseStatus s);

// One applied rule instance. Premises reference previously derived terms in
// the exact order the rule consumes them, so a trace can be replayed on
// concrete bytes.
struct DerivStep {
    TermPtr term;
    std::string rule;
    std::vector<TermPtr> premises;
};

struct CloseParams {
    std::vector<Equation> equations;
    std::vector<TermPtr> extra_interest;  // typically the goal terms
    std::size_t max_rounds = 32;
    std::size_t max_terms = 5000;
    std::size_t digest_len = 32;  // resolves digest widths for concat-split
};

struct ClosureResult {
    TermSet known;
    std::vector<DerivStep> steps;  // derivation order, one step per known term
    CloseStatus status = CloseStatus::Completed;

    bool contains(const TermPtr& t) const { return known.count(t) != 0; }
};

ClosureResult close(const std::vector<TermPtr>& facts, const CloseParams& params);

struct DerivationResult {
    bool derivable = false;
    CloseStatus status = CloseStatus::Completed;
    std::vector<DerivStep> trace;  // minimal ordered derivation ending at the goal
};

// close() with the goal added to the interest set, plus trace extraction.
DerivationResult derive(const std::vector<TermPtr>& facts, const TermPtr& goal,
                        CloseParams params);

// Reference oracle: same rule semantics, written as a naive from-scratch
// fixpoint that rescans everything each iteration. Kept separate from the
// engine so the two implementations check each other.
TermSet brute_force_close(const std::vector<TermPtr>& facts, const CloseParams& params);

// Structural set equality (std::set's own operator== compares pointers).
inline bool same_terms(const TermSet& a, const TermSet& b) {
    if (a.size() != b.size()) return false;
    auto ib = b.begin();
    for (const auto& t : a) {
        if (!term_eq(t, *ib)) return false;
        ++ib;
    }
    return true;
}

// --- concrete replay --------------------------------------------------------
using ValueMap = std::map<TermPtr, Bytes, TermLess>;

// Recompute every step of a trace from concrete bytes for the fact terms,
// returning the value of the final step. Throws WbError("replay-missing-fact")
// when a fact has no concrete value and WbError("replay-bad-step") when a
// step's premises do not line up with its rule.
Bytes replay_trace(const std::vector<DerivStep>& trace, const ValueMap& fact_values,
                   const SuiteParams& suite);

// --- knowledge-base files ---------------------------------------------------
// Line-oriented format ('#' comments):
//   atom <name> <public|secret|nonce> <byte-len>
//   eq <name> = <term>
//   fact <term>
//   goal <term>
//   param <max_rounds|max_terms> <value>
struct KbFile {
    std::map<std::string, TermPtr> atoms;
    std::vector<TermPtr> facts;
    TermPtr goal;  // null when absent
    CloseParams params;
};

KbFile parse_kb_text(const std::string& text, const std::string& origin);
KbFile load_kb_file(const std::string& path);

}  // namespace wb
