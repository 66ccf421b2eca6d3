// Symbolic message algebra. Terms are immutable DAG nodes kept in canonical
// normal form by their constructors:
//   - xor sums are flat, sorted, with cancelled pairs removed (a (+) a == 0),
//   - group sums mod p are flat with net signed coefficients,
//   - concatenations are flat,
//   - hash / encryption / one-way exponentiation keep their structure.
// Structural equality of normal forms implies equality of concrete
// evaluations, which is what lets a derivation trace be replayed against an
// honest session byte-for-byte.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wb/bytes.hpp"
#include "wb/primitives.hpp"

namespace wb {

enum class AtomKind { PublicConst, Secret, FreshNonce };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind { Atom, Xor, Hash, Cat, Enc, GroupAdd, Exp, ScalarOfHash };

struct Term {
    TermKind kind;

    // Atom payload
    std::string name;
    AtomKind atom_kind = AtomKind::PublicConst;
    std::size_t byte_len = 0;  // Atom: declared length; Xor: operand width

    // Children. Xor/Cat/Hash: operands in canonical order.
    // Enc: {key, body}. Exp: {scalar, base}. ScalarOfHash: {arg}.
    std::vector<TermPtr> parts;
    // GroupAdd only: +1 / -1 per part.
    std::vector<int> signs;
};

// --- constructors (always produce normal forms) ----------------------------
TermPtr atom(const std::string& name, AtomKind kind, std::size_t byte_len);
TermPtr xor_of(std::vector<TermPtr> parts);
TermPtr hash_of(std::vector<TermPtr> args);
TermPtr cat_of(std::vector<TermPtr> parts);
TermPtr enc_of(TermPtr key, TermPtr body);
TermPtr group_sum(std::vector<std::pair<TermPtr, int>> parts);
TermPtr exp_of(TermPtr scalar, TermPtr base);
TermPtr soh_of(TermPtr arg);

// --- structural order / identity -------------------------------------------
int term_compare(const TermPtr& a, const TermPtr& b);
inline bool term_eq(const TermPtr& a, const TermPtr& b) { return term_compare(a, b) == 0; }

struct TermLess {
    bool operator()(const TermPtr& a, const TermPtr& b) const { return term_compare(a, b) < 0; }
};
using TermSet = std::set<TermPtr, TermLess>;

std::string to_string(const TermPtr& t);

// Byte width when statically known (digest_len resolves Hash nodes).
std::optional<std::size_t> term_length(const TermPtr& t, std::size_t digest_len);

// Total node count; the deduction engine's shrink heuristic uses it.
std::size_t term_size(const TermPtr& t);

// Every distinct subterm including the term itself.
void collect_subterms(const TermPtr& t, TermSet& out);
// Names of all atoms occurring in the term.
void collect_atoms(const TermPtr& t, std::set<std::string>& out);
bool contains_atom(const TermPtr& t, const std::string& name);

// --- equations --------------------------------------------------------------
struct Equation {
    std::string lhs;  // defined atom
    TermPtr rhs;
};

using Definitions = std::map<std::string, TermPtr>;

Definitions index_equations(const std::vector<Equation>& eqs);

// Substitute defined atoms by their definitions to a fixpoint and normalize.
// Throws WbError("equation-cycle") on cyclic definitions.
TermPtr expand(const TermPtr& t, const Definitions& defs);

// --- concrete evaluation ----------------------------------------------------
using Env = std::map<std::string, Bytes>;

// Throws WbError("unbound-atom") when an atom has no binding and
// WbError("atom-length-mismatch") when a binding contradicts the declaration.
Bytes evaluate(const TermPtr& t, const Env& env, const SuiteParams& suite);

// --- parsing ----------------------------------------------------------------
// Resolves free identifiers against declared atoms:
//   H(a, b)   multi-field digest          a (+) b      xor
//   CAT(a, b) concatenation               a .+ b mod p group sum
//   ENC(k, m) authenticated encryption    a .- b       group difference
//   EXP(s, b) one-way exponentiation      SOH(t)       digest folded to scalar
// Throws WbError("term-parse-error") / WbError("unknown-atom").
TermPtr parse_term(const std::string& text, const std::map<std::string, TermPtr>& atoms);

}  // namespace wb
