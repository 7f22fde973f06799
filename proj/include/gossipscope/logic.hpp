#pragma once

#include "gossipscope/indist.hpp"

#include <map>
#include <memory>
#include <unordered_map>

namespace gossipscope
{

// Formulas ---------------------------------------------------------------

enum class formula_kind
{
    familiar,    // F[a,s]: agent a is familiar with the secret of s's owner
    negation,    // !phi
    conjunction, // phi & psi
    disjunction, // phi | psi
    knows        // K[a] phi
};

class formula;
using formula_ptr = std::shared_ptr<const formula>;

class formula
{
public:
    formula_kind kind() const noexcept { return kind_; }

    /// The familiar or knowing agent.
    agent_id agent() const noexcept { return agent_; }
    /// Owner of the secret in a familiar atom.
    agent_id owner() const noexcept { return owner_; }

    const formula_ptr& child() const { return left_; } // negation, knows
    const formula_ptr& left() const { return left_; }
    const formula_ptr& right() const { return right_; }

    static formula_ptr familiar(agent_id a, agent_id owner);
    static formula_ptr negation(formula_ptr f);
    static formula_ptr conjunction(formula_ptr l, formula_ptr r);
    static formula_ptr disjunction(formula_ptr l, formula_ptr r);
    static formula_ptr knows(agent_id a, formula_ptr f);

private:
    formula(formula_kind k, agent_id agent, agent_id owner, formula_ptr l, formula_ptr r)
        : kind_(k), agent_(agent), owner_(owner), left_(std::move(l)), right_(std::move(r))
    {
    }

    formula_kind kind_;
    agent_id agent_;
    agent_id owner_;
    formula_ptr left_;
    formula_ptr right_;
};

/// Structural equality.
bool same_formula(const formula& a, const formula& b);

/// Grammar (whitespace ignored, agents are single lowercase letters):
///
///   phi := "F[" agent "," agent "]" | "K[" agent "]" phi | "Exp[" agent "]"
///        | "!" phi | phi "&" phi | phi "|" phi | "(" phi ")"
///
/// with precedence ! > & > |.  "Exp[a]" expands into the conjunction of
/// F[a,s] over all n secrets.  When placeholders are supplied, the
/// uppercase placeholder letters are accepted as agent names and mapped
/// through; concrete letters are then rejected.
formula_ptr parse_formula(std::string_view text, int n_agents,
                          const std::map<char, agent_id>* placeholders = nullptr);

std::string format_formula(const formula& f);

/// Conjunction of F[a,s] over all secrets: "a is an expert".
formula_ptr expert_formula(agent_id a, int n_agents);

// Language fragments ------------------------------------------------------

struct fragment_flags
{
    bool in_l1plus = false; // literals, &, |, K
    bool in_l2plus = false; // atoms, &, |, K
    bool in_lhat = false;   // literals, &, |, and the pattern !K[a]!phi
};

fragment_flags fragment_of(const formula& f);

/// Rewrites a formula into the existential fragment when double-negation
/// elimination and De Morgan's laws suffice (e.g. !K[a]F[b,a] becomes
/// !K[a]!!F[b,a]); returns null when the formula has no such form.
formula_ptr to_existential_fragment(const formula& f);

// Models and truth ---------------------------------------------------------

/// A bounded universe together with the per-agent partitions built from it.
/// Knowledge quantifies over a sequence's class within the bound, so every
/// answer is relative to the bound.
class gossip_model
{
public:
    gossip_model(universe u, equivalence_index idx);

    static gossip_model build(int n_agents, int bound, call_type t,
                              const index_build_options& opts = {});

    const universe& space() const noexcept { return u_; }
    const equivalence_index& index() const noexcept { return idx_; }
    call_type type() const noexcept { return u_.type(); }
    int agents() const noexcept { return u_.agents(); }
    int bound() const noexcept { return u_.bound(); }

private:
    universe u_;
    equivalence_index idx_;
};

/// Memoizing evaluator.  A context caches knowledge-operator results per
/// (node, class), so reuse one context when evaluating many sequences of
/// one model.  Not thread-safe; create one per thread.
class eval_context
{
public:
    explicit eval_context(const gossip_model& m) : eval_context(m, nullptr) {}

    /// Relativised variant: knowledge quantifies over class members inside
    /// the restriction mask only (the model M_X of the candidate set X).
    eval_context(const gossip_model& m, const std::vector<char>* restriction)
        : model_(m), restriction_(restriction)
    {
    }

    bool operator()(const formula& f, seq_index s);

private:
    bool eval_node(const formula& f, seq_index s);

    const gossip_model& model_;
    const std::vector<char>* restriction_;
    std::unordered_map<std::uint64_t, char> know_cache_;
    std::unordered_map<const formula*, std::uint32_t> node_ids_;
};

/// One-shot evaluation of a formula at a sequence.
bool eval(const formula& f, std::span<const call> seq, const gossip_model& m);

} // namespace gossipscope
