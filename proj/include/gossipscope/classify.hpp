#pragma once

#include "gossipscope/logic.hpp"

namespace gossipscope
{

// Expected classification ---------------------------------------------------

/// The published preorder over the 18 call types: all six p1 types
/// coincide, (p2,pushpull,*) collapse when the group has exactly three
/// agents, and the strict arrows differ between the three-agent picture
/// and the general one.
class expected_preorder
{
public:
    static const expected_preorder& figure(int n_agents);

    /// Reflexive-transitive inclusion t1 <= t2 ("t2 relates at least as
    /// much as t1").
    bool includes(call_type t1, call_type t2) const;

    /// Strict/equal/incomparable classification of an unordered pair.
    int node_of(call_type t) const;

private:
    expected_preorder(int n_agents);

    int n_;
    std::array<int, 18> node_by_type_{};
    std::array<std::array<bool, 18>, 18> reach_{}; // node-level, padded
};

enum class comparison_verdict
{
    equal,
    left_strict_subset,  // the left type's relations are strictly finer
    right_strict_subset, // the right type's relations are strictly finer
    incomparable
};

std::string format_verdict(comparison_verdict v);

comparison_verdict expected_verdict(call_type t1, call_type t2, int n_agents);

// Empirical comparison -------------------------------------------------------

struct comparison_witness
{
    agent_id agent{};
    std::vector<call> seq_a;
    std::vector<call> seq_b;
    /// Which argument type relates the pair ("left" or "right"); the other
    /// type separates it.
    bool related_under_left = false;
};

struct comparison_result
{
    comparison_verdict verdict{};
    int bound = 0;
    std::vector<comparison_witness> witnesses; // one per strict/incomparable direction
};

/// Builds both indices over the bound-N universe and tests inclusion both
/// ways over all agents and all pairs.  The verdict is a bounded answer.
comparison_result compare_types(call_type t1, call_type t2, int n_agents, int bound,
                                const index_build_options& opts = {});

// Witness fixtures that separate pairs of call types -------------------------

/// A concrete sequence pair that one call type relates and another
/// distinguishes; these pin down every strict inclusion and every
/// incomparability of the expected figures.
struct separation_witness
{
    std::string label;
    call_type related;   // the pair is indistinguishable under this type
    call_type unrelated; // and distinguishable under this one
    std::string seq_a;   // caller/callee letter pairs, e.g. "bc,ca"
    std::string seq_b;
    int min_agents = 3;
    bool only_three_agents = false; // separation valid only when |Ag| = 3
};

const std::vector<separation_witness>& separation_witnesses();

std::vector<call> parse_pair_sequence(std::string_view text, int n_agents);

/// Witness length, hence the bound the check runs at.
int witness_bound(const separation_witness& w);

struct witness_check
{
    bool related_holds = false;
    bool unrelated_separates = false;
    int bound = 0;
    bool ok() const { return related_holds && unrelated_separates; }
};

witness_check check_separation_witness(const separation_witness& w, int n_agents,
                                       const index_build_options& opts = {});

// Full preorder verification --------------------------------------------------

struct preorder_pair_entry
{
    call_type t1, t2;
    comparison_verdict expected{};
    bool inclusion_left_in_right = false; // exhaustive at the bound
    bool inclusion_right_in_left = false;
    bool confirmed = false;
    std::string evidence; // how strictness/incomparability was established
    std::string deviation;
};

struct preorder_report
{
    int agents = 0;
    int bound = 0;
    std::vector<preorder_pair_entry> pairs;
    std::vector<std::string> deviations;
    bool matches() const { return deviations.empty(); }
};

/// Checks all 153 unordered type pairs against the expected figure:
/// inclusions exhaustively at the bound, strictness and incomparability
/// through in-bound search plus the quoted witnesses (each run at its own
/// bound).
preorder_report verify_preorder(int n_agents, int bound, const index_build_options& opts = {});

// Preservation properties ------------------------------------------------------

enum class fragment_kind
{
    l1plus,
    l2plus
};

struct preservation_violation
{
    formula_ptr f;
    std::vector<call> seq;
};

struct preservation_report
{
    std::uint64_t formulas_checked = 0;
    std::uint64_t evaluations = 0;
    std::vector<preservation_violation> violations; // capped at a handful
    bool ok() const { return violations.empty(); }
};

/// Checks "true under t2 implies true under t1" for fragment formulas:
/// all atoms, the exhaustive depth-2 battery over three agents, plus
/// seeded random samples.  Preconditions (matching directions and the
/// expected inclusion) are enforced, not silently ignored.
preservation_report check_preservation(call_type t1, call_type t2, fragment_kind fragment,
                                       int n_agents, int bound, int samples,
                                       std::uint64_t seed = 0x5eed);

} // namespace gossipscope
