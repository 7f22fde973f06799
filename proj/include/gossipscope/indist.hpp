#pragma once

#include "gossipscope/universe.hpp"

#include <cstdint>

namespace gossipscope
{

/// One-step indistinguishability for agent a under call type t: true iff
/// the pair is derivable from the rule table.  Decided by memoized
/// recursion on prefix pairs of the two sequences; a single query costs
/// O(|c| * |d|).
bool approx(std::span<const call> c, std::span<const call> d, agent_id a, call_type t, int n_agents);

/// Per-agent partition of a universe under the reflexive-transitive
/// closure of the one-step relation, i.e. the bounded model of the
/// equivalence relations.  Immutable once built; safe to query
/// concurrently.
class equivalence_index
{
public:
    equivalence_index() = default;

    int agents() const noexcept { return n_; }
    seq_index members() const noexcept { return members_; }

    std::int32_t class_of(agent_id a, seq_index s) const
    {
        return class_ids_[static_cast<std::size_t>(a) * members_ + s];
    }

    std::int32_t class_count(agent_id a) const
    {
        return class_counts_[static_cast<std::size_t>(a)];
    }

    /// All members of one class, in ascending index order.
    std::span<const seq_index> members_of(agent_id a, std::int32_t cls) const;

private:
    friend struct index_builder;

    int n_ = 0;
    seq_index members_ = 0;
    std::vector<std::int32_t> class_ids_;    // n * members
    std::vector<std::int32_t> class_counts_; // per agent
    std::vector<std::vector<seq_index>> grouped_;       // per agent, members grouped by class
    std::vector<std::vector<std::uint64_t>> group_off_; // per agent, class -> offset into grouped_
};

struct index_build_options
{
    enum class strategy
    {
        automatic, // pairwise for small universes, layered beyond
        pairwise,  // enumerate all pairs through the memoized recursion
        layered    // derive pairs bottom-up, one length-pair layer at a time
    };

    strategy strat = strategy::automatic;
    bool parallel = true;          // distribute agents across OpenMP threads
    std::uint64_t pair_budget = 0; // 0 means default_pair_budget()
};

/// Pair budget applied when index construction is asked to enumerate
/// |members|^2 pairs; reads GOSSIPSCOPE_PAIR_BUDGET when set.
std::uint64_t default_pair_budget();

equivalence_index build_equivalence_index(const universe& u, const index_build_options& opts = {});

/// Closure test within the bounded universe; out-of-universe sequences are
/// a domain error.
bool indistinguishable(std::span<const call> c, std::span<const call> d, agent_id a,
                       const universe& u, const equivalence_index& idx);

/// The full class of c for agent a within the bounded universe.
std::vector<seq_index> class_of(std::span<const call> c, agent_id a, const universe& u,
                                const equivalence_index& idx);

} // namespace gossipscope
