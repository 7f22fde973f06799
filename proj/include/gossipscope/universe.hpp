#pragma once

#include "gossipscope/core.hpp"

namespace gossipscope
{

using seq_index = std::uint64_t;

/// All call sequences of length <= bound over a fixed agent group, indexed
/// by length first and lexicographically within a length.  Index 0 is the
/// empty sequence and the set is prefix-closed: dropping the last call of
/// any member lands on a smaller index.
///
/// Members are caller/callee pair sequences; the attached call type fixes
/// how they transform situations (direction) and how they compare
/// (privacy, observance).
class universe
{
public:
    universe(int n_agents, int bound, call_type type);

    int agents() const noexcept { return n_; }
    int bound() const noexcept { return bound_; }
    call_type type() const noexcept { return type_; }

    /// Number of distinct calls, n(n-1).
    int calls() const noexcept { return m_; }

    seq_index size() const noexcept { return offsets_[static_cast<std::size_t>(bound_) + 1]; }

    int call_id(call c) const;
    call call_at(int id) const;

    seq_index index_of(std::span<const call> seq) const;
    std::optional<seq_index> try_index_of(std::span<const call> seq) const;
    std::vector<call> sequence_at(seq_index s) const;
    std::string format_member(seq_index s) const;

    int length_of(seq_index s) const;
    seq_index first_of_length(int len) const { return offsets_[static_cast<std::size_t>(len)]; }
    seq_index count_of_length(int len) const;

    /// Drop the last call; s must be non-empty.
    seq_index parent_of(seq_index s) const;
    int last_call_of(seq_index s) const;
    /// Append a call; empty when the result would exceed the bound.
    std::optional<seq_index> child_of(seq_index s, int call_id) const;

    /// Secret set of agent a after applying member s to the initial
    /// situation (under this universe's direction).
    secret_set secrets(seq_index s, agent_id a) const
    {
        return secrets_[s * static_cast<seq_index>(n_) + static_cast<seq_index>(a)];
    }

    gossip_situation situation_at(seq_index s) const;

private:
    int n_;
    int bound_;
    call_type type_;
    int m_;
    std::vector<seq_index> offsets_; // offsets_[k] = first index of length k
    std::vector<secret_set> secrets_;
};

} // namespace gossipscope
