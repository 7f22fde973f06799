#pragma once

#include "gossipscope/logic.hpp"

namespace gossipscope
{

/// Square boolean relation over a universe's member indices, kept
/// symmetric by construction.
class pair_table
{
public:
    explicit pair_table(seq_index size) : size_(size), bits_(size * size, 0) {}

    seq_index size() const noexcept { return size_; }

    bool at(seq_index i, seq_index j) const { return bits_[i * size_ + j] != 0; }

    /// Sets both orientations.
    void set(seq_index i, seq_index j)
    {
        bits_[i * size_ + j] = 1;
        bits_[j * size_ + i] = 1;
    }

    friend bool operator==(const pair_table&, const pair_table&) = default;

private:
    seq_index size_;
    std::vector<char> bits_;
};

/// Brute-force reference for the one-step relation: starting from the pair
/// of empty sequences, every rule of the table is applied to every known
/// pair until nothing changes.  No memoization, no recursion; sequences
/// and situations are rebuilt from first principles.
pair_table oracle_approx_table(const universe& u, agent_id a);

/// Reflexive-transitive closure by repeated boolean composition.
pair_table oracle_closure(const pair_table& t);

/// Reference truth definition: atoms replay the call sequence from the
/// initial situation, knowledge scans the whole universe against the
/// closure row.  No caching.
bool oracle_eval(const formula& f, seq_index s, const universe& u,
                 const std::vector<pair_table>& closure_per_agent);

} // namespace gossipscope
