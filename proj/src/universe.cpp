#include "gossipscope/universe.hpp"

namespace gossipscope
{

namespace
{

// Members are materialized with one situation per member, so very large
// universes are refused up front.
constexpr seq_index max_universe_members = seq_index{1} << 26;

} // namespace

universe::universe(int n_agents, int bound, call_type type)
    : n_(n_agents), bound_(bound), type_(type), m_(n_agents * (n_agents - 1))
{
    if (n_agents < min_agents || n_agents > max_agents)
        throw domain_error("agent count must lie in [3, 26]");
    if (bound < 0)
        throw domain_error("bound must be non-negative");

    offsets_.resize(static_cast<std::size_t>(bound_) + 2);
    offsets_[0] = 0;
    seq_index block = 1;
    for (int k = 0; k <= bound_; ++k) {
        offsets_[static_cast<std::size_t>(k) + 1] = offsets_[static_cast<std::size_t>(k)] + block;
        if (offsets_[static_cast<std::size_t>(k) + 1] > max_universe_members)
            throw resource_error("universe with " + std::to_string(n_agents) + " agents and bound " +
                                 std::to_string(bound) + " has too many members");
        block *= static_cast<seq_index>(m_);
    }

    // Situations, filled in index order so every parent precedes its
    // children.
    secrets_.resize(size() * static_cast<seq_index>(n_));
    for (int a = 0; a < n_; ++a)
        secrets_[static_cast<seq_index>(a)] = secret_of(a);
    for (seq_index s = 1; s < size(); ++s) {
        const seq_index p = parent_of(s);
        const call c = call_at(last_call_of(s));
        const secret_set* src = &secrets_[p * static_cast<seq_index>(n_)];
        secret_set* dst = &secrets_[s * static_cast<seq_index>(n_)];
        for (int a = 0; a < n_; ++a)
            dst[a] = src[a];
        const secret_set merged = src[c.caller] | src[c.callee];
        switch (type_.d) {
        case direction::pushpull:
            dst[c.caller] = merged;
            dst[c.callee] = merged;
            break;
        case direction::push: dst[c.callee] = merged; break;
        case direction::pull: dst[c.caller] = merged; break;
        }
    }
}

int universe::call_id(call c) const
{
    if (c.caller < 0 || c.caller >= n_ || c.callee < 0 || c.callee >= n_ || c.caller == c.callee)
        throw domain_error("call outside this universe's agent range");
    return c.caller * (n_ - 1) + (c.callee > c.caller ? c.callee - 1 : c.callee);
}

call universe::call_at(int id) const
{
    if (id < 0 || id >= m_)
        throw domain_error("call id out of range");
    const agent_id caller = id / (n_ - 1);
    int rest = id % (n_ - 1);
    const agent_id callee = rest >= caller ? rest + 1 : rest;
    return call{caller, callee};
}

std::optional<seq_index> universe::try_index_of(std::span<const call> seq) const
{
    if (static_cast<int>(seq.size()) > bound_)
        return std::nullopt;
    seq_index local = 0;
    for (call c : seq) {
        if (c.caller < 0 || c.caller >= n_ || c.callee < 0 || c.callee >= n_ || c.caller == c.callee)
            throw domain_error("sequence mentions an agent outside this universe");
        local = local * static_cast<seq_index>(m_) + static_cast<seq_index>(call_id(c));
    }
    return offsets_[seq.size()] + local;
}

seq_index universe::index_of(std::span<const call> seq) const
{
    if (auto s = try_index_of(seq))
        return *s;
    throw domain_error("sequence of length " + std::to_string(seq.size()) +
                       " lies outside the bound-" + std::to_string(bound_) + " universe");
}

int universe::length_of(seq_index s) const
{
    if (s >= size())
        throw domain_error("member index out of range");
    int len = 0;
    while (offsets_[static_cast<std::size_t>(len) + 1] <= s)
        ++len;
    return len;
}

seq_index universe::count_of_length(int len) const
{
    return offsets_[static_cast<std::size_t>(len) + 1] - offsets_[static_cast<std::size_t>(len)];
}

seq_index universe::parent_of(seq_index s) const
{
    const int len = length_of(s);
    if (len == 0)
        throw domain_error("the empty sequence has no parent");
    const seq_index local = s - offsets_[static_cast<std::size_t>(len)];
    return offsets_[static_cast<std::size_t>(len) - 1] + local / static_cast<seq_index>(m_);
}

int universe::last_call_of(seq_index s) const
{
    const int len = length_of(s);
    if (len == 0)
        throw domain_error("the empty sequence has no last call");
    const seq_index local = s - offsets_[static_cast<std::size_t>(len)];
    return static_cast<int>(local % static_cast<seq_index>(m_));
}

std::optional<seq_index> universe::child_of(seq_index s, int call_id) const
{
    const int len = length_of(s);
    if (len >= bound_)
        return std::nullopt;
    const seq_index local = s - offsets_[static_cast<std::size_t>(len)];
    return offsets_[static_cast<std::size_t>(len) + 1] + local * static_cast<seq_index>(m_) +
           static_cast<seq_index>(call_id);
}

std::vector<call> universe::sequence_at(seq_index s) const
{
    const int len = length_of(s);
    std::vector<call> seq(static_cast<std::size_t>(len));
    seq_index cur = s;
    for (int k = len; k > 0; --k) {
        seq[static_cast<std::size_t>(k) - 1] = call_at(last_call_of(cur));
        cur = parent_of(cur);
    }
    return seq;
}

std::string universe::format_member(seq_index s) const
{
    const auto seq = sequence_at(s);
    if (seq.empty())
        return "(empty)";
    return format_sequence(seq, type_.d);
}

gossip_situation universe::situation_at(seq_index s) const
{
    if (s >= size())
        throw domain_error("member index out of range");
    std::vector<secret_set> sets(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a)
        sets[static_cast<std::size_t>(a)] = secrets(s, a);
    return gossip_situation(n_, std::move(sets));
}

} // namespace gossipscope
