#include "gossipscope/oracle.hpp"

namespace gossipscope
{

namespace
{

std::vector<call> all_calls(int n)
{
    std::vector<call> out;
    for (agent_id x = 0; x < n; ++x)
        for (agent_id y = 0; y < n; ++y)
            if (x != y)
                out.push_back(call{x, y});
    return out;
}

std::vector<call> appended(const std::vector<call>& seq, call c)
{
    std::vector<call> out = seq;
    out.push_back(c);
    return out;
}

} // namespace

pair_table oracle_approx_table(const universe& u, agent_id a)
{
    if (a < 0 || a >= u.agents())
        throw domain_error("agent out of range");
    if (u.size() > 5000)
        throw resource_error("the oracle table is quadratic; universe too large");

    const int n = u.agents();
    const call_type t = u.type();
    const gossip_situation initial = initial_situation(n);
    const std::vector<call> calls = all_calls(n);

    // Every member sequence, spelled out.
    std::vector<std::vector<call>> seqs(u.size());
    for (seq_index s = 0; s < u.size(); ++s)
        seqs[s] = u.sequence_at(s);

    const auto index_of = [&](const std::vector<call>& seq) -> std::optional<seq_index> {
        return u.try_index_of(seq);
    };
    const auto secrets_after = [&](const std::vector<call>& seq, agent_id who) -> secret_set {
        return apply_sequence(initial, seq, t.d).secrets(who);
    };

    pair_table table(u.size());
    table.set(0, 0); // the pair of empty sequences

    bool changed = true;
    while (changed) {
        changed = false;
        for (seq_index i = 0; i < u.size(); ++i) {
            for (seq_index j = 0; j < u.size(); ++j) {
                if (!table.at(i, j))
                    continue;
                const std::vector<call>& c = seqs[i];
                const std::vector<call>& d = seqs[j];

                const auto put = [&](std::optional<seq_index> x, std::optional<seq_index> y) {
                    if (!x || !y)
                        return;
                    if (!table.at(*x, *y)) {
                        table.set(*x, *y);
                        changed = true;
                    }
                };

                for (call e : calls) {
                    if (!involved(a, e)) {
                        switch (t.p) {
                        case privacy::p1:
                            put(index_of(appended(c, e)), index_of(appended(d, e)));
                            break;
                        case privacy::p2:
                            for (call f : calls)
                                if (!involved(a, f))
                                    put(index_of(appended(c, e)), index_of(appended(d, f)));
                            break;
                        case privacy::p3:
                            put(index_of(appended(c, e)), j);
                            put(i, index_of(appended(d, e)));
                            break;
                        }
                    } else if (!affected(a, e, t.d)) {
                        put(index_of(appended(c, e)), index_of(appended(d, e)));
                    } else if (t.o == observance::after) {
                        if (secrets_after(appended(c, e), a) == secrets_after(appended(d, e), a))
                            put(index_of(appended(c, e)), index_of(appended(d, e)));
                    } else {
                        const agent_id b = partner(a, e);
                        if (secrets_after(c, b) == secrets_after(d, b))
                            put(index_of(appended(c, e)), index_of(appended(d, e)));
                    }
                }
            }
        }
    }
    return table;
}

pair_table oracle_closure(const pair_table& t)
{
    const seq_index size = t.size();
    pair_table r = t;
    for (seq_index i = 0; i < size; ++i)
        r.set(i, i);

    bool changed = true;
    while (changed) {
        changed = false;
        pair_table next = r;
        for (seq_index i = 0; i < size; ++i)
            for (seq_index k = 0; k < size; ++k)
                if (r.at(i, k))
                    for (seq_index j = 0; j < size; ++j)
                        if (r.at(k, j) && !next.at(i, j)) {
                            next.set(i, j);
                            changed = true;
                        }
        r = next;
    }
    return r;
}

bool oracle_eval(const formula& f, seq_index s, const universe& u,
                 const std::vector<pair_table>& closure_per_agent)
{
    switch (f.kind()) {
    case formula_kind::familiar: {
        if (f.agent() >= u.agents() || f.owner() >= u.agents())
            throw domain_error("formula mentions an agent outside the universe");
        const auto seq = u.sequence_at(s);
        const gossip_situation sit = apply_sequence(initial_situation(u.agents()), seq, u.type().d);
        return (sit.secrets(f.agent()) & secret_of(f.owner())) != 0;
    }
    case formula_kind::negation: return !oracle_eval(*f.child(), s, u, closure_per_agent);
    case formula_kind::conjunction:
        return oracle_eval(*f.left(), s, u, closure_per_agent) &&
               oracle_eval(*f.right(), s, u, closure_per_agent);
    case formula_kind::disjunction:
        return oracle_eval(*f.left(), s, u, closure_per_agent) ||
               oracle_eval(*f.right(), s, u, closure_per_agent);
    case formula_kind::knows: {
        const auto& closure = closure_per_agent.at(static_cast<std::size_t>(f.agent()));
        for (seq_index d = 0; d < u.size(); ++d)
            if (closure.at(s, d) && !oracle_eval(*f.child(), d, u, closure_per_agent))
                return false;
        return true;
    }
    }
    throw domain_error("malformed formula");
}

} // namespace gossipscope
