// Development driver: derives reference values from the oracle before they
// are frozen into tests.
#include "gossipscope/classify.hpp"
#include "gossipscope/oracle.hpp"
#include "gossipscope/protocol.hpp"

#include <cstdio>

using namespace gossipscope;

int main()
{
    // Class count for agent a at n=3, N=2 under (p2, pushpull, after),
    // straight from the oracle's bottom-up table.
    {
        universe u(3, 2, call_type{privacy::p2, direction::pushpull, observance::after});
        pair_table closure = oracle_closure(oracle_approx_table(u, 0));
        int classes = 0;
        for (seq_index s = 0; s < u.size(); ++s) {
            bool least = true;
            for (seq_index t = 0; t < s && least; ++t)
                if (closure.at(s, t))
                    least = false;
            if (least)
                ++classes;
        }
        std::printf("oracle classes (n=3, N=2, p2/pushpull/after, agent a): %d\n", classes);

        equivalence_index idx = build_equivalence_index(u);
        std::printf("engine classes: %d\n", idx.class_count(0));
    }

    // The p3 class of "b<>c" for agent a at n=3, N=2.
    {
        universe u(3, 2, call_type{privacy::p3, direction::pushpull, observance::after});
        pair_table closure = oracle_closure(oracle_approx_table(u, 0));
        const seq_index bc = u.index_of(parse_pair_sequence("bc", 3));
        std::printf("oracle p3 class of b<>c (agent a):");
        for (seq_index s = 0; s < u.size(); ++s)
            if (closure.at(bc, s))
                std::printf(" [%s]", u.format_member(s).c_str());
        std::printf("\n");
    }

    // Engine/oracle agreement across every pair of a small universe for a
    // few representative types.
    for (call_type t : {call_type{privacy::p1, direction::pushpull, observance::after},
                        call_type{privacy::p2, direction::pull, observance::before},
                        call_type{privacy::p3, direction::push, observance::after}}) {
        universe u(3, 3, t);
        equivalence_index idx = build_equivalence_index(u);
        for (agent_id a = 0; a < 3; ++a) {
            pair_table closure = oracle_closure(oracle_approx_table(u, a));
            std::uint64_t mismatches = 0;
            for (seq_index i = 0; i < u.size(); ++i)
                for (seq_index j = 0; j < u.size(); ++j)
                    if (closure.at(i, j) != (idx.class_of(a, i) == idx.class_of(a, j)))
                        ++mismatches;
            std::printf("type %s agent %c: %llu mismatches\n", format_call_type(t).c_str(),
                        agent_name(a), static_cast<unsigned long long>(mismatches));
        }
    }
    return 0;
}
