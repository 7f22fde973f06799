#include "gossipscope/classify.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>

namespace gossipscope
{

namespace
{

int type_index(call_type t)
{
    return static_cast<int>(t.p) * 6 + static_cast<int>(t.d) * 2 + static_cast<int>(t.o);
}

constexpr call_type T(privacy p, direction d, observance o)
{
    return call_type{p, d, o};
}

} // namespace

expected_preorder::expected_preorder(int n_agents) : n_(n_agents)
{
    // Node identification: the six p1 types collapse; with exactly three
    // agents the two (p2, pushpull, *) types collapse as well.
    for (int k = 0; k < 18; ++k)
        node_by_type_[static_cast<std::size_t>(k)] = k;
    const int p1_node = type_index(T(privacy::p1, direction::pushpull, observance::after));
    for (direction d : {direction::pushpull, direction::push, direction::pull})
        for (observance o : {observance::after, observance::before})
            node_by_type_[static_cast<std::size_t>(type_index(T(privacy::p1, d, o)))] = p1_node;
    if (n_ == 3) {
        const int c2 = type_index(T(privacy::p2, direction::pushpull, observance::after));
        node_by_type_[static_cast<std::size_t>(
            type_index(T(privacy::p2, direction::pushpull, observance::before)))] = c2;
    }

    std::vector<std::pair<call_type, call_type>> arrows;
    const call_type p1 = T(privacy::p1, direction::pushpull, observance::after);
    if (n_ == 3) {
        const call_type c2 = T(privacy::p2, direction::pushpull, observance::after);
        arrows.emplace_back(p1, c2);
        arrows.emplace_back(c2, T(privacy::p3, direction::pushpull, observance::before));
        arrows.emplace_back(T(privacy::p3, direction::pushpull, observance::before),
                            T(privacy::p3, direction::pushpull, observance::after));
        for (direction d : {direction::push, direction::pull}) {
            arrows.emplace_back(p1, T(privacy::p2, d, observance::before));
            arrows.emplace_back(T(privacy::p2, d, observance::before), c2);
            arrows.emplace_back(T(privacy::p2, d, observance::after), c2);
            arrows.emplace_back(T(privacy::p2, d, observance::before),
                                T(privacy::p3, d, observance::before));
            arrows.emplace_back(T(privacy::p2, d, observance::before),
                                T(privacy::p2, d, observance::after));
            arrows.emplace_back(T(privacy::p3, d, observance::before),
                                T(privacy::p3, d, observance::after));
            arrows.emplace_back(T(privacy::p2, d, observance::after),
                                T(privacy::p3, d, observance::after));
        }
    } else {
        for (direction d : {direction::pushpull, direction::push, direction::pull}) {
            arrows.emplace_back(p1, T(privacy::p2, d, observance::before));
            arrows.emplace_back(T(privacy::p2, d, observance::before),
                                T(privacy::p3, d, observance::before));
            arrows.emplace_back(T(privacy::p2, d, observance::before),
                                T(privacy::p2, d, observance::after));
            arrows.emplace_back(T(privacy::p3, d, observance::before),
                                T(privacy::p3, d, observance::after));
            arrows.emplace_back(T(privacy::p2, d, observance::after),
                                T(privacy::p3, d, observance::after));
        }
    }

    for (int k = 0; k < 18; ++k)
        reach_[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = true;
    for (const auto& [from, to] : arrows)
        reach_[static_cast<std::size_t>(node_by_type_[static_cast<std::size_t>(type_index(from))])]
              [static_cast<std::size_t>(node_by_type_[static_cast<std::size_t>(type_index(to))])] =
                  true;
    for (int k = 0; k < 18; ++k)
        for (int i = 0; i < 18; ++i)
            for (int j = 0; j < 18; ++j)
                if (reach_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] &&
                    reach_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
                    reach_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
}

const expected_preorder& expected_preorder::figure(int n_agents)
{
    if (n_agents < min_agents)
        throw domain_error("at least three agents are required");
    static const expected_preorder three(3);
    static const expected_preorder many(4);
    return n_agents == 3 ? three : many;
}

int expected_preorder::node_of(call_type t) const
{
    return node_by_type_[static_cast<std::size_t>(type_index(t))];
}

bool expected_preorder::includes(call_type t1, call_type t2) const
{
    return reach_[static_cast<std::size_t>(node_of(t1))][static_cast<std::size_t>(node_of(t2))];
}

std::string format_verdict(comparison_verdict v)
{
    switch (v) {
    case comparison_verdict::equal: return "Equal";
    case comparison_verdict::left_strict_subset: return "LeftStrictSubset";
    case comparison_verdict::right_strict_subset: return "RightStrictSubset";
    case comparison_verdict::incomparable: return "Incomparable";
    }
    return "?";
}

comparison_verdict expected_verdict(call_type t1, call_type t2, int n_agents)
{
    const expected_preorder& fig = expected_preorder::figure(n_agents);
    const bool le = fig.includes(t1, t2);
    const bool ge = fig.includes(t2, t1);
    if (le && ge)
        return comparison_verdict::equal;
    if (le)
        return comparison_verdict::left_strict_subset;
    if (ge)
        return comparison_verdict::right_strict_subset;
    return comparison_verdict::incomparable;
}

// Empirical comparison -------------------------------------------------

namespace
{

struct indexed_type
{
    universe space;
    equivalence_index index;

    indexed_type(call_type t, int n, int bound, const index_build_options& opts)
        : space(n, bound, t), index(build_equivalence_index(space, opts))
    {
    }
};

// A pair related under "from" but separated under "to" disproves
// inclusion of ~from in ~to; partition refinement finds one in a single
// pass per agent.
std::optional<comparison_witness> refinement_counterexample(const indexed_type& from,
                                                            const indexed_type& to)
{
    const int n = from.space.agents();
    for (agent_id a = 0; a < n; ++a) {
        std::vector<seq_index> rep(static_cast<std::size_t>(from.index.class_count(a)),
                                   static_cast<seq_index>(-1));
        for (seq_index s = 0; s < from.space.size(); ++s) {
            const auto cls = static_cast<std::size_t>(from.index.class_of(a, s));
            if (rep[cls] == static_cast<seq_index>(-1)) {
                rep[cls] = s;
            } else if (to.index.class_of(a, s) != to.index.class_of(a, rep[cls])) {
                comparison_witness w;
                w.agent = a;
                w.seq_a = from.space.sequence_at(rep[cls]);
                w.seq_b = from.space.sequence_at(s);
                return w;
            }
        }
    }
    return std::nullopt;
}

} // namespace

comparison_result compare_types(call_type t1, call_type t2, int n_agents, int bound,
                                const index_build_options& opts)
{
    if (n_agents < min_agents)
        throw domain_error("at least three agents are required");
    if (bound < 2)
        throw domain_error("type comparison needs bound >= 2");

    const indexed_type left(t1, n_agents, bound, opts);
    const indexed_type right(t2, n_agents, bound, opts);

    auto in_left_only = refinement_counterexample(left, right);
    auto in_right_only = refinement_counterexample(right, left);

    comparison_result result;
    result.bound = bound;
    if (!in_left_only && !in_right_only) {
        result.verdict = comparison_verdict::equal;
    } else if (!in_left_only) {
        result.verdict = comparison_verdict::left_strict_subset;
    } else if (!in_right_only) {
        result.verdict = comparison_verdict::right_strict_subset;
    } else {
        result.verdict = comparison_verdict::incomparable;
    }
    if (in_left_only) {
        in_left_only->related_under_left = true;
        result.witnesses.push_back(std::move(*in_left_only));
    }
    if (in_right_only) {
        in_right_only->related_under_left = false;
        result.witnesses.push_back(std::move(*in_right_only));
    }
    return result;
}

// Witness fixtures --------------------------------------------------------

std::vector<call> parse_pair_sequence(std::string_view text, int n_agents)
{
    std::vector<call> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == ',') {
            ++pos;
            continue;
        }
        if (pos + 1 >= text.size())
            throw domain_error("dangling agent letter in pair sequence \"" + std::string(text) +
                               "\"");
        out.push_back(call{agent_from_name(text[pos], n_agents),
                           agent_from_name(text[pos + 1], n_agents)});
        pos += 2;
    }
    return out;
}

int witness_bound(const separation_witness& w)
{
    const auto count = [](std::string_view s) {
        return static_cast<int>(std::count_if(s.begin(), s.end(), [](char c) { return c != ','; })) / 2;
    };
    return std::max(2, std::max(count(w.seq_a), count(w.seq_b)));
}

const std::vector<separation_witness>& separation_witnesses()
{
    static const std::vector<separation_witness> table = [] {
        std::vector<separation_witness> w;
        const std::array<direction, 3> dirs{direction::pushpull, direction::push, direction::pull};
        const std::array<observance, 2> obs{observance::after, observance::before};
        constexpr auto PP = direction::pushpull;
        constexpr auto PUSH = direction::push;
        constexpr auto PULL = direction::pull;
        constexpr auto AFT = observance::after;
        constexpr auto BEF = observance::before;

        const auto add = [&](std::string label, call_type related, call_type unrelated,
                             const char* sa, const char* sb, int min_n, bool only3 = false) {
            w.push_back({std::move(label), related, unrelated, sa, sb, min_n, only3});
        };

        // p2 cannot tell which outsiders talked; p1 can.
        for (direction d : dirs)
            for (observance o : obs)
                add("swapped outsider call", T(privacy::p2, d, o), T(privacy::p1, d, o), "bc", "cb",
                    3);

        // p3 cannot tell whether outsiders talked at all; p2 counts calls.
        for (direction d : dirs)
            for (observance o : obs)
                add("absorbed outsider call", T(privacy::p3, d, o), T(privacy::p2, d, o), "bc", "",
                    3);

        // Observance split within p2.
        add("p2 observance split (pushpull)", T(privacy::p2, PP, AFT), T(privacy::p2, PP, BEF),
            "ab,ac,bc,ab", "ab,ac,cd,ab", 4);
        add("p2 observance split (push)", T(privacy::p2, PUSH, AFT), T(privacy::p2, PUSH, BEF),
            "ca,bc,ba", "ca,cb,ba", 3);
        add("p2 observance split (pull)", T(privacy::p2, PULL, AFT), T(privacy::p2, PULL, BEF),
            "ac,cb,ab", "ac,bc,ab", 3);

        // Observance split within p3.
        add("p3 observance split (pushpull)", T(privacy::p3, PP, AFT), T(privacy::p3, PP, BEF),
            "ac,ab", "ac,bc,ab", 3);
        add("p3 observance split (push)", T(privacy::p3, PUSH, AFT), T(privacy::p3, PUSH, BEF),
            "ca,ba", "ca,cb,ba", 3);
        add("p3 observance split (pull)", T(privacy::p3, PULL, AFT), T(privacy::p3, PULL, BEF),
            "ac,ab", "ac,bc,ab", 3);

        // With exactly three agents every outsider call is the same
        // push-pull exchange, so the directed p2 types sit below
        // (p2, pushpull, *); the witnesses separate them.
        for (observance o1 : obs)
            for (observance o2 : obs) {
                add("three-agent pushpull over push", T(privacy::p2, PP, o2),
                    T(privacy::p2, PUSH, o1), "cb,ca", "bc,ca", 3, true);
                add("three-agent pushpull over pull", T(privacy::p2, PP, o2),
                    T(privacy::p2, PULL, o1), "bc,ac", "cb,ac", 3, true);
            }

        // Direction splits within p2.
        for (observance o1 : obs)
            for (observance o2 : obs) {
                add("p2 pull vs pushpull", T(privacy::p2, PULL, o1), T(privacy::p2, PP, o2),
                    "bc,ca", "bd,ca", 4);
                add("p2 pushpull vs pull", T(privacy::p2, PP, o2), T(privacy::p2, PULL, o1),
                    "bc,ac", "cb,ac", 4);
                add("p2 push vs pushpull", T(privacy::p2, PUSH, o1), T(privacy::p2, PP, o2),
                    "cb,ac", "db,ac", 4);
                add("p2 pushpull vs push", T(privacy::p2, PP, o2), T(privacy::p2, PUSH, o1),
                    "cb,ca", "bc,ca", 4);
                add("p2 push vs pull", T(privacy::p2, PUSH, o1), T(privacy::p2, PULL, o2), "bc,ac",
                    "cb,ac", 3);
                add("p2 pull vs push", T(privacy::p2, PULL, o2), T(privacy::p2, PUSH, o1), "cb,ca",
                    "bc,ca", 3);
            }

        // Direction splits within p3.
        for (observance o1 : obs)
            for (observance o2 : obs) {
                add("p3 pull vs pushpull", T(privacy::p3, PULL, o1), T(privacy::p3, PP, o2),
                    "bc,ca", "ca", 3);
                add("p3 pushpull vs pull", T(privacy::p3, PP, o2), T(privacy::p3, PULL, o1),
                    "bc,ac", "cb,ac", 3);
                add("p3 push vs pushpull", T(privacy::p3, PUSH, o1), T(privacy::p3, PP, o2),
                    "cb,ac", "ac", 3);
                add("p3 pushpull vs push", T(privacy::p3, PP, o2), T(privacy::p3, PUSH, o1),
                    "cb,ca", "bc,ca", 3);
                add("p3 push vs pull", T(privacy::p3, PUSH, o1), T(privacy::p3, PULL, o2), "bc,ac",
                    "cb,ac", 3);
                add("p3 pull vs push", T(privacy::p3, PULL, o2), T(privacy::p3, PUSH, o1), "cb,ca",
                    "bc,ca", 3);
            }

        // Three-agent crossings of (p2, pushpull, after) with the directed
        // full-privacy types.
        add("three-agent p2 pushpull vs p3 push", T(privacy::p2, PP, AFT),
            T(privacy::p3, PUSH, AFT), "cb,ca", "bc,ca", 3, true);
        add("three-agent p3 push vs p2 pushpull", T(privacy::p3, PUSH, AFT),
            T(privacy::p2, PP, AFT), "bc", "", 3, true);
        add("three-agent p2 pushpull vs p3 pull", T(privacy::p2, PP, AFT),
            T(privacy::p3, PULL, AFT), "bc,ac", "cb,ac", 3, true);
        add("three-agent p3 pull vs p2 pushpull", T(privacy::p3, PULL, AFT),
            T(privacy::p2, PP, AFT), "bc", "", 3, true);

        // Crossings of (p2, d1, before) with (p3, d2, after).
        add("p2 push/before vs p3 pull/after", T(privacy::p2, PUSH, BEF), T(privacy::p3, PULL, AFT),
            "cb,ab", "bc,ab", 3);
        add("p3 pull/after vs p2 push/before", T(privacy::p3, PULL, AFT), T(privacy::p2, PUSH, BEF),
            "bc", "", 3);
        add("p2 push/before vs p3 pushpull/after", T(privacy::p2, PUSH, BEF),
            T(privacy::p3, PP, AFT), "cb,ac", "db,ac", 4);
        add("p3 pushpull/after vs p2 push/before", T(privacy::p3, PP, AFT),
            T(privacy::p2, PUSH, BEF), "bc", "", 4);
        add("p2 pull/before vs p3 push/after", T(privacy::p2, PULL, BEF), T(privacy::p3, PUSH, AFT),
            "bc,ba", "cb,ba", 3);
        add("p3 push/after vs p2 pull/before", T(privacy::p3, PUSH, AFT), T(privacy::p2, PULL, BEF),
            "bc", "", 3);
        add("p2 pull/before vs p3 pushpull/after", T(privacy::p2, PULL, BEF),
            T(privacy::p3, PP, AFT), "bc,ca", "bd,ca", 4);
        add("p3 pushpull/after vs p2 pull/before", T(privacy::p3, PP, AFT),
            T(privacy::p2, PULL, BEF), "bc", "", 4);
        add("p2 pushpull/before vs p3 push/after", T(privacy::p2, PP, BEF),
            T(privacy::p3, PUSH, AFT), "cb,ca", "bc,ca", 4);
        add("p3 push/after vs p2 pushpull/before", T(privacy::p3, PUSH, AFT),
            T(privacy::p2, PP, BEF), "bc", "", 4);
        add("p2 pushpull/before vs p3 pull/after", T(privacy::p2, PP, BEF),
            T(privacy::p3, PULL, AFT), "bc,ac", "cb,ac", 4);
        add("p3 pull/after vs p2 pushpull/before", T(privacy::p3, PULL, AFT),
            T(privacy::p2, PP, BEF), "bc", "", 4);

        // Crossings of (p2, d, after) with (p3, d, before).
        add("p2 pushpull/after vs p3 pushpull/before", T(privacy::p2, PP, AFT),
            T(privacy::p3, PP, BEF), "ab,ac,bc,ab", "ab,ac,cd,ab", 4);
        add("p3 pushpull/before vs p2 pushpull/after", T(privacy::p3, PP, BEF),
            T(privacy::p2, PP, AFT), "bc", "", 4);
        add("p2 push/after vs p3 push/before", T(privacy::p2, PUSH, AFT), T(privacy::p3, PUSH, BEF),
            "ca,bc,ba", "ca,cb,ba", 3);
        add("p3 push/before vs p2 push/after", T(privacy::p3, PUSH, BEF), T(privacy::p2, PUSH, AFT),
            "bc", "", 3);
        add("p2 pull/after vs p3 pull/before", T(privacy::p2, PULL, AFT), T(privacy::p3, PULL, BEF),
            "ac,cb,ab", "ac,bc,ab", 3);
        add("p3 pull/before vs p2 pull/after", T(privacy::p3, PULL, BEF), T(privacy::p2, PULL, AFT),
            "bc", "", 3);

        return w;
    }();
    return table;
}

witness_check check_separation_witness(const separation_witness& w, int n_agents,
                                       const index_build_options& opts)
{
    if (n_agents < w.min_agents)
        throw domain_error("witness \"" + w.label + "\" needs at least " +
                           std::to_string(w.min_agents) + " agents");
    if (w.only_three_agents && n_agents != 3)
        throw domain_error("witness \"" + w.label + "\" separates only with exactly three agents");

    witness_check result;
    result.bound = witness_bound(w);
    const std::vector<call> a = parse_pair_sequence(w.seq_a, n_agents);
    const std::vector<call> b = parse_pair_sequence(w.seq_b, n_agents);

    const indexed_type rel(w.related, n_agents, result.bound, opts);
    result.related_holds = indistinguishable(a, b, 0, rel.space, rel.index);

    const indexed_type unrel(w.unrelated, n_agents, result.bound, opts);
    result.unrelated_separates = !indistinguishable(a, b, 0, unrel.space, unrel.index);
    return result;
}

// Preorder verification ----------------------------------------------------

namespace
{

// Looks for a fixture establishing "a pair related under `related` that
// `unrelated` separates" and runs it at its own bound.
std::optional<std::string> fixture_evidence(call_type related, call_type unrelated, int n_agents,
                                            std::map<std::pair<int, int>, std::unique_ptr<indexed_type>>& cache,
                                            const index_build_options& opts)
{
    for (const separation_witness& w : separation_witnesses()) {
        if (!(w.related == related) || !(w.unrelated == unrelated))
            continue;
        if (w.min_agents > n_agents || (w.only_three_agents && n_agents != 3))
            continue;
        const int bound = witness_bound(w);
        const auto side = [&](call_type t) -> const indexed_type& {
            const auto key = std::make_pair(type_index(t), bound);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, std::make_unique<indexed_type>(t, n_agents, bound, opts))
                         .first;
            return *it->second;
        };
        const std::vector<call> a = parse_pair_sequence(w.seq_a, n_agents);
        const std::vector<call> b = parse_pair_sequence(w.seq_b, n_agents);
        const bool related_holds = indistinguishable(a, b, 0, side(related).space, side(related).index);
        const bool separated = !indistinguishable(a, b, 0, side(unrelated).space, side(unrelated).index);
        if (related_holds && separated)
            return "witness \"" + w.label + "\" at bound " + std::to_string(bound);
    }
    return std::nullopt;
}

} // namespace

preorder_report verify_preorder(int n_agents, int bound, const index_build_options& opts)
{
    if (n_agents < min_agents)
        throw domain_error("at least three agents are required");
    if (bound < 2)
        throw domain_error("preorder verification needs bound >= 2");

    preorder_report report;
    report.agents = n_agents;
    report.bound = bound;

    const auto& types = all_call_types();
    std::vector<std::unique_ptr<indexed_type>> sides(types.size());

    index_build_options build_opts = opts;
#pragma omp parallel for schedule(dynamic, 1) if (opts.parallel)
    for (int k = 0; k < static_cast<int>(types.size()); ++k)
        sides[static_cast<std::size_t>(k)] =
            std::make_unique<indexed_type>(types[static_cast<std::size_t>(k)], n_agents, bound,
                                           build_opts);

    std::map<std::pair<int, int>, std::unique_ptr<indexed_type>> fixture_cache;

    for (std::size_t i = 0; i < types.size(); ++i) {
        for (std::size_t j = i + 1; j < types.size(); ++j) {
            preorder_pair_entry entry;
            entry.t1 = types[i];
            entry.t2 = types[j];
            entry.expected = expected_verdict(entry.t1, entry.t2, n_agents);

            const auto in_1_only = refinement_counterexample(*sides[i], *sides[j]);
            const auto in_2_only = refinement_counterexample(*sides[j], *sides[i]);
            entry.inclusion_left_in_right = !in_1_only;
            entry.inclusion_right_in_left = !in_2_only;

            // Evidence that some pair lies in ~related and outside
            // ~unrelated: an in-bound counterexample, or a fixture checked
            // at its own (possibly larger) bound.
            const auto separation = [&](call_type related, call_type unrelated,
                                        const std::optional<comparison_witness>& in_bound)
                -> std::optional<std::string> {
                if (in_bound)
                    return "in-bound pair (" +
                           format_sequence(in_bound->seq_a, related.d) + " , " +
                           format_sequence(in_bound->seq_b, related.d) + ") for agent " +
                           std::string(1, agent_name(in_bound->agent));
                return fixture_evidence(related, unrelated, n_agents, fixture_cache, build_opts);
            };

            const std::string pair_name =
                format_call_type(entry.t1) + " vs " + format_call_type(entry.t2);
            switch (entry.expected) {
            case comparison_verdict::equal:
                if (entry.inclusion_left_in_right && entry.inclusion_right_in_left) {
                    entry.confirmed = true;
                    entry.evidence = "inclusion both ways at bound";
                } else {
                    entry.deviation = pair_name + ": expected equality, inclusion fails at bound";
                }
                break;
            case comparison_verdict::left_strict_subset:
            case comparison_verdict::right_strict_subset: {
                const bool left_finer = entry.expected == comparison_verdict::left_strict_subset;
                const bool fine_in_coarse =
                    left_finer ? entry.inclusion_left_in_right : entry.inclusion_right_in_left;
                const call_type coarse = left_finer ? entry.t2 : entry.t1;
                const call_type fine = left_finer ? entry.t1 : entry.t2;
                if (!fine_in_coarse) {
                    entry.deviation = pair_name + ": expected strict inclusion, the finer type "
                                                  "is not included at bound";
                    break;
                }
                const auto evidence =
                    separation(coarse, fine, left_finer ? in_2_only : in_1_only);
                if (evidence) {
                    entry.confirmed = true;
                    entry.evidence = "inclusion at bound; strictness by " + *evidence;
                } else {
                    entry.deviation = pair_name +
                                      ": strictness not witnessed at this bound (bound artifact; "
                                      "raise the bound)";
                }
                break;
            }
            case comparison_verdict::incomparable: {
                const auto ev_12 = separation(entry.t1, entry.t2, in_1_only);
                const auto ev_21 = separation(entry.t2, entry.t1, in_2_only);
                if (ev_12 && ev_21) {
                    entry.confirmed = true;
                    entry.evidence = "left-only: " + *ev_12 + "; right-only: " + *ev_21;
                } else {
                    entry.deviation = pair_name +
                                      ": incomparability not witnessed at this bound (bound "
                                      "artifact; raise the bound)";
                }
                break;
            }
            }
            if (!entry.deviation.empty())
                report.deviations.push_back(entry.deviation);
            report.pairs.push_back(std::move(entry));
        }
    }
    return report;
}

// Preservation ----------------------------------------------------------

namespace
{

formula_ptr random_fragment_formula(std::mt19937_64& rng, fragment_kind frag, int n_agents,
                                    int depth)
{
    const auto agent = [&]() { return static_cast<agent_id>(rng() % static_cast<unsigned>(n_agents)); };
    const auto leaf = [&]() -> formula_ptr {
        formula_ptr atom = formula::familiar(agent(), agent());
        if (frag == fragment_kind::l1plus && rng() % 2 == 0)
            return formula::negation(std::move(atom));
        return atom;
    };
    if (depth == 0)
        return leaf();
    switch (rng() % 4) {
    case 0: return leaf();
    case 1:
        return formula::conjunction(random_fragment_formula(rng, frag, n_agents, depth - 1),
                                    random_fragment_formula(rng, frag, n_agents, depth - 1));
    case 2:
        return formula::disjunction(random_fragment_formula(rng, frag, n_agents, depth - 1),
                                    random_fragment_formula(rng, frag, n_agents, depth - 1));
    default:
        return formula::knows(agent(), random_fragment_formula(rng, frag, n_agents, depth - 1));
    }
}

std::vector<formula_ptr> preservation_battery(fragment_kind frag, int n_agents, int samples,
                                              std::uint64_t seed)
{
    std::vector<formula_ptr> out;

    // All atoms over the full group.
    for (agent_id a = 0; a < n_agents; ++a)
        for (agent_id s = 0; s < n_agents; ++s)
            out.push_back(formula::familiar(a, s));

    // Exhaustive two-level combinations over three agents.
    std::vector<formula_ptr> base;
    for (agent_id a = 0; a < 3; ++a)
        for (agent_id s = 0; s < 3; ++s) {
            base.push_back(formula::familiar(a, s));
            if (frag == fragment_kind::l1plus)
                base.push_back(formula::negation(formula::familiar(a, s)));
        }
    for (agent_id a = 0; a < 3; ++a)
        for (const formula_ptr& b : base)
            out.push_back(formula::knows(a, b));
    for (const formula_ptr& l : base)
        for (const formula_ptr& r : base) {
            out.push_back(formula::conjunction(l, r));
            out.push_back(formula::disjunction(l, r));
        }

    std::mt19937_64 rng(seed);
    for (int k = 0; k < samples; ++k)
        out.push_back(random_fragment_formula(rng, frag, n_agents, 4));
    return out;
}

} // namespace

preservation_report check_preservation(call_type t1, call_type t2, fragment_kind fragment,
                                       int n_agents, int bound, int samples, std::uint64_t seed)
{
    if (fragment == fragment_kind::l1plus && t1.d != t2.d)
        throw domain_error("the literal-fragment preservation needs matching directions");
    if (fragment == fragment_kind::l2plus && t1.d != direction::pushpull)
        throw domain_error("the atom-fragment preservation needs a pushpull left type");
    if (!expected_preorder::figure(n_agents).includes(t1, t2))
        throw domain_error("preservation runs along the classification: " + format_call_type(t1) +
                           " is not included in " + format_call_type(t2));

    const gossip_model fine = gossip_model::build(n_agents, bound, t1);
    const gossip_model coarse = gossip_model::build(n_agents, bound, t2);

    preservation_report report;
    const auto battery = preservation_battery(fragment, n_agents, samples, seed);
    report.formulas_checked = battery.size();

    eval_context eval_fine(fine);
    eval_context eval_coarse(coarse);
    for (const formula_ptr& f : battery) {
        for (seq_index s = 0; s < fine.space().size(); ++s) {
            ++report.evaluations;
            if (eval_coarse(*f, s) && !eval_fine(*f, s)) {
                if (report.violations.size() < 8)
                    report.violations.push_back({f, fine.space().sequence_at(s)});
            }
        }
    }
    return report;
}

} // namespace gossipscope
