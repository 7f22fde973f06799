#include "gossipscope/indist.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gossipscope
{

namespace
{

// Rule evaluation shared by every decision path.  The last-call cases of
// the table split on whether the agent is outside the call, involved but
// not affected, or affected; the affected case compares secret sets (the
// merged result under observance "after", the partner's prior set under
// "before").

struct call_view
{
    call c;
    bool a_involved;
    bool a_affected;
    agent_id partner; // meaningful only when involved
};

call_view view_call(call c, agent_id a, direction d)
{
    call_view v{c, involved(a, c), affected(a, c, d), -1};
    if (v.a_involved)
        v.partner = partner(a, c);
    return v;
}

// Standalone decision on two explicit sequences.  Memo over prefix-length
// pairs; prefix situations are materialized once per side.

class sequence_context
{
public:
    sequence_context(std::span<const call> seq, int n, direction d) : n_(n)
    {
        sits_.resize((seq.size() + 1) * static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a)
            sits_[static_cast<std::size_t>(a)] = secret_of(a);
        for (std::size_t k = 0; k < seq.size(); ++k) {
            const secret_set* src = &sits_[k * static_cast<std::size_t>(n)];
            secret_set* dst = &sits_[(k + 1) * static_cast<std::size_t>(n)];
            std::copy(src, src + n, dst);
            const call c = seq[k];
            const secret_set merged = src[c.caller] | src[c.callee];
            switch (d) {
            case direction::pushpull: dst[c.caller] = dst[c.callee] = merged; break;
            case direction::push: dst[c.callee] = merged; break;
            case direction::pull: dst[c.caller] = merged; break;
            }
        }
    }

    secret_set at(std::size_t prefix_len, agent_id a) const
    {
        return sits_[prefix_len * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a)];
    }

private:
    int n_;
    std::vector<secret_set> sits_;
};

class approx_decider
{
public:
    approx_decider(std::span<const call> c, std::span<const call> d, agent_id a, call_type t, int n)
        : c_(c), d_(d), a_(a), t_(t), left_(c, n, t.d), right_(d, n, t.d),
          memo_((c.size() + 1) * (d.size() + 1), 0)
    {
    }

    bool decide() { return rec(c_.size(), d_.size()); }

private:
    bool rec(std::size_t k, std::size_t l)
    {
        char& slot = memo_[k * (d_.size() + 1) + l];
        if (slot != 0)
            return slot == 2;
        slot = 1; // default false; also blocks accidental re-entry
        bool r = false;
        if (k == 0 && l == 0) {
            r = true;
        } else {
            if (k > 0 && l > 0) {
                const call_view e = view_call(c_[k - 1], a_, t_.d);
                const call_view f = view_call(d_[l - 1], a_, t_.d);
                if (e.c == f.c) {
                    if (e.a_involved) {
                        if (!e.a_affected) {
                            r = rec(k - 1, l - 1);
                        } else if (t_.o == observance::after) {
                            r = left_.at(k, a_) == right_.at(l, a_) && rec(k - 1, l - 1);
                        } else {
                            r = left_.at(k - 1, e.partner) == right_.at(l - 1, e.partner) &&
                                rec(k - 1, l - 1);
                        }
                    } else if (t_.p == privacy::p1) {
                        r = rec(k - 1, l - 1);
                    }
                }
                if (!r && t_.p == privacy::p2 && !e.a_involved && !f.a_involved)
                    r = rec(k - 1, l - 1);
            }
            if (!r && t_.p == privacy::p3) {
                if (k > 0 && !involved(a_, c_[k - 1]))
                    r = rec(k - 1, l);
                if (!r && l > 0 && !involved(a_, d_[l - 1]))
                    r = rec(k, l - 1);
            }
        }
        slot = r ? 2 : 1;
        return r;
    }

    std::span<const call> c_;
    std::span<const call> d_;
    agent_id a_;
    call_type t_;
    sequence_context left_;
    sequence_context right_;
    std::vector<char> memo_;
};

// Per-agent call tables used by the index builders.

struct agent_call_tables
{
    std::vector<int> out_calls; // call ids not involving the agent
    struct in_call
    {
        int id;
        bool affected;
        agent_id partner;
    };
    std::vector<in_call> in_calls;
    std::vector<char> involved_by_id;
};

agent_call_tables make_call_tables(const universe& u, agent_id a)
{
    agent_call_tables t;
    t.involved_by_id.resize(static_cast<std::size_t>(u.calls()), 0);
    for (int id = 0; id < u.calls(); ++id) {
        const call c = u.call_at(id);
        if (involved(a, c)) {
            t.involved_by_id[static_cast<std::size_t>(id)] = 1;
            t.in_calls.push_back({id, affected(a, c, u.type().d), partner(a, c)});
        } else {
            t.out_calls.push_back(id);
        }
    }
    return t;
}

class disjoint_sets
{
public:
    explicit disjoint_sets(seq_index n) : parent_(n)
    {
        std::iota(parent_.begin(), parent_.end(), seq_index{0});
    }

    seq_index find(seq_index x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(seq_index x, seq_index y)
    {
        x = find(x);
        y = find(y);
        if (x == y)
            return;
        // Smaller index wins so class representatives are canonical.
        if (x < y)
            parent_[y] = x;
        else
            parent_[x] = y;
    }

private:
    std::vector<seq_index> parent_;
};

// Pairwise strategy: run the memoized recursion over every unordered pair
// of members, sharing one dense memo.

class pairwise_builder
{
public:
    pairwise_builder(const universe& u, agent_id a)
        : u_(u), a_(a), tables_(make_call_tables(u, a)), size_(u.size()),
          memo_(size_ * (size_ + 1) / 2, 0)
    {
        lengths_.resize(size_);
        parents_.resize(size_);
        last_calls_.resize(size_);
        lengths_[0] = 0;
        parents_[0] = 0;
        last_calls_[0] = -1;
        for (seq_index s = 1; s < size_; ++s) {
            lengths_[s] = static_cast<std::uint8_t>(u.length_of(s));
            parents_[s] = u.parent_of(s);
            last_calls_[s] = static_cast<std::int16_t>(u.last_call_of(s));
        }
    }

    void run(disjoint_sets& dsu)
    {
        for (seq_index j = 0; j < size_; ++j)
            for (seq_index i = 0; i <= j; ++i)
                if (rec(i, j))
                    dsu.unite(i, j);
    }

private:
    char& slot(seq_index i, seq_index j)
    {
        // i <= j; column-major triangle
        return memo_[j * (j + 1) / 2 + i];
    }

    bool rec(seq_index i, seq_index j)
    {
        if (i > j)
            std::swap(i, j);
        char& s = slot(i, j);
        if (s != 0)
            return s == 2;
        s = 1;
        bool r = false;
        const int len_i = lengths_[i];
        const int len_j = lengths_[j];
        if (len_i == 0 && len_j == 0) {
            r = true;
        } else {
            const call_type t = u_.type();
            if (len_i > 0 && len_j > 0) {
                const int ei = last_calls_[i];
                const int ej = last_calls_[j];
                const bool inv_i = tables_.involved_by_id[static_cast<std::size_t>(ei)] != 0;
                const bool inv_j = tables_.involved_by_id[static_cast<std::size_t>(ej)] != 0;
                if (ei == ej) {
                    if (inv_i) {
                        const call c = u_.call_at(ei);
                        if (!affected(a_, c, t.d)) {
                            r = rec(parents_[i], parents_[j]);
                        } else if (t.o == observance::after) {
                            r = u_.secrets(i, a_) == u_.secrets(j, a_) &&
                                rec(parents_[i], parents_[j]);
                        } else {
                            const agent_id b = partner(a_, c);
                            r = u_.secrets(parents_[i], b) == u_.secrets(parents_[j], b) &&
                                rec(parents_[i], parents_[j]);
                        }
                    } else if (t.p == privacy::p1) {
                        r = rec(parents_[i], parents_[j]);
                    }
                }
                if (!r && t.p == privacy::p2 && !inv_i && !inv_j)
                    r = rec(parents_[i], parents_[j]);
            }
            if (!r && t.p == privacy::p3) {
                if (len_i > 0 && !tables_.involved_by_id[static_cast<std::size_t>(last_calls_[i])])
                    r = rec(parents_[i], j);
                if (!r && len_j > 0 &&
                    !tables_.involved_by_id[static_cast<std::size_t>(last_calls_[j])])
                    r = rec(i, parents_[j]);
            }
        }
        slot(i, j) = r ? 2 : 1;
        return r;
    }

    const universe& u_;
    agent_id a_;
    agent_call_tables tables_;
    seq_index size_;
    std::vector<char> memo_;
    std::vector<std::uint8_t> lengths_;
    std::vector<seq_index> parents_;
    std::vector<std::int16_t> last_calls_;
};

// Layered strategy: derive related pairs forward, one (length, length)
// layer at a time.  Every rule strictly grows total length, so a single
// sweep in diagonal order reaches the fixpoint.  Only layers that can
// still produce successors keep a dedup bitset; pairs landing in the
// terminal (bound, bound) layer are united directly.

class layered_builder
{
public:
    layered_builder(const universe& u, agent_id a, disjoint_sets& dsu)
        : u_(u), a_(a), tables_(make_call_tables(u, a)), dsu_(dsu), n_layers_(u.bound() + 1),
          layers_(static_cast<std::size_t>(n_layers_) * n_layers_)
    {
    }

    void run()
    {
        const int bound = u_.bound();
        insert(0, 0, 0, 0);
        for (int s = 0; s <= 2 * bound; ++s) {
            for (int k = 0; k <= std::min(s, bound); ++k) {
                const int l = s - k;
                if (l < k || l > bound)
                    continue;
                process_layer(k, l);
                layer(k, l).clear();
                layer(k, l).shrink_to_fit();
            }
        }
    }

private:
    std::vector<std::uint64_t>& layer(int k, int l)
    {
        return layers_[static_cast<std::size_t>(k) * n_layers_ + l];
    }

    void insert(int kx, seq_index lx, int ky, seq_index ly)
    {
        if (kx > ky || (kx == ky && lx > ly)) {
            std::swap(kx, ky);
            std::swap(lx, ly);
        }
        const seq_index gx = u_.first_of_length(kx) + lx;
        const seq_index gy = u_.first_of_length(ky) + ly;
        const int bound = u_.bound();
        if (kx == bound && ky == bound) {
            dsu_.unite(gx, gy); // terminal layer has no successors, skip dedup
            return;
        }
        auto& bits = layer(kx, ky);
        if (bits.empty())
            bits.resize((u_.count_of_length(kx) * u_.count_of_length(ky) + 63) / 64, 0);
        const seq_index pos = lx * u_.count_of_length(ky) + ly;
        std::uint64_t& word = bits[pos >> 6];
        const std::uint64_t mask = std::uint64_t{1} << (pos & 63);
        if (word & mask)
            return;
        word |= mask;
        dsu_.unite(gx, gy);
    }

    void process_layer(int k, int l)
    {
        const auto& bits = layer(k, l);
        if (bits.empty())
            return;
        const seq_index cols = u_.count_of_length(l);
        for (seq_index w = 0; w < bits.size(); ++w) {
            std::uint64_t word = bits[w];
            while (word != 0) {
                const int b = std::countr_zero(word);
                word &= word - 1;
                const seq_index pos = (w << 6) + static_cast<seq_index>(b);
                derive(k, pos / cols, l, pos % cols);
            }
        }
    }

    void derive(int k, seq_index li, int l, seq_index lj)
    {
        const call_type t = u_.type();
        const int bound = u_.bound();
        const int m = u_.calls();
        const seq_index gi = u_.first_of_length(k) + li;
        const seq_index gj = u_.first_of_length(l) + lj;
        const bool can_i = k < bound;
        const bool can_j = l < bound;

        switch (t.p) {
        case privacy::p1:
            if (can_i && can_j)
                for (int e : tables_.out_calls)
                    insert(k + 1, li * m + e, l + 1, lj * m + e);
            break;
        case privacy::p2:
            if (can_i && can_j)
                for (int e : tables_.out_calls)
                    for (int f : tables_.out_calls)
                        insert(k + 1, li * m + e, l + 1, lj * m + f);
            break;
        case privacy::p3:
            for (int e : tables_.out_calls) {
                if (can_i)
                    insert(k + 1, li * m + e, l, lj);
                if (can_j)
                    insert(k, li, l + 1, lj * m + e);
            }
            break;
        }

        if (can_i && can_j) {
            for (const auto& in : tables_.in_calls) {
                if (!in.affected) {
                    insert(k + 1, li * m + in.id, l + 1, lj * m + in.id);
                } else if (t.o == observance::after) {
                    const secret_set mi = u_.secrets(gi, a_) | u_.secrets(gi, in.partner);
                    const secret_set mj = u_.secrets(gj, a_) | u_.secrets(gj, in.partner);
                    if (mi == mj)
                        insert(k + 1, li * m + in.id, l + 1, lj * m + in.id);
                } else {
                    if (u_.secrets(gi, in.partner) == u_.secrets(gj, in.partner))
                        insert(k + 1, li * m + in.id, l + 1, lj * m + in.id);
                }
            }
        }
    }

    const universe& u_;
    agent_id a_;
    agent_call_tables tables_;
    disjoint_sets& dsu_;
    int n_layers_;
    std::vector<std::vector<std::uint64_t>> layers_;
};

} // namespace

bool approx(std::span<const call> c, std::span<const call> d, agent_id a, call_type t, int n_agents)
{
    if (n_agents < min_agents || n_agents > max_agents)
        throw domain_error("agent count must lie in [3, 26]");
    if (a < 0 || a >= n_agents)
        throw domain_error("agent out of range");
    for (auto seq : {c, d})
        for (call x : seq)
            make_call(x.caller, x.callee, n_agents);
    return approx_decider(c, d, a, t, n_agents).decide();
}

std::span<const seq_index> equivalence_index::members_of(agent_id a, std::int32_t cls) const
{
    if (a < 0 || a >= n_)
        throw domain_error("agent out of range");
    if (cls < 0 || cls >= class_counts_[static_cast<std::size_t>(a)])
        throw domain_error("class id out of range");
    const auto& off = group_off_[static_cast<std::size_t>(a)];
    const auto& grouped = grouped_[static_cast<std::size_t>(a)];
    return {grouped.data() + off[static_cast<std::size_t>(cls)],
            grouped.data() + off[static_cast<std::size_t>(cls) + 1]};
}

std::uint64_t default_pair_budget()
{
    if (const char* env = std::getenv("GOSSIPSCOPE_PAIR_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0)
            throw domain_error("GOSSIPSCOPE_PAIR_BUDGET must be a positive integer");
        return v;
    }
    return 4'000'000'000ULL;
}

struct index_builder
{
    static equivalence_index build(const universe& u, const index_build_options& opts)
    {
        const std::uint64_t budget = opts.pair_budget != 0 ? opts.pair_budget : default_pair_budget();
        const seq_index size = u.size();
        if (static_cast<long double>(size) * static_cast<long double>(size) >
            static_cast<long double>(budget))
            throw resource_error("universe of " + std::to_string(size) +
                                 " members exceeds the pair budget of " + std::to_string(budget) +
                                 " (set GOSSIPSCOPE_PAIR_BUDGET to raise it)");

        auto strat = opts.strat;
        if (strat == index_build_options::strategy::automatic)
            strat = size <= 8192 ? index_build_options::strategy::pairwise
                                 : index_build_options::strategy::layered;

        equivalence_index idx;
        idx.n_ = u.agents();
        idx.members_ = size;
        idx.class_ids_.assign(static_cast<std::size_t>(idx.n_) * size, -1);
        idx.class_counts_.assign(static_cast<std::size_t>(idx.n_), 0);
        idx.grouped_.resize(static_cast<std::size_t>(idx.n_));
        idx.group_off_.resize(static_cast<std::size_t>(idx.n_));

        const int n = u.agents();
#pragma omp parallel for schedule(dynamic, 1) if (opts.parallel && n > 1)
        for (int a = 0; a < n; ++a) {
            disjoint_sets dsu(size);
            if (strat == index_build_options::strategy::pairwise) {
                pairwise_builder(u, a).run(dsu);
            } else {
                layered_builder(u, a, dsu).run();
            }
            compress(u, a, dsu, idx);
        }
        return idx;
    }

    static void compress(const universe& u, agent_id a, disjoint_sets& dsu, equivalence_index& idx)
    {
        const seq_index size = u.size();
        std::int32_t* ids = idx.class_ids_.data() + static_cast<std::size_t>(a) * size;
        std::int32_t next = 0;
        // Representatives are minimal member indices, so a single ascending
        // pass numbers classes by first occurrence.
        for (seq_index s = 0; s < size; ++s) {
            const seq_index root = dsu.find(s);
            if (root == s)
                ids[s] = next++;
            else
                ids[s] = ids[root];
        }
        idx.class_counts_[static_cast<std::size_t>(a)] = next;

        auto& off = idx.group_off_[static_cast<std::size_t>(a)];
        auto& grouped = idx.grouped_[static_cast<std::size_t>(a)];
        off.assign(static_cast<std::size_t>(next) + 1, 0);
        for (seq_index s = 0; s < size; ++s)
            ++off[static_cast<std::size_t>(ids[s]) + 1];
        for (std::size_t k = 1; k < off.size(); ++k)
            off[k] += off[k - 1];
        grouped.resize(size);
        std::vector<std::uint64_t> cursor(off.begin(), off.end() - 1);
        for (seq_index s = 0; s < size; ++s)
            grouped[cursor[static_cast<std::size_t>(ids[s])]++] = s;
    }
};

equivalence_index build_equivalence_index(const universe& u, const index_build_options& opts)
{
    return index_builder::build(u, opts);
}

bool indistinguishable(std::span<const call> c, std::span<const call> d, agent_id a,
                       const universe& u, const equivalence_index& idx)
{
    if (a < 0 || a >= u.agents())
        throw domain_error("agent out of range");
    const seq_index i = u.index_of(c);
    const seq_index j = u.index_of(d);
    return idx.class_of(a, i) == idx.class_of(a, j);
}

std::vector<seq_index> class_of(std::span<const call> c, agent_id a, const universe& u,
                                const equivalence_index& idx)
{
    if (a < 0 || a >= u.agents())
        throw domain_error("agent out of range");
    const seq_index i = u.index_of(c);
    const auto span = idx.members_of(a, idx.class_of(a, i));
    return {span.begin(), span.end()};
}

} // namespace gossipscope
