#include "gossipscope/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace gossipscope
{

char agent_name(agent_id a)
{
    if (a < 0 || a >= max_agents)
        throw domain_error("agent index " + std::to_string(a) + " has no letter name");
    return static_cast<char>('a' + a);
}

agent_id agent_from_name(char name, int n_agents)
{
    if (name < 'a' || name > 'z')
        throw domain_error(std::string("not an agent letter: '") + name + "'");
    agent_id a = name - 'a';
    if (a >= n_agents)
        throw domain_error(std::string("agent '") + name + "' is outside the group of " +
                           std::to_string(n_agents));
    return a;
}

std::string format_secret_set(secret_set s)
{
    std::string out;
    for (int k = 0; k < max_agents; ++k)
        if (s & secret_of(k))
            out += static_cast<char>('A' + k);
    return out.empty() ? "-" : out;
}

const std::array<call_type, 18>& all_call_types()
{
    static const std::array<call_type, 18> types = [] {
        std::array<call_type, 18> out{};
        int k = 0;
        for (privacy p : {privacy::p1, privacy::p2, privacy::p3})
            for (direction d : {direction::pushpull, direction::push, direction::pull})
                for (observance o : {observance::after, observance::before})
                    out[k++] = call_type{p, d, o};
        return out;
    }();
    return types;
}

std::string format_privacy(privacy p)
{
    switch (p) {
    case privacy::p1: return "p1";
    case privacy::p2: return "p2";
    case privacy::p3: return "p3";
    }
    return "?";
}

std::string format_direction(direction d)
{
    switch (d) {
    case direction::pushpull: return "pushpull";
    case direction::push: return "push";
    case direction::pull: return "pull";
    }
    return "?";
}

std::string format_observance(observance o)
{
    return o == observance::after ? "after" : "before";
}

std::string format_call_type(call_type t)
{
    return format_privacy(t.p) + "," + format_direction(t.d) + "," + format_observance(t.o);
}

namespace
{

std::vector<std::string> split_type_parts(std::string_view text)
{
    std::vector<std::string> parts;
    std::string current;
    for (char ch : text) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!current.empty())
                parts.push_back(std::move(current)), current.clear();
        } else {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
    }
    if (!current.empty())
        parts.push_back(std::move(current));
    return parts;
}

} // namespace

call_type parse_call_type(std::string_view text)
{
    const auto parts = split_type_parts(text);
    if (parts.size() != 3)
        throw domain_error("call type must have three parts, e.g. \"p2,pushpull,after\": got \"" +
                           std::string(text) + "\"");
    call_type t{};
    if (parts[0] == "p1")
        t.p = privacy::p1;
    else if (parts[0] == "p2")
        t.p = privacy::p2;
    else if (parts[0] == "p3")
        t.p = privacy::p3;
    else
        throw domain_error("unknown privacy degree \"" + parts[0] + "\"");
    if (parts[1] == "pushpull")
        t.d = direction::pushpull;
    else if (parts[1] == "push")
        t.d = direction::push;
    else if (parts[1] == "pull")
        t.d = direction::pull;
    else
        throw domain_error("unknown direction \"" + parts[1] + "\"");
    if (parts[2] == "after")
        t.o = observance::after;
    else if (parts[2] == "before")
        t.o = observance::before;
    else
        throw domain_error("unknown observance \"" + parts[2] + "\"");
    return t;
}

call make_call(agent_id caller, agent_id callee, int n_agents)
{
    if (caller < 0 || caller >= n_agents || callee < 0 || callee >= n_agents)
        throw domain_error("call participants must lie in [0, " + std::to_string(n_agents) + ")");
    if (caller == callee)
        throw domain_error("an agent cannot call herself");
    return call{caller, callee};
}

bool involved(agent_id a, call c)
{
    return c.caller == a || c.callee == a;
}

bool affected(agent_id a, call c, direction d)
{
    switch (d) {
    case direction::pushpull: return involved(a, c);
    case direction::push: return c.callee == a;
    case direction::pull: return c.caller == a;
    }
    return false;
}

agent_id partner(agent_id a, call c)
{
    if (c.caller == a)
        return c.callee;
    if (c.callee == a)
        return c.caller;
    throw domain_error("partner() requires an involved agent");
}

gossip_situation::gossip_situation(int n_agents, std::vector<secret_set> sets) : sets_(std::move(sets))
{
    if (static_cast<int>(sets_.size()) != n_agents)
        throw domain_error("situation must assign a secret set to every agent");
}

bool gossip_situation::all_expert() const
{
    const secret_set full = all_secrets(agents());
    return std::all_of(sets_.begin(), sets_.end(), [&](secret_set q) { return q == full; });
}

gossip_situation initial_situation(int n_agents)
{
    if (n_agents < min_agents)
        throw domain_error("at least three agents are required");
    if (n_agents > max_agents)
        throw domain_error("at most " + std::to_string(max_agents) + " agents are supported");
    std::vector<secret_set> sets(static_cast<std::size_t>(n_agents));
    for (int a = 0; a < n_agents; ++a)
        sets[static_cast<std::size_t>(a)] = secret_of(a);
    return gossip_situation(n_agents, std::move(sets));
}

gossip_situation apply_call(const gossip_situation& s, call c, direction d)
{
    const int n = s.agents();
    if (c.caller < 0 || c.caller >= n || c.callee < 0 || c.callee >= n)
        throw domain_error("call participants outside the situation's agent range");
    std::vector<secret_set> sets(s.sets().begin(), s.sets().end());
    const secret_set merged = s.secrets(c.caller) | s.secrets(c.callee);
    switch (d) {
    case direction::pushpull:
        sets[static_cast<std::size_t>(c.caller)] = merged;
        sets[static_cast<std::size_t>(c.callee)] = merged;
        break;
    case direction::push:
        sets[static_cast<std::size_t>(c.callee)] = merged;
        break;
    case direction::pull:
        sets[static_cast<std::size_t>(c.caller)] = merged;
        break;
    }
    return gossip_situation(n, std::move(sets));
}

gossip_situation apply_sequence(const gossip_situation& s, std::span<const call> seq, direction d)
{
    gossip_situation out = s;
    for (call c : seq)
        out = apply_call(out, c, d);
    return out;
}

std::string format_situation(const gossip_situation& s)
{
    std::string out;
    for (int a = 0; a < s.agents(); ++a) {
        if (a > 0)
            out += '.';
        out += format_secret_set(s.secrets(a));
    }
    return out;
}

namespace
{

std::string direction_token(direction d)
{
    switch (d) {
    case direction::pushpull: return "<>";
    case direction::push: return ">";
    case direction::pull: return "<";
    }
    return "?";
}

} // namespace

std::string format_call(call c, direction d)
{
    return std::string(1, agent_name(c.caller)) + direction_token(d) + agent_name(c.callee);
}

std::string format_sequence(std::span<const call> seq, direction d)
{
    std::string out;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (k > 0)
            out += ';';
        out += format_call(seq[k], d);
    }
    return out;
}

parsed_sequence parse_sequence(std::string_view text, int n_agents)
{
    parsed_sequence out;
    std::size_t pos = 0;
    const auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };

    skip_ws();
    bool expect_call = false;
    while (pos < text.size()) {
        skip_ws();
        if (pos >= text.size())
            break;

        const std::size_t call_start = pos;
        char lhs = text[pos];
        if (lhs < 'a' || lhs > 'z')
            throw parse_error("expected an agent letter", pos);
        ++pos;
        skip_ws();
        if (pos >= text.size())
            throw parse_error("unterminated call", pos);

        direction d;
        if (text[pos] == '<' && pos + 1 < text.size() && text[pos + 1] == '>') {
            d = direction::pushpull;
            pos += 2;
        } else if (text[pos] == '>') {
            d = direction::push;
            ++pos;
        } else if (text[pos] == '<') {
            d = direction::pull;
            ++pos;
        } else {
            throw parse_error("expected a call symbol \"<>\", \">\" or \"<\"", pos);
        }
        skip_ws();
        if (pos >= text.size())
            throw parse_error("missing callee", pos);
        char rhs = text[pos];
        if (rhs < 'a' || rhs > 'z')
            throw parse_error("expected an agent letter", pos);
        ++pos;

        agent_id caller, callee;
        try {
            caller = agent_from_name(lhs, n_agents);
            callee = agent_from_name(rhs, n_agents);
        } catch (const domain_error& e) {
            throw parse_error(e.what(), call_start);
        }
        if (caller == callee)
            throw parse_error("an agent cannot call herself", call_start);
        if (out.dir && *out.dir != d)
            throw parse_error("mixed call directions in one sequence", call_start);
        out.dir = d;
        out.calls.push_back(call{caller, callee});

        skip_ws();
        expect_call = false;
        if (pos < text.size()) {
            if (text[pos] != ';')
                throw parse_error("expected ';' between calls", pos);
            ++pos;
            expect_call = true;
        }
    }
    if (expect_call)
        throw parse_error("trailing ';' without a call", pos);
    return out;
}

std::vector<call> parse_sequence_as(std::string_view text, int n_agents, direction expected)
{
    parsed_sequence parsed = parse_sequence(text, n_agents);
    if (parsed.dir && *parsed.dir != expected)
        throw domain_error("sequence \"" + std::string(text) + "\" is written with direction " +
                           format_direction(*parsed.dir) + " but " + format_direction(expected) +
                           " was expected");
    return std::move(parsed.calls);
}

} // namespace gossipscope
