#include "gossipscope/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gossipscope
{

protocol::protocol(int n_agents, direction d, std::vector<instruction> instructions)
    : n_(n_agents), d_(d), instructions_(std::move(instructions))
{
    if (n_agents < min_agents || n_agents > max_agents)
        throw domain_error("agent count must lie in [3, 26]");
    for (const instruction& ins : instructions_)
        make_call(ins.action.caller, ins.action.callee, n_agents);
}

namespace
{

// Epistemic guards are Boolean combinations of K[caller]-prefixed
// subformulas; anything else leaks state the caller cannot test locally.
void validate_guard(const formula& f, agent_id caller)
{
    switch (f.kind()) {
    case formula_kind::negation: validate_guard(*f.child(), caller); return;
    case formula_kind::conjunction:
    case formula_kind::disjunction:
        validate_guard(*f.left(), caller);
        validate_guard(*f.right(), caller);
        return;
    case formula_kind::knows:
        if (f.agent() != caller)
            throw domain_error("guard modality K[" + std::string(1, agent_name(f.agent())) +
                               "] does not match the caller " +
                               std::string(1, agent_name(caller)));
        return;
    case formula_kind::familiar:
        throw domain_error("guard atom \"" + format_formula(f) +
                           "\" is not wrapped in the caller's knowledge operator");
    }
}

} // namespace

protocol instantiate(const instruction_schema& schema, int n_agents)
{
    if (n_agents < min_agents)
        throw domain_error("at least three agents are required");
    if (schema.caller_var == schema.callee_var)
        throw domain_error("schema variables must be distinct");

    std::vector<instruction> instructions;
    for (agent_id x = 0; x < n_agents; ++x) {
        for (agent_id y = 0; y < n_agents; ++y) {
            if (x == y)
                continue;
            const std::map<char, agent_id> placeholders{{schema.caller_var, x},
                                                        {schema.callee_var, y}};
            formula_ptr guard = parse_formula(schema.guard_text, n_agents, &placeholders);
            validate_guard(*guard, x);
            instructions.push_back(instruction{std::move(guard), call{x, y}});
        }
    }
    return protocol(n_agents, schema.call_direction, std::move(instructions));
}

protocol hear_my_secret(int n_agents)
{
    if (n_agents < min_agents)
        throw domain_error("at least three agents are required");
    std::vector<instruction> instructions;
    for (agent_id x = 0; x < n_agents; ++x) {
        for (agent_id y = 0; y < n_agents; ++y) {
            if (x == y)
                continue;
            // K-hat[x] !F[y,x], spelled out as !K[x]!!F[y,x]
            formula_ptr guard = formula::negation(formula::knows(
                x, formula::negation(formula::negation(formula::familiar(y, x)))));
            instructions.push_back(instruction{std::move(guard), call{x, y}});
        }
    }
    return protocol(n_agents, direction::pushpull, std::move(instructions));
}

std::vector<call> schedule_2n_minus_4(int n_agents)
{
    if (n_agents < 4)
        throw domain_error("the schedule needs at least four agents");
    if (n_agents > max_agents)
        throw domain_error("at most " + std::to_string(max_agents) + " agents are supported");
    std::vector<call> seq;
    for (agent_id other = 4; other < n_agents; ++other)
        seq.push_back(call{0, other});
    seq.push_back(call{0, 1});
    seq.push_back(call{2, 3});
    seq.push_back(call{0, 2});
    seq.push_back(call{1, 3});
    for (agent_id other = 4; other < n_agents; ++other)
        seq.push_back(call{0, other});
    return seq;
}

namespace
{

void check_model(const protocol& p, const gossip_model& m)
{
    if (p.agents() != m.agents())
        throw domain_error("protocol and model disagree on the agent count");
    if (p.call_direction() != m.type().d)
        throw domain_error("protocol calls are " + format_direction(p.call_direction()) +
                           " but the model's type is " + format_direction(m.type().d));
}

} // namespace

std::vector<call> compliant_calls(const protocol& p, seq_index s, const gossip_model& m,
                                  const std::vector<char>* restriction)
{
    check_model(p, m);
    eval_context ctx(m, restriction);
    std::vector<call> out;
    for (const instruction& ins : p.instructions())
        if (ctx(*ins.guard, s) && std::find(out.begin(), out.end(), ins.action) == out.end())
            out.push_back(ins.action);
    return out;
}

computation_tree compute_tree(const protocol& p, const gossip_model& m)
{
    check_model(p, m);
    const universe& u = m.space();

    struct entry
    {
        seq_index s;
        char terminal;
        char limited;
    };
    std::vector<entry> entries;
    std::vector<seq_index> frontier{0};

    while (!frontier.empty()) {
        // Guard evaluation across the frontier; per-thread contexts share
        // nothing and results land in preallocated slots.
        std::vector<std::vector<int>> fired(frontier.size());
#pragma omp parallel if (frontier.size() > 64)
        {
            eval_context ctx(m);
#pragma omp for schedule(dynamic, 16)
            for (std::int64_t k = 0; k < static_cast<std::int64_t>(frontier.size()); ++k) {
                std::vector<int>& calls = fired[static_cast<std::size_t>(k)];
                for (const instruction& ins : p.instructions()) {
                    const int id = u.call_id(ins.action);
                    if (std::find(calls.begin(), calls.end(), id) != calls.end())
                        continue;
                    if (ctx(*ins.guard, frontier[static_cast<std::size_t>(k)]))
                        calls.push_back(id);
                }
            }
        }

        std::vector<seq_index> next;
        for (std::size_t k = 0; k < frontier.size(); ++k) {
            const seq_index s = frontier[k];
            bool limited = false;
            std::sort(fired[k].begin(), fired[k].end());
            for (int id : fired[k]) {
                if (auto child = u.child_of(s, id))
                    next.push_back(*child);
                else
                    limited = true;
            }
            entries.push_back({s, fired[k].empty() ? char{1} : char{0}, limited ? char{1} : char{0}});
        }
        frontier = std::move(next);
    }

    std::sort(entries.begin(), entries.end(), [](const entry& a, const entry& b) { return a.s < b.s; });
    computation_tree tree;
    tree.members.reserve(entries.size());
    tree.terminal.reserve(entries.size());
    tree.bound_limited.reserve(entries.size());
    for (const entry& e : entries) {
        tree.members.push_back(e.s);
        tree.terminal.push_back(e.terminal);
        tree.bound_limited.push_back(e.limited);
    }
    return tree;
}

std::vector<char> relativised_tree(const protocol& p, const std::vector<char>& candidate,
                                   const gossip_model& m)
{
    check_model(p, m);
    const universe& u = m.space();
    if (candidate.size() != u.size())
        throw domain_error("candidate mask does not match the universe");

    std::vector<char> compliant(u.size(), 0);
    compliant[0] = 1; // the empty sequence is always compliant
    if (!candidate[0])
        return compliant;

    eval_context ctx(m, &candidate);
    std::vector<seq_index> frontier{0};
    while (!frontier.empty()) {
        std::vector<seq_index> next;
        for (seq_index s : frontier) {
            for (const instruction& ins : p.instructions()) {
                const auto child = u.child_of(s, u.call_id(ins.action));
                if (child && compliant[*child])
                    continue;
                if (!ctx(*ins.guard, s))
                    continue;
                if (!child)
                    continue; // compliant beyond the bound; not representable
                compliant[*child] = 1;
                if (candidate[*child])
                    next.push_back(*child);
            }
        }
        frontier = std::move(next);
    }
    return compliant;
}

std::vector<char> rho(const protocol& p, const std::vector<char>& candidate, const gossip_model& m)
{
    const std::vector<char> compliant = relativised_tree(p, candidate, m);
    std::vector<char> out(candidate.size(), 0);
    for (std::size_t s = 0; s < candidate.size(); ++s)
        out[s] = candidate[s] && compliant[s];
    return out;
}

namespace
{

protocol existential_guards_of(const protocol& p)
{
    std::vector<instruction> rewritten;
    for (const instruction& ins : p.instructions()) {
        formula_ptr guard = ins.guard;
        if (!fragment_of(*guard).in_lhat) {
            guard = to_existential_fragment(*guard);
            if (!guard)
                throw domain_error("guard \"" + format_formula(*ins.guard) +
                                   "\" has no existential form; the fixpoint semantics "
                                   "requires existential guards");
        }
        rewritten.push_back(instruction{std::move(guard), ins.action});
    }
    return protocol(p.agents(), p.call_direction(), std::move(rewritten));
}

} // namespace

std::vector<char> greatest_fixpoint(const protocol& p, const gossip_model& m)
{
    check_model(p, m);
    const protocol q = existential_guards_of(p);
    std::vector<char> current(m.space().size(), 1);
    for (;;) {
        std::vector<char> next = rho(q, current, m);
        if (next == current)
            return current;
        current = std::move(next);
    }
}

analysis_report analyze(const protocol& p, const gossip_model& m, protocol_semantics mode)
{
    check_model(p, m);
    const universe& u = m.space();
    analysis_report report;
    report.semantics = mode;

    std::vector<seq_index> members;
    std::vector<char> terminal;
    std::vector<char> limited;

    if (mode == protocol_semantics::naive) {
        computation_tree tree = compute_tree(p, m);
        members = std::move(tree.members);
        terminal = std::move(tree.terminal);
        limited = std::move(tree.bound_limited);
    } else {
        const std::vector<char> fix = greatest_fixpoint(p, m);
        const protocol q = existential_guards_of(p);
        eval_context ctx(m, &fix);
        for (seq_index s = 0; s < u.size(); ++s) {
            if (!fix[s])
                continue;
            members.push_back(s);
            bool fires = false;
            bool beyond = false;
            for (const instruction& ins : q.instructions()) {
                if (!ctx(*ins.guard, s))
                    continue;
                fires = true;
                if (!u.child_of(s, u.call_id(ins.action)))
                    beyond = true;
            }
            terminal.push_back(fires ? 0 : 1);
            limited.push_back(beyond ? 1 : 0);
        }
    }

    report.size = members.size();
    bool all_expert = true;
    const secret_set full = all_secrets(u.agents());
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (limited[k])
            report.bound_limited = true;
        if (!terminal[k])
            continue;
        ++report.terminal_count;
        for (int a = 0; a < u.agents() && all_expert; ++a)
            if (u.secrets(members[k], a) != full)
                all_expert = false;
    }
    report.all_expert = report.terminal_count > 0 && all_expert;
    return report;
}

// Protocol files -------------------------------------------------------

namespace
{

std::string trimmed(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

instruction_schema parse_rule_line(const std::string& value)
{
    // value looks like "(X,Y): guard -> call"
    instruction_schema schema;
    std::size_t pos = 0;
    const auto fail = [&](const std::string& what) { throw domain_error("rule line: " + what); };

    if (pos >= value.size() || value[pos] != '(')
        fail("expected '(' opening the variable pair");
    ++pos;
    if (pos >= value.size() || !std::isupper(static_cast<unsigned char>(value[pos])))
        fail("expected an uppercase caller variable");
    schema.caller_var = value[pos++];
    if (pos >= value.size() || value[pos] != ',')
        fail("expected ',' between the variables");
    ++pos;
    if (pos >= value.size() || !std::isupper(static_cast<unsigned char>(value[pos])))
        fail("expected an uppercase callee variable");
    schema.callee_var = value[pos++];
    if (pos >= value.size() || value[pos] != ')')
        fail("expected ')' after the variable pair");
    ++pos;
    if (pos >= value.size() || value[pos] != ':')
        fail("expected ':' after the variable pair");
    ++pos;

    const std::size_t arrow = value.find("->", pos);
    if (arrow == std::string::npos)
        fail("expected \"->\" between the guard and the call");
    schema.guard_text = trimmed(value.substr(pos, arrow - pos));
    if (schema.guard_text.empty())
        fail("empty guard");

    const std::string call_text = trimmed(value.substr(arrow + 2));
    if (call_text.size() < 3)
        fail("call template too short");
    const char lhs = call_text.front();
    const char rhs = call_text.back();
    const std::string middle = trimmed(call_text.substr(1, call_text.size() - 2));
    if (middle == "<>")
        schema.call_direction = direction::pushpull;
    else if (middle == ">")
        schema.call_direction = direction::push;
    else if (middle == "<")
        schema.call_direction = direction::pull;
    else
        fail("call template must use \"<>\", \">\" or \"<\"");
    if (lhs != schema.caller_var || rhs != schema.callee_var)
        fail("call template must be caller-variable, symbol, callee-variable");
    return schema;
}

} // namespace

protocol_file parse_protocol_file(std::istream& in)
{
    protocol_file file;
    bool saw_agents = false, saw_type = false, saw_bound = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        const std::string line = trimmed(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;

        const std::size_t colon = line.find(':');
        const std::string head = colon == std::string::npos ? line : trimmed(line.substr(0, colon));
        try {
            if (head == "agents") {
                file.agents = std::stoi(trimmed(line.substr(colon + 1)));
                saw_agents = true;
            } else if (head == "calltype") {
                file.type = parse_call_type(trimmed(line.substr(colon + 1)));
                saw_type = true;
            } else if (head == "bound") {
                file.bound = std::stoi(trimmed(line.substr(colon + 1)));
                saw_bound = true;
            } else if (head.rfind("rule", 0) == 0) {
                file.rules.push_back(parse_rule_line(trimmed(line.substr(4))));
            } else {
                throw domain_error("unknown directive \"" + head + "\"");
            }
        } catch (const std::exception& e) {
            throw domain_error("protocol file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_agents || !saw_type || !saw_bound)
        throw domain_error("protocol file must declare agents, calltype and bound");
    if (file.rules.empty())
        throw domain_error("protocol file has no rules");
    for (const instruction_schema& r : file.rules)
        if (r.call_direction != file.type.d)
            throw domain_error("rule call direction " + format_direction(r.call_direction) +
                               " conflicts with the declared call type");
    return file;
}

protocol_file load_protocol_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw domain_error("cannot open protocol file \"" + path + "\"");
    return parse_protocol_file(in);
}

} // namespace gossipscope
