#include "gossipscope/logic.hpp"

#include <cctype>

namespace gossipscope
{

formula_ptr formula::familiar(agent_id a, agent_id owner)
{
    if (a < 0 || owner < 0)
        throw domain_error("familiar atom needs valid agents");
    return formula_ptr(new formula(formula_kind::familiar, a, owner, nullptr, nullptr));
}

formula_ptr formula::negation(formula_ptr f)
{
    if (!f)
        throw domain_error("negation of a null formula");
    return formula_ptr(new formula(formula_kind::negation, -1, -1, std::move(f), nullptr));
}

formula_ptr formula::conjunction(formula_ptr l, formula_ptr r)
{
    if (!l || !r)
        throw domain_error("conjunction of a null formula");
    return formula_ptr(new formula(formula_kind::conjunction, -1, -1, std::move(l), std::move(r)));
}

formula_ptr formula::disjunction(formula_ptr l, formula_ptr r)
{
    if (!l || !r)
        throw domain_error("disjunction of a null formula");
    return formula_ptr(new formula(formula_kind::disjunction, -1, -1, std::move(l), std::move(r)));
}

formula_ptr formula::knows(agent_id a, formula_ptr f)
{
    if (a < 0 || !f)
        throw domain_error("knowledge operator needs an agent and a formula");
    return formula_ptr(new formula(formula_kind::knows, a, -1, std::move(f), nullptr));
}

bool same_formula(const formula& a, const formula& b)
{
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case formula_kind::familiar: return a.agent() == b.agent() && a.owner() == b.owner();
    case formula_kind::negation: return same_formula(*a.child(), *b.child());
    case formula_kind::knows:
        return a.agent() == b.agent() && same_formula(*a.child(), *b.child());
    case formula_kind::conjunction:
    case formula_kind::disjunction:
        return same_formula(*a.left(), *b.left()) && same_formula(*a.right(), *b.right());
    }
    return false;
}

formula_ptr expert_formula(agent_id a, int n_agents)
{
    if (a < 0 || a >= n_agents)
        throw domain_error("agent out of range");
    formula_ptr out = formula::familiar(a, n_agents - 1);
    for (int owner = n_agents - 2; owner >= 0; --owner)
        out = formula::conjunction(formula::familiar(a, owner), std::move(out));
    return out;
}

// Parser -------------------------------------------------------------------

namespace
{

class formula_parser
{
public:
    formula_parser(std::string_view text, int n, const std::map<char, agent_id>* placeholders)
        : text_(text), n_(n), placeholders_(placeholders)
    {
    }

    formula_ptr run()
    {
        formula_ptr f = parse_or();
        skip_ws();
        if (pos_ < text_.size())
            throw parse_error("unexpected trailing input", pos_);
        return f;
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char ch)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char ch, const char* what)
    {
        if (!eat(ch))
            throw parse_error(std::string("expected '") + ch + "' " + what, pos_);
    }

    agent_id parse_agent()
    {
        skip_ws();
        if (pos_ >= text_.size())
            throw parse_error("expected an agent letter", pos_);
        const char ch = text_[pos_];
        if (placeholders_) {
            const auto it = placeholders_->find(ch);
            if (it == placeholders_->end())
                throw parse_error(std::string("agent must be one of the placeholders, got '") + ch +
                                      "'",
                                  pos_);
            ++pos_;
            return it->second;
        }
        agent_id a;
        try {
            a = agent_from_name(ch, n_);
        } catch (const domain_error& e) {
            throw parse_error(e.what(), pos_);
        }
        ++pos_;
        return a;
    }

    formula_ptr parse_or()
    {
        formula_ptr f = parse_and();
        while (eat('|'))
            f = formula::disjunction(std::move(f), parse_and());
        return f;
    }

    formula_ptr parse_and()
    {
        formula_ptr f = parse_unary();
        while (eat('&'))
            f = formula::conjunction(std::move(f), parse_unary());
        return f;
    }

    formula_ptr parse_unary()
    {
        skip_ws();
        if (pos_ >= text_.size())
            throw parse_error("expected a formula", pos_);
        const char ch = text_[pos_];
        if (ch == '!') {
            ++pos_;
            return formula::negation(parse_unary());
        }
        if (ch == 'K') {
            ++pos_;
            expect('[', "after K");
            const agent_id a = parse_agent();
            expect(']', "after the knowing agent");
            return formula::knows(a, parse_unary());
        }
        return parse_primary();
    }

    formula_ptr parse_primary()
    {
        skip_ws();
        if (pos_ >= text_.size())
            throw parse_error("expected a formula", pos_);
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            formula_ptr f = parse_or();
            expect(')', "to close the group");
            return f;
        }
        if (ch == 'F') {
            ++pos_;
            expect('[', "after F");
            const agent_id a = parse_agent();
            expect(',', "between the agent and the secret owner");
            const agent_id owner = parse_agent();
            expect(']', "after the secret owner");
            return formula::familiar(a, owner);
        }
        if (ch == 'E') {
            if (text_.substr(pos_, 3) != "Exp")
                throw parse_error("expected \"Exp\"", pos_);
            pos_ += 3;
            expect('[', "after Exp");
            const agent_id a = parse_agent();
            expect(']', "after the expert agent");
            return expert_formula(a, n_);
        }
        throw parse_error("expected F[...], K[...], Exp[...], '!' or '('", pos_);
    }

    std::string_view text_;
    int n_;
    const std::map<char, agent_id>* placeholders_;
    std::size_t pos_ = 0;
};

} // namespace

formula_ptr parse_formula(std::string_view text, int n_agents,
                          const std::map<char, agent_id>* placeholders)
{
    if (n_agents < min_agents || n_agents > max_agents)
        throw domain_error("agent count must lie in [3, 26]");
    return formula_parser(text, n_agents, placeholders).run();
}

namespace
{

// Precedence levels for printing: | < & < prefix operators < atoms.
int printing_level(const formula& f)
{
    switch (f.kind()) {
    case formula_kind::disjunction: return 0;
    case formula_kind::conjunction: return 1;
    case formula_kind::negation:
    case formula_kind::knows: return 2;
    case formula_kind::familiar: return 3;
    }
    return 3;
}

void format_into(const formula& f, int min_level, std::string& out)
{
    const bool parens = printing_level(f) < min_level;
    if (parens)
        out += '(';
    switch (f.kind()) {
    case formula_kind::familiar:
        out += "F[";
        out += agent_name(f.agent());
        out += ',';
        out += agent_name(f.owner());
        out += ']';
        break;
    case formula_kind::negation:
        out += '!';
        format_into(*f.child(), 2, out);
        break;
    case formula_kind::knows:
        out += "K[";
        out += agent_name(f.agent());
        out += ']';
        format_into(*f.child(), 2, out);
        break;
    case formula_kind::conjunction:
        format_into(*f.left(), 1, out);
        out += '&';
        format_into(*f.right(), 2, out);
        break;
    case formula_kind::disjunction:
        format_into(*f.left(), 0, out);
        out += '|';
        format_into(*f.right(), 1, out);
        break;
    }
    if (parens)
        out += ')';
}

} // namespace

std::string format_formula(const formula& f)
{
    std::string out;
    format_into(f, 0, out);
    return out;
}

// Fragments ------------------------------------------------------------

namespace
{

bool in_l1plus(const formula& f)
{
    switch (f.kind()) {
    case formula_kind::familiar: return true;
    case formula_kind::negation: return f.child()->kind() == formula_kind::familiar;
    case formula_kind::conjunction:
    case formula_kind::disjunction: return in_l1plus(*f.left()) && in_l1plus(*f.right());
    case formula_kind::knows: return in_l1plus(*f.child());
    }
    return false;
}

bool in_l2plus(const formula& f)
{
    switch (f.kind()) {
    case formula_kind::familiar: return true;
    case formula_kind::negation: return false;
    case formula_kind::conjunction:
    case formula_kind::disjunction: return in_l2plus(*f.left()) && in_l2plus(*f.right());
    case formula_kind::knows: return in_l2plus(*f.child());
    }
    return false;
}

bool in_lhat(const formula& f)
{
    switch (f.kind()) {
    case formula_kind::familiar: return true;
    case formula_kind::conjunction:
    case formula_kind::disjunction: return in_lhat(*f.left()) && in_lhat(*f.right());
    case formula_kind::knows: return false; // bare K is universal, not existential
    case formula_kind::negation: {
        const formula& inner = *f.child();
        if (inner.kind() == formula_kind::familiar)
            return true; // negative literal
        // !K[a]!phi is the K-hat pattern
        if (inner.kind() == formula_kind::knows &&
            inner.child()->kind() == formula_kind::negation)
            return in_lhat(*inner.child()->child());
        return false;
    }
    }
    return false;
}

} // namespace

fragment_flags fragment_of(const formula& f)
{
    fragment_flags flags;
    flags.in_l1plus = in_l1plus(f);
    flags.in_l2plus = in_l2plus(f);
    flags.in_lhat = in_lhat(f);
    return flags;
}

namespace
{

// Returns (positive ? f : !f) rebuilt inside the existential fragment, or
// null when no boolean rewriting reaches it.
formula_ptr existential_form(const formula& f, bool positive)
{
    switch (f.kind()) {
    case formula_kind::familiar: {
        formula_ptr atom = formula::familiar(f.agent(), f.owner());
        return positive ? atom : formula::negation(std::move(atom));
    }
    case formula_kind::negation: return existential_form(*f.child(), !positive);
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
        formula_ptr l = existential_form(*f.left(), positive);
        formula_ptr r = existential_form(*f.right(), positive);
        if (!l || !r)
            return nullptr;
        const bool conj = (f.kind() == formula_kind::conjunction) == positive;
        return conj ? formula::conjunction(std::move(l), std::move(r))
                    : formula::disjunction(std::move(l), std::move(r));
    }
    case formula_kind::knows: {
        if (positive)
            return nullptr;
        // !K[a]phi is K-hat[a]!phi, i.e. !K[a]!(!phi).
        formula_ptr negated = existential_form(*f.child(), false);
        if (!negated)
            return nullptr;
        return formula::negation(
            formula::knows(f.agent(), formula::negation(std::move(negated))));
    }
    }
    return nullptr;
}

} // namespace

formula_ptr to_existential_fragment(const formula& f)
{
    return existential_form(f, true);
}

// Models and truth -----------------------------------------------------

gossip_model::gossip_model(universe u, equivalence_index idx) : u_(std::move(u)), idx_(std::move(idx))
{
    if (idx_.agents() != u_.agents() || idx_.members() != u_.size())
        throw domain_error("equivalence index does not belong to this universe");
}

gossip_model gossip_model::build(int n_agents, int bound, call_type t,
                                 const index_build_options& opts)
{
    universe u(n_agents, bound, t);
    equivalence_index idx = build_equivalence_index(u, opts);
    return gossip_model(std::move(u), std::move(idx));
}

bool eval_context::operator()(const formula& f, seq_index s)
{
    if (s >= model_.space().size())
        throw domain_error("sequence outside the model's universe");
    return eval_node(f, s);
}

bool eval_context::eval_node(const formula& f, seq_index s)
{
    switch (f.kind()) {
    case formula_kind::familiar: {
        if (f.agent() >= model_.agents() || f.owner() >= model_.agents())
            throw domain_error("formula mentions an agent outside the model");
        return (model_.space().secrets(s, f.agent()) & secret_of(f.owner())) != 0;
    }
    case formula_kind::negation: return !eval_node(*f.child(), s);
    case formula_kind::conjunction: return eval_node(*f.left(), s) && eval_node(*f.right(), s);
    case formula_kind::disjunction: return eval_node(*f.left(), s) || eval_node(*f.right(), s);
    case formula_kind::knows: {
        const agent_id a = f.agent();
        if (a >= model_.agents())
            throw domain_error("formula mentions an agent outside the model");
        const std::int32_t cls = model_.index().class_of(a, s);

        const auto node_it = node_ids_.emplace(&f, static_cast<std::uint32_t>(node_ids_.size()));
        const std::uint64_t key =
            (static_cast<std::uint64_t>(node_it.first->second) << 32) |
            static_cast<std::uint64_t>(static_cast<std::uint32_t>(cls));
        if (const auto it = know_cache_.find(key); it != know_cache_.end())
            return it->second != 0;

        bool value = true;
        for (seq_index member : model_.index().members_of(a, cls)) {
            if (restriction_ && !(*restriction_)[member])
                continue;
            if (!eval_node(*f.child(), member)) {
                value = false;
                break;
            }
        }
        know_cache_.emplace(key, value ? 1 : 0);
        return value;
    }
    }
    throw domain_error("malformed formula");
}

bool eval(const formula& f, std::span<const call> seq, const gossip_model& m)
{
    eval_context ctx(m);
    return ctx(f, m.space().index_of(seq));
}

} // namespace gossipscope
