#pragma once

#include "gossipscope/logic.hpp"

#include <iosfwd>

namespace gossipscope
{

struct instruction
{
    formula_ptr guard;
    call action{};
};

/// A guard/call template over two agent placeholders; the caller
/// placeholder is the agent on the left of the call token.
struct instruction_schema
{
    std::string guard_text;
    char caller_var = 'X';
    char callee_var = 'Y';
    direction call_direction = direction::pushpull;
};

/// A set of ground instructions, one per ordered pair of distinct agents
/// when built from a schema.
class protocol
{
public:
    protocol(int n_agents, direction d, std::vector<instruction> instructions);

    int agents() const noexcept { return n_; }
    direction call_direction() const noexcept { return d_; }
    std::span<const instruction> instructions() const noexcept { return instructions_; }

private:
    int n_;
    direction d_;
    std::vector<instruction> instructions_;
};

/// Grounds the schema over all ordered pairs of distinct agents.  Guards
/// must be Boolean combinations of K[caller]-prefixed subformulas; a bare
/// atom or a foreign modality is a validation error.
protocol instantiate(const instruction_schema& schema, int n_agents);

/// "Any agent calls another if she does not know that the other is
/// familiar with her secret."  Guards are built in the existential
/// !K[X]!(!F[Y,X]) shape so they sit inside the fragment required by the
/// fixpoint semantics.
protocol hear_my_secret(int n_agents);

/// The fixed 2n-4 schedule: one chosen agent briefs the outsiders, four
/// hub calls spread everything among the chosen four, then the outsiders
/// are briefed again.  Requires n >= 4.
std::vector<call> schedule_2n_minus_4(int n_agents);

// Computation trees --------------------------------------------------------

struct computation_tree
{
    std::vector<seq_index> members; // ascending; always contains the empty sequence
    std::vector<char> terminal;     // no instruction fires at this member
    std::vector<char> bound_limited; // instructions fire but extensions exceed the bound
};

/// Naive semantics: guards are evaluated against the full bounded model.
computation_tree compute_tree(const protocol& p, const gossip_model& m);

/// Calls whose guards hold at the member; with a restriction mask the
/// guards are evaluated in the model relativised to that candidate set.
std::vector<call> compliant_calls(const protocol& p, seq_index s, const gossip_model& m,
                                  const std::vector<char>* restriction = nullptr);

/// The (P,X)-compliant set within the bound, as a mask over the universe;
/// guards are evaluated with knowledge restricted to X.
std::vector<char> relativised_tree(const protocol& p, const std::vector<char>& candidate,
                                   const gossip_model& m);

/// One pruning step: members of the candidate set that stay compliant when
/// everyone assumes the candidate set.
std::vector<char> rho(const protocol& p, const std::vector<char>& candidate,
                      const gossip_model& m);

/// Iterates the pruning step downward from the full bounded universe until
/// it stabilizes.  Requires every guard to lie in (or rewrite into) the
/// existential fragment, which makes the step monotone.
std::vector<char> greatest_fixpoint(const protocol& p, const gossip_model& m);

// Analysis -----------------------------------------------------------------

enum class protocol_semantics { naive, fixpoint };

struct analysis_report
{
    protocol_semantics semantics{};
    std::uint64_t size = 0;           // compliant sequences within the bound
    std::uint64_t terminal_count = 0; // members with no compliant extension
    bool all_expert = false;          // every terminal member makes every agent an expert
    bool bound_limited = false;       // some member could extend beyond the bound
};

analysis_report analyze(const protocol& p, const gossip_model& m, protocol_semantics mode);

// Protocol files -------------------------------------------------------------
//
//   # comment
//   agents: 4
//   calltype: p2 pushpull after
//   bound: 4
//   rule (X,Y): !K[X]F[Y,X] -> X<>Y

struct protocol_file
{
    int agents = 0;
    call_type type{};
    int bound = 0;
    std::vector<instruction_schema> rules;
};

protocol_file parse_protocol_file(std::istream& in);
protocol_file load_protocol_file(const std::string& path);

} // namespace gossipscope
