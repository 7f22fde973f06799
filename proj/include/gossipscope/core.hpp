#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gossipscope
{

// Errors ---------------------------------------------------------------

class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A precondition violation or an out-of-range input value.
class domain_error : public error
{
public:
    using error::error;
};

/// Input text rejected by a parser; carries the 0-based offset of the
/// offending character.
class parse_error : public error
{
public:
    parse_error(const std::string& what, std::size_t position)
        : error(what + " (at position " + std::to_string(position) + ")"),
          position_(position)
    {
    }

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Work refused because it would exceed a configured budget.
class resource_error : public error
{
public:
    using error::error;
};

// Agents and secrets ----------------------------------------------------

using agent_id = int;

/// Bit k set means the secret owned by agent k.
using secret_set = std::uint32_t;

/// Agents are displayed as single lowercase letters, which caps the group
/// size at 26.
inline constexpr int max_agents = 26;
inline constexpr int min_agents = 3;

char agent_name(agent_id a);
agent_id agent_from_name(char name, int n_agents);

constexpr secret_set secret_of(agent_id owner)
{
    return secret_set{1} << owner;
}

constexpr secret_set all_secrets(int n_agents)
{
    return (secret_set{1} << n_agents) - 1;
}

/// Renders a secret set as uppercase letters, e.g. {A,B} -> "AB".
std::string format_secret_set(secret_set s);

// Call types -----------------------------------------------------------

/// What outsiders note about a call: the full caller/callee identity (p1),
/// only that some call happened (p2), or nothing at all (p3).
enum class privacy { p1, p2, p3 };

/// Information flow of a call: both ways, caller to callee, or callee to
/// caller.
enum class direction { pushpull, push, pull };

/// Whether an affected agent sees only the merged result of a call (after)
/// or the partner's secrets before merging (before).
enum class observance { after, before };

struct call_type
{
    privacy p{};
    direction d{};
    observance o{};

    friend bool operator==(const call_type&, const call_type&) = default;
};

/// The 18 valid combinations, in a fixed enumeration order.
const std::array<call_type, 18>& all_call_types();

std::string format_call_type(call_type t);

/// Accepts "p2,pushpull,after" (commas or spaces between the parts).
call_type parse_call_type(std::string_view text);

std::string format_privacy(privacy p);
std::string format_direction(direction d);
std::string format_observance(observance o);

// Calls ----------------------------------------------------------------

struct call
{
    agent_id caller{};
    agent_id callee{};

    friend auto operator<=>(const call&, const call&) = default;
};

/// Validates caller != callee and both in [0, n).
call make_call(agent_id caller, agent_id callee, int n_agents);

/// True iff a is the caller or the callee.
bool involved(agent_id a, call c);

/// True iff the call can change a's secret set under direction d: a is on
/// the receiving end of the flow.
bool affected(agent_id a, call c, direction d);

/// The other participant; requires involved(a, c).
agent_id partner(agent_id a, call c);

// Gossip situations -----------------------------------------------------

/// Assignment of a secret set to every agent.
class gossip_situation
{
public:
    gossip_situation() = default;
    gossip_situation(int n_agents, std::vector<secret_set> sets);

    int agents() const noexcept { return static_cast<int>(sets_.size()); }
    secret_set secrets(agent_id a) const { return sets_.at(static_cast<std::size_t>(a)); }
    std::span<const secret_set> sets() const noexcept { return sets_; }

    bool expert(agent_id a) const { return secrets(a) == all_secrets(agents()); }
    bool all_expert() const;

    friend bool operator==(const gossip_situation&, const gossip_situation&) = default;

private:
    std::vector<secret_set> sets_;
};

/// The situation in which every agent holds exactly her own secret.
/// Rejects n outside [3, 26].
gossip_situation initial_situation(int n_agents);

gossip_situation apply_call(const gossip_situation& s, call c, direction d);
gossip_situation apply_sequence(const gossip_situation& s, std::span<const call> seq, direction d);

/// Dotted notation, e.g. "AB.AB.C".
std::string format_situation(const gossip_situation& s);

// Call notation ----------------------------------------------------------
//
// "a<>b" push-pull, "a>b" push, "a<b" pull; sequences are ";"-separated and
// whitespace is ignored.

std::string format_call(call c, direction d);
std::string format_sequence(std::span<const call> seq, direction d);

struct parsed_sequence
{
    std::vector<call> calls;
    /// Direction spelled by the call tokens; empty for the empty sequence.
    std::optional<direction> dir;
};

parsed_sequence parse_sequence(std::string_view text, int n_agents);

/// Like parse_sequence but requires the notation to match the expected
/// direction.
std::vector<call> parse_sequence_as(std::string_view text, int n_agents, direction expected);

} // namespace gossipscope
