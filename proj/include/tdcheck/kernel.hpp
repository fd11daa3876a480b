#pragma once

// State-machine interface shared by the abstract termination-detection spec
// and Safra's algorithm. Checkers are templates over the `Model` concept.

#include <array>
#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tdcheck
{

using json = nlohmann::json;

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class LookupError : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

// Successors are emitted in this order, then by lexicographic arguments.
enum class Action : std::uint8_t
{
    InitiateProbe,
    PassToken,
    SendMsg,
    RcvMsg,
    Terminate,
    DetectTermination,
    Stutter,
};

std::string_view action_name( Action a );
Action parse_action( std::string_view name );
int action_arity( Action a );

struct Label
{
    Action action = Action::Stutter;
    std::array<std::int16_t, 2> args{ -1, -1 };

    static Label make( Action a ) { return Label{ a, { -1, -1 } }; }
    static Label make( Action a, int i ) { return Label{ a, { static_cast<std::int16_t>( i ), -1 } }; }
    static Label make( Action a, int i, int j )
    {
        return Label{ a, { static_cast<std::int16_t>( i ), static_cast<std::int16_t>( j ) } };
    }

    [[nodiscard]] std::vector<int> arg_list() const;
    [[nodiscard]] std::string to_string() const;

    friend auto operator<=>( const Label&, const Label& ) = default;
};

// Parses "PassToken(2)", "SendMsg(0,1)", "stutter".
Label parse_label( std::string_view text );
json label_to_json( const Label& l );
Label label_from_json( const json& j );

template <class State>
struct Transition
{
    Label label;
    State target;
};

// State constraint. Absent fields are unbounded.
struct Bounds
{
    std::optional<int> pending;  // K
    std::optional<int> counter;  // C, symmetric: |counter[i]| <= C
    std::optional<int> token_q;  // Q, symmetric: |token.q| <= Q
    std::optional<int> max_depth;

    void validate() const;
    [[nodiscard]] json to_json() const;
};

struct SpecInstance
{
    std::string name;  // "abstract" or "safra"
    int nodes = 1;
    std::optional<std::string> mutant;
    // Safra only: where the token may sit initially, "any" node (default)
    // or only the "initiator".
    std::optional<std::string> token_start;

    [[nodiscard]] bool token_at_initiator() const { return token_start && *token_start == "initiator"; }
    void validate() const;
};

// Canonical encoding: version byte, spec tag, N, then fields in fixed order
// with little-endian fixed-width integers.
inline constexpr std::uint8_t encoding_version = 1;

class Encoder
{
public:
    explicit Encoder( std::string& out ) : _out{ out } {}
    void u8( std::uint8_t v ) { _out.push_back( static_cast<char>( v ) ); }
    void i32( std::int32_t v );

private:
    std::string& _out;
};

class Decoder
{
public:
    explicit Decoder( std::string_view in ) : _in{ in } {}
    std::uint8_t u8();
    std::int32_t i32();
    [[nodiscard]] bool done() const { return _pos == _in.size(); }

private:
    std::string_view _in;
    std::size_t _pos = 0;
};

struct Fingerprint
{
    std::uint64_t value = 0;
    friend auto operator<=>( const Fingerprint&, const Fingerprint& ) = default;
};

Fingerprint fingerprint_bytes( std::string_view bytes );
std::string to_hex( std::string_view bytes );
std::string from_hex( std::string_view hex );

template <class State>
using StatePredicate = std::function<bool( const State& )>;
template <class State>
using ActionPredicate = std::function<bool( const State&, const State& )>;

// WF over the labels selected by `actions`. Only edges with source != target
// count as taking the fair action.
struct FairnessConstraint
{
    std::string name;
    std::function<bool( const Label& )> actions;
};

template <class State>
struct LeadsTo
{
    std::string premise_name;
    std::string goal_name;
    StatePredicate<State> premise;
    StatePredicate<State> goal;
    std::vector<FairnessConstraint> fairness;
};

template <class State>
struct PredicateTable
{
    std::map<std::string, StatePredicate<State>, std::less<>> state;
    std::map<std::string, ActionPredicate<State>, std::less<>> action;
    std::map<std::string, LeadsTo<State>, std::less<>> leadsto;
};

template <class State>
struct NamedStatePredicate
{
    std::string name;
    StatePredicate<State> eval;
};

template <class State>
struct NamedActionPredicate
{
    std::string name;
    ActionPredicate<State> eval;
};

template <class M>
concept Model = requires( const M& m, const typename M::State& s, const Bounds& b, std::string& buf,
                          std::string_view bytes, std::uint64_t index, const json& j ) {
    typename M::State;
    { m.instance() } -> std::convertible_to<const SpecInstance&>;
    { m.nodes() } -> std::convertible_to<int>;
    { m.initial_states() } -> std::same_as<std::vector<typename M::State>>;
    { m.is_initial( s ) } -> std::same_as<bool>;
    { m.successors( s ) } -> std::same_as<std::vector<Transition<typename M::State>>>;
    { m.within_bounds( s, b ) } -> std::same_as<bool>;
    { m.type_ok( s ) } -> std::same_as<bool>;
    m.encode( s, buf );
    { m.decode( bytes ) } -> std::same_as<typename M::State>;
    { m.encoded_size() } -> std::convertible_to<std::size_t>;
    { m.to_json( s ) } -> std::same_as<json>;
    { m.from_json( j ) } -> std::same_as<typename M::State>;
    { m.predicates() } -> std::convertible_to<const PredicateTable<typename M::State>&>;
    { m.universe_size( b ) } -> std::same_as<std::uint64_t>;
    { m.universe_state( b, index ) } -> std::same_as<typename M::State>;
};

template <Model M>
std::string encode( const M& model, const typename M::State& s )
{
    std::string out;
    out.reserve( model.encoded_size() );
    model.encode( s, out );
    return out;
}

template <Model M>
Fingerprint fingerprint( const M& model, const typename M::State& s )
{
    return fingerprint_bytes( encode( model, s ) );
}

template <Model M>
NamedStatePredicate<typename M::State> state_predicate( const M& model, std::string_view name )
{
    const auto& table = model.predicates().state;
    auto it = table.find( name );
    if( it == table.end() )
        throw LookupError( "unknown state predicate '" + std::string( name ) + "' for spec " + model.instance().name );
    return { it->first, it->second };
}

template <Model M>
NamedActionPredicate<typename M::State> action_predicate( const M& model, std::string_view name )
{
    const auto& table = model.predicates().action;
    auto it = table.find( name );
    if( it == table.end() )
        throw LookupError( "unknown action predicate '" + std::string( name ) + "' for spec " + model.instance().name );
    return { it->first, it->second };
}

template <Model M>
const LeadsTo<typename M::State>& leadsto_property( const M& model, std::string_view name )
{
    const auto& table = model.predicates().leadsto;
    auto it = table.find( name );
    if( it == table.end() )
        throw LookupError( "unknown leadsto property '" + std::string( name ) + "' for spec " + model.instance().name );
    return it->second;
}

template <Model M>
bool eval_state_predicate( const M& model, std::string_view name, const typename M::State& s )
{
    return state_predicate( model, name ).eval( s );
}

template <Model M>
bool eval_action_predicate( const M& model, std::string_view name, const typename M::State& s,
                            const typename M::State& t )
{
    return action_predicate( model, name ).eval( s, t );
}

// ENABLED <A>_vars: some selected label has a successor that changes the state.
template <class State>
bool enabled_in( const std::vector<Transition<State>>& succ, const State& s,
                 const std::function<bool( const Label& )>& actions )
{
    if( !actions )
        return false;
    for( const auto& tr : succ )
        if( actions( tr.label ) && !( tr.target == s ) )
            return true;
    return false;
}

template <Model M>
bool enabled( const M& model, const std::function<bool( const Label& )>& actions, const typename M::State& s )
{
    return enabled_in( model.successors( s ), s, actions );
}

// Applies one label; empty when its guard is false.
template <Model M>
std::vector<typename M::State> apply_label( const M& model, const Label& label, const typename M::State& s )
{
    std::vector<typename M::State> out;
    for( auto& tr : model.successors( s ) )
        if( tr.label == label )
            out.push_back( std::move( tr.target ) );
    return out;
}

std::function<bool( const Label& )> action_set( std::vector<Action> actions );

} // namespace tdcheck
