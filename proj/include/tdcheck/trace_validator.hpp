#pragma once

// Replays a recorded behavior against a spec and reports the first step that
// is not a legal transition. Index 0 of a trace is its initial state and
// index i is the state after the i-th event.

#include "tdcheck/abstract_spec.hpp"
#include "tdcheck/safra_spec.hpp"
#include "tdcheck/trace_io.hpp"

namespace tdcheck
{

enum class RejectReason
{
    BadInitialState,
    LabelNotEnabled,
    PostStateMismatch,
    TypeError,
};

std::string_view reject_reason_name( RejectReason r );

struct ValidationVerdict
{
    bool accepted = true;
    std::optional<std::size_t> failing_index;
    std::optional<RejectReason> reason;
    std::string message;
    json expected_successors = json::array();  // shown on mismatch
    std::size_t checked_events = 0;

    [[nodiscard]] int exit_code() const { return accepted ? 0 : 1; }
    [[nodiscard]] json to_json() const;
};

namespace detail
{

inline ValidationVerdict reject( std::size_t index, RejectReason reason, std::string message )
{
    ValidationVerdict v;
    v.accepted = false;
    v.failing_index = index;
    v.reason = reason;
    v.message = std::move( message );
    return v;
}

// Parses and type-checks state `index`; sets `error` on failure.
template <Model M>
std::optional<typename M::State> load_state( const M& model, const json& j, std::size_t index,
                                             std::optional<ValidationVerdict>& error )
{
    try
    {
        auto s = model.from_json( j );
        if( !model.type_ok( s ) )
        {
            error = reject( index, RejectReason::TypeError, "state is not type-correct" );
            return std::nullopt;
        }
        return s;
    }
    catch( const std::exception& e )
    {
        error = reject( index, RejectReason::TypeError, std::string( "malformed state: " ) + e.what() );
        return std::nullopt;
    }
}

template <Model M>
json successor_list( const M& model, const std::vector<Transition<typename M::State>>& succ )
{
    json out = json::array();
    for( const auto& tr : succ )
    {
        auto j = label_to_json( tr.label );
        j[ "state" ] = model.to_json( tr.target );
        out.push_back( std::move( j ) );
    }
    return out;
}

} // namespace detail

// Labelled replay: each event's label must be enabled in the pre-state and
// one of its successors must equal the recorded post-state. Events without a
// label fall back to matching any successor.
template <Model M>
ValidationVerdict validate( const M& model, const Trace& trace, bool allow_stutter )
{
    using State = typename M::State;
    std::optional<ValidationVerdict> error;
    auto cur = detail::load_state( model, trace.initial, 0, error );
    if( !cur )
        return *error;
    if( !model.is_initial( *cur ) )
        return detail::reject( 0, RejectReason::BadInitialState, "first state does not satisfy Init" );

    std::string want, got;
    for( std::size_t i = 1; i <= trace.events.size(); ++i )
    {
        const auto& ev = trace.events[ i - 1 ];
        auto next = detail::load_state( model, ev.state, i, error );
        if( !next )
            return *error;
        const bool stutter = *next == *cur;
        if( ev.label && ev.label->action == Action::Stutter )
        {
            if( !allow_stutter )
                return detail::reject( i, RejectReason::LabelNotEnabled, "stuttering steps are not allowed" );
            if( !stutter )
            {
                auto v = detail::reject( i, RejectReason::PostStateMismatch, "stutter step changes the state" );
                v.expected_successors = json::array( { model.to_json( *cur ) } );
                return v;
            }
            cur = std::move( next );
            continue;
        }

        auto succ = model.successors( *cur );
        std::vector<Transition<State>> candidates;
        for( auto& tr : succ )
            if( !ev.label || tr.label == *ev.label )
                candidates.push_back( tr );
        if( candidates.empty() && !( stutter && allow_stutter ) )
            return detail::reject( i, RejectReason::LabelNotEnabled,
                                   ev.label ? ev.label->to_string() + " is not enabled" : "no transition is enabled" );

        got.clear();
        model.encode( *next, got );
        bool matched = stutter && allow_stutter && !ev.label;
        for( const auto& tr : candidates )
        {
            want.clear();
            model.encode( tr.target, want );
            if( want == got )
                matched = true;
        }
        if( !matched )
        {
            auto v = detail::reject( i, RejectReason::PostStateMismatch,
                                     "recorded post-state is not a successor" +
                                         ( ev.label ? " under " + ev.label->to_string() : std::string{} ) );
            v.expected_successors = detail::successor_list( model, candidates );
            return v;
        }
        cur = std::move( next );
    }
    ValidationVerdict ok;
    ok.checked_events = trace.events.size();
    return ok;
}

// Label-free replay of a state sequence: each consecutive pair must be
// related by some transition, or be a stutter step.
template <Model M>
ValidationVerdict validate_label_free( const M& model, const std::vector<json>& states )
{
    if( states.empty() )
        return detail::reject( 0, RejectReason::TypeError, "empty state sequence" );
    Trace t;
    t.instance = model.instance();
    t.initial = states.front();
    for( std::size_t i = 1; i < states.size(); ++i )
        t.events.push_back( { std::nullopt, states[ i ] } );
    return validate( model, t, true );
}

template <Model M>
ValidationVerdict validate_label_free( const M& model, const Trace& trace )
{
    std::vector<json> states{ trace.initial };
    for( const auto& e : trace.events )
        states.push_back( e.state );
    return validate_label_free( model, states );
}

// Picks the spec named in the trace and validates against it.
ValidationVerdict validate_trace( const Trace& trace, bool allow_stutter, bool label_free = false );

} // namespace tdcheck
