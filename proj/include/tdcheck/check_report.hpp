#pragma once

#include "tdcheck/kernel.hpp"

#include <algorithm>
#include <chrono>

namespace tdcheck
{

enum class Verdict
{
    Pass,
    Violation,
    Inconclusive,
};

enum class Soundness
{
    Exact,
    Probabilistic,
};

std::string_view verdict_name( Verdict v );
Verdict parse_verdict( std::string_view name );

inline constexpr int exit_pass = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_inconclusive = 2;
inline constexpr int exit_config_error = 3;

inline constexpr std::string_view report_schema = "tdcheck.report/1";

struct TraceStep
{
    std::optional<Label> label;  // absent for the first state
    json state;
    std::string encoding;  // hex of the canonical encoding
};

struct CheckReport
{
    std::string check;
    std::string spec;
    int nodes = 0;
    std::optional<std::string> mutant;
    Bounds bounds;
    std::vector<std::string> properties;

    Verdict verdict = Verdict::Pass;
    std::uint64_t distinct_states = 0;
    int diameter = 0;
    std::optional<std::string> violated_property;
    std::vector<TraceStep> trace;
    std::vector<TraceStep> cycle;  // non-empty for a lasso counterexample
    double wall_ms = 0;
    Soundness soundness = Soundness::Exact;
    std::string message;
    json stats = json::object();

    [[nodiscard]] bool is_lasso() const { return !cycle.empty(); }
    [[nodiscard]] int exit_code() const;
    [[nodiscard]] json to_json() const;
    static CheckReport from_json( const json& j );
};

template <Model M>
CheckReport make_report( const M& model, std::string check, const Bounds& bounds )
{
    CheckReport r;
    r.check = std::move( check );
    r.spec = model.instance().name;
    r.nodes = model.nodes();
    r.mutant = model.instance().mutant;
    r.bounds = bounds;
    if( model.instance().token_start )
        r.stats[ "token_start" ] = *model.instance().token_start;
    return r;
}

template <Model M>
TraceStep trace_step( const M& model, std::optional<Label> label, const typename M::State& s )
{
    return TraceStep{ label, model.to_json( s ), to_hex( encode( model, s ) ) };
}

class Stopwatch
{
public:
    Stopwatch() : _start{ std::chrono::steady_clock::now() } {}
    [[nodiscard]] double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - _start ).count();
    }

private:
    std::chrono::steady_clock::time_point _start;
};

// Replays a reported trace (and lasso cycle) through the successor function.
// Returns an empty string when every step is a legal transition.
template <Model M>
std::string replay_report_trace( const M& model, const CheckReport& report )
{
    using State = typename M::State;
    if( report.trace.empty() )
        return "empty trace";
    State cur = model.from_json( report.trace.front().state );
    if( !model.is_initial( cur ) && report.check != "step" && report.check != "explore-from-inv" )
        return "first state is not initial";
    auto advance = [&]( const TraceStep& step, std::size_t index ) -> std::string {
        State next = model.from_json( step.state );
        if( !step.label )
            return "missing label at step " + std::to_string( index );
        if( step.label->action == Action::Stutter )
        {
            if( !( next == cur ) )
                return "stutter changes state at step " + std::to_string( index );
        }
        else
        {
            auto targets = apply_label( model, *step.label, cur );
            if( std::find( targets.begin(), targets.end(), next ) == targets.end() )
                return "illegal transition " + step.label->to_string() + " at step " + std::to_string( index );
        }
        cur = std::move( next );
        return {};
    };
    for( std::size_t i = 1; i < report.trace.size(); ++i )
        if( auto err = advance( report.trace[ i ], i ); !err.empty() )
            return err;
    if( !report.cycle.empty() )
    {
        State entry = cur;
        for( std::size_t i = 0; i < report.cycle.size(); ++i )
            if( auto err = advance( report.cycle[ i ], report.trace.size() + i ); !err.empty() )
                return err;
        if( !( cur == entry ) )
            return "cycle does not return to its entry state";
    }
    return {};
}

} // namespace tdcheck
