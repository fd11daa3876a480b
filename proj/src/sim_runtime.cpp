#include "tdcheck/sim_runtime.hpp"

#include "tdcheck/rng.hpp"

#include <omp.h>

namespace tdcheck
{

namespace
{

double event_weight( const SimConfig& c, const Label& l )
{
    switch( l.action )
    {
    case Action::SendMsg:
        return c.send_probability / c.nodes;
    case Action::Terminate:
        return c.terminate_probability;
    case Action::RcvMsg:
        return 1.0;
    case Action::InitiateProbe:
    case Action::PassToken:
        return c.token_priority;
    default:
        return 0.0;
    }
}

bool in_unit( double p )
{
    return p >= 0.0 && p <= 1.0;
}

} // namespace

void SimConfig::validate() const
{
    if( nodes < 1 || nodes > 255 )
        throw ConfigError( "simulation needs 1 <= N <= 255" );
    if( max_events < 1 )
        throw ConfigError( "max events must be at least 1" );
    if( !in_unit( send_probability ) || !in_unit( terminate_probability ) )
        throw ConfigError( "send and terminate probabilities must lie in [0, 1]" );
    if( !( token_priority > 0.0 ) )
        throw ConfigError( "token priority must be positive" );
}

json SimConfig::to_json() const
{
    return { { "N", nodes },
             { "seed", seed },
             { "max_events", max_events },
             { "send_probability", send_probability },
             { "terminate_probability", terminate_probability },
             { "token_priority", token_priority } };
}

SimConfig SimConfig::from_json( const json& j )
{
    SimConfig c;
    c.nodes = j.value( "N", c.nodes );
    c.seed = j.value( "seed", c.seed );
    c.max_events = j.value( "max_events", c.max_events );
    c.send_probability = j.value( "send_probability", c.send_probability );
    c.terminate_probability = j.value( "terminate_probability", c.terminate_probability );
    c.token_priority = j.value( "token_priority", c.token_priority );
    return c;
}

json SimOutcome::to_json() const
{
    auto opt = []( const std::optional<std::uint64_t>& v ) { return v ? json( *v ) : json( nullptr ); };
    return { { "detected", detected },
             { "detected_at", opt( detected_at ) },
             { "terminated_at", opt( terminated_at ) },
             { "events", events },
             { "rounds_after_termination", rounds_after_termination } };
}

SimRun run_simulation( const SimConfig& config )
{
    config.validate();
    SafraSpec spec{ SpecInstance{ "safra", config.nodes, config.mutant, config.token_start } };
    Rng rng{ derive_seed( config.seed, 0 ) };

    const auto inits = spec.initial_states();
    SafraState s = inits[ uniform_below( rng, inits.size() ) ];

    SimRun run;
    run.trace.instance = spec.instance();
    run.trace.config = config.to_json();
    run.trace.initial = spec.to_json( s );
    auto& out = run.outcome;
    if( terminated( s ) )
        out.terminated_at = 0;

    std::vector<double> weights;
    while( !term_detect( s ) && out.events < config.max_events )
    {
        auto succ = spec.successors( s );
        weights.clear();
        double total = 0;
        for( const auto& tr : succ )
        {
            weights.push_back( event_weight( config, tr.label ) );
            total += weights.back();
        }
        if( total <= 0 )
            break;
        std::discrete_distribution<std::size_t> pick{ weights.begin(), weights.end() };
        auto& tr = succ[ pick( rng ) ];
        ++out.events;
        if( out.terminated_at && tr.label.action == Action::InitiateProbe )
            ++out.rounds_after_termination;
        s = std::move( tr.target );
        run.trace.events.push_back( { tr.label, spec.to_json( s ) } );
        if( !out.terminated_at && terminated( s ) )
            out.terminated_at = out.events;
    }
    if( term_detect( s ) )
    {
        out.detected = true;
        out.detected_at = out.events;
    }
    run.trace.verdict = out.to_json();
    return run;
}

json SimSummary::to_json() const
{
    json per_run = json::array();
    for( const auto& r : runs )
        per_run.push_back( r.to_json() );
    return { { "runs", runs.size() },
             { "detection_rate", detection_rate },
             { "mean_events_to_detection", mean_events_to_detection },
             { "mean_rounds_after_termination", mean_rounds_after_termination },
             { "max_rounds_after_termination", max_rounds_after_termination },
             { "per_run", per_run } };
}

SimSummary run_batch( const SimConfig& base, const std::vector<std::uint64_t>& seeds, int workers )
{
    base.validate();
    SimSummary summary;
    summary.runs.resize( seeds.size() );
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for num_threads( threads ) schedule( dynamic, 1 )
    for( std::size_t k = 0; k < seeds.size(); ++k )
    {
        SimConfig c = base;
        c.seed = seeds[ k ];
        summary.runs[ k ] = run_simulation( c ).outcome;
    }
    if( seeds.empty() )
        return summary;

    std::uint64_t detected = 0, events = 0, rounds = 0, terminated_runs = 0;
    for( const auto& r : summary.runs )
    {
        if( r.detected )
        {
            ++detected;
            events += *r.detected_at;
        }
        if( r.terminated_at )
        {
            ++terminated_runs;
            rounds += r.rounds_after_termination;
        }
        summary.max_rounds_after_termination = std::max( summary.max_rounds_after_termination, r.rounds_after_termination );
    }
    summary.detection_rate = static_cast<double>( detected ) / static_cast<double>( seeds.size() );
    if( detected )
        summary.mean_events_to_detection = static_cast<double>( events ) / static_cast<double>( detected );
    if( terminated_runs )
        summary.mean_rounds_after_termination = static_cast<double>( rounds ) / static_cast<double>( terminated_runs );
    return summary;
}

} // namespace tdcheck
