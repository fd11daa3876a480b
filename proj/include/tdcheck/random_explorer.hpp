#pragma once

// Seeded random walks. Each step picks a random successor inside the bounds
// and checks the safety query on the edge. Finding nothing proves nothing,
// so a clean run is reported inconclusive.

#include "tdcheck/inductive_checker.hpp"

#include <omp.h>

#include <mutex>
#include <unordered_map>

namespace tdcheck
{

// How a walk picks its next step: uniformly over labelled successors, or
// uniformly over enabled action instances (action kind plus first argument,
// the way TLC splits Next into sub-actions) and then over their successors.
enum class WalkChoice
{
    Successor,
    Action,
};

WalkChoice parse_walk_choice( std::string_view name );
std::string_view walk_choice_name( WalkChoice c );

struct ExploreConfig
{
    int walk_length = 100;  // states per behavior, including the first
    double budget_ms = 3000;
    int walkers = 0;  // 0: OpenMP default
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> max_walks;  // per walker; deterministic alternative to the budget
    bool stop_on_violation = true;
    WalkChoice choice = WalkChoice::Successor;

    void validate() const
    {
        if( walk_length < 1 )
            throw ConfigError( "walk length must be at least 1" );
        if( budget_ms < 1 )
            throw ConfigError( "budget must be at least 1 ms" );
    }
};

template <class State>
struct NamedLeadsTo
{
    std::string name;
    LeadsTo<State> property;
};

// Safety is checked on every edge. Leadsto properties are checked on the
// lassos a walk closes: when it revisits a state, and at every state where
// stuttering forever is fair.
template <class State>
struct WalkQuery
{
    SafetyQuery<State> safety;
    std::vector<NamedLeadsTo<State>> liveness;

    [[nodiscard]] std::vector<std::string> names() const
    {
        auto out = safety.names();
        for( const auto& p : liveness )
            out.push_back( p.name );
        return out;
    }
};

template <Model M>
WalkQuery<typename M::State> resolve_walk_query( const M& model, const std::vector<std::string>& invariants,
                                                 const std::vector<std::string>& action_invariants,
                                                 const std::vector<std::string>& liveness = {} )
{
    WalkQuery<typename M::State> q{ resolve_safety( model, invariants, action_invariants ), {} };
    for( const auto& n : liveness )
        q.liveness.push_back( { n, leadsto_property( model, n ) } );
    return q;
}

namespace detail
{

template <class State>
struct Walk
{
    std::vector<std::optional<Label>> labels;
    std::vector<State> states;
    std::vector<std::optional<Label>> cycle_labels;  // lasso: labels of the loop
    std::vector<State> cycle_states;                 // lasso: states after each loop step
    const std::string* violated = nullptr;
};

// Per-property progress along one walk.
struct LiveTrack
{
    long last_goal = -1;     // last index where Q held
    long open_premise = -1;  // first P /\ ~Q index after last_goal
};

template <Model M>
std::size_t pick_step( const std::vector<Transition<typename M::State>>& succ, const std::vector<std::size_t>& allowed,
                       WalkChoice choice, Rng& rng )
{
    if( choice == WalkChoice::Successor )
        return allowed[ uniform_below( rng, allowed.size() ) ];
    std::vector<std::pair<Action, std::int16_t>> groups;
    for( auto k : allowed )
    {
        std::pair g{ succ[ k ].label.action, succ[ k ].label.args[ 0 ] };
        if( std::find( groups.begin(), groups.end(), g ) == groups.end() )
            groups.push_back( g );
    }
    auto g = groups[ uniform_below( rng, groups.size() ) ];
    std::vector<std::size_t> members;
    for( auto k : allowed )
        if( std::pair{ succ[ k ].label.action, succ[ k ].label.args[ 0 ] } == g )
            members.push_back( k );
    return members[ uniform_below( rng, members.size() ) ];
}

// Fairness of the loop states[m..] closed by an edge back to states[m];
// `labels[i]` leads into states[i], `closing` leads back into states[m].
template <Model M>
bool loop_is_fair( const M& model, const LeadsTo<typename M::State>& p, const std::vector<typename M::State>& states,
                   const std::vector<std::optional<Label>>& labels, const Label& closing, std::size_t m )
{
    for( const auto& f : p.fairness )
    {
        bool ok = false;
        for( std::size_t i = m; i < states.size() && !ok; ++i )
        {
            const Label& in = i + 1 < states.size() ? *labels[ i + 1 ] : closing;
            const auto& next = i + 1 < states.size() ? states[ i + 1 ] : states[ m ];
            if( f.actions( in ) && !( next == states[ i ] ) )
                ok = true;
            else if( !enabled( model, f.actions, states[ i ] ) )
                ok = true;
        }
        if( !ok )
            return false;
    }
    return true;
}

template <Model M>
Walk<typename M::State> walk_from( const M& model, const Bounds& bounds, typename M::State start, int length,
                                   const WalkQuery<typename M::State>& query, WalkChoice choice, Rng& rng )
{
    using State = typename M::State;
    Walk<State> w;
    std::vector<LiveTrack> track( query.liveness.size() );
    std::unordered_map<std::string, std::size_t> seen;

    // Runs after each appended state; true when a leadsto lasso was closed.
    auto live_check = [&]() -> bool {
        const std::size_t k = w.states.size() - 1;
        const State& s = w.states.back();
        std::optional<std::size_t> repeat;
        if( !query.liveness.empty() )
        {
            auto [it, fresh] = seen.emplace( encode( model, s ), k );
            if( !fresh )
                repeat = it->second;
        }
        for( std::size_t p = 0; p < query.liveness.size(); ++p )
        {
            const auto& prop = query.liveness[ p ].property;
            auto& t = track[ p ];
            if( repeat )
            {
                // The loop is states[m..k-1] closed by the last edge.
                const std::size_t m = *repeat;
                if( t.open_premise >= 0 && t.last_goal < static_cast<long>( m ) )
                {
                    std::vector<State> loop( w.states.begin(), w.states.end() - 1 );
                    std::vector<std::optional<Label>> labels( w.labels.begin(), w.labels.end() - 1 );
                    if( loop_is_fair( model, prop, loop, labels, *w.labels.back(), m ) )
                    {
                        w.cycle_labels.assign( w.labels.begin() + static_cast<long>( m ) + 1, w.labels.end() );
                        w.cycle_states.assign( w.states.begin() + static_cast<long>( m ) + 1, w.states.end() );
                        w.labels.resize( m + 1 );
                        w.states.resize( m + 1 );
                        w.violated = &query.liveness[ p ].name;
                        return true;
                    }
                }
            }
            if( prop.goal( s ) )
            {
                t.last_goal = static_cast<long>( k );
                t.open_premise = -1;
            }
            else if( t.open_premise < 0 && prop.premise( s ) )
                t.open_premise = static_cast<long>( k );
            if( t.open_premise < 0 )
                continue;
            // Stuttering here forever is fair when every constraint is disabled.
            auto succ = model.successors( s );
            bool all_disabled = true;
            for( const auto& f : prop.fairness )
                if( enabled_in( succ, s, f.actions ) )
                    all_disabled = false;
            if( all_disabled )
            {
                w.cycle_labels = { Label::make( Action::Stutter ) };
                w.cycle_states = { s };
                w.violated = &query.liveness[ p ].name;
                return true;
            }
        }
        return false;
    };

    w.labels.push_back( std::nullopt );
    w.states.push_back( std::move( start ) );
    if( ( w.violated = first_failure( query.safety, w.states.back() ) ) || live_check() )
        return w;
    std::vector<std::size_t> allowed;
    while( static_cast<int>( w.states.size() ) < length )
    {
        auto succ = model.successors( w.states.back() );
        allowed.clear();
        for( std::size_t k = 0; k < succ.size(); ++k )
            if( model.within_bounds( succ[ k ].target, bounds ) )
                allowed.push_back( k );
        if( allowed.empty() )
            break;
        auto& tr = succ[ pick_step<M>( succ, allowed, choice, rng ) ];
        w.violated = first_failure( query.safety, w.states.back(), tr.target );
        w.labels.push_back( tr.label );
        w.states.push_back( std::move( tr.target ) );
        if( w.violated || live_check() )
            break;
    }
    return w;
}

template <Model M>
std::vector<TraceStep> walk_trace( const M& model, const Walk<typename M::State>& w )
{
    std::vector<TraceStep> out;
    for( std::size_t i = 0; i < w.states.size(); ++i )
        out.push_back( trace_step( model, w.labels[ i ], w.states[ i ] ) );
    return out;
}

template <Model M>
std::vector<TraceStep> walk_cycle( const M& model, const Walk<typename M::State>& w )
{
    std::vector<TraceStep> out;
    for( std::size_t i = 0; i < w.cycle_states.size(); ++i )
        out.push_back( trace_step( model, w.cycle_labels[ i ], w.cycle_states[ i ] ) );
    return out;
}

// Runs walkers until violation, budget, or walk cap. `start(rng)` yields the
// first state of a walk, or nothing when no start state can be produced.
template <Model M, class Start>
CheckReport run_walkers( const M& model, const Bounds& bounds, const WalkQuery<typename M::State>& query,
                         const ExploreConfig& cfg, CheckReport report, Start start )
{
    Stopwatch clock;
    const int workers = cfg.walkers > 0 ? cfg.walkers : omp_get_max_threads();
    std::atomic<bool> stop{ false };
    std::mutex result_lock;
    std::optional<Walk<typename M::State>> first;
    std::uint64_t walks = 0, steps = 0, violating = 0;
    std::exception_ptr error;

#pragma omp parallel num_threads( workers ) reduction( + : walks, steps, violating )
    {
        const int w = omp_get_thread_num();
        Rng rng{ derive_seed( cfg.seed, static_cast<std::uint64_t>( w ) ) };
        try
        {
            for( std::uint64_t k = 0; !stop.load( std::memory_order_relaxed ); ++k )
            {
                if( cfg.max_walks ? k >= *cfg.max_walks : clock.elapsed_ms() >= cfg.budget_ms )
                    break;
                auto s = start( rng );
                if( !s )
                    break;
                auto walk = walk_from( model, bounds, std::move( *s ), cfg.walk_length, query, cfg.choice, rng );
                ++walks;
                steps += walk.states.size() - 1;
                if( !walk.violated )
                    continue;
                ++violating;
                std::lock_guard guard{ result_lock };
                if( !first )
                    first = std::move( walk );
                if( cfg.stop_on_violation )
                    stop = true;
            }
        }
        catch( ... )
        {
            std::lock_guard guard{ result_lock };
            if( !error )
                error = std::current_exception();
            stop = true;
        }
    }
    if( error )
        std::rethrow_exception( error );

    report.stats[ "walks" ] = walks;
    report.stats[ "steps" ] = steps;
    report.stats[ "violation_rate" ] = walks ? static_cast<double>( violating ) / static_cast<double>( walks ) : 0.0;
    report.stats[ "seed" ] = cfg.seed;
    report.stats[ "walkers" ] = workers;
    report.stats[ "choice" ] = walk_choice_name( cfg.choice );
    report.distinct_states = walks + steps;  // states visited, with repetition
    report.soundness = Soundness::Probabilistic;
    if( first )
    {
        report.verdict = Verdict::Violation;
        report.violated_property = *first->violated;
        report.trace = walk_trace( model, *first );
        report.cycle = walk_cycle( model, *first );
        report.diameter = static_cast<int>( first->states.size() ) - 1;
    }
    else
    {
        report.verdict = Verdict::Inconclusive;
        if( report.message.empty() )
            report.message = "no violation found; random walks give no coverage guarantee";
    }
    report.wall_ms = clock.elapsed_ms();
    return report;
}

} // namespace detail

// One walk from a uniformly chosen initial state.
template <Model M>
CheckReport random_walk( const M& model, const Bounds& bounds, std::uint64_t seed, int walk_length,
                         const WalkQuery<typename M::State>& query, WalkChoice choice = WalkChoice::Successor )
{
    if( walk_length < 1 )
        throw ConfigError( "walk length must be at least 1" );
    Stopwatch clock;
    CheckReport report = make_report( model, "walk", bounds );
    report.properties = query.names();
    report.soundness = Soundness::Probabilistic;
    auto inits = model.initial_states();
    Rng rng{ derive_seed( seed, 0 ) };
    auto start = inits[ uniform_below( rng, inits.size() ) ];
    auto walk = detail::walk_from( model, bounds, std::move( start ), walk_length, query, choice, rng );
    report.trace = detail::walk_trace( model, walk );
    report.cycle = detail::walk_cycle( model, walk );
    report.diameter = static_cast<int>( walk.states.size() ) - 1;
    report.distinct_states = walk.states.size();
    report.stats[ "seed" ] = seed;
    if( walk.violated )
    {
        report.verdict = Verdict::Violation;
        report.violated_property = *walk.violated;
    }
    report.wall_ms = clock.elapsed_ms();
    return report;
}

// Parallel walkers from the initial states.
template <Model M>
CheckReport explore( const M& model, const Bounds& bounds, const ExploreConfig& cfg,
                     const WalkQuery<typename M::State>& query )
{
    cfg.validate();
    bounds.validate();
    CheckReport report = make_report( model, "explore", bounds );
    report.properties = query.names();
    const auto inits = model.initial_states();
    return detail::run_walkers( model, bounds, query, cfg, std::move( report ), [&]( Rng& rng ) {
        return std::optional{ inits[ uniform_below( rng, inits.size() ) ] };
    } );
}

// Walks starting from sampled states that satisfy `base`, so the search
// begins at arbitrary depth.
template <Model M>
CheckReport explore_from_inv( const M& model, const Bounds& bounds, const ExploreConfig& cfg,
                              const std::vector<NamedStatePredicate<typename M::State>>& base,
                              const WalkQuery<typename M::State>& query )
{
    cfg.validate();
    bounds.validate();
    CheckReport report = make_report( model, "explore-from-inv", bounds );
    report.properties = query.names();
    InvSampler<M> sampler{ model, bounds, base, cfg.seed };
    const double rate = sampler.probe( cfg.walkers > 0 ? cfg.walkers : omp_get_max_threads() );
    report.stats[ "acceptance" ] = rate;
    if( rate < min_acceptance )
    {
        report.verdict = Verdict::Inconclusive;
        report.message = "start predicate too sparse to sample (acceptance " + std::to_string( rate ) + ")";
        return report;
    }
    return detail::run_walkers( model, bounds, query, cfg, std::move( report ),
                                [&]( Rng& rng ) -> std::optional<typename M::State> {
                                    for( ;; )
                                    {
                                        auto s = sampler.draw( rng() );
                                        if( sampler.accepts( s ) )
                                            return s;
                                    }
                                } );
}

} // namespace tdcheck
