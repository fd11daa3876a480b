#pragma once

// Exhaustive breadth-first reachability with state and action invariants.
//
// States outside the bounds are generated and checked against every
// invariant but are neither stored, counted, nor expanded. Counterexamples
// are shortest paths: levels are expanded one at a time and the first level
// with a violation ends the search.

#include "tdcheck/check_report.hpp"
#include "tdcheck/state_store.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <new>
#include <unordered_map>

namespace tdcheck
{

template <class State>
struct SafetyQuery
{
    std::vector<NamedStatePredicate<State>> invariants;
    std::vector<NamedActionPredicate<State>> action_invariants;

    [[nodiscard]] std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for( const auto& p : invariants )
            out.push_back( p.name );
        for( const auto& p : action_invariants )
            out.push_back( p.name );
        return out;
    }
};

template <Model M>
SafetyQuery<typename M::State> resolve_safety( const M& model, const std::vector<std::string>& invariants,
                                               const std::vector<std::string>& action_invariants )
{
    SafetyQuery<typename M::State> q;
    for( const auto& n : invariants )
        q.invariants.push_back( state_predicate( model, n ) );
    for( const auto& n : action_invariants )
        q.action_invariants.push_back( action_predicate( model, n ) );
    return q;
}

struct BfsOptions
{
    int workers = 0;  // 0: OpenMP default
    std::optional<std::uint64_t> max_states;
    StoreMode store = StoreMode::Exact;
};

namespace detail
{

// First failing predicate on the edge (s, t), checking action invariants
// before the state invariants of t.
template <class State>
const std::string* first_failure( const SafetyQuery<State>& q, const State& s, const State& t )
{
    for( const auto& a : q.action_invariants )
        if( !a.eval( s, t ) )
            return &a.name;
    for( const auto& p : q.invariants )
        if( !p.eval( t ) )
            return &p.name;
    return nullptr;
}

template <class State>
const std::string* first_failure( const SafetyQuery<State>& q, const State& s )
{
    for( const auto& p : q.invariants )
        if( !p.eval( s ) )
            return &p.name;
    return nullptr;
}

// Rebuilds a trace from (parent, step) records by replaying successors.
template <Model M, class ParentFn, class StepFn>
std::vector<TraceStep> rebuild_trace( const M& model, std::uint64_t id, ParentFn parent_of, StepFn step_of )
{
    std::vector<std::uint32_t> steps;
    for( std::uint64_t cur = id; cur != no_parent; cur = parent_of( cur ) )
        steps.push_back( step_of( cur ) );
    std::reverse( steps.begin(), steps.end() );

    auto inits = model.initial_states();
    typename M::State s = inits.at( steps.front() );
    std::vector<TraceStep> out{ trace_step( model, std::nullopt, s ) };
    for( std::size_t k = 1; k < steps.size(); ++k )
    {
        auto succ = model.successors( s );
        auto& tr = succ.at( steps[ k ] );
        out.push_back( trace_step( model, tr.label, tr.target ) );
        s = std::move( tr.target );
    }
    return out;
}

struct LevelViolation
{
    std::size_t frontier_index = SIZE_MAX;
    std::size_t successor_index = SIZE_MAX;
    const std::string* property = nullptr;

    [[nodiscard]] bool before( const LevelViolation& o ) const
    {
        return std::tie( frontier_index, successor_index ) < std::tie( o.frontier_index, o.successor_index );
    }
};

} // namespace detail

// Parallel level-synchronous BFS over a sharded visited set.
template <Model M>
CheckReport bfs_check( const M& model, const Bounds& bounds, const SafetyQuery<typename M::State>& query,
                       const BfsOptions& opts = {} )
{
    using State = typename M::State;
    Stopwatch clock;
    bounds.validate();
    CheckReport report = make_report( model, "bfs", bounds );
    report.properties = query.names();
    report.soundness = opts.store == StoreMode::Exact ? Soundness::Exact : Soundness::Probabilistic;

    const std::size_t stride = model.encoded_size();
    ShardedStateStore store{ stride, opts.store };
    std::string frontier;
    std::vector<std::uint64_t> frontier_ids;

    auto finish = [&]( Verdict v ) {
        report.verdict = v;
        report.distinct_states = store.size();
        report.wall_ms = clock.elapsed_ms();
        return report;
    };
    auto parent_of = [&]( std::uint64_t id ) { return store.parent( id ); };
    auto step_of = [&]( std::uint64_t id ) { return store.step( id ); };

    try
    {
        auto inits = model.initial_states();
        for( std::size_t k = 0; k < inits.size(); ++k )
        {
            const State& s = inits[ k ];
            if( const auto* bad = detail::first_failure( query, s ) )
            {
                report.violated_property = *bad;
                report.trace = { trace_step( model, std::nullopt, s ) };
                return finish( Verdict::Violation );
            }
            if( !model.within_bounds( s, bounds ) )
                continue;
            std::string enc = encode( model, s );
            auto [inserted, id] =
                store.insert( enc, fingerprint_bytes( enc ).value, no_parent, static_cast<std::uint32_t>( k ) );
            if( inserted )
            {
                frontier += enc;
                frontier_ids.push_back( id );
            }
        }

        const int workers = opts.workers > 0 ? opts.workers : omp_get_max_threads();
        int depth = 0;
        while( !frontier_ids.empty() )
        {
            report.diameter = depth;
            if( bounds.max_depth && depth >= *bounds.max_depth )
                break;

            const std::size_t count = frontier_ids.size();
            std::vector<std::string> next_bytes( workers );
            std::vector<std::vector<std::uint64_t>> next_ids( workers );
            std::vector<detail::LevelViolation> found( workers );
            std::atomic<bool> over_budget{ false };
            std::exception_ptr error;

#pragma omp parallel num_threads( workers )
            {
                const int tid = omp_get_thread_num();
                std::string enc;
                enc.reserve( stride );
#pragma omp for schedule( dynamic, 64 )
                for( std::size_t i = 0; i < count; ++i )
                {
                    if( over_budget.load( std::memory_order_relaxed ) )
                        continue;
                    try
                    {
                        State s = model.decode( std::string_view{ frontier }.substr( i * stride, stride ) );
                        auto succ = model.successors( s );
                        for( std::size_t k = 0; k < succ.size(); ++k )
                        {
                            const State& t = succ[ k ].target;
                            if( const auto* bad = detail::first_failure( query, s, t ) )
                            {
                                detail::LevelViolation v{ i, k, bad };
                                if( v.before( found[ tid ] ) )
                                    found[ tid ] = v;
                            }
                            if( !model.within_bounds( t, bounds ) )
                                continue;
                            enc.clear();
                            model.encode( t, enc );
                            auto [inserted, id] = store.insert( enc, fingerprint_bytes( enc ).value, frontier_ids[ i ],
                                                                static_cast<std::uint32_t>( k ) );
                            if( inserted )
                            {
                                next_bytes[ tid ] += enc;
                                next_ids[ tid ].push_back( id );
                            }
                        }
                        if( opts.max_states && store.size() > *opts.max_states )
                            over_budget = true;
                    }
                    catch( ... )
                    {
#pragma omp critical( tdcheck_bfs_error )
                        if( !error )
                            error = std::current_exception();
                        over_budget = true;
                    }
                }
            }
            if( error )
                std::rethrow_exception( error );

            detail::LevelViolation best;
            for( const auto& v : found )
                if( v.property && v.before( best ) )
                    best = v;
            if( best.property )
            {
                report.violated_property = *best.property;
                report.trace = detail::rebuild_trace( model, frontier_ids[ best.frontier_index ], parent_of, step_of );
                State s = model.decode( std::string_view{ frontier }.substr( best.frontier_index * stride, stride ) );
                auto succ = model.successors( s );
                auto& tr = succ.at( best.successor_index );
                report.trace.push_back( trace_step( model, tr.label, tr.target ) );
                report.diameter = depth + 1;
                return finish( Verdict::Violation );
            }
            if( over_budget )
            {
                report.message = "state budget exhausted";
                return finish( Verdict::Inconclusive );
            }

            frontier.clear();
            frontier_ids.clear();
            for( int w = 0; w < workers; ++w )
            {
                frontier += next_bytes[ w ];
                frontier_ids.insert( frontier_ids.end(), next_ids[ w ].begin(), next_ids[ w ].end() );
            }
            ++depth;
        }
        return finish( Verdict::Pass );
    }
    catch( const std::bad_alloc& )
    {
        report.message = "out of memory";
        return finish( Verdict::Inconclusive );
    }
}

// Single-threaded reference: std::unordered_map keyed by canonical encoding,
// parent links by encoding. Same bound and counting semantics as bfs_check.
template <Model M>
CheckReport bfs_check_serial( const M& model, const Bounds& bounds, const SafetyQuery<typename M::State>& query )
{
    using State = typename M::State;
    Stopwatch clock;
    bounds.validate();
    CheckReport report = make_report( model, "bfs", bounds );
    report.properties = query.names();

    struct Origin
    {
        std::string parent;  // empty for initial states
        Label label;
        int depth = 0;
    };
    std::unordered_map<std::string, Origin> seen;
    std::deque<std::string> queue;

    auto trace_to = [&]( std::string enc ) {
        std::vector<TraceStep> rev;
        for( ;; )
        {
            const Origin& o = seen.at( enc );
            State s = model.decode( enc );
            rev.push_back( trace_step( model, o.parent.empty() ? std::nullopt : std::optional<Label>{ o.label }, s ) );
            if( o.parent.empty() )
                break;
            enc = o.parent;
        }
        std::reverse( rev.begin(), rev.end() );
        return rev;
    };
    auto finish = [&]( Verdict v ) {
        report.verdict = v;
        report.distinct_states = seen.size();
        report.wall_ms = clock.elapsed_ms();
        return report;
    };

    for( const State& s : model.initial_states() )
    {
        if( const auto* bad = detail::first_failure( query, s ) )
        {
            report.violated_property = *bad;
            report.trace = { trace_step( model, std::nullopt, s ) };
            return finish( Verdict::Violation );
        }
        if( !model.within_bounds( s, bounds ) )
            continue;
        auto enc = encode( model, s );
        if( seen.emplace( enc, Origin{} ).second )
            queue.push_back( enc );
    }

    while( !queue.empty() )
    {
        std::string cur = std::move( queue.front() );
        queue.pop_front();
        const int depth = seen.at( cur ).depth;
        report.diameter = std::max( report.diameter, depth );
        if( bounds.max_depth && depth >= *bounds.max_depth )
            continue;
        State s = model.decode( cur );
        for( auto& [label, t] : model.successors( s ) )
        {
            if( const auto* bad = detail::first_failure( query, s, t ) )
            {
                report.violated_property = *bad;
                report.trace = trace_to( cur );
                report.trace.push_back( trace_step( model, label, t ) );
                report.diameter = depth + 1;
                return finish( Verdict::Violation );
            }
            if( !model.within_bounds( t, bounds ) )
                continue;
            auto enc = encode( model, t );
            if( seen.emplace( enc, Origin{ cur, label, depth + 1 } ).second )
                queue.push_back( std::move( enc ) );
        }
    }
    return finish( Verdict::Pass );
}

template <Model M>
CheckReport check_quiescence( const M& model, const Bounds& bounds, const BfsOptions& opts = {} )
{
    SafetyQuery<typename M::State> q;
    q.action_invariants.push_back( action_predicate( model, "Quiescence" ) );
    return bfs_check( model, bounds, q, opts );
}

} // namespace tdcheck
