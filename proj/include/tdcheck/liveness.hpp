#pragma once

// P ~> Q under weak fairness.
//
// The bounded reachability graph is built once. A counterexample is a fair
// behavior that reaches a P /\ ~Q state and then stays in ~Q forever, so we
// restrict to ~Q states reachable from P /\ ~Q states through ~Q states and
// look for a strongly connected component that can host a fair cycle.
// Every state may stutter, so every SCC (even a single state without a
// self-edge) is a cycle. Taking the whole SCC as the cycle is optimal for
// weak fairness: an SCC is a witness iff for each WF(A) it contains an
// <A>_vars edge (source != target) or a state where <A>_vars is disabled.

#include "tdcheck/check_report.hpp"
#include "tdcheck/state_store.hpp"

#include <algorithm>
#include <deque>
#include <new>

namespace tdcheck
{

namespace detail
{

struct LiveEdge
{
    std::uint32_t target;
    std::uint32_t step;  // successor index, for replay
    std::uint32_t fair_mask;
};

struct LiveGraph
{
    std::vector<std::uint64_t> offsets{ 0 };
    std::vector<LiveEdge> edges;
    std::vector<std::uint8_t> premise, goal, truncated;
    std::vector<std::uint32_t> enabled_mask;

    [[nodiscard]] std::size_t size() const { return premise.size(); }
    [[nodiscard]] std::span<const LiveEdge> out( std::uint32_t v ) const
    {
        return std::span<const LiveEdge>{ edges }.subspan( offsets[ v ], offsets[ v + 1 ] - offsets[ v ] );
    }
};

// Iterative Tarjan over the vertices with in_region set. Returns the SCC id
// per vertex (UINT32_MAX outside the region) and the number of SCCs.
inline std::pair<std::vector<std::uint32_t>, std::uint32_t> region_sccs( const LiveGraph& g,
                                                                        const std::vector<std::uint8_t>& in_region )
{
    const std::uint32_t none = UINT32_MAX;
    const auto n = static_cast<std::uint32_t>( g.size() );
    std::vector<std::uint32_t> index( n, none ), low( n, 0 ), comp( n, none );
    std::vector<std::uint8_t> on_stack( n, 0 );
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> call;  // (vertex, next edge offset)
    std::uint32_t counter = 0, ncomp = 0;

    for( std::uint32_t root = 0; root < n; ++root )
    {
        if( !in_region[ root ] || index[ root ] != none )
            continue;
        call.push_back( { root, g.offsets[ root ] } );
        index[ root ] = low[ root ] = counter++;
        stack.push_back( root );
        on_stack[ root ] = 1;
        while( !call.empty() )
        {
            auto& [v, e] = call.back();
            if( e < g.offsets[ v + 1 ] )
            {
                std::uint32_t w = g.edges[ e ].target;
                ++e;
                if( !in_region[ w ] )
                    continue;
                if( index[ w ] == none )
                {
                    index[ w ] = low[ w ] = counter++;
                    stack.push_back( w );
                    on_stack[ w ] = 1;
                    call.push_back( { w, g.offsets[ w ] } );
                }
                else if( on_stack[ w ] )
                    low[ v ] = std::min( low[ v ], index[ w ] );
                continue;
            }
            std::uint32_t done = v;
            call.pop_back();
            if( !call.empty() )
                low[ call.back().first ] = std::min( low[ call.back().first ], low[ done ] );
            if( low[ done ] == index[ done ] )
            {
                std::uint32_t w;
                do
                {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[ w ] = 0;
                    comp[ w ] = ncomp;
                } while( w != done );
                ++ncomp;
            }
        }
    }
    return { std::move( comp ), ncomp };
}

// Shortest edge path from any source to any target, moving only through
// vertices accepted by `allowed`. Returns the edges (from, edge index).
template <class Allowed, class IsTarget>
std::vector<std::pair<std::uint32_t, std::uint64_t>> shortest_path( const LiveGraph& g,
                                                                   const std::vector<std::uint32_t>& sources,
                                                                   Allowed allowed, IsTarget is_target )
{
    std::vector<std::uint64_t> via( g.size(), UINT64_MAX );
    std::vector<std::uint32_t> from( g.size(), UINT32_MAX );
    std::vector<std::uint8_t> seen( g.size(), 0 );
    std::deque<std::uint32_t> queue;
    for( auto s : sources )
    {
        if( seen[ s ] )
            continue;
        seen[ s ] = 1;
        queue.push_back( s );
    }
    std::uint32_t hit = UINT32_MAX;
    while( !queue.empty() )
    {
        auto v = queue.front();
        queue.pop_front();
        if( is_target( v ) )
        {
            hit = v;
            break;
        }
        for( std::uint64_t e = g.offsets[ v ]; e < g.offsets[ v + 1 ]; ++e )
        {
            auto w = g.edges[ e ].target;
            if( seen[ w ] || !allowed( w ) )
                continue;
            seen[ w ] = 1;
            from[ w ] = v;
            via[ w ] = e;
            queue.push_back( w );
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint64_t>> path;
    if( hit == UINT32_MAX )
        throw std::logic_error( "no path inside the liveness region" );
    for( auto v = hit; via[ v ] != UINT64_MAX; v = from[ v ] )
        path.push_back( { from[ v ], via[ v ] } );
    std::reverse( path.begin(), path.end() );
    return path;
}

} // namespace detail

template <Model M>
CheckReport check_leadsto( const M& model, const Bounds& bounds, const LeadsTo<typename M::State>& property,
                           const std::string& name = "leadsto" )
{
    using State = typename M::State;
    Stopwatch clock;
    bounds.validate();
    CheckReport report = make_report( model, "leadsto", bounds );
    report.properties = { name };
    if( property.fairness.size() > 32 )
        throw ConfigError( "at most 32 fairness constraints are supported" );

    StateStore store{ model.encoded_size(), StoreMode::Exact };
    detail::LiveGraph g;
    auto finish = [&]( Verdict v ) {
        report.verdict = v;
        report.distinct_states = store.size();
        report.wall_ms = clock.elapsed_ms();
        report.stats[ "edges" ] = g.edges.size();
        return report;
    };

    try
    {
        // Build the graph. Store indices are BFS order, so offsets grow in order.
        auto inits = model.initial_states();
        std::string enc;
        for( std::size_t k = 0; k < inits.size(); ++k )
        {
            if( !model.within_bounds( inits[ k ], bounds ) )
                continue;
            enc.clear();
            model.encode( inits[ k ], enc );
            store.insert( enc, fingerprint_bytes( enc ).value, no_parent, static_cast<std::uint32_t>( k ) );
        }
        std::vector<std::uint32_t> depth( store.size(), 0 );
        for( std::uint32_t v = 0; v < store.size(); ++v )
        {
            report.diameter = std::max<int>( report.diameter, depth[ v ] );
            State s = model.decode( store.key( v ) );
            auto succ = model.successors( s );
            const bool goal = property.goal( s );
            g.premise.push_back( property.premise( s ) ? 1 : 0 );
            g.goal.push_back( goal ? 1 : 0 );
            std::uint32_t enabled_mask = 0;
            for( std::size_t f = 0; f < property.fairness.size(); ++f )
                if( enabled_in( succ, s, property.fairness[ f ].actions ) )
                    enabled_mask |= 1u << f;
            g.enabled_mask.push_back( enabled_mask );
            std::uint8_t truncated = 0;
            const bool expand = !bounds.max_depth || static_cast<int>( depth[ v ] ) < *bounds.max_depth;
            for( std::size_t k = 0; k < succ.size(); ++k )
            {
                const State& t = succ[ k ].target;
                if( !expand || !model.within_bounds( t, bounds ) )
                {
                    if( !property.goal( t ) )
                        truncated = 1;
                    continue;
                }
                enc.clear();
                model.encode( t, enc );
                auto [inserted, w] = store.insert( enc, fingerprint_bytes( enc ).value, v, static_cast<std::uint32_t>( k ) );
                if( inserted )
                    depth.push_back( depth[ v ] + 1 );
                std::uint32_t mask = 0;
                if( !( t == s ) )
                    for( std::size_t f = 0; f < property.fairness.size(); ++f )
                        if( property.fairness[ f ].actions && property.fairness[ f ].actions( succ[ k ].label ) )
                            mask |= 1u << f;
                g.edges.push_back( { w, static_cast<std::uint32_t>( k ), mask } );
            }
            g.truncated.push_back( truncated );
            g.offsets.push_back( g.edges.size() );
        }
    }
    catch( const std::bad_alloc& )
    {
        report.message = "out of memory while building the state graph";
        return finish( Verdict::Inconclusive );
    }

    // Region: ~Q states reachable from P /\ ~Q states through ~Q states.
    const auto n = static_cast<std::uint32_t>( g.size() );
    std::vector<std::uint8_t> in_region( n, 0 );
    std::vector<std::uint32_t> sources;
    std::deque<std::uint32_t> queue;
    for( std::uint32_t v = 0; v < n; ++v )
        if( g.premise[ v ] && !g.goal[ v ] )
        {
            in_region[ v ] = 1;
            sources.push_back( v );
            queue.push_back( v );
        }
    while( !queue.empty() )
    {
        auto v = queue.front();
        queue.pop_front();
        for( const auto& e : g.out( v ) )
            if( !g.goal[ e.target ] && !in_region[ e.target ] )
            {
                in_region[ e.target ] = 1;
                queue.push_back( e.target );
            }
    }
    std::uint64_t region_size = 0;
    for( std::uint32_t v = 0; v < n; ++v )
        if( in_region[ v ] )
        {
            ++region_size;
            if( g.truncated[ v ] )
            {
                report.message = "a ~goal state in the checked region has successors outside the bounds; the "
                                 "state constraint may mask a non-progress cycle";
                report.stats[ "region_states" ] = region_size;
                return finish( Verdict::Inconclusive );
            }
        }
    report.stats[ "region_states" ] = region_size;

    auto [comp, ncomp] = detail::region_sccs( g, in_region );
    const std::size_t nf = property.fairness.size();
    const std::uint32_t all_fair = nf == 32 ? ~0u : ( ( 1u << nf ) - 1 );
    std::vector<std::uint32_t> satisfied( ncomp, 0 );
    for( std::uint32_t v = 0; v < n; ++v )
    {
        if( !in_region[ v ] )
            continue;
        satisfied[ comp[ v ] ] |= ~g.enabled_mask[ v ] & all_fair;
        for( const auto& e : g.out( v ) )
            if( in_region[ e.target ] && comp[ e.target ] == comp[ v ] )
                satisfied[ comp[ v ] ] |= e.fair_mask;
    }
    report.stats[ "sccs" ] = ncomp;

    std::uint32_t witness = UINT32_MAX;
    for( std::uint32_t c = 0; c < ncomp && witness == UINT32_MAX; ++c )
        if( ( satisfied[ c ] & all_fair ) == all_fair )
            witness = c;
    if( witness == UINT32_MAX )
        return finish( Verdict::Pass );

    // Lasso: init -> premise state -> SCC entry, then a cycle through the
    // waypoints that make it fair.
    auto in_witness = [&]( std::uint32_t v ) { return in_region[ v ] && comp[ v ] == witness; };
    auto to_scc = detail::shortest_path(
        g, sources, [&]( std::uint32_t v ) { return in_region[ v ] != 0; }, in_witness );
    std::uint32_t start = to_scc.empty() ? UINT32_MAX : to_scc.front().first;
    if( start == UINT32_MAX )
        for( auto s : sources )
            if( in_witness( s ) )
            {
                start = s;
                break;
            }

    std::vector<std::uint32_t> chain;
    for( std::uint64_t cur = start; cur != no_parent; cur = store.parent( static_cast<std::uint32_t>( cur ) ) )
        chain.push_back( static_cast<std::uint32_t>( cur ) );
    std::reverse( chain.begin(), chain.end() );

    auto inits = model.initial_states();
    State s = inits.at( store.step( chain.front() ) );
    report.trace.push_back( trace_step( model, std::nullopt, s ) );
    auto follow = [&]( std::uint32_t step, std::vector<TraceStep>& out ) {
        auto succ = model.successors( s );
        auto& tr = succ.at( step );
        out.push_back( trace_step( model, tr.label, tr.target ) );
        s = std::move( tr.target );
    };
    for( std::size_t k = 1; k < chain.size(); ++k )
        follow( store.step( chain[ k ] ), report.trace );
    for( const auto& [v, e] : to_scc )
        follow( g.edges[ e ].step, report.trace );
    const std::uint32_t entry = to_scc.empty() ? start : g.edges[ to_scc.back().second ].target;

    // Waypoints: one fair edge or one disabled state per constraint.
    struct Waypoint
    {
        std::uint32_t vertex;
        std::uint64_t edge;  // UINT64_MAX: just visit the vertex
    };
    std::vector<Waypoint> waypoints;
    for( std::size_t f = 0; f < nf; ++f )
    {
        bool placed = false;
        for( std::uint32_t v = 0; v < n && !placed; ++v )
        {
            if( !in_witness( v ) )
                continue;
            for( std::uint64_t e = g.offsets[ v ]; e < g.offsets[ v + 1 ]; ++e )
                if( ( g.edges[ e ].fair_mask >> f & 1u ) && in_witness( g.edges[ e ].target ) )
                {
                    waypoints.push_back( { v, e } );
                    placed = true;
                    break;
                }
        }
        for( std::uint32_t v = 0; v < n && !placed; ++v )
            if( in_witness( v ) && !( g.enabled_mask[ v ] >> f & 1u ) )
            {
                waypoints.push_back( { v, UINT64_MAX } );
                placed = true;
            }
    }

    std::uint32_t at = entry;
    auto walk_to = [&]( std::uint32_t target ) {
        if( at == target )
            return;
        auto path = detail::shortest_path(
            g, { at }, in_witness, [&]( std::uint32_t v ) { return v == target; } );
        for( const auto& [v, e] : path )
            follow( g.edges[ e ].step, report.cycle );
        at = target;
    };
    for( const auto& wp : waypoints )
    {
        walk_to( wp.vertex );
        if( wp.edge != UINT64_MAX )
        {
            follow( g.edges[ wp.edge ].step, report.cycle );
            at = g.edges[ wp.edge ].target;
        }
    }
    walk_to( entry );
    if( report.cycle.empty() )
        report.cycle.push_back( trace_step( model, Label::make( Action::Stutter ), s ) );

    report.violated_property = name;
    report.message = "fair lasso keeps '" + property.goal_name + "' false after '" + property.premise_name + "'";
    return finish( Verdict::Violation );
}

template <Model M>
CheckReport check_leadsto( const M& model, const Bounds& bounds, std::string_view name )
{
    return check_leadsto( model, bounds, leadsto_property( model, name ), std::string( name ) );
}

} // namespace tdcheck
