#pragma once

// Glue between kernel types and the oracle, plus small fixtures.

#include "oracle.hpp"

#include "tdcheck/abstract_spec.hpp"
#include "tdcheck/safra_spec.hpp"

#include "tdcheck/rng.hpp"

#include <set>
#include <sstream>

namespace tdtest
{

using namespace tdcheck;

inline SpecInstance abstract_instance( int n, std::optional<std::string> mutant = std::nullopt )
{
    return SpecInstance{ "abstract", n, std::move( mutant ), std::nullopt };
}

inline SpecInstance safra_instance( int n, std::optional<std::string> mutant = std::nullopt,
                                    std::optional<std::string> token_start = std::nullopt )
{
    return SpecInstance{ "safra", n, std::move( mutant ), std::move( token_start ) };
}

inline Bounds bounds( std::optional<int> k, std::optional<int> c = std::nullopt, std::optional<int> q = std::nullopt )
{
    Bounds b;
    b.pending = k;
    b.counter = c;
    b.token_q = q;
    return b;
}

inline oracle::Step to_step( const Label& l )
{
    return { std::string( action_name( l.action ) ), l.args[ 0 ], l.args[ 1 ] };
}

inline oracle::AState to_oracle( const AbstractState& s )
{
    oracle::AState o;
    for( bool a : s.active )
        o.active.push_back( a ? 1 : 0 );
    o.pending = s.pending;
    o.term_detect = s.term_detect ? 1 : 0;
    return o;
}

inline AbstractState from_oracle( const oracle::AState& o )
{
    AbstractState s;
    for( int a : o.active )
        s.active.push_back( a != 0 );
    s.pending = o.pending;
    s.term_detect = o.term_detect != 0;
    return s;
}

inline oracle::SState to_oracle( const SafraState& s )
{
    oracle::SState o;
    for( std::size_t i = 0; i < s.active.size(); ++i )
    {
        o.active.push_back( s.active[ i ] ? 1 : 0 );
        o.color.push_back( s.color[ i ] == Color::Black ? 1 : 0 );
    }
    o.pending = s.pending;
    o.counter = s.counter;
    o.tp = s.token.pos;
    o.tc = s.token.color == Color::Black ? 1 : 0;
    o.tq = s.token.q;
    return o;
}

inline SafraState from_oracle( const oracle::SState& o )
{
    SafraState s;
    for( std::size_t i = 0; i < o.active.size(); ++i )
    {
        s.active.push_back( o.active[ i ] != 0 );
        s.color.push_back( o.color[ i ] ? Color::Black : Color::White );
    }
    s.pending = o.pending;
    s.counter = o.counter;
    s.token = Token{ o.tp, o.tc ? Color::Black : Color::White, o.tq };
    return s;
}

inline oracle::SMutant oracle_mutant( const std::optional<std::string>& id )
{
    oracle::SMutant m;
    if( !id )
        return m;
    m.adopt_color = *id == "token-adopts-node-color";
    m.pass_active = *id == "pass-while-active";
    m.no_whiten = *id == "no-whiten-on-pass";
    m.no_initiate_black = *id == "no-initiate-when-black";
    m.receiver_stays = *id == "receiver-not-blackened";
    return m;
}

using Triple = std::tuple<std::uint64_t, oracle::Step, std::uint64_t>;

struct RelationDiff
{
    std::size_t kernel_edges = 0;
    std::size_t oracle_edges = 0;
    std::size_t kernel_inits = 0;
    std::size_t oracle_inits = 0;
    std::string first_difference;  // empty: equal

    [[nodiscard]] bool equal() const { return first_difference.empty(); }
};

inline std::string describe( const Triple& t )
{
    std::ostringstream os;
    os << "(" << std::get<0>( t ) << ", " << std::get<1>( t ).action << "(" << std::get<1>( t ).i << ","
       << std::get<1>( t ).j << "), " << std::get<2>( t ) << ")";
    return os.str();
}

inline std::string describe( std::uint64_t idx )
{
    return "state #" + std::to_string( idx );
}

template <class T>
std::string set_difference_text( const std::set<T>& a, const std::set<T>& b, const char* only_a, const char* only_b )
{
    for( const auto& x : a )
        if( !b.count( x ) )
            return std::string( only_a ) + " " + describe( x );
    for( const auto& x : b )
        if( !a.count( x ) )
            return std::string( only_b ) + " " + describe( x );
    return {};
}

// Kernel successor relation vs oracle pair relation over the abstract
// universe with pending <= k.
inline RelationDiff compare_abstract( int n, int k, std::optional<std::string> mutant = std::nullopt )
{
    AbstractSpec spec{ abstract_instance( n, mutant ) };
    const bool drop_guard = mutant && *mutant == "drop-send-guard";
    const auto universe = oracle::abstract_universe( n, k );
    auto index_of = [&]( const oracle::AState& s ) -> std::optional<std::uint64_t> {
        auto it = std::find( universe.begin(), universe.end(), s );
        if( it == universe.end() )
            return std::nullopt;
        return static_cast<std::uint64_t>( it - universe.begin() );
    };

    std::set<Triple> kernel, reference;
    std::set<std::uint64_t> kinit, oinit;
    for( std::uint64_t a = 0; a < universe.size(); ++a )
    {
        for( const auto& tr : spec.successors( from_oracle( universe[ a ] ) ) )
            if( auto b = index_of( to_oracle( tr.target ) ) )
                kernel.insert( { a, to_step( tr.label ), *b } );
        if( oracle::abstract_init( universe[ a ] ) )
            oinit.insert( a );
    }
    for( const auto& s : spec.initial_states() )
        if( auto i = index_of( to_oracle( s ) ) )
            kinit.insert( *i );
    const auto steps = oracle::abstract_steps( n );
    for( std::uint64_t a = 0; a < universe.size(); ++a )
        for( std::uint64_t b = 0; b < universe.size(); ++b )
            for( const auto& st : steps )
                if( oracle::abstract_rel( st, universe[ a ], universe[ b ], drop_guard ) )
                    reference.insert( { a, st, b } );

    RelationDiff d{ kernel.size(), reference.size(), kinit.size(), oinit.size(), {} };
    d.first_difference = set_difference_text( kinit, oinit, "kernel-only initial", "oracle-only initial" );
    if( d.first_difference.empty() )
        d.first_difference = set_difference_text( kernel, reference, "kernel-only edge", "oracle-only edge" );
    return d;
}

// Same for Safra: all (s, t) pairs of the bounded universe are evaluated
// against every action instance whose guard holds in s.
inline RelationDiff compare_safra( int n, oracle::SBounds b, std::optional<std::string> mutant = std::nullopt )
{
    SafraSpec spec{ safra_instance( n, mutant ) };
    const auto om = oracle_mutant( mutant );
    const bool init_white = mutant && *mutant == "token-init-white";
    const std::uint64_t size = oracle::safra_universe_size( n, b );
    std::vector<oracle::SState> universe;
    universe.reserve( size );
    for( std::uint64_t i = 0; i < size; ++i )
        universe.push_back( oracle::safra_state( n, b, i ) );

    std::set<Triple> kernel, reference;
    std::set<std::uint64_t> kinit, oinit;
    for( std::uint64_t a = 0; a < size; ++a )
    {
        for( const auto& tr : spec.successors( from_oracle( universe[ a ] ) ) )
            if( auto t = oracle::safra_index( b, to_oracle( tr.target ) ) )
                kernel.insert( { a, to_step( tr.label ), *t } );
        if( oracle::safra_init( universe[ a ], init_white ) )
            oinit.insert( a );
    }
    for( const auto& s : spec.initial_states() )
        if( auto i = oracle::safra_index( b, to_oracle( s ) ) )
            kinit.insert( *i );

    const auto steps = oracle::safra_steps( n );
    std::vector<const oracle::Step*> enabled;
    for( std::uint64_t a = 0; a < size; ++a )
    {
        enabled.clear();
        for( const auto& st : steps )
            if( oracle::safra_guard( st, universe[ a ], om ) )
                enabled.push_back( &st );
        if( enabled.empty() )
            continue;
        for( std::uint64_t t = 0; t < size; ++t )
            for( const auto* st : enabled )
                if( oracle::safra_rel( *st, universe[ a ], universe[ t ], om ) )
                    reference.insert( { a, *st, t } );
    }

    RelationDiff d{ kernel.size(), reference.size(), kinit.size(), oinit.size(), {} };
    d.first_difference = set_difference_text( kinit, oinit, "kernel-only initial", "oracle-only initial" );
    if( d.first_difference.empty() )
        d.first_difference = set_difference_text( kernel, reference, "kernel-only edge", "oracle-only edge" );
    return d;
}

// Changes exactly one field of a JSON Safra state; returns its path.
inline std::string flip_field( json& state, Rng& rng )
{
    const int n = static_cast<int>( state.at( "active" ).size() );
    const int i = static_cast<int>( uniform_below( rng, n ) );
    const auto delta = uniform_below( rng, 2 ) ? 1 : -1;
    auto toggle_color = []( json& c ) { c = c == "white" ? "black" : "white"; };
    switch( uniform_below( rng, 7 ) )
    {
    case 0:
        state[ "active" ][ i ] = !state[ "active" ][ i ].get<bool>();
        return "active[" + std::to_string( i ) + "]";
    case 1:
        state[ "pending" ][ i ] = state[ "pending" ][ i ].get<int>() + 1;
        return "pending[" + std::to_string( i ) + "]";
    case 2:
        toggle_color( state[ "color" ][ i ] );
        return "color[" + std::to_string( i ) + "]";
    case 3:
        state[ "counter" ][ i ] = state[ "counter" ][ i ].get<int>() + delta;
        return "counter[" + std::to_string( i ) + "]";
    case 4:
        if( n > 1 )
        {
            state[ "token" ][ "p" ] = ( state[ "token" ][ "p" ].get<int>() + 1 ) % n;
            return "token.p";
        }
        [[fallthrough]];
    case 5:
        toggle_color( state[ "token" ][ "c" ] );
        return "token.c";
    default:
        state[ "token" ][ "q" ] = state[ "token" ][ "q" ].get<int>() + delta;
        return "token.q";
    }
}

} // namespace tdtest
